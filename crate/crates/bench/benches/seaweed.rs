use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};

use dynlis_core::monge::{seaweed_product, Perm, SigmaOracle};
use dynlis_core::rng::Rng64;

fn bench_seaweed_product(c: &mut Criterion) {
    let mut group = c.benchmark_group("seaweed_product");
    let mut rng = Rng64::new(42);
    for n in [256usize, 1024, 4096] {
        let a = Perm::random(n, &mut rng);
        let b = Perm::random(n, &mut rng);
        group.bench_with_input(BenchmarkId::from_parameter(n), &n, |bch, _| {
            bch.iter(|| seaweed_product(black_box(&a), black_box(&b)))
        });
    }
    group.finish();
}

fn bench_sigma_oracle(c: &mut Criterion) {
    let mut group = c.benchmark_group("sigma_oracle_query");
    let mut rng = Rng64::new(43);
    let n = 4096;
    let p = Perm::random(n, &mut rng);
    let oracle = SigmaOracle::build(&p);
    group.bench_function("query_4096", |bch| {
        let mut i = 0usize;
        bch.iter(|| {
            i = (i * 31 + 17) % (n + 1);
            black_box(oracle.query(i, n - i))
        })
    });
    group.finish();
}

criterion_group!(benches, bench_seaweed_product, bench_sigma_oracle);
criterion_main!(benches);
