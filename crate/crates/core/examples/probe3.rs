// probe: criterion-8 scaling run
use dynlis_core::engine::{bench_engine, log_log_slope, EngineKind, EngineOptions};
fn main() {
    let opts = EngineOptions {
        kind: EngineKind::Exact,
        ..EngineOptions::default()
    };
    let mut samples = Vec::new();
    for (i, n) in [4096usize, 8192, 16384, 32768, 65536].into_iter().enumerate() {
        let s = bench_engine(&opts, n, 24, 100 + i as u64);
        println!("n={} amortized={}ns total={:?}ms", s.n, s.amortized_ns, s.total_ns / 1_000_000);
        samples.push(s);
    }
    println!("slope = {:.4}", log_log_slope(&samples));
}
