// probe: ensemble phase breakdown at n=512
use dynlis_core::exact::{Ensemble, Params};
use dynlis_core::rng::Rng64;
use dynlis_core::seq::EditOp;
use std::time::Instant;

fn main() {
    let mut rng = Rng64::new(7);
    let n = 512usize;
    let mut pool: Vec<i64> = (0..20000).collect();
    rng.shuffle(&mut pool);
    let vals: Vec<i64> = pool.drain(..n).collect();

    let t = Instant::now();
    let mut reps = 0usize;
    for i in 0..200 {
        let e = Ensemble::build(&vals, &Params::default(), i);
        reps += e.members().len();
    }
    println!("200 builds: {:?} ({} members total)", t.elapsed(), reps);

    let mut e = Ensemble::build(&vals, &Params::default(), 3);
    let t = Instant::now();
    let mut model = vals.clone();
    for _ in 0..1 {
        let pos = rng.gen_usize(model.len() + 1) + 1;
        let val = pool.pop().unwrap();
        model.insert(pos - 1, val);
        e.apply(EditOp::Insert { pos, val });
    }
    println!("1 apply: {:?}", t.elapsed());
    let t = Instant::now();
    let r = e.report();
    println!("1 report: {:?} -> {}", t.elapsed(), r);
    let t = Instant::now();
    let r2 = e.report();
    println!("cached report: {:?} -> {}", t.elapsed(), r2);
}
