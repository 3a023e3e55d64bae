// probe: one criterion-1-style trace at n=512
use dynlis_core::exact::{scheduled_exact, Params};
use dynlis_core::rng::Rng64;
use dynlis_core::seq::EditOp;
use dynlis_core::static_lis::patience_lis;
use std::time::Instant;

fn main() {
    let mut rng = Rng64::new(7);
    let n = 512usize;
    let mut pool: Vec<i64> = (0..(4 * n as i64 + 40 * n as i64)).collect();
    rng.shuffle(&mut pool);
    let vals: Vec<i64> = pool.drain(..n).collect();
    let t0 = Instant::now();
    let mut sched = scheduled_exact(&vals, Params::default(), 1);
    println!("build: {:?}", t0.elapsed());
    let mut model = vals.clone();
    let t1 = Instant::now();
    let ops = 10 * n;
    for i in 0..ops {
        let insert = model.is_empty() || rng.gen_bool();
        let op = if insert {
            let pos = rng.gen_usize(model.len() + 1) + 1;
            let val = pool.pop().unwrap();
            model.insert(pos - 1, val);
            EditOp::Insert { pos, val }
        } else {
            let pos = rng.gen_usize(model.len()) + 1;
            model.remove(pos - 1);
            EditOp::Delete { pos }
        };
        let got = sched.step(op);
        let want = patience_lis(&model);
        assert_eq!(got, want, "step {i}");
    }
    let dt = t1.elapsed();
    println!("{} ops in {:?} ({:?}/op)", ops, dt, dt / ops as u32);
}
