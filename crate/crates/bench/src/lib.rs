//! Shared input generators for the criterion benches.

use dynlis_core::rng::Rng64;
use dynlis_core::seq::EditOp;

/// Random permutation plus a balanced random edit script over it.
pub fn random_trace(n: usize, ops: usize, seed: u64) -> (Vec<i64>, Vec<EditOp>) {
    let mut rng = Rng64::new(seed);
    let mut pool: Vec<i64> = (0..(2 * (n + ops)) as i64).collect();
    rng.shuffle(&mut pool);
    let initial: Vec<i64> = pool.drain(..n).collect();
    let mut len = n;
    let mut script = Vec::with_capacity(ops);
    for _ in 0..ops {
        let insert = len == 0 || rng.gen_bool();
        if insert {
            len += 1;
            script.push(EditOp::Insert {
                pos: rng.gen_usize(len) + 1,
                val: pool.pop().unwrap(),
            });
        } else {
            script.push(EditOp::Delete {
                pos: rng.gen_usize(len) + 1,
            });
            len -= 1;
        }
    }
    (initial, script)
}
