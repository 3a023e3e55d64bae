//! Uniform engine interface for the CLI harness and benchmarks.

use std::time::Instant;

use crate::ccp::LevelForest;
use crate::exact::{scheduled_exact, Params, ScheduledExact};
use crate::grid::{scheduled_approx, ScheduledApprox};
use crate::rng::Rng64;
use crate::seq::{DynSeq, EditOp, SeqError};
use crate::static_lis::{lis_rect_brute, patience_lis, PointSet, Rect};

/// A dynamic LIS engine driven by the trace harness: applies edits,
/// reports the LIS length, and answers rectangle queries over the
/// (position, value) point view of the sequence.
pub trait DynLisEngine {
    fn name(&self) -> &'static str;
    fn len(&self) -> usize;
    fn apply(&mut self, op: EditOp) -> Result<(), SeqError>;
    fn lis(&mut self) -> usize;
    fn rect(&mut self, r: &Rect) -> usize;
    /// Exact answers (rectangle queries included)?
    fn exact(&self) -> bool {
        true
    }
}

fn validate(len: usize, op: EditOp) -> Result<(), SeqError> {
    match op {
        EditOp::Insert { pos, .. } if pos == 0 || pos > len + 1 => {
            Err(SeqError::OutOfRange { pos, len })
        }
        EditOp::Delete { pos } if pos == 0 || pos > len => {
            Err(SeqError::OutOfRange { pos, len })
        }
        _ => Ok(()),
    }
}

/// Full patience recompute per answer; the baseline oracle.
#[derive(Default)]
pub struct PatienceEngine {
    data: Vec<i64>,
}

impl PatienceEngine {
    pub fn new(initial: &[i64]) -> Self {
        PatienceEngine {
            data: initial.to_vec(),
        }
    }

    pub fn contents(&self) -> &[i64] {
        &self.data
    }
}

impl DynLisEngine for PatienceEngine {
    fn name(&self) -> &'static str {
        "patience"
    }
    fn len(&self) -> usize {
        self.data.len()
    }
    fn apply(&mut self, op: EditOp) -> Result<(), SeqError> {
        validate(self.data.len(), op)?;
        match op {
            EditOp::Insert { pos, val } => {
                if self.data.contains(&val) {
                    return Err(SeqError::Duplicate(val));
                }
                self.data.insert(pos - 1, val);
            }
            EditOp::Delete { pos } => {
                self.data.remove(pos - 1);
            }
        }
        Ok(())
    }
    fn lis(&mut self) -> usize {
        patience_lis(&self.data)
    }
    fn rect(&mut self, r: &Rect) -> usize {
        lis_rect_brute(&PointSet::from_sequence(&self.data), r)
    }
}

/// Level-forest engine: O(opt log n) updates.
pub struct CcpEngine {
    seq: DynSeq,
    forest: LevelForest,
}

impl CcpEngine {
    pub fn new(initial: &[i64]) -> Self {
        let seq = DynSeq::from_values(initial);
        let forest = LevelForest::build(&seq);
        CcpEngine { seq, forest }
    }
}

impl DynLisEngine for CcpEngine {
    fn name(&self) -> &'static str {
        "ccp"
    }
    fn len(&self) -> usize {
        self.seq.len()
    }
    fn apply(&mut self, op: EditOp) -> Result<(), SeqError> {
        match op {
            EditOp::Insert { pos, val } => {
                let h = self.seq.insert(pos, val)?;
                self.forest.insert(&self.seq, h);
            }
            EditOp::Delete { pos } => {
                validate(self.seq.len(), op)?;
                self.forest.delete(&self.seq, pos);
                self.seq.delete(pos)?;
            }
        }
        Ok(())
    }
    fn lis(&mut self) -> usize {
        self.forest.lis()
    }
    fn rect(&mut self, r: &Rect) -> usize {
        lis_rect_brute(&PointSet::from_sequence(&self.seq.to_vec()), r)
    }
}

/// The randomized exact engine: scheduler-rotated ensembles.
pub struct ExactEngine {
    sched: ScheduledExact,
}

impl ExactEngine {
    pub fn new(initial: &[i64], params: Params, seed: u64) -> Self {
        ExactEngine {
            sched: scheduled_exact(initial, params, seed),
        }
    }

    pub fn scheduler(&self) -> &ScheduledExact {
        &self.sched
    }
}

impl DynLisEngine for ExactEngine {
    fn name(&self) -> &'static str {
        "exact"
    }
    fn len(&self) -> usize {
        self.sched.len()
    }
    fn apply(&mut self, op: EditOp) -> Result<(), SeqError> {
        validate(self.sched.len(), op)?;
        self.sched.step(op);
        Ok(())
    }
    fn lis(&mut self) -> usize {
        self.sched.answer()
    }
    fn rect(&mut self, r: &Rect) -> usize {
        // Rectangle queries are exact here: answered against the contents.
        lis_rect_brute(&PointSet::from_sequence(self.sched.contents()), r)
    }
}

/// The (1 - eps)-approximate engine with rectangle queries.
pub struct ApproxEngine {
    sched: ScheduledApprox,
    eps: f64,
}

impl ApproxEngine {
    pub fn new(initial: &[i64], eps: f64, kappa: f64) -> Self {
        ApproxEngine {
            sched: scheduled_approx(initial, eps, kappa),
            eps,
        }
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }
}

impl DynLisEngine for ApproxEngine {
    fn name(&self) -> &'static str {
        "approx"
    }
    fn len(&self) -> usize {
        self.sched.len()
    }
    fn apply(&mut self, op: EditOp) -> Result<(), SeqError> {
        validate(self.sched.len(), op)?;
        self.sched.step(op);
        Ok(())
    }
    fn lis(&mut self) -> usize {
        self.sched.answer()
    }
    fn rect(&mut self, r: &Rect) -> usize {
        self.sched.with_active(|idx| idx.query_rect(r))
    }
    fn exact(&self) -> bool {
        false
    }
}

/// Which engine a harness command drives.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EngineKind {
    Patience,
    Ccp,
    Exact,
    Approx,
}

impl std::str::FromStr for EngineKind {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "patience" => Ok(EngineKind::Patience),
            "ccp" => Ok(EngineKind::Ccp),
            "exact" => Ok(EngineKind::Exact),
            "approx" => Ok(EngineKind::Approx),
            other => Err(format!("unknown engine {other:?}")),
        }
    }
}

/// Engine construction options shared by the CLI commands.
#[derive(Clone, Copy, Debug)]
pub struct EngineOptions {
    pub kind: EngineKind,
    pub params: Params,
    pub eps: f64,
    pub kappa: f64,
    pub seed: u64,
}

impl Default for EngineOptions {
    fn default() -> Self {
        EngineOptions {
            kind: EngineKind::Patience,
            params: Params::default(),
            eps: 0.25,
            kappa: 1.0,
            seed: 1,
        }
    }
}

pub fn build_engine(initial: &[i64], opts: &EngineOptions) -> Box<dyn DynLisEngine> {
    match opts.kind {
        EngineKind::Patience => Box::new(PatienceEngine::new(initial)),
        EngineKind::Ccp => Box::new(CcpEngine::new(initial)),
        EngineKind::Exact => Box::new(ExactEngine::new(initial, opts.params, opts.seed)),
        EngineKind::Approx => Box::new(ApproxEngine::new(initial, opts.eps, opts.kappa)),
    }
}

/// One bench sample: trace size, op count, total and amortized wall time.
#[derive(Clone, Copy, Debug)]
pub struct BenchSample {
    pub n: usize,
    pub ops: usize,
    pub total_ns: u128,
    pub amortized_ns: u128,
    pub answer_checksum: u64,
}

/// Time `ops` random balanced edits (answer queried after each) on an
/// engine built over a random permutation of size `n`.
pub fn bench_engine(opts: &EngineOptions, n: usize, ops: usize, seed: u64) -> BenchSample {
    let mut rng = Rng64::new(seed);
    let mut pool: Vec<i64> = (0..2 * n as i64 + 16).collect();
    rng.shuffle(&mut pool);
    let initial: Vec<i64> = pool.drain(..n).collect();
    let mut engine = build_engine(&initial, opts);
    let mut len = n;
    let mut checksum = 0u64;
    let start = Instant::now();
    for _ in 0..ops {
        let insert = len == 0 || rng.gen_bool();
        let op = if insert {
            let pos = rng.gen_usize(len + 1) + 1;
            let val = pool.pop().expect("pool sized for trace");
            len += 1;
            EditOp::Insert { pos, val }
        } else {
            let pos = rng.gen_usize(len) + 1;
            len -= 1;
            EditOp::Delete { pos }
        };
        engine.apply(op).expect("generated ops are valid");
        let ans = engine.lis() as u64;
        checksum = checksum
            .rotate_left(7)
            .wrapping_add(ans.wrapping_mul(0x9e37_79b9_7f4a_7c15));
    }
    let total = start.elapsed().as_nanos();
    BenchSample {
        n,
        ops,
        total_ns: total,
        amortized_ns: total / ops.max(1) as u128,
        answer_checksum: checksum,
    }
}

/// Least-squares slope of log(amortized time) against log(n).
pub fn log_log_slope(samples: &[BenchSample]) -> f64 {
    let pts: Vec<(f64, f64)> = samples
        .iter()
        .map(|s| ((s.n as f64).ln(), (s.amortized_ns.max(1) as f64).ln()))
        .collect();
    let n = pts.len() as f64;
    let sx: f64 = pts.iter().map(|p| p.0).sum();
    let sy: f64 = pts.iter().map(|p| p.1).sum();
    let sxx: f64 = pts.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = pts.iter().map(|p| p.0 * p.1).sum();
    (n * sxy - sx * sy) / (n * sxx - sx * sx)
}
