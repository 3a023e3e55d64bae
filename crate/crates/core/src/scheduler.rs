//! Worst-case scheduling of block-based algorithms.
//!
//! A block-based algorithm preprocesses a snapshot of size n in f(n) work,
//! then serves g(n) edits at h(n) worst-case work each. Double-buffering
//! turns this into a dynamic algorithm with worst-case O(max(h, f/g)) work
//! per step: while block B_i serves its last tenth of ops, B_{i+1} builds
//! from a snapshot in equal chunks over half that window, then catches up
//! on the queued edits at two per step, finishing exactly when B_i
//! expires. Preprocessing must be resumable, so factories hand out a
//! [`Warming`] state that the scheduler advances by bounded work chunks.

use std::collections::VecDeque;

use crate::seq::EditOp;

/// A live block instance serving edits and answering LIS queries.
pub trait BlockInstance {
    fn apply(&mut self, op: EditOp);
    fn answer(&mut self) -> usize;
    /// Monotone counter of abstract work units spent so far.
    fn work_units(&self) -> u64;
}

/// Resumable preprocessing of the next block.
pub trait Warming {
    type Instance: BlockInstance;
    /// Spend up to `units` of preprocessing; returns true when complete.
    fn advance(&mut self, units: u64) -> bool;
    fn finish(self) -> Self::Instance;
    fn work_units(&self) -> u64;
}

pub trait BlockFactory {
    type Instance: BlockInstance;
    type Warming: Warming<Instance = Self::Instance>;

    fn begin(&self, snapshot: &[i64], block_index: u64) -> Self::Warming;
    /// Ops served per block; must respect the n/2 + 10 contract guard.
    fn block_len(&self, n: usize) -> usize;
    /// Declared preprocessing work f(n), in the units instances count.
    fn preprocess_units(&self, n: usize) -> u64;
    /// Declared worst-case per-op work h(n).
    fn step_units(&self, n: usize) -> u64;
}

#[derive(Clone, Copy, Debug)]
pub struct SwapEvent {
    pub step: u64,
    pub snapshot_step: u64,
    pub snapshot_len: usize,
}

enum Phase<F: BlockFactory> {
    Building(F::Warming),
    Catching(F::Instance),
}

struct WarmState<F: BlockFactory> {
    phase: Option<Phase<F>>,
    queue: VecDeque<EditOp>,
    build_steps_left: u64,
    chunk: u64,
    snapshot_step: u64,
    snapshot_len: usize,
}

/// Double-buffered scheduler over a block factory.
pub struct BlockScheduler<F: BlockFactory> {
    factory: F,
    shadow: Vec<i64>,
    active: F::Instance,
    block_len: usize,
    served: usize,
    step: u64,
    block_index: u64,
    warm: Option<WarmState<F>>,
    history: Vec<SwapEvent>,
    last_step_work: u64,
    max_ratio: f64,
    active_budget: f64,
}

impl<F: BlockFactory> BlockScheduler<F> {
    pub fn new(factory: F, initial: &[i64]) -> Self {
        let n = initial.len();
        let g = Self::guarded_block_len(&factory, n);
        let mut warming = factory.begin(initial, 0);
        while !warming.advance(u64::MAX) {}
        let active = warming.finish();
        let budget = Self::budget(&factory, n, g);
        BlockScheduler {
            factory,
            shadow: initial.to_vec(),
            active,
            block_len: g,
            served: 0,
            step: 0,
            block_index: 0,
            warm: None,
            history: Vec::new(),
            last_step_work: 0,
            max_ratio: 0.0,
            active_budget: budget,
        }
    }

    fn guarded_block_len(factory: &F, n: usize) -> usize {
        let g = factory.block_len(n);
        assert!(g >= 1, "block length must be positive");
        assert!(g <= n / 2 + 10, "block length exceeds the n/2 + 10 guard");
        g
    }

    fn budget(factory: &F, n: usize, g: usize) -> f64 {
        let h = factory.step_units(n) as f64;
        let fg = factory.preprocess_units(n) as f64 / g as f64;
        h.max(fg).max(1.0)
    }

    /// Apply one edit and return the active instance's answer.
    pub fn step(&mut self, op: EditOp) -> usize {
        let mut step_work = 0u64;

        match op {
            EditOp::Insert { pos, val } => {
                assert!(pos >= 1 && pos <= self.shadow.len() + 1, "bad insert");
                self.shadow.insert(pos - 1, val);
            }
            EditOp::Delete { pos } => {
                assert!(pos >= 1 && pos <= self.shadow.len(), "bad delete");
                self.shadow.remove(pos - 1);
            }
        }
        {
            let w0 = self.active.work_units();
            self.active.apply(op);
            step_work += self.active.work_units() - w0;
        }
        self.served += 1;
        self.step += 1;

        // Ops arriving after the snapshot are queued for the warming block;
        // warming itself starts once nine tenths of the block was served
        // (the snapshot then includes the current op, so it is not queued).
        let window = self.block_len - (9 * self.block_len) / 10;
        if let Some(ws) = &mut self.warm {
            ws.queue.push_back(op);
            step_work += ws.tick();
        } else if self.served + window >= self.block_len {
            self.start_warming();
        }
        if self.served >= self.block_len {
            step_work += self.swap();
        }

        let answer = {
            let w0 = self.active.work_units();
            let a = self.active.answer();
            step_work += self.active.work_units() - w0;
            a
        };

        self.last_step_work = step_work;
        let ratio = step_work as f64 / self.active_budget;
        if ratio > self.max_ratio {
            self.max_ratio = ratio;
        }
        answer
    }

    fn start_warming(&mut self) {
        let snapshot = self.shadow.clone();
        let n = snapshot.len();
        let window = (self.block_len - self.served).max(1);
        let build_steps = (window / 2).max(1) as u64;
        let f = self.factory.preprocess_units(n).max(1);
        self.block_index += 1;
        let warming = self.factory.begin(&snapshot, self.block_index);
        self.warm = Some(WarmState {
            phase: Some(Phase::Building(warming)),
            queue: VecDeque::new(),
            build_steps_left: build_steps,
            chunk: f.div_ceil(build_steps),
            snapshot_step: self.step,
            snapshot_len: n,
        });
    }

    /// Retire the active block and install the warmed one.
    fn swap(&mut self) -> u64 {
        let mut ws = self.warm.take().expect("warming must exist at expiry");
        let mut work = ws.force_finish();
        let Some(Phase::Catching(mut next)) = ws.phase.take() else {
            unreachable!()
        };
        let w0 = next.work_units();
        while let Some(q) = ws.queue.pop_front() {
            next.apply(q);
        }
        work += next.work_units() - w0;
        self.history.push(SwapEvent {
            step: self.step,
            snapshot_step: ws.snapshot_step,
            snapshot_len: ws.snapshot_len,
        });
        self.active = next;
        self.served = 0;
        let n = self.shadow.len();
        self.block_len = Self::guarded_block_len(&self.factory, n);
        self.active_budget = Self::budget(&self.factory, n, self.block_len);
        work
    }

    pub fn answer(&mut self) -> usize {
        self.active.answer()
    }

    /// Run a closure against the active instance (e.g. for queries the
    /// generic interface does not know about).
    pub fn with_active<R>(&mut self, f: impl FnOnce(&mut F::Instance) -> R) -> R {
        f(&mut self.active)
    }

    pub fn len(&self) -> usize {
        self.shadow.len()
    }

    pub fn is_empty(&self) -> bool {
        self.shadow.is_empty()
    }

    pub fn contents(&self) -> &[i64] {
        &self.shadow
    }

    pub fn history(&self) -> &[SwapEvent] {
        &self.history
    }

    pub fn last_step_work(&self) -> u64 {
        self.last_step_work
    }

    /// Largest observed ratio of per-step work to max(h, f/g).
    pub fn max_work_ratio(&self) -> f64 {
        self.max_ratio
    }
}

impl<F: BlockFactory> WarmState<F> {
    /// One scheduler step of warming work; returns units spent.
    fn tick(&mut self) -> u64 {
        match self.phase.as_mut().expect("phase present") {
            Phase::Building(w) => {
                let w0 = w.work_units();
                let done = if self.build_steps_left > 1 {
                    self.build_steps_left -= 1;
                    w.advance(self.chunk)
                } else {
                    self.build_steps_left = 0;
                    w.advance(u64::MAX)
                };
                let spent = w.work_units() - w0;
                if done {
                    self.adopt();
                }
                spent
            }
            Phase::Catching(inst) => {
                let w0 = inst.work_units();
                for _ in 0..2 {
                    if let Some(q) = self.queue.pop_front() {
                        inst.apply(q);
                    }
                }
                inst.work_units() - w0
            }
        }
    }

    /// Complete any remaining preprocessing; returns units spent.
    fn force_finish(&mut self) -> u64 {
        if let Some(Phase::Building(w)) = self.phase.as_mut() {
            let w0 = w.work_units();
            w.advance(u64::MAX);
            let spent = w.work_units() - w0;
            self.adopt();
            spent
        } else {
            0
        }
    }

    fn adopt(&mut self) {
        if let Some(Phase::Building(w)) = self.phase.take() {
            self.phase = Some(Phase::Catching(w.finish()));
        } else {
            unreachable!("adopt called outside the building phase");
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::static_lis::patience_lis;
    use crate::Rng64;

    /// Full-recompute block algorithm: exact answers, O(n log n) each.
    pub struct RecomputeInstance {
        data: Vec<i64>,
        work: u64,
    }

    impl BlockInstance for RecomputeInstance {
        fn apply(&mut self, op: EditOp) {
            match op {
                EditOp::Insert { pos, val } => self.data.insert(pos - 1, val),
                EditOp::Delete { pos } => {
                    self.data.remove(pos - 1);
                }
            }
            self.work += self.data.len() as u64 + 1;
        }
        fn answer(&mut self) -> usize {
            let n = self.data.len() as u64;
            self.work += n * (u64::BITS - n.leading_zeros()).max(1) as u64 + 1;
            patience_lis(&self.data)
        }
        fn work_units(&self) -> u64 {
            self.work
        }
    }

    pub struct RecomputeWarming {
        data: Vec<i64>,
        fed: usize,
        work: u64,
    }

    impl Warming for RecomputeWarming {
        type Instance = RecomputeInstance;
        fn advance(&mut self, units: u64) -> bool {
            let n = self.data.len();
            let take = (units as usize).min(n - self.fed);
            self.fed += take;
            self.work += take as u64 + 1;
            self.fed == n
        }
        fn finish(self) -> RecomputeInstance {
            RecomputeInstance {
                data: self.data,
                work: self.work,
            }
        }
        fn work_units(&self) -> u64 {
            self.work
        }
    }

    pub struct RecomputeFactory;

    impl BlockFactory for RecomputeFactory {
        type Instance = RecomputeInstance;
        type Warming = RecomputeWarming;
        fn begin(&self, snapshot: &[i64], _block: u64) -> RecomputeWarming {
            RecomputeWarming {
                data: snapshot.to_vec(),
                fed: 0,
                work: 0,
            }
        }
        fn block_len(&self, n: usize) -> usize {
            n / 2 + 10
        }
        fn preprocess_units(&self, n: usize) -> u64 {
            n as u64 + 1
        }
        fn step_units(&self, n: usize) -> u64 {
            let n = n as u64 + 2;
            2 * n * (u64::BITS - n.leading_zeros()) as u64
        }
    }

    #[test]
    fn scheduler_matches_patience_on_random_trace() {
        let mut rng = Rng64::new(202);
        let mut sched = BlockScheduler::new(RecomputeFactory, &[]);
        let mut model: Vec<i64> = Vec::new();
        let mut next = 0i64;
        for _ in 0..300 {
            let insert = model.is_empty() || rng.gen_bool();
            let op = if insert {
                let pos = rng.gen_usize(model.len() + 1) + 1;
                next += 1;
                model.insert(pos - 1, next);
                EditOp::Insert { pos, val: next }
            } else {
                let pos = rng.gen_usize(model.len()) + 1;
                model.remove(pos - 1);
                EditOp::Delete { pos }
            };
            let got = sched.step(op);
            assert_eq!(got, patience_lis(&model));
        }
        assert!(sched.history().len() >= 2, "blocks should rotate");
    }

    #[test]
    fn swap_timing_follows_the_windows() {
        // Insert-only trace so block lengths are predictable.
        let mut sched = BlockScheduler::new(RecomputeFactory, &[]);
        let mut val = 0i64;
        for _ in 0..200 {
            val += 1;
            sched.step(EditOp::Insert { pos: 1, val });
        }
        for w in sched.history().windows(2) {
            let (a, b) = (w[0], w[1]);
            let g = b.step - a.step; // block length of that block
            let warm_window = b.step - b.snapshot_step;
            // Warming began when nine tenths of the block were served.
            assert_eq!(warm_window, g - (9 * g) / 10, "swap at {}", b.step);
        }
    }

    #[test]
    fn work_ratio_is_bounded() {
        let mut rng = Rng64::new(77);
        let mut sched = BlockScheduler::new(RecomputeFactory, &[]);
        let mut len = 0usize;
        let mut next = 0i64;
        for _ in 0..2000 {
            let insert = len == 0 || rng.gen_bool();
            let op = if insert {
                next += 1;
                len += 1;
                EditOp::Insert {
                    pos: rng.gen_usize(len) + 1,
                    val: next,
                }
            } else {
                let pos = rng.gen_usize(len) + 1;
                len -= 1;
                EditOp::Delete { pos }
            };
            sched.step(op);
        }
        assert!(
            sched.max_work_ratio() <= 64.0,
            "ratio {}",
            sched.max_work_ratio()
        );
    }
}
