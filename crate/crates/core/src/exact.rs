//! Randomized exact dynamic LIS with sublinear update time.
//!
//! One instance layers the sequence by LIS-ending-length, samples a random
//! residue so that the chosen boundary layers stay small in total, and
//! groups runs of `w` consecutive layers into baskets whose boundary is
//! their last layer. The instance then maintains, per boundary element,
//! the length of the longest *basket-compatible* increasing subsequence
//! ending there (one element from every earlier boundary). Light baskets
//! answer through an anti-Monge from/to oracle swept with SMAWK; other
//! baskets recompute a seeded patience pass over their own elements.
//! Boundaries are immutable: deleting a boundary element makes the
//! instance fail, after which it reports 0 until the scheduler rotates it.
//!
//! An [`Ensemble`] runs ~20 log n instances with independent residues and
//! reports the maximum non-failed answer; wrapped in the block scheduler
//! this gives worst-case updates with error probability n^{-10} per step.

use rayon::prelude::*;

use crate::lis_oracle::PairOracle;
use crate::rng::Rng64;
use crate::scheduler::{BlockFactory, BlockInstance, BlockScheduler, Warming};
use crate::seq::{DynSeq, EditOp, Handle};
use crate::smawk::maxplus_vector;
use crate::static_lis::levels;

const NEG: i64 = i64::MIN / 4;
const NO_BASKET: u32 = u32::MAX;

/// Which (w, s) schedule the instance uses and how light baskets store
/// their local solutions.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    /// w = n^{1/3}, s = n^{2/3}; light baskets use the pair oracle + SMAWK.
    OracleSweep,
    /// w = n^{0.4}, s = n^{0.6}; light baskets store dense from/to tables.
    DenseTables,
}

#[derive(Clone, Copy, Debug)]
pub struct Params {
    pub mode: Mode,
    /// Ensemble size override; default 20 ceil(log2 n), floored at 1.
    pub instances: Option<usize>,
    /// Layer-window override for tests.
    pub w_override: Option<usize>,
    /// Light-size threshold override for tests.
    pub s_override: Option<usize>,
}

impl Default for Params {
    fn default() -> Self {
        Params {
            mode: Mode::OracleSweep,
            instances: None,
            w_override: None,
            s_override: None,
        }
    }
}

impl Params {
    pub fn with_mode(mode: Mode) -> Self {
        Params {
            mode,
            ..Params::default()
        }
    }

    /// Layers per basket.
    pub fn w(&self, n: usize) -> usize {
        if let Some(w) = self.w_override {
            return w.max(1);
        }
        let x = (n.max(1)) as f64;
        let w = match self.mode {
            Mode::OracleSweep => x.powf(1.0 / 3.0),
            Mode::DenseTables => x.powf(0.4),
        };
        (w.ceil() as usize).max(1)
    }

    /// Light-size threshold; w <= s <= n by clamping.
    pub fn s(&self, n: usize) -> usize {
        let s = if let Some(s) = self.s_override {
            s
        } else {
            let x = (n.max(1)) as f64;
            let raw = match self.mode {
                Mode::OracleSweep => x.powf(2.0 / 3.0),
                Mode::DenseTables => x.powf(0.6),
            };
            raw.ceil() as usize
        };
        s.clamp(self.w(n), n.max(1))
    }

    /// Ops one instance absorbs before the scheduler must rotate it.
    pub fn block_len(&self, n: usize) -> usize {
        (self.w(n) / 12).max(1)
    }

    pub fn ensemble_size(&self, n: usize) -> usize {
        if let Some(k) = self.instances {
            return k.max(1);
        }
        let lg = (usize::BITS - n.max(1).leading_zeros()) as usize;
        (20 * lg).max(1)
    }
}

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum InstanceError {
    #[error("budget exhausted: the scheduler should have rotated this block")]
    BudgetExhausted,
}

/// Max-Fenwick over value ranks.
struct FenwickMax {
    tree: Vec<i64>,
}

impl FenwickMax {
    fn new(n: usize) -> Self {
        FenwickMax {
            tree: vec![NEG; n + 1],
        }
    }
    /// Raise position i to at least v.
    fn update(&mut self, mut i: usize, v: i64) {
        i += 1;
        while i < self.tree.len() {
            if self.tree[i] < v {
                self.tree[i] = v;
            }
            i += i & i.wrapping_neg();
        }
    }
    /// Max over positions < i.
    fn prefix_max(&self, mut i: usize) -> i64 {
        i = i.min(self.tree.len() - 1);
        let mut best = NEG;
        while i > 0 {
            if self.tree[i] > best {
                best = self.tree[i];
            }
            i -= i & i.wrapping_neg();
        }
        best
    }
}

/// Backing store a light basket sweeps against.
enum LightBacking {
    /// Anti-Monge from/to oracle over prev boundary + basket elements.
    Oracle(PairOracle),
    /// Dense from/to table, rows = prev boundary, cols = boundary targets.
    Table(Vec<Vec<i64>>),
}

struct Basket {
    /// Basket elements (boundary included), sorted by current position.
    elements: Vec<Handle>,
    /// Boundary layer in position order (values strictly decreasing);
    /// never mutated. Empty iff the boundary is the dummy.
    boundary: Vec<Handle>,
    has_dummy: bool,
    light: bool,
    dirty: bool,
    backing: Option<LightBacking>,
    cache_in: Vec<i64>,
    cache_out: Vec<i64>,
    cache_valid: bool,
}

impl Basket {
    fn boundary_len(&self) -> usize {
        self.boundary.len() + usize::from(self.has_dummy)
    }
}

fn log2ceil(n: usize) -> u64 {
    (usize::BITS - n.max(1).leading_zeros()) as u64 + 1
}

/// Per-snapshot layering shared by all ensemble members: each layer's
/// (position, handle) pairs in position order.
pub struct Layering {
    layers: Vec<Vec<(u32, Handle)>>,
    n: usize,
}

impl Layering {
    pub fn compute(seq: &DynSeq) -> Self {
        let vals = seq.to_vec();
        let lv = levels(&vals);
        let opt = lv.iter().copied().max().unwrap_or(0);
        let mut layers = vec![Vec::new(); opt];
        for (i, &l) in lv.iter().enumerate() {
            layers[l - 1].push((i as u32 + 1, seq.handle_at(i + 1).expect("in range")));
        }
        Layering {
            layers,
            n: vals.len(),
        }
    }

    pub fn opt(&self) -> usize {
        self.layers.len()
    }
}

/// One randomized instance: immutable layering, light/heavy baskets,
/// per-op local updates, and a cached global sweep.
pub struct Instance {
    mode: Mode,
    residue: usize,
    baskets: Vec<Basket>,
    /// Handle slab index -> basket index (NO_BASKET when absent).
    elem_basket: Vec<u32>,
    /// Sorted handle ids of all boundary elements.
    boundary_ids: Vec<u32>,
    budget: usize,
    used: usize,
    failed: bool,
    sentinel_guard: i64,
    work: u64,
}

impl Instance {
    /// Residues whose boundary layers are small in total; at least
    /// ceil(w/2) residues qualify by Markov.
    pub fn good_residues(layering: &Layering, w: usize) -> Vec<usize> {
        let n = layering.n;
        let mut sums = vec![0usize; w];
        for (k, layer) in layering.layers.iter().enumerate() {
            sums[(k + 1) % w] += layer.len();
        }
        let good: Vec<usize> = (0..w).filter(|&r| sums[r] * w <= 2 * n).collect();
        debug_assert!(good.len() >= w.div_ceil(2));
        good
    }

    /// Build over the current contents of `seq`, with layers precomputed
    /// and a residue drawn by the caller.
    pub fn new(seq: &DynSeq, layering: &Layering, params: &Params, rng: &mut Rng64) -> Self {
        let w = params.w(layering.n);
        let good = Self::good_residues(layering, w);
        let residue = good[rng.gen_usize(good.len())];
        Self::with_residue(seq, layering, params, residue)
    }

    /// Deterministic build for a fixed boundary residue.
    pub fn with_residue(
        seq: &DynSeq,
        layering: &Layering,
        params: &Params,
        residue: usize,
    ) -> Self {
        let n = layering.n;
        let w = params.w(n);
        let s = params.s(n);
        let opt = layering.opt();

        // Boundary levels r, r+w, ... (or w, 2w, ... when r = 0).
        let first_boundary = if residue == 0 { w } else { residue };
        let mut baskets: Vec<Basket> = Vec::new();
        let mut start_level = 0usize; // 0-based index of first layer
        let mut boundary_level = first_boundary; // 1-based boundary layer
        let mut prev_cache: Vec<i64> = Vec::new();
        while start_level < opt {
            let closed = boundary_level <= opt;
            let end = boundary_level.min(opt);
            let mut elements: Vec<(u32, Handle)> = Vec::new();
            for layer in &layering.layers[start_level..end] {
                elements.extend_from_slice(layer);
            }
            elements.sort_unstable_by_key(|e| e.0);
            let boundary: Vec<Handle> = if closed {
                layering.layers[end - 1].iter().map(|&(_, h)| h).collect()
            } else {
                Vec::new()
            };
            // Initially b' = b: every boundary element of the layer at
            // level `end` carries exactly that level.
            let mut cache_out = vec![end as i64; boundary.len()];
            if !closed {
                cache_out.push(opt as i64 + 1);
            }
            baskets.push(Basket {
                elements: elements.into_iter().map(|(_, h)| h).collect(),
                boundary,
                has_dummy: !closed,
                light: false,
                dirty: false,
                backing: None,
                cache_in: std::mem::replace(&mut prev_cache, cache_out.clone()),
                cache_out,
                cache_valid: true,
            });
            if !closed {
                break;
            }
            start_level = end;
            boundary_level += w;
        }
        // The last basket always carries the dummy boundary: either the
        // trailing open basket above, or a fresh dummy-only basket.
        if baskets.last().is_none_or(|b| !b.has_dummy) {
            baskets.push(Basket {
                elements: Vec::new(),
                boundary: Vec::new(),
                has_dummy: true,
                light: false,
                dirty: false,
                backing: None,
                cache_in: prev_cache,
                cache_out: vec![opt as i64 + 1],
                cache_valid: true,
            });
        }

        // Light iff the basket and both adjacent boundaries are small.
        let mut prev_e = 0usize;
        for b in baskets.iter_mut() {
            let d = b.elements.len() + usize::from(b.has_dummy);
            let e = b.boundary_len();
            b.light = d <= s && e * w <= s && prev_e * w <= s;
            prev_e = e;
        }

        let mut elem_basket = vec![NO_BASKET; seq.capacity_hint()];
        let mut boundary_ids = Vec::new();
        for (bi, b) in baskets.iter().enumerate() {
            for &h in &b.elements {
                if h.0 as usize >= elem_basket.len() {
                    elem_basket.resize(h.0 as usize + 16, NO_BASKET);
                }
                elem_basket[h.0 as usize] = bi as u32;
            }
            boundary_ids.extend(b.boundary.iter().map(|h| h.0));
        }
        boundary_ids.sort_unstable();

        let budget = params.block_len(n);
        let work = (n as u64 + 8) * log2ceil(n) + baskets.len() as u64 * 4;
        Instance {
            mode: params.mode,
            residue,
            baskets,
            elem_basket,
            boundary_ids,
            budget,
            used: 0,
            failed: false,
            sentinel_guard: 2 * n as i64 + 64,
            work,
        }
    }

    pub fn failed(&self) -> bool {
        self.failed
    }

    pub fn residue(&self) -> usize {
        self.residue
    }

    pub fn basket_count(&self) -> usize {
        self.baskets.len()
    }

    pub fn heavy_count(&self) -> usize {
        self.baskets.iter().filter(|b| !b.light).count()
    }

    pub fn is_light(&self, i: usize) -> bool {
        self.baskets[i].light
    }

    pub fn basket_of(&self, h: Handle) -> Option<usize> {
        self.elem_basket
            .get(h.0 as usize)
            .and_then(|&b| (b != NO_BASKET).then_some(b as usize))
    }

    pub fn boundary_total(&self) -> usize {
        self.baskets.iter().map(|b| b.boundary_len()).sum()
    }

    pub fn work_units(&self) -> u64 {
        self.work
    }

    fn check_budget(&mut self) -> Result<(), InstanceError> {
        if self.used >= self.budget {
            return Err(InstanceError::BudgetExhausted);
        }
        self.used += 1;
        Ok(())
    }

    /// Does basket `bi`'s boundary contain an element left of `pos` with
    /// value below `val`? Boundary values decrease along positions, so the
    /// single candidate is the largest boundary value below `val`.
    fn boundary_dominates(&self, seq: &DynSeq, bi: usize, pos: usize, val: i64) -> bool {
        let b = &self.baskets[bi];
        if b.boundary.is_empty() {
            return false; // the dummy sits right of everything
        }
        // boundary[k] has the k-th largest value; search from the back.
        let e = b.boundary.len();
        let k = {
            // First index (from the end) whose value is < val, i.e. the
            // latest-positioned qualifying element has the smallest pos
            // among... values ascending from the back.
            let mut lo = 0usize; // count of candidates from the back
            let mut hi = e;
            while lo < hi {
                let mid = (lo + hi + 1) / 2;
                if seq.value_of(b.boundary[e - mid]) < val {
                    lo = mid;
                } else {
                    hi = mid - 1;
                }
            }
            lo
        };
        if k == 0 {
            return false;
        }
        seq.index_of(b.boundary[e - k]) < pos
    }

    /// Register an element already inserted into `seq`.
    pub fn note_insert(&mut self, seq: &DynSeq, h: Handle) -> Result<(), InstanceError> {
        if self.failed {
            return Ok(());
        }
        self.check_budget()?;
        let pos = seq.index_of(h);
        let val = seq.value_of(h);
        // Lowest basket whose boundary has no element left-of-and-below;
        // domination is monotone down the basket list.
        let (mut lo, mut hi) = (0usize, self.baskets.len() - 1);
        while lo < hi {
            let mid = (lo + hi) / 2;
            if self.boundary_dominates(seq, mid, pos, val) {
                lo = mid + 1;
            } else {
                hi = mid;
            }
        }
        let bi = lo;
        let basket_count = self.baskets.len();
        let b = &mut self.baskets[bi];
        let at = b.elements.partition_point(|&x| seq.index_of(x) < pos);
        b.elements.insert(at, h);
        b.dirty = true;
        b.cache_valid = false;
        let d = b.elements.len() as u64;
        if h.0 as usize >= self.elem_basket.len() {
            self.elem_basket.resize(h.0 as usize + 16, NO_BASKET);
        }
        self.elem_basket[h.0 as usize] = bi as u32;
        self.work += log2ceil(basket_count) * log2ceil(seq.len() + 2) + d / 16 + 4;
        Ok(())
    }

    /// Register a deletion; must run while the element is still in `seq`.
    pub fn note_delete(&mut self, seq: &DynSeq, h: Handle) -> Result<(), InstanceError> {
        if self.failed {
            return Ok(());
        }
        self.check_budget()?;
        if self.boundary_ids.binary_search(&h.0).is_ok() {
            self.failed = true;
            return Ok(());
        }
        let bi = self.elem_basket[h.0 as usize];
        debug_assert_ne!(bi, NO_BASKET);
        self.elem_basket[h.0 as usize] = NO_BASKET;
        let b = &mut self.baskets[bi as usize];
        let pos = seq.index_of(h);
        let at = b.elements.partition_point(|&x| seq.index_of(x) < pos);
        debug_assert_eq!(b.elements[at], h);
        b.elements.remove(at);
        b.dirty = true;
        b.cache_valid = false;
        self.work += log2ceil(seq.len() + 2) * 2 + b.elements.len() as u64 / 16 + 4;
        Ok(())
    }

    /// Longest basket-compatible subsequence: the dummy's value minus one.
    /// Reports 0 when failed.
    pub fn report(&mut self, seq: &DynSeq) -> usize {
        if self.failed {
            return 0;
        }
        let mut incoming: Vec<i64> = Vec::new();
        let mut prev_boundary: Vec<Handle> = Vec::new();
        for bi in 0..self.baskets.len() {
            let first = bi == 0;
            let reuse = {
                let b = &self.baskets[bi];
                b.cache_valid && !b.dirty && b.cache_in == incoming
            };
            let out = if reuse {
                self.work += self.baskets[bi].cache_in.len() as u64 + 1;
                self.baskets[bi].cache_out.clone()
            } else {
                let out = self.sweep_basket(seq, bi, first, &prev_boundary, &incoming);
                let b = &mut self.baskets[bi];
                b.cache_in = std::mem::take(&mut incoming);
                b.cache_out = out.clone();
                b.cache_valid = true;
                b.dirty = false;
                out
            };
            prev_boundary = self.baskets[bi].boundary.clone();
            incoming = out;
        }
        let dummy = incoming.last().copied().unwrap_or(1);
        (dummy - 1).max(0) as usize
    }

    /// b' values for this basket's boundary (dummy last when present).
    fn sweep_basket(
        &mut self,
        seq: &DynSeq,
        bi: usize,
        first: bool,
        prev_boundary: &[Handle],
        incoming: &[i64],
    ) -> Vec<i64> {
        if self.baskets[bi].light && !first {
            if self.baskets[bi].dirty || self.baskets[bi].backing.is_none() {
                let backing = self.build_backing(seq, bi, prev_boundary);
                self.baskets[bi].backing = Some(backing);
            }
            let v: Vec<i64> = incoming.iter().map(|&x| x - 1).collect();
            debug_assert!(v.iter().all(|&x| x.abs() < self.sentinel_guard));
            let b = &self.baskets[bi];
            return match b.backing.as_ref().unwrap() {
                LightBacking::Oracle(oracle) => {
                    let (out, probes) = maxplus_vector(oracle, &v);
                    self.work += (probes as u64 + out.len() as u64) * log2ceil(seq.len() + 2);
                    out
                }
                LightBacking::Table(t) => {
                    let cols = t.first().map_or(0, |r| r.len());
                    let mut out = vec![NEG; cols];
                    for (j, row) in t.iter().enumerate() {
                        for (k, &m) in row.iter().enumerate() {
                            out[k] = out[k].max(v[j].saturating_add(m));
                        }
                    }
                    self.work += (t.len() as u64 + 1) * (cols as u64 + 1);
                    out
                }
            };
        }
        self.sweep_dp(seq, bi, first, prev_boundary, incoming)
    }

    /// Seeded patience pass: previous-boundary elements enter the value
    /// structure carrying their incoming b', basket elements extend.
    fn sweep_dp(
        &mut self,
        seq: &DynSeq,
        bi: usize,
        first: bool,
        prev_boundary: &[Handle],
        incoming: &[i64],
    ) -> Vec<i64> {
        let b = &self.baskets[bi];
        // (position, value, seed index or MAX): dummy handled after.
        let mut items: Vec<(usize, i64, usize)> =
            Vec::with_capacity(prev_boundary.len() + b.elements.len());
        if !first {
            for (j, &h) in prev_boundary.iter().enumerate() {
                items.push((seq.index_of(h), seq.value_of(h), j));
            }
        }
        for &h in &b.elements {
            items.push((seq.index_of(h), seq.value_of(h), usize::MAX));
        }
        items.sort_unstable();

        let k = items.len();
        let mut by_val: Vec<usize> = (0..k).collect();
        by_val.sort_unstable_by_key(|&i| items[i].1);
        let mut rank = vec![0usize; k];
        for (r, &i) in by_val.iter().enumerate() {
            rank[i] = r;
        }
        let mut fen = FenwickMax::new(k + 1);
        let mut bprime = vec![NEG; k];
        for (i, &(_, _, seed)) in items.iter().enumerate() {
            if seed != usize::MAX {
                fen.update(rank[i], incoming[seed]);
                continue;
            }
            let best = fen.prefix_max(rank[i]);
            let v = if first {
                best.max(0) + 1
            } else if best > NEG / 2 {
                best + 1
            } else {
                NEG
            };
            bprime[i] = v;
            if v > NEG / 2 {
                fen.update(rank[i], v);
            }
        }
        self.work += (k as u64 + 4) * log2ceil(k + 2);

        let b = &self.baskets[bi];
        let boundary_rank: std::collections::HashMap<u32, usize> = b
            .boundary
            .iter()
            .enumerate()
            .map(|(j, h)| (h.0, j))
            .collect();
        let mut out = vec![NEG; b.boundary_len()];
        let mut elem_idx = 0usize;
        for (i, &(_, _, seed)) in items.iter().enumerate() {
            if seed != usize::MAX {
                continue;
            }
            let h = b.elements[elem_idx];
            elem_idx += 1;
            if let Some(&j) = boundary_rank.get(&h.0) {
                out[j] = bprime[i];
            }
        }
        if b.has_dummy {
            let best = fen.prefix_max(k + 1);
            let base = if first { best.max(0) } else { best };
            *out.last_mut().unwrap() = if base > NEG / 2 { base + 1 } else { 1 };
        }
        out
    }

    /// Build the light backing for basket `bi` from scratch.
    fn build_backing(&mut self, seq: &DynSeq, bi: usize, prev_boundary: &[Handle]) -> LightBacking {
        let b = &self.baskets[bi];
        let boundary_set: std::collections::HashSet<u32> =
            b.boundary.iter().map(|h| h.0).collect();
        // (position, value, is_prev, is_target)
        let mut items: Vec<(usize, i64, bool, bool)> =
            Vec::with_capacity(prev_boundary.len() + b.elements.len());
        for &h in prev_boundary {
            items.push((seq.index_of(h), seq.value_of(h), true, false));
        }
        for &h in &b.elements {
            items.push((
                seq.index_of(h),
                seq.value_of(h),
                false,
                boundary_set.contains(&h.0),
            ));
        }
        items.sort_unstable();
        let mut vals: Vec<i64> = items.iter().map(|it| it.1).collect();
        let p_idx: Vec<usize> = items
            .iter()
            .enumerate()
            .filter(|(_, it)| it.2)
            .map(|(i, _)| i)
            .collect();
        let mut q_idx: Vec<usize> = items
            .iter()
            .enumerate()
            .filter(|(_, it)| it.3)
            .map(|(i, _)| i)
            .collect();
        if b.has_dummy {
            vals.push(i64::MAX / 8);
            q_idx.push(vals.len() - 1);
        }
        let k = vals.len();
        self.work += (k as u64 + 4) * log2ceil(k + 2) * log2ceil(k + 2);
        match self.mode {
            Mode::OracleSweep => {
                let sentinel = self.sentinel_guard + 4 * (k as i64 + 2);
                LightBacking::Oracle(PairOracle::build(&vals, &p_idx, &q_idx, sentinel))
            }
            Mode::DenseTables => {
                let mut by_val: Vec<usize> = (0..k).collect();
                by_val.sort_unstable_by_key(|&i| vals[i]);
                let mut rank = vec![0usize; k];
                for (r, &i) in by_val.iter().enumerate() {
                    rank[i] = r;
                }
                let col_of: std::collections::HashMap<usize, usize> =
                    q_idx.iter().enumerate().map(|(c, &i)| (i, c)).collect();
                let is_prev = |i: usize| items.get(i).map(|it| it.2).unwrap_or(false);
                let mut table = vec![vec![NEG; q_idx.len()]; p_idx.len()];
                for (row, &pstart) in p_idx.iter().enumerate() {
                    let mut fen = FenwickMax::new(k + 1);
                    fen.update(rank[pstart], 1);
                    if let Some(&c) = col_of.get(&pstart) {
                        // A boundary element is never its own target, but
                        // keep the column defined.
                        table[row][c] = NEG;
                    }
                    for i in pstart + 1..k {
                        if is_prev(i) {
                            continue;
                        }
                        let best = fen.prefix_max(rank[i]);
                        if best > NEG / 2 && vals[i] > vals[pstart] {
                            let v = best + 1;
                            fen.update(rank[i], v);
                            if let Some(&c) = col_of.get(&i) {
                                table[row][c] = v;
                            }
                        }
                    }
                    self.work += (k as u64 + 2) * log2ceil(k + 2);
                }
                LightBacking::Table(table)
            }
        }
    }
}

/// Ensemble of independent instances over one shared sequence.
pub struct Ensemble {
    seq: DynSeq,
    members: Vec<Instance>,
    base_work: u64,
}

impl Ensemble {
    /// Residues drawn for `count` members, deduplicated: members sharing
    /// a residue are byte-for-byte identical, so one copy suffices and
    /// the reported maximum is unchanged.
    fn distinct_residues(
        layering: &Layering,
        params: &Params,
        count: usize,
        rng: &mut Rng64,
    ) -> Vec<usize> {
        let w = params.w(layering.n);
        let good = Instance::good_residues(layering, w);
        let mut seen = vec![false; w];
        let mut picks = Vec::new();
        for _ in 0..count {
            let r = good[rng.gen_usize(good.len())];
            if !seen[r] {
                seen[r] = true;
                picks.push(r);
            }
        }
        picks
    }

    pub fn build(values: &[i64], params: &Params, seed: u64) -> Self {
        let seq = DynSeq::from_values(values);
        let layering = Layering::compute(&seq);
        let count = params.ensemble_size(values.len());
        let mut rng = Rng64::new(seed);
        let residues = Self::distinct_residues(&layering, params, count, &mut rng);
        let members = residues
            .iter()
            .map(|&r| Instance::with_residue(&seq, &layering, params, r))
            .collect();
        Ensemble {
            seq,
            members,
            base_work: (values.len() as u64 + 4) * log2ceil(values.len()),
        }
    }

    pub fn len(&self) -> usize {
        self.seq.len()
    }

    pub fn is_empty(&self) -> bool {
        self.seq.is_empty()
    }

    pub fn members(&self) -> &[Instance] {
        &self.members
    }

    pub fn apply(&mut self, op: EditOp) {
        match op {
            EditOp::Insert { pos, val } => {
                let h = self.seq.insert(pos, val).expect("valid insert");
                let seq = &self.seq;
                if self.members.len() >= 33 {
                    self.members
                        .par_iter_mut()
                        .for_each(|m| m.note_insert(seq, h).expect("within budget"));
                } else {
                    for m in &mut self.members {
                        m.note_insert(seq, h).expect("within budget");
                    }
                }
            }
            EditOp::Delete { pos } => {
                let h = self.seq.handle_at(pos).expect("valid delete");
                let seq = &self.seq;
                if self.members.len() >= 33 {
                    self.members
                        .par_iter_mut()
                        .for_each(|m| m.note_delete(seq, h).expect("within budget"));
                } else {
                    for m in &mut self.members {
                        m.note_delete(seq, h).expect("within budget");
                    }
                }
                self.seq.delete(pos).expect("valid delete");
            }
        }
    }

    /// Maximum answer over non-failed members.
    pub fn report(&mut self) -> usize {
        let seq = &self.seq;
        if self.members.len() >= 33 {
            self.members
                .par_iter_mut()
                .map(|m| m.report(seq))
                .max()
                .unwrap_or(0)
        } else {
            self.members
                .iter_mut()
                .map(|m| m.report(seq))
                .max()
                .unwrap_or(0)
        }
    }

    fn total_work(&self) -> u64 {
        self.base_work + self.members.iter().map(|m| m.work_units()).sum::<u64>()
    }
}

impl BlockInstance for Ensemble {
    fn apply(&mut self, op: EditOp) {
        Ensemble::apply(self, op);
    }
    fn answer(&mut self) -> usize {
        self.report()
    }
    fn work_units(&self) -> u64 {
        self.total_work()
    }
}

/// Member-by-member resumable construction of an ensemble.
pub struct EnsembleWarming {
    snapshot: Vec<i64>,
    params: Params,
    seed: u64,
    state: Option<(DynSeq, Layering, Vec<usize>)>,
    built: Vec<Instance>,
    target: usize,
    work: u64,
}

impl Warming for EnsembleWarming {
    type Instance = Ensemble;

    fn advance(&mut self, units: u64) -> bool {
        let mut spent = 0u64;
        if self.state.is_none() {
            let seq = DynSeq::from_values(&self.snapshot);
            let layering = Layering::compute(&seq);
            let mut rng = Rng64::new(self.seed);
            let residues =
                Ensemble::distinct_residues(&layering, &self.params, self.target, &mut rng);
            spent += (self.snapshot.len() as u64 + 4) * log2ceil(self.snapshot.len());
            self.state = Some((seq, layering, residues));
            if spent >= units {
                self.work += spent;
                return self.done();
            }
        }
        let (seq, layering, residues) = self.state.as_ref().expect("initialized");
        while self.built.len() < residues.len() && spent < units {
            let m = Instance::with_residue(seq, layering, &self.params, residues[self.built.len()]);
            spent += m.work_units();
            self.built.push(m);
        }
        self.work += spent;
        self.done()
    }

    fn finish(self) -> Ensemble {
        let (seq, _, _) = self.state.expect("built");
        Ensemble {
            seq,
            members: self.built,
            base_work: self.work,
        }
    }

    fn work_units(&self) -> u64 {
        self.work
    }
}

impl EnsembleWarming {
    fn done(&self) -> bool {
        self.state
            .as_ref()
            .is_some_and(|(_, _, residues)| self.built.len() == residues.len())
    }
}

/// Factory wiring ensembles into the block scheduler.
pub struct EnsembleFactory {
    pub params: Params,
    pub seed: u64,
}

impl BlockFactory for EnsembleFactory {
    type Instance = Ensemble;
    type Warming = EnsembleWarming;

    fn begin(&self, snapshot: &[i64], block_index: u64) -> EnsembleWarming {
        let target = self.params.ensemble_size(snapshot.len());
        EnsembleWarming {
            snapshot: snapshot.to_vec(),
            params: self.params,
            seed: self
                .seed
                .wrapping_add(block_index.wrapping_mul(0x9e37_79b9_7f4a_7c15)),
            state: None,
            built: Vec::new(),
            target,
            work: 0,
        }
    }

    fn block_len(&self, n: usize) -> usize {
        self.params.block_len(n)
    }

    fn preprocess_units(&self, n: usize) -> u64 {
        let members = self.params.ensemble_size(n) as u64;
        (members + 1) * (n as u64 + 16) * log2ceil(n) * 2
    }

    fn step_units(&self, n: usize) -> u64 {
        let members = self.params.ensemble_size(n) as u64;
        members * (n as u64 + 16) * log2ceil(n) * 4
    }
}

/// The scheduled engine: worst-case update time via block rotation.
pub type ScheduledExact = BlockScheduler<EnsembleFactory>;

pub fn scheduled_exact(initial: &[i64], params: Params, seed: u64) -> ScheduledExact {
    BlockScheduler::new(EnsembleFactory { params, seed }, initial)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::static_lis::patience_lis;

    fn build_one(values: &[i64], params: &Params, seed: u64) -> (DynSeq, Instance) {
        let seq = DynSeq::from_values(values);
        let layering = Layering::compute(&seq);
        let mut rng = Rng64::new(seed);
        let inst = Instance::new(&seq, &layering, params, &mut rng);
        (seq, inst)
    }

    #[test]
    fn init_classification_sorted_and_reversed() {
        let params = Params::default();
        // Sorted: n layers of size 1, all baskets light.
        let sorted: Vec<i64> = (0..200).collect();
        let (_, inst) = build_one(&sorted, &params, 1);
        assert_eq!(inst.heavy_count(), 0);

        // Decreasing: one layer of size n; that basket is heavy (n > s).
        let rev: Vec<i64> = (0..200).rev().collect();
        let (_, inst) = build_one(&rev, &params, 1);
        assert!(!inst.is_light(0));
    }

    #[test]
    fn init_bad_layers_profile() {
        // Layer sizes 1,2,4,...,64,...,4,2,1: the middle basket is heavy.
        let mut sizes = vec![];
        for k in 0..=6 {
            sizes.push(1usize << k);
        }
        for k in (0..6).rev() {
            sizes.push(1usize << k);
        }
        let mut vals = Vec::new();
        let mut base = 0i64;
        for &c in &sizes {
            for i in 0..c {
                vals.push(base + (c - i) as i64);
            }
            base += c as i64 + 1;
        }
        let params = Params::default();
        let (_, inst) = build_one(&vals, &params, 3);
        assert!(inst.heavy_count() >= 1, "middle basket must go heavy");
        let n = vals.len();
        let w = params.w(n);
        assert!(inst.boundary_total() <= 2 * n / w + 2);
    }

    #[test]
    fn fresh_instance_reports_patience() {
        let mut rng = Rng64::new(9);
        for mode in [Mode::OracleSweep, Mode::DenseTables] {
            let params = Params::with_mode(mode);
            for _ in 0..20 {
                let n = rng.gen_usize(300);
                let vals = rng.permutation(n);
                let (seq, mut inst) = build_one(&vals, &params, rng.next_u64());
                assert_eq!(inst.report(&seq), patience_lis(&vals), "mode {mode:?}");
            }
        }
    }

    #[test]
    fn boundary_delete_fails_instance() {
        // All-increasing input: every layer has one element, so boundary
        // elements sit at the residue positions; delete one of them.
        let vals: Vec<i64> = (0..100).collect();
        let params = Params {
            w_override: Some(10),
            s_override: Some(100),
            ..Params::default()
        };
        let (seq, mut inst) = build_one(&vals, &params, 5);
        let r = if inst.residue() == 0 { 10 } else { inst.residue() };
        let h = seq.handle_at(r).unwrap();
        inst.note_delete(&seq, h).unwrap();
        assert!(inst.failed());
        let mut inst = inst;
        assert_eq!(inst.report(&seq), 0);
    }

    #[test]
    fn insert_max_lands_in_dummy_basket() {
        let vals: Vec<i64> = (0..50).collect();
        let params = Params::default();
        let (mut seq, mut inst) = build_one(&vals, &params, 7);
        let h = seq.insert(51, 1000).unwrap();
        inst.note_insert(&seq, h).unwrap();
        assert_eq!(inst.basket_of(h), Some(inst.basket_count() - 1));
        assert_eq!(inst.report(&seq), 51);
    }

    #[test]
    fn instance_never_overestimates_and_modes_agree() {
        let mut rng = Rng64::new(1234);
        for trial in 0..25 {
            let n = 40 + rng.gen_usize(120);
            let mk = |mode: Mode| Params {
                mode,
                w_override: Some(24),
                s_override: Some(60),
                ..Params::default()
            };
            let mut pool: Vec<i64> = (0..(4 * n as i64)).collect();
            rng.shuffle(&mut pool);
            let vals: Vec<i64> = pool.drain(..n).collect();
            let mut seq = DynSeq::from_values(&vals);
            let layering = Layering::compute(&seq);
            let mut a = Instance::new(&seq, &layering, &mk(Mode::OracleSweep), &mut Rng64::new(trial));
            let mut b = Instance::new(&seq, &layering, &mk(Mode::DenseTables), &mut Rng64::new(trial));
            assert_eq!(a.residue(), b.residue());
            for _ in 0..2 {
                let insert = seq.is_empty() || rng.gen_bool();
                if insert {
                    let pos = rng.gen_usize(seq.len() + 1) + 1;
                    let val = pool.pop().unwrap();
                    let h = seq.insert(pos, val).unwrap();
                    a.note_insert(&seq, h).unwrap();
                    b.note_insert(&seq, h).unwrap();
                } else {
                    let pos = rng.gen_usize(seq.len()) + 1;
                    let h = seq.handle_at(pos).unwrap();
                    a.note_delete(&seq, h).unwrap();
                    b.note_delete(&seq, h).unwrap();
                    if !a.failed() {
                        seq.delete(pos).unwrap();
                    } else {
                        break;
                    }
                }
                if a.failed() || b.failed() {
                    assert_eq!(a.failed(), b.failed());
                    break;
                }
                let want = patience_lis(&seq.to_vec());
                let got_a = a.report(&seq);
                let got_b = b.report(&seq);
                assert!(got_a <= want, "never overestimates");
                assert_eq!(got_a, got_b, "modes must agree");
            }
        }
    }

    #[test]
    fn ensemble_matches_patience_small_traces() {
        let mut rng = Rng64::new(4321);
        for trial in 0..10 {
            let n0 = rng.gen_usize(120);
            let params = Params {
                instances: Some(24),
                ..Params::default()
            };
            let mut pool: Vec<i64> = (0..4096).collect();
            rng.shuffle(&mut pool);
            let vals: Vec<i64> = pool.drain(..n0).collect();
            let mut sched = scheduled_exact(&vals, params, trial as u64);
            let mut model = vals.clone();
            for _ in 0..60 {
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
                assert_eq!(got, patience_lis(&model), "trial {trial}");
            }
        }
    }

    #[test]
    fn budget_exhaustion_reports_error() {
        let vals: Vec<i64> = (0..50).collect();
        let params = Params::default();
        let (mut seq, mut inst) = build_one(&vals, &params, 11);
        let budget = params.block_len(50);
        for i in 0..budget {
            let h = seq.insert(1, 1000 + i as i64).unwrap();
            inst.note_insert(&seq, h).unwrap();
        }
        let h = seq.insert(1, 2000).unwrap();
        assert_eq!(
            inst.note_insert(&seq, h),
            Err(InstanceError::BudgetExhausted)
        );
    }

    #[test]
    fn miss_rate_respects_the_layer_bound() {
        // Fraction of reports below the true LIS stays within 4g/w plus
        // statistical slack, over fresh instances serving g ops each.
        let mut rng = Rng64::new(777);
        let (w, g) = (24usize, 2usize);
        let mut reports = 0usize;
        let mut misses = 0usize;
        for trial in 0..150 {
            let n = 120 + rng.gen_usize(80);
            let params = Params {
                w_override: Some(w),
                s_override: Some(n),
                ..Params::default()
            };
            let mut pool: Vec<i64> = (0..(4 * n as i64)).collect();
            rng.shuffle(&mut pool);
            let vals: Vec<i64> = pool.drain(..n).collect();
            let mut seq = DynSeq::from_values(&vals);
            let layering = Layering::compute(&seq);
            let mut inst = Instance::new(&seq, &layering, &params, &mut Rng64::new(trial));
            for _ in 0..g {
                let insert = rng.gen_bool();
                if insert {
                    let pos = rng.gen_usize(seq.len() + 1) + 1;
                    let val = pool.pop().unwrap();
                    let h = seq.insert(pos, val).unwrap();
                    inst.note_insert(&seq, h).unwrap();
                } else {
                    let pos = rng.gen_usize(seq.len()) + 1;
                    let h = seq.handle_at(pos).unwrap();
                    inst.note_delete(&seq, h).unwrap();
                    if !inst.failed() {
                        seq.delete(pos).unwrap();
                    }
                }
                if inst.failed() {
                    break;
                }
                reports += 1;
                if inst.report(&seq) != patience_lis(&seq.to_vec()) {
                    misses += 1;
                }
            }
        }
        let bound = 4.0 * g as f64 / w as f64 + 0.15;
        let rate = misses as f64 / reports as f64;
        assert!(rate <= bound, "miss rate {rate:.3} above bound {bound:.3}");
    }
}
