//! Exact dynamic LIS with update time O(opt log n), after Chen, Chu and
//! Pinsker.
//!
//! The forest keeps one balanced tree per level, tree k holding the
//! elements whose longest increasing subsequence ending there has length
//! exactly k, keyed by value. Within a level the values, read in position
//! order, strictly decrease, so each level is an antichain. An edit moves
//! a single contiguous value interval between adjacent levels; the cascade
//! below locates each interval with binary searches and moves it with
//! split/merge, never touching elements one by one.
//!
//! Interval location per level, with `I` the interval arriving from the
//! level below (for an insert) and `[lo..hi]` the interval that left the
//! level below (for a delete):
//!
//! * insert: an element is promoted iff it dominates some member of `I`.
//!   If any element is promoted, the first one is the successor (by value)
//!   of `I`'s minimum value; the run's far end is found by binary search
//!   on the predicate "dominates the predecessor in `I`".
//! * delete: an element is demoted iff all of its supports vanished. The
//!   demoted run is exactly the set with value below the first survivor
//!   above `hi` and position left of the last survivor below `lo`.

use crate::rng::Rng64;
use crate::seq::{DynSeq, Handle};
use crate::static_lis::levels;

const NIL: u32 = u32::MAX;

#[derive(Clone, Debug)]
struct CNode {
    left: u32,
    right: u32,
    size: u32,
    prio: u64,
    val: i64,
    handle: Handle,
}

#[derive(Clone, Debug, Default)]
struct Arena {
    nodes: Vec<CNode>,
    free: Vec<u32>,
}

impl Arena {
    fn alloc(&mut self, val: i64, handle: Handle, prio: u64) -> u32 {
        let n = CNode {
            left: NIL,
            right: NIL,
            size: 1,
            prio,
            val,
            handle,
        };
        if let Some(id) = self.free.pop() {
            self.nodes[id as usize] = n;
            id
        } else {
            self.nodes.push(n);
            (self.nodes.len() - 1) as u32
        }
    }

    fn size(&self, t: u32) -> u32 {
        if t == NIL {
            0
        } else {
            self.nodes[t as usize].size
        }
    }

    fn pull(&mut self, t: u32) {
        let (l, r) = {
            let n = &self.nodes[t as usize];
            (n.left, n.right)
        };
        self.nodes[t as usize].size = 1 + self.size(l) + self.size(r);
    }

    /// Values `< v` to the left, `>= v` to the right.
    fn split_lt(&mut self, t: u32, v: i64) -> (u32, u32) {
        if t == NIL {
            return (NIL, NIL);
        }
        if self.nodes[t as usize].val < v {
            let r = self.nodes[t as usize].right;
            let (a, b) = self.split_lt(r, v);
            self.nodes[t as usize].right = a;
            self.pull(t);
            (t, b)
        } else {
            let l = self.nodes[t as usize].left;
            let (a, b) = self.split_lt(l, v);
            self.nodes[t as usize].left = b;
            self.pull(t);
            (a, t)
        }
    }

    /// Values `<= v` to the left, `> v` to the right.
    fn split_leq(&mut self, t: u32, v: i64) -> (u32, u32) {
        if t == NIL {
            return (NIL, NIL);
        }
        if self.nodes[t as usize].val <= v {
            let r = self.nodes[t as usize].right;
            let (a, b) = self.split_leq(r, v);
            self.nodes[t as usize].right = a;
            self.pull(t);
            (t, b)
        } else {
            let l = self.nodes[t as usize].left;
            let (a, b) = self.split_leq(l, v);
            self.nodes[t as usize].left = b;
            self.pull(t);
            (a, t)
        }
    }

    /// All values of `a` must precede all values of `b`.
    fn merge(&mut self, a: u32, b: u32) -> u32 {
        if a == NIL {
            return b;
        }
        if b == NIL {
            return a;
        }
        if self.nodes[a as usize].prio >= self.nodes[b as usize].prio {
            let r = self.nodes[a as usize].right;
            let m = self.merge(r, b);
            self.nodes[a as usize].right = m;
            self.pull(a);
            a
        } else {
            let l = self.nodes[b as usize].left;
            let m = self.merge(a, l);
            self.nodes[b as usize].left = m;
            self.pull(b);
            b
        }
    }

    /// Largest value strictly below `v`.
    fn pred(&self, t: u32, v: i64) -> Option<u32> {
        let mut cur = t;
        let mut best = None;
        while cur != NIL {
            let n = &self.nodes[cur as usize];
            if n.val < v {
                best = Some(cur);
                cur = n.right;
            } else {
                cur = n.left;
            }
        }
        best
    }

    /// Smallest value strictly above `v`.
    fn succ(&self, t: u32, v: i64) -> Option<u32> {
        let mut cur = t;
        let mut best = None;
        while cur != NIL {
            let n = &self.nodes[cur as usize];
            if n.val > v {
                best = Some(cur);
                cur = n.left;
            } else {
                cur = n.right;
            }
        }
        best
    }

    fn min(&self, t: u32) -> Option<u32> {
        if t == NIL {
            return None;
        }
        let mut cur = t;
        while self.nodes[cur as usize].left != NIL {
            cur = self.nodes[cur as usize].left;
        }
        Some(cur)
    }

    fn max(&self, t: u32) -> Option<u32> {
        if t == NIL {
            return None;
        }
        let mut cur = t;
        while self.nodes[cur as usize].right != NIL {
            cur = self.nodes[cur as usize].right;
        }
        Some(cur)
    }

    /// 0-based rank within `t`.
    fn select(&self, t: u32, mut rank: u32) -> u32 {
        let mut cur = t;
        loop {
            let n = &self.nodes[cur as usize];
            let ls = self.size(n.left);
            if rank < ls {
                cur = n.left;
            } else if rank == ls {
                return cur;
            } else {
                rank -= ls + 1;
                cur = n.right;
            }
        }
    }

    fn collect(&self, t: u32, out: &mut Vec<(i64, Handle)>) {
        if t == NIL {
            return;
        }
        let n = &self.nodes[t as usize];
        self.collect(n.left, out);
        out.push((n.val, n.handle));
        self.collect(n.right, out);
    }

    fn release(&mut self, t: u32) {
        if t == NIL {
            return;
        }
        let (l, r) = {
            let n = &self.nodes[t as usize];
            (n.left, n.right)
        };
        self.release(l);
        self.release(r);
        self.free.push(t);
    }
}

/// One balanced tree per level; level k at index k-1.
pub struct LevelForest {
    arena: Arena,
    roots: Vec<u32>,
    rng: Rng64,
}

impl LevelForest {
    pub fn new() -> Self {
        LevelForest {
            arena: Arena::default(),
            roots: Vec::new(),
            rng: Rng64::new(0xcc9),
        }
    }

    /// Build from the current contents of `seq` by patience sorting.
    pub fn build(seq: &DynSeq) -> Self {
        let mut f = Self::new();
        let vals = seq.to_vec();
        let lv = levels(&vals);
        for (i, (&v, &l)) in vals.iter().zip(lv.iter()).enumerate() {
            let h = seq.handle_at(i + 1).expect("in range");
            while f.roots.len() < l {
                f.roots.push(NIL);
            }
            let prio = f.rng.next_u64();
            let node = f.arena.alloc(v, h, prio);
            let root = f.roots[l - 1];
            let (a, b) = f.arena.split_lt(root, v);
            let ab = f.arena.merge(a, node);
            f.roots[l - 1] = f.arena.merge(ab, b);
        }
        f
    }

    /// Number of non-empty levels = current LIS length.
    pub fn lis(&self) -> usize {
        self.roots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.roots.is_empty()
    }

    /// Largest level k such that level k contains an element left of `pos`
    /// with value below `val`; 0 when no level does. The predicate is
    /// monotone in k, so this is a binary search.
    fn support_level(&self, seq: &DynSeq, val: i64, pos: usize) -> usize {
        let dominated = |k: usize| -> bool {
            let root = self.roots[k - 1];
            match self.arena.pred(root, val) {
                None => false,
                Some(id) => seq.index_of(self.arena.nodes[id as usize].handle) < pos,
            }
        };
        let (mut lo, mut hi) = (0usize, self.roots.len());
        // invariant: lo dominated (or 0), hi+1.. not dominated
        while lo < hi {
            let mid = (lo + hi + 1) / 2;
            if dominated(mid) {
                lo = mid;
            } else {
                hi = mid - 1;
            }
        }
        lo
    }

    /// Register an element already present in `seq`. Returns the number
    /// of levels the promotion cascade visited (instrumentation).
    pub fn insert(&mut self, seq: &DynSeq, h: Handle) -> usize {
        let val = seq.value_of(h);
        let pos = seq.index_of(h);
        let level = self.support_level(seq, val, pos) + 1;
        let prio = self.rng.next_u64();
        let node = self.arena.alloc(val, h, prio);
        self.cascade_up(seq, level, node)
    }

    /// Push interval `incoming` (a detached tree) into `level`, promoting
    /// displaced intervals upward until the cascade dies out.
    fn cascade_up(&mut self, seq: &DynSeq, mut level: usize, mut incoming: u32) -> usize {
        let mut visited = 0usize;
        while incoming != NIL {
            visited += 1;
            if level > self.roots.len() {
                self.roots.push(incoming);
                return visited;
            }
            let target = self.roots[level - 1];
            let alpha = self.arena.min(incoming).expect("nonempty");
            let alpha_val = self.arena.nodes[alpha as usize].val;

            let promoted = self.promoted_range(seq, target, incoming, alpha_val);
            let (low, mid, high) = match promoted {
                None => {
                    let (low, high) = self.arena.split_lt(target, alpha_val);
                    (low, NIL, high)
                }
                Some((from_val, to_val)) => {
                    let (low, rest) = self.arena.split_lt(target, from_val);
                    let (mid, high) = self.arena.split_leq(rest, to_val);
                    (low, mid, high)
                }
            };
            let merged = self.arena.merge(low, incoming);
            self.roots[level - 1] = self.arena.merge(merged, high);
            incoming = mid;
            level += 1;
        }
        visited
    }

    /// Value range `[from..=to]` of elements of `target` promoted by the
    /// arrival of interval `incoming`, or None when nothing moves. An
    /// element f is promoted iff it dominates its value-predecessor in
    /// `incoming`; if any is promoted, the successor of `alpha_val` is.
    fn promoted_range(
        &self,
        seq: &DynSeq,
        target: u32,
        incoming: u32,
        alpha_val: i64,
    ) -> Option<(i64, i64)> {
        let first = self.arena.succ(target, alpha_val)?;
        if !self.dominates_pred(seq, incoming, first) {
            return None;
        }
        let from_val = self.arena.nodes[first as usize].val;
        // Ranks at and above `first`: promoted is a prefix there.
        let first_rank = self.rank_of(target, from_val);
        let total = self.arena.size(target);
        let (mut lo, mut hi) = (first_rank, total - 1);
        while lo < hi {
            let mid = (lo + hi + 1) / 2;
            let id = self.arena.select(target, mid);
            if self.dominates_pred(seq, incoming, id) {
                lo = mid;
            } else {
                hi = mid - 1;
            }
        }
        let last = self.arena.select(target, lo);
        Some((from_val, self.arena.nodes[last as usize].val))
    }

    /// Does element `id` dominate its value-predecessor inside `within`?
    fn dominates_pred(&self, seq: &DynSeq, within: u32, id: u32) -> bool {
        let n = &self.arena.nodes[id as usize];
        match self.arena.pred(within, n.val) {
            None => false,
            Some(p) => {
                let pn = &self.arena.nodes[p as usize];
                seq.index_of(pn.handle) < seq.index_of(n.handle)
            }
        }
    }

    /// 0-based rank of `val` (which must be present) in `t`.
    fn rank_of(&self, t: u32, val: i64) -> u32 {
        let mut cur = t;
        let mut acc = 0u32;
        loop {
            let n = &self.arena.nodes[cur as usize];
            if val < n.val {
                cur = n.left;
            } else if val == n.val {
                return acc + self.arena.size(n.left);
            } else {
                acc += self.arena.size(n.left) + 1;
                cur = n.right;
            }
        }
    }

    /// Remove the element at current position `pos` of `seq`. Must be
    /// called while the element is still present in `seq`. Returns the
    /// number of levels the demotion cascade visited.
    pub fn delete(&mut self, seq: &DynSeq, pos: usize) -> usize {
        let val = seq.get(pos).expect("in range");
        let level = self.support_level(seq, val, pos) + 1;
        let root = self.roots[level - 1];
        let (low, rest) = self.arena.split_lt(root, val);
        let (dead, high) = self.arena.split_leq(rest, val);
        debug_assert_eq!(self.arena.size(dead), 1);
        self.arena.release(dead);
        self.roots[level - 1] = self.arena.merge(low, high);
        let visited = self.cascade_down(seq, level, val, val);
        while let Some(&last) = self.roots.last() {
            if last == NIL {
                self.roots.pop();
            } else {
                break;
            }
        }
        visited
    }

    /// Levels above `level` may demote after values `[lo_val..=hi_val]`
    /// left `level`. Demoted elements of level k slide into level k-1.
    fn cascade_down(&mut self, seq: &DynSeq, mut level: usize, mut lo_val: i64, mut hi_val: i64) -> usize {
        let mut visited = 0usize;
        loop {
            visited += 1;
            let survivors = self.roots[level - 1];
            // Last survivor below the vanished range, by value.
            let guard_pos = match self.arena.pred(survivors, lo_val) {
                Some(id) => seq.index_of(self.arena.nodes[id as usize].handle),
                None => usize::MAX,
            };
            // First survivor above the vanished range.
            let ceil_val = match self.arena.succ(survivors, hi_val) {
                Some(id) => self.arena.nodes[id as usize].val,
                None => i64::MAX,
            };
            if level == self.roots.len() {
                return visited;
            }
            let upper = self.roots[level];
            let (cand, keep_hi) = if ceil_val == i64::MAX {
                (upper, NIL)
            } else {
                self.arena.split_lt(upper, ceil_val)
            };
            // Within cand, positions decrease as values grow, so "position
            // left of guard" selects a suffix.
            let total = self.arena.size(cand);
            let pos_ok = |s: &Self, id: u32| -> bool {
                guard_pos == usize::MAX
                    || seq.index_of(s.arena.nodes[id as usize].handle) < guard_pos
            };
            let demoted_from = if total == 0 {
                None
            } else if pos_ok(self, self.arena.select(cand, 0)) {
                Some(0)
            } else {
                let (mut lo, mut hi) = (0u32, total - 1);
                // first rank with pos_ok, if any
                if !pos_ok(self, self.arena.select(cand, total - 1)) {
                    None
                } else {
                    while lo < hi {
                        let mid = (lo + hi) / 2;
                        if pos_ok(self, self.arena.select(cand, mid)) {
                            hi = mid;
                        } else {
                            lo = mid + 1;
                        }
                    }
                    Some(lo)
                }
            };
            let Some(from_rank) = demoted_from else {
                self.roots[level] = self.arena.merge(cand, keep_hi);
                return visited;
            };
            let from_val = {
                let id = self.arena.select(cand, from_rank);
                self.arena.nodes[id as usize].val
            };
            let (keep_lo, demoted) = self.arena.split_lt(cand, from_val);
            self.roots[level] = self.arena.merge(keep_lo, keep_hi);

            let new_lo = self.arena.nodes[self.arena.min(demoted).unwrap() as usize].val;
            let new_hi = self.arena.nodes[self.arena.max(demoted).unwrap() as usize].val;
            // Splice into the value gap of the level below.
            let below = self.roots[level - 1];
            let (a, b) = self.arena.split_lt(below, new_lo);
            let merged = self.arena.merge(a, demoted);
            self.roots[level - 1] = self.arena.merge(merged, b);

            lo_val = new_lo;
            hi_val = new_hi;
            level += 1;
        }
    }

    /// Level contents, values ascending, for audits and tests.
    pub fn level_contents(&self, k: usize) -> Vec<(i64, Handle)> {
        let mut out = Vec::new();
        if k >= 1 && k <= self.roots.len() {
            self.arena.collect(self.roots[k - 1], &mut out);
        }
        out
    }

    /// Structural audit: every level non-empty, an antichain (positions
    /// strictly decreasing in value order), and the level assignment equal
    /// to a from-scratch rebuild of `seq`. Test/audit use only.
    pub fn audit(&self, seq: &DynSeq) {
        let vals = seq.to_vec();
        let want = levels(&vals);
        let mut got: Vec<(i64, usize)> = Vec::new();
        for k in 1..=self.roots.len() {
            let content = self.level_contents(k);
            assert!(!content.is_empty(), "empty level {k}");
            let mut prev_pos = usize::MAX;
            for &(v, h) in &content {
                let p = seq.index_of(h);
                assert_eq!(seq.value_of(h), v, "handle/value mismatch");
                assert!(p < prev_pos, "level {k} not an antichain");
                prev_pos = p;
                got.push((v, k));
            }
        }
        got.sort_unstable();
        let mut want_pairs: Vec<(i64, usize)> = vals
            .iter()
            .zip(want.iter())
            .map(|(&v, &l)| (v, l))
            .collect();
        want_pairs.sort_unstable();
        assert_eq!(got, want_pairs, "level assignment diverged from rebuild");
    }
}

impl Default for LevelForest {
    fn default() -> Self {
        Self::new()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::static_lis::patience_lis;

    fn forest_levels(f: &LevelForest) -> Vec<Vec<i64>> {
        (1..=f.lis())
            .map(|k| f.level_contents(k).into_iter().map(|(v, _)| v).collect())
            .collect()
    }

    #[test]
    fn build_figure_array() {
        let seq = DynSeq::from_values(&[1, 5, 2, 4, 6, 7, 9, 10, 8]);
        let f = LevelForest::build(&seq);
        assert_eq!(f.lis(), 7);
        let lv = forest_levels(&f);
        assert_eq!(lv[0], vec![1]);
        assert_eq!(lv[1], vec![2, 5]);
        assert_eq!(lv[2], vec![4]);
        assert_eq!(lv[3], vec![6]);
        assert_eq!(lv[4], vec![7]);
        assert_eq!(lv[5], vec![8, 9]);
        assert_eq!(lv[6], vec![10]);
    }

    #[test]
    fn build_edges() {
        let seq = DynSeq::new();
        let f = LevelForest::build(&seq);
        assert_eq!(f.lis(), 0);
        let seq = DynSeq::from_values(&[3, 2, 1]);
        let f = LevelForest::build(&seq);
        assert_eq!(f.lis(), 1);
        assert_eq!(forest_levels(&f)[0], vec![1, 2, 3]);
    }

    #[test]
    fn figure_insert_and_revert() {
        let mut seq = DynSeq::from_values(&[1, 5, 2, 4, 6, 7, 9, 10, 8]);
        let mut f = LevelForest::build(&seq);
        let h = seq.insert(4, 3).unwrap();
        f.insert(&seq, h);
        assert_eq!(f.lis(), 8);
        f.audit(&seq);
        f.delete(&seq, 4);
        seq.delete(4).unwrap();
        assert_eq!(f.lis(), 7);
        f.audit(&seq);
    }

    #[test]
    fn insert_extremes() {
        let mut seq = DynSeq::from_values(&[1, 5, 2, 4, 6, 7, 9, 10, 8]);
        let mut f = LevelForest::build(&seq);
        // New maximum at the end: joins a fresh top level, no promotions.
        let h = seq.insert(10, 100).unwrap();
        f.insert(&seq, h);
        assert_eq!(f.lis(), 8);
        assert_eq!(forest_levels(&f)[7], vec![100]);
        f.audit(&seq);
        // New minimum at the front joins level 1; every chain can now be
        // prefixed by it, so the old level-1 element is promoted.
        let h = seq.insert(1, 0).unwrap();
        f.insert(&seq, h);
        assert_eq!(forest_levels(&f)[0], vec![0]);
        assert!(forest_levels(&f)[1].contains(&1));
        f.audit(&seq);
    }

    #[test]
    fn delete_edges() {
        let mut seq = DynSeq::from_values(&[5]);
        let mut f = LevelForest::build(&seq);
        f.delete(&seq, 1);
        seq.delete(1).unwrap();
        assert!(f.is_empty());

        // Deleting the sole top-level element drops the LIS by one.
        let mut seq = DynSeq::from_values(&[1, 2, 3]);
        let mut f = LevelForest::build(&seq);
        f.delete(&seq, 3);
        seq.delete(3).unwrap();
        assert_eq!(f.lis(), 2);
        f.audit(&seq);
    }

    #[test]
    fn random_traces_with_audit() {
        let mut rng = Rng64::new(2024);
        for trial in 0..30 {
            let n0 = rng.gen_usize(40);
            let mut seq = DynSeq::new();
            let mut pool: Vec<i64> = (0..4000).collect();
            rng.shuffle(&mut pool);
            for i in 0..n0 {
                seq.insert(i + 1, pool.pop().unwrap()).unwrap();
            }
            let mut f = LevelForest::build(&seq);
            for step in 0..120 {
                let insert = seq.is_empty() || rng.gen_bool();
                if insert {
                    let pos = rng.gen_usize(seq.len() + 1) + 1;
                    let val = pool.pop().unwrap();
                    let h = seq.insert(pos, val).unwrap();
                    f.insert(&seq, h);
                } else {
                    let pos = rng.gen_usize(seq.len()) + 1;
                    f.delete(&seq, pos);
                    seq.delete(pos).unwrap();
                }
                assert_eq!(
                    f.lis(),
                    patience_lis(&seq.to_vec()),
                    "trial {trial} step {step}"
                );
                if step % 10 == 0 {
                    f.audit(&seq);
                }
            }
            f.audit(&seq);
        }
    }

    #[test]
    fn moved_sets_are_value_intervals() {
        // Diff the level assignment around each op: per level, the set of
        // elements that moved must be contiguous by value in the old level.
        let mut rng = Rng64::new(7);
        for _ in 0..20 {
            let n0 = 30 + rng.gen_usize(30);
            let mut vals = rng.permutation(3 * n0);
            vals.truncate(n0);
            let mut seq = DynSeq::from_values(&vals);
            let mut f = LevelForest::build(&seq);
            let mut next = 3 * n0 as i64;
            for _ in 0..60 {
                let before = snapshot(&f, &seq);
                let insert = seq.is_empty() || rng.gen_bool();
                if insert {
                    let pos = rng.gen_usize(seq.len() + 1) + 1;
                    next += 1;
                    let h = seq.insert(pos, next).unwrap();
                    f.insert(&seq, h);
                } else {
                    let pos = rng.gen_usize(seq.len()) + 1;
                    f.delete(&seq, pos);
                    seq.delete(pos).unwrap();
                }
                let after = snapshot(&f, &seq);
                check_interval_moves(&before, &after);
            }
        }
    }

    /// (value -> level), plus per-level ascending value lists.
    fn snapshot(f: &LevelForest, _seq: &DynSeq) -> Vec<Vec<i64>> {
        forest_levels(f)
    }

    fn check_interval_moves(before: &[Vec<i64>], after: &[Vec<i64>]) {
        use std::collections::HashMap;
        let mut lv_before: HashMap<i64, usize> = HashMap::new();
        for (k, level) in before.iter().enumerate() {
            for &v in level {
                lv_before.insert(v, k + 1);
            }
        }
        let mut lv_after: HashMap<i64, usize> = HashMap::new();
        for (k, level) in after.iter().enumerate() {
            for &v in level {
                lv_after.insert(v, k + 1);
            }
        }
        for (k, level) in before.iter().enumerate() {
            // Moved elements of old level k+1 (still present afterwards).
            let moved: Vec<bool> = level
                .iter()
                .map(|v| lv_after.get(v).is_some_and(|&l| l != k + 1))
                .collect();
            let first = moved.iter().position(|&m| m);
            let last = moved.iter().rposition(|&m| m);
            if let (Some(a), Some(b)) = (first, last) {
                assert!(
                    moved[a..=b].iter().all(|&m| m),
                    "moved set in level {} not a contiguous value interval",
                    k + 1
                );
                // All moves are by exactly one level, same direction.
                let dirs: Vec<i64> = level[a..=b]
                    .iter()
                    .map(|v| lv_after[v] as i64 - (k + 1) as i64)
                    .collect();
                assert!(dirs.iter().all(|&d| d == dirs[0] && d.abs() == 1));
            }
        }
        let _ = lv_before;
    }
}
