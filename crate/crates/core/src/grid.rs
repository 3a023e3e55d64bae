//! Extended grid packing and the approximate rectangle-LIS indexes.
//!
//! The combinatorial core: on an m x m table, a Δ-multisegment is a chain
//! of up to Δ axis-aligned segments, each starting at the last cell of the
//! previous one. Taking all Δ-multisegments recovers at least a (Δ-1)/Δ
//! fraction of the best monotone-path score, which single segments cannot
//! ([`best_nonconflicting`] exercises this exhaustively on small tables).
//!
//! The indexes apply this to rectangle-LIS queries. A snake grid splits
//! the points into m row slabs and m column slabs (one child problem
//! each). A dynamic program fills `g(c, c')`, an under-approximation of
//! the LIS of every cell-aligned rectangle, by extending lower-left
//! corners through staircases of strip sweeps hugging the top-right cell;
//! queries combine two corner staircases with an interior table entry.
//! Every estimate is witnessed by an explicit increasing chain, so
//! answers never exceed the truth.

use crate::rng::Rng64;
use crate::scheduler::{BlockFactory, BlockInstance, BlockScheduler, Warming};
use crate::seq::EditOp;
use crate::static_lis::Rect;

// ---------------------------------------------------------------------
// Tables, segments, multisegments.
// ---------------------------------------------------------------------

/// m x m table of non-negative cell scores; cell (x, y) with x, y in
/// [1..=m], x growing right and y growing up.
#[derive(Clone, Debug)]
pub struct Table {
    pub m: usize,
    values: Vec<u64>,
}

impl Table {
    pub fn new(m: usize) -> Self {
        Table {
            m,
            values: vec![0; m * m],
        }
    }

    pub fn get(&self, x: usize, y: usize) -> u64 {
        self.values[(y - 1) * self.m + (x - 1)]
    }

    pub fn set(&mut self, x: usize, y: usize, v: u64) {
        self.values[(y - 1) * self.m + (x - 1)] = v;
    }

    /// The staircase family: one strictly alternating monotone path of
    /// 1-cells (right, up, right, up, ...), everything else 0.
    pub fn staircase(m: usize) -> Self {
        let mut t = Table::new(m);
        let (mut x, mut y) = (1usize, 1usize);
        t.set(x, y, 1);
        while x < m || y < m {
            if x < m {
                x += 1;
                t.set(x, y, 1);
            }
            if y < m {
                y += 1;
                t.set(x, y, 1);
            }
        }
        t
    }
}

/// Max score of a monotone lattice path of length 2m-1 from the
/// bottom-left to the top-right corner (moves: right or up).
pub fn table_score(t: &Table) -> u64 {
    let m = t.m;
    if m == 0 {
        return 0;
    }
    let mut dp = vec![0u64; m + 1];
    for y in 1..=m {
        for x in 1..=m {
            let best = if x == 1 && y == 1 {
                0
            } else if x == 1 {
                dp[x]
            } else if y == 1 {
                dp[x - 1]
            } else {
                dp[x].max(dp[x - 1])
            };
            dp[x] = best + t.get(x, y);
        }
    }
    dp[m]
}

/// Axis-aligned run of cells; `a` is the first (leftmost or bottommost)
/// cell, `b` the last.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Segment {
    pub a: (usize, usize),
    pub b: (usize, usize),
}

impl Segment {
    pub fn new(a: (usize, usize), b: (usize, usize)) -> Self {
        assert!(a.0 == b.0 || a.1 == b.1, "segment must be axis-aligned");
        assert!(a.0 <= b.0 && a.1 <= b.1, "first cell must be lower-left");
        Segment { a, b }
    }

    pub fn cells(&self) -> Vec<(usize, usize)> {
        if self.a.1 == self.b.1 {
            (self.a.0..=self.b.0).map(|x| (x, self.a.1)).collect()
        } else {
            (self.a.1..=self.b.1).map(|y| (self.a.0, y)).collect()
        }
    }

    /// `self` strictly precedes `other`: every cell lower and lefter.
    pub fn precedes(&self, other: &Segment) -> bool {
        self.b.0 < other.a.0 && self.b.1 < other.a.1
    }

    pub fn non_conflicting(&self, other: &Segment) -> bool {
        self.precedes(other) || other.precedes(self)
    }
}

/// Chain of segments, each starting at the last cell of the previous.
#[derive(Clone, Debug)]
pub struct Multisegment {
    pub segs: Vec<Segment>,
}

impl Multisegment {
    pub fn new(segs: Vec<Segment>) -> Self {
        for w in segs.windows(2) {
            assert_eq!(w[0].b, w[1].a, "segments must chain");
        }
        Multisegment { segs }
    }

    pub fn covered_cells(&self) -> Vec<(usize, usize)> {
        let mut cells: Vec<(usize, usize)> =
            self.segs.iter().flat_map(|s| s.cells()).collect();
        cells.sort_unstable();
        cells.dedup();
        cells
    }

    pub fn score(&self, t: &Table) -> u64 {
        self.covered_cells().iter().map(|&(x, y)| t.get(x, y)).sum()
    }

    /// Non-conflicting iff every pair of segments is non-conflicting.
    pub fn non_conflicting(&self, other: &Multisegment) -> bool {
        self.segs
            .iter()
            .all(|s| other.segs.iter().all(|o| s.non_conflicting(o)))
    }
}

/// Exhaustive optimum over non-conflicting sets of Δ-multisegments, each
/// scored as the sum over its covered cells. Small tables only.
pub fn best_nonconflicting(t: &Table, delta: usize) -> u64 {
    let m = t.m;
    assert!(
        m <= 8 && (1..=3).contains(&delta) && (m <= 6 || delta <= 2),
        "table too large for exhaustive search"
    );
    // Multisegments chain up-right, so (start, end) bound their cells.
    let mut cands: Vec<((usize, usize), (usize, usize), u64)> = Vec::new();
    fn extend(
        t: &Table,
        start: (usize, usize),
        end: (usize, usize),
        segs_left: usize,
        score: u64,
        cands: &mut Vec<((usize, usize), (usize, usize), u64)>,
    ) {
        cands.push((start, end, score));
        if segs_left == 0 {
            return;
        }
        let m = t.m;
        let mut add = 0;
        for x in end.0 + 1..=m {
            add += t.get(x, end.1);
            extend(t, start, (x, end.1), segs_left - 1, score + add, cands);
        }
        let mut add = 0;
        for y in end.1 + 1..=m {
            add += t.get(end.0, y);
            extend(t, start, (end.0, y), segs_left - 1, score + add, cands);
        }
    }
    for sx in 1..=m {
        for sy in 1..=m {
            extend(t, (sx, sy), (sx, sy), delta, t.get(sx, sy), &mut cands);
        }
    }
    // Chain DP over strictly dominance-ordered multisegments.
    let mut memo = vec![u64::MAX; (m + 1) * (m + 1)];
    fn best_from(
        x: usize,
        y: usize,
        m: usize,
        cands: &[((usize, usize), (usize, usize), u64)],
        memo: &mut [u64],
    ) -> u64 {
        let key = y * (m + 1) + x;
        if memo[key] != u64::MAX {
            return memo[key];
        }
        let mut best = 0;
        for &(a, b, score) in cands {
            if a.0 > x && a.1 > y {
                best = best.max(score + best_from(b.0, b.1, m, cands, memo));
            }
        }
        memo[key] = best;
        best
    }
    best_from(0, 0, m, &cands, &mut memo)
}

// ---------------------------------------------------------------------
// Geometric value ladder.
// ---------------------------------------------------------------------

/// Geometric ladder of candidate LIS values from 1 up to at least n with
/// consecutive ratio at most 1 + eps.
#[derive(Clone, Debug)]
pub struct ValueLadder {
    pub levels: Vec<usize>,
}

impl ValueLadder {
    pub fn new(n: usize, eps: f64) -> Self {
        assert!(eps > 0.0);
        let mut levels = vec![1usize];
        let mut cur = 1.0f64;
        while *levels.last().unwrap() < n.max(1) {
            cur *= 1.0 + eps;
            let v = cur.ceil() as usize;
            if v > *levels.last().unwrap() {
                levels.push(v);
            }
        }
        ValueLadder { levels }
    }

    /// Largest ladder value <= v (for v >= 1).
    pub fn round_down(&self, v: usize) -> usize {
        let i = self.levels.partition_point(|&x| x <= v);
        self.levels[i.saturating_sub(1)]
    }

    pub fn len(&self) -> usize {
        self.levels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.levels.is_empty()
    }
}

// ---------------------------------------------------------------------
// Snake grid over a point set.
// ---------------------------------------------------------------------

/// LIS of a y-increasing chain over points already sorted by x.
fn patience_tails(points_y: impl Iterator<Item = i64>) -> usize {
    let mut tails: Vec<i64> = Vec::new();
    for y in points_y {
        match tails.binary_search(&y) {
            Ok(_) => {}
            Err(pos) => {
                if pos == tails.len() {
                    tails.push(y);
                } else {
                    tails[pos] = y;
                }
            }
        }
    }
    tails.len()
}

const OPEN_LO: i64 = i64::MIN / 2;
const OPEN_HI: i64 = i64::MAX / 2;

/// m x m grid whose row and column slabs evenly divide the points.
struct SnakeGrid {
    m: usize,
    /// x_edges[c]: largest x-coordinate of column slab c (1-based);
    /// x_edges[0] is an open lower bound and x_edges[m] an upper one.
    x_edges: Vec<i64>,
    y_edges: Vec<i64>,
    /// Points of each row slab / column slab, sorted by x.
    rows: Vec<Vec<(i64, i64)>>,
    cols: Vec<Vec<(i64, i64)>>,
}

impl SnakeGrid {
    fn build(points: &[(i64, i64)], m: usize) -> Self {
        let n = points.len();
        let mut by_x: Vec<(i64, i64)> = points.to_vec();
        by_x.sort_unstable();
        let mut ys: Vec<i64> = points.iter().map(|p| p.1).collect();
        ys.sort_unstable();

        let mut x_edges = vec![OPEN_LO];
        let mut y_edges = vec![OPEN_LO];
        for i in 1..=m {
            let hi = (i * n).div_ceil(m).min(n);
            x_edges.push(if i == m || hi == 0 {
                OPEN_HI
            } else {
                by_x[hi - 1].0
            });
            y_edges.push(if i == m || hi == 0 { OPEN_HI } else { ys[hi - 1] });
        }
        let mut grid = SnakeGrid {
            m,
            x_edges,
            y_edges,
            rows: vec![Vec::new(); m + 1],
            cols: vec![Vec::new(); m + 1],
        };
        for &p in &by_x {
            let r = grid.row_of(p.1);
            let c = grid.col_of(p.0);
            grid.rows[r].push(p);
            grid.cols[c].push(p);
        }
        grid
    }

    fn row_of(&self, y: i64) -> usize {
        self.y_edges.partition_point(|&e| e < y).clamp(1, self.m)
    }

    fn col_of(&self, x: i64) -> usize {
        self.x_edges.partition_point(|&e| e < x).clamp(1, self.m)
    }

    /// LIS of row slab r restricted to x in (xl, xh] and y in (yl, yh].
    fn row_strip_lis(&self, r: usize, xl: i64, xh: i64, yl: i64, yh: i64) -> usize {
        patience_tails(
            self.rows[r]
                .iter()
                .filter(|p| xl < p.0 && p.0 <= xh && yl < p.1 && p.1 <= yh)
                .map(|p| p.1),
        )
    }

    fn col_strip_lis(&self, c: usize, xl: i64, xh: i64, yl: i64, yh: i64) -> usize {
        patience_tails(
            self.cols[c]
                .iter()
                .filter(|p| xl < p.0 && p.0 <= xh && yl < p.1 && p.1 <= yh)
                .map(|p| p.1),
        )
    }
}

// ---------------------------------------------------------------------
// Cell-aligned rectangle table.
// ---------------------------------------------------------------------

/// Under-approximations g(c, c') of the LIS of every cell-aligned
/// rectangle, plus the exact per-row/per-column strip tables feeding it.
struct RectTable {
    m: usize,
    /// row_tab[r][(a-1)m + (b-1)]: LIS of cells [a..=b] of row slab r.
    row_tab: Vec<Vec<u32>>,
    col_tab: Vec<Vec<u32>>,
    /// g indexed by (x1, y1, x2, y2), all 1-based; 0 when empty.
    g: Vec<u32>,
    delta: usize,
}

impl RectTable {
    fn idx(m: usize, x1: usize, y1: usize, x2: usize, y2: usize) -> usize {
        (((y1 - 1) * m + (x1 - 1)) * m + (x2 - 1)) * m + (y2 - 1)
    }

    fn g(&self, lo: (usize, usize), hi: (usize, usize)) -> u32 {
        if lo.0 > hi.0 || lo.1 > hi.1 {
            return 0;
        }
        self.g[Self::idx(self.m, lo.0, lo.1, hi.0, hi.1)]
    }

    fn row_tab_for(grid: &SnakeGrid, r: usize) -> Vec<u32> {
        let m = grid.m;
        let mut tab = vec![0u32; m * m];
        for a in 1..=m {
            for b in a..=m {
                tab[(a - 1) * m + (b - 1)] = grid.row_strip_lis(
                    r,
                    grid.x_edges[a - 1],
                    grid.x_edges[b],
                    OPEN_LO,
                    OPEN_HI,
                ) as u32;
            }
        }
        tab
    }

    fn col_tab_for(grid: &SnakeGrid, c: usize) -> Vec<u32> {
        let m = grid.m;
        let mut tab = vec![0u32; m * m];
        for a in 1..=m {
            for b in a..=m {
                tab[(a - 1) * m + (b - 1)] = grid.col_strip_lis(
                    c,
                    OPEN_LO,
                    OPEN_HI,
                    grid.y_edges[a - 1],
                    grid.y_edges[b],
                ) as u32;
            }
        }
        tab
    }

    fn build(grid: &SnakeGrid, delta: usize) -> Self {
        let m = grid.m;
        let row_tab = std::iter::once(Vec::new())
            .chain((1..=m).map(|r| Self::row_tab_for(grid, r)))
            .collect();
        let col_tab = std::iter::once(Vec::new())
            .chain((1..=m).map(|c| Self::col_tab_for(grid, c)))
            .collect();
        let mut table = RectTable {
            m,
            row_tab,
            col_tab,
            g: vec![0; m * m * m * m],
            delta,
        };
        table.fill();
        table
    }

    fn row_span(&self, r: usize, a: usize, b: usize) -> u32 {
        self.row_tab[r][(a - 1) * self.m + (b - 1)]
    }

    fn col_span(&self, c: usize, a: usize, b: usize) -> u32 {
        self.col_tab[c][(a - 1) * self.m + (b - 1)]
    }

    /// Corner staircases anchored at the top-right cell (x2, y2): chains
    /// of at most `delta` strip sweeps descending left/down. A candidate
    /// (cx, cy, v) consumed everything strictly above-right of the cell
    /// corner (cx, cy) for value v. Independent of the bottom-left cell.
    fn corner_candidates(&self, x2: usize, y2: usize) -> Vec<(usize, usize, u32)> {
        let mut best = std::collections::HashMap::<(usize, usize), u32>::new();
        // State: corner + orientation of the next sweep.
        let mut frontier: Vec<(usize, usize, bool, u32)> =
            vec![(x2, y2, true, 0), (x2, y2, false, 0)];
        for _ in 0..self.delta {
            let mut next = std::collections::HashMap::<(usize, usize, bool), u32>::new();
            for &(cx, cy, horiz, v) in &frontier {
                if cx == 0 || cy == 0 {
                    continue;
                }
                if horiz {
                    for a in 1..=cx {
                        let add = self.row_span(cy, a, cx);
                        let e = next.entry((a - 1, cy - 1, false)).or_insert(0);
                        *e = (*e).max(v + add);
                    }
                } else {
                    for a in 1..=cy {
                        let add = self.col_span(cx, a, cy);
                        let e = next.entry((cx - 1, a - 1, true)).or_insert(0);
                        *e = (*e).max(v + add);
                    }
                }
            }
            frontier = next
                .into_iter()
                .map(|((cx, cy, h), v)| (cx, cy, h, v))
                .collect();
            if frontier.is_empty() {
                break;
            }
            for &(cx, cy, _, v) in &frontier {
                let e = best.entry((cx, cy)).or_insert(0);
                *e = (*e).max(v);
            }
        }
        // Pareto prune: drop entries dominated in corner and value.
        let mut list: Vec<(usize, usize, u32)> =
            best.into_iter().map(|((x, y), v)| (x, y, v)).collect();
        list.sort_unstable_by(|a, b| b.cmp(a));
        let mut pruned: Vec<(usize, usize, u32)> = Vec::new();
        for &(x, y, v) in &list {
            if !pruned
                .iter()
                .any(|&(px, py, pv)| px >= x && py >= y && pv >= v)
            {
                pruned.push((x, y, v));
            }
        }
        pruned
    }

    fn fill(&mut self) {
        let m = self.m;
        self.g.fill(0);
        for y2 in 1..=m {
            for x2 in 1..=m {
                let cands = self.corner_candidates(x2, y2);
                for y1 in (1..=y2).rev() {
                    for x1 in (1..=x2).rev() {
                        let mut best: u32 = if x1 == x2 {
                            self.col_span(x1, y1, y2)
                        } else if y1 == y2 {
                            self.row_span(y1, x1, x2)
                        } else {
                            0
                        };
                        if x1 < x2 {
                            best = best.max(self.g[Self::idx(m, x1, y1, x2 - 1, y2)]);
                        }
                        if y1 < y2 {
                            best = best.max(self.g[Self::idx(m, x1, y1, x2, y2 - 1)]);
                        }
                        if x1 != x2 && y1 != y2 {
                            for &(cx, cy, v) in &cands {
                                if cx + 1 < x1 || cy + 1 < y1 {
                                    continue; // staircase pokes out of the rect
                                }
                                let inner = if cx >= x1 && cy >= y1 {
                                    self.g[Self::idx(m, x1, y1, cx, cy)]
                                } else {
                                    0
                                };
                                best = best.max(v + inner);
                            }
                        }
                        self.g[Self::idx(m, x1, y1, x2, y2)] = best;
                    }
                }
            }
        }
    }
}

// ---------------------------------------------------------------------
// Shared query machinery.
// ---------------------------------------------------------------------

/// One corner staircase state: everything beyond line indexes (ix, iy) of
/// the query box is consumed for `value`.
#[derive(Clone, Copy, Debug)]
struct QState {
    ix: usize,
    iy: usize,
    horiz_next: bool,
    value: usize,
}

const QUERY_STATE_CAP: usize = 48;

/// Enumerate corner staircases over the query box's line grid.
/// `row_eval(ix, iy, a)` evaluates the horizontal strip swept at state
/// (ix, iy) back to line a; `col_eval` the vertical one. The mirrored
/// variant sweeps up-right from the bottom-left corner instead.
fn staircase_states(
    lx: usize,
    ly: usize,
    max_segs: usize,
    row_eval: &dyn Fn(usize, usize, usize) -> usize,
    col_eval: &dyn Fn(usize, usize, usize) -> usize,
    mirrored: bool,
) -> Vec<QState> {
    let start = if mirrored { (0, 0) } else { (lx - 1, ly - 1) };
    let seed = |h| QState {
        ix: start.0,
        iy: start.1,
        horiz_next: h,
        value: 0,
    };
    let mut all: Vec<QState> = vec![seed(true)];
    let mut frontier = vec![seed(true), seed(false)];
    for _ in 0..max_segs {
        let mut next: Vec<QState> = Vec::new();
        for st in &frontier {
            if mirrored {
                if st.horiz_next {
                    if st.iy + 1 >= ly {
                        continue;
                    }
                    for a in st.ix + 1..lx {
                        next.push(QState {
                            ix: a,
                            iy: st.iy + 1,
                            horiz_next: false,
                            value: st.value + row_eval(st.ix, st.iy, a),
                        });
                    }
                } else {
                    if st.ix + 1 >= lx {
                        continue;
                    }
                    for a in st.iy + 1..ly {
                        next.push(QState {
                            ix: st.ix + 1,
                            iy: a,
                            horiz_next: true,
                            value: st.value + col_eval(st.ix, st.iy, a),
                        });
                    }
                }
            } else if st.horiz_next {
                if st.iy == 0 {
                    continue;
                }
                for a in 0..st.ix {
                    next.push(QState {
                        ix: a,
                        iy: st.iy - 1,
                        horiz_next: false,
                        value: st.value + row_eval(st.ix, st.iy, a),
                    });
                }
            } else {
                if st.ix == 0 {
                    continue;
                }
                for a in 0..st.iy {
                    next.push(QState {
                        ix: st.ix - 1,
                        iy: a,
                        horiz_next: true,
                        value: st.value + col_eval(st.ix, st.iy, a),
                    });
                }
            }
        }
        next.sort_unstable_by(|a, b| {
            (a.ix, a.iy, a.horiz_next)
                .cmp(&(b.ix, b.iy, b.horiz_next))
                .then(b.value.cmp(&a.value))
        });
        next.dedup_by_key(|s| (s.ix, s.iy, s.horiz_next));
        next.sort_unstable_by(|a, b| b.value.cmp(&a.value));
        next.truncate(QUERY_STATE_CAP);
        all.extend(next.iter().copied());
        frontier = next;
        if frontier.is_empty() {
            break;
        }
    }
    all
}

/// Answer a box query (xl, xh] x (yl, yh] over a snake grid with its
/// rectangle table; strips are evaluated by the given closures (exact
/// buckets for the dynamic index, child indexes for the static one).
#[allow(clippy::too_many_arguments)]
fn query_box(
    grid: &SnakeGrid,
    rects: &RectTable,
    delta: usize,
    xl: i64,
    xh: i64,
    yl: i64,
    yh: i64,
    row_strip: &dyn Fn(usize, i64, i64, i64, i64) -> usize,
    col_strip: &dyn Fn(usize, i64, i64, i64, i64) -> usize,
) -> usize {
    let m = grid.m;
    let mut lines_x: Vec<i64> = vec![xl];
    for c in 1..m {
        let e = grid.x_edges[c];
        if xl < e && e < xh {
            lines_x.push(e);
        }
    }
    lines_x.push(xh);
    let mut lines_y: Vec<i64> = vec![yl];
    for r in 1..m {
        let e = grid.y_edges[r];
        if yl < e && e < yh {
            lines_y.push(e);
        }
    }
    lines_y.push(yh);
    let (lx, ly) = (lines_x.len(), lines_y.len());

    // First fully-contained column slab right of a line / last left of it.
    let full_col_lo =
        |line: i64| -> usize { grid.x_edges.partition_point(|&e| e < line) + 1 };
    let full_col_hi =
        |line: i64| -> usize { grid.x_edges.partition_point(|&e| e <= line).saturating_sub(1) };
    let full_row_lo =
        |line: i64| -> usize { grid.y_edges.partition_point(|&e| e < line) + 1 };
    let full_row_hi =
        |line: i64| -> usize { grid.y_edges.partition_point(|&e| e <= line).saturating_sub(1) };

    let strip_row = |i: usize| grid.row_of(lines_y[i]);
    let strip_col = |i: usize| grid.col_of(lines_x[i]);

    let tr = staircase_states(
        lx,
        ly,
        delta + 1,
        &|ix, iy, a| row_strip(strip_row(iy), lines_x[a], lines_x[ix], lines_y[iy - 1], lines_y[iy]),
        &|ix, iy, a| col_strip(strip_col(ix), lines_x[ix - 1], lines_x[ix], lines_y[a], lines_y[iy]),
        false,
    );
    let bl = staircase_states(
        lx,
        ly,
        delta + 1,
        &|ix, iy, a| {
            row_strip(
                strip_row(iy + 1),
                lines_x[ix],
                lines_x[a],
                lines_y[iy],
                lines_y[iy + 1],
            )
        },
        &|ix, iy, a| {
            col_strip(
                strip_col(ix + 1),
                lines_x[ix],
                lines_x[ix + 1],
                lines_y[iy],
                lines_y[a],
            )
        },
        true,
    );

    let mut best = 0usize;
    for b in &bl {
        for t in &tr {
            if b.ix > t.ix || b.iy > t.iy {
                continue;
            }
            let lo = (full_col_lo(lines_x[b.ix]), full_row_lo(lines_y[b.iy]));
            let hi = (
                full_col_hi(lines_x[t.ix]).min(m),
                full_row_hi(lines_y[t.iy]).min(m),
            );
            let v = b.value + t.value + rects.g(lo, hi) as usize;
            best = best.max(v);
        }
    }
    best
}

// ---------------------------------------------------------------------
// Static index.
// ---------------------------------------------------------------------

#[derive(Clone, Copy, Debug)]
pub struct IndexConfig {
    pub eps: f64,
    pub kappa: f64,
    /// Cap on recursion depth; the schedule-derived depth applies if None.
    pub max_depth: Option<usize>,
    /// Children with at most this many points answer queries exactly.
    pub leaf_cutoff: usize,
    /// Cap on the grid side per level.
    pub m_cap: usize,
}

impl IndexConfig {
    pub fn new(eps: f64, kappa: f64) -> Self {
        IndexConfig {
            eps,
            kappa,
            max_depth: None,
            leaf_cutoff: 64,
            m_cap: 16,
        }
    }

    pub fn with_depth(mut self, depth: usize) -> Self {
        self.max_depth = Some(depth);
        self
    }

    /// Recursion depth of the preprocessing schedule.
    pub fn schedule_depth(&self) -> usize {
        let k = (3.0 * (1.0 / self.kappa).ln()).ceil() as i64 + 5;
        let k = k.max(1) as usize;
        self.max_depth.map_or(k, |d| d.clamp(1, k.max(1)))
    }

    /// Per-level slack eps' = eps / (2 depth).
    pub fn eps_prime(&self) -> f64 {
        self.eps / (2.0 * self.schedule_depth() as f64)
    }

    pub fn delta(&self) -> usize {
        ((1.0 / self.eps_prime()).ceil() as usize).max(2)
    }

    /// Grid side exponent: q_0 = 5, r_{i+1} = q_i/(q_i + 3),
    /// q_{i+1} = r_{i+1} + q_i (1 - r_{i+1}).
    pub fn grid_side(&self, n: usize, level: usize) -> usize {
        let mut q = 5.0f64;
        let mut r = q / (q + 3.0);
        for _ in 0..level {
            q = r + q * (1.0 - r);
            r = q / (q + 3.0);
        }
        let m = (n as f64).powf(r).ceil() as usize;
        m.clamp(2, self.m_cap.min(n.max(2)))
    }
}

/// Static (1 - eps)-approximate rectangle-LIS index.
pub struct QueryLisIndex {
    points: Vec<(i64, i64)>, // sorted by x
    cfg: IndexConfig,
    ladder: ValueLadder,
    node: Node,
}

enum Node {
    /// Few points or depth exhausted: exact patience per query.
    Leaf,
    Grid(Box<GridNode>),
}

struct GridNode {
    grid: SnakeGrid,
    rects: RectTable,
    row_children: Vec<QueryLisIndex>,
    col_children: Vec<QueryLisIndex>,
}

impl QueryLisIndex {
    pub fn build(points: Vec<(i64, i64)>, cfg: IndexConfig) -> Self {
        Self::build_level(points, cfg, 0)
    }

    fn build_level(mut points: Vec<(i64, i64)>, cfg: IndexConfig, level: usize) -> Self {
        points.sort_unstable();
        let n = points.len();
        let ladder = ValueLadder::new(n, cfg.eps_prime().max(1e-6));
        if n <= cfg.leaf_cutoff || level >= cfg.schedule_depth() {
            return QueryLisIndex {
                points,
                cfg,
                ladder,
                node: Node::Leaf,
            };
        }
        let m = cfg.grid_side(n, level);
        let grid = SnakeGrid::build(&points, m);
        let rects = RectTable::build(&grid, cfg.delta());
        let row_children = (1..=m)
            .map(|r| Self::build_level(grid.rows[r].clone(), cfg, level + 1))
            .collect();
        let col_children = (1..=m)
            .map(|c| Self::build_level(grid.cols[c].clone(), cfg, level + 1))
            .collect();
        QueryLisIndex {
            points,
            cfg,
            ladder,
            node: Node::Grid(Box::new(GridNode {
                grid,
                rects,
                row_children,
                col_children,
            })),
        }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn ladder(&self) -> &ValueLadder {
        &self.ladder
    }

    /// Approximate LIS of the points inside `r`: never above the truth,
    /// within a (1 - eps) factor below it.
    pub fn query_rect(&self, r: &Rect) -> usize {
        // Rect borders avoid point coordinates, so open/closed agree.
        self.query(r.x_lo, r.x_hi - 1, r.y_lo, r.y_hi - 1)
    }

    /// Query over the box (xl, xh] x (yl, yh].
    fn query(&self, xl: i64, xh: i64, yl: i64, yh: i64) -> usize {
        if xl >= xh || yl >= yh {
            return 0;
        }
        match &self.node {
            Node::Leaf => patience_tails(
                self.points
                    .iter()
                    .filter(|p| xl < p.0 && p.0 <= xh && yl < p.1 && p.1 <= yh)
                    .map(|p| p.1),
            ),
            Node::Grid(gn) => query_box(
                &gn.grid,
                &gn.rects,
                self.cfg.delta(),
                xl,
                xh,
                yl,
                yh,
                &|r, a, b, c, d| gn.row_children[r - 1].query(a, b, c, d),
                &|cc, a, b, c, d| gn.col_children[cc - 1].query(a, b, c, d),
            ),
        }
    }
}

// ---------------------------------------------------------------------
// Dynamic index.
// ---------------------------------------------------------------------

/// Dynamic approximate index over an evolving sequence, viewed as points
/// (position, value). Row slabs are value ranges, column slabs are
/// position-count ranges, so each edit lands in exactly one row and one
/// column; the two affected strip tables and the rectangle table are
/// refreshed per op. Wrap in the block scheduler for worst-case steps.
pub struct DynApproxIndex {
    shadow: Vec<i64>,
    m: usize,
    delta: usize,
    /// Column slab sizes in position space.
    col_counts: Vec<usize>,
    /// Static value thresholds for row slabs.
    y_edges: Vec<i64>,
    rects: RectTable,
    work: u64,
    rebuilt_children: u64,
}

impl DynApproxIndex {
    pub fn build(values: &[i64], eps: f64, kappa: f64) -> Self {
        let n = values.len();
        let cfg = IndexConfig::new(eps, kappa).with_depth(1);
        let m = ((n.max(4) as f64).powf(kappa / 4.0).ceil() as usize).clamp(2, cfg.m_cap);
        let points: Vec<(i64, i64)> = values
            .iter()
            .enumerate()
            .map(|(i, &v)| (i as i64 + 1, v))
            .collect();
        let grid = SnakeGrid::build(&points, m);
        let col_counts = (1..=m).map(|c| grid.cols[c].len()).collect();
        let y_edges = grid.y_edges.clone();
        let delta = cfg.delta();
        let rects = RectTable::build(&grid, delta);
        DynApproxIndex {
            shadow: values.to_vec(),
            m,
            delta,
            col_counts,
            y_edges,
            rects,
            work: (n as u64 + 4) * (m as u64) * (m as u64),
            rebuilt_children: 0,
        }
    }

    pub fn len(&self) -> usize {
        self.shadow.len()
    }

    pub fn is_empty(&self) -> bool {
        self.shadow.is_empty()
    }

    /// Child problems rebuilt so far (two per op).
    pub fn rebuilt_children(&self) -> u64 {
        self.rebuilt_children
    }

    fn col_of_pos(&self, pos: usize) -> usize {
        let mut acc = 0usize;
        for (c, &cnt) in self.col_counts.iter().enumerate() {
            acc += cnt;
            if pos <= acc {
                return c + 1;
            }
        }
        self.m
    }

    fn row_of_val(&self, val: i64) -> usize {
        self.y_edges.partition_point(|&e| e < val).clamp(1, self.m)
    }

    /// Rebuild the bucket view of the current shadow sequence.
    fn grid_view(&self) -> SnakeGrid {
        let m = self.m;
        let mut x_edges = vec![OPEN_LO];
        let mut acc = 0i64;
        for (c, &cnt) in self.col_counts.iter().enumerate() {
            acc += cnt as i64;
            x_edges.push(if c + 1 == m { OPEN_HI } else { acc });
        }
        let mut rows = vec![Vec::new(); m + 1];
        let mut cols = vec![Vec::new(); m + 1];
        for (i, &v) in self.shadow.iter().enumerate() {
            let p = (i as i64 + 1, v);
            rows[self.row_of_val(v)].push(p);
            cols[self.col_of_pos(i + 1)].push(p);
        }
        SnakeGrid {
            m,
            x_edges,
            y_edges: self.y_edges.clone(),
            rows,
            cols,
        }
    }

    pub fn apply(&mut self, op: EditOp) {
        let (row, col) = match op {
            EditOp::Insert { pos, val } => {
                assert!(pos >= 1 && pos <= self.shadow.len() + 1, "bad insert");
                let col = self.col_of_pos(pos.min(self.shadow.len().max(1)));
                self.shadow.insert(pos - 1, val);
                self.col_counts[col - 1] += 1;
                (self.row_of_val(val), col)
            }
            EditOp::Delete { pos } => {
                assert!(pos >= 1 && pos <= self.shadow.len(), "bad delete");
                let col = self.col_of_pos(pos);
                let val = self.shadow.remove(pos - 1);
                self.col_counts[col - 1] -= 1;
                (self.row_of_val(val), col)
            }
        };
        self.rebuilt_children += 2;
        let grid = self.grid_view();
        self.rects.row_tab[row] = RectTable::row_tab_for(&grid, row);
        self.rects.col_tab[col] = RectTable::col_tab_for(&grid, col);
        self.rects.fill();
        let m = self.m as u64;
        self.work += self.shadow.len() as u64 + m.pow(4) / 4 + 4;
    }

    /// Approximate LIS of the whole current sequence.
    pub fn lis(&self) -> usize {
        if self.shadow.is_empty() {
            return 0;
        }
        self.query_box(OPEN_LO, OPEN_HI, OPEN_LO, OPEN_HI)
    }

    pub fn query_rect(&self, r: &Rect) -> usize {
        self.query_box(r.x_lo, r.x_hi - 1, r.y_lo, r.y_hi - 1)
    }

    fn query_box(&self, xl: i64, xh: i64, yl: i64, yh: i64) -> usize {
        if xl >= xh || yl >= yh || self.shadow.is_empty() {
            return 0;
        }
        let grid = self.grid_view();
        query_box(
            &grid,
            &self.rects,
            self.delta,
            xl,
            xh,
            yl,
            yh,
            &|r, a, b, c, d| grid.row_strip_lis(r, a, b, c, d),
            &|cc, a, b, c, d| grid.col_strip_lis(cc, a, b, c, d),
        )
    }
}

// ---------------------------------------------------------------------
// Scheduled dynamic engine.
// ---------------------------------------------------------------------

pub struct DynApproxFactory {
    pub eps: f64,
    pub kappa: f64,
}

pub struct DynApproxWarming {
    snapshot: Vec<i64>,
    eps: f64,
    kappa: f64,
    built: Option<DynApproxIndex>,
    work: u64,
}

impl BlockInstance for DynApproxIndex {
    fn apply(&mut self, op: EditOp) {
        DynApproxIndex::apply(self, op);
    }
    fn answer(&mut self) -> usize {
        self.work += (self.m as u64).pow(2);
        self.lis()
    }
    fn work_units(&self) -> u64 {
        self.work
    }
}

impl Warming for DynApproxWarming {
    type Instance = DynApproxIndex;
    fn advance(&mut self, _units: u64) -> bool {
        if self.built.is_none() {
            let idx = DynApproxIndex::build(&self.snapshot, self.eps, self.kappa);
            self.work = idx.work;
            self.built = Some(idx);
        }
        true
    }
    fn finish(self) -> DynApproxIndex {
        self.built.expect("advanced")
    }
    fn work_units(&self) -> u64 {
        self.work
    }
}

impl BlockFactory for DynApproxFactory {
    type Instance = DynApproxIndex;
    type Warming = DynApproxWarming;

    fn begin(&self, snapshot: &[i64], _block: u64) -> DynApproxWarming {
        DynApproxWarming {
            snapshot: snapshot.to_vec(),
            eps: self.eps,
            kappa: self.kappa,
            built: None,
            work: 0,
        }
    }

    fn block_len(&self, n: usize) -> usize {
        let g = (n as f64).powf(1.0 - self.kappa / 4.0).ceil() as usize;
        g.clamp(1, n / 2 + 10)
    }

    fn preprocess_units(&self, n: usize) -> u64 {
        let m = ((n.max(4) as f64).powf(self.kappa / 4.0).ceil() as u64).clamp(2, 16);
        (n as u64 + 4) * m * m + m.pow(4)
    }

    fn step_units(&self, n: usize) -> u64 {
        let m = ((n.max(4) as f64).powf(self.kappa / 4.0).ceil() as u64).clamp(2, 16);
        (n as u64 + 4) * 4 + m.pow(4)
    }
}

pub type ScheduledApprox = BlockScheduler<DynApproxFactory>;

pub fn scheduled_approx(initial: &[i64], eps: f64, kappa: f64) -> ScheduledApprox {
    BlockScheduler::new(DynApproxFactory { eps, kappa }, initial)
}

/// Random point set with distinct odd coordinates (so even rectangle
/// borders never collide with points).
pub fn random_point_set(n: usize, rng: &mut Rng64) -> Vec<(i64, i64)> {
    let xs = rng.permutation(n);
    let ys = rng.permutation(n);
    (0..n).map(|i| (2 * xs[i] + 1, 2 * ys[i] + 1)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::static_lis::{lis_rect_brute, patience_lis, PointSet};

    #[test]
    fn table_score_examples() {
        let t = Table::new(3);
        assert_eq!(table_score(&t), 0);

        let stair = Table::staircase(8);
        assert_eq!(table_score(&stair), 15);

        let mut one = Table::new(1);
        one.set(1, 1, 7);
        assert_eq!(table_score(&one), 7);
    }

    #[test]
    fn staircase_single_segments_top_out_at_two_thirds() {
        let stair = Table::staircase(8);
        assert_eq!(best_nonconflicting(&stair, 1), 10);
    }

    #[test]
    fn generous_delta_covers_small_paths() {
        // A 2-multisegment covers the whole m = 2 staircase.
        let small = Table::staircase(2);
        assert_eq!(best_nonconflicting(&small, 2), table_score(&small));
        // And more segments never hurt.
        let stair = Table::staircase(6);
        let s1 = best_nonconflicting(&stair, 1);
        let s2 = best_nonconflicting(&stair, 2);
        let s3 = best_nonconflicting(&stair, 3);
        assert!(s1 <= s2 && s2 <= s3);
    }

    #[test]
    fn multisegment_guarantee_exhaustive_paths_m4() {
        let m = 4usize;
        let mut count = 0;
        for mask in 0u32..(1 << (2 * m - 2)) {
            if mask.count_ones() as usize != m - 1 {
                continue;
            }
            let mut t = Table::new(m);
            let (mut x, mut y) = (1, 1);
            t.set(1, 1, 1);
            for b in 0..(2 * m - 2) {
                if mask >> b & 1 == 1 {
                    x += 1;
                } else {
                    y += 1;
                }
                t.set(x, y, 1);
            }
            count += 1;
            let score = table_score(&t);
            assert_eq!(score, (2 * m - 1) as u64);
            for delta in 1..=3usize {
                let got = best_nonconflicting(&t, delta);
                assert!(
                    got * delta as u64 >= (delta as u64 - 1) * score,
                    "delta {delta} got {got} score {score}"
                );
            }
        }
        assert_eq!(count, 20); // C(6, 3) monotone paths
    }

    #[test]
    fn multisegment_guarantee_random_tables() {
        let mut rng = Rng64::new(77);
        for _ in 0..60 {
            let m = 2 + rng.gen_usize(5);
            let mut t = Table::new(m);
            for x in 1..=m {
                for y in 1..=m {
                    t.set(x, y, rng.gen_range(9));
                }
            }
            let score = table_score(&t);
            for delta in 1..=3usize {
                let got = best_nonconflicting(&t, delta);
                assert!(
                    got * delta as u64 >= (delta as u64 - 1) * score,
                    "m={m} delta={delta} got={got} score={score}"
                );
            }
        }
    }

    #[test]
    fn conflict_relation_matches_cell_dominance() {
        let a = Multisegment::new(vec![
            Segment::new((1, 1), (3, 1)),
            Segment::new((3, 1), (3, 2)),
        ]);
        let b = Multisegment::new(vec![Segment::new((4, 3), (5, 3))]);
        assert!(a.non_conflicting(&b));
        let cells_a = a.covered_cells();
        let cells_b = b.covered_cells();
        assert!(cells_a
            .iter()
            .all(|&(x, y)| cells_b.iter().all(|&(bx, by)| x < bx && y < by)));

        let c = Multisegment::new(vec![Segment::new((2, 2), (2, 5))]);
        assert!(!a.non_conflicting(&c));
    }

    #[test]
    fn ladder_shape() {
        let l = ValueLadder::new(1000, 0.1);
        assert_eq!(l.levels[0], 1);
        assert!(*l.levels.last().unwrap() >= 1000);
        for w in l.levels.windows(2) {
            assert!(w[1] > w[0]);
            assert!((w[1] as f64) <= (w[0] as f64) * 1.1 + 1.0);
        }
        assert_eq!(l.round_down(7), 7.min(*l.levels.iter().filter(|&&x| x <= 7).max().unwrap()));
    }

    #[test]
    fn static_index_small_exact() {
        let vals = [7i64, 2, 4, 1, 9, 6, 3, 5, 8];
        let pts: Vec<(i64, i64)> = vals
            .iter()
            .enumerate()
            .map(|(i, &v)| (2 * (i as i64 + 1), 2 * v))
            .collect();
        let idx = QueryLisIndex::build(pts.clone(), IndexConfig::new(0.2, 0.5).with_depth(1));
        let ps = PointSet::new(pts);
        let full = Rect::new(-1, 101, -1, 101);
        assert_eq!(idx.query_rect(&full), lis_rect_brute(&ps, &full));
        assert_eq!(idx.query_rect(&full), 4);
    }

    #[test]
    fn static_index_band_small() {
        let mut rng = Rng64::new(31);
        let eps = 0.25;
        let pts = random_point_set(400, &mut rng);
        let mut cfg = IndexConfig::new(eps, 0.5).with_depth(1);
        cfg.leaf_cutoff = 32;
        cfg.m_cap = 8;
        let idx = QueryLisIndex::build(pts.clone(), cfg);
        let ps = PointSet::new(pts);
        for _ in 0..50 {
            let a = 2 * rng.gen_range(401) as i64;
            let b = 2 * rng.gen_range(401) as i64;
            let (xl, xh) = (a.min(b), a.max(b) + 2);
            let c = 2 * rng.gen_range(401) as i64;
            let d = 2 * rng.gen_range(401) as i64;
            let (ylo, yhi) = (c.min(d), c.max(d) + 2);
            let r = Rect::new(xl, xh, ylo, yhi);
            let truth = lis_rect_brute(&ps, &r);
            let got = idx.query_rect(&r);
            assert!(got <= truth, "overestimate: got {got} truth {truth}");
            let floor = ((1.0 - eps) * truth as f64).floor() as usize;
            assert!(got >= floor, "got {got} floor {floor} truth {truth}");
        }
    }

    #[test]
    fn dynamic_index_full_range_band() {
        let mut rng = Rng64::new(41);
        let eps = 0.25;
        let mut pool: Vec<i64> = (0..4000).collect();
        rng.shuffle(&mut pool);
        let vals: Vec<i64> = pool.drain(..200).collect();
        let mut sched = scheduled_approx(&vals, eps, 1.0);
        let mut model = vals.clone();
        for step in 0..150 {
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
            let truth = patience_lis(&model);
            assert!(got <= truth, "step {step}: got {got} truth {truth}");
            let floor = ((1.0 - eps) * truth as f64).floor() as usize;
            assert!(got >= floor, "step {step}: got {got} floor {floor}");
        }
    }

    #[test]
    fn dynamic_op_touches_two_children() {
        let mut rng = Rng64::new(43);
        let vals = rng.permutation(300);
        let mut idx = DynApproxIndex::build(&vals, 0.25, 1.0);
        let before = idx.rebuilt_children();
        idx.apply(EditOp::Insert { pos: 1, val: 5000 });
        assert_eq!(idx.rebuilt_children() - before, 2);
    }

    #[test]
    fn undisturbed_dynamic_queries_never_overestimate() {
        let mut rng = Rng64::new(47);
        let vals = rng.permutation(300);
        let idx = DynApproxIndex::build(&vals, 0.25, 1.0);
        let pts: Vec<(i64, i64)> = vals
            .iter()
            .enumerate()
            .map(|(i, &v)| (i as i64 + 1, v))
            .collect();
        let ps = PointSet::new(pts);
        for _ in 0..40 {
            let a = rng.gen_usize(301) as i64;
            let b = rng.gen_usize(301) as i64;
            let (xl, xh) = (a.min(b) as i64, a.max(b) + 1);
            let c = rng.gen_usize(301) as i64;
            let d = rng.gen_usize(301) as i64;
            let (ylo, yhi) = (c.min(d), c.max(d) + 1);
            let truth = lis_rect_brute(&ps, &Rect::new(xl, xh, ylo, yhi));
            let got = idx.query_rect(&Rect::new(xl, xh, ylo, yhi));
            assert!(got <= truth, "got {got} truth {truth}");
        }
    }
}
