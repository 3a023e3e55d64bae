//! Slice alignment graphs and their seaweed matrices.
//!
//! The grid `G^{n,m} = [0..n] x [0..m]` carries an undirected alignment
//! graph: unit-weight horizontal/vertical edges everywhere plus weight-0
//! diagonal edges at a set of seeds `S`. A cut-path is an antichain hitting
//! every diagonal `x - y = d - m` exactly once; the slice between two
//! nested cut-paths `lo <= hi` induces a slice alignment graph whose
//! distance matrix `D[a, b] = dist(lo_a, hi_b)` is Monge with a permutation
//! density. That permutation (the seaweed matrix) is built here by divide
//! and conquer: trim seeds, contract empty rows/columns, split at the
//! median seed, and combine the halves with a seaweed product.

use crate::monge::{seaweed_product, Perm, SigmaOracle};

pub type GridPoint = (usize, usize);

/// Antichain hitting every diagonal of `G^{n,m}` exactly once.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CutPath {
    pts: Vec<GridPoint>,
    m: usize,
}

impl CutPath {
    pub fn new(pts: Vec<GridPoint>, n: usize, m: usize) -> Self {
        assert_eq!(pts.len(), n + m + 1, "one point per diagonal");
        for (d, &(x, y)) in pts.iter().enumerate() {
            assert!(x <= n && y <= m, "point outside grid");
            assert_eq!(x + m, y + d, "point off its diagonal");
            if d > 0 {
                let (px, py) = pts[d - 1];
                assert!(
                    (x == px + 1 && y == py) || (x == px && y + 1 == py),
                    "not a staircase step"
                );
            }
        }
        CutPath { pts, m }
    }

    /// Left-bottom boundary path of the grid.
    pub fn lower_boundary(n: usize, m: usize) -> Self {
        let pts = (0..=n + m)
            .map(|d| (d.saturating_sub(m), m.saturating_sub(d)))
            .collect();
        CutPath::new(pts, n, m)
    }

    /// Top-right boundary path of the grid.
    pub fn upper_boundary(n: usize, m: usize) -> Self {
        let pts = (0..=n + m)
            .map(|d| (d.min(n), m.min(n + m - d)))
            .collect();
        CutPath::new(pts, n, m)
    }

    pub fn len(&self) -> usize {
        self.pts.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn point(&self, d: usize) -> GridPoint {
        self.pts[d]
    }

    pub fn points(&self) -> &[GridPoint] {
        &self.pts
    }

    /// Pointwise order: self precedes other on every diagonal.
    pub fn le(&self, other: &CutPath) -> bool {
        self.pts
            .iter()
            .zip(other.pts.iter())
            .all(|(a, b)| a.0 <= b.0)
    }

    /// Pointwise minimum (also a cut-path).
    pub fn meet(&self, other: &CutPath) -> CutPath {
        let pts = self
            .pts
            .iter()
            .zip(other.pts.iter())
            .map(|(&a, &b)| if a.0 <= b.0 { a } else { b })
            .collect();
        CutPath { pts, m: self.m }
    }

    /// Pointwise maximum (also a cut-path).
    pub fn join(&self, other: &CutPath) -> CutPath {
        let pts = self
            .pts
            .iter()
            .zip(other.pts.iter())
            .map(|(&a, &b)| if a.0 >= b.0 { a } else { b })
            .collect();
        CutPath { pts, m: self.m }
    }

    /// `xi(path, x)`: the diagonal index d where the path steps from
    /// column x to x+1, for each x; `yi(path, y)` likewise for rows.
    fn step_indices(&self, n: usize, m: usize) -> (Vec<usize>, Vec<usize>) {
        let mut xi = vec![usize::MAX; n];
        let mut yi = vec![usize::MAX; m];
        for d in 0..n + m {
            let (x, y) = self.pts[d];
            let (nx, ny) = self.pts[d + 1];
            if nx == x + 1 {
                xi[x] = d;
            } else {
                debug_assert_eq!(ny + 1, y);
                yi[ny] = d;
            }
        }
        debug_assert!(xi.iter().all(|&v| v != usize::MAX));
        debug_assert!(yi.iter().all(|&v| v != usize::MAX));
        (xi, yi)
    }
}

/// Extend an antichain in `G^{n,m}` to a cut-path containing it, O(n + m).
pub fn extend_antichain(chain: &[GridPoint], n: usize, m: usize) -> CutPath {
    for w in chain.windows(2) {
        let ((x0, y0), (x1, y1)) = (w[0], w[1]);
        assert!(
            x0 <= x1 && y0 >= y1 && (x0, y0) != (x1, y1),
            "input is not an antichain in sequence order"
        );
    }
    let mut ext: Vec<GridPoint> = Vec::with_capacity(chain.len() + 2);
    if chain.first() != Some(&(0, m)) {
        ext.push((0, m));
    }
    ext.extend_from_slice(chain);
    if ext.last() != Some(&(n, 0)) {
        ext.push((n, 0));
    }
    let mut pts = vec![(usize::MAX, usize::MAX); n + m + 1];
    for w in ext.windows(2) {
        let ((x0, y0), (x1, y1)) = (w[0], w[1]);
        // Walk column x0 down from y0 to y1, then row y1 right to x1.
        for d in (x0 + m - y0)..=(x0 + m - y1) {
            set_consistent(&mut pts, d, (x0, x0 + m - d));
        }
        for d in (x0 + m - y1)..=(x1 + m - y1) {
            set_consistent(&mut pts, d, (y1 + d - m, y1));
        }
    }
    CutPath::new(pts, n, m)
}

fn set_consistent(pts: &mut [GridPoint], d: usize, p: GridPoint) {
    if pts[d].0 == usize::MAX {
        pts[d] = p;
    } else {
        debug_assert_eq!(pts[d], p, "inconsistent overlap at diagonal {d}");
    }
}

/// Description of a slice alignment graph `SAG(lo, hi, seeds)`.
#[derive(Clone, Debug)]
pub struct SliceSpec {
    pub n: usize,
    pub m: usize,
    pub lo: CutPath,
    pub hi: CutPath,
    pub seeds: Vec<GridPoint>,
}

impl SliceSpec {
    pub fn new(n: usize, m: usize, lo: CutPath, hi: CutPath, seeds: Vec<GridPoint>) -> Self {
        assert!(lo.le(&hi), "cut-paths not nested");
        assert!(seeds.iter().all(|&(x, y)| x < n && y < m || n == 0 || m == 0));
        SliceSpec { n, m, lo, hi, seeds }
    }

    /// The whole alignment graph on `G^{n,m}` with the given seeds.
    pub fn full_grid(n: usize, m: usize, seeds: Vec<GridPoint>) -> Self {
        SliceSpec::new(
            n,
            m,
            CutPath::lower_boundary(n, m),
            CutPath::upper_boundary(n, m),
            seeds,
        )
    }

    /// Is the grid point inside the closed slice?
    pub fn contains(&self, p: GridPoint) -> bool {
        let d = p.0 + self.m - p.1;
        self.lo.point(d).0 <= p.0 && p.0 <= self.hi.point(d).0
    }

    /// Seeds contributing an edge: inside `[lo..hi)`.
    fn live_seeds(&self) -> Vec<GridPoint> {
        self.seeds
            .iter()
            .copied()
            .filter(|&(x, y)| {
                let d = x + self.m - y;
                self.lo.point(d).0 <= x && x < self.hi.point(d).0
            })
            .collect()
    }
}

/// Seaweed matrix of the slice alignment graph, a permutation of size
/// `n + m`, built in O(n + m + |S| log^2 |S|).
pub fn build_seaweed(spec: &SliceSpec) -> Perm {
    let (n, m) = (spec.n, spec.m);
    let seeds = spec.live_seeds();

    // Contract rows/columns without seeds.
    let mut xs: Vec<usize> = seeds.iter().map(|p| p.0).collect();
    xs.sort_unstable();
    xs.dedup();
    let mut ys: Vec<usize> = seeds.iter().map(|p| p.1).collect();
    ys.sort_unstable();
    ys.dedup();

    if xs.len() < n || ys.len() < m {
        let rank = |sorted: &[usize], v: usize| sorted.partition_point(|&e| e < v);
        let contract_path = |p: &CutPath| -> CutPath {
            let mut pts: Vec<GridPoint> = Vec::with_capacity(xs.len() + ys.len() + 1);
            for &(x, y) in p.points() {
                let q = (rank(&xs, x), rank(&ys, y));
                if pts.last() != Some(&q) {
                    pts.push(q);
                }
            }
            CutPath::new(pts, xs.len(), ys.len())
        };
        let inner_spec = SliceSpec::new(
            xs.len(),
            ys.len(),
            contract_path(&spec.lo),
            contract_path(&spec.hi),
            seeds
                .iter()
                .map(|&(x, y)| (rank(&xs, x), rank(&ys, y)))
                .collect(),
        );
        let inner = build_seaweed(&inner_spec);
        return expand_contracted(&spec.lo, &spec.hi, n, m, &xs, &ys, &inner);
    }

    // Grid fully occupied: n = |X|, m = |Y|.
    if seeds.is_empty() {
        debug_assert!(n == 0 && m == 0);
        return Perm::identity(0);
    }
    if seeds.len() == 1 {
        debug_assert!(n == 1 && m == 1);
        return Perm::identity(2);
    }

    // Split at the lexicographic median seed.
    let mut sorted = seeds;
    sorted.sort_unstable();
    let half = sorted.len().div_ceil(2);
    let (s_left, s_right) = sorted.split_at(half);
    let (bx, by) = s_right[0];

    // Cut-path separating the two seed halves, threaded through (bx, by).
    let mut pts = Vec::with_capacity(n + m + 1);
    for d in 0..=n + m {
        let p = if d <= bx {
            (d, m)
        } else if d <= bx + m - by {
            (bx, bx + m - d)
        } else if d <= bx + m {
            (bx + 1, bx + 1 + m - d)
        } else {
            (d - m, 0)
        };
        pts.push(p);
    }
    let separator = CutPath::new(pts, n, m);
    // Clamp into the slice; per-diagonal median keeps it a cut-path.
    let mid = separator.join(&spec.lo).meet(&spec.hi);
    debug_assert!(spec.lo.le(&mid) && mid.le(&spec.hi));

    let left = SliceSpec::new(n, m, spec.lo.clone(), mid.clone(), s_left.to_vec());
    let right = SliceSpec::new(n, m, mid, spec.hi.clone(), s_right.to_vec());
    debug_assert_eq!(left.live_seeds().len(), s_left.len());
    debug_assert_eq!(right.live_seeds().len(), s_right.len());
    let p_left = build_seaweed(&left);
    let p_right = build_seaweed(&right);
    seaweed_product(&p_left, &p_right)
}

/// Reverse a row/column contraction: given the seaweed permutation of the
/// contracted graph, rebuild the full one in O(n + m). `xs`/`ys` are the
/// sorted occupied columns/rows.
pub fn expand_contracted(
    lo: &CutPath,
    hi: &CutPath,
    n: usize,
    m: usize,
    xs: &[usize],
    ys: &[usize],
    inner: &Perm,
) -> Perm {
    assert_eq!(inner.len(), xs.len() + ys.len(), "inconsistent sizes");
    let (xi_lo, yi_lo) = lo.step_indices(n, m);
    let (xi_hi, yi_hi) = hi.step_indices(n, m);
    let mut sigma = vec![u32::MAX; n + m];
    let in_xs = membership(xs, n);
    let in_ys = membership(ys, m);
    for x in 0..n {
        if !in_xs[x] {
            sigma[xi_lo[x]] = xi_hi[x] as u32;
        }
    }
    for y in 0..m {
        if !in_ys[y] {
            sigma[yi_lo[y]] = yi_hi[y] as u32;
        }
    }
    // Kept coordinates, in diagonal order on each path.
    let mut r_lo: Vec<usize> = xs
        .iter()
        .map(|&x| xi_lo[x])
        .chain(ys.iter().map(|&y| yi_lo[y]))
        .collect();
    r_lo.sort_unstable();
    let mut r_hi: Vec<usize> = xs
        .iter()
        .map(|&x| xi_hi[x])
        .chain(ys.iter().map(|&y| yi_hi[y]))
        .collect();
    r_hi.sort_unstable();
    for (a, &d) in r_lo.iter().enumerate() {
        sigma[d] = r_hi[inner.apply(a)] as u32;
    }
    Perm::new(sigma)
}

fn membership(sorted: &[usize], bound: usize) -> Vec<bool> {
    let mut v = vec![false; bound];
    for &x in sorted {
        v[x] = true;
    }
    v
}

/// Random access to the distance matrix `D[a, b] = dist(lo_a, hi_b)`.
pub struct DistOracle {
    sigma: SigmaOracle,
    size: usize,
}

impl DistOracle {
    pub fn build(spec: &SliceSpec) -> Self {
        let p = build_seaweed(spec);
        DistOracle {
            sigma: SigmaOracle::build(&p),
            size: spec.n + spec.m,
        }
    }

    pub fn from_perm(p: &Perm) -> Self {
        DistOracle {
            sigma: SigmaOracle::build(p),
            size: p.len(),
        }
    }

    /// `D[a, b] = 2 P^Σ[a, b] + a - b`.
    pub fn dist(&self, a: usize, b: usize) -> i64 {
        assert!(a <= self.size && b <= self.size, "index out of range");
        2 * self.sigma.query(a, b) as i64 + a as i64 - b as i64
    }

    pub fn size(&self) -> usize {
        self.size
    }
}

/// Shortest-path distance between two slice points by 0/1 BFS; the
/// brute-force oracle for everything above.
pub fn dist_bruteforce(spec: &SliceSpec, from: GridPoint, to: GridPoint) -> i64 {
    assert!(spec.contains(from) && spec.contains(to), "point outside slice");
    let (n, m) = (spec.n, spec.m);
    let idx = |x: usize, y: usize| x * (m + 1) + y;
    let mut seed_here = vec![false; (n + 1) * (m + 1)];
    for &(x, y) in &spec.seeds {
        seed_here[idx(x, y)] = true;
    }
    let mut dist = vec![i64::MAX; (n + 1) * (m + 1)];
    let mut dq = std::collections::VecDeque::new();
    dist[idx(from.0, from.1)] = 0;
    dq.push_back(from);
    while let Some((x, y)) = dq.pop_front() {
        let d = dist[idx(x, y)];
        if (x, y) == to {
            return d;
        }
        let mut relax = |nx: usize, ny: usize, w: i64, dq: &mut std::collections::VecDeque<GridPoint>| {
            if nx > n || ny > m || !spec.contains((nx, ny)) {
                return;
            }
            let nd = d + w;
            if nd < dist[idx(nx, ny)] {
                dist[idx(nx, ny)] = nd;
                if w == 0 {
                    dq.push_front((nx, ny));
                } else {
                    dq.push_back((nx, ny));
                }
            }
        };
        if x + 1 <= n {
            relax(x + 1, y, 1, &mut dq);
        }
        if x > 0 {
            relax(x - 1, y, 1, &mut dq);
        }
        if y + 1 <= m {
            relax(x, y + 1, 1, &mut dq);
        }
        if y > 0 {
            relax(x, y - 1, 1, &mut dq);
        }
        // Diagonal seed edges, both directions.
        if x < n && y < m && seed_here[idx(x, y)] && spec.contains((x + 1, y + 1)) {
            relax(x + 1, y + 1, 0, &mut dq);
        }
        if x > 0 && y > 0 && seed_here[idx(x - 1, y - 1)] && spec.contains((x - 1, y - 1)) {
            relax(x - 1, y - 1, 0, &mut dq);
        }
    }
    unreachable!("slice graphs are connected")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::monge::{density, minplus_dense, DenseMatrix};
    use crate::rng::Rng64;
    use crate::static_lis::lis_points_brute;

    fn random_cut_path(n: usize, m: usize, rng: &mut Rng64) -> CutPath {
        let mut pts = Vec::with_capacity(n + m + 1);
        let (mut x, mut y) = (0usize, m);
        pts.push((x, y));
        for _ in 0..n + m {
            let step_x = if x == n {
                false
            } else if y == 0 {
                true
            } else {
                rng.gen_bool()
            };
            if step_x {
                x += 1;
            } else {
                y -= 1;
            }
            pts.push((x, y));
        }
        CutPath::new(pts, n, m)
    }

    fn random_slice(n: usize, m: usize, max_seeds: usize, rng: &mut Rng64) -> SliceSpec {
        let a = random_cut_path(n, m, rng);
        let b = random_cut_path(n, m, rng);
        let (lo, hi) = (a.meet(&b), a.join(&b));
        let mut seeds = Vec::new();
        if n > 0 && m > 0 {
            for _ in 0..rng.gen_usize(max_seeds + 1) {
                let p = (rng.gen_usize(n), rng.gen_usize(m));
                let d = p.0 + m - p.1;
                if lo.point(d).0 <= p.0 && p.0 < hi.point(d).0 && !seeds.contains(&p) {
                    seeds.push(p);
                }
            }
        }
        SliceSpec::new(n, m, lo, hi, seeds)
    }

    fn dense_dist_matrix(spec: &SliceSpec) -> DenseMatrix {
        let k = spec.n + spec.m;
        let mut d = DenseMatrix::zeros(k + 1, k + 1);
        for a in 0..=k {
            for b in 0..=k {
                d[(a, b)] = dist_bruteforce(spec, spec.lo.point(a), spec.hi.point(b));
            }
        }
        d
    }

    #[test]
    fn extend_antichain_examples() {
        let p = extend_antichain(&[], 1, 1);
        assert_eq!(p.points(), &[(0, 1), (0, 0), (1, 0)]);

        // Already a cut-path: unchanged.
        let q = extend_antichain(&[(0, 2), (0, 1), (1, 1), (1, 0), (2, 0)], 2, 2);
        assert_eq!(q.points(), &[(0, 2), (0, 1), (1, 1), (1, 0), (2, 0)]);

        // Single interior point.
        let r = extend_antichain(&[(1, 1)], 2, 2);
        assert!(r.points().contains(&(1, 1)));
    }

    #[test]
    #[should_panic(expected = "not an antichain")]
    fn extend_antichain_rejects_chains() {
        extend_antichain(&[(0, 0), (1, 1)], 2, 2);
    }

    #[test]
    fn base_cases() {
        let empty = SliceSpec::full_grid(0, 0, vec![]);
        assert_eq!(build_seaweed(&empty).len(), 0);
        let one = SliceSpec::full_grid(1, 1, vec![(0, 0)]);
        let p = build_seaweed(&one);
        assert_eq!(p, Perm::identity(2));
        let d = DistOracle::from_perm(&p);
        let want = [[0, 1, 2], [1, 0, 1], [2, 1, 0]];
        for a in 0..=2 {
            for b in 0..=2 {
                assert_eq!(d.dist(a, b), want[a][b]);
            }
        }
    }

    #[test]
    fn dist_closed_form_small() {
        // Single seed: opposite corners at distance 2 - 2*1 = 0.
        let s = SliceSpec::full_grid(1, 1, vec![(0, 0)]);
        assert_eq!(dist_bruteforce(&s, (0, 0), (1, 1)), 0);
        // No seeds: Manhattan everywhere.
        let s = SliceSpec::full_grid(3, 2, vec![]);
        for x in 0..=3 {
            for y in 0..=2 {
                let d = dist_bruteforce(&s, (1, 2), (x, y));
                assert_eq!(d, (x as i64 - 1).abs() + (y as i64 - 2).abs());
            }
        }
    }

    #[test]
    fn dist_closed_form_matches_lis_term() {
        let mut rng = Rng64::new(61);
        for _ in 0..40 {
            let n = 1 + rng.gen_usize(6);
            let m = 1 + rng.gen_usize(6);
            let mut seeds = Vec::new();
            for x in 0..n {
                for y in 0..m {
                    if rng.gen_usize(3) == 0 {
                        seeds.push((x, y));
                    }
                }
            }
            let spec = SliceSpec::full_grid(n, m, seeds.clone());
            let (x0, y0) = (rng.gen_usize(n + 1), rng.gen_usize(m + 1));
            let (x1, y1) = (rng.gen_usize(n + 1), rng.gen_usize(m + 1));
            let d = dist_bruteforce(&spec, (x0, y0), (x1, y1));
            let manhattan = (x1 as i64 - x0 as i64).abs() + (y1 as i64 - y0 as i64).abs();
            if x0 <= x1 && y0 <= y1 || x1 <= x0 && y1 <= y0 {
                let (xa, xb) = (x0.min(x1), x0.max(x1));
                let (ya, yb) = (y0.min(y1), y0.max(y1));
                let mut inside: Vec<(i64, i64)> = seeds
                    .iter()
                    .filter(|&&(x, y)| xa <= x && x < xb && ya <= y && y < yb)
                    .map(|&(x, y)| (x as i64, y as i64))
                    .collect();
                inside.sort_unstable();
                let lis = lis_points_brute(&inside) as i64;
                assert_eq!(d, manhattan - 2 * lis);
            } else {
                // Anti-monotone endpoints: pure Manhattan.
                assert_eq!(d, manhattan);
            }
        }
    }

    #[test]
    fn cut_path_metric() {
        let mut rng = Rng64::new(67);
        let spec = random_slice(6, 5, 8, &mut rng);
        for a in 0..=11 {
            for b in 0..=11 {
                let d = dist_bruteforce(&spec, spec.lo.point(a), spec.lo.point(b));
                assert_eq!(d, (a as i64 - b as i64).abs());
            }
        }
    }

    #[test]
    fn seaweed_matches_bfs_on_random_slices() {
        let mut rng = Rng64::new(71);
        for trial in 0..60 {
            let n = rng.gen_usize(8);
            let m = rng.gen_usize(8);
            let spec = random_slice(n, m, 12, &mut rng);
            let p = build_seaweed(&spec);
            assert_eq!(p.len(), n + m);
            let oracle = DistOracle::from_perm(&p);
            let want = dense_dist_matrix(&spec);
            for a in 0..=n + m {
                for b in 0..=n + m {
                    assert_eq!(
                        oracle.dist(a, b),
                        want[(a, b)],
                        "trial {trial} n={n} m={m} a={a} b={b} seeds={:?}",
                        spec.seeds
                    );
                }
            }
        }
    }

    #[test]
    fn dist_matrix_is_monge_with_permutation_density() {
        let mut rng = Rng64::new(73);
        for _ in 0..30 {
            let n = 1 + rng.gen_usize(6);
            let m = 1 + rng.gen_usize(6);
            let spec = random_slice(n, m, 10, &mut rng);
            let d = dense_dist_matrix(&spec);
            let dens = density(&d);
            let k = n + m;
            let mut col_seen = vec![false; k];
            for a in 0..k {
                let mut row_ones = 0;
                for b in 0..k {
                    let e = dens[(a, b)];
                    assert!(e == 0 || e == 2, "not unit-Monge");
                    if e == 2 {
                        row_ones += 1;
                        assert!(!col_seen[b]);
                        col_seen[b] = true;
                    }
                }
                assert_eq!(row_ones, 1);
            }
        }
    }

    #[test]
    fn decomposition_through_middle_path() {
        let mut rng = Rng64::new(79);
        for _ in 0..20 {
            let n = 1 + rng.gen_usize(5);
            let m = 1 + rng.gen_usize(5);
            let spec = random_slice(n, m, 8, &mut rng);
            let mid = random_cut_path(n, m, &mut rng)
                .join(&spec.lo)
                .meet(&spec.hi);
            let left = SliceSpec::new(
                n,
                m,
                spec.lo.clone(),
                mid.clone(),
                spec.seeds
                    .iter()
                    .copied()
                    .filter(|&(x, y)| {
                        let d = x + m - y;
                        spec.lo.point(d).0 <= x && x < mid.point(d).0
                    })
                    .collect(),
            );
            let right = SliceSpec::new(n, m, mid.clone(), spec.hi.clone(), spec.seeds.clone());
            let dl = dense_dist_matrix(&left);
            let dr = dense_dist_matrix(&right);
            let dg = dense_dist_matrix(&spec);
            assert_eq!(minplus_dense(&dl, &dr), dg);
        }
    }

    #[test]
    fn slice_heredity() {
        // Distances inside the slice equal distances on the full grid.
        let mut rng = Rng64::new(83);
        for _ in 0..30 {
            let n = 1 + rng.gen_usize(6);
            let m = 1 + rng.gen_usize(6);
            let slice = random_slice(n, m, 10, &mut rng);
            let full = SliceSpec::full_grid(n, m, slice.seeds.clone());
            for a in (0..=n + m).step_by(2) {
                for b in (0..=n + m).step_by(2) {
                    let p = slice.lo.point(a);
                    let q = slice.hi.point(b);
                    assert_eq!(
                        dist_bruteforce(&slice, p, q),
                        dist_bruteforce(&full, p, q)
                    );
                }
            }
        }
    }

    #[test]
    fn expand_contracted_identity_and_empty() {
        // No contraction: inner returned unchanged.
        let mut rng = Rng64::new(89);
        for _ in 0..10 {
            let n = 1 + rng.gen_usize(4);
            let m = 1 + rng.gen_usize(4);
            let mut seeds = Vec::new();
            for x in 0..n {
                for y in 0..m {
                    seeds.push((x, y));
                }
            }
            let spec = SliceSpec::full_grid(n, m, seeds);
            let p = build_seaweed(&spec);
            let xs: Vec<usize> = (0..n).collect();
            let ys: Vec<usize> = (0..m).collect();
            let q = expand_contracted(&spec.lo, &spec.hi, n, m, &xs, &ys, &p);
            assert_eq!(p, q);
        }
        // All rows/columns empty: xi pairs with xi, yi with yi.
        let lo = CutPath::lower_boundary(2, 3);
        let hi = CutPath::upper_boundary(2, 3);
        let p = expand_contracted(&lo, &hi, 2, 3, &[], &[], &Perm::identity(0));
        let spec = SliceSpec::new(2, 3, lo, hi, vec![]);
        let oracle = DistOracle::from_perm(&p);
        for a in 0..=5 {
            for b in 0..=5 {
                assert_eq!(
                    oracle.dist(a, b),
                    dist_bruteforce(&spec, spec.lo.point(a), spec.hi.point(b))
                );
            }
        }
    }
}
