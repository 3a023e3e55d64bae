//! Semi-local LIS oracles.
//!
//! [`PairOracle`] answers "length of the longest increasing subsequence
//! starting at `a[p_i]` and ending at `a[q_j]`" for two fixed non-increasing
//! subsequences `p`, `q` of a sequence `a`, in O(log n) per entry after
//! O(n log^2 n) preprocessing. Entries form an anti-Monge matrix: invalid
//! pairs (wrong order or not increasing) are mapped below `-N` so that
//! SMAWK sweeps can run over the totally defined matrix.
//!
//! The construction embeds `a` as seeds `(i, rank(a_i))` of an alignment
//! graph, turns the two subsequences into antichains, extends them to
//! nested cut-paths, and reads LIS values out of a linear combination of
//! the seeded and seed-free distance matrices. [`SemiLocal`] derives
//! substring LIS queries by padding each element with a low/high guard.

use crate::sag::{extend_antichain, CutPath, DistOracle, SliceSpec};
use crate::smawk::AntiMonge;

/// Anti-Monge oracle for from/to LIS values between two non-increasing
/// subsequences.
pub struct PairOracle {
    dist: DistOracle,
    lo: CutPath,
    hi: CutPath,
    row_diag: Vec<usize>,
    col_diag: Vec<usize>,
    row_flag: Vec<bool>,
    col_flag: Vec<bool>,
    shift: i64,
    n_prime: i64,
    sentinel: i64,
}

/// Rank of each value within the slice: bijection onto `[0..n)`.
fn ranks(a: &[i64]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..a.len()).collect();
    idx.sort_unstable_by_key(|&i| a[i]);
    let mut rk = vec![0usize; a.len()];
    for (r, &i) in idx.iter().enumerate() {
        rk[i] = r;
    }
    rk
}

impl PairOracle {
    /// `p` and `q` are strictly increasing index lists into `a` whose
    /// values are non-increasing. `n_sentinel` bounds invalid entries from
    /// above by `-n_sentinel`.
    pub fn build(a: &[i64], p: &[usize], q: &[usize], n_sentinel: i64) -> Self {
        let n = a.len();
        assert!(n_sentinel > 0);
        for list in [p, q] {
            for w in list.windows(2) {
                assert!(w[0] < w[1], "subsequence indices must increase");
                assert!(a[w[0]] > a[w[1]], "subsequence values must be non-increasing");
            }
            if let Some(&last) = list.last() {
                assert!(last < n, "index out of range");
            }
        }
        let rk = ranks(a);
        let seeds: Vec<(usize, usize)> = (0..n).map(|i| (i, rk[i])).collect();

        let row_pts: Vec<(usize, usize)> = p.iter().map(|&i| (i + 1, rk[i] + 1)).collect();
        let col_pts: Vec<(usize, usize)> = q.iter().map(|&j| (j, rk[j])).collect();
        let pi = extend_antichain(&row_pts, n, n);
        let pi_q = extend_antichain(&col_pts, n, n);
        let lo = pi.meet(&pi_q);
        let hi = pi.join(&pi_q);

        let row_diag: Vec<usize> = row_pts.iter().map(|&(x, y)| x + n - y).collect();
        let col_diag: Vec<usize> = col_pts.iter().map(|&(x, y)| x + n - y).collect();
        let row_flag: Vec<bool> = row_pts
            .iter()
            .zip(row_diag.iter())
            .map(|(&pt, &d)| lo.point(d) != pt)
            .collect();
        let col_flag: Vec<bool> = col_pts
            .iter()
            .zip(col_diag.iter())
            .map(|(&pt, &d)| hi.point(d) != pt)
            .collect();

        let spec = SliceSpec::new(n, n, lo.clone(), hi.clone(), seeds);
        let dist = DistOracle::build(&spec);
        let n_prime = n_sentinel + 2;
        PairOracle {
            dist,
            lo,
            hi,
            row_diag,
            col_diag,
            row_flag,
            col_flag,
            shift: n_prime + n as i64,
            n_prime,
            sentinel: n_sentinel,
        }
    }

    pub fn rows(&self) -> usize {
        self.row_diag.len()
    }

    pub fn cols(&self) -> usize {
        self.col_diag.len()
    }

    /// Invalid entries are at most `-sentinel`.
    pub fn sentinel(&self) -> i64 {
        self.sentinel
    }

    /// `M[i, j]`: exact from/to LIS length when `p_i < q_j` and
    /// `a[p_i] < a[q_j]`, otherwise at most `-sentinel`.
    pub fn entry(&self, i: usize, j: usize) -> i64 {
        let d = self.row_diag[i];
        let d2 = self.col_diag[j];
        let (x0, y0) = self.lo.point(d);
        let (x1, y1) = self.hi.point(d2);
        let dx = x1 as i64 - x0 as i64;
        let dy = y1 as i64 - y0 as i64;
        let a_term = dx + dy;
        let d_seeded = self.dist.dist(d, d2);
        let d_free = dx.abs() + dy.abs();
        let twice = self.n_prime * a_term - d_seeded - (self.n_prime - 1) * d_free;
        debug_assert!(twice % 2 == 0);
        let mut v = twice / 2;
        if self.row_flag[i] {
            v -= self.shift;
        }
        if self.col_flag[j] {
            v -= self.shift;
        }
        v + 2
    }
}

impl AntiMonge for PairOracle {
    fn rows(&self) -> usize {
        self.rows()
    }
    fn cols(&self) -> usize {
        self.cols()
    }
    fn entry(&self, i: usize, j: usize) -> i64 {
        self.entry(i, j)
    }
}

/// Substring LIS oracle: `query(i, j)` = LIS of `a[i..=j]`.
pub struct SemiLocal {
    inner: Option<PairOracle>,
    len: usize,
}

/// The padded companion sequence: each element flanked by a low guard
/// (strictly decreasing along the sequence) and a high guard (likewise),
/// so that guard-to-guard chains are exactly substring chains plus two.
fn padded(a: &[i64]) -> Vec<i64> {
    let n = a.len() as i64;
    let min = a.iter().copied().min().unwrap_or(0);
    let max = a.iter().copied().max().unwrap_or(0);
    let low = min - n - 1;
    let high = max + 2 * n + 1;
    let mut b = Vec::with_capacity(a.len() * 3);
    for (i, &v) in a.iter().enumerate() {
        b.push(low - i as i64);
        b.push(v);
        b.push(high - i as i64);
    }
    b
}

impl SemiLocal {
    pub fn build(a: &[i64]) -> Self {
        let n = a.len();
        if n == 0 {
            return SemiLocal { inner: None, len: 0 };
        }
        let b = padded(a);
        let p: Vec<usize> = (0..n).map(|i| 3 * i).collect();
        let q: Vec<usize> = (0..n).map(|j| 3 * j + 2).collect();
        let sentinel = 4 * (b.len() as i64 + 2);
        SemiLocal {
            inner: Some(PairOracle::build(&b, &p, &q, sentinel)),
            len: n,
        }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Exact LIS of `a[i..=j]` (0-based, inclusive). Panics if `i > j`.
    pub fn query(&self, i: usize, j: usize) -> usize {
        assert!(i <= j && j < self.len, "bad range {i}..={j}");
        let oracle = self.inner.as_ref().expect("nonempty");
        let v = oracle.entry(i, j) - 2;
        debug_assert!(v >= 0);
        v as usize
    }
}
