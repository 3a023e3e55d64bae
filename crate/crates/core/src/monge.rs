//! Permutation-matrix algebra: distribution/density operators, dense
//! min-plus products, the O(n log n) seaweed product, and range-counting
//! access to P^Σ.
//!
//! A permutation matrix P is stored as the permutation `sigma` with
//! P[i, j] = 1 iff j = sigma(i). Its distribution matrix
//! `P^Σ[i, j] = #{(i', j') : i' >= i, j' < j, sigma(i') = j'}` is a simple
//! unit-Monge matrix, and the seaweed product `A ⊡ B = (A^Σ ⊙ B^Σ)^□` is
//! closed on permutation matrices. The product is computed by divide and
//! conquer on the middle index range: solve both halves on compressed
//! permutations, then merge along the sign-change staircase of the
//! difference of the two candidate distribution matrices. The staircase is
//! monotone, so the merge costs O(n).

use crate::rng::Rng64;

/// Permutation of `[0..n)`, also read as an n x n permutation matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Perm {
    sigma: Vec<u32>,
}

impl Perm {
    pub fn new(sigma: Vec<u32>) -> Self {
        let n = sigma.len();
        let mut seen = vec![false; n];
        for &s in &sigma {
            assert!((s as usize) < n && !seen[s as usize], "not a permutation");
            seen[s as usize] = true;
        }
        Perm { sigma }
    }

    pub fn identity(n: usize) -> Self {
        Perm {
            sigma: (0..n as u32).collect(),
        }
    }

    pub fn reverse(n: usize) -> Self {
        Perm {
            sigma: (0..n as u32).rev().collect(),
        }
    }

    pub fn random(n: usize, rng: &mut Rng64) -> Self {
        let mut sigma: Vec<u32> = (0..n as u32).collect();
        rng.shuffle(&mut sigma);
        Perm { sigma }
    }

    pub fn len(&self) -> usize {
        self.sigma.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sigma.is_empty()
    }

    pub fn apply(&self, i: usize) -> usize {
        self.sigma[i] as usize
    }

    pub fn as_slice(&self) -> &[u32] {
        &self.sigma
    }

    pub fn inverse(&self) -> Perm {
        let mut inv = vec![0u32; self.sigma.len()];
        for (i, &s) in self.sigma.iter().enumerate() {
            inv[s as usize] = i as u32;
        }
        Perm { sigma: inv }
    }

    /// 0/1 matrix view.
    pub fn to_matrix(&self) -> DenseMatrix {
        let n = self.len();
        let mut m = DenseMatrix::zeros(n, n);
        for (i, &s) in self.sigma.iter().enumerate() {
            m[(i, s as usize)] = 1;
        }
        m
    }
}

/// Row-major integer matrix; enough for everything unit-Monge here.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DenseMatrix {
    pub rows: usize,
    pub cols: usize,
    data: Vec<i64>,
}

impl DenseMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        DenseMatrix {
            rows,
            cols,
            data: vec![0; rows * cols],
        }
    }

    pub fn from_rows(rows: Vec<Vec<i64>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        assert!(rows.iter().all(|x| x.len() == c), "not rectangular");
        DenseMatrix {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        }
    }
}

impl std::ops::Index<(usize, usize)> for DenseMatrix {
    type Output = i64;
    fn index(&self, (r, c): (usize, usize)) -> &i64 {
        &self.data[r * self.cols + c]
    }
}

impl std::ops::IndexMut<(usize, usize)> for DenseMatrix {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut i64 {
        &mut self.data[r * self.cols + c]
    }
}

/// Distribution matrix: `A^Σ[i, j] = Σ_{i' >= i, j' < j} A[i', j']`,
/// sized (rows+1) x (cols+1).
pub fn distribution(a: &DenseMatrix) -> DenseMatrix {
    let (n, m) = (a.rows, a.cols);
    let mut d = DenseMatrix::zeros(n + 1, m + 1);
    for i in (0..n).rev() {
        for j in 0..m {
            // d[i][j+1] over rows >= i: row i prefix + everything below.
            d[(i, j + 1)] = d[(i, j)] + d[(i + 1, j + 1)] - d[(i + 1, j)] + a[(i, j)];
        }
    }
    d
}

/// Density matrix: `A^□[i, j] = A[i+1, j] + A[i, j+1] - A[i, j] - A[i+1, j+1]`,
/// sized (rows-1) x (cols-1). Inverse of [`distribution`] on simple matrices.
pub fn density(a: &DenseMatrix) -> DenseMatrix {
    assert!(a.rows >= 1 && a.cols >= 1);
    if a.rows == 1 || a.cols == 1 {
        return DenseMatrix::zeros(a.rows.saturating_sub(1), a.cols.saturating_sub(1));
    }
    let (n, m) = (a.rows - 1, a.cols - 1);
    let mut d = DenseMatrix::zeros(n, m);
    for i in 0..n {
        for j in 0..m {
            d[(i, j)] = a[(i + 1, j)] + a[(i, j + 1)] - a[(i, j)] - a[(i + 1, j + 1)];
        }
    }
    d
}

/// Entrywise min-plus product, O(n·p·m). Testing oracle.
pub fn minplus_dense(a: &DenseMatrix, b: &DenseMatrix) -> DenseMatrix {
    assert_eq!(a.cols, b.rows, "dimension mismatch");
    let mut c = DenseMatrix::zeros(a.rows, b.cols);
    for i in 0..a.rows {
        for j in 0..b.cols {
            let mut best = i64::MAX;
            for k in 0..a.cols {
                best = best.min(a[(i, k)] + b[(k, j)]);
            }
            c[(i, j)] = best;
        }
    }
    c
}

/// Seaweed product through the dense pipeline; exponential-care-free
/// oracle for [`seaweed_product`].
pub fn seaweed_product_dense(a: &Perm, b: &Perm) -> Perm {
    let prod = minplus_dense(&distribution(&a.to_matrix()), &distribution(&b.to_matrix()));
    let dens = density(&prod);
    let n = a.len();
    let mut sigma = vec![u32::MAX; n];
    for i in 0..n {
        for j in 0..n {
            match dens[(i, j)] {
                0 => {}
                1 => {
                    assert_eq!(sigma[i], u32::MAX);
                    sigma[i] = j as u32;
                }
                x => panic!("density entry {x} outside {{0,1}}"),
            }
        }
    }
    Perm::new(sigma)
}

/// Seaweed product `a ⊡ b` in O(n log n).
pub fn seaweed_product(a: &Perm, b: &Perm) -> Perm {
    assert_eq!(a.len(), b.len(), "size mismatch");
    let sigma = seaweed_rec(a.as_slice(), b.as_slice());
    Perm::new(sigma)
}

const NONE: u32 = u32::MAX;

fn seaweed_rec(sa: &[u32], sb: &[u32]) -> Vec<u32> {
    let n = sa.len();
    if n <= 1 {
        return sa.to_vec();
    }
    let h = n / 2;

    // Middle range [0..h): A-ones with column < h, B-ones with row < h.
    let mut rows_lo = Vec::with_capacity(h);
    let mut rows_hi = Vec::with_capacity(n - h);
    let mut sa_lo = Vec::with_capacity(h);
    let mut sa_hi = Vec::with_capacity(n - h);
    for (i, &c) in sa.iter().enumerate() {
        if (c as usize) < h {
            rows_lo.push(i as u32);
            sa_lo.push(c);
        } else {
            rows_hi.push(i as u32);
            sa_hi.push(c - h as u32);
        }
    }
    // B rows < h keep their row index; columns are compressed by rank.
    let mut cols_lo: Vec<u32> = sb[..h].to_vec();
    cols_lo.sort_unstable();
    let mut cols_hi: Vec<u32> = sb[h..].to_vec();
    cols_hi.sort_unstable();
    let rank = |sorted: &[u32], c: u32| -> u32 { sorted.partition_point(|&x| x < c) as u32 };
    let sb_lo: Vec<u32> = sb[..h].iter().map(|&c| rank(&cols_lo, c)).collect();
    let sb_hi: Vec<u32> = sb[h..].iter().map(|&c| rank(&cols_hi, c)).collect();

    let c_lo = seaweed_rec(&sa_lo, &sb_lo);
    let c_hi = seaweed_rec(&sa_hi, &sb_hi);

    // Expand to full coordinates: partial permutations on disjoint rows
    // and disjoint columns, together covering every row and column once.
    let mut lo_row2col = vec![NONE; n];
    let mut lo_col2row = vec![NONE; n];
    for (r, &c) in c_lo.iter().enumerate() {
        let rr = rows_lo[r] as usize;
        let cc = cols_lo[c as usize] as usize;
        lo_row2col[rr] = cc as u32;
        lo_col2row[cc] = rr as u32;
    }
    let mut hi_row2col = vec![NONE; n];
    let mut hi_col2row = vec![NONE; n];
    for (r, &c) in c_hi.iter().enumerate() {
        let rr = rows_hi[r] as usize;
        let cc = cols_hi[c as usize] as usize;
        hi_row2col[rr] = cc as u32;
        hi_col2row[cc] = rr as u32;
    }

    combine(n, &lo_row2col, &lo_col2row, &hi_row2col, &hi_col2row)
}

/// Candidate distribution values around grid corner (i, j):
/// L = #lo-ones(row >= i, col < j) + beta(j),
/// H = #hi-ones(row >= i, col < j) + alpha(i);
/// the true product satisfies C^Σ = min(L, H) pointwise.
struct Cursor<'a> {
    i: usize,
    j: usize,
    dl: i64,
    dh: i64,
    lo_row2col: &'a [u32],
    lo_col2row: &'a [u32],
    hi_row2col: &'a [u32],
    hi_col2row: &'a [u32],
    alpha: &'a [i64],
    beta: &'a [i64],
}

impl<'a> Cursor<'a> {
    fn l(&self) -> i64 {
        self.dl + self.beta[self.j]
    }
    fn h(&self) -> i64 {
        self.dh + self.alpha[self.i]
    }
    fn delta(&self) -> i64 {
        self.l() - self.h()
    }
    fn value(&self) -> i64 {
        self.l().min(self.h())
    }
    fn move_right(&mut self) {
        let j = self.j;
        let lr = self.lo_col2row[j];
        if lr != NONE && lr as usize >= self.i {
            self.dl += 1;
        }
        let hr = self.hi_col2row[j];
        if hr != NONE && hr as usize >= self.i {
            self.dh += 1;
        }
        self.j += 1;
    }
    fn move_left(&mut self) {
        self.j -= 1;
        let j = self.j;
        let lr = self.lo_col2row[j];
        if lr != NONE && lr as usize >= self.i {
            self.dl -= 1;
        }
        let hr = self.hi_col2row[j];
        if hr != NONE && hr as usize >= self.i {
            self.dh -= 1;
        }
    }
    fn move_up(&mut self) {
        self.i -= 1;
        let i = self.i;
        let lc = self.lo_row2col[i];
        if lc != NONE && (lc as usize) < self.j {
            self.dl += 1;
        }
        let hc = self.hi_row2col[i];
        if hc != NONE && (hc as usize) < self.j {
            self.dh += 1;
        }
    }
    fn move_down(&mut self) {
        let i = self.i;
        let lc = self.lo_row2col[i];
        if lc != NONE && (lc as usize) < self.j {
            self.dl -= 1;
        }
        let hc = self.hi_row2col[i];
        if hc != NONE && (hc as usize) < self.j {
            self.dh -= 1;
        }
        self.i += 1;
    }
    fn goto(&mut self, i: usize, j: usize) {
        while self.j < j {
            self.move_right();
        }
        while self.j > j {
            self.move_left();
        }
        while self.i > i {
            self.move_up();
        }
        while self.i < i {
            self.move_down();
        }
    }
}

fn combine(
    n: usize,
    lo_row2col: &[u32],
    lo_col2row: &[u32],
    hi_row2col: &[u32],
    hi_col2row: &[u32],
) -> Vec<u32> {
    // alpha(i) = #lo-ones with row >= i; beta(j) = #hi-ones with col < j.
    let mut alpha = vec![0i64; n + 2];
    for i in (0..n).rev() {
        alpha[i] = alpha[i + 1] + i64::from(lo_row2col[i] != NONE);
    }
    let mut beta = vec![0i64; n + 2];
    for j in 0..n {
        beta[j + 1] = beta[j] + i64::from(hi_col2row[j] != NONE);
    }

    let mut cur = Cursor {
        i: 0,
        j: 0,
        dl: 0,
        dh: 0,
        lo_row2col,
        lo_col2row,
        hi_row2col,
        hi_col2row,
        alpha: &alpha,
        beta: &beta,
    };

    // F[j] = least i with delta(i, j) >= 0; delta is non-decreasing in both
    // coordinates, so F is non-increasing.
    let mut f = vec![0u32; n + 1];
    // Column 0: delta(i, 0) = -alpha(i).
    let mut fi = (0..=n).find(|&i| alpha[i] == 0).unwrap();
    f[0] = fi as u32;
    cur.goto(fi, 0);
    for j in 1..=n {
        cur.move_right();
        debug_assert!(cur.delta() >= 0);
        while cur.i > 0 {
            cur.move_up();
            if cur.delta() < 0 {
                cur.move_down();
                break;
            }
        }
        fi = cur.i;
        f[j] = fi as u32;
    }

    let mut out = vec![NONE; n];
    let mut emit = |r: usize, c: usize| {
        debug_assert_eq!(out[r], NONE, "row emitted twice");
        out[r] = c as u32;
    };
    // Pure zones: cells strictly on one side of the staircase keep their
    // half's ones; the seaweeds crossing the staircase are recombed below.
    for (r, &c) in lo_row2col.iter().enumerate() {
        if c != NONE && r + 1 < f[c as usize + 1] as usize {
            emit(r, c as usize);
        }
    }
    for (r, &c) in hi_row2col.iter().enumerate() {
        if c != NONE && r >= f[c as usize] as usize {
            emit(r, c as usize);
        }
    }
    // Mixed cells hug the staircase; evaluate their density explicitly.
    for c in 0..n {
        let top = f[c + 1] as usize;
        let bot = f[c] as usize;
        let r_lo = top.saturating_sub(1);
        let r_hi = (bot.max(1) - 1).min(n - 1);
        for r in r_lo..=r_hi.min(n - 1) {
            if r + 1 < top || r >= bot {
                continue;
            }
            cur.goto(r, c);
            let v00 = cur.value();
            cur.move_right();
            let v01 = cur.value();
            cur.move_down();
            let v11 = cur.value();
            cur.move_left();
            let v10 = cur.value();
            let d = v10 + v01 - v00 - v11;
            debug_assert!(d == 0 || d == 1, "density {d} outside {{0,1}}");
            if d == 1 {
                emit(r, c);
            }
        }
    }
    debug_assert!(out.iter().all(|&c| c != NONE), "row left unassigned");
    out
}

/// Orthogonal dominance counting over the ones of a permutation matrix:
/// `query(i, j) = P^Σ[i, j]`. Wavelet tree, O(log n) per query.
pub struct SigmaOracle {
    n: usize,
    // One level per bit, most significant first. levels[b][p] = number of
    // zero-bits among the first p entries at that level.
    levels: Vec<Vec<u32>>,
    bits: u32,
}

impl SigmaOracle {
    pub fn build(p: &Perm) -> Self {
        let n = p.len();
        let bits = if n <= 1 { 1 } else { 64 - (n as u64 - 1).leading_zeros() };
        let mut cur: Vec<u32> = p.as_slice().to_vec();
        let mut levels = Vec::with_capacity(bits as usize);
        for level in (0..bits).rev() {
            let mask = 1u32 << level;
            let mut zeros_prefix = Vec::with_capacity(n + 1);
            zeros_prefix.push(0u32);
            let mut z = 0u32;
            for &v in &cur {
                if v & mask == 0 {
                    z += 1;
                }
                zeros_prefix.push(z);
            }
            let mut next = Vec::with_capacity(n);
            for &v in &cur {
                if v & mask == 0 {
                    next.push(v);
                }
            }
            for &v in &cur {
                if v & mask != 0 {
                    next.push(v);
                }
            }
            levels.push(zeros_prefix);
            cur = next;
        }
        SigmaOracle { n, levels, bits }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// `P^Σ[i, j]`: ones with row >= i and column < j. Arguments range
    /// over `[0..=n]`.
    pub fn query(&self, i: usize, j: usize) -> usize {
        assert!(i <= self.n && j <= self.n, "index out of range");
        self.count_below(i, self.n, j as u32)
    }

    /// Count of sigma values < bound within positions [lo..hi).
    fn count_below(&self, mut lo: usize, mut hi: usize, bound: u32) -> usize {
        if bound == 0 || lo >= hi {
            return 0;
        }
        if bound as usize >= self.n {
            return hi - lo;
        }
        let mut acc = 0usize;
        for (d, zeros) in self.levels.iter().enumerate() {
            let level = self.bits - 1 - d as u32;
            let mask = 1u32 << level;
            let zl = zeros[lo] as usize;
            let zh = zeros[hi] as usize;
            let total_zeros = zeros[self.n] as usize;
            if bound & mask == 0 {
                // Only the zero side can stay below the bound.
                lo = zl;
                hi = zh;
            } else {
                // Whole zero side is below the bound.
                acc += zh - zl;
                lo = total_zeros + (lo - zl);
                hi = total_zeros + (hi - zh);
            }
            if lo >= hi {
                return acc;
            }
        }
        // Remaining positions hold values equal to `bound`: not counted.
        acc
    }
}
