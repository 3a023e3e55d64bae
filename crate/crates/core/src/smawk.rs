//! SMAWK (max,+) vector products over implicit anti-Monge matrices.
//!
//! The classic SMAWK algorithm finds all column minima of a totally
//! monotone matrix with O(rows + cols) entry probes. An anti-Monge matrix
//! negated is Monge, hence totally monotone, so the (max,+) product of an
//! anti-Monge matrix with a vector reduces to column minima of the negated
//! matrix with the vector folded into the rows.

use std::cell::Cell;

/// Read-only access to an implicitly represented anti-Monge matrix:
/// `entry(i, j) + entry(i+1, j+1) >= entry(i+1, j) + entry(i, j+1)`.
pub trait AntiMonge {
    fn rows(&self) -> usize;
    fn cols(&self) -> usize;
    fn entry(&self, i: usize, j: usize) -> i64;
}

impl<F: Fn(usize, usize) -> i64> AntiMonge for (usize, usize, F) {
    fn rows(&self) -> usize {
        self.0
    }
    fn cols(&self) -> usize {
        self.1
    }
    fn entry(&self, i: usize, j: usize) -> i64 {
        (self.2)(i, j)
    }
}

/// `out[k] = max_j (v[j] + m.entry(j, k))`, with O(rows + cols) probes.
/// Returns the outputs and the number of entry probes made.
pub fn maxplus_vector<M: AntiMonge>(m: &M, v: &[i64]) -> (Vec<i64>, usize) {
    assert_eq!(v.len(), m.rows(), "dimension mismatch");
    let probes = Cell::new(0usize);
    // Negate and fold the vector in: column minima of a Monge matrix.
    let neg = |i: usize, j: usize| -> i64 {
        probes.set(probes.get() + 1);
        -(v[i] + m.entry(i, j))
    };
    let arg = smawk_column_minima(m.rows(), m.cols(), &neg);
    let out = arg
        .iter()
        .enumerate()
        .map(|(k, &j)| v[j] + m.entry(j, k))
        .collect();
    (out, probes.get())
}

/// Row index of the minimum of every column of an implicit totally
/// monotone matrix (ties to the smallest row).
pub fn smawk_column_minima<F: Fn(usize, usize) -> i64>(
    nrows: usize,
    ncols: usize,
    matrix: &F,
) -> Vec<usize> {
    let mut minima = vec![0usize; ncols];
    if nrows == 0 || ncols == 0 {
        return minima;
    }
    let rows: Vec<usize> = (0..nrows).collect();
    let cols: Vec<usize> = (0..ncols).collect();
    smawk_inner(matrix, &rows, &cols, &mut minima);
    minima
}

fn smawk_inner<F: Fn(usize, usize) -> i64>(
    matrix: &F,
    rows: &[usize],
    cols: &[usize],
    minima: &mut [usize],
) {
    if cols.is_empty() {
        return;
    }
    // REDUCE: prune rows that cannot hold any column minimum.
    let mut stack: Vec<usize> = Vec::with_capacity(cols.len());
    for &r in rows {
        loop {
            if stack.is_empty() {
                break;
            }
            let c = cols[stack.len() - 1];
            if matrix(*stack.last().unwrap(), c) <= matrix(r, c) {
                break;
            }
            stack.pop();
        }
        if stack.len() != cols.len() {
            stack.push(r);
        }
    }
    let rows = &stack[..];

    // Recurse on odd columns.
    let odd_cols: Vec<usize> = cols.iter().copied().skip(1).step_by(2).collect();
    smawk_inner(matrix, rows, &odd_cols, minima);

    // INTERPOLATE: fill even columns, scanning rows monotonically.
    let mut r = 0usize;
    for (idx, &c) in cols.iter().enumerate().step_by(2) {
        let mut row = rows[r];
        let last_row = if idx == cols.len() - 1 {
            *rows.last().unwrap()
        } else {
            minima[cols[idx + 1]]
        };
        let mut best = matrix(row, c);
        while rows[r] != last_row {
            r += 1;
            let v = matrix(rows[r], c);
            if v < best {
                best = v;
                row = rows[r];
            }
        }
        minima[c] = row;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::Rng64;

    /// Random anti-Monge matrix: 2D prefix sums of a non-negative matrix
    /// (their density is exactly that matrix, hence non-negative, and
    /// prefix sums have the anti-Monge inequality orientation).
    fn random_anti_monge(rows: usize, cols: usize, rng: &mut Rng64) -> Vec<Vec<i64>> {
        let mut m = vec![vec![0i64; cols]; rows];
        for i in 0..rows {
            for j in 0..cols {
                let d = rng.gen_range(10) as i64;
                let up = if i > 0 { m[i - 1][j] } else { 0 };
                let left = if j > 0 { m[i][j - 1] } else { 0 };
                let diag = if i > 0 && j > 0 { m[i - 1][j - 1] } else { 0 };
                m[i][j] = d + up + left - diag;
            }
        }
        m
    }

    fn is_anti_monge(m: &[Vec<i64>]) -> bool {
        for i in 0..m.len().saturating_sub(1) {
            for j in 0..m[0].len().saturating_sub(1) {
                if m[i][j] + m[i + 1][j + 1] < m[i + 1][j] + m[i][j + 1] {
                    return false;
                }
            }
        }
        true
    }

    #[test]
    fn constant_and_single_row() {
        let m = (3usize, 4usize, |_i, _j| 7i64);
        let (out, _) = maxplus_vector(&m, &[1, 9, 4]);
        assert_eq!(out, vec![16, 16, 16, 16]);

        let m = (1usize, 3usize, |_i, j| (j as i64) * 2);
        let (out, _) = maxplus_vector(&m, &[5]);
        assert_eq!(out, vec![5, 7, 9]);
    }

    #[test]
    fn random_matches_brute_force_and_probe_bound() {
        let mut rng = Rng64::new(55);
        for _ in 0..60 {
            let rows = 1 + rng.gen_usize(200);
            let cols = 1 + rng.gen_usize(200);
            let m = random_anti_monge(rows, cols, &mut rng);
            assert!(is_anti_monge(&m));
            let v: Vec<i64> = (0..rows).map(|_| rng.gen_range(100) as i64).collect();
            let mm = (rows, cols, |i: usize, j: usize| m[i][j]);
            let (out, probes) = maxplus_vector(&mm, &v);
            for k in 0..cols {
                let best = (0..rows).map(|j| v[j] + m[j][k]).max().unwrap();
                assert_eq!(out[k], best);
            }
            assert!(
                probes <= 8 * (rows + cols) + 32,
                "probes {probes} for {rows}x{cols}"
            );
        }
    }
}
