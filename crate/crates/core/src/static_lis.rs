//! Exact static LIS baselines and brute-force oracles.
//!
//! Everything here is deliberately simple: these functions are the ground
//! truth that every dynamic engine in this workspace is checked against.

/// Points on the plane, distinct per axis.
#[derive(Clone, Debug, Default)]
pub struct PointSet {
    pub points: Vec<(i64, i64)>,
}

impl PointSet {
    pub fn new(points: Vec<(i64, i64)>) -> Self {
        PointSet { points }
    }

    /// Point view of a sequence: element `i` (1-based x) with value `a_i`.
    pub fn from_sequence(values: &[i64]) -> Self {
        PointSet {
            points: values
                .iter()
                .enumerate()
                .map(|(i, &v)| (i as i64 + 1, v))
                .collect(),
        }
    }
}

/// Axis-parallel open rectangle; border coordinates are assumed distinct
/// from all point coordinates, so open vs closed does not matter.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Rect {
    pub x_lo: i64,
    pub x_hi: i64,
    pub y_lo: i64,
    pub y_hi: i64,
}

impl Rect {
    pub fn new(x_lo: i64, x_hi: i64, y_lo: i64, y_hi: i64) -> Self {
        assert!(x_lo < x_hi && y_lo < y_hi, "degenerate rectangle");
        Rect { x_lo, x_hi, y_lo, y_hi }
    }

    pub fn contains(&self, p: (i64, i64)) -> bool {
        self.x_lo < p.0 && p.0 < self.x_hi && self.y_lo < p.1 && p.1 < self.y_hi
    }
}

/// Exact LIS length by patience sorting, O(n log n).
pub fn patience_lis(values: &[i64]) -> usize {
    let mut tails: Vec<i64> = Vec::new();
    for &v in values {
        match tails.binary_search(&v) {
            Ok(_) => unreachable!("distinct values"),
            Err(pos) => {
                if pos == tails.len() {
                    tails.push(v);
                } else {
                    tails[pos] = v;
                }
            }
        }
    }
    tails.len()
}

/// For every j, the length of the longest increasing subsequence ending at
/// `values[j]`. O(n log n); the level decomposition used everywhere else.
pub fn levels(values: &[i64]) -> Vec<usize> {
    let mut tails: Vec<i64> = Vec::new();
    let mut out = Vec::with_capacity(values.len());
    for &v in values {
        let pos = tails.binary_search(&v).unwrap_err();
        if pos == tails.len() {
            tails.push(v);
        } else {
            tails[pos] = v;
        }
        out.push(pos + 1);
    }
    out
}

/// Exact LIS of the points inside `r`, by the O(k^2) chain DP.
pub fn lis_rect_brute(ps: &PointSet, r: &Rect) -> usize {
    let mut inside: Vec<(i64, i64)> = ps
        .points
        .iter()
        .copied()
        .filter(|&p| r.contains(p))
        .collect();
    inside.sort_unstable();
    lis_points_brute(&inside)
}

/// Exact LIS of a point set sorted by x, O(k^2).
pub fn lis_points_brute(sorted_by_x: &[(i64, i64)]) -> usize {
    let k = sorted_by_x.len();
    let mut best = vec![0usize; k];
    let mut ans = 0;
    for i in 0..k {
        let mut b = 1;
        for j in 0..i {
            if sorted_by_x[j].0 < sorted_by_x[i].0
                && sorted_by_x[j].1 < sorted_by_x[i].1
                && best[j] + 1 > b
            {
                b = best[j] + 1;
            }
        }
        best[i] = b;
        ans = ans.max(b);
    }
    ans
}

/// Result of a from-to LIS query: either an exact length (>= 2 except for
/// the degenerate cases below) or "no increasing subsequence from p to q".
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FromTo {
    Len(usize),
    Invalid,
}

/// Exact length of the longest increasing subsequence that starts at
/// `values[p]` and ends at `values[q]` (0-based indices). A pair is invalid
/// when `p >= q` or `values[p] >= values[q]`, matching the strict oracle
/// convention (`p == q` is invalid even though a one-element chain exists).
pub fn lis_from_to_brute(values: &[i64], p: usize, q: usize) -> FromTo {
    assert!(p < values.len() && q < values.len(), "index out of range");
    if p >= q || values[p] >= values[q] {
        return FromTo::Invalid;
    }
    // Longest chain from p, restricted to indices in (p..=q].
    let mut best = vec![0usize; values.len()];
    best[p] = 1;
    for i in p + 1..=q {
        if values[i] <= values[p] {
            continue;
        }
        let mut b = 0;
        for j in p..i {
            if best[j] > 0 && values[j] < values[i] && best[j] + 1 > b {
                b = best[j] + 1;
            }
        }
        best[i] = b;
    }
    FromTo::Len(best[q])
}

/// Exhaustive LIS over all subsequences; test-only oracle for tiny inputs.
pub fn lis_exhaustive(values: &[i64]) -> usize {
    let n = values.len();
    assert!(n <= 20, "exhaustive oracle is exponential");
    let mut best = 0;
    for mask in 0u64..(1 << n) {
        let mut prev = i64::MIN;
        let mut len = 0;
        let mut ok = true;
        for i in 0..n {
            if mask >> i & 1 == 1 {
                if values[i] <= prev {
                    ok = false;
                    break;
                }
                prev = values[i];
                len += 1;
            }
        }
        if ok {
            best = best.max(len);
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::Rng64;

    const FIG_GRID: [i64; 9] = [7, 2, 4, 1, 9, 6, 3, 5, 8];
    const FIG_CHAN: [i64; 9] = [1, 5, 2, 4, 6, 7, 9, 10, 8];

    #[test]
    fn patience_examples() {
        assert_eq!(patience_lis(&FIG_GRID), 4);
        assert_eq!(patience_lis(&FIG_CHAN), 7);
        assert_eq!(patience_lis(&[5, 4, 3, 2, 1]), 1);
        assert_eq!(patience_lis(&[]), 0);
    }

    #[test]
    fn levels_examples() {
        assert_eq!(levels(&FIG_CHAN), vec![1, 2, 2, 3, 4, 5, 6, 7, 6]);
        assert_eq!(levels(&[1, 2, 3]), vec![1, 2, 3]);
        assert_eq!(levels(&[3, 2, 1]), vec![1, 1, 1]);
    }

    #[test]
    fn patience_equals_max_level_and_exhaustive() {
        let mut rng = Rng64::new(5);
        for _ in 0..200 {
            let n = rng.gen_usize(11);
            let mut vals = Vec::with_capacity(n);
            while vals.len() < n {
                let v = rng.gen_range(30) as i64;
                if !vals.contains(&v) {
                    vals.push(v);
                }
            }
            let p = patience_lis(&vals);
            assert_eq!(p, lis_exhaustive(&vals));
            assert_eq!(p, levels(&vals).into_iter().max().unwrap_or(0));
        }
    }

    #[test]
    fn rect_brute_examples() {
        let ps = PointSet::from_sequence(&FIG_GRID);
        let all = Rect::new(0, 100, 0, 100);
        assert_eq!(lis_rect_brute(&ps, &all), 4);
        let empty = Rect::new(50, 60, 50, 60);
        assert_eq!(lis_rect_brute(&ps, &empty), 0);
        // Around the single point (5, 9).
        let one = Rect::new(4, 6, 8, 10);
        assert_eq!(lis_rect_brute(&ps, &one), 1);
    }

    #[test]
    fn rect_brute_monotone_under_inclusion() {
        let mut rng = Rng64::new(11);
        let vals = rng.permutation(40);
        let ps = PointSet::from_sequence(&vals);
        for _ in 0..100 {
            let a = rng.gen_range(41) as i64;
            let b = rng.gen_range(41) as i64;
            let (x_lo, x_hi) = (a.min(b), a.max(b) + 1);
            let c = rng.gen_range(41) as i64;
            let d = rng.gen_range(41) as i64;
            let (y_lo, y_hi) = (c.min(d) - 1, c.max(d));
            let inner = Rect::new(x_lo, x_hi, y_lo, y_hi);
            let outer = Rect::new(x_lo - 1, x_hi + 1, y_lo - 1, y_hi + 1);
            assert!(lis_rect_brute(&ps, &inner) <= lis_rect_brute(&ps, &outer));
        }
    }

    #[test]
    fn from_to_examples() {
        assert_eq!(lis_from_to_brute(&[2, 1, 3], 0, 2), FromTo::Len(2));
        assert_eq!(lis_from_to_brute(&[2, 1, 3], 0, 1), FromTo::Invalid);
        assert_eq!(lis_from_to_brute(&[2, 1, 3], 1, 1), FromTo::Invalid);
        // 1 -> 10 inside the fig array: 1,2,4,6,7,9,10.
        assert_eq!(lis_from_to_brute(&FIG_CHAN, 0, 7), FromTo::Len(7));
    }
}
