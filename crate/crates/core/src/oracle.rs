//! Exhaustive reference computations used to cross-check the echelon-based
//! linear algebra and the windowed monomial enumeration.
//!
//! Nothing here shares code with [`crate::linalg`] or with the interval
//! propagation in [`crate::algebra`]: vectors are enumerated one by one and
//! monomials by a plain box search.

use std::collections::HashSet;

use crate::algebra::{AlgebraPresentation, GeneratorKind, Monomial};

/// Every vector of F_p^len, in lexicographic order.
pub fn all_vectors(p: u32, len: usize) -> Vec<Vec<u32>> {
    let total = (p as usize).pow(len as u32);
    (0..total)
        .map(|mut k| {
            (0..len)
                .map(|_| {
                    let digit = (k % p as usize) as u32;
                    k /= p as usize;
                    digit
                })
                .collect()
        })
        .collect()
}

fn apply(p: u32, rows: &[Vec<u32>], v: &[u32]) -> Vec<u32> {
    rows.iter()
        .map(|row| {
            (row.iter().zip(v).map(|(&a, &b)| a as u64 * b as u64).sum::<u64>() % p as u64) as u32
        })
        .collect()
}

/// Number of vectors `v` with `m v = 0`, by enumeration.
pub fn kernel_size(p: u32, rows: &[Vec<u32>], cols: usize) -> usize {
    all_vectors(p, cols)
        .iter()
        .filter(|v| apply(p, rows, v).iter().all(|&x| x == 0))
        .count()
}

fn log_p(p: u32, mut n: usize) -> usize {
    let mut k = 0;
    while n > 1 {
        assert_eq!(n % p as usize, 0, "subspace sizes are powers of p");
        n /= p as usize;
        k += 1;
    }
    k
}

/// Rank via `cols − log_p |ker|`.
pub fn rank(p: u32, rows: &[Vec<u32>], cols: usize) -> usize {
    cols - log_p(p, kernel_size(p, rows, cols))
}

/// Rank as the size of the largest nonvanishing minor, by cofactor expansion.
pub fn minor_rank(p: u32, rows: &[Vec<u32>], cols: usize) -> usize {
    let r = rows.len();
    let max = r.min(cols);
    for k in (1..=max).rev() {
        for row_set in subsets(r, k) {
            for col_set in subsets(cols, k) {
                let sub: Vec<Vec<i64>> = row_set
                    .iter()
                    .map(|&i| col_set.iter().map(|&j| rows[i][j] as i64).collect())
                    .collect();
                if determinant(&sub).rem_euclid(p as i64) != 0 {
                    return k;
                }
            }
        }
    }
    0
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            go(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, n, k, &mut Vec::new(), &mut out);
    out
}

fn determinant(m: &[Vec<i64>]) -> i64 {
    match m.len() {
        0 => 1,
        1 => m[0][0],
        n => (0..n)
            .map(|j| {
                let minor: Vec<Vec<i64>> = m[1..]
                    .iter()
                    .map(|row| row.iter().enumerate().filter(|&(c, _)| c != j).map(|(_, &x)| x).collect())
                    .collect();
                let sign = if j % 2 == 0 { 1 } else { -1 };
                sign * m[0][j] * determinant(&minor)
            })
            .sum(),
    }
}

/// `dim ker(d_out) − dim im(d_in)` computed from enumerated set sizes, where
/// matrices are given as row lists acting on column vectors.
pub fn homology_dimension(p: u32, d_in: &[Vec<u32>], d_in_cols: usize, d_out: &[Vec<u32>], dim: usize) -> usize {
    let kernel: HashSet<Vec<u32>> = all_vectors(p, dim)
        .into_iter()
        .filter(|v| apply(p, d_out, v).iter().all(|&x| x == 0))
        .collect();
    let image: HashSet<Vec<u32>> = all_vectors(p, d_in_cols)
        .iter()
        .map(|v| apply(p, d_in, v))
        .collect();
    assert!(image.is_subset(&kernel), "image must lie in the kernel");
    log_p(p, kernel.len()) - log_p(p, image.len())
}

/// All monomials of `alg` with degree in `[lo, hi]`, found by scanning every
/// exponent vector in the box `|e_i| <= bound` (exterior and truncated
/// generators use their own ranges).
pub fn monomials_in_box(alg: &AlgebraPresentation, lo: i64, hi: i64, bound: i64) -> Vec<Monomial> {
    let ranges: Vec<(i64, i64)> = alg
        .generators()
        .iter()
        .map(|g| match (g.kind, g.truncation) {
            (GeneratorKind::Exterior, _) => (0, 1),
            (_, Some(t)) => (0, t as i64 - 1),
            (GeneratorKind::Polynomial, None) => (0, bound),
            (GeneratorKind::Laurent, None) => (-bound, bound),
        })
        .collect();
    let mut out = Vec::new();
    let mut cur = vec![0i64; ranges.len()];
    fn go(i: usize, ranges: &[(i64, i64)], cur: &mut Vec<i64>, alg: &AlgebraPresentation, lo: i64, hi: i64, out: &mut Vec<Monomial>) {
        if i == ranges.len() {
            let deg: i64 = cur.iter().zip(alg.generators()).map(|(&e, g)| e * g.degree).sum();
            if (lo..=hi).contains(&deg) {
                out.push(Monomial::new(cur.clone()));
            }
            return;
        }
        for e in ranges[i].0..=ranges[i].1 {
            cur[i] = e;
            go(i + 1, ranges, cur, alg, lo, hi, out);
        }
    }
    go(0, &ranges, &mut cur, alg, lo, hi, &mut out);
    out
}
