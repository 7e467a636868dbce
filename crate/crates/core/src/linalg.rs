//! Exact linear algebra over the rationals: row reduction, rank, kernels,
//! and particular solutions. Sizes here are tiny (n ≤ 8), so plain
//! fraction Gaussian elimination is the right tool.

// In-place elimination reads one row while writing another; indexed loops
// are the honest shape for that.
#![allow(clippy::needless_range_loop)]

use crate::rat::{zeros, QVec, Rat};
use num::{One, Zero};

/// Reduced row echelon form in place; returns pivot column indices.
pub fn rref(m: &mut [QVec]) -> Vec<usize> {
    let rows = m.len();
    if rows == 0 {
        return vec![];
    }
    let cols = m[0].len();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let inv = m[r][c].clone();
        for x in m[r].iter_mut() {
            *x = &*x / &inv;
        }
        for i in 0..rows {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                for c2 in 0..cols {
                    let sub = &f * &m[r][c2];
                    m[i][c2] = &m[i][c2] - sub;
                }
            }
        }
        pivots.push(c);
        r += 1;
        if r == rows {
            break;
        }
    }
    pivots
}

pub fn rank(rows: &[QVec]) -> usize {
    let mut m: Vec<QVec> = rows.to_vec();
    rref(&mut m).len()
}

/// Basis of {x : Ax = 0} where `rows` are the rows of A (all length `n`).
pub fn kernel_basis(rows: &[QVec], n: usize) -> Vec<QVec> {
    let mut m: Vec<QVec> = rows.to_vec();
    let pivots = rref(&mut m);
    let pivot_set: std::collections::HashSet<usize> = pivots.iter().copied().collect();
    let mut basis = Vec::new();
    for free in 0..n {
        if pivot_set.contains(&free) {
            continue;
        }
        let mut v = zeros(n);
        v[free] = Rat::one();
        for (ri, &pc) in pivots.iter().enumerate() {
            v[pc] = -m[ri][free].clone();
        }
        basis.push(v);
    }
    basis
}

/// Basis of the row space of A (independent rows after reduction).
pub fn row_space_basis(rows: &[QVec]) -> Vec<QVec> {
    let mut m: Vec<QVec> = rows.to_vec();
    let pivots = rref(&mut m);
    m.truncate(pivots.len());
    m
}

/// Determinant of a square matrix by fraction-full elimination.
pub fn det(m: &[QVec]) -> Rat {
    let n = m.len();
    let mut a: Vec<QVec> = m.to_vec();
    let mut result = Rat::one();
    for c in 0..n {
        let Some(p) = (c..n).find(|&i| !a[i][c].is_zero()) else {
            return Rat::zero();
        };
        if p != c {
            a.swap(c, p);
            result = -result;
        }
        result *= a[c][c].clone();
        let inv = a[c][c].clone();
        for j in c..n {
            a[c][j] = &a[c][j] / &inv;
        }
        for i in (c + 1)..n {
            if !a[i][c].is_zero() {
                let f = a[i][c].clone();
                for j in c..n {
                    let sub = &f * &a[c][j];
                    a[i][j] = &a[i][j] - sub;
                }
            }
        }
    }
    result
}

/// Inverse of a square matrix; `None` when singular.
pub fn invert(m: &[QVec]) -> Option<Vec<QVec>> {
    let n = m.len();
    let mut aug: Vec<QVec> = m
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            let mut e = zeros(n);
            e[i] = Rat::one();
            r.extend(e);
            r
        })
        .collect();
    let pivots = rref(&mut aug);
    if pivots.len() < n || pivots.iter().take(n).enumerate().any(|(i, &p)| p != i) {
        return None;
    }
    Some(aug.into_iter().map(|row| row[n..].to_vec()).collect())
}

/// One solution of Ax = b, or `None` if inconsistent.
pub fn solve(rows: &[QVec], b: &[Rat], n: usize) -> Option<QVec> {
    let mut aug: Vec<QVec> = rows
        .iter()
        .zip(b.iter())
        .map(|(row, bi)| {
            let mut r = row.clone();
            r.push(bi.clone());
            r
        })
        .collect();
    let pivots = rref(&mut aug);
    // Inconsistent iff a pivot lands in the augmented column.
    if pivots.contains(&n) {
        return None;
    }
    let mut x = zeros(n);
    for (ri, &pc) in pivots.iter().enumerate() {
        x[pc] = aug[ri][n].clone();
    }
    Some(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::rat_i;

    fn v(xs: &[i64]) -> QVec {
        xs.iter().map(|&x| rat_i(x)).collect()
    }

    #[test]
    fn kernel_of_plane_normal() {
        let rows = vec![v(&[1, 1, 0])];
        let k = kernel_basis(&rows, 3);
        assert_eq!(k.len(), 2);
        for b in &k {
            assert!(crate::rat::dot(&rows[0], b).is_zero());
        }
    }

    #[test]
    fn solve_consistent_and_not() {
        let rows = vec![v(&[1, 0]), v(&[0, 1])];
        let x = solve(&rows, &v(&[3, 4]), 2).unwrap();
        assert_eq!(x, v(&[3, 4]));
        let dep = vec![v(&[1, 1]), v(&[2, 2])];
        assert!(solve(&dep, &v(&[1, 3]), 2).is_none());
        assert!(solve(&dep, &v(&[1, 2]), 2).is_some());
    }

    #[test]
    fn rank_counts_independent_rows() {
        assert_eq!(rank(&[v(&[1, 2]), v(&[2, 4]), v(&[0, 1])]), 2);
        assert_eq!(rank(&[]), 0);
    }
}
