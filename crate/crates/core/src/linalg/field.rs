//! Gaussian elimination over fields.

use super::{identity, zeros, Matrix};
use crate::rings::Field;

/// Reduced row echelon form with lowest-index pivots, and the pivot columns.
pub fn rref<K: Field>(k: &K, a: &Matrix<K::Elem>) -> (Matrix<K::Elem>, Vec<usize>) {
    let mut m = a.clone();
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..m.cols {
        if row == m.rows {
            break;
        }
        let Some(pr) = (row..m.rows).find(|&i| !k.is_zero(&m[(i, col)])) else {
            continue;
        };
        m.swap_rows(row, pr);
        let inv = k.inv_unit(&m[(row, col)]);
        for j in col..m.cols {
            m[(row, j)] = k.mul(&m[(row, j)], &inv);
        }
        for i in 0..m.rows {
            if i == row || k.is_zero(&m[(i, col)]) {
                continue;
            }
            let c = m[(i, col)].clone();
            for j in col..m.cols {
                let d = k.mul(&c, &m[(row, j)]);
                m[(i, j)] = k.sub(&m[(i, j)], &d);
            }
        }
        pivots.push(col);
        row += 1;
    }
    (m, pivots)
}

pub fn rank<K: Field>(k: &K, a: &Matrix<K::Elem>) -> usize {
    rref(k, a).1.len()
}

/// Columns form a basis of the right kernel.
pub fn kernel<K: Field>(k: &K, a: &Matrix<K::Elem>) -> Matrix<K::Elem> {
    let (r, pivots) = rref(k, a);
    let free: Vec<usize> = (0..a.cols).filter(|j| !pivots.contains(j)).collect();
    let mut out = zeros(k, a.cols, free.len());
    for (c, &fj) in free.iter().enumerate() {
        out[(fj, c)] = k.one();
        for (i, &pj) in pivots.iter().enumerate() {
            out[(pj, c)] = k.neg(&r[(i, fj)]);
        }
    }
    out
}

/// Some X with A X = B, if one exists.
pub fn solve<K: Field>(k: &K, a: &Matrix<K::Elem>, b: &Matrix<K::Elem>) -> Option<Matrix<K::Elem>> {
    assert_eq!(a.rows, b.rows, "row count mismatch in solve");
    let (r, pivots) = rref(k, &a.hstack(b));
    if pivots.iter().any(|&p| p >= a.cols) {
        return None;
    }
    let mut x = zeros(k, a.cols, b.cols);
    for (i, &pj) in pivots.iter().enumerate() {
        for c in 0..b.cols {
            x[(pj, c)] = r[(i, a.cols + c)].clone();
        }
    }
    Some(x)
}

pub fn inverse<K: Field>(k: &K, a: &Matrix<K::Elem>) -> Option<Matrix<K::Elem>> {
    if a.rows != a.cols {
        return None;
    }
    let x = solve(k, a, &identity(k, a.rows))?;
    if rank(k, a) == a.rows {
        Some(x)
    } else {
        None
    }
}

pub fn det<K: Field>(k: &K, a: &Matrix<K::Elem>) -> K::Elem {
    assert_eq!(a.rows, a.cols, "determinant of a non-square matrix");
    let mut m = a.clone();
    let n = m.rows;
    let mut d = k.one();
    for col in 0..n {
        let Some(pr) = (col..n).find(|&i| !k.is_zero(&m[(i, col)])) else {
            return k.zero();
        };
        if pr != col {
            m.swap_rows(pr, col);
            d = k.neg(&d);
        }
        let piv = m[(col, col)].clone();
        d = k.mul(&d, &piv);
        let inv = k.inv_unit(&piv);
        for i in col + 1..n {
            if k.is_zero(&m[(i, col)]) {
                continue;
            }
            let c = k.mul(&m[(i, col)], &inv);
            for j in col..n {
                let t = k.mul(&c, &m[(col, j)]);
                m[(i, j)] = k.sub(&m[(i, j)], &t);
            }
        }
    }
    d
}

/// The maximal set of leftmost independent columns of A.
pub fn col_basis<K: Field>(k: &K, a: &Matrix<K::Elem>) -> Matrix<K::Elem> {
    let (_, pivots) = rref(k, a);
    a.submatrix(&(0..a.rows).collect::<Vec<_>>(), &pivots)
}

/// Standard basis vectors, lowest index first, completing the column space
/// of A to the whole space.
pub fn complete_basis<K: Field>(k: &K, a: &Matrix<K::Elem>) -> Matrix<K::Elem> {
    let full = a.hstack(&identity(k, a.rows));
    let (_, pivots) = rref(k, &full);
    let extra: Vec<usize> = pivots.into_iter().filter(|&p| p >= a.cols).collect();
    full.submatrix(&(0..a.rows).collect::<Vec<_>>(), &extra)
}

/// Basis of the intersection of the column spaces.
pub fn intersect<K: Field>(k: &K, a: &Matrix<K::Elem>, b: &Matrix<K::Elem>) -> Matrix<K::Elem> {
    let (a, b) = (col_basis(k, a), col_basis(k, b));
    let ker = kernel(k, &a.hstack(&b));
    let coeffs = ker.rows_range(0, a.cols);
    col_basis(k, &super::mul(k, &a, &coeffs))
}

pub fn col_space_contains<K: Field>(k: &K, a: &Matrix<K::Elem>, v: &[K::Elem]) -> bool {
    let b = Matrix::from_cols(&[v.to_vec()], a.rows);
    solve(k, a, &b).is_some()
}

/// Column space of `a` contains that of `b`.
pub fn col_space_contains_all<K: Field>(k: &K, a: &Matrix<K::Elem>, b: &Matrix<K::Elem>) -> bool {
    rank(k, a) == rank(k, &a.hstack(b))
}

pub fn col_space_eq<K: Field>(k: &K, a: &Matrix<K::Elem>, b: &Matrix<K::Elem>) -> bool {
    let r = rank(k, a);
    r == rank(k, b) && r == rank(k, &a.hstack(b))
}
