//! Dense matrices over the coefficient rings: generic arithmetic, Gaussian
//! elimination over fields, Smith normal form over chain rings, and the
//! division-free characteristic polynomial.

mod chain;
mod field;

pub use chain::{
    chain_inverse, chain_solve, charpoly, det_any, elementary_divisors, left_inverse, smith, Smith,
};
pub use field::{
    col_basis, col_space_contains, col_space_contains_all, col_space_eq, complete_basis, det,
    intersect, inverse, kernel, rank, rref, solve,
};

use std::ops::{Index, IndexMut};

use crate::rings::{generic_rank, Frobenius, PolyMatrix, PolyRing, Ring, SeriesRing, TruncSeries};

/// Row-major dense matrix.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Matrix<E> {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<E>,
}

impl<E: Clone> Matrix<E> {
    pub fn new(rows: usize, cols: usize, data: Vec<E>) -> Self {
        assert_eq!(data.len(), rows * cols, "matrix data has wrong length");
        Matrix { rows, cols, data }
    }

    pub fn from_fn<F: FnMut(usize, usize) -> E>(rows: usize, cols: usize, mut g: F) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(g(i, j));
            }
        }
        Matrix { rows, cols, data }
    }

    pub fn from_rows(rows: Vec<Vec<E>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        let data: Vec<E> = rows.into_iter().flatten().collect();
        Self::new(r, c, data)
    }

    pub fn filled(rows: usize, cols: usize, x: E) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![x; rows * cols],
        }
    }

    pub fn row(&self, i: usize) -> Vec<E> {
        self.data[i * self.cols..(i + 1) * self.cols].to_vec()
    }

    pub fn col(&self, j: usize) -> Vec<E> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<E>> {
        (0..self.rows).map(|i| self.row(i)).collect()
    }

    pub fn to_cols_vec(&self) -> Vec<Vec<E>> {
        (0..self.cols).map(|j| self.col(j)).collect()
    }

    pub fn from_cols(cols: &[Vec<E>], rows: usize) -> Self {
        Self::from_fn(rows, cols.len(), |i, j| cols[j][i].clone())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].clone())
    }

    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> Self {
        Self::from_fn(rows.len(), cols.len(), |i, j| {
            self[(rows[i], cols[j])].clone()
        })
    }

    pub fn cols_range(&self, start: usize, end: usize) -> Self {
        Self::from_fn(self.rows, end - start, |i, j| self[(i, start + j)].clone())
    }

    pub fn rows_range(&self, start: usize, end: usize) -> Self {
        Self::from_fn(end - start, self.cols, |i, j| self[(start + i, j)].clone())
    }

    pub fn hstack(&self, other: &Self) -> Self {
        assert_eq!(self.rows, other.rows, "row count mismatch");
        Self::from_fn(self.rows, self.cols + other.cols, |i, j| {
            if j < self.cols {
                self[(i, j)].clone()
            } else {
                other[(i, j - self.cols)].clone()
            }
        })
    }

    pub fn vstack(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.cols, "column count mismatch");
        let mut data = self.data.clone();
        data.extend(other.data.iter().cloned());
        Self::new(self.rows + other.rows, self.cols, data)
    }

    pub fn map<F, G: FnMut(&E) -> F>(&self, g: G) -> Matrix<F> {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(g).collect(),
        }
    }

    pub fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for j in 0..self.cols {
                self.data.swap(a * self.cols + j, b * self.cols + j);
            }
        }
    }

    pub fn swap_cols(&mut self, a: usize, b: usize) {
        if a != b {
            for i in 0..self.rows {
                self.data.swap(i * self.cols + a, i * self.cols + b);
            }
        }
    }
}

impl<E> Index<(usize, usize)> for Matrix<E> {
    type Output = E;
    fn index(&self, (i, j): (usize, usize)) -> &E {
        &self.data[i * self.cols + j]
    }
}

impl<E> IndexMut<(usize, usize)> for Matrix<E> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut E {
        &mut self.data[i * self.cols + j]
    }
}

pub fn zeros<R: Ring>(r: &R, rows: usize, cols: usize) -> Matrix<R::Elem> {
    Matrix::filled(rows, cols, r.zero())
}

pub fn identity<R: Ring>(r: &R, n: usize) -> Matrix<R::Elem> {
    Matrix::from_fn(n, n, |i, j| if i == j { r.one() } else { r.zero() })
}

pub fn diag<R: Ring>(r: &R, d: &[R::Elem]) -> Matrix<R::Elem> {
    let n = d.len();
    Matrix::from_fn(n, n, |i, j| if i == j { d[i].clone() } else { r.zero() })
}

/// Block-diagonal matrix.
pub fn block_diag<R: Ring>(r: &R, blocks: &[Matrix<R::Elem>]) -> Matrix<R::Elem> {
    let rows: usize = blocks.iter().map(|b| b.rows).sum();
    let cols: usize = blocks.iter().map(|b| b.cols).sum();
    let mut out = zeros(r, rows, cols);
    let (mut r0, mut c0) = (0, 0);
    for b in blocks {
        for i in 0..b.rows {
            for j in 0..b.cols {
                out[(r0 + i, c0 + j)] = b[(i, j)].clone();
            }
        }
        r0 += b.rows;
        c0 += b.cols;
    }
    out
}

pub fn mul<R: Ring>(r: &R, a: &Matrix<R::Elem>, b: &Matrix<R::Elem>) -> Matrix<R::Elem> {
    assert_eq!(a.cols, b.rows, "dimension mismatch in product");
    let mut out = zeros(r, a.rows, b.cols);
    for i in 0..a.rows {
        for l in 0..a.cols {
            let x = &a[(i, l)];
            if r.is_zero(x) {
                continue;
            }
            for j in 0..b.cols {
                let y = &b[(l, j)];
                if !r.is_zero(y) {
                    out[(i, j)] = r.add(&out[(i, j)], &r.mul(x, y));
                }
            }
        }
    }
    out
}

pub fn add<R: Ring>(r: &R, a: &Matrix<R::Elem>, b: &Matrix<R::Elem>) -> Matrix<R::Elem> {
    assert!(
        a.rows == b.rows && a.cols == b.cols,
        "dimension mismatch in sum"
    );
    Matrix::from_fn(a.rows, a.cols, |i, j| r.add(&a[(i, j)], &b[(i, j)]))
}

pub fn sub<R: Ring>(r: &R, a: &Matrix<R::Elem>, b: &Matrix<R::Elem>) -> Matrix<R::Elem> {
    assert!(
        a.rows == b.rows && a.cols == b.cols,
        "dimension mismatch in difference"
    );
    Matrix::from_fn(a.rows, a.cols, |i, j| r.sub(&a[(i, j)], &b[(i, j)]))
}

pub fn neg<R: Ring>(r: &R, a: &Matrix<R::Elem>) -> Matrix<R::Elem> {
    a.map(|x| r.neg(x))
}

pub fn scale<R: Ring>(r: &R, c: &R::Elem, a: &Matrix<R::Elem>) -> Matrix<R::Elem> {
    a.map(|x| r.mul(c, x))
}

pub fn is_zero<R: Ring>(r: &R, a: &Matrix<R::Elem>) -> bool {
    a.data.iter().all(|x| r.is_zero(x))
}

pub fn mat_vec<R: Ring>(r: &R, a: &Matrix<R::Elem>, v: &[R::Elem]) -> Vec<R::Elem> {
    assert_eq!(
        a.cols,
        v.len(),
        "dimension mismatch in matrix-vector product"
    );
    (0..a.rows)
        .map(|i| (0..a.cols).fold(r.zero(), |acc, j| r.add(&acc, &r.mul(&a[(i, j)], &v[j]))))
        .collect()
}

pub fn pow<R: Ring>(r: &R, a: &Matrix<R::Elem>, n: u32) -> Matrix<R::Elem> {
    (0..n).fold(identity(r, a.rows), |acc, _| mul(r, &acc, a))
}

/// Entrywise Frobenius.
pub fn frob<R: Frobenius>(r: &R, a: &Matrix<R::Elem>) -> Matrix<R::Elem> {
    a.map(|x| r.frob(x))
}

pub fn frob_inv<R: Frobenius>(r: &R, a: &Matrix<R::Elem>) -> Matrix<R::Elem> {
    a.map(|x| r.frob_inv(x))
}

pub fn frob_pow<R: Frobenius>(r: &R, a: &Matrix<R::Elem>, k: i64) -> Matrix<R::Elem> {
    a.map(|x| r.frob_pow(x, k))
}

/// Rank over k(t) of a matrix whose entries, read as polynomials of degree
/// below the truncation order, are exact.
pub fn generic_rank_series(s: &SeriesRing, a: &Matrix<TruncSeries>) -> usize {
    let ring = PolyRing::new(s.k.clone());
    generic_rank(&PolyMatrix::new(ring, a.rows, a.cols, a.data.clone()))
}

/// Entrywise evaluation of polynomial entries at t = x.
pub fn eval_series(s: &SeriesRing, a: &Matrix<TruncSeries>, x: u32) -> Matrix<u32> {
    let ring = PolyRing::new(s.k.clone());
    a.map(|c| ring.eval(c, x))
}

/// Constant embedding k -> k[t]/(t^T).
pub fn to_series(s: &SeriesRing, a: &Matrix<u32>) -> Matrix<TruncSeries> {
    a.map(|&c| s.constant(c))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rings::FiniteField;

    #[test]
    fn stacking_and_blocks() {
        let k = FiniteField::prime(5).unwrap();
        let a = Matrix::from_rows(vec![vec![1u32, 2], vec![3, 4]]);
        let b = block_diag(&k, &[a.clone(), identity(&k, 1)]);
        assert_eq!(b.rows, 3);
        assert_eq!(b[(2, 2)], 1);
        assert_eq!(b.submatrix(&[0, 1], &[0, 1]), a);
        assert_eq!(a.hstack(&a).cols_range(2, 4), a);
        assert_eq!(a.vstack(&a).rows_range(2, 4), a);
        assert_eq!(mul(&k, &a, &identity(&k, 2)), a);
        assert_eq!(pow(&k, &a, 2), mul(&k, &a, &a));
    }
}
