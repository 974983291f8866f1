//! Matrices over chain rings (local rings with principal maximal ideal whose
//! ideals are totally ordered): Smith normal form, solving, splittings, and
//! the Berkowitz characteristic polynomial over any commutative ring.

use super::{identity, mat_vec, mul, zeros, Matrix};
use crate::rings::{ChainRing, Ring};

/// U·A·V = D with U, V invertible and D diagonal (entries in the first
/// `diag.len()` positions, valuations nondecreasing).
#[derive(Clone, Debug)]
pub struct Smith<E> {
    pub u: Matrix<E>,
    pub v: Matrix<E>,
    pub diag: Vec<E>,
}

pub fn smith<R: ChainRing>(r: &R, a: &Matrix<R::Elem>) -> Smith<R::Elem> {
    let (m, n) = (a.rows, a.cols);
    let mut d = a.clone();
    let mut u = identity(r, m);
    let mut v = identity(r, n);
    let mut diag = Vec::new();
    for k in 0..m.min(n) {
        let mut best: Option<(u32, usize, usize)> = None;
        for i in k..m {
            for j in k..n {
                if let Some(val) = r.val(&d[(i, j)]) {
                    if best.map_or(true, |(b, _, _)| val < b) {
                        best = Some((val, i, j));
                    }
                }
            }
        }
        let Some((_, pi, pj)) = best else { break };
        d.swap_rows(k, pi);
        u.swap_rows(k, pi);
        d.swap_cols(k, pj);
        v.swap_cols(k, pj);
        let piv = d[(k, k)].clone();
        for i in k + 1..m {
            if r.is_zero(&d[(i, k)]) {
                continue;
            }
            let c = r
                .div(&d[(i, k)], &piv)
                .expect("pivot has minimal valuation");
            for j in k..n {
                let t = r.mul(&c, &d[(k, j)]);
                d[(i, j)] = r.sub(&d[(i, j)], &t);
            }
            for j in 0..m {
                let t = r.mul(&c, &u[(k, j)]);
                u[(i, j)] = r.sub(&u[(i, j)], &t);
            }
        }
        for j in k + 1..n {
            if r.is_zero(&d[(k, j)]) {
                continue;
            }
            let c = r
                .div(&d[(k, j)], &piv)
                .expect("pivot has minimal valuation");
            d[(k, j)] = r.zero();
            for i in 0..n {
                let t = r.mul(&c, &v[(i, k)]);
                v[(i, j)] = r.sub(&v[(i, j)], &t);
            }
        }
        diag.push(piv);
    }
    Smith { u, v, diag }
}

/// Valuations of the nonzero elementary divisors, nondecreasing.
pub fn elementary_divisors<R: ChainRing>(r: &R, a: &Matrix<R::Elem>) -> Vec<u32> {
    let mut v: Vec<u32> = smith(r, a).diag.iter().filter_map(|x| r.val(x)).collect();
    v.sort_unstable();
    v
}

/// Some X with A X = B, if one exists.
pub fn chain_solve<R: ChainRing>(
    r: &R,
    a: &Matrix<R::Elem>,
    b: &Matrix<R::Elem>,
) -> Option<Matrix<R::Elem>> {
    assert_eq!(a.rows, b.rows, "row count mismatch in solve");
    let s = smith(r, a);
    let c = mul(r, &s.u, b);
    let mut y = zeros(r, a.cols, b.cols);
    for i in 0..a.rows {
        for col in 0..b.cols {
            let ci = &c[(i, col)];
            if i < s.diag.len() {
                y[(i, col)] = r.div(ci, &s.diag[i])?;
            } else if !r.is_zero(ci) {
                return None;
            }
        }
    }
    Some(mul(r, &s.v, &y))
}

/// For A whose columns span a direct factor, some X with X A = I.
pub fn left_inverse<R: ChainRing>(r: &R, a: &Matrix<R::Elem>) -> Option<Matrix<R::Elem>> {
    let s = smith(r, a);
    if s.diag.len() < a.cols || !s.diag.iter().all(|x| r.is_unit(x)) {
        return None;
    }
    // X = V D^{-1} [I 0] U
    let mut top = s.u.rows_range(0, a.cols);
    for i in 0..a.cols {
        let inv = r.inv_unit(&s.diag[i]);
        for j in 0..top.cols {
            top[(i, j)] = r.mul(&inv, &top[(i, j)]);
        }
    }
    Some(mul(r, &s.v, &top))
}

pub fn chain_inverse<R: ChainRing>(r: &R, a: &Matrix<R::Elem>) -> Option<Matrix<R::Elem>> {
    if a.rows != a.cols {
        return None;
    }
    left_inverse(r, a)
}

/// Coefficients of det(X·I - A), constant term first; division free.
pub fn charpoly<R: Ring>(r: &R, a: &Matrix<R::Elem>) -> Vec<R::Elem> {
    assert_eq!(
        a.rows, a.cols,
        "characteristic polynomial of a non-square matrix"
    );
    let n = a.rows;
    if n == 0 {
        return vec![r.one()];
    }
    // Berkowitz vector, leading coefficient first.
    let mut c = vec![r.one(), r.neg(&a[(0, 0)])];
    for k in 1..n {
        let row: Vec<R::Elem> = (0..k).map(|j| a[(k, j)].clone()).collect();
        let sub = a.submatrix(&(0..k).collect::<Vec<_>>(), &(0..k).collect::<Vec<_>>());
        let mut s: Vec<R::Elem> = (0..k).map(|i| a[(i, k)].clone()).collect();
        let dot = |x: &[R::Elem], y: &[R::Elem]| {
            x.iter()
                .zip(y)
                .fold(r.zero(), |acc, (p, q)| r.add(&acc, &r.mul(p, q)))
        };
        let mut col = vec![r.one(), r.neg(&a[(k, k)])];
        for _ in 0..k {
            col.push(r.neg(&dot(&row, &s)));
            s = mat_vec(r, &sub, &s);
        }
        let mut next = vec![r.zero(); k + 2];
        for (i, out) in next.iter_mut().enumerate() {
            for j in 0..=k {
                if i >= j {
                    *out = r.add(out, &r.mul(&col[i - j], &c[j]));
                }
            }
        }
        c = next;
    }
    c.reverse();
    c
}

/// Determinant over any commutative ring.
pub fn det_any<R: Ring>(r: &R, a: &Matrix<R::Elem>) -> R::Elem {
    let c = charpoly(r, a);
    if a.rows % 2 == 0 {
        c[0].clone()
    } else {
        r.neg(&c[0])
    }
}
