//! Explicit lifts over k[[t]]: subspaces in general position with respect to
//! a chain, totally isotropic lifts, lifts of whole PR towers into the
//! generalized Rapoport locus, and stagewise square-zero lifts.
//!
//! Lifts are computed exactly over the discrete valuation ring k[t]_(t) and
//! truncated to k[t]/(t^T) on output. Generic-fiber dimensions are certified
//! on denominator-free representatives with `generic_rank`.

mod isotropic;
mod square_zero;
mod subspace;
mod tower;

pub use isotropic::{lift_isotropic, PolarizedLiftInstance};
pub use square_zero::{embed_special, lift_square_zero};
pub use subspace::{lift_subspace, LiftInstance};
pub use tower::{lift_pr_tower, TowerLift};

use thiserror::Error;

use crate::linalg::{chain_solve, mul, smith, solve, Matrix};
use crate::rings::{
    generic_rank, ChainRing, LocalRing, PolyMatrix, PolyRing, RatFunc, Ring, SeriesRing,
    TruncSeries,
};
use crate::Case;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LiftError {
    #[error("case {0} is not supported")]
    UnsupportedCase(Case),
    #[error("invalid lifting instance: {0}")]
    InvalidInstance(String),
    #[error("generic-fiber certification failed: {0}")]
    CertificationFailed(String),
}

/// A lift together with its certified generic intersection dimensions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Lift {
    pub basis: Matrix<RatFunc>,
    /// dim over k(t) of L ∩ N_i, one entry per submodule of the instance.
    pub generic_intersections: Vec<usize>,
}

impl Lift {
    pub fn truncate(&self, o: &LocalRing, trunc: usize) -> Matrix<TruncSeries> {
        truncate(o, &self.basis, trunc)
    }
}

pub(crate) fn reduce(o: &LocalRing, m: &Matrix<RatFunc>) -> Matrix<u32> {
    m.map(|x| o.at_zero(x))
}

pub(crate) fn constant(o: &LocalRing, m: &Matrix<u32>) -> Matrix<RatFunc> {
    m.map(|&x| o.constant(x))
}

pub(crate) fn truncate(o: &LocalRing, m: &Matrix<RatFunc>, trunc: usize) -> Matrix<TruncSeries> {
    m.map(|x| o.truncate(x, trunc))
}

/// Rank over k(t), after clearing denominators column by column.
pub fn generic_rank_local(o: &LocalRing, m: &Matrix<RatFunc>) -> usize {
    let polys = PolyRing::new(o.k().clone());
    let mut entries = vec![Vec::new(); m.rows * m.cols];
    for j in 0..m.cols {
        let mut l = polys.one();
        for i in 0..m.rows {
            let d = &m[(i, j)].den;
            let g = polys.gcd(&l, d);
            l = polys.divexact(&polys.mul(&l, d), &g);
        }
        for i in 0..m.rows {
            let x = &m[(i, j)];
            entries[i * m.cols + j] = polys.mul(&x.num, &polys.divexact(&l, &x.den));
        }
    }
    generic_rank(&PolyMatrix::new(polys, m.rows, m.cols, entries))
}

/// Kernel of a matrix over a domain chain ring: the trailing columns of V in
/// the Smith form.
pub(crate) fn dvr_kernel<R: ChainRing>(r: &R, a: &Matrix<R::Elem>) -> Matrix<R::Elem> {
    let s = smith(r, a);
    s.v.cols_range(s.diag.len(), a.cols)
}

/// Basis of the saturation of the column span over a domain chain ring.
pub(crate) fn saturated_span<R: ChainRing>(r: &R, a: &Matrix<R::Elem>) -> Matrix<R::Elem> {
    let s = smith(r, a);
    let uinv = crate::linalg::chain_inverse(r, &s.u).expect("Smith transforms are invertible");
    uinv.cols_range(0, s.diag.len())
}

/// π^{-1}(L) = ker π + Z with πZ = L, for L inside the image of π.
pub(crate) fn preimage_chain<R: ChainRing>(
    r: &R,
    pi: &Matrix<R::Elem>,
    ker: &Matrix<R::Elem>,
    l: &Matrix<R::Elem>,
) -> Option<Matrix<R::Elem>> {
    if l.cols == 0 {
        return Some(ker.clone());
    }
    let z = chain_solve(r, pi, l)?;
    Some(ker.hstack(&z))
}

/// Rebase a lift so that its reduction is exactly `target`.
pub(crate) fn match_reduction(
    o: &LocalRing,
    lifted: &Matrix<RatFunc>,
    target: &Matrix<u32>,
) -> Matrix<RatFunc> {
    let k = o.k();
    let x = solve(k, &reduce(o, lifted), target).expect("reduction spans the target");
    mul(o, lifted, &constant(o, &x))
}

/// Same for series bases: `target` lives over a quotient series ring.
pub(crate) fn match_reduction_series(
    s: &SeriesRing,
    r: &SeriesRing,
    lifted: &Matrix<TruncSeries>,
    target: &Matrix<TruncSeries>,
) -> Matrix<TruncSeries> {
    let red = lifted.map(|x| r.from_coeffs(x));
    let x = chain_solve(r, &red, target).expect("reduction spans the target");
    mul(s, lifted, &x.map(|c| s.from_coeffs(c)))
}

/// Strictly upper triangular part U of an alternating matrix E = U - U^T.
pub(crate) fn strict_upper<R: Ring>(r: &R, e: &Matrix<R::Elem>) -> Matrix<R::Elem> {
    Matrix::from_fn(e.rows, e.cols, |i, j| {
        if i < j {
            e[(i, j)].clone()
        } else {
            r.zero()
        }
    })
}

/// Columns of `b` that extend a basis of span(a) to a basis of span(a, b).
pub(crate) fn extend_by<K: crate::rings::Field>(
    k: &K,
    a: &Matrix<K::Elem>,
    b: &Matrix<K::Elem>,
) -> Matrix<K::Elem> {
    let a = crate::linalg::col_basis(k, a);
    let (_, pivots) = crate::linalg::rref(k, &a.hstack(b));
    let picked: Vec<usize> = pivots
        .into_iter()
        .filter(|&p| p >= a.cols)
        .map(|p| p - a.cols)
        .collect();
    b.submatrix(&(0..b.rows).collect::<Vec<_>>(), &picked)
}
