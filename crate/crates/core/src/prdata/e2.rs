//! One step down the Hodge strata for e = 2: a deformation over k[t]/(t^T)
//! whose generic fiber has τ-profile (a_1 - 1, a_2 + 1).

use thiserror::Error;

use super::{orthogonal, standard_pairing, FilteredModule};
use crate::linalg::{
    col_basis, col_space_contains, generic_rank_series, intersect, is_zero, mul, rank, solve,
    to_series, Matrix,
};
use crate::rings::{FiniteField, Ring, SeriesRing, TruncSeries};
use crate::Case;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum E2Error {
    #[error("the point already lies in the generalized Rapoport locus")]
    AlreadyMinimal,
    #[error("case {0} is not supported")]
    UnsupportedCase(Case),
    #[error("expected e = 2, got {0}")]
    WrongRamification(usize),
    #[error("case C needs d_1 = d_2 = h/2 and a Lagrangian ω")]
    NotPolarized,
    #[error("truncation order must be at least 2")]
    TruncationTooLow,
}

#[derive(Clone, Debug)]
pub struct E2Lift {
    pub series: SeriesRing,
    pub module: FilteredModule<TruncSeries>,
    /// (dim ω[π], dim ω - dim ω[π]) at the special and generic fibers.
    pub special_profile: (u32, u32),
    pub generic_profile: (u32, u32),
}

/// (a_1, a_2) with a_1 = dim ω[π] and a_1 + a_2 = dim ω.
pub fn e2_profile(k: &FiniteField, f: &FilteredModule<u32>) -> (u32, u32) {
    let w = f.omega();
    let a1 = w.cols - rank(k, &mul(k, &f.pi, w));
    (a1 as u32, (w.cols - a1) as u32)
}

/// Deforms a non-Rapoport point on the standard ambient (the Gram matrix for
/// case C is the standard pairing). AU is handled as AL.
pub fn e2_deformation_step(
    k: &FiniteField,
    f: &FilteredModule<u32>,
    case: Case,
    trunc: usize,
) -> Result<E2Lift, E2Error> {
    if f.e != 2 {
        return Err(E2Error::WrongRamification(f.e));
    }
    if case == Case::AR {
        return Err(E2Error::UnsupportedCase(Case::AR));
    }
    if trunc < 2 {
        return Err(E2Error::TruncationTooLow);
    }
    let (a1, a2) = e2_profile(k, f);
    if a1 == f.d[0].max(f.d[1]) {
        return Err(E2Error::AlreadyMinimal);
    }
    let s = SeriesRing::new(k.clone(), trunc);
    let omega1 = f.step(k, 1);
    let lifted = match case {
        Case::C => lift_case_c(k, &s, f)?,
        _ => lift_case_al(k, &s, f),
    };
    let pi_s = to_series(&s, &f.pi);
    let w = lifted.clone();
    let generic_a1 = w.cols - generic_rank_series(&s, &mul(&s, &pi_s, &w));
    let module = FilteredModule {
        e: 2,
        h: f.h,
        pi: pi_s,
        steps: vec![to_series(&s, &omega1), lifted],
        d: f.d.clone(),
        pi_images: vec![s.zero(); 2],
    };
    Ok(E2Lift {
        series: s,
        module,
        special_profile: (a1, a2),
        generic_profile: (generic_a1 as u32, (w.cols - generic_a1) as u32),
    })
}

/// Columns of `big` extending a basis of `small ⊆ big`.
fn extend(k: &FiniteField, small: &Matrix<u32>, big: &Matrix<u32>) -> Matrix<u32> {
    let b = col_basis(k, &small.hstack(big));
    b.cols_range(small.cols, b.cols)
}

/// The adapted k[π]/π² basis: πe_1..πe_{d_1} spans ω^[1], and e_1..e_r,
/// πe_{d_1+1}..πe_{d_1+s} span ω modulo ω^[1].
fn lift_case_al(k: &FiniteField, s: &SeriesRing, f: &FilteredModule<u32>) -> Matrix<TruncSeries> {
    let pi = &f.pi;
    let omega1 = col_basis(k, &f.step(k, 1));
    let omega = f.omega();
    let pi_h = col_basis(k, pi);
    let torsion = intersect(k, omega, &pi_h);
    // y_1..y_r: ω modulo ω ∩ πH
    let y = extend(k, &torsion, omega);
    let r = y.cols;
    let py = mul(k, pi, &y);
    // πe_{r+1}..πe_{d_1} complete πy inside ω^[1]
    let w_rest = extend(k, &py, &omega1);
    let e_rest = solve(k, pi, &w_rest).expect("ω^[1] lies in πH");
    // πe_{d_1+1}..πe_{d_1+s} complete ω^[1] inside ω ∩ πH
    let w_tor = extend(k, &omega1, &torsion);
    let sdim = w_tor.cols;
    debug_assert!(sdim > 0 && r < omega1.cols);
    let e_next = e_rest.col(0);
    let mut cols: Vec<Vec<TruncSeries>> = Vec::new();
    let pis = |v: Vec<u32>| v.into_iter().map(|c| s.constant(c)).collect::<Vec<_>>();
    for v in py.hstack(&w_rest).to_cols_vec() {
        cols.push(pis(v));
    }
    for v in y.to_cols_vec() {
        cols.push(pis(v));
    }
    for j in 0..sdim - 1 {
        cols.push(pis(w_tor.col(j)));
    }
    let last = w_tor.col(sdim - 1);
    cols.push(
        last.iter()
            .zip(&e_next)
            .map(|(&a, &b)| s.add(&s.constant(a), &s.monomial(b, 1)))
            .collect(),
    );
    Matrix::from_cols(&cols, f.rank())
}

/// Isotropic variant: ω^[1] + span(u + t·c, l_2, …, l_g) with u ∈ ω[π] \ ω^[1]
/// and c orthogonal to everything but u.
fn lift_case_c(
    k: &FiniteField,
    s: &SeriesRing,
    f: &FilteredModule<u32>,
) -> Result<Matrix<TruncSeries>, E2Error> {
    let h = f.h;
    if h % 2 == 1 || f.d[0] != f.d[1] || 2 * f.d[0] as usize != h {
        return Err(E2Error::NotPolarized);
    }
    let gram = standard_pairing(k, 2, h / 2);
    let omega = f.omega();
    if !is_zero(k, &mul(k, &mul(k, &omega.transpose(), &gram), omega)) {
        return Err(E2Error::NotPolarized);
    }
    let pi = &f.pi;
    let omega1 = col_basis(k, &f.step(k, 1));
    let pi_h = col_basis(k, pi);
    let torsion = intersect(k, omega, &pi_h);
    let i_part = extend(k, &omega1, &torsion);
    let u = i_part.cols_range(0, 1);
    let rest_i = i_part.cols_range(1, i_part.cols);
    let y = extend(k, &torsion, omega);
    let w = omega1.hstack(&rest_i).hstack(&y);
    let perp = orthogonal(k, &gram, &w);
    let avoid = pi_h.hstack(omega);
    let c = (0..perp.cols)
        .map(|j| perp.col(j))
        .find(|v| !col_space_contains(k, &avoid, v))
        .ok_or(E2Error::NotPolarized)?;
    let mut lifted = to_series(s, &w);
    let v: Vec<TruncSeries> = u
        .col(0)
        .iter()
        .zip(&c)
        .map(|(&a, &b)| s.add(&s.constant(a), &s.monomial(b, 1)))
        .collect();
    lifted = lifted.hstack(&Matrix::from_cols(&[v], f.rank()));
    Ok(lifted)
}
