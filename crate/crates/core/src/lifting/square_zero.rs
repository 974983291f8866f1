//! Stagewise lifting of a PR datum along k[t]/(t^n) ← k[t]/(t^{n+1}).

use super::{match_reduction_series, preimage_chain, strict_upper, LiftError};
use crate::linalg::{
    add, chain_solve, complete_basis, kernel, mul, neg, pow, scale, solve, to_series, zeros, Matrix,
};
use crate::polygons::TorsionProfile;
use crate::prdata::{
    check_pairing_compat_h, standard_pairing, torsion_profile, validate_pr, FilteredModule,
};
use crate::rings::{FiniteField, Ring, SeriesRing, TruncSeries};
use crate::Case;

/// A special-fiber datum as a datum over k[t]/(t).
pub fn embed_special(
    k: &FiniteField,
    f: &FilteredModule<u32>,
) -> (SeriesRing, FilteredModule<TruncSeries>) {
    (SeriesRing::new(k.clone(), 1), f.map(|&c| vec![c]))
}

fn check_input(
    r: &SeriesRing,
    f: &FilteredModule<TruncSeries>,
    case: Case,
    gram: Option<&Matrix<u32>>,
) -> Result<(Matrix<u32>, Option<Matrix<u32>>), LiftError> {
    let bad = |m: String| Err(LiftError::InvalidInstance(m));
    if case == Case::AR {
        return Err(LiftError::UnsupportedCase(case));
    }
    let k = &r.k;
    let report = validate_pr(r, f);
    if !report.is_valid() {
        return bad(format!("not a PR datum: {:?}", report.violations));
    }
    if f.pi.data.iter().any(|x| x[1..].iter().any(|&c| c != 0))
        || f.pi_images.iter().any(|x| !r.is_zero(x))
    {
        return bad("π must be constant with all σ_j(π) = 0".into());
    }
    let pibar = f.pi.map(|x| x[0]);
    if torsion_profile(k, &pibar) != TorsionProfile(vec![f.e as u32; f.h]) {
        return bad("ambient module is not free".into());
    }
    if case != Case::C {
        return Ok((pibar, None));
    }
    if f.h % 2 != 0 || f.d.iter().any(|&x| 2 * x as usize != f.h) {
        return bad("case C needs even height and d_j = h/2".into());
    }
    let g = gram
        .cloned()
        .unwrap_or_else(|| standard_pairing(k, f.e, f.h / 2));
    if !check_pairing_compat_h(r, f, &to_series(r, &g)) {
        return bad("filtration is not compatible with the pairing".into());
    }
    Ok((pibar, Some(g)))
}

/// A lift over k[t]/(t^{n+1}) of a datum over R = k[t]/(t^n), restricting
/// exactly to it. Each stage lifts the new part of ω^[i+1] into the preimage
/// π^{-1}(ω^[i]); in case C one Hensel step against the alternating defect
/// restores isotropy for the form of that stage.
pub fn lift_square_zero(
    r: &SeriesRing,
    f: &FilteredModule<TruncSeries>,
    case: Case,
    gram: Option<&Matrix<u32>>,
) -> Result<(SeriesRing, FilteredModule<TruncSeries>), LiftError> {
    let (pibar, gram) = check_input(r, f, case, gram)?;
    let k = &r.k;
    let n = r.trunc;
    let s = SeriesRing::new(k.clone(), n + 1);
    let pad = |m: &Matrix<TruncSeries>| m.map(|x| s.from_coeffs(x));
    let restrict = |m: &Matrix<TruncSeries>| m.map(|x| r.from_coeffs(x));
    let (e, h) = (f.e, f.h);
    let pi = to_series(&s, &pibar);
    let kerpi = to_series(&s, &kernel(k, &pibar));
    let gs = gram.as_ref().map(|g| to_series(&s, g));
    let tn = s.monomial(1, n);
    let mut steps: Vec<Matrix<TruncSeries>> = Vec::new();
    for i in 0..e {
        let li = if i == 0 {
            zeros(&s, e * h, 0)
        } else {
            steps[i - 1].clone()
        };
        let p = preimage_chain(&s, &pi, &kerpi, &li).expect("ω^[i] ⊆ πH");
        let li_r = restrict(&li);
        let comp = if li.cols == 0 {
            f.steps[i].clone()
        } else {
            let y = chain_solve(r, &f.steps[i], &li_r).expect("ω^[i] ⊆ ω^[i+1]");
            let ebar = complete_basis(k, &y.map(|x| x[0]));
            mul(r, &f.steps[i], &to_series(r, &ebar))
        };
        let c = chain_solve(r, &restrict(&p), &comp).expect("πω^[i+1] ⊆ ω^[i]");
        let mut w = mul(&s, &p, &pad(&c));
        if let Some(g) = &gs {
            let q = pow(&s, &pi, (e - i - 1) as u32);
            let yw = chain_solve(&s, &q, &w).expect("ω^[i+1] ⊆ π^{e-i-1}H");
            let yp = chain_solve(&s, &q, &p).expect("π^{-1}ω^[i] ⊆ π^{e-i-1}H");
            let defect = mul(&s, &mul(&s, &w.transpose(), g), &yw);
            if defect.data.iter().any(|x| x[..n].iter().any(|&c| c != 0)) {
                return Err(LiftError::InvalidInstance("input is not isotropic".into()));
            }
            let upper = strict_upper(k, &defect.map(|x| x[n]));
            let kwp = mul(&s, &mul(&s, &w.transpose(), g), &yp).map(|x| x[0]);
            let z = solve(k, &kwp, &neg(k, &upper)).ok_or_else(|| {
                LiftError::CertificationFailed("isotropy defect is not correctable".into())
            })?;
            w = add(&s, &w, &scale(&s, &tn, &mul(&s, &p, &to_series(&s, &z))));
        }
        steps.push(match_reduction_series(&s, r, &li.hstack(&w), &f.steps[i]));
    }
    let out = FilteredModule {
        e,
        h,
        pi,
        steps,
        d: f.d.clone(),
        pi_images: vec![s.zero(); e],
    };
    let report = validate_pr(&s, &out);
    if !report.is_valid() {
        return Err(LiftError::CertificationFailed(format!(
            "{:?}",
            report.violations
        )));
    }
    if let Some(g) = &gs {
        if !check_pairing_compat_h(&s, &out, g) {
            return Err(LiftError::CertificationFailed(
                "lift is not isotropic".into(),
            ));
        }
    }
    Ok((s, out))
}
