//! Lifting a special-fiber PR datum, stage by stage, to one over k[[t]] whose
//! generic fiber satisfies the Rapoport condition.

use super::{
    constant, dvr_kernel, generic_rank_local, lift_isotropic, lift_subspace, match_reduction,
    preimage_chain, reduce, saturated_span, LiftError, LiftInstance, PolarizedLiftInstance,
};
use crate::linalg::{
    chain_inverse, chain_solve, col_basis, complete_basis, det, kernel, mul, pow, solve, Matrix,
};
use crate::polygons::max_subset_sum;
use crate::polygons::TorsionProfile;
use crate::prdata::{
    check_pairing_compat_h, standard_pairing, torsion_profile, validate_pr, FilteredModule,
};
use crate::rings::{FiniteField, LocalRing, RatFunc, Ring, SeriesRing, TruncSeries};
use crate::Case;

#[derive(Clone, Debug)]
pub struct TowerLift {
    pub ring: LocalRing,
    pub series: SeriesRing,
    /// The lift over k[t]_(t); reduces exactly to the input.
    pub exact: FilteredModule<RatFunc>,
    /// Its image over k[t]/(t^T).
    pub module: FilteredModule<TruncSeries>,
    /// generic_dims[i-1][j-1] = dim of ω^[i][π^j] on the generic fiber.
    pub generic_dims: Vec<Vec<usize>>,
}

fn check_input(
    k: &FiniteField,
    f: &FilteredModule<u32>,
    case: Case,
    gram: Option<&Matrix<u32>>,
) -> Result<Option<Matrix<u32>>, LiftError> {
    let bad = |m: String| Err(LiftError::InvalidInstance(m));
    if case == Case::AR {
        return Err(LiftError::UnsupportedCase(case));
    }
    let report = validate_pr(k, f);
    if !report.is_valid() {
        return bad(format!("not a PR datum: {:?}", report.violations));
    }
    if f.pi_images.iter().any(|&x| x != 0) {
        return bad("not a special-fiber datum".into());
    }
    if torsion_profile(k, &f.pi) != TorsionProfile(vec![f.e as u32; f.h]) {
        return bad("ambient module is not free".into());
    }
    if case != Case::C {
        return Ok(None);
    }
    if f.h % 2 != 0 || f.d.iter().any(|&x| 2 * x as usize != f.h) {
        return bad("case C needs even height and d_j = h/2".into());
    }
    let g = gram
        .cloned()
        .unwrap_or_else(|| standard_pairing(k, f.e, f.h / 2));
    let self_adjoint = mul(k, &f.pi.transpose(), &g) == mul(k, &g, &f.pi);
    if g.rows != f.rank() || det(k, &g) == 0 || !self_adjoint {
        return bad("pairing is not perfect with π self-adjoint".into());
    }
    if !check_pairing_compat_h(k, f, &g) {
        return bad("filtration is not compatible with the pairing".into());
    }
    Ok(Some(g))
}

/// Lift of a special-fiber datum into the Rapoport locus over k[[t]], output
/// modulo t^trunc. Case C keeps every step isotropic for the induced forms.
///
/// Stage i+1 works in M_i = π^{-1}(ω^[i])/ω^[i] of rank h, lifting
/// ω^[i+1]/ω^[i] in general position to the submodules M_i[π^j]; in case C
/// the lift is Lagrangian for the form induced from the pairing.
pub fn lift_pr_tower(
    k: &FiniteField,
    f: &FilteredModule<u32>,
    case: Case,
    gram: Option<&Matrix<u32>>,
    trunc: usize,
) -> Result<TowerLift, LiftError> {
    let gram = check_input(k, f, case, gram)?;
    let o = LocalRing::new(k.clone());
    let (e, h) = (f.e, f.h);
    let pi = constant(&o, &f.pi);
    let kerpi = constant(&o, &kernel(k, &f.pi));
    let pi_pow: Vec<Matrix<RatFunc>> = (0..=e).map(|j| pow(&o, &pi, j as u32)).collect();
    let mut steps = vec![constant(&o, &f.steps[0])];
    for i in 1..e {
        let li = &steps[i - 1];
        let p = preimage_chain(&o, &pi, &kerpi, li).expect("ω^[i] ⊆ πH");
        let y = chain_solve(&o, &p, li).expect("ω^[i] ⊆ π^{-1}ω^[i]");
        let ebar = complete_basis(k, &reduce(&o, &y));
        let binv =
            chain_inverse(&o, &y.hstack(&constant(&o, &ebar))).expect("completion is a basis");
        let proj = binv.rows_range(li.cols, binv.rows);
        let rb = mul(&o, &p, &constant(&o, &ebar));
        let chain: Vec<Matrix<RatFunc>> = (1..=i)
            .map(|j| {
                let kj = dvr_kernel(&o, &mul(&o, &pi_pow[j], &p));
                saturated_span(&o, &mul(&o, &proj, &kj))
            })
            .collect();
        let c = solve(k, &reduce(&o, &p), &f.steps[i]).expect("πω^[i+1] ⊆ ω^[i]");
        let lbar = col_basis(k, &mul(k, &reduce(&o, &proj), &c));
        let lift = match &gram {
            None => lift_subspace(&LiftInstance::new(o.clone(), h, chain, lbar)?)?,
            Some(g) => {
                let yb =
                    chain_solve(&o, &pi_pow[e - i - 1], &rb).expect("π^{-1}ω^[i] ⊆ π^{e-i-1}H");
                let kform = mul(&o, &mul(&o, &rb.transpose(), &constant(&o, g)), &yb);
                lift_isotropic(&PolarizedLiftInstance::new(
                    o.clone(),
                    kform,
                    chain[0].clone(),
                    lbar,
                )?)?
            }
        };
        let next = li.hstack(&mul(&o, &rb, &lift.basis));
        steps.push(match_reduction(&o, &next, &f.steps[i]));
    }
    let mut generic_dims = Vec::new();
    for (i, li) in steps.iter().enumerate() {
        let mut row = Vec::new();
        for j in 1..=e {
            let dim = li.cols - generic_rank_local(&o, &mul(&o, &pi_pow[j], li));
            let want = max_subset_sum(&f.d[..=i], j) as usize;
            if dim != want {
                return Err(LiftError::CertificationFailed(format!(
                    "dim ω^[{}][π^{j}] = {dim} on the generic fiber, expected {want}",
                    i + 1
                )));
            }
            row.push(dim);
        }
        generic_dims.push(row);
    }
    let exact = FilteredModule {
        e,
        h,
        pi,
        steps,
        d: f.d.clone(),
        pi_images: vec![o.zero(); e],
    };
    if let Some(g) = &gram {
        if !check_pairing_compat_h(&o, &exact, &constant(&o, g)) {
            return Err(LiftError::CertificationFailed(
                "lift is not isotropic".into(),
            ));
        }
    }
    let series = SeriesRing::new(k.clone(), trunc);
    let module = exact.map(|x| o.truncate(x, trunc));
    Ok(TowerLift {
        ring: o,
        series,
        exact,
        module,
        generic_dims,
    })
}
