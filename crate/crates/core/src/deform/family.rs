//! The family F_N,τ = (1 + t N_{τ+1}) A_τ σ and V_N,τ = B_τ (1 - t^{1/p} σ⁻¹(N_{τ+1})) σ⁻¹
//! over O_m ⊗ k[[t^{1/p^∞}]] truncated at t^T with denominators p^D. Both
//! relations hold identically because N² = 0.

use crate::crystals::{hodge_polygon, make_crystal, newton_polygon, normalize_nnp, Crystal};
use crate::linalg::{add, frob, frob_inv, identity, mul, scale, sub, Matrix};
use crate::polygons::{dominates, Polygon};
use crate::rings::{LaurentPerf, LaurentPerfElem, RamifiedElem, RamifiedRing, Ring};

use super::residue::ResidueFamily;
use super::{validate_n, DeformError, DeformationOp};

type Elem = LaurentPerfElem<RamifiedElem>;

#[derive(Clone, Debug)]
pub struct CrystalFamily {
    special: Crystal,
    op: DeformationOp,
    base: LaurentPerf<RamifiedRing>,
    f_n: Vec<Matrix<Elem>>,
    v_n: Vec<Matrix<Elem>>,
}

/// Newton polygon of the generic fiber, bounded above by the lowest
/// specialization t ↦ [c], c ∈ k, and below by the Hodge polygon.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GenericNewton {
    pub hodge: Polygon,
    pub upper: Polygon,
    /// The c realizing `upper`.
    pub point: u32,
    /// `upper` equals the Hodge polygon, so it is the generic Newton polygon.
    pub certified: bool,
}

fn lift(base: &LaurentPerf<RamifiedRing>, a: &Matrix<RamifiedElem>) -> Matrix<Elem> {
    a.map(|x| base.constant(x.clone()))
}

/// Builds the family; N must pass `validate_n`, T ≥ 2 and D ≥ 1.
pub fn deform(
    c: &Crystal,
    op: &DeformationOp,
    trunc: u32,
    denom: u32,
) -> Result<CrystalFamily, DeformError> {
    let report = validate_n(c, op);
    if let Some(why) = report.first_failure() {
        return Err(DeformError::InvalidOp(why));
    }
    if trunc < 2 || denom < 1 {
        return Err(DeformError::Parameters(format!(
            "need T ≥ 2 and D ≥ 1, got T = {trunc}, D = {denom}"
        )));
    }
    let r = c.ring().clone();
    let base = LaurentPerf::new(r.clone(), r.p() as u32, trunc, denom);
    let (f, h) = (c.f(), c.h());
    let one = identity(&base, h);
    let mut f_n = Vec::with_capacity(f);
    let mut v_n = Vec::with_capacity(f);
    for t in 0..f {
        let tn = op.n(t + 1).map(|x| base.monomial(x.clone(), 1, 0));
        f_n.push(mul(
            &base,
            &add(&base, &one, &tn),
            &lift(&base, c.frobenius(t)),
        ));
        let root = frob_inv(&base, &tn);
        v_n.push(mul(
            &base,
            &lift(&base, c.verschiebung(t)),
            &sub(&base, &one, &root),
        ));
    }
    Ok(CrystalFamily {
        special: c.clone(),
        op: op.clone(),
        base,
        f_n,
        v_n,
    })
}

impl CrystalFamily {
    pub fn special(&self) -> &Crystal {
        &self.special
    }
    pub fn op(&self) -> &DeformationOp {
        &self.op
    }
    pub fn base(&self) -> &LaurentPerf<RamifiedRing> {
        &self.base
    }
    pub fn frobenius(&self, tau: usize) -> &Matrix<Elem> {
        &self.f_n[tau % self.f_n.len()]
    }
    pub fn verschiebung(&self, tau: usize) -> &Matrix<Elem> {
        &self.v_n[tau % self.v_n.len()]
    }

    /// The matrices at t = 0.
    pub fn reduction(&self) -> (Vec<Matrix<RamifiedElem>>, Vec<Matrix<RamifiedElem>>) {
        let at0 = |a: &Matrix<Elem>| a.map(|x| self.base.at_zero(x));
        (
            self.f_n.iter().map(at0).collect(),
            self.v_n.iter().map(at0).collect(),
        )
    }

    pub fn reduces_to_special(&self) -> bool {
        let (a, b) = self.reduction();
        a == self.special.frobenius_mats() && b == self.special.verschiebung_mats()
    }

    /// F_N V_N = V_N F_N = p over the base.
    pub fn relations_hold(&self) -> bool {
        let b = &self.base;
        let p = scale(
            b,
            &b.from_int(self.special.p() as i64),
            &identity(b, self.special.h()),
        );
        (0..self.f_n.len()).all(|t| {
            let fv = mul(b, &self.f_n[t], &frob(b, &self.v_n[t]));
            let vf = mul(b, &self.v_n[t], &frob_inv(b, &self.f_n[t]));
            fv == p && vf == p
        })
    }

    /// H_{τ+1} s(A_N,τ̄) = σ(B_N,τ)ᵀ σ(H_τ) over the base; true without a pairing.
    pub fn adjunction_holds(&self) -> bool {
        let Some(hp) = self.special.pairing() else {
            return true;
        };
        let b = &self.base;
        let r = self.special.ring();
        let s = |a: &Matrix<Elem>| {
            if hp.conjugates() {
                a.map(|x| b.map_coeffs(b, x, |c| r.conj(c)))
            } else {
                a.clone()
            }
        };
        (0..self.f_n.len()).all(|t| {
            let tb = self.special.bar(t);
            let lhs = mul(b, &lift(b, hp.gram(t + 1)), &s(&self.f_n[tb]));
            let rhs = mul(
                b,
                &frob(b, &self.v_n[t]).transpose(),
                &frob(b, &lift(b, hp.gram(t))),
            );
            lhs == rhs
        })
    }

    /// The crystal over W(k) obtained from t ↦ [c], validated afresh.
    pub fn specialize(&self, c: u32) -> Result<Crystal, DeformError> {
        let r = self.special.ring();
        let tau = r.teichmuller(c);
        let at = |a: &Matrix<Elem>| a.map(|x| self.base.specialize(x, &tau));
        let pairing = self.special.pairing().cloned();
        Ok(make_crystal(
            r.clone(),
            self.special.case(),
            self.f_n.iter().map(at).collect(),
            self.v_n.iter().map(at).collect(),
            pairing,
        )?)
    }

    /// The lowest Newton polygon among the specializations at k, scanned in
    /// the order of k's elements.
    pub fn generic_newton(&self) -> Result<GenericNewton, DeformError> {
        let hodge = hodge_polygon(&self.special);
        let mut best: Option<(Polygon, u32)> = None;
        for c in self.special.residue_field().elements() {
            let np = newton_polygon(&self.specialize(c)?)?;
            let lower = match &best {
                None => true,
                Some((b, _)) => *b != np && dominates(b, &np).unwrap_or(false),
            };
            if lower {
                best = Some((np, c));
            }
        }
        let (upper, point) = best.expect("k is nonempty");
        let certified = upper == hodge;
        Ok(GenericNewton {
            hodge,
            upper,
            point,
            certified,
        })
    }

    /// F_N modulo π.
    pub fn residue(&self) -> ResidueFamily {
        let r = self.special.ring();
        let res = |a: &Matrix<RamifiedElem>| a.map(|x| r.residue(x));
        let f_bar: Vec<_> = self.special.frobenius_mats().iter().map(res).collect();
        let n_bar: Vec<_> = self.op.mats().iter().map(res).collect();
        ResidueFamily::new(self.special.residue_field(), &f_bar, &n_bar)
    }

    /// F⁰_N = (1 + tN) F⁰ modulo π, for the normalization of the special fiber.
    pub fn nnp_residue(&self) -> Result<ResidueFamily, DeformError> {
        let r = self.special.ring();
        let nnp = normalize_nnp(&self.special)?;
        let res = |a: &Matrix<RamifiedElem>| a.map(|x| r.residue(x));
        let f_bar: Vec<_> = nnp.f0_mats().iter().map(res).collect();
        let n_bar: Vec<_> = self.op.mats().iter().map(res).collect();
        Ok(ResidueFamily::new(
            self.special.residue_field(),
            &f_bar,
            &n_bar,
        ))
    }
}
