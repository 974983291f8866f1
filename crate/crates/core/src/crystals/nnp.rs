//! Normalization F_τ = π^{a_τ} F⁰_τ removing the largest π-power dividing each
//! F_τ. Polarized cases set V_τ = π̄^{a_τ̄} V⁰_τ, so V⁰F⁰ = p π^{-a_τ} π̄^{-a_τ̄};
//! case AL sets V⁰_τ = π^{a_τ} V_τ and stays a crystal.

use num_rational::Rational64;

use crate::linalg::{frob, frob_inv, is_zero, mul, scale, sub, Matrix};
use crate::polygons::{hodge_from_profile, mean, Polygon, TorsionProfile};
use crate::rings::{ChainRing, RamifiedElem, RamifiedRing, Ring};
use crate::Case;

use super::pairing::conj_mat;
use super::{
    elementary_divisors, linearized_frobenius, make_crystal, newton_of_matrix, p_identity, Crystal,
    CrystalError,
};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NnpCrystal {
    source: Crystal,
    amplitude: Vec<u32>,
    f0: Vec<Matrix<RamifiedElem>>,
    v0: Vec<Matrix<RamifiedElem>>,
}

/// π^a, or (-π)^a when s conjugates.
fn bar_pi_pow(r: &RamifiedRing, a: u32, conj: bool) -> RamifiedElem {
    let x = r.pi_pow(a);
    if conj && a % 2 == 1 {
        r.neg(&x)
    } else {
        x
    }
}

fn divide(
    r: &RamifiedRing,
    m: &Matrix<RamifiedElem>,
    d: &RamifiedElem,
    tau: usize,
    map: &'static str,
) -> Result<Matrix<RamifiedElem>, CrystalError> {
    let q = m.map(|x| r.div(x, d));
    if q.data.iter().any(|x| x.is_none()) {
        return Err(CrystalError::NotDivisible { tau, map });
    }
    let q = q.map(|x| x.clone().expect("checked"));
    if scale(r, d, &q) != *m {
        return Err(CrystalError::NotDivisible { tau, map });
    }
    Ok(q)
}

/// Amplitude a_τ = min valuation of the entries of F_τ, the first exponent
/// of the Hodge profile of M_{τ+1} / F M_τ.
pub fn normalize_nnp(c: &Crystal) -> Result<NnpCrystal, CrystalError> {
    let r = c.ring();
    let f = c.f();
    let conj = c.case() == Case::AR;
    let amplitude: Vec<u32> = (0..f)
        .map(|t| {
            elementary_divisors(r, c.frobenius(t))
                .first()
                .copied()
                .unwrap_or(0)
        })
        .collect();
    let mut f0 = Vec::with_capacity(f);
    let mut v0 = Vec::with_capacity(f);
    for t in 0..f {
        f0.push(divide(r, c.frobenius(t), &r.pi_pow(amplitude[t]), t, "F")?);
        v0.push(if c.case() == Case::AL {
            scale(r, &r.pi_pow(amplitude[t]), c.verschiebung(t))
        } else {
            let ab = amplitude[c.bar(t)];
            divide(r, c.verschiebung(t), &bar_pi_pow(r, ab, conj), t, "V")?
        });
    }
    Ok(NnpCrystal {
        source: c.clone(),
        amplitude,
        f0,
        v0,
    })
}

impl NnpCrystal {
    pub fn source(&self) -> &Crystal {
        &self.source
    }
    pub fn amplitude(&self) -> &[u32] {
        &self.amplitude
    }
    pub fn f0(&self, tau: usize) -> &Matrix<RamifiedElem> {
        &self.f0[tau % self.f0.len()]
    }
    pub fn v0(&self, tau: usize) -> &Matrix<RamifiedElem> {
        &self.v0[tau % self.v0.len()]
    }
    pub fn f0_mats(&self) -> &[Matrix<RamifiedElem>] {
        &self.f0
    }
    pub fn v0_mats(&self) -> &[Matrix<RamifiedElem>] {
        &self.v0
    }

    /// The scalar λ_τ with V⁰_τ F⁰_τ = F⁰_τ V⁰_τ = p λ_τ⁻¹: π^{a_τ} π̄^{a_τ̄}
    /// in polarized cases and 1 in case AL.
    fn lambda(&self, tau: usize) -> RamifiedElem {
        let c = &self.source;
        let r = c.ring();
        if c.case() == Case::AL {
            return r.one();
        }
        let ab = self.amplitude[c.bar(tau)];
        r.mul(
            &r.pi_pow(self.amplitude[tau]),
            &bar_pi_pow(r, ab, c.case() == Case::AR),
        )
    }

    /// The relaxed relations λ_τ V⁰F⁰ = λ_τ F⁰V⁰ = p and, with a pairing, the
    /// adjunction for (F⁰, V⁰). F⁰ and V⁰ are fixed only up to π^a-torsion, so
    /// the adjunction is compared after multiplying by π^{a_τ̄}.
    pub fn relations_hold(&self) -> bool {
        let c = &self.source;
        let r = c.ring();
        let f = c.f();
        let p = p_identity(r, c.h());
        let rel = (0..f).all(|t| {
            let l = self.lambda(t);
            let fv = scale(r, &l, &mul(r, &self.f0[t], &frob(r, &self.v0[t])));
            let vf = scale(r, &l, &mul(r, &self.v0[t], &frob_inv(r, &self.f0[t])));
            fv == p && vf == p
        });
        let pairing = c.pairing().map_or(true, |hp| {
            (0..f).all(|t| {
                let tb = c.bar(t);
                let lhs = mul(
                    r,
                    hp.gram(t + 1),
                    &conj_mat(r, &self.f0[tb], hp.conjugates()),
                );
                let rhs = mul(r, &frob(r, &self.v0[t]).transpose(), &frob(r, hp.gram(t)));
                is_zero(
                    r,
                    &scale(r, &r.pi_pow(self.amplitude[tb]), &sub(r, &lhs, &rhs)),
                )
            })
        });
        rel && pairing
    }

    /// Profile of M_τ / F⁰ M_{τ-1}; its first exponent is zero.
    pub fn hodge_raw(&self, tau: usize) -> TorsionProfile {
        let f = self.f0.len();
        TorsionProfile::new(elementary_divisors(
            self.source.ring(),
            &self.f0[(tau + f - 1) % f],
        ))
    }

    /// The raw profile shifted back by a_{τ-1}: the Hodge profile of the source.
    pub fn hodge_adjusted(&self, tau: usize) -> TorsionProfile {
        let f = self.f0.len();
        let a = self.amplitude[(tau + f - 1) % f];
        TorsionProfile::new(self.hodge_raw(tau).0.iter().map(|c| c + a).collect())
    }

    fn mean_of(&self, g: impl Fn(usize) -> TorsionProfile) -> Polygon {
        let e = self.source.e() as i64;
        let ps: Vec<Polygon> = (0..self.f0.len())
            .map(|t| hodge_from_profile(&g(t), e))
            .collect();
        mean(&ps).expect("equal widths")
    }

    pub fn hodge_raw_polygon(&self) -> Polygon {
        self.mean_of(|t| self.hodge_raw(t))
    }

    pub fn hodge_adjusted_polygon(&self) -> Polygon {
        self.mean_of(|t| self.hodge_adjusted(t))
    }

    /// Newton polygon of F⁰; those of F are these slopes plus `newton_shift`.
    pub fn newton_polygon(&self) -> Result<Polygon, CrystalError> {
        let r = self.source.ring();
        newton_of_matrix(r, &linearized_frobenius(r, &self.f0), self.f0.len())
    }

    /// Σ_τ a_τ / (ef).
    pub fn newton_shift(&self) -> Rational64 {
        let s: u32 = self.amplitude.iter().sum();
        Rational64::new(s as i64, (self.source.e() * self.source.f()) as i64)
    }

    /// The crystal rebuilt from (F⁰, V⁰): F = π^a F⁰, V = π̄^{a_τ̄} V⁰. In
    /// case AL, V = π^{-a} V⁰ is fixed only up to π^a-torsion, and any choice
    /// satisfies FV = VF = p.
    pub fn denormalize(&self) -> Result<Crystal, CrystalError> {
        let c = &self.source;
        let r = c.ring();
        let conj = c.case() == Case::AR;
        let f: Vec<_> = (0..c.f())
            .map(|t| scale(r, &r.pi_pow(self.amplitude[t]), &self.f0[t]))
            .collect();
        let mut v = Vec::with_capacity(c.f());
        for t in 0..c.f() {
            v.push(if c.case() == Case::AL {
                let d = r.pi_pow(self.amplitude[t]);
                let q = self.v0[t].map(|x| r.div(x, &d));
                if q.data.iter().any(|x| x.is_none()) {
                    return Err(CrystalError::NotDivisible {
                        tau: t, map: "V⁰"
                    });
                }
                q.map(|x| x.clone().expect("checked"))
            } else {
                scale(
                    r,
                    &bar_pi_pow(r, self.amplitude[c.bar(t)], conj),
                    &self.v0[t],
                )
            });
        }
        make_crystal(r.clone(), c.case(), f, v, c.pairing().cloned())
    }

    /// In case AL the pair (F⁰, V⁰) is again a crystal.
    pub fn as_crystal(&self) -> Option<Crystal> {
        let c = &self.source;
        if c.case() != Case::AL {
            return None;
        }
        make_crystal(
            c.ring().clone(),
            Case::AL,
            self.f0.clone(),
            self.v0.clone(),
            None,
        )
        .ok()
    }
}
