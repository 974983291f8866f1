//! Crystals over O_m = W_m(k)[π]/(π^e - p) with k = F_{p^f}: per-embedding
//! σ-linear F and σ⁻¹-linear V, Newton and Hodge polygons, the special-fiber
//! bridge to filtration data, and ordinariness tests.
//!
//! M = ⊕_τ M_τ with M_τ free of rank h over O_m. F_τ(x) = A_τ σ(x) maps M_τ
//! to M_{τ+1} and V_τ(y) = B_τ σ⁻¹(y) maps M_{τ+1} back to M_τ, so FV = p on
//! M_{τ+1} reads A_τ σ(B_τ) = p and VF = p on M_τ reads B_τ σ⁻¹(A_τ) = p.

mod generate;
mod json;
mod nnp;
mod pairing;

pub use generate::{
    change_basis, diagonal_crystal, random_crystal, random_crystal_with_profiles,
    random_pr_filtration, random_unimodular, supersingular, supersingular_at,
};
pub(crate) use json::encode as encode_matrix;
pub use json::{CrystalJson, JsonMatrix};
pub use nnp::{normalize_nnp, NnpCrystal};
pub use pairing::conj_mat;
pub use pairing::{
    hermitian_report, pairing_from_trace, partner, trace_form, trace_map_injective,
    validate_hermitian, HermitianPairing, HermitianReport,
};

use num_rational::Rational64;
use thiserror::Error;

use crate::linalg::{
    chain_inverse, charpoly, col_basis, elementary_divisors, frob, frob_inv, identity, kernel, mul,
    pow, scale, smith, Matrix,
};
use crate::polygons::{
    hodge_from_profile, mean, polygon_from_slopes, pr_from_signature, Polygon, Signature,
    TorsionProfile,
};
use crate::prdata::{restrict_action, standard_pi, FilteredModule};
use crate::rings::{ChainRing, FiniteField, RamifiedElem, RamifiedRing, Ring};
use crate::Case;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CrystalError {
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("relation {relation} violated at τ = {tau}")]
    RelationViolated { tau: usize, relation: &'static str },
    #[error("pairing violated: {0}")]
    PairingViolated(String),
    #[error("precision m = {m} is below the minimum {needed}")]
    PrecisionTooLow { m: u32, needed: u32 },
    #[error("valuation not certified at precision m = {m}; retry with larger m")]
    PrecisionExhausted { m: u32 },
    #[error("{map}_{tau} is not divisible by its amplitude")]
    NotDivisible { tau: usize, map: &'static str },
}

/// Precision used when none is given.
pub fn default_precision(f: usize, h: usize) -> u32 {
    (f * h + 2) as u32
}

/// A validated crystal; only `make_crystal` and its wrappers build one.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Crystal {
    case: Case,
    ring: RamifiedRing,
    h: usize,
    f_mats: Vec<Matrix<RamifiedElem>>,
    v_mats: Vec<Matrix<RamifiedElem>>,
    pairing: Option<HermitianPairing>,
}

impl Crystal {
    pub fn case(&self) -> Case {
        self.case
    }
    pub fn ring(&self) -> &RamifiedRing {
        &self.ring
    }
    pub fn residue_field(&self) -> &FiniteField {
        self.ring.residue_field()
    }
    pub fn e(&self) -> usize {
        self.ring.e()
    }
    pub fn f(&self) -> usize {
        self.ring.f()
    }
    pub fn h(&self) -> usize {
        self.h
    }
    pub fn m(&self) -> u32 {
        self.ring.precision()
    }
    pub fn p(&self) -> u64 {
        self.ring.p()
    }
    /// A_τ, the matrix of F_τ: M_τ → M_{τ+1}.
    pub fn frobenius(&self, tau: usize) -> &Matrix<RamifiedElem> {
        &self.f_mats[tau % self.f()]
    }
    /// B_τ, the matrix of V_τ: M_{τ+1} → M_τ.
    pub fn verschiebung(&self, tau: usize) -> &Matrix<RamifiedElem> {
        &self.v_mats[tau % self.f()]
    }
    pub fn frobenius_mats(&self) -> &[Matrix<RamifiedElem>] {
        &self.f_mats
    }
    pub fn verschiebung_mats(&self) -> &[Matrix<RamifiedElem>] {
        &self.v_mats
    }
    pub fn pairing(&self) -> Option<&HermitianPairing> {
        self.pairing.as_ref()
    }
    /// The embedding paired with τ.
    pub fn bar(&self, tau: usize) -> usize {
        partner(self.case, self.f(), tau)
    }
    pub fn is_polarized(&self) -> bool {
        self.case != Case::AL
    }

    /// The same crystal with F, V and the pairing reduced to a lower precision.
    pub fn at_precision(&self, m: u32) -> Result<Crystal, CrystalError> {
        if m > self.m() {
            return Err(CrystalError::Shape(format!(
                "cannot raise precision {} to {m}",
                self.m()
            )));
        }
        let r = self
            .ring
            .at_precision(m)
            .map_err(|e| CrystalError::Shape(e.to_string()))?;
        let conv = |x: &Matrix<RamifiedElem>| x.map(|a| r.convert_from(&self.ring, a));
        let pairing = self
            .pairing
            .as_ref()
            .map(|h| HermitianPairing::new(self.case, h.grams().iter().map(conv).collect()));
        make_crystal(
            r.clone(),
            self.case,
            self.f_mats.iter().map(conv).collect(),
            self.v_mats.iter().map(conv).collect(),
            pairing,
        )
    }
}

pub(crate) fn p_identity(r: &RamifiedRing, h: usize) -> Matrix<RamifiedElem> {
    scale(r, &r.from_int(r.p() as i64), &identity(r, h))
}

fn check_shapes(
    r: &RamifiedRing,
    case: Case,
    f_mats: &[Matrix<RamifiedElem>],
    v_mats: &[Matrix<RamifiedElem>],
) -> Result<usize, CrystalError> {
    let f = r.f();
    if r.precision() < 2 {
        return Err(CrystalError::PrecisionTooLow {
            m: r.precision(),
            needed: 2,
        });
    }
    if f_mats.len() != f || v_mats.len() != f {
        return Err(CrystalError::Shape(format!(
            "expected {f} matrices of F and of V, found {} and {}",
            f_mats.len(),
            v_mats.len()
        )));
    }
    let h = f_mats[0].rows;
    if h == 0
        || f_mats
            .iter()
            .chain(v_mats)
            .any(|a| a.rows != h || a.cols != h)
    {
        return Err(CrystalError::Shape(
            "all F_τ, V_τ must be square of one positive size h".into(),
        ));
    }
    if case == Case::AU && f % 2 != 0 {
        return Err(CrystalError::Shape("case AU needs even f".into()));
    }
    Ok(h)
}

/// Checks shapes, precision, FV = VF = p per embedding and, when present, the
/// pairing at precision m.
pub fn make_crystal(
    ring: RamifiedRing,
    case: Case,
    f_mats: Vec<Matrix<RamifiedElem>>,
    v_mats: Vec<Matrix<RamifiedElem>>,
    pairing: Option<HermitianPairing>,
) -> Result<Crystal, CrystalError> {
    let h = check_shapes(&ring, case, &f_mats, &v_mats)?;
    let p = p_identity(&ring, h);
    for tau in 0..ring.f() {
        let (a, b) = (&f_mats[tau], &v_mats[tau]);
        if mul(&ring, a, &frob(&ring, b)) != p {
            return Err(CrystalError::RelationViolated {
                tau,
                relation: "FV = p",
            });
        }
        if mul(&ring, b, &frob_inv(&ring, a)) != p {
            return Err(CrystalError::RelationViolated {
                tau,
                relation: "VF = p",
            });
        }
    }
    if let Some(hp) = &pairing {
        if case == Case::AL {
            return Err(CrystalError::PairingViolated(
                "case AL carries no pairing".into(),
            ));
        }
        let report = hermitian_report(&ring, case, &f_mats, &v_mats, hp, None);
        if let Some(why) = report.first_failure() {
            return Err(CrystalError::PairingViolated(why.into()));
        }
    }
    Ok(Crystal {
        case,
        ring,
        h,
        f_mats,
        v_mats,
        pairing,
    })
}

/// p·A⁻¹ for A with all elementary divisors dividing p, via Smith form.
pub(crate) fn p_over(
    r: &RamifiedRing,
    a: &Matrix<RamifiedElem>,
    tau: usize,
) -> Result<Matrix<RamifiedElem>, CrystalError> {
    let s = smith(r, a);
    let e = r.e() as u32;
    let n = a.rows;
    if s.diag.len() != n {
        return Err(CrystalError::RelationViolated {
            tau,
            relation: "F injective",
        });
    }
    let mut d = Vec::with_capacity(n);
    for x in &s.diag {
        let c = r.val(x).expect("Smith pivots are nonzero");
        if c > e {
            return Err(CrystalError::RelationViolated {
                tau,
                relation: "p/F integral",
            });
        }
        d.push(r.mul(&r.pi_pow(e - c), &r.inv_unit(&r.unit_part(x))));
    }
    // U A W = D, so p A⁻¹ = W (p D⁻¹) U.
    Ok(mul(r, &mul(r, &s.v, &crate::linalg::diag(r, &d)), &s.u))
}

/// The crystal with the given F and V determined by σ(B_τ) = p A_τ⁻¹. At
/// finite precision p A⁻¹ is fixed only up to torsion; with a pairing, the
/// adjunction σ(B_τ)ᵀ = H_{τ+1} s(A_τ̄) σ(H_τ)⁻¹ pins the choice.
pub fn from_frobenius(
    ring: RamifiedRing,
    case: Case,
    f_mats: Vec<Matrix<RamifiedElem>>,
    pairing: Option<HermitianPairing>,
) -> Result<Crystal, CrystalError> {
    let f = f_mats.len();
    let mut v_mats = Vec::with_capacity(f);
    match &pairing {
        Some(hp) if case != Case::AL && hp.grams().len() == f && f == ring.f() => {
            for tau in 0..f {
                let hs = chain_inverse(&ring, &frob(&ring, hp.gram(tau))).ok_or_else(|| {
                    CrystalError::PairingViolated("pairing is not perfect".into())
                })?;
                let a_bar = conj_mat(&ring, &f_mats[partner(case, f, tau)], hp.conjugates());
                let sb = mul(&ring, &mul(&ring, hp.gram(tau + 1), &a_bar), &hs).transpose();
                v_mats.push(frob_inv(&ring, &sb));
            }
            // V is read off the pairing, so report a bad pairing before relations
            let report = hermitian_report(&ring, case, &f_mats, &v_mats, hp, None);
            if let Some(why) = report.first_failure() {
                return Err(CrystalError::PairingViolated(why.into()));
            }
        }
        _ => {
            for (tau, a) in f_mats.iter().enumerate() {
                v_mats.push(frob_inv(&ring, &p_over(&ring, a, tau)?));
            }
        }
    }
    make_crystal(ring, case, f_mats, v_mats, pairing)
}

/// The linear map F^f = A_{f-1} σ(A_{f-2}) ⋯ σ^{f-1}(A_0) on M_0.
pub fn linearized_frobenius(
    r: &RamifiedRing,
    f_mats: &[Matrix<RamifiedElem>],
) -> Matrix<RamifiedElem> {
    let mut phi = f_mats[0].clone();
    for a in &f_mats[1..] {
        phi = mul(r, a, &frob(r, &phi));
    }
    phi
}

/// Newton polygon of an h×h matrix over O_m, with slopes divided by `f`:
/// the lower hull of (i, v(a_i)) for the characteristic polynomial Σ a_i X^i.
/// Coefficients vanishing at precision m lie above the hull as long as the
/// constant term survives.
pub fn newton_of_matrix(
    r: &RamifiedRing,
    phi: &Matrix<RamifiedElem>,
    f: usize,
) -> Result<Polygon, CrystalError> {
    let cp = charpoly(r, phi);
    let h = phi.rows;
    let vals: Vec<Option<u32>> = cp.iter().map(|a| r.val(a)).collect();
    if vals[0].is_none() {
        return Err(CrystalError::PrecisionExhausted { m: r.precision() });
    }
    let pts: Vec<(i64, i64)> = vals
        .iter()
        .enumerate()
        .filter_map(|(i, v)| v.map(|v| (i as i64, v as i64)))
        .collect();
    // Lower hull from (0, v(a_0)) to (h, 0), left to right.
    let mut hull: Vec<(i64, i64)> = Vec::new();
    for &p in &pts {
        while hull.len() >= 2 {
            let (a, b) = (hull[hull.len() - 2], hull[hull.len() - 1]);
            // drop b when it lies on or above the segment a–p
            if (b.1 - a.1) * (p.0 - a.0) >= (p.1 - a.1) * (b.0 - a.0) {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(p);
    }
    debug_assert_eq!(hull.last().map(|p| p.0), Some(h as i64));
    let ef = (r.e() * f) as i64;
    let slopes: Vec<(Rational64, Rational64)> = hull
        .windows(2)
        .map(|w| {
            let len = w[1].0 - w[0].0;
            (
                Rational64::new(w[0].1 - w[1].1, len * ef),
                Rational64::from_integer(len),
            )
        })
        .collect();
    polygon_from_slopes(&slopes, r.e() as i64).map_err(|e| CrystalError::Shape(e.to_string()))
}

pub fn newton_polygon(c: &Crystal) -> Result<Polygon, CrystalError> {
    newton_of_matrix(&c.ring, &linearized_frobenius(&c.ring, &c.f_mats), c.f())
}

/// Exponents of M_τ / F M_{τ-1}: the elementary divisors of A_{τ-1}.
pub fn hodge_profile(c: &Crystal, tau: usize) -> TorsionProfile {
    let f = c.f();
    let a = &c.f_mats[(tau + f - 1) % f];
    TorsionProfile::new(elementary_divisors(&c.ring, a))
}

pub fn hodge_tau(c: &Crystal, tau: usize) -> Polygon {
    hodge_from_profile(&hodge_profile(c, tau), c.e() as i64)
}

/// Mean of the τ-Hodge polygons.
pub fn hodge_polygon(c: &Crystal) -> Polygon {
    let ps: Vec<Polygon> = (0..c.f()).map(|t| hodge_tau(c, t)).collect();
    mean(&ps).expect("τ-Hodge polygons share their width")
}

/// Coordinates of x ∈ M_τ / p in k^{eh}: index i·h + a holds the π^i
/// coefficient of x_a.
pub fn mod_p_vector(r: &RamifiedRing, x: &[RamifiedElem]) -> Vec<u32> {
    let (e, h) = (r.e(), x.len());
    let mut v = vec![0; e * h];
    for (a, xa) in x.iter().enumerate() {
        for (i, c) in r.mod_p(xa).into_iter().enumerate() {
            v[i * h + a] = c;
        }
    }
    v
}

/// ω_τ = F M_{τ-1} / p M_τ as a k-subspace of k^{eh}, π acting by
/// `standard_pi`.
pub fn omega(c: &Crystal, tau: usize) -> Matrix<u32> {
    let r = &c.ring;
    let (e, h, f) = (c.e(), c.h, c.f());
    let a = &c.f_mats[(tau + f - 1) % f];
    let pi = r.pi();
    let mut cols = Vec::with_capacity(e * h);
    for j in 0..h {
        let mut col = a.col(j);
        for _ in 0..e {
            cols.push(mod_p_vector(r, &col));
            col = col.iter().map(|x| r.mul(&pi, x)).collect();
        }
    }
    col_basis(c.residue_field(), &Matrix::from_cols(&cols, e * h))
}

/// The filtration ω_τ[π] ⊆ … ⊆ ω_τ[π^e] = ω_τ, a Rapoport point whose
/// signature is read off the kernel jumps.
pub fn kernel_filtration(c: &Crystal, tau: usize) -> FilteredModule<u32> {
    let k = c.residue_field();
    let (e, h) = (c.e(), c.h);
    let w = omega(c, tau);
    let pi = standard_pi(k, e, h);
    let x = restrict_action(k, &pi, &w).expect("ω is π-stable");
    let mut steps = Vec::with_capacity(e);
    let mut d = Vec::with_capacity(e);
    let mut prev = 0;
    for j in 1..=e {
        let step = mul(k, &w, &kernel(k, &pow(k, &x, j as u32)));
        d.push((step.cols - prev) as u32);
        prev = step.cols;
        steps.push(step);
    }
    FilteredModule::special(k, e, h, steps, d)
}

/// Signature of the kernel filtrations; its PR polygon is the Hodge polygon.
pub fn canonical_signature(c: &Crystal) -> Signature {
    let d = (0..c.f()).map(|t| kernel_filtration(c, t).d).collect();
    Signature::new(c.f(), c.e(), c.h as u32, d).expect("kernel jumps are at most h")
}

/// Signature of one PR filtration per embedding.
pub fn signature_of(
    c: &Crystal,
    filtrations: &[FilteredModule<u32>],
) -> Result<Signature, CrystalError> {
    if filtrations.len() != c.f() {
        return Err(CrystalError::Shape(format!(
            "expected {} filtrations",
            c.f()
        )));
    }
    let d = filtrations.iter().map(|m| m.d.clone()).collect();
    Signature::new(c.f(), c.e(), c.h as u32, d).map_err(|e| CrystalError::Shape(e.to_string()))
}

fn check_signature(c: &Crystal, sig: &Signature) -> Result<(), CrystalError> {
    if sig.f != c.f() || sig.e != c.e() || sig.h as usize != c.h {
        return Err(CrystalError::Shape(format!(
            "signature has (f, e, h) = ({}, {}, {}), crystal has ({}, {}, {})",
            sig.f,
            sig.e,
            sig.h,
            c.f(),
            c.e(),
            c.h
        )));
    }
    Ok(())
}

/// Newton polygon equals the PR polygon of the signature.
pub fn is_mu_ordinary(c: &Crystal, sig: &Signature) -> Result<bool, CrystalError> {
    check_signature(c, sig)?;
    Ok(newton_polygon(c)? == pr_from_signature(sig))
}

/// The ordinary locus is non-empty exactly for constant signatures.
pub fn ordinary_possible(sig: &Signature) -> bool {
    sig.is_constant()
}

/// Newton slopes grouped as 0, strictly between 0 and 1, and 1.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SlopeSplit {
    pub etale: Vec<(Rational64, Rational64)>,
    pub bi_infinitesimal: Vec<(Rational64, Rational64)>,
    pub multiplicative: Vec<(Rational64, Rational64)>,
}

impl SlopeSplit {
    pub fn from_polygon(p: &Polygon) -> Self {
        let (zero, one) = (Rational64::from_integer(0), Rational64::from_integer(1));
        let pick = |keep: &dyn Fn(Rational64) -> bool| {
            p.slopes()
                .iter()
                .copied()
                .filter(|(s, _)| keep(*s))
                .collect()
        };
        SlopeSplit {
            etale: pick(&|s| s == zero),
            bi_infinitesimal: pick(&|s| s > zero && s < one),
            multiplicative: pick(&|s| s == one),
        }
    }

    /// Total multiplicities of the three classes.
    pub fn multiplicities(&self) -> (Rational64, Rational64, Rational64) {
        let sum = |v: &[(Rational64, Rational64)]| v.iter().map(|(_, m)| *m).sum();
        (
            sum(&self.etale),
            sum(&self.bi_infinitesimal),
            sum(&self.multiplicative),
        )
    }

    pub fn is_bi_infinitesimal(&self) -> bool {
        self.etale.is_empty() && self.multiplicative.is_empty()
    }
}

pub fn slope_split(c: &Crystal) -> Result<SlopeSplit, CrystalError> {
    Ok(SlopeSplit::from_polygon(&newton_polygon(c)?))
}
