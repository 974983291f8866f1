//! s-antihermitian pairings h_τ: M_τ × M_τ̄ → O_m, h_τ(x, y) = xᵀ H_τ s(y),
//! where s is π ↦ -π in case AR and the identity otherwise. The generator
//! (eπ^{e-1})⁻¹ of the inverse different is absorbed into H, so the trace
//! form is read off the π^{e-1} coefficient.

use crate::linalg::{chain_inverse, frob, mul, neg, rank, Matrix};
use crate::rings::{RamifiedElem, RamifiedRing, Ring, WittTruncElem};
use crate::Case;

use super::Crystal;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HermitianPairing {
    grams: Vec<Matrix<RamifiedElem>>,
    conj: bool,
}

impl HermitianPairing {
    /// Gram matrices H_τ, one per embedding.
    pub fn new(case: Case, grams: Vec<Matrix<RamifiedElem>>) -> Self {
        HermitianPairing {
            grams,
            conj: case == Case::AR,
        }
    }
    pub fn grams(&self) -> &[Matrix<RamifiedElem>] {
        &self.grams
    }
    pub fn gram(&self, tau: usize) -> &Matrix<RamifiedElem> {
        &self.grams[tau % self.grams.len()]
    }
    /// Whether s is π ↦ -π.
    pub fn conjugates(&self) -> bool {
        self.conj
    }

    /// h_τ(x, y) for x ∈ M_τ, y ∈ M_τ̄.
    pub fn eval(
        &self,
        r: &RamifiedRing,
        tau: usize,
        x: &[RamifiedElem],
        y: &[RamifiedElem],
    ) -> RamifiedElem {
        let g = self.gram(tau);
        let mut acc = r.zero();
        for (a, xa) in x.iter().enumerate() {
            for (b, yb) in y.iter().enumerate() {
                let yb = if self.conj { r.conj(yb) } else { yb.clone() };
                acc = r.add(&acc, &r.mul(&r.mul(xa, &g[(a, b)]), &yb));
            }
        }
        acc
    }
}

/// τ̄: τ + f/2 in case AU, τ itself in cases C and AR (and AL, unpaired).
pub fn partner(case: Case, f: usize, tau: usize) -> usize {
    match case {
        Case::AU => (tau + f / 2) % f,
        _ => tau % f,
    }
}

pub fn conj_mat(r: &RamifiedRing, a: &Matrix<RamifiedElem>, conj: bool) -> Matrix<RamifiedElem> {
    if conj {
        a.map(|x| r.conj(x))
    } else {
        a.clone()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct HermitianReport {
    pub shape: bool,
    pub antihermitian: bool,
    pub alternating: bool,
    pub perfect: bool,
    pub adjunction: bool,
    /// Present when a trace form was supplied.
    pub trace: Option<bool>,
}

impl HermitianReport {
    pub fn is_valid(&self) -> bool {
        self.first_failure().is_none()
    }

    pub fn first_failure(&self) -> Option<&'static str> {
        if !self.shape {
            Some("Gram matrices do not match (f, h)")
        } else if !self.antihermitian {
            Some("H_τ ≠ -s(H_τ̄)ᵀ")
        } else if !self.alternating {
            Some("case C pairing is not alternating")
        } else if !self.perfect {
            Some("pairing is not perfect")
        } else if !self.adjunction {
            Some("h(x, Fy) ≠ h(Vx, y)^σ")
        } else if self.trace == Some(false) {
            Some("trace identity fails")
        } else {
            None
        }
    }
}

/// All pairing clauses at the precision of the ring. Adjunction for
/// x ∈ M_{τ̄+1}, y ∈ M_τ unfolds to H_{τ+1} s(A_τ̄) = σ(B_τ)ᵀ σ(H_τ).
pub fn hermitian_report(
    r: &RamifiedRing,
    case: Case,
    f_mats: &[Matrix<RamifiedElem>],
    v_mats: &[Matrix<RamifiedElem>],
    hp: &HermitianPairing,
    trace: Option<&[Matrix<WittTruncElem>]>,
) -> HermitianReport {
    let f = f_mats.len();
    let h = f_mats.first().map_or(0, |a| a.rows);
    let shape = hp.grams.len() == f && hp.grams.iter().all(|g| g.rows == h && g.cols == h);
    if !shape {
        return HermitianReport {
            shape,
            antihermitian: false,
            alternating: false,
            perfect: false,
            adjunction: false,
            trace: trace.map(|_| false),
        };
    }
    let c = hp.conj;
    let g = &hp.grams;
    let bar = |t: usize| partner(case, f, t);
    let antihermitian = (0..f).all(|t| g[t] == neg(r, &conj_mat(r, &g[bar(t)], c).transpose()));
    let alternating = case != Case::C || g.iter().all(|m| (0..h).all(|i| r.is_zero(&m[(i, i)])));
    let perfect = g.iter().all(|m| chain_inverse(r, m).is_some());
    let adjunction = (0..f).all(|t| {
        let lhs = mul(r, &g[(t + 1) % f], &conj_mat(r, &f_mats[bar(t)], c));
        let rhs = mul(r, &frob(r, &v_mats[t]).transpose(), &frob(r, &g[t]));
        lhs == rhs
    });
    let trace = trace.map(|ts| ts.len() == f && (0..f).all(|t| trace_form(r, c, &g[t]) == ts[t]));
    HermitianReport {
        shape,
        antihermitian,
        alternating,
        perfect,
        adjunction,
        trace,
    }
}

/// True iff the crystal is polarized and every pairing clause holds, the trace
/// identity included when a trace form is supplied.
pub fn validate_hermitian(
    c: &Crystal,
    h: &HermitianPairing,
    trace: Option<&[Matrix<WittTruncElem>]>,
) -> bool {
    c.is_polarized()
        && hermitian_report(
            c.ring(),
            c.case(),
            c.frobenius_mats(),
            c.verschiebung_mats(),
            h,
            trace,
        )
        .is_valid()
}

/// The W_m(k)-valued form <π^i ε_a, π^j ε_b> = tr h(π^i ε_a, π^j ε_b) on the
/// W-basis indexed by i·h + a.
pub fn trace_form(r: &RamifiedRing, conj: bool, g: &Matrix<RamifiedElem>) -> Matrix<WittTruncElem> {
    let (e, h) = (r.e(), g.rows);
    let spi = if conj { r.neg(&r.pi()) } else { r.pi() };
    let left: Vec<RamifiedElem> = (0..e).map(|i| r.pi_pow(i as u32)).collect();
    let right: Vec<RamifiedElem> = (0..e).map(|j| r.pow(&spi, j as u64)).collect();
    Matrix::from_fn(e * h, e * h, |row, col| {
        let (i, a) = (row / h, row % h);
        let (j, b) = (col / h, col % h);
        r.residue_trace(&r.mul(&r.mul(&left[i], &g[(a, b)]), &right[j]))
    })
}

/// The unique Gram matrix with the given trace form: the π^l coefficient of
/// H_ab is <π^{e-1-l} ε_a, ε_b>.
pub fn pairing_from_trace(
    r: &RamifiedRing,
    t: &Matrix<WittTruncElem>,
    h: usize,
) -> Matrix<RamifiedElem> {
    let e = r.e();
    Matrix::from_fn(h, h, |a, b| {
        let coeffs: Vec<WittTruncElem> = (0..e)
            .map(|l| t[((e - 1 - l) * h + a, b)].clone())
            .collect();
        r.from_coeffs(&coeffs)
    })
}

/// Injectivity of H ↦ trace form on h×h Gram matrices: the W-linear map has
/// full column rank modulo p.
pub fn trace_map_injective(r: &RamifiedRing, conj: bool, h: usize) -> bool {
    let e = r.e();
    let w = r.witt();
    let mut cols = Vec::with_capacity(h * h * e);
    for a in 0..h {
        for b in 0..h {
            for l in 0..e {
                let mut g = Matrix::filled(h, h, r.zero());
                g[(a, b)] = r.pi_pow(l as u32);
                let t = trace_form(r, conj, &g);
                cols.push(t.data.iter().map(|x| w.residue(x)).collect::<Vec<u32>>());
            }
        }
    }
    let n = (e * h) * (e * h);
    rank(r.residue_field(), &Matrix::from_cols(&cols, n)) == h * h * e
}
