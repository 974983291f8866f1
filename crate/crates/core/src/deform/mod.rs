//! Display deformations of crystals over k[[t]]: the twisted family
//! F_N = (1 + [t]N)F for a square-zero, skew, O-linear N, its reduction and
//! specializations, the case-specific constructions of N that break
//! nilpotence of F mod π, and a driver walking a crystal towards
//! μ-ordinariness.
//!
//! [t] is modeled by t itself, with σ(t) = t^p. The generic fiber over
//! k((t))^perf is reached through specializations t ↦ [c], c ∈ k: each one
//! has Newton polygon on or above the generic one, so the lowest of them is an
//! upper bound, certified exact when it meets the Hodge polygon.

mod construct;
mod defseq;
mod driver;
mod family;
mod residue;

pub use construct::{build_n_al, build_n_au, build_n_c, AlStage, AuStage, Construction};
pub use defseq::{find_defseq, validate_defseq, DeformationSequence, DefseqAbsence, DefseqReport};
pub use driver::{densify, DeformStep, DensifyOptions, DensifyReport, StepJson, TraceJson};
pub use family::{deform, CrystalFamily, GenericNewton};
pub use residue::{Nilpotence, ResidueFamily};

use thiserror::Error;

use crate::crystals::{Crystal, CrystalError};
use crate::linalg::{add, is_zero, mul, zeros, Matrix};
use crate::rings::{RamifiedElem, RingError};
use crate::Case;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DeformError {
    #[error("invalid deformation operator: {0}")]
    InvalidOp(&'static str),
    #[error("invalid stage data: {0}")]
    StageDataInvalid(String),
    #[error("case {0} is not supported")]
    UnsupportedCase(Case),
    #[error("the crystal is not in the Rapoport locus of the signature")]
    NotRapoport,
    #[error("bad family parameters: {0}")]
    Parameters(String),
    #[error("no candidate deformation lowers the Newton polygon after {} steps", .trace.len())]
    Stalled { trace: Vec<DeformStep> },
    #[error("budget of {budget} steps exhausted")]
    BudgetExhausted {
        budget: usize,
        trace: Vec<DeformStep>,
    },
    #[error(transparent)]
    Crystal(#[from] CrystalError),
    #[error(transparent)]
    Ring(#[from] RingError),
}

/// Per-embedding endomorphisms N_τ of M_τ over O_m.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DeformationOp {
    case: Case,
    n: Vec<Matrix<RamifiedElem>>,
}

impl DeformationOp {
    pub fn new(case: Case, n: Vec<Matrix<RamifiedElem>>) -> Self {
        DeformationOp { case, n }
    }

    pub fn zero(c: &Crystal) -> Self {
        let r = c.ring();
        DeformationOp::new(c.case(), vec![zeros(r, c.h(), c.h()); c.f()])
    }

    pub fn case(&self) -> Case {
        self.case
    }
    /// N_τ acting on M_τ.
    pub fn n(&self, tau: usize) -> &Matrix<RamifiedElem> {
        &self.n[tau % self.n.len()]
    }
    pub fn mats(&self) -> &[Matrix<RamifiedElem>] {
        &self.n
    }
    pub fn is_zero(&self, c: &Crystal) -> bool {
        self.n.iter().all(|m| is_zero(c.ring(), m))
    }
}

/// The three conditions on N. Skewness is `None` in case AL, where it is not
/// required; O-linearity holds by construction since N_τ is an O-matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NReport {
    pub shape: bool,
    pub square_zero: bool,
    pub skew: Option<bool>,
    pub o_linear: bool,
}

impl NReport {
    pub fn is_valid(&self) -> bool {
        self.first_failure().is_none()
    }

    pub fn first_failure(&self) -> Option<&'static str> {
        if !self.shape {
            Some("shape")
        } else if !self.square_zero {
            Some("N² ≠ 0")
        } else if self.skew == Some(false) {
            Some("N is not skew for the pairing")
        } else if !self.o_linear {
            Some("N is not O-linear")
        } else {
            None
        }
    }
}

/// Checks N² = 0 and, with a pairing, N_ρᵀ H_ρ + H_ρ s(N_ρ̄) = 0 for every ρ,
/// which is h(Nx, y) + h(x, Ny) = 0.
pub fn validate_n(c: &Crystal, op: &DeformationOp) -> NReport {
    let r = c.ring();
    let (f, h) = (c.f(), c.h());
    let shape =
        op.case == c.case() && op.n.len() == f && op.n.iter().all(|m| m.rows == h && m.cols == h);
    if !shape {
        return NReport {
            shape,
            square_zero: false,
            skew: None,
            o_linear: false,
        };
    }
    let square_zero = op.n.iter().all(|m| is_zero(r, &mul(r, m, m)));
    let skew = c.pairing().map(|hp| {
        (0..f).all(|rho| {
            let g = hp.gram(rho);
            let nb = crate::crystals::conj_mat(r, op.n(c.bar(rho)), hp.conjugates());
            is_zero(
                r,
                &add(r, &mul(r, &op.n(rho).transpose(), g), &mul(r, g, &nb)),
            )
        })
    });
    NReport {
        shape,
        square_zero,
        skew,
        o_linear: true,
    }
}
