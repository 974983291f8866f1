//! JSON form of a crystal. An element of O_m is a list of e blocks (the
//! coefficients of π^0, …, π^{e-1}), each a list of f signed integers: the
//! coordinates of a Witt vector in the basis 1, x, …, x^{f-1} of
//! (Z/p^m)[x]/(P), P the lift of the residue-field modulus.

use serde::{Deserialize, Serialize};

use crate::linalg::Matrix;
use crate::rings::{RamifiedElem, RamifiedRing};
use crate::Case;

use super::{make_crystal, Crystal, CrystalError, HermitianPairing};

pub type JsonMatrix = Vec<Vec<Vec<Vec<i64>>>>;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CrystalJson {
    pub version: u32,
    pub case: Case,
    pub p: u32,
    pub f: usize,
    pub e: usize,
    pub m: u32,
    pub h: usize,
    /// A_τ for τ = 0, …, f-1, row-major.
    pub frobenius: Vec<JsonMatrix>,
    /// B_τ for τ = 0, …, f-1, row-major.
    pub verschiebung: Vec<JsonMatrix>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pairing: Option<Vec<JsonMatrix>>,
}

pub(crate) fn encode(r: &RamifiedRing, a: &Matrix<RamifiedElem>) -> JsonMatrix {
    a.to_rows()
        .iter()
        .map(|row| row.iter().map(|x| r.to_signed(x)).collect())
        .collect()
}

fn decode(
    r: &RamifiedRing,
    a: &JsonMatrix,
    h: usize,
) -> Result<Matrix<RamifiedElem>, CrystalError> {
    let (e, f) = (r.e(), r.f());
    let ok = a.len() == h
        && a.iter().all(|row| {
            row.len() == h
                && row
                    .iter()
                    .all(|x| x.len() == e && x.iter().all(|b| b.len() == f))
        });
    if !ok {
        return Err(CrystalError::Shape(format!(
            "matrix is not {h}×{h} with {e} blocks of {f} coordinates"
        )));
    }
    Ok(Matrix::from_rows(
        a.iter()
            .map(|row| row.iter().map(|x| r.from_signed(x)).collect())
            .collect(),
    ))
}

impl CrystalJson {
    pub fn from_crystal(c: &Crystal) -> Self {
        let r = c.ring();
        CrystalJson {
            version: 1,
            case: c.case(),
            p: c.p() as u32,
            f: c.f(),
            e: c.e(),
            m: c.m(),
            h: c.h(),
            frobenius: c.frobenius_mats().iter().map(|a| encode(r, a)).collect(),
            verschiebung: c.verschiebung_mats().iter().map(|a| encode(r, a)).collect(),
            pairing: c
                .pairing()
                .map(|hp| hp.grams().iter().map(|g| encode(r, g)).collect()),
        }
    }

    /// Rebuilds and revalidates the crystal at the recorded precision.
    pub fn to_crystal(&self) -> Result<Crystal, CrystalError> {
        self.to_crystal_at(self.m)
    }

    /// Reads the integer entries at precision m, which may differ from the
    /// recorded one; validation is redone there.
    pub fn to_crystal_at(&self, m: u32) -> Result<Crystal, CrystalError> {
        if self.version != 1 {
            return Err(CrystalError::Shape(format!(
                "unsupported version {}",
                self.version
            )));
        }
        let r = RamifiedRing::with_params(self.p, self.f as u32, self.e, m)
            .map_err(|e| CrystalError::Shape(e.to_string()))?;
        let list = |v: &[JsonMatrix]| -> Result<Vec<Matrix<RamifiedElem>>, CrystalError> {
            if v.len() != self.f {
                return Err(CrystalError::Shape(format!("expected {} matrices", self.f)));
            }
            v.iter().map(|a| decode(&r, a, self.h)).collect()
        };
        let a = list(&self.frobenius)?;
        let b = list(&self.verschiebung)?;
        let pairing = match &self.pairing {
            None => None,
            Some(g) => Some(HermitianPairing::new(self.case, list(g)?)),
        };
        make_crystal(r, self.case, a, b, pairing)
    }
}
