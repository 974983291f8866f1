//! Exact arithmetic for Pappas-Rapoport filtrations: coefficient rings, polygons,
//! filtration data, lifting, crystals, display deformations and local-model charts.

pub mod crystals;
pub mod deform;
pub mod lifting;
pub mod linalg;
pub mod localmodels;
pub mod polygons;
pub mod prdata;
pub mod rings;

use serde::{Deserialize, Serialize};

/// Type of the extension at a place: split (AL), unramified unitary (AU),
/// symplectic (C), ramified unitary (AR).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Case {
    AL,
    AU,
    C,
    AR,
}

impl std::fmt::Display for Case {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Case::AL => "AL",
            Case::AU => "AU",
            Case::C => "C",
            Case::AR => "AR",
        };
        f.write_str(s)
    }
}

impl std::str::FromStr for Case {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_uppercase().as_str() {
            "AL" => Ok(Case::AL),
            "AU" => Ok(Case::AU),
            "C" => Ok(Case::C),
            "AR" => Ok(Case::AR),
            _ => Err(format!("unknown case {s}")),
        }
    }
}
