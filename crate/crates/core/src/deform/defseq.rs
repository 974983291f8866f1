//! Deformation sequences: x_τ ∈ M̄_τ with F̄x_τ ≠ 0, and F̄x_τ = x_{τ+1}
//! whenever F̄²x_τ ≠ 0. F̄ is F⁰ modulo π.

use crate::crystals::{hodge_polygon, slope_split, Crystal};
use crate::polygons::{pr_from_signature, Signature};
use crate::Case;

use super::construct::{basis_vector, is_null, Reduced};
use super::DeformError;

/// Vectors in M̄_τ beyond which the search sticks to standard basis vectors.
const SEARCH_CAP: u64 = 4096;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DeformationSequence {
    /// x[τ] ∈ M̄_τ.
    pub x: Vec<Vec<u32>>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DefseqAbsence {
    NotBiInfinitesimal,
    /// Hodge polygon differs from the PR polygon of the constant signature h/2.
    NotRapoport,
    /// The search found nothing; the existence statement is not reproduced.
    NotFound,
}

/// The three clauses of the definition.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DefseqReport {
    pub shape: bool,
    pub f_nonzero: bool,
    pub chaining: bool,
}

impl DefseqReport {
    pub fn is_valid(&self) -> bool {
        self.shape && self.f_nonzero && self.chaining
    }
}

pub fn validate_defseq(
    c: &Crystal,
    seq: &DeformationSequence,
) -> Result<DefseqReport, DeformError> {
    let red = Reduced::new(c)?;
    Ok(check(&red, c.h(), &seq.x))
}

fn check(red: &Reduced, h: usize, x: &[Vec<u32>]) -> DefseqReport {
    let f = red.f();
    let shape = x.len() == f
        && x.iter()
            .all(|v| v.len() == h && v.iter().all(|&a| a < red.k.order()));
    if !shape {
        return DefseqReport {
            shape,
            f_nonzero: false,
            chaining: false,
        };
    }
    let f_nonzero = (0..f).all(|t| !is_null(&red.apply(t, &x[t])));
    let chaining = (0..f).all(|t| {
        let fx = red.apply(t, &x[t]);
        is_null(&red.apply(t + 1, &fx)) || fx == x[(t + 1) % f]
    });
    DefseqReport {
        shape: true,
        f_nonzero,
        chaining,
    }
}

/// Searches depth-first over candidate x_τ, forcing x_{τ+1} = F̄x_τ where
/// F̄²x_τ ≠ 0. Candidates are standard basis vectors, then all of M̄_τ when
/// q^h ≤ 4096.
pub fn find_defseq(c: &Crystal) -> Result<Result<DeformationSequence, DefseqAbsence>, DeformError> {
    if !matches!(c.case(), Case::C | Case::AU) {
        return Err(DeformError::UnsupportedCase(c.case()));
    }
    if !slope_split(c)?.is_bi_infinitesimal() {
        return Ok(Err(DefseqAbsence::NotBiInfinitesimal));
    }
    if c.case() == Case::C {
        let sig = Signature::constant(c.f(), c.e(), c.h() as u32, c.h() as u32 / 2)
            .map_err(|e| DeformError::Parameters(e.to_string()))?;
        if hodge_polygon(c) != pr_from_signature(&sig) {
            return Ok(Err(DefseqAbsence::NotRapoport));
        }
    }
    let red = Reduced::new(c)?;
    let h = c.h();
    let q = red.k.order() as u64;
    let mut pools: Vec<Vec<Vec<u32>>> = vec![(0..h).map(|j| basis_vector(h, j)).collect()];
    if (q as f64).powi(h as i32) <= SEARCH_CAP as f64 {
        pools.push(all_vectors(q as u32, h));
    }
    for pool in &pools {
        let mut x = Vec::with_capacity(c.f());
        if search(&red, pool, &mut x) {
            debug_assert!(check(&red, h, &x).is_valid());
            return Ok(Ok(DeformationSequence { x }));
        }
    }
    Ok(Err(DefseqAbsence::NotFound))
}

fn all_vectors(q: u32, h: usize) -> Vec<Vec<u32>> {
    let total = (q as u64).pow(h as u32);
    (1..total)
        .map(|mut n| {
            (0..h)
                .map(|_| {
                    let d = (n % q as u64) as u32;
                    n /= q as u64;
                    d
                })
                .collect()
        })
        .collect()
}

/// Extends the partial sequence x = (x_0, …, x_{τ-1}).
fn search(red: &Reduced, pool: &[Vec<u32>], x: &mut Vec<Vec<u32>>) -> bool {
    let f = red.f();
    let tau = x.len();
    if tau == f {
        return check_closing(red, x);
    }
    if tau > 0 {
        let fx = red.apply(tau - 1, &x[tau - 1]);
        if !is_null(&red.apply(tau, &fx)) {
            x.push(fx);
            if search(red, pool, x) {
                return true;
            }
            x.pop();
            return false;
        }
    }
    for v in pool {
        if is_null(&red.apply(tau, v)) {
            continue;
        }
        x.push(v.clone());
        if search(red, pool, x) {
            return true;
        }
        x.pop();
    }
    false
}

/// The last chaining clause, from x_{f-1} back to x_0.
fn check_closing(red: &Reduced, x: &[Vec<u32>]) -> bool {
    let f = red.f();
    let fx = red.apply(f - 1, &x[f - 1]);
    is_null(&red.apply(f, &fx)) || fx == x[0]
}
