//! Walks a crystal towards μ-ordinariness: at each step pick the first
//! deformation whose generic Newton polygon lies strictly below the current
//! one and continue from the specialization realizing it.

use serde::{Deserialize, Serialize};

use crate::crystals::{
    conj_mat, encode_matrix, hodge_polygon, is_mu_ordinary, newton_polygon, slope_split, Crystal,
    JsonMatrix,
};
use crate::linalg::{chain_inverse, mul, neg, zeros, Matrix};
use crate::polygons::{dominates, pr_from_signature, Polygon, PolygonJson, Signature};
use crate::rings::{RamifiedElem, Ring};
use crate::Case;

use super::construct::{basis_vector, is_null, Reduced};
use super::{
    build_n_al, build_n_au, build_n_c, deform, find_defseq, validate_n, AlStage, AuStage,
    DeformError, DeformationOp,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DensifyOptions {
    /// Truncation t^T of the family base.
    pub trunc: u32,
    /// Denominator bound p^D on exponents of t.
    pub denom: u32,
}

impl Default for DensifyOptions {
    fn default() -> Self {
        DensifyOptions { trunc: 2, denom: 1 }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DeformStep {
    pub index: usize,
    pub op: DeformationOp,
    pub special: Polygon,
    /// Newton polygon of the chosen specialization, an upper bound for the
    /// generic one.
    pub generic: Polygon,
    /// `generic` equals the Hodge polygon, hence is the generic polygon.
    pub certified: bool,
    /// t ↦ [point] gives the next crystal.
    pub point: u32,
    /// The special fiber was bi-infinitesimal.
    pub bi_infinitesimal: bool,
    /// The next crystal is μ-ordinary.
    pub mu_ordinary: bool,
    /// Which construction produced N.
    pub source: String,
}

#[derive(Clone, Debug)]
pub struct DensifyReport {
    pub steps: Vec<DeformStep>,
    pub result: Crystal,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StepJson {
    pub step: usize,
    pub n: Vec<JsonMatrix>,
    pub special: PolygonJson,
    pub generic: PolygonJson,
    pub mu_ordinary: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceJson {
    pub version: u32,
    pub steps: Vec<StepJson>,
}

impl TraceJson {
    pub fn new(c: &Crystal, steps: &[DeformStep]) -> Self {
        let r = c.ring();
        let steps = steps
            .iter()
            .map(|s| StepJson {
                step: s.index,
                n: s.op.mats().iter().map(|m| encode_matrix(r, m)).collect(),
                special: s.special.to_json(),
                generic: s.generic.to_json(),
                mu_ordinary: s.mu_ordinary,
            })
            .collect();
        TraceJson { version: 1, steps }
    }
}

fn lower(special: &Polygon, candidate: &Polygon) -> bool {
    special != candidate && dominates(special, candidate).unwrap_or(false)
}

/// Deforms until the Newton polygon equals PR(sig). Needs Hodge = PR(sig)
/// and case ≠ AR; gives up after `budget` steps.
///
/// Each step takes, in order: a construction whose family has a strictly
/// lower Newton polygon; a construction that lengthens an F̄⁰-chain at some
/// specialization without raising the polygon; a fallback operator with a
/// strictly lower polygon.
pub fn densify(
    c: &Crystal,
    sig: &Signature,
    budget: usize,
    opts: DensifyOptions,
) -> Result<DensifyReport, DeformError> {
    if c.case() == Case::AR {
        return Err(DeformError::UnsupportedCase(Case::AR));
    }
    if hodge_polygon(c) != pr_from_signature(sig) {
        return Err(DeformError::NotRapoport);
    }
    let mut cur = c.clone();
    let mut steps: Vec<DeformStep> = Vec::new();
    while !is_mu_ordinary(&cur, sig)? {
        if steps.len() >= budget {
            return Err(DeformError::BudgetExhausted {
                budget,
                trace: steps,
            });
        }
        let special = newton_polygon(&cur)?;
        let bi_infinitesimal = slope_split(&cur)?.is_bi_infinitesimal();
        let Some(found) = next_step(&cur, &special, opts)? else {
            return Err(DeformError::Stalled { trace: steps });
        };
        let mu_ordinary = is_mu_ordinary(&found.crystal, sig)?;
        steps.push(DeformStep {
            index: steps.len() + 1,
            op: found.op,
            special,
            generic: found.newton,
            certified: found.certified,
            point: found.point,
            bi_infinitesimal,
            mu_ordinary,
            source: found.source,
        });
        cur = found.crystal;
    }
    Ok(DensifyReport { steps, result: cur })
}

struct Found {
    source: String,
    op: DeformationOp,
    newton: Polygon,
    certified: bool,
    point: u32,
    crystal: Crystal,
}

fn next_step(
    cur: &Crystal,
    special: &Polygon,
    opts: DensifyOptions,
) -> Result<Option<Found>, DeformError> {
    let built = constructions(cur)?;
    let lowering = |cands: &[Candidate]| -> Result<Option<Found>, DeformError> {
        for cand in cands {
            if !validate_n(cur, &cand.op).is_valid() || cand.op.is_zero(cur) {
                continue;
            }
            let fam = deform(cur, &cand.op, opts.trunc, opts.denom)?;
            let gn = fam.generic_newton()?;
            if lower(special, &gn.upper) {
                let crystal = fam.specialize(gn.point)?;
                let (source, op) = (cand.source.clone(), cand.op.clone());
                return Ok(Some(Found {
                    source,
                    op,
                    newton: gn.upper,
                    certified: gn.certified,
                    point: gn.point,
                    crystal,
                }));
            }
        }
        Ok(None)
    };
    if let Some(found) = lowering(&built)? {
        return Ok(Some(found));
    }
    for cand in &built {
        let Some((tau, x, n)) = &cand.chain else {
            continue;
        };
        let fam = deform(cur, &cand.op, opts.trunc, opts.denom)?;
        for point in cur.residue_field().elements() {
            let crystal = fam.specialize(point)?;
            let newton = newton_polygon(&crystal)?;
            if !dominates(special, &newton).unwrap_or(false) {
                continue;
            }
            if !is_null(&Reduced::new(&crystal)?.iterate(*tau, x, *n)) {
                let certified = newton == hodge_polygon(cur);
                let (source, op) = (cand.source.clone(), cand.op.clone());
                return Ok(Some(Found {
                    source,
                    op,
                    newton,
                    certified,
                    point,
                    crystal,
                }));
            }
        }
    }
    lowering(&fallbacks(cur)?)
}

struct Candidate {
    source: String,
    op: DeformationOp,
    /// (τ, x, n) with F̄⁰_N^n(x) ≢ 0 claimed.
    chain: Option<(usize, Vec<u32>, usize)>,
}

/// The case constructions on standard basis vectors whose claim holds.
fn constructions(c: &Crystal) -> Result<Vec<Candidate>, DeformError> {
    let mut out = Vec::new();
    let red = Reduced::new(c)?;
    let (f, h) = (c.f(), c.h());
    let keep = |out: &mut Vec<Candidate>,
                source: String,
                res: Result<super::Construction, DeformError>,
                chain| {
        if let Ok(con) = res {
            if con.holds {
                out.push(Candidate {
                    source,
                    op: con.op,
                    chain,
                });
            }
        }
    };
    match c.case() {
        Case::AL => {
            for tau in 0..f {
                for j in 0..h {
                    let x = basis_vector(h, j);
                    let first_zero = (1..=f * h + 1).find(|&n| is_null(&red.iterate(tau, &x, n)));
                    match first_zero {
                        Some(i) if (2..=f).contains(&i) => {
                            let stage = AlStage::Lengthen {
                                tau,
                                x: x.clone(),
                                i,
                            };
                            let name = format!("lengthen(τ={tau}, e_{j}, i={i})");
                            keep(&mut out, name, build_n_al(c, &stage), Some((tau, x, i)));
                        }
                        Some(n) if n > f => {
                            let r0 = n.div_ceil(f);
                            let stage = AlStage::Wrap {
                                tau,
                                x: x.clone(),
                                r0,
                            };
                            let name = format!("wrap(τ={tau}, e_{j}, r0={r0})");
                            keep(
                                &mut out,
                                name,
                                build_n_al(c, &stage),
                                Some((tau, x, r0 * f)),
                            );
                        }
                        _ => {}
                    }
                }
            }
        }
        Case::AU => {
            let d = f / 2;
            for tau in 0..f {
                for j in 0..h {
                    let x = basis_vector(h, j);
                    let last = (0..=f * h + 1)
                        .take_while(|&n| !is_null(&red.iterate(tau, &x, n)))
                        .last()
                        .unwrap_or(0);
                    if last == 0 {
                        continue;
                    }
                    if last < d {
                        let stage = AuStage::Extend {
                            tau,
                            x: x.clone(),
                            r: last,
                        };
                        let name = format!("extend(τ={tau}, e_{j}, r={last})");
                        keep(
                            &mut out,
                            name,
                            build_n_au(c, &stage),
                            Some((tau, x, last + 1)),
                        );
                        continue;
                    }
                    for jj in 0..h {
                        let stage = AuStage::Join {
                            tau,
                            x: x.clone(),
                            y: basis_vector(h, jj),
                        };
                        let name = format!("join(τ={tau}, e_{j}, e_{jj})");
                        keep(
                            &mut out,
                            name,
                            build_n_au(c, &stage),
                            Some((tau, x.clone(), f)),
                        );
                    }
                    let stage = AuStage::Close { tau, x: x.clone() };
                    keep(
                        &mut out,
                        format!("close(τ={tau}, e_{j})"),
                        build_n_au(c, &stage),
                        None,
                    );
                }
            }
        }
        Case::C => {
            if let Ok(seq) = find_defseq(c)? {
                keep(
                    &mut out,
                    "deformation sequence".into(),
                    build_n_c(c, &seq),
                    None,
                );
            }
        }
        Case::AR => return Err(DeformError::UnsupportedCase(Case::AR)),
    }
    Ok(out)
}

/// Products over τ of per-embedding choices beyond which only single
/// embeddings are tried.
const PRODUCT_CAP: usize = 512;

type Entries = Vec<(usize, Matrix<RamifiedElem>)>;

/// Elementary operators: E_ij in case AL, E_ij with its partner at τ < f/2
/// in case AU, y ↦ h(e_i, y) e_j + h(e_j, y) e_i in case C. Single
/// embeddings come first, then products over embeddings.
fn fallbacks(c: &Crystal) -> Result<Vec<Candidate>, DeformError> {
    let r = c.ring();
    let (f, h) = (c.f(), c.h());
    let unit = |i: usize, j: usize| {
        let mut m = zeros(r, h, h);
        m[(i, j)] = r.one();
        m
    };
    let mut slots: Vec<Vec<(String, Entries)>> = Vec::new();
    match c.case() {
        Case::AL => {
            for tau in 0..f {
                let mut slot = Vec::new();
                for i in 0..h {
                    for j in (0..h).filter(|&j| j != i) {
                        slot.push((format!("E_{i}{j}@{tau}"), vec![(tau, unit(i, j))]));
                    }
                }
                slots.push(slot);
            }
        }
        Case::AU => {
            let hp = c
                .pairing()
                .ok_or(DeformError::InvalidOp("a pairing is required"))?;
            for tau in 0..f / 2 {
                let g = hp.gram(tau);
                let gi =
                    chain_inverse(r, g).ok_or(DeformError::InvalidOp("pairing is not perfect"))?;
                let mut slot = Vec::new();
                for i in 0..h {
                    for j in (0..h).filter(|&j| j != i) {
                        let n = unit(i, j);
                        let m = neg(r, &mul(r, &mul(r, &gi, &n.transpose()), g));
                        let nb = conj_mat(r, &m, hp.conjugates());
                        slot.push((format!("E_{i}{j}@{tau}"), vec![(tau, n), (c.bar(tau), nb)]));
                    }
                }
                slots.push(slot);
            }
        }
        Case::C => {
            let hp = c
                .pairing()
                .ok_or(DeformError::InvalidOp("a pairing is required"))?;
            for tau in 0..f {
                let g = hp.gram(tau);
                let mut slot = Vec::new();
                for i in 0..h {
                    for j in i..h {
                        let n = Matrix::from_fn(h, h, |a, b| {
                            let mut v = r.zero();
                            if a == j {
                                v = r.add(&v, &g[(i, b)]);
                            }
                            if a == i && i != j {
                                v = r.add(&v, &g[(j, b)]);
                            }
                            v
                        });
                        slot.push((format!("sym(e_{i},e_{j})@{tau}"), vec![(tau, n)]));
                    }
                }
                slots.push(slot);
            }
        }
        Case::AR => {}
    }
    let op_of = |parts: &[&(String, Entries)]| {
        let mut n = vec![zeros(r, h, h); f];
        for (_, entries) in parts {
            for (t, m) in entries {
                n[*t] = m.clone();
            }
        }
        let source = parts
            .iter()
            .map(|(s, _)| s.as_str())
            .collect::<Vec<_>>()
            .join(" + ");
        Candidate {
            source,
            op: DeformationOp::new(c.case(), n),
            chain: None,
        }
    };
    let mut out: Vec<Candidate> = slots.iter().flatten().map(|part| op_of(&[part])).collect();
    let combos = slots.iter().map(|s| s.len() + 1).product::<usize>();
    if slots.len() > 1 && combos <= PRODUCT_CAP {
        // mixed radix over the slots, digit 0 meaning "nothing here"
        for code in 0..combos {
            let mut rest = code;
            let mut parts = Vec::new();
            for slot in &slots {
                let d = rest % (slot.len() + 1);
                rest /= slot.len() + 1;
                if d > 0 {
                    parts.push(&slot[d - 1]);
                }
            }
            if parts.len() >= 2 {
                out.push(op_of(&parts));
            }
        }
    }
    Ok(out)
}
