//! Constructions of N that lengthen or close F⁰-chains modulo π, together
//! with the congruence each is meant to produce. Stage data are verified, not
//! trusted; choices are the lowest-index ones in the standard basis.

use crate::crystals::{conj_mat, normalize_nnp, Crystal, NnpCrystal};
use crate::linalg::{
    chain_inverse, complete_basis, inverse, mat_vec, mul, neg, rank, solve, zeros, Matrix,
};
use crate::rings::{ChainRing, FiniteField, Frobenius, RamifiedElem, RamifiedRing, Ring};
use crate::Case;

use super::defseq::DeformationSequence;
use super::family::deform;
use super::residue::{nonzero, Nilpotence};
use super::{DeformError, DeformationOp};

/// A constructed N with the congruence it is meant to produce.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Construction {
    pub op: DeformationOp,
    /// The congruence, e.g. "F_N^3(x) ≢ 0 mod π".
    pub claim: String,
    /// Whether the deformed family satisfies it, computed exactly mod π.
    pub holds: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AlStage {
    /// x ∈ M̄_τ with i minimal such that F̄⁰^i x = 0, and i ≤ f.
    Lengthen { tau: usize, x: Vec<u32>, i: usize },
    /// x ∈ M̄_τ with F̄⁰^f x ≠ 0 and r0 minimal such that F̄⁰^{r0 f} x = 0.
    Wrap { tau: usize, x: Vec<u32>, r0: usize },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AuStage {
    /// x ∈ M̄_τ with r maximal such that F̄⁰^r x ≠ 0, and 1 ≤ r < f/2.
    Extend { tau: usize, x: Vec<u32>, r: usize },
    /// x ∈ M̄_τ and y ∈ M̄_τ̄ with F̄⁰^{f/2} x ≠ 0 and F̄⁰^{f/2} y ≠ 0.
    Join {
        tau: usize,
        x: Vec<u32>,
        y: Vec<u32>,
    },
    /// x ∈ M̄_τ with F̄⁰^f x ≠ 0, where a_τ + a_τ̄ < e.
    Close { tau: usize, x: Vec<u32> },
}

/// F⁰ and, with a pairing, V⁰ and H modulo π.
pub(crate) struct Reduced {
    pub nnp: NnpCrystal,
    pub k: FiniteField,
    pub f0: Vec<Matrix<u32>>,
    pub v0: Vec<Matrix<u32>>,
    pub grams: Vec<Matrix<u32>>,
}

impl Reduced {
    pub fn new(c: &Crystal) -> Result<Self, DeformError> {
        let r = c.ring();
        let nnp = normalize_nnp(c)?;
        let res = |a: &Matrix<RamifiedElem>| a.map(|x| r.residue(x));
        let f0 = nnp.f0_mats().iter().map(res).collect();
        let v0 = nnp.v0_mats().iter().map(res).collect();
        let grams = c
            .pairing()
            .map(|hp| hp.grams().iter().map(res).collect())
            .unwrap_or_default();
        Ok(Reduced {
            nnp,
            k: c.residue_field().clone(),
            f0,
            v0,
            grams,
        })
    }

    pub fn f(&self) -> usize {
        self.f0.len()
    }

    /// F̄⁰_τ x = F̄⁰_τ σ(x).
    pub fn apply(&self, tau: usize, x: &[u32]) -> Vec<u32> {
        let a = &self.f0[tau % self.f()];
        let sx: Vec<u32> = x.iter().map(|c| self.k.frob(c)).collect();
        mat_vec(&self.k, a, &sx)
    }

    pub fn iterate(&self, tau: usize, x: &[u32], n: usize) -> Vec<u32> {
        let mut v = x.to_vec();
        for s in 0..n {
            v = self.apply(tau + s, &v);
        }
        v
    }

    /// h̄_τ(x, y) = xᵀ H̄_τ y for x ∈ M̄_τ, y ∈ M̄_τ̄.
    pub fn pair(&self, tau: usize, x: &[u32], y: &[u32]) -> u32 {
        let hy = mat_vec(&self.k, &self.grams[tau % self.f()], y);
        dot(&self.k, x, &hy)
    }
}

pub(crate) fn dot(k: &FiniteField, a: &[u32], b: &[u32]) -> u32 {
    a.iter()
        .zip(b)
        .fold(0, |acc, (x, y)| k.add(&acc, &k.mul(x, y)))
}

pub(crate) fn is_null(v: &[u32]) -> bool {
    v.iter().all(|&c| c == 0)
}

pub(crate) fn basis_vector(h: usize, j: usize) -> Vec<u32> {
    let mut v = vec![0; h];
    v[j] = 1;
    v
}

fn independent(k: &FiniteField, vs: &[Vec<u32>]) -> bool {
    let h = vs[0].len();
    rank(k, &Matrix::from_cols(vs, h)) == vs.len()
}

/// The functional taking `values` on the independent vectors `fixed` and
/// vanishing on the lowest-index standard completion.
fn functional(k: &FiniteField, fixed: &[Vec<u32>], values: &[u32]) -> Option<Vec<u32>> {
    let h = fixed[0].len();
    let a = Matrix::from_cols(fixed, h);
    if rank(k, &a) != fixed.len() {
        return None;
    }
    let b = a.hstack(&complete_basis(k, &a));
    let binv = inverse(k, &b)?;
    let mut row = values.to_vec();
    row.resize(h, 0);
    Some(
        (0..h)
            .map(|j| (0..h).fold(0, |acc, i| k.add(&acc, &k.mul(&row[i], &binv[(i, j)]))))
            .collect(),
    )
}

fn lift_vec(r: &RamifiedRing, v: &[u32]) -> Vec<RamifiedElem> {
    v.iter().map(|&c| r.lift_residue(c)).collect()
}

/// A lift of y ⊗ φ with φ(y) = 0 exactly, so the square vanishes; needs
/// φ(y) = 0 mod π and y ≠ 0 mod π.
fn rank_one(r: &RamifiedRing, y: &[u32], phi: &[u32]) -> Matrix<RamifiedElem> {
    let yl = lift_vec(r, y);
    let mut pl = lift_vec(r, phi);
    let i = y.iter().position(|&c| c != 0).expect("y ≠ 0 mod π");
    let delta = yl
        .iter()
        .zip(&pl)
        .fold(r.zero(), |acc, (a, b)| r.add(&acc, &r.mul(a, b)));
    pl[i] = r.sub(&pl[i], &r.mul(&delta, &r.inv_unit(&yl[i])));
    Matrix::from_fn(y.len(), y.len(), |a, b| r.mul(&yl[a], &pl[b]))
}

/// N_ρ̄ = s(-H_ρ⁻¹ N_ρᵀ H_ρ), the unique partner making N skew on ρ and ρ̄.
fn partner_of(
    c: &Crystal,
    rho: usize,
    n: &Matrix<RamifiedElem>,
) -> Result<Matrix<RamifiedElem>, DeformError> {
    let r = c.ring();
    let hp = c
        .pairing()
        .ok_or(DeformError::InvalidOp("a pairing is required"))?;
    let g = hp.gram(rho);
    let gi = chain_inverse(r, g).ok_or(DeformError::InvalidOp("pairing is not perfect"))?;
    let m = neg(r, &mul(r, &mul(r, &gi, &n.transpose()), g));
    Ok(conj_mat(r, &m, hp.conjugates()))
}

fn op_with(c: &Crystal, entries: Vec<(usize, Matrix<RamifiedElem>)>) -> DeformationOp {
    let r = c.ring();
    let mut n = vec![zeros(r, c.h(), c.h()); c.f()];
    for (t, m) in entries {
        n[t % c.f()] = m;
    }
    DeformationOp::new(c.case(), n)
}

fn bad(msg: impl Into<String>) -> DeformError {
    DeformError::StageDataInvalid(msg.into())
}

fn check_vec(c: &Crystal, x: &[u32]) -> Result<(), DeformError> {
    if x.len() != c.h() {
        return Err(bad(format!(
            "vector has length {}, expected {}",
            x.len(),
            c.h()
        )));
    }
    if is_null(x) {
        return Err(bad("vector is zero mod π"));
    }
    Ok(())
}

/// Lowest-index e_j ∈ M̄_ρ with F̄⁰ e_j ≠ 0 and, when given, independent of `avoid`.
fn first_live(red: &Reduced, rho: usize, avoid: Option<&[u32]>) -> Option<Vec<u32>> {
    let h = red.f0[0].rows;
    (0..h).map(|j| basis_vector(h, j)).find(|e| {
        !is_null(&red.apply(rho, e))
            && avoid.map_or(true, |a| independent(&red.k, &[a.to_vec(), e.clone()]))
    })
}

/// Deforms with T = 2, D = 1 and evaluates F̄⁰_N^n(x) ≠ 0.
fn chain_claim(
    c: &Crystal,
    op: DeformationOp,
    tau: usize,
    x: &[u32],
    n: usize,
) -> Result<Construction, DeformError> {
    let fam = deform(c, &op, 2, 1)?;
    let holds = nonzero(&fam.nnp_residue()?.iterate(tau, x, n));
    Ok(Construction {
        op,
        claim: format!("F_N^{n}(x) ≢ 0 mod π"),
        holds,
    })
}

fn nilpotence_claim(c: &Crystal, op: DeformationOp) -> Result<Construction, DeformError> {
    let fam = deform(c, &op, 2, 1)?;
    let holds = matches!(
        fam.nnp_residue()?.nilpotence(),
        Nilpotence::NotNilpotent { .. }
    );
    Ok(Construction {
        op,
        claim: "F_N is not nilpotent mod π".into(),
        holds,
    })
}

/// Case AL on the normalized crystal F⁰ = π^{-a} F.
pub fn build_n_al(c: &Crystal, stage: &AlStage) -> Result<Construction, DeformError> {
    if c.case() != Case::AL {
        return Err(DeformError::UnsupportedCase(c.case()));
    }
    let red = Reduced::new(c)?;
    let f = c.f();
    match stage {
        AlStage::Lengthen { tau, x, i } => {
            check_vec(c, x)?;
            let (tau, i) = (*tau % f, *i);
            if i < 2 || i > f {
                return Err(bad(format!("need 2 ≤ i ≤ f, got i = {i}")));
            }
            let y = red.iterate(tau, x, i - 1);
            if is_null(&y) || !is_null(&red.apply(tau + i - 1, &y)) {
                return Err(bad(format!(
                    "i = {i} is not the first index with F̄⁰^i x = 0"
                )));
            }
            let rho = tau + i - 1;
            let xi = first_live(&red, rho, None).ok_or_else(|| bad("F̄⁰ vanishes on M̄_ρ"))?;
            let phi = functional(&red.k, &[y, xi.clone()], &[1, 0])
                .ok_or_else(|| bad("y and x_{i-1} are dependent"))?;
            let op = op_with(c, vec![(rho, rank_one(c.ring(), &xi, &phi))]);
            chain_claim(c, op, tau, x, i)
        }
        AlStage::Wrap { tau, x, r0 } => {
            check_vec(c, x)?;
            let (tau, r0) = (*tau % f, *r0);
            if r0 < 2 {
                return Err(bad("need r0 ≥ 2"));
            }
            let chain: Vec<Vec<u32>> = (0..r0).map(|j| red.iterate(tau, x, j * f)).collect();
            if is_null(&chain[r0 - 1]) || !is_null(&red.iterate(tau, x, r0 * f)) {
                return Err(bad(format!(
                    "r0 = {r0} is not the first multiple with F̄⁰^(r0 f) x = 0"
                )));
            }
            let mut values = vec![0; r0];
            values[1] = 1;
            let phi = functional(&red.k, &chain, &values)
                .ok_or_else(|| bad("the F̄^f-chain of x is dependent"))?;
            let op = op_with(c, vec![(tau, rank_one(c.ring(), x, &phi))]);
            chain_claim(c, op, tau, x, r0 * f)
        }
    }
}

/// Case AU, with N_ρ̄ = -N_ρ^* throughout.
pub fn build_n_au(c: &Crystal, stage: &AuStage) -> Result<Construction, DeformError> {
    if c.case() != Case::AU {
        return Err(DeformError::UnsupportedCase(c.case()));
    }
    let red = Reduced::new(c)?;
    let f = c.f();
    let d = f / 2;
    let r = c.ring();
    let pair = |rho: usize, n: Matrix<RamifiedElem>| -> Result<DeformationOp, DeformError> {
        let nb = partner_of(c, rho, &n)?;
        Ok(op_with(c, vec![(rho, n), (c.bar(rho), nb)]))
    };
    match stage {
        AuStage::Extend { tau, x, r: steps } => {
            check_vec(c, x)?;
            let (tau, s) = (*tau % f, *steps);
            if s == 0 || s >= d {
                return Err(bad(format!("need 1 ≤ r < f/2 = {d}")));
            }
            let w = red.iterate(tau, x, s);
            if is_null(&w) || !is_null(&red.apply(tau + s, &w)) {
                return Err(bad(format!("r = {s} is not maximal with F̄⁰^r x ≠ 0")));
            }
            let rho = (tau + s) % f;
            let y = first_live(&red, rho, Some(&w))
                .ok_or_else(|| bad("no live vector independent of F̄⁰^r x"))?;
            let phi = functional(&red.k, &[w, y.clone()], &[1, 0]).expect("independent");
            let op = pair(rho, rank_one(r, &y, &phi))?;
            chain_claim(c, op, tau, x, s + 1)
        }
        AuStage::Join { tau, x, y } => {
            check_vec(c, x)?;
            check_vec(c, y)?;
            let tau = *tau % f;
            let tb = c.bar(tau);
            let w = red.iterate(tau, x, d);
            if is_null(&w) || is_null(&red.iterate(tb, y, d)) {
                return Err(bad("need F̄⁰^(f/2) x ≠ 0 and F̄⁰^(f/2) y ≠ 0"));
            }
            let phi = functional(&red.k, &[w, y.clone()], &[1, 0])
                .ok_or_else(|| bad("F̄⁰^(f/2) x and y are dependent"))?;
            let op = pair(tb, rank_one(r, y, &phi))?;
            chain_claim(c, op, tau, x, f)
        }
        AuStage::Close { tau, x } => {
            check_vec(c, x)?;
            let tau = *tau % f;
            let amp = red.nnp.amplitude();
            if amp[tau] + amp[c.bar(tau)] >= c.e() as u32 {
                return Err(bad("need a_τ + a_τ̄ < e"));
            }
            if is_null(&red.iterate(tau, x, f)) {
                return Err(bad("need F̄⁰^f x ≠ 0"));
            }
            let x = normalize_against_pairing(&red, c, tau, x)?;
            // s maximal with F̄⁰^s x ≠ 0; past f·h steps F̄⁰ is not nilpotent on x
            let cap = f * c.h() + f;
            let s = (0..=cap)
                .take_while(|&n| !is_null(&red.iterate(tau, &x, n)))
                .last()
                .expect("x ≠ 0");
            if s == cap {
                return Err(bad("F̄⁰ is not nilpotent on x"));
            }
            let (q, j) = (s / f, s % f);
            let m0 = red.iterate(tau, &x, (q - 1) * f + j);
            let top = red.iterate(tau + j, &m0, f);
            let rho = (tau + j) % f;
            let phi = functional(&red.k, &[top, m0.clone()], &[1, 0])
                .ok_or_else(|| bad("F̄⁰^f m0 and m0 are dependent"))?;
            let op = pair(rho, rank_one(r, &m0, &phi))?;
            nilpotence_claim(c, op)
        }
    }
}

/// x + V̄⁰m with h̄(x + V̄⁰m, F̄⁰^{f/2} x) = 0; F̄⁰ x is unchanged because
/// F̄⁰V̄⁰ = 0 at τ when a_τ + a_τ̄ < e.
fn normalize_against_pairing(
    red: &Reduced,
    c: &Crystal,
    tau: usize,
    x: &[u32],
) -> Result<Vec<u32>, DeformError> {
    let k = &red.k;
    let w = red.iterate(tau, x, c.f() / 2);
    let val = red.pair(tau, x, &w);
    if val == 0 {
        return Ok(x.to_vec());
    }
    // h̄(B̄⁰ z, w) = zᵀ (B̄⁰ᵀ H̄ w) with z = σ⁻¹(m)
    let b = &red.v0[tau];
    let hw = mat_vec(k, &red.grams[tau], &w);
    let coeff = mat_vec(k, &b.transpose(), &hw);
    let j = coeff
        .iter()
        .position(|&c| c != 0)
        .ok_or_else(|| bad("the pairing cannot be normalized"))?;
    let scale = k.mul(&k.neg(&val), &k.inverse(coeff[j]).expect("nonzero"));
    let mut z = vec![0; x.len()];
    z[j] = scale;
    let shift = mat_vec(k, b, &z);
    let x2: Vec<u32> = x.iter().zip(&shift).map(|(a, s)| k.add(a, s)).collect();
    if red.apply(tau, &x2) != red.apply(tau, x) {
        return Err(bad("F̄⁰V̄⁰ ≠ 0 at τ"));
    }
    Ok(x2)
}

/// Case C from a deformation sequence: N_{τ+1} F̄x_τ = x_{τ+1} unless
/// F̄x_τ = x_{τ+1}, in which case N_{τ+1} = 0.
pub fn build_n_c(c: &Crystal, seq: &DeformationSequence) -> Result<Construction, DeformError> {
    if c.case() != Case::C {
        return Err(DeformError::UnsupportedCase(c.case()));
    }
    let report = super::defseq::validate_defseq(c, seq)?;
    if !report.is_valid() {
        return Err(bad("not a deformation sequence"));
    }
    let red = Reduced::new(c)?;
    let f = c.f();
    let mut entries = Vec::new();
    for tau in 0..f {
        let v = red.apply(tau, &seq.x[tau]);
        let w = seq.x[(tau + 1) % f].clone();
        if v == w {
            continue;
        }
        entries.push((
            (tau + 1) % f,
            symplectic_transfer(c, &red, (tau + 1) % f, &v, &w)?,
        ));
    }
    nilpotence_claim(c, op_with(c, entries))
}

/// A square-zero N in the Lie algebra of the pairing on M_ρ with N v ≡ w:
/// y ↦ h(w,y) w / h(w,v) when h(w,v) ≠ 0, otherwise
/// y ↦ h(α,y) w + h(w,y) α with h(α,w) = 0 and h(α,v) = 1.
fn symplectic_transfer(
    c: &Crystal,
    red: &Reduced,
    rho: usize,
    v: &[u32],
    w: &[u32],
) -> Result<Matrix<RamifiedElem>, DeformError> {
    let r = c.ring();
    let k = &red.k;
    let hp = c
        .pairing()
        .ok_or(DeformError::InvalidOp("a pairing is required"))?;
    let g = hp.gram(rho);
    let wl = lift_vec(r, w);
    let gw = mat_vec(r, g, &wl);
    let hwv = red.pair(rho, w, v);
    if hwv != 0 {
        let s = r.lift_residue(k.inverse(hwv).expect("nonzero"));
        // N = s · w (wᵀ H), and h(w, w) = 0 exactly as H is alternating
        let row = mat_vec(r, &g.transpose(), &wl);
        return Ok(Matrix::from_fn(c.h(), c.h(), |a, b| {
            r.mul(&s, &r.mul(&wl[a], &row[b]))
        }));
    }
    // αᵀ H̄ w = 0, αᵀ H̄ v = 1
    let hb = &red.grams[rho];
    let eqs = Matrix::from_rows(vec![mat_vec(k, hb, w), mat_vec(k, hb, v)]);
    let rhs = Matrix::from_cols(&[vec![0, 1]], 2);
    let alpha = solve(k, &eqs, &rhs).ok_or_else(|| bad("w and v are dependent"))?;
    let mut al = lift_vec(r, &alpha.col(0));
    // make h(α, w) = 0 exactly
    let i = gw
        .iter()
        .position(|x| r.is_unit(x))
        .ok_or(DeformError::InvalidOp("pairing is not perfect"))?;
    let delta = al
        .iter()
        .zip(&gw)
        .fold(r.zero(), |acc, (a, b)| r.add(&acc, &r.mul(a, b)));
    al[i] = r.sub(&al[i], &r.mul(&delta, &r.inv_unit(&gw[i])));
    let gt = g.transpose();
    let (ra, rw) = (mat_vec(r, &gt, &al), mat_vec(r, &gt, &wl));
    Ok(Matrix::from_fn(c.h(), c.h(), |a, b| {
        r.add(&r.mul(&wl[a], &ra[b]), &r.mul(&al[a], &rw[b]))
    }))
}
