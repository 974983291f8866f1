//! Builders for valid crystals: hand-made fixtures and seeded random ones in
//! cases AL, AU and C, plus random PR filtrations on ω_τ.

use rand::Rng;

use crate::linalg::{
    chain_inverse, col_basis, det, diag, frob, identity, intersect, kernel, mul, neg, pow, rank,
    zeros, Matrix,
};
use crate::prdata::{standard_pairing, standard_pi, FilteredModule};
use crate::rings::{RamifiedElem, RamifiedRing, Ring};
use crate::Case;

use super::pairing::conj_mat;
use super::{
    default_precision, from_frobenius, omega, p_over, Crystal, CrystalError, HermitianPairing,
};

fn diag_pi(r: &RamifiedRing, exps: &[u32]) -> Matrix<RamifiedElem> {
    let d: Vec<RamifiedElem> = exps.iter().map(|&c| r.pi_pow(c)).collect();
    diag(r, &d)
}

/// A uniformly random matrix in GL_h(O_m).
pub fn random_unimodular<G: Rng>(r: &RamifiedRing, h: usize, rng: &mut G) -> Matrix<RamifiedElem> {
    let k = r.residue_field();
    loop {
        let a = Matrix::from_fn(h, h, |_, _| r.random(rng));
        if det(k, &a.map(|x| r.residue(x))) != 0 {
            return a;
        }
    }
}

fn random_symmetric<G: Rng>(r: &RamifiedRing, g: usize, rng: &mut G) -> Matrix<RamifiedElem> {
    let mut x = zeros(r, g, g);
    for i in 0..g {
        for j in i..g {
            let v = r.random(rng);
            x[(i, j)] = v.clone();
            x[(j, i)] = v;
        }
    }
    x
}

/// A random element of Sp_{2g}(O_m) for J = [[0, I], [-I, 0]].
fn random_symplectic<G: Rng>(r: &RamifiedRing, g: usize, rng: &mut G) -> Matrix<RamifiedElem> {
    let i = identity(r, g);
    let z = zeros(r, g, g);
    let upper = i.hstack(&random_symmetric(r, g, rng)).vstack(&z.hstack(&i));
    let lower = i.hstack(&z).vstack(&random_symmetric(r, g, rng).hstack(&i));
    let u = random_unimodular(r, g, rng);
    let u_inv_t = chain_inverse(r, &u).expect("unimodular").transpose();
    let levi = u.hstack(&z).vstack(&z.hstack(&u_inv_t));
    mul(r, &mul(r, &upper, &lower), &levi)
}

/// H_τ = I for τ < f/2 and -I otherwise.
fn au_grams(r: &RamifiedRing, f: usize, h: usize) -> Vec<Matrix<RamifiedElem>> {
    (0..f)
        .map(|t| {
            if t < f / 2 {
                identity(r, h)
            } else {
                neg(r, &identity(r, h))
            }
        })
        .collect()
}

/// A random crystal whose F_τ has the given elementary-divisor exponents
/// (each in 0..=e). Case AL uses exps[τ] for every τ; case AU uses exps[τ]
/// for τ < f/2 and fills in F_τ̄ from the pairing; case C takes exps[τ] of
/// length h/2 and gives F_τ the exponents (c, e - c).
pub fn random_crystal_with_profiles<G: Rng>(
    ring: &RamifiedRing,
    case: Case,
    h: usize,
    exps: &[Vec<u32>],
    rng: &mut G,
) -> Result<Crystal, CrystalError> {
    let (e, f) = (ring.e() as u32, ring.f());
    let r = ring;
    if exps.iter().flatten().any(|&c| c > e) {
        return Err(CrystalError::Shape("exponents must lie in 0..=e".into()));
    }
    let need = |n: usize, len: usize| -> Result<(), CrystalError> {
        if exps.len() < n || exps[..n].iter().any(|v| v.len() != len) {
            return Err(CrystalError::Shape(format!(
                "expected {n} exponent lists of length {len}"
            )));
        }
        Ok(())
    };
    match case {
        Case::AL => {
            need(f, h)?;
            let mats = (0..f)
                .map(|t| {
                    let (u, w) = (random_unimodular(r, h, rng), random_unimodular(r, h, rng));
                    mul(r, &mul(r, &u, &diag_pi(r, &exps[t])), &w)
                })
                .collect();
            from_frobenius(r.clone(), case, mats, None)
        }
        Case::AU => {
            if f % 2 != 0 {
                return Err(CrystalError::Shape("case AU needs even f".into()));
            }
            let d = f / 2;
            need(d, h)?;
            let grams = au_grams(r, f, h);
            let mut mats = vec![zeros(r, h, h); f];
            for t in 0..d {
                let (u, w) = (random_unimodular(r, h, rng), random_unimodular(r, h, rng));
                mats[t] = mul(r, &mul(r, &u, &diag_pi(r, &exps[t])), &w);
                // H_{τ+1} A_τ̄ = (p A_τ⁻¹)ᵀ σ(H_τ), with H_{τ+1}⁻¹ = H_{τ+1}
                let pinv_t = p_over(r, &mats[t], t)?.transpose();
                mats[t + d] = mul(
                    r,
                    &mul(r, &grams[(t + 1) % f], &pinv_t),
                    &frob(r, &grams[t]),
                );
            }
            from_frobenius(
                r.clone(),
                case,
                mats,
                Some(HermitianPairing::new(case, grams)),
            )
        }
        Case::C => {
            if h % 2 != 0 {
                return Err(CrystalError::Shape("case C needs even h".into()));
            }
            let g = h / 2;
            need(f, g)?;
            let j = standard_pairing(r, 1, g);
            let mats = (0..f)
                .map(|t| {
                    let mut full = exps[t].clone();
                    full.extend(exps[t].iter().map(|&c| e - c));
                    let (s1, s2) = (random_symplectic(r, g, rng), random_symplectic(r, g, rng));
                    mul(r, &mul(r, &s1, &diag_pi(r, &full)), &s2)
                })
                .collect();
            from_frobenius(
                r.clone(),
                case,
                mats,
                Some(HermitianPairing::new(case, vec![j; f])),
            )
        }
        Case::AR => Err(CrystalError::Shape("no generator for case AR".into())),
    }
}

/// A random crystal with random elementary-divisor exponents.
pub fn random_crystal<G: Rng>(
    ring: &RamifiedRing,
    case: Case,
    h: usize,
    rng: &mut G,
) -> Result<Crystal, CrystalError> {
    let e = ring.e() as u32;
    let len = if case == Case::C { h / 2 } else { h };
    let exps: Vec<Vec<u32>> = (0..ring.f())
        .map(|_| (0..len).map(|_| rng.gen_range(0..=e)).collect())
        .collect();
    random_crystal_with_profiles(ring, case, h, &exps, rng)
}

/// F_τ = diag(π^{c}) in case AL.
pub fn diagonal_crystal(ring: &RamifiedRing, exps: &[Vec<u32>]) -> Result<Crystal, CrystalError> {
    let mats = exps.iter().map(|c| diag_pi(ring, c)).collect();
    from_frobenius(ring.clone(), Case::AL, mats, None)
}

/// e = f = 1, h = 2 with F = [[0, -p], [1, 0]], so Fᵀ J F = pJ; case C
/// carries J, case AL no pairing.
pub fn supersingular(p: u32, case: Case) -> Result<Crystal, CrystalError> {
    supersingular_at(p, case, default_precision(1, 2))
}

/// The supersingular fixture at precision m.
pub fn supersingular_at(p: u32, case: Case, m: u32) -> Result<Crystal, CrystalError> {
    if !matches!(case, Case::AL | Case::C) {
        return Err(CrystalError::Shape(format!(
            "no supersingular fixture for case {case}"
        )));
    }
    let r =
        RamifiedRing::with_params(p, 1, 1, m).map_err(|e| CrystalError::Shape(e.to_string()))?;
    let a = Matrix::from_rows(vec![
        vec![r.zero(), r.from_int(-(p as i64))],
        vec![r.one(), r.zero()],
    ]);
    let pairing =
        (case == Case::C).then(|| HermitianPairing::new(case, vec![standard_pairing(&r, 1, 1)]));
    from_frobenius(r, case, vec![a], pairing)
}

/// A random chain π ω^[j+1] ⊆ ω^[j] ⊆ ω^[j+1] ∩ ker π^j ending at ω_τ, on
/// the standard ambient k^{eh}.
pub fn random_pr_filtration<G: Rng>(c: &Crystal, tau: usize, rng: &mut G) -> FilteredModule<u32> {
    let k = c.residue_field();
    let (e, h) = (c.e(), c.h());
    let pi = standard_pi(k, e, h);
    let mut steps = vec![omega(c, tau)];
    for j in (1..e).rev() {
        let cur = steps.last().expect("nonempty").clone();
        let lower = col_basis(k, &mul(k, &pi, &cur));
        let upper = intersect(k, &cur, &kernel(k, &pow(k, &pi, j as u32)));
        let target = rng.gen_range(lower.cols..=upper.cols);
        let mut w = lower;
        while w.cols < target {
            let coeffs = Matrix::from_fn(upper.cols, 1, |_, _| k.random(rng));
            let cand = w.hstack(&mul(k, &upper, &coeffs));
            if rank(k, &cand) > w.cols {
                w = cand;
            }
        }
        steps.push(w);
    }
    steps.reverse();
    let mut d = Vec::with_capacity(e);
    let mut prev = 0;
    for s in &steps {
        d.push((s.cols - prev) as u32);
        prev = s.cols;
    }
    FilteredModule::special(k, e, h, steps, d)
}

/// The same crystal in the bases x' = g_τ x of M_τ: A'_τ = g_{τ+1} A_τ σ(g_τ)⁻¹
/// and H'_τ = g_τ⁻ᵀ H_τ s(g_τ̄)⁻¹.
pub fn change_basis(c: &Crystal, g: &[Matrix<RamifiedElem>]) -> Result<Crystal, CrystalError> {
    let r = c.ring();
    let f = c.f();
    if g.len() != f {
        return Err(CrystalError::Shape(format!("expected {f} basis changes")));
    }
    let mut inv = Vec::with_capacity(f);
    for (t, gt) in g.iter().enumerate() {
        inv.push(
            chain_inverse(r, gt)
                .ok_or_else(|| CrystalError::Shape(format!("g_{t} is not invertible")))?,
        );
    }
    let mats = (0..f)
        .map(|t| {
            mul(
                r,
                &mul(r, &g[(t + 1) % f], c.frobenius(t)),
                &frob(r, &inv[t]),
            )
        })
        .collect();
    let pairing = c.pairing().map(|hp| {
        let grams = (0..f)
            .map(|t| {
                let right = conj_mat(r, &inv[c.bar(t)], hp.conjugates());
                mul(r, &mul(r, &inv[t].transpose(), hp.gram(t)), &right)
            })
            .collect();
        HermitianPairing::new(c.case(), grams)
    });
    from_frobenius(r.clone(), c.case(), mats, pairing)
}
