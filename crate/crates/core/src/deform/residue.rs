//! The family modulo π: F̄_N,τ = (1 + t N̄_{τ+1}) F̄_τ on M̄ ⊗ k[t], with σ
//! acting on coefficients and t ↦ t^p. Computations are exact polynomial
//! arithmetic, so "≢ 0 mod π" is decided without truncation.

use crate::linalg::{identity, is_zero, mul, pow, Matrix};
use crate::rings::poly::Poly;
use crate::rings::{FiniteField, Frobenius, PolyRing, Ring};

/// Degree bound above which the exact nilpotence product is not attempted.
const EXACT_DEGREE_CAP: usize = 4096;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Nilpotence {
    /// Not nilpotent; `point` is a c ∈ k where the specialization is already
    /// not nilpotent, `None` when only the exact product shows it.
    NotNilpotent {
        point: Option<u32>,
    },
    Nilpotent,
    /// Every specialization at k is nilpotent and the exact product is too
    /// large to form.
    Undetermined,
}

#[derive(Clone, Debug)]
pub struct ResidueFamily {
    pr: PolyRing,
    mats: Vec<Matrix<Poly>>,
}

fn poly_frob(pr: &PolyRing, a: &Poly) -> Poly {
    let p = pr.k.p() as usize;
    let mut out = vec![
        0;
        if a.is_empty() {
            0
        } else {
            (a.len() - 1) * p + 1
        }
    ];
    for (i, c) in a.iter().enumerate() {
        out[i * p] = pr.k.frob(c);
    }
    out
}

fn mat_frob(pr: &PolyRing, a: &Matrix<Poly>) -> Matrix<Poly> {
    a.map(|x| poly_frob(pr, x))
}

fn degree(a: &Matrix<Poly>) -> usize {
    a.data
        .iter()
        .map(|x| x.len().saturating_sub(1))
        .max()
        .unwrap_or(0)
}

impl ResidueFamily {
    /// `f_bar[τ]` is F̄_τ: M̄_τ → M̄_{τ+1} and `n_bar[τ]` is N̄_τ on M̄_τ.
    pub fn new(k: &FiniteField, f_bar: &[Matrix<u32>], n_bar: &[Matrix<u32>]) -> Self {
        let pr = PolyRing::new(k.clone());
        let f = f_bar.len();
        let mats = (0..f)
            .map(|t| {
                let h = f_bar[t].rows;
                let tn = n_bar[(t + 1) % f].map(|&c| pr.mul(&pr.t(), &pr.constant(c)));
                let twist = crate::linalg::add(&pr, &identity(&pr, h), &tn);
                mul(&pr, &twist, &f_bar[t].map(|&c| pr.constant(c)))
            })
            .collect();
        ResidueFamily { pr, mats }
    }

    pub fn ring(&self) -> &PolyRing {
        &self.pr
    }
    pub fn f(&self) -> usize {
        self.mats.len()
    }
    /// The matrix of F̄_N,τ.
    pub fn matrix(&self, tau: usize) -> &Matrix<Poly> {
        &self.mats[tau % self.f()]
    }

    /// F̄_N,τ(v) = M_τ σ(v) for v ∈ M̄_τ ⊗ k[t].
    pub fn apply(&self, tau: usize, v: &[Poly]) -> Vec<Poly> {
        let m = self.matrix(tau);
        let sv: Vec<Poly> = v.iter().map(|x| poly_frob(&self.pr, x)).collect();
        (0..m.rows)
            .map(|i| {
                (0..m.cols).fold(self.pr.zero(), |acc, j| {
                    self.pr.add(&acc, &self.pr.mul(&m[(i, j)], &sv[j]))
                })
            })
            .collect()
    }

    /// F̄_N^n(x ⊗ 1) for x ∈ M̄_τ; the result lies in M̄_{τ+n} ⊗ k[t].
    pub fn iterate(&self, tau: usize, x: &[u32], n: usize) -> Vec<Poly> {
        let mut v: Vec<Poly> = x.iter().map(|&c| self.pr.constant(c)).collect();
        for s in 0..n {
            v = self.apply(tau + s, &v);
        }
        v
    }

    /// Φ = M_{f-1} σ(M_{f-2}) ⋯ σ^{f-1}(M_0), the σ^f-linear F̄_N^f on M̄_0.
    pub fn linearized(&self) -> Matrix<Poly> {
        let mut phi = self.mats[0].clone();
        for m in &self.mats[1..] {
            phi = mul(&self.pr, m, &mat_frob(&self.pr, &phi));
        }
        phi
    }

    /// Nilpotence of F̄_N over k((t))^perf: Φσ^f is nilpotent iff
    /// Φ σ^f(Φ) ⋯ σ^{f(h-1)}(Φ) = 0. A specialization t ↦ c ∈ k turns this
    /// product into Φ(c)^h, so a non-nilpotent Φ(c) certifies the answer.
    pub fn nilpotence(&self) -> Nilpotence {
        let k = &self.pr.k;
        let phi = self.linearized();
        let h = phi.rows;
        for c in k.elements() {
            let at = phi.map(|x| self.pr.eval(x, c));
            if !is_zero(k, &pow(k, &at, h as u32)) {
                return Nilpotence::NotNilpotent { point: Some(c) };
            }
        }
        let q = k.order() as usize;
        let mut bound = degree(&phi);
        let mut scale = 1usize;
        for _ in 1..h {
            scale = scale.saturating_mul(q);
            bound = bound.saturating_add(degree(&phi).saturating_mul(scale));
        }
        if bound > EXACT_DEGREE_CAP {
            return Nilpotence::Undetermined;
        }
        let mut prod = phi.clone();
        for _ in 1..h {
            let mut s = prod;
            for _ in 0..self.f() {
                s = mat_frob(&self.pr, &s);
            }
            prod = mul(&self.pr, &phi, &s);
        }
        if is_zero(&self.pr, &prod) {
            Nilpotence::Nilpotent
        } else {
            Nilpotence::NotNilpotent { point: None }
        }
    }
}

/// Nonzero as an element of M̄ ⊗ k[t].
pub(crate) fn nonzero(v: &[Poly]) -> bool {
    v.iter().any(|x| !x.is_empty())
}
