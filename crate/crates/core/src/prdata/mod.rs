//! Pappas-Rapoport filtrations on modules with a nilpotent π-action.
//!
//! The ambient module H is free of rank h over B[π]/(π^e); it is stored as a
//! free B-module of rank e·h with an explicit matrix of π. In the standard
//! basis, index i·h + a holds π^i ε_a. Each step N^[j] is a basis matrix whose
//! columns span a direct factor.

mod counterexample;
mod e2;
mod enumerate;
mod io;

pub use counterexample::{counterexample_check, counterexample_pis, CounterexampleReport};
pub use e2::{e2_deformation_step, e2_profile, E2Error, E2Lift};
pub use enumerate::{
    enumerate_pr, enumerate_pr_slice, for_each_pr, for_each_pr_on, for_each_subspace,
    gaussian_binomial, point_hodge_polygon, stratum_counts, subspaces, EnumerateError,
};
pub use io::{stratum_counts_csv, FilteredModuleJson};

use thiserror::Error;

use crate::linalg::{
    chain_solve, col_basis, complete_basis, identity, inverse, is_zero, kernel, left_inverse, mul,
    rank, smith, solve, sub, zeros, Matrix,
};
use crate::polygons::{hodge_from_profile, max_subset_sum, Polygon, TorsionProfile};
use crate::rings::{ChainRing, Field, Ring};
pub use crate::Case;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FilteredModule<E> {
    pub e: usize,
    pub h: usize,
    /// π acting on the e·h coordinates.
    pub pi: Matrix<E>,
    /// N^[1], …, N^[e]; N^[0] = 0 is implicit.
    pub steps: Vec<Matrix<E>>,
    /// Signature slice d_1, …, d_e.
    pub d: Vec<u32>,
    /// σ_j(π) in the base; zero in the special fiber.
    pub pi_images: Vec<E>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    NotDirectFactor {
        step: usize,
    },
    Rank {
        step: usize,
        expected: usize,
        found: usize,
    },
    Containment {
        step: usize,
    },
    Inclusion {
        step: usize,
    },
    Shape(String),
}

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct PrReport {
    pub violations: Vec<Violation>,
}

impl PrReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PrError {
    #[error("ambient module is not free over B[T]/Q(T)")]
    NotFree,
    #[error("invalid filtration: {0:?}")]
    Invalid(Vec<Violation>),
}

/// π on (B[π]/π^e)^h in the standard basis.
pub fn standard_pi<R: Ring>(r: &R, e: usize, h: usize) -> Matrix<R::Elem> {
    let n = e * h;
    let mut m = zeros(r, n, n);
    for i in 0..e.saturating_sub(1) {
        for a in 0..h {
            m[((i + 1) * h + a, i * h + a)] = r.one();
        }
    }
    m
}

/// The alternating pairing <π^i ε_a, π^j ε_b> = J_ab when i + j = e - 1,
/// with J = [[0, I_g], [-I_g, 0]]; π is self-adjoint for it.
pub fn standard_pairing<R: Ring>(r: &R, e: usize, g: usize) -> Matrix<R::Elem> {
    let h = 2 * g;
    let n = e * h;
    let mut m = zeros(r, n, n);
    for i in 0..e {
        let j = e - 1 - i;
        for a in 0..g {
            m[(i * h + a, j * h + g + a)] = r.one();
            m[(i * h + g + a, j * h + a)] = r.neg(&r.one());
        }
    }
    m
}

impl<E: Clone> FilteredModule<E> {
    /// Special-fiber module on the standard ambient.
    pub fn special<R: Ring<Elem = E>>(
        r: &R,
        e: usize,
        h: usize,
        steps: Vec<Matrix<E>>,
        d: Vec<u32>,
    ) -> Self {
        FilteredModule {
            e,
            h,
            pi: standard_pi(r, e, h),
            steps,
            d,
            pi_images: vec![r.zero(); e],
        }
    }

    pub fn rank(&self) -> usize {
        self.e * self.h
    }

    /// N^[j] for 0 ≤ j ≤ e.
    pub fn step<R: Ring<Elem = E>>(&self, r: &R, j: usize) -> Matrix<E> {
        if j == 0 {
            zeros(r, self.rank(), 0)
        } else {
            self.steps[j - 1].clone()
        }
    }

    pub fn omega(&self) -> &Matrix<E> {
        self.steps.last().expect("e ≥ 1")
    }

    /// Entrywise image under a ring map on the base.
    pub fn map<F, G: Fn(&E) -> F>(&self, g: G) -> FilteredModule<F> {
        FilteredModule {
            e: self.e,
            h: self.h,
            pi: self.pi.map(&g),
            steps: self.steps.iter().map(|s| s.map(&g)).collect(),
            d: self.d.clone(),
            pi_images: self.pi_images.iter().map(&g).collect(),
        }
    }
}

/// Rank of a direct factor: the number of unit elementary divisors.
fn unit_rank<R: ChainRing>(r: &R, a: &Matrix<R::Elem>) -> usize {
    smith(r, a).diag.iter().filter(|x| r.is_unit(x)).count()
}

fn contained<R: ChainRing>(r: &R, big: &Matrix<R::Elem>, small: &Matrix<R::Elem>) -> bool {
    if small.cols == 0 {
        return true;
    }
    if big.cols == 0 {
        return is_zero(r, small);
    }
    chain_solve(r, big, small).is_some()
}

/// Every violated clause: direct factor, rank, inclusion and
/// (π - π_j) N^[j] ⊆ N^[j-1].
pub fn validate_pr<R: ChainRing>(r: &R, f: &FilteredModule<R::Elem>) -> PrReport {
    let mut v = Vec::new();
    let n = f.rank();
    if f.steps.len() != f.e || f.d.len() != f.e || f.pi_images.len() != f.e {
        v.push(Violation::Shape("filtration length differs from e".into()));
        return PrReport { violations: v };
    }
    if f.pi.rows != n || f.pi.cols != n || f.steps.iter().any(|s| s.rows != n) {
        v.push(Violation::Shape("matrix sizes differ from e·h".into()));
        return PrReport { violations: v };
    }
    let mut expected = 0;
    for j in 1..=f.e {
        let nj = f.step(r, j);
        let prev = f.step(r, j - 1);
        expected += f.d[j - 1] as usize;
        if nj.cols > 0 && left_inverse(r, &nj).is_none() {
            v.push(Violation::NotDirectFactor { step: j });
        }
        let found = if nj.cols == 0 { 0 } else { unit_rank(r, &nj) };
        if found != expected || nj.cols != expected {
            v.push(Violation::Rank {
                step: j,
                expected,
                found: found.max(nj.cols),
            });
        }
        if !contained(r, &nj, &prev) {
            v.push(Violation::Inclusion { step: j });
        }
        let shifted = sub(
            r,
            &f.pi,
            &crate::linalg::scale(r, &f.pi_images[j - 1], &identity(r, n)),
        );
        if !contained(r, &prev, &mul(r, &shifted, &nj)) {
            v.push(Violation::Containment { step: j });
        }
    }
    PrReport { violations: v }
}

/// Dimensions of ker x^j for j = 0, 1, … until they stabilize.
pub fn kernel_dims<K: Field>(k: &K, x: &Matrix<K::Elem>) -> Vec<usize> {
    let n = x.rows;
    let mut out = vec![0];
    let mut p = identity(k, n);
    loop {
        p = mul(k, &p, x);
        let dim = n - rank(k, &p);
        if dim == *out.last().unwrap() {
            return out;
        }
        out.push(dim);
    }
}

/// Exponents c_i with V ≅ ⊕ k[π]/(π^{c_i}) for a nilpotent x.
pub fn torsion_profile<K: Field>(k: &K, x: &Matrix<K::Elem>) -> TorsionProfile {
    let dims = kernel_dims(k, x);
    assert_eq!(*dims.last().unwrap(), x.rows, "operator is not nilpotent");
    // #{c_i ≥ j} = dims[j] - dims[j-1]
    let counts: Vec<usize> = dims.windows(2).map(|w| w[1] - w[0]).collect();
    let parts = counts.first().copied().unwrap_or(0);
    let c = (0..parts)
        .map(|i| counts.iter().filter(|&&cnt| cnt > i).count() as u32)
        .collect();
    TorsionProfile::new(c)
}

/// Kernel-dimension jumps (dim ker x^j - dim ker x^{j-1})_j.
pub fn jump_profile<K: Field>(k: &K, x: &Matrix<K::Elem>) -> Vec<u32> {
    kernel_dims(k, x)
        .windows(2)
        .map(|w| (w[1] - w[0]) as u32)
        .collect()
}

/// Matrix of x on an x-stable subspace, in the given basis.
pub fn restrict_action<K: Field>(
    k: &K,
    x: &Matrix<K::Elem>,
    basis: &Matrix<K::Elem>,
) -> Option<Matrix<K::Elem>> {
    if basis.cols == 0 {
        return Some(zeros(k, 0, 0));
    }
    solve(k, basis, &mul(k, x, basis))
}

/// Coordinates on V / S: rows of the inverse of [S | C] belonging to the
/// lowest-index standard completion C.
pub fn quotient_map<K: Field>(k: &K, s: &Matrix<K::Elem>) -> Matrix<K::Elem> {
    let s = col_basis(k, s);
    let c = complete_basis(k, &s);
    let full = s.hstack(&c);
    let inv = inverse(k, &full).expect("basis completion is invertible");
    inv.rows_range(s.cols, full.cols)
}

/// Matrix of x on V / S for an x-stable S.
pub fn quotient_action<K: Field>(
    k: &K,
    x: &Matrix<K::Elem>,
    s: &Matrix<K::Elem>,
) -> Matrix<K::Elem> {
    let s = col_basis(k, s);
    let c = complete_basis(k, &s);
    let q = quotient_map(k, &s);
    mul(k, &mul(k, &q, x), &c)
}

/// {v : A v ∈ S}.
pub fn preimage<K: Field>(k: &K, a: &Matrix<K::Elem>, s: &Matrix<K::Elem>) -> Matrix<K::Elem> {
    let q = quotient_map(k, s);
    kernel(k, &mul(k, &q, a))
}

/// Profile of π on H / N^[e], padded with zeros to h entries.
pub fn hodge_profile<K: Field>(k: &K, f: &FilteredModule<K::Elem>) -> TorsionProfile {
    let x = quotient_action(k, &f.pi, f.omega());
    let mut c = torsion_profile(k, &x).0;
    while c.len() < f.h {
        c.push(0);
    }
    TorsionProfile::new(c)
}

pub fn hodge_polygon<K: Field>(k: &K, f: &FilteredModule<K::Elem>) -> Polygon {
    hodge_from_profile(&hodge_profile(k, f), f.e as i64)
}

/// dim ω[π^j] = max over j-subsets of the d's, for all j.
pub fn is_rapoport<K: Field>(k: &K, f: &FilteredModule<K::Elem>) -> bool {
    let x = restrict_action(k, &f.pi, f.omega()).expect("ω is π-stable");
    let dims = kernel_dims(k, &x);
    (1..=f.e).all(|j| {
        let dim = dims.get(j).copied().unwrap_or(*dims.last().unwrap());
        dim as u32 == max_subset_sum(&f.d, j)
    })
}

fn q_upper<K: Field>(k: &K, f: &FilteredModule<K::Elem>, l: usize) -> Matrix<K::Elem> {
    let n = f.rank();
    let mut q = identity(k, n);
    for i in l..f.e {
        let shifted = sub(
            k,
            &f.pi,
            &crate::linalg::scale(k, &f.pi_images[i], &identity(k, n)),
        );
        q = mul(k, &q, &shifted);
    }
    q
}

fn ambient_is_free<K: Field>(k: &K, f: &FilteredModule<K::Elem>) -> bool {
    if f.pi_images.iter().all(|x| k.is_zero(x)) {
        torsion_profile(k, &f.pi) == TorsionProfile(vec![f.e as u32; f.h])
    } else {
        is_zero(k, &q_upper(k, f, 0))
    }
}

/// N^[0] ⊆ … ⊆ N^[2e] with N^[2e-ℓ] = Q^ℓ(π)^{-1}(N^[ℓ]).
pub fn extend_duality<K: Field>(
    k: &K,
    f: &FilteredModule<K::Elem>,
) -> Result<Vec<Matrix<K::Elem>>, PrError> {
    let report = validate_pr(k, f);
    if !report.is_valid() {
        return Err(PrError::Invalid(report.violations));
    }
    if !ambient_is_free(k, f) {
        return Err(PrError::NotFree);
    }
    let mut full: Vec<Matrix<K::Elem>> = (0..=f.e).map(|j| f.step(k, j)).collect();
    for j in 1..=f.e {
        let l = f.e - j;
        full.push(col_basis(k, &preimage(k, &q_upper(k, f, l), &full[l])));
    }
    Ok(full)
}

/// The datum on the dual ambient H^∨ (π acting by the transpose):
/// M^[i] = annihilator of N^[2e-i], of signature (h - d_i).
pub fn dual_datum<K: Field>(
    k: &K,
    f: &FilteredModule<K::Elem>,
) -> Result<FilteredModule<K::Elem>, PrError> {
    let full = extend_duality(k, f)?;
    let steps = (1..=f.e)
        .map(|i| kernel(k, &full[2 * f.e - i].transpose()))
        .collect();
    Ok(FilteredModule {
        e: f.e,
        h: f.h,
        pi: f.pi.transpose(),
        steps,
        d: f.d.iter().map(|&x| f.h as u32 - x).collect(),
        pi_images: f.pi_images.clone(),
    })
}

/// Orthogonal of the column space for the Gram matrix.
pub fn orthogonal<K: Field>(k: &K, gram: &Matrix<K::Elem>, s: &Matrix<K::Elem>) -> Matrix<K::Elem> {
    if s.cols == 0 {
        return identity(k, gram.rows);
    }
    kernel(k, &mul(k, &s.transpose(), gram))
}

/// N^[2e-ℓ] = (N^[ℓ])^⊥ for all ℓ, by direct orthogonal computation.
pub fn check_pairing_compat<K: Field>(
    k: &K,
    f: &FilteredModule<K::Elem>,
    gram: &Matrix<K::Elem>,
) -> bool {
    let Ok(full) = extend_duality(k, f) else {
        return false;
    };
    (1..=f.e).all(|l| {
        let perp = orthogonal(k, gram, &full[l]);
        crate::linalg::col_space_eq(k, &perp, &full[2 * f.e - l])
    })
}

/// N^[ℓ] totally isotropic for h_ℓ(Q^ℓ x, Q^ℓ y) = <Q^ℓ x, y>, for all ℓ.
/// Works over any chain-ring base of the special fiber.
pub fn check_pairing_compat_h<R: ChainRing>(
    r: &R,
    f: &FilteredModule<R::Elem>,
    gram: &Matrix<R::Elem>,
) -> bool {
    let n = f.rank();
    for l in 1..=f.e {
        let b = f.step(r, l);
        if b.cols == 0 {
            continue;
        }
        let mut q = identity(r, n);
        for i in l..f.e {
            let shifted = sub(
                r,
                &f.pi,
                &crate::linalg::scale(r, &f.pi_images[i], &identity(r, n)),
            );
            q = mul(r, &q, &shifted);
        }
        let Some(y) = chain_solve(r, &q, &b) else {
            return false;
        };
        if !is_zero(r, &mul(r, &mul(r, &b.transpose(), gram), &y)) {
            return false;
        }
    }
    true
}

/// Split filtration: N^[j] spanned by π^{e-1-i}ε_a for a < D and the first
/// i-layers, valid for nonincreasing d.
pub fn split_filtration<R: Ring>(r: &R, e: usize, h: usize, d: &[u32]) -> FilteredModule<R::Elem> {
    let n = e * h;
    let mut order = Vec::new();
    for layer in 0..e {
        for a in 0..h {
            order.push((e - 1 - layer) * h + a);
        }
    }
    let mut steps = Vec::new();
    let mut cols: Vec<usize> = Vec::new();
    for (j, &dj) in d.iter().enumerate() {
        let layer_start = j * h;
        cols.extend(
            order[layer_start..layer_start + dj as usize]
                .iter()
                .copied(),
        );
        steps.push(Matrix::from_fn(n, cols.len(), |i, c| {
            if i == cols[c] {
                r.one()
            } else {
                r.zero()
            }
        }));
    }
    FilteredModule::special(r, e, h, steps, d.to_vec())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::col_space_eq;
    use crate::polygons::{pr_tau, Signature};
    use crate::rings::{FiniteField, SeriesRing};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn f3() -> FiniteField {
        FiniteField::prime(3).unwrap()
    }

    #[test]
    fn split_filtration_is_valid() {
        let k = f3();
        for d in [vec![2, 1], vec![1, 1], vec![2, 2, 0], vec![3, 1, 1]] {
            let f = split_filtration(&k, d.len(), 3, &d);
            assert!(validate_pr(&k, &f).is_valid(), "{d:?}");
        }
    }

    #[test]
    fn rank_violation_is_reported() {
        let k = f3();
        let mut f = split_filtration(&k, 2, 2, &[1, 1]);
        // N^[1] of rank 2 instead of 1
        f.steps[0] = Matrix::from_fn(4, 2, |i, j| if i == 2 + j { 1 } else { 0 });
        let rep = validate_pr(&k, &f);
        assert!(rep.violations.contains(&Violation::Rank {
            step: 1,
            expected: 1,
            found: 2
        }));
    }

    #[test]
    fn containment_violation_is_reported() {
        let k = f3();
        let mut f = split_filtration(&k, 2, 2, &[1, 1]);
        // N^[1] spanned by ε_1, not killed by π
        f.steps[0] = Matrix::from_fn(4, 1, |i, _| if i == 0 { 1 } else { 0 });
        let rep = validate_pr(&k, &f);
        assert!(rep.violations.contains(&Violation::Containment { step: 1 }));
    }

    #[test]
    fn duality_ranks_e2_h2() {
        let k = f3();
        let f = split_filtration(&k, 2, 2, &[1, 1]);
        let full = extend_duality(&k, &f).unwrap();
        let ranks: Vec<usize> = full.iter().map(|m| rank(&k, m)).collect();
        assert_eq!(ranks, vec![0, 1, 2, 3, 4]);
    }

    #[test]
    fn duality_e1_is_whole_ambient() {
        let k = f3();
        let f = split_filtration(&k, 1, 3, &[2]);
        let full = extend_duality(&k, &f).unwrap();
        assert_eq!(rank(&k, &full[2]), 3);
    }

    #[test]
    fn duality_ranks_exhaustive() {
        // rank N^[e+j] = jh + d_1 + … + d_{e-j}
        for q in [2, 3] {
            let k = FiniteField::prime(q).unwrap();
            for e in 1..=3usize {
                for h in 1..=3usize {
                    let mut d = vec![0u32; e];
                    loop {
                        for_each_pr(&k, e, h, &d, Case::AL, 1 << 24, |f| {
                            let full = extend_duality(&k, f).unwrap();
                            for j in 0..=e {
                                let expected = j * h + d[..e - j].iter().sum::<u32>() as usize;
                                assert_eq!(rank(&k, &full[e + j]), expected);
                            }
                            for l in 1..=2 * e {
                                let pre = preimage(&k, &f.pi, &full[l - 1]);
                                assert!(crate::linalg::col_space_contains_all(&k, &pre, &full[l]));
                                assert!(crate::linalg::col_space_contains_all(
                                    &k,
                                    &full[l],
                                    &full[l - 1]
                                ));
                            }
                        })
                        .unwrap();
                        let mut i = 0;
                        while i < e && d[i] == h as u32 {
                            d[i] = 0;
                            i += 1;
                        }
                        if i == e {
                            break;
                        }
                        d[i] += 1;
                    }
                }
            }
        }
    }

    #[test]
    fn non_free_ambient_is_rejected() {
        let k = f3();
        let mut f = split_filtration(&k, 2, 2, &[0, 0]);
        f.pi = zeros(&k, 4, 4);
        assert_eq!(extend_duality(&k, &f), Err(PrError::NotFree));
    }

    #[test]
    fn dual_signatures() {
        let k = f3();
        let f = split_filtration(&k, 2, 2, &[2, 2]);
        let d = dual_datum(&k, &f).unwrap();
        assert_eq!(d.d, vec![0, 0]);
        assert!(validate_pr(&k, &d).is_valid());
        let f = split_filtration(&k, 2, 2, &[1, 1]);
        let d = dual_datum(&k, &f).unwrap();
        assert_eq!(d.d, vec![1, 1]);
        assert!(validate_pr(&k, &d).is_valid());
    }

    #[test]
    fn torsion_examples() {
        let k = f3();
        let pi = standard_pi(&k, 3, 2);
        assert_eq!(torsion_profile(&k, &pi), TorsionProfile(vec![3, 3]));
        assert_eq!(
            torsion_profile(&k, &zeros(&k, 4, 4)),
            TorsionProfile(vec![1, 1, 1, 1])
        );
    }

    #[test]
    fn torsion_profile_is_basis_invariant() {
        let k = FiniteField::prime(5).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let x = crate::linalg::block_diag(
            &k,
            &[
                standard_pi(&k, 3, 1),
                standard_pi(&k, 2, 2),
                zeros(&k, 1, 1),
            ],
        );
        let base = torsion_profile(&k, &x);
        assert_eq!(base, TorsionProfile(vec![1, 2, 2, 3]));
        let mut done = 0;
        while done < 50 {
            let g = Matrix::from_fn(8, 8, |_, _| k.random(&mut rng));
            let Some(gi) = inverse(&k, &g) else { continue };
            let y = mul(&k, &mul(&k, &g, &x), &gi);
            assert_eq!(torsion_profile(&k, &y), base);
            done += 1;
        }
    }

    #[test]
    fn rapoport_examples() {
        let k = f3();
        // ω = k[π]ε_1 free with d = (1, 1)
        let f = split_filtration(&k, 2, 2, &[1, 1]);
        assert!(is_rapoport(&k, &f));
        // ω = π-torsion span(πε_1, πε_2)
        let t = Matrix::from_fn(4, 1, |i, _| if i == 2 { 1 } else { 0 });
        let w = Matrix::from_fn(4, 2, |i, j| if i == 2 + j { 1 } else { 0 });
        let g = FilteredModule::special(&k, 2, 2, vec![t, w], vec![1, 1]);
        assert!(validate_pr(&k, &g).is_valid());
        assert!(!is_rapoport(&k, &g));
        assert_eq!(hodge_profile(&k, &g), TorsionProfile(vec![1, 1]));
        let sig = Signature::new(1, 2, 2, vec![vec![1, 1]]).unwrap();
        assert_eq!(hodge_polygon(&k, &f), pr_tau(&sig, 0));
    }

    #[test]
    fn pairing_compatibility_two_ways() {
        let k = f3();
        let gram = standard_pairing(&k, 2, 1);
        assert_eq!(gram.transpose(), crate::linalg::neg(&k, &gram));
        let pi = standard_pi(&k, 2, 2);
        assert_eq!(mul(&k, &pi.transpose(), &gram), mul(&k, &gram, &pi));
        let mut agree = 0;
        for_each_pr(&k, 2, 2, &[1, 1], Case::AL, 1 << 20, |f| {
            let omega = f.omega();
            let iso = is_zero(&k, &mul(&k, &mul(&k, &omega.transpose(), &gram), omega));
            if iso {
                assert_eq!(
                    check_pairing_compat(&k, f, &gram),
                    check_pairing_compat_h(&k, f, &gram)
                );
                agree += 1;
            }
        })
        .unwrap();
        assert!(agree > 0);
    }

    #[test]
    fn h_compat_over_series_base() {
        let s = SeriesRing::new(f3(), 3);
        let f = split_filtration(&s, 2, 2, &[1, 1]);
        let gram = standard_pairing(&s, 2, 1);
        assert!(validate_pr(&s, &f).is_valid());
        assert!(check_pairing_compat_h(&s, &f, &gram));
    }

    #[test]
    fn double_dual_returns_the_filtration() {
        let k = f3();
        for_each_pr(&k, 2, 2, &[1, 1], Case::AL, 1 << 20, |f| {
            if ambient_is_free(&k, f) {
                let d = dual_datum(&k, f).unwrap();
                assert!(validate_pr(&k, &d).is_valid());
                let dd = dual_datum(&k, &d).unwrap();
                assert_eq!(dd.d, f.d);
                for j in 0..2 {
                    assert!(col_space_eq(&k, &dd.steps[j], &f.steps[j]));
                }
            }
        })
        .unwrap();
    }
}
