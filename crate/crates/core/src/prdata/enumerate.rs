//! Exhaustive enumeration of PR filtrations in the special fiber over F_q.

use thiserror::Error;

use super::{
    check_pairing_compat, hodge_polygon, preimage, standard_pairing, standard_pi, FilteredModule,
};
use crate::linalg::{col_basis, mul, zeros, Matrix};
use crate::polygons::{mean, Polygon, Signature};
use crate::rings::{FiniteField, Ring};
use crate::Case;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EnumerateError {
    #[error("search space of {bound} candidates exceeds the budget")]
    BudgetExceeded { bound: u128 },
    #[error("case {0} is not supported")]
    UnsupportedCase(Case),
    #[error("case C needs an even height, got {0}")]
    OddHeight(usize),
}

/// Number of d-dimensional subspaces of F_q^n.
pub fn gaussian_binomial(n: u64, d: u64, q: u64) -> u128 {
    if d > n {
        return 0;
    }
    let q = q as u128;
    let (mut num, mut den) = (1u128, 1u128);
    for i in 0..d {
        num = num.saturating_mul(q.pow((n - i) as u32) - 1);
        den = den.saturating_mul(q.pow((i + 1) as u32) - 1);
    }
    if num == u128::MAX {
        return u128::MAX;
    }
    num / den
}

/// Base-b counter with the last digit fastest; false after the last value.
pub(super) fn next_digits(digits: &mut [usize], base: usize) -> bool {
    for x in digits.iter_mut().rev() {
        *x += 1;
        if *x < base {
            return true;
        }
        *x = 0;
    }
    false
}

/// Next d-subset of 0..n in lexicographic order.
fn next_combination(c: &mut [usize], n: usize) -> bool {
    let d = c.len();
    for i in (0..d).rev() {
        if c[i] < n - d + i {
            c[i] += 1;
            for j in i + 1..d {
                c[j] = c[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// Calls `visit` on each d-dimensional subspace of k^n, given by its reduced
/// column-echelon basis, in lexicographic order of pivot rows then entries.
pub fn for_each_subspace<F: FnMut(&Matrix<u32>)>(
    k: &FiniteField,
    n: usize,
    d: usize,
    mut visit: F,
) {
    if d > n {
        return;
    }
    let elems: Vec<u32> = k.elements().collect();
    let mut pivots: Vec<usize> = (0..d).collect();
    loop {
        let free: Vec<(usize, usize)> = (0..d)
            .flat_map(|c| {
                (pivots[c] + 1..n)
                    .filter(|r| !pivots.contains(r))
                    .map(move |r| (r, c))
            })
            .collect();
        let mut digits = vec![0usize; free.len()];
        loop {
            let mut m = zeros(k, n, d);
            for (c, &p) in pivots.iter().enumerate() {
                m[(p, c)] = k.one();
            }
            for (&(r, c), &dg) in free.iter().zip(&digits) {
                m[(r, c)] = elems[dg];
            }
            visit(&m);
            if !next_digits(&mut digits, elems.len()) {
                break;
            }
        }
        if !next_combination(&mut pivots, n) {
            return;
        }
    }
}

pub fn subspaces(k: &FiniteField, n: usize, d: usize) -> Vec<Matrix<u32>> {
    let mut out = Vec::new();
    for_each_subspace(k, n, d, |m| out.push(m.clone()));
    out
}

fn slice_bound(q: u64, h: usize, d: &[u32]) -> u128 {
    d.iter().fold(1u128, |acc, &dj| {
        acc.saturating_mul(gaussian_binomial(h as u64, dj as u64, q))
    })
}

/// Enumeration over an arbitrary free ambient with nilpotent `pi`; returns the
/// number of visited points. With a Gram matrix, only pairing-compatible
/// filtrations are visited.
#[allow(clippy::too_many_arguments)]
pub fn for_each_pr_on<F: FnMut(&FilteredModule<u32>)>(
    k: &FiniteField,
    pi: &Matrix<u32>,
    e: usize,
    h: usize,
    d: &[u32],
    gram: Option<&Matrix<u32>>,
    budget: u128,
    mut visit: F,
) -> Result<u64, EnumerateError> {
    let bound = slice_bound(k.order() as u64, h, d);
    if bound > budget {
        return Err(EnumerateError::BudgetExceeded { bound });
    }
    let mut count = 0u64;
    let mut steps = Vec::with_capacity(e);
    let start = zeros(k, e * h, 0);
    recurse(
        k, pi, e, h, d, gram, &start, &mut steps, &mut count, &mut visit,
    );
    Ok(count)
}

#[allow(clippy::too_many_arguments)]
fn recurse<F: FnMut(&FilteredModule<u32>)>(
    k: &FiniteField,
    pi: &Matrix<u32>,
    e: usize,
    h: usize,
    d: &[u32],
    gram: Option<&Matrix<u32>>,
    prev: &Matrix<u32>,
    steps: &mut Vec<Matrix<u32>>,
    count: &mut u64,
    visit: &mut F,
) {
    let j = steps.len();
    if j == e {
        let f = FilteredModule {
            e,
            h,
            pi: pi.clone(),
            steps: steps.clone(),
            d: d.to_vec(),
            pi_images: vec![0; e],
        };
        if gram.map_or(true, |g| check_pairing_compat(k, &f, g)) {
            *count += 1;
            visit(&f);
        }
        return;
    }
    let room = col_basis(k, &prev.hstack(&preimage(k, pi, prev)));
    let complement = room.cols_range(prev.cols, room.cols);
    for_each_subspace(k, complement.cols, d[j] as usize, |w| {
        let next = prev.hstack(&mul(k, &complement, w));
        steps.push(next.clone());
        recurse(k, pi, e, h, d, gram, &next, steps, count, visit);
        steps.pop();
    });
}

/// Enumeration on the standard ambient (F_q[π]/π^e)^h. AU is treated as AL.
pub fn for_each_pr<F: FnMut(&FilteredModule<u32>)>(
    k: &FiniteField,
    e: usize,
    h: usize,
    d: &[u32],
    case: Case,
    budget: u128,
    visit: F,
) -> Result<u64, EnumerateError> {
    let pi = standard_pi(k, e, h);
    match case {
        Case::AR => Err(EnumerateError::UnsupportedCase(Case::AR)),
        Case::AL | Case::AU => for_each_pr_on(k, &pi, e, h, d, None, budget, visit),
        Case::C => {
            if h % 2 == 1 {
                return Err(EnumerateError::OddHeight(h));
            }
            let gram = standard_pairing(k, e, h / 2);
            for_each_pr_on(k, &pi, e, h, d, Some(&gram), budget, visit)
        }
    }
}

pub fn enumerate_pr_slice(
    k: &FiniteField,
    e: usize,
    h: usize,
    d: &[u32],
    case: Case,
    budget: u128,
) -> Result<Vec<FilteredModule<u32>>, EnumerateError> {
    let mut out = Vec::new();
    for_each_pr(k, e, h, d, case, budget, |f| out.push(f.clone()))?;
    Ok(out)
}

/// All points for a signature: one filtration per embedding τ, in
/// lexicographic order of the per-τ enumerations.
pub fn enumerate_pr(
    k: &FiniteField,
    sig: &Signature,
    case: Case,
    budget: u128,
) -> Result<Vec<Vec<FilteredModule<u32>>>, EnumerateError> {
    let q = k.order() as u64;
    let h = sig.h as usize;
    let bound = sig
        .d
        .iter()
        .fold(1u128, |acc, d| acc.saturating_mul(slice_bound(q, h, d)));
    if bound > budget {
        return Err(EnumerateError::BudgetExceeded { bound });
    }
    let mut points: Vec<Vec<FilteredModule<u32>>> = vec![vec![]];
    for d in &sig.d {
        let slice = enumerate_pr_slice(k, sig.e, h, d, case, budget)?;
        let mut next = Vec::with_capacity(points.len() * slice.len());
        for p in &points {
            for s in &slice {
                let mut v = p.clone();
                v.push(s.clone());
                next.push(v);
            }
        }
        points = next;
    }
    Ok(points)
}

/// Hodge polygon of a point: the average of the per-embedding polygons.
pub fn point_hodge_polygon(k: &FiniteField, point: &[FilteredModule<u32>]) -> Polygon {
    let ps: Vec<Polygon> = point.iter().map(|f| hodge_polygon(k, f)).collect();
    mean(&ps).expect("slices share their width")
}

/// Point counts for each Hodge stratum, in order of first appearance.
pub fn stratum_counts(
    k: &FiniteField,
    sig: &Signature,
    case: Case,
    budget: u128,
) -> Result<Vec<(Polygon, u64)>, EnumerateError> {
    let mut out: Vec<(Polygon, u64)> = Vec::new();
    for point in enumerate_pr(k, sig, case, budget)? {
        let p = point_hodge_polygon(k, &point);
        match out.iter_mut().find(|(q, _)| *q == p) {
            Some(entry) => entry.1 += 1,
            None => out.push((p, 1)),
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{inverse, rank};
    use crate::polygons::{pr_from_signature, pr_tau};
    use crate::prdata::{is_rapoport, validate_pr};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn gaussian_binomial_values() {
        assert_eq!(gaussian_binomial(2, 1, 2), 3);
        assert_eq!(gaussian_binomial(4, 2, 2), 35);
        assert_eq!(gaussian_binomial(4, 2, 3), 130);
        assert_eq!(gaussian_binomial(3, 0, 5), 1);
        assert_eq!(gaussian_binomial(2, 3, 5), 0);
    }

    #[test]
    fn subspace_counts_and_order() {
        for q in [2, 3] {
            let k = FiniteField::prime(q).unwrap();
            for n in 0..5 {
                for d in 0..=n {
                    let all = subspaces(&k, n, d);
                    assert_eq!(
                        all.len() as u128,
                        gaussian_binomial(n as u64, d as u64, q as u64)
                    );
                    assert!(all.iter().all(|m| rank(&k, m) == d));
                    for (i, a) in all.iter().enumerate() {
                        for b in &all[i + 1..] {
                            assert!(!crate::linalg::col_space_eq(&k, a, b));
                        }
                    }
                }
            }
        }
        let k = FiniteField::prime(2).unwrap();
        let first = &subspaces(&k, 3, 1)[0];
        assert_eq!(first.col(0), vec![1, 0, 0]);
    }

    #[test]
    fn e1_counts_are_gaussian_binomials() {
        for q in [2u32, 3] {
            let k = FiniteField::prime(q).unwrap();
            for h in 1..=4 {
                for d in 0..=h {
                    let n = for_each_pr(&k, 1, h, &[d as u32], Case::AL, 1 << 30, |_| {}).unwrap();
                    assert_eq!(n as u128, gaussian_binomial(h as u64, d as u64, q as u64));
                }
            }
        }
    }

    #[test]
    fn hand_enumeration_e2_h1() {
        // N^[1] must lie in ker π = span(πε), and N^[2] = N^[1]
        let k = FiniteField::prime(2).unwrap();
        let all = enumerate_pr_slice(&k, 2, 1, &[1, 0], Case::AL, 1 << 20).unwrap();
        assert_eq!(all.len(), 1);
        assert_eq!(all[0].steps[0].col(0), vec![0, 1]);
        // d = (1, 1): N^[1] = πε, N^[2] = everything
        assert_eq!(
            enumerate_pr_slice(&k, 2, 1, &[1, 1], Case::AL, 1 << 20)
                .unwrap()
                .len(),
            1
        );
        // d = (0, 1): N^[2] a line killed by π, so πε again
        assert_eq!(
            enumerate_pr_slice(&k, 2, 1, &[0, 1], Case::AL, 1 << 20)
                .unwrap()
                .len(),
            1
        );
    }

    #[test]
    fn enumerated_points_validate() {
        let k = FiniteField::prime(2).unwrap();
        for d in [[1u32, 1], [2, 0], [0, 2], [1, 0], [2, 1]] {
            let n = for_each_pr(&k, 2, 2, &d, Case::AL, 1 << 20, |f| {
                assert!(validate_pr(&k, f).is_valid());
            })
            .unwrap();
            assert!(n > 0);
        }
        for_each_pr(&k, 3, 2, &[1, 1, 1], Case::AL, 1 << 20, |f| {
            assert!(validate_pr(&k, f).is_valid());
        })
        .unwrap();
    }

    #[test]
    fn counts_invariant_under_basis_change() {
        let k = FiniteField::prime(3).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let pi = standard_pi(&k, 2, 2);
        let base = for_each_pr_on(&k, &pi, 2, 2, &[1, 1], None, 1 << 20, |_| {}).unwrap();
        for _ in 0..3 {
            let g = loop {
                let g = Matrix::from_fn(4, 4, |_, _| k.random(&mut rng));
                if let Some(gi) = inverse(&k, &g) {
                    break (g, gi);
                }
            };
            let conj = mul(&k, &mul(&k, &g.0, &pi), &g.1);
            let n = for_each_pr_on(&k, &conj, 2, 2, &[1, 1], None, 1 << 20, |_| {}).unwrap();
            assert_eq!(n, base);
        }
    }

    #[test]
    fn budget_is_enforced() {
        let k = FiniteField::prime(3).unwrap();
        let err = for_each_pr(&k, 2, 4, &[2, 2], Case::AL, 100, |_| {}).unwrap_err();
        assert_eq!(err, EnumerateError::BudgetExceeded { bound: 130 * 130 });
        assert!(matches!(
            for_each_pr(&k, 2, 2, &[1, 1], Case::AR, 1 << 20, |_| {}),
            Err(EnumerateError::UnsupportedCase(Case::AR))
        ));
    }

    #[test]
    fn rapoport_iff_hodge_equals_pr() {
        let k = FiniteField::prime(2).unwrap();
        for d in [[1u32, 1], [2, 0], [1, 0], [2, 1], [0, 1]] {
            let sig = Signature::new(1, 2, 2, vec![d.to_vec()]).unwrap();
            let pr = pr_tau(&sig, 0);
            for_each_pr(&k, 2, 2, &d, Case::AL, 1 << 20, |f| {
                assert_eq!(is_rapoport(&k, f), hodge_polygon(&k, f) == pr, "{f:?}");
            })
            .unwrap();
        }
    }

    #[test]
    fn case_c_points_are_lagrangian() {
        let k = FiniteField::prime(3).unwrap();
        let gram = standard_pairing(&k, 2, 1);
        let all = enumerate_pr_slice(&k, 2, 2, &[1, 1], Case::C, 1 << 20).unwrap();
        let al = enumerate_pr_slice(&k, 2, 2, &[1, 1], Case::AL, 1 << 20).unwrap();
        assert!(!all.is_empty() && all.len() <= al.len());
        for f in &all {
            let w = f.omega();
            assert!(crate::linalg::is_zero(
                &k,
                &mul(&k, &mul(&k, &w.transpose(), &gram), w)
            ));
        }
    }

    #[test]
    fn strata_cover_all_points() {
        let k = FiniteField::prime(2).unwrap();
        let sig = Signature::new(2, 2, 2, vec![vec![1, 1], vec![1, 0]]).unwrap();
        let strata = stratum_counts(&k, &sig, Case::AL, 1 << 20).unwrap();
        let total: u64 = strata.iter().map(|s| s.1).sum();
        let a = enumerate_pr_slice(&k, 2, 2, &[1, 1], Case::AL, 1 << 20)
            .unwrap()
            .len();
        let b = enumerate_pr_slice(&k, 2, 2, &[1, 0], Case::AL, 1 << 20)
            .unwrap()
            .len();
        assert_eq!(total as usize, a * b);
        let pr = pr_from_signature(&sig);
        // every Hodge polygon lies on or above the PR polygon
        for (p, _) in &strata {
            assert!(crate::polygons::dominates(p, &pr).unwrap());
        }
        assert!(strata.iter().any(|(p, _)| *p == pr));
    }
}
