//! The nilpotent-flag example in dimension 6 showing that the Hodge strata do
//! not form a strong stratification, with an exhaustive finite check.

use serde::{Deserialize, Serialize};

use super::jump_profile;
use crate::linalg::{is_zero, mul, rank, zeros, Matrix};
use crate::rings::{FiniteField, Ring};

/// A flag V_1 ⊂ V_2 ⊂ V_3 = k^n spanned by initial standard vectors, with a
/// strictly flag-lowering π.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NilpotentFlagPoint {
    pub dims: Vec<usize>,
    pub pi: Matrix<u32>,
}

impl NilpotentFlagPoint {
    /// π(V_i) ⊆ V_{i-1}, with V_0 = 0.
    pub fn is_flag_lowering(&self) -> bool {
        let mut lower = 0;
        for &dim in &self.dims {
            for c in lower..dim {
                if (lower..self.pi.rows).any(|r| self.pi[(r, c)] != 0) {
                    return false;
                }
            }
            lower = dim;
        }
        true
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CounterexampleReport {
    pub q: u32,
    pub profile_pi1: Vec<u32>,
    pub profile_pi2: Vec<u32>,
    pub candidates: u64,
    /// Flag-lowering π with π² = 0, rank 3 and π(V_2) = V_1.
    pub count: u64,
}

/// The two points: π_1 sends e_3, e_4 to e_1, e_2 and π_2 sends e_4, e_5, e_6
/// to e_1, e_2, e_3, both for the flag of dimensions (2, 4, 6).
pub fn counterexample_pis(k: &FiniteField) -> (NilpotentFlagPoint, NilpotentFlagPoint) {
    let mut p1 = zeros(k, 6, 6);
    p1[(0, 2)] = 1;
    p1[(1, 3)] = 1;
    let mut p2 = zeros(k, 6, 6);
    for i in 0..3 {
        p2[(i, i + 3)] = 1;
    }
    let dims = vec![2, 4, 6];
    (
        NilpotentFlagPoint {
            dims: dims.clone(),
            pi: p1,
        },
        NilpotentFlagPoint { dims, pi: p2 },
    )
}

/// Exhaustive search over the q^12 flag-lowering matrices [[0, A, B], [0, 0, C],
/// [0, 0, 0]] in 2×2 blocks.
pub fn counterexample_check(k: &FiniteField) -> CounterexampleReport {
    let (p1, p2) = counterexample_pis(k);
    let q = k.order();
    let elems: Vec<u32> = k.elements().collect();
    let mut count = 0;
    let mut candidates = 0u64;
    let mut digits = [0usize; 12];
    loop {
        candidates += 1;
        let x: Vec<u32> = digits.iter().map(|&d| elems[d]).collect();
        // A = x[0..4], B = x[4..8], C = x[8..12], row-major 2×2
        let det_a = k.sub(&k.mul(&x[0], &x[3]), &k.mul(&x[1], &x[2]));
        if det_a != 0 {
            let mut pi = zeros(k, 6, 6);
            for (blk, (r0, c0)) in [(0, 2), (0, 4), (2, 4)].iter().enumerate() {
                for i in 0..2 {
                    for j in 0..2 {
                        pi[(r0 + i, c0 + j)] = x[blk * 4 + 2 * i + j];
                    }
                }
            }
            if is_zero(k, &mul(k, &pi, &pi)) && rank(k, &pi) == 3 {
                count += 1;
            }
        }
        if !super::enumerate::next_digits(&mut digits, elems.len()) {
            break;
        }
    }
    debug_assert_eq!(candidates, (q as u64).pow(12));
    CounterexampleReport {
        q,
        profile_pi1: jump_profile(k, &p1.pi),
        profile_pi2: jump_profile(k, &p2.pi),
        candidates,
        count,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stated_partitions() {
        let k = FiniteField::prime(2).unwrap();
        let (p1, p2) = counterexample_pis(&k);
        assert!(p1.is_flag_lowering() && p2.is_flag_lowering());
        assert_eq!(jump_profile(&k, &p1.pi), vec![4, 2]);
        assert_eq!(jump_profile(&k, &p2.pi), vec![3, 3]);
    }

    #[test]
    fn flag_lowering_detects_violations() {
        let k = FiniteField::prime(2).unwrap();
        let mut pi = zeros(&k, 6, 6);
        pi[(2, 3)] = 1;
        assert!(!NilpotentFlagPoint {
            dims: vec![2, 4, 6],
            pi
        }
        .is_flag_lowering());
    }

    #[test]
    fn constrained_set_is_empty_over_f2() {
        let k = FiniteField::prime(2).unwrap();
        let rep = counterexample_check(&k);
        assert_eq!(rep.candidates, 4096);
        assert_eq!(rep.count, 0);
    }
}
