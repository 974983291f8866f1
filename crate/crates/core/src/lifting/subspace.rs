//! Lifting a subspace of the special fiber to one in general position with
//! respect to a chain of direct factors.

use super::{constant, extend_by, generic_rank_local, match_reduction, reduce, Lift, LiftError};
use crate::linalg::{
    col_basis, identity, intersect, left_inverse, mul, rank, solve, zeros, Matrix,
};
use crate::rings::{LocalRing, RatFunc, Ring};

/// A chain N_1 ⊆ … ⊆ N_r of direct factors of O^h and a subspace L̄ of the
/// special fiber k^h.
#[derive(Clone, Debug)]
pub struct LiftInstance {
    pub ring: LocalRing,
    pub h: usize,
    pub chain: Vec<Matrix<RatFunc>>,
    pub lbar: Matrix<u32>,
}

impl LiftInstance {
    pub fn new(
        ring: LocalRing,
        h: usize,
        chain: Vec<Matrix<RatFunc>>,
        lbar: Matrix<u32>,
    ) -> Result<Self, LiftError> {
        let k = ring.k();
        if lbar.rows != h || rank(k, &lbar) != lbar.cols {
            return Err(LiftError::InvalidInstance(
                "L̄ must be a basis in k^h".into(),
            ));
        }
        for (i, n) in chain.iter().enumerate() {
            if n.rows != h || (n.cols > 0 && left_inverse(&ring, n).is_none()) {
                return Err(LiftError::InvalidInstance(format!(
                    "N_{} is not a direct factor",
                    i + 1
                )));
            }
            if i > 0 && chain[i - 1].cols > 0 {
                let nested =
                    n.cols > 0 && crate::linalg::chain_solve(&ring, n, &chain[i - 1]).is_some();
                if !nested {
                    return Err(LiftError::InvalidInstance(format!("N_{} ⊄ N_{}", i, i + 1)));
                }
            }
        }
        Ok(LiftInstance {
            ring,
            h,
            chain,
            lbar,
        })
    }

    /// The generic dimensions a lift in general position attains.
    pub fn transverse_dims(&self) -> Vec<usize> {
        let l = self.lbar.cols;
        self.chain
            .iter()
            .map(|n| (l + n.cols).saturating_sub(self.h))
            .collect()
    }

    pub fn special_dims(&self) -> Vec<usize> {
        let k = self.ring.k();
        self.chain
            .iter()
            .map(|n| intersect(k, &self.lbar, &reduce(&self.ring, n)).cols)
            .collect()
    }
}

pub(crate) fn generic_intersections(
    o: &LocalRing,
    basis: &Matrix<RatFunc>,
    chain: &[Matrix<RatFunc>],
) -> Vec<usize> {
    chain
        .iter()
        .map(|n| basis.cols + n.cols - generic_rank_local(o, &basis.hstack(n)))
        .collect()
}

/// A lift L of L̄ with dim(L ∩ N_i) = max(0, l + d_i - h) on the generic
/// fiber for every i. Reduces exactly to the given basis of L̄.
///
/// In a basis f_1, …, f_h adapted to the flag, with L̄ = span(f_j : j ∈ J),
/// the lift is spanned by f_{j_a} + t·f_{h-l+a}; within each flag block the
/// L̄-vectors are placed last, which makes the intersections generic.
pub fn lift_subspace(inst: &LiftInstance) -> Result<Lift, LiftError> {
    let o = &inst.ring;
    let k = o.k();
    let (h, l) = (inst.h, inst.lbar.cols);
    let target = inst.transverse_dims();
    if inst.special_dims() == target {
        let basis = constant(o, &inst.lbar);
        let generic = generic_intersections(o, &basis, &inst.chain);
        return Ok(Lift {
            basis,
            generic_intersections: generic,
        });
    }
    let mut fbar: Matrix<u32> = zeros(k, h, 0);
    let mut flift: Matrix<RatFunc> = zeros(o, h, 0);
    let mut j_idx = Vec::new();
    for i in 0..=inst.chain.len() {
        let (nb, nl) = if i < inst.chain.len() {
            (reduce(o, &inst.chain[i]), inst.chain[i].clone())
        } else {
            (identity(k, h), identity(o, h))
        };
        let cap = if i < inst.chain.len() {
            intersect(k, &inst.lbar, &nb)
        } else {
            col_basis(k, &inst.lbar)
        };
        let lv = extend_by(k, &fbar, &cap);
        let others = extend_by(k, &fbar.hstack(&lv), &nb);
        let block = others.hstack(&lv);
        let coords = solve(k, &nb, &block).expect("block lies in N̄_i");
        let start = fbar.cols;
        j_idx.extend(start + others.cols..start + block.cols);
        fbar = fbar.hstack(&block);
        flift = flift.hstack(&mul(o, &nl, &constant(o, &coords)));
    }
    debug_assert_eq!(fbar.cols, h);
    debug_assert_eq!(j_idx.len(), l);
    let mut lp = zeros(o, h, l);
    for (a, &j) in j_idx.iter().enumerate() {
        lp[(j, a)] = o.one();
        if j != h - l + a {
            lp[(h - l + a, a)] = o.t();
        }
    }
    let basis = match_reduction(o, &mul(o, &flift, &lp), &inst.lbar);
    let generic = generic_intersections(o, &basis, &inst.chain);
    if generic != target {
        return Err(LiftError::CertificationFailed(format!(
            "generic intersections {generic:?}, expected {target:?}"
        )));
    }
    Ok(Lift {
        basis,
        generic_intersections: generic,
    })
}
