//! Totally isotropic lifts of Lagrangians, in general position with respect
//! to a fixed Lagrangian direct factor.

use super::{
    constant, extend_by, generic_rank_local, match_reduction, reduce, strict_upper, Lift, LiftError,
};
use crate::linalg::{
    add, chain_inverse, complete_basis, identity, intersect, is_zero, left_inverse, mul, rank,
    scale, solve, Matrix,
};
use crate::prdata::{orthogonal, standard_pairing};
use crate::rings::{ChainRing, LocalRing, RatFunc, Ring};

/// An alternating perfect Gram matrix K on O^{2g}, a Lagrangian direct factor
/// N and a Lagrangian L̄ of the special fiber.
#[derive(Clone, Debug)]
pub struct PolarizedLiftInstance {
    pub ring: LocalRing,
    pub g: usize,
    pub gram: Matrix<RatFunc>,
    pub n: Matrix<RatFunc>,
    pub lbar: Matrix<u32>,
}

fn is_alternating<R: Ring>(r: &R, m: &Matrix<R::Elem>) -> bool {
    m.rows == m.cols
        && (0..m.rows).all(|i| {
            r.is_zero(&m[(i, i)]) && (0..i).all(|j| r.is_zero(&r.add(&m[(i, j)], &m[(j, i)])))
        })
}

impl PolarizedLiftInstance {
    pub fn new(
        ring: LocalRing,
        gram: Matrix<RatFunc>,
        n: Matrix<RatFunc>,
        lbar: Matrix<u32>,
    ) -> Result<Self, LiftError> {
        let bad = |m: &str| Err(LiftError::InvalidInstance(m.into()));
        let k = ring.k();
        if gram.rows % 2 != 0 || !is_alternating(&ring, &gram) {
            return bad("Gram matrix is not alternating of even size");
        }
        if chain_inverse(&ring, &gram).is_none() {
            return bad("pairing is not perfect");
        }
        let g = gram.rows / 2;
        if n.rows != 2 * g || n.cols != g || left_inverse(&ring, &n).is_none() {
            return bad("N is not a direct factor of rank g");
        }
        if !is_zero(&ring, &mul(&ring, &mul(&ring, &n.transpose(), &gram), &n)) {
            return bad("N is not isotropic");
        }
        if lbar.rows != 2 * g || lbar.cols != g || rank(k, &lbar) != g {
            return bad("L̄ is not of dimension g");
        }
        let kbar = reduce(&ring, &gram);
        if !is_zero(k, &mul(k, &mul(k, &lbar.transpose(), &kbar), &lbar)) {
            return bad("L̄ is not isotropic");
        }
        Ok(PolarizedLiftInstance {
            ring,
            g,
            gram,
            n,
            lbar,
        })
    }
}

/// C with N^T K C = I and C^T K C = 0, from a completion C0 of N.
fn partner<R: ChainRing>(
    r: &R,
    gram: &Matrix<R::Elem>,
    n: &Matrix<R::Elem>,
    c0: &Matrix<R::Elem>,
) -> Matrix<R::Elem> {
    if n.cols == 0 {
        return c0.clone();
    }
    let a = mul(r, &mul(r, &n.transpose(), gram), c0);
    let c1 = mul(
        r,
        c0,
        &chain_inverse(r, &a).expect("N pairs perfectly with its completion"),
    );
    let q = mul(r, &mul(r, &c1.transpose(), gram), &c1);
    add(r, &c1, &mul(r, n, &strict_upper(r, &q)))
}

/// B = [N | C] with B^T K B = J.
pub fn symplectic_basis(
    o: &LocalRing,
    gram: &Matrix<RatFunc>,
    n: &Matrix<RatFunc>,
) -> Matrix<RatFunc> {
    let c0 = constant(o, &complete_basis(o.k(), &reduce(o, n)));
    n.hstack(&partner(o, gram, n, &c0))
}

/// A Lagrangian lift L of L̄ with L ∩ N = 0 on the generic fiber.
///
/// In a symplectic basis [N | C], L̄ = L̄_1 ⊕ N' with N' = N̄ ∩ L̄_1^⊥; the
/// lift is L̄_1 + span(n' + t·c') with c' a symplectic partner of N' inside
/// L̄_1^⊥.
pub fn lift_isotropic(inst: &PolarizedLiftInstance) -> Result<Lift, LiftError> {
    let o = &inst.ring;
    let k = o.k();
    let g = inst.g;
    let nbar = reduce(o, &inst.n);
    if intersect(k, &inst.lbar, &nbar).cols == 0 {
        let basis = constant(o, &inst.lbar);
        let generic = vec![2 * g - generic_rank_local(o, &basis.hstack(&inst.n))];
        return Ok(Lift {
            basis,
            generic_intersections: generic,
        });
    }
    let b = symplectic_basis(o, &inst.gram, &inst.n);
    let j = standard_pairing(k, 1, g);
    let lp = solve(k, &reduce(o, &b), &inst.lbar).expect("B̄ is a basis");
    let top: Matrix<u32> = identity(k, 2 * g).cols_range(0, g);
    let l0 = intersect(k, &lp, &top);
    let l1 = extend_by(k, &l0, &lp);
    let w = orthogonal(k, &j, &l1);
    let nprime = intersect(k, &top, &w);
    let c0 = extend_by(k, &l1.hstack(&nprime), &w);
    let cprime = partner(k, &j, &nprime, &c0);
    let moving = add(
        o,
        &constant(o, &nprime),
        &scale(o, &o.t(), &constant(o, &cprime)),
    );
    let coords = constant(o, &l1).hstack(&moving);
    let basis = match_reduction(o, &mul(o, &b, &coords), &inst.lbar);
    let generic = vec![2 * g - generic_rank_local(o, &basis.hstack(&inst.n))];
    if generic != vec![0] {
        return Err(LiftError::CertificationFailed(format!(
            "L ∩ N has generic dimension {}",
            generic[0]
        )));
    }
    if !is_zero(o, &mul(o, &mul(o, &basis.transpose(), &inst.gram), &basis)) {
        return Err(LiftError::CertificationFailed(
            "lift is not isotropic".into(),
        ));
    }
    Ok(Lift {
        basis,
        generic_intersections: generic,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::prdata::subspaces;
    use crate::rings::FiniteField;

    #[test]
    fn plane_with_its_own_line() {
        let k = FiniteField::prime(2).unwrap();
        let o = LocalRing::new(k.clone());
        let gram = standard_pairing(&o, 1, 1);
        let n = constant(&o, &Matrix::from_rows(vec![vec![1], vec![0]]));
        let lbar = Matrix::from_rows(vec![vec![1], vec![0]]);
        let inst = PolarizedLiftInstance::new(o.clone(), gram, n, lbar).unwrap();
        let lift = lift_isotropic(&inst).unwrap();
        assert_eq!(lift.truncate(&o, 2).col(0), vec![vec![1, 0], vec![0, 1]]);
        assert_eq!(lift.generic_intersections, vec![0]);
    }

    #[test]
    fn transverse_input_is_kept() {
        let k = FiniteField::prime(3).unwrap();
        let o = LocalRing::new(k.clone());
        let gram = standard_pairing(&o, 1, 1);
        let n = constant(&o, &Matrix::from_rows(vec![vec![1], vec![0]]));
        let lbar = Matrix::from_rows(vec![vec![2], vec![1]]);
        let inst = PolarizedLiftInstance::new(o.clone(), gram, n, lbar.clone()).unwrap();
        assert_eq!(lift_isotropic(&inst).unwrap().basis, constant(&o, &lbar));
    }

    #[test]
    fn rejects_non_isotropic() {
        let k = FiniteField::prime(3).unwrap();
        let o = LocalRing::new(k.clone());
        let gram = standard_pairing(&o, 1, 2);
        let n = constant(&o, &identity(&k, 4).cols_range(0, 2));
        let lbar = Matrix::from_rows(vec![vec![1, 0], vec![0, 0], vec![0, 1], vec![0, 0]]);
        assert!(PolarizedLiftInstance::new(o, gram, n, lbar).is_err());
    }

    // Every Lagrangian of F_3^4 against a Lagrangian N, for the standard form
    // and for a form that depends on t.
    #[test]
    fn exhaustive_g2_f3() {
        let k = FiniteField::prime(3).unwrap();
        let o = LocalRing::new(k.clone());
        let j = standard_pairing(&k, 1, 2);
        let mut twisted = standard_pairing(&o, 1, 2);
        let u = o.from_poly(vec![1, 1]);
        twisted[(0, 2)] = u.clone();
        twisted[(2, 0)] = o.neg(&u);
        twisted[(2, 3)] = o.t();
        twisted[(3, 2)] = o.neg(&o.t());
        let lagrangians: Vec<Matrix<u32>> = subspaces(&k, 4, 2)
            .into_iter()
            .filter(|l| is_zero(&k, &mul(&k, &mul(&k, &l.transpose(), &j), l)))
            .collect();
        assert_eq!(lagrangians.len(), 40);
        for gram in [standard_pairing(&o, 1, 2), twisted] {
            let kbar = reduce(&o, &gram);
            let n = constant(&o, &identity(&k, 4).cols_range(0, 2));
            let mut seen = 0;
            for lbar in subspaces(&k, 4, 2) {
                if !is_zero(&k, &mul(&k, &mul(&k, &lbar.transpose(), &kbar), &lbar)) {
                    continue;
                }
                seen += 1;
                let inst =
                    PolarizedLiftInstance::new(o.clone(), gram.clone(), n.clone(), lbar.clone())
                        .unwrap();
                let lift = lift_isotropic(&inst).unwrap();
                assert_eq!(reduce(&o, &lift.basis), lbar);
                assert_eq!(lift.generic_intersections, vec![0]);
            }
            assert_eq!(seen, 40);
        }
    }
}
