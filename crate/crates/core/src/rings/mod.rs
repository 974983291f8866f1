//! Coefficient rings: finite fields, polynomials and rational functions over
//! them, truncated power series, truncated Laurent perfections, truncated Witt
//! rings and their totally ramified extensions.
//!
//! Rings are context objects; elements are plain values interpreted by the
//! context that created them.

pub mod gf;
pub mod laurent;
pub mod local;
pub mod poly;
pub mod ramified;
pub mod ratfunc;
pub mod series;
pub mod witt;

use std::fmt::Debug;

pub use gf::{FiniteField, FiniteFieldElem};
pub use laurent::{LaurentPerf, LaurentPerfElem};
pub use local::LocalRing;
pub use poly::{generic_rank, PolyMatrix, PolyRing};
pub use ramified::{ramified_val, RamifiedElem, RamifiedRing, Val};
pub use ratfunc::{RatFunc, RatFuncField};
pub use series::{SeriesRing, TruncSeries};
pub use witt::{witt_frobenius, WittRing, WittTruncElem};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RingError {
    #[error("valuation cannot be certified below the precision ceiling")]
    PrecisionExhausted,
    #[error("exponent denominator bound p^{bound} exceeded")]
    DenominatorBound { bound: u32 },
    #[error("invalid ring parameters: {0}")]
    BadParameters(String),
}

/// A commutative ring with identity.
pub trait Ring {
    type Elem: Clone + PartialEq + Debug;

    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn neg(&self, a: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn from_int(&self, n: i64) -> Self::Elem;

    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        self.add(a, &self.neg(b))
    }

    fn is_zero(&self, a: &Self::Elem) -> bool {
        *a == self.zero()
    }

    fn pow(&self, a: &Self::Elem, mut n: u64) -> Self::Elem {
        let mut base = a.clone();
        let mut acc = self.one();
        while n > 0 {
            if n & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            base = self.mul(&base, &base);
            n >>= 1;
        }
        acc
    }
}

/// A local ring whose ideals form a chain, generated by powers of one
/// uniformizer. Fields are the case of length one.
pub trait ChainRing: Ring {
    /// Exponent of the uniformizer; `None` for zero.
    fn val(&self, a: &Self::Elem) -> Option<u32>;
    fn uniformizer(&self) -> Self::Elem;
    /// Some `u` with `a = u * uniformizer^val(a)`; `u` is a unit.
    fn unit_part(&self, a: &Self::Elem) -> Self::Elem;
    fn inv_unit(&self, a: &Self::Elem) -> Self::Elem;

    fn is_unit(&self, a: &Self::Elem) -> bool {
        self.val(a) == Some(0)
    }

    fn inv(&self, a: &Self::Elem) -> Option<Self::Elem> {
        if self.is_unit(a) {
            Some(self.inv_unit(a))
        } else {
            None
        }
    }

    /// Some `c` with `a = b * c`, provided `val(a) >= val(b)`.
    fn div(&self, a: &Self::Elem, b: &Self::Elem) -> Option<Self::Elem> {
        let vb = self.val(b)?;
        match self.val(a) {
            None => Some(self.zero()),
            Some(va) if va >= vb => {
                let u = self.mul(&self.unit_part(a), &self.inv_unit(&self.unit_part(b)));
                Some(self.mul(&u, &self.pow(&self.uniformizer(), (va - vb) as u64)))
            }
            _ => None,
        }
    }
}

/// Marker for chain rings of length one.
pub trait Field: ChainRing {}

/// Rings carrying a Frobenius automorphism.
pub trait Frobenius: Ring {
    fn frob(&self, a: &Self::Elem) -> Self::Elem;
    fn frob_inv(&self, a: &Self::Elem) -> Self::Elem;

    fn frob_pow(&self, a: &Self::Elem, k: i64) -> Self::Elem {
        let mut x = a.clone();
        if k >= 0 {
            for _ in 0..k {
                x = self.frob(&x);
            }
        } else {
            for _ in 0..(-k) {
                x = self.frob_inv(&x);
            }
        }
        x
    }
}

pub(crate) fn ipow(b: u64, e: u32) -> u64 {
    (0..e).fold(1u64, |acc, _| acc * b)
}

pub(crate) fn is_prime(n: u32) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}
