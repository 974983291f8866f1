//! Truncated perfections R[[t^{1/p^∞}]] over a coefficient ring with Frobenius.
//!
//! An element is a finite sum of c·t^{n/p^d} with a common denominator
//! exponent d, truncated at total degree T. The denominator exponent is capped
//! by a fixed bound; σ^{-1} beyond the cap is an error rather than a silent
//! truncation.

use std::collections::BTreeMap;

use super::{Frobenius, Ring, RingError};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LaurentPerfElem<E> {
    /// Exponents are `n / p^denom_exp`.
    pub denom_exp: u32,
    pub terms: BTreeMap<i64, E>,
}

#[derive(Clone, Debug)]
pub struct LaurentPerf<R: Ring> {
    pub base: R,
    p: i64,
    trunc: i64,
    max_denom_exp: u32,
}

impl<R: Ring + Frobenius> LaurentPerf<R> {
    /// `trunc` is the t-adic truncation degree; `max_denom_exp` bounds the
    /// p-power denominators of exponents.
    pub fn new(base: R, p: u32, trunc: u32, max_denom_exp: u32) -> Self {
        assert!(trunc >= 1, "truncation order must be positive");
        LaurentPerf {
            base,
            p: p as i64,
            trunc: trunc as i64,
            max_denom_exp,
        }
    }

    pub fn trunc(&self) -> u32 {
        self.trunc as u32
    }
    pub fn max_denom_exp(&self) -> u32 {
        self.max_denom_exp
    }

    fn pd(&self, d: u32) -> i64 {
        self.p.pow(d)
    }

    fn normalize(&self, mut x: LaurentPerfElem<R::Elem>) -> LaurentPerfElem<R::Elem> {
        let scale = self.pd(x.denom_exp);
        x.terms
            .retain(|&n, c| n < self.trunc * scale && !self.base.is_zero(c));
        while x.denom_exp > 0 && x.terms.keys().all(|n| n % self.p == 0) {
            x.terms = x.terms.into_iter().map(|(n, c)| (n / self.p, c)).collect();
            x.denom_exp -= 1;
        }
        if x.terms.is_empty() {
            x.denom_exp = 0;
        }
        x
    }

    fn rescale(&self, x: &LaurentPerfElem<R::Elem>, d: u32) -> BTreeMap<i64, R::Elem> {
        let s = self.pd(d - x.denom_exp);
        x.terms.iter().map(|(&n, c)| (n * s, c.clone())).collect()
    }

    pub fn constant(&self, c: R::Elem) -> LaurentPerfElem<R::Elem> {
        self.monomial(c, 0, 0)
    }

    /// c·t^{n/p^d}.
    pub fn monomial(&self, c: R::Elem, n: i64, d: u32) -> LaurentPerfElem<R::Elem> {
        let mut terms = BTreeMap::new();
        terms.insert(n, c);
        self.normalize(LaurentPerfElem {
            denom_exp: d,
            terms,
        })
    }

    pub fn t(&self) -> LaurentPerfElem<R::Elem> {
        self.monomial(self.base.one(), 1, 0)
    }

    pub fn scale(&self, c: &R::Elem, x: &LaurentPerfElem<R::Elem>) -> LaurentPerfElem<R::Elem> {
        let terms = x
            .terms
            .iter()
            .map(|(&n, a)| (n, self.base.mul(c, a)))
            .collect();
        self.normalize(LaurentPerfElem {
            denom_exp: x.denom_exp,
            terms,
        })
    }

    /// Coefficient of t^0.
    pub fn at_zero(&self, x: &LaurentPerfElem<R::Elem>) -> R::Elem {
        x.terms.get(&0).cloned().unwrap_or_else(|| self.base.zero())
    }

    /// Lowest exponent with nonzero coefficient, as (n, d) meaning n/p^d.
    pub fn tval(&self, x: &LaurentPerfElem<R::Elem>) -> Option<(i64, u32)> {
        x.terms.keys().next().map(|&n| (n, x.denom_exp))
    }

    /// σ^{-1}, failing when the denominator bound would be exceeded.
    pub fn try_frob_inv(
        &self,
        x: &LaurentPerfElem<R::Elem>,
    ) -> Result<LaurentPerfElem<R::Elem>, RingError> {
        let terms: BTreeMap<i64, R::Elem> = x
            .terms
            .iter()
            .map(|(&n, c)| (n, self.base.frob_inv(c)))
            .collect();
        if terms.is_empty() {
            return Ok(self.zero());
        }
        if x.denom_exp + 1 > self.max_denom_exp && terms.keys().any(|n| n % self.p != 0) {
            return Err(RingError::DenominatorBound {
                bound: self.max_denom_exp,
            });
        }
        Ok(self.normalize(LaurentPerfElem {
            denom_exp: x.denom_exp + 1,
            terms,
        }))
    }

    /// Image under t^{1/p^d} ↦ σ^{-d}(tau). For a Teichmüller representative
    /// tau this is the specialization t ↦ tau.
    pub fn specialize(&self, x: &LaurentPerfElem<R::Elem>, tau: &R::Elem) -> R::Elem {
        let root = self.base.frob_pow(tau, -(x.denom_exp as i64));
        let mut out = self.base.zero();
        for (&n, c) in &x.terms {
            assert!(n >= 0, "negative exponent");
            out = self
                .base
                .add(&out, &self.base.mul(c, &self.base.pow(&root, n as u64)));
        }
        out
    }

    /// Apply a coefficient map, keeping exponents.
    pub fn map_coeffs<S: Ring + Frobenius, F: Fn(&R::Elem) -> S::Elem>(
        &self,
        target: &LaurentPerf<S>,
        x: &LaurentPerfElem<R::Elem>,
        g: F,
    ) -> LaurentPerfElem<S::Elem> {
        let terms = x.terms.iter().map(|(&n, c)| (n, g(c))).collect();
        target.normalize(LaurentPerfElem {
            denom_exp: x.denom_exp,
            terms,
        })
    }
}

impl<R: Ring + Frobenius> Ring for LaurentPerf<R> {
    type Elem = LaurentPerfElem<R::Elem>;

    fn zero(&self) -> Self::Elem {
        LaurentPerfElem {
            denom_exp: 0,
            terms: BTreeMap::new(),
        }
    }
    fn one(&self) -> Self::Elem {
        self.constant(self.base.one())
    }
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        let d = a.denom_exp.max(b.denom_exp);
        let mut terms = self.rescale(a, d);
        for (n, c) in self.rescale(b, d) {
            let entry = terms.entry(n).or_insert_with(|| self.base.zero());
            *entry = self.base.add(entry, &c);
        }
        self.normalize(LaurentPerfElem {
            denom_exp: d,
            terms,
        })
    }
    fn neg(&self, a: &Self::Elem) -> Self::Elem {
        let terms = a
            .terms
            .iter()
            .map(|(&n, c)| (n, self.base.neg(c)))
            .collect();
        LaurentPerfElem {
            denom_exp: a.denom_exp,
            terms,
        }
    }
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        let d = a.denom_exp.max(b.denom_exp);
        let (ta, tb) = (self.rescale(a, d), self.rescale(b, d));
        let bound = self.trunc * self.pd(d);
        let mut terms: BTreeMap<i64, R::Elem> = BTreeMap::new();
        for (&i, x) in &ta {
            for (&j, y) in &tb {
                if i + j >= bound {
                    break;
                }
                let entry = terms.entry(i + j).or_insert_with(|| self.base.zero());
                *entry = self.base.add(entry, &self.base.mul(x, y));
            }
        }
        self.normalize(LaurentPerfElem {
            denom_exp: d,
            terms,
        })
    }
    fn from_int(&self, n: i64) -> Self::Elem {
        self.constant(self.base.from_int(n))
    }
    fn is_zero(&self, a: &Self::Elem) -> bool {
        a.terms.is_empty()
    }
}

/// σ acts on coefficients and sends t to t^p.
impl<R: Ring + Frobenius> Frobenius for LaurentPerf<R> {
    fn frob(&self, x: &Self::Elem) -> Self::Elem {
        let terms: BTreeMap<i64, R::Elem> = x
            .terms
            .iter()
            .map(|(&n, c)| (n, self.base.frob(c)))
            .collect();
        if x.denom_exp > 0 {
            self.normalize(LaurentPerfElem {
                denom_exp: x.denom_exp - 1,
                terms,
            })
        } else {
            let terms = terms.into_iter().map(|(n, c)| (n * self.p, c)).collect();
            self.normalize(LaurentPerfElem {
                denom_exp: 0,
                terms,
            })
        }
    }
    /// Panics past the denominator bound; use `try_frob_inv` to recover.
    fn frob_inv(&self, x: &Self::Elem) -> Self::Elem {
        self.try_frob_inv(x).expect("denominator bound exceeded")
    }
}
