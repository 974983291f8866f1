//! The discrete valuation ring k[t]_(t) inside k(t): exact lifts over k[[t]]
//! whose entries happen to be rational.

use super::poly::Poly;
use super::{ChainRing, FiniteField, RatFunc, RatFuncField, Ring};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LocalRing {
    pub field: RatFuncField,
}

impl LocalRing {
    pub fn new(k: FiniteField) -> Self {
        LocalRing {
            field: RatFuncField::new(k),
        }
    }

    pub fn k(&self) -> &FiniteField {
        self.field.k()
    }

    pub fn constant(&self, c: u32) -> RatFunc {
        self.field.constant(c)
    }

    pub fn t(&self) -> RatFunc {
        self.field.t()
    }

    pub fn from_poly(&self, a: Poly) -> RatFunc {
        self.field.from_poly(a)
    }

    pub fn at_zero(&self, a: &RatFunc) -> u32 {
        self.field.at_zero(a)
    }

    /// Image in k[t]/(t^n).
    pub fn truncate(&self, a: &RatFunc, n: usize) -> Vec<u32> {
        self.field.expand(a, n)
    }
}

impl Ring for LocalRing {
    type Elem = RatFunc;

    fn zero(&self) -> RatFunc {
        self.field.zero()
    }
    fn one(&self) -> RatFunc {
        self.field.one()
    }
    fn add(&self, a: &RatFunc, b: &RatFunc) -> RatFunc {
        self.field.add(a, b)
    }
    fn neg(&self, a: &RatFunc) -> RatFunc {
        self.field.neg(a)
    }
    fn mul(&self, a: &RatFunc, b: &RatFunc) -> RatFunc {
        self.field.mul(a, b)
    }
    fn from_int(&self, n: i64) -> RatFunc {
        self.field.from_int(n)
    }
    fn is_zero(&self, a: &RatFunc) -> bool {
        self.field.is_zero(a)
    }
}

impl ChainRing for LocalRing {
    fn val(&self, a: &RatFunc) -> Option<u32> {
        let v = self.field.tval(a)?;
        assert!(v >= 0, "element outside k[t]_(t)");
        Some(v as u32)
    }
    fn uniformizer(&self) -> RatFunc {
        self.field.t()
    }
    fn unit_part(&self, a: &RatFunc) -> RatFunc {
        match self.val(a) {
            None => self.zero(),
            Some(v) => {
                let mut tv = vec![0u32; v as usize + 1];
                tv[v as usize] = 1;
                self.field.mul(a, &self.field.make(vec![1], tv))
            }
        }
    }
    fn inv_unit(&self, a: &RatFunc) -> RatFunc {
        assert_eq!(self.val(a), Some(0), "inverse of a non-unit");
        self.field.inverse(a).unwrap()
    }
}
