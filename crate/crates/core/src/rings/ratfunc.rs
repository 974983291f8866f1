//! The rational function field k(t), with exact normalized fractions.

use super::poly::{trim, Poly, PolyRing};
use super::{ChainRing, Field, FiniteField, Ring};

/// `num / den` with `den` monic and coprime to `num`; zero is `0 / 1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RatFunc {
    pub num: Poly,
    pub den: Poly,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RatFuncField {
    pub polys: PolyRing,
}

impl RatFuncField {
    pub fn new(k: FiniteField) -> Self {
        RatFuncField {
            polys: PolyRing::new(k),
        }
    }

    pub fn k(&self) -> &FiniteField {
        &self.polys.k
    }

    pub fn make(&self, num: Poly, den: Poly) -> RatFunc {
        let r = &self.polys;
        let (num, den) = (trim(num), trim(den));
        assert!(!den.is_empty(), "zero denominator");
        if num.is_empty() {
            return RatFunc {
                num: Vec::new(),
                den: vec![1],
            };
        }
        let g = r.gcd(&num, &den);
        let (mut n, mut d) = (r.divexact(&num, &g), r.divexact(&den, &g));
        let l = r.lead(&d);
        if l != 1 {
            let inv = r.k.inverse(l).unwrap();
            n = r.scale(&n, inv);
            d = r.scale(&d, inv);
        }
        RatFunc { num: n, den: d }
    }

    pub fn from_poly(&self, a: Poly) -> RatFunc {
        RatFunc {
            num: trim(a),
            den: vec![1],
        }
    }

    pub fn constant(&self, c: u32) -> RatFunc {
        self.from_poly(vec![c])
    }

    pub fn t(&self) -> RatFunc {
        self.from_poly(vec![0, 1])
    }

    /// t-adic valuation; `None` for zero.
    pub fn tval(&self, a: &RatFunc) -> Option<i64> {
        let n = self.polys.ord_t(&a.num)? as i64;
        let d = self.polys.ord_t(&a.den).unwrap() as i64;
        Some(n - d)
    }

    /// Whether `a` lies in the local ring k[t]_(t).
    pub fn is_integral(&self, a: &RatFunc) -> bool {
        a.den[0] != 0
    }

    /// Value at t = 0 of an element of k[t]_(t).
    pub fn at_zero(&self, a: &RatFunc) -> u32 {
        assert!(self.is_integral(a), "pole at t = 0");
        let n = a.num.first().copied().unwrap_or(0);
        self.k().mul(&n, &self.k().inverse(a.den[0]).unwrap())
    }

    /// Power-series coefficients up to t^{n-1} of an element of k[t]_(t).
    pub fn expand(&self, a: &RatFunc, n: usize) -> Vec<u32> {
        assert!(self.is_integral(a), "pole at t = 0");
        let k = self.k();
        let inv0 = k.inverse(a.den[0]).unwrap();
        let mut out = vec![0u32; n];
        for i in 0..n {
            let mut c = *a.num.get(i).unwrap_or(&0);
            for j in 1..=i.min(a.den.len().saturating_sub(1)) {
                c = k.sub(&c, &k.mul(&a.den[j], &out[i - j]));
            }
            out[i] = k.mul(&c, &inv0);
        }
        out
    }

    pub fn inverse(&self, a: &RatFunc) -> Option<RatFunc> {
        if a.num.is_empty() {
            None
        } else {
            Some(self.make(a.den.clone(), a.num.clone()))
        }
    }
}

impl Ring for RatFuncField {
    type Elem = RatFunc;

    fn zero(&self) -> RatFunc {
        RatFunc {
            num: Vec::new(),
            den: vec![1],
        }
    }
    fn one(&self) -> RatFunc {
        RatFunc {
            num: vec![1],
            den: vec![1],
        }
    }
    fn add(&self, a: &RatFunc, b: &RatFunc) -> RatFunc {
        let r = &self.polys;
        if a.den == b.den {
            return self.make(r.add(&a.num, &b.num), a.den.clone());
        }
        self.make(
            r.add(&r.mul(&a.num, &b.den), &r.mul(&b.num, &a.den)),
            r.mul(&a.den, &b.den),
        )
    }
    fn neg(&self, a: &RatFunc) -> RatFunc {
        RatFunc {
            num: self.polys.neg(&a.num),
            den: a.den.clone(),
        }
    }
    fn mul(&self, a: &RatFunc, b: &RatFunc) -> RatFunc {
        let r = &self.polys;
        if a.num.is_empty() || b.num.is_empty() {
            return self.zero();
        }
        self.make(r.mul(&a.num, &b.num), r.mul(&a.den, &b.den))
    }
    fn from_int(&self, n: i64) -> RatFunc {
        self.from_poly(vec![self.k().from_int(n)])
    }
    fn is_zero(&self, a: &RatFunc) -> bool {
        a.num.is_empty()
    }
}

impl ChainRing for RatFuncField {
    fn val(&self, a: &RatFunc) -> Option<u32> {
        if a.num.is_empty() {
            None
        } else {
            Some(0)
        }
    }
    fn uniformizer(&self) -> RatFunc {
        self.zero()
    }
    fn unit_part(&self, a: &RatFunc) -> RatFunc {
        a.clone()
    }
    fn inv_unit(&self, a: &RatFunc) -> RatFunc {
        self.inverse(a).expect("inverse of zero")
    }
}

impl Field for RatFuncField {}
