//! Truncated power series k[t]/(t^T).

use super::{ChainRing, FiniteField, Frobenius, Ring};

pub type TruncSeries = Vec<u32>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SeriesRing {
    pub k: FiniteField,
    pub trunc: usize,
}

impl SeriesRing {
    pub fn new(k: FiniteField, trunc: usize) -> Self {
        assert!(trunc >= 1, "truncation order must be positive");
        SeriesRing { k, trunc }
    }

    pub fn constant(&self, c: u32) -> TruncSeries {
        let mut v = vec![0u32; self.trunc];
        v[0] = c;
        v
    }

    pub fn t(&self) -> TruncSeries {
        self.monomial(1, 1)
    }

    pub fn monomial(&self, c: u32, deg: usize) -> TruncSeries {
        let mut v = vec![0u32; self.trunc];
        if deg < self.trunc {
            v[deg] = c;
        }
        v
    }

    pub fn from_coeffs(&self, c: &[u32]) -> TruncSeries {
        (0..self.trunc).map(|i| *c.get(i).unwrap_or(&0)).collect()
    }

    /// Reduction at t = 0.
    pub fn at_zero(&self, a: &TruncSeries) -> u32 {
        a[0]
    }

    /// Image under k[t]/(t^T) -> k[t]/(t^S), S <= T.
    pub fn restrict(&self, a: &TruncSeries, s: usize) -> TruncSeries {
        a[..s.min(self.trunc)].to_vec()
    }
}

impl Ring for SeriesRing {
    type Elem = TruncSeries;

    fn zero(&self) -> TruncSeries {
        vec![0u32; self.trunc]
    }
    fn one(&self) -> TruncSeries {
        self.constant(1)
    }
    fn add(&self, a: &TruncSeries, b: &TruncSeries) -> TruncSeries {
        a.iter().zip(b).map(|(x, y)| self.k.add(x, y)).collect()
    }
    fn neg(&self, a: &TruncSeries) -> TruncSeries {
        a.iter().map(|x| self.k.neg(x)).collect()
    }
    fn mul(&self, a: &TruncSeries, b: &TruncSeries) -> TruncSeries {
        let n = self.trunc;
        let mut out = vec![0u32; n];
        for i in 0..n {
            if a[i] == 0 {
                continue;
            }
            for j in 0..(n - i) {
                out[i + j] = self.k.add(&out[i + j], &self.k.mul(&a[i], &b[j]));
            }
        }
        out
    }
    fn from_int(&self, n: i64) -> TruncSeries {
        self.constant(self.k.from_int(n))
    }
    fn is_zero(&self, a: &TruncSeries) -> bool {
        a.iter().all(|&c| c == 0)
    }
}

impl ChainRing for SeriesRing {
    fn val(&self, a: &TruncSeries) -> Option<u32> {
        a.iter().position(|&c| c != 0).map(|i| i as u32)
    }
    fn uniformizer(&self) -> TruncSeries {
        self.t()
    }
    fn unit_part(&self, a: &TruncSeries) -> TruncSeries {
        match self.val(a) {
            None => self.zero(),
            Some(v) => {
                let v = v as usize;
                let mut out = vec![0u32; self.trunc];
                out[..self.trunc - v].copy_from_slice(&a[v..]);
                out
            }
        }
    }
    fn inv_unit(&self, a: &TruncSeries) -> TruncSeries {
        let k = &self.k;
        let inv0 = k.inverse(a[0]).expect("not a unit");
        let mut out = vec![0u32; self.trunc];
        for i in 0..self.trunc {
            let mut c = if i == 0 { 1 } else { 0 };
            for j in 1..=i {
                c = k.sub(&c, &k.mul(&a[j], &out[i - j]));
            }
            out[i] = k.mul(&c, &inv0);
        }
        out
    }
}

/// Coefficientwise Frobenius together with t -> t^p.
impl Frobenius for SeriesRing {
    fn frob(&self, a: &TruncSeries) -> TruncSeries {
        let p = self.k.p() as usize;
        let mut out = vec![0u32; self.trunc];
        for (i, c) in a.iter().enumerate() {
            if i * p < self.trunc {
                out[i * p] = self.k.frob(c);
            }
        }
        out
    }
    /// Only defined on series in t^p; other terms are not in the image.
    fn frob_inv(&self, a: &TruncSeries) -> TruncSeries {
        let p = self.k.p() as usize;
        let mut out = vec![0u32; self.trunc];
        for (i, c) in a.iter().enumerate() {
            if *c != 0 {
                assert!(i % p == 0, "not a p-th power");
                out[i / p] = self.k.frob_inv(c);
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn inverse_of_one_minus_t() {
        let s = SeriesRing::new(FiniteField::prime(5).unwrap(), 4);
        let a = s.from_coeffs(&[1, 4]);
        assert_eq!(s.inv_unit(&a), vec![1, 1, 1, 1]);
        assert_eq!(s.div(&s.t(), &s.t()), Some(s.one()));
        assert_eq!(s.div(&s.one(), &s.t()), None);
    }

    proptest! {
        #[test]
        fn reduction_is_a_homomorphism(a in proptest::collection::vec(0u32..3, 8), b in proptest::collection::vec(0u32..3, 8)) {
            let s = SeriesRing::new(FiniteField::prime(3).unwrap(), 8);
            let k = &s.k;
            prop_assert_eq!(s.at_zero(&s.mul(&a, &b)), k.mul(&a[0], &b[0]));
            prop_assert_eq!(s.at_zero(&s.add(&a, &b)), k.add(&a[0], &b[0]));
            if let (Some(va), Some(vb)) = (s.val(&a), s.val(&b)) {
                if va + vb < 8 {
                    prop_assert_eq!(s.val(&s.mul(&a, &b)), Some(va + vb));
                }
                if va >= vb {
                    let c = s.div(&a, &b).unwrap();
                    prop_assert_eq!(s.mul(&b, &c), a.clone());
                }
            }
        }
    }
}
