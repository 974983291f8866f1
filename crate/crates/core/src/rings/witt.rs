//! Truncated Witt vectors W(F_{p^f})/p^m in the polynomial model
//! (Z/p^m)[x]/(P(x)), where P is the integer lift (digits 0..p-1) of the
//! residue field's defining polynomial.

use std::sync::Arc;

use super::{ipow, ChainRing, FiniteField, Frobenius, Ring, RingError};

pub type WittTruncElem = Vec<u64>;

#[derive(Debug)]
struct Data {
    k: FiniteField,
    p: u64,
    f: usize,
    m: u32,
    modulus: u64,
    /// Monic lift of the residue modulus, degree 0 to f.
    lift: Vec<u64>,
    /// Column j holds the coordinates of sigma(x^j).
    sigma: Vec<Vec<u64>>,
    sigma_inv: Vec<Vec<u64>>,
}

#[derive(Clone, Debug)]
pub struct WittRing {
    d: Arc<Data>,
}

impl PartialEq for WittRing {
    fn eq(&self, other: &Self) -> bool {
        self.d.p == other.d.p && self.d.f == other.d.f && self.d.m == other.d.m
    }
}

impl Eq for WittRing {}

fn vp(mut a: u64, p: u64) -> u32 {
    let mut v = 0;
    while a % p == 0 {
        a /= p;
        v += 1;
    }
    v
}

impl WittRing {
    pub fn new(p: u32, f: u32, m: u32) -> Result<Self, RingError> {
        let k = FiniteField::new(p, f)?;
        Self::over(k, m)
    }

    pub fn over(k: FiniteField, m: u32) -> Result<Self, RingError> {
        let p = k.p() as u64;
        if m == 0 {
            return Err(RingError::BadParameters(
                "precision m must be at least 1".into(),
            ));
        }
        let modulus = (p as u128)
            .checked_pow(m)
            .filter(|&q| q < (1u128 << 62))
            .ok_or_else(|| RingError::BadParameters(format!("p^m = {p}^{m} too large")))?
            as u64;
        let f = k.degree() as usize;
        let lift = k.modulus().iter().map(|&c| c as u64).collect();
        let ident: Vec<Vec<u64>> = (0..f)
            .map(|j| {
                let mut v = vec![0u64; f];
                v[j] = 1;
                v
            })
            .collect();
        let mut w = WittRing {
            d: Arc::new(Data {
                k,
                p,
                f,
                m,
                modulus,
                lift,
                sigma: ident.clone(),
                sigma_inv: ident,
            }),
        };
        if f > 1 {
            let s = w.hensel_sigma_x();
            let mut cols = vec![w.one()];
            for j in 1..f {
                cols.push(w.mul(&cols[j - 1], &s));
            }
            let sigma = cols;
            Arc::get_mut(&mut w.d).unwrap().sigma = sigma;
            let mut inv = Vec::with_capacity(f);
            for j in 0..f {
                let mut v = vec![0u64; f];
                v[j] = 1;
                for _ in 0..(f - 1) {
                    v = w.frob(&v);
                }
                inv.push(v);
            }
            Arc::get_mut(&mut w.d).unwrap().sigma_inv = inv;
        }
        Ok(w)
    }

    /// Root of the lifted modulus congruent to x^p, by Newton iteration.
    fn hensel_sigma_x(&self) -> WittTruncElem {
        let k = &self.d.k;
        let xp = k.pow(&k.generator(), k.p() as u64);
        let mut s = self.lift_residue(xp);
        for _ in 0..(self.d.m + 1) {
            let val = self.eval_lift(&s);
            let der = self.eval_lift_derivative(&s);
            s = self.sub(&s, &self.mul(&val, &self.inv_unit(&der)));
        }
        s
    }

    fn eval_lift(&self, s: &WittTruncElem) -> WittTruncElem {
        let mut acc = self.zero();
        for &c in self.d.lift.iter().rev() {
            acc = self.add(&self.mul(&acc, s), &self.from_int(c as i64));
        }
        acc
    }

    fn eval_lift_derivative(&self, s: &WittTruncElem) -> WittTruncElem {
        let mut acc = self.zero();
        for (i, &c) in self.d.lift.iter().enumerate().skip(1).rev() {
            acc = self.add(&self.mul(&acc, s), &self.from_int((c * i as u64) as i64));
        }
        acc
    }

    pub fn residue_field(&self) -> &FiniteField {
        &self.d.k
    }
    pub fn p(&self) -> u64 {
        self.d.p
    }
    pub fn f(&self) -> usize {
        self.d.f
    }
    pub fn precision(&self) -> u32 {
        self.d.m
    }
    /// p^m.
    pub fn modulus(&self) -> u64 {
        self.d.modulus
    }

    fn reduce_int(&self, a: u128) -> u64 {
        (a % self.d.modulus as u128) as u64
    }

    pub fn residue(&self, a: &WittTruncElem) -> u32 {
        let p = self.d.p;
        let digits: Vec<u32> = a.iter().map(|&c| (c % p) as u32).collect();
        self.d.k.from_digits(&digits)
    }

    /// Coordinatewise integer lift of a residue class (digits in 0..p).
    pub fn lift_residue(&self, g: u32) -> WittTruncElem {
        self.d.k.digits(g).into_iter().map(|c| c as u64).collect()
    }

    pub fn teichmuller(&self, g: u32) -> WittTruncElem {
        let q = self.d.k.order() as u64;
        let mut y = self.lift_residue(g);
        for _ in 0..self.d.m {
            y = self.pow(&y, q);
        }
        y
    }

    pub fn scalar(&self, a: &WittTruncElem, n: u64) -> WittTruncElem {
        a.iter()
            .map(|&c| self.reduce_int(c as u128 * n as u128))
            .collect()
    }

    /// Signed representative of an element of the prime subring.
    pub fn as_signed_int(&self, a: &WittTruncElem) -> Option<i64> {
        if a[1..].iter().any(|&c| c != 0) {
            return None;
        }
        let q = self.d.modulus;
        Some(if a[0] > q / 2 {
            a[0] as i64 - q as i64
        } else {
            a[0] as i64
        })
    }

    pub fn random<G: rand::Rng>(&self, rng: &mut G) -> WittTruncElem {
        (0..self.d.f)
            .map(|_| rng.gen_range(0..self.d.modulus))
            .collect()
    }

    /// Exact division by p, for elements of positive valuation.
    pub fn div_p(&self, a: &WittTruncElem) -> WittTruncElem {
        let p = self.d.p;
        assert!(a.iter().all(|&c| c % p == 0), "not divisible by p");
        a.iter().map(|&c| c / p).collect()
    }
}

impl Ring for WittRing {
    type Elem = WittTruncElem;

    fn zero(&self) -> WittTruncElem {
        vec![0u64; self.d.f]
    }
    fn one(&self) -> WittTruncElem {
        let mut v = self.zero();
        v[0] = 1 % self.d.modulus;
        v
    }
    fn add(&self, a: &WittTruncElem, b: &WittTruncElem) -> WittTruncElem {
        let q = self.d.modulus;
        a.iter().zip(b).map(|(&x, &y)| (x + y) % q).collect()
    }
    fn neg(&self, a: &WittTruncElem) -> WittTruncElem {
        let q = self.d.modulus;
        a.iter().map(|&x| (q - x) % q).collect()
    }
    fn mul(&self, a: &WittTruncElem, b: &WittTruncElem) -> WittTruncElem {
        let f = self.d.f;
        let q = self.d.modulus as u128;
        if f == 1 {
            return vec![(a[0] as u128 * b[0] as u128 % q) as u64];
        }
        let mut prod = vec![0u128; 2 * f - 1];
        for i in 0..f {
            if a[i] == 0 {
                continue;
            }
            for j in 0..f {
                prod[i + j] = (prod[i + j] + a[i] as u128 * b[j] as u128) % q;
            }
        }
        for d in (f..2 * f - 1).rev() {
            let c = prod[d];
            if c == 0 {
                continue;
            }
            for i in 0..f {
                let t = c * self.d.lift[i] as u128 % q;
                prod[d - f + i] = (prod[d - f + i] + q - t) % q;
            }
            prod[d] = 0;
        }
        prod[..f].iter().map(|&c| c as u64).collect()
    }
    fn from_int(&self, n: i64) -> WittTruncElem {
        let mut v = self.zero();
        v[0] = n.rem_euclid(self.d.modulus as i64) as u64;
        v
    }
    fn is_zero(&self, a: &WittTruncElem) -> bool {
        a.iter().all(|&c| c == 0)
    }
}

impl ChainRing for WittRing {
    fn val(&self, a: &WittTruncElem) -> Option<u32> {
        a.iter()
            .filter(|&&c| c != 0)
            .map(|&c| vp(c, self.d.p))
            .min()
    }
    fn uniformizer(&self) -> WittTruncElem {
        self.from_int(self.d.p as i64)
    }
    fn unit_part(&self, a: &WittTruncElem) -> WittTruncElem {
        match self.val(a) {
            None => self.zero(),
            Some(v) => {
                let d = ipow(self.d.p, v);
                a.iter().map(|&c| c / d).collect()
            }
        }
    }
    fn inv_unit(&self, a: &WittTruncElem) -> WittTruncElem {
        let k = &self.d.k;
        let r = k.inverse(self.residue(a)).expect("not a unit");
        let mut y = self.lift_residue(r);
        let two = self.from_int(2);
        let mut prec = 1;
        while prec < self.d.m {
            y = self.mul(&y, &self.sub(&two, &self.mul(a, &y)));
            prec *= 2;
        }
        y
    }
}

impl Frobenius for WittRing {
    fn frob(&self, a: &WittTruncElem) -> WittTruncElem {
        apply(self, &self.d.sigma, a)
    }
    fn frob_inv(&self, a: &WittTruncElem) -> WittTruncElem {
        apply(self, &self.d.sigma_inv, a)
    }
}

fn apply(w: &WittRing, cols: &[Vec<u64>], a: &WittTruncElem) -> WittTruncElem {
    let q = w.d.modulus as u128;
    let f = w.d.f;
    let mut out = vec![0u128; f];
    for (j, &aj) in a.iter().enumerate() {
        if aj == 0 {
            continue;
        }
        for i in 0..f {
            out[i] = (out[i] + aj as u128 * cols[j][i] as u128) % q;
        }
    }
    out.into_iter().map(|c| c as u64).collect()
}

/// The Frobenius lift sigma on W(F_{p^f})/p^m.
pub fn witt_frobenius(w: &WittRing, x: &WittTruncElem) -> WittTruncElem {
    w.frob(x)
}
