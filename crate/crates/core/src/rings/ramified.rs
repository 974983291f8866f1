//! Totally ramified extensions O_m = W_m[π]/(π^e - p) of truncated Witt rings.
//!
//! The Eisenstein polynomial is fixed to E(π) = π^e - p. An element is stored
//! as e blocks of f Witt coordinates, block i holding the coefficient of π^i.
//! Valuations are counted in powers of π; `ramified_val` rescales so that
//! val(p) = 1.

use num_rational::Rational64;

use super::{ChainRing, FiniteField, Frobenius, Ring, WittRing, WittTruncElem};

pub type RamifiedElem = Vec<u64>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RamifiedRing {
    w: WittRing,
    e: usize,
}

/// A valuation normalized by val(p) = 1.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Val {
    Finite(Rational64),
    Infinite,
}

impl RamifiedRing {
    pub fn new(w: WittRing, e: usize) -> Self {
        assert!(e >= 1, "ramification index must be positive");
        RamifiedRing { w, e }
    }

    pub fn with_params(p: u32, f: u32, e: usize, m: u32) -> Result<Self, super::RingError> {
        Ok(Self::new(WittRing::new(p, f, m)?, e))
    }

    pub fn witt(&self) -> &WittRing {
        &self.w
    }
    pub fn e(&self) -> usize {
        self.e
    }
    pub fn f(&self) -> usize {
        self.w.f()
    }
    pub fn p(&self) -> u64 {
        self.w.p()
    }
    pub fn precision(&self) -> u32 {
        self.w.precision()
    }
    pub fn residue_field(&self) -> &FiniteField {
        self.w.residue_field()
    }
    /// Length of O_m as a module over itself, e·m.
    pub fn length(&self) -> u32 {
        self.e as u32 * self.w.precision()
    }

    /// Same ring at another p-adic precision.
    pub fn at_precision(&self, m: u32) -> Result<Self, super::RingError> {
        Ok(Self::new(
            WittRing::over(self.residue_field().clone(), m)?,
            self.e,
        ))
    }

    /// Reduce or extend (by zero-padding the p-adic digits) a representative
    /// from another precision.
    pub fn convert_from(&self, other: &RamifiedRing, a: &RamifiedElem) -> RamifiedElem {
        assert!(
            other.e == self.e && other.f() == self.f(),
            "incompatible rings"
        );
        let q = self.w.modulus();
        a.iter().map(|&c| c % q).collect()
    }

    pub fn coeff(&self, a: &RamifiedElem, i: usize) -> WittTruncElem {
        let f = self.f();
        a[i * f..(i + 1) * f].to_vec()
    }

    pub fn from_coeffs(&self, c: &[WittTruncElem]) -> RamifiedElem {
        let mut out = self.zero();
        let f = self.f();
        for (i, ci) in c.iter().enumerate().take(self.e) {
            out[i * f..(i + 1) * f].copy_from_slice(ci);
        }
        out
    }

    pub fn embed(&self, a: &WittTruncElem) -> RamifiedElem {
        self.from_coeffs(&[a.clone()])
    }

    pub fn pi(&self) -> RamifiedElem {
        if self.e == 1 {
            return self.from_int(self.p() as i64);
        }
        let mut c = vec![self.w.zero(); self.e];
        c[1] = self.w.one();
        self.from_coeffs(&c)
    }

    pub fn pi_pow(&self, k: u32) -> RamifiedElem {
        self.pow(&self.pi(), k as u64)
    }

    /// Division by π of an element of positive valuation (one choice of
    /// quotient).
    pub fn div_pi(&self, a: &RamifiedElem) -> RamifiedElem {
        let e = self.e;
        let mut c: Vec<WittTruncElem> = (0..e).map(|i| self.coeff(a, i)).collect();
        let a0 = self.w.div_p(&c[0]);
        c.remove(0);
        c.push(a0);
        self.from_coeffs(&c)
    }

    /// Residue in the residue field.
    pub fn residue(&self, a: &RamifiedElem) -> u32 {
        self.w.residue(&self.coeff(a, 0))
    }

    /// Image in O/p = k[π]/(π^e), as e residue coordinates.
    pub fn mod_p(&self, a: &RamifiedElem) -> Vec<u32> {
        (0..self.e)
            .map(|i| self.w.residue(&self.coeff(a, i)))
            .collect()
    }

    /// Integer lift of an element of k[π]/(π^e).
    pub fn lift_mod_p(&self, c: &[u32]) -> RamifiedElem {
        let blocks: Vec<WittTruncElem> = c.iter().map(|&g| self.w.lift_residue(g)).collect();
        self.from_coeffs(&blocks)
    }

    pub fn lift_residue(&self, g: u32) -> RamifiedElem {
        self.embed(&self.w.lift_residue(g))
    }

    pub fn teichmuller(&self, g: u32) -> RamifiedElem {
        self.embed(&self.w.teichmuller(g))
    }

    /// π ↦ -π.
    pub fn conj(&self, a: &RamifiedElem) -> RamifiedElem {
        let c: Vec<WittTruncElem> = (0..self.e)
            .map(|i| {
                let ci = self.coeff(a, i);
                if i % 2 == 1 {
                    self.w.neg(&ci)
                } else {
                    ci
                }
            })
            .collect();
        self.from_coeffs(&c)
    }

    pub fn random<G: rand::Rng>(&self, rng: &mut G) -> RamifiedElem {
        (0..self.e * self.f())
            .map(|_| rng.gen_range(0..self.w.modulus()))
            .collect()
    }

    /// Coefficient of π^{e-1}: the trace against the fixed generator
    /// (e π^{e-1})^{-1} of the inverse different.
    pub fn residue_trace(&self, a: &RamifiedElem) -> WittTruncElem {
        self.coeff(a, self.e - 1)
    }

    /// Signed integer coordinates, block by block, for serialization.
    pub fn to_signed(&self, a: &RamifiedElem) -> Vec<Vec<i64>> {
        let q = self.w.modulus() as i64;
        (0..self.e)
            .map(|i| {
                self.coeff(a, i)
                    .into_iter()
                    .map(|c| {
                        if c as i64 > q / 2 {
                            c as i64 - q
                        } else {
                            c as i64
                        }
                    })
                    .collect()
            })
            .collect()
    }

    pub fn from_signed(&self, c: &[Vec<i64>]) -> RamifiedElem {
        let q = self.w.modulus() as i64;
        let f = self.f();
        let mut out = self.zero();
        for (i, block) in c.iter().enumerate().take(self.e) {
            for (j, &x) in block.iter().enumerate().take(f) {
                out[i * f + j] = x.rem_euclid(q) as u64;
            }
        }
        out
    }
}

impl Ring for RamifiedRing {
    type Elem = RamifiedElem;

    fn zero(&self) -> RamifiedElem {
        vec![0u64; self.e * self.f()]
    }
    fn one(&self) -> RamifiedElem {
        self.embed(&self.w.one())
    }
    fn add(&self, a: &RamifiedElem, b: &RamifiedElem) -> RamifiedElem {
        let q = self.w.modulus();
        a.iter().zip(b).map(|(&x, &y)| (x + y) % q).collect()
    }
    fn neg(&self, a: &RamifiedElem) -> RamifiedElem {
        let q = self.w.modulus();
        a.iter().map(|&x| (q - x) % q).collect()
    }
    fn mul(&self, a: &RamifiedElem, b: &RamifiedElem) -> RamifiedElem {
        let e = self.e;
        if e == 1 {
            return self.w.mul(a, b);
        }
        let w = &self.w;
        let ac: Vec<WittTruncElem> = (0..e).map(|i| self.coeff(a, i)).collect();
        let bc: Vec<WittTruncElem> = (0..e).map(|i| self.coeff(b, i)).collect();
        let mut out = vec![w.zero(); e];
        let p = w.p();
        for i in 0..e {
            if w.is_zero(&ac[i]) {
                continue;
            }
            for j in 0..e {
                if w.is_zero(&bc[j]) {
                    continue;
                }
                let prod = w.mul(&ac[i], &bc[j]);
                if i + j < e {
                    out[i + j] = w.add(&out[i + j], &prod);
                } else {
                    out[i + j - e] = w.add(&out[i + j - e], &w.scalar(&prod, p));
                }
            }
        }
        self.from_coeffs(&out)
    }
    fn from_int(&self, n: i64) -> RamifiedElem {
        self.embed(&self.w.from_int(n))
    }
    fn is_zero(&self, a: &RamifiedElem) -> bool {
        a.iter().all(|&c| c == 0)
    }
}

impl ChainRing for RamifiedRing {
    fn val(&self, a: &RamifiedElem) -> Option<u32> {
        (0..self.e)
            .filter_map(|i| {
                self.w
                    .val(&self.coeff(a, i))
                    .map(|v| self.e as u32 * v + i as u32)
            })
            .min()
    }
    fn uniformizer(&self) -> RamifiedElem {
        self.pi()
    }
    fn unit_part(&self, a: &RamifiedElem) -> RamifiedElem {
        match self.val(a) {
            None => self.zero(),
            Some(v) => {
                let mut x = a.clone();
                for _ in 0..v {
                    x = self.div_pi(&x);
                }
                x
            }
        }
    }
    fn inv_unit(&self, a: &RamifiedElem) -> RamifiedElem {
        let k = self.residue_field();
        let r = k.inverse(self.residue(a)).expect("not a unit");
        let mut y = self.lift_residue(r);
        let two = self.from_int(2);
        let mut prec = 1;
        while prec < self.length() {
            y = self.mul(&y, &self.sub(&two, &self.mul(a, &y)));
            prec *= 2;
        }
        y
    }
}

/// σ acts on the Witt coefficients and fixes π.
impl Frobenius for RamifiedRing {
    fn frob(&self, a: &RamifiedElem) -> RamifiedElem {
        let c: Vec<WittTruncElem> = (0..self.e)
            .map(|i| self.w.frob(&self.coeff(a, i)))
            .collect();
        self.from_coeffs(&c)
    }
    fn frob_inv(&self, a: &RamifiedElem) -> RamifiedElem {
        let c: Vec<WittTruncElem> = (0..self.e)
            .map(|i| self.w.frob_inv(&self.coeff(a, i)))
            .collect();
        self.from_coeffs(&c)
    }
}

/// Valuation with val(p) = 1 and val(π) = 1/e; `Infinite` for zero.
pub fn ramified_val(r: &RamifiedRing, x: &RamifiedElem) -> Val {
    match r.val(x) {
        None => Val::Infinite,
        Some(v) => Val::Finite(Rational64::new(v as i64, r.e() as i64)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn normalization() {
        let r = RamifiedRing::with_params(3, 1, 2, 4).unwrap();
        assert_eq!(
            ramified_val(&r, &r.pi()),
            Val::Finite(Rational64::new(1, 2))
        );
        let ppi = r.mul(&r.from_int(3), &r.pi());
        assert_eq!(ramified_val(&r, &ppi), Val::Finite(Rational64::new(3, 2)));
        assert_eq!(
            ramified_val(&r, &r.from_int(2)),
            Val::Finite(Rational64::from_integer(0))
        );
        assert_eq!(ramified_val(&r, &r.zero()), Val::Infinite);
        assert_eq!(r.pow(&r.pi(), 2), r.from_int(3));
    }

    #[test]
    fn division_by_pi_inverts_multiplication() {
        let r = RamifiedRing::with_params(5, 2, 3, 3).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..100 {
            let x = r.random(&mut rng);
            let y = r.mul(&x, &r.pi());
            assert_eq!(r.mul(&r.div_pi(&y), &r.pi()), y);
        }
    }

    #[test]
    fn conjugation_negates_pi() {
        let r = RamifiedRing::with_params(3, 1, 2, 3).unwrap();
        assert_eq!(r.conj(&r.pi()), r.neg(&r.pi()));
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..50 {
            let (a, b) = (r.random(&mut rng), r.random(&mut rng));
            assert_eq!(r.conj(&r.mul(&a, &b)), r.mul(&r.conj(&a), &r.conj(&b)));
        }
    }

    proptest! {
        #[test]
        fn valuation_is_additive_below_precision(seed in 0u64..500) {
            let r = RamifiedRing::with_params(3, 2, 3, 4).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let (a, b) = (r.random(&mut rng), r.random(&mut rng));
            let k: u32 = rand::Rng::gen_range(&mut rng, 0..4);
            let a = r.mul(&a, &r.pi_pow(k));
            if let (Some(va), Some(vb)) = (r.val(&a), r.val(&b)) {
                if va + vb < r.length() {
                    prop_assert_eq!(r.val(&r.mul(&a, &b)), Some(va + vb));
                }
            }
            let c = r.random(&mut rng);
            prop_assert_eq!(r.mul(&a, &r.add(&b, &c)), r.add(&r.mul(&a, &b), &r.mul(&a, &c)));
            prop_assert_eq!(r.mul(&r.mul(&a, &b), &c), r.mul(&a, &r.mul(&b, &c)));
            prop_assert_eq!(r.frob(&r.mul(&a, &b)), r.mul(&r.frob(&a), &r.frob(&b)));
            if r.is_unit(&b) {
                prop_assert_eq!(r.mul(&b, &r.inv_unit(&b)), r.one());
            }
            if let Some(d) = r.div(&a, &b) {
                prop_assert_eq!(r.mul(&b, &d), a.clone());
            }
        }
    }
}
