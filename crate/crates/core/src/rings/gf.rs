//! Finite fields F_{p^f} in a polynomial basis.
//!
//! An element is a `u32` whose base-p digits are its coordinates against
//! 1, x, ..., x^{f-1}, where x is a root of the lexicographically smallest
//! monic primitive polynomial of degree f.

use std::sync::Arc;

use super::{is_prime, ChainRing, Field, Frobenius, Ring, RingError};

pub type FiniteFieldElem = u32;

#[derive(Debug)]
struct Tables {
    p: u32,
    f: u32,
    q: u32,
    /// Monic modulus, coefficients from degree 0 to f.
    modulus: Vec<u32>,
    exp: Vec<u32>,
    log: Vec<u32>,
}

#[derive(Clone, Debug)]
pub struct FiniteField {
    t: Arc<Tables>,
}

impl PartialEq for FiniteField {
    fn eq(&self, other: &Self) -> bool {
        self.t.p == other.t.p && self.t.f == other.t.f
    }
}

impl Eq for FiniteField {}

fn poly_mulx_mod(v: &mut [u32], modulus: &[u32], p: u32) {
    let f = v.len();
    let top = v[f - 1];
    for i in (1..f).rev() {
        v[i] = v[i - 1];
    }
    v[0] = 0;
    if top != 0 {
        for i in 0..f {
            v[i] = (v[i] + (p - top) * modulus[i]) % p;
        }
    }
}

fn primitive_modulus(p: u32, f: u32) -> Vec<u32> {
    let q = p.pow(f);
    if f == 1 {
        // x - g for the smallest primitive root g
        for g in 1..p {
            let mut x = g;
            let mut ord = 1;
            while x != 1 {
                x = x * g % p;
                ord += 1;
            }
            if ord == p - 1 {
                return vec![(p - g) % p, 1];
            }
        }
        return vec![0, 1];
    }
    for code in 0..q {
        let mut modulus: Vec<u32> = (0..f).map(|i| (code / p.pow(i)) % p).collect();
        if modulus[0] == 0 {
            continue;
        }
        modulus.push(1);
        // order of x modulo the candidate
        let mut v = vec![0u32; f as usize];
        v[0] = 1;
        let mut ord = 0u32;
        loop {
            poly_mulx_mod(&mut v, &modulus, p);
            ord += 1;
            if v[0] == 1 && v[1..].iter().all(|&c| c == 0) {
                break;
            }
            if ord > q {
                break;
            }
        }
        if ord == q - 1 {
            return modulus;
        }
    }
    unreachable!("a primitive polynomial always exists")
}

impl FiniteField {
    pub fn new(p: u32, f: u32) -> Result<Self, RingError> {
        if !is_prime(p) || f == 0 {
            return Err(RingError::BadParameters(format!("F_{{{p}^{f}}}")));
        }
        let q = p
            .checked_pow(f)
            .filter(|&q| q <= 1 << 20)
            .ok_or_else(|| RingError::BadParameters(format!("field size {p}^{f} too large")))?;
        let modulus = primitive_modulus(p, f);
        let mut exp = Vec::with_capacity(2 * (q as usize - 1));
        let mut log = vec![0u32; q as usize];
        let mut v = vec![0u32; f as usize];
        v[0] = 1;
        let gen_is_x = f > 1;
        let g = if gen_is_x { 0 } else { (p - modulus[0]) % p };
        for k in 0..(q - 1) {
            let code = if gen_is_x {
                v.iter().rev().fold(0u32, |acc, &c| acc * p + c)
            } else {
                v[0]
            };
            exp.push(code);
            log[code as usize] = k;
            if gen_is_x {
                poly_mulx_mod(&mut v, &modulus, p);
            } else {
                v[0] = v[0] * g % p;
            }
        }
        for k in 0..(q - 1) as usize {
            exp.push(exp[k]);
        }
        Ok(FiniteField {
            t: Arc::new(Tables {
                p,
                f,
                q,
                modulus,
                exp,
                log,
            }),
        })
    }

    pub fn prime(p: u32) -> Result<Self, RingError> {
        Self::new(p, 1)
    }

    pub fn p(&self) -> u32 {
        self.t.p
    }
    pub fn degree(&self) -> u32 {
        self.t.f
    }
    pub fn order(&self) -> u32 {
        self.t.q
    }
    /// Monic defining polynomial, coefficients from degree 0 to f.
    pub fn modulus(&self) -> &[u32] {
        &self.t.modulus
    }

    pub fn digits(&self, a: u32) -> Vec<u32> {
        let p = self.t.p;
        (0..self.t.f)
            .scan(a, |r, _| {
                let d = *r % p;
                *r /= p;
                Some(d)
            })
            .collect()
    }

    pub fn from_digits(&self, d: &[u32]) -> u32 {
        let p = self.t.p;
        d.iter().rev().fold(0u32, |acc, &c| acc * p + c % p)
    }

    /// The class of x in the polynomial basis.
    pub fn generator(&self) -> u32 {
        self.t.exp[1]
    }

    pub fn elements(&self) -> impl Iterator<Item = u32> {
        0..self.t.q
    }

    pub fn inverse(&self, a: u32) -> Option<u32> {
        if a == 0 {
            None
        } else {
            let qm1 = self.t.q - 1;
            Some(self.t.exp[((qm1 - self.t.log[a as usize]) % qm1) as usize])
        }
    }

    pub fn random<G: rand::Rng>(&self, rng: &mut G) -> u32 {
        rng.gen_range(0..self.t.q)
    }

    pub fn random_nonzero<G: rand::Rng>(&self, rng: &mut G) -> u32 {
        rng.gen_range(1..self.t.q)
    }

    /// Square roots, in increasing order of encoding.
    pub fn sqrts(&self, a: u32) -> Vec<u32> {
        self.elements().filter(|&x| self.mul(&x, &x) == a).collect()
    }
}

impl Ring for FiniteField {
    type Elem = u32;

    fn zero(&self) -> u32 {
        0
    }
    fn one(&self) -> u32 {
        1
    }
    fn add(&self, a: &u32, b: &u32) -> u32 {
        let p = self.t.p;
        if self.t.f == 1 {
            return (a + b) % p;
        }
        let (mut x, mut y) = (*a, *b);
        let mut out = 0u32;
        let mut place = 1u32;
        for _ in 0..self.t.f {
            out += ((x % p + y % p) % p) * place;
            x /= p;
            y /= p;
            place *= p;
        }
        out
    }
    fn neg(&self, a: &u32) -> u32 {
        let p = self.t.p;
        if self.t.f == 1 {
            return (p - a % p) % p;
        }
        let mut x = *a;
        let mut out = 0u32;
        let mut place = 1u32;
        for _ in 0..self.t.f {
            out += ((p - x % p) % p) * place;
            x /= p;
            place *= p;
        }
        out
    }
    fn mul(&self, a: &u32, b: &u32) -> u32 {
        if *a == 0 || *b == 0 {
            return 0;
        }
        let t = &self.t;
        t.exp[(t.log[*a as usize] + t.log[*b as usize]) as usize]
    }
    fn from_int(&self, n: i64) -> u32 {
        n.rem_euclid(self.t.p as i64) as u32
    }
    fn is_zero(&self, a: &u32) -> bool {
        *a == 0
    }
}

impl ChainRing for FiniteField {
    fn val(&self, a: &u32) -> Option<u32> {
        if *a == 0 {
            None
        } else {
            Some(0)
        }
    }
    fn uniformizer(&self) -> u32 {
        0
    }
    fn unit_part(&self, a: &u32) -> u32 {
        *a
    }
    fn inv_unit(&self, a: &u32) -> u32 {
        self.inverse(*a).expect("inverse of zero")
    }
}

impl Field for FiniteField {}

impl Frobenius for FiniteField {
    fn frob(&self, a: &u32) -> u32 {
        self.pow(a, self.t.p as u64)
    }
    fn frob_inv(&self, a: &u32) -> u32 {
        self.pow(a, (self.t.q / self.t.p) as u64)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn prime_field_basics() {
        let k = FiniteField::prime(5).unwrap();
        assert_eq!(k.add(&3, &4), 2);
        assert_eq!(k.mul(&3, &4), 2);
        assert_eq!(k.inverse(2), Some(3));
        assert_eq!(k.neg(&0), 0);
        assert_eq!(k.from_int(-1), 4);
    }

    #[test]
    fn moduli_are_lexicographically_first_primitive() {
        // x^2 + x + 2 over F_3, x^2 + x + 1 over F_2
        assert_eq!(FiniteField::new(3, 2).unwrap().modulus(), &[2, 1, 1]);
        assert_eq!(FiniteField::new(2, 2).unwrap().modulus(), &[1, 1, 1]);
        assert_eq!(FiniteField::new(2, 3).unwrap().modulus(), &[1, 1, 0, 1]);
    }

    #[test]
    fn multiplicative_group_is_cyclic_of_full_order() {
        for (p, f) in [(2, 1), (2, 5), (3, 2), (3, 3), (5, 2), (7, 1)] {
            let k = FiniteField::new(p, f).unwrap();
            let g = k.generator();
            let mut x = g;
            let mut ord = 1;
            while x != 1 {
                x = k.mul(&x, &g);
                ord += 1;
            }
            assert_eq!(ord, k.order() - 1);
        }
    }

    #[test]
    fn frobenius_has_order_f() {
        for (p, f) in [(3, 3), (5, 2), (2, 4)] {
            let k = FiniteField::new(p, f).unwrap();
            for a in k.elements() {
                assert_eq!(k.frob_pow(&a, f as i64), a);
                assert_eq!(k.frob_inv(&k.frob(&a)), a);
            }
        }
    }

    #[test]
    fn minus_one_is_a_square_only_mod_5() {
        let k3 = FiniteField::prime(3).unwrap();
        let k5 = FiniteField::prime(5).unwrap();
        assert!(k3.sqrts(2).is_empty());
        assert_eq!(k5.sqrts(4), vec![2, 3]);
    }

    proptest! {
        #[test]
        fn field_axioms(a in 0u32..81, b in 0u32..81, c in 0u32..81) {
            let k = FiniteField::new(3, 4).unwrap();
            prop_assert_eq!(k.mul(&a, &k.add(&b, &c)), k.add(&k.mul(&a, &b), &k.mul(&a, &c)));
            prop_assert_eq!(k.mul(&k.mul(&a, &b), &c), k.mul(&a, &k.mul(&b, &c)));
            prop_assert_eq!(k.add(&a, &k.neg(&a)), 0);
            prop_assert_eq!(k.frob(&k.mul(&a, &b)), k.mul(&k.frob(&a), &k.frob(&b)));
            prop_assert_eq!(k.frob(&k.add(&a, &b)), k.add(&k.frob(&a), &k.frob(&b)));
            if a != 0 {
                prop_assert_eq!(k.mul(&a, &k.inverse(a).unwrap()), 1);
            }
        }
    }
}
