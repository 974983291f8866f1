//! Multivariate polynomials over Z in a fixed list of named variables.

use std::collections::BTreeMap;
use std::fmt;

use crate::rings::{FiniteField, Ring};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MPoly {
    nvars: usize,
    /// Exponent vector ↦ nonzero coefficient.
    terms: BTreeMap<Vec<u32>, i64>,
}

impl MPoly {
    pub fn zero(nvars: usize) -> Self {
        MPoly {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(nvars: usize, c: i64) -> Self {
        let mut p = MPoly::zero(nvars);
        if c != 0 {
            p.terms.insert(vec![0; nvars], c);
        }
        p
    }

    pub fn var(nvars: usize, i: usize) -> Self {
        let mut e = vec![0; nvars];
        e[i] = 1;
        MPoly {
            nvars,
            terms: BTreeMap::from([(e, 1)]),
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u32>, &i64)> {
        self.terms.iter()
    }

    fn push(&mut self, e: Vec<u32>, c: i64) {
        let v = self.terms.entry(e.clone()).or_insert(0);
        *v += c;
        if *v == 0 {
            self.terms.remove(&e);
        }
    }

    pub fn add(&self, o: &MPoly) -> MPoly {
        let mut out = self.clone();
        for (e, c) in &o.terms {
            out.push(e.clone(), *c);
        }
        out
    }

    pub fn neg(&self) -> MPoly {
        MPoly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(e, c)| (e.clone(), -c)).collect(),
        }
    }

    pub fn sub(&self, o: &MPoly) -> MPoly {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &MPoly) -> MPoly {
        let mut out = MPoly::zero(self.nvars);
        for (e1, c1) in &self.terms {
            for (e2, c2) in &o.terms {
                let e: Vec<u32> = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                out.push(e, c1 * c2);
            }
        }
        out
    }

    pub fn degree_in(&self, i: usize) -> u32 {
        self.terms.keys().map(|e| e[i]).max().unwrap_or(0)
    }

    /// (a, b) with self = a·v_i + b and neither a nor b involving v_i, when
    /// self has degree ≤ 1 in v_i.
    pub fn split_linear(&self, i: usize) -> Option<(MPoly, MPoly)> {
        if self.degree_in(i) > 1 {
            return None;
        }
        let (mut a, mut b) = (MPoly::zero(self.nvars), MPoly::zero(self.nvars));
        for (e, c) in &self.terms {
            if e[i] == 1 {
                let mut e2 = e.clone();
                e2[i] = 0;
                a.push(e2, *c);
            } else {
                b.push(e.clone(), *c);
            }
        }
        Some((a, b))
    }

    /// Replaces v_i by `by`.
    pub fn substitute(&self, i: usize, by: &MPoly) -> MPoly {
        let mut out = MPoly::zero(self.nvars);
        for (e, c) in &self.terms {
            let mut rest = e.clone();
            rest[i] = 0;
            let mut t = MPoly {
                nvars: self.nvars,
                terms: BTreeMap::from([(rest, *c)]),
            };
            for _ in 0..e[i] {
                t = t.mul(by);
            }
            out = out.add(&t);
        }
        out
    }

    /// Value at a point of k^n, coefficients read in the prime field.
    pub fn eval(&self, k: &FiniteField, at: &[u32]) -> u32 {
        self.terms.iter().fold(0, |acc, (e, c)| {
            let mono = e
                .iter()
                .zip(at)
                .fold(k.from_int(*c), |m, (&d, x)| k.mul(&m, &k.pow(x, d as u64)));
            k.add(&acc, &mono)
        })
    }

    pub fn display<'a>(&'a self, names: &'a [&'a str]) -> Display<'a> {
        Display { p: self, names }
    }
}

pub struct Display<'a> {
    p: &'a MPoly,
    names: &'a [&'a str],
}

impl fmt::Display for Display<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.p.is_zero() {
            return f.write_str("0");
        }
        // lowest total degree first, then by exponent vector
        let mut terms: Vec<_> = self.p.terms.iter().collect();
        terms.sort_by_key(|(e, _)| (e.iter().sum::<u32>(), std::cmp::Reverse((*e).clone())));
        for (n, (e, &c)) in terms.iter().enumerate() {
            let mono: Vec<String> = e
                .iter()
                .zip(self.names)
                .filter(|(&d, _)| d > 0)
                .map(|(&d, name)| {
                    if d == 1 {
                        name.to_string()
                    } else {
                        format!("{name}^{d}")
                    }
                })
                .collect();
            let mag = c.abs();
            let sign = if c < 0 { "-" } else { "+" };
            if n == 0 {
                if c < 0 {
                    f.write_str("-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            match (mono.is_empty(), mag) {
                (true, _) => write!(f, "{mag}")?,
                (false, 1) => write!(f, "{}", mono.join("*"))?,
                (false, _) => write!(f, "{mag}*{}", mono.join("*"))?,
            }
        }
        Ok(())
    }
}
