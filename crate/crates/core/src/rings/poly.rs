//! Univariate polynomials k[t] and fraction-free rank over k(t).

use super::{FiniteField, Ring};

/// Polynomials over a finite field, coefficients from degree 0 upward with no
/// trailing zeros (the zero polynomial is empty).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolyRing {
    pub k: FiniteField,
}

pub type Poly = Vec<u32>;

pub(crate) fn trim(mut a: Poly) -> Poly {
    while a.last() == Some(&0) {
        a.pop();
    }
    a
}

impl PolyRing {
    pub fn new(k: FiniteField) -> Self {
        PolyRing { k }
    }

    pub fn degree(&self, a: &Poly) -> Option<usize> {
        if a.is_empty() {
            None
        } else {
            Some(a.len() - 1)
        }
    }

    pub fn t(&self) -> Poly {
        vec![0, 1]
    }

    pub fn constant(&self, c: u32) -> Poly {
        trim(vec![c])
    }

    pub fn scale(&self, a: &Poly, c: u32) -> Poly {
        trim(a.iter().map(|x| self.k.mul(x, &c)).collect())
    }

    pub fn lead(&self, a: &Poly) -> u32 {
        *a.last().unwrap_or(&0)
    }

    pub fn monic(&self, a: &Poly) -> Poly {
        match a.last() {
            None => Vec::new(),
            Some(&l) => self.scale(a, self.k.inverse(l).unwrap()),
        }
    }

    /// Multiplicity of t as a factor; `None` for zero.
    pub fn ord_t(&self, a: &Poly) -> Option<usize> {
        a.iter().position(|&c| c != 0)
    }

    pub fn divrem(&self, a: &Poly, b: &Poly) -> (Poly, Poly) {
        assert!(!b.is_empty(), "polynomial division by zero");
        let k = &self.k;
        let mut r = a.clone();
        let db = b.len() - 1;
        let inv = k.inverse(*b.last().unwrap()).unwrap();
        if r.len() < b.len() {
            return (Vec::new(), trim(r));
        }
        let mut q = vec![0u32; r.len() - db];
        while r.len() > db && !r.is_empty() {
            let shift = r.len() - 1 - db;
            let c = k.mul(r.last().unwrap(), &inv);
            q[shift] = c;
            for (i, bi) in b.iter().enumerate() {
                let t = k.mul(&c, bi);
                r[shift + i] = k.sub(&r[shift + i], &t);
            }
            r = trim(r);
            if r.len() <= db {
                break;
            }
        }
        (trim(q), trim(r))
    }

    /// Exact quotient; panics if the division leaves a remainder.
    pub fn divexact(&self, a: &Poly, b: &Poly) -> Poly {
        let (q, r) = self.divrem(a, b);
        assert!(r.is_empty(), "inexact polynomial division");
        q
    }

    /// Monic greatest common divisor.
    pub fn gcd(&self, a: &Poly, b: &Poly) -> Poly {
        let (mut x, mut y) = (a.clone(), b.clone());
        while !y.is_empty() {
            let (_, r) = self.divrem(&x, &y);
            x = y;
            y = r;
        }
        self.monic(&x)
    }

    pub fn eval(&self, a: &Poly, x: u32) -> u32 {
        a.iter()
            .rev()
            .fold(0, |acc, c| self.k.add(&self.k.mul(&acc, &x), c))
    }

    /// Evaluation at an element of an extension field whose prime subfield
    /// agrees with ours; coefficients must lie in the prime field.
    pub fn eval_in(&self, a: &Poly, ext: &FiniteField, x: u32) -> u32 {
        assert_eq!(
            self.k.degree(),
            1,
            "evaluation in an extension needs prime coefficients"
        );
        a.iter()
            .rev()
            .fold(0, |acc, c| ext.add(&ext.mul(&acc, &x), c))
    }
}

impl Ring for PolyRing {
    type Elem = Poly;

    fn zero(&self) -> Poly {
        Vec::new()
    }
    fn one(&self) -> Poly {
        vec![1]
    }
    fn add(&self, a: &Poly, b: &Poly) -> Poly {
        let n = a.len().max(b.len());
        trim(
            (0..n)
                .map(|i| self.k.add(a.get(i).unwrap_or(&0), b.get(i).unwrap_or(&0)))
                .collect(),
        )
    }
    fn neg(&self, a: &Poly) -> Poly {
        a.iter().map(|c| self.k.neg(c)).collect()
    }
    fn mul(&self, a: &Poly, b: &Poly) -> Poly {
        if a.is_empty() || b.is_empty() {
            return Vec::new();
        }
        let mut out = vec![0u32; a.len() + b.len() - 1];
        for (i, x) in a.iter().enumerate() {
            if *x == 0 {
                continue;
            }
            for (j, y) in b.iter().enumerate() {
                out[i + j] = self.k.add(&out[i + j], &self.k.mul(x, y));
            }
        }
        trim(out)
    }
    fn from_int(&self, n: i64) -> Poly {
        trim(vec![self.k.from_int(n)])
    }
    fn is_zero(&self, a: &Poly) -> bool {
        a.is_empty()
    }
}

/// A matrix of polynomials with a degree bound on its entries.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolyMatrix {
    pub ring: PolyRing,
    pub rows: usize,
    pub cols: usize,
    pub degree_bound: usize,
    entries: Vec<Poly>,
}

impl PolyMatrix {
    pub fn new(ring: PolyRing, rows: usize, cols: usize, entries: Vec<Poly>) -> Self {
        assert_eq!(entries.len(), rows * cols);
        let entries: Vec<Poly> = entries.into_iter().map(trim).collect();
        let degree_bound = entries
            .iter()
            .map(|e| e.len().saturating_sub(1))
            .max()
            .unwrap_or(0);
        PolyMatrix {
            ring,
            rows,
            cols,
            degree_bound,
            entries,
        }
    }

    pub fn with_bound(
        ring: PolyRing,
        rows: usize,
        cols: usize,
        degree_bound: usize,
        entries: Vec<Poly>,
    ) -> Option<Self> {
        let m = Self::new(ring, rows, cols, entries);
        if m.degree_bound > degree_bound {
            None
        } else {
            Some(PolyMatrix { degree_bound, ..m })
        }
    }

    pub fn get(&self, i: usize, j: usize) -> &Poly {
        &self.entries[i * self.cols + j]
    }

    /// Entrywise evaluation at a point of k.
    pub fn eval(&self, x: u32) -> Vec<Vec<u32>> {
        (0..self.rows)
            .map(|i| {
                (0..self.cols)
                    .map(|j| self.ring.eval(self.get(i, j), x))
                    .collect()
            })
            .collect()
    }
}

/// Rank over k(t), by fraction-free elimination over k[t].
pub fn generic_rank(m: &PolyMatrix) -> usize {
    let r = &m.ring;
    let mut a: Vec<Vec<Poly>> = (0..m.rows)
        .map(|i| (0..m.cols).map(|j| m.get(i, j).clone()).collect())
        .collect();
    let (nr, nc) = (m.rows, m.cols);
    let mut prev: Poly = r.one();
    let mut rank = 0;
    let mut col = 0;
    while rank < nr && col < nc {
        let piv = (rank..nr).find(|&i| !a[i][col].is_empty());
        let Some(piv) = piv else {
            col += 1;
            continue;
        };
        a.swap(rank, piv);
        for i in (rank + 1)..nr {
            for j in (col + 1)..nc {
                let x = r.sub(
                    &r.mul(&a[rank][col], &a[i][j]),
                    &r.mul(&a[i][col], &a[rank][j]),
                );
                a[i][j] = r.divexact(&x, &prev);
            }
            a[i][col] = Vec::new();
        }
        prev = a[rank][col].clone();
        rank += 1;
        col += 1;
    }
    rank
}
