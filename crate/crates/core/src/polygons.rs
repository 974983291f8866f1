//! Convex polygons stored as slope multisets: dominance, means, symmetry, and
//! the Hodge and PR polygon families.

use num_rational::Rational64;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PolygonError {
    #[error("multiplicity {0} is not positive with denominator dividing e = {1}")]
    BadMultiplicity(Rational64, i64),
    #[error("polygons have different endpoints")]
    EndpointMismatch,
    #[error("invalid signature: {0}")]
    BadSignature(String),
}

/// Canonical form: slopes strictly increasing, equal slopes merged,
/// multiplicities positive. Equality compares canonical slopes only.
#[derive(Clone, Debug)]
pub struct Polygon {
    e: i64,
    slopes: Vec<(Rational64, Rational64)>,
}

impl PartialEq for Polygon {
    fn eq(&self, other: &Self) -> bool {
        self.slopes == other.slopes
    }
}

impl Eq for Polygon {}

impl std::hash::Hash for Polygon {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.slopes.hash(state);
    }
}

fn canonical(mut v: Vec<(Rational64, Rational64)>) -> Vec<(Rational64, Rational64)> {
    v.retain(|(_, m)| !m.is_zero());
    v.sort();
    let mut out: Vec<(Rational64, Rational64)> = Vec::new();
    for (s, m) in v {
        match out.last_mut() {
            Some((ls, lm)) if *ls == s => *lm += m,
            _ => out.push((s, m)),
        }
    }
    out
}

fn lcm(a: i64, b: i64) -> i64 {
    let (mut x, mut y) = (a, b);
    while y != 0 {
        (x, y) = (y, x % y);
    }
    a / x * b
}

impl Polygon {
    pub fn e(&self) -> i64 {
        self.e
    }

    pub fn slopes(&self) -> &[(Rational64, Rational64)] {
        &self.slopes
    }

    pub fn zero(e: i64) -> Self {
        Polygon {
            e,
            slopes: Vec::new(),
        }
    }

    pub fn width(&self) -> Rational64 {
        self.slopes.iter().map(|(_, m)| *m).sum()
    }

    pub fn height(&self) -> Rational64 {
        self.slopes.iter().map(|(s, m)| s * m).sum()
    }

    /// Abscissas 0 = x_0 < … < x_k = width of the vertices.
    pub fn breakpoints(&self) -> Vec<Rational64> {
        let mut x = Rational64::zero();
        let mut out = vec![x];
        for (_, m) in &self.slopes {
            x += m;
            out.push(x);
        }
        out
    }

    /// Value at x in [0, width].
    pub fn value_at(&self, x: Rational64) -> Rational64 {
        let mut left = x;
        let mut y = Rational64::zero();
        for (s, m) in &self.slopes {
            if left <= Rational64::zero() {
                break;
            }
            let step = if left < *m { left } else { *m };
            y += s * step;
            left -= step;
        }
        y
    }

    /// `{"e": e, "slopes": [[num, den, multnum, multden], ...]}`.
    pub fn to_json(&self) -> PolygonJson {
        PolygonJson {
            e: self.e,
            slopes: self
                .slopes
                .iter()
                .map(|(s, m)| [*s.numer(), *s.denom(), *m.numer(), *m.denom()])
                .collect(),
        }
    }

    pub fn from_json(j: &PolygonJson) -> Result<Self, PolygonError> {
        if j.slopes.iter().any(|v| v[1] == 0 || v[3] == 0) {
            return Err(PolygonError::BadMultiplicity(Rational64::zero(), j.e));
        }
        let v: Vec<(Rational64, Rational64)> = j
            .slopes
            .iter()
            .map(|v| (Rational64::new(v[0], v[1]), Rational64::new(v[2], v[3])))
            .collect();
        polygon_from_slopes(&v, j.e)
    }
}

impl std::fmt::Display for Polygon {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let parts: Vec<String> = self
            .slopes
            .iter()
            .map(|(s, m)| format!("{s}x{m}"))
            .collect();
        write!(f, "({})", parts.join(", "))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PolygonJson {
    pub e: i64,
    pub slopes: Vec<[i64; 4]>,
}

pub fn polygon_from_slopes(
    slopes: &[(Rational64, Rational64)],
    e: i64,
) -> Result<Polygon, PolygonError> {
    for (_, m) in slopes {
        if *m <= Rational64::zero() || e % m.denom() != 0 {
            return Err(PolygonError::BadMultiplicity(*m, e));
        }
    }
    Ok(Polygon {
        e,
        slopes: canonical(slopes.to_vec()),
    })
}

/// Slopes c_i / e, one for each exponent of the profile.
pub fn hodge_from_profile(c: &TorsionProfile, e: i64) -> Polygon {
    let v =
        c.0.iter()
            .map(|&ci| (Rational64::new(ci as i64, e), Rational64::one()))
            .collect();
    Polygon {
        e,
        slopes: canonical(v),
    }
}

pub fn dominates(p: &Polygon, q: &Polygon) -> Result<bool, PolygonError> {
    if p.width() != q.width() || p.height() != q.height() {
        return Err(PolygonError::EndpointMismatch);
    }
    let mut xs = p.breakpoints();
    xs.extend(q.breakpoints());
    Ok(xs.into_iter().all(|x| p.value_at(x) >= q.value_at(x)))
}

/// Pointwise average.
pub fn mean(ps: &[Polygon]) -> Result<Polygon, PolygonError> {
    let Some(first) = ps.first() else {
        return Ok(Polygon::zero(1));
    };
    let w = first.width();
    if ps.iter().any(|p| p.width() != w) {
        return Err(PolygonError::EndpointMismatch);
    }
    let e = ps.iter().fold(1, |acc, p| lcm(acc, p.e));
    let mut xs: Vec<Rational64> = ps.iter().flat_map(|p| p.breakpoints()).collect();
    xs.sort();
    xs.dedup();
    let n = Rational64::from_integer(ps.len() as i64);
    let avg = |x: Rational64| ps.iter().map(|p| p.value_at(x)).sum::<Rational64>() / n;
    let mut v = Vec::new();
    for pair in xs.windows(2) {
        let dx = pair[1] - pair[0];
        v.push(((avg(pair[1]) - avg(pair[0])) / dx, dx));
    }
    Ok(Polygon {
        e,
        slopes: canonical(v),
    })
}

pub fn is_symmetric(p: &Polygon) -> bool {
    let dual = canonical(
        p.slopes
            .iter()
            .map(|(s, m)| (Rational64::one() - s, *m))
            .collect(),
    );
    dual == p.slopes
}

/// Nondecreasing exponents c_1 ≤ … ≤ c_d of a module ⊕ k[π]/(π^{c_i}).
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TorsionProfile(pub Vec<u32>);

impl TorsionProfile {
    pub fn new(mut c: Vec<u32>) -> Self {
        c.sort_unstable();
        TorsionProfile(c)
    }

    pub fn length(&self) -> u32 {
        self.0.iter().sum()
    }

    /// dim ker π^j = Σ min(c_i, j).
    pub fn kernel_dim(&self, j: u32) -> u32 {
        self.0.iter().map(|&c| c.min(j)).sum()
    }

    /// Dominance of partitions: partial sums from the largest part.
    pub fn dominates(&self, other: &TorsionProfile) -> bool {
        if self.0.len() != other.0.len() || self.length() != other.length() {
            return false;
        }
        let (mut a, mut b) = (0, 0);
        for (x, y) in self.0.iter().rev().zip(other.0.iter().rev()) {
            a += x;
            b += y;
            if a < b {
                return false;
            }
        }
        true
    }
}

/// Integers d_{τ,j} for τ in Z/f and j in 1..e.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Signature {
    pub f: usize,
    pub e: usize,
    pub h: u32,
    pub d: Vec<Vec<u32>>,
}

impl Signature {
    pub fn new(f: usize, e: usize, h: u32, d: Vec<Vec<u32>>) -> Result<Self, PolygonError> {
        if d.len() != f || d.iter().any(|row| row.len() != e) {
            return Err(PolygonError::BadSignature(format!(
                "expected {f} rows of length {e}"
            )));
        }
        if let Some(x) = d.iter().flatten().find(|&&x| x > h) {
            return Err(PolygonError::BadSignature(format!(
                "entry {x} exceeds h = {h}"
            )));
        }
        Ok(Signature { f, e, h, d })
    }

    pub fn constant(f: usize, e: usize, h: u32, c: u32) -> Result<Self, PolygonError> {
        Self::new(f, e, h, vec![vec![c; e]; f])
    }

    /// d_{τ,j} = h - d_{s(τ),j} for the involution s on embeddings.
    pub fn is_polarized_by<S: Fn(usize) -> usize>(&self, s: S) -> bool {
        (0..self.f).all(|t| (0..self.e).all(|j| self.d[t][j] + self.d[s(t)][j] == self.h))
    }

    pub fn is_constant(&self) -> bool {
        let first = self.d[0][0];
        self.d.iter().flatten().all(|&x| x == first)
    }

    pub fn total(&self, tau: usize) -> u32 {
        self.d[tau].iter().sum()
    }
}

/// Exponents b of the generic conormal module, the conjugate partition of the
/// sorted slice: #{i : b_i ≥ j} is the j-th largest d.
fn generic_conormal(d: &[u32]) -> Vec<u32> {
    let mut sorted = d.to_vec();
    sorted.sort_unstable_by(|a, b| b.cmp(a));
    let parts = sorted.first().copied().unwrap_or(0) as usize;
    let mut b = vec![0u32; parts];
    for &dj in &sorted {
        for bi in b.iter_mut().take(dj as usize) {
            *bi += 1;
        }
    }
    b
}

/// Profile of M_τ / F M at the generic point: c_i = e - b_i, padded to h.
pub fn pr_profile(sig: &Signature, tau: usize) -> TorsionProfile {
    let b = generic_conormal(&sig.d[tau]);
    let mut c: Vec<u32> = b.iter().map(|&bi| sig.e as u32 - bi).collect();
    c.resize(sig.h as usize, sig.e as u32);
    TorsionProfile::new(c)
}

pub fn pr_tau(sig: &Signature, tau: usize) -> Polygon {
    hodge_from_profile(&pr_profile(sig, tau), sig.e as i64)
}

pub fn pr_from_signature(sig: &Signature) -> Polygon {
    let ps: Vec<Polygon> = (0..sig.f).map(|t| pr_tau(sig, t)).collect();
    mean(&ps).expect("PR polygons share their width")
}

/// Largest sum of j entries of the slice.
pub fn max_subset_sum(d: &[u32], j: usize) -> u32 {
    let mut sorted = d.to_vec();
    sorted.sort_unstable_by(|a, b| b.cmp(a));
    sorted.iter().take(j).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn r(n: i64, d: i64) -> Rational64 {
        Rational64::new(n, d)
    }

    fn poly(v: &[(i64, i64, i64)], e: i64) -> Polygon {
        let s: Vec<_> = v.iter().map(|&(a, b, m)| (r(a, b), r(m, e))).collect();
        polygon_from_slopes(&s, e).unwrap()
    }

    #[test]
    fn construction() {
        let c = poly(&[(0, 1, 3), (1, 1, 3)], 1);
        assert!(is_symmetric(&c));
        assert_eq!(polygon_from_slopes(&[], 2).unwrap().width(), r(0, 1));
        let ss = poly(&[(1, 2, 2)], 1);
        assert!(is_symmetric(&ss));
        assert_eq!(
            polygon_from_slopes(&[(r(1, 2), r(1, 3))], 2),
            Err(PolygonError::BadMultiplicity(r(1, 3), 2))
        );
        assert!(!is_symmetric(&poly(&[(0, 1, 2), (1, 1, 1)], 1)));
    }

    #[test]
    fn hodge_examples() {
        assert_eq!(
            hodge_from_profile(&TorsionProfile(vec![0, 0]), 2).height(),
            r(0, 1)
        );
        assert_eq!(
            hodge_from_profile(&TorsionProfile(vec![0, 2]), 2),
            poly(&[(0, 1, 2), (1, 1, 2)], 2)
        );
        assert_eq!(
            hodge_from_profile(&TorsionProfile(vec![1, 1]), 2),
            poly(&[(1, 2, 4)], 2)
        );
    }

    #[test]
    fn pr_examples() {
        let s = Signature::constant(2, 3, 4, 1).unwrap();
        assert_eq!(pr_from_signature(&s), poly(&[(0, 1, 1), (1, 1, 3)], 1));
        let s = Signature::new(2, 1, 3, vec![vec![1], vec![2]]).unwrap();
        // mean of {0, 1, 1} and {0, 0, 1}
        assert_eq!(
            pr_from_signature(&s),
            poly(&[(0, 1, 1), (1, 2, 1), (1, 1, 1)], 1)
        );
        let s = Signature::new(1, 2, 2, vec![vec![1, 1]]).unwrap();
        assert_eq!(pr_from_signature(&s), poly(&[(0, 1, 2), (1, 1, 2)], 2));
    }

    /// Oracle: b_i = #{j : d_j ≥ i}.
    fn conormal_by_counting(d: &[u32]) -> Vec<u32> {
        let top = d.iter().copied().max().unwrap_or(0);
        let mut b: Vec<u32> = (1..=top)
            .map(|i| d.iter().filter(|&&x| x >= i).count() as u32)
            .collect();
        b.sort_unstable_by(|a, b| b.cmp(a));
        b
    }

    #[test]
    fn dominance_examples() {
        let ss = poly(&[(1, 2, 2)], 1);
        let ord = poly(&[(0, 1, 1), (1, 1, 1)], 1);
        assert_eq!(dominates(&ss, &ss), Ok(true));
        assert_eq!(dominates(&ss, &ord), Ok(true));
        assert_eq!(dominates(&ord, &ss), Ok(false));
        assert_eq!(
            dominates(&ss, &poly(&[(0, 1, 1)], 1)),
            Err(PolygonError::EndpointMismatch)
        );
        assert_eq!(mean(&[ss.clone(), ss.clone()]).unwrap(), ss);
    }

    fn arb_polygon(e: i64, width: i64) -> impl Strategy<Value = Polygon> {
        proptest::collection::vec(0i64..=6, (width * e) as usize).prop_map(move |nums| {
            let s: Vec<_> = nums.iter().map(|&n| (r(n, 6), r(1, e))).collect();
            polygon_from_slopes(&s, e).unwrap()
        })
    }

    /// Oracle on the grid k/(6e): both polygons are linear between grid points.
    fn grid_dominates(p: &Polygon, q: &Polygon) -> bool {
        let steps = (p.width() * 6 * p.e()).to_integer();
        (0..=steps).all(|k| {
            let x = r(k, 6 * p.e());
            p.value_at(x) >= q.value_at(x)
        })
    }

    proptest! {
        #[test]
        fn conormal_matches_counting(d in proptest::collection::vec(0u32..5, 1..5)) {
            prop_assert_eq!(generic_conormal(&d), conormal_by_counting(&d));
        }

        #[test]
        fn dominance_agrees_with_grid(p in arb_polygon(2, 2), q in arb_polygon(2, 2)) {
            if p.height() == q.height() {
                prop_assert_eq!(dominates(&p, &q).unwrap(), grid_dominates(&p, &q));
            }
        }

        #[test]
        fn dominance_is_a_partial_order(p in arb_polygon(1, 3), q in arb_polygon(1, 3), s in arb_polygon(1, 3)) {
            prop_assert!(dominates(&p, &p).unwrap());
            if p.height() == q.height() && q.height() == s.height() {
                if dominates(&p, &q).unwrap() && dominates(&q, &p).unwrap() {
                    prop_assert_eq!(&p, &q);
                }
                if dominates(&p, &q).unwrap() && dominates(&q, &s).unwrap() {
                    prop_assert!(dominates(&p, &s).unwrap());
                }
            }
        }

        #[test]
        fn mean_is_monotone(p1 in arb_polygon(2, 2), q1 in arb_polygon(2, 2), p2 in arb_polygon(2, 2), q2 in arb_polygon(2, 2)) {
            if p1.height() == q1.height() && p2.height() == q2.height()
                && dominates(&p1, &q1).unwrap() && dominates(&p2, &q2).unwrap() {
                let mp = mean(&[p1, p2]).unwrap();
                let mq = mean(&[q1, q2]).unwrap();
                prop_assert!(dominates(&mp, &mq).unwrap());
            }
        }

        #[test]
        fn hodge_is_monotone_in_the_profile(a in proptest::collection::vec(0u32..=3, 3), b in proptest::collection::vec(0u32..=3, 3)) {
            let (pa, pb) = (TorsionProfile::new(a), TorsionProfile::new(b));
            if pa.dominates(&pb) {
                // a profile with larger top parts has its Hodge polygon below
                prop_assert!(dominates(&hodge_from_profile(&pb, 3), &hodge_from_profile(&pa, 3)).unwrap());
            }
        }

        #[test]
        fn ordinary_criterion(d in proptest::collection::vec(proptest::collection::vec(0u32..=3, 2), 1..3)) {
            let sig = Signature::new(d.len(), 2, 3, d).unwrap();
            let pr = pr_from_signature(&sig);
            let only_01 = pr.slopes().iter().all(|(s, _)| s.is_zero() || s.is_one());
            prop_assert_eq!(only_01, sig.is_constant());
        }

        #[test]
        fn json_round_trip(p in arb_polygon(3, 2)) {
            prop_assert_eq!(Polygon::from_json(&p.to_json()).unwrap(), p);
        }
    }
}
