//! Charts of the local model for U(1,1) and U(2,1) at a ramified quadratic
//! place, p ≠ 2: the chart equations derived from the flag conditions by
//! linear elimination, their points over F_q, and the classification of each
//! point into the π-torsion component, the isotropy component, or both.
//!
//! Λ = O_F^n with basis πe_1, …, πe_n, e_1, …, e_n of Λ/pΛ; π sends e_i to
//! πe_i and kills πe_i, and the pairing has ⟨πe_i, e_i⟩ = 1 = -⟨e_i, πe_i⟩.
//! A point is a flag F^[1] ⊂ F whose first columns span F^[1].

mod mpoly;

pub use mpoly::MPoly;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::{col_space_contains_all, is_zero, mul, rank, zeros, Matrix};
use crate::prdata::{is_rapoport, orthogonal, preimage, validate_pr, FilteredModule};
use crate::rings::{FiniteField, Ring, RingError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LocalModelError {
    #[error("the charts need p ≠ 2")]
    EvenCharacteristic,
    #[error("q = {0} is not a prime power")]
    NotPrimePower(u64),
    #[error("enumeration needs {needed} points, over the budget of {budget}")]
    BudgetExceeded { needed: u64, budget: u64 },
    #[error(transparent)]
    Ring(#[from] RingError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Chart {
    U11,
    U21,
}

impl std::str::FromStr for Chart {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_uppercase().as_str() {
            "U11" | "U(1,1)" => Ok(Chart::U11),
            "U21" | "U(2,1)" => Ok(Chart::U21),
            _ => Err(format!("unknown chart {s}")),
        }
    }
}

impl std::fmt::Display for Chart {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Chart::U11 => "U11",
            Chart::U21 => "U21",
        })
    }
}

impl Chart {
    /// Rank n of Λ over O_F.
    pub fn n(self) -> usize {
        match self {
            Chart::U11 => 2,
            Chart::U21 => 3,
        }
    }

    /// dim F^[1] and dim F.
    pub fn dims(self) -> (usize, usize) {
        match self {
            Chart::U11 => (1, 2),
            Chart::U21 => (2, 3),
        }
    }

    /// Entries of the generic matrix, free coordinates first.
    pub fn variables(self) -> &'static [&'static str] {
        match self {
            Chart::U11 => &["x", "a", "b", "y"],
            Chart::U21 => &["x", "y", "a", "d", "b", "c"],
        }
    }

    /// Coordinates of a point: the variables that survive elimination.
    pub fn coordinates(self) -> &'static [&'static str] {
        let v = self.variables();
        &v[..v.len() - self.eliminated().len()]
    }

    fn eliminated(self) -> &'static [usize] {
        match self {
            Chart::U11 => &[3],
            Chart::U21 => &[4, 5],
        }
    }

    /// Rows where the columns of F^[1] carry the identity.
    fn pivots(self) -> &'static [usize] {
        match self {
            Chart::U11 => &[0],
            Chart::U21 => &[0, 1],
        }
    }

    /// The generic flag matrix ω (2n × dim F).
    pub fn generic_omega(self) -> Matrix<MPoly> {
        let nv = self.variables().len();
        let c = |v: i64| MPoly::constant(nv, v);
        let v = |i: usize| MPoly::var(nv, i);
        let z = || c(0);
        let cols = match self {
            // (1, x, 0, 0) and (0, a, b, y)
            Chart::U11 => vec![vec![c(1), v(0), z(), z()], vec![z(), v(1), v(2), v(3)]],
            // (1, 0, x, 0, 0, 0), (0, 1, y, 0, 0, 0) and (0, 0, a, b, c, d)
            Chart::U21 => vec![
                vec![c(1), z(), v(0), z(), z(), z()],
                vec![z(), c(1), v(1), z(), z(), z()],
                vec![z(), z(), v(2), v(4), v(5), v(3)],
            ],
        };
        Matrix::from_cols(&cols, 2 * self.n())
    }
}

/// π on Λ/pΛ in the chart basis.
pub fn chart_pi<R: Ring>(r: &R, n: usize) -> Matrix<R::Elem> {
    let mut m = zeros(r, 2 * n, 2 * n);
    for i in 0..n {
        m[(i, n + i)] = r.one();
    }
    m
}

/// The pairing on Λ/pΛ in the chart basis.
pub fn chart_pairing<R: Ring>(r: &R, n: usize) -> Matrix<R::Elem> {
    let mut m = zeros(r, 2 * n, 2 * n);
    for i in 0..n {
        m[(i, n + i)] = r.one();
        m[(n + i, i)] = r.neg(&r.one());
    }
    m
}

fn dot(a: &[MPoly], g: &Matrix<i64>, b: &[MPoly]) -> MPoly {
    let nv = a[0].nvars();
    let mut out = MPoly::zero(nv);
    for i in 0..a.len() {
        for j in 0..b.len() {
            if g[(i, j)] != 0 {
                out = out.add(&MPoly::constant(nv, g[(i, j)]).mul(&a[i]).mul(&b[j]));
            }
        }
    }
    out
}

/// The conditions on the generic matrix, the linear eliminations and the
/// resulting chart equations.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChartEquations {
    pub chart: Chart,
    /// πF ⊆ F^[1], one polynomial per coordinate that must vanish.
    pub containment: Vec<MPoly>,
    /// ⟨ω_i, ω_j⟩ for i < j.
    pub isotropy: Vec<MPoly>,
    /// (variable, expression in the coordinates).
    pub eliminated: Vec<(usize, MPoly)>,
    pub equations: Vec<MPoly>,
    /// Every condition becomes zero or ± a chart equation after substitution.
    pub consistent: bool,
}

impl ChartEquations {
    pub fn render(&self) -> Vec<String> {
        let names = self.chart.variables();
        let mut out: Vec<String> = self
            .eliminated
            .iter()
            .map(|(v, e)| format!("{} = {}", names[*v], e.display(names)))
            .collect();
        out.extend(
            self.equations
                .iter()
                .map(|e| format!("{} = 0", e.display(names))),
        );
        out
    }
}

pub fn derive_chart_equations(chart: Chart) -> ChartEquations {
    let n = chart.n();
    let df = chart.dims().1;
    let omega = chart.generic_omega();
    let pi = chart_pi(&IntRing, n);
    let g = chart_pairing(&IntRing, n);
    let nv = chart.variables().len();
    let cols: Vec<Vec<MPoly>> = (0..df).map(|j| omega.col(j)).collect();
    let mut containment = Vec::new();
    for col in &cols {
        let pv: Vec<MPoly> = (0..2 * n)
            .map(|i| {
                (0..2 * n).fold(MPoly::zero(nv), |acc, k| {
                    if pi[(i, k)] != 0 {
                        acc.add(&col[k])
                    } else {
                        acc
                    }
                })
            })
            .collect();
        let mut res = pv.clone();
        for (idx, &p) in chart.pivots().iter().enumerate() {
            for (i, r) in res.iter_mut().enumerate() {
                *r = r.sub(&pv[p].mul(&cols[idx][i]));
            }
        }
        containment.extend(res.into_iter().filter(|x| !x.is_zero()));
    }
    let mut isotropy = Vec::new();
    for i in 0..df {
        for j in i + 1..df {
            let v = dot(&cols[i], &g, &cols[j]);
            if !v.is_zero() {
                isotropy.push(v);
            }
        }
    }
    let mut eqs: Vec<MPoly> = isotropy.iter().chain(&containment).cloned().collect();
    let mut eliminated: Vec<(usize, MPoly)> = Vec::new();
    for &v in chart.eliminated() {
        let pos = eqs.iter().position(|e| {
            e.split_linear(v)
                .is_some_and(|(a, _)| a == MPoly::constant(nv, 1) || a == MPoly::constant(nv, -1))
        });
        let Some(pos) = pos else { continue };
        let (a, b) = eqs.remove(pos).split_linear(v).expect("linear");
        // a v + b = 0 with a = ±1
        let expr = a.mul(&b).neg();
        for e in eqs.iter_mut() {
            *e = e.substitute(v, &expr);
        }
        for (_, x) in eliminated.iter_mut() {
            *x = x.substitute(v, &expr);
        }
        eliminated.push((v, expr));
    }
    let equations: Vec<MPoly> = eqs.into_iter().filter(|e| !e.is_zero()).collect();
    let consistent = containment.iter().chain(&isotropy).all(|c| {
        let s = eliminated
            .iter()
            .fold(c.clone(), |acc, (v, e)| acc.substitute(*v, e));
        s.is_zero() || equations.iter().any(|e| *e == s || e.neg() == s)
    });
    ChartEquations {
        chart,
        containment,
        isotropy,
        eliminated,
        equations,
        consistent,
    }
}

/// Integers as a ring, for the 0/±1 structure matrices.
struct IntRing;

impl Ring for IntRing {
    type Elem = i64;
    fn zero(&self) -> i64 {
        0
    }
    fn one(&self) -> i64 {
        1
    }
    fn add(&self, a: &i64, b: &i64) -> i64 {
        a + b
    }
    fn neg(&self, a: &i64) -> i64 {
        -a
    }
    fn mul(&self, a: &i64, b: &i64) -> i64 {
        a * b
    }
    fn from_int(&self, n: i64) -> i64 {
        n
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChartPoint {
    pub chart: Chart,
    /// Values of `chart.coordinates()`.
    pub coords: Vec<u32>,
    /// Basis of F^[1].
    pub f1: Matrix<u32>,
    /// Basis of F.
    pub f: Matrix<u32>,
}

impl ChartPoint {
    /// The point with the given coordinates, or `None` off the chart.
    pub fn new(k: &FiniteField, eqs: &ChartEquations, coords: &[u32]) -> Option<Self> {
        let chart = eqs.chart;
        let nc = chart.coordinates().len();
        assert_eq!(coords.len(), nc, "wrong number of coordinates");
        let mut full = coords.to_vec();
        full.resize(chart.variables().len(), 0);
        if eqs.equations.iter().any(|e| e.eval(k, &full) != 0) {
            return None;
        }
        for (v, e) in &eqs.eliminated {
            full[*v] = e.eval(k, &full);
        }
        let w = chart.generic_omega().map(|x| x.eval(k, &full));
        let (d1, df) = chart.dims();
        let rows: Vec<usize> = (0..w.rows).collect();
        let f1 = w.submatrix(&rows, &(0..d1).collect::<Vec<_>>());
        let f = w.submatrix(&rows, &(0..df).collect::<Vec<_>>());
        Some(ChartPoint {
            chart,
            coords: coords.to_vec(),
            f1,
            f,
        })
    }

    /// The flag as a PR datum on the standard ambient, where index i·n + a
    /// holds π^i e_a.
    pub fn pr_datum(&self, k: &FiniteField) -> FilteredModule<u32> {
        let n = self.chart.n();
        let swap =
            |m: &Matrix<u32>| Matrix::from_fn(m.rows, m.cols, |i, j| m[((i + n) % (2 * n), j)]);
        let (d1, df) = self.chart.dims();
        FilteredModule::special(
            k,
            2,
            n,
            vec![swap(&self.f1), swap(&self.f)],
            vec![d1 as u32, (df - d1) as u32],
        )
    }

    /// πF^[1] = 0, πF ⊆ F^[1] and F totally isotropic.
    pub fn satisfies_conditions(&self, k: &FiniteField) -> bool {
        let n = self.chart.n();
        let pi = chart_pi(k, n);
        let g = chart_pairing(k, n);
        is_zero(k, &mul(k, &pi, &self.f1))
            && col_space_contains_all(k, &self.f1, &mul(k, &pi, &self.f))
            && is_zero(k, &mul(k, &mul(k, &self.f.transpose(), &g), &self.f))
    }

    /// The columns of ω have full rank. The chart matrix drops rank where its
    /// last column vanishes (a = b = 0 on U11, a = d = 0 on U21); such points
    /// are counted but are not flags of the expected ranks.
    pub fn is_nondegenerate(&self, k: &FiniteField) -> bool {
        let (d1, df) = self.chart.dims();
        rank(k, &self.f1) == d1 && rank(k, &self.f) == df
    }

    /// Nondegenerate, satisfies the conditions, and is a PR datum.
    pub fn is_valid(&self, k: &FiniteField) -> bool {
        self.is_nondegenerate(k)
            && self.satisfies_conditions(k)
            && validate_pr(k, &self.pr_datum(k)).is_valid()
    }

    /// πF = 0, i.e. ω is killed by π.
    pub fn on_torsion_component(&self, k: &FiniteField) -> bool {
        is_zero(k, &mul(k, &chart_pi(k, self.chart.n()), &self.f))
    }

    /// F^[1]' = (π⁻¹F^[1])^⊥ lies in F^[1].
    pub fn on_isotropy_component(&self, k: &FiniteField) -> bool {
        let n = self.chart.n();
        let pre = preimage(k, &chart_pi(k, n), &self.f1);
        let perp = orthogonal(k, &chart_pairing(k, n), &pre);
        col_space_contains_all(k, &self.f1, &perp)
    }
}

/// Hodge = PR for the flag, from the flag matrices.
pub fn rapoport_status(k: &FiniteField, pt: &ChartPoint) -> bool {
    is_rapoport(k, &pt.pr_datum(k))
}

/// The coordinate form of the same test: b ≠ 0 on U11, d ≠ 0 on U21.
pub fn rapoport_shortcut(pt: &ChartPoint) -> bool {
    pt.coords[pt.chart.coordinates().len() - 1] != 0
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassifiedPoint {
    pub point: ChartPoint,
    pub torsion: bool,
    pub isotropy: bool,
    pub rapoport: bool,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComponentCounts {
    pub torsion: u64,
    pub isotropy: u64,
    pub intersection: u64,
    pub total: u64,
    pub rapoport: u64,
    /// Points where the chart matrix drops rank.
    pub degenerate: u64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChartEnumeration {
    pub chart: Chart,
    pub q: u64,
    pub points: Vec<ClassifiedPoint>,
    pub counts: ComponentCounts,
    /// Every point satisfies the conditions and lies on some component, and
    /// every nondegenerate point is a valid PR datum.
    pub all_valid: bool,
    /// The flag-derived Rapoport status equals the coordinate shortcut everywhere.
    pub shortcut_agrees: bool,
}

/// F_q for q a prime power.
pub fn field_of_order(q: u64) -> Result<FiniteField, LocalModelError> {
    let p = (2..=q)
        .find(|d| q % d == 0)
        .ok_or(LocalModelError::NotPrimePower(q))?;
    let mut f = 0;
    let mut m = q;
    while m % p == 0 {
        m /= p;
        f += 1;
    }
    if m != 1 || p > u32::MAX as u64 {
        return Err(LocalModelError::NotPrimePower(q));
    }
    Ok(FiniteField::new(p as u32, f)?)
}

pub fn enumerate_chart(
    chart: Chart,
    q: u64,
    budget: u64,
) -> Result<ChartEnumeration, LocalModelError> {
    let k = field_of_order(q)?;
    if k.p() == 2 {
        return Err(LocalModelError::EvenCharacteristic);
    }
    let eqs = derive_chart_equations(chart);
    let dim = chart.coordinates().len() as u32;
    let needed = q.checked_pow(dim).unwrap_or(u64::MAX);
    if needed > budget {
        return Err(LocalModelError::BudgetExceeded { needed, budget });
    }
    let mut points = Vec::new();
    let mut counts = ComponentCounts::default();
    let (mut all_valid, mut shortcut_agrees) = (true, true);
    for code in 0..needed {
        let mut rest = code;
        let coords: Vec<u32> = (0..dim)
            .map(|_| {
                let d = (rest % q) as u32;
                rest /= q;
                d
            })
            .collect();
        let Some(point) = ChartPoint::new(&k, &eqs, &coords) else {
            continue;
        };
        let torsion = point.on_torsion_component(&k);
        let isotropy = point.on_isotropy_component(&k);
        let rapoport = rapoport_status(&k, &point);
        let nondegenerate = point.is_nondegenerate(&k);
        all_valid &= point.satisfies_conditions(&k) && (torsion || isotropy);
        all_valid &= !nondegenerate || point.is_valid(&k);
        counts.degenerate += !nondegenerate as u64;
        shortcut_agrees &= rapoport == rapoport_shortcut(&point);
        counts.total += 1;
        counts.torsion += torsion as u64;
        counts.isotropy += isotropy as u64;
        counts.intersection += (torsion && isotropy) as u64;
        counts.rapoport += rapoport as u64;
        points.push(ClassifiedPoint {
            point,
            torsion,
            isotropy,
            rapoport,
        });
    }
    Ok(ChartEnumeration {
        chart,
        q,
        points,
        counts,
        all_valid,
        shortcut_agrees,
    })
}

#[cfg(test)]
mod tests;
