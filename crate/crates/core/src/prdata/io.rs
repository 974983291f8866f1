//! JSON form of special-fiber filtrations and CSV stratum tables.

use serde::{Deserialize, Serialize};

use super::FilteredModule;
use crate::linalg::Matrix;
use crate::polygons::Polygon;
use crate::rings::FiniteField;

/// Matrices are row-major; field elements are integers in base p with the
/// digit of degree i given by the i-th coefficient in the field modulus basis.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FilteredModuleJson {
    pub version: u32,
    pub p: u32,
    pub degree: u32,
    pub modulus: Vec<u32>,
    pub e: usize,
    pub h: usize,
    pub signature: Vec<u32>,
    pub pi: Vec<Vec<u32>>,
    pub steps: Vec<Vec<Vec<u32>>>,
}

impl FilteredModuleJson {
    pub fn from_module(k: &FiniteField, f: &FilteredModule<u32>) -> Self {
        FilteredModuleJson {
            version: 1,
            p: k.p(),
            degree: k.degree(),
            modulus: k.modulus().to_vec(),
            e: f.e,
            h: f.h,
            signature: f.d.clone(),
            pi: f.pi.to_rows(),
            steps: f.steps.iter().map(|s| s.to_rows()).collect(),
        }
    }

    pub fn to_module(&self) -> Result<(FiniteField, FilteredModule<u32>), String> {
        let k = FiniteField::new(self.p, self.degree).map_err(|e| e.to_string())?;
        if k.modulus() != self.modulus.as_slice() {
            return Err(format!("unsupported modulus {:?}", self.modulus));
        }
        let n = self.e * self.h;
        let mat = |rows: &Vec<Vec<u32>>, cols: usize| -> Result<Matrix<u32>, String> {
            if rows.len() != n || rows.iter().any(|r| r.len() != cols) {
                return Err("matrix shape differs from e·h".into());
            }
            if rows.iter().flatten().any(|&x| x >= k.order()) {
                return Err("entry outside the field".into());
            }
            Ok(Matrix::from_rows(rows.clone()))
        };
        let pi = mat(&self.pi, n)?;
        let mut steps = Vec::new();
        for s in &self.steps {
            let cols = s.first().map_or(0, |r| r.len());
            steps.push(if s.is_empty() {
                Matrix::new(n, 0, vec![])
            } else {
                mat(s, cols)?
            });
        }
        let f = FilteredModule {
            e: self.e,
            h: self.h,
            pi,
            steps,
            d: self.signature.clone(),
            pi_images: vec![0; self.e],
        };
        Ok((k, f))
    }
}

/// Columns stratum_polygon, count, q.
pub fn stratum_counts_csv(rows: &[(Polygon, u64)], q: u32) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["stratum_polygon", "count", "q"])
        .expect("in-memory write");
    for (p, c) in rows {
        w.write_record([p.to_string(), c.to_string(), q.to_string()])
            .expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 output")
}
