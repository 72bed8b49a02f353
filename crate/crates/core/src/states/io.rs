use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{Marginal, QuantumState, Representation};
use crate::error::{Error, Result};
use crate::table::Table;

pub const STATE_FORMAT_VERSION: u32 = 1;

/// JSON form of a state: `{version, cutoff, rho}` with `rho[i][j] = [re, im]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateDocument {
    pub version: u32,
    pub cutoff: usize,
    pub rho: Vec<Vec<[f64; 2]>>,
}

impl From<&QuantumState> for StateDocument {
    fn from(s: &QuantumState) -> Self {
        let n = s.cutoff();
        let rho = (0..n)
            .map(|i| (0..n).map(|j| [s.rho()[(i, j)].re, s.rho()[(i, j)].im]).collect())
            .collect();
        StateDocument { version: STATE_FORMAT_VERSION, cutoff: n, rho }
    }
}

impl StateDocument {
    pub fn into_state(self) -> Result<QuantumState> {
        if self.version != STATE_FORMAT_VERSION {
            return Err(Error::InvalidArgument(format!("unsupported state format version {}", self.version)));
        }
        let n = self.cutoff;
        if self.rho.len() != n || self.rho.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidArgument(format!("rho is not {n}x{n}")));
        }
        let m = DMatrix::from_fn(n, n, |i, j| Complex64::new(self.rho[i][j][0], self.rho[i][j][1]));
        QuantumState::from_density_matrix(m)
    }
}

impl QuantumState {
    pub fn to_json(&self) -> String {
        serde_json::to_string(&StateDocument::from(self)).expect("state document serialises")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str::<StateDocument>(text)?.into_state()
    }
}

/// Marginal as CSV columns `x,density` (plus `se` when present).
pub fn marginal_to_csv(m: &Marginal, meta: &[(&str, String)]) -> String {
    let mut t = if m.se.is_some() { Table::new(&["x", "density", "se"]) } else { Table::new(&["x", "density"]) };
    t = t.with_meta("repr", m.repr.xi().to_string());
    for (k, v) in meta {
        t = t.with_meta(k, v.clone());
    }
    for i in 0..m.x.len() {
        let mut row = vec![m.x[i], m.density[i]];
        if let Some(se) = &m.se {
            row.push(se[i]);
        }
        t.push(row);
    }
    t.to_csv()
}

pub fn marginal_from_csv(text: &str) -> Result<Marginal> {
    let t = Table::from_csv(text)?;
    let x = t.column("x").ok_or_else(|| Error::InvalidArgument("marginal CSV lacks an x column".into()))?;
    let d = t
        .column("density")
        .ok_or_else(|| Error::InvalidArgument("marginal CSV lacks a density column".into()))?;
    let repr = match t.meta("repr") {
        Some(v) => Representation::from_xi(
            v.trim().parse().map_err(|_| Error::InvalidArgument(format!("bad repr tag {v}")))?,
        )?,
        None => Representation::Husimi,
    };
    let mut m = Marginal::new(x, d, repr);
    m.se = t.column("se");
    Ok(m)
}
