use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::analytics::SweepMethod;
use crate::dsl::{eval_state_expr, parse_state_expr};
use crate::dynamics::{Kind, OscillatorParams, SimConfig, DEFAULT_DT};
use crate::error::{Error, Result};
use crate::numerics::linspace;
use crate::states::{QuantumState, Representation, DEFAULT_CUTOFF};

/// Cutoffs tried in turn when the spec leaves the basis size open.
pub const AUTO_CUTOFFS: [usize; 3] = [DEFAULT_CUTOFF, 64, 128];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BGrid {
    pub min: f64,
    pub max: f64,
    pub n: usize,
}

impl Default for BGrid {
    fn default() -> Self {
        BGrid { min: -3.0, max: 3.0, n: 41 }
    }
}

impl BGrid {
    pub fn validate(&self) -> Result<()> {
        if !(self.min.is_finite() && self.max.is_finite()) {
            return Err(Error::InvalidSpec("b_grid bounds must be finite".into()));
        }
        match self.n {
            0 => Err(Error::InvalidSpec("b_grid needs at least one point".into())),
            1 if self.min == self.max => Ok(()),
            1 => Err(Error::InvalidSpec("a one-point b_grid needs min == max".into())),
            _ if self.max > self.min => Ok(()),
            _ => Err(Error::InvalidSpec(format!("b_grid must increase strictly ({} .. {})", self.min, self.max))),
        }
    }

    pub fn points(&self) -> Vec<f64> {
        linspace(self.min, self.max, self.n)
    }
}

/// Simulation block of a spec; absent fields take the defaults for λ.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct SimSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dt: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t_max: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_traj: Option<usize>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub settle: bool,
}

fn default_kind() -> Kind {
    Kind::Opo
}

fn default_xi() -> i32 {
    1
}

/// Nonlinearity used when a spec leaves `g` out; analytic sweeps ignore it.
pub const DEFAULT_G: f64 = 0.05;

fn default_g() -> f64 {
    DEFAULT_G
}

/// One experiment, as read from a single JSON file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSpec {
    pub state: String,
    pub lambda: f64,
    #[serde(default = "default_g")]
    pub g: f64,
    #[serde(default = "default_kind")]
    pub kind: Kind,
    #[serde(default = "default_xi")]
    pub xi: i32,
    #[serde(default)]
    pub b_grid: BGrid,
    #[serde(default)]
    pub sim: SimSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out_dir: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cutoff: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub method: Option<SweepMethod>,
}

impl ExperimentSpec {
    pub fn new(state: &str, lambda: f64, g: f64) -> Self {
        ExperimentSpec {
            state: state.to_string(),
            lambda,
            g,
            kind: Kind::Opo,
            xi: 1,
            b_grid: BGrid::default(),
            sim: SimSpec::default(),
            out_dir: None,
            cutoff: None,
            method: None,
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let spec: ExperimentSpec =
            serde_json::from_str(text).map_err(|e| Error::InvalidSpec(format!("spec file: {e}")))?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn from_file(path: &std::path::Path) -> Result<Self> {
        ExperimentSpec::from_json(&std::fs::read_to_string(path)?)
    }

    /// Compact single-line JSON, used to echo the spec in output headers.
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("spec serialises")
    }

    pub fn repr(&self) -> Result<Representation> {
        Representation::from_xi(self.xi).map_err(|e| Error::InvalidSpec(e.to_string()))
    }

    pub fn params(&self) -> OscillatorParams {
        OscillatorParams { lambda: self.lambda, g: self.g, b: 0.0, kind: self.kind }
    }

    pub fn sim_config(&self) -> Result<SimConfig> {
        let base = SimConfig::default_for(self.lambda);
        Ok(SimConfig {
            dt: self.sim.dt.unwrap_or(DEFAULT_DT),
            t_max: self.sim.t_max.unwrap_or(base.t_max),
            repr: self.repr()?,
            seed: self.sim.seed,
            n_traj: self.sim.n_traj.unwrap_or(base.n_traj),
            record_every: 0,
            settle: self.sim.settle,
        })
    }

    pub fn validate(&self) -> Result<()> {
        parse_state_expr(&self.state)?;
        self.params().validate().map_err(|e| Error::InvalidSpec(e.to_string()))?;
        self.repr()?;
        self.b_grid.validate()?;
        self.sim_config()?.validate(&self.params())?;
        if let Some(c) = self.cutoff {
            if c < 2 {
                return Err(Error::InvalidSpec(format!("cutoff must be at least 2, got {c}")));
            }
        }
        Ok(())
    }

    /// Evaluates the state expression, growing the basis through
    /// [`AUTO_CUTOFFS`] when no cutoff is given and the state does not fit.
    pub fn build_state(&self) -> Result<QuantumState> {
        let expr = parse_state_expr(&self.state)?;
        if let Some(c) = self.cutoff {
            return eval_state_expr(&expr, c);
        }
        let mut last = None;
        for c in AUTO_CUTOFFS {
            match eval_state_expr(&expr, c) {
                Err(e @ Error::CutoffTooSmall { .. }) => last = Some(e),
                other => return other,
            }
        }
        Err(last.expect("at least one cutoff tried"))
    }
}
