//! Bias sweeps, Monte Carlo versus closed-form comparisons, washout studies
//! and JPO sweeps, driven by a single JSON spec.

mod spec;

use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::analytics::{
    analytic_probability, analytic_sweep, filter_sigma2, max_slope, reconstruct_marginal, BiasSweep, SweepMethod,
    SweepPoint,
};
use crate::dynamics::{
    phase_clusters, run_ensemble_from, stable_pair, EnsembleResult, Kind, PhaseClusters, SimConfig,
};
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::rng::derive_seed;
use crate::states::{x_marginal, InitialDistribution, Marginal, QuantumState, Representation};

pub use crate::dynamics::steady_state_amplitude;
pub use spec::{BGrid, ExperimentSpec, SimSpec, AUTO_CUTOFFS, DEFAULT_G};

/// A sweep point that could not be evaluated.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointFailure {
    pub b: f64,
    pub kind: String,
    pub message: String,
}

/// Per-point ensemble summary of a Monte Carlo sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointSummary {
    pub b: f64,
    pub n1: usize,
    pub n0: usize,
    pub n_unresolved: usize,
    pub mean_final_amplitude: f64,
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub warning: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub clusters: Option<PhaseClusters>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepOutcome {
    pub sweep: BiasSweep,
    pub failures: Vec<PointFailure>,
    /// Empty for analytic sweeps.
    pub points: Vec<PointSummary>,
}

/// Initial X-marginal of the spec's state in the spec's representation.
pub fn spec_marginal(spec: &ExperimentSpec, state: &QuantumState) -> Result<Marginal> {
    x_marginal(state, spec.repr()?)
}

/// Sweep of the α⁽¹⁾ probability over the spec's b-grid. Point failures are
/// recorded and the point is left out of the sweep.
pub fn bias_sweep(spec: &ExperimentSpec, method: SweepMethod) -> Result<SweepOutcome> {
    spec.validate()?;
    let state = spec.build_state()?;
    bias_sweep_state(spec, &state, method, Execution::default())
}

/// As [`bias_sweep`], for an already evaluated state.
pub fn bias_sweep_state(
    spec: &ExperimentSpec,
    state: &QuantumState,
    method: SweepMethod,
    exec: Execution,
) -> Result<SweepOutcome> {
    let bs = spec.b_grid.points();
    let repr = spec.repr()?;
    match method {
        SweepMethod::Analytic => {
            filter_sigma2(spec.lambda, repr)?;
            let m = spec_marginal(spec, state)?;
            let sweep = analytic_sweep(&m, spec.lambda, repr, &bs)?;
            Ok(SweepOutcome { sweep, failures: Vec::new(), points: Vec::new() })
        }
        SweepMethod::Mc => {
            let init = InitialDistribution::from_state(state, repr)?;
            let sim = spec.sim_config()?;
            let mut entries = Vec::new();
            let mut points = Vec::new();
            let mut failures = Vec::new();
            for (i, &b) in bs.iter().enumerate() {
                let p = spec.params().with_bias(b);
                let point_sim = SimConfig { seed: derive_seed(sim.seed, i as u64), ..sim };
                match run_ensemble_from(&init, &p, &point_sim, exec) {
                    Ok(r) => {
                        entries.push(SweepPoint { b, p: r.p, se: r.se });
                        points.push(summarize_point(b, &r, p.kind));
                    }
                    Err(e) => failures.push(PointFailure { b, kind: e.kind().to_string(), message: e.to_string() }),
                }
            }
            let sweep = BiasSweep::new(SweepMethod::Mc, repr, entries)?;
            Ok(SweepOutcome { sweep, failures, points })
        }
    }
}

fn summarize_point(b: f64, r: &EnsembleResult, kind: Kind) -> PointSummary {
    PointSummary {
        b,
        n1: r.n1,
        n0: r.n0,
        n_unresolved: r.n_unresolved,
        mean_final_amplitude: r.mean_final_amplitude,
        seed: r.sim.seed,
        warning: r.warning.clone(),
        clusters: (kind == Kind::Jpo).then(|| phase_clusters(&r.finals, &r.outcomes)).flatten(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct CompareOptions {
    /// Filter representation for the closed form; defaults to the spec's.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub analytic_xi: Option<i32>,
    /// Deviation, in standard errors, that still passes.
    #[serde(default = "default_threshold")]
    pub threshold: f64,
}

fn default_threshold() -> f64 {
    4.0
}

impl CompareOptions {
    pub fn new() -> Self {
        CompareOptions { analytic_xi: None, threshold: default_threshold() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonPoint {
    pub b: f64,
    pub p_mc: f64,
    pub se_mc: f64,
    pub p_analytic: f64,
    /// Larger of the Monte Carlo error and the binomial error at `p_analytic`.
    pub se_used: f64,
    /// `|p_mc − p_analytic| / se_used`; `None` if the error is zero but the
    /// probabilities differ.
    pub z: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub mc_xi: i32,
    pub analytic_xi: i32,
    pub threshold: f64,
    pub points: Vec<ComparisonPoint>,
    pub failures: Vec<PointFailure>,
    /// `None` when some point has an unbounded deviation.
    pub max_z: Option<f64>,
    pub max_abs_diff: f64,
    pub pass: bool,
}

/// Per-point deviation of the Monte Carlo sweep from the closed form.
pub fn compare_mc_analytic(spec: &ExperimentSpec, opts: &CompareOptions) -> Result<ComparisonReport> {
    spec.validate()?;
    let state = spec.build_state()?;
    compare_state(spec, &state, opts, Execution::default())
}

pub fn compare_state(
    spec: &ExperimentSpec,
    state: &QuantumState,
    opts: &CompareOptions,
    exec: Execution,
) -> Result<ComparisonReport> {
    let mc = bias_sweep_state(spec, state, SweepMethod::Mc, exec)?;
    let marginal = spec_marginal(spec, state)?;
    let analytic_repr = match opts.analytic_xi {
        Some(xi) => Representation::from_xi(xi)?,
        None => spec.repr()?,
    };
    compare_sweep(&mc, &marginal, spec.lambda, analytic_repr, opts.threshold)
}

/// Compares a finished Monte Carlo sweep with the closed form for `marginal`.
pub fn compare_sweep(
    mc: &SweepOutcome,
    marginal: &Marginal,
    lambda: f64,
    analytic_repr: Representation,
    threshold: f64,
) -> Result<ComparisonReport> {
    let mut points = Vec::with_capacity(mc.sweep.points.len());
    for (pt, summary) in mc.sweep.points.iter().zip(&mc.points) {
        let pa = analytic_probability(marginal, lambda, analytic_repr, pt.b)?;
        let n = (summary.n1 + summary.n0).max(1) as f64;
        let se_used = pt.se.max((pa * (1.0 - pa) / n).sqrt());
        let diff = (pt.p - pa).abs();
        let z = if se_used > 0.0 {
            Some(diff / se_used)
        } else if diff == 0.0 {
            Some(0.0)
        } else {
            None
        };
        points.push(ComparisonPoint { b: pt.b, p_mc: pt.p, se_mc: pt.se, p_analytic: pa, se_used, z });
    }
    let max_z = points.iter().try_fold(0.0f64, |acc, p| p.z.map(|z| acc.max(z)));
    let max_abs_diff = points.iter().map(|p| (p.p_mc - p.p_analytic).abs()).fold(0.0, f64::max);
    let pass = mc.failures.is_empty() && max_z.is_some_and(|z| z <= threshold);
    Ok(ComparisonReport {
        mc_xi: mc.sweep.repr.xi(),
        analytic_xi: analytic_repr.xi(),
        threshold,
        points,
        failures: mc.failures.clone(),
        max_z,
        max_abs_diff,
        pass,
    })
}

/// Maximum slope of the analytic sweep at each λ.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WashoutReport {
    pub lambdas: Vec<f64>,
    pub max_slopes: Vec<f64>,
    /// Slopes in the rescaled coordinate `x* = −√2 b/(λ−1)`, i.e. the peak of
    /// the smoothed marginal.
    pub max_densities: Vec<f64>,
    /// True when the raw-b slope strictly decreases along `lambdas`.
    pub slopes_decreasing: bool,
    pub densities_decreasing: bool,
}

pub fn washout_study(spec: &ExperimentSpec, lambdas: &[f64]) -> Result<WashoutReport> {
    let state = spec.build_state()?;
    let m = spec_marginal(spec, &state)?;
    let repr = spec.repr()?;
    let bs = spec.b_grid.points();
    let mut max_slopes = Vec::new();
    let mut max_densities = Vec::new();
    for &l in lambdas {
        let s = analytic_sweep(&m, l, repr, &bs)?;
        let slope = max_slope(&s);
        max_slopes.push(slope);
        max_densities.push(slope * (l - 1.0) / std::f64::consts::SQRT_2);
    }
    let dec = |v: &[f64]| v.windows(2).all(|w| w[1] < w[0]);
    Ok(WashoutReport {
        lambdas: lambdas.to_vec(),
        slopes_decreasing: dec(&max_slopes),
        densities_decreasing: dec(&max_densities),
        max_slopes,
        max_densities,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JpoReport {
    /// Stable fixed points `[α⁽¹⁾, α⁽⁰⁾]` at zero bias, as `[re, im]`.
    pub fixed_points: [[f64; 2]; 2],
    pub amplitude: f64,
    /// Phase of α⁽¹⁾ measured from the +X axis, in radians.
    pub rotation_angle: f64,
    pub outcome: SweepOutcome,
}

/// Monte Carlo sweep of a JPO spec with nearest-fixed-point classification.
pub fn jpo_sweep(spec: &ExperimentSpec) -> Result<JpoReport> {
    spec.validate()?;
    if spec.kind != Kind::Jpo {
        return Err(Error::InvalidSpec(format!("jpo sweep needs kind = jpo, got {}", spec.kind)));
    }
    let state = spec.build_state()?;
    jpo_sweep_state(spec, &state, Execution::default())
}

pub fn jpo_sweep_state(spec: &ExperimentSpec, state: &QuantumState, exec: Execution) -> Result<JpoReport> {
    let [one, zero] = stable_pair(&spec.params())?;
    let outcome = bias_sweep_state(spec, state, SweepMethod::Mc, exec)?;
    let pair = |a: Complex64| [a.re, a.im];
    Ok(JpoReport {
        fixed_points: [pair(one), pair(zero)],
        amplitude: one.norm(),
        rotation_angle: one.arg(),
        outcome,
    })
}

/// Files written by [`write_outputs`].
#[derive(Debug, Clone, PartialEq)]
pub struct OutputFiles {
    pub sweep: PathBuf,
    pub reconstruction: Option<PathBuf>,
    pub report: PathBuf,
}

/// Metadata header lines shared by all CSV outputs.
pub fn spec_meta(spec: &ExperimentSpec) -> Vec<(&'static str, String)> {
    vec![("spec", spec.to_json())]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub spec: ExperimentSpec,
    pub method: SweepMethod,
    pub sigma2: Option<f64>,
    pub failures: Vec<PointFailure>,
    pub points: Vec<PointSummary>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reconstruction_error: Option<String>,
}

/// Writes `sweep.csv`, `reconstruction.csv` (when the sweep has enough
/// points) and `report.json` into `dir`. Contents depend only on the inputs.
pub fn write_outputs(spec: &ExperimentSpec, method: SweepMethod, outcome: &SweepOutcome, dir: &Path) -> Result<OutputFiles> {
    std::fs::create_dir_all(dir)?;
    let meta = spec_meta(spec);
    let sweep_path = dir.join("sweep.csv");
    std::fs::write(&sweep_path, outcome.sweep.to_csv(&meta))?;
    let (reconstruction, reconstruction_error) = match reconstruct_marginal(&outcome.sweep, spec.lambda) {
        Ok(m) => {
            let path = dir.join("reconstruction.csv");
            std::fs::write(&path, crate::states::marginal_to_csv(&m, &meta))?;
            (Some(path), None)
        }
        Err(e) => (None, Some(e.to_string())),
    };
    let report = RunReport {
        spec: spec.clone(),
        method,
        sigma2: filter_sigma2(spec.lambda, spec.repr()?).ok(),
        failures: outcome.failures.clone(),
        points: outcome.points.clone(),
        reconstruction_error,
    };
    let report_path = dir.join("report.json");
    std::fs::write(&report_path, serde_json::to_string_pretty(&report)? + "\n")?;
    Ok(OutputFiles { sweep: sweep_path, reconstruction, report: report_path })
}
