//! Semiclassical stochastic trajectories of the degenerate parametric
//! oscillator.
//!
//! Drift in coherent-amplitude units (time in units of the inverse cavity
//! decay rate):
//!
//! ```text
//! OPO:  dα/dt = −α + λα* − g²|α|²α + b
//! JPO:  dα/dt = −α + λα* + i g²|α|²α + b
//! ```
//!
//! The integrator works in quadratures `X = √2 Re α`, `Y = √2 Im α`, with
//! constant noise amplitudes `√(1 + ξ(1−λ))` on X and `√(1 + ξ(1+λ))` on Y.

mod fixed_points;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::rng::{NoiseSource, Stream};
use crate::states::{InitialDistribution, QuantumState, Representation};

pub use fixed_points::{classify_point, fixed_points, jacobian, newton_polish, stable_pair, FixedPoint};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    Opo,
    Jpo,
    /// OPO with the saturating term switched off (pure phase-sensitive gain).
    Linear,
}

impl std::str::FromStr for Kind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "opo" => Ok(Kind::Opo),
            "jpo" => Ok(Kind::Jpo),
            "linear" => Ok(Kind::Linear),
            _ => Err(Error::InvalidArgument(format!("unknown oscillator kind `{s}` (opo, jpo, linear)"))),
        }
    }
}

impl std::fmt::Display for Kind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Kind::Opo => "opo",
            Kind::Jpo => "jpo",
            Kind::Linear => "linear",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OscillatorParams {
    pub lambda: f64,
    pub g: f64,
    pub b: f64,
    pub kind: Kind,
}

impl OscillatorParams {
    pub fn opo(lambda: f64, g: f64, b: f64) -> Self {
        OscillatorParams { lambda, g, b, kind: Kind::Opo }
    }

    pub fn jpo(lambda: f64, g: f64, b: f64) -> Self {
        OscillatorParams { lambda, g, b, kind: Kind::Jpo }
    }

    pub fn with_bias(self, b: f64) -> Self {
        OscillatorParams { b, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.lambda > 1.0 && self.lambda.is_finite()) {
            return Err(Error::InvalidArgument(format!("lambda must exceed 1, got {}", self.lambda)));
        }
        if !(self.g > 0.0 && self.g.is_finite()) {
            return Err(Error::InvalidArgument(format!("g must be positive, got {}", self.g)));
        }
        if !self.b.is_finite() {
            return Err(Error::InvalidArgument(format!("bias must be finite, got {}", self.b)));
        }
        Ok(())
    }

    /// Unbiased OPO steady-state modulus `√(λ−1)/g`.
    pub fn nominal_amplitude(&self) -> f64 {
        (self.lambda - 1.0).sqrt() / self.g
    }
}

/// Deterministic part of the amplitude equation.
pub fn drift(alpha: Complex64, p: &OscillatorParams) -> Complex64 {
    let lin = -alpha + p.lambda * alpha.conj() + p.b;
    let g2n = p.g * p.g * alpha.norm_sqr();
    match p.kind {
        Kind::Opo => lin - g2n * alpha,
        Kind::Jpo => lin + Complex64::i() * g2n * alpha,
        Kind::Linear => lin,
    }
}

/// Noise amplitudes `(X, Y)` for representation `repr`.
pub fn diffusion_coeffs(p: &OscillatorParams, repr: Representation) -> Result<(f64, f64)> {
    let xi = repr.xi() as f64;
    let rx = 1.0 + xi * (1.0 - p.lambda);
    let ry = 1.0 + xi * (1.0 + p.lambda);
    if rx < 0.0 {
        return Err(Error::UnsupportedRepresentationRegime { channel: "X", radicand: rx });
    }
    if ry < 0.0 {
        return Err(Error::UnsupportedRepresentationRegime { channel: "Y", radicand: ry });
    }
    Ok((rx.sqrt(), ry.sqrt()))
}

pub const DEFAULT_DT: f64 = 0.005;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub dt: f64,
    pub t_max: f64,
    #[serde(rename = "xi", with = "repr_as_xi")]
    pub repr: Representation,
    pub seed: u64,
    pub n_traj: usize,
    /// Keep every n-th step of single trajectories (0 keeps none).
    #[serde(default)]
    pub record_every: usize,
    /// Stop a trajectory once it sits deep inside a basin it cannot leave
    /// (OPO only; see [`Classifier::settled`]).
    #[serde(default)]
    pub settle: bool,
}

mod repr_as_xi {
    use super::Representation;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(r: &Representation, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_i32(r.xi())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Representation, D::Error> {
        Representation::from_xi(i32::deserialize(d)?).map_err(serde::de::Error::custom)
    }
}

impl SimConfig {
    /// dt = 0.005, t_max = max(15/(λ−1), 10), Husimi sampling, 10⁴ trajectories.
    pub fn default_for(lambda: f64) -> Self {
        SimConfig {
            dt: DEFAULT_DT,
            t_max: (15.0 / (lambda - 1.0)).max(10.0),
            repr: Representation::Husimi,
            seed: 0,
            n_traj: 10_000,
            record_every: 0,
            settle: false,
        }
    }

    pub fn validate(&self, p: &OscillatorParams) -> Result<()> {
        if !(self.dt > 0.0 && self.dt <= 0.01) {
            return Err(Error::InvalidConfig(format!("dt must lie in (0, 0.01], got {}", self.dt)));
        }
        let t_min = 10.0 / (p.lambda - 1.0);
        if !(self.t_max >= t_min) || !self.t_max.is_finite() {
            return Err(Error::InvalidConfig(format!("t_max must be at least 10/(lambda-1) = {t_min}, got {}", self.t_max)));
        }
        if self.n_traj < 100 {
            return Err(Error::InvalidConfig(format!("n_traj must be at least 100, got {}", self.n_traj)));
        }
        Ok(())
    }

    pub fn n_steps(&self) -> usize {
        (self.t_max / self.dt).ceil() as usize
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Outcome {
    /// Phase-0 steady state α⁽¹⁾.
    One,
    /// Phase-π steady state α⁽⁰⁾.
    Zero,
    Unresolved,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    /// Recorded `(t, X, Y)` samples, including the start and end points.
    pub path: Vec<[f64; 3]>,
    pub final_alpha: Complex64,
    pub t_end: f64,
    /// Set when the trajectory stopped early inside a basin.
    pub settled: Option<Outcome>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Basin {
    center: f64,
    half_width: f64,
    outcome: Outcome,
}

/// Maps final amplitudes to outcomes.
///
/// OPO and the linear model use the sign of X; JPO uses the nearer of its two
/// stable fixed points. In both cases amplitudes within half the nominal
/// steady-state modulus of the origin are unresolved (the linear model has
/// no gate).
#[derive(Debug, Clone, PartialEq)]
pub struct Classifier {
    kind: Kind,
    gate: f64,
    attractors: Option<[Complex64; 2]>,
    basins: Vec<Basin>,
}

/// Minimum barrier height, in units of the X diffusion constant, from the
/// edge of a basin's settle box to the separatrix.
const SETTLE_BARRIER: f64 = 15.0;

impl Classifier {
    pub fn new(p: &OscillatorParams) -> Result<Self> {
        p.validate()?;
        let gate = match p.kind {
            Kind::Linear => 0.0,
            _ => 0.5 * p.nominal_amplitude(),
        };
        let attractors = match p.kind {
            Kind::Jpo => Some(stable_pair(p)?),
            _ => None,
        };
        Ok(Classifier { kind: p.kind, gate, attractors, basins: Vec::new() })
    }

    pub fn attractors(&self) -> Option<[Complex64; 2]> {
        self.attractors
    }

    pub fn gate(&self) -> f64 {
        self.gate
    }

    /// Enables early stopping inside OPO basins whose escape barrier is at
    /// least `SETTLE_BARRIER` diffusion units high. The box around each
    /// stable point spans a tenth of its distance to the separatrix.
    pub fn with_settling(mut self, p: &OscillatorParams, cx: f64) -> Self {
        if p.kind != Kind::Opo {
            return self;
        }
        let roots: Vec<f64> =
            fixed_points(p).map(|v| v.iter().map(|f| f.alpha.re * std::f64::consts::SQRT_2).collect()).unwrap_or_default();
        if roots.len() != 3 {
            return self;
        }
        let g2 = p.g * p.g;
        let sb = std::f64::consts::SQRT_2 * p.b;
        let u = |x: f64| -0.5 * (p.lambda - 1.0) * x * x + g2 * x.powi(4) / 8.0 - sb * x;
        let middle = roots[1];
        for (center, outcome) in [(roots[2], Outcome::One), (roots[0], Outcome::Zero)] {
            let half_width = 0.1 * (center - middle).abs();
            let edge = u(center - half_width).max(u(center + half_width));
            let barrier = u(middle) - edge;
            let deep = if cx == 0.0 { barrier > 0.0 } else { 2.0 * barrier / (cx * cx) >= SETTLE_BARRIER };
            if deep {
                self.basins.push(Basin { center, half_width, outcome });
            }
        }
        self
    }

    pub fn classify(&self, alpha: Complex64) -> Outcome {
        if !alpha.is_finite() {
            return Outcome::Unresolved;
        }
        match (self.kind, self.attractors) {
            (Kind::Jpo, Some([one, zero])) => {
                if alpha.norm() < self.gate {
                    Outcome::Unresolved
                } else if (alpha - one).norm() <= (alpha - zero).norm() {
                    Outcome::One
                } else {
                    Outcome::Zero
                }
            }
            _ => {
                if alpha.re.abs() < self.gate || alpha.re == 0.0 {
                    Outcome::Unresolved
                } else if alpha.re > 0.0 {
                    Outcome::One
                } else {
                    Outcome::Zero
                }
            }
        }
    }

    /// Basin whose settle box contains the quadrature point `(x, y)`.
    #[inline]
    pub fn settled(&self, x: f64, y: f64) -> Option<Outcome> {
        self.basins
            .iter()
            .find(|b| (x - b.center).abs() <= b.half_width && y.abs() <= b.half_width)
            .map(|b| b.outcome)
    }
}

/// Classifies a final amplitude under `p` (locates JPO attractors first).
pub fn classify_outcome(final_alpha: Complex64, p: &OscillatorParams) -> Result<Outcome> {
    Ok(Classifier::new(p)?.classify(final_alpha))
}

/// Euler–Maruyama integration from `alpha0` to `sim.t_max`.
pub fn evolve_trajectory<N: NoiseSource>(
    alpha0: Complex64,
    p: &OscillatorParams,
    sim: &SimConfig,
    noise: &mut N,
) -> Result<Trajectory> {
    p.validate()?;
    let coeffs = diffusion_coeffs(p, sim.repr)?;
    integrate(alpha0, p, sim, coeffs, None, noise)
}

fn integrate<N: NoiseSource>(
    alpha0: Complex64,
    p: &OscillatorParams,
    sim: &SimConfig,
    (cx, cy): (f64, f64),
    settle: Option<&Classifier>,
    noise: &mut N,
) -> Result<Trajectory> {
    let s2 = std::f64::consts::SQRT_2;
    let mut x = s2 * alpha0.re;
    let mut y = s2 * alpha0.im;
    let dt = sim.dt;
    let sdt = dt.sqrt();
    let (nx, ny) = (cx * sdt, cy * sdt);
    let gain = p.lambda - 1.0;
    let damp = -(p.lambda + 1.0);
    let k = 0.5 * p.g * p.g;
    let sb = s2 * p.b;
    // |α|² > L² ⇔ X² + Y² > 2L²
    let limit2 = match p.kind {
        Kind::Linear => f64::INFINITY,
        _ => 2.0 * (10.0 * p.nominal_amplitude()).powi(2),
    };
    let n = sim.n_steps();
    let every = sim.record_every;
    let mut path = Vec::new();
    if every > 0 {
        path.push([0.0, x, y]);
    }
    let mut settled = None;
    let mut step = 0;
    while step < n {
        step += 1;
        let r2 = x * x + y * y;
        let (fx, fy) = match p.kind {
            Kind::Opo => (gain * x - k * r2 * x + sb, damp * y - k * r2 * y),
            Kind::Jpo => (gain * x - k * r2 * y + sb, damp * y + k * r2 * x),
            Kind::Linear => (gain * x + sb, damp * y),
        };
        let wx = if nx != 0.0 { noise.standard_normal() } else { 0.0 };
        let wy = if ny != 0.0 { noise.standard_normal() } else { 0.0 };
        x += fx * dt + nx * wx;
        y += fy * dt + ny * wy;
        let r2 = x * x + y * y;
        if !(r2 <= limit2) {
            return Err(Error::NumericalBlowup { t: step as f64 * dt, modulus: (0.5 * r2).sqrt() });
        }
        if every > 0 && (step % every == 0 || step == n) {
            path.push([step as f64 * dt, x, y]);
        }
        if let Some(c) = settle {
            if step % 16 == 0 {
                if let Some(o) = c.settled(x, y) {
                    settled = Some(o);
                    if every > 0 && step % every != 0 {
                        path.push([step as f64 * dt, x, y]);
                    }
                    break;
                }
            }
        }
    }
    Ok(Trajectory {
        path,
        final_alpha: Complex64::new(x, y) / s2,
        t_end: step as f64 * dt,
        settled,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleResult {
    pub n1: usize,
    pub n0: usize,
    pub n_unresolved: usize,
    pub p: f64,
    pub se: f64,
    /// Mean of `|α|` at the end of the trajectories.
    pub mean_final_amplitude: f64,
    /// Set when more than 1% of trajectories are unresolved.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub warning: Option<String>,
    pub params: OscillatorParams,
    pub sim: SimConfig,
    #[serde(skip)]
    pub finals: Vec<Complex64>,
    #[serde(skip)]
    pub outcomes: Vec<Outcome>,
}

impl EnsembleResult {
    pub fn n_resolved(&self) -> usize {
        self.n1 + self.n0
    }
}

/// Samples `sim.n_traj` initial points from `state` and evolves them.
pub fn run_ensemble(state: &QuantumState, p: &OscillatorParams, sim: &SimConfig) -> Result<EnsembleResult> {
    run_ensemble_with(state, p, sim, Execution::default())
}

pub fn run_ensemble_with(
    state: &QuantumState,
    p: &OscillatorParams,
    sim: &SimConfig,
    exec: Execution,
) -> Result<EnsembleResult> {
    p.validate()?;
    diffusion_coeffs(p, sim.repr)?;
    let init = InitialDistribution::from_state(state, sim.repr)?;
    run_ensemble_from(&init, p, sim, exec)
}

/// Ensemble from a prepared initial distribution. Trajectory `i` draws its
/// initial point and its noise from `Stream::new(sim.seed, i)`.
pub fn run_ensemble_from(
    init: &InitialDistribution,
    p: &OscillatorParams,
    sim: &SimConfig,
    exec: Execution,
) -> Result<EnsembleResult> {
    p.validate()?;
    sim.validate(p)?;
    let coeffs = diffusion_coeffs(p, sim.repr)?;
    let mut classifier = Classifier::new(p)?;
    if sim.settle {
        classifier = classifier.with_settling(p, coeffs.0);
    }
    let quiet = SimConfig { record_every: 0, ..*sim };
    let runs = exec.map_indexed(sim.n_traj, |i| {
        let mut stream = Stream::new(sim.seed, i as u64);
        let a0 = init.sample(&mut stream);
        integrate(a0, p, &quiet, coeffs, sim.settle.then_some(&classifier), &mut stream)
            .map(|t| (t.final_alpha, t.settled.unwrap_or_else(|| classifier.classify(t.final_alpha))))
    });
    let mut finals = Vec::with_capacity(runs.len());
    let mut outcomes = Vec::with_capacity(runs.len());
    for r in runs {
        let (a, o) = r?;
        finals.push(a);
        outcomes.push(o);
    }
    Ok(summarize(finals, outcomes, *p, *sim))
}

fn summarize(finals: Vec<Complex64>, outcomes: Vec<Outcome>, params: OscillatorParams, sim: SimConfig) -> EnsembleResult {
    let count = |o: Outcome| outcomes.iter().filter(|&&x| x == o).count();
    let (n1, n0, nu) = (count(Outcome::One), count(Outcome::Zero), count(Outcome::Unresolved));
    let resolved = (n1 + n0) as f64;
    let (p, se) = if n1 + n0 == 0 {
        (0.5, 0.5)
    } else {
        let p = n1 as f64 / resolved;
        (p, (p * (1.0 - p) / resolved).sqrt())
    };
    let total = outcomes.len();
    let warning = (nu * 100 > total).then(|| {
        format!("{nu} of {total} trajectories unresolved ({:.2}%)", 100.0 * nu as f64 / total as f64)
    });
    let mean_final_amplitude = finals.iter().map(|a| a.norm()).sum::<f64>() / total.max(1) as f64;
    EnsembleResult { n1, n0, n_unresolved: nu, p, se, mean_final_amplitude, warning, params, sim, finals, outcomes }
}

/// Circular means of the final phases for each outcome.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhaseClusters {
    pub phase_one: f64,
    pub phase_zero: f64,
    /// Angular distance between the two means, in `[0, π]`.
    pub separation: f64,
}

pub fn phase_clusters(finals: &[Complex64], outcomes: &[Outcome]) -> Option<PhaseClusters> {
    let mean = |which: Outcome| {
        let s: Complex64 = finals
            .iter()
            .zip(outcomes)
            .filter(|(a, &o)| o == which && a.norm() > 0.0)
            .map(|(a, _)| a / a.norm())
            .sum();
        (s.norm() > 0.0).then(|| s.arg())
    };
    let (one, zero) = (mean(Outcome::One)?, mean(Outcome::Zero)?);
    let d = (one - zero).rem_euclid(2.0 * std::f64::consts::PI);
    Some(PhaseClusters { phase_one: one, phase_zero: zero, separation: d.min(2.0 * std::f64::consts::PI - d) })
}

/// Modulus of the α⁽¹⁾ steady state.
pub fn steady_state_amplitude(p: &OscillatorParams) -> Result<f64> {
    p.validate()?;
    match p.kind {
        Kind::Linear => Err(Error::InvalidArgument("the linear model has no steady state".into())),
        Kind::Opo if p.b == 0.0 => Ok(p.nominal_amplitude()),
        Kind::Opo => {
            let stable: Vec<_> = fixed_points(p)?.into_iter().filter(FixedPoint::is_stable).collect();
            Ok(stable.iter().map(|f| f.alpha.re).fold(f64::NEG_INFINITY, f64::max).abs())
        }
        Kind::Jpo => Ok(stable_pair(p)?[0].norm()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::Silent;
    use crate::states::make_fock;
    use approx::assert_relative_eq;

    #[test]
    fn drift_point_values() {
        let z = Complex64::new(0.0, 0.0);
        assert_eq!(drift(z, &OscillatorParams::opo(1.7, 0.3, 0.0)), z);
        assert_eq!(drift(z, &OscillatorParams::jpo(1.7, 0.3, 0.0)), z);
        assert_relative_eq!(drift(Complex64::new(10.0, 0.0), &OscillatorParams::opo(2.0, 0.1, 0.0)).norm(), 0.0, epsilon = 1e-12);
        let j = drift(Complex64::new(10.0, 0.0), &OscillatorParams::jpo(2.0, 0.1, 0.0));
        assert!((j - Complex64::new(10.0, 10.0)).norm() < 1e-12);
        let a = Complex64::new(1.0, 2.0);
        assert!((drift(a, &OscillatorParams::opo(1.5, 0.2, 0.3)) - Complex64::new(0.6, -5.4)).norm() < 1e-12);
        assert!((drift(a, &OscillatorParams::jpo(1.5, 0.2, 0.3)) - Complex64::new(0.4, -4.8)).norm() < 1e-12);
    }

    #[test]
    fn diffusion_table() {
        let p = |l| OscillatorParams::opo(l, 0.1, 0.0);
        assert_eq!(diffusion_coeffs(&p(2.0), Representation::Husimi).unwrap(), (0.0, 2.0));
        assert_eq!(diffusion_coeffs(&p(1.5), Representation::Wigner).unwrap(), (1.0, 1.0));
        assert!(matches!(
            diffusion_coeffs(&p(3.0), Representation::Husimi),
            Err(Error::UnsupportedRepresentationRegime { channel: "X", .. })
        ));
        assert!(matches!(
            diffusion_coeffs(&p(1.5), Representation::GlauberP),
            Err(Error::UnsupportedRepresentationRegime { channel: "Y", .. })
        ));
    }

    #[test]
    fn deterministic_trajectories_reach_the_fixed_points() {
        let p = OscillatorParams::opo(2.0, 0.1, 0.0);
        let sim = SimConfig::default_for(2.0);
        let t = evolve_trajectory(Complex64::new(50.0, 0.0), &p, &sim, &mut Silent).unwrap();
        assert!((t.final_alpha - 10.0).norm() < 1e-3);
        let t = evolve_trajectory(Complex64::new(-0.1, 0.0), &p, &sim, &mut Silent).unwrap();
        assert!((t.final_alpha + 10.0).norm() < 1e-3);
    }

    #[test]
    fn trajectories_are_reproducible_and_thinned() {
        let p = OscillatorParams::opo(1.5, 0.05, 0.1);
        let sim = SimConfig { record_every: 100, ..SimConfig::default_for(1.5) };
        let a = evolve_trajectory(Complex64::new(0.3, 0.1), &p, &sim, &mut Stream::new(4, 2)).unwrap();
        let b = evolve_trajectory(Complex64::new(0.3, 0.1), &p, &sim, &mut Stream::new(4, 2)).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.path.len(), sim.n_steps() / 100 + 1);
        assert_eq!(a.path.last().unwrap()[0], a.t_end);
    }

    #[test]
    fn blowup_is_reported() {
        let p = OscillatorParams::opo(2.0, 0.1, 0.0);
        let sim = SimConfig { dt: 0.01, ..SimConfig::default_for(2.0) };
        let r = evolve_trajectory(Complex64::new(200.0, 0.0), &p, &sim, &mut Silent);
        assert!(matches!(r, Err(Error::NumericalBlowup { .. })));
    }

    #[test]
    fn classification_rules() {
        let p = OscillatorParams::opo(2.0, 0.1, 0.0);
        let c = Classifier::new(&p).unwrap();
        let s2 = std::f64::consts::SQRT_2;
        assert_eq!(c.classify(Complex64::new(9.8 / s2, 0.0)), Outcome::One);
        assert_eq!(c.classify(Complex64::new(-9.9 / s2, 0.0)), Outcome::Zero);
        assert_eq!(c.classify(Complex64::new(0.3 / s2, 0.0)), Outcome::Unresolved);
        assert_eq!(classify_outcome(Complex64::new(-0.3, 9.0), &OscillatorParams::jpo(2.0, 0.1, 0.0)).unwrap(), Outcome::One);
    }

    #[test]
    fn settle_boxes_respect_barriers() {
        let p = OscillatorParams::opo(1.2, 0.05, 0.0);
        let c = Classifier::new(&p).unwrap().with_settling(&p, (0.8f64).sqrt());
        assert_eq!(c.basins.len(), 2);
        // a shallow well near the saddle-node is never used
        let p = OscillatorParams::opo(1.2, 0.05, 0.6);
        let c = Classifier::new(&p).unwrap().with_settling(&p, (0.8f64).sqrt());
        assert_eq!(c.basins.iter().map(|b| b.outcome).collect::<Vec<_>>(), vec![Outcome::One]);
        let p = OscillatorParams::opo(1.2, 0.05, 0.8);
        assert!(Classifier::new(&p).unwrap().with_settling(&p, 0.5).basins.is_empty());
    }

    #[test]
    fn ensembles_do_not_depend_on_scheduling() {
        let s = make_fock(1, 16).unwrap();
        let p = OscillatorParams::opo(2.0, 0.1, 0.2);
        let sim = SimConfig { n_traj: 200, seed: 7, ..SimConfig::default_for(2.0) };
        let a = run_ensemble_with(&s, &p, &sim, Execution::Sequential).unwrap();
        let b = run_ensemble_with(&s, &p, &sim, Execution::Parallel).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.n1 + a.n0 + a.n_unresolved, 200);
        assert!((a.se - (a.p * (1.0 - a.p) / a.n_resolved() as f64).sqrt()).abs() < 1e-15);
        let settled = run_ensemble(&s, &p, &SimConfig { settle: true, ..sim }).unwrap();
        assert_eq!(settled.outcomes, a.outcomes);
    }

    #[test]
    fn sim_config_invariants() {
        let p = OscillatorParams::opo(1.5, 0.05, 0.0);
        assert!(SimConfig::default_for(1.5).validate(&p).is_ok());
        assert!(SimConfig { dt: 0.02, ..SimConfig::default_for(1.5) }.validate(&p).is_err());
        assert!(SimConfig { t_max: 19.0, ..SimConfig::default_for(1.5) }.validate(&p).is_err());
        assert!(SimConfig { n_traj: 99, ..SimConfig::default_for(1.5) }.validate(&p).is_err());
        let json = serde_json::to_value(SimConfig::default_for(2.0)).unwrap();
        assert_eq!(json["xi"], 1);
    }

    #[test]
    fn steady_state_amplitudes() {
        assert_relative_eq!(steady_state_amplitude(&OscillatorParams::opo(2.0, 0.1, 0.0)).unwrap(), 10.0);
        assert_relative_eq!(
            steady_state_amplitude(&OscillatorParams::opo(1.5, 0.05, 0.0)).unwrap(),
            14.142_135_623_731,
            max_relative = 1e-12
        );
        assert_relative_eq!(
            steady_state_amplitude(&OscillatorParams::opo(2.0, 0.1, 0.5)).unwrap(),
            10.241_203_002_151,
            max_relative = 1e-10
        );
        assert_relative_eq!(
            steady_state_amplitude(&OscillatorParams::jpo(2.0, 0.1, 0.0)).unwrap(),
            13.160_740_129_5,
            max_relative = 1e-9
        );
    }

    #[test]
    fn antipodal_clusters() {
        let finals = vec![Complex64::from_polar(1.0, 0.5), Complex64::from_polar(1.0, 0.5 - std::f64::consts::PI)];
        let c = phase_clusters(&finals, &[Outcome::One, Outcome::Zero]).unwrap();
        assert_relative_eq!(c.separation, std::f64::consts::PI, epsilon = 1e-12);
    }
}
