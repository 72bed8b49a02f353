use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{husimi_q, PhaseSpaceField, QuantumState, Representation};
use crate::error::{Error, Result};
use crate::numerics::trapezoid_uniform;
use crate::rng::Stream;

/// Quadrature means and symmetrised covariance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaussianMoments {
    pub mean_x: f64,
    pub mean_y: f64,
    pub var_x: f64,
    pub var_y: f64,
    pub cov_xy: f64,
}

impl GaussianMoments {
    pub fn det(&self) -> f64 {
        self.var_x * self.var_y - self.cov_xy * self.cov_xy
    }
}

/// Exact sampler for the bilinear interpolant of a tabulated Q function:
/// inverse CDF on the X-marginal, then inverse CDF on Y given X.
#[derive(Debug, Clone)]
pub struct PhaseSpaceSampler {
    x: Vec<f64>,
    y: Vec<f64>,
    marginal: Vec<f64>,
    x_cdf: Vec<f64>,
    columns: Vec<f64>,
    y_cdfs: Vec<f64>,
}

/// Position inside a cell of width `h` whose density rises linearly from `f0`
/// to `f1`, such that the enclosed mass equals `target`.
fn invert_linear_cell(f0: f64, f1: f64, h: f64, target: f64) -> f64 {
    let a = (f1 - f0) / (2.0 * h);
    let disc = (f0 * f0 + 4.0 * a * target).max(0.0);
    let denom = f0 + disc.sqrt();
    let s = if denom > 0.0 { 2.0 * target / denom } else { 0.5 * h };
    s.clamp(0.0, h)
}

fn cumulative_cells(values: &[f64], h: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(values.len());
    let mut acc = 0.0;
    out.push(0.0);
    for w in values.windows(2) {
        acc += 0.5 * h * (w[0] + w[1]);
        out.push(acc);
    }
    out
}

fn draw_in_table(nodes: &[f64], values: &[f64], cdf: &[f64], u: f64) -> (usize, f64) {
    let total = cdf[cdf.len() - 1];
    let target = u * total;
    let i = cdf.partition_point(|&c| c <= target).clamp(1, cdf.len() - 1) - 1;
    let h = nodes[i + 1] - nodes[i];
    let s = invert_linear_cell(values[i], values[i + 1], h, target - cdf[i]);
    (i, s / h)
}

impl PhaseSpaceSampler {
    pub fn new(field: &PhaseSpaceField) -> Result<Self> {
        if field.repr != Representation::Husimi {
            return Err(Error::UnsupportedRepresentation(format!(
                "phase-space sampling needs a non-negative Husimi Q field, got {}",
                field.repr
            )));
        }
        let x = field.x.clone();
        let y = field.y.clone();
        let dx = x[1] - x[0];
        let dy = y[1] - y[0];
        let ny = y.len();
        let mut columns = Vec::with_capacity(x.len() * ny);
        let mut y_cdfs = Vec::with_capacity(x.len() * ny);
        let mut marginal = Vec::with_capacity(x.len());
        for ix in 0..x.len() {
            let col: Vec<f64> = field.column(ix).iter().map(|v| v.max(0.0)).collect();
            marginal.push(trapezoid_uniform(&col, dy));
            y_cdfs.extend(cumulative_cells(&col, dy));
            columns.extend(col);
        }
        let x_cdf = cumulative_cells(&marginal, dx);
        if !(x_cdf[x_cdf.len() - 1] > 0.0) {
            return Err(Error::InvalidArgument("phase-space field has no mass on its grid".into()));
        }
        Ok(PhaseSpaceSampler { x, y, marginal, x_cdf, columns, y_cdfs })
    }

    pub fn from_state(state: &QuantumState) -> Result<Self> {
        PhaseSpaceSampler::new(&husimi_q(state))
    }

    /// One draw, returned as the coherent amplitude `α = (X + iY)/√2`.
    pub fn sample(&self, stream: &mut Stream) -> Complex64 {
        let (ix, t) = draw_in_table(&self.x, &self.marginal, &self.x_cdf, stream.uniform());
        let xv = self.x[ix] + t * (self.x[ix + 1] - self.x[ix]);
        let w_left = (1.0 - t) * self.marginal[ix];
        let w_right = t * self.marginal[ix + 1];
        let col = if stream.uniform() * (w_left + w_right) < w_left { ix } else { ix + 1 };
        let ny = self.y.len();
        let vals = &self.columns[col * ny..(col + 1) * ny];
        let cdf = &self.y_cdfs[col * ny..(col + 1) * ny];
        let (iy, s) = if cdf[ny - 1] > 0.0 {
            draw_in_table(&self.y, vals, cdf, stream.uniform())
        } else {
            (ny / 2, 0.0)
        };
        let yv = self.y[iy] + s * (self.y[iy + 1] - self.y[iy]);
        Complex64::new(xv, yv) * std::f64::consts::FRAC_1_SQRT_2
    }

    /// Normalised X-marginal CDF at the grid nodes (what the X draws follow).
    pub fn x_cdf(&self) -> (Vec<f64>, Vec<f64>) {
        let total = self.x_cdf[self.x_cdf.len() - 1];
        (self.x.clone(), self.x_cdf.iter().map(|c| c / total).collect())
    }
}

/// Draws `count` phase-space points from the Q function of `state`; draw `i`
/// uses the stream `(seed, i)`.
pub fn sample_phase_space(
    state: &QuantumState,
    repr: Representation,
    count: usize,
    seed: u64,
) -> Result<Vec<Complex64>> {
    if repr != Representation::Husimi {
        return Err(Error::UnsupportedRepresentation(format!(
            "sampling is only defined for the Husimi Q function, not {repr}"
        )));
    }
    if count == 0 {
        return Err(Error::InvalidArgument("sample count must be at least 1".into()));
    }
    let sampler = PhaseSpaceSampler::from_state(state)?;
    Ok((0..count as u64).map(|i| sampler.sample(&mut Stream::new(seed, i))).collect())
}

/// Initial-condition distribution for stochastic trajectories.
#[derive(Debug, Clone)]
pub enum InitialDistribution {
    /// Tabulated Q function.
    Husimi(PhaseSpaceSampler),
    /// Gaussian Wigner function of a Gaussian pure state, sampled exactly.
    GaussianWigner { moments: GaussianMoments, chol: [f64; 3] },
}

impl InitialDistribution {
    pub fn from_state(state: &QuantumState, repr: Representation) -> Result<Self> {
        match repr {
            Representation::Husimi => Ok(InitialDistribution::Husimi(PhaseSpaceSampler::from_state(state)?)),
            Representation::Wigner => {
                let m = state.quadrature_moments();
                let pure = state.purity() > 1.0 - 1e-8;
                // Pure states saturate det Σ = 1/4 exactly when they are Gaussian.
                if !pure || (m.det() - 0.25).abs() > 1e-6 {
                    return Err(Error::UnsupportedRepresentation(format!(
                        "Wigner trajectories need a Gaussian pure initial state (det cov = {:.6}, purity = {:.6})",
                        m.det(),
                        state.purity()
                    )));
                }
                Ok(InitialDistribution::gaussian(m))
            }
            Representation::GlauberP => Err(Error::UnsupportedRepresentation(
                "the Glauber-Sudarshan P function cannot be sampled for non-classical states".into(),
            )),
        }
    }

    pub fn gaussian(moments: GaussianMoments) -> Self {
        let l11 = moments.var_x.sqrt();
        let l21 = moments.cov_xy / l11;
        let l22 = (moments.var_y - l21 * l21).max(0.0).sqrt();
        InitialDistribution::GaussianWigner { moments, chol: [l11, l21, l22] }
    }

    pub fn sample(&self, stream: &mut Stream) -> Complex64 {
        use crate::rng::NoiseSource;
        match self {
            InitialDistribution::Husimi(s) => s.sample(stream),
            InitialDistribution::GaussianWigner { moments, chol } => {
                let z1 = stream.standard_normal();
                let z2 = stream.standard_normal();
                let x = moments.mean_x + chol[0] * z1;
                let y = moments.mean_y + chol[1] * z1 + chol[2] * z2;
                Complex64::new(x, y) * std::f64::consts::FRAC_1_SQRT_2
            }
        }
    }
}
