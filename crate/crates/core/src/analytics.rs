//! Closed-form outcome probabilities of the linearised gain stage and the
//! inverse map from a bias sweep back to the (smoothed) initial X-marginal.
//!
//! With `σ² = (1 + ξ(1−λ)) / (2(λ−1))` and boundary `x* = −√2 b/(λ−1)`,
//!
//! ```text
//! p(b) = ∫_{x*}^{∞} (p_X₀ ∗ g_σ)(x) dx = ∫ p_X₀(y) Φ((y − x*)/σ) dy
//! ```

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::numerics::{gauss_legendre4, interp_cubic_in_cell, normal_cdf, trapezoid};
use crate::states::{Marginal, Representation};
use crate::table::Table;

/// Kernel support, in units of σ, beyond which Φ is treated as exactly 0 or 1.
const KERNEL_REACH: f64 = 9.0;
const MAX_PIECES: usize = 512;

pub fn filter_sigma2(lambda: f64, repr: Representation) -> Result<f64> {
    if !(lambda > 1.0) {
        return Err(Error::InvalidArgument(format!("lambda must exceed 1, got {lambda}")));
    }
    let xi = repr.xi() as f64;
    let s2 = (1.0 + xi * (1.0 - lambda)) / (2.0 * (lambda - 1.0));
    if s2 < 0.0 {
        return Err(Error::DeconvolutionRegimeUnsupported { sigma2: s2 });
    }
    Ok(s2)
}

/// Initial X below which the linear gain sends a trajectory to α⁽⁰⁾.
pub fn boundary(b: f64, lambda: f64) -> f64 {
    -std::f64::consts::SQRT_2 * b / (lambda - 1.0)
}

/// Inverse of [`boundary`].
pub fn bias_for_boundary(x: f64, lambda: f64) -> f64 {
    -x * (lambda - 1.0) / std::f64::consts::SQRT_2
}

fn check_marginal(m: &Marginal) -> Result<()> {
    if m.x.len() < 2 || m.x.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::InvalidArgument("marginal grid must be strictly increasing with at least two nodes".into()));
    }
    if m.density.iter().any(|d| !d.is_finite()) {
        return Err(Error::InvalidArgument("marginal density has non-finite values".into()));
    }
    Ok(())
}

/// `∫ m(y) k(y) dy` over the cubic interpolant of `m`. Cells that meet the
/// window `[lo, hi]` are cut at `lo`/`hi` and split into pieces no wider than
/// `piece`; elsewhere `k` is taken as the constant `k_left` / `k_right`.
fn integrate_against(
    m: &Marginal,
    lo: f64,
    hi: f64,
    piece: f64,
    k_left: f64,
    k_right: f64,
    k: impl Fn(f64) -> f64,
) -> f64 {
    let (x, y) = (&m.x, &m.density);
    let mut acc = 0.0;
    for i in 0..x.len() - 1 {
        let (a, c) = (x[i], x[i + 1]);
        let f = |t: f64| interp_cubic_in_cell(x, y, i, t);
        if c <= lo {
            if k_left != 0.0 {
                acc += k_left * gauss_legendre4(a, c, f);
            }
            continue;
        }
        if a >= hi {
            acc += k_right * gauss_legendre4(a, c, f);
            continue;
        }
        let (s, e) = (a.max(lo), c.min(hi));
        if s > a {
            acc += k_left * gauss_legendre4(a, s, f);
        }
        if c > e {
            acc += k_right * gauss_legendre4(e, c, f);
        }
        let n = if piece > 0.0 { ((e - s) / piece).ceil().clamp(1.0, MAX_PIECES as f64) as usize } else { 1 };
        let w = (e - s) / n as f64;
        for j in 0..n {
            let p0 = s + j as f64 * w;
            let p1 = if j + 1 == n { e } else { p0 + w };
            acc += gauss_legendre4(p0, p1, |t| f(t) * k(t));
        }
    }
    acc
}

fn cubic_mass(m: &Marginal) -> f64 {
    integrate_against(m, f64::INFINITY, f64::INFINITY, 0.0, 1.0, 1.0, |_| 1.0)
}

/// Probability of the α⁽¹⁾ outcome for initial X-marginal `m`.
///
/// The filter variance comes from `repr`, independently of `m.repr`, so a
/// mismatched pair can be evaluated on purpose.
pub fn analytic_probability(m: &Marginal, lambda: f64, repr: Representation, b: f64) -> Result<f64> {
    let s2 = filter_sigma2(lambda, repr)?;
    check_marginal(m)?;
    Ok(probability_with(m, s2, boundary(b, lambda)))
}

fn probability_with(m: &Marginal, sigma2: f64, x_star: f64) -> f64 {
    let mass = cubic_mass(m);
    let num = if sigma2 == 0.0 {
        integrate_against(m, x_star, x_star, 0.0, 0.0, 1.0, |_| 1.0)
    } else {
        let s = sigma2.sqrt();
        integrate_against(m, x_star - KERNEL_REACH * s, x_star + KERNEL_REACH * s, 0.5 * s, 0.0, 1.0, |t| {
            normal_cdf((t - x_star) / s)
        })
    };
    (num / mass).clamp(0.0, 1.0)
}

/// Closed form for a Gaussian marginal of the given mean and variance.
pub fn analytic_probability_gaussian(mean: f64, var: f64, lambda: f64, repr: Representation, b: f64) -> Result<f64> {
    if !(var > 0.0) {
        return Err(Error::InvalidArgument(format!("variance must be positive, got {var}")));
    }
    let s2 = filter_sigma2(lambda, repr)?;
    Ok(normal_cdf((mean - boundary(b, lambda)) / (var + s2).sqrt()))
}

/// `m ∗ g_σ` by direct quadrature, tabulated on the grid of `m` extended by
/// `8σ` on both sides at the same spacing.
pub fn smoothed_marginal(m: &Marginal, sigma2: f64) -> Result<Marginal> {
    check_marginal(m)?;
    if sigma2 < 0.0 {
        return Err(Error::DeconvolutionRegimeUnsupported { sigma2 });
    }
    if sigma2 == 0.0 {
        return Ok(m.clone());
    }
    let s = sigma2.sqrt();
    let n = m.x.len();
    let h = (m.x[n - 1] - m.x[0]) / (n - 1) as f64;
    let pad = (8.0 * s / h).ceil() as usize;
    let x0 = m.x[0] - pad as f64 * h;
    let grid: Vec<f64> = (0..n + 2 * pad).map(|i| x0 + i as f64 * h).collect();
    let norm = 1.0 / (s * (2.0 * std::f64::consts::PI).sqrt());
    let density = Execution::Parallel.map_indexed(grid.len(), |i| {
        let t = grid[i];
        integrate_against(m, t - KERNEL_REACH * s, t + KERNEL_REACH * s, 0.5 * s, 0.0, 0.0, |y| {
            let z = (t - y) / s;
            norm * (-0.5 * z * z).exp()
        })
    });
    Ok(Marginal::new(grid, density, m.repr))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SweepMethod {
    Mc,
    Analytic,
}

impl std::str::FromStr for SweepMethod {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "mc" => Ok(SweepMethod::Mc),
            "analytic" => Ok(SweepMethod::Analytic),
            _ => Err(Error::InvalidArgument(format!("unknown sweep method `{s}` (mc, analytic)"))),
        }
    }
}

impl std::fmt::Display for SweepMethod {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            SweepMethod::Mc => "mc",
            SweepMethod::Analytic => "analytic",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub b: f64,
    pub p: f64,
    pub se: f64,
}

/// Outcome probability against bias, ordered by strictly increasing `b`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BiasSweep {
    pub method: SweepMethod,
    #[serde(rename = "xi", with = "xi_tag")]
    pub repr: Representation,
    pub points: Vec<SweepPoint>,
}

mod xi_tag {
    use crate::states::Representation;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(r: &Representation, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_i32(r.xi())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Representation, D::Error> {
        Representation::from_xi(i32::deserialize(d)?).map_err(serde::de::Error::custom)
    }
}

impl BiasSweep {
    pub fn new(method: SweepMethod, repr: Representation, points: Vec<SweepPoint>) -> Result<Self> {
        let s = BiasSweep { method, repr, points };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if let Some(w) = self.points.windows(2).find(|w| !(w[1].b > w[0].b)) {
            return Err(Error::InvalidSweep(format!("bias values must increase strictly ({} then {})", w[0].b, w[1].b)));
        }
        for pt in &self.points {
            if !(0.0..=1.0).contains(&pt.p) || !(pt.se >= 0.0) || !pt.b.is_finite() {
                return Err(Error::InvalidSweep(format!("bad sweep entry b = {}, p = {}, se = {}", pt.b, pt.p, pt.se)));
            }
            if self.method == SweepMethod::Analytic && pt.se != 0.0 {
                return Err(Error::InvalidSweep("analytic sweeps carry no standard error".into()));
            }
        }
        Ok(())
    }

    pub fn b(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.b).collect()
    }

    pub fn p(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.p).collect()
    }

    pub fn to_table(&self, meta: &[(&str, String)]) -> Table {
        let mut t = Table::new(&["b", "p", "se"])
            .with_meta("method", self.method.to_string())
            .with_meta("xi", self.repr.xi().to_string());
        for (k, v) in meta {
            t = t.with_meta(k, v.clone());
        }
        for pt in &self.points {
            t.push(vec![pt.b, pt.p, pt.se]);
        }
        t
    }

    pub fn to_csv(&self, meta: &[(&str, String)]) -> String {
        self.to_table(meta).to_csv()
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let t = Table::from_csv(text)?;
        let col = |name: &str| t.column(name).ok_or_else(|| Error::InvalidSweep(format!("sweep CSV lacks a `{name}` column")));
        let (b, p) = (col("b")?, col("p")?);
        let se = t.column("se").unwrap_or_else(|| vec![0.0; b.len()]);
        let method = t.meta("method").map(str::parse).transpose()?.unwrap_or(SweepMethod::Analytic);
        let repr = match t.meta("xi") {
            Some(v) => Representation::from_xi(
                v.trim().parse().map_err(|_| Error::InvalidSweep(format!("bad xi tag `{v}`")))?,
            )?,
            None => Representation::Husimi,
        };
        let points = (0..b.len()).map(|i| SweepPoint { b: b[i], p: p[i], se: se[i] }).collect();
        BiasSweep::new(method, repr, points)
    }
}

/// Analytic sweep of `m` over `bs`.
pub fn analytic_sweep(m: &Marginal, lambda: f64, repr: Representation, bs: &[f64]) -> Result<BiasSweep> {
    let s2 = filter_sigma2(lambda, repr)?;
    check_marginal(m)?;
    let ps = Execution::Parallel.map_indexed(bs.len(), |i| probability_with(m, s2, boundary(bs[i], lambda)));
    let points = bs.iter().zip(ps).map(|(&b, p)| SweepPoint { b, p, se: 0.0 }).collect();
    BiasSweep::new(SweepMethod::Analytic, repr, points)
}

/// Derivative `dp/db` by central differences (one-sided at the ends), with
/// the propagated standard error of each difference.
pub fn sweep_slope(sweep: &BiasSweep) -> (Vec<f64>, Vec<f64>) {
    let pts = &sweep.points;
    let n = pts.len();
    let mut d = Vec::with_capacity(n);
    let mut e = Vec::with_capacity(n);
    for i in 0..n {
        let (l, r) = match i {
            0 => (0, 1.min(n - 1)),
            _ if i == n - 1 => (n - 2, n - 1),
            _ => (i - 1, i + 1),
        };
        let db = pts[r].b - pts[l].b;
        d.push((pts[r].p - pts[l].p) / db);
        e.push((pts[r].se.powi(2) + pts[l].se.powi(2)).sqrt() / db);
    }
    (d, e)
}

/// Largest `dp/db` along a sweep.
pub fn max_slope(sweep: &BiasSweep) -> f64 {
    sweep_slope(sweep).0.into_iter().fold(f64::NEG_INFINITY, f64::max)
}

/// Smoothed initial marginal from a bias sweep: `x = −√2 b/(λ−1)`,
/// `density = (λ−1)/√2 · dp/db`, renormalised to unit mass.
pub fn reconstruct_marginal(sweep: &BiasSweep, lambda: f64) -> Result<Marginal> {
    if !(lambda > 1.0) {
        return Err(Error::InvalidArgument(format!("lambda must exceed 1, got {lambda}")));
    }
    if sweep.points.len() < 9 {
        return Err(Error::InvalidSweep(format!("need at least 9 sweep points, got {}", sweep.points.len())));
    }
    sweep.validate()?;
    let (slope, slope_se) = sweep_slope(sweep);
    let jac = (lambda - 1.0) / std::f64::consts::SQRT_2;
    // x decreases with b; reverse so the grid ascends
    let x: Vec<f64> = sweep.points.iter().rev().map(|p| boundary(p.b, lambda)).collect();
    let density: Vec<f64> = slope.iter().rev().map(|d| jac * d).collect();
    let mut m = Marginal::new(x, density, sweep.repr);
    if sweep.points.iter().any(|p| p.se > 0.0) {
        m.se = Some(slope_se.iter().rev().map(|e| jac * e).collect());
    }
    let mass = trapezoid(&m.x, &m.density);
    if !(mass > 0.0) {
        return Err(Error::InvalidSweep("reconstructed density has no positive mass".into()));
    }
    Ok(m.normalized())
}
