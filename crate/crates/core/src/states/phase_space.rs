use nalgebra::DVector;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{QuantumState, Representation};
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::numerics::{
    cumulative_trapezoid, interp_cubic_in_cell, interp_linear, linspace, locate_cell, trapezoid, trapezoid_uniform,
};

const TWO_PI: f64 = 2.0 * std::f64::consts::PI;

/// Default number of grid points per axis.
pub const DEFAULT_GRID_POINTS: usize = 401;

/// Uniform 1-D grid `[min, max]` with `n` points.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub min: f64,
    pub max: f64,
    pub n: usize,
}

impl Grid {
    pub fn new(min: f64, max: f64, n: usize) -> Result<Self> {
        let g = Grid { min, max, n };
        g.validate()?;
        Ok(g)
    }

    pub fn symmetric(half_width: f64, n: usize) -> Result<Self> {
        Grid::new(-half_width, half_width, n)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.min.is_finite() && self.max.is_finite() && self.max > self.min) || self.n < 2 {
            return Err(Error::InvalidArgument(format!(
                "grid needs finite min < max and n >= 2 (got [{}, {}], n = {})",
                self.min, self.max, self.n
            )));
        }
        Ok(())
    }

    pub fn points(&self) -> Vec<f64> {
        linspace(self.min, self.max, self.n)
    }

    pub fn step(&self) -> f64 {
        (self.max - self.min) / (self.n - 1) as f64
    }
}

/// Rectangular (X, Y) grid for phase-space fields.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhaseSpaceGrid {
    pub x: Grid,
    pub y: Grid,
}

impl PhaseSpaceGrid {
    /// 401 × 401 points over ±(2√(2N) + 2) for an N-level basis.
    pub fn default_for_cutoff(cutoff: usize) -> Self {
        let half = 2.0 * (2.0 * cutoff as f64).sqrt() + 2.0;
        let g = Grid { min: -half, max: half, n: DEFAULT_GRID_POINTS };
        PhaseSpaceGrid { x: g, y: g }
    }

    pub fn square(half_width: f64, n: usize) -> Result<Self> {
        let g = Grid::symmetric(half_width, n)?;
        Ok(PhaseSpaceGrid { x: g, y: g })
    }

    fn validate(&self) -> Result<()> {
        self.x.validate()?;
        self.y.validate()
    }
}

/// Tabulated quasiprobability density over (X, Y), per unit `dX dY`.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseSpaceField {
    pub repr: Representation,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    /// Column-major in X: `values[ix * y.len() + iy]`.
    values: Vec<f64>,
}

impl PhaseSpaceField {
    pub fn value(&self, ix: usize, iy: usize) -> f64 {
        self.values[ix * self.y.len() + iy]
    }

    /// All Y values at fixed `X = x[ix]`.
    pub fn column(&self, ix: usize) -> &[f64] {
        let ny = self.y.len();
        &self.values[ix * ny..(ix + 1) * ny]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Signed integral over the grid (trapezoidal in both directions).
    pub fn integral(&self) -> f64 {
        let dy = self.y[1] - self.y[0];
        let cols: Vec<f64> = (0..self.x.len()).map(|ix| trapezoid_uniform(self.column(ix), dy)).collect();
        trapezoid(&self.x, &cols)
    }

    pub fn min_value(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Integrates along Y and renormalises to unit mass.
    pub fn x_marginal(&self) -> Marginal {
        let dy = self.y[1] - self.y[0];
        let density: Vec<f64> = (0..self.x.len()).map(|ix| trapezoid_uniform(self.column(ix), dy)).collect();
        Marginal::new(self.x.clone(), density, self.repr).normalized()
    }
}

fn alpha_at(x: f64, y: f64) -> Complex64 {
    Complex64::new(x, y) * std::f64::consts::FRAC_1_SQRT_2
}

/// `|⟨α|ψ⟩|²` via the Poissonian coherent-state amplitudes.
fn coherent_overlap_sqr(alpha: Complex64, psi: &DVector<Complex64>) -> f64 {
    let mut c = Complex64::new((-0.5 * alpha.norm_sqr()).exp(), 0.0);
    let ac = alpha.conj();
    let mut acc = c * psi[0];
    for n in 1..psi.len() {
        c *= ac / (n as f64).sqrt();
        acc += c * psi[n];
    }
    acc.norm_sqr()
}

fn build_field<F>(repr: Representation, grid: &PhaseSpaceGrid, point: F) -> PhaseSpaceField
where
    F: Fn(f64, f64, &mut Vec<Complex64>) -> f64 + Sync + Send,
{
    let x = grid.x.points();
    let y = grid.y.points();
    let columns = Execution::Parallel.map_indexed(x.len(), |ix| {
        let mut scratch = Vec::new();
        y.iter().map(|&yv| point(x[ix], yv, &mut scratch)).collect::<Vec<f64>>()
    });
    PhaseSpaceField { repr, x, y, values: columns.concat() }
}

/// Husimi Q function on the default grid.
pub fn husimi_q(state: &QuantumState) -> PhaseSpaceField {
    husimi_q_on(state, &PhaseSpaceGrid::default_for_cutoff(state.cutoff())).expect("default grid is valid")
}

/// `Q(X, Y) = ⟨α|ρ|α⟩ / (2π)` with `α = (X + iY)/√2`.
pub fn husimi_q_on(state: &QuantumState, grid: &PhaseSpaceGrid) -> Result<PhaseSpaceField> {
    grid.validate()?;
    let comps = state.components();
    Ok(build_field(Representation::Husimi, grid, |x, y, _| {
        let alpha = alpha_at(x, y);
        comps.iter().map(|(p, psi)| p * coherent_overlap_sqr(alpha, psi)).sum::<f64>() / TWO_PI
    }))
}

/// Wigner function on the default grid.
pub fn wigner(state: &QuantumState) -> PhaseSpaceField {
    wigner_on(state, &PhaseSpaceGrid::default_for_cutoff(state.cutoff())).expect("default grid is valid")
}

/// Wigner function from the Fock-basis Laguerre expansion, evaluated with the
/// stable three-term recurrence for the `|m⟩⟨n|` elements.
pub fn wigner_on(state: &QuantumState, grid: &PhaseSpaceGrid) -> Result<PhaseSpaceField> {
    grid.validate()?;
    let rho = state.rho();
    let dim = state.cutoff();
    Ok(build_field(Representation::Wigner, grid, |x, y, w| {
        let a = alpha_at(x, y);
        w.clear();
        w.resize(dim, Complex64::new(0.0, 0.0));
        w[0] = Complex64::new((-2.0 * a.norm_sqr()).exp() / std::f64::consts::PI, 0.0);
        let mut acc = rho[(0, 0)].re * w[0].re;
        for n in 1..dim {
            w[n] = w[n - 1] * a * 2.0 / (n as f64).sqrt();
            acc += 2.0 * (rho[(0, n)] * w[n]).re;
        }
        for m in 1..dim {
            let sm = (m as f64).sqrt();
            let mut temp = w[m];
            w[m] = (a.conj() * 2.0 * temp - w[m - 1] * sm) / sm;
            acc += (rho[(m, m)] * w[m]).re;
            for n in m + 1..dim {
                let next = (a * 2.0 * w[n - 1] - temp * sm) / (n as f64).sqrt();
                temp = w[n];
                w[n] = next;
                acc += 2.0 * (rho[(m, n)] * w[n]).re;
            }
        }
        acc
    }))
}

/// One-dimensional density over the X quadrature.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Marginal {
    pub x: Vec<f64>,
    pub density: Vec<f64>,
    pub repr: Representation,
    /// Propagated standard error, present for reconstructions from Monte Carlo sweeps.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub se: Option<Vec<f64>>,
}

impl Marginal {
    pub fn new(x: Vec<f64>, density: Vec<f64>, repr: Representation) -> Self {
        assert_eq!(x.len(), density.len(), "marginal grid and density lengths differ");
        Marginal { x, density, repr, se: None }
    }

    pub fn mass(&self) -> f64 {
        trapezoid(&self.x, &self.density)
    }

    /// Copy rescaled to unit mass.
    pub fn normalized(mut self) -> Self {
        let m = self.mass();
        if m != 0.0 && m.is_finite() {
            self.density.iter_mut().for_each(|d| *d /= m);
            if let Some(se) = &mut self.se {
                se.iter_mut().for_each(|s| *s /= m.abs());
            }
        }
        self
    }

    pub fn mean(&self) -> f64 {
        let xf: Vec<f64> = self.x.iter().zip(&self.density).map(|(x, d)| x * d).collect();
        trapezoid(&self.x, &xf) / self.mass()
    }

    pub fn variance(&self) -> f64 {
        let mu = self.mean();
        let v: Vec<f64> = self.x.iter().zip(&self.density).map(|(x, d)| (x - mu).powi(2) * d).collect();
        trapezoid(&self.x, &v) / self.mass()
    }

    /// Density at `x` by local cubic interpolation; zero off the grid.
    pub fn value_at(&self, x: f64) -> f64 {
        if self.x.len() < 2 || x < self.x[0] || x > self.x[self.x.len() - 1] {
            return interp_linear(&self.x, &self.density, x);
        }
        interp_cubic_in_cell(&self.x, &self.density, locate_cell(&self.x, x), x)
    }

    /// Cumulative distribution at the grid nodes.
    pub fn cdf(&self) -> Vec<f64> {
        let c = cumulative_trapezoid(&self.x, &self.density);
        let total = *c.last().unwrap_or(&1.0);
        c.into_iter().map(|v| v / total).collect()
    }

    /// CDF at an arbitrary point (exact for the piecewise-linear density).
    pub fn cdf_at(&self, t: f64) -> f64 {
        let n = self.x.len();
        if t <= self.x[0] {
            return 0.0;
        }
        if t >= self.x[n - 1] {
            return 1.0;
        }
        let c = self.cdf();
        let i = crate::numerics::locate_cell(&self.x, t);
        let h = t - self.x[i];
        let f0 = self.density[i];
        let f1 = interp_linear(&self.x, &self.density, t);
        c[i] + 0.5 * h * (f0 + f1) / self.mass()
    }

    /// L1 distance `∫|f − g| dx`, both densities interpolated (zero outside
    /// their grids) on a fine common grid.
    pub fn l1_distance(&self, other: &Marginal) -> f64 {
        let lo = self.x[0].min(other.x[0]);
        let hi = self.x[self.x.len() - 1].max(other.x[other.x.len() - 1]);
        let pts = linspace(lo, hi, 8001);
        let diff: Vec<f64> = pts.iter().map(|&t| (self.value_at(t) - other.value_at(t)).abs()).collect();
        trapezoid(&pts, &diff)
    }

    /// Number of strict local extrema of the tabulated density, ignoring
    /// wiggles below `floor` relative to the peak.
    pub fn count_extrema(&self, floor: f64) -> usize {
        let peak = self.density.iter().copied().fold(0.0, f64::max);
        let mut count = 0;
        let mut last_sign = 0i8;
        for w in self.density.windows(2) {
            let d = w[1] - w[0];
            if d.abs() <= floor * peak {
                continue;
            }
            let s = if d > 0.0 { 1 } else { -1 };
            if last_sign != 0 && s != last_sign {
                count += 1;
            }
            last_sign = s;
        }
        count
    }
}

/// X-marginal on the default grid.
pub fn x_marginal(state: &QuantumState, repr: Representation) -> Result<Marginal> {
    x_marginal_on(state, repr, &PhaseSpaceGrid::default_for_cutoff(state.cutoff()))
}

/// X-marginal of the Husimi (ξ = +1) or Wigner (ξ = 0) function; integrates
/// the tabulated field along Y and renormalises to unit mass.
pub fn x_marginal_on(state: &QuantumState, repr: Representation, grid: &PhaseSpaceGrid) -> Result<Marginal> {
    let field = match repr {
        Representation::Husimi => husimi_q_on(state, grid)?,
        Representation::Wigner => wigner_on(state, grid)?,
        Representation::GlauberP => {
            return Err(Error::UnsupportedRepresentation(
                "the Glauber-Sudarshan P function is singular for non-classical states".into(),
            ))
        }
    };
    Ok(field.x_marginal())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::{make_coherent, make_fock, superpose};
    use approx::assert_relative_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn point_grid(x: f64, y: f64) -> PhaseSpaceGrid {
        PhaseSpaceGrid { x: Grid { min: x, max: x + 1.0, n: 2 }, y: Grid { min: y, max: y + 1.0, n: 2 } }
    }

    fn q_at(s: &QuantumState, x: f64, y: f64) -> f64 {
        husimi_q_on(s, &point_grid(x, y)).unwrap().value(0, 0)
    }

    fn w_at(s: &QuantumState, x: f64, y: f64) -> f64 {
        wigner_on(s, &point_grid(x, y)).unwrap().value(0, 0)
    }

    fn cat1() -> QuantumState {
        superpose(
            &[make_coherent(c(1.0, 0.0), 32).unwrap(), make_coherent(c(-1.0, 0.0), 32).unwrap()],
            &[c(1.0, 0.0), c(1.0, 0.0)],
        )
        .unwrap()
    }

    // Reference values: oracles/states_oracle.py (position-space overlap and
    // Wigner-transform integrals).
    #[test]
    fn husimi_point_values() {
        let vac = make_fock(0, 16).unwrap();
        assert_relative_eq!(q_at(&vac, 0.0, 0.0), 0.159_154_943_092_058_2, max_relative = 1e-3);
        let f1 = make_fock(1, 16).unwrap();
        assert!(q_at(&f1, 0.0, 0.0).abs() < 1e-15);
        assert_relative_eq!(q_at(&f1, 1.0, 0.5), 0.053_243_438_872_071_06, max_relative = 1e-3);
        let coh = make_coherent(c(1.0, 0.5), 32).unwrap();
        assert_relative_eq!(q_at(&coh, 1.0, 0.3), 0.134_454_225_371_150_84, max_relative = 1e-3);
        assert_relative_eq!(q_at(&cat1(), 1.2, 0.4), 0.084_920_315_428_614_43, max_relative = 1e-3);
    }

    #[test]
    fn wigner_point_values() {
        let vac = make_fock(0, 16).unwrap();
        assert_relative_eq!(w_at(&vac, 0.0, 0.0), 0.318_309_886_184_179_7, max_relative = 1e-3);
        let f1 = make_fock(1, 16).unwrap();
        assert_relative_eq!(w_at(&f1, 0.0, 0.0), -0.318_309_886_184_179_77, max_relative = 1e-3);
        assert_relative_eq!(w_at(&f1, 0.7, -0.4), 0.049_851_699_535_119_22, max_relative = 1e-3);
        let coh = make_coherent(c(1.0, 0.5), 32).unwrap();
        assert_relative_eq!(w_at(&coh, 1.0, 0.3), 0.227_174_077_900_969_66, max_relative = 1e-3);
        let cat = cat1();
        assert_relative_eq!(w_at(&cat, 0.0, 0.0), 0.318_309_886_184_017, max_relative = 1e-3);
        assert_relative_eq!(w_at(&cat, 0.0, 0.8), -0.074_316_854_653_839_65, max_relative = 1e-3);
    }

    #[test]
    fn fields_are_normalised() {
        for s in [make_fock(0, 16).unwrap(), make_fock(3, 32).unwrap(), cat1()] {
            let q = husimi_q(&s);
            assert!((q.integral() - 1.0).abs() < 1e-3);
            assert!(q.min_value() >= 0.0);
            let w = wigner(&s);
            assert!((w.integral() - 1.0).abs() < 1e-3);
        }
    }

    #[test]
    fn marginal_point_values() {
        let vac = make_fock(0, 32).unwrap();
        let m = x_marginal(&vac, Representation::Husimi).unwrap();
        assert_relative_eq!(m.value_at(0.0), 0.398_942_280_401_636_9, max_relative = 1e-3);
        let f1 = make_fock(1, 32).unwrap();
        let m = x_marginal(&f1, Representation::Husimi).unwrap();
        assert_relative_eq!(m.value_at(0.0), 0.199_471_140_200_818_44, max_relative = 1e-3);
        assert_relative_eq!(m.value_at(1.3), 0.230_490_756_304_418_9, max_relative = 1e-3);
        let f5 = make_fock(5, 32).unwrap();
        let m = x_marginal(&f5, Representation::Husimi).unwrap();
        assert_relative_eq!(m.value_at(0.0), 0.098_177_201_818, max_relative = 1e-3);
        assert_relative_eq!(m.value_at(2.0), 0.135_947_566_463, max_relative = 1e-3);
        assert_eq!(m.count_extrema(1e-9), 3);
        let cat = cat1();
        let q = x_marginal(&cat, Representation::Husimi).unwrap();
        assert_relative_eq!(q.value_at(0.0), 0.176_823_210_422, max_relative = 1e-3);
        assert_relative_eq!(q.value_at(1.5), 0.193_002_542_457, max_relative = 1e-3);
        let w = x_marginal(&cat, Representation::Wigner).unwrap();
        assert_relative_eq!(w.value_at(0.0), 0.134_506_093_867, max_relative = 1e-3);
        assert_relative_eq!(w.value_at(1.5), 0.253_785_772_416, max_relative = 1e-3);
        assert!(matches!(
            x_marginal(&vac, Representation::GlauberP),
            Err(Error::UnsupportedRepresentation(_))
        ));
    }

    #[test]
    fn wigner_marginal_variance_is_q_minus_half() {
        use crate::states::make_squeezed_coherent;
        for s in [make_fock(0, 32).unwrap(), make_squeezed_coherent(c(0.0, 0.0), c(0.5, 0.0), 32).unwrap()] {
            let q = x_marginal(&s, Representation::Husimi).unwrap();
            let w = x_marginal(&s, Representation::Wigner).unwrap();
            assert!((w.variance() - (q.variance() - 0.5)).abs() < 2e-2);
        }
    }
}
