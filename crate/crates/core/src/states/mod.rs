//! Quantum initial states in a truncated Fock basis.
//!
//! Quadrature convention used throughout the crate:
//! `X = (a + a†)/√2`, `Y = (a − a†)/(i√2)`, so `α = (X + iY)/√2` and the
//! vacuum has `Var(X) = 1/2` in the Wigner function and `Var(X) = 1` in the
//! Husimi Q function. Phase-space functions are stored as densities per unit
//! `dX dY`.
//!
//! Squeezing follows `S(z) = exp((z* a² − z a†²)/2)`; a real positive `z`
//! squeezes the X quadrature.

mod io;
mod phase_space;
mod sampler;

pub use io::{marginal_from_csv, marginal_to_csv, StateDocument, STATE_FORMAT_VERSION};
pub use phase_space::{
    husimi_q, husimi_q_on, wigner, wigner_on, x_marginal, x_marginal_on, Grid, Marginal,
    PhaseSpaceField, PhaseSpaceGrid,
};
pub use sampler::{
    sample_phase_space, GaussianMoments, InitialDistribution, PhaseSpaceSampler,
};

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default Fock-space dimension.
pub const DEFAULT_CUTOFF: usize = 32;

/// Largest squeeze magnitude accepted by [`make_squeezed_coherent`].
pub const MAX_SQUEEZE: f64 = 1.5;

/// Population allowed in the top tenth of the Fock levels.
pub const TAIL_TOLERANCE: f64 = 1e-6;

const TRACE_TOL: f64 = 1e-10;
const HERMITIAN_TOL: f64 = 1e-10;
const PSD_FLOOR: f64 = -1e-9;
const PURITY_TOL: f64 = 1e-8;

/// Phase-space representation, labelled by the ordering parameter ξ
/// (+1 Husimi Q, 0 Wigner, −1 Glauber–Sudarshan P).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "i32", into = "i32")]
pub enum Representation {
    Husimi,
    Wigner,
    GlauberP,
}

impl Representation {
    pub fn xi(self) -> i32 {
        match self {
            Representation::Husimi => 1,
            Representation::Wigner => 0,
            Representation::GlauberP => -1,
        }
    }

    pub fn from_xi(xi: i32) -> Result<Self> {
        match xi {
            1 => Ok(Representation::Husimi),
            0 => Ok(Representation::Wigner),
            -1 => Ok(Representation::GlauberP),
            other => Err(Error::InvalidArgument(format!("xi must be +1, 0 or -1, got {other}"))),
        }
    }
}

impl TryFrom<i32> for Representation {
    type Error = Error;
    fn try_from(xi: i32) -> Result<Self> {
        Representation::from_xi(xi)
    }
}

impl From<Representation> for i32 {
    fn from(r: Representation) -> i32 {
        r.xi()
    }
}

impl std::fmt::Display for Representation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Representation::Husimi => "husimi",
            Representation::Wigner => "wigner",
            Representation::GlauberP => "glauber-p",
        })
    }
}

/// Density matrix in a truncated Fock basis.
///
/// Pure states built by the constructors keep their ket, so superpositions
/// respect relative phases. The matrix is immutable after construction.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantumState {
    rho: DMatrix<Complex64>,
    ket: Option<DVector<Complex64>>,
}

impl QuantumState {
    /// Builds a pure state from an (unnormalised) ket.
    pub fn from_ket(ket: DVector<Complex64>) -> Result<Self> {
        let norm = ket.norm();
        if !(norm.is_finite() && norm > 0.0) {
            return Err(Error::DegenerateSuperposition);
        }
        let ket = ket.unscale(norm);
        let rho = &ket * ket.adjoint();
        let state = QuantumState { rho, ket: Some(ket) };
        state.check_tail()?;
        Ok(state)
    }

    /// Builds a state from a density matrix, checking every invariant.
    pub fn from_density_matrix(rho: DMatrix<Complex64>) -> Result<Self> {
        if rho.nrows() != rho.ncols() || rho.nrows() == 0 {
            return Err(Error::InvalidArgument("density matrix must be square and non-empty".into()));
        }
        let state = QuantumState { rho, ket: None };
        state.check_invariants()?;
        Ok(state)
    }

    pub fn cutoff(&self) -> usize {
        self.rho.nrows()
    }

    pub fn rho(&self) -> &DMatrix<Complex64> {
        &self.rho
    }

    /// The state vector, when the state was built as a pure state.
    pub fn ket(&self) -> Option<&DVector<Complex64>> {
        self.ket.as_ref()
    }

    pub fn trace(&self) -> f64 {
        self.rho.trace().re
    }

    pub fn purity(&self) -> f64 {
        (&self.rho * &self.rho).trace().re
    }

    pub fn populations(&self) -> Vec<f64> {
        (0..self.cutoff()).map(|n| self.rho[(n, n)].re).collect()
    }

    pub fn mean_photon_number(&self) -> f64 {
        self.populations().iter().enumerate().map(|(n, p)| n as f64 * p).sum()
    }

    /// Population in the top 10 % of Fock levels.
    pub fn tail_population(&self) -> f64 {
        let n = self.cutoff();
        let top = n - n.div_ceil(10);
        (top..n).map(|k| self.rho[(k, k)].re).sum()
    }

    fn check_tail(&self) -> Result<()> {
        let population = self.tail_population();
        if population > TAIL_TOLERANCE {
            return Err(Error::CutoffTooSmall {
                cutoff: self.cutoff(),
                detail: format!("{population:.3e} population in the top tenth of the levels"),
            });
        }
        Ok(())
    }

    /// Trace, Hermiticity, positivity and cutoff-adequacy checks.
    pub fn check_invariants(&self) -> Result<()> {
        let n = self.cutoff();
        let tr = self.rho.trace();
        if (tr.re - 1.0).abs() > TRACE_TOL || tr.im.abs() > TRACE_TOL {
            return Err(Error::InvalidArgument(format!("trace {tr} differs from 1")));
        }
        for i in 0..n {
            for j in 0..=i {
                if (self.rho[(i, j)] - self.rho[(j, i)].conj()).norm() > HERMITIAN_TOL {
                    return Err(Error::InvalidArgument(format!("density matrix not Hermitian at ({i}, {j})")));
                }
            }
        }
        let min_eig = self.eigen().eigenvalues.min();
        if min_eig < PSD_FLOOR {
            return Err(Error::InvalidArgument(format!("density matrix has eigenvalue {min_eig}")));
        }
        self.check_tail()
    }

    fn eigen(&self) -> SymmetricEigen<Complex64, nalgebra::Dyn> {
        SymmetricEigen::new(self.rho.clone())
    }

    /// Mixture decomposition `rho = Σ p_k |ψ_k⟩⟨ψ_k|` with negligible weights dropped.
    pub fn components(&self) -> Vec<(f64, DVector<Complex64>)> {
        if let Some(ket) = &self.ket {
            return vec![(1.0, ket.clone())];
        }
        let eig = self.eigen();
        eig.eigenvalues
            .iter()
            .enumerate()
            .filter(|(_, &p)| p > 1e-14)
            .map(|(k, &p)| (p, eig.eigenvectors.column(k).into_owned()))
            .collect()
    }

    /// Ket of a pure state. States without a stored ket must have largest
    /// eigenvalue ≥ 1 − 1e−8; their global phase is fixed so that the largest
    /// amplitude is real and positive.
    pub fn pure_ket(&self) -> Result<DVector<Complex64>> {
        if let Some(ket) = &self.ket {
            return Ok(ket.clone());
        }
        let eig = self.eigen();
        let (k, &largest) = eig
            .eigenvalues
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(b.1))
            .expect("non-empty matrix");
        if largest < 1.0 - PURITY_TOL {
            return Err(Error::NotPure { largest_eigenvalue: largest });
        }
        let mut v = eig.eigenvectors.column(k).into_owned();
        let pivot = v.iter().copied().max_by(|a, b| a.norm().total_cmp(&b.norm())).unwrap();
        let phase = pivot.conj() / pivot.norm();
        v *= phase;
        Ok(v)
    }

    /// Expectation value of an operator given in a Fock basis of any size;
    /// the density matrix is zero-padded if the operator is larger.
    pub fn expect(&self, op: &DMatrix<Complex64>) -> Complex64 {
        let dim = op.nrows();
        let rho = embed(&self.rho, dim);
        (rho * op).trace()
    }

    /// First and second moments of the quadratures (symmetrised covariance).
    pub fn quadrature_moments(&self) -> GaussianMoments {
        // One extra level keeps X² exact on the truncated support.
        let dim = self.cutoff() + 2;
        let (x, y) = quadrature_operators(dim);
        let mx = self.expect(&x).re;
        let my = self.expect(&y).re;
        let xx = self.expect(&(&x * &x)).re;
        let yy = self.expect(&(&y * &y)).re;
        let xy = self.expect(&((&x * &y + &y * &x) * Complex64::new(0.5, 0.0))).re;
        GaussianMoments {
            mean_x: mx,
            mean_y: my,
            var_x: xx - mx * mx,
            var_y: yy - my * my,
            cov_xy: xy - mx * my,
        }
    }
}

fn embed(m: &DMatrix<Complex64>, dim: usize) -> DMatrix<Complex64> {
    let n = m.nrows();
    if dim == n {
        return m.clone();
    }
    let mut out = DMatrix::zeros(dim, dim);
    let k = n.min(dim);
    out.view_mut((0, 0), (k, k)).copy_from(&m.view((0, 0), (k, k)));
    out
}

/// Annihilation operator on the first `dim` Fock levels.
pub fn annihilation(dim: usize) -> DMatrix<Complex64> {
    let mut a = DMatrix::zeros(dim, dim);
    for n in 1..dim {
        a[(n - 1, n)] = Complex64::new((n as f64).sqrt(), 0.0);
    }
    a
}

/// `(X, Y)` quadrature operators on the first `dim` Fock levels.
pub fn quadrature_operators(dim: usize) -> (DMatrix<Complex64>, DMatrix<Complex64>) {
    let a = annihilation(dim);
    let ad = a.adjoint();
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let x = (&a + &ad) * Complex64::new(s, 0.0);
    let y = (&a - &ad) * Complex64::new(0.0, -s);
    (x, y)
}

/// Dimension in which displacement and squeezing exponentials are evaluated
/// before projecting back onto the requested cutoff.
fn work_dim(cutoff: usize) -> usize {
    (2 * cutoff).max(cutoff + 32)
}

/// `D(β) = exp(β a† − β* a)` on the first `dim` levels.
pub fn displacement_operator(beta: Complex64, dim: usize) -> DMatrix<Complex64> {
    let a = annihilation(dim);
    let gen = a.adjoint() * beta - &a * beta.conj();
    gen.exp()
}

/// `S(z) = exp((z* a² − z a†²)/2)` on the first `dim` levels.
pub fn squeeze_operator(z: Complex64, dim: usize) -> DMatrix<Complex64> {
    let a = annihilation(dim);
    let a2 = &a * &a;
    let ad2 = a2.adjoint();
    let gen = (a2 * z.conj() - ad2 * z) * Complex64::new(0.5, 0.0);
    gen.exp()
}

fn project_ket(v: &DVector<Complex64>, cutoff: usize) -> DVector<Complex64> {
    v.rows(0, cutoff).into_owned()
}

fn check_amplitude(amp: Complex64, cutoff: usize) -> Result<()> {
    if !(amp.re.is_finite() && amp.im.is_finite()) {
        return Err(Error::InvalidArgument(format!("non-finite amplitude {amp}")));
    }
    let intensity = amp.norm_sqr();
    if intensity > cutoff as f64 / 4.0 {
        return Err(Error::CutoffTooSmall {
            cutoff,
            detail: format!("|amplitude|^2 = {intensity} exceeds cutoff/4"),
        });
    }
    Ok(())
}

fn check_cutoff(cutoff: usize) -> Result<()> {
    if cutoff == 0 {
        return Err(Error::InvalidArgument("cutoff must be positive".into()));
    }
    Ok(())
}

/// Fock state `|n⟩`.
pub fn make_fock(n: usize, cutoff: usize) -> Result<QuantumState> {
    check_cutoff(cutoff)?;
    if n >= cutoff {
        return Err(Error::InvalidArgument(format!("Fock index {n} outside a {cutoff}-level basis")));
    }
    let mut ket = DVector::zeros(cutoff);
    ket[n] = Complex64::new(1.0, 0.0);
    QuantumState::from_ket(ket)
}

/// Coherent state `|α⟩` from its Poissonian Fock amplitudes, renormalised after truncation.
pub fn make_coherent(amp: Complex64, cutoff: usize) -> Result<QuantumState> {
    check_cutoff(cutoff)?;
    check_amplitude(amp, cutoff)?;
    QuantumState::from_ket(coherent_ket(amp, cutoff))
}

pub(crate) fn coherent_ket(amp: Complex64, cutoff: usize) -> DVector<Complex64> {
    let mut c = Complex64::new((-0.5 * amp.norm_sqr()).exp(), 0.0);
    DVector::from_fn(cutoff, |n, _| {
        if n > 0 {
            c *= amp / (n as f64).sqrt();
        }
        c
    })
}

/// Squeezed coherent state `D(amp) S(squeeze) |0⟩`.
pub fn make_squeezed_coherent(amp: Complex64, squeeze: Complex64, cutoff: usize) -> Result<QuantumState> {
    check_cutoff(cutoff)?;
    if !(squeeze.norm() <= MAX_SQUEEZE) {
        return Err(Error::InvalidArgument(format!(
            "squeeze magnitude {} exceeds {MAX_SQUEEZE}",
            squeeze.norm()
        )));
    }
    check_amplitude(amp, cutoff)?;
    let dim = work_dim(cutoff);
    let mut vac = DVector::zeros(dim);
    vac[0] = Complex64::new(1.0, 0.0);
    let squeezed = squeeze_operator(squeeze, dim) * vac;
    let ket = displacement_operator(amp, dim) * squeezed;
    QuantumState::from_ket(project_ket(&ket, cutoff))
}

/// Normalised weighted sum of pure states.
pub fn superpose(states: &[QuantumState], weights: &[Complex64]) -> Result<QuantumState> {
    if states.is_empty() || states.len() != weights.len() {
        return Err(Error::InvalidArgument(format!(
            "superpose needs matching non-empty lists ({} states, {} weights)",
            states.len(),
            weights.len()
        )));
    }
    let cutoff = states[0].cutoff();
    if let Some(s) = states.iter().find(|s| s.cutoff() != cutoff) {
        return Err(Error::InvalidArgument(format!(
            "cutoff mismatch in superposition: {} vs {cutoff}",
            s.cutoff()
        )));
    }
    let mut sum = DVector::zeros(cutoff);
    let mut scale = 0.0_f64;
    for (s, &w) in states.iter().zip(weights) {
        let ket = s.pure_ket()?;
        scale = scale.max(w.norm());
        sum += ket * w;
    }
    if sum.norm() <= 1e-12 * scale.max(f64::MIN_POSITIVE) {
        return Err(Error::DegenerateSuperposition);
    }
    QuantumState::from_ket(sum)
}

/// Displaces a state along the real axis: `rho → D(β) rho D(β)†`.
///
/// A real `beta` moves the state by `√2·beta` along X.
pub fn displace(state: &QuantumState, beta: f64) -> Result<QuantumState> {
    displace_complex(state, Complex64::new(beta, 0.0))
}

/// Displacement by a complex amplitude.
pub fn displace_complex(state: &QuantumState, beta: Complex64) -> Result<QuantumState> {
    if !(beta.re.is_finite() && beta.im.is_finite()) {
        return Err(Error::InvalidArgument(format!("non-finite displacement {beta}")));
    }
    let cutoff = state.cutoff();
    let dim = work_dim(cutoff);
    let d = displacement_operator(beta, dim);
    if let Some(ket) = state.ket() {
        let mut padded = DVector::zeros(dim);
        padded.rows_mut(0, cutoff).copy_from(ket);
        let moved = d * padded;
        return QuantumState::from_ket(project_ket(&moved, cutoff));
    }
    let rho = embed(state.rho(), dim);
    let moved = &d * rho * d.adjoint();
    let mut out = moved.view((0, 0), (cutoff, cutoff)).into_owned();
    let tr = out.trace().re;
    out.unscale_mut(tr);
    // restore exact Hermiticity after the projection
    let herm = (&out + out.adjoint()) * Complex64::new(0.5, 0.0);
    QuantumState::from_density_matrix(herm)
}
