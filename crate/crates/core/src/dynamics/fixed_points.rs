//! Fixed points of the deterministic drift and their stability.

use nalgebra::{Matrix2, Vector2};
use num_complex::Complex64;

use super::{drift, Kind, OscillatorParams};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FixedPoint {
    pub alpha: Complex64,
    pub eigenvalues: [Complex64; 2],
}

impl FixedPoint {
    pub fn is_stable(&self) -> bool {
        self.eigenvalues.iter().all(|e| e.re < 0.0)
    }
}

/// Jacobian of the drift with respect to `(Re α, Im α)`.
pub fn jacobian(alpha: Complex64, p: &OscillatorParams) -> Matrix2<f64> {
    let (u, v) = (alpha.re, alpha.im);
    let l = p.lambda;
    let lin = Matrix2::new(l - 1.0, 0.0, 0.0, -l - 1.0);
    let g2 = p.g * p.g;
    match p.kind {
        Kind::Linear => lin,
        Kind::Opo => {
            lin + Matrix2::new(
                -g2 * (3.0 * u * u + v * v),
                -2.0 * g2 * u * v,
                -2.0 * g2 * u * v,
                -g2 * (u * u + 3.0 * v * v),
            )
        }
        Kind::Jpo => {
            lin + Matrix2::new(
                -2.0 * g2 * u * v,
                -g2 * (u * u + 3.0 * v * v),
                g2 * (3.0 * u * u + v * v),
                2.0 * g2 * u * v,
            )
        }
    }
}

fn eigenvalues(j: &Matrix2<f64>) -> [Complex64; 2] {
    let half_tr = 0.5 * (j[(0, 0)] + j[(1, 1)]);
    let det = j[(0, 0)] * j[(1, 1)] - j[(0, 1)] * j[(1, 0)];
    let root = Complex64::new(half_tr * half_tr - det, 0.0).sqrt();
    [half_tr + root, half_tr - root]
}

pub fn classify_point(alpha: Complex64, p: &OscillatorParams) -> FixedPoint {
    FixedPoint { alpha, eigenvalues: eigenvalues(&jacobian(alpha, p)) }
}

fn residual(alpha: Complex64, p: &OscillatorParams) -> f64 {
    drift(alpha, p).norm()
}

/// Newton iteration on the two-dimensional real system; `None` if it stalls.
pub fn newton_polish(mut alpha: Complex64, p: &OscillatorParams) -> Option<Complex64> {
    let scale = 1.0 + p.nominal_amplitude();
    for _ in 0..100 {
        let f = drift(alpha, p);
        if f.norm() <= 1e-13 * scale * scale {
            return Some(alpha);
        }
        let step = jacobian(alpha, p).lu().solve(&Vector2::new(f.re, f.im))?;
        alpha -= Complex64::new(step[0], step[1]);
        if !alpha.is_finite() {
            return None;
        }
    }
    (residual(alpha, p) <= 1e-9 * scale * scale).then_some(alpha)
}

/// Real roots of `g²α³ − (λ−1)α − b = 0`, ascending. These are all the
/// OPO fixed points, since the quadrature `Im α` decays for any amplitude.
fn opo_real_roots(p: &OscillatorParams) -> Vec<f64> {
    let g2 = p.g * p.g;
    // depressed cubic t³ + a t + c = 0
    let a = -(p.lambda - 1.0) / g2;
    let c = -p.b / g2;
    let disc = -(4.0 * a * a * a + 27.0 * c * c);
    let mut roots = if disc > 0.0 {
        let m = 2.0 * (-a / 3.0).sqrt();
        let theta = (3.0 * c / (a * m)).clamp(-1.0, 1.0).acos() / 3.0;
        (0..3)
            .map(|k| m * (theta - 2.0 * std::f64::consts::PI * k as f64 / 3.0).cos())
            .collect::<Vec<_>>()
    } else {
        let s = (c * c / 4.0 + a * a * a / 27.0).max(0.0).sqrt();
        vec![(-c / 2.0 + s).cbrt() + (-c / 2.0 - s).cbrt()]
    };
    for r in roots.iter_mut() {
        for _ in 0..50 {
            let f = *r * *r * *r + a * *r + c;
            let d = 3.0 * *r * *r + a;
            if d == 0.0 {
                break;
            }
            let next = *r - f / d;
            if next == *r {
                break;
            }
            *r = next;
        }
    }
    roots.sort_by(f64::total_cmp);
    roots
}

/// All fixed points of the drift. Exhaustive for OPO and the linear model;
/// for JPO only the points reached from the search seeds are returned.
pub fn fixed_points(p: &OscillatorParams) -> Result<Vec<FixedPoint>> {
    match p.kind {
        Kind::Linear => {
            let x = -p.b / (p.lambda - 1.0);
            Ok(vec![classify_point(Complex64::new(x, 0.0), p)])
        }
        Kind::Opo => Ok(opo_real_roots(p).into_iter().map(|r| classify_point(Complex64::new(r, 0.0), p)).collect()),
        Kind::Jpo => Ok(jpo_search(p)?.into_iter().map(|a| classify_point(a, p)).collect()),
    }
}

/// The two stable fixed points, ordered as `[α⁽¹⁾, α⁽⁰⁾]` with `α⁽¹⁾` the one
/// on the positive-X side.
pub fn stable_pair(p: &OscillatorParams) -> Result<[Complex64; 2]> {
    let mut stable: Vec<Complex64> =
        fixed_points(p)?.into_iter().filter(FixedPoint::is_stable).map(|f| f.alpha).collect();
    stable.sort_by(|a, b| b.re.total_cmp(&a.re));
    match stable.as_slice() {
        [one, zero] => Ok([*one, *zero]),
        _ => Err(Error::JpoFixedPointsNotFound(format!(
            "expected two stable fixed points, found {} (lambda = {}, g = {}, b = {})",
            stable.len(),
            p.lambda,
            p.g,
            p.b
        ))),
    }
}

/// Damped flow from the `±√(λ−1)/g` seeds, Newton polish, then a polar
/// scan with Newton starts if the flow did not produce two stable points.
fn jpo_search(p: &OscillatorParams) -> Result<Vec<Complex64>> {
    let seed = p.nominal_amplitude();
    let mut found: Vec<Complex64> = Vec::new();
    let push = |a: Complex64, found: &mut Vec<Complex64>| {
        if !found.iter().any(|f| (f - a).norm() <= 1e-7 * (1.0 + a.norm())) {
            found.push(a);
        }
    };
    let h = 0.02;
    for s in [seed, -seed] {
        let mut a = Complex64::new(s, 0.0);
        for _ in 0..200_000 {
            let f = drift(a, p);
            a += h * f;
            if f.norm() < 1e-8 * (1.0 + seed) || !a.is_finite() {
                break;
            }
        }
        if let Some(a) = a.is_finite().then(|| newton_polish(a, p)).flatten() {
            if classify_point(a, p).is_stable() {
                push(a, &mut found);
            }
        }
    }
    if found.len() >= 2 {
        return Ok(found);
    }
    for ir in 1..=40 {
        let r = seed * 3.0 * ir as f64 / 40.0;
        for ik in 0..72 {
            let phi = 2.0 * std::f64::consts::PI * ik as f64 / 72.0;
            if let Some(a) = newton_polish(Complex64::from_polar(r, phi), p) {
                if classify_point(a, p).is_stable() {
                    push(a, &mut found);
                }
            }
        }
    }
    if found.is_empty() {
        return Err(Error::JpoFixedPointsNotFound(format!(
            "no stable fixed point located for lambda = {}, g = {}, b = {}",
            p.lambda, p.g, p.b
        )));
    }
    Ok(found)
}
