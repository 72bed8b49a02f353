//! Small quadrature and interpolation helpers shared by the phase-space and
//! analytics code.

use libm::erfc;

/// Standard normal CDF.
pub fn normal_cdf(z: f64) -> f64 {
    0.5 * erfc(-z / std::f64::consts::SQRT_2)
}

/// Trapezoidal integral of tabulated `y` over the (possibly non-uniform) nodes `x`.
pub fn trapezoid(x: &[f64], y: &[f64]) -> f64 {
    debug_assert_eq!(x.len(), y.len());
    x.windows(2)
        .zip(y.windows(2))
        .map(|(xw, yw)| 0.5 * (xw[1] - xw[0]) * (yw[0] + yw[1]))
        .sum()
}

/// Trapezoidal integral with uniform spacing.
pub fn trapezoid_uniform(y: &[f64], dx: f64) -> f64 {
    match y.len() {
        0 | 1 => 0.0,
        n => dx * (y.iter().sum::<f64>() - 0.5 * (y[0] + y[n - 1])),
    }
}

/// Running trapezoidal integral, starting at zero.
pub fn cumulative_trapezoid(x: &[f64], y: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(x.len());
    let mut acc = 0.0;
    out.push(0.0);
    for i in 1..x.len() {
        acc += 0.5 * (x[i] - x[i - 1]) * (y[i] + y[i - 1]);
        out.push(acc);
    }
    out
}

/// `n` evenly spaced points from `min` to `max` inclusive.
pub fn linspace(min: f64, max: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![min],
        _ => {
            let step = (max - min) / (n - 1) as f64;
            (0..n).map(|i| min + step * i as f64).collect()
        }
    }
}

/// Index `i` with `x[i] <= t < x[i + 1]`, clamped to a valid cell.
pub fn locate_cell(x: &[f64], t: f64) -> usize {
    let n = x.len();
    debug_assert!(n >= 2);
    match x.partition_point(|&v| v <= t) {
        0 => 0,
        k if k >= n => n - 2,
        k => k - 1,
    }
}

/// Piecewise-linear interpolation; zero outside the tabulated range.
pub fn interp_linear(x: &[f64], y: &[f64], t: f64) -> f64 {
    if x.is_empty() || t < x[0] || t > x[x.len() - 1] {
        return 0.0;
    }
    if x.len() == 1 {
        return y[0];
    }
    let i = locate_cell(x, t);
    let w = (t - x[i]) / (x[i + 1] - x[i]);
    y[i] * (1.0 - w) + y[i + 1] * w
}

/// Local cubic (four-point Lagrange) interpolation inside cell `i`.
///
/// Falls back to fewer points at the ends of the table.
pub fn interp_cubic_in_cell(x: &[f64], y: &[f64], i: usize, t: f64) -> f64 {
    let n = x.len();
    if n < 4 {
        let w = (t - x[i]) / (x[i + 1] - x[i]);
        return y[i] * (1.0 - w) + y[i + 1] * w;
    }
    let start = i.saturating_sub(1).min(n - 4);
    let xs = &x[start..start + 4];
    let ys = &y[start..start + 4];
    let mut acc = 0.0;
    for j in 0..4 {
        let mut l = 1.0;
        for k in 0..4 {
            if k != j {
                l *= (t - xs[k]) / (xs[j] - xs[k]);
            }
        }
        acc += ys[j] * l;
    }
    acc
}

const GL4_NODES: [f64; 4] = [
    -0.861_136_311_594_052_6,
    -0.339_981_043_584_856_3,
    0.339_981_043_584_856_3,
    0.861_136_311_594_052_6,
];
const GL4_WEIGHTS: [f64; 4] = [
    0.347_854_845_137_453_9,
    0.652_145_154_862_546_1,
    0.652_145_154_862_546_1,
    0.347_854_845_137_453_9,
];

/// Four-point Gauss–Legendre rule on `[a, b]`.
pub fn gauss_legendre4(a: f64, b: f64, mut f: impl FnMut(f64) -> f64) -> f64 {
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    GL4_NODES
        .iter()
        .zip(GL4_WEIGHTS.iter())
        .map(|(&t, &w)| w * f(mid + half * t))
        .sum::<f64>()
        * half
}
