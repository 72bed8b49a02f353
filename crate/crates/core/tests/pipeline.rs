use std::f64::consts::SQRT_2;

use proptest::prelude::*;

use bistab::analytics::{
    analytic_probability, analytic_probability_gaussian, analytic_sweep, filter_sigma2, reconstruct_marginal,
    BiasSweep, SweepMethod,
};
use bistab::dsl::state_from_str;
use bistab::experiments::{bias_sweep, write_outputs, BGrid, ExperimentSpec};
use bistab::numerics::linspace;
use bistab::states::{marginal_from_csv, x_marginal, QuantumState, Representation};

#[test]
fn spec_file_to_outputs_and_back() {
    let dir = tempdir("pipeline");
    let spec_path = dir.join("cat.json");
    std::fs::write(
        &spec_path,
        r#"{"state": "coh(1) + coh(-1)", "lambda": 1.5, "g": 0.05, "b_grid": {"min": -2, "max": 2, "n": 41}}"#,
    )
    .unwrap();
    let spec = ExperimentSpec::from_file(&spec_path).unwrap();
    let out = bias_sweep(&spec, SweepMethod::Analytic).unwrap();
    let files = write_outputs(&spec, SweepMethod::Analytic, &out, &dir.join("run")).unwrap();

    // the sweep CSV carries everything needed to redo the reconstruction
    let text = std::fs::read_to_string(&files.sweep).unwrap();
    let back = BiasSweep::from_csv(&text).unwrap();
    assert_eq!(back, out.sweep);
    let rec = reconstruct_marginal(&back, spec.lambda).unwrap();
    let written = marginal_from_csv(&std::fs::read_to_string(files.reconstruction.unwrap()).unwrap()).unwrap();
    assert_eq!(written.x, rec.x);
    assert_eq!(written.density, rec.density);

    let report: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(files.report).unwrap()).unwrap();
    assert_eq!(report["sigma2"], 0.5);
    let _ = std::fs::remove_dir_all(dir);
}

#[test]
fn reconstruction_recovers_a_gaussian() {
    // squeezed vacuum, λ = 2 so the filter is a delta
    let st = state_from_str("sq(0.5, 0.3)", 32).unwrap();
    let m = x_marginal(&st, Representation::Husimi).unwrap();
    let bs = linspace(-3.0, 3.0, 121);
    let rec = reconstruct_marginal(&analytic_sweep(&m, 2.0, Representation::Husimi, &bs).unwrap(), 2.0).unwrap();
    assert!((rec.mean() - m.mean()).abs() < 1e-3, "{} vs {}", rec.mean(), m.mean());
    assert!((rec.variance() - m.variance()).abs() < 5e-3);
    assert!(rec.l1_distance(&m) < 0.01);
}

#[test]
fn sweep_grid_errors_surface_before_work() {
    let mut s = ExperimentSpec::new("fock(0)", 1.5, 0.05);
    s.b_grid = BGrid { min: 0.0, max: 0.0, n: 3 };
    assert!(bias_sweep(&s, SweepMethod::Analytic).is_err());
}

fn tempdir(tag: &str) -> std::path::PathBuf {
    let d = std::env::temp_dir().join(format!("bistab-{tag}-{}", std::process::id()));
    std::fs::create_dir_all(&d).unwrap();
    d
}

fn coherent(re: f64, im: f64) -> QuantumState {
    state_from_str(&format!("coh({re:?}+{im:?}i)"), 32).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 48, ..ProptestConfig::default() })]

    // coherent states have Gaussian marginals: the quadrature result must
    // agree with the error-function form
    #[test]
    fn coherent_states_follow_the_error_function(
        re in -1.5..1.5f64,
        im in 0.01..1.0f64,
        lambda in 1.1..2.0f64,
        b in -2.0..2.0f64,
    ) {
        let st = coherent(re, im);
        let m = x_marginal(&st, Representation::Husimi).unwrap();
        let p = analytic_probability(&m, lambda, Representation::Husimi, b).unwrap();
        let want = analytic_probability_gaussian(SQRT_2 * re, 1.0, lambda, Representation::Husimi, b).unwrap();
        prop_assert!((p - want).abs() < 1e-4, "{p} vs {want}");
    }

    #[test]
    fn larger_bias_favours_the_positive_state(
        n in 0usize..6,
        lambda in 1.1..2.0f64,
        b0 in -2.0..2.0f64,
        db in 0.01..1.0f64,
    ) {
        let st = state_from_str(&format!("fock({n})"), 32).unwrap();
        let m = x_marginal(&st, Representation::Husimi).unwrap();
        let lo = analytic_probability(&m, lambda, Representation::Husimi, b0).unwrap();
        let hi = analytic_probability(&m, lambda, Representation::Husimi, b0 + db).unwrap();
        prop_assert!(hi >= lo - 1e-12);
        prop_assert!((0.0..=1.0).contains(&lo));
    }

    #[test]
    fn filter_variance_matches_its_definition(lambda in 1.01..5.0f64, xi in -1i32..=1) {
        let r = Representation::from_xi(xi).unwrap();
        let want = (1.0 + xi as f64 * (1.0 - lambda)) / (2.0 * (lambda - 1.0));
        match filter_sigma2(lambda, r) {
            Ok(s2) => prop_assert!((s2 - want).abs() < 1e-12),
            Err(_) => prop_assert!(want < 0.0),
        }
    }
}
