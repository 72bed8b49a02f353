//! `bistab` command line: states, single ensembles, bias sweeps,
//! reconstruction, Monte Carlo checks and JPO sweeps.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Map, Value};

use bistab::analytics::{reconstruct_marginal, BiasSweep, SweepMethod};
use bistab::dsl::{parse_state_expr, state_from_str};
use bistab::dynamics::{run_ensemble_from, steady_state_amplitude};
use bistab::exec::with_threads;
use bistab::experiments::{
    bias_sweep_state, compare_state, jpo_sweep_state, write_outputs, CompareOptions, ExperimentSpec,
};
use bistab::states::{marginal_to_csv, x_marginal, InitialDistribution, Representation, DEFAULT_CUTOFF};
use bistab::table::Table;
use bistab::{Error, Execution};

#[derive(Debug, Parser)]
#[command(name = "bistab", version, about = "Bistable parametric oscillators as quadrature detectors")]
struct Cli {
    /// Worker threads (0 = one per core).
    #[arg(long, global = true, env = "BISTAB_THREADS")]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Evaluate a state expression and write its X-marginal.
    State(StateArgs),
    /// Run one ensemble at a single bias.
    Simulate(SimulateArgs),
    /// Sweep the bias and write p(b).
    Sweep(SweepArgs),
    /// Recover the marginal from a sweep CSV.
    Reconstruct(ReconstructArgs),
    /// Check the Monte Carlo sweep against the closed form.
    Compare(CompareArgs),
    /// Monte Carlo sweep of the Kerr-type oscillator.
    Jpo(ExperimentArgs),
}

#[derive(Debug, Args)]
struct StateArgs {
    #[arg(long, allow_hyphen_values = true)]
    expr: String,
    #[arg(long, default_value_t = DEFAULT_CUTOFF)]
    cutoff: usize,
    /// `q` (Husimi) or `w` (Wigner).
    #[arg(long, default_value = "q")]
    marginal: String,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write the density matrix as JSON.
    #[arg(long)]
    state_out: Option<PathBuf>,
}

/// Experiment fields; each one overrides the `--config` file.
#[derive(Debug, Args, Clone)]
struct ExperimentArgs {
    /// JSON experiment spec.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, allow_hyphen_values = true)]
    state: Option<String>,
    #[arg(long)]
    lambda: Option<f64>,
    #[arg(long)]
    g: Option<f64>,
    /// `opo`, `jpo` or `linear`.
    #[arg(long)]
    kind: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    xi: Option<i32>,
    #[arg(long, allow_hyphen_values = true)]
    b_min: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    b_max: Option<f64>,
    #[arg(long)]
    n_b: Option<usize>,
    #[arg(long)]
    dt: Option<f64>,
    #[arg(long)]
    t_max: Option<f64>,
    #[arg(long)]
    n_traj: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Stop trajectories once they sit deep inside a basin.
    #[arg(long)]
    settle: bool,
    #[arg(long)]
    cutoff: Option<usize>,
    /// Write sweep.csv, reconstruction.csv and report.json here.
    #[arg(long)]
    out_dir: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct SimulateArgs {
    #[command(flatten)]
    exp: ExperimentArgs,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    b: f64,
}

#[derive(Debug, Args)]
struct SweepArgs {
    #[command(flatten)]
    exp: ExperimentArgs,
    /// `mc` or `analytic`.
    #[arg(long)]
    method: Option<String>,
}

#[derive(Debug, Args)]
struct ReconstructArgs {
    /// Sweep CSV as written by `sweep`.
    #[arg(long)]
    sweep: PathBuf,
    /// Defaults to the λ recorded in the sweep header.
    #[arg(long)]
    lambda: Option<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct CompareArgs {
    #[command(flatten)]
    exp: ExperimentArgs,
    /// Filter representation for the closed form, if different.
    #[arg(long, allow_hyphen_values = true)]
    analytic_xi: Option<i32>,
    #[arg(long, default_value_t = 4.0)]
    threshold: f64,
}

#[derive(Debug)]
enum CliError {
    Usage(String),
    Domain(Error),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::Parse(_) | Error::InvalidSpec(_) | Error::InvalidConfig(_) | Error::Io(_) | Error::Json(_) => {
                CliError::Usage(format!("{}: {e}", e.kind()))
            }
            other => CliError::Domain(other),
        }
    }
}

type CliResult<T> = Result<T, CliError>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let threads = cli.threads.unwrap_or(0);
    match with_threads(threads, || dispatch(cli.command)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(CliError::Domain(e)) => {
            eprintln!("error[{}]: {e}", e.kind());
            ExitCode::from(2)
        }
    }
}

fn dispatch(cmd: Command) -> CliResult<()> {
    match cmd {
        Command::State(a) => cmd_state(a),
        Command::Simulate(a) => cmd_simulate(a),
        Command::Sweep(a) => cmd_sweep(a),
        Command::Reconstruct(a) => cmd_reconstruct(a),
        Command::Compare(a) => cmd_compare(a),
        Command::Jpo(a) => cmd_jpo(a),
    }
}

fn emit(out: Option<&Path>, text: &str) -> CliResult<()> {
    match out {
        Some(p) => std::fs::write(p, text).map_err(|e| Error::Io(e).into()),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

/// Summary lines go to stdout only when the data went to a file.
fn summary(out: Option<&Path>, line: &str) {
    if out.is_some() {
        println!("{line}");
    }
}

fn cmd_state(a: StateArgs) -> CliResult<()> {
    let repr = match a.marginal.to_ascii_lowercase().as_str() {
        "q" | "husimi" => Representation::Husimi,
        "w" | "wigner" => Representation::Wigner,
        other => return Err(CliError::Usage(format!("--marginal must be q or w, got `{other}`"))),
    };
    let state = state_from_str(&a.expr, a.cutoff)?;
    let m = x_marginal(&state, repr)?;
    let meta = [("expr", a.expr.clone()), ("cutoff", a.cutoff.to_string())];
    emit(a.out.as_deref(), &marginal_to_csv(&m, &meta))?;
    if let Some(p) = &a.state_out {
        std::fs::write(p, state.to_json() + "\n").map_err(Error::Io)?;
    }
    summary(
        a.out.as_deref(),
        &format!(
            "state {}: <n> = {:.6}, purity = {:.6}, marginal mass = {:.6}",
            a.expr,
            state.mean_photon_number(),
            state.purity(),
            m.mass()
        ),
    );
    Ok(())
}

/// Builds the spec from the config file with flags laid over it.
fn build_spec(a: &ExperimentArgs, kind: Option<&str>, method: Option<&str>) -> CliResult<ExperimentSpec> {
    // parse the state first so DSL errors win over missing fields
    if let Some(s) = &a.state {
        parse_state_expr(s).map_err(Error::from)?;
    }
    let mut obj = match &a.config {
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(Error::Io)?;
            match serde_json::from_str::<Value>(&text).map_err(Error::Json)? {
                Value::Object(m) => m,
                _ => return Err(CliError::Usage("config must be a JSON object".into())),
            }
        }
        None => Map::new(),
    };
    let mut set = |key: &str, v: Option<Value>| {
        if let Some(v) = v {
            obj.insert(key.to_string(), v);
        }
    };
    set("state", a.state.clone().map(Value::from));
    set("lambda", a.lambda.map(Value::from));
    set("g", a.g.map(Value::from));
    set("kind", kind.map(str::to_string).or_else(|| a.kind.clone()).map(Value::from));
    set("xi", a.xi.map(Value::from));
    set("cutoff", a.cutoff.map(Value::from));
    set("method", method.map(Value::from));
    set("out_dir", a.out_dir.as_ref().map(|p| Value::from(p.to_string_lossy().into_owned())));
    for (block, fields) in [
        ("b_grid", vec![("min", a.b_min.map(Value::from)), ("max", a.b_max.map(Value::from)), ("n", a.n_b.map(Value::from))]),
        (
            "sim",
            vec![
                ("dt", a.dt.map(Value::from)),
                ("t_max", a.t_max.map(Value::from)),
                ("n_traj", a.n_traj.map(Value::from)),
                ("seed", a.seed.map(Value::from)),
                ("settle", a.settle.then_some(Value::from(true))),
            ],
        ),
    ] {
        if fields.iter().all(|(_, v)| v.is_none()) {
            continue;
        }
        let entry = obj.entry(block.to_string()).or_insert_with(|| json!({}));
        let Value::Object(inner) = entry else {
            return Err(CliError::Usage(format!("config field `{block}` must be an object")));
        };
        if block == "b_grid" {
            // a partial override keeps the other defaults
            let d = bistab::experiments::BGrid::default();
            inner.entry("min").or_insert(Value::from(d.min));
            inner.entry("max").or_insert(Value::from(d.max));
            inner.entry("n").or_insert(Value::from(d.n));
        }
        for (k, v) in fields {
            if let Some(v) = v {
                inner.insert(k.to_string(), v);
            }
        }
    }
    Ok(ExperimentSpec::from_json(&Value::Object(obj).to_string())?)
}

fn cmd_simulate(a: SimulateArgs) -> CliResult<()> {
    let spec = build_spec(&a.exp, None, None)?;
    let state = spec.build_state()?;
    let init = InitialDistribution::from_state(&state, spec.repr()?)?;
    let params = spec.params().with_bias(a.b);
    let r = run_ensemble_from(&init, &params, &spec.sim_config()?, Execution::default())?;
    let report = json!({
        "spec": serde_json::to_value(&spec).map_err(Error::Json)?,
        "b": a.b,
        "result": serde_json::to_value(&r).map_err(Error::Json)?,
        "steady_state_amplitude": steady_state_amplitude(&params).ok(),
    });
    let text = serde_json::to_string_pretty(&report).map_err(Error::Json)? + "\n";
    emit(a.exp.out.as_deref(), &text)?;
    summary(
        a.exp.out.as_deref(),
        &format!("b = {}: p = {:.6} ± {:.6} ({} unresolved)", a.b, r.p, r.se, r.n_unresolved),
    );
    Ok(())
}

fn cmd_sweep(a: SweepArgs) -> CliResult<()> {
    let spec = build_spec(&a.exp, None, a.method.as_deref())?;
    let method = spec.method.unwrap_or(SweepMethod::Mc);
    run_sweep(&spec, method, &a.exp)
}

fn cmd_jpo(a: ExperimentArgs) -> CliResult<()> {
    let spec = build_spec(&a, Some("jpo"), Some("mc"))?;
    let state = spec.build_state()?;
    let r = jpo_sweep_state(&spec, &state, Execution::default())?;
    write_sweep(&spec, SweepMethod::Mc, &r.outcome, &a)?;
    let [one, zero] = r.fixed_points;
    println!(
        "fixed points ({:.6}, {:.6}) and ({:.6}, {:.6}); |alpha| = {:.6}, rotation = {:.6} rad",
        one[0], one[1], zero[0], zero[1], r.amplitude, r.rotation_angle
    );
    if let Some(dir) = &spec.out_dir {
        let text = serde_json::to_string_pretty(&r).map_err(Error::Json)? + "\n";
        std::fs::write(dir.join("jpo.json"), text).map_err(Error::Io)?;
    }
    Ok(())
}

fn run_sweep(spec: &ExperimentSpec, method: SweepMethod, a: &ExperimentArgs) -> CliResult<()> {
    let state = spec.build_state()?;
    let outcome = bias_sweep_state(spec, &state, method, Execution::default())?;
    write_sweep(spec, method, &outcome, a)
}

fn write_sweep(
    spec: &ExperimentSpec,
    method: SweepMethod,
    outcome: &bistab::experiments::SweepOutcome,
    a: &ExperimentArgs,
) -> CliResult<()> {
    if let Some(dir) = &spec.out_dir {
        let files = write_outputs(spec, method, outcome, dir)?;
        println!("wrote {}", files.sweep.display());
    }
    if a.out.is_some() || spec.out_dir.is_none() {
        let meta = bistab::experiments::spec_meta(spec);
        emit(a.out.as_deref(), &outcome.sweep.to_csv(&meta))?;
    }
    for f in &outcome.failures {
        eprintln!("warning: b = {} failed: {}: {}", f.b, f.kind, f.message);
    }
    summary(
        a.out.as_deref().or(spec.out_dir.as_deref()),
        &format!("{} sweep: {} points, {} failed", method, outcome.sweep.points.len(), outcome.failures.len()),
    );
    Ok(())
}

fn cmd_reconstruct(a: ReconstructArgs) -> CliResult<()> {
    let text = std::fs::read_to_string(&a.sweep).map_err(Error::Io)?;
    let sweep = BiasSweep::from_csv(&text)?;
    let table = Table::from_csv(&text)?;
    let spec_json = table.meta("spec").map(str::to_string);
    let lambda = match (a.lambda, &spec_json) {
        (Some(l), _) => l,
        (None, Some(s)) => ExperimentSpec::from_json(s)?.lambda,
        (None, None) => return Err(CliError::Usage("--lambda is required when the sweep has no spec header".into())),
    };
    let m = reconstruct_marginal(&sweep, lambda)?;
    let meta: Vec<(&str, String)> = match spec_json {
        Some(s) if a.lambda.is_none() => vec![("spec", s)],
        Some(s) => vec![("spec", s), ("lambda", lambda.to_string())],
        None => vec![("lambda", lambda.to_string())],
    };
    emit(a.out.as_deref(), &marginal_to_csv(&m, &meta))?;
    summary(a.out.as_deref(), &format!("reconstructed {} points, mass {:.6}", m.x.len(), m.mass()));
    Ok(())
}

fn cmd_compare(a: CompareArgs) -> CliResult<()> {
    let spec = build_spec(&a.exp, None, None)?;
    let state = spec.build_state()?;
    let opts = CompareOptions { analytic_xi: a.analytic_xi, threshold: a.threshold };
    let r = compare_state(&spec, &state, &opts, Execution::default())?;
    let text = serde_json::to_string_pretty(&r).map_err(Error::Json)? + "\n";
    emit(a.exp.out.as_deref(), &text)?;
    let max_z = r.max_z.map_or("inf".to_string(), |z| format!("{z:.3}"));
    summary(
        a.exp.out.as_deref(),
        &format!("max z = {max_z} over {} points: {}", r.points.len(), if r.pass { "PASS" } else { "FAIL" }),
    );
    Ok(())
}
