//! Command-line front end.
//!
//! Exit codes: 0 success, 1 numerical or verification failure, 2 usage error.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde::Serialize;
use serde_json::{json, Value};

use crate::error::Error;
use crate::fidelity::{
    fmt_sig12, ideal_cnot_superposition, outcome_fidelity, points_to_csv, product_input, sweep, Ensemble,
    LogicalInput, SweepConfig,
};
use crate::gates::{
    bit_flip, cnot, controlled_sign_ideal, encode_superposition, hadamard_via_cat, ideal_hadamard_output,
    phase_rotation_exact, phase_rotation_ideal, apply_cz, Bit, CnotBackend, CzBackend, GateOutcome, LogicalParams,
};
use crate::measurement::{BranchPolicy, Brancher, HomodyneDensity};
use crate::state::SuperposedState;
use crate::verify::{oracle_suite, VerifyConfig};

#[derive(Parser, Debug)]
#[command(name = "coqsim", version, about = "Coherent-state qubit gate simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// CNOT average and renormalized fidelity against alpha.
    Sweep(SweepArgs),
    /// Run one gate and print its branch trace.
    GateDemo(GateDemoArgs),
    /// Homodyne density of a single-mode code or cat state.
    Homodyne(HomodyneArgs),
    /// Cross-check the analytic engine against the photon-number oracle.
    Verify(VerifyArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum BackendArg {
    /// Beamsplitter for every controlled sign.
    Exact,
    /// Logical sign flip for every controlled sign.
    Ideal,
}

impl BackendArg {
    fn cz(self) -> CzBackend {
        match self {
            BackendArg::Exact => CzBackend::Exact,
            BackendArg::Ideal => CzBackend::Ideal,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum BranchArg {
    Enumerate,
    Even,
    Odd,
    Sample,
}

impl BranchArg {
    fn policy(self, seed: u64) -> BranchPolicy {
        match self {
            BranchArg::Enumerate => BranchPolicy::Enumerate,
            BranchArg::Even => BranchPolicy::Even,
            BranchArg::Odd => BranchPolicy::Odd,
            BranchArg::Sample => BranchPolicy::Sample(seed),
        }
    }
}

#[derive(Args, Debug)]
struct SweepArgs {
    /// Comma-separated values, or start:stop:step (stop excluded).
    #[arg(long, default_value = "3:21:1")]
    alphas: String,
    #[arg(long, value_enum, default_value_t = BackendArg::Exact)]
    backend: BackendArg,
    /// `basis4`, or comma-separated control/target pairs over 0 1 + - (e.g. `00,+1`).
    #[arg(long, default_value = "basis4")]
    ensemble: String,
    #[arg(long, value_enum, default_value_t = BranchArg::Enumerate)]
    branch: BranchArg,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum GateArg {
    Hadamard,
    Cnot,
    Cz,
    X,
    Rphi,
}

#[derive(Args, Debug)]
struct GateDemoArgs {
    #[arg(long, value_enum)]
    gate: GateArg,
    #[arg(long, default_value_t = 6.0)]
    alpha: f64,
    /// One symbol per qubit from 0 1 + -; two-qubit gates take control first.
    #[arg(long)]
    input: String,
    #[arg(long, value_enum, default_value_t = BranchArg::Enumerate)]
    branch: BranchArg,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = BackendArg::Ideal)]
    backend: BackendArg,
    /// Rotation angle for `rphi`.
    #[arg(long, default_value_t = std::f64::consts::FRAC_PI_2)]
    phi: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
enum StateArg {
    #[value(name = "zero")]
    #[serde(rename = "zero")]
    Zero,
    #[value(name = "one")]
    #[serde(rename = "one")]
    One,
    #[value(name = "cat+")]
    #[serde(rename = "cat+")]
    CatPlus,
    #[value(name = "cat-")]
    #[serde(rename = "cat-")]
    CatMinus,
}

#[derive(Args, Debug)]
struct HomodyneArgs {
    #[arg(long, value_enum)]
    state: StateArg,
    #[arg(long, default_value_t = 3.0)]
    alpha: f64,
    /// Quadrature angle in radians; 0 is the amplitude quadrature.
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    angle: f64,
    /// lo:hi; defaults to an interval holding all but ~e^-100 of the density.
    #[arg(long, allow_hyphen_values = true)]
    xrange: Option<String>,
    #[arg(long, default_value_t = 401)]
    points: usize,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    #[arg(long, default_value_t = 4.0)]
    max_alpha: f64,
    /// Cases per operation.
    #[arg(long, default_value_t = 40)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Provenance written next to (or inside) every output file.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub config: Value,
    pub seed: u64,
    pub version: String,
    pub outputs: Vec<String>,
}

impl RunManifest {
    fn new(command: &str, config: Value, seed: u64, out: Option<&Path>) -> Self {
        Self {
            command: command.to_string(),
            config,
            seed,
            version: env!("CARGO_PKG_VERSION").to_string(),
            outputs: out.map(|p| p.display().to_string()).into_iter().collect(),
        }
    }
}

enum Failure {
    Usage(String),
    Numerical(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Numerical(e.to_string())
    }
}

type CmdResult = std::result::Result<(), Failure>;

/// Parses `args` (program name first) and runs the command; returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let result = match cli.command {
        Command::Sweep(a) => cmd_sweep(a),
        Command::GateDemo(a) => cmd_gate_demo(a),
        Command::Homodyne(a) => cmd_homodyne(a),
        Command::Verify(a) => cmd_verify(a),
    };
    match result {
        Ok(()) => 0,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            2
        }
        Err(Failure::Numerical(msg)) => {
            eprintln!("error: {msg}");
            1
        }
    }
}

/// Parses `a,b,c` or `start:stop:step` with the stop excluded.
pub fn parse_alphas(text: &str) -> std::result::Result<Vec<f64>, String> {
    let num = |s: &str| s.trim().parse::<f64>().map_err(|_| format!("invalid number `{s}` in --alphas"));
    let values = if text.contains(':') {
        let parts: Vec<&str> = text.split(':').collect();
        if parts.len() != 3 {
            return Err(format!("range `{text}` must be start:stop:step"));
        }
        let (start, stop, step) = (num(parts[0])?, num(parts[1])?, num(parts[2])?);
        if !(step > 0.0 && step.is_finite() && start.is_finite() && stop.is_finite()) {
            return Err(format!("range `{text}` needs finite bounds and a positive step"));
        }
        let n = ((stop - start) / step - 1e-9).ceil().max(0.0) as usize;
        (0..n).map(|i| start + i as f64 * step).collect()
    } else {
        text.split(',').map(num).collect::<std::result::Result<Vec<_>, _>>()?
    };
    if values.is_empty() {
        return Err(format!("--alphas `{text}` is empty"));
    }
    if let Some(a) = values.iter().find(|a| !(**a > 0.0 && a.is_finite())) {
        return Err(format!("alpha must be positive, got {a}"));
    }
    Ok(values)
}

fn parse_inputs(s: &str) -> std::result::Result<Vec<LogicalInput>, String> {
    s.chars()
        .map(|c| LogicalInput::from_symbol(c).ok_or_else(|| format!("invalid qubit symbol `{c}` in `{s}`")))
        .collect()
}

fn parse_ensemble(s: &str) -> std::result::Result<Ensemble, String> {
    if s == "basis4" {
        return Ok(Ensemble::Basis4);
    }
    let pairs = s
        .split(',')
        .map(|tok| match parse_inputs(tok.trim())?.as_slice() {
            [c, t] => Ok((c.clone(), t.clone())),
            _ => Err(format!("ensemble entry `{tok}` must name two qubits")),
        })
        .collect::<std::result::Result<Vec<_>, _>>()?;
    Ok(Ensemble::Custom(pairs))
}

fn parse_xrange(s: &str) -> std::result::Result<(f64, f64), String> {
    let (lo, hi) = s.split_once(':').ok_or_else(|| format!("--xrange `{s}` must be lo:hi"))?;
    let lo: f64 = lo.trim().parse().map_err(|_| format!("invalid --xrange `{s}`"))?;
    let hi: f64 = hi.trim().parse().map_err(|_| format!("invalid --xrange `{s}`"))?;
    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
        return Err(format!("--xrange `{s}` needs finite lo < hi"));
    }
    Ok((lo, hi))
}

fn params(alpha: f64) -> std::result::Result<LogicalParams, Failure> {
    LogicalParams::new(alpha).map_err(|e| Failure::Usage(e.to_string()))
}

fn to_json<T: Serialize>(v: &T) -> std::result::Result<String, Failure> {
    serde_json::to_string_pretty(v).map_err(|e| Failure::Numerical(e.to_string()))
}

fn manifest_path(out: &Path) -> PathBuf {
    let mut name = out.as_os_str().to_owned();
    name.push(".manifest.json");
    PathBuf::from(name)
}

/// Writes `body` to `out` (or stdout). Plain-text outputs get a sibling
/// `<file>.manifest.json`; JSON bodies carry the manifest themselves.
fn emit(body: &str, out: Option<&Path>, manifest: Option<&RunManifest>) -> CmdResult {
    match out {
        Some(path) => {
            std::fs::write(path, body).map_err(|e| Failure::Numerical(format!("{}: {e}", path.display())))?;
            if let Some(m) = manifest {
                let mpath = manifest_path(path);
                let text = to_json(m)? + "\n";
                std::fs::write(&mpath, text).map_err(|e| Failure::Numerical(format!("{}: {e}", mpath.display())))?;
            }
        }
        None => print!("{body}"),
    }
    Ok(())
}

fn cmd_sweep(a: SweepArgs) -> CmdResult {
    let alphas = parse_alphas(&a.alphas).map_err(Failure::Usage)?;
    let ensemble = parse_ensemble(&a.ensemble).map_err(Failure::Usage)?;
    let cfg = SweepConfig {
        alpha_values: alphas,
        backend: CnotBackend::uniform(a.backend.cz()),
        branches: a.branch.policy(a.seed),
        ensemble,
    };
    let manifest = RunManifest::new(
        "sweep",
        serde_json::to_value(&cfg).map_err(|e| Failure::Numerical(e.to_string()))?,
        a.seed,
        a.out.as_deref(),
    );
    let points = sweep(&cfg)?;
    match a.format {
        Format::Csv => emit(&points_to_csv(&points, &cfg.ensemble), a.out.as_deref(), Some(&manifest)),
        Format::Json => {
            let body = to_json(&json!({ "manifest": manifest, "points": points }))? + "\n";
            emit(&body, a.out.as_deref(), None)
        }
    }
}

fn single_qubit_input(input: &LogicalInput, p: &LogicalParams) -> std::result::Result<SuperposedState, Failure> {
    Ok(encode_superposition(input.mu, input.nu, p)?)
}

/// Ideal image of `mu|0> + nu|1>` under a map given on the two code states.
fn linear_image<F>(input: &LogicalInput, image: F) -> std::result::Result<SuperposedState, Failure>
where
    F: Fn(Bit) -> SuperposedState,
{
    let zero = image(Bit::Zero).scale(input.mu);
    let one = image(Bit::One).scale(input.nu);
    Ok(zero.superpose(&one)?.compact(0.0).normalize()?)
}

fn outcome_json(o: &GateOutcome, ideal: &SuperposedState) -> std::result::Result<Value, Failure> {
    Ok(json!({
        "probability": o.probability,
        "outcomes": o.measurement_records.iter().map(|r| r.label.label()).collect::<Vec<_>>(),
        "flips_applied": o.flips_applied,
        "data_modes": o.data_modes,
        "env_modes": o.env_modes(),
        "ideal_fidelity": outcome_fidelity(o, ideal)?,
        "trace": o.trace,
        "state": o.state,
    }))
}

fn cmd_gate_demo(a: GateDemoArgs) -> CmdResult {
    let p = params(a.alpha)?;
    let inputs = parse_inputs(&a.input).map_err(Failure::Usage)?;
    let arity = match a.gate {
        GateArg::Cnot | GateArg::Cz => 2,
        _ => 1,
    };
    if inputs.len() != arity {
        return Err(Failure::Usage(format!(
            "gate {:?} takes {arity} qubit symbol(s), got `{}`",
            a.gate, a.input
        )));
    }
    let policy = a.branch.policy(a.seed);
    let mut brancher = Brancher::new(policy);
    let cz = a.backend.cz();
    let (input, ideal, outcomes) = match a.gate {
        GateArg::Hadamard => {
            let s = single_qubit_input(&inputs[0], &p)?;
            let ideal = linear_image(&inputs[0], |b| ideal_hadamard_output(b, &p))?;
            let outs = hadamard_via_cat(&s, 0, &p, cz, &mut brancher)?;
            (s, ideal, outs)
        }
        GateArg::Cnot => {
            let s = product_input(&inputs[0], &inputs[1], &p)?;
            let ideal = ideal_cnot_superposition(&inputs[0], &inputs[1], &p)?;
            let outs = cnot(&s, 0, 1, &p, CnotBackend::uniform(cz), &mut brancher)?;
            (s, ideal, outs)
        }
        GateArg::Cz => {
            let s = product_input(&inputs[0], &inputs[1], &p)?;
            let ideal = controlled_sign_ideal(&s, 0, 1, &p)?.normalize()?;
            let out = GateOutcome::start(apply_cz(&s, 0, 1, &p, cz)?)?;
            (s, ideal, vec![out])
        }
        GateArg::X => {
            let s = single_qubit_input(&inputs[0], &p)?;
            let ideal = linear_image(&inputs[0], |b| crate::gates::encode_qubit(b.flip(), &p))?;
            let out = GateOutcome::start(bit_flip(&s, 0, &p)?)?;
            (s, ideal, vec![out])
        }
        GateArg::Rphi => {
            let s = single_qubit_input(&inputs[0], &p)?;
            let ideal = phase_rotation_ideal(&s, 0, a.phi, &p)?;
            let out = match cz {
                CzBackend::Exact => phase_rotation_exact(&s, 0, a.phi, &p)?,
                CzBackend::Ideal => ideal.clone(),
            };
            (s, ideal, vec![GateOutcome::start(out)?])
        }
    };
    let config = json!({
        "gate": a.gate,
        "alpha": a.alpha,
        "input": a.input,
        "branch": policy,
        "backend": cz.name(),
        "phi": if a.gate == GateArg::Rphi { Some(a.phi) } else { None },
    });
    let manifest = RunManifest::new("gate-demo", config, a.seed, a.out.as_deref());
    let total: f64 = outcomes.iter().map(|o| o.probability).sum();
    let branches = outcomes
        .iter()
        .map(|o| outcome_json(o, &ideal))
        .collect::<std::result::Result<Vec<_>, _>>()?;
    let body = json!({
        "manifest": manifest,
        "input_state": input,
        "ideal_output": ideal,
        "total_probability": total,
        "branches": branches,
    });
    emit(&(to_json(&body)? + "\n"), a.out.as_deref(), None)
}

fn homodyne_state(which: StateArg, p: &LogicalParams) -> std::result::Result<SuperposedState, Failure> {
    let one = Complex64::new(1.0, 0.0);
    let zero = Complex64::new(0.0, 0.0);
    let (mu, nu) = match which {
        StateArg::Zero => (one, zero),
        StateArg::One => (zero, one),
        StateArg::CatPlus => (one, one),
        StateArg::CatMinus => (one, -one),
    };
    Ok(encode_superposition(mu, nu, p)?)
}

fn cmd_homodyne(a: HomodyneArgs) -> CmdResult {
    if a.points < 2 {
        return Err(Failure::Usage(format!("--points must be at least 2, got {}", a.points)));
    }
    let p = params(a.alpha)?;
    let xrange = a.xrange.as_deref().map(parse_xrange).transpose().map_err(Failure::Usage)?;
    let s = homodyne_state(a.state, &p)?;
    let density = HomodyneDensity::new(&s, 0, a.angle)?;
    let (lo, hi) = xrange.unwrap_or_else(|| density.support());
    let step = (hi - lo) / (a.points - 1) as f64;
    let xs: Vec<f64> = (0..a.points).map(|i| lo + i as f64 * step).collect();
    let ds: Vec<f64> = xs.iter().map(|&x| density.at(x)).collect();
    let config = json!({
        "state": a.state,
        "alpha": a.alpha,
        "angle": a.angle,
        "xrange": [lo, hi],
        "points": a.points,
    });
    let manifest = RunManifest::new("homodyne", config, 0, a.out.as_deref());
    match a.format {
        Format::Csv => {
            let mut body = String::from("x,density\n");
            for (x, d) in xs.iter().zip(&ds) {
                let _ = writeln!(body, "{},{}", fmt_sig12(*x), fmt_sig12(*d));
            }
            emit(&body, a.out.as_deref(), Some(&manifest))
        }
        Format::Json => {
            let body = json!({ "manifest": manifest, "x": xs, "density": ds });
            emit(&(to_json(&body)? + "\n"), a.out.as_deref(), None)
        }
    }
}

fn cmd_verify(a: VerifyArgs) -> CmdResult {
    let cfg = VerifyConfig {
        max_alpha: a.max_alpha,
        trials: a.trials,
        seed: a.seed,
    };
    cfg.validate().map_err(|e| Failure::Usage(e.to_string()))?;
    let report = oracle_suite(&cfg)?;
    let manifest = RunManifest::new(
        "verify",
        serde_json::to_value(cfg).map_err(|e| Failure::Numerical(e.to_string()))?,
        a.seed,
        a.out.as_deref(),
    );
    match a.format {
        Format::Csv => emit(&report.table(), a.out.as_deref(), Some(&manifest))?,
        Format::Json => {
            let body = json!({ "manifest": manifest, "report": report });
            emit(&(to_json(&body)? + "\n"), a.out.as_deref(), None)?
        }
    }
    if report.passed() {
        Ok(())
    } else {
        Err(Failure::Numerical(format!(
            "oracle deviation above threshold for: {}",
            report.failures().join(", ")
        )))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn alpha_ranges() {
        assert_eq!(parse_alphas("3:20:1").unwrap().len(), 17);
        assert_eq!(parse_alphas("1:2:0.25").unwrap(), vec![1.0, 1.25, 1.5, 1.75]);
        assert_eq!(parse_alphas("10").unwrap(), vec![10.0]);
        assert_eq!(parse_alphas("3, 6,10").unwrap(), vec![3.0, 6.0, 10.0]);
        assert!(parse_alphas("3:20").is_err());
        assert!(parse_alphas("3:20:0").is_err());
        assert!(parse_alphas("5:5:1").is_err());
        assert!(parse_alphas("0,1").is_err());
        assert!(parse_alphas("x").is_err());
    }

    #[test]
    fn ensembles_and_ranges() {
        assert_eq!(parse_ensemble("basis4").unwrap(), Ensemble::Basis4);
        match parse_ensemble("00,+1").unwrap() {
            Ensemble::Custom(v) => assert_eq!(v.len(), 2),
            _ => panic!(),
        }
        assert!(parse_ensemble("0").is_err());
        assert!(parse_ensemble("0x").is_err());
        assert_eq!(parse_xrange("-5:5").unwrap(), (-5.0, 5.0));
        assert!(parse_xrange("5:-5").is_err());
    }

    #[test]
    fn usage_errors_exit_2() {
        assert_eq!(run(["coqsim", "bogus"]), 2);
        assert_eq!(run(["coqsim", "homodyne", "--state", "zero", "--points", "0"]), 2);
        assert_eq!(run(["coqsim", "verify", "--trials", "0"]), 2);
        assert_eq!(run(["coqsim", "verify", "--max-alpha", "12"]), 2);
        assert_eq!(run(["coqsim", "gate-demo", "--gate", "cnot", "--input", "0"]), 2);
        assert_eq!(run(["coqsim", "sweep", "--alphas", "abc"]), 2);
    }
}
