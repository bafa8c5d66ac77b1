//! `trapsearch`: CPF gate quality, Grover traces, timing plans and the oracle
//! suite from the command line.
//!
//! Exit codes: 0 success, 1 validation or runtime failure, 2 usage error.

mod config;

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use trapsearch_core::format::{round_sig, sig};
use trapsearch_core::grover::{optimal_iterations, run_search};
use trapsearch_core::metrics::{linear_grid, sweep, sweep_csv, MAX_SWEEP_M};
use trapsearch_core::planner::{heating_budget, plan, table_csv, table_json, FIT_CONSTANT};
use trapsearch_core::simulate::{
    off_diagonal_envelope, simulate_cpf_gate, SimOptions, MAX_SIMULATED_QUBITS,
};
use trapsearch_core::validation::{artifacts, run_suite};
use trapsearch_core::{
    Error, GateMode, GateParams, GateQuality, GroverConfig, MarkedState, Regime,
};

/// Largest register the analytic gate report accepts.
const MAX_ANALYTIC_QUBITS: usize = 12;

const SUBCOMMANDS: [&str; 5] = ["gate", "sweep", "grover", "plan", "validate"];

#[derive(Parser, Debug)]
#[command(
    name = "trapsearch",
    version,
    about = "Trapped-ion CPF gate and Grover search simulator",
    args_override_self = true,
    after_help = "A flat key=value file given with --config presets any flag of the chosen \
                  subcommand (e.g. `fock-dim=6`, `simulate=true`); flags on the command line \
                  take precedence over the file."
)]
struct Cli {
    /// Worker threads for sweeps and validation [default: available parallelism]
    #[arg(long, global = true)]
    jobs: Option<usize>,

    /// Flat key=value file presetting subcommand flags
    #[arg(long, value_name = "FILE")]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Fidelity, success probability and infidelity of the n-qubit CPF gate
    Gate(GateArgs),
    /// Gate quality over a grid of coupling ratios
    Sweep(SweepArgs),
    /// Grover search trace with an ideal or approximate CPF gate
    Grover(GroverArgs),
    /// Gate timing and heating budget for a trap
    Plan(PlanArgs),
    /// Run the oracle suite and write its data files
    Validate(ValidateArgs),
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Args, Debug)]
struct Output {
    /// Write the result to this file instead of stdout
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,

    /// Output format
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
}

#[derive(Args, Debug)]
#[command(args_override_self = true)]
struct GateArgs {
    /// Number of qubits (2..=12; at most 4 with --simulate)
    #[arg(long)]
    n: usize,
    /// Coupling ratio Omega_n / Omega_i, in (0, 1)
    #[arg(long)]
    m: f64,
    /// Cross-check the analytic diagonal against pulse dynamics
    #[arg(long)]
    simulate: bool,
    /// Phonon levels kept in the simulation
    #[arg(long, default_value_t = 4)]
    fock_dim: usize,
    /// Initial RK4 step count (doubled until the norm drift is below 1e-9)
    #[arg(long, default_value_t = 4000)]
    steps: usize,
    /// Lamb-Dicke parameter used by the simulation
    #[arg(long, default_value_t = 0.1)]
    eta: f64,
    #[command(flatten)]
    output: Output,
}

#[derive(Args, Debug)]
#[command(args_override_self = true)]
struct SweepArgs {
    /// Comma-separated qubit counts
    #[arg(long, value_delimiter = ',', default_value = "3,6,9")]
    n: Vec<usize>,
    /// Smallest coupling ratio
    #[arg(long, default_value_t = 0.001)]
    m_min: f64,
    /// Largest coupling ratio (at most 0.2)
    #[arg(long, default_value_t = 0.2)]
    m_max: f64,
    /// Grid points, evenly spaced
    #[arg(long, default_value_t = 200)]
    points: usize,
    /// Write the result to this file instead of stdout
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
    /// Output format
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
}

#[derive(Args, Debug)]
#[command(args_override_self = true)]
struct GroverArgs {
    /// Number of qubits (2..=20)
    #[arg(long)]
    n: usize,
    /// Marked bitstring, ion 0 first
    #[arg(long)]
    marked: String,
    /// Grover iterations [default: round(pi sqrt(2^n) / 4)]
    #[arg(long)]
    iterations: Option<usize>,
    /// Coupling ratio of the approximate CPF gate [default: ideal gate]
    #[arg(long)]
    m: Option<f64>,
    #[command(flatten)]
    output: Output,
}

#[derive(Args, Debug)]
#[command(args_override_self = true)]
struct PlanArgs {
    /// Number of ions (2 or more)
    #[arg(long)]
    n: usize,
    /// Drive regime: weak or strong
    #[arg(long)]
    regime: String,
    /// Lamb-Dicke parameter
    #[arg(long, default_value_t = 0.1)]
    eta: f64,
    /// Heating time of the motional ground state, in seconds
    #[arg(long, default_value_t = 4e-3)]
    heating_time: f64,
    /// CPF gates per Grover iteration
    #[arg(long, default_value_t = 2)]
    gates: usize,
    #[command(flatten)]
    output: Output,
}

#[derive(Args, Debug)]
#[command(args_override_self = true)]
struct ValidateArgs {
    /// Directory for the data files
    #[arg(long, value_name = "DIR", default_value = "validation")]
    out: PathBuf,
}

enum Failure {
    Usage(String),
    Runtime(String),
    Validation,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidArgument(_) | Error::DimensionMismatch { .. } | Error::Unsupported(_) => {
                Failure::Usage(e.to_string())
            }
            _ => Failure::Runtime(e.to_string()),
        }
    }
}

fn io_err(path: &Path, e: std::io::Error) -> Failure {
    Failure::Runtime(format!("{}: {e}", path.display()))
}

fn log(msg: &str) {
    let now = SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .unwrap_or_default();
    eprintln!("[{}.{:03}] {msg}", now.as_secs(), now.subsec_millis());
}

fn emit(text: &str, out: Option<&Path>) -> Result<(), Failure> {
    match out {
        Some(path) => fs::write(path, text).map_err(|e| io_err(path, e)),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .map_err(|e| Failure::Runtime(e.to_string()))
        }
    }
}

fn json_text(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("json values always serialize");
    s.push('\n');
    s
}

fn csv_text(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut s = header.join(",");
    s.push('\n');
    for r in rows {
        s.push_str(&r.join(","));
        s.push('\n');
    }
    s
}

fn cmd_gate(a: &GateArgs) -> Result<(), Failure> {
    if a.n > MAX_ANALYTIC_QUBITS {
        return Err(Failure::Usage(format!(
            "gate reports are limited to n <= {MAX_ANALYTIC_QUBITS}, got {}",
            a.n
        )));
    }
    if a.simulate && a.n > MAX_SIMULATED_QUBITS {
        return Err(Failure::Usage(format!(
            "--simulate is limited to n <= {MAX_SIMULATED_QUBITS} (composite space grows as 3^n), got {}",
            a.n
        )));
    }
    let params = GateParams::new(a.n, a.m)?;
    let q = GateQuality::evaluate(a.n, a.m)?;
    let sim = if a.simulate {
        let opts = SimOptions {
            eta: a.eta,
            fock_dim: a.fock_dim,
            steps: a.steps,
            ..SimOptions::default()
        };
        log(&format!(
            "simulating n = {} on {} phonon levels",
            a.n, a.fock_dim
        ));
        Some(simulate_cpf_gate(params, opts)?)
    } else {
        None
    };
    let text = match a.output.format {
        Format::Json => {
            let mut v = json!({
                "n": q.n,
                "m": round_sig(q.m),
                "fidelity": round_sig(q.fidelity),
                "success_probability": round_sig(q.success_probability),
                "infidelity": round_sig(q.infidelity),
            });
            if let Some(s) = &sim {
                v["simulation"] = json!({
                    "max_diagonal_deviation": round_sig(s.max_diagonal_deviation),
                    "max_off_diagonal": round_sig(s.max_off_diagonal),
                    "off_diagonal_envelope": round_sig(off_diagonal_envelope(a.m)),
                    "max_leakage": round_sig(s.max_leakage),
                    "steps": s.steps,
                    "norm_drift": round_sig(s.norm_drift),
                });
            }
            json_text(&v)
        }
        Format::Csv => {
            let mut header = vec!["n", "m", "fidelity", "success_probability", "infidelity"];
            let mut row = vec![
                q.n.to_string(),
                sig(q.m),
                sig(q.fidelity),
                sig(q.success_probability),
                sig(q.infidelity),
            ];
            if let Some(s) = &sim {
                header.extend([
                    "max_diagonal_deviation",
                    "max_off_diagonal",
                    "max_leakage",
                    "steps",
                    "norm_drift",
                ]);
                row.extend([
                    sig(s.max_diagonal_deviation),
                    sig(s.max_off_diagonal),
                    sig(s.max_leakage),
                    s.steps.to_string(),
                    sig(s.norm_drift),
                ]);
            }
            csv_text(&header, &[row])
        }
    };
    emit(&text, a.output.out.as_deref())
}

fn cmd_sweep(a: &SweepArgs) -> Result<(), Failure> {
    if a.n.is_empty() {
        return Err(Failure::Usage("--n needs at least one qubit count".into()));
    }
    if let Some(&n) = a.n.iter().find(|&&n| !(2..=62).contains(&n)) {
        return Err(Failure::Usage(format!("sweep needs 2 <= n <= 62, got {n}")));
    }
    if a.points == 0 {
        return Err(Failure::Usage("--points must be at least 1".into()));
    }
    if !(a.m_min > 0.0 && a.m_min < a.m_max || a.points == 1 && a.m_min > 0.0)
        || a.m_max > MAX_SWEEP_M
    {
        return Err(Failure::Usage(format!(
            "need 0 < m-min < m-max <= {MAX_SWEEP_M}, got [{}, {}]",
            a.m_min, a.m_max
        )));
    }
    let grid = linear_grid(a.m_min, a.m_max, a.points)?;
    let curves = sweep(&a.n, &grid)?;
    let text = match a.format {
        Format::Csv => sweep_csv(&curves),
        Format::Json => json_text(&Value::Array(
            curves
                .iter()
                .flat_map(|c| c.points.iter())
                .map(|p| {
                    json!({
                        "n": p.n,
                        "m": round_sig(p.m),
                        "infidelity": round_sig(p.infidelity),
                        "success_probability": round_sig(p.success_probability),
                    })
                })
                .collect(),
        )),
    };
    emit(&text, a.out.as_deref())
}

fn cmd_grover(a: &GroverArgs) -> Result<(), Failure> {
    let marked = MarkedState::parse_for(&a.marked, a.n)?;
    let mode = a.m.map_or(GateMode::Ideal, GateMode::Approximate);
    let iterations = a.iterations.unwrap_or_else(|| optimal_iterations(a.n));
    let trace = run_search(&GroverConfig::new(a.n, marked, iterations, mode)?)?;
    let text = match a.output.format {
        Format::Json => json_text(&trace.to_json()),
        Format::Csv => trace.to_csv(),
    };
    emit(&text, a.output.out.as_deref())
}

fn cmd_plan(a: &PlanArgs) -> Result<(), Failure> {
    let regime: Regime = a.regime.parse()?;
    let p = plan(a.n, regime, a.eta, FIT_CONSTANT)?;
    let h = heating_budget(&p, a.heating_time, a.gates)?;
    let text = match a.output.format {
        Format::Json => {
            let mut v = table_json(&[p])[0].clone();
            v["fit_constant"] = json!(round_sig(p.fit_constant));
            v["tau_ms"] = json!(round_sig(p.tau * 1e3));
            v["gate_time_ms"] = json!(round_sig(p.gate_time * 1e3));
            v["heating"] = json!({
                "heating_time_ms": round_sig(h.heating_time * 1e3),
                "gates_per_iteration": h.gates_per_iteration,
                "iteration_time_ms": round_sig(h.iteration_time * 1e3),
                "margin": round_sig(h.margin),
                "feasible": h.feasible,
            });
            json_text(&v)
        }
        Format::Csv => {
            let table = table_csv(&[p]);
            let mut lines = table.lines();
            let header = lines.next().unwrap_or_default();
            let row = lines.next().unwrap_or_default();
            format!(
                "{header},iteration_time_ms,margin,feasible\n{row},{},{},{}\n",
                sig(h.iteration_time * 1e3),
                sig(h.margin),
                h.feasible
            )
        }
    };
    emit(&text, a.output.out.as_deref())
}

fn cmd_validate(a: &ValidateArgs) -> Result<(), Failure> {
    log("running oracle suite");
    let report = run_suite()?;
    fs::create_dir_all(&a.out).map_err(|e| io_err(&a.out, e))?;
    for art in artifacts(&report)? {
        let path = a.out.join(art.name);
        fs::write(&path, art.contents).map_err(|e| io_err(&path, e))?;
    }
    emit(&report.table(), None)?;
    log(&format!("data files written to {}", a.out.display()));
    if report.passed() {
        Ok(())
    } else {
        Err(Failure::Validation)
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    if let Some(jobs) = cli.jobs {
        if jobs == 0 {
            return Err(Failure::Usage("--jobs must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global()
            .map_err(|e| Failure::Runtime(e.to_string()))?;
    }
    match &cli.command {
        Command::Gate(a) => cmd_gate(a),
        Command::Sweep(a) => cmd_sweep(a),
        Command::Grover(a) => cmd_grover(a),
        Command::Plan(a) => cmd_plan(a),
        Command::Validate(a) => cmd_validate(a),
    }
}

fn main() -> ExitCode {
    let argv = match config::expand(std::env::args_os().collect(), &SUBCOMMANDS) {
        Ok(v) => v,
        Err(msg) => {
            eprintln!("error: {msg}");
            return ExitCode::from(2);
        }
    };
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Runtime(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Validation) => {
            eprintln!("validation failed");
            ExitCode::from(1)
        }
    }
}
