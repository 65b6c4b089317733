//! `lmg`: spectra, Bethe solutions, eigenstates, preparation circuits,
//! simulation and VQE runs for the two-level LMG model.

mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use lmg_core::bethe::{solve_bethe, SolverOptions, SpectralSolution};
use lmg_core::circuit::{angles, build_circuit, encode, export_circuit, import_circuit, DepthMode, ExportFormat};
use lmg_core::ego::build_eigenstate;
use lmg_core::model::{
    exact_spectrum, make_params, parse_sector, sector_configs, sector_spectrum, FockVector, ModelParams,
    SectorConfig,
};
use lmg_core::sim::{encoded_expectation, pauli_groups, run, sampled_expectation};
use lmg_core::verify::{acceptance_checks, invariant_checks};
use lmg_core::vqe::{benchmark, optimize, BenchmarkOptions, Estimator, StartMode, VqeOptions};
use lmg_core::Exec;

use output::{emit, emit_table, json_string, CmdResult, Failure, Format};

#[derive(Parser, Debug)]
#[command(name = "lmg", version, about = "Exact LMG spectra, eigenstate circuits and VQE benchmarks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone, Copy)]
struct Model {
    /// Number of particles.
    #[arg(long)]
    n: usize,
    /// Pair-scattering strength.
    #[arg(long, allow_negative_numbers = true)]
    v: f64,
    /// Exchange strength.
    #[arg(long, allow_negative_numbers = true)]
    w: f64,
}

impl Model {
    fn params(&self) -> Result<ModelParams, Failure> {
        Ok(make_params(self.n, self.v, self.w)?)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Method {
    /// Pairons and the product of creation factors.
    Bethe,
    /// Diagonalization of the parity blocks.
    Exact,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Depth {
    Linear,
    Log,
}

impl From<Depth> for DepthMode {
    fn from(d: Depth) -> Self {
        match d {
            Depth::Linear => DepthMode::Linear,
            Depth::Log => DepthMode::Log,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum CircuitFormat {
    Json,
    Qasm,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Start {
    Warm,
    Cold,
}

#[derive(Args, Debug, Clone)]
struct Selection {
    /// 1-based rank by energy, over the whole spectrum or within `--sector`.
    #[arg(long, default_value_t = 1)]
    index: usize,
    /// Sector as `nu_a,nu_b` or `M,nu_a,nu_b`.
    #[arg(long)]
    sector: Option<String>,
    #[arg(long, value_enum, default_value_t = Method::Bethe)]
    method: Method,
    /// Allow Bethe solves with V^2 < W^2.
    #[arg(long)]
    allow_hyperbolic: bool,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Full spectrum from diagonalization and from the Bethe equations.
    Spectrum {
        #[command(flatten)]
        model: Model,
        #[arg(long)]
        allow_hyperbolic: bool,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Spectral parameters of every state in a sector.
    Bethe {
        #[command(flatten)]
        model: Model,
        /// Sector as `nu_a,nu_b` or `M,nu_a,nu_b`; all sectors when omitted.
        #[arg(long)]
        sector: Option<String>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        allow_hyperbolic: bool,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Fock-space amplitudes of one eigenstate.
    State {
        #[command(flatten)]
        model: Model,
        #[command(flatten)]
        select: Selection,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Rotation angles that prepare one eigenstate.
    Angles {
        #[command(flatten)]
        model: Model,
        #[command(flatten)]
        select: Selection,
        #[arg(long, value_enum, default_value_t = Depth::Linear)]
        depth: Depth,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Preparation circuit for one eigenstate as JSON or OpenQASM 3.
    Circuit {
        #[command(flatten)]
        model: Model,
        #[command(flatten)]
        select: Selection,
        #[arg(long, value_enum, default_value_t = Depth::Linear)]
        depth: Depth,
        #[arg(long, value_enum, default_value_t = CircuitFormat::Json)]
        format: CircuitFormat,
        /// Output file; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Runs a JSON circuit from the fiducial input and prints the output state.
    Simulate {
        #[arg(long)]
        circuit: PathBuf,
        /// Also evaluate the model energy of the output (needs --n, --v, --w).
        #[arg(long)]
        report_energy: bool,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long, allow_negative_numbers = true)]
        v: Option<f64>,
        #[arg(long, allow_negative_numbers = true)]
        w: Option<f64>,
        #[arg(long)]
        sector: Option<String>,
        /// Add a shot-based energy estimate with this many shots per group.
        #[arg(long)]
        shots: Option<u64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Variational search for a sector ground state.
    Vqe {
        #[command(flatten)]
        model: Model,
        /// Sector; defaults to the one holding the global ground state.
        #[arg(long)]
        sector: Option<String>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Shots per measurement group; 0 evaluates energies exactly.
        #[arg(long, default_value_t = 0)]
        shots: u64,
        #[arg(long, default_value_t = 10)]
        restarts: usize,
        #[arg(long, value_enum, default_value_t = Start::Cold)]
        start: Start,
        #[arg(long, value_enum, default_value_t = Depth::Linear)]
        depth: Depth,
        /// Objective evaluations per restart.
        #[arg(long, default_value_t = 20_000)]
        max_evals: usize,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Per-sector report of exact energies, preparation fidelities and VQE runs.
    Benchmark {
        #[command(flatten)]
        model: Model,
        /// Shot budgets for sampled VQE runs (repeatable).
        #[arg(long)]
        shots: Vec<u64>,
        #[arg(long, default_value_t = 4)]
        restarts: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        no_vqe: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Fixture and invariant self-checks; exits 1 if any check fails.
    Verify {
        /// Include wall-clock timings in the output.
        #[arg(long)]
        timings: bool,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
}

fn solver(seed: u64, allow_hyperbolic: bool) -> SolverOptions {
    SolverOptions { seed, allow_hyperbolic, ..Default::default() }
}

fn sector_or_all(n: usize, sector: Option<&str>) -> Result<Vec<SectorConfig>, Failure> {
    match sector {
        Some(s) => Ok(vec![parse_sector(n, s)?]),
        None => Ok(sector_configs(n)),
    }
}

#[derive(Serialize)]
struct SpectrumRow {
    index: usize,
    sector: String,
    sector_index: usize,
    omega_exact: f64,
    omega_bethe: Option<f64>,
}

#[derive(Serialize)]
struct SpectrumReport {
    params: ModelParams,
    states: Vec<SpectrumRow>,
    bethe_error: Option<String>,
}

fn cmd_spectrum(model: Model, allow_hyperbolic: bool, format: Format) -> CmdResult {
    let p = model.params()?;
    let mut rows = Vec::new();
    let mut bethe_error = None;
    for c in sector_configs(p.n()) {
        let exact = sector_spectrum(&p, c)?;
        let bethe = match solve_bethe(&c, &p, &solver(0, allow_hyperbolic)) {
            Ok(s) => Some(s),
            Err(e) => {
                bethe_error.get_or_insert_with(|| e.to_string());
                None
            }
        };
        for (j, e) in exact.iter().enumerate() {
            rows.push(SpectrumRow {
                index: 0,
                sector: c.to_string(),
                sector_index: j + 1,
                omega_exact: e.omega,
                omega_bethe: bethe.as_ref().and_then(|s| s.get(j)).map(|s| s.omega),
            });
        }
    }
    rows.sort_by(|a, b| a.omega_exact.total_cmp(&b.omega_exact));
    for (i, r) in rows.iter_mut().enumerate() {
        r.index = i + 1;
    }
    let report = SpectrumReport { params: p, states: rows, bethe_error };
    emit_table(format, &report, &report.states)
}

#[derive(Serialize)]
struct BetheRow {
    sector: String,
    index: usize,
    omega: f64,
    residual_norm: f64,
    pairons: String,
}

fn cmd_bethe(model: Model, sector: Option<&str>, seed: u64, allow_hyperbolic: bool, format: Format) -> CmdResult {
    let p = model.params()?;
    let mut sols: Vec<SpectralSolution> = Vec::new();
    for c in sector_or_all(p.n(), sector)? {
        sols.extend(solve_bethe(&c, &p, &solver(seed, allow_hyperbolic))?);
    }
    let rows: Vec<BetheRow> = sols
        .iter()
        .map(|s| BetheRow {
            sector: s.config.to_string(),
            index: s.index,
            omega: s.omega,
            residual_norm: s.residual_norm,
            pairons: s.energies.iter().map(|e| e.to_string()).collect::<Vec<_>>().join(";"),
        })
        .collect();
    emit_table(format, &serde_json::json!({ "params": p, "solutions": sols }), &rows)
}

struct Chosen {
    config: SectorConfig,
    sector_index: usize,
    omega: f64,
    state: FockVector,
}

/// Eigenstates of the requested sectors ordered by energy, then picks `index`.
fn choose_state(p: &ModelParams, sel: &Selection) -> Result<Chosen, Failure> {
    let mut all = Vec::new();
    for c in sector_or_all(p.n(), sel.sector.as_deref())? {
        match sel.method {
            Method::Exact => {
                for (j, e) in sector_spectrum(p, c)?.into_iter().enumerate() {
                    all.push(Chosen { config: c, sector_index: j + 1, omega: e.omega, state: e.state });
                }
            }
            Method::Bethe => {
                for s in solve_bethe(&c, p, &solver(0, sel.allow_hyperbolic))? {
                    all.push(Chosen { config: c, sector_index: s.index, omega: s.omega, state: build_eigenstate(&s)? });
                }
            }
        }
    }
    all.sort_by(|a, b| a.omega.total_cmp(&b.omega));
    let count = all.len();
    if sel.index == 0 || sel.index > count {
        return Err(Failure::usage(format!("index {} is outside 1..={count}", sel.index)));
    }
    Ok(all.swap_remove(sel.index - 1))
}

#[derive(Serialize)]
struct AmplitudeRow {
    n_a: usize,
    n_b: usize,
    amplitude: f64,
}

fn cmd_state(model: Model, sel: &Selection, format: Format) -> CmdResult {
    let p = model.params()?;
    let ch = choose_state(&p, sel)?;
    let rows: Vec<AmplitudeRow> = ch
        .state
        .amps()
        .iter()
        .enumerate()
        .map(|(k, &a)| {
            let (n_a, n_b) = ch.state.occupations(k);
            AmplitudeRow { n_a, n_b, amplitude: a }
        })
        .collect();
    let full = serde_json::json!({
        "params": p,
        "sector": ch.config,
        "sector_index": ch.sector_index,
        "omega": ch.omega,
        "amplitudes": rows,
    });
    emit_table(format, &full, &rows)
}

#[derive(Serialize)]
struct AngleRow {
    step: usize,
    theta: f64,
}

fn cmd_angles(model: Model, sel: &Selection, depth: Depth, format: Format) -> CmdResult {
    let p = model.params()?;
    let ch = choose_state(&p, sel)?;
    let a = angles(&encode(&ch.state, &ch.config)?, depth.into())?;
    let rows: Vec<AngleRow> = a.thetas.iter().enumerate().map(|(i, &t)| AngleRow { step: i + 1, theta: t }).collect();
    let full = serde_json::json!({
        "params": p,
        "sector": ch.config,
        "sector_index": ch.sector_index,
        "omega": ch.omega,
        "depth": a.mode,
        "thetas": a.thetas,
    });
    emit_table(format, &full, &rows)
}

fn cmd_circuit(model: Model, sel: &Selection, depth: Depth, format: CircuitFormat, out: Option<&std::path::Path>) -> CmdResult {
    let p = model.params()?;
    let ch = choose_state(&p, sel)?;
    let circ = build_circuit(&angles(&encode(&ch.state, &ch.config)?, depth.into())?);
    let fmt = match format {
        CircuitFormat::Json => ExportFormat::Json,
        CircuitFormat::Qasm => ExportFormat::Qasm,
    };
    let mut text = export_circuit(&circ, fmt)?;
    if !text.ends_with('\n') {
        text.push('\n');
    }
    emit(&text, out)
}

#[derive(Serialize)]
struct BasisRow {
    basis: String,
    index: u128,
    re: f64,
    im: f64,
}

#[derive(Serialize)]
struct EnergyReport {
    sector: SectorConfig,
    exact: f64,
    sampled: Option<f64>,
    stderr: Option<f64>,
    shots: Option<u64>,
}

/// Sector implied by `n` particles on `qubits` qubits, when unambiguous.
fn infer_sector(n: usize, qubits: usize) -> Result<SectorConfig, Failure> {
    let m = qubits - 1;
    let rest = n.checked_sub(2 * m).ok_or_else(|| Failure::usage(format!("{qubits} qubits need more than {n} particles")))?;
    match rest {
        0 => Ok(SectorConfig::new(m, 0, 0)?),
        2 => Ok(SectorConfig::new(m, 1, 1)?),
        1 => Err(Failure::usage("odd N leaves the sector ambiguous; pass --sector")),
        _ => Err(Failure::usage(format!("{qubits} qubits cannot hold a sector of {n} particles"))),
    }
}

#[allow(clippy::too_many_arguments)]
fn cmd_simulate(
    path: &std::path::Path,
    report_energy: bool,
    n: Option<usize>,
    v: Option<f64>,
    w: Option<f64>,
    sector: Option<&str>,
    shots: Option<u64>,
    seed: u64,
    format: Format,
) -> CmdResult {
    let text = std::fs::read_to_string(path).map_err(Failure::io)?;
    if text.trim_start().starts_with("OPENQASM") {
        return Err(Failure::usage("simulate reads circuits in JSON form"));
    }
    let circ = import_circuit(&text)?;
    let psi = run(&circ, None, Exec::default())?;
    let width = circ.num_qubits;
    let rows: Vec<BasisRow> = psi
        .entries()
        .into_iter()
        .map(|(k, a)| BasisRow { basis: format!("{k:0width$b}"), index: k, re: a.re, im: a.im })
        .collect();
    let energy = if report_energy {
        let (Some(n), Some(v), Some(w)) = (n, v, w) else {
            return Err(Failure::usage("--report-energy needs --n, --v and --w"));
        };
        let p = make_params(n, v, w)?;
        let c = match sector {
            Some(s) => parse_sector(n, s)?,
            None => infer_sector(n, width)?,
        };
        let exact = encoded_expectation(&psi, &c, &p)?;
        let (sampled, stderr) = match shots {
            Some(s) => {
                let (e, err) = sampled_expectation(&psi, &pauli_groups(&c, &p)?, s, seed)?;
                (Some(e), Some(err))
            }
            None => (None, None),
        };
        Some(EnergyReport { sector: c, exact, sampled, stderr, shots })
    } else {
        None
    };
    let full = serde_json::json!({
        "num_qubits": width,
        "norm": psi.norm_sqr().sqrt(),
        "leakage": psi.leakage(),
        "amplitudes": rows,
        "energy": energy,
    });
    emit_table(format, &full, &rows)
}

#[allow(clippy::too_many_arguments)]
fn cmd_vqe(
    model: Model,
    sector: Option<&str>,
    seed: u64,
    shots: u64,
    restarts: usize,
    start: Start,
    depth: Depth,
    max_evals: usize,
    format: Format,
) -> CmdResult {
    let p = model.params()?;
    let c = match sector {
        Some(s) => parse_sector(p.n(), s)?,
        None => exact_spectrum(&p)[0].state.config(),
    };
    let opts = VqeOptions {
        restarts,
        seed,
        estimator: if shots == 0 { Estimator::Exact } else { Estimator::Sampled { shots } },
        start: match start {
            Start::Warm => StartMode::Warm,
            Start::Cold => StartMode::Cold,
        },
        mode: depth.into(),
        max_evals,
        ..Default::default()
    };
    let r = optimize(&c, &p, &opts)?;
    #[derive(Serialize)]
    struct Row {
        sector: String,
        best_energy: f64,
        stderr: f64,
        exact_energy: f64,
        abs_error: f64,
        evaluations: usize,
        converged: bool,
        thetas: String,
    }
    let row = Row {
        sector: c.to_string(),
        best_energy: r.best_energy,
        stderr: r.stderr,
        exact_energy: r.exact_energy,
        abs_error: r.abs_error,
        evaluations: r.evaluations,
        converged: r.converged,
        thetas: r.best_thetas.thetas.iter().map(|t| t.to_string()).collect::<Vec<_>>().join(";"),
    };
    emit_table(format, &serde_json::json!({ "params": p, "result": r }), &[row])
}

fn cmd_benchmark(model: Model, shots: Vec<u64>, restarts: usize, seed: u64, no_vqe: bool, out: Option<&std::path::Path>) -> CmdResult {
    let p = model.params()?;
    let opts = BenchmarkOptions { run_vqe: !no_vqe, shot_budgets: shots, restarts, seed, ..Default::default() };
    let report = benchmark(&p, &opts)?;
    emit(&json_string(&report)?, out)
}

fn cmd_verify(timings: bool, format: Format) -> CmdResult {
    let mut checks = acceptance_checks(Exec::default());
    checks.extend(invariant_checks(checks.len() + 1));
    #[derive(Serialize)]
    struct Row<'a> {
        id: usize,
        name: &'a str,
        passed: bool,
        detail: &'a str,
        #[serde(skip_serializing_if = "Option::is_none")]
        seconds: Option<f64>,
    }
    let rows: Vec<Row> = checks
        .iter()
        .map(|c| Row {
            id: c.id,
            name: &c.name,
            passed: c.passed,
            detail: &c.detail,
            seconds: timings.then_some(c.seconds),
        })
        .collect();
    let failed = checks.iter().filter(|c| !c.passed).count();
    let full = serde_json::json!({ "checks": rows, "passed": checks.len() - failed, "failed": failed });
    emit_table(format, &full, &rows)?;
    if failed > 0 {
        return Err(Failure { code: 1, kind: "verification-failed".into(), message: format!("{failed} checks failed") });
    }
    Ok(())
}

fn configure_threads() -> CmdResult {
    let Ok(raw) = std::env::var("LMG_THREADS") else {
        return Ok(());
    };
    let threads: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&t| t > 0)
        .ok_or_else(|| Failure::usage(format!("LMG_THREADS must be a positive integer, got '{raw}'")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| Failure { code: 1, kind: "thread-pool".into(), message: e.to_string() })
}

fn dispatch(cli: Cli) -> CmdResult {
    configure_threads()?;
    match cli.command {
        Command::Spectrum { model, allow_hyperbolic, format } => cmd_spectrum(model, allow_hyperbolic, format),
        Command::Bethe { model, sector, seed, allow_hyperbolic, format } => {
            cmd_bethe(model, sector.as_deref(), seed, allow_hyperbolic, format)
        }
        Command::State { model, select, format } => cmd_state(model, &select, format),
        Command::Angles { model, select, depth, format } => cmd_angles(model, &select, depth, format),
        Command::Circuit { model, select, depth, format, out } => cmd_circuit(model, &select, depth, format, out.as_deref()),
        Command::Simulate { circuit, report_energy, n, v, w, sector, shots, seed, format } => {
            cmd_simulate(&circuit, report_energy, n, v, w, sector.as_deref(), shots, seed, format)
        }
        Command::Vqe { model, sector, seed, shots, restarts, start, depth, max_evals, format } => {
            cmd_vqe(model, sector.as_deref(), seed, shots, restarts, start, depth, max_evals, format)
        }
        Command::Benchmark { model, shots, restarts, seed, no_vqe, out } => {
            cmd_benchmark(model, shots, restarts, seed, no_vqe, out.as_deref())
        }
        Command::Verify { timings, format } => cmd_verify(timings, format),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            f.report();
            ExitCode::from(f.code)
        }
    }
}
