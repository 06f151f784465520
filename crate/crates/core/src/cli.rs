//! Command-line front end.
//!
//! Every solve emits one JSON object per line; sweeps can also write a CSV
//! table. Exit codes: 0 success, 1 configuration error, 2 solver failure,
//! 3 certificate failure.

use std::fs::File;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::Serialize;

use crate::certificates::{
    build_cpwp_certificate, build_cspo_certificate, no_go_verdict, verify_cpwp_certificate,
    verify_cspo_certificate, VerificationReport,
};
use crate::error::{Error, Result};
use crate::matops::HermitianOperator;
use crate::phase_space::{wigner_of_state, PhasePoint, PhasePointBasis};
use crate::purification::{
    assemble_qr, baseline_fidelity, fig2_ensembles, Ensemble, OperationClass, PurificationInstance,
};
use crate::sdp::build::{build_program, solve_fidelity_with, BuildOptions, FidelityOptions};
use crate::sdp::solver::{SolveStatus, SolverOptions};
use crate::stabilizer::{enumerate_stabilizer_states, robustness_of_state, stabilizer_set_cached};

/// Environment variable overriding the worker count.
pub const THREADS_ENV: &str = "PURIFY_THREADS";

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 1;
pub const EXIT_SOLVER: i32 = 2;
pub const EXIT_CERTIFICATE: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "magic-purify", version, about = "Purification fidelities under free operations")]
pub struct Cli {
    /// Worker threads (default: PURIFY_THREADS or the CPU count).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Haar-universal fidelity over a (δ, p) grid.
    Universal(UniversalArgs),
    /// Fidelity for a fixed ensemble, optionally against CPTN.
    Ensemble(EnsembleArgs),
    /// Verify the analytic dual certificates on a δ grid.
    Certify(CertifyArgs),
    /// Solve a Haar-universal grid and compare every cell with λ0.
    NoGo(NoGoArgs),
    /// Robustness of magic of the uniform mixture of the states in a file.
    Robustness(RobustnessArgs),
    /// Enumerate pure stabilizer states.
    EnumerateStab(EnumerateArgs),
    /// Discrete Wigner function of the uniform mixture of the states in a file.
    Wigner(WignerArgs),
    /// Write the conic program of one instance in the CONIC v1 text format.
    Dump(DumpArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ClassArg {
    Cptn,
    Cpwp,
    Cspo,
}

impl From<ClassArg> for OperationClass {
    fn from(c: ClassArg) -> Self {
        match c {
            ClassArg::Cptn => OperationClass::Cptn,
            ClassArg::Cpwp => OperationClass::Cpwp,
            ClassArg::Cspo => OperationClass::Cspo,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct GridArgs {
    /// Single noise value; overrides --delta-grid.
    #[arg(long)]
    pub delta: Option<f64>,
    /// `start:stop:count`, endpoints included.
    #[arg(long, default_value = "0:0.99:21")]
    pub delta_grid: String,
    /// Success probabilities, comma separated.
    #[arg(long, default_value = "1.0", value_delimiter = ',')]
    pub p: Vec<f64>,
}

#[derive(Debug, Clone, Args)]
pub struct SolveArgs {
    /// Relative duality-gap tolerance.
    #[arg(long, default_value_t = 1e-8)]
    pub tol: f64,
    /// Allow the 4-qubit stabilizer set (CSPO with three copies).
    #[arg(long)]
    pub extended: bool,
    /// JSON-lines output file instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Also write a CSV table.
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct UniversalArgs {
    #[arg(long)]
    pub d: usize,
    #[arg(long, default_value_t = 2)]
    pub copies: usize,
    #[arg(long, value_enum)]
    pub class: ClassArg,
    #[command(flatten)]
    pub grid: GridArgs,
    #[command(flatten)]
    pub solve: SolveArgs,
}

#[derive(Debug, Args)]
pub struct EnsembleArgs {
    /// `fig2-qubit`, `fig2-qutrit`, `haar:<d>` or a path to an ensemble file.
    #[arg(long)]
    pub ensemble: String,
    #[arg(long, default_value_t = 2)]
    pub copies: usize,
    #[arg(long, value_enum)]
    pub class: ClassArg,
    /// Also solve every grid point under CPTN.
    #[arg(long)]
    pub compare: bool,
    #[command(flatten)]
    pub grid: GridArgs,
    #[command(flatten)]
    pub solve: SolveArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Theorem {
    Cpwp,
    Cspo,
}

#[derive(Debug, Args)]
pub struct CertifyArgs {
    #[arg(long, value_enum)]
    pub theorem: Theorem,
    /// Odd prime dimension for the CPWP certificate (default 3).
    #[arg(long)]
    pub d: Option<usize>,
    /// Number of δ values evenly spaced on [0, 1].
    #[arg(long, default_value_t = 21)]
    pub grid: usize,
    /// Print only failing checks and the summary.
    #[arg(long)]
    pub quiet: bool,
}

#[derive(Debug, Args)]
pub struct NoGoArgs {
    #[arg(long)]
    pub d: usize,
    #[arg(long, default_value_t = 2)]
    pub copies: usize,
    #[arg(long, value_enum)]
    pub class: ClassArg,
    #[arg(long, default_value = "0.1:0.9:9")]
    pub delta_grid: String,
    #[arg(long, default_value = "0.1,0.5,1.0", value_delimiter = ',')]
    pub p: Vec<f64>,
    #[arg(long, default_value_t = 1e-8)]
    pub tol: f64,
    #[arg(long)]
    pub extended: bool,
}

#[derive(Debug, Args)]
pub struct RobustnessArgs {
    #[arg(long)]
    pub state: PathBuf,
    #[arg(long)]
    pub extended: bool,
}

#[derive(Debug, Args)]
pub struct EnumerateArgs {
    #[arg(long)]
    pub qubits: usize,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub extended: bool,
}

#[derive(Debug, Args)]
pub struct WignerArgs {
    #[arg(long)]
    pub state: PathBuf,
    #[arg(long)]
    pub d: usize,
}

#[derive(Debug, Args)]
pub struct DumpArgs {
    #[arg(long)]
    pub d: usize,
    #[arg(long, default_value_t = 2)]
    pub copies: usize,
    #[arg(long, value_enum)]
    pub class: ClassArg,
    #[arg(long)]
    pub delta: f64,
    #[arg(long, default_value_t = 1.0)]
    pub p: f64,
    /// Keep every Wigner row and a complex Choi block.
    #[arg(long)]
    pub full: bool,
    #[arg(long)]
    pub extended: bool,
    #[arg(long)]
    pub out: PathBuf,
}

/// One solved instance.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResultRecord {
    pub d: usize,
    pub n: usize,
    pub delta: f64,
    pub p: f64,
    pub class: OperationClass,
    pub ensemble: String,
    pub fidelity: f64,
    pub baseline: f64,
    pub gap_to_baseline: f64,
    pub solver_gap: f64,
    pub status: SolveStatus,
    pub iterations: usize,
    pub seconds: f64,
}

/// Parses `start:stop:count` into `count` evenly spaced values.
pub fn parse_grid(text: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = text.split(':').collect();
    let bad = || Error::Invalid(format!("grid {text:?} is not start:stop:count"));
    if parts.len() != 3 {
        return Err(bad());
    }
    let start: f64 = parts[0].trim().parse().map_err(|_| bad())?;
    let stop: f64 = parts[1].trim().parse().map_err(|_| bad())?;
    let count: usize = parts[2].trim().parse().map_err(|_| bad())?;
    match count {
        0 => Err(bad()),
        1 => Ok(vec![start]),
        _ => Ok((0..count)
            .map(|k| start + (stop - start) * k as f64 / (count - 1) as f64)
            .collect()),
    }
}

fn deltas(grid: &GridArgs) -> Result<Vec<f64>> {
    match grid.delta {
        Some(d) => Ok(vec![d]),
        None => parse_grid(&grid.delta_grid),
    }
}

/// Resolves a built-in ensemble name or loads a file.
pub fn resolve_ensemble(name: &str) -> Result<(Ensemble, String)> {
    match name {
        "fig2-qubit" => Ok((fig2_ensembles().0, name.into())),
        "fig2-qutrit" => Ok((fig2_ensembles().1, name.into())),
        _ => {
            if let Some(d) = name.strip_prefix("haar:") {
                let d: usize = d
                    .parse()
                    .map_err(|_| Error::Invalid(format!("bad Haar dimension in {name:?}")))?;
                return Ok((Ensemble::haar(d), name.into()));
            }
            Ok((Ensemble::load(Path::new(name))?, name.into()))
        }
    }
}

fn solve_record(inst: &PurificationInstance, label: &str, opts: &FidelityOptions) -> Result<ResultRecord> {
    let sol = solve_fidelity_with(inst, opts)?;
    let baseline = baseline_fidelity(inst);
    Ok(ResultRecord {
        d: inst.d,
        n: inst.n,
        delta: inst.delta,
        p: inst.p,
        class: inst.op_class,
        ensemble: label.to_string(),
        fidelity: sol.fidelity,
        baseline,
        gap_to_baseline: sol.fidelity - baseline,
        solver_gap: sol.report.gap,
        status: sol.report.status,
        iterations: sol.report.iterations,
        seconds: sol.report.seconds,
    })
}

/// Solves every instance in parallel and returns records in input order.
pub fn run_grid(insts: &[(PurificationInstance, String)], opts: &FidelityOptions) -> Result<Vec<ResultRecord>> {
    insts
        .par_iter()
        .map(|(inst, label)| solve_record(inst, label, opts))
        .collect()
}

fn fidelity_options(solve: &SolveArgs) -> Result<FidelityOptions> {
    if solve.tol.is_nan() || solve.tol < 1e-9 {
        return Err(Error::OutOfRange(format!("tolerance {} below 1e-9", solve.tol)));
    }
    Ok(FidelityOptions {
        solver: SolverOptions::with_tol(solve.tol),
        build: BuildOptions {
            extended: solve.extended,
            ..BuildOptions::default()
        },
    })
}

fn open_out(path: &Option<PathBuf>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(io::BufWriter::new(File::create(p)?)),
        None => Box::new(io::stdout().lock()),
    })
}

/// Writes records as JSON lines and optionally as CSV.
pub fn emit_records(records: &[ResultRecord], out: &mut dyn Write, csv_path: Option<&Path>) -> Result<()> {
    for r in records {
        writeln!(out, "{}", serde_json::to_string(r)?)?;
    }
    out.flush()?;
    if let Some(path) = csv_path {
        write_csv(records, path)?;
    }
    Ok(())
}

pub fn write_csv(records: &[ResultRecord], path: &Path) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| Error::Invalid(format!("csv: {e}")))?;
    for r in records {
        w.serialize(r).map_err(|e| Error::Invalid(format!("csv: {e}")))?;
    }
    w.flush()?;
    Ok(())
}

fn finish_records(records: &[ResultRecord], solve: &SolveArgs) -> Result<i32> {
    let mut out = open_out(&solve.out)?;
    emit_records(records, &mut *out, solve.csv.as_deref())?;
    let failed = records.iter().filter(|r| r.status != SolveStatus::Optimal).count();
    if failed > 0 {
        eprintln!("{failed} of {} instances did not reach an optimal status", records.len());
        return Ok(EXIT_SOLVER);
    }
    Ok(EXIT_OK)
}

fn cmd_universal(a: &UniversalArgs) -> Result<i32> {
    let opts = fidelity_options(&a.solve)?;
    let mut insts = Vec::new();
    for delta in deltas(&a.grid)? {
        for &p in &a.grid.p {
            let inst = PurificationInstance::new(a.d, a.copies, delta, p, Ensemble::haar(a.d), a.class.into())?;
            insts.push((inst, format!("haar:{}", a.d)));
        }
    }
    // Catch unsupported configurations before any solve.
    if let Some((first, _)) = insts.first() {
        build_program(first, &assemble_qr(first)?, &opts.build)?;
    }
    finish_records(&run_grid(&insts, &opts)?, &a.solve)
}

fn cmd_ensemble(a: &EnsembleArgs) -> Result<i32> {
    let opts = fidelity_options(&a.solve)?;
    let (ens, label) = resolve_ensemble(&a.ensemble)?;
    let d = ens.d();
    let mut classes = vec![OperationClass::from(a.class)];
    if a.compare && a.class != ClassArg::Cptn {
        classes.push(OperationClass::Cptn);
    }
    let mut insts = Vec::new();
    for delta in deltas(&a.grid)? {
        for &p in &a.grid.p {
            for &c in &classes {
                let inst = PurificationInstance::new(d, a.copies, delta, p, ens.clone(), c)?;
                insts.push((inst, label.clone()));
            }
        }
    }
    finish_records(&run_grid(&insts, &opts)?, &a.solve)
}

/// `grid` evenly spaced δ values on `[0, 1]`.
pub fn certify_grid(grid: usize) -> Result<Vec<f64>> {
    if grid == 0 {
        return Err(Error::OutOfRange("certificate grid needs at least one point".into()));
    }
    parse_grid(&format!("0:1:{grid}"))
}

/// Builds and verifies one certificate per δ.
pub fn certify(theorem: Theorem, d: Option<usize>, grid: usize) -> Result<Vec<VerificationReport>> {
    let deltas = certify_grid(grid)?;
    match theorem {
        Theorem::Cpwp => {
            let d = d.unwrap_or(3);
            build_cpwp_certificate(d, 0.0)?;
            deltas
                .par_iter()
                .map(|&dl| verify_cpwp_certificate(&build_cpwp_certificate(d, dl)?))
                .collect()
        }
        Theorem::Cspo => {
            if let Some(d) = d.filter(|&d| d != 2) {
                return Err(Error::Unsupported(format!("the CSPO certificate is for qubits, got d = {d}")));
            }
            let stab = stabilizer_set_cached(3, false)?;
            deltas
                .par_iter()
                .map(|&dl| verify_cspo_certificate(&build_cspo_certificate(dl)?, &stab))
                .collect()
        }
    }
}

fn cmd_certify(a: &CertifyArgs) -> Result<i32> {
    let reports = certify(a.theorem, a.d, a.grid)?;
    let mut out = io::stdout().lock();
    let mut failures = 0;
    for r in &reports {
        if a.quiet {
            for c in r.failures() {
                writeln!(out, "FAIL {} delta={} {} value={:.6e} threshold={:.1e}", r.label, r.delta, c.name, c.value, c.threshold)?;
            }
        } else {
            write!(out, "{r}")?;
        }
        failures += r.failures().count();
    }
    let checks: usize = reports.iter().map(|r| r.checks.len()).sum();
    writeln!(
        out,
        "{} {checks} checks on {} grid points, {failures} failed",
        if failures == 0 { "PASS" } else { "FAIL" },
        reports.len()
    )?;
    Ok(if failures == 0 { EXIT_OK } else { EXIT_CERTIFICATE })
}

fn cmd_no_go(a: &NoGoArgs) -> Result<i32> {
    let opts = FidelityOptions {
        solver: SolverOptions::with_tol(a.tol),
        build: BuildOptions {
            extended: a.extended,
            ..BuildOptions::default()
        },
    };
    let verdict = no_go_verdict(a.d, a.copies, &parse_grid(&a.delta_grid)?, &a.p, a.class.into(), &opts)?;
    let mut out = io::stdout().lock();
    for c in &verdict.cells {
        writeln!(
            out,
            "{} delta={} p={} fidelity={:.10} baseline={:.10} status={}",
            if c.pass { "PASS" } else { "FAIL" },
            c.delta,
            c.p,
            c.fidelity,
            c.baseline,
            c.status
        )?;
    }
    writeln!(
        out,
        "{}",
        if verdict.confirmed { "no-go confirmed" } else { "no-go not confirmed" }
    )?;
    if verdict.cells.iter().any(|c| c.status != SolveStatus::Optimal) {
        return Ok(EXIT_SOLVER);
    }
    Ok(if verdict.confirmed { EXIT_OK } else { EXIT_CERTIFICATE })
}

/// Uniform mixture of the states in an ensemble file.
pub fn mixture_of(ens: &Ensemble) -> Result<HermitianOperator> {
    match ens {
        Ensemble::Discrete { d, states } => {
            let mut acc = HermitianOperator::zeros(vec![*d]);
            for s in states {
                acc = &acc + &HermitianOperator::from_ket(vec![*d], s)?;
            }
            Ok(acc.scaled(1.0 / states.len() as f64))
        }
        Ensemble::HaarUniversal { d } => Ok(HermitianOperator::identity(vec![*d]).scaled(1.0 / *d as f64)),
    }
}

fn split_sites(rho: &HermitianOperator, d: usize) -> Result<HermitianOperator> {
    let side = rho.side();
    let mut sites = 0;
    let mut acc = 1;
    while acc < side {
        acc *= d;
        sites += 1;
    }
    if acc != side || sites == 0 {
        return Err(Error::DimensionMismatch {
            dims: vec![d],
            side,
        });
    }
    HermitianOperator::new(vec![d; sites], rho.matrix().clone())
}

fn cmd_robustness(a: &RobustnessArgs) -> Result<i32> {
    let rho = split_sites(&mixture_of(&Ensemble::load(&a.state)?)?, 2)?;
    let n = rho.dims().len();
    let set = stabilizer_set_cached(n, a.extended)?;
    let r = robustness_of_state(&rho, &set)?;
    println!("{}", serde_json::json!({ "qubits": n, "robustness": r.value, "status": r.report.status }));
    Ok(EXIT_OK)
}

fn cmd_enumerate(a: &EnumerateArgs) -> Result<i32> {
    let set = enumerate_stabilizer_states(a.qubits, a.extended)?;
    std::fs::write(&a.out, set.dump())?;
    println!("{}", serde_json::json!({ "qubits": a.qubits, "states": set.len(), "out": a.out }));
    Ok(EXIT_OK)
}

fn cmd_wigner(a: &WignerArgs) -> Result<i32> {
    let rho = split_sites(&mixture_of(&Ensemble::load(&a.state)?)?, a.d)?;
    let basis = PhasePointBasis::new(a.d, rho.dims().len())?;
    let w = wigner_of_state(&rho, &basis)?;
    let mut out = io::stdout().lock();
    for (i, v) in w.values.iter().enumerate() {
        let u = PhasePoint::from_index(a.d, w.sites, i);
        let coords: Vec<String> = u.components().iter().map(|(a1, a2)| format!("{a1} {a2}")).collect();
        writeln!(out, "{} {v:.15e}", coords.join(" "))?;
    }
    Ok(EXIT_OK)
}

fn cmd_dump(a: &DumpArgs) -> Result<i32> {
    let inst = PurificationInstance::new(a.d, a.copies, a.delta, a.p, Ensemble::haar(a.d), a.class.into())?;
    let qr = assemble_qr(&inst)?;
    let opts = if a.full {
        BuildOptions::full()
    } else {
        BuildOptions {
            extended: a.extended,
            ..BuildOptions::default()
        }
    };
    let program = build_program(&inst, &qr, &opts)?;
    std::fs::write(&a.out, program.problem.dump())?;
    Ok(EXIT_OK)
}

fn configure_threads(flag: Option<usize>) -> Result<()> {
    let from_env = std::env::var(THREADS_ENV).ok().map(|v| {
        v.parse::<usize>()
            .map_err(|_| Error::Invalid(format!("{THREADS_ENV}={v:?} is not a thread count")))
    });
    let threads = match (flag, from_env) {
        (Some(t), _) => Some(t),
        (None, Some(t)) => Some(t?),
        (None, None) => None,
    };
    if let Some(t) = threads {
        // A second call in the same process keeps the first pool.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(t.max(1)).build_global();
    }
    Ok(())
}

fn exit_code_for(err: &Error) -> i32 {
    match err {
        Error::Solver(_) => EXIT_SOLVER,
        _ => EXIT_CONFIG,
    }
}

/// Runs a parsed command and returns the process exit code.
pub fn execute(cli: &Cli) -> i32 {
    let run = || -> Result<i32> {
        configure_threads(cli.threads)?;
        match &cli.command {
            Command::Universal(a) => cmd_universal(a),
            Command::Ensemble(a) => cmd_ensemble(a),
            Command::Certify(a) => cmd_certify(a),
            Command::NoGo(a) => cmd_no_go(a),
            Command::Robustness(a) => cmd_robustness(a),
            Command::EnumerateStab(a) => cmd_enumerate(a),
            Command::Wigner(a) => cmd_wigner(a),
            Command::Dump(a) => cmd_dump(a),
        }
    };
    match run() {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code_for(&e)
        }
    }
}

/// Parses arguments and runs; usage errors map to exit code 1.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => execute(&cli),
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
            let _ = e.print();
            code
        }
    }
}
