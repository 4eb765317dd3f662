//! `fwlp solve` command line driver.
//!
//! Exit codes: 0 when the tolerance was reached, 2 when the iteration budget
//! ran out first, 1 on usage or input errors.

use std::ffi::OsString;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::driver::{Algorithm, RunStatus, Solver};
use crate::io::generate::generate_instance;
use crate::io::mps::parse_mps;
use crate::io::standard_form::to_standard_form;
use crate::io::trace::{TraceRow, TraceWriter};
use crate::lp_model::{SolverParams, StandardFormLp};

pub const EXIT_CONVERGED: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_BUDGET: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "fwlp", version, about = "Primal-dual Frank-Wolfe LP solvers")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run FWLP or FWLP-P on an MPS file or a generated instance.
    Solve(SolveArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum AlgoArg {
    Fwlp,
    #[value(name = "fwlp-p")]
    FwlpP,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Switch {
    On,
    Off,
}

/// `seed,m,n,density` for the instance generator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GenerateSpec {
    pub seed: u64,
    pub m: usize,
    pub n: usize,
    pub density: f64,
}

impl FromStr for GenerateSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts: Vec<&str> = s.split(',').map(str::trim).collect();
        let [seed, m, n, density] = parts[..] else {
            return Err(format!("expected seed,m,n,density, got {s:?}"));
        };
        let bad = |what: &str, v: &str| format!("invalid {what} {v:?}");
        Ok(Self {
            seed: seed.parse().map_err(|_| bad("seed", seed))?,
            m: m.parse().map_err(|_| bad("m", m))?,
            n: n.parse().map_err(|_| bad("n", n))?,
            density: density.parse().map_err(|_| bad("density", density))?,
        })
    }
}

#[derive(Debug, Args)]
struct SolveArgs {
    #[arg(long, value_enum)]
    algo: AlgoArg,
    /// MPS file to solve.
    #[arg(long, value_name = "FILE.mps", required_unless_present = "generate", conflicts_with = "generate")]
    input: Option<PathBuf>,
    /// Generate an instance with a known optimizer.
    #[arg(long, value_name = "seed,m,n,density")]
    generate: Option<GenerateSpec>,
    /// Primal radius; defaults to 2‖x*‖₁ for generated instances.
    #[arg(long)]
    xi: Option<f64>,
    /// Dual radius; defaults to 2‖y*‖∞ for generated instances.
    #[arg(long)]
    eta: Option<f64>,
    #[arg(long, default_value_t = 10_000)]
    max_iters: usize,
    #[arg(long, value_enum, default_value = "off")]
    screening: Switch,
    /// CSV file receiving one row per traced iteration.
    #[arg(long, value_name = "OUT.csv")]
    trace: Option<PathBuf>,
    #[arg(long, default_value_t = 1)]
    trace_every: usize,
    /// Stop once primal infeasibility, dual infeasibility and |gap| are all below this (0 disables).
    #[arg(long, default_value_t = 1e-4)]
    tol: f64,
}

struct Loaded {
    problem: StandardFormLp<f64>,
    xi: f64,
    eta: f64,
    objective_offset: f64,
}

fn load(args: &SolveArgs) -> Result<Loaded, String> {
    if let Some(path) = &args.input {
        let (Some(xi), Some(eta)) = (args.xi, args.eta) else {
            return Err("--input needs explicit --xi and --eta (no known optimizer to size them from)".into());
        };
        let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
        let lp = parse_mps(&text).map_err(|e| format!("{}: {e}", path.display()))?;
        let (problem, map) = to_standard_form(&lp).map_err(|e| e.to_string())?;
        return Ok(Loaded { problem, xi, eta, objective_offset: map.objective_offset });
    }
    let g = args.generate.expect("clap enforces --input or --generate");
    let inst = generate_instance(g.seed, g.m, g.n, g.density, 1.0).map_err(|e| e.to_string())?;
    Ok(Loaded {
        xi: args.xi.unwrap_or(inst.xi_min),
        eta: args.eta.unwrap_or(inst.eta_min),
        problem: inst.problem,
        objective_offset: 0.0,
    })
}

fn solve(args: SolveArgs, out: &mut dyn Write) -> Result<RunStatus, String> {
    let loaded = load(&args)?;
    let params = SolverParams::new(loaded.xi, loaded.eta)
        .with_max_iters(args.max_iters)
        .with_screening(matches!(args.screening, Switch::On))
        .with_trace_every(args.trace_every)
        .with_tol(args.tol);
    let algorithm = match args.algo {
        AlgoArg::Fwlp => Algorithm::Fwlp,
        AlgoArg::FwlpP => Algorithm::FwlpP,
    };
    let mut solver = Solver::from_zero(&loaded.problem, params, algorithm).map_err(|e| e.to_string())?;

    let mut writer = match &args.trace {
        Some(path) => {
            let f = File::create(path).map_err(|e| format!("{}: {e}", path.display()))?;
            Some(TraceWriter::new(BufWriter::new(f)))
        }
        None => None,
    };
    let mut write_err = None;
    let mut last = None;
    let status = solver.run(|_, rec, ns| {
        let row = TraceRow::from_record(rec, ns);
        if let Some(w) = writer.as_mut() {
            if write_err.is_none() {
                write_err = w.write(&row).err();
            }
        }
        last = Some(row);
    });
    if let Some(e) = write_err {
        return Err(format!("writing trace: {e}"));
    }
    if let Some(w) = writer {
        w.finish()
            .and_then(|mut b| b.flush().map_err(Into::into))
            .map_err(|e| format!("writing trace: {e}"))?;
    }

    let last = last.expect("the final iterate is always traced");
    let state = solver.state();
    let fmt_opt = |v: Option<f64>| v.map_or_else(|| "n/a".to_string(), |v| format!("{v:.6e}"));
    let lines = [
        format!("algorithm:        {}", algorithm.name()),
        format!(
            "status:           {}",
            match status {
                RunStatus::Converged => "converged",
                RunStatus::BudgetExhausted => "iteration budget exhausted",
            }
        ),
        format!("iterations:       {}", state.k() - 1),
        format!("primal_infeas:    {:.6e}", last.primal_infeas),
        format!("dual_infeas:      {:.6e}", last.dual_infeas),
        format!("gap:              {:.6e}", last.gap),
        format!("U:                {}", fmt_opt(last.potential)),
        format!("M:                {:.6e}", last.saddle_gap),
        format!("objective:        {:.10e}", state.cx_cache() + loaded.objective_offset),
        format!("column_touches:   {}", last.touch_count),
    ];
    for l in lines {
        writeln!(out, "{l}").map_err(|e| e.to_string())?;
    }
    Ok(status)
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, S>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_ERROR } else { EXIT_CONVERGED };
            let rendered = e.render().to_string();
            let _ = if e.use_stderr() { err.write_all(rendered.as_bytes()) } else { out.write_all(rendered.as_bytes()) };
            return code;
        }
    };
    let Command::Solve(args) = cli.command;
    match solve(args, out) {
        Ok(RunStatus::Converged) => EXIT_CONVERGED,
        Ok(RunStatus::BudgetExhausted) => EXIT_BUDGET,
        Err(msg) => {
            let _ = writeln!(err, "error: {msg}");
            EXIT_ERROR
        }
    }
}
