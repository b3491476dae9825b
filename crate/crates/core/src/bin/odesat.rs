use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use odesat::formula::parse_rational;
use odesat::frontend::{emit_trace, encode_bmc, parse, parse_hybrid};
use odesat::solver::{dpll_solve, Problem, Verdict};

#[derive(Parser)]
#[command(name = "odesat", version, about = "delta-complete solving of formulas with ODE constraints")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Solve a problem file.
    Solve {
        file: PathBuf,
        #[command(flatten)]
        opts: Opts,
    },
    /// Unroll a hybrid automaton and look for a path into its unsafe set.
    Bmc {
        file: PathBuf,
        #[arg(long)]
        depth: usize,
        #[command(flatten)]
        opts: Opts,
    },
}

#[derive(Args)]
struct Opts {
    /// Precision; overrides the file's `(delta ...)`. Default 0.001.
    #[arg(long)]
    delta: Option<String>,
    /// ODE slice width.
    #[arg(long)]
    eps: Option<f64>,
    /// Pruning fixpoint tolerance.
    #[arg(long)]
    tol: Option<f64>,
    /// Write the witness trajectory as CSV.
    #[arg(long)]
    trace: Option<PathBuf>,
    /// Print solver statistics as one key=value line.
    #[arg(long)]
    stats: bool,
    /// Give up after this many seconds.
    #[arg(long)]
    timeout: Option<f64>,
}

fn fail(msg: impl std::fmt::Display) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(2)
}

fn run(mut p: Problem, opts: &Opts) -> ExitCode {
    if let Some(d) = &opts.delta {
        match parse_rational(d) {
            Some(q) if q > num_rational::BigRational::from_integer(0.into()) => p.delta = q,
            _ => return fail(format!("invalid --delta `{d}`")),
        }
    }
    for (name, v) in [("--eps", opts.eps), ("--tol", opts.tol)] {
        if v.is_some_and(|v| !(v > 0.0 && v.is_finite())) {
            return fail(format!("{name} must be positive"));
        }
    }
    p.config.eps = opts.eps;
    p.config.tol = opts.tol;
    p.config.trace = opts.trace.is_some();
    p.config.time_limit = opts.timeout.map(std::time::Duration::from_secs_f64);

    let r = dpll_solve(&p);
    println!("{}", r.verdict);
    if let Some(w) = &r.witness {
        print!("{w}");
    }
    if let Some(note) = &r.note {
        eprintln!("note: {note}");
    }
    if opts.stats {
        println!("{}", r.stats);
    }
    if let Some(path) = &opts.trace {
        if r.is_delta_sat() {
            if let Err(e) = emit_trace(&r, &p, path) {
                return fail(e);
            }
        } else {
            eprintln!("no trace: verdict is not delta-sat");
        }
    }
    match r.verdict {
        Verdict::DeltaSat => ExitCode::SUCCESS,
        Verdict::Unsat => ExitCode::from(1),
        Verdict::Unknown => ExitCode::from(2),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(2),
            };
        }
    };
    let (path, opts) = match &cli.cmd {
        Cmd::Solve { file, opts } | Cmd::Bmc { file, opts, .. } => (file, opts),
    };
    let text = match std::fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) => return fail(format!("{}: {e}", path.display())),
    };
    let problem = match &cli.cmd {
        Cmd::Solve { .. } => parse(&text).map_err(|e| format!("{}:{e}", path.display())),
        Cmd::Bmc { depth, .. } => parse_hybrid(&text)
            .map_err(|e| format!("{}:{e}", path.display()))
            .and_then(|h| encode_bmc(&h, *depth).map_err(|e| e.to_string())),
    };
    match problem {
        Ok(p) => run(p, opts),
        Err(e) => fail(e),
    }
}
