//! fracrbf: evaluate fractional operators of RBF kernels, cross-check them
//! against quadrature, and run the two model problems.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use fracrbf::Error;

#[derive(Parser, Debug)]
#[command(name = "fracrbf", version, about = "Fractional calculus of radial basis functions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Closed-form value at --x, or CSV `x,value` over --grid.
    Eval(Flags),
    /// Closed form against the quadrature oracle.
    OracleCheck(Flags),
    /// Solve the fractional ODE from a JSON problem file; CSV `t,u`.
    SolveOde(Flags),
    /// Solve the Riesz PDE from a JSON problem file; CSV `x,t,u`.
    SolvePde(Flags),
    /// Oracle check over a grid; CSV `x,value,oracle,abs_err,rel_err`.
    Sweep(Flags),
}

#[derive(Args, Debug, Default)]
pub struct Flags {
    #[arg(long)]
    op: Option<String>,
    #[arg(long, allow_negative_numbers = true)]
    alpha: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    a: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    b: Option<f64>,
    #[arg(long)]
    family: Option<String>,
    #[arg(long, allow_negative_numbers = true)]
    param: Option<f64>,
    #[arg(long)]
    scale: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    center: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    x: Option<f64>,
    /// start:stop:count
    #[arg(long, allow_hyphen_values = true)]
    grid: Option<String>,
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    rel_tol: Option<f64>,
    #[arg(long)]
    max_terms: Option<usize>,
    #[arg(long)]
    quad_tol: Option<f64>,
}

/// Message plus process exit code.
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub msg: String,
}

impl Failure {
    pub fn config(msg: impl Into<String>) -> Self {
        Failure { code: 2, msg: msg.into() }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Parameter(_) | Error::Arity { .. } => 2,
            Error::Convergence(_) | Error::NonConvergence(_) | Error::Quadrature(_) => 3,
            Error::StepSizeUnderflow { .. } => 5,
            _ => 4,
        };
        Failure { code, msg: e.to_string() }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::config(format!("--out: {e}"))
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let r = match cli.command {
        Command::Eval(f) => commands::eval(f),
        Command::OracleCheck(f) => commands::oracle_check(f),
        Command::SolveOde(f) => commands::solve_ode(f),
        Command::SolvePde(f) => commands::solve_pde(f),
        Command::Sweep(f) => commands::sweep(f),
    };
    match r {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.msg);
            ExitCode::from(f.code)
        }
    }
}
