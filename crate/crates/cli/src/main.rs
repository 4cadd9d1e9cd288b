//! `lcmseq`: tables, scans and verification runs for the lcm-recursive
//! sequences a_n^s, b_n^s.
//!
//! Exit codes: 0 clean, 2 a monitored conjecture found a counterexample
//! (the output is still valid), 3 a sieve or budget limit was exceeded,
//! 4 usage error, 1 anything else.

mod cmd;
mod opts;
mod output;
mod scan;

use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;

use opts::{Cli, Command};

pub const EXIT_OK: u8 = 0;
pub const EXIT_FAILURE: u8 = 1;
pub const EXIT_COUNTEREXAMPLE: u8 = 2;
pub const EXIT_RESOURCE: u8 = 3;
pub const EXIT_USAGE: u8 = 4;

/// Command failure, split by how the process should exit.
#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Resource(String),
    Run(String),
}

impl Failure {
    fn exit_code(&self) -> u8 {
        match self {
            Failure::Usage(_) => EXIT_USAGE,
            Failure::Resource(_) => EXIT_RESOURCE,
            Failure::Run(_) => EXIT_FAILURE,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Usage(m) | Failure::Resource(m) | Failure::Run(m) => m,
        }
    }
}

impl From<lcmseq_core::Error> for Failure {
    fn from(e: lcmseq_core::Error) -> Self {
        use lcmseq_core::Error::*;
        match e {
            SieveBudget { .. } | SieveTooSmall { .. } | SegmentBudget { .. } | Resource(_)
            | ExponentOverflow => Failure::Resource(e.to_string()),
            ZeroSeed | NotOddComposite { .. } | BadApQuery { .. } | OutsideBoundRange { .. }
            | Parse(_) => Failure::Usage(e.to_string()),
            _ => Failure::Run(e.to_string()),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Run(format!("i/o error: {e}"))
    }
}

/// Commands return the exit code they want on success; counterexample
/// discoveries are successful runs that exit with 2.
pub type CmdResult = Result<u8, Failure>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_USAGE,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };

    if let Err(f) = opts::init_workers(cli.workers) {
        eprintln!("lcmseq: {}", f.message());
        return ExitCode::from(f.exit_code());
    }

    let result = match &cli.command {
        Command::Seq(args) => cmd::seq::run(&cli, args),
        Command::Grid(args) => cmd::grid::run(&cli, args),
        Command::Classify(args) => cmd::classify::run(&cli, args),
        Command::Conj3(args) => cmd::conj3::run(&cli, args),
        Command::Fig1(args) => cmd::fig1::run(&cli, args),
        Command::Verify(args) => cmd::verify::run(&cli, args),
    };

    match result {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("lcmseq: {}", f.message());
            ExitCode::from(f.exit_code())
        }
    }
}
