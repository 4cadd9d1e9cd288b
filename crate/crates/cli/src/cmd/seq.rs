//! `lcmseq seq`: run one sequence and stream its terms.

use std::io::{self, BufWriter};
use std::str::FromStr;
use std::time::Instant;

use serde::Serialize;

use lcmseq_core::{build_spf_sieve, run as run_engine, FactoredNat, Seed, SequenceState};

use crate::opts::{sieve_cap, within_cap, Cli, Emit, SeqArgs};
use crate::output::StreamWriter;
use crate::{CmdResult, Failure, EXIT_OK};

#[derive(Serialize)]
struct BRow {
    n: u64,
    b: u64,
}

#[derive(Serialize)]
struct FactoredRow {
    n: u64,
    a: FactoredNat,
}

#[derive(Serialize)]
struct StepRow {
    n: u64,
    a_prev: FactoredNat,
    b: u64,
    multiplier: FactoredNat,
}

/// A seed argument is either a machine-size integer or a factorization
/// string for seeds past u64.
fn parse_seed(text: &str) -> Result<Seed, Failure> {
    if let Ok(v) = crate::opts::parse_u64_ext(text) {
        return Seed::new(v).map_err(Failure::from);
    }
    let factored = FactoredNat::from_str(text)
        .map_err(|e| Failure::Usage(format!("seed '{text}': {e}")))?;
    Ok(Seed::from_factored(factored))
}

pub fn run(cli: &Cli, args: &SeqArgs) -> CmdResult {
    let started = Instant::now();
    if args.n_max < 2 {
        return Err(Failure::Usage("--n-max must be at least 2".into()));
    }
    let seed = parse_seed(&args.s)?;
    let cap = sieve_cap(cli.sieve_limit)?;
    let sieve = build_spf_sieve(within_cap(args.n_max + 2, cap, "this run")?)?;

    let stdout = io::stdout().lock();
    let out = BufWriter::new(stdout);
    let mut io_err: Option<io::Error> = None;

    let rows = match args.emit {
        Emit::B => {
            let mut w = StreamWriter::new(out, cli.format, &["n", "b"])?;
            run_engine(seed, args.n_max, &sieve, |rec| {
                if io_err.is_none() {
                    let row = BRow { n: rec.n, b: rec.b };
                    let cells = [rec.n.to_string(), rec.b.to_string()];
                    if let Err(e) = w.row(&row, &cells) {
                        io_err = Some(e);
                    }
                }
            })?;
            w.finish()?
        }
        Emit::Factored => {
            let mut w = StreamWriter::new(out, cli.format, &["n", "a"])?;
            let mut state = SequenceState::new(seed);
            {
                let a = state.a_factored();
                w.row(&FactoredRow { n: 1, a: a.clone() }, &["1".into(), a.to_string()])?;
            }
            while state.n() < args.n_max {
                let (next, _) = state.step(&sieve)?;
                let a = next.a_factored();
                w.row(
                    &FactoredRow { n: next.n(), a: a.clone() },
                    &[next.n().to_string(), a.to_string()],
                )?;
                state = next;
            }
            w.finish()?
        }
        Emit::Steps => {
            let mut w = StreamWriter::new(out, cli.format, &["n", "a_prev", "b", "multiplier"])?;
            let mut state = SequenceState::new(seed);
            while state.n() < args.n_max {
                let a_prev = state.a_factored();
                let (next, rec) = state.step(&sieve)?;
                let cells = [
                    rec.n.to_string(),
                    a_prev.to_string(),
                    rec.b.to_string(),
                    rec.multiplier.to_string(),
                ];
                let row =
                    StepRow { n: rec.n, a_prev, b: rec.b, multiplier: rec.multiplier.clone() };
                w.row(&row, &cells)?;
                state = next;
            }
            w.finish()?
        }
    };
    if let Some(e) = io_err {
        return Err(e.into());
    }

    eprintln!("seq: {rows} rows in {:.1?}", started.elapsed());
    Ok(EXIT_OK)
}
