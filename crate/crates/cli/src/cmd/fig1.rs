//! `lcmseq fig1`: the series (p_n, pi(p_n^2; p_n, p_n - 1)) for the first
//! `count` primes. A zero count anywhere would contradict the k = 1 case
//! of the scanned inequality, so zeros exit with the counterexample code.

use std::io::{self, BufWriter};
use std::time::Instant;

use serde::Serialize;

use lcmseq_core::PrimeCounter;

use crate::opts::{sieve_cap, Cli, Fig1Args};
use crate::output::StreamWriter;
use crate::{CmdResult, Failure, EXIT_COUNTEREXAMPLE, EXIT_OK};

#[derive(Serialize)]
struct Point {
    p: u64,
    count: u64,
}

pub fn run(cli: &Cli, args: &Fig1Args) -> CmdResult {
    let started = Instant::now();
    if args.count < 1 || args.count > 10_000 {
        return Err(Failure::Usage("--count must be between 1 and 10000".into()));
    }

    // Size the resident table to cover p_count^2 when the cap allows.
    let cap = sieve_cap(cli.sieve_limit)?;
    let top = nth_prime_bound(args.count);
    let resident = top.saturating_mul(top).saturating_add(1).min(cap).max(64);
    let counter = PrimeCounter::new(resident);

    let series = counter.figure1_series(args.count)?;

    let out = BufWriter::new(io::stdout().lock());
    let mut w = StreamWriter::new(out, cli.format, &["p", "count"])?;
    let mut zeros = 0usize;
    for &(p, count) in &series {
        if count == 0 {
            zeros += 1;
            eprintln!("fig1: counterexample: no prime below {p}^2 at -1 mod {p}");
        }
        w.row(&Point { p, count }, &[p.to_string(), count.to_string()])?;
    }
    let rows = w.finish()?;

    eprintln!("fig1: {rows} points in {:.1?}", started.elapsed());
    Ok(if zeros > 0 { EXIT_COUNTEREXAMPLE } else { EXIT_OK })
}

/// Padded Rosser-type upper bound on the n-th prime, for sizing only.
fn nth_prime_bound(n: usize) -> u64 {
    if n < 6 {
        return 15;
    }
    let nf = n as f64;
    (nf * (nf.ln() + nf.ln().ln()) * 1.2).ceil() as u64
}
