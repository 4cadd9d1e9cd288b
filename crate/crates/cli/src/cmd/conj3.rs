//! `lcmseq conj3`: scan pi(p^{k+1}; p, p-1) >= k over a rectangle of
//! primes and exponents. A failing pair is a successful discovery: the
//! scan completes, the row lands in the counterexample list, and the
//! process exits with the counterexample code.

use std::io::{self, BufWriter};
use std::time::Instant;

use serde::{Deserialize, Serialize};

use lcmseq_core::{Conj3Check, PrimeCounter, PrimeTable};

use crate::opts::{sieve_cap, Cli, Conj3Args};
use crate::output::StreamWriter;
use crate::scan::run_scan;
use crate::{CmdResult, Failure, EXIT_COUNTEREXAMPLE, EXIT_OK};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct Params {
    p_max: u64,
    k_max: u32,
}

pub fn run(cli: &Cli, args: &Conj3Args) -> CmdResult {
    let started = Instant::now();
    if args.p_max < 2 {
        return Err(Failure::Usage("--p-max must be at least 2".into()));
    }
    if args.k_max < 1 {
        return Err(Failure::Usage("--k-max must be at least 1".into()));
    }

    let primes: Vec<u64> = PrimeTable::build(args.p_max + 1).iter().collect();
    if primes.is_empty() {
        return Err(Failure::Usage(format!("no primes at or below {}", args.p_max)));
    }

    // Largest x the scan will query; the resident table covers it when the
    // cap allows, anything bigger runs through the segmented sieve.
    let cap = sieve_cap(cli.sieve_limit)?;
    let x_top = primes
        .iter()
        .map(|&p| (p as u128).saturating_pow(args.k_max + 1))
        .max()
        .unwrap_or(2);
    let resident = x_top.min(cap as u128).max(64) as u64;
    let counter = PrimeCounter::new(resident);

    let params = Params { p_max: args.p_max, k_max: args.k_max };
    let scan_id = format!("conj3 p<={} k<={}", args.p_max, args.k_max);
    let total = primes.len() as u64 * args.k_max as u64;
    let k_max = args.k_max as u64;

    let report = run_scan(
        args.checkpoint.as_deref(),
        scan_id,
        params,
        total,
        args.max_items,
        |idx| {
            let p = primes[(idx / k_max) as usize];
            let k = (idx % k_max) as u32 + 1;
            counter.conjecture3_check(p, k).map_err(Failure::from)
        },
        |check: &Conj3Check| !check.holds,
    )?;

    if !report.complete() {
        eprintln!(
            "conj3: checkpoint at {}/{} items after {} ms; rerun to resume",
            report.cursor, report.total, report.wall_ms
        );
        return Ok(EXIT_OK);
    }

    let out = BufWriter::new(io::stdout().lock());
    if args.matrix {
        emit_matrix(cli, out, &primes, args.k_max, &report.items)?;
    } else {
        let mut w =
            StreamWriter::new(out, cli.format, &["p", "k", "x", "count", "margin", "holds"])?;
        for check in &report.items {
            let cells = [
                check.p.to_string(),
                check.k.to_string(),
                check.x.to_string(),
                check.count.to_string(),
                check.margin.to_string(),
                check.holds.to_string(),
            ];
            w.row(check, &cells)?;
        }
        w.finish()?;
    }

    let found = report.counterexamples.len();
    eprintln!(
        "conj3: {} pairs, {found} counterexamples in {:.1?} (scan wall {} ms)",
        report.items.len(),
        started.elapsed(),
        report.wall_ms
    );
    for check in &report.counterexamples {
        eprintln!("conj3: counterexample p = {}, k = {}: count {}", check.p, check.k, check.count);
    }
    Ok(if found > 0 { EXIT_COUNTEREXAMPLE } else { EXIT_OK })
}

#[derive(Serialize)]
struct MatrixRow {
    p: u64,
    counts: Vec<u64>,
}

/// The scan rows rearranged as a wide table: pi(p^k; p, p-1) with one row
/// per prime and one column per exponent k = 2..=k_max+1. The count for
/// column k is the (p, k-1) scan item.
fn emit_matrix<W: io::Write>(
    cli: &Cli,
    out: W,
    primes: &[u64],
    k_max: u32,
    items: &[Conj3Check],
) -> Result<(), Failure> {
    let mut headers: Vec<String> = vec!["p".into()];
    headers.extend((2..=k_max + 1).map(|k| format!("pi_p^{k}")));
    let header_refs: Vec<&str> = headers.iter().map(String::as_str).collect();

    let mut w = StreamWriter::new(out, cli.format, &header_refs)?;
    for (i, &p) in primes.iter().enumerate() {
        let row = &items[i * k_max as usize..(i + 1) * k_max as usize];
        let counts: Vec<u64> = row.iter().map(|c| c.count).collect();
        let mut cells = vec![p.to_string()];
        cells.extend(counts.iter().map(u64::to_string));
        w.row(&MatrixRow { p, counts }, &cells)?;
    }
    w.finish()?;
    Ok(())
}
