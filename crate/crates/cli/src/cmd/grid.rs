//! `lcmseq grid`: the rectangle b_n^s for 1 <= s <= s_max, 2 <= n <= n_max.

use std::io::{self, BufWriter};
use std::time::Instant;

use serde::Serialize;

use lcmseq_core::{b_values, build_spf_sieve};

use crate::opts::{sieve_cap, within_cap, Cli, GridArgs};
use crate::output::StreamWriter;
use crate::{CmdResult, Failure, EXIT_OK};

#[derive(Serialize)]
struct GridRow {
    s: u64,
    b: Vec<u64>,
}

pub fn run(cli: &Cli, args: &GridArgs) -> CmdResult {
    let started = Instant::now();
    if args.s_max < 1 {
        return Err(Failure::Usage("--s-max must be at least 1".into()));
    }
    if args.n_max < 2 {
        return Err(Failure::Usage("--n-max must be at least 2".into()));
    }
    let cap = sieve_cap(cli.sieve_limit)?;
    let sieve = build_spf_sieve(within_cap(args.n_max + 2, cap, "the grid")?)?;

    let mut headers: Vec<String> = vec!["s".into()];
    headers.extend((2..=args.n_max).map(|n| format!("b_{n}")));
    let header_refs: Vec<&str> = headers.iter().map(String::as_str).collect();

    let out = BufWriter::new(io::stdout().lock());
    let mut w = StreamWriter::new(out, cli.format, &header_refs)?;
    for s in 1..=args.s_max {
        let b = b_values(s, args.n_max, &sieve)?;
        let mut cells = Vec::with_capacity(b.len() + 1);
        cells.push(s.to_string());
        cells.extend(b.iter().map(u64::to_string));
        w.row(&GridRow { s, b }, &cells)?;
    }
    let rows = w.finish()?;

    eprintln!("grid: {rows} seeds x {} indices in {:.1?}", args.n_max - 1, started.elapsed());
    Ok(EXIT_OK)
}
