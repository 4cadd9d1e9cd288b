//! `lcmseq classify`: present/absent verdicts for odd composites, with
//! optional witness lists and constructed-and-verified seeds. Ranges run
//! on the worker pool and can checkpoint/resume.

use std::io::{self, BufWriter};
use std::time::Instant;

use serde::{Deserialize, Serialize};

use lcmseq_core::{
    all_witnesses, build_spf_sieve, classify, heuristic_s, minimal_s_search, proof_s,
    verify_present, OddComposite, SearchBudget, Seed, SeedKind, SpfSieve, Verdict,
};

use crate::opts::{parse_range, sieve_cap, within_cap, Cli, ClassifyArgs, SeedChoice};
use crate::output::{opt_cell, pairs_cell, StreamWriter};
use crate::scan::run_scan;
use crate::{CmdResult, Failure, EXIT_OK};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
enum Status {
    Present,
    Absent,
    OutOfDomain,
}

impl Status {
    fn cell(self) -> &'static str {
        match self {
            Status::Present => "present",
            Status::Absent => "absent",
            Status::OutOfDomain => "out-of-domain",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct Row {
    m: u64,
    status: Status,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    p: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    q: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    witnesses: Option<Vec<(u64, u64)>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    seed_kind: Option<SeedKind>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    s: Option<lcmseq_core::FactoredNat>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    verified: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct Params {
    lo: u64,
    hi: u64,
    all_witnesses: bool,
    with_seed: bool,
    seed_kind: String,
    budget: u64,
}

fn seed_kind_name(choice: SeedChoice) -> &'static str {
    match choice {
        SeedChoice::Heuristic => "heuristic",
        SeedChoice::Proof => "proof",
        SeedChoice::Minimal => "minimal",
    }
}

fn classify_one(m: u64, args: &ClassifyArgs, sieve: &SpfSieve) -> Result<Row, Failure> {
    let mut row = Row {
        m,
        status: Status::OutOfDomain,
        p: None,
        q: None,
        witnesses: None,
        seed_kind: None,
        s: None,
        verified: None,
    };
    let oc = match OddComposite::new(m) {
        Ok(oc) => oc,
        Err(_) => return Ok(row),
    };

    match classify(&oc) {
        Verdict::Present => row.status = Status::Present,
        Verdict::Absent { p, q } => {
            row.status = Status::Absent;
            row.p = Some(p);
            row.q = Some(q);
        }
    }
    if args.all_witnesses {
        row.witnesses = Some(all_witnesses(&oc));
    }
    if args.with_seed && row.status == Status::Present {
        let recipe = match args.seed_kind {
            SeedChoice::Heuristic => Some(heuristic_s(&oc)?),
            SeedChoice::Proof => Some(proof_s(&oc)?),
            SeedChoice::Minimal => {
                minimal_s_search(&oc, SearchBudget { max_verifications: args.budget }, sieve)?
            }
        };
        match recipe {
            Some(recipe) => {
                let verified =
                    verify_present(m, &Seed::from_factored(recipe.s.clone()), sieve)?;
                row.seed_kind = Some(recipe.kind);
                row.s = Some(recipe.s);
                row.verified = Some(verified);
            }
            None => {
                // Search exhausted its budget without a verified seed; the
                // row records that nothing was found.
                row.seed_kind = Some(SeedKind::VerifiedMinimal);
                row.verified = Some(false);
            }
        }
    }
    Ok(row)
}

fn cells(row: &Row, args: &ClassifyArgs) -> Vec<String> {
    let mut cells = vec![
        row.m.to_string(),
        row.status.cell().to_string(),
        opt_cell(&row.p),
        opt_cell(&row.q),
    ];
    if args.all_witnesses {
        cells.push(row.witnesses.as_deref().map_or_else(String::new, pairs_cell));
    }
    if args.with_seed {
        cells.push(row.seed_kind.map_or_else(String::new, |k| {
            match k {
                SeedKind::Proof => "proof",
                SeedKind::Heuristic => "heuristic",
                SeedKind::VerifiedMinimal => "verified-minimal",
            }
            .to_string()
        }));
        cells.push(row.s.as_ref().map_or_else(String::new, ToString::to_string));
        cells.push(opt_cell(&row.verified));
    }
    cells
}

pub fn run(cli: &Cli, args: &ClassifyArgs) -> CmdResult {
    let started = Instant::now();
    let (lo, hi) = parse_range(&args.target)?;
    if lo < 1 {
        return Err(Failure::Usage("classification starts at 1".into()));
    }

    // Seed verification replays the sequence up to m, so the sieve must
    // reach the top of the range whenever seeds are requested.
    let cap = sieve_cap(cli.sieve_limit)?;
    let sieve_limit = if args.with_seed { within_cap(hi + 2, cap, "seed verification")? } else { 64 };
    let sieve = build_spf_sieve(sieve_limit)?;

    let params = Params {
        lo,
        hi,
        all_witnesses: args.all_witnesses,
        with_seed: args.with_seed,
        seed_kind: seed_kind_name(args.seed_kind).to_string(),
        budget: args.budget,
    };
    let scan_id = format!("classify {lo}..{hi}");
    // A range scan covers the classifier's domain: odd composites. A single
    // target is classified as given, so an out-of-domain value still gets an
    // explicit row instead of silence.
    let candidates: Vec<u64> = if lo == hi {
        vec![lo]
    } else {
        (lo..=hi).filter(|&m| OddComposite::new(m).is_ok()).collect()
    };
    let total = candidates.len() as u64;

    let report = run_scan(
        args.checkpoint.as_deref(),
        scan_id,
        params,
        total,
        args.max_items,
        |idx| classify_one(candidates[idx as usize], args, &sieve),
        |_| false,
    )?;

    if !report.complete() {
        eprintln!(
            "classify: checkpoint at {}/{} items after {} ms; rerun to resume",
            report.cursor, report.total, report.wall_ms
        );
        return Ok(EXIT_OK);
    }

    let mut headers = vec!["m", "status", "p", "q"];
    if args.all_witnesses {
        headers.push("witnesses");
    }
    if args.with_seed {
        headers.extend(["seed_kind", "s", "verified"]);
    }
    let out = BufWriter::new(io::stdout().lock());
    let mut w = StreamWriter::new(out, cli.format, &headers)?;
    for row in &report.items {
        w.row(row, &cells(row, args))?;
    }
    let rows = w.finish()?;

    let absent = report.items.iter().filter(|r| r.status == Status::Absent).count();
    eprintln!(
        "classify: {rows} rows ({absent} absent) in {:.1?} (scan wall {} ms)",
        started.elapsed(),
        report.wall_ms
    );
    Ok(EXIT_OK)
}
