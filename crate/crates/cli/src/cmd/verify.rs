//! `lcmseq verify`: re-run library invariants at a chosen budget and print
//! one row per property. A failed proved property exits nonzero with a
//! minimal reproduction row; a hit on the open-conjecture monitor exits
//! with the counterexample code but is still a successful run.

use std::io::{self, BufWriter};
use std::time::Instant;

use serde::Serialize;

use lcmseq_core::{b_values, build_spf_sieve, naive_reference, run as run_engine, PrimeCounter, Seed};

use crate::opts::{parse_range, sieve_cap, within_cap, Cli, Suite, VerifyArgs};
use crate::output::StreamWriter;
use crate::{CmdResult, Failure, EXIT_COUNTEREXAMPLE, EXIT_FAILURE, EXIT_OK};

#[derive(Serialize)]
struct Check {
    property: String,
    scope: String,
    pass: bool,
    detail: String,
}

impl Check {
    fn new(property: &str, scope: String, failure: Option<String>) -> Self {
        Check {
            property: property.to_string(),
            scope,
            pass: failure.is_none(),
            detail: failure.unwrap_or_default(),
        }
    }
}

enum Outcome {
    Clean,
    ConjectureHit,
    PropertyFailed,
}

pub fn run(cli: &Cli, args: &VerifyArgs) -> CmdResult {
    let started = Instant::now();
    let (checks, outcome) = match args.suite {
        Suite::Props => props(cli, args)?,
        Suite::Bounds => bounds(cli, args)?,
        Suite::Oracle => oracle(cli, args)?,
    };

    let out = BufWriter::new(io::stdout().lock());
    let mut w = StreamWriter::new(out, cli.format, &["property", "scope", "pass", "detail"])?;
    for check in &checks {
        let cells = [
            check.property.clone(),
            check.scope.clone(),
            check.pass.to_string(),
            check.detail.clone(),
        ];
        w.row(check, &cells)?;
    }
    let rows = w.finish()?;

    let failed = checks.iter().filter(|c| !c.pass).count();
    eprintln!("verify: {rows} checks, {failed} failed in {:.1?}", started.elapsed());
    Ok(match outcome {
        Outcome::Clean => EXIT_OK,
        Outcome::ConjectureHit => EXIT_COUNTEREXAMPLE,
        Outcome::PropertyFailed => EXIT_FAILURE,
    })
}

/// Step-level laws over full engine runs: b_n divides n, parity past 4,
/// prime-index values, the b_2 = b_4 echo, plus the open-conjecture
/// monitor b_n ∈ {1, gpf(n)}.
fn props(cli: &Cli, args: &VerifyArgs) -> Result<(Vec<Check>, Outcome), Failure> {
    let n_max = args.n.unwrap_or(100_000).max(4);
    let (s_lo, s_hi) = parse_range(args.s.as_deref().unwrap_or("1"))?;
    if s_lo < 1 {
        return Err(Failure::Usage("seeds start at 1".into()));
    }
    let cap = sieve_cap(cli.sieve_limit)?;
    let sieve = build_spf_sieve(within_cap(n_max + 2, cap, "the props suite")?)?;

    let mut divisor: Option<String> = None;
    let mut parity: Option<String> = None;
    let mut prime_rule: Option<String> = None;
    let mut echo: Option<String> = None;
    let mut no_three: Option<String> = None;
    let mut monitor: Option<String> = None;

    let gpf = |mut n: u64| {
        let mut largest = 1;
        while n > 1 {
            let p = sieve.spf(n).unwrap();
            largest = largest.max(p);
            while n % p == 0 {
                n /= p;
            }
        }
        largest
    };

    for s in s_lo..=s_hi {
        let mut b2 = 0u64;
        run_engine(Seed::new(s)?, n_max, &sieve, |rec| {
            let (n, b) = (rec.n, rec.b);
            let at = || format!("s = {s}, n = {n}, b = {b}");
            if divisor.is_none() && n % b != 0 {
                divisor = Some(at());
            }
            if parity.is_none() && n >= 5 && b % 2 == 0 {
                parity = Some(at());
            }
            if n == 2 {
                b2 = b;
            }
            if echo.is_none() && n == 4 && b != b2 {
                echo = Some(at());
            }
            if prime_rule.is_none() && sieve.is_prime(n) && n != 3 {
                let expected = if s % n == 0 { 1 } else { n };
                if b != expected {
                    prime_rule = Some(at());
                }
            }
            // Specific to seed 1: the value 3 never appears at all.
            if no_three.is_none() && s == 1 && b == 3 {
                no_three = Some(at());
            }
            if monitor.is_none() && b != 1 && b != gpf(n) {
                monitor = Some(at());
            }
        })?;
    }

    let scope = format!("s = {s_lo}..{s_hi}, n <= {n_max}");
    let checks = vec![
        Check::new("b divides its index", scope.clone(), divisor),
        Check::new("b odd for n >= 5", scope.clone(), parity),
        Check::new("prime index gives b = p or 1", scope.clone(), prime_rule),
        Check::new("b_4 repeats b_2", scope.clone(), echo),
        Check::new("no b = 3 when s = 1", scope.clone(), no_three),
        Check::new("monitor: b in {1, gpf(n)}", scope, monitor.clone()),
    ];
    let outcome = if checks[..5].iter().any(|c| !c.pass) {
        Outcome::PropertyFailed
    } else if monitor.is_some() {
        Outcome::ConjectureHit
    } else {
        Outcome::Clean
    };
    Ok((checks, outcome))
}

/// Explicit progression-count inequalities at the stated endpoints and at
/// every decade up to --x.
fn bounds(cli: &Cli, args: &VerifyArgs) -> Result<(Vec<Check>, Outcome), Failure> {
    let x_top = args.x.unwrap_or(10_000_000);
    if x_top < 151 {
        return Err(Failure::Usage("--x must be at least 151".into()));
    }
    let cap = sieve_cap(cli.sieve_limit)?;
    let counter = PrimeCounter::new(x_top.min(cap).max(64));

    let mut points = vec![151u64, 55];
    let mut decade = 1_000u64;
    while decade <= x_top {
        points.push(decade);
        decade = decade.saturating_mul(10);
    }

    let mut checks = Vec::new();
    for &x in points.iter().filter(|&&x| x >= 151) {
        let fail = match counter.bound_check_mod3(x) {
            Ok(true) => None,
            Ok(false) => Some(format!("violated at x = {x}")),
            Err(e) => return Err(e.into()),
        };
        checks.push(Check::new("pi(x;3,2) > x/(2 ln x)", format!("x = {x}"), fail));
    }
    for &x in points.iter().filter(|&&x| x >= 55) {
        let fail = match counter.bound_check_odd(x) {
            Ok(true) => None,
            Ok(false) => Some(format!("violated at x = {x}")),
            Err(e) => return Err(e.into()),
        };
        checks.push(Check::new("pi(x;2,1) > x/(ln x + 2) - 1", format!("x = {x}"), fail));
    }
    let fail = match counter.lemma_pi_check(12) {
        Ok(true) => None,
        Ok(false) => Some("violated for some k <= 12".to_string()),
        Err(e) => return Err(e.into()),
    };
    checks.push(Check::new("pi(3^k;3,2) >= k", "k <= 12".to_string(), fail));

    let outcome =
        if checks.iter().all(|c| c.pass) { Outcome::Clean } else { Outcome::PropertyFailed };
    Ok((checks, outcome))
}

/// The factored engine against the literal big-integer recurrence,
/// bit-exact over a seed range.
fn oracle(cli: &Cli, args: &VerifyArgs) -> Result<(Vec<Check>, Outcome), Failure> {
    let n_max = args.n.unwrap_or(2_000).max(2);
    let (s_lo, s_hi) = parse_range(args.s.as_deref().unwrap_or("1..50"))?;
    if s_lo < 1 {
        return Err(Failure::Usage("seeds start at 1".into()));
    }
    let cap = sieve_cap(cli.sieve_limit)?;
    let sieve = build_spf_sieve(within_cap(n_max + 2, cap, "the oracle suite")?)?;

    let mut first_bad: Option<String> = None;
    for s in s_lo..=s_hi {
        let fast = b_values(s, n_max, &sieve)?;
        let slow = naive_reference(s, n_max)?;
        if fast != slow {
            let n = fast.iter().zip(&slow).position(|(a, b)| a != b).map(|i| i as u64 + 2);
            first_bad = Some(format!("s = {s}, first divergence at n = {n:?}"));
            break;
        }
    }

    let scope = format!("s = {s_lo}..{s_hi}, n <= {n_max}");
    let checks = vec![Check::new("factored engine == big-integer recurrence", scope, first_bad)];
    let outcome =
        if checks[0].pass { Outcome::Clean } else { Outcome::PropertyFailed };
    Ok((checks, outcome))
}
