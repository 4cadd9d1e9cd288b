//! Argument surface: clap types, number/range parsing, and resolution of
//! the settings that can also arrive through environment variables
//! (LCMSEQ_SIEVE_LIMIT, LCMSEQ_WORKERS). A flag beats the variable, the
//! variable beats the default.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::output::Format;
use crate::Failure;

pub const ENV_SIEVE_LIMIT: &str = "LCMSEQ_SIEVE_LIMIT";
pub const ENV_WORKERS: &str = "LCMSEQ_WORKERS";

#[derive(Debug, Parser)]
#[command(
    name = "lcmseq",
    version,
    about = "Sequences a_n = a_{n-1} + lcm(n, a_{n-1}): tables, classification and scans"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Output format for tables
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    pub format: Format,

    /// Cap on sieve/table sizes in memory (also LCMSEQ_SIEVE_LIMIT)
    #[arg(long, global = true, value_parser = parse_u64_ext)]
    pub sieve_limit: Option<u64>,

    /// Worker threads for range scans (also LCMSEQ_WORKERS)
    #[arg(long, global = true)]
    pub workers: Option<usize>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run one sequence and print its terms
    Seq(SeqArgs),
    /// b_n^s for a rectangle of seeds and indices
    Grid(GridArgs),
    /// Classify odd composites as present or absent, with witnesses/seeds
    Classify(ClassifyArgs),
    /// Scan the progression-count inequality pi(p^{k+1}; p, p-1) >= k
    Conj3(Conj3Args),
    /// Series (p_n, pi(p_n^2; p_n, p_n - 1)) for the first primes
    Fig1(Fig1Args),
    /// Re-check library invariants at a chosen budget
    Verify(VerifyArgs),
}

/// What `seq` prints per step.
#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Emit {
    /// n and b_n
    B,
    /// n and the full factorization of a_n
    Factored,
    /// n, factored a_{n-1}, b_n, and the factored step multiplier 1 + b_n
    Steps,
}

#[derive(Debug, Args)]
pub struct SeqArgs {
    /// Seed: an integer, or a factorization like "2^3*5*7" for big seeds
    #[arg(long)]
    pub s: String,

    /// Highest index n to compute (accepts 10^6 and 1e6 notation)
    #[arg(long, value_parser = parse_u64_ext)]
    pub n_max: u64,

    #[arg(long, value_enum, default_value_t = Emit::B)]
    pub emit: Emit,
}

#[derive(Debug, Args)]
pub struct GridArgs {
    /// Largest seed s (rows cover 1..=s_max)
    #[arg(long)]
    pub s_max: u64,

    /// Highest index n (columns cover 2..=n_max)
    #[arg(long, value_parser = parse_u64_ext)]
    pub n_max: u64,
}

#[derive(Debug, Args)]
pub struct ClassifyArgs {
    /// One odd composite ("105") or an inclusive range ("9..105")
    pub target: String,

    /// List every witness pair, not just the canonical one
    #[arg(long)]
    pub all_witnesses: bool,

    /// Construct a seed for present numbers and verify it with an engine run
    #[arg(long)]
    pub with_seed: bool,

    /// Which seed construction --with-seed uses
    #[arg(long, value_enum, default_value_t = SeedChoice::Heuristic, requires = "with_seed")]
    pub seed_kind: SeedChoice,

    /// Verification allowance for the minimal-seed search
    #[arg(long, default_value_t = 256, requires = "with_seed")]
    pub budget: u64,

    /// Checkpoint file for resumable range scans
    #[arg(long)]
    pub checkpoint: Option<PathBuf>,

    /// Process at most this many items, then save the checkpoint and stop
    #[arg(long, requires = "checkpoint")]
    pub max_items: Option<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum SeedChoice {
    /// Product of the primes below m lying at -1 mod a prime divisor of m
    Heuristic,
    /// Product of every residue coprime to m (huge, guaranteed)
    Proof,
    /// Smallest verified subset product found within the budget
    Minimal,
}

#[derive(Debug, Args)]
pub struct Conj3Args {
    /// Scan all primes p <= p_max
    #[arg(long)]
    pub p_max: u64,

    /// Exponents k = 1..=k_max per prime
    #[arg(long)]
    pub k_max: u32,

    /// Checkpoint file for resumable scans
    #[arg(long)]
    pub checkpoint: Option<PathBuf>,

    /// Process at most this many items, then save the checkpoint and stop
    #[arg(long, requires = "checkpoint")]
    pub max_items: Option<u64>,

    /// Print the counts as a wide matrix: one row per p, one column per
    /// power p^k, k = 2..=k_max+1
    #[arg(long)]
    pub matrix: bool,
}

#[derive(Debug, Args)]
pub struct Fig1Args {
    /// How many primes p_n to cover, starting at p_1 = 2
    #[arg(long, default_value_t = 1000)]
    pub count: usize,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Which suite to run
    #[arg(value_enum)]
    pub suite: Suite,

    /// Highest sequence index for props/oracle runs
    #[arg(long, value_parser = parse_u64_ext)]
    pub n: Option<u64>,

    /// Seed or seed range for props/oracle runs (e.g. "1" or "1..50")
    #[arg(long)]
    pub s: Option<String>,

    /// Largest x for bound checks (sampled at decades plus the endpoints)
    #[arg(long, value_parser = parse_u64_ext)]
    pub x: Option<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Suite {
    /// Step-level laws of the sequence engine, plus the open-conjecture monitor
    Props,
    /// Explicit prime-count inequalities in progressions
    Bounds,
    /// Factored engine against the literal big-integer recurrence
    Oracle,
}

/// Integer with engineering conveniences: "123", "10^7", "1e7", "2^28".
pub fn parse_u64_ext(text: &str) -> Result<u64, String> {
    let t = text.trim();
    let bad = |why: &str| format!("cannot read '{t}' as an integer ({why})");
    if let Some((base, exp)) = t.split_once('^') {
        let b: u64 = base.trim().parse().map_err(|_| bad("base"))?;
        let e: u32 = exp.trim().parse().map_err(|_| bad("exponent"))?;
        return b.checked_pow(e).ok_or_else(|| bad("overflow"));
    }
    if let Some((mant, exp)) = t.split_once(['e', 'E']) {
        let m: u64 = mant.trim().parse().map_err(|_| bad("mantissa"))?;
        let e: u32 = exp.trim().parse().map_err(|_| bad("exponent"))?;
        return 10u64
            .checked_pow(e)
            .and_then(|p| m.checked_mul(p))
            .ok_or_else(|| bad("overflow"));
    }
    t.parse().map_err(|_| bad("digits"))
}

/// "9..105" inclusive, or a single value as a one-element range.
pub fn parse_range(text: &str) -> Result<(u64, u64), Failure> {
    let parse = |part: &str| {
        parse_u64_ext(part).map_err(|e| Failure::Usage(format!("bad range '{text}': {e}")))
    };
    if let Some((lo, hi)) = text.split_once("..") {
        let (lo, hi) = (parse(lo)?, parse(hi)?);
        if lo > hi {
            return Err(Failure::Usage(format!("empty range '{text}'")));
        }
        Ok((lo, hi))
    } else {
        let v = parse(text)?;
        Ok((v, v))
    }
}

/// The in-memory sieve cap: flag, then environment, then the library default.
pub fn sieve_cap(flag: Option<u64>) -> Result<u64, Failure> {
    if let Some(v) = flag {
        return Ok(v);
    }
    match std::env::var(ENV_SIEVE_LIMIT) {
        Ok(raw) => parse_u64_ext(&raw)
            .map_err(|e| Failure::Usage(format!("{ENV_SIEVE_LIMIT}: {e}"))),
        Err(_) => Ok(lcmseq_core::DEFAULT_SIEVE_BUDGET),
    }
}

/// Fails when `needed` exceeds the configured cap, naming both sides.
pub fn within_cap(needed: u64, cap: u64, what: &str) -> Result<u64, Failure> {
    if needed > cap {
        return Err(Failure::Resource(format!(
            "{what} needs a sieve of {needed} but the limit is {cap} \
             (raise --sieve-limit or {ENV_SIEVE_LIMIT})"
        )));
    }
    Ok(needed)
}

/// Sizes the global worker pool once, before any parallel work.
pub fn init_workers(flag: Option<usize>) -> Result<(), Failure> {
    let n = match flag {
        Some(n) => Some(n),
        None => match std::env::var(ENV_WORKERS) {
            Ok(raw) => Some(
                raw.trim()
                    .parse()
                    .map_err(|_| Failure::Usage(format!("{ENV_WORKERS}: '{raw}' is not a thread count")))?,
            ),
            Err(_) => None,
        },
    };
    if let Some(n) = n {
        if n == 0 {
            return Err(Failure::Usage("worker count must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Failure::Run(format!("worker pool: {e}")))?;
    }
    Ok(())
}
