//! Library for lcm-driven recurrences a_n = a_{n-1} + lcm(n, a_{n-1}) with
//! arbitrary positive start value s, the ratio sequence b_n = a_n/a_{n-1} - 1,
//! prime counting in arithmetic progressions, and the present/absent
//! classification of odd composite values of b_n.

pub mod classify;
pub mod engine;
pub mod error;
pub mod factored;
pub mod primes;

pub use classify::{
    all_witnesses, classify, classify_range, corollary_check, heuristic_primes, heuristic_s,
    minimal_s_search, proof_s, smooth_numbers_below, triangle, verify_present, OddComposite,
    SearchBudget, SeedKind, SeedRecipe, Verdict,
};
pub use engine::{
    b_values, first_terms, init, init_factored, naive_reference, run, run_from, Seed,
    SequenceState, StepRecord,
};
pub use error::{Error, Result};
pub use factored::{
    build_spf_sieve, factorize, is_prime_u64, FactoredNat, SpfSieve, DEFAULT_SIEVE_BUDGET,
};
pub use primes::{
    ApQuery, Conj3Check, PrimeCounter, PrimeTable, DEFAULT_SEGMENT_BUDGET, DEFAULT_SEGMENT_SIZE,
};
