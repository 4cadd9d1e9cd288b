//! The sequence engine: a_1 = s, a_n = a_{n-1} + lcm(n, a_{n-1}),
//! b_n = a_n/a_{n-1} - 1.
//!
//! Two identities drive everything. First, b_n = n / gcd(n, a_{n-1}), so a
//! step only needs the factorization of n and the exponents the accumulator
//! holds for the primes of n. Second, a_n = s * prod(1 + b_k), so the
//! accumulator is maintained purely as an exponent map and the value of a_n
//! (which has about n bits) is never materialized in the hot loop.

use std::collections::BTreeMap;

use num_bigint::BigUint;
use num_traits::ToPrimitive;

use crate::error::{Error, Result};
use crate::factored::{factorize, gcd_u64, FactoredNat, SpfSieve};

/// A starting value a_1 = s. Plain `u64` seeds keep their value; seeds built
/// from a factorization (products of thousands of primes) may not fit a
/// machine word and carry `value: None`.
#[derive(Debug, Clone)]
pub struct Seed {
    value: Option<u64>,
    factored: FactoredNat,
}

impl Seed {
    pub fn new(value: u64) -> Result<Self> {
        if value == 0 {
            return Err(Error::ZeroSeed);
        }
        Ok(Seed { value: Some(value), factored: factorize(value, None) })
    }

    pub fn from_factored(factored: FactoredNat) -> Self {
        Seed { value: factored.value_u64(), factored }
    }

    pub fn value(&self) -> Option<u64> {
        self.value
    }

    pub fn factored(&self) -> &FactoredNat {
        &self.factored
    }
}

/// One completed step: index n, the ratio term b_n, and the factorization
/// of (1 + b_n) that was multiplied into the accumulator.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StepRecord {
    pub n: u64,
    pub b: u64,
    pub multiplier: FactoredNat,
}

/// Exponents for primes below this bound live in a flat vector indexed by
/// prime value; rarer large primes (from big seeds or boundary multipliers)
/// go to a tree map. 2^22 u64 slots is 32 MiB, enough to keep every run up
/// to n = 4*10^6 on the O(1) path.
const DENSE_LIMIT: usize = 1 << 22;

/// Cursor of one sequence run: the index n and a_n as an exponent map.
#[derive(Clone)]
pub struct SequenceState {
    seed: Seed,
    n: u64,
    dense: Vec<u64>,
    sparse: BTreeMap<u64, u64>,
    last_b: Option<u64>,
    log2_a: f64,
}

impl std::fmt::Debug for SequenceState {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SequenceState")
            .field("seed", &self.seed)
            .field("n", &self.n)
            .field("last_b", &self.last_b)
            .field("log2_a", &self.log2_a)
            .finish_non_exhaustive()
    }
}

impl SequenceState {
    /// The state at n = 1, before any step.
    pub fn new(seed: Seed) -> Self {
        let sparse = seed.factored().entries().iter().copied().collect();
        SequenceState {
            log2_a: seed.factored().log2_size(),
            seed,
            n: 1,
            dense: Vec::new(),
            sparse,
            last_b: None,
        }
    }

    pub fn seed(&self) -> &Seed {
        &self.seed
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    /// b_n for the current index; none at n = 1.
    pub fn last_b(&self) -> Option<u64> {
        self.last_b
    }

    /// log2 of the accumulator value, maintained incrementally.
    pub fn log2_a(&self) -> f64 {
        self.log2_a
    }

    /// The accumulator a_n as a factored value.
    pub fn a_factored(&self) -> FactoredNat {
        let mut entries: Vec<(u64, u64)> = Vec::new();
        for (p, &e) in self.dense.iter().enumerate() {
            if e > 0 {
                entries.push((p as u64, e));
            }
        }
        // Sparse keys are all >= dense.len(), so order is preserved.
        entries.extend(self.sparse.iter().map(|(&p, &e)| (p, e)));
        FactoredNat::from_sorted_unchecked(entries)
    }

    fn grow_dense_for(&mut self, sieve: &SpfSieve) {
        let target = ((sieve.limit() + 2).min(DENSE_LIMIT as u64)) as usize;
        if self.dense.len() >= target {
            return;
        }
        self.dense.resize(target, 0);
        let keep = self.sparse.split_off(&(target as u64));
        for (p, e) in std::mem::replace(&mut self.sparse, keep) {
            self.dense[p as usize] = e;
        }
    }

    fn exponent_of(&self, p: u64) -> u64 {
        match self.dense.get(p as usize) {
            Some(&e) => e,
            None => self.sparse.get(&p).copied().unwrap_or(0),
        }
    }

    fn add_exponent(&mut self, p: u64, e: u64) -> Result<()> {
        let slot = match self.dense.get_mut(p as usize) {
            Some(s) => s,
            None => self.sparse.entry(p).or_insert(0),
        };
        *slot = slot.checked_add(e).ok_or(Error::ExponentOverflow)?;
        Ok(())
    }

    /// Advances from n to n+1, consuming the state. The gcd with the new
    /// index is evaluated on exponent maps only.
    pub fn step(mut self, sieve: &SpfSieve) -> Result<(Self, StepRecord)> {
        let m = self.n + 1;
        if m > sieve.limit() {
            return Err(Error::SieveTooSmall { limit: sieve.limit(), needed: m });
        }
        self.grow_dense_for(sieve);

        let m_factored = factorize(m, Some(sieve));
        let mut g = 1u64;
        for &(p, e) in m_factored.entries() {
            let shared = e.min(self.exponent_of(p)) as u32;
            g *= p.pow(shared);
        }
        let b = m / g;

        // 1 + b <= n + 1, so this normally stays inside the sieve; the
        // fallback path covers b = sieve.limit exactly.
        let multiplier = factorize(b + 1, Some(sieve));
        for &(p, e) in multiplier.entries() {
            self.add_exponent(p, e)?;
        }
        self.log2_a += multiplier.log2_size();
        self.n = m;
        self.last_b = Some(b);

        Ok((self, StepRecord { n: m, b, multiplier }))
    }
}

/// State at n = 1 for a machine-word seed.
pub fn init(s: u64) -> Result<SequenceState> {
    Ok(SequenceState::new(Seed::new(s)?))
}

/// State at n = 1 for a seed already in factored form. Proof-scale seeds
/// (products of all residues coprime to m) arrive this way.
pub fn init_factored(seed: FactoredNat) -> SequenceState {
    SequenceState::new(Seed::from_factored(seed))
}

/// Runs from the given state up to index `n_max`, streaming one record per
/// step. Memory stays proportional to the prime support of the accumulator.
pub fn run_from<F>(mut state: SequenceState, n_max: u64, sieve: &SpfSieve, mut visit: F) -> Result<SequenceState>
where
    F: FnMut(&StepRecord),
{
    while state.n() < n_max {
        let (next, record) = state.step(sieve)?;
        visit(&record);
        state = next;
    }
    Ok(state)
}

/// Full run for a seed: visits records for n = 2..=n_max in order.
pub fn run<F>(seed: Seed, n_max: u64, sieve: &SpfSieve, visit: F) -> Result<SequenceState>
where
    F: FnMut(&StepRecord),
{
    run_from(SequenceState::new(seed), n_max, sieve, visit)
}

/// The b-sequence b_2..b_{n_max} for a machine-word seed.
pub fn b_values(s: u64, n_max: u64, sieve: &SpfSieve) -> Result<Vec<u64>> {
    let mut out = Vec::with_capacity(n_max.saturating_sub(1) as usize);
    run(Seed::new(s)?, n_max, sieve, |rec| out.push(rec.b))?;
    Ok(out)
}

/// Closed form for (a_2, a_3, a_4) as a function of s mod 6.
pub fn first_terms(s: u64) -> (u128, u128, u128) {
    assert!(s >= 1, "first_terms is defined for s >= 1");
    let s = s as u128;
    match s % 6 {
        0 => (2 * s, 4 * s, 8 * s),
        2 | 4 => (2 * s, 8 * s, 16 * s),
        _ => (3 * s, 6 * s, 18 * s),
    }
}

const NAIVE_N_MAX: u64 = 5000;

/// Literal transcription of the recurrence on exact big integers, used as
/// an independent oracle for the factored engine. a_n grows by about one
/// bit per step, so the quadratic cost confines this to small n.
pub fn naive_reference(s: u64, n_max: u64) -> Result<Vec<u64>> {
    if s == 0 {
        return Err(Error::ZeroSeed);
    }
    if n_max > NAIVE_N_MAX {
        return Err(Error::Resource(format!(
            "naive reference capped at n_max = {NAIVE_N_MAX} (requested {n_max})"
        )));
    }
    let mut a = BigUint::from(s);
    let mut out = Vec::with_capacity(n_max.saturating_sub(1) as usize);
    for n in 2..=n_max {
        let r = (&a % n).to_u64().expect("residue fits");
        let g = if r == 0 { n } else { gcd_u64(r, n) };
        let lcm = &a / g * n;
        let next = &a + lcm;
        let b = (&next / &a - 1u32).to_u64().expect("b <= n");
        out.push(b);
        a = next;
    }
    Ok(out)
}
