//! Exact arithmetic on natural numbers kept in factored form.
//!
//! The sequence engine never holds its accumulator as a plain integer: after
//! a few thousand steps the value has millions of bits, but its factorization
//! stays small. Everything here works on sorted `(prime, exponent)` vectors
//! so gcd, exact division, and size estimates stay cheap at any magnitude.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_traits::{One, Pow};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// A natural number >= 1 as a sorted list of `(prime, exponent)` pairs.
///
/// Invariants: primes strictly increasing, every exponent >= 1. The empty
/// list is 1. Construction goes through [`FactoredNat::from_entries`],
/// [`factorize`], or parsing, so a value in hand is always canonical.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct FactoredNat {
    entries: Vec<(u64, u64)>,
}

impl FactoredNat {
    /// The multiplicative identity.
    pub fn one() -> Self {
        FactoredNat { entries: Vec::new() }
    }

    /// Construction path for callers that already guarantee canonical form
    /// (sorted primes, positive exponents).
    pub(crate) fn from_sorted_unchecked(entries: Vec<(u64, u64)>) -> Self {
        debug_assert!(entries.windows(2).all(|w| w[0].0 < w[1].0));
        debug_assert!(entries.iter().all(|&(p, e)| e >= 1 && is_prime_u64(p)));
        FactoredNat { entries }
    }

    /// Builds a value from raw pairs, validating the canonical-form rules.
    pub fn from_entries(entries: Vec<(u64, u64)>) -> Result<Self> {
        let mut last = 1u64;
        for &(p, e) in &entries {
            if p <= last || !is_prime_u64(p) {
                return Err(Error::Parse(format!(
                    "{p} is not a prime in strictly increasing position"
                )));
            }
            if e == 0 {
                return Err(Error::Parse(format!("zero exponent on prime {p}")));
            }
            last = p;
        }
        Ok(FactoredNat { entries })
    }

    pub fn entries(&self) -> &[(u64, u64)] {
        &self.entries
    }

    pub fn is_one(&self) -> bool {
        self.entries.is_empty()
    }

    /// Number of distinct prime divisors.
    pub fn omega(&self) -> usize {
        self.entries.len()
    }

    pub fn primes(&self) -> impl Iterator<Item = u64> + '_ {
        self.entries.iter().map(|&(p, _)| p)
    }

    pub fn max_prime(&self) -> Option<u64> {
        self.entries.last().map(|&(p, _)| p)
    }

    /// Exponent of `p` in this value (0 when `p` does not divide it).
    pub fn exponent_of(&self, p: u64) -> u64 {
        match self.entries.binary_search_by_key(&p, |&(q, _)| q) {
            Ok(i) => self.entries[i].1,
            Err(_) => 0,
        }
    }

    /// Exact product. Exponents are added with overflow checks; the numbers
    /// themselves can be astronomically large without cost.
    pub fn multiply(&self, other: &Self) -> Result<Self> {
        let mut out = Vec::with_capacity(self.entries.len() + other.entries.len());
        let (mut i, mut j) = (0, 0);
        while i < self.entries.len() && j < other.entries.len() {
            let (pa, ea) = self.entries[i];
            let (pb, eb) = other.entries[j];
            if pa < pb {
                out.push((pa, ea));
                i += 1;
            } else if pb < pa {
                out.push((pb, eb));
                j += 1;
            } else {
                let e = ea.checked_add(eb).ok_or(Error::ExponentOverflow)?;
                out.push((pa, e));
                i += 1;
                j += 1;
            }
        }
        out.extend_from_slice(&self.entries[i..]);
        out.extend_from_slice(&other.entries[j..]);
        Ok(FactoredNat { entries: out })
    }

    /// Greatest common divisor: entrywise minimum of exponents.
    pub fn gcd(&self, other: &Self) -> Self {
        let mut out = Vec::new();
        let (mut i, mut j) = (0, 0);
        while i < self.entries.len() && j < other.entries.len() {
            let (pa, ea) = self.entries[i];
            let (pb, eb) = other.entries[j];
            if pa < pb {
                i += 1;
            } else if pb < pa {
                j += 1;
            } else {
                out.push((pa, ea.min(eb)));
                i += 1;
                j += 1;
            }
        }
        FactoredNat { entries: out }
    }

    /// Exact quotient `self / other`; fails unless `other` divides `self`.
    pub fn div_exact(&self, other: &Self) -> Result<Self> {
        let mut out = Vec::with_capacity(self.entries.len());
        let mut j = 0;
        for &(p, e) in &self.entries {
            let mut keep = e;
            if j < other.entries.len() && other.entries[j].0 < p {
                return Err(self.not_divisible_by(other));
            }
            if j < other.entries.len() && other.entries[j].0 == p {
                let eb = other.entries[j].1;
                if eb > e {
                    return Err(self.not_divisible_by(other));
                }
                keep = e - eb;
                j += 1;
            }
            if keep > 0 {
                out.push((p, keep));
            }
        }
        if j < other.entries.len() {
            return Err(self.not_divisible_by(other));
        }
        Ok(FactoredNat { entries: out })
    }

    fn not_divisible_by(&self, other: &Self) -> Error {
        Error::NotDivisible {
            num: self.to_string(),
            den: other.to_string(),
        }
    }

    /// True when `other` divides `self`.
    pub fn is_multiple_of(&self, other: &Self) -> bool {
        other
            .entries
            .iter()
            .all(|&(p, e)| self.exponent_of(p) >= e)
    }

    /// Expands to a big integer. Exact at any size; use sparingly, the
    /// result can have millions of digits.
    pub fn to_biguint(&self) -> BigUint {
        let mut acc = BigUint::one();
        for &(p, e) in &self.entries {
            acc *= Pow::pow(&BigUint::from(p), e);
        }
        acc
    }

    /// Exact decimal rendering of the expanded value.
    pub fn to_decimal(&self) -> String {
        self.to_biguint().to_str_radix(10)
    }

    /// Approximate size as log2 of the value. Good enough for growth plots
    /// and progress reporting; never used for exact decisions.
    pub fn log2_size(&self) -> f64 {
        self.entries
            .iter()
            .map(|&(p, e)| e as f64 * (p as f64).log2())
            .sum()
    }

    /// The expanded value if it fits in a `u64`.
    pub fn value_u64(&self) -> Option<u64> {
        let mut acc: u64 = 1;
        for &(p, e) in &self.entries {
            for _ in 0..e {
                acc = acc.checked_mul(p)?;
            }
        }
        Some(acc)
    }
}

impl fmt::Display for FactoredNat {
    /// Renders as `2^12*3^5*7`: ascending primes, `^` only for exponents
    /// above 1, no spaces. The identity renders as `1`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.entries.is_empty() {
            return write!(f, "1");
        }
        let mut first = true;
        for &(p, e) in &self.entries {
            if !first {
                write!(f, "*")?;
            }
            first = false;
            if e == 1 {
                write!(f, "{p}")?;
            } else {
                write!(f, "{p}^{e}")?;
            }
        }
        Ok(())
    }
}

impl FromStr for FactoredNat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "1" {
            return Ok(FactoredNat::one());
        }
        let mut entries = Vec::new();
        for part in s.split('*') {
            let (p_str, e_str) = match part.split_once('^') {
                Some((p, e)) => (p, Some(e)),
                None => (part, None),
            };
            let p: u64 = p_str
                .parse()
                .map_err(|_| Error::Parse(format!("bad prime in {part:?}")))?;
            let e: u64 = match e_str {
                Some(e) => e
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad exponent in {part:?}")))?,
                None => 1,
            };
            entries.push((p, e));
        }
        FactoredNat::from_entries(entries)
    }
}

impl Serialize for FactoredNat {
    fn serialize<S: Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        ser.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for FactoredNat {
    fn deserialize<D: Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(de)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Smallest-prime-factor table for every integer in `2..=limit`.
///
/// One `u32` per slot, so the default budget of 2^28 entries caps resident
/// memory near 1 GiB; larger requests fail rather than thrash.
pub struct SpfSieve {
    limit: u64,
    spf: Vec<u32>,
}

impl fmt::Debug for SpfSieve {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SpfSieve").field("limit", &self.limit).finish_non_exhaustive()
    }
}

pub const DEFAULT_SIEVE_BUDGET: u64 = 1 << 28;

impl SpfSieve {
    pub fn build(limit: u64) -> Result<Self> {
        Self::build_with_budget(limit, DEFAULT_SIEVE_BUDGET)
    }

    pub fn build_with_budget(limit: u64, budget: u64) -> Result<Self> {
        if limit < 2 {
            return Err(Error::Domain(format!("sieve limit {limit} is below 2")));
        }
        if limit > budget || limit >= u32::MAX as u64 {
            return Err(Error::SieveBudget {
                requested: limit,
                budget: budget.min(u32::MAX as u64 - 1),
            });
        }
        let n = limit as usize;
        let mut spf = vec![0u32; n + 1];
        for i in 2..=n {
            if spf[i] == 0 {
                spf[i] = i as u32;
                let mut j = i * i;
                while j <= n {
                    if spf[j] == 0 {
                        spf[j] = i as u32;
                    }
                    j += i;
                }
            }
        }
        Ok(SpfSieve { limit, spf })
    }

    pub fn limit(&self) -> u64 {
        self.limit
    }

    /// Smallest prime factor of `n`, for `2 <= n <= limit`.
    pub fn spf(&self, n: u64) -> Option<u64> {
        if n < 2 || n > self.limit {
            return None;
        }
        Some(self.spf[n as usize] as u64)
    }

    pub fn is_prime(&self, n: u64) -> bool {
        self.spf(n) == Some(n)
    }

    pub fn primes(&self) -> impl Iterator<Item = u64> + '_ {
        (2..=self.limit).filter(move |&n| self.is_prime(n))
    }
}

/// Convenience constructor mirroring [`SpfSieve::build`].
pub fn build_spf_sieve(limit: u64) -> Result<SpfSieve> {
    SpfSieve::build(limit)
}

/// Complete factorization of `n >= 1`.
///
/// Inside the sieve range this is a pure table walk. Beyond it: trial
/// division to the cube root, then a deterministic primality test, then
/// Pollard rho for the at-most-two-prime remainder. Total for all 64-bit
/// inputs.
pub fn factorize(n: u64, sieve: Option<&SpfSieve>) -> FactoredNat {
    assert!(n >= 1, "factorize is defined for n >= 1");
    if n == 1 {
        return FactoredNat::one();
    }
    if let Some(s) = sieve {
        if n <= s.limit() {
            return factorize_with_spf(n, s);
        }
    }
    factorize_generic(n)
}

fn factorize_with_spf(n: u64, sieve: &SpfSieve) -> FactoredNat {
    let mut entries: Vec<(u64, u64)> = Vec::new();
    let mut m = n;
    while m > 1 {
        let p = sieve.spf(m).expect("m stays within sieve range");
        let mut e = 0u64;
        while m % p == 0 {
            m /= p;
            e += 1;
        }
        entries.push((p, e));
    }
    FactoredNat { entries }
}

fn factorize_generic(n: u64) -> FactoredNat {
    let mut entries: Vec<(u64, u64)> = Vec::new();
    let mut m = n;

    for p in [2u64, 3, 5] {
        if m % p == 0 {
            let mut e = 0;
            while m % p == 0 {
                m /= p;
                e += 1;
            }
            entries.push((p, e));
        }
    }
    // Wheel over numbers coprime to 2,3,5 while d^3 <= m. Past that point
    // the remainder has at most two prime factors.
    const WHEEL: [u64; 8] = [4, 2, 4, 2, 4, 6, 2, 6];
    let mut d = 7u64;
    let mut w = 0usize;
    while m > 1 && d.checked_mul(d).and_then(|x| x.checked_mul(d)).map_or(false, |x| x <= m) {
        if m % d == 0 {
            let mut e = 0;
            while m % d == 0 {
                m /= d;
                e += 1;
            }
            entries.push((d, e));
        }
        d += WHEEL[w];
        w = (w + 1) % WHEEL.len();
    }

    if m > 1 {
        if is_prime_u64(m) {
            entries.push((m, 1));
        } else {
            let r = isqrt(m);
            if r * r == m && is_prime_u64(r) {
                entries.push((r, 2));
            } else {
                let a = pollard_rho(m);
                let b = m / a;
                debug_assert!(is_prime_u64(a) && is_prime_u64(b));
                let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
                if lo == hi {
                    entries.push((lo, 2));
                } else {
                    entries.push((lo, 1));
                    entries.push((hi, 1));
                }
            }
        }
    }
    entries.sort_unstable_by_key(|&(p, _)| p);
    FactoredNat { entries }
}

pub(crate) fn isqrt(n: u64) -> u64 {
    if n == 0 {
        return 0;
    }
    let mut r = (n as f64).sqrt() as u64;
    while r.checked_mul(r).map_or(true, |s| s > n) {
        r -= 1;
    }
    while (r + 1).checked_mul(r + 1).map_or(false, |s| s <= n) {
        r += 1;
    }
    r
}

fn mulmod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn powmod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1u64;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mulmod(acc, base, m);
        }
        base = mulmod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Deterministic Miller-Rabin for the full 64-bit range; this base set has
/// no composite pseudoprimes below 2^64.
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n % p == 0 {
            return n == p;
        }
    }
    let d = n - 1;
    let s = d.trailing_zeros();
    let d = d >> s;
    'base: for &a in &[2u64, 325, 9375, 28178, 450775, 9780504, 1795265022] {
        let a = a % n;
        if a == 0 {
            continue;
        }
        let mut x = powmod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mulmod(x, x, n);
            if x == n - 1 {
                continue 'base;
            }
        }
        return false;
    }
    true
}

/// Brent-cycle Pollard rho. Caller guarantees `n` is odd, composite, and
/// not a prime power that trial division would have caught.
fn pollard_rho(n: u64) -> u64 {
    if n % 2 == 0 {
        return 2;
    }
    let mut c = 1u64;
    loop {
        let f = |x: u64| (mulmod(x, x, n) + c) % n;
        let mut y = 2u64;
        let mut d = 1u64;
        let mut len = 1u64;
        while d == 1 {
            let x = y;
            for _ in 0..len {
                y = f(y);
            }
            let mut k = 0u64;
            while k < len && d == 1 {
                let ys = y;
                let batch = 128.min(len - k);
                let mut q = 1u64;
                for _ in 0..batch {
                    y = f(y);
                    q = mulmod(q, x.abs_diff(y), n);
                }
                d = gcd_u64(q, n);
                k += batch;
                if d == n {
                    // Batched gcd collapsed to n; replay one step at a time
                    // to recover the factor the batch jumped over.
                    let mut z = ys;
                    d = loop {
                        z = f(z);
                        let g = gcd_u64(x.abs_diff(z), n);
                        if g > 1 {
                            break g;
                        }
                        if z == y {
                            break n;
                        }
                    };
                    break;
                }
            }
            len *= 2;
        }
        if d > 1 && d < n {
            return d;
        }
        c += 1;
    }
}

pub(crate) fn gcd_u64(a: u64, b: u64) -> u64 {
    num_integer::gcd(a, b)
}
