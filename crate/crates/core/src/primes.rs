//! Prime counting in arithmetic progressions: pi(x;q,a) = #{p prime : p < x,
//! p = a mod q} with the convention 1 <= a <= q. A memory-resident bitset
//! serves small x; a segmented sieve extends the reach to a configurable
//! budget without holding the whole range.

use crate::error::{Error, Result};
use crate::factored::{is_prime_u64, isqrt};

/// Bitset marking primes in 0..=limit.
pub struct PrimeTable {
    limit: u64,
    bits: Vec<u64>,
}

impl std::fmt::Debug for PrimeTable {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("PrimeTable").field("limit", &self.limit).finish_non_exhaustive()
    }
}

impl PrimeTable {
    pub fn build(limit: u64) -> Self {
        let words = (limit / 64 + 1) as usize;
        let mut bits = vec![u64::MAX; words];
        let clear = |bits: &mut Vec<u64>, i: u64| bits[(i / 64) as usize] &= !(1 << (i % 64));
        clear(&mut bits, 0);
        if limit >= 1 {
            clear(&mut bits, 1);
        }
        let mut i = 2u64;
        while i * i <= limit {
            if bits[(i / 64) as usize] >> (i % 64) & 1 == 1 {
                let mut j = i * i;
                while j <= limit {
                    clear(&mut bits, j);
                    j += i;
                }
            }
            i += 1;
        }
        // Trailing bits beyond `limit` in the last word stay set; is_prime
        // range-checks first, so they are never observed.
        PrimeTable { limit, bits }
    }

    pub fn limit(&self) -> u64 {
        self.limit
    }

    pub fn is_prime(&self, n: u64) -> bool {
        n <= self.limit && self.bits[(n / 64) as usize] >> (n % 64) & 1 == 1
    }

    pub fn iter(&self) -> impl Iterator<Item = u64> + '_ {
        (2..=self.limit).filter(move |&n| self.is_prime(n))
    }
}

/// A validated query for pi(x;q,a).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ApQuery {
    pub x: u64,
    pub q: u64,
    pub a: u64,
}

impl ApQuery {
    pub fn new(x: u64, q: u64, a: u64) -> Result<Self> {
        if a < 1 || a > q {
            return Err(Error::BadApQuery { q, a });
        }
        Ok(ApQuery { x, q, a })
    }
}

/// Outcome of one instance of the progression-count inequality
/// pi(p^{k+1}; p, p-1) >= k.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct Conj3Check {
    pub p: u64,
    pub k: u32,
    pub x: u64,
    pub count: u64,
    pub margin: i64,
    pub holds: bool,
}

pub const DEFAULT_SEGMENT_SIZE: usize = 1 << 22;
pub const DEFAULT_SEGMENT_BUDGET: u64 = 1 << 34;

/// Counting engine: resident table for x below its limit, segmented sieve
/// beyond it, hard budget past which queries fail instead of running for
/// hours.
pub struct PrimeCounter {
    table: PrimeTable,
    segment_budget: u64,
    segment_size: usize,
}

impl PrimeCounter {
    pub fn new(resident_limit: u64) -> Self {
        PrimeCounter {
            table: PrimeTable::build(resident_limit),
            segment_budget: DEFAULT_SEGMENT_BUDGET,
            segment_size: DEFAULT_SEGMENT_SIZE,
        }
    }

    pub fn with_segment_budget(mut self, budget: u64) -> Self {
        self.segment_budget = budget;
        self
    }

    pub fn with_segment_size(mut self, size: usize) -> Self {
        self.segment_size = size.max(64);
        self
    }

    pub fn resident_limit(&self) -> u64 {
        self.table.limit()
    }

    pub fn table(&self) -> &PrimeTable {
        &self.table
    }

    /// Number of primes p < x with p = a (mod q).
    pub fn pi_ap(&self, x: u64, q: u64, a: u64) -> Result<u64> {
        let mut count = 0u64;
        self.for_each_prime_in_ap(x, q, a, |_| count += 1)?;
        Ok(count)
    }

    /// The primes counted by `pi_ap`, ascending.
    pub fn primes_in_ap_below(&self, x: u64, q: u64, a: u64) -> Result<Vec<u64>> {
        let mut out = Vec::new();
        self.for_each_prime_in_ap(x, q, a, |p| out.push(p))?;
        Ok(out)
    }

    fn for_each_prime_in_ap<F: FnMut(u64)>(&self, x: u64, q: u64, a: u64, mut f: F) -> Result<()> {
        let query = ApQuery::new(x, q, a)?;
        if query.x <= self.table.limit().saturating_add(1) {
            let mut p = query.a;
            while p < query.x {
                if self.table.is_prime(p) {
                    f(p);
                }
                p += query.q;
            }
            return Ok(());
        }
        if query.x > self.segment_budget {
            return Err(Error::SegmentBudget {
                x: query.x as u128,
                budget: self.segment_budget,
            });
        }
        self.segmented_walk(query, &mut f);
        Ok(())
    }

    /// Sieves [2, x) one cache-sized window at a time, visiting progression
    /// members that survive.
    fn segmented_walk<F: FnMut(u64)>(&self, query: ApQuery, f: &mut F) {
        let ApQuery { x, q, a } = query;
        let root = isqrt(x - 1);
        let local;
        let base: &PrimeTable = if self.table.limit() >= root {
            &self.table
        } else {
            local = PrimeTable::build(root);
            &local
        };

        let seg = self.segment_size as u64;
        let mut marks = vec![false; self.segment_size];
        let mut lo = 2u64;
        while lo < x {
            let hi = (lo + seg).min(x);
            marks[..(hi - lo) as usize].fill(false);
            for p in base.iter() {
                if p * p >= hi {
                    break;
                }
                let mut j = (p * p).max(lo.div_ceil(p) * p);
                while j < hi {
                    marks[(j - lo) as usize] = true;
                    j += p;
                }
            }
            // First progression member >= lo.
            let mut y = lo + (a % q + q - lo % q) % q;
            while y < hi {
                if y >= 2 && !marks[(y - lo) as usize] {
                    f(y);
                }
                y += q;
            }
            lo = hi;
        }
    }

    /// Checks pi(p^{k+1}; p, p-1) >= k for one pair.
    pub fn conjecture3_check(&self, p: u64, k: u32) -> Result<Conj3Check> {
        if !is_prime_u64(p) {
            return Err(Error::Domain(format!("{p} is not prime")));
        }
        if k < 1 {
            return Err(Error::Domain("the inequality is stated for k >= 1".into()));
        }
        let x_wide = (p as u128)
            .checked_pow(k + 1)
            .ok_or(Error::SegmentBudget { x: u128::MAX, budget: self.segment_budget })?;
        if x_wide > self.segment_budget as u128 {
            return Err(Error::SegmentBudget { x: x_wide, budget: self.segment_budget });
        }
        let x = x_wide as u64;
        let count = self.pi_ap(x, p, p - 1)?;
        Ok(Conj3Check {
            p,
            k,
            x,
            count,
            margin: count as i64 - k as i64,
            holds: count >= k as u64,
        })
    }

    /// (p_n, pi(p_n^2; p_n, p_n - 1)) for the first `count` primes.
    pub fn figure1_series(&self, count: usize) -> Result<Vec<(u64, u64)>> {
        if count > 10_000 {
            return Err(Error::Domain(format!(
                "series capped at the first 10000 primes (requested {count})"
            )));
        }
        let primes = first_primes(count, &self.table);
        let mut out = Vec::with_capacity(count);
        for p in primes {
            out.push((p, self.pi_ap(p * p, p, p - 1)?));
        }
        Ok(out)
    }

    /// Strict inequality pi(x;3,2) > x / (2 ln x), stated for x >= 151.
    pub fn bound_check_mod3(&self, x: u64) -> Result<bool> {
        if x < 151 {
            return Err(Error::OutsideBoundRange { x, min: 151 });
        }
        let count = self.pi_ap(x, 3, 2)? as f64;
        Ok(count > x as f64 / (2.0 * (x as f64).ln()))
    }

    /// Strict inequality pi(x;2,1) > x / (ln x + 2) - 1, stated for x >= 55.
    pub fn bound_check_odd(&self, x: u64) -> Result<bool> {
        if x < 55 {
            return Err(Error::OutsideBoundRange { x, min: 55 });
        }
        let count = self.pi_ap(x, 2, 1)? as f64;
        Ok(count > x as f64 / ((x as f64).ln() + 2.0) - 1.0)
    }

    /// Verifies pi(3^k; 3, 2) >= k for every 0 <= k <= k_max.
    pub fn lemma_pi_check(&self, k_max: u32) -> Result<bool> {
        for k in 0..=k_max {
            let x = 3u64
                .checked_pow(k)
                .ok_or(Error::SegmentBudget { x: u128::MAX, budget: self.segment_budget })?;
            if self.pi_ap(x, 3, 2)? < k as u64 {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// The first `count` primes, reusing `table` when it reaches far enough.
fn first_primes(count: usize, table: &PrimeTable) -> Vec<u64> {
    let bound = nth_prime_upper(count);
    let local;
    let src: &PrimeTable = if table.limit() >= bound {
        table
    } else {
        local = PrimeTable::build(bound);
        &local
    };
    src.iter().take(count).collect()
}

/// Upper bound on the n-th prime (Rosser-type estimate, padded).
fn nth_prime_upper(n: usize) -> u64 {
    if n < 6 {
        return 15;
    }
    let n = n as f64;
    (n * (n.ln() + n.ln().ln()) * 1.2) as u64
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn counter(limit: u64) -> PrimeCounter {
        PrimeCounter::new(limit)
    }

    #[test]
    fn table_membership_matches_direct_test() {
        let table = PrimeTable::build(10_000);
        for n in 0..=10_000u64 {
            assert_eq!(table.is_prime(n), is_prime_u64(n), "n = {n}");
        }
        assert_eq!(table.iter().take(5).collect::<Vec<_>>(), [2, 3, 5, 7, 11]);
    }

    #[test]
    fn pi_ap_examples() {
        let c = counter(100);
        assert_eq!(c.pi_ap(9, 3, 2).unwrap(), 2);
        assert_eq!(c.pi_ap(25, 5, 4).unwrap(), 1);
        assert_eq!(c.pi_ap(4, 2, 1).unwrap(), 1);
        assert_eq!(c.pi_ap(100, 4, 1).unwrap(), 11);
    }

    #[test]
    fn ap_query_validation() {
        assert_eq!(ApQuery::new(10, 3, 0).unwrap_err(), Error::BadApQuery { q: 3, a: 0 });
        assert_eq!(ApQuery::new(10, 3, 4).unwrap_err(), Error::BadApQuery { q: 3, a: 4 });
        assert!(ApQuery::new(0, 1, 1).is_ok());
    }

    #[test]
    fn listing_examples() {
        let c = counter(64);
        assert_eq!(c.primes_in_ap_below(27, 3, 2).unwrap(), [2, 5, 11, 17, 23]);
        assert_eq!(c.primes_in_ap_below(49, 7, 6).unwrap(), [13, 41]);
        assert_eq!(c.primes_in_ap_below(3, 3, 2).unwrap(), [2]);
        assert_eq!(
            c.primes_in_ap_below(100, 4, 1).unwrap(),
            [5, 13, 17, 29, 37, 41, 53, 61, 73, 89, 97]
        );
    }

    #[test]
    fn segmented_agrees_with_resident() {
        let small = PrimeCounter::new(64).with_segment_size(4096);
        let big = counter(120_000);
        for (x, q, a) in [(100_000, 3, 2), (65_536, 2, 1), (99_991, 7, 6), (70_001, 1, 1)] {
            assert_eq!(
                small.pi_ap(x, q, a).unwrap(),
                big.pi_ap(x, q, a).unwrap(),
                "query ({x},{q},{a})"
            );
            assert_eq!(
                small.primes_in_ap_below(x, q, a).unwrap(),
                big.primes_in_ap_below(x, q, a).unwrap()
            );
        }
    }

    #[test]
    fn budget_is_enforced() {
        let c = PrimeCounter::new(10).with_segment_budget(1000);
        assert!(matches!(c.pi_ap(10_000, 3, 2), Err(Error::SegmentBudget { .. })));
        assert_eq!(c.pi_ap(11, 3, 2).unwrap(), 2); // resident walk; 11 itself excluded
        assert_eq!(c.pi_ap(12, 3, 2).unwrap(), 3); // segmented path within budget
    }

    #[test]
    fn conjecture3_examples() {
        let c = counter(10_000);
        let r = c.conjecture3_check(3, 2).unwrap();
        assert!(r.holds && r.margin == 3 && r.count == 5 && r.x == 27);
        let r = c.conjecture3_check(5, 1).unwrap();
        assert!(r.holds && r.margin == 0);
        let r = c.conjecture3_check(7, 1).unwrap();
        assert!(r.holds && r.margin >= 1);
        assert!(c.conjecture3_check(6, 1).is_err());
        assert!(c.conjecture3_check(5, 0).is_err());
    }

    #[test]
    fn figure_series_examples() {
        let c = counter(1000);
        assert_eq!(c.figure1_series(3).unwrap(), [(2, 1), (3, 2), (5, 1)]);
        assert_eq!(c.figure1_series(1).unwrap(), [(2, 1)]);
        assert_eq!(c.figure1_series(5).unwrap()[4], (11, 2));
        assert!(c.figure1_series(10_001).is_err());
    }

    #[test]
    fn bound_checks() {
        let c = counter(1_100_000);
        assert!(c.bound_check_mod3(151).unwrap());
        assert!(c.bound_check_mod3(1_000_000).unwrap());
        assert_eq!(
            c.bound_check_mod3(150).unwrap_err(),
            Error::OutsideBoundRange { x: 150, min: 151 }
        );
        assert!(c.bound_check_odd(55).unwrap());
        assert!(c.bound_check_odd(1_000_000).unwrap());
        assert_eq!(
            c.bound_check_odd(54).unwrap_err(),
            Error::OutsideBoundRange { x: 54, min: 55 }
        );
        assert_eq!(c.pi_ap(151, 3, 2).unwrap(), 19);
        assert_eq!(c.pi_ap(55, 2, 1).unwrap(), 15);
    }

    #[test]
    fn lemma_check_examples() {
        let c = counter(600_000);
        assert!(c.lemma_pi_check(4).unwrap());
        assert!(c.lemma_pi_check(0).unwrap());
        assert!(c.lemma_pi_check(12).unwrap());
    }

    proptest! {
        #[test]
        fn count_equals_list_length(x in 0u64..5000, q in 1u64..50, a_off in 0u64..49) {
            let a = a_off % q + 1;
            let c = counter(5000);
            let list = c.primes_in_ap_below(x, q, a).unwrap();
            prop_assert_eq!(c.pi_ap(x, q, a).unwrap(), list.len() as u64);
            prop_assert!(list.windows(2).all(|w| w[0] < w[1]));
            prop_assert!(list.iter().all(|&p| is_prime_u64(p) && p < x && p % q == a % q));
        }

        #[test]
        fn monotone_in_x(x in 0u64..3000, dx in 0u64..3000, q in 1u64..30, a_off in 0u64..29) {
            let a = a_off % q + 1;
            let c = counter(8000);
            prop_assert!(c.pi_ap(x, q, a).unwrap() <= c.pi_ap(x + dx, q, a).unwrap());
        }

        #[test]
        fn residue_classes_partition_primes(x in 2u64..4000, q in 1u64..40) {
            let c = counter(4000);
            let total = c.pi_ap(x, 1, 1).unwrap();
            let mut sum = 0;
            for a in 1..=q {
                if crate::factored::gcd_u64(a, q) == 1 {
                    sum += c.pi_ap(x, q, a).unwrap();
                }
            }
            let dividing_q = (2..=q.min(x.saturating_sub(1)))
                .filter(|&p| q % p == 0 && is_prime_u64(p))
                .count() as u64;
            prop_assert_eq!(sum + dividing_q, total);
        }
    }
}
