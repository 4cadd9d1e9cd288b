//! Cross-module checks that are heavier than the per-module unit tests:
//! engine invariants over sampled seeds, classifier/engine agreement on a
//! few hundred composites, and structural properties of witness sets.

use std::collections::BTreeSet;
use std::sync::OnceLock;

use num_bigint::BigUint;
use proptest::prelude::*;
use rayon::prelude::*;

use lcmseq_core::{
    all_witnesses, build_spf_sieve, classify, corollary_check, heuristic_s, is_prime_u64,
    minimal_s_search, naive_reference, run, run_from, smooth_numbers_below, triangle,
    verify_present, OddComposite, SearchBudget, Seed, SeedKind, SequenceState, SpfSieve, Verdict,
};

fn shared_sieve() -> &'static SpfSieve {
    static SIEVE: OnceLock<SpfSieve> = OnceLock::new();
    SIEVE.get_or_init(|| build_spf_sieve(302).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// One engine run checks every step-level law at once: b_n divides n,
    /// parity past n = 4, the value of b_n at prime indices, the b_2 = b_4
    /// echo, the seed-dependent b_3 rule, the accumulator product identity,
    /// the prime support of a_n, and the incremental log tracking.
    #[test]
    fn engine_invariants_for_sampled_seeds(s in 1u64..1_000_000) {
        const N_MAX: u64 = 300;
        let sieve = shared_sieve();
        let seed = Seed::new(s).unwrap();
        let seed_primes: BTreeSet<u64> = seed.factored().primes().collect();

        let mut acc = BigUint::from(s);
        let mut b2 = 0u64;
        let state = run(seed, N_MAX, sieve, |rec| {
            let (n, b) = (rec.n, rec.b);
            assert_eq!(n % b, 0, "b_{n} = {b} does not divide its index (s = {s})");
            if n >= 5 {
                assert_eq!(b % 2, 1, "b_{n} = {b} is even (s = {s})");
            }
            match n {
                2 => b2 = b,
                3 => {
                    let expected = if s % 6 == 2 || s % 6 == 4 { 3 } else { 1 };
                    assert_eq!(b, expected, "b_3 rule broken for s = {s}");
                }
                4 => assert_eq!(b, b2, "b_4 must repeat b_2 (s = {s})"),
                p if sieve.is_prime(p) => {
                    let expected = if s % p == 0 { 1 } else { p };
                    assert_eq!(b, expected, "prime-index rule broken at {p} (s = {s})");
                }
                _ => {}
            }
            acc *= BigUint::from(b + 1);
        })
        .unwrap();

        let a = state.a_factored();
        prop_assert_eq!(&a.to_biguint(), &acc, "accumulator identity broken for s = {}", s);
        for (p, _) in a.entries() {
            prop_assert!(
                *p <= N_MAX + 1 || seed_primes.contains(p),
                "prime {} in a_{} is neither small nor from the seed {}", p, N_MAX, s
            );
        }
        prop_assert!(
            (state.log2_a() - acc.bits() as f64).abs() <= 1.5,
            "log tracking drifted: log2_a = {}, true bits = {}", state.log2_a(), acc.bits()
        );
    }

    /// The factored engine and the literal big-integer recurrence agree.
    #[test]
    fn engine_matches_naive_for_sampled_seeds(s in 1u64..1_000_000_000_000) {
        let sieve = shared_sieve();
        let mut fast = Vec::new();
        run(Seed::new(s).unwrap(), 150, sieve, |rec| fast.push(rec.b)).unwrap();
        prop_assert_eq!(fast, naive_reference(s, 150).unwrap());
    }

    /// Stopping a run and resuming from the saved state reaches exactly the
    /// state of an uninterrupted run.
    #[test]
    fn runs_resume_from_intermediate_state(s in 1u64..100_000, split in 2u64..99) {
        let sieve = shared_sieve();
        let full = run(Seed::new(s).unwrap(), 100, sieve, |_| {}).unwrap();
        let half: SequenceState = run(Seed::new(s).unwrap(), split, sieve, |_| {}).unwrap();
        let resumed = run_from(half, 100, sieve, |_| {}).unwrap();
        prop_assert_eq!(full.n(), resumed.n());
        prop_assert_eq!(full.last_b(), resumed.last_b());
        prop_assert_eq!(full.a_factored(), resumed.a_factored());
    }

    /// The smooth enumeration returns exactly the values below the bound
    /// whose prime factors all divide m.
    #[test]
    fn smooth_enumeration_equals_triangle_set(m in (5u64..400).prop_map(|k| 2 * k - 1)) {
        prop_assume!(!is_prime_u64(m));
        let oc = OddComposite::new(m).unwrap();
        let primes: Vec<u64> = oc.prime_divisors().collect();
        let listed = smooth_numbers_below(&primes, m);
        let expected: Vec<u64> = (1..m).filter(|&q| triangle(q, m)).collect();
        prop_assert_eq!(listed, expected);
    }
}

/// Every witness pair certifying absence has the shape the classifier
/// promises: an odd prime divisor p of m paired with an odd q < m, coprime
/// to p, built only from primes of m, sitting at -1 mod p. The canonical
/// verdict is the (p, q)-minimum.
#[test]
fn witness_sets_are_structurally_sound_below_400() {
    for m in (9..400u64).step_by(2).filter(|&m| !is_prime_u64(m)) {
        let oc = OddComposite::new(m).unwrap();
        let witnesses = all_witnesses(&oc);
        for &(p, q) in &witnesses {
            assert!(is_prime_u64(p) && m % p == 0, "bad p in witness ({p}, {q}) for {m}");
            assert!(q % 2 == 1 && q % p != 0, "bad q in witness ({p}, {q}) for {m}");
            assert!((q + 1) % p == 0, "q is not -1 mod p in ({p}, {q}) for {m}");
            assert!(triangle(q, m), "q = {q} is not smooth over {m}");
        }
        match classify(&oc) {
            Verdict::Present => assert!(witnesses.is_empty(), "{m} present despite witnesses"),
            Verdict::Absent { p, q } => {
                let min = witnesses.iter().copied().min().unwrap();
                assert_eq!((p, q), min, "canonical witness for {m} is not minimal");
            }
        }
    }
}

/// Observed at this scale: the heuristic seed (product of primes below m
/// at -1 mod a prime divisor) already forces every present m <= 343 to
/// appear. Nothing guarantees this in general; the test pins the regression
/// surface where it is known to hold.
#[test]
fn heuristic_seed_forces_every_present_composite_below_343() {
    let sieve = build_spf_sieve(345).unwrap();
    let failures: Vec<u64> = (9..=343u64)
        .step_by(2)
        .filter(|&m| !is_prime_u64(m))
        .collect::<Vec<_>>()
        .into_par_iter()
        .filter(|&m| {
            let oc = OddComposite::new(m).unwrap();
            if !classify(&oc).is_present() {
                return false;
            }
            let recipe = heuristic_s(&oc).unwrap();
            !verify_present(m, &Seed::from_factored(recipe.s), &sieve).unwrap()
        })
        .collect();
    assert!(failures.is_empty(), "heuristic seed failed for {failures:?}");
}

/// Absence propagates to odd multiples; no present multiple of an absent
/// number exists below 400.
#[test]
fn absence_is_inherited_by_odd_multiples_below_400() {
    corollary_check(400).unwrap();
}

/// The subset search returns verified seeds that never exceed the heuristic
/// product, and lands on the known minima for small prime powers.
#[test]
fn minimal_search_is_verified_and_bounded() {
    let sieve = build_spf_sieve(300).unwrap();
    let expectations = [
        (9u64, Some("2*5")),
        (25, Some("19")),
        (49, None),
        (121, Some("43*109")),
        (169, Some("103")),
        (289, Some("67*101*271")),
    ];
    for (m, want) in expectations {
        let oc = OddComposite::new(m).unwrap();
        let found = minimal_s_search(&oc, SearchBudget::default(), &sieve)
            .unwrap()
            .unwrap_or_else(|| panic!("no seed found for {m}"));
        assert_eq!(found.kind, SeedKind::VerifiedMinimal);
        assert_eq!(found.m, m);
        assert!(
            verify_present(m, &Seed::from_factored(found.s.clone()), &sieve).unwrap(),
            "search result for {m} does not verify"
        );
        let heuristic = heuristic_s(&oc).unwrap();
        assert!(
            found.s.to_biguint() <= heuristic.s.to_biguint(),
            "search for {m} returned something larger than the heuristic product"
        );
        for p in found.s.primes() {
            assert!(m % p != 0, "seed for {m} shares the factor {p}");
        }
        if let Some(expected) = want {
            assert_eq!(found.s.to_string(), expected, "minimal seed for {m}");
        }
    }
}
