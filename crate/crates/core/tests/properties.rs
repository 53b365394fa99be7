use lintest::adversaries::{materialize, FaultKind, FaultSpec};
use lintest::ratio::Ratio;
use lintest::testers::{
    check_input, general_linear_test, hom_self_test, pairing_check, rand_split_check, self_test,
    Budget, Witness,
};
use lintest::{rng_from_seed, LinearSpec, Oracle, VectorDomainParams};
use num_bigint::{BigInt, BigUint};
use num_traits::One;
use proptest::prelude::*;

fn small_budget() -> Budget {
    Budget::new(6, 8, Ratio::new(1, 8)).unwrap()
}

fn coefficient() -> impl Strategy<Value = BigInt> {
    prop_oneof![
        (-1000i64..1000).prop_map(BigInt::from),
        any::<i128>().prop_map(BigInt::from),
        (any::<i64>(), 0u32..200).prop_map(|(v, s)| BigInt::from(v) << s),
    ]
}

fn fault_kind() -> impl Strategy<Value = FaultKind> {
    prop::sample::select(FaultKind::ALL.to_vec())
}

/// The identity behind a witness holds for the reference linear function.
fn holds_for(witness: &Witness, f: &LinearSpec, oracle: &Oracle) -> bool {
    let value = |p: &[BigUint]| -> BigInt {
        if oracle.domain().contains(p) {
            f.eval(p).unwrap()
        } else {
            // The scalar extension point 2ⁿ.
            f.as_scalar().unwrap() * BigInt::from(p[0].clone())
        }
    };
    match witness {
        Witness::Sum { lhs, rhs, constant } => {
            let l: BigInt = lhs.iter().map(|q| value(&q.point)).sum();
            let r: BigInt = constant + rhs.iter().map(|q| value(&q.point)).sum::<BigInt>();
            l == r
        }
        Witness::NotDivisible { .. } => false,
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn linear_programs_always_pass(b in coefficient(), bits in 1u32..=96, seed in any::<u64>()) {
        let f = LinearSpec::scalar(b.clone());
        let oracle = Oracle::linear(VectorDomainParams::new(bits, 1).unwrap(), f.clone());
        let budget = small_budget();
        let mut rng = rng_from_seed(seed);
        prop_assert!(self_test(&f, &oracle, &budget, &mut rng).unwrap().passed());
        let (v, learned) = general_linear_test(&oracle, &budget, &mut rng).unwrap();
        prop_assert!(v.passed());
        prop_assert_eq!(learned, Some(b));
        let a = BigUint::from(seed) % (BigUint::one() << bits);
        prop_assert!(check_input(&a, &f, &oracle, &mut rng).unwrap().passed());
        prop_assert!(pairing_check(&a, &f, &oracle).unwrap().passed());
        prop_assert!(rand_split_check(&a, &f, &oracle, &mut rng).unwrap().passed());
    }

    #[test]
    fn linear_maps_always_pass(
        coeffs in prop::collection::vec(coefficient(), 1..=4),
        bits in 1u32..=70,
        seed in any::<u64>(),
    ) {
        let f = LinearSpec::vector(coeffs.clone()).unwrap();
        let oracle = Oracle::linear(VectorDomainParams::new(bits, coeffs.len()).unwrap(), f.clone());
        prop_assert!(hom_self_test(&f, &oracle, &small_budget(), &mut rng_from_seed(seed)).unwrap().passed());
    }

    #[test]
    fn failures_carry_sound_replayable_witnesses(
        kind in fault_kind(),
        bits in 3u32..=20,
        b in -50i64..50,
        fault_seed in any::<u64>(),
        seed in any::<u64>(),
    ) {
        let f = LinearSpec::scalar(b);
        let fraction = match kind {
            FaultKind::RandomAdditive | FaultKind::SignBalancedPaired => Some(Ratio::new(1, 4)),
            _ => None,
        };
        let spec = FaultSpec::new(kind, fraction, 3).with_seed(fault_seed);
        let adv = materialize(&spec, &f, VectorDomainParams::new(bits, 1).unwrap()).unwrap();
        let budget = Budget::for_epsilon(Ratio::new(1, 8)).unwrap();
        let mut rng = rng_from_seed(seed);
        let verdicts = [
            self_test(&f, &adv.oracle, &budget, &mut rng).unwrap(),
            hom_self_test(&f, &adv.oracle, &budget, &mut rng).unwrap(),
            check_input(&BigUint::from(5u8), &f, &adv.oracle, &mut rng).unwrap(),
        ];
        for v in verdicts {
            prop_assert!(v.queries_used <= budget.max_queries() + 3);
            if let Some(w) = &v.witness {
                prop_assert!(w.is_violated());
                prop_assert!(w.replay(&adv.oracle).unwrap());
                prop_assert!(holds_for(w, &f, &adv.oracle));
                prop_assert_eq!(w.queries().len() as u64 <= v.queries_used, true);
            } else {
                prop_assert!(v.passed());
            }
        }
        let (v, _) = general_linear_test(&adv.oracle, &budget, &mut rng).unwrap();
        prop_assert!(v.queries_used <= budget.max_queries() + 1);
        if let Some(w) = &v.witness {
            prop_assert!(w.replay(&adv.oracle).unwrap());
        }
    }

    #[test]
    fn vector_tester_generalizes_scalar(
        b in coefficient(),
        bits in 1u32..=40,
        kind in fault_kind(),
        seed in any::<u64>(),
    ) {
        let f = LinearSpec::scalar(b);
        let fraction = match kind {
            FaultKind::RandomAdditive | FaultKind::SignBalancedPaired if bits >= 3 => Some(Ratio::new(1, 4)),
            FaultKind::RandomAdditive | FaultKind::SignBalancedPaired => return Ok(()),
            _ => None,
        };
        let adv = materialize(&FaultSpec::new(kind, fraction, 1), &f, VectorDomainParams::new(bits, 1).unwrap()).unwrap();
        let budget = small_budget();
        let s = self_test(&f, &adv.oracle, &budget, &mut rng_from_seed(seed)).unwrap();
        let h = hom_self_test(&f, &adv.oracle, &budget, &mut rng_from_seed(seed)).unwrap();
        prop_assert_eq!(s, h);
    }

    #[test]
    fn verdicts_are_deterministic_per_seed(seed in any::<u64>(), fault_seed in 0u64..1000) {
        let f = LinearSpec::scalar(9);
        let spec = FaultSpec::new(FaultKind::SignBalancedPaired, Some(Ratio::new(1, 8)), 1).with_seed(fault_seed);
        let adv = materialize(&spec, &f, VectorDomainParams::new(14, 1).unwrap()).unwrap();
        let budget = Budget::for_epsilon(Ratio::new(1, 8)).unwrap();
        let a = self_test(&f, &adv.oracle, &budget, &mut rng_from_seed(seed)).unwrap();
        let b = self_test(&f, &adv.oracle, &budget, &mut rng_from_seed(seed)).unwrap();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn sign_balanced_pairs_cancel_on_wide_domains(
        bits in 2u32..=64,
        fault_seed in any::<u64>(),
        probes in prop::collection::vec(any::<u128>(), 32),
    ) {
        let f = LinearSpec::scalar(-3);
        let spec = FaultSpec::new(FaultKind::SignBalancedPaired, Some(Ratio::new(1, 2)), 7).with_seed(fault_seed);
        let adv = materialize(&spec, &f, VectorDomainParams::new(bits, 1).unwrap()).unwrap();
        prop_assert_eq!(adv.report.epsilon1.clone(), adv.report.epsilon2.clone());
        let modulus = BigUint::one() << bits;
        for p in probes {
            let x = BigUint::from(p) % &modulus;
            let partner = (&modulus - &x) % &modulus;
            let sum = adv.discrepancy(std::slice::from_ref(&x)) + adv.discrepancy(&[partner]);
            prop_assert_eq!(sum, BigInt::from(0));
        }
    }

    #[test]
    fn realizable_fractions_are_exact(bits in 1u32..=12, k in 0u64..4096, kind in fault_kind(), fault_seed in any::<u64>()) {
        let size = 1u64 << bits;
        let k = k % (size + 1);
        let fraction = Ratio::new(k as i64, size as i64);
        let f = LinearSpec::scalar(2);
        let spec = FaultSpec::new(kind, Some(fraction.clone()), 1).with_seed(fault_seed);
        let domain = VectorDomainParams::new(bits, 1).unwrap();
        match materialize(&spec, &f, domain) {
            Ok(adv) => {
                let scanned = (0..size)
                    .filter(|&x| adv.discrepancy(&[BigUint::from(x)]) != BigInt::from(0))
                    .count() as i64;
                prop_assert_eq!(adv.report.epsilon0.clone(), Ratio::new(scanned, size as i64));
                if matches!(kind, FaultKind::RandomAdditive | FaultKind::SignBalancedPaired | FaultKind::ConstantOffset) {
                    prop_assert_eq!(adv.report.epsilon0, fraction);
                }
            }
            Err(e) => {
                // Unsigned kinds take any whole number of points; paired
                // faults need an even count among the 2ⁿ - 2 points that are
                // not their own partner.
                let must_work = match kind {
                    FaultKind::RandomAdditive | FaultKind::ConstantOffset => true,
                    FaultKind::SignBalancedPaired => k.is_multiple_of(2) && k + 2 <= size,
                    _ => false,
                };
                prop_assert!(!must_work, "{} refused: {}", spec, e);
            }
        }
    }
}
