//! The testing algorithms.
//!
//! Every tester returns a [`Verdict`]. A program that computes the claimed
//! linear function everywhere always passes; the loop bounds in [`Budget`]
//! make an `ε`-far program fail with probability at least 3/4.

mod budget;
mod verdict;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Zero};
use rand::RngCore;

pub use budget::{budget_for, calibrate, Budget, Calibration};
pub use verdict::{FailureSite, Outcome, Query, Verdict, Witness};

use crate::domain::{
    sample_point, sample_uniform, shift_mul_pow2, split_random_multi, DomainParams, LinearSpec,
    SplitOutcome,
};
use crate::error::{Error, Result};
use crate::oracle::Oracle;
use crate::ratio::Ratio;

/// Counts the queries one tester run issues.
struct Session<'a> {
    oracle: &'a Oracle,
    used: u64,
}

impl<'a> Session<'a> {
    fn new(oracle: &'a Oracle) -> Self {
        Session { oracle, used: 0 }
    }

    fn ask(&mut self, point: Vec<BigUint>) -> Result<Query> {
        let answer = self.oracle.evaluate(&point)?;
        self.used += 1;
        Ok(Query { point, answer })
    }
}

fn scalar_coefficient(spec: &LinearSpec) -> Result<&BigInt> {
    spec.as_scalar().ok_or(Error::DimensionMismatch {
        expected: 1,
        actual: spec.dim(),
    })
}

fn scalar_domain(oracle: &Oracle) -> Result<DomainParams> {
    let d = oracle.domain();
    d.check_dim(1)?;
    Ok(d.coordinate())
}

/// One pairing iteration: `P(x) + P(-x mod 2ⁿ) = 2ⁿ·Σ_{xᵢ≠0} bᵢ`.
///
/// `wrap_value(nonzero)` yields the right-hand side given which coordinates
/// of `x` are nonzero. The all-zero point degenerates to the single query
/// `P(0) = 0`.
fn pairing_iteration(
    session: &mut Session<'_>,
    x: Vec<BigUint>,
    bits: u32,
    wrap_value: impl FnOnce(&[bool]) -> BigInt,
) -> Result<Option<Witness>> {
    let nonzero: Vec<bool> = x.iter().map(|c| !c.is_zero()).collect();
    if !nonzero.iter().any(|&nz| nz) {
        let q = session.ask(x)?;
        if q.answer.is_zero() {
            return Ok(None);
        }
        return Ok(Some(Witness::Sum {
            lhs: vec![q],
            rhs: vec![],
            constant: BigInt::zero(),
        }));
    }
    let modulus = BigUint::one() << bits;
    let partner: Vec<BigUint> = x
        .iter()
        .map(|c| {
            if c.is_zero() {
                BigUint::zero()
            } else {
                &modulus - c
            }
        })
        .collect();
    let target = wrap_value(&nonzero);
    let qx = session.ask(x)?;
    let qp = session.ask(partner)?;
    if &qx.answer + &qp.answer == target {
        return Ok(None);
    }
    Ok(Some(Witness::Sum {
        lhs: vec![qx, qp],
        rhs: vec![],
        constant: target,
    }))
}

/// Split check against a known wrap correction `Σ δᵢ·2ⁿ·bᵢ`:
/// `P(x₁) + P(x₂) = correction + P(x)`. Queries `x₁`, `x₂`, `x` in order.
fn split_iteration(
    session: &mut Session<'_>,
    x: &[BigUint],
    split: SplitOutcome,
    correction: BigInt,
) -> Result<Option<Witness>> {
    let q1 = session.ask(split.x1)?;
    let q2 = session.ask(split.x2)?;
    let qx = session.ask(x.to_vec())?;
    if &q1.answer + &q2.answer == &correction + &qx.answer {
        return Ok(None);
    }
    Ok(Some(Witness::Sum {
        lhs: vec![q1, q2],
        rhs: vec![qx],
        constant: correction,
    }))
}

fn scalar_split(
    session: &mut Session<'_>,
    x: &BigUint,
    b: &BigInt,
    params: DomainParams,
    rng: &mut dyn RngCore,
) -> Result<Option<Witness>> {
    let x1 = sample_uniform(params, rng);
    let (x1, x2, delta) = SplitOutcome::from_draw(x, x1, params.bits());
    let correction = if delta {
        shift_mul_pow2(b, params.bits())
    } else {
        BigInt::zero()
    };
    let split = SplitOutcome {
        x1: vec![x1],
        x2: vec![x2],
        delta: vec![delta],
    };
    split_iteration(session, std::slice::from_ref(x), split, correction)
}

fn finish(session: Session<'_>, witness: Option<Witness>, site: FailureSite) -> Verdict {
    match witness {
        Some(w) => Verdict::fail(site, w, session.used),
        None => Verdict::pass(session.used),
    }
}

/// A single pairing iteration at `x` for a scalar specification.
pub fn pairing_check(x: &BigUint, spec: &LinearSpec, oracle: &Oracle) -> Result<Verdict> {
    let b = scalar_coefficient(spec)?;
    let params = scalar_domain(oracle)?;
    let mut session = Session::new(oracle);
    let w = pairing_iteration(&mut session, vec![x.clone()], params.bits(), |_| {
        shift_mul_pow2(b, params.bits())
    })?;
    Ok(finish(session, w, FailureSite::PairingLoop))
}

/// Checks additivity at `x` along one random split: three queries, FAIL iff
/// `P(x₁) + P(x₂) ≠ b·δ·2ⁿ + P(x)`.
pub fn rand_split_check(
    x: &BigUint,
    spec: &LinearSpec,
    oracle: &Oracle,
    rng: &mut dyn RngCore,
) -> Result<Verdict> {
    let b = scalar_coefficient(spec)?;
    let params = scalar_domain(oracle)?;
    let mut session = Session::new(oracle);
    let w = scalar_split(&mut session, x, b, params, rng)?;
    Ok(finish(session, w, FailureSite::SplitLoop))
}

/// Self-tester for `f_b(x) = b·x` on `D_n`.
///
/// Runs `k₁` pairing checks `P(x) + P(2ⁿ - x) = b·2ⁿ` and then `k₂` random
/// split checks, each at a fresh uniform `x`. At most `2k₁ + 3k₂` queries.
pub fn self_test(
    spec: &LinearSpec,
    oracle: &Oracle,
    budget: &Budget,
    rng: &mut dyn RngCore,
) -> Result<Verdict> {
    budget.validate()?;
    let b = scalar_coefficient(spec)?;
    let params = scalar_domain(oracle)?;
    let bits = params.bits();
    let mut session = Session::new(oracle);
    let target = shift_mul_pow2(b, bits);

    for _ in 0..budget.k1 {
        let x = sample_uniform(params, rng);
        if let Some(w) = pairing_iteration(&mut session, vec![x], bits, |_| target.clone())? {
            return Ok(Verdict::fail(FailureSite::PairingLoop, w, session.used));
        }
    }
    for _ in 0..budget.k2 {
        let x = sample_uniform(params, rng);
        if let Some(w) = scalar_split(&mut session, &x, b, params, rng)? {
            return Ok(Verdict::fail(FailureSite::SplitLoop, w, session.used));
        }
    }
    Ok(Verdict::pass(session.used))
}

/// Property tester for linearity: passes every `x ↦ b·x` and learns `b`.
///
/// The oracle must accept the query `2ⁿ`. Uses at most `1 + 2k₁ + 3k₂`
/// queries. The learned coefficient is returned only on PASS.
pub fn general_linear_test(
    oracle: &Oracle,
    budget: &Budget,
    rng: &mut dyn RngCore,
) -> Result<(Verdict, Option<BigInt>)> {
    budget.validate()?;
    let params = scalar_domain(oracle)?;
    if !oracle.has_extension() {
        return Err(Error::InvalidDomain(
            "the property tester queries 2^n; enable the oracle's domain extension".into(),
        ));
    }
    let bits = params.bits();
    let mut session = Session::new(oracle);

    let qa = session.ask(vec![params.size()])?;
    let modulus = BigInt::one() << bits;
    let (b, rem) = qa.answer.div_mod_floor(&modulus);
    if !rem.is_zero() {
        let w = Witness::NotDivisible { query: qa, bits };
        return Ok((
            Verdict::fail(FailureSite::DivisibilityCheck, w, session.used),
            None,
        ));
    }
    let a = qa.answer;

    for _ in 0..budget.k1 {
        let x = sample_uniform(params, rng);
        if let Some(w) = pairing_iteration(&mut session, vec![x], bits, |_| a.clone())? {
            return Ok((
                Verdict::fail(FailureSite::PairingLoop, w, session.used),
                None,
            ));
        }
    }
    for _ in 0..budget.k2 {
        let x = sample_uniform(params, rng);
        if let Some(w) = scalar_split(&mut session, &x, &b, params, rng)? {
            return Ok((Verdict::fail(FailureSite::SplitLoop, w, session.used), None));
        }
    }
    Ok((Verdict::pass(session.used), Some(b)))
}

fn check_vector_inputs(spec: &LinearSpec, oracle: &Oracle) -> Result<()> {
    oracle.domain().check_dim(spec.dim())
}

/// Additivity along one coordinate-wise random split of a vector:
/// FAIL iff `P(y) + P(z) ≠ Σ δᵢ·2ⁿ·bᵢ + P(x)`.
pub fn rand_split_check_multi(
    x: &[BigUint],
    spec: &LinearSpec,
    oracle: &Oracle,
    rng: &mut dyn RngCore,
) -> Result<Verdict> {
    check_vector_inputs(spec, oracle)?;
    let params = oracle.domain();
    let mut session = Session::new(oracle);
    let split = split_random_multi(x, &params, rng)?;
    let correction = split.wrap_correction(spec.coefficients(), params.bits());
    let w = split_iteration(&mut session, x, split, correction)?;
    Ok(finish(session, w, FailureSite::SplitLoop))
}

/// A single vector pairing iteration at `x`.
pub fn pairing_check_multi(x: &[BigUint], spec: &LinearSpec, oracle: &Oracle) -> Result<Verdict> {
    check_vector_inputs(spec, oracle)?;
    let params = oracle.domain();
    params.check_dim(x.len())?;
    let mut session = Session::new(oracle);
    let w = pairing_iteration(&mut session, x.to_vec(), params.bits(), |nz| {
        wrapped_sum(spec, nz, params.bits())
    })?;
    Ok(finish(session, w, FailureSite::PairingLoop))
}

fn wrapped_sum(spec: &LinearSpec, nonzero: &[bool], bits: u32) -> BigInt {
    let s: BigInt = spec
        .coefficients()
        .iter()
        .zip(nonzero)
        .filter(|(_, &nz)| nz)
        .map(|(b, _)| b)
        .sum();
    shift_mul_pow2(&s, bits)
}

/// Self-tester for a linear homomorphism `x ↦ Σ bᵢxᵢ` on `D_nᵐ`.
///
/// The pairing loop checks `P(x) + P(a - x) = 2ⁿ·Σbᵢ` with `a = ⟨2ⁿ, …, 2ⁿ⟩`.
/// Coordinates with `xᵢ = 0` would put `2ⁿ` outside the domain; they are
/// paired with `0` instead and their `2ⁿ·bᵢ` term is dropped, which is the
/// same identity with the known values `f(2ⁿeᵢ)` substituted. With `m = 1`
/// this is exactly [`self_test`].
pub fn hom_self_test(
    spec: &LinearSpec,
    oracle: &Oracle,
    budget: &Budget,
    rng: &mut dyn RngCore,
) -> Result<Verdict> {
    budget.validate()?;
    check_vector_inputs(spec, oracle)?;
    let params = oracle.domain();
    let bits = params.bits();
    let mut session = Session::new(oracle);

    for _ in 0..budget.k1 {
        let x = sample_point(&params, rng);
        let w = pairing_iteration(&mut session, x, bits, |nz| wrapped_sum(spec, nz, bits))?;
        if let Some(w) = w {
            return Ok(Verdict::fail(FailureSite::PairingLoop, w, session.used));
        }
    }
    for _ in 0..budget.k2 {
        let x = sample_point(&params, rng);
        let split = split_random_multi(&x, &params, rng)?;
        let correction = split.wrap_correction(spec.coefficients(), bits);
        if let Some(w) = split_iteration(&mut session, &x, split, correction)? {
            return Ok(Verdict::fail(FailureSite::SplitLoop, w, session.used));
        }
    }
    Ok(Verdict::pass(session.used))
}

/// The closeness parameter the checker's embedded self-test runs at.
pub fn checker_epsilon() -> Ratio {
    Ratio::new(1, 8)
}

/// Checks the program's answer at the single input `a`.
///
/// Runs [`self_test`] at `ε = 1/8` (budget `(96, 709)`), then one random
/// split at `a`. At most `2k₁ + 3k₂ + 3` queries.
pub fn check_input(
    a: &BigUint,
    spec: &LinearSpec,
    oracle: &Oracle,
    rng: &mut dyn RngCore,
) -> Result<Verdict> {
    let params = scalar_domain(oracle)?;
    if !params.contains(a) {
        return Err(Error::InvalidDomain(format!(
            "checked input {a} is not a {}-bit number",
            params.bits()
        )));
    }
    let b = scalar_coefficient(spec)?;
    let budget = Budget::for_epsilon(checker_epsilon())?;
    let first = self_test(spec, oracle, &budget, rng)?;
    if first.failed() {
        return Ok(first);
    }
    let mut session = Session::new(oracle);
    session.used = first.queries_used;
    let w = scalar_split(&mut session, a, b, params, rng)?;
    Ok(finish(session, w, FailureSite::FinalSplit))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::VectorDomainParams;
    use crate::rng_from_seed;
    use num_bigint::ToBigInt;

    fn big(v: u64) -> BigUint {
        BigUint::from(v)
    }

    fn oracle_from(bits: u32, f: impl Fn(&BigUint) -> BigInt + Send + Sync + 'static) -> Oracle {
        Oracle::scalar(DomainParams::new(bits).unwrap(), move |x: &[BigUint]| {
            Ok(f(&x[0]))
        })
        .with_extension(true)
    }

    fn standard() -> Budget {
        Budget::for_epsilon(Ratio::new(1, 8)).unwrap()
    }

    #[test]
    fn correct_program_passes_split() {
        let d = DomainParams::new(8).unwrap();
        let o = Oracle::linear(d.into(), LinearSpec::scalar(3));
        for seed in 0..50 {
            let v = rand_split_check(
                &big(seed * 5 % 256),
                &LinearSpec::scalar(3),
                &o,
                &mut rng_from_seed(seed),
            )
            .unwrap();
            assert!(v.passed());
            assert_eq!(v.queries_used, 3);
            assert!(v.witness.is_none());
        }
    }

    #[test]
    fn constant_offset_fails_every_split() {
        let o = oracle_from(8, |x| x.to_bigint().unwrap() * 3 + 1);
        for seed in 0..50 {
            let v = rand_split_check(
                &big(200),
                &LinearSpec::scalar(3),
                &o,
                &mut rng_from_seed(seed),
            )
            .unwrap();
            assert!(v.failed());
            assert_eq!(v.failure_site, FailureSite::SplitLoop);
            let w = v.witness.unwrap();
            assert!(w.is_violated());
            assert!(w.replay(&o).unwrap());
        }
    }

    #[test]
    fn pairing_at_zero_asserts_zero() {
        let o = oracle_from(8, |x| x.to_bigint().unwrap() * 3 + 1);
        let v = pairing_check(&big(0), &LinearSpec::scalar(3), &o).unwrap();
        assert!(v.failed());
        assert_eq!(v.queries_used, 1);
        let ok = oracle_from(8, |x| x.to_bigint().unwrap() * 3);
        let v = pairing_check(&big(0), &LinearSpec::scalar(3), &ok).unwrap();
        assert!(v.passed());
        let v = pairing_check(&big(17), &LinearSpec::scalar(3), &ok).unwrap();
        assert!(v.passed());
        assert_eq!(v.queries_used, 2);
    }

    #[test]
    fn self_test_rejects_vector_spec_and_bad_budget() {
        let d = DomainParams::new(8).unwrap();
        let o = Oracle::linear(d.into(), LinearSpec::scalar(3));
        let spec = LinearSpec::vector(vec![1.into(), 2.into()]).unwrap();
        assert!(matches!(
            self_test(&spec, &o, &standard(), &mut rng_from_seed(0)),
            Err(Error::DimensionMismatch { .. })
        ));
        let bad = Budget {
            k1: 1,
            k2: 1,
            epsilon: Ratio::new(3, 4),
        };
        assert!(matches!(
            self_test(&LinearSpec::scalar(3), &o, &bad, &mut rng_from_seed(0)),
            Err(Error::InvalidBudget(_))
        ));
    }

    #[test]
    fn correct_program_uses_full_budget() {
        let d = DomainParams::new(16).unwrap();
        let o = Oracle::linear(d.into(), LinearSpec::scalar(-5));
        let budget = standard();
        let v = self_test(&LinearSpec::scalar(-5), &o, &budget, &mut rng_from_seed(9)).unwrap();
        assert!(v.passed());
        assert!(v.queries_used <= budget.max_queries());
        assert_eq!(o.query_count(), v.queries_used);
    }

    #[test]
    fn property_tester_learns_coefficient() {
        let o = oracle_from(8, |x| x.to_bigint().unwrap() * 7);
        let (v, b) = general_linear_test(&o, &standard(), &mut rng_from_seed(1)).unwrap();
        assert!(v.passed());
        assert_eq!(b, Some(BigInt::from(7)));

        let o = oracle_from(8, |x| x.to_bigint().unwrap() * 7 + 3);
        let (v, b) = general_linear_test(&o, &standard(), &mut rng_from_seed(1)).unwrap();
        assert_eq!(v.failure_site, FailureSite::DivisibilityCheck);
        assert_eq!(v.queries_used, 1);
        assert_eq!(b, None);
        match v.witness.as_ref().unwrap() {
            Witness::NotDivisible { query, bits } => {
                assert_eq!(query.answer, BigInt::from(1795));
                assert_eq!(*bits, 8);
            }
            other => panic!("unexpected witness {other:?}"),
        }
        assert!(v.witness.unwrap().replay(&o).unwrap());
    }

    #[test]
    fn property_tester_needs_extension() {
        let d = DomainParams::new(8).unwrap();
        let o = Oracle::linear(d.into(), LinearSpec::scalar(7)).with_extension(false);
        assert!(general_linear_test(&o, &standard(), &mut rng_from_seed(1)).is_err());
    }

    #[test]
    fn negative_and_zero_coefficients_are_learned() {
        for b in [-9i64, 0] {
            let o = oracle_from(10, move |x| x.to_bigint().unwrap() * b);
            let (v, learned) = general_linear_test(&o, &standard(), &mut rng_from_seed(4)).unwrap();
            assert!(v.passed());
            assert_eq!(learned, Some(BigInt::from(b)));
        }
    }

    #[test]
    fn multi_split_examples() {
        let d = VectorDomainParams::new(6, 2).unwrap();
        let spec = LinearSpec::vector(vec![2.into(), (-3).into()]).unwrap();
        let good = Oracle::linear(d, spec.clone());
        let bad = Oracle::vector(d, {
            let spec = spec.clone();
            move |x: &[BigUint]| Ok(spec.eval(x).unwrap() + 1)
        });
        for seed in 0..30 {
            let x = vec![big(seed), big(63 - seed)];
            assert!(
                rand_split_check_multi(&x, &spec, &good, &mut rng_from_seed(seed))
                    .unwrap()
                    .passed()
            );
            let v = rand_split_check_multi(&x, &spec, &bad, &mut rng_from_seed(seed)).unwrap();
            assert!(v.failed());
            assert!(v.witness.unwrap().replay(&bad).unwrap());
        }
        assert!(matches!(
            rand_split_check_multi(&[big(1)], &spec, &good, &mut rng_from_seed(0)),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn vector_pairing_drops_zero_coordinates() {
        let d = VectorDomainParams::new(4, 3).unwrap();
        let spec = LinearSpec::vector(vec![1.into(), 5.into(), (-2).into()]).unwrap();
        let o = Oracle::linear(d, spec.clone());
        for x in [[0u64, 0, 0], [0, 3, 0], [7, 0, 15], [1, 2, 3]] {
            let x: Vec<BigUint> = x.iter().map(|&v| big(v)).collect();
            let v = pairing_check_multi(&x, &spec, &o).unwrap();
            assert!(v.passed(), "{x:?}");
        }
    }

    #[test]
    fn checker_catches_single_bad_input() {
        let a = 1234u64;
        let o = oracle_from(16, move |x| {
            let v = x.to_bigint().unwrap() * 3;
            if *x == BigUint::from(a) {
                v + 5
            } else {
                v
            }
        });
        let v = check_input(&big(a), &LinearSpec::scalar(3), &o, &mut rng_from_seed(2)).unwrap();
        assert!(v.failed());
        assert_eq!(v.failure_site, FailureSite::FinalSplit);
        assert!(v.queries_used <= standard().max_queries() + 3);
        assert!(v.witness.unwrap().replay(&o).unwrap());
    }
}
