//! The program under test and the query-counting wrapper the testers see.

use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

use num_bigint::{BigInt, BigUint};
use num_traits::One;

use crate::domain::{format_point, DomainParams, LinearSpec, VectorDomainParams};
use crate::error::OracleError;

/// A program that maps domain points to integers.
///
/// Scalar programs receive a one-element slice. Implementations must be
/// deterministic: the testers assume repeated queries agree.
pub trait Program: Send + Sync {
    fn eval(&self, x: &[BigUint]) -> Result<BigInt, OracleError>;
}

impl<F> Program for F
where
    F: Fn(&[BigUint]) -> Result<BigInt, OracleError> + Send + Sync,
{
    fn eval(&self, x: &[BigUint]) -> Result<BigInt, OracleError> {
        self(x)
    }
}

/// A program that computes its linear function exactly.
#[derive(Debug, Clone)]
pub struct LinearProgram(pub LinearSpec);

impl Program for LinearProgram {
    fn eval(&self, x: &[BigUint]) -> Result<BigInt, OracleError> {
        self.0.eval(x).map_err(|e| OracleError {
            point: format_point(x),
            message: e.to_string(),
        })
    }
}

/// A program bound to a domain, with a query counter.
///
/// Queries outside the domain are rejected before they reach the program,
/// except the scalar point `2ⁿ` when the domain extension is enabled.
pub struct Oracle {
    domain: VectorDomainParams,
    extension: bool,
    program: Arc<dyn Program>,
    queries: AtomicU64,
}

impl std::fmt::Debug for Oracle {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Oracle")
            .field("domain", &self.domain)
            .field("extension", &self.extension)
            .field("queries", &self.query_count())
            .finish()
    }
}

impl Oracle {
    pub fn new(domain: VectorDomainParams, program: Arc<dyn Program>) -> Self {
        Oracle {
            domain,
            extension: false,
            program,
            queries: AtomicU64::new(0),
        }
    }

    pub fn scalar(domain: DomainParams, program: impl Program + 'static) -> Self {
        Self::new(domain.into(), Arc::new(program))
    }

    pub fn vector(domain: VectorDomainParams, program: impl Program + 'static) -> Self {
        Self::new(domain, Arc::new(program))
    }

    /// An oracle for the correct program computing `spec`.
    pub fn linear(domain: VectorDomainParams, spec: LinearSpec) -> Self {
        Self::new(domain, Arc::new(LinearProgram(spec))).with_extension(domain.dim() == 1)
    }

    /// Accept the scalar query `2ⁿ` (needed by the property tester).
    pub fn with_extension(mut self, enabled: bool) -> Self {
        self.extension = enabled && self.domain.dim() == 1;
        self
    }

    pub fn domain(&self) -> VectorDomainParams {
        self.domain
    }

    pub fn has_extension(&self) -> bool {
        self.extension
    }

    pub fn program(&self) -> &Arc<dyn Program> {
        &self.program
    }

    pub fn query_count(&self) -> u64 {
        self.queries.load(Ordering::Relaxed)
    }

    pub fn reset_query_count(&self) {
        self.queries.store(0, Ordering::Relaxed);
    }

    pub fn evaluate(&self, x: &[BigUint]) -> Result<BigInt, OracleError> {
        if !self.domain.contains(x) && !self.is_extension_point(x) {
            return Err(OracleError {
                point: format_point(x),
                message: format!(
                    "point outside the {}-bit, {}-dimensional domain",
                    self.domain.bits(),
                    self.domain.dim()
                ),
            });
        }
        self.queries.fetch_add(1, Ordering::Relaxed);
        self.program.eval(x)
    }

    fn is_extension_point(&self, x: &[BigUint]) -> bool {
        self.extension && matches!(x, [v] if *v == BigUint::one() << self.domain.bits())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts_queries_and_guards_domain() {
        let d = DomainParams::new(4).unwrap();
        let o = Oracle::linear(d.into(), LinearSpec::scalar(3));
        assert_eq!(o.evaluate(&[BigUint::from(5u8)]).unwrap(), BigInt::from(15));
        assert_eq!(o.evaluate(&[BigUint::from(5u8)]).unwrap(), BigInt::from(15));
        assert_eq!(o.query_count(), 2);
        assert_eq!(
            o.evaluate(&[BigUint::from(16u8)]).unwrap(),
            BigInt::from(48)
        );
        assert!(o.evaluate(&[BigUint::from(17u8)]).is_err());
        assert_eq!(o.query_count(), 3);

        let o = Oracle::linear(d.into(), LinearSpec::scalar(3)).with_extension(false);
        assert!(o.evaluate(&[BigUint::from(16u8)]).is_err());
    }

    #[test]
    fn closures_are_programs() {
        let d = DomainParams::new(8).unwrap();
        let o = Oracle::scalar(d, |x: &[BigUint]| Ok(BigInt::from(x[0].clone()) * 7 + 1));
        assert_eq!(o.evaluate(&[BigUint::from(2u8)]).unwrap(), BigInt::from(15));
    }
}
