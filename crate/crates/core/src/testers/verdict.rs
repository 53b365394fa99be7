use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::One;
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::error::OracleError;
use crate::oracle::Oracle;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Outcome {
    Pass,
    Fail,
}

/// The stage of a tester that rejected the program.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FailureSite {
    /// `P(x) + P(2ⁿ - x)` disagreed with the known value at `2ⁿ`.
    PairingLoop,
    /// A random split `x = x₁ + x₂ (mod 2ⁿ)` was not additive.
    SplitLoop,
    /// `P(2ⁿ)` was not a multiple of `2ⁿ`.
    DivisibilityCheck,
    /// The split at the checked input was not additive.
    FinalSplit,
    None,
}

/// One oracle query and its answer.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Query {
    pub point: Vec<BigUint>,
    pub answer: BigInt,
}

impl Serialize for Query {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("Query", 2)?;
        let point: Vec<String> = self.point.iter().map(|c| c.to_string()).collect();
        st.serialize_field("point", &point)?;
        st.serialize_field("answer", &self.answer.to_string())?;
        st.end()
    }
}

/// The evidence behind a FAIL: the queries and the identity they violate.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "equation", rename_all = "snake_case")]
pub enum Witness {
    /// `Σ P(lhs) ≠ constant + Σ P(rhs)`.
    Sum {
        lhs: Vec<Query>,
        rhs: Vec<Query>,
        #[serde(with = "crate::ratio::bigint_str")]
        constant: BigInt,
    },
    /// `2^bits ∤ P(point)`.
    NotDivisible { query: Query, bits: u32 },
}

impl Witness {
    /// Whether the recorded answers violate the identity.
    pub fn is_violated(&self) -> bool {
        match self {
            Witness::Sum { lhs, rhs, constant } => {
                let left: BigInt = lhs.iter().map(|q| &q.answer).sum();
                let right: BigInt = constant + rhs.iter().map(|q| &q.answer).sum::<BigInt>();
                left != right
            }
            Witness::NotDivisible { query, bits } => {
                !query.answer.is_multiple_of(&(BigInt::one() << *bits))
            }
        }
    }

    pub fn queries(&self) -> Vec<&Query> {
        match self {
            Witness::Sum { lhs, rhs, .. } => lhs.iter().chain(rhs).collect(),
            Witness::NotDivisible { query, .. } => vec![query],
        }
    }

    /// Re-issues the witness queries against `oracle` and reports whether the
    /// fresh answers still violate the identity.
    pub fn replay(&self, oracle: &Oracle) -> Result<bool, OracleError> {
        let requery = |qs: &[Query]| -> Result<Vec<Query>, OracleError> {
            qs.iter()
                .map(|q| {
                    Ok(Query {
                        point: q.point.clone(),
                        answer: oracle.evaluate(&q.point)?,
                    })
                })
                .collect()
        };
        let fresh = match self {
            Witness::Sum { lhs, rhs, constant } => Witness::Sum {
                lhs: requery(lhs)?,
                rhs: requery(rhs)?,
                constant: constant.clone(),
            },
            Witness::NotDivisible { query, bits } => Witness::NotDivisible {
                query: requery(std::slice::from_ref(query))?.remove(0),
                bits: *bits,
            },
        };
        Ok(fresh.is_violated())
    }
}

/// The result of one tester run.
///
/// `outcome` is FAIL exactly when a witness is present.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Verdict {
    pub outcome: Outcome,
    pub failure_site: FailureSite,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Witness>,
    pub queries_used: u64,
}

impl Verdict {
    pub fn pass(queries_used: u64) -> Self {
        Verdict {
            outcome: Outcome::Pass,
            failure_site: FailureSite::None,
            witness: None,
            queries_used,
        }
    }

    pub fn fail(site: FailureSite, witness: Witness, queries_used: u64) -> Self {
        debug_assert!(site != FailureSite::None);
        Verdict {
            outcome: Outcome::Fail,
            failure_site: site,
            witness: Some(witness),
            queries_used,
        }
    }

    pub fn passed(&self) -> bool {
        self.outcome == Outcome::Pass
    }

    pub fn failed(&self) -> bool {
        self.outcome == Outcome::Fail
    }
}
