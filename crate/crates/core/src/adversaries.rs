//! Faulty programs with known error profiles.
//!
//! A [`FaultSpec`] describes how a program deviates from a reference linear
//! function; [`materialize`] turns it into a deterministic [`Oracle`] and a
//! [`FaultReport`] with the exact fraction of corrupted points and their
//! signs, known by construction.
//!
//! Fault sites are chosen by a keyed permutation of the flattened domain, so
//! the same spec and site seed always produce the same program and no site
//! list needs to be stored. Domains of at most [`TABLE_BITS`] bits are
//! additionally backed by an explicit table of discrepancies.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::domain::{format_point, LinearSpec, VectorDomainParams};
use crate::error::{Error, OracleError, Result};
use crate::oracle::{Oracle, Program};
use crate::permute::{index_bits, splitmix64, Permutation};
use crate::ratio::Ratio;

/// Domains up to this many (flattened) bits get an explicit table.
pub const TABLE_BITS: u64 = 12;

/// Largest flattened domain for which a vector sign-balanced adversary can
/// enumerate its pairs.
pub const PAIRED_VECTOR_BITS: u64 = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FaultKind {
    /// No faults.
    Correct,
    /// `±magnitude` at pseudo-random sites, half of each sign.
    RandomAdditive,
    /// `+s·magnitude` at `x` and `-s·magnitude` at `-x mod 2ⁿ` for random
    /// pairs, so every pairing check still holds.
    SignBalancedPaired,
    /// `+magnitude` on the top `fraction` of the domain; with fraction 1 the
    /// affine program `f(x) + magnitude`, including at `2ⁿ`.
    ConstantOffset,
    /// `+magnitude·2ⁿ` at pseudo-random sites; with fraction 1 everywhere,
    /// including at `2ⁿ`. The divisibility check cannot see it.
    #[serde(rename = "affine-multiple-of-2n")]
    AffineMultipleOf2n,
    /// `+magnitude` at exactly one site.
    SinglePoint,
    /// `+magnitude·2ⁿ` wherever the first coordinate is odd.
    ParityOffset,
}

impl FaultKind {
    pub const ALL: [FaultKind; 7] = [
        FaultKind::Correct,
        FaultKind::RandomAdditive,
        FaultKind::SignBalancedPaired,
        FaultKind::ConstantOffset,
        FaultKind::AffineMultipleOf2n,
        FaultKind::SinglePoint,
        FaultKind::ParityOffset,
    ];

    pub fn name(self) -> &'static str {
        match self {
            FaultKind::Correct => "correct",
            FaultKind::RandomAdditive => "random-additive",
            FaultKind::SignBalancedPaired => "sign-balanced-paired",
            FaultKind::ConstantOffset => "constant-offset",
            FaultKind::AffineMultipleOf2n => "affine-multiple-of-2n",
            FaultKind::SinglePoint => "single-point",
            FaultKind::ParityOffset => "parity-offset",
        }
    }
}

impl fmt::Display for FaultKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for FaultKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        FaultKind::ALL
            .into_iter()
            .find(|k| k.name() == s.trim())
            .ok_or_else(|| Error::InvalidFault(format!("unknown fault kind {s:?}")))
    }
}

/// Where the faults go.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Sites {
    /// Pseudo-random sites keyed by this seed (independent of any tester
    /// seed).
    Seeded(u64),
    /// These points, given as coordinate lists. Each receives the kind's
    /// positive offset; for sign-balanced pairs the partner gets the
    /// negative one.
    Explicit(Vec<Vec<u64>>),
}

impl Default for Sites {
    fn default() -> Self {
        Sites::Seeded(0)
    }
}

fn default_magnitude() -> BigInt {
    BigInt::one()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FaultSpec {
    pub kind: FaultKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fraction: Option<Ratio>,
    #[serde(with = "crate::ratio::bigint_str", default = "default_magnitude")]
    pub magnitude: BigInt,
    #[serde(default)]
    pub sites: Sites,
}

impl FaultSpec {
    pub fn correct() -> Self {
        FaultSpec {
            kind: FaultKind::Correct,
            fraction: None,
            magnitude: BigInt::one(),
            sites: Sites::default(),
        }
    }

    pub fn new(kind: FaultKind, fraction: Option<Ratio>, magnitude: impl Into<BigInt>) -> Self {
        FaultSpec {
            kind,
            fraction,
            magnitude: magnitude.into(),
            sites: Sites::default(),
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.sites = Sites::Seeded(seed);
        self
    }

    pub fn single_point(site: Vec<u64>, magnitude: impl Into<BigInt>) -> Self {
        FaultSpec {
            kind: FaultKind::SinglePoint,
            fraction: None,
            magnitude: magnitude.into(),
            sites: Sites::Explicit(vec![site]),
        }
    }

    /// Parses the compact form `kind[:fraction[:magnitude]]`.
    ///
    /// For `single-point` the middle field is the site instead of a
    /// fraction, with vector coordinates separated by commas:
    /// `single-point:1234:5`, `single-point:3,4:1`. Empty fields take the
    /// defaults.
    pub fn parse_compact(s: &str) -> Result<Self> {
        let mut parts = s.split(':');
        let kind: FaultKind = parts.next().unwrap_or_default().parse()?;
        let middle = parts.next().map(str::trim).filter(|p| !p.is_empty());
        let magnitude = match parts.next().map(str::trim).filter(|p| !p.is_empty()) {
            Some(m) => m
                .parse::<BigInt>()
                .map_err(|_| Error::InvalidFault(format!("bad magnitude {m:?}")))?,
            None => BigInt::one(),
        };
        if parts.next().is_some() {
            return Err(Error::InvalidFault(format!(
                "expected kind[:fraction[:magnitude]], got {s:?}"
            )));
        }
        let mut spec = FaultSpec::new(kind, None, magnitude);
        match (kind, middle) {
            (FaultKind::SinglePoint, Some(site)) => {
                let coords = site
                    .split(',')
                    .map(|c| {
                        c.trim()
                            .parse::<u64>()
                            .map_err(|_| Error::InvalidFault(format!("bad site {site:?}")))
                    })
                    .collect::<Result<Vec<u64>>>()?;
                spec.sites = Sites::Explicit(vec![coords]);
            }
            (_, Some(f)) => spec.fraction = Some(f.parse()?),
            (_, None) => {}
        }
        Ok(spec)
    }
}

impl fmt::Display for FaultSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.kind)?;
        match (&self.sites, self.kind) {
            (Sites::Explicit(s), FaultKind::SinglePoint) if s.len() == 1 => {
                let coords: Vec<String> = s[0].iter().map(u64::to_string).collect();
                write!(f, ":{}", coords.join(","))?;
            }
            _ => {
                if let Some(fr) = &self.fraction {
                    write!(f, ":{fr}")?;
                } else {
                    write!(f, ":")?;
                }
            }
        }
        write!(f, ":{}", self.magnitude)
    }
}

/// Exact error profile of a materialized adversary relative to its
/// reference linear function.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FaultReport {
    pub kind: FaultKind,
    #[serde(with = "crate::ratio::biguint_str")]
    pub domain_size: BigUint,
    /// Points with `d(x) > 0`.
    #[serde(with = "crate::ratio::biguint_str")]
    pub positive: BigUint,
    /// Points with `d(x) < 0`.
    #[serde(with = "crate::ratio::biguint_str")]
    pub negative: BigUint,
    pub epsilon0: Ratio,
    pub epsilon1: Ratio,
    pub epsilon2: Ratio,
    pub table_backed: bool,
}

/// A materialized adversary.
pub struct Adversary {
    pub oracle: Oracle,
    pub report: FaultReport,
    program: Arc<FaultyProgram>,
}

impl Adversary {
    /// The program's deviation from the reference function at `x`.
    pub fn discrepancy(&self, x: &[BigUint]) -> BigInt {
        self.program.discrepancy(x)
    }
}

#[derive(Debug, Clone)]
enum Rule {
    None,
    Everywhere(BigInt),
    /// `value` where the first coordinate is odd.
    Parity(BigInt),
    /// Site iff `perm(idx) < sites`; `+value` below `positive`, `-value`
    /// above.
    Permuted {
        perm: Permutation,
        sites: u128,
        positive: u128,
        value: BigInt,
    },
    TopBlock {
        start: u128,
        value: BigInt,
    },
    /// Scalar sign-balanced pairs `{r, 2ⁿ - r}` for `r ∈ [1, 2ⁿ⁻¹)`.
    ScalarPairs {
        perm: Permutation,
        reps: u64,
        pairs: u64,
        bits: u32,
        seed: u64,
        value: BigInt,
    },
    Explicit(HashMap<u64, BigInt>),
}

struct FaultyProgram {
    linear: LinearSpec,
    domain: VectorDomainParams,
    rule: Rule,
    extension_value: BigInt,
    table: Option<Vec<BigInt>>,
}

fn flatten(x: &[BigUint], bits: u32) -> u64 {
    x.iter().enumerate().fold(0u64, |acc, (i, c)| {
        acc | (c.to_u64().unwrap_or(0) << (i as u32 * bits))
    })
}

fn unflatten(idx: u64, domain: &VectorDomainParams) -> Vec<BigUint> {
    let bits = domain.bits();
    let mask = if bits >= 64 {
        u64::MAX
    } else {
        (1u64 << bits) - 1
    };
    (0..domain.dim())
        .map(|i| BigUint::from((idx >> (i as u32 * bits)) & mask))
        .collect()
}

/// Coordinate-wise negation mod `2ⁿ` on a flattened index.
pub(crate) fn negate_flat(idx: u64, bits: u32, dim: usize) -> u64 {
    let mask = if bits >= 64 {
        u64::MAX
    } else {
        (1u64 << bits) - 1
    };
    let mut out = 0u64;
    for i in 0..dim {
        let shift = i as u32 * bits;
        let c = (idx >> shift) & mask;
        out |= (c.wrapping_neg() & mask) << shift;
    }
    out
}

fn pair_sign(seed: u64, rank: u64) -> bool {
    splitmix64(seed ^ splitmix64(rank)) & 1 == 0
}

impl Rule {
    fn at_index(&self, idx: u64, first_coord_odd: bool) -> BigInt {
        match self {
            Rule::None => BigInt::zero(),
            Rule::Everywhere(v) => v.clone(),
            Rule::Parity(v) => {
                if first_coord_odd {
                    v.clone()
                } else {
                    BigInt::zero()
                }
            }
            Rule::Permuted {
                perm,
                sites,
                positive,
                value,
            } => {
                let r = u128::from(perm.apply(idx));
                if r < *positive {
                    value.clone()
                } else if r < *sites {
                    -value
                } else {
                    BigInt::zero()
                }
            }
            Rule::TopBlock { start, value } => {
                if u128::from(idx) >= *start {
                    value.clone()
                } else {
                    BigInt::zero()
                }
            }
            Rule::ScalarPairs {
                perm,
                reps,
                pairs,
                bits,
                seed,
                value,
            } => {
                let half = 1u64 << (bits - 1);
                if idx == 0 || idx == half {
                    return BigInt::zero();
                }
                let partner = negate_flat(idx, *bits, 1);
                let rep = idx.min(partner);
                let rank = rep - 1;
                if perm.apply_within(rank, *reps) >= *pairs {
                    return BigInt::zero();
                }
                let positive_at_rep = pair_sign(*seed, rank);
                if (idx == rep) == positive_at_rep {
                    value.clone()
                } else {
                    -value
                }
            }
            Rule::Explicit(map) => map.get(&idx).cloned().unwrap_or_default(),
        }
    }
}

impl FaultyProgram {
    fn discrepancy(&self, x: &[BigUint]) -> BigInt {
        if self.domain.dim() == 1 && x[0].bits() > u64::from(self.domain.bits()) {
            return self.extension_value.clone();
        }
        match &self.rule {
            Rule::None => return BigInt::zero(),
            Rule::Everywhere(v) => return v.clone(),
            Rule::Parity(v) => {
                return if x[0].bit(0) {
                    v.clone()
                } else {
                    BigInt::zero()
                };
            }
            _ => {}
        }
        let idx = flatten(x, self.domain.bits());
        if let Some(table) = &self.table {
            return table[idx as usize].clone();
        }
        self.rule.at_index(idx, x[0].bit(0))
    }
}

impl Program for FaultyProgram {
    fn eval(&self, x: &[BigUint]) -> std::result::Result<BigInt, OracleError> {
        let f = self.linear.eval(x).map_err(|e| OracleError {
            point: format_point(x),
            message: e.to_string(),
        })?;
        Ok(f + self.discrepancy(x))
    }
}

fn site_count(fraction: &Ratio, domain: &VectorDomainParams) -> Result<u128> {
    if fraction.0 < Ratio::zero().0 || fraction.0 > Ratio::one().0 {
        return Err(Error::InvalidFault(format!(
            "fraction {fraction} is outside [0, 1]"
        )));
    }
    let size = BigInt::from(domain.size());
    let count = fraction.0.clone() * num_rational::BigRational::from_integer(size);
    if !count.is_integer() {
        return Err(Error::UnrealizableFraction {
            fraction: fraction.to_string(),
            domain_size: domain.size().to_string(),
        });
    }
    count.to_integer().to_u128().ok_or(Error::DomainTooLarge {
        bits: domain.total_bits(),
        limit: 64,
    })
}

fn require_index(domain: &VectorDomainParams) -> Result<()> {
    if domain.total_bits() > 64 {
        return Err(Error::DomainTooLarge {
            bits: domain.total_bits(),
            limit: 64,
        });
    }
    Ok(())
}

fn explicit_index(point: &[u64], domain: &VectorDomainParams) -> Result<u64> {
    domain.check_dim(point.len())?;
    let coords: Vec<BigUint> = point.iter().map(|&c| BigUint::from(c)).collect();
    if !domain.contains(&coords) {
        return Err(Error::InvalidFault(format!(
            "site {} is outside the domain",
            format_point(&coords)
        )));
    }
    Ok(flatten(&coords, domain.bits()))
}

struct Built {
    rule: Rule,
    extension_value: BigInt,
    positive: BigUint,
    negative: BigUint,
}

/// Orders counts of `+|mag|`-style and `-|mag|`-style sites by the sign of
/// the magnitude.
fn by_sign(with_mag: BigUint, against_mag: BigUint, mag: &BigInt) -> (BigUint, BigUint) {
    if mag.is_positive() {
        (with_mag, against_mag)
    } else {
        (against_mag, with_mag)
    }
}

fn build_rule(spec: &FaultSpec, domain: &VectorDomainParams) -> Result<Built> {
    let bits = domain.bits();
    let mag = &spec.magnitude;
    let mag_wrapped = mag << bits;
    let seed = match spec.sites {
        Sites::Seeded(s) => s,
        Sites::Explicit(_) => 0,
    };
    let mut built = Built {
        rule: Rule::None,
        extension_value: BigInt::zero(),
        positive: BigUint::zero(),
        negative: BigUint::zero(),
    };

    if let (Sites::Explicit(points), kind) = (&spec.sites, spec.kind) {
        if kind != FaultKind::Correct && kind != FaultKind::ParityOffset {
            require_index(domain)?;
            if kind == FaultKind::SinglePoint && points.len() != 1 {
                return Err(Error::InvalidFault(format!(
                    "single-point needs exactly one site, got {}",
                    points.len()
                )));
            }
            let value = if kind == FaultKind::AffineMultipleOf2n {
                mag_wrapped
            } else {
                mag.clone()
            };
            let mut map = HashMap::new();
            for p in points {
                let idx = explicit_index(p, domain)?;
                if map.insert(idx, value.clone()).is_some() {
                    return Err(Error::InvalidFault(format!("duplicate site {p:?}")));
                }
                if kind == FaultKind::SignBalancedPaired {
                    let partner = negate_flat(idx, bits, domain.dim());
                    if partner == idx {
                        return Err(Error::InvalidFault(format!("site {p:?} is its own pair")));
                    }
                    if map.insert(partner, -&value).is_some() {
                        return Err(Error::InvalidFault(format!(
                            "site {p:?} overlaps another pair"
                        )));
                    }
                }
            }
            built.positive = BigUint::from(map.values().filter(|v| v.is_positive()).count());
            built.negative = BigUint::from(map.values().filter(|v| v.is_negative()).count());
            built.rule = Rule::Explicit(map);
            return Ok(built);
        }
    }

    match spec.kind {
        FaultKind::Correct => {}
        FaultKind::ParityOffset => {
            if let Some(f) = &spec.fraction {
                if *f != Ratio::new(1, 2) {
                    return Err(Error::InvalidFault(format!(
                        "parity-offset corrupts exactly half the domain, not {f}"
                    )));
                }
            }
            (built.positive, built.negative) = by_sign(domain.size() >> 1u32, BigUint::zero(), mag);
            built.rule = Rule::Parity(mag_wrapped);
        }
        FaultKind::SinglePoint => {
            require_index(domain)?;
            let perm = Permutation::new(domain.total_bits() as u32, seed);
            let mut map = HashMap::new();
            map.insert(perm.apply(0), mag.clone());
            (built.positive, built.negative) = by_sign(BigUint::one(), BigUint::zero(), mag);
            built.rule = Rule::Explicit(map);
        }
        FaultKind::RandomAdditive => {
            let fraction = spec
                .fraction
                .as_ref()
                .ok_or_else(|| Error::InvalidFault("random-additive needs a fraction".into()))?;
            require_index(domain)?;
            let sites = site_count(fraction, domain)?;
            let positive = sites - sites / 2;
            (built.positive, built.negative) =
                by_sign(BigUint::from(positive), BigUint::from(sites / 2), mag);
            built.rule = Rule::Permuted {
                perm: Permutation::new(domain.total_bits() as u32, seed),
                sites,
                positive,
                value: mag.clone(),
            };
        }
        FaultKind::ConstantOffset | FaultKind::AffineMultipleOf2n => {
            let fraction = spec.fraction.clone().unwrap_or_else(Ratio::one);
            let value = if spec.kind == FaultKind::AffineMultipleOf2n {
                mag_wrapped
            } else {
                mag.clone()
            };
            if fraction == Ratio::one() {
                (built.positive, built.negative) = by_sign(domain.size(), BigUint::zero(), mag);
                built.extension_value = value.clone();
                built.rule = Rule::Everywhere(value);
            } else {
                require_index(domain)?;
                let sites = site_count(&fraction, domain)?;
                (built.positive, built.negative) =
                    by_sign(BigUint::from(sites), BigUint::zero(), mag);
                built.rule = if spec.kind == FaultKind::ConstantOffset {
                    Rule::TopBlock {
                        start: (1u128 << domain.total_bits()) - sites,
                        value,
                    }
                } else {
                    Rule::Permuted {
                        perm: Permutation::new(domain.total_bits() as u32, seed),
                        sites,
                        positive: sites,
                        value,
                    }
                };
            }
        }
        FaultKind::SignBalancedPaired => {
            let fraction = spec.fraction.as_ref().ok_or_else(|| {
                Error::InvalidFault("sign-balanced-paired needs a fraction".into())
            })?;
            require_index(domain)?;
            let sites = site_count(fraction, domain)?;
            if sites % 2 != 0 {
                return Err(Error::UnrealizableFraction {
                    fraction: fraction.to_string(),
                    domain_size: domain.size().to_string(),
                });
            }
            let pairs = (sites / 2) as u64;
            // Points fixed by negation (all coordinates 0 or 2ⁿ⁻¹) cannot
            // carry a balanced pair.
            let fixed = 1u128 << domain.dim();
            let available =
                ((1u128 << domain.total_bits()) - fixed.min(1u128 << domain.total_bits())) / 2;
            if u128::from(pairs) > available {
                return Err(Error::InvalidFault(format!(
                    "{pairs} sign-balanced pairs requested but the domain has only {available}"
                )));
            }
            (built.positive, built.negative) = (BigUint::from(pairs), BigUint::from(pairs));
            if pairs == 0 {
                return Ok(built);
            }
            let reps = available as u64;
            let perm = Permutation::new(index_bits(reps), seed);
            if domain.dim() == 1 {
                built.rule = Rule::ScalarPairs {
                    perm,
                    reps,
                    pairs,
                    bits,
                    seed,
                    value: mag.clone(),
                };
            } else {
                if domain.total_bits() > PAIRED_VECTOR_BITS {
                    return Err(Error::DomainTooLarge {
                        bits: domain.total_bits(),
                        limit: PAIRED_VECTOR_BITS,
                    });
                }
                let mut map = HashMap::new();
                let mut rank = 0u64;
                for idx in 0..(1u64 << domain.total_bits()) {
                    let partner = negate_flat(idx, bits, domain.dim());
                    if idx >= partner {
                        continue;
                    }
                    if perm.apply_within(rank, reps) < pairs {
                        let v = if pair_sign(seed, rank) {
                            mag.clone()
                        } else {
                            -mag
                        };
                        map.insert(partner, -&v);
                        map.insert(idx, v);
                    }
                    rank += 1;
                }
                built.rule = Rule::Explicit(map);
            }
        }
    }
    Ok(built)
}

/// Builds the adversary `spec` deviating from `linear` on `domain`.
///
/// Errors with `UnrealizableFraction` when the requested fraction of the
/// domain is not a whole number of points.
pub fn materialize(
    spec: &FaultSpec,
    linear: &LinearSpec,
    domain: VectorDomainParams,
) -> Result<Adversary> {
    domain.check_dim(linear.dim())?;
    if spec.kind != FaultKind::Correct && spec.magnitude.is_zero() {
        return Err(Error::InvalidFault(format!(
            "{} needs a nonzero magnitude",
            spec.kind
        )));
    }
    let built = build_rule(spec, &domain)?;
    let table = (domain.total_bits() <= TABLE_BITS).then(|| {
        (0..1u64 << domain.total_bits())
            .map(|idx| built.rule.at_index(idx, idx & 1 == 1))
            .collect::<Vec<_>>()
    });

    let size = domain.size();
    let size_big = BigInt::from(size.clone());
    let frac = |count: &BigUint| {
        Ratio(num_rational::BigRational::new(
            BigInt::from(count.clone()),
            size_big.clone(),
        ))
    };
    let report = FaultReport {
        kind: spec.kind,
        domain_size: size.clone(),
        epsilon0: frac(&(&built.positive + &built.negative)),
        epsilon1: frac(&built.positive),
        epsilon2: frac(&built.negative),
        positive: built.positive,
        negative: built.negative,
        table_backed: table.is_some(),
    };
    let program = Arc::new(FaultyProgram {
        linear: linear.clone(),
        domain,
        rule: built.rule,
        extension_value: built.extension_value,
        table,
    });
    let oracle = Oracle::new(domain, program.clone()).with_extension(domain.dim() == 1);
    Ok(Adversary {
        oracle,
        report,
        program,
    })
}

/// The representative adversaries at one domain size: every kind at the
/// fractions it supports, skipping those the domain cannot realize.
pub fn zoo(
    linear: &LinearSpec,
    domain: VectorDomainParams,
    seed: u64,
) -> Vec<(FaultSpec, Adversary)> {
    let mut specs = vec![FaultSpec::correct()];
    for f in [Ratio::new(1, 8), Ratio::new(1, 4), Ratio::new(1, 2)] {
        specs.push(FaultSpec::new(
            FaultKind::RandomAdditive,
            Some(f.clone()),
            1,
        ));
        specs.push(FaultSpec::new(
            FaultKind::SignBalancedPaired,
            Some(f.clone()),
            1,
        ));
        specs.push(FaultSpec::new(FaultKind::ConstantOffset, Some(f), 1));
    }
    specs.push(FaultSpec::new(FaultKind::ConstantOffset, None, 1));
    specs.push(FaultSpec::new(
        FaultKind::RandomAdditive,
        Some(Ratio::new(1, 4)),
        3,
    ));
    specs.push(FaultSpec::new(
        FaultKind::AffineMultipleOf2n,
        Some(Ratio::new(1, 4)),
        1,
    ));
    specs.push(FaultSpec::new(FaultKind::AffineMultipleOf2n, None, -1));
    specs.push(FaultSpec::new(FaultKind::SinglePoint, None, 5));
    specs.push(FaultSpec::new(FaultKind::ParityOffset, None, 1));
    specs
        .into_iter()
        .map(|s| s.with_seed(seed))
        .filter_map(|s| materialize(&s, linear, domain).ok().map(|a| (s, a)))
        .collect()
}

pub(crate) fn point_of_index(idx: u64, domain: &VectorDomainParams) -> Vec<BigUint> {
    unflatten(idx, domain)
}

pub(crate) fn index_of_point(x: &[BigUint], bits: u32) -> u64 {
    flatten(x, bits)
}
