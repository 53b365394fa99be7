//! The testing domain `D_n = {0, ..., 2ⁿ-1}`, its vector form `D_nᵐ`, the
//! claimed linear function, and the random split both tester families use.

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Zero};
use rand::RngCore;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// The domain of `n`-bit unsigned integers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DomainParams {
    bits: u32,
}

impl DomainParams {
    pub fn new(bits: u32) -> Result<Self> {
        if bits == 0 {
            return Err(Error::InvalidDomain("bit width must be at least 1".into()));
        }
        Ok(DomainParams { bits })
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }

    /// `2ⁿ`, which is both the domain size and the wraparound modulus.
    pub fn size(&self) -> BigUint {
        BigUint::one() << self.bits
    }

    pub fn contains(&self, x: &BigUint) -> bool {
        x.bits() <= u64::from(self.bits)
    }
}

/// The domain of `m`-dimensional vectors with `n`-bit coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct VectorDomainParams {
    bits: u32,
    dim: usize,
}

impl VectorDomainParams {
    pub fn new(bits: u32, dim: usize) -> Result<Self> {
        if bits == 0 {
            return Err(Error::InvalidDomain("bit width must be at least 1".into()));
        }
        if dim == 0 {
            return Err(Error::InvalidDomain("dimension must be at least 1".into()));
        }
        Ok(VectorDomainParams { bits, dim })
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn coordinate(&self) -> DomainParams {
        DomainParams { bits: self.bits }
    }

    /// `m·n`, the number of bits in a flattened point.
    pub fn total_bits(&self) -> u64 {
        u64::from(self.bits) * self.dim as u64
    }

    /// `2^{mn}`.
    pub fn size(&self) -> BigUint {
        BigUint::one() << self.total_bits()
    }

    pub fn contains(&self, x: &[BigUint]) -> bool {
        x.len() == self.dim && x.iter().all(|c| c.bits() <= u64::from(self.bits))
    }

    pub fn check_dim(&self, actual: usize) -> Result<()> {
        if actual != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                actual,
            });
        }
        Ok(())
    }
}

impl From<DomainParams> for VectorDomainParams {
    fn from(p: DomainParams) -> Self {
        VectorDomainParams {
            bits: p.bits,
            dim: 1,
        }
    }
}

/// The function a program claims to compute: `x ↦ Σ bᵢxᵢ`.
///
/// A single coefficient is the scalar case `f_b(x) = b·x`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LinearSpec {
    #[serde(with = "crate::ratio::vec_bigint_str")]
    coefficients: Vec<BigInt>,
}

impl LinearSpec {
    pub fn scalar(b: impl Into<BigInt>) -> Self {
        LinearSpec {
            coefficients: vec![b.into()],
        }
    }

    pub fn vector(coefficients: Vec<BigInt>) -> Result<Self> {
        if coefficients.is_empty() {
            return Err(Error::InvalidDomain(
                "a linear function needs at least one coefficient".into(),
            ));
        }
        Ok(LinearSpec { coefficients })
    }

    pub fn coefficients(&self) -> &[BigInt] {
        &self.coefficients
    }

    pub fn dim(&self) -> usize {
        self.coefficients.len()
    }

    /// The coefficient `b` when this is a scalar function.
    pub fn as_scalar(&self) -> Option<&BigInt> {
        match self.coefficients.as_slice() {
            [b] => Some(b),
            _ => None,
        }
    }

    pub fn eval(&self, x: &[BigUint]) -> Result<BigInt> {
        if x.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                actual: x.len(),
            });
        }
        Ok(self
            .coefficients
            .iter()
            .zip(x)
            .map(|(b, xi)| b * BigInt::from(xi.clone()))
            .sum())
    }

    /// `2ⁿ · Σ bᵢ`, computed with a shift.
    pub fn value_at_wrap(&self, bits: u32) -> BigInt {
        shift_mul_pow2(&self.coefficients.iter().sum(), bits)
    }
}

/// `b · 2ⁿ` by shifting.
pub fn shift_mul_pow2(b: &BigInt, n: u32) -> BigInt {
    b << n
}

/// Draws a uniform element of `[0, 2ⁿ-1]` from exactly `n` random bits.
///
/// Bits come from whole 64-bit words; the unused high bits of the last word
/// are discarded so the stream position advances by `⌈n/64⌉` words.
pub fn sample_uniform<R: RngCore + ?Sized>(params: DomainParams, rng: &mut R) -> BigUint {
    let bits = params.bits;
    if bits <= 64 {
        let word = rng.next_u64();
        return BigUint::from(mask_word(word, bits));
    }
    let words = bits.div_ceil(64);
    let mut digits = Vec::with_capacity(2 * words as usize);
    for i in 0..words {
        let word = rng.next_u64();
        let word = if i + 1 == words {
            mask_word(word, bits - 64 * i)
        } else {
            word
        };
        digits.push(word as u32);
        digits.push((word >> 32) as u32);
    }
    BigUint::new(digits)
}

fn mask_word(word: u64, bits: u32) -> u64 {
    if bits >= 64 {
        word
    } else {
        word & ((1u64 << bits) - 1)
    }
}

/// Draws a uniform point of `D_nᵐ`, coordinates in order.
pub fn sample_point<R: RngCore + ?Sized>(params: &VectorDomainParams, rng: &mut R) -> Vec<BigUint> {
    (0..params.dim)
        .map(|_| sample_uniform(params.coordinate(), rng))
        .collect()
}

/// A random decomposition `x₁ + x₂ = x + δ·2ⁿ`, coordinate-wise.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SplitOutcome {
    pub x1: Vec<BigUint>,
    pub x2: Vec<BigUint>,
    /// `true` where the coordinate wrapped (`δᵢ = 1`).
    pub delta: Vec<bool>,
}

impl SplitOutcome {
    /// The split of `x` determined by the draw `x₁`.
    ///
    /// `δ = 0` when `x₁ ≤ x` so that `x₂ = x - x₁` never leaves the domain;
    /// otherwise `δ = 1` and `x₂ = 2ⁿ + x - x₁`.
    pub fn from_draw(x: &BigUint, x1: BigUint, bits: u32) -> (BigUint, BigUint, bool) {
        if x1 <= *x {
            let x2 = x - &x1;
            (x1, x2, false)
        } else {
            let x2 = (BigUint::one() << bits) + x - &x1;
            (x1, x2, true)
        }
    }

    /// `Σ δᵢ·2ⁿ·bᵢ` for the given coefficients.
    pub fn wrap_correction(&self, coefficients: &[BigInt], bits: u32) -> BigInt {
        let wrapped: BigInt = coefficients
            .iter()
            .zip(&self.delta)
            .filter(|(_, &d)| d)
            .map(|(b, _)| b)
            .sum();
        if wrapped.is_zero() {
            wrapped
        } else {
            shift_mul_pow2(&wrapped, bits)
        }
    }
}

/// Splits a scalar `x ∈ D_n` at a uniformly drawn `x₁`.
pub fn split_random<R: RngCore + ?Sized>(
    x: &BigUint,
    params: DomainParams,
    rng: &mut R,
) -> SplitOutcome {
    let x1 = sample_uniform(params, rng);
    let (x1, x2, delta) = SplitOutcome::from_draw(x, x1, params.bits);
    SplitOutcome {
        x1: vec![x1],
        x2: vec![x2],
        delta: vec![delta],
    }
}

/// Splits each coordinate of `x` independently with the scalar rule.
pub fn split_random_multi<R: RngCore + ?Sized>(
    x: &[BigUint],
    params: &VectorDomainParams,
    rng: &mut R,
) -> Result<SplitOutcome> {
    params.check_dim(x.len())?;
    let mut out = SplitOutcome {
        x1: Vec::with_capacity(x.len()),
        x2: Vec::with_capacity(x.len()),
        delta: Vec::with_capacity(x.len()),
    };
    for xi in x {
        let y = sample_uniform(params.coordinate(), rng);
        let (y, z, d) = SplitOutcome::from_draw(xi, y, params.bits);
        out.x1.push(y);
        out.x2.push(z);
        out.delta.push(d);
    }
    Ok(out)
}

/// Renders a point as `x` or `<x1, ..., xm>`.
pub fn format_point(x: &[BigUint]) -> String {
    match x {
        [single] => single.to_string(),
        _ => {
            let parts: Vec<String> = x.iter().map(|c| c.to_string()).collect();
            format!("<{}>", parts.join(", "))
        }
    }
}
