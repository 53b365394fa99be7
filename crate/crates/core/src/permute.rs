//! Keyed bijections on small integer ranges, used to pick fault sites
//! without storing them.

pub(crate) fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// A keyed permutation of `[0, 2^bits)`.
///
/// Each round is a bijection mod `2^bits`: xor with a key, multiply by an
/// odd constant, xor-shift right, add a key.
#[derive(Debug, Clone)]
pub(crate) struct Permutation {
    mask: u64,
    shift: u32,
    rounds: [(u64, u64, u64); 4],
}

impl Permutation {
    pub(crate) fn new(bits: u32, seed: u64) -> Self {
        assert!((1..=64).contains(&bits));
        let mask = if bits == 64 {
            u64::MAX
        } else {
            (1u64 << bits) - 1
        };
        let mut state = seed;
        let mut next = || {
            state = splitmix64(state);
            state
        };
        let mut rounds = [(0, 0, 0); 4];
        for r in rounds.iter_mut() {
            *r = (next() & mask, next() | 1, next() & mask);
        }
        Permutation {
            mask,
            shift: (bits / 2).max(1),
            rounds,
        }
    }

    pub(crate) fn apply(&self, mut x: u64) -> u64 {
        debug_assert!(x <= self.mask);
        for &(xor_key, mul, add_key) in &self.rounds {
            x ^= xor_key;
            x = x.wrapping_mul(mul) & self.mask;
            x ^= x >> self.shift;
            x = x.wrapping_add(add_key) & self.mask;
        }
        x
    }

    /// A permutation of `[0, range)` by cycle walking; `x < range ≤ 2^bits`.
    pub(crate) fn apply_within(&self, x: u64, range: u64) -> u64 {
        debug_assert!(x < range);
        let mut y = self.apply(x);
        while y >= range {
            y = self.apply(y);
        }
        y
    }
}

/// Bits needed to index `range` values (at least 1).
pub(crate) fn index_bits(range: u64) -> u32 {
    if range <= 2 {
        1
    } else {
        64 - (range - 1).leading_zeros()
    }
}
