//! Pinned random number generation.
//!
//! Every stochastic component of the toolkit draws from SplitMix64 streams.
//! The generator is pinned (algorithm id `splitmix64-v1`) with reference
//! vectors in the tests below so that reimplementations in other languages
//! reproduce trajectories bit for bit.
//!
//! Stream derivation rule: a stream for (master seed, purpose, index) is
//! seeded with
//!
//! ```text
//! derive(master, purpose, index) = output_at(output_at(master, purpose), index)
//! output_at(seed, i) = mix64(seed + GAMMA * (i + 1))
//! ```
//!
//! where `output_at(seed, i)` is the i-th output of the SplitMix64 stream
//! seeded by `seed`. Two applications keep purposes and indices independent:
//! distinct (purpose, index) pairs land on distinct, statistically unrelated
//! streams.
//!
//! Uniform doubles are `(next_u64() >> 11) / 2^53`, giving 53 random bits in
//! [0, 1). All Bernoulli decisions in the crate use the rule `u < p`.

/// Weyl increment of SplitMix64.
pub const GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

/// Pinned algorithm identifier, recorded in experiment output metadata.
pub const ALGORITHM: &str = "splitmix64-v1";

#[inline]
fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// SplitMix64 stream.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        SplitMix64 { state: seed }
    }

    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(GAMMA);
        mix64(self.state)
    }

    /// Uniform double in [0, 1) with 53 random bits.
    #[inline]
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform spin value, +1 with probability 1/2.
    #[inline]
    pub fn next_spin(&mut self) -> i8 {
        if self.next_f64() < 0.5 {
            1
        } else {
            -1
        }
    }
}

/// Output at position `i` of the stream seeded by `seed`, without
/// constructing the intermediate stream.
#[inline]
fn output_at(seed: u64, i: u64) -> u64 {
    mix64(seed.wrapping_add(GAMMA.wrapping_mul(i.wrapping_add(1))))
}

/// Stream purposes. The discriminant is part of the pinned derivation rule;
/// never reorder.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Purpose {
    /// Initial-state draws, one stream per node.
    Init = 0,
    /// Gibbs update draws, one stream per node.
    Update = 1,
    /// Copy-conflict coin flips, one stream per decoder.
    Decode = 2,
    /// Per-trial master seeds split from an experiment seed.
    TrialSplit = 3,
}

/// Seed for the stream identified by (master, purpose, index).
pub fn derive_seed(master: u64, purpose: Purpose, index: u64) -> u64 {
    output_at(output_at(master, purpose as u64), index)
}

/// Stream for (master, purpose, index).
pub fn derive_stream(master: u64, purpose: Purpose, index: u64) -> SplitMix64 {
    SplitMix64::new(derive_seed(master, purpose, index))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn first5(seed: u64) -> [u64; 5] {
        let mut r = SplitMix64::new(seed);
        [
            r.next_u64(),
            r.next_u64(),
            r.next_u64(),
            r.next_u64(),
            r.next_u64(),
        ]
    }

    // Reference vectors frozen from an independent implementation; the
    // seed-0 values also match the published SplitMix64 test vector.
    #[test]
    fn reference_vectors() {
        assert_eq!(
            first5(0),
            [
                0xe220a8397b1dcdaf,
                0x6e789e6aa1b965f4,
                0x06c45d188009454f,
                0xf88bb8a8724c81ec,
                0x1b39896a51a8749b,
            ]
        );
        assert_eq!(
            first5(42),
            [
                0xbdd732262feb6e95,
                0x28efe333b266f103,
                0x47526757130f9f52,
                0x581ce1ff0e4ae394,
                0x09bc585a244823f2,
            ]
        );
        assert_eq!(
            first5(1234567),
            [
                0x599ed017fb08fc85,
                0x2c73f08458540fa5,
                0x883ebce5a3f27c77,
                0x3fbef740e9177b3f,
                0xe3b8346708cb5ecd,
            ]
        );
        assert_eq!(
            first5(0xDEADBEEF),
            [
                0x4adfb90f68c9eb9b,
                0xde586a3141a10922,
                0x021fbc2f8e1cfc1d,
                0x7466ce737be16790,
                0x3bfa8764f685bd1c,
            ]
        );
    }

    #[test]
    fn derive_vectors() {
        assert_eq!(derive_seed(0, Purpose::Init, 0), 0xa706dd2f4d197e6f);
        let got: Vec<u64> = (0..4).map(|k| derive_seed(42, Purpose::Update, k)).collect();
        assert_eq!(
            got,
            vec![
                0xfc991bca1a1aa1ae,
                0x4f0482a72b57ee7d,
                0x81ba563d55228ab4,
                0xaf53d69c4ec853d9,
            ]
        );
    }

    #[test]
    fn derived_stream_doubles() {
        let expect = [
            (0.9081327486536309, 0.7050310584769278),
            (0.7525439723497307, 0.32879943486872065),
            (0.23203333108254176, 0.383343766539364),
        ];
        for (node, &(a, b)) in expect.iter().enumerate() {
            let mut r = derive_stream(7, Purpose::Update, node as u64);
            assert_eq!(r.next_f64(), a);
            assert_eq!(r.next_f64(), b);
        }
    }

    #[test]
    fn doubles_in_unit_interval() {
        let mut r = SplitMix64::new(99);
        for _ in 0..10_000 {
            let u = r.next_f64();
            assert!((0.0..1.0).contains(&u));
        }
    }

    #[test]
    fn output_at_matches_stream() {
        let mut r = SplitMix64::new(314159);
        for i in 0..16 {
            assert_eq!(r.next_u64(), output_at(314159, i));
        }
    }
}
