//! Deterministic random-stream derivation.
//!
//! Every stochastic stage draws from a [`Seed`] obtained by walking a path of
//! integer tags down from the run's master seed:
//!
//! ```text
//! master ─ child(stage) ─ child(cell) ─ child(method) ─ child(run) ─ ...
//! ```
//!
//! `child` is a SplitMix64 finalizer over `parent ^ mix(tag)`, so a stream is a
//! pure function of its path. Parallel workers that pick up run `r` derive the
//! same seed no matter which thread they are on, which is what makes results
//! independent of the worker count.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Concrete generator used for every derived stream.
pub type StreamRng = ChaCha8Rng;

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

/// SplitMix64 output function.
#[inline]
pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(GOLDEN);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Node in the stream-derivation tree.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Seed(u64);

impl Seed {
    pub const fn new(master: u64) -> Self {
        Seed(master)
    }

    pub const fn value(self) -> u64 {
        self.0
    }

    #[inline]
    pub fn child(self, tag: u64) -> Seed {
        Seed(splitmix64(
            self.0 ^ splitmix64(tag.wrapping_mul(GOLDEN) ^ 0x5851_F42D_4C95_7F2D),
        ))
    }

    /// Convenience for a two-level path.
    pub fn child2(self, a: u64, b: u64) -> Seed {
        self.child(a).child(b)
    }

    pub fn rng(self) -> StreamRng {
        ChaCha8Rng::seed_from_u64(self.0)
    }
}

impl From<u64> for Seed {
    fn from(v: u64) -> Self {
        Seed(v)
    }
}

/// Converts a probability into a 64-bit acceptance threshold.
///
/// A uniform `u64` draw `x` succeeds iff `x < threshold` (or always, when the
/// probability is one).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum Threshold {
    Never,
    Below(u64),
    Always,
}

impl Threshold {
    pub(crate) fn from_probability(p: f64) -> Self {
        if p.is_nan() || p <= 0.0 {
            Threshold::Never
        } else if p >= 1.0 {
            Threshold::Always
        } else {
            // 2^64 * p, exact for dyadic p and within one ulp otherwise.
            Threshold::Below((p * 18_446_744_073_709_551_616.0) as u64)
        }
    }

    #[inline]
    pub(crate) fn accepts(self, x: u64) -> bool {
        match self {
            Threshold::Never => false,
            Threshold::Always => true,
            Threshold::Below(t) => x < t,
        }
    }
}
