//! Counter-based seeding.
//!
//! Every random quantity in the crate is addressed by a tuple of integers
//! (domain tag, master seed, coordinates) which is hashed into the seed of a
//! short-lived PCG generator. Nothing depends on the order in which values
//! are requested, so coupled or translated processes can regenerate the same
//! clock epochs without storing them, and replicas can run in any order.

use rand::distr::Open01;
use rand_distr::Exp1;
use rand::{Rng, SeedableRng};
use rand_pcg::Pcg64Mcg;

/// Domain-separation tags mixed into every key.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[repr(u64)]
pub enum Domain {
    Configuration = 0x636f_6e66,
    Clock = 0x636c_6f63,
    Replica = 0x7265_706c,
    Weights = 0x7765_6967,
    Auxiliary = 0x6175_7869,
}

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

/// SplitMix64 output function.
#[inline]
pub fn mix64(mut x: u64) -> u64 {
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

/// Hashes a domain tag and a sequence of words into a 64-bit key.
#[inline]
pub fn key(domain: Domain, words: &[u64]) -> u64 {
    let mut h = mix64(domain as u64 ^ GOLDEN);
    for (n, &w) in words.iter().enumerate() {
        h = mix64(h.rotate_left(23) ^ mix64(w.wrapping_add(GOLDEN.wrapping_mul(n as u64 + 1))));
    }
    h
}

/// Generator seeded from a key. PCG64-MCG has a documented, portable output
/// stream, which keeps golden values stable across platforms.
#[inline]
pub fn generator(key: u64) -> Pcg64Mcg {
    Pcg64Mcg::seed_from_u64(key)
}

/// Uniform draw on the open interval (0, 1).
#[inline]
pub fn open01<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    rng.sample(Open01)
}

/// Rate-one exponential draw (ziggurat).
#[inline]
pub fn exp1<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    rng.sample(Exp1)
}

/// Seed of replica `index` under `master`.
pub fn replica_seed(master: u64, index: u64) -> u64 {
    key(Domain::Replica, &[master, index])
}
