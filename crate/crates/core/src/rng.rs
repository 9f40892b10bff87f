//! Deterministic random sources and seed derivation.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;

/// Seeded pseudo-random generator used by every sampler and generator.
///
/// The algorithm is ChaCha20 seeded through `seed_from_u64`; a given seed
/// always yields the same stream on every platform.
#[derive(Debug, Clone)]
pub struct RandomSource(ChaCha20Rng);

impl RandomSource {
    pub const DEFAULT_SEED: u64 = 20_230_701;

    pub fn seeded(seed: u64) -> Self {
        RandomSource(ChaCha20Rng::seed_from_u64(seed))
    }
}

impl Default for RandomSource {
    fn default() -> Self {
        Self::seeded(Self::DEFAULT_SEED)
    }
}

impl RngCore for RandomSource {
    fn next_u32(&mut self) -> u32 {
        self.0.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.0.next_u64()
    }

    fn fill_bytes(&mut self, dest: &mut [u8]) {
        self.0.fill_bytes(dest)
    }

    fn try_fill_bytes(&mut self, dest: &mut [u8]) -> Result<(), rand::Error> {
        self.0.try_fill_bytes(dest)
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Mixes a base seed with task coordinates into an independent task seed.
///
/// Used to partition work across threads: the seed of a task depends only on
/// its coordinates, never on scheduling.
pub fn derive_seed(base: u64, parts: &[u64]) -> u64 {
    parts
        .iter()
        .fold(splitmix64(base), |acc, &p| splitmix64(acc ^ splitmix64(p)))
}

/// Stable 64-bit FNV-1a hash, for turning identifiers into seed parts.
pub fn stable_hash(s: &str) -> u64 {
    s.bytes().fold(0xcbf2_9ce4_8422_2325u64, |h, b| {
        (h ^ u64::from(b)).wrapping_mul(0x0000_0100_0000_01b3)
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_seed_same_stream() {
        let mut a = RandomSource::seeded(11);
        let mut b = RandomSource::seeded(11);
        let xs: Vec<u64> = (0..16).map(|_| a.next_u64()).collect();
        let ys: Vec<u64> = (0..16).map(|_| b.next_u64()).collect();
        assert_eq!(xs, ys);
        let mut c = RandomSource::seeded(12);
        assert_ne!(xs[0], c.next_u64());
    }

    #[test]
    fn derived_seeds_differ_by_coordinate() {
        let s = derive_seed(1, &[0, 0]);
        assert_eq!(s, derive_seed(1, &[0, 0]));
        assert_ne!(s, derive_seed(1, &[0, 1]));
        assert_ne!(s, derive_seed(1, &[1, 0]));
        assert_ne!(s, derive_seed(2, &[0, 0]));
        assert_eq!(stable_hash("e01"), stable_hash("e01"));
        assert_ne!(stable_hash("e01"), stable_hash("e10"));
    }
}
