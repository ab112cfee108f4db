//! Random streams.
//!
//! Every run draws from `ChaCha8Rng::seed_from_u64(seed)` with a fixed
//! stream per purpose, so couplings, initial spins and the event loop never
//! share words. Replica `i >= 1` uses seed `seed ^ splitmix64(i)`; replica 0
//! uses `seed` itself.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub const RNG_ALGORITHM: &str = "ChaCha8Rng(rand_chacha 0.9) seed_from_u64; streams J=0 sigma=1 dynamics=2; replica i>=1 seed^splitmix64(i)";

pub const STREAM_INTERACTIONS: u64 = 0;
pub const STREAM_INITIAL: u64 = 1;
pub const STREAM_DYNAMICS: u64 = 2;

pub fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn replica_seed(seed: u64, replica: u64) -> u64 {
    if replica == 0 {
        seed
    } else {
        seed ^ splitmix64(replica)
    }
}

pub fn stream(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn streams_differ() {
        let a: u64 = stream(1, 0).random();
        let b: u64 = stream(1, 1).random();
        assert_ne!(a, b);
        assert_eq!(a, stream(1, 0).random::<u64>());
    }

    #[test]
    fn replica_zero_is_base_seed() {
        assert_eq!(replica_seed(42, 0), 42);
        assert_ne!(replica_seed(42, 1), replica_seed(42, 2));
    }
}
