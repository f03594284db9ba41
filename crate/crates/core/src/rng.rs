//! Randomness sources.

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

/// Environment variable that pins the random source to a fixed seed. Meant
/// for reproducible tests only.
pub const SEED_ENV: &str = "FRAG_RNG_SEED";

/// ChaCha20 seeded from the operating system.
pub fn secure_rng() -> ChaCha20Rng {
    ChaCha20Rng::from_entropy()
}

pub fn seeded_rng(seed: u64) -> ChaCha20Rng {
    ChaCha20Rng::seed_from_u64(seed)
}

/// Seeded from [`SEED_ENV`] when it parses as a `u64`, otherwise from the
/// operating system.
pub fn rng_from_env() -> ChaCha20Rng {
    match std::env::var(SEED_ENV)
        .ok()
        .and_then(|s| s.trim().parse().ok())
    {
        Some(seed) => seeded_rng(seed),
        None => secure_rng(),
    }
}
