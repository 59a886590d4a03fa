//! Per-trial random streams.
//!
//! Trial `i` of a campaign with master seed `m` draws from
//! `ChaCha8Rng::seed_from_u64(trial_seed(m, i))`, where
//!
//! ```text
//! trial_seed(m, i) = splitmix64(m ^ splitmix64(i + 0x9E37_79B9_7F4A_7C15))
//! ```
//!
//! The mapping is a pure function of `(m, i)`, so a trial's trajectory does not
//! depend on which worker runs it or in what order.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// The SplitMix64 finalizer.
pub fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn trial_seed(master: u64, trial: u64) -> u64 {
    splitmix64(master ^ splitmix64(trial.wrapping_add(0x9E37_79B9_7F4A_7C15)))
}

pub fn trial_rng(master: u64, trial: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(trial_seed(master, trial))
}
