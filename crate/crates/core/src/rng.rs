//! Seeded random streams.
//!
//! Each consumer gets its own ChaCha stream keyed by the run seed, a stream
//! tag and up to three integer coordinates. Fading draws for a link are keyed
//! by `(tick, tx, rx)`, so two runs that differ only in the SIR threshold see
//! identical channel realisations (common random numbers).

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type SimRng = ChaCha8Rng;

/// Stream tags. Values are part of the reproducibility contract.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[repr(u64)]
pub enum Stream {
    Mobility = 1,
    Policy = 2,
    Scenario = 3,
    Coverage = 4,
    Hop = 5,
    Placement = 6,
}

fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derives an independent stream from `(seed, stream, a, b, c)`.
pub fn substream(seed: u64, stream: Stream, a: u64, b: u64, c: u64) -> SimRng {
    let mut state = seed;
    let mut key = [0u8; 32];
    let mut mix = splitmix64(&mut state) ^ (stream as u64).wrapping_mul(0xD6E8_FEB8_6659_FD93);
    for (i, word) in [a, b, c, 0x5EED].into_iter().enumerate() {
        state ^= word.wrapping_add(mix);
        mix = splitmix64(&mut state);
        key[i * 8..i * 8 + 8].copy_from_slice(&mix.to_le_bytes());
    }
    ChaCha8Rng::from_seed(key)
}

/// A run-level stream with no extra coordinates.
pub fn stream(seed: u64, stream: Stream) -> SimRng {
    substream(seed, stream, 0, 0, 0)
}
