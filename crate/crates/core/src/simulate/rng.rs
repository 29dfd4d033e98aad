//! Per-path random streams.
//!
//! Every path owns a ChaCha8 generator whose key packs `(seed, stream_id, lane)`
//! and whose 64-bit stream number is the path index. Distinct lanes give the
//! independent draws a path needs (increments, bridge uniforms, the two
//! Dufresne variables) without any sequencing between them, so results do not
//! depend on how paths are scheduled across threads.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Independent sub-streams of one path.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum Lane {
    Increments = 0,
    Bridge = 1,
    FirstPerpetuity = 2,
    SecondPerpetuity = 3,
}

const KEY_TAG: u64 = 0x6265_7373_656c_6874; // "besselht"

/// Generator for one `(seed, stream_id, lane, path)` tuple.
pub fn path_rng(seed: u64, stream_id: u64, lane: Lane, path: u64) -> ChaCha8Rng {
    let mut key = [0u8; 32];
    for (chunk, word) in key
        .chunks_exact_mut(8)
        .zip([seed, stream_id, lane as u64, KEY_TAG])
    {
        chunk.copy_from_slice(&word.to_le_bytes());
    }
    let mut rng = ChaCha8Rng::from_seed(key);
    rng.set_stream(path);
    rng
}

/// Generators driving one simulated Brownian path.
#[derive(Debug, Clone)]
pub struct PathStreams {
    pub increments: ChaCha8Rng,
    pub bridge: ChaCha8Rng,
}

impl PathStreams {
    pub fn new(seed: u64, stream_id: u64, path: u64) -> Self {
        Self {
            increments: path_rng(seed, stream_id, Lane::Increments, path),
            bridge: path_rng(seed, stream_id, Lane::Bridge, path),
        }
    }
}
