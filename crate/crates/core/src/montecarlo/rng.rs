//! Counter-based normal draws keyed by `(seed, stream, node)`.
//!
//! Every path owns a ChaCha8 stream. A node id addresses a fixed 4-word slot
//! of that stream, so the normals attached to a node do not depend on the
//! order in which nodes are visited.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

const NODES_PER_BLOCK: u64 = 16;
const WORDS_PER_BLOCK: u128 = 64;

/// Expands a 64-bit user seed into a ChaCha key.
pub fn key_from_seed(seed: u64) -> [u8; 32] {
    ChaCha8Rng::seed_from_u64(seed).get_seed()
}

/// Generator for stream `stream` under `key`.
pub fn stream_rng(key: &[u8; 32], stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::from_seed(*key);
    rng.set_stream(stream);
    rng
}

/// Two independent standard normals from two uniform words (Box-Muller).
#[inline]
pub fn box_muller(a: u64, b: u64) -> (f64, f64) {
    const SCALE: f64 = 1.0 / (1u64 << 53) as f64;
    let u1 = ((a >> 11) as f64 + 0.5) * SCALE;
    let u2 = (b >> 11) as f64 * SCALE;
    let r = (-2.0 * u1.ln()).sqrt();
    let (s, c) = (std::f64::consts::TAU * u2).sin_cos();
    (r * c, r * s)
}

/// Random-access source of normal pairs for one path.
pub struct NodeSource {
    rng: ChaCha8Rng,
    block: u64,
    buf: [u64; 32],
}

impl NodeSource {
    pub fn new(key: &[u8; 32], stream: u64) -> Self {
        Self {
            rng: stream_rng(key, stream),
            block: u64::MAX,
            buf: [0; 32],
        }
    }

    /// Re-targets the source to another stream without rebuilding the key.
    pub fn reset(&mut self, stream: u64) {
        self.rng.set_stream(stream);
        self.block = u64::MAX;
    }

    /// The normal pair attached to node `id`.
    #[inline]
    pub fn normals(&mut self, id: u64) -> (f64, f64) {
        let block = id / NODES_PER_BLOCK;
        if block != self.block {
            self.rng.set_word_pos(block as u128 * WORDS_PER_BLOCK);
            for w in self.buf.iter_mut() {
                *w = self.rng.next_u64();
            }
            self.block = block;
        }
        let off = 2 * (id % NODES_PER_BLOCK) as usize;
        box_muller(self.buf[off], self.buf[off + 1])
    }
}
