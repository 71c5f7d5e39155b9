//! Seeded, splittable random streams.
//!
//! Every random quantity in the crate is drawn from a substream identified by
//! `(seed, domain, index)`. The generator is ChaCha8, a counter-based stream
//! cipher: the 256-bit key is the SplitMix64 expansion of `seed` mixed with
//! the `domain` tag, and the ChaCha stream id is `index`. Substreams are
//! independent of evaluation order, so parallel and serial runs agree.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type StreamRng = ChaCha8Rng;

#[inline]
fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Hash a short ASCII label into a domain tag.
pub const fn domain_tag(label: &str) -> u64 {
    // FNV-1a
    let bytes = label.as_bytes();
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    let mut i = 0;
    while i < bytes.len() {
        h ^= bytes[i] as u64;
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
        i += 1;
    }
    h
}

/// Factory for the substreams of one seed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Streams {
    seed: u64,
}

impl Streams {
    pub fn new(seed: u64) -> Self {
        Self { seed }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// The generator for substream `index` of `domain`.
    pub fn substream(&self, domain: u64, index: u64) -> StreamRng {
        self.domain(domain).at(index)
    }

    /// All substreams of one domain, sharing a precomputed key.
    pub fn domain(&self, domain: u64) -> DomainStreams {
        let mut state = self.seed ^ domain.rotate_left(17);
        let mut key = [0u8; 32];
        for chunk in key.chunks_exact_mut(8) {
            chunk.copy_from_slice(&splitmix64(&mut state).to_le_bytes());
        }
        DomainStreams { key }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DomainStreams {
    key: [u8; 32],
}

impl DomainStreams {
    pub fn at(&self, index: u64) -> StreamRng {
        let mut rng = ChaCha8Rng::from_seed(self.key);
        rng.set_stream(index);
        rng
    }
}
