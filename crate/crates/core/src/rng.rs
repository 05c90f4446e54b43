//! Keyed random streams.
//!
//! Every stream is a function of a [`StreamKey`] alone. A key selects one of
//! 2^64 independent ChaCha8 streams under a seed derived from the master
//! seed, so a path draws the same numbers no matter which worker runs it or
//! in which order paths are scheduled.

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// Which sub-sequence of a path a stream feeds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Channel {
    X,
    Y,
    Shared,
}

impl Channel {
    fn code(self) -> u64 {
        match self {
            Channel::X => 0,
            Channel::Y => 1,
            Channel::Shared => 2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct StreamKey {
    pub master_seed: u64,
    pub path_index: u64,
    pub channel: Channel,
}

impl StreamKey {
    pub fn new(master_seed: u64, path_index: u64, channel: Channel) -> Self {
        Self {
            master_seed,
            path_index,
            channel,
        }
    }

    fn stream_id(&self) -> u64 {
        // Four slots per path; path indices above 2^62 wrap, which no
        // ensemble gets near.
        self.path_index.wrapping_mul(4).wrapping_add(self.channel.code())
    }
}

const INV_2_53: f64 = 1.0 / (1u64 << 53) as f64;

/// A single-owner generator of uniforms on `[0, 1)`.
#[derive(Debug, Clone)]
pub struct UniformStream {
    inner: ChaCha8Rng,
}

impl UniformStream {
    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    /// Top 53 bits of the next word, scaled into `[0, 1)`.
    #[inline]
    pub fn next_uniform(&mut self) -> f64 {
        (self.inner.next_u64() >> 11) as f64 * INV_2_53
    }
}

pub fn derive_stream(key: StreamKey) -> UniformStream {
    let mut inner = ChaCha8Rng::seed_from_u64(key.master_seed);
    inner.set_stream(key.stream_id());
    UniformStream { inner }
}
