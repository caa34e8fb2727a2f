//! Platform-stable uniform streams.
//!
//! Every random quantity in the crate is drawn from ChaCha20 (RFC 8439
//! block function, as implemented by `rand_chacha`) keyed by a `u64` seed
//! and a stream id. Doubles are formed from the top 53 bits of each 64-bit
//! output, so a given `(seed, stream)` yields the same sequence on every
//! platform and the `n`-th draw never depends on how many draws follow it.

use rand_chacha::ChaCha20Rng;
use rand_core::{RngCore, SeedableRng};

use crate::Scalar;

const INV_2_53: f64 = 1.0 / (1u64 << 53) as f64;

#[derive(Clone, Debug)]
pub struct UniformStream {
    rng: ChaCha20Rng,
}

impl UniformStream {
    pub fn new(seed: u64, stream: u64) -> Self {
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        Self { rng }
    }

    /// Uniform on `[0, 1)`.
    pub fn next_unit(&mut self) -> f64 {
        (self.rng.next_u64() >> 11) as f64 * INV_2_53
    }

    /// Uniform on the open interval `(0, 1)`.
    pub fn next_open_unit(&mut self) -> f64 {
        ((self.rng.next_u64() >> 11) as f64 + 0.5) * INV_2_53
    }

    /// Uniform on `[lo, hi)`; returns `lo` when the interval is degenerate.
    pub fn next_in<T: Scalar>(&mut self, lo: T, hi: T) -> T {
        lo + (hi - lo) * T::lit(self.next_unit())
    }
}
