//! Seeded, splittable uniform stream.
//!
//! Backed by ChaCha8, a counter-based generator: `(seed, stream)` fully
//! determines the sequence, and distinct streams of one seed are independent.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone)]
pub struct UniformStream {
    rng: ChaCha8Rng,
    draws: u64,
}

impl UniformStream {
    pub fn new(seed: u64) -> Self {
        Self::with_stream(seed, 0)
    }

    /// Stream `stream` of `seed`; used to derive per-sample generators.
    pub fn with_stream(seed: u64, stream: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        UniformStream { rng, draws: 0 }
    }

    /// Uniform double in `[0, 1)` with 53 random bits.
    pub fn uniform(&mut self) -> f64 {
        self.draws += 1;
        self.rng.random::<f64>()
    }

    /// Number of uniforms drawn so far.
    pub fn draws(&self) -> u64 {
        self.draws
    }
}

/// Index `i` with `y ∈ [c_{i-1}, c_i)` for the cumulative sums of `probs`;
/// the last positive entry absorbs rounding at the top end.
pub(crate) fn pick(probs: &[f64], y: f64) -> usize {
    let mut acc = 0.0;
    for (i, &p) in probs.iter().enumerate() {
        acc += p;
        if y < acc {
            return i;
        }
    }
    probs.iter().rposition(|&p| p > 0.0).unwrap_or(probs.len() - 1)
}
