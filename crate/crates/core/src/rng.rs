//! Reproducible random streams.
//!
//! Every Monte Carlo draw owns its stream: `(seed, stream_id)` maps to a
//! ChaCha8 generator keyed by `seed` and positioned on stream `stream_id`, so
//! results do not depend on how draws are spread over workers.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RngStream {
    pub seed: u64,
    pub stream_id: u64,
}

impl RngStream {
    pub fn new(seed: u64, stream_id: u64) -> Self {
        Self { seed, stream_id }
    }

    /// Stream for the `index`-th draw of an experiment.
    pub fn for_draw(seed: u64, index: u64) -> Self {
        Self::new(seed, index)
    }

    pub fn sampler(self) -> Sampler {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(self.stream_id);
        Sampler {
            rng,
            mirrored: false,
        }
    }

    /// Antithetic twin: uniforms become `1 - u` and normals change sign.
    pub fn mirrored_sampler(self) -> Sampler {
        let mut s = self.sampler();
        s.mirrored = true;
        s
    }
}

/// Variate generator over one stream.
pub struct Sampler {
    rng: ChaCha8Rng,
    mirrored: bool,
}

impl Sampler {
    /// Uniform on the open interval (0, 1).
    pub fn uniform(&mut self) -> f64 {
        // 53-bit grid shifted by half a step, never 0 or 1.
        let bits = self.rng.next_u64() >> 11;
        let u = (bits as f64 + 0.5) * (1.0 / (1u64 << 53) as f64);
        if self.mirrored {
            1.0 - u
        } else {
            u
        }
    }

    /// Unit-rate exponential.
    pub fn exp1(&mut self) -> f64 {
        -libm::log(self.uniform())
    }

    pub fn normal(&mut self) -> f64 {
        let z: f64 = StandardNormal.sample(&mut self.rng);
        if self.mirrored {
            -z
        } else {
            z
        }
    }

    pub fn bernoulli(&mut self, p: f64) -> bool {
        self.uniform() < p
    }
}
