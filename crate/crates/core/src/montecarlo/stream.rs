//! Reproducible parallel trial streams.
//!
//! Trials are cut into fixed-size chunks. Chunk `i` draws from its own
//! ChaCha8 stream (`stream = i`) keyed by the master seed, so the random
//! numbers a trial sees do not depend on which worker ran it. Per-chunk
//! moments are merged in chunk order, which makes the final floating-point
//! result independent of the thread count as well.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

/// Trials per chunk (and per RNG stream).
pub const CHUNK_TRIALS: u64 = 1 << 14;

/// Generator identity recorded next to every estimate.
pub const RNG_IDENTITY: &str = "rand_chacha-0.3/ChaCha8Rng; seed_from_u64(seed), stream = chunk index, 16384 trials per chunk";

/// Running mean and centred second moment.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Moments {
    pub count: u64,
    pub mean: f64,
    pub m2: f64,
}

impl Moments {
    pub fn push(&mut self, x: f64) {
        self.count += 1;
        let d = x - self.mean;
        self.mean += d / self.count as f64;
        self.m2 += d * (x - self.mean);
    }

    /// Pairwise combination of two disjoint samples.
    pub fn merge(self, other: Moments) -> Moments {
        if self.count == 0 {
            return other;
        }
        if other.count == 0 {
            return self;
        }
        let n = self.count + other.count;
        let (na, nb) = (self.count as f64, other.count as f64);
        let d = other.mean - self.mean;
        Moments {
            count: n,
            mean: self.mean + d * nb / n as f64,
            m2: self.m2 + other.m2 + d * d * na * nb / n as f64,
        }
    }

    /// Sample variance with the `n − 1` denominator.
    pub fn variance(&self) -> f64 {
        if self.count < 2 {
            0.0
        } else {
            self.m2 / (self.count - 1) as f64
        }
    }

    /// Standard error of the mean.
    pub fn std_error(&self) -> f64 {
        if self.count == 0 {
            0.0
        } else {
            (self.variance() / self.count as f64).sqrt()
        }
    }
}

/// The RNG for chunk `chunk` under master seed `seed`.
pub fn chunk_rng(seed: u64, chunk: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(chunk);
    rng
}

/// Runs `trial` `trials` times across the current rayon pool and returns
/// the moments of its outputs.
pub fn run_trials<F>(trials: u64, seed: u64, trial: F) -> Moments
where
    F: Fn(&mut ChaCha8Rng) -> f64 + Sync,
{
    let chunks = trials.div_ceil(CHUNK_TRIALS);
    let partial: Vec<Moments> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = chunk_rng(seed, c);
            let len = CHUNK_TRIALS.min(trials - c * CHUNK_TRIALS);
            let mut m = Moments::default();
            for _ in 0..len {
                m.push(trial(&mut rng));
            }
            m
        })
        .collect();
    partial.into_iter().fold(Moments::default(), Moments::merge)
}
