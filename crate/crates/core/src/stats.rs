//! Seeding and binomial summaries shared by the Monte Carlo drivers.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Two-sided 95% normal quantile.
pub const Z95: f64 = 1.959_963_984_540_054;

/// Generator for trial `index` of a run seeded with `seed`. Each trial gets
/// its own ChaCha stream, so results do not depend on scheduling.
pub fn trial_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// A binomial proportion with its Wilson score interval.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Proportion {
    pub hits: u64,
    pub trials: u64,
    pub rate: f64,
    pub lo: f64,
    pub hi: f64,
}

impl Proportion {
    pub fn new(hits: u64, trials: u64) -> Self {
        let (lo, hi) = wilson(hits, trials, Z95);
        let rate = if trials == 0 {
            0.0
        } else {
            hits as f64 / trials as f64
        };
        Self {
            hits,
            trials,
            rate,
            lo,
            hi,
        }
    }

    /// Standard error `sqrt(p (1 - p) / n)` at the observed rate.
    pub fn sigma(&self) -> f64 {
        binomial_sigma(self.rate, self.trials)
    }
}

/// One-sided check `rate <= limit + 3 sigma`, with sigma taken at the
/// limit (capped at 1) so that small samples at rate 0 or 1 are judged
/// against the hypothesis rather than a degenerate observed variance.
pub fn within_three_sigma(p: &Proportion, limit: f64) -> bool {
    let limit = limit.min(1.0);
    p.rate <= limit + 3.0 * binomial_sigma(limit.max(0.0), p.trials) + 1e-12
}

pub fn binomial_sigma(p: f64, n: u64) -> f64 {
    if n == 0 {
        return 0.0;
    }
    (p * (1.0 - p) / n as f64).sqrt()
}

/// Wilson score interval for `hits` successes in `n` trials.
pub fn wilson(hits: u64, n: u64, z: f64) -> (f64, f64) {
    if n == 0 {
        return (0.0, 1.0);
    }
    let n = n as f64;
    let p = hits as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    let lo = if hits == 0 {
        0.0
    } else {
        (center - half).max(0.0)
    };
    let hi = if hits as f64 == n {
        1.0
    } else {
        (center + half).min(1.0)
    };
    (lo, hi)
}
