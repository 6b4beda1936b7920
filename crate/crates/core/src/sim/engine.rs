use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::model::{RandomSeed, TrialRng};

/// Integer accumulator merged across worker threads. Merging must be
/// commutative and associative so the result does not depend on scheduling.
pub(crate) trait Tally: Send + Sized {
    fn merge(self, other: Self) -> Self;
}

impl Tally for u64 {
    fn merge(self, other: Self) -> Self {
        self + other
    }
}

impl Tally for Vec<u64> {
    fn merge(mut self, other: Self) -> Self {
        if self.is_empty() {
            return other;
        }
        for (a, b) in self.iter_mut().zip(other) {
            *a += b;
        }
        self
    }
}

/// Runs `trials` independent trials in parallel. Trial `i` gets the stream
/// keyed by `(seed, i)`, so results are identical for any thread count.
pub(crate) fn run_trials<T, I, F>(trials: u64, seed: RandomSeed, init: I, step: F) -> T
where
    T: Tally,
    I: Fn() -> T + Sync + Send,
    F: Fn(&mut T, &mut TrialRng) + Sync + Send,
{
    (0..trials)
        .into_par_iter()
        .fold(&init, |mut acc, i| {
            let mut rng = seed.trial_rng(i);
            step(&mut acc, &mut rng);
            acc
        })
        .reduce(&init, Tally::merge)
}

const Z95: f64 = 1.959_963_984_540_054;

/// Binomial Monte-Carlo estimate of a probability.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ViolationEstimate {
    pub p_hat: f64,
    pub successes: u64,
    pub trials: u64,
    /// `sqrt(p̂(1 − p̂)/n)`.
    pub std_err: f64,
    /// Wilson score interval; always contains `p_hat`.
    pub ci95: (f64, f64),
    pub seed: RandomSeed,
}

impl ViolationEstimate {
    pub fn from_counts(successes: u64, trials: u64, seed: RandomSeed) -> Self {
        assert!(trials > 0 && successes <= trials);
        let n = trials as f64;
        let p = successes as f64 / n;
        let std_err = (p * (1.0 - p) / n).sqrt();
        let z2 = Z95 * Z95;
        let denom = 1.0 + z2 / n;
        let center = (p + z2 / (2.0 * n)) / denom;
        let half = Z95 * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
        let lo = (center - half).clamp(0.0, p);
        let hi = (center + half).clamp(p, 1.0);
        Self {
            p_hat: p,
            successes,
            trials,
            std_err,
            ci95: (lo, hi),
            seed,
        }
    }

    /// Estimate of the complementary event from the same trials.
    pub fn complement(&self) -> Self {
        Self::from_counts(self.trials - self.successes, self.trials, self.seed)
    }

    /// `|p̂ − reference| / std_err`; infinite when the estimate is degenerate
    /// but disagrees, zero when it agrees exactly.
    pub fn z_score(&self, reference: f64) -> f64 {
        let d = (self.p_hat - reference).abs();
        if d == 0.0 {
            0.0
        } else if self.std_err == 0.0 {
            f64::INFINITY
        } else {
            d / self.std_err
        }
    }

    /// Whether `reference` lies within `k` standard errors.
    pub fn agrees_with(&self, reference: f64, k: f64) -> bool {
        (self.p_hat - reference).abs() <= k * self.std_err
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn estimate_invariants() {
        for (s, n) in [(0, 10), (10, 10), (3, 10), (500_000, 1_000_000), (1, 1)] {
            let e = ViolationEstimate::from_counts(s, n, RandomSeed(0));
            assert!(0.0 <= e.ci95.0 && e.ci95.0 <= e.p_hat);
            assert!(e.p_hat <= e.ci95.1 && e.ci95.1 <= 1.0);
            let p = s as f64 / n as f64;
            assert_eq!(e.std_err, (p * (1.0 - p) / n as f64).sqrt());
        }
        let e = ViolationEstimate::from_counts(3, 10, RandomSeed(0));
        assert_eq!(e.complement().successes, 7);
    }

    #[test]
    fn thread_count_does_not_change_result() {
        let count = |threads| {
            let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
            pool.install(|| {
                run_trials(100_000, RandomSeed(17), || 0u64, |acc, rng| {
                    if rng.random::<f64>() < 0.3 {
                        *acc += 1;
                    }
                })
            })
        };
        let one = count(1);
        assert_eq!(one, count(3));
        assert_eq!(one, count(8));
    }
}
