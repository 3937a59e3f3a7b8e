//! Seeded trial runner and the summary statistics reported for it.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::rng::{trial_stream, Stream};

/// Run `trials` independent trials, trial i on `trial_stream(seed, i)`, on up
/// to `jobs` threads. Results come back in trial order, so the records do not
/// depend on `jobs`.
pub fn run_trials<T, F>(trials: u64, seed: u64, jobs: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(u64, &mut Stream) -> T + Sync,
{
    let one = |i: u64| f(i, &mut trial_stream(seed, i));
    if jobs <= 1 {
        return (0..trials).map(one).collect();
    }
    match rayon::ThreadPoolBuilder::new().num_threads(jobs).build() {
        Ok(pool) => pool.install(|| (0..trials).into_par_iter().map(one).collect()),
        Err(_) => (0..trials).map(one).collect(),
    }
}

/// Wilson score interval for a binomial proportion.
pub fn wilson(successes: u64, trials: u64, z: f64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = z * z;
    let centre = (p + z2 / (2.0 * n)) / (1.0 + z2 / n);
    let half = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / (1.0 + z2 / n);
    ((centre - half).max(0.0), (centre + half).min(1.0))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RateSummary {
    pub successes: u64,
    pub trials: u64,
    pub rate: f64,
    /// 95% Wilson interval.
    pub wilson_low: f64,
    pub wilson_high: f64,
}

impl RateSummary {
    pub fn new(successes: u64, trials: u64) -> Self {
        let (wilson_low, wilson_high) = wilson(successes, trials, 1.96);
        let rate = if trials == 0 { 0.0 } else { successes as f64 / trials as f64 };
        RateSummary { successes, trials, rate, wilson_low, wilson_high }
    }

    pub fn from_flags<I: IntoIterator<Item = bool>>(flags: I) -> Self {
        let (mut s, mut t) = (0, 0);
        for ok in flags {
            s += ok as u64;
            t += 1;
        }
        Self::new(s, t)
    }
}

/// Binomial standard deviation of an observed rate.
pub fn sigma(p: f64, trials: u64) -> f64 {
    (p * (1.0 - p) / trials.max(1) as f64).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn records_do_not_depend_on_jobs() {
        let f = |i: u64, r: &mut Stream| (i, r.gen::<u64>());
        let a = run_trials(40, 5, 1, f);
        let b = run_trials(40, 5, 4, f);
        assert_eq!(a, b);
        assert_eq!(a[3].0, 3);
    }

    #[test]
    fn wilson_brackets_the_rate() {
        let s = RateSummary::new(45, 60);
        assert!(s.wilson_low < 0.75 && 0.75 < s.wilson_high);
        let (lo, hi) = wilson(0, 10, 1.96);
        assert_eq!(lo, 0.0);
        assert!(hi > 0.2 && hi < 0.35);
        assert_eq!(RateSummary::from_flags([true, false, true, true]).successes, 3);
    }
}
