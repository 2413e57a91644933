//! Small summary statistics for the experiment tables.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use statrs::distribution::{Binomial, DiscreteCDF};

pub fn mean(xs: &[f64]) -> Option<f64> {
    (!xs.is_empty()).then(|| xs.iter().sum::<f64>() / xs.len() as f64)
}

pub fn median(xs: &[f64]) -> Option<f64> {
    if xs.is_empty() {
        return None;
    }
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    Some(if n % 2 == 1 { v[n / 2] } else { 0.5 * (v[n / 2 - 1] + v[n / 2]) })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SignTest {
    /// Pairs with `a < b`.
    pub wins: u64,
    /// Pairs with `a > b`.
    pub losses: u64,
    pub ties: u64,
    /// P(at least `wins` successes out of `wins + losses` fair coin flips).
    pub p_value: f64,
}

/// One-sided sign test of `a < b` over paired samples; ties are dropped.
pub fn sign_test(pairs: &[(f64, f64)]) -> SignTest {
    let wins = pairs.iter().filter(|(a, b)| a < b).count() as u64;
    let losses = pairs.iter().filter(|(a, b)| a > b).count() as u64;
    let ties = pairs.len() as u64 - wins - losses;
    let n = wins + losses;
    let p_value = if n == 0 || wins == 0 {
        1.0
    } else {
        let b = Binomial::new(0.5, n).expect("valid binomial");
        b.sf(wins - 1)
    };
    SignTest { wins, losses, ties, p_value }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub estimate: f64,
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn excludes_zero(&self) -> bool {
        self.lo > 0.0 || self.hi < 0.0
    }
}

/// Percentile bootstrap interval for `mean(a) - mean(b)` over independent
/// samples.
pub fn bootstrap_mean_diff(a: &[f64], b: &[f64], level: f64, resamples: usize, seed: u64) -> Option<Interval> {
    let estimate = mean(a)? - mean(b)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut draw = |xs: &[f64]| (0..xs.len()).map(|_| xs[rng.gen_range(0..xs.len())]).sum::<f64>() / xs.len() as f64;
    let mut diffs: Vec<f64> = (0..resamples).map(|_| draw(a) - draw(b)).collect();
    diffs.sort_by(f64::total_cmp);
    let q = |p: f64| diffs[((p * resamples as f64).floor() as usize).min(resamples - 1)];
    let tail = (1.0 - level) / 2.0;
    Some(Interval {
        estimate,
        lo: q(tail),
        hi: q(1.0 - tail),
    })
}
