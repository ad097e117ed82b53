//! Summary statistics for hitting-time samples.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Below this sample size the CI comes from a percentile bootstrap.
pub const NORMAL_MIN_SAMPLES: usize = 30;
pub const BOOTSTRAP_RESAMPLES: usize = 2000;
const BOOTSTRAP_SEED: u64 = 0x5eed_b007;
const Z_95: f64 = 1.959_963_984_540_054;

#[derive(Clone, Debug, PartialEq)]
pub struct SampleStats {
    /// Non-censored samples.
    pub n: usize,
    pub censored: u64,
    pub mean: Option<f64>,
    /// Half-width of the 95% confidence interval of the mean.
    pub ci95: Option<f64>,
    pub median: Option<f64>,
}

impl SampleStats {
    pub fn all_censored(&self) -> bool {
        self.n == 0
    }
}

pub fn summarize(samples: &[u64], censored: u64) -> SampleStats {
    let n = samples.len();
    if n == 0 {
        return SampleStats {
            n,
            censored,
            mean: None,
            ci95: None,
            median: None,
        };
    }
    let xs: Vec<f64> = samples.iter().map(|&s| s as f64).collect();
    let mean = xs.iter().sum::<f64>() / n as f64;
    let ci95 = match n {
        1 => None,
        n if n >= NORMAL_MIN_SAMPLES => {
            let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
            Some(Z_95 * (var / n as f64).sqrt())
        }
        _ => Some(bootstrap_half_width(&xs)),
    };
    SampleStats {
        n,
        censored,
        mean: Some(mean),
        ci95,
        median: Some(median(&xs)),
    }
}

fn median(xs: &[f64]) -> f64 {
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    let m = v.len() / 2;
    if v.len() % 2 == 1 {
        v[m]
    } else {
        (v[m - 1] + v[m]) / 2.0
    }
}

/// Nearest-rank quantile of sorted data.
fn quantile(sorted: &[f64], q: f64) -> f64 {
    let idx = ((q * sorted.len() as f64).ceil() as usize).clamp(1, sorted.len()) - 1;
    sorted[idx]
}

fn bootstrap_half_width(xs: &[f64]) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(BOOTSTRAP_SEED);
    let n = xs.len();
    let mut means: Vec<f64> = (0..BOOTSTRAP_RESAMPLES)
        .map(|_| (0..n).map(|_| xs[rng.random_range(0..n)]).sum::<f64>() / n as f64)
        .collect();
    means.sort_by(f64::total_cmp);
    (quantile(&means, 0.975) - quantile(&means, 0.025)) / 2.0
}
