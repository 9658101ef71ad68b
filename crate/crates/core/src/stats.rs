//! Small statistical helpers shared by the Monte Carlo estimators.

use serde::{Deserialize, Serialize};

/// Two-sided 95% standard-normal quantile.
pub const Z95: f64 = 1.959_963_984_540_054;

/// Wilson score interval for a Bernoulli proportion.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WilsonInterval {
    pub estimate: f64,
    pub lower: f64,
    pub upper: f64,
}

impl WilsonInterval {
    pub fn new(successes: u64, trials: u64, z: f64) -> Self {
        if trials == 0 {
            return Self {
                estimate: 0.0,
                lower: 0.0,
                upper: 1.0,
            };
        }
        let n = trials as f64;
        let p = successes as f64 / n;
        let z2 = z * z;
        let denom = 1.0 + z2 / n;
        let center = (p + z2 / (2.0 * n)) / denom;
        let half = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
        Self {
            estimate: p,
            lower: (center - half).max(0.0),
            upper: (center + half).min(1.0),
        }
    }

    pub fn at_95(successes: u64, trials: u64) -> Self {
        Self::new(successes, trials, Z95)
    }

    /// Largest distance from the point estimate to either interval end.
    pub fn half_width(&self) -> f64 {
        (self.estimate - self.lower).max(self.upper - self.estimate)
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lower <= x && x <= self.upper
    }
}

/// Sample mean and the standard error of the mean.
pub fn mean_and_stderr(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// Unbiased sample variance.
pub fn sample_variance(xs: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0)
}

/// Total-variation distance between two empirical histograms over the same
/// keys (counts are normalized independently).
pub fn total_variation(a: &[u64], b: &[u64]) -> f64 {
    let len = a.len().max(b.len());
    let na: u64 = a.iter().sum();
    let nb: u64 = b.iter().sum();
    let mut tv = 0.0;
    for i in 0..len {
        let pa = a.get(i).copied().unwrap_or(0) as f64 / na.max(1) as f64;
        let pb = b.get(i).copied().unwrap_or(0) as f64 / nb.max(1) as f64;
        tv += (pa - pb).abs();
    }
    tv / 2.0
}
