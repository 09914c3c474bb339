//! Sample means with Student-t confidence intervals.

use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, StudentsT};

/// Mean of a sample with the half-width of its two-sided 95% interval.
/// `half_width` is `None` when fewer than two samples are available.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeanCi {
    pub n: usize,
    pub mean: f64,
    pub half_width: Option<f64>,
}

impl MeanCi {
    pub fn lower(&self) -> Option<f64> {
        self.half_width.map(|h| self.mean - h)
    }

    pub fn upper(&self) -> Option<f64> {
        self.half_width.map(|h| self.mean + h)
    }

    pub fn contains(&self, x: f64) -> bool {
        matches!((self.lower(), self.upper()), (Some(lo), Some(hi)) if lo <= x && x <= hi)
    }
}

/// Two-sided critical value `t_{1-α/2, df}`.
pub fn t_critical(confidence: f64, df: usize) -> f64 {
    let dist = StudentsT::new(0.0, 1.0, df as f64).expect("positive degrees of freedom");
    dist.inverse_cdf(0.5 + confidence / 2.0)
}

pub fn mean_ci(samples: &[f64]) -> MeanCi {
    let n = samples.len();
    // A constant column keeps its exact value; summing would add rounding.
    let constant = samples.windows(2).all(|w| w[0] == w[1]);
    let mean = match samples.first() {
        None => f64::NAN,
        Some(&x) if constant => x,
        Some(_) => samples.iter().sum::<f64>() / n as f64,
    };
    let half_width = (n >= 2).then(|| {
        let var = samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
        t_critical(0.95, n - 1) * (var / n as f64).sqrt()
    });
    MeanCi { n, mean, half_width }
}
