use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::stats::rng::inverse_normal_cdf;

/// Plain Monte Carlo estimate of a bound with its asymptotic confidence interval.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundEstimate {
    pub mean: f64,
    /// Sample standard deviation with the (Λ−1) divisor.
    pub sd: f64,
    pub count: usize,
    pub alpha: f64,
    pub half_width: f64,
    /// SHA-256 of the little-endian sample bytes.
    pub digest: String,
}

impl BoundEstimate {
    /// Standard error of the mean.
    pub fn std_error(&self) -> f64 {
        self.sd / (self.count as f64).sqrt()
    }

    pub fn lower(&self) -> f64 {
        self.mean - self.half_width
    }

    pub fn upper(&self) -> f64 {
        self.mean + self.half_width
    }

    /// Combined standard error of the difference of two independent estimates.
    pub fn combined_se(&self, other: &BoundEstimate) -> f64 {
        self.std_error().hypot(other.std_error())
    }
}

pub fn sample_digest(samples: &[f64]) -> String {
    let mut h = Sha256::new();
    for s in samples {
        h.update(s.to_le_bytes());
    }
    hex::encode(h.finalize())
}

/// Two-sided normal quantile z_{1−α/2}.
pub fn normal_quantile(alpha: f64) -> f64 {
    inverse_normal_cdf(1.0 - alpha / 2.0)
}

pub fn summarize(samples: &[f64], alpha: f64) -> Result<BoundEstimate> {
    if samples.len() < 2 {
        return Err(Error::TooFewSamples {
            needed: 2,
            got: samples.len(),
        });
    }
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::Config(format!("alpha must lie in (0, 1), got {alpha}")));
    }
    let n = samples.len() as f64;
    let mean = samples.iter().sum::<f64>() / n;
    let var = samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    let sd = var.sqrt();
    Ok(BoundEstimate {
        mean,
        sd,
        count: samples.len(),
        alpha,
        half_width: normal_quantile(alpha) * sd / n.sqrt(),
        digest: sample_digest(samples),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stats::rng::{Layer, SeededStreamFactory};

    #[test]
    fn one_two_three() {
        let e = summarize(&[1.0, 2.0, 3.0], 0.05).unwrap();
        assert_eq!(e.mean, 2.0);
        assert_eq!(e.sd, 1.0);
        assert_eq!(e.count, 3);
        let e10 = summarize(&[1.0, 2.0, 3.0], 0.1).unwrap();
        assert_eq!(e10.sd, 1.0);
        assert!(e10.half_width < e.half_width);
    }

    #[test]
    fn constant_samples_have_zero_width() {
        let e = summarize(&[4.5; 10], 0.05).unwrap();
        assert_eq!(e.sd, 0.0);
        assert_eq!(e.half_width, 0.0);
    }

    #[test]
    fn too_few_samples() {
        assert!(matches!(
            summarize(&[1.0], 0.05),
            Err(Error::TooFewSamples { needed: 2, got: 1 })
        ));
    }

    #[test]
    fn digest_reproduces() {
        let xs = [0.25, -1.5, 3.0];
        let e = summarize(&xs, 0.05).unwrap();
        assert_eq!(e.digest, sample_digest(&xs));
        assert_ne!(e.digest, sample_digest(&[0.25, -1.5, 3.5]));
    }

    #[test]
    fn confidence_interval_coverage_for_lognormal_mean() {
        // E[exp(Z/2)] = exp(1/8) for standard normal Z.
        let truth = 0.125f64.exp();
        let f = SeededStreamFactory::new(2024);
        let reps = 1000;
        let n = 400;
        let mut covered = 0;
        for r in 0..reps {
            let mut s = f.stream(f.top_label(Layer::Diagnostics, r));
            let xs: Vec<f64> = (0..n).map(|_| (0.5 * s.standard_normal()).exp()).collect();
            let e = summarize(&xs, 0.05).unwrap();
            if e.lower() <= truth && truth <= e.upper() {
                covered += 1;
            }
        }
        assert!(covered as f64 >= 0.93 * reps as f64, "coverage {covered}/{reps}");
    }
}
