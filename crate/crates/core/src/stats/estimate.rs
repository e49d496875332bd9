//! Ensemble estimates with normal-approximation confidence intervals.
//!
//! All estimators take replica outputs in index order and reduce them
//! sequentially, so results do not depend on how replicas were scheduled.

use crate::error::{Error, Result};

pub const Z95: f64 = 1.959963984540054;

#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize)]
pub struct EnsembleEstimate {
    pub n: usize,
    pub value: f64,
    pub stderr: f64,
    pub ci95: (f64, f64),
}

impl EnsembleEstimate {
    pub fn new(n: usize, value: f64, stderr: f64) -> Self {
        let stderr = stderr.max(0.0);
        Self { n, value, stderr, ci95: (value - Z95 * stderr, value + Z95 * stderr) }
    }

    pub fn contains(&self, x: f64) -> bool {
        self.ci95.0 <= x && x <= self.ci95.1
    }

    pub fn overlaps(&self, other: &Self) -> bool {
        self.ci95.0 <= other.ci95.1 && other.ci95.0 <= self.ci95.1
    }

    /// `self * c` with the interval scaled accordingly.
    pub fn scale(&self, c: f64) -> Self {
        Self::new(self.n, self.value * c, self.stderr * c.abs())
    }

    /// Difference of two independent estimates.
    pub fn minus(&self, other: &Self) -> Self {
        Self::new(self.n.min(other.n), self.value - other.value, self.stderr.hypot(other.stderr))
    }
}

fn need(xs: &[f64], k: usize) -> Result<()> {
    if xs.len() < k {
        return Err(Error::InvalidArgument(format!("{} samples, at least {k} needed", xs.len())));
    }
    Ok(())
}

pub fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Unbiased sample variance.
pub fn sample_variance(xs: &[f64]) -> f64 {
    let m = mean(xs);
    xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (xs.len() as f64 - 1.0)
}

/// Sample mean with stderr `s / sqrt(n)`.
pub fn mean_estimate(xs: &[f64]) -> Result<EnsembleEstimate> {
    need(xs, 2)?;
    Ok(EnsembleEstimate::new(xs.len(), mean(xs), (sample_variance(xs) / xs.len() as f64).sqrt()))
}

/// Sample variance; the stderr uses the fourth central moment,
/// `Var(s^2) ~ (m4 - s^4 (n - 3) / (n - 1)) / n`.
pub fn variance_estimate(xs: &[f64]) -> Result<EnsembleEstimate> {
    need(xs, 4)?;
    let n = xs.len() as f64;
    let m = mean(xs);
    let s2 = sample_variance(xs);
    let m4 = xs.iter().map(|x| (x - m).powi(4)).sum::<f64>() / n;
    let var = (m4 - s2 * s2 * (n - 3.0) / (n - 1.0)) / n;
    Ok(EnsembleEstimate::new(xs.len(), s2, var.max(0.0).sqrt()))
}

/// Sample covariance of paired observations, stderr from the spread of the
/// centered products.
pub fn covariance_estimate(xs: &[f64], ys: &[f64]) -> Result<EnsembleEstimate> {
    if xs.len() != ys.len() {
        return Err(Error::InvalidArgument("paired samples of different length".into()));
    }
    need(xs, 3)?;
    let (mx, my) = (mean(xs), mean(ys));
    let prods: Vec<f64> = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).collect();
    let n = xs.len() as f64;
    let cov = prods.iter().sum::<f64>() / (n - 1.0);
    Ok(EnsembleEstimate::new(xs.len(), cov, (sample_variance(&prods) / n).sqrt()))
}

/// Wilson score interval for `k` successes out of `n`.
pub fn wilson(k: u64, n: u64) -> (f64, f64) {
    if n == 0 {
        return (0.0, 1.0);
    }
    let (k, n) = (k as f64, n as f64);
    let p = k / n;
    let z2 = Z95 * Z95;
    let centre = (p + z2 / (2.0 * n)) / (1.0 + z2 / n);
    let half = Z95 / (1.0 + z2 / n) * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt();
    ((centre - half).max(0.0), (centre + half).min(1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{exp1, generator};

    #[test]
    fn interval_is_symmetric() {
        let e = EnsembleEstimate::new(10, 2.0, 0.5);
        assert!((e.ci95.1 - e.value - Z95 * 0.5).abs() < 1e-15);
        assert!((e.value - e.ci95.0 - Z95 * 0.5).abs() < 1e-15);
        assert!(e.contains(2.9) && !e.contains(3.0));
    }

    #[test]
    fn hand_computed_moments() {
        let xs = [1.0, 2.0, 3.0, 4.0];
        let m = mean_estimate(&xs).unwrap();
        assert_eq!(m.value, 2.5);
        assert!((m.stderr - (5.0f64 / 12.0).sqrt()).abs() < 1e-15);
        assert!((variance_estimate(&xs).unwrap().value - 5.0 / 3.0).abs() < 1e-15);
        let c = covariance_estimate(&xs, &[2.0, 4.0, 6.0, 8.0]).unwrap();
        assert!((c.value - 10.0 / 3.0).abs() < 1e-15);
        assert!(mean_estimate(&[1.0]).is_err());
    }

    #[test]
    fn doubling_the_sample_shrinks_the_stderr() {
        let mut rng = generator(17);
        let xs: Vec<f64> = (0..40000).map(|_| exp1(&mut rng)).collect();
        for est in [mean_estimate, variance_estimate] {
            let half = est(&xs[..20000]).unwrap().stderr;
            let full = est(&xs).unwrap().stderr;
            let ratio = full / half;
            assert!((ratio / std::f64::consts::FRAC_1_SQRT_2 - 1.0).abs() < 0.2, "{ratio}");
        }
    }

    #[test]
    fn wilson_bounds() {
        let (lo, hi) = wilson(0, 100);
        assert!(lo.abs() < 1e-12);
        assert!(hi > 0.0 && hi < 0.05);
        let (lo, hi) = wilson(50, 100);
        assert!((lo + hi - 1.0).abs() < 1e-12 && lo > 0.39 && hi < 0.61);
    }
}
