//! Goodness-of-fit tests and weighted regression.

use statrs::distribution::{ChiSquared, ContinuousCDF, Normal};

use crate::error::{Error, Result};

use super::estimate::Z95;

/// Outcome of a goodness-of-fit test.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize)]
pub struct FitTest {
    pub statistic: f64,
    pub p_value: f64,
    /// Sample size, or number of bins for binned tests.
    pub n: usize,
    pub degrees_of_freedom: Option<usize>,
}

impl FitTest {
    pub fn rejected_at(&self, level: f64) -> bool {
        self.p_value < level
    }
}

/// `P[K > lambda]` for the Kolmogorov distribution.
pub fn kolmogorov_survival(lambda: f64) -> f64 {
    if lambda < 0.2 {
        return 1.0;
    }
    let mut s = 0.0;
    for k in 1..=100 {
        let term = (-2.0 * (k * k) as f64 * lambda * lambda).exp();
        s += if k % 2 == 1 { term } else { -term };
        if term < 1e-17 {
            break;
        }
    }
    (2.0 * s).clamp(0.0, 1.0)
}

/// One-sample Kolmogorov-Smirnov test against the continuous `cdf`, with the
/// Stephens small-sample correction of the statistic.
pub fn ks_test(samples: &[f64], cdf: impl Fn(f64) -> f64) -> Result<FitTest> {
    if samples.is_empty() {
        return Err(Error::InvalidArgument("no samples".into()));
    }
    let mut xs = samples.to_vec();
    xs.sort_by(f64::total_cmp);
    let n = xs.len() as f64;
    let d = xs
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / n).max((i + 1) as f64 / n - f)
        })
        .fold(0.0, f64::max);
    let lambda = (n.sqrt() + 0.12 + 0.11 / n.sqrt()) * d;
    Ok(FitTest { statistic: d, p_value: kolmogorov_survival(lambda), n: xs.len(), degrees_of_freedom: None })
}

pub fn ks_normal(samples: &[f64], mean: f64, sd: f64) -> Result<FitTest> {
    let normal = Normal::new(mean, sd).map_err(|e| Error::InvalidArgument(format!("normal law: {e}")))?;
    ks_test(samples, |x| normal.cdf(x))
}

/// Pearson chi-square test of integer samples against `pmf`. Bins are grown
/// outwards from the mode until each holds an expected count of at least
/// `min_expected`; the two tails are pooled into the outermost bins.
pub fn chi_square_integer(samples: &[i64], pmf: impl Fn(i64) -> f64, min_expected: f64) -> Result<FitTest> {
    if samples.is_empty() {
        return Err(Error::InvalidArgument("no samples".into()));
    }
    let n = samples.len() as f64;
    let (lo, hi) = (*samples.iter().min().unwrap(), *samples.iter().max().unwrap());
    let mode = (lo..=hi).max_by(|&a, &b| pmf(a).total_cmp(&pmf(b))).unwrap();
    // Extend the support until the remaining mass is negligible.
    let (mut a, mut b) = (lo.min(mode), hi.max(mode));
    while n * pmf(a - 1) > 1e-9 {
        a -= 1;
    }
    while n * pmf(b + 1) > 1e-9 {
        b += 1;
    }
    // Right-closed bins `(edge_{m-1}, edge_m]` built left to right.
    let mut bins: Vec<(i64, i64, f64)> = Vec::new();
    let mut start = a;
    let mut acc = 0.0;
    for x in a..=b {
        acc += n * pmf(x);
        if acc >= min_expected {
            bins.push((start, x, acc));
            start = x + 1;
            acc = 0.0;
        }
    }
    if let Some(last) = bins.last_mut() {
        last.1 = b;
        last.2 += acc;
    }
    if bins.len() < 2 {
        return Err(Error::InvalidArgument("fewer than two bins".into()));
    }
    let (first, last) = (0, bins.len() - 1);
    let mut observed = vec![0u64; bins.len()];
    for &s in samples {
        let idx = if s < bins[first].0 {
            first
        } else if s > bins[last].1 {
            last
        } else {
            bins.partition_point(|bin| bin.1 < s)
        };
        observed[idx] += 1;
    }
    // Tail mass beyond the outer bins goes to them as well.
    let total: f64 = bins.iter().map(|b| b.2).sum();
    bins[last].2 += (n - total).max(0.0);
    let stat: f64 = bins.iter().zip(&observed).map(|(b, &o)| (o as f64 - b.2).powi(2) / b.2).sum();
    let df = bins.len() - 1;
    let chi = ChiSquared::new(df as f64).map_err(|e| Error::InvalidArgument(format!("chi-square law: {e}")))?;
    Ok(FitTest { statistic: stat, p_value: chi.sf(stat), n: bins.len(), degrees_of_freedom: Some(df) })
}

fn ln_poisson(k: u64, mu: f64) -> f64 {
    k as f64 * mu.ln() - mu - statrs::function::gamma::ln_gamma(k as f64 + 1.0)
}

/// `P[X = n]` for the position at time `t` of a rate-one continuous-time
/// symmetric nearest-neighbour walk: `e^{-t} I_n(t)`, computed as the law of
/// a difference of two Poisson(`t/2`) variables.
pub fn symmetric_walk_pmf(n: i64, t: f64) -> f64 {
    if t == 0.0 {
        return f64::from(n == 0);
    }
    let mu = t / 2.0;
    let m = n.unsigned_abs();
    let mut s = 0.0;
    let mut k = 0u64;
    loop {
        let term = (ln_poisson(k + m, mu) + ln_poisson(k, mu)).exp();
        s += term;
        if k as f64 > mu && term < 1e-300_f64.max(s * 1e-18) {
            break;
        }
        k += 1;
    }
    s
}

/// Weighted least-squares line with known observation variances.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    pub slope_stderr: f64,
    /// `None` when fewer than two points were usable.
    pub slope_ci95: Option<(f64, f64)>,
    pub points: usize,
}

impl LineFit {
    pub fn excludes_zero(&self) -> bool {
        self.slope_ci95.is_some_and(|(lo, hi)| lo > 0.0 || hi < 0.0)
    }
}

/// Fits `y = a + b x` with weights `1 / var`; the slope variance is
/// `1 / sum w (x - xbar_w)^2`.
pub fn weighted_line(x: &[f64], y: &[f64], var: &[f64]) -> LineFit {
    let pts: Vec<(f64, f64, f64)> = x
        .iter()
        .zip(y)
        .zip(var)
        .filter(|&((_, y), v)| y.is_finite() && *v > 0.0 && v.is_finite())
        .map(|((&x, &y), &v)| (x, y, 1.0 / v))
        .collect();
    let distinct = pts.windows(2).any(|w| w[0].0 != w[1].0);
    if pts.len() < 2 || !distinct {
        let (slope, intercept) = (f64::NAN, pts.first().map_or(f64::NAN, |p| p.1));
        return LineFit { slope, intercept, slope_stderr: f64::INFINITY, slope_ci95: None, points: pts.len() };
    }
    let sw: f64 = pts.iter().map(|p| p.2).sum();
    let xb = pts.iter().map(|p| p.2 * p.0).sum::<f64>() / sw;
    let yb = pts.iter().map(|p| p.2 * p.1).sum::<f64>() / sw;
    let sxx: f64 = pts.iter().map(|p| p.2 * (p.0 - xb).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| p.2 * (p.0 - xb) * (p.1 - yb)).sum();
    let slope = sxy / sxx;
    let se = (1.0 / sxx).sqrt();
    LineFit {
        slope,
        intercept: yb - slope * xb,
        slope_stderr: se,
        slope_ci95: Some((slope - Z95 * se, slope + Z95 * se)),
        points: pts.len(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{generator, open01};

    #[test]
    fn kolmogorov_tail_values() {
        // classical critical values
        assert!((kolmogorov_survival(1.3581) - 0.05).abs() < 1e-4);
        assert!((kolmogorov_survival(1.6276) - 0.01).abs() < 1e-4);
        assert_eq!(kolmogorov_survival(0.0), 1.0);
    }

    #[test]
    fn ks_accepts_uniforms_and_rejects_a_shift() {
        let mut rng = generator(5);
        let u: Vec<f64> = (0..2000).map(|_| open01(&mut rng)).collect();
        let cdf = |x: f64| x.clamp(0.0, 1.0);
        assert!(!ks_test(&u, cdf).unwrap().rejected_at(0.01));
        let shifted: Vec<f64> = u.iter().map(|x| x * 0.9).collect();
        assert!(ks_test(&shifted, cdf).unwrap().rejected_at(0.01));
    }

    #[test]
    fn walk_pmf_sums_to_one_with_the_right_variance() {
        for t in [0.5, 5.0, 50.0, 400.0] {
            let r = (t as i64 + 60) * 2;
            let (mut s, mut v) = (0.0, 0.0);
            for n in -r..=r {
                let p = symmetric_walk_pmf(n, t);
                s += p;
                v += p * (n * n) as f64;
            }
            assert!((s - 1.0).abs() < 1e-12, "{t}: {s}");
            assert!((v - t).abs() < 1e-9 * t.max(1.0), "{t}: {v}");
        }
        assert!((symmetric_walk_pmf(0, 1.0) - (-1.0f64).exp() * 1.2660658777520082).abs() < 1e-15);
    }

    #[test]
    fn chi_square_on_exact_walk_samples() {
        // Difference of two Poisson counts from uniforms.
        let mut rng = generator(11);
        let t = 20.0;
        let mut poisson = |mu: f64| {
            let mut k = 0i64;
            let mut s = -open01(&mut rng).ln();
            while s < mu {
                k += 1;
                s -= open01(&mut rng).ln();
            }
            k
        };
        let xs: Vec<i64> = (0..5000).map(|_| poisson(t / 2.0) - poisson(t / 2.0)).collect();
        let fit = chi_square_integer(&xs, |n| symmetric_walk_pmf(n, t), 5.0).unwrap();
        assert!(!fit.rejected_at(0.01), "{fit:?}");
        let wide: Vec<i64> = xs.iter().map(|x| x * 2).collect();
        assert!(chi_square_integer(&wide, |n| symmetric_walk_pmf(n, t), 5.0).unwrap().rejected_at(0.01));
    }

    #[test]
    fn weighted_line_recovers_exact_data() {
        let x = [1.0, 2.0, 3.0, 4.0];
        let y: Vec<f64> = x.iter().map(|x| 3.0 - 0.5 * x).collect();
        let fit = weighted_line(&x, &y, &[0.01, 0.02, 0.01, 0.04]);
        assert!((fit.slope + 0.5).abs() < 1e-12 && (fit.intercept - 3.0).abs() < 1e-12);
        assert!(fit.excludes_zero());
        let one = weighted_line(&x[..1], &y[..1], &[1.0]);
        assert!(one.slope_ci95.is_none() && !one.excludes_zero());
    }
}
