//! Ensemble estimators for occupation-time variances, the second-class
//! particle and the current.

use crate::error::{Error, Result};
use crate::kernel::JumpKernel;

use super::estimate::{covariance_estimate, mean_estimate, variance_estimate, wilson, EnsembleEstimate};
use super::inference::{ks_normal, weighted_line, FitTest, LineFit};
use super::local::LocalFunction;

/// `sigma^2_t / t = E[A_f(t)^2] / t` at each time. `samples[m][r]` is
/// `A_f(times[m])` on replica `r`. `f` must be mean-zero under the product
/// measure at `rho`, otherwise the variance would grow like `t^2`.
pub fn variance_curve(
    samples: &[Vec<f64>],
    f: &LocalFunction<f64>,
    rho: f64,
    times: &[f64],
    tolerance: f64,
) -> Result<Vec<EnsembleEstimate>> {
    let m = f.mean(&rho);
    if m.abs() > tolerance {
        return Err(Error::NotMeanZero(m));
    }
    if samples.len() != times.len() {
        return Err(Error::InvalidArgument(format!("{} sample sets for {} times", samples.len(), times.len())));
    }
    samples
        .iter()
        .zip(times)
        .map(|(a, &t)| {
            let squares: Vec<f64> = a.iter().map(|x| x * x).collect();
            Ok(mean_estimate(&squares)?.scale(1.0 / t))
        })
        .collect()
}

/// Whether a curve grows, judged by the log-log slope against `threshold`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
pub enum Trend {
    /// Slope CI entirely below the threshold.
    Bounded,
    /// Slope CI entirely above the threshold.
    Growing,
    Inconclusive,
}

#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize)]
pub struct TrendFit {
    pub fit: LineFit,
    pub threshold: f64,
    pub verdict: Trend,
}

/// Weighted fit of `log value` against `log t`, with `Var(log value) ~
/// (stderr / value)^2`.
pub fn trend(times: &[f64], curve: &[EnsembleEstimate], threshold: f64) -> TrendFit {
    let x: Vec<f64> = times.iter().map(|t| t.ln()).collect();
    let y: Vec<f64> = curve.iter().map(|e| if e.value > 0.0 { e.value.ln() } else { f64::NAN }).collect();
    let v: Vec<f64> = curve.iter().map(|e| (e.stderr / e.value).powi(2)).collect();
    let fit = weighted_line(&x, &y, &v);
    let verdict = match fit.slope_ci95 {
        Some((_, hi)) if hi < threshold => Trend::Bounded,
        Some((lo, _)) if lo > threshold => Trend::Growing,
        _ => Trend::Inconclusive,
    };
    TrendFit { fit, threshold, verdict }
}

/// Estimates of `int_0^T P[R(s) = 0] ds` at several horizons.
#[derive(Clone, Debug, PartialEq, serde::Serialize)]
pub struct OccupationEstimate {
    pub horizons: Vec<f64>,
    pub estimates: Vec<EnsembleEstimate>,
    /// Mean occupation gained between consecutive horizons.
    pub increments: Vec<EnsembleEstimate>,
    /// Whether the last increment is negligible, see
    /// [`second_class_occupation`].
    pub stabilized: bool,
    pub warning: Option<String>,
}

/// From exact per-replica dwell times: `dwell[r][m]` is the time replica `r`
/// spent at the origin up to `horizons[m]`. The estimate counts as
/// stabilized when the upper 95% bound of the last increment is at most
/// `rel_tol` times the last estimate.
pub fn second_class_occupation(dwell: &[Vec<f64>], horizons: &[f64], rel_tol: f64) -> Result<OccupationEstimate> {
    if dwell.iter().any(|d| d.len() != horizons.len()) {
        return Err(Error::InvalidArgument("every replica needs one dwell time per horizon".into()));
    }
    let column = |m: usize| dwell.iter().map(|d| d[m]).collect::<Vec<f64>>();
    let estimates = (0..horizons.len()).map(|m| mean_estimate(&column(m))).collect::<Result<Vec<_>>>()?;
    let increments = (1..horizons.len())
        .map(|m| mean_estimate(&dwell.iter().map(|d| d[m] - d[m - 1]).collect::<Vec<_>>()))
        .collect::<Result<Vec<_>>>()?;
    let stabilized = match (increments.last(), estimates.last()) {
        (Some(inc), Some(last)) => inc.ci95.1 <= rel_tol * last.value,
        _ => false,
    };
    Ok(OccupationEstimate { horizons: horizons.to_vec(), estimates, increments, stabilized, warning: None })
}

/// Fallback when only snapshots are available: `at_origin[r][m]` says whether
/// replica `r` had its second-class particle at the origin at time `m * dt`.
/// Left-point rule; warns when `dt` exceeds the shortest possible mean
/// holding time at the origin, `1 / sum_k (p(k) + p(-k))`.
pub fn occupation_from_grid(
    at_origin: &[Vec<bool>],
    dt: f64,
    horizons: &[f64],
    kernel: &JumpKernel,
    rel_tol: f64,
) -> Result<OccupationEstimate> {
    if !(dt > 0.0) {
        return Err(Error::InvalidArgument(format!("grid step {dt}")));
    }
    let steps: Vec<usize> = horizons.iter().map(|h| (h / dt).round() as usize).collect();
    let dwell = at_origin
        .iter()
        .map(|row| {
            let mut acc = 0.0;
            let mut out = Vec::with_capacity(steps.len());
            let mut k = 0;
            for &s in &steps {
                if s > row.len() {
                    return Err(Error::InvalidArgument(format!("grid of {} points does not reach step {s}", row.len())));
                }
                while k < s {
                    acc += f64::from(u8::from(row[k])) * dt;
                    k += 1;
                }
                out.push(acc);
            }
            Ok(out)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut est = second_class_occupation(&dwell, horizons, rel_tol)?;
    let holding = 1.0 / kernel.two_sided_rate();
    if dt > holding {
        est.warning = Some(format!("grid step {dt} exceeds the mean holding time bound {holding}"));
    }
    Ok(est)
}

/// `int_0^t (1 - s / t) P[R(s) = 0] ds`, the occupation integral weighted
/// as it enters `E[A_f(t)^2] / t` at finite `t`. Takes per-replica dwell
/// times and dwell moments `int_0^t s 1{R(s) = 0} ds` at `t`.
pub fn weighted_occupation(dwell: &[f64], moment: &[f64], t: f64) -> Result<EnsembleEstimate> {
    if dwell.len() != moment.len() {
        return Err(Error::InvalidArgument("dwell times and moments differ in length".into()));
    }
    let xs: Vec<f64> = dwell.iter().zip(moment).map(|(d, m)| d - m / t).collect();
    mean_estimate(&xs)
}

#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize)]
pub struct TailPoint {
    pub t: f64,
    pub n: u64,
    pub events: u64,
    pub p_hat: f64,
    pub wilson95: (f64, f64),
}

#[derive(Clone, Debug, PartialEq, serde::Serialize)]
pub struct VelocityReport {
    /// Expected velocity `(1 - 2 rho) sum_k k p(k)`.
    pub predicted: f64,
    /// Mean `R(t) / t` at the largest time.
    pub velocity: EnsembleEstimate,
    pub tails: Vec<TailPoint>,
    /// Weighted fit of `log p_hat` against `t` over points with at least
    /// `min_events` tail events; unbounded CI when fewer than two qualify.
    pub decay: LineFit,
}

/// `positions[m][r]` is `R(times[m])` on replica `r`; different times may
/// come from different replicas.
pub fn velocity_and_tails(
    positions: &[Vec<i64>],
    times: &[f64],
    kernel: &JumpKernel,
    rho: f64,
    epsilon: f64,
    min_events: u64,
) -> Result<VelocityReport> {
    if !(rho > 0.0 && rho < 1.0) {
        return Err(Error::InvalidDensity(rho));
    }
    if positions.len() != times.len() || times.is_empty() {
        return Err(Error::InvalidArgument(format!("{} sample sets for {} times", positions.len(), times.len())));
    }
    let v = (1.0 - 2.0 * rho) * kernel.drift();
    let tails: Vec<TailPoint> = positions
        .iter()
        .zip(times)
        .map(|(rs, &t)| {
            let events = rs.iter().filter(|&&r| (r as f64 - v * t).abs() > epsilon * t).count() as u64;
            let n = rs.len() as u64;
            TailPoint { t, n, events, p_hat: events as f64 / n as f64, wilson95: wilson(events, n) }
        })
        .collect();
    let (x, y, var): (Vec<f64>, Vec<f64>, Vec<f64>) = tails
        .iter()
        .filter(|p| p.events >= min_events && p.events < p.n)
        .map(|p| (p.t, p.p_hat.ln(), (1.0 - p.p_hat) / p.events as f64))
        .fold((vec![], vec![], vec![]), |(mut a, mut b, mut c), (x, y, v)| {
            a.push(x);
            b.push(y);
            c.push(v);
            (a, b, c)
        });
    let last = times.len() - 1;
    let t = times[last];
    let scaled: Vec<f64> = positions[last].iter().map(|&r| r as f64 / t).collect();
    Ok(VelocityReport {
        predicted: v,
        velocity: mean_estimate(&scaled)?,
        tails,
        decay: weighted_line(&x, &y, &var),
    })
}

/// `Var(N(t)) / t` from per-replica net crossings.
pub fn current_variance(crossings: &[f64], t: f64) -> Result<EnsembleEstimate> {
    Ok(variance_estimate(crossings)?.scale(1.0 / t))
}

/// `Cov(N(t), N(t + s) - N(t))` from paired per-replica counts.
pub fn increment_covariance(at_t: &[f64], at_ts: &[f64]) -> Result<EnsembleEstimate> {
    let inc: Vec<f64> = at_ts.iter().zip(at_t).map(|(b, a)| b - a).collect();
    covariance_estimate(at_t, &inc)
}

#[derive(Clone, Debug, PartialEq, serde::Serialize)]
pub struct CltReport {
    pub n: usize,
    /// `E[(A_f(t) / sqrt t)^2]` from the samples.
    pub variance: EnsembleEstimate,
    /// All samples equal: there is no spread to compare.
    pub degenerate: bool,
    /// KS test of `A_f(t) / sqrt t` against a centered normal with variance
    /// `sigma2`.
    pub ks: Option<FitTest>,
}

/// Compares `A_f(t) / sqrt t` with `N(0, sigma2)`; `sigma2` defaults to the
/// sample second moment.
pub fn clt_diagnostic(samples: &[f64], t: f64, sigma2: Option<f64>) -> Result<CltReport> {
    let scaled: Vec<f64> = samples.iter().map(|a| a / t.sqrt()).collect();
    let squares: Vec<f64> = scaled.iter().map(|x| x * x).collect();
    let variance = mean_estimate(&squares)?;
    let degenerate = scaled.iter().all(|&x| x == scaled[0]);
    let ks = if degenerate {
        None
    } else {
        let s2 = sigma2.unwrap_or(variance.value);
        Some(ks_normal(&scaled, 0.0, s2.sqrt())?)
    };
    Ok(CltReport { n: samples.len(), variance, degenerate, ks })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{exp1, generator, open01};

    #[test]
    fn variance_curve_rejects_uncentered_functions() {
        let f = LocalFunction::centered_occupation(0, 0.3);
        assert!(matches!(variance_curve(&[vec![0.0; 3]], &f, 0.4, &[1.0], 1e-9), Err(Error::NotMeanZero(m)) if (m - 0.1).abs() < 1e-12));
        let curve = variance_curve(&[vec![0.0; 3]], &f, 0.3, &[1.0], 1e-9).unwrap();
        assert_eq!((curve[0].value, curve[0].stderr), (0.0, 0.0));
    }

    #[test]
    fn trends_of_power_laws() {
        let times = [100.0, 200.0, 400.0, 800.0];
        let curve = |p: f64| times.iter().map(|t: &f64| EnsembleEstimate::new(1000, t.powf(p), 0.01 * t.powf(p))).collect::<Vec<_>>();
        assert_eq!(trend(&times, &curve(0.0), 0.25).verdict, Trend::Bounded);
        assert_eq!(trend(&times, &curve(0.5), 0.25).verdict, Trend::Growing);
        assert!((trend(&times, &curve(0.5), 0.25).fit.slope - 0.5).abs() < 1e-12);
    }

    #[test]
    fn occupation_of_exponential_dwell() {
        // Dwell of a particle that leaves the origin after an Exp(1) time.
        let mut rng = generator(2);
        let horizons = [1.0, 5.0, 20.0];
        let dwell: Vec<Vec<f64>> = (0..20000)
            .map(|_| {
                let e = exp1(&mut rng);
                horizons.iter().map(|&h| e.min(h)).collect()
            })
            .collect();
        let est = second_class_occupation(&dwell, &horizons, 0.01).unwrap();
        assert!(est.estimates[2].contains(1.0 - (-20.0f64).exp()));
        assert!(est.estimates[0].contains(1.0 - (-1.0f64).exp()));
        assert!(est.stabilized);
        let early: Vec<Vec<f64>> = dwell.iter().map(|d| d[..2].to_vec()).collect();
        assert!(!second_class_occupation(&early, &horizons[..2], 0.01).unwrap().stabilized);
    }

    #[test]
    fn grid_fallback_and_its_warning() {
        let k = JumpKernel::tasep();
        let mut rng = generator(8);
        let dt = 0.01;
        let rows: Vec<Vec<bool>> = (0..4000)
            .map(|_| {
                let e = exp1(&mut rng);
                (0..1000).map(|m| (m as f64 * dt) < e).collect()
            })
            .collect();
        let est = occupation_from_grid(&rows, dt, &[10.0], &k, 0.05).unwrap();
        assert!(est.warning.is_none());
        assert!((est.estimates[0].value - 1.0).abs() < 0.05);
        let coarse: Vec<Vec<bool>> = rows.iter().map(|r| r.iter().step_by(100).copied().collect()).collect();
        assert!(occupation_from_grid(&coarse, 1.0, &[10.0], &k, 0.05).unwrap().warning.is_some());
    }

    #[test]
    fn tails_and_decay_fit() {
        // R(t) = v t + noise whose tail decays exponentially in t.
        let k = JumpKernel::tasep();
        let mut rng = generator(4);
        let times = [10.0, 20.0, 40.0, 80.0];
        let positions: Vec<Vec<i64>> = times
            .iter()
            .map(|&t| {
                (0..20000)
                    .map(|_| {
                        let far = open01(&mut rng) < (-0.05 * t as f64).exp();
                        (0.5 * t) as i64 + if far { (t as i64) / 2 + 1 } else { 0 }
                    })
                    .collect()
            })
            .collect();
        let rep = velocity_and_tails(&positions, &times, &k, 0.25, 0.3, 10).unwrap();
        assert_eq!(rep.predicted, 0.5);
        assert!(rep.decay.excludes_zero() && rep.decay.slope < 0.0);
        assert!(rep.decay.slope_ci95.unwrap().0 < -0.05 && rep.decay.slope_ci95.unwrap().1 > -0.05);
        let few: Vec<Vec<i64>> = positions.iter().map(|p| p[..10].to_vec()).collect();
        let sparse = velocity_and_tails(&few, &times, &k, 0.25, 0.3, 10).unwrap();
        assert!(sparse.decay.slope_ci95.is_none());
        assert!(velocity_and_tails(&few, &times, &k, 0.0, 0.3, 10).is_err());
    }

    #[test]
    fn clt_flags_degenerate_samples() {
        let rep = clt_diagnostic(&[0.0; 50], 10.0, None).unwrap();
        assert!(rep.degenerate && rep.ks.is_none());
        let mut rng = generator(9);
        let xs: Vec<f64> = (0..4000).map(|_| (exp1(&mut rng) - exp1(&mut rng)) * 3.0).collect();
        let rep = clt_diagnostic(&xs, 9.0, None).unwrap();
        // Laplace, not normal.
        assert!(rep.ks.unwrap().rejected_at(0.01));
        assert!((rep.variance.value - 2.0).abs() < 0.2);
    }
}
