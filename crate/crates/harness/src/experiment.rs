//! The experiment kinds.
//!
//! Every kind draws its randomness from the master seed alone: replica `n`
//! of a stream tagged `s` uses `replica_seed(stream(seed, s), n)`. Replica
//! outputs are collected in index order before anything is reduced, so the
//! numbers do not depend on the worker count or the order replicas ran in.

use asep_core::ensemble::run_replicas_in_order;
use asep_core::lpp::{brute_force, lpp_three_step, lpp_upright, psi, Lattice, WeightGrid};
use asep_core::rng::{generator, key, Domain};
use asep_core::stats::{
    clt_diagnostic, current_variance, increment_covariance, mean_estimate, second_class_occupation, trend,
    variance_curve, velocity_and_tails, weighted_occupation, EnsembleEstimate, Sampler, Trend,
};
use asep_core::variational::{verify_seed, VerifySetup};
use asep_core::{Error, Result, Window};
use rand::seq::SliceRandom;
use rand::Rng;
use serde_json::{json, Value};

use crate::config::{Expectation, ExperimentConfig, FunctionSpec, Kind};

/// Order in which replicas are started.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum ReplicaOrder {
    #[default]
    Natural,
    Reversed,
    /// A permutation drawn from the given seed.
    Shuffled(u64),
}

impl ReplicaOrder {
    pub fn permutation(self, n: usize) -> Vec<usize> {
        let mut order: Vec<usize> = (0..n).collect();
        match self {
            ReplicaOrder::Natural => {}
            ReplicaOrder::Reversed => order.reverse(),
            ReplicaOrder::Shuffled(seed) => order.shuffle(&mut generator(key(Domain::Auxiliary, &[seed]))),
        }
        order
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct RunOptions {
    /// `0` uses every core.
    pub workers: usize,
    pub order: ReplicaOrder,
}

/// One line of a results table.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize)]
pub struct Row {
    pub t: f64,
    pub estimate: f64,
    pub stderr: f64,
    pub n: usize,
}

impl Row {
    fn from_estimate(t: f64, e: &EnsembleEstimate) -> Self {
        Row { t, estimate: e.value, stderr: e.stderr, n: e.n }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, serde::Serialize)]
pub struct Criterion {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

fn criterion(name: &str, pass: bool, detail: String) -> Criterion {
    Criterion { name: name.to_string(), pass, detail }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, serde::Serialize)]
pub struct AuditSummary {
    /// Replicas or seeds whose values could not be certified.
    pub violations: u64,
    /// Replicas that needed a wider window than the first.
    pub retried: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Pass,
    Fail,
    Inconclusive,
    Invalid,
}

impl Status {
    pub fn exit_code(self) -> i32 {
        match self {
            Status::Pass => 0,
            Status::Fail => 1,
            Status::Inconclusive => 2,
            Status::Invalid => 3,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Outcome {
    pub results: Vec<Row>,
    /// Further tables, written as `<name>.csv`.
    pub tables: Vec<(String, Vec<Row>)>,
    pub summary: Value,
    pub criteria: Vec<Criterion>,
    pub audit: AuditSummary,
    /// Why the estimates are missing, when too few replicas were certified
    /// to compute them.
    pub error: Option<String>,
}

impl Outcome {
    /// A failed criterion fails the run; otherwise uncertified replicas make
    /// it inconclusive.
    pub fn status(&self) -> Status {
        if self.criteria.iter().any(|c| !c.pass) {
            Status::Fail
        } else if self.audit.violations > 0 || self.error.is_some() {
            Status::Inconclusive
        } else {
            Status::Pass
        }
    }
}

/// Seed of an independent replica stream.
fn stream(seed: u64, tag: u64) -> u64 {
    key(Domain::Replica, &[seed, tag])
}

fn certified<T>(r: Result<T>) -> Result<Option<T>> {
    match r {
        Ok(v) => Ok(Some(v)),
        Err(Error::AuditTripped(_)) => Ok(None),
        Err(e) => Err(e),
    }
}

struct Ctx<'a> {
    config: &'a ExperimentConfig,
    options: RunOptions,
    audit: AuditSummary,
}

impl Ctx<'_> {
    fn replicas<T: Send>(&self, master: u64, f: impl Fn(u64) -> Result<T> + Sync + Send) -> Result<Vec<T>> {
        let order = self.options.order.permutation(self.config.replicas);
        run_replicas_in_order(&order, master, self.options.workers, |_, seed| f(seed))
    }

    /// Replicas whose audit may trip; those are dropped and counted.
    fn certified<T: Send>(
        &mut self,
        master: u64,
        f: impl Fn(u64) -> Result<T> + Sync + Send,
        attempts: impl Fn(&T) -> u32,
    ) -> Result<Vec<T>> {
        let out = self.replicas(master, |seed| certified(f(seed)))?;
        let n = out.len();
        let kept: Vec<T> = out.into_iter().flatten().collect();
        self.audit.violations += (n - kept.len()) as u64;
        self.audit.retried += kept.iter().filter(|s| attempts(s) > 1).count() as u64;
        Ok(kept)
    }

    fn sampler(&self) -> Result<Sampler> {
        Sampler::new(self.config.kernel.clone(), self.config.rho, self.config.margin)
    }
}

fn transpose<T: Copy>(rows: &[Vec<T>], m: usize) -> Vec<Vec<T>> {
    (0..m).map(|k| rows.iter().map(|r| r[k]).collect()).collect()
}

/// Runs the experiment the configuration names.
pub fn run_experiment(config: &ExperimentConfig, options: RunOptions) -> Result<Outcome> {
    let mut ctx = Ctx { config, options, audit: AuditSummary::default() };
    let parts = match config.kind {
        Kind::VerifyCoupling => verify_coupling(&mut ctx),
        Kind::VerifyLpp => verify_lpp(&mut ctx),
        Kind::Lln => lln(&mut ctx),
        Kind::LdpTails => ldp_tails(&mut ctx),
        Kind::Relation => relation(&mut ctx),
        Kind::Current => current(&mut ctx),
        Kind::VarianceCurve => variance(&mut ctx),
        Kind::Clt => clt(&mut ctx),
    };
    match parts {
        Ok((results, tables, summary, criteria)) => {
            Ok(Outcome { results, tables, summary, criteria, audit: ctx.audit, error: None })
        }
        // Dropped replicas can leave an estimator short of samples; that is a
        // verdict about the window, not about the process.
        Err(e) if ctx.audit.violations > 0 => Ok(Outcome {
            results: Vec::new(),
            tables: Vec::new(),
            summary: json!({ "error": e.to_string() }),
            criteria: Vec::new(),
            audit: ctx.audit,
            error: Some(e.to_string()),
        }),
        Err(e) => Err(e),
    }
}

type Parts = (Vec<Row>, Vec<(String, Vec<Row>)>, Value, Vec<Criterion>);

fn verify_coupling(ctx: &mut Ctx) -> Result<Parts> {
    let c = ctx.config;
    let setup = VerifySetup { rho: c.rho, times: c.times.clone(), observe: Window::symmetric(c.observe), margin: c.margin };
    let outcomes = ctx.replicas(c.seed, |seed| verify_seed(&setup, seed))?;
    let certified: Vec<_> = outcomes.iter().filter(|o| o.audit_ok).collect();
    ctx.audit.violations = (outcomes.len() - certified.len()) as u64;

    let mut results = Vec::new();
    for (m, &t) in c.times.iter().enumerate() {
        let xs: Vec<f64> = certified.iter().map(|o| o.discrepancy[m] as f64).collect();
        if let Ok(e) = mean_estimate(&xs) {
            results.push(Row::from_estimate(t, &e));
        }
    }
    let sum = |f: fn(&asep_core::variational::VerifyOutcome) -> u64| outcomes.iter().map(f).sum::<u64>();
    let (compared, envelope) = (sum(|o| o.compared_sites), sum(|o| o.envelope_mismatches));
    let (checks, discrepancy) = (sum(|o| o.discrepancy_checks), sum(|o| o.discrepancy_mismatches));
    let failing: Vec<u64> = outcomes.iter().filter(|o| o.envelope_mismatches + o.discrepancy_mismatches > 0).map(|o| o.seed).collect();
    let summary = json!({
        "kind": c.kind,
        "seeds": outcomes.len(),
        "certified_seeds": certified.len(),
        "compared_sites": compared,
        "envelope_mismatches": envelope,
        "discrepancy_checks": checks,
        "discrepancy_mismatches": discrepancy,
        "failing_seeds": failing,
        "events": sum(|o| o.events),
    });
    let criteria = vec![
        criterion(
            "envelope identity",
            envelope == 0 && compared > 0,
            format!("{envelope} mismatches in {compared} compared sites"),
        ),
        criterion(
            "second-class representation",
            discrepancy == 0 && checks > 0,
            format!("{discrepancy} mismatches in {checks} discrepancy checks"),
        ),
    ];
    Ok((results, Vec::new(), summary, criteria))
}

/// Three-step and up-right corners of every domain with at most `cells`
/// cells.
fn small_domains(cells: usize) -> Vec<(Lattice, i64, i64)> {
    let mut out = Vec::new();
    for rows in 1..=cells as i64 {
        for cols in 1..=cells as i64 / rows {
            out.push((Lattice::ThreeStep, cols - rows, rows));
            out.push((Lattice::UpRight, cols, rows));
        }
    }
    out
}

struct LppReplica {
    conjugacy_cells: u64,
    conjugacy_mismatches: u64,
    /// `(cells, |dp - enumeration|)` per small domain.
    brute: Vec<(usize, f64)>,
}

fn verify_lpp(ctx: &mut Ctx) -> Result<Parts> {
    let c = ctx.config;
    let domains = small_domains(c.cells);
    let reps = ctx.replicas(c.seed, |seed| {
        let mut rng = generator(key(Domain::Auxiliary, &[seed]));
        let (k, l) = (rng.random_range(1..=c.grid as i64), rng.random_range(1..=c.grid as i64));
        let up = WeightGrid::sample(Lattice::UpRight, k, l, seed)?;
        let (a, b) = (k - l, l);
        let three = WeightGrid::from_fn(Lattice::ThreeStep, a, b, |i, j| {
            let (x, y) = psi(i, j).expect("three-step cell");
            up.get(x, y).expect("shared domain")
        })?;
        let lt = lpp_three_step(&three, a, b)?;
        let tt = lpp_upright(&up, k, l)?;
        let mut rep = LppReplica { conjugacy_cells: 0, conjugacy_mismatches: 0, brute: Vec::new() };
        for (i, j) in three.cells() {
            let (x, y) = psi(i, j)?;
            rep.conjugacy_cells += 1;
            rep.conjugacy_mismatches += u64::from(lt.at(i, j) != tt.at(x, y));
        }
        for (d, &(lattice, a, b)) in domains.iter().enumerate() {
            let w = WeightGrid::sample(lattice, a, b, key(Domain::Auxiliary, &[seed, d as u64]))?;
            let dp = match lattice {
                Lattice::ThreeStep => lpp_three_step(&w, a, b)?,
                Lattice::UpRight => lpp_upright(&w, a, b)?,
            };
            let (ca, cb) = w.corner();
            rep.brute.push((w.len(), (dp.at(ca, cb) - brute_force(&w, ca, cb)?).abs()));
        }
        Ok(rep)
    })?;

    let conj_cells: u64 = reps.iter().map(|r| r.conjugacy_cells).sum();
    let conj_bad: u64 = reps.iter().map(|r| r.conjugacy_mismatches).sum();
    let mut results = Vec::new();
    let (mut checks, mut bad) = (0usize, 0usize);
    for size in 1..=c.cells {
        let errs: Vec<f64> = reps.iter().flat_map(|r| r.brute.iter().filter(|b| b.0 == size).map(|b| b.1)).collect();
        if errs.is_empty() {
            continue;
        }
        checks += errs.len();
        bad += errs.iter().filter(|&&e| e != 0.0).count();
        let worst = errs.iter().copied().fold(0.0, f64::max);
        results.push(Row { t: size as f64, estimate: worst, stderr: 0.0, n: errs.len() });
    }
    let summary = json!({
        "kind": c.kind,
        "grids": reps.len(),
        "largest_side": c.grid,
        "conjugacy_cells": conj_cells,
        "conjugacy_mismatches": conj_bad,
        "domains": domains.len(),
        "enumeration_checks": checks,
        "enumeration_mismatches": bad,
    });
    let criteria = vec![
        criterion("conjugacy", conj_bad == 0, format!("{conj_bad} mismatches in {conj_cells} cells")),
        criterion("path enumeration", bad == 0, format!("{bad} mismatches in {checks} domains")),
    ];
    Ok((results, Vec::new(), summary, criteria))
}

fn lln(ctx: &mut Ctx) -> Result<Parts> {
    let c = ctx.config;
    let sampler = ctx.sampler()?;
    let samples = ctx.certified(c.seed, |seed| sampler.second_class(&c.times, seed, false), |s| s.attempts)?;
    let rows: Vec<Vec<i64>> = samples.iter().map(|s| s.positions.clone()).collect();
    let positions = transpose(&rows, c.times.len());
    let report = velocity_and_tails(&positions, &c.times, &c.kernel, c.rho, c.epsilon, c.min_events)?;
    let mut results = Vec::new();
    for (xs, &t) in positions.iter().zip(&c.times) {
        let scaled: Vec<f64> = xs.iter().map(|&r| r as f64 / t).collect();
        results.push(Row::from_estimate(t, &mean_estimate(&scaled)?));
    }
    let (v, est) = (report.predicted, report.velocity);
    let pass = est.contains(v) && (est.value - v).abs() <= c.tolerance;
    let detail = format!(
        "mean R(t)/t = {:.4} +- {:.4}, CI [{:.4}, {:.4}], predicted {v}, tolerance {}",
        est.value, est.stderr, est.ci95.0, est.ci95.1, c.tolerance
    );
    let summary = json!({ "kind": c.kind, "report": report, "events": samples.iter().map(|s| s.events).sum::<u64>() });
    Ok((results, Vec::new(), summary, vec![criterion("velocity", pass, detail)]))
}

fn ldp_tails(ctx: &mut Ctx) -> Result<Parts> {
    let c = ctx.config;
    let sampler = ctx.sampler()?;
    // Independent replicas at each time.
    let mut positions = Vec::with_capacity(c.times.len());
    for (m, &t) in c.times.iter().enumerate() {
        let samples = ctx.certified(stream(c.seed, m as u64 + 1), |seed| sampler.second_class(&[t], seed, false), |s| s.attempts)?;
        positions.push(samples.iter().map(|s| s.positions[0]).collect::<Vec<_>>());
    }
    let report = velocity_and_tails(&positions, &c.times, &c.kernel, c.rho, c.epsilon, c.min_events)?;
    let results = report
        .tails
        .iter()
        .map(|p| Row { t: p.t, estimate: p.p_hat, stderr: (p.p_hat * (1.0 - p.p_hat) / p.n as f64).sqrt(), n: p.n as usize })
        .collect();
    let fit = report.decay;
    let pass = fit.slope < 0.0 && fit.excludes_zero();
    let detail = match fit.slope_ci95 {
        Some((lo, hi)) => format!("slope {:.5}, CI [{lo:.5}, {hi:.5}] from {} times", fit.slope, fit.points),
        None => format!("only {} times with at least {} tail events", fit.points, c.min_events),
    };
    let summary = json!({ "kind": c.kind, "epsilon": c.epsilon, "report": report });
    Ok((results, Vec::new(), summary, vec![criterion("tail decay", pass, detail)]))
}

fn relation(ctx: &mut Ctx) -> Result<Parts> {
    let c = ctx.config;
    let sampler = ctx.sampler()?;
    let f = FunctionSpec::Occupation.build(c.rho)?;
    let lhs_samples = ctx.certified(c.seed, |seed| sampler.additive(&f, &[c.t], seed), |s| s.attempts)?;
    let values: Vec<f64> = lhs_samples.iter().map(|s| s.values[0]).collect();
    let lhs = variance_curve(&[values], &f, c.rho, &[c.t], 1e-12)?[0];

    let dwell = ctx.certified(stream(c.seed, 1), |seed| sampler.origin_dwell(&c.horizons, seed), |s| s.attempts)?;
    let rows: Vec<Vec<f64>> = dwell.iter().map(|s| s.dwell.clone()).collect();
    let occupation = second_class_occupation(&rows, &c.horizons, c.stabilization)?;
    let at = c.horizons.iter().position(|&h| h == c.t).expect("validated");
    let scale = 2.0 * c.rho * (1.0 - c.rho);
    let rhs = occupation.estimates[at].scale(scale);
    let d: Vec<f64> = dwell.iter().map(|s| s.dwell[at]).collect();
    let m: Vec<f64> = dwell.iter().map(|s| s.dwell_moment[at]).collect();
    let weighted = weighted_occupation(&d, &m, c.t)?.scale(scale);

    let gap = (lhs.value - rhs.value).abs() / rhs.value;
    let results = vec![Row::from_estimate(c.t, &lhs)];
    let rhs_rows = c.horizons.iter().zip(&occupation.estimates).map(|(&h, e)| Row::from_estimate(h, &e.scale(scale))).collect();
    let show = |e: &EnsembleEstimate| format!("{:.4} [{:.4}, {:.4}]", e.value, e.ci95.0, e.ci95.1);
    let criteria = vec![
        criterion(
            "relation",
            lhs.overlaps(&rhs) && gap <= c.tolerance,
            format!("lhs {} rhs {} gap {:.1}% (limit {:.0}%)", show(&lhs), show(&rhs), 100.0 * gap, 100.0 * c.tolerance),
        ),
        criterion(
            "finite-time relation",
            lhs.overlaps(&weighted),
            format!("lhs {} weighted rhs {}", show(&lhs), show(&weighted)),
        ),
        criterion(
            "occupation stabilized",
            occupation.stabilized,
            match occupation.increments.last() {
                Some(inc) => format!("last increment {} against {:.4}", show(&inc.scale(scale)), rhs.value),
                None => "single horizon".into(),
            },
        ),
    ];
    let summary = json!({
        "kind": c.kind,
        "t": c.t,
        "lhs": lhs,
        "rhs": rhs,
        "weighted_rhs": weighted,
        "relative_gap": gap,
        "occupation": occupation,
    });
    Ok((results, vec![("occupation".into(), rhs_rows)], summary, criteria))
}

fn current(ctx: &mut Ctx) -> Result<Parts> {
    let c = ctx.config;
    let sampler = ctx.sampler()?;
    let samples = ctx.certified(c.seed, |seed| sampler.current(&c.times, seed), |s| s.attempts)?;
    let counts: Vec<Vec<f64>> = (0..c.times.len())
        .map(|m| samples.iter().map(|s| s.tallies[m].crossings() as f64).collect())
        .collect();
    let curve: Vec<EnsembleEstimate> = counts.iter().zip(&c.times).map(|(xs, &t)| current_variance(xs, t)).collect::<Result<_>>()?;
    let results: Vec<Row> = c.times.iter().zip(&curve).map(|(&t, e)| Row::from_estimate(t, e)).collect();
    let increments: Vec<EnsembleEstimate> =
        counts.windows(2).map(|w| increment_covariance(&w[0], &w[1])).collect::<Result<_>>()?;
    let last = c.times.len() - 1;
    let squares: Vec<f64> = samples.iter().map(|s| s.tallies[last].martingale().powi(2)).collect();
    let compensators: Vec<f64> = samples.iter().map(|s| s.tallies[last].compensator()).collect();
    let (msq, comp) = (mean_estimate(&squares)?, mean_estimate(&compensators)?);

    let limit = c.rho * (1.0 - c.rho) * (1.0 - 2.0 * c.rho).abs();
    let at_t = curve[last];
    let mut criteria = Vec::new();
    if limit > 0.0 {
        let gap = (at_t.value - limit).abs() / limit;
        criteria.push(criterion(
            "variance limit",
            gap <= c.tolerance,
            format!("Var N(t)/t = {:.5} +- {:.5} against {limit:.5}, gap {:.1}%", at_t.value, at_t.stderr, 100.0 * gap),
        ));
    } else {
        let fit = trend(&c.times, &curve, 0.0);
        criteria.push(criterion(
            "variance decays",
            fit.verdict == Trend::Bounded,
            format!("log-log slope {:.3}, CI {:?}", fit.fit.slope, fit.fit.slope_ci95),
        ));
    }
    let positive: Vec<usize> = (0..increments.len()).filter(|&k| increments[k].ci95.0 > 0.0).collect();
    criteria.push(criterion(
        "negative increment correlation",
        positive.is_empty(),
        format!("{} of {} increment covariances significantly positive", positive.len(), increments.len()),
    ));
    criteria.push(criterion(
        "martingale",
        msq.overlaps(&comp),
        format!("E[M(t)^2] = {:.3} +- {:.3}, E[compensator] = {:.3} +- {:.3}", msq.value, msq.stderr, comp.value, comp.stderr),
    ));
    let summary = json!({
        "kind": c.kind,
        "limit": limit,
        "variance": curve,
        "increment_covariances": increments,
        "martingale_square": msq,
        "compensator": comp,
    });
    Ok((results, Vec::new(), summary, criteria))
}

fn variance(ctx: &mut Ctx) -> Result<Parts> {
    let c = ctx.config;
    let sampler = ctx.sampler()?;
    let f = c.function.build(c.rho)?;
    let samples = ctx.certified(c.seed, |seed| sampler.additive(&f, &c.times, seed), |s| s.attempts)?;
    let rows: Vec<Vec<f64>> = samples.iter().map(|s| s.values.clone()).collect();
    let curve = variance_curve(&transpose(&rows, c.times.len()), &f, c.rho, &c.times, 1e-12)?;
    let results = c.times.iter().zip(&curve).map(|(&t, e)| Row::from_estimate(t, e)).collect();
    let fit = trend(&c.times, &curve, c.threshold);
    let mut criteria = Vec::new();
    let want = match c.expect {
        Expectation::Bounded => Some(Trend::Bounded),
        Expectation::Growing => Some(Trend::Growing),
        Expectation::None => None,
    };
    if let Some(want) = want {
        criteria.push(criterion(
            "trend",
            fit.verdict == want,
            format!("verdict {:?}, log-log slope {:.3}, CI {:?}, threshold {}", fit.verdict, fit.fit.slope, fit.fit.slope_ci95, c.threshold),
        ));
    }
    let summary = json!({ "kind": c.kind, "function": c.function.to_string(), "curve": curve, "trend": fit, "expect": c.expect });
    Ok((results, Vec::new(), summary, criteria))
}

fn clt(ctx: &mut Ctx) -> Result<Parts> {
    let c = ctx.config;
    let sampler = ctx.sampler()?;
    let f = c.function.build(c.rho)?;
    let samples = ctx.certified(c.seed, |seed| sampler.additive(&f, &[c.t], seed), |s| s.attempts)?;
    let values: Vec<f64> = samples.iter().map(|s| s.values[0]).collect();
    let report = clt_diagnostic(&values, c.t, c.sigma2)?;
    let results = vec![Row::from_estimate(c.t, &report.variance)];
    let crit = match report.ks {
        Some(ks) => criterion(
            "normal fit",
            !ks.rejected_at(c.level),
            format!("KS statistic {:.4}, p = {:.4}, level {}", ks.statistic, ks.p_value, c.level),
        ),
        None => criterion("normal fit", false, "all samples equal".into()),
    };
    let summary = json!({ "kind": c.kind, "function": c.function.to_string(), "report": report });
    Ok((results, Vec::new(), summary, vec![crit]))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn permutations_are_permutations() {
        for order in [ReplicaOrder::Natural, ReplicaOrder::Reversed, ReplicaOrder::Shuffled(3)] {
            let mut p = order.permutation(20);
            p.sort_unstable();
            assert_eq!(p, (0..20).collect::<Vec<_>>());
        }
        assert_ne!(ReplicaOrder::Shuffled(3).permutation(20), ReplicaOrder::Natural.permutation(20));
    }

    #[test]
    fn small_domains_respect_the_cell_limit() {
        let d = small_domains(12);
        for &(lattice, a, b) in &d {
            let g = WeightGrid::zeros(lattice, a, b).unwrap();
            assert!(g.len() <= 12);
        }
        // (rows, cols) pairs with rows * cols <= 12, once per lattice
        assert_eq!(d.len(), 2 * 35);
    }

    #[test]
    fn status_needs_every_criterion_and_a_clean_audit() {
        let mut o = Outcome {
            results: vec![],
            tables: vec![],
            summary: Value::Null,
            criteria: vec![criterion("a", true, String::new())],
            audit: AuditSummary::default(),
            error: None,
        };
        assert_eq!(o.status(), Status::Pass);
        o.audit.violations = 1;
        assert_eq!(o.status(), Status::Inconclusive);
        o.criteria.push(criterion("b", false, String::new()));
        assert_eq!(o.status(), Status::Fail);
    }
}
