//! One-replica drivers for the ensemble estimators.
//!
//! Every driver simulates a finite window and only returns values the audit
//! certifies as infinite-lattice values. When the audit trips, the replica is
//! rerun on a larger window with the same seed. Clock epochs and initial bits
//! are keyed by site, so a retry sees the same infinite-lattice realization
//! and the returned value does not depend on the window that produced it.

use crate::clock::ClockRealization;
use crate::coupled::{CoupledProcess, CoupledState};
use crate::current::{CurrentObserver, CurrentTally};
use crate::error::{Error, Result};
use crate::exclusion::{ExclusionProcess, MarginPolicy};
use crate::kernel::JumpKernel;
use crate::occupancy::{Boundary, Conditioning, Occupancy, Window};

use super::functional::{AdditiveObserver, OriginDwell};
use super::local::LocalFunction;

#[derive(Clone, Debug, PartialEq)]
pub struct Sampler {
    pub kernel: JumpKernel,
    pub rho: f64,
    pub margin: MarginPolicy,
    /// Windows tried before giving up on a replica.
    pub max_attempts: u32,
}

/// Second-class particle started at the origin, lower configuration in
/// equilibrium conditioned on an empty origin.
#[derive(Clone, Debug, PartialEq, serde::Serialize)]
pub struct SecondClassSample {
    pub positions: Vec<i64>,
    /// Time spent at the origin up to each sampling time; empty unless
    /// requested.
    pub dwell: Vec<f64>,
    /// `int_0^t s 1{R(s) = 0} ds` at each sampling time, alongside `dwell`.
    pub dwell_moment: Vec<f64>,
    pub attempts: u32,
    pub events: u64,
}

#[derive(Clone, Debug, PartialEq, serde::Serialize)]
pub struct CurrentSample {
    pub tallies: Vec<CurrentTally>,
    pub attempts: u32,
    pub events: u64,
}

#[derive(Clone, Debug, PartialEq, serde::Serialize)]
pub struct AdditiveSample {
    pub values: Vec<f64>,
    pub attempts: u32,
    pub events: u64,
}

fn check_times(times: &[f64]) -> Result<f64> {
    let last = *times.last().ok_or_else(|| Error::InvalidArgument("no sampling times".into()))?;
    if times[0] < 0.0 || times.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::InvalidArgument("sampling times must be non-negative and increasing".into()));
    }
    Ok(last)
}

impl Sampler {
    pub fn new(kernel: JumpKernel, rho: f64, margin: MarginPolicy) -> Result<Self> {
        if !(0.0..=1.0).contains(&rho) {
            return Err(Error::InvalidDensity(rho));
        }
        Ok(Self { kernel, rho, margin, max_attempts: 4 })
    }

    /// Window of attempt `n`: the policy's window with its length doubled
    /// `n` times.
    pub fn window(&self, observe: Window, t: f64, attempt: u32) -> Window {
        let w = self.margin.window_at(observe, &self.kernel, t, self.rho);
        w.expand((w.len() as i64 / 2 + 1) * ((1i64 << attempt.min(20)) - 1))
    }

    fn retry<T>(&self, observe: Window, t: f64, mut run: impl FnMut(Window) -> Result<Option<T>>) -> Result<(T, u32)> {
        let mut tripped = 0.0;
        for attempt in 0..self.max_attempts {
            match run(self.window(observe, t, attempt)) {
                Ok(Some(v)) => return Ok((v, attempt + 1)),
                Ok(None) => {}
                Err(Error::AuditTripped(at)) => tripped = at,
                Err(e) => return Err(e),
            }
        }
        Err(Error::AuditTripped(tripped))
    }

    /// Sites the second-class particle is expected to visit by time `t`.
    pub fn second_class_range(&self, t: f64) -> Window {
        let v = (1.0 - 2.0 * self.rho) * self.kernel.drift();
        let spread = (2.0 * t.powf(2.0 / 3.0) + 4.0 * t.sqrt() + 10.0).ceil() as i64;
        let end = (v * t).round() as i64;
        Window { lo: end.min(0) - spread, hi: end.max(0) + spread }
    }

    /// Positions of the second-class particle at `times`, and optionally its
    /// time at the origin.
    pub fn second_class(&self, times: &[f64], seed: u64, dwell: bool) -> Result<SecondClassSample> {
        let horizon = check_times(times)?;
        self.coupled(times, seed, true, dwell, self.second_class_range(horizon))
    }

    /// Time the second-class particle spends at the origin up to each of
    /// `times`. Only the origin is audited; positions are not returned.
    pub fn origin_dwell(&self, times: &[f64], seed: u64) -> Result<SecondClassSample> {
        self.coupled(times, seed, false, true, Window { lo: 0, hi: 0 })
    }

    fn coupled(&self, times: &[f64], seed: u64, positions: bool, dwell: bool, observe: Window) -> Result<SecondClassSample> {
        let horizon = check_times(times)?;
        let clock = ClockRealization::new(seed, &self.kernel, horizon)?;
        let (sample, attempts) = self.retry(observe, horizon, |window| {
            let lower = Occupancy::sample_equilibrium(self.rho, window, seed, Conditioning::OriginEmpty, Boundary::Frozen)?;
            let protect = dwell.then_some(Window { lo: 0, hi: 0 });
            let mut pair = CoupledProcess::new(CoupledState::with_second_class(lower, 0)?, &self.kernel, &clock, protect)?;
            let mut obs = OriginDwell::default();
            let mut out = SecondClassSample { positions: Vec::new(), dwell: Vec::new(), dwell_moment: Vec::new(), attempts: 0, events: 0 };
            for &t in times {
                pair.advance_observed(t, &mut obs)?;
                // With `dwell` the origin is protected, so a passing audit
                // certifies the time spent there.
                if !pair.audit().passed() || (positions && !pair.certify_discrepancy()) {
                    return Ok(None);
                }
                if positions {
                    out.positions.push(pair.discrepancy());
                }
                if dwell {
                    out.dwell.push(obs.time());
                    out.dwell_moment.push(obs.moment());
                }
            }
            out.events = pair.events();
            Ok(Some(out))
        })?;
        Ok(SecondClassSample { attempts, ..sample })
    }

    /// Current across the 0|1 edge at `times`, from equilibrium.
    pub fn current(&self, times: &[f64], seed: u64) -> Result<CurrentSample> {
        let horizon = check_times(times)?;
        let clock = ClockRealization::new(seed, &self.kernel, horizon)?;
        let r = self.kernel.range() as i64;
        let observe = Window { lo: 1 - r, hi: r };
        let (sample, attempts) = self.retry(observe, horizon, |window| {
            let config = Occupancy::sample_equilibrium(self.rho, window, seed, Conditioning::None, Boundary::Frozen)?;
            let mut process = ExclusionProcess::new(config, &self.kernel, &clock, Some(observe))?;
            let mut obs = CurrentObserver::new(&self.kernel);
            let mut tallies = Vec::with_capacity(times.len());
            for &t in times {
                process.advance_observed(t, &mut obs)?;
                if !process.audit().passed() {
                    return Ok(None);
                }
                tallies.push(obs.tally());
            }
            Ok(Some(CurrentSample { tallies, attempts: 0, events: process.events() }))
        })?;
        Ok(CurrentSample { attempts, ..sample })
    }

    /// `A_f` at `times`, from equilibrium.
    pub fn additive(&self, f: &LocalFunction<f64>, times: &[f64], seed: u64) -> Result<AdditiveSample> {
        let horizon = check_times(times)?;
        let clock = ClockRealization::new(seed, &self.kernel, horizon)?;
        let observe = match (f.support().iter().min(), f.support().iter().max()) {
            (Some(&lo), Some(&hi)) => Window { lo, hi },
            _ => Window { lo: 0, hi: 0 },
        };
        let (sample, attempts) = self.retry(observe, horizon, |window| {
            let config = Occupancy::sample_equilibrium(self.rho, window, seed, Conditioning::None, Boundary::Frozen)?;
            let mut obs = AdditiveObserver::new(f, &config)?;
            let mut process = ExclusionProcess::new(config, &self.kernel, &clock, Some(observe))?;
            let mut values = Vec::with_capacity(times.len());
            for &t in times {
                process.advance_observed(t, &mut obs)?;
                if !process.audit().passed() {
                    return Ok(None);
                }
                values.push(obs.value());
            }
            Ok(Some(AdditiveSample { values, attempts: 0, events: process.events() }))
        })?;
        Ok(AdditiveSample { attempts, ..sample })
    }
}
