//! Particle current across the edge between sites 0 and 1.

use crate::clock::ClockRealization;
use crate::engine::{EventRecord, Observer};
use crate::error::Result;
use crate::exclusion::{ExclusionDynamics, ExclusionProcess};
use crate::kernel::JumpKernel;
use crate::occupancy::{Occupancy, Window};

/// Forward (left to right) and backward crossings of the cut, each with its
/// own compensator. All four fields are non-decreasing in time.
#[derive(Clone, Copy, Debug, Default, PartialEq, serde::Serialize)]
pub struct CurrentTally {
    pub forward: u64,
    pub backward: u64,
    pub forward_compensator: f64,
    pub backward_compensator: f64,
}

impl CurrentTally {
    /// Net crossings; equals the forward count for totally asymmetric kernels.
    pub fn crossings(&self) -> i64 {
        self.forward as i64 - self.backward as i64
    }

    pub fn compensator(&self) -> f64 {
        self.forward_compensator - self.backward_compensator
    }

    pub fn martingale(&self) -> f64 {
        self.crossings() as f64 - self.compensator()
    }
}

/// Observer accumulating a [`CurrentTally`].
#[derive(Clone, Debug)]
pub struct CurrentObserver {
    tally: CurrentTally,
    /// `(source, target, rate)` for every bond across the cut.
    bonds: Vec<(i64, i64, f64)>,
    reach: i64,
    rates: Option<(f64, f64)>,
}

impl CurrentObserver {
    pub fn new(kernel: &JumpKernel) -> Self {
        let mut bonds = Vec::new();
        for &(k, p) in kernel.entries() {
            let k = k as i64;
            // sources i with i <= 0 < i + k, or i + k <= 0 < i
            let sources: Vec<i64> = if k > 0 { (1 - k..=0).collect() } else { (1..=-k).collect() };
            bonds.extend(sources.into_iter().map(|i| (i, i + k, p)));
        }
        Self { tally: CurrentTally::default(), bonds, reach: kernel.range() as i64, rates: None }
    }

    pub fn tally(&self) -> CurrentTally {
        self.tally
    }

    fn rates(&mut self, config: &Occupancy) -> (f64, f64) {
        *self.rates.get_or_insert_with(|| {
            let (mut fwd, mut bwd) = (0.0, 0.0);
            for &(i, j, p) in &self.bonds {
                if config.at(i) == 1 && config.at(j) == 0 {
                    if j > i {
                        fwd += p;
                    } else {
                        bwd += p;
                    }
                }
            }
            (fwd, bwd)
        })
    }
}

impl Observer<ExclusionDynamics> for CurrentObserver {
    fn hold(&mut self, state: &ExclusionDynamics, from: f64, to: f64) {
        if to > from {
            let (f, b) = self.rates(state.config());
            self.tally.forward_compensator += f * (to - from);
            self.tally.backward_compensator += b * (to - from);
        }
    }

    fn event(&mut self, _state: &ExclusionDynamics, r: &EventRecord) {
        if !r.accepted {
            return;
        }
        let (i, j) = (r.site, r.site + r.displacement as i64);
        if i <= 0 && j > 0 {
            self.tally.forward += 1;
        } else if j <= 0 && i > 0 {
            self.tally.backward += 1;
        }
        if (i - 1).abs() <= self.reach || (j - 1).abs() <= self.reach {
            self.rates = None;
        }
    }
}

/// Runs the exclusion process to `t` and tallies the current across the
/// 0|1 edge. The audit protects the sites the tally reads.
pub fn track_current(
    config: Occupancy,
    kernel: &JumpKernel,
    clock: &ClockRealization,
    t: f64,
) -> Result<(CurrentTally, crate::audit::AuditReport)> {
    let r = kernel.range() as i64;
    let mut process = ExclusionProcess::new(config, kernel, clock, Some(Window { lo: 1 - r, hi: r }))?;
    let mut obs = CurrentObserver::new(kernel);
    process.advance_observed(t, &mut obs)?;
    Ok((obs.tally(), process.audit()))
}
