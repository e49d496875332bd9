//! Passage times read off an interface run: `L_{i,j} = inf { t : xi_i(t) >= j }`.

use crate::clock::ClockRealization;
use crate::engine::{EventRecord, Observer};
use crate::error::{Error, Result};
use crate::occupancy::Window;
use crate::variational::height::ProfileDynamics;
use crate::variational::interface::{initial_height, InterfaceProcess};

/// Jump times of every site of a step-initial interface.
#[derive(Clone, Debug)]
pub struct InterfaceRun {
    label: i64,
    window: Window,
    horizon: f64,
    jumps: Vec<Vec<f64>>,
    exact: bool,
}

struct JumpLog<'a> {
    label: i64,
    window: Window,
    jumps: &'a mut Vec<Vec<f64>>,
}

impl Observer<ProfileDynamics> for JumpLog<'_> {
    fn event(&mut self, _state: &ProfileDynamics, r: &EventRecord) {
        let i = r.site - self.label;
        if r.accepted && self.window.contains(i) {
            self.jumps[(i - self.window.lo) as usize].push(r.time);
        }
    }
}

impl InterfaceRun {
    /// Runs `xi^label` on `window` to `horizon`, logging every jump.
    pub fn record(clock: &ClockRealization, label: i64, window: Window, horizon: f64) -> Result<Self> {
        let mut p = InterfaceProcess::new(label, window, clock)?;
        let mut jumps = vec![Vec::new(); window.len()];
        p.advance_observed(horizon, &mut JumpLog { label, window, jumps: &mut jumps })?;
        Ok(Self { label, window, horizon, jumps, exact: p.audit().passed() })
    }

    pub fn label(&self) -> i64 {
        self.label
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    /// Whether the run is free of boundary influence.
    pub fn is_exact(&self) -> bool {
        self.exact
    }

    /// `L_{i,j}` for `j >= max(0, -i)`.
    pub fn passage(&self, i: i64, j: i64) -> Result<f64> {
        let start = initial_height(i);
        if j < 0.max(-i) {
            return Err(Error::OutOfDomain(i, j));
        }
        if j <= start {
            return Ok(0.0);
        }
        if !self.exact {
            return Err(Error::AuditTripped(self.horizon));
        }
        if !self.window.contains(i) {
            return Err(Error::OutsideWindow(i));
        }
        self.jumps[(i - self.window.lo) as usize]
            .get((j - start - 1) as usize)
            .copied()
            .ok_or(Error::HorizonTooShort(i, j))
    }

    /// `L_{i,j} - max(L_{i-1,j}, L_{i,j-1}, L_{i+1,j-1})`.
    pub fn waiting_time(&self, i: i64, j: i64) -> Result<f64> {
        if j < 1 + 0.max(-i) {
            return Err(Error::OutOfDomain(i, j));
        }
        let ready = self.passage(i - 1, j)?.max(self.passage(i, j - 1)?).max(self.passage(i + 1, j - 1)?);
        Ok(self.passage(i, j)? - ready)
    }
}

/// `L_{i,j}` from a recorded interface run.
pub fn hitting_time_passage(run: &InterfaceRun, i: i64, j: i64) -> Result<f64> {
    run.passage(i, j)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lpp::grid::{Lattice, WeightGrid};
    use crate::lpp::passage::lpp_three_step;

    #[test]
    fn boundary_values() {
        let clock = ClockRealization::tasep(1, 30.0).unwrap();
        let run = InterfaceRun::record(&clock, 0, Window::symmetric(80), 30.0).unwrap();
        assert!(run.is_exact());
        for i in 0..10 {
            assert_eq!(run.passage(i, 0).unwrap(), 0.0);
            assert_eq!(run.passage(-i, i).unwrap(), 0.0);
        }
        assert!(run.passage(3, -1).is_err());
        assert_eq!(run.passage(0, 10_000), Err(Error::HorizonTooShort(0, 10_000)));
    }

    #[test]
    fn passage_times_satisfy_the_recursion() {
        let clock = ClockRealization::tasep(5, 60.0).unwrap();
        let run = InterfaceRun::record(&clock, 2, Window::symmetric(120), 60.0).unwrap();
        // Rebuild a weight grid from the logged waits; the DP must reproduce
        // the logged passage times.
        let y = WeightGrid::from_fn(Lattice::ThreeStep, 4, 6, |i, j| run.waiting_time(i, j).unwrap()).unwrap();
        let l = lpp_three_step(&y, 4, 6).unwrap();
        for (i, j) in l.cells() {
            assert!((l.at(i, j) - run.passage(i, j).unwrap()).abs() < 1e-9);
            assert!(run.waiting_time(i, j).unwrap() > 0.0);
        }
    }
}
