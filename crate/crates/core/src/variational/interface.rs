//! Interfaces `xi^k`: growth profiles driven by the clock translated by `k`.
//!
//! `xi^k = z_k(0) - w^k`, so `-xi^k` obeys the max rule and is run by the
//! same engine as the height process. At an epoch of stream `i + k`,
//! `xi_i <- min(xi_i + 1, xi_{i-1}, xi_{i+1} + 1)`.

use crate::audit::AuditReport;
use crate::clock::ClockRealization;
use crate::error::{Error, Result};
use crate::occupancy::Window;

use crate::engine::Observer;

use super::height::{Anchor, HeightProcess, HeightProfile, ProfileDynamics};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Interface {
    pub label: i64,
    window: Window,
    heights: Vec<i64>,
}

impl Interface {
    /// Checks `xi_i <= xi_{i-1}` and `xi_i <= xi_{i+1} + 1`.
    pub fn new(label: i64, window: Window, heights: Vec<i64>) -> Result<Self> {
        if window.is_empty() || heights.len() != window.len() {
            return Err(Error::InvalidArgument(format!("{} heights for a window of {} sites", heights.len(), window.len())));
        }
        if let Some(p) = heights.windows(2).position(|w| !(0..=1).contains(&(w[0] - w[1]))) {
            return Err(Error::IncrementViolation(window.lo + p as i64 + 1));
        }
        Ok(Self { label, window, heights })
    }

    /// `xi_i = 0` for `i >= 0` and `-i` for `i < 0`.
    pub fn initial(label: i64, window: Window) -> Self {
        Self { label, window, heights: window.sites().map(initial_height).collect() }
    }

    pub fn window(&self) -> Window {
        self.window
    }

    pub fn heights(&self) -> &[i64] {
        &self.heights
    }

    pub fn get(&self, i: i64) -> Option<i64> {
        self.window.contains(i).then(|| self.heights[(i - self.window.lo) as usize])
    }

    fn as_profile(&self) -> HeightProfile {
        HeightProfile::new(self.window, self.heights.iter().map(|&h| -h).collect(), Anchor::Free)
            .expect("interface constraints are the negated increment constraints")
    }

    fn from_profile(label: i64, z: &HeightProfile) -> Self {
        Self { label, window: z.window(), heights: z.values().iter().map(|&v| -v).collect() }
    }
}

#[inline]
pub fn initial_height(i: i64) -> i64 {
    if i >= 0 {
        0
    } else {
        -i
    }
}

/// Evolves `xi` to time `t`. Any influence from outside the window is an
/// error.
pub fn evolve_interface(xi: &Interface, clock: &ClockRealization, t: f64) -> Result<Interface> {
    let mut p = InterfaceProcess::from_interface(xi, clock)?;
    p.advance_to(t)?;
    p.audit().require_clean()?;
    Ok(p.interface())
}

/// An interface that can be advanced and queried repeatedly.
#[derive(Clone, Debug)]
pub struct InterfaceProcess {
    label: i64,
    stepped: bool,
    process: HeightProcess,
}

impl InterfaceProcess {
    /// Step-initial interface on `window`.
    pub fn new(label: i64, window: Window, clock: &ClockRealization) -> Result<Self> {
        let mut p = Self::from_interface(&Interface::initial(label, window), clock)?;
        p.stepped = true;
        Ok(p)
    }

    pub fn from_interface(xi: &Interface, clock: &ClockRealization) -> Result<Self> {
        let process = HeightProcess::new(&xi.as_profile(), clock, xi.label, Some(xi.window))?;
        Ok(Self { label: xi.label, stepped: false, process })
    }

    pub fn label(&self) -> i64 {
        self.label
    }

    pub fn advance_to(&mut self, t: f64) -> Result<()> {
        self.process.advance_to(t)
    }

    pub fn advance_observed<O: Observer<ProfileDynamics>>(&mut self, t: f64, observer: &mut O) -> Result<()> {
        self.process.advance_observed(t, observer)
    }

    pub fn time(&self) -> f64 {
        self.process.time()
    }

    pub fn events(&self) -> u64 {
        self.process.events()
    }

    pub fn audit(&self) -> AuditReport {
        self.process.audit()
    }

    pub fn interface(&self) -> Interface {
        Interface::from_profile(self.label, &self.process.profile())
    }

    /// Exact value of `xi_i`. Outside the window of a step-initial interface
    /// that nothing has reached, the value is still the initial one.
    pub fn height(&self, i: i64) -> Result<i64> {
        let dynamics = self.process.dynamics();
        if let Some(v) = dynamics.get(i) {
            if dynamics.is_exact(i) {
                return Ok(-v);
            }
        } else if self.stepped && dynamics.untouched() {
            return Ok(initial_height(i));
        }
        Err(Error::AuditTripped(self.audit().tripped_at.unwrap_or(self.time())))
    }
}
