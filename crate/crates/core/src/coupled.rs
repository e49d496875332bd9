//! Basic coupling of two exclusion processes differing at one site.

use crate::audit::{AuditReport, LightCone};
use crate::clock::ClockRealization;
use crate::engine::{Dynamics, EventLog, Observer, Simulation};
use crate::error::{Error, Result};
use crate::exclusion::{check_window, push_streams, sources_for};
use crate::kernel::JumpKernel;
use crate::occupancy::{Boundary, Occupancy, Window};

/// `upper = lower + one particle at the discrepancy`.
#[derive(Clone, Debug, PartialEq)]
pub struct CoupledState {
    lower: Occupancy,
    upper: Occupancy,
    discrepancy: i64,
}

impl CoupledState {
    /// Places the extra particle of the upper configuration at `site`.
    pub fn with_second_class(lower: Occupancy, site: i64) -> Result<Self> {
        match lower.get(site) {
            Some(0) => {}
            Some(_) => return Err(Error::CouplingInvariant(format!("site {site} is occupied in the lower configuration"))),
            None => return Err(Error::OutsideWindow(site)),
        }
        let site = lower.canonical(site).unwrap();
        let mut upper = lower.clone();
        upper.set(site, 1);
        Ok(Self { lower, upper, discrepancy: site })
    }

    pub fn new(lower: Occupancy, upper: Occupancy) -> Result<Self> {
        if lower.window() != upper.window() || lower.boundary() != upper.boundary() {
            return Err(Error::CouplingInvariant("configurations live on different windows".into()));
        }
        match upper.disagreements(&lower).as_slice() {
            &[r] if upper.at(r) == 1 => Ok(Self { lower, upper, discrepancy: r }),
            d => Err(Error::CouplingInvariant(format!("expected one site where upper exceeds lower, found {d:?}"))),
        }
    }

    pub fn lower(&self) -> &Occupancy {
        &self.lower
    }

    pub fn upper(&self) -> &Occupancy {
        &self.upper
    }

    pub fn discrepancy(&self) -> i64 {
        self.discrepancy
    }

    /// Full check of the single-discrepancy invariant.
    pub fn check(&self) -> Result<()> {
        let d = self.upper.disagreements(&self.lower);
        if d == [self.discrepancy] && self.upper.at(self.discrepancy) == 1 && self.upper.dominates(&self.lower) {
            Ok(())
        } else {
            Err(Error::CouplingInvariant(format!("discrepancy {} but disagreements {d:?}", self.discrepancy)))
        }
    }
}

#[derive(Clone, Debug)]
pub struct CoupledDynamics {
    state: CoupledState,
    disps: Vec<i32>,
    range: i64,
    cone: Option<LightCone>,
    sources: Window,
    /// Net displacement of the discrepancy, unwrapped on periodic windows.
    shift: i64,
    start: i64,
}

impl CoupledDynamics {
    pub fn new(state: CoupledState, kernel: &JumpKernel, protect: Option<Window>) -> Result<Self> {
        let window = state.lower.window();
        let boundary = state.lower.boundary();
        check_window(window, boundary, kernel)?;
        let cone = match boundary {
            Boundary::Frozen => Some(LightCone::new(window, protect)),
            Boundary::Periodic => None,
        };
        Ok(Self {
            sources: sources_for(window, boundary, kernel),
            disps: kernel.entries().iter().map(|&(k, _)| k).collect(),
            range: kernel.range() as i64,
            cone,
            shift: 0,
            start: state.discrepancy,
            state,
        })
    }

    pub fn state(&self) -> &CoupledState {
        &self.state
    }

    /// Position of the discrepancy; unwrapped (may leave the window) on
    /// periodic windows.
    pub fn position(&self) -> i64 {
        self.start + self.shift
    }

    pub fn audit(&self) -> AuditReport {
        self.cone.as_ref().map_or_else(AuditReport::unaudited, LightCone::report)
    }

    /// Trips the audit unless the current discrepancy site is clean. A clean
    /// discrepancy site is enough for the position to be exact: the
    /// infinite-lattice pair disagrees there too, and it disagrees at one
    /// site only.
    pub fn certify_discrepancy(&mut self, time: f64) -> bool {
        match self.cone.as_mut() {
            None => true,
            Some(cone) => {
                cone.require(self.state.discrepancy, time);
                cone.is_clean(self.state.discrepancy)
            }
        }
    }

    #[inline]
    fn moves(c: &Occupancy, i: i64, j: i64) -> bool {
        matches!((c.get(i), c.get(j)), (Some(1), Some(0)))
    }

    #[inline]
    fn threat(&self, i: i64, j: i64) -> Option<(i64, i64)> {
        let cone = self.cone.as_ref()?;
        let c = cone.threat(i, j, || self.state.upper.at(i) == 1, || self.state.lower.at(j) == 0)?;
        Some((c, if c == i { j } else { i }))
    }
}

impl Dynamics for CoupledDynamics {
    fn sources(&self) -> Window {
        self.sources
    }

    #[inline]
    fn is_live(&self, site: i64, kidx: usize) -> bool {
        let j = site + self.disps[kidx] as i64;
        Self::moves(&self.state.upper, site, j) || Self::moves(&self.state.lower, site, j) || self.threat(site, j).is_some()
    }

    fn fire(&mut self, site: i64, kidx: usize, time: f64, affected: &mut Vec<(i64, usize)>) -> bool {
        let k = self.disps[kidx] as i64;
        let j = site + k;
        if let Some((c, from)) = self.threat(site, j) {
            let (lo, hi) = self.cone.as_mut().unwrap().contaminate(c, from, time);
            push_streams(&self.disps, lo - self.range, hi + self.range, affected);
        }
        let up = Self::moves(&self.state.upper, site, j);
        let down = Self::moves(&self.state.lower, site, j);
        if !(up || down) {
            return false;
        }
        let (i, j) = (self.state.lower.canonical(site).unwrap(), self.state.lower.canonical(j).unwrap());
        let r = self.state.discrepancy;
        if up {
            self.state.upper.set(i, 0);
            self.state.upper.set(j, 1);
        }
        if down {
            self.state.lower.set(i, 0);
            self.state.lower.set(j, 1);
        }
        if up && !down && i == r {
            self.state.discrepancy = j;
            self.shift += k;
        } else if down && !up && j == r {
            self.state.discrepancy = i;
            self.shift -= k;
        }
        debug_assert!(up == down || i == r || j == r, "lone move away from the discrepancy");
        debug_assert_eq!(self.state.upper.at(self.state.discrepancy), 1);
        debug_assert_eq!(self.state.lower.at(self.state.discrepancy), 0);
        debug_assert_eq!(self.state.upper.at(i), self.state.lower.at(i) | u8::from(i == self.state.discrepancy));
        debug_assert_eq!(self.state.upper.at(j), self.state.lower.at(j) | u8::from(j == self.state.discrepancy));
        push_streams(&self.disps, i, i, affected);
        push_streams(&self.disps, j, j, affected);
        true
    }
}

/// A coupled pair that can be advanced and inspected repeatedly.
#[derive(Clone, Debug)]
pub struct CoupledProcess {
    sim: Simulation<CoupledDynamics>,
}

impl CoupledProcess {
    pub fn new(state: CoupledState, kernel: &JumpKernel, clock: &ClockRealization, protect: Option<Window>) -> Result<Self> {
        clock.check_kernel(kernel)?;
        Ok(Self { sim: Simulation::new(clock.clone(), CoupledDynamics::new(state, kernel, protect)?) })
    }

    pub fn advance_to(&mut self, t: f64) -> Result<()> {
        self.sim.advance_to(t)
    }

    pub fn advance_observed<O: Observer<CoupledDynamics>>(&mut self, t: f64, observer: &mut O) -> Result<()> {
        self.sim.advance_observed(t, observer)
    }

    pub fn state(&self) -> &CoupledState {
        self.sim.dynamics().state()
    }

    pub fn discrepancy(&self) -> i64 {
        self.sim.dynamics().position()
    }

    /// See [`CoupledDynamics::certify_discrepancy`].
    pub fn certify_discrepancy(&mut self) -> bool {
        let t = self.sim.time();
        self.sim.dynamics_mut().certify_discrepancy(t)
    }

    pub fn audit(&self) -> AuditReport {
        self.sim.dynamics().audit()
    }

    pub fn time(&self) -> f64 {
        self.sim.time()
    }

    pub fn events(&self) -> u64 {
        self.sim.events()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CoupledRun {
    pub state: CoupledState,
    /// Unwrapped discrepancy position.
    pub position: i64,
    pub audit: AuditReport,
    pub log: Option<EventLog>,
}

pub fn evolve_coupled(
    state: CoupledState,
    kernel: &JumpKernel,
    clock: &ClockRealization,
    t: f64,
    log: bool,
) -> Result<CoupledRun> {
    let mut process = CoupledProcess::new(state, kernel, clock, None)?;
    let mut events = EventLog::default();
    if log {
        process.advance_observed(t, &mut events)?;
    } else {
        process.advance_to(t)?;
    }
    process.certify_discrepancy();
    Ok(CoupledRun {
        position: process.discrepancy(),
        audit: process.audit(),
        state: process.state().clone(),
        log: log.then_some(events),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exclusion::evolve;
    use crate::occupancy::Conditioning;

    fn pair(seed: u64, rho: f64, m: i64, boundary: Boundary) -> CoupledState {
        let lower = Occupancy::sample_equilibrium(rho, Window::symmetric(m), seed, Conditioning::OriginEmpty, boundary)
            .unwrap();
        CoupledState::with_second_class(lower, 0).unwrap()
    }

    #[test]
    fn construction_checks_invariant() {
        let w = Window::symmetric(3);
        let lower = Occupancy::from_fn(w, Boundary::Frozen, |i| i == 1);
        assert!(CoupledState::with_second_class(lower.clone(), 1).is_err());
        assert!(CoupledState::with_second_class(lower.clone(), 9).is_err());
        let upper = Occupancy::from_fn(w, Boundary::Frozen, |i| i == 1 || i == -2);
        assert_eq!(CoupledState::new(lower.clone(), upper).unwrap().discrepancy(), -2);
        assert!(CoupledState::new(lower.clone(), lower).is_err());
    }

    #[test]
    fn marginals_are_exclusion_processes_on_shared_clocks() {
        for (seed, kernel) in [(1, JumpKernel::tasep()), (2, JumpKernel::new([(1, 0.5), (-1, 0.2), (2, 0.3)]).unwrap())] {
            let clock = ClockRealization::new(seed, &kernel, 20.0).unwrap();
            let state = pair(seed, 0.4, 60, Boundary::Frozen);
            let run = evolve_coupled(state.clone(), &kernel, &clock, 20.0, false).unwrap();
            let lo = evolve(state.lower().clone(), &kernel, &clock, 20.0, false).unwrap();
            let up = evolve(state.upper().clone(), &kernel, &clock, 20.0, false).unwrap();
            assert_eq!(&lo.config, run.state.lower());
            assert_eq!(&up.config, run.state.upper());
            run.state.check().unwrap();
        }
    }

    #[test]
    fn invariant_holds_at_many_sampled_times() {
        let kernel = JumpKernel::new([(1, 0.6), (-1, 0.4)]).unwrap();
        let clock = ClockRealization::new(5, &kernel, 100.0).unwrap();
        let mut p = CoupledProcess::new(pair(5, 0.3, 80, Boundary::Periodic), &kernel, &clock, None).unwrap();
        for n in 1..=1000 {
            p.advance_to(n as f64 * 0.1).unwrap();
            p.state().check().unwrap();
        }
    }

    #[test]
    fn lone_second_class_particle_is_a_poisson_walker() {
        let w = Window::symmetric(120);
        let clock = ClockRealization::tasep(21, 30.0).unwrap();
        let state = CoupledState::with_second_class(Occupancy::empty(w, Boundary::Frozen), 0).unwrap();
        let run = evolve_coupled(state, &JumpKernel::tasep(), &clock, 30.0, true).unwrap();
        let log = run.log.unwrap();
        // Every accepted event moves the discrepancy one step right at its own site.
        for (n, r) in log.records.iter().enumerate() {
            assert_eq!(r.site, n as i64);
        }
        assert_eq!(run.position, log.records.len() as i64);
    }
}
