//! Exclusion dynamics on a window.

use crate::audit::{AuditReport, LightCone};
use crate::clock::ClockRealization;
use crate::engine::{Dynamics, EventLog, Observer, Simulation};
use crate::error::{Error, Result};
use crate::kernel::JumpKernel;
use crate::occupancy::{Boundary, Occupancy, Window};

/// How far the simulated window extends beyond the observation window.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum MarginPolicy {
    /// `ceil(4 t S + 10 sqrt(t) + 16 R)` with `S = sum_k (p(k) + p(-k))`.
    Default,
    /// Same formula with `factor` in place of 4.
    Factor(f64),
    Fixed(i64),
    /// Density-dependent margins on each side: `x v t + 4 sqrt(t) + 16 R`
    /// where `v` is the speed at which the audit's unclean region advances
    /// from that side in equilibrium at density `rho`.
    Cone(f64),
}

/// Mean speeds at which the unclean region moves in from the left and from
/// the right. From the left an epoch contaminates an empty clean target of a
/// rightward jump or an occupied clean source of a leftward one.
pub fn contamination_speeds(kernel: &JumpKernel, rho: f64) -> (f64, f64) {
    let (mut left, mut right) = (0.0, 0.0);
    for &(k, p) in kernel.entries() {
        let w = k.unsigned_abs() as f64 * p;
        if k > 0 {
            left += (1.0 - rho) * w;
            right += rho * w;
        } else {
            left += rho * w;
            right += (1.0 - rho) * w;
        }
    }
    (left, right)
}

impl MarginPolicy {
    /// Margin on each side; density-dependent policies use the worst density.
    pub fn margin(&self, kernel: &JumpKernel, t: f64) -> i64 {
        let (l, r) = self.margins(kernel, t, None);
        l.max(r)
    }

    /// `(left, right)` margins at density `rho` (`None` means unknown).
    pub fn margins(&self, kernel: &JumpKernel, t: f64, rho: Option<f64>) -> (i64, i64) {
        let spread = |f: f64| {
            (f * t * kernel.two_sided_rate() + 10.0 * t.sqrt() + 16.0 * kernel.range() as f64).ceil() as i64
        };
        let both = |m: i64| (m, m);
        match *self {
            MarginPolicy::Default => both(spread(4.0)),
            MarginPolicy::Factor(f) => both(spread(f)),
            MarginPolicy::Fixed(m) => both(m),
            MarginPolicy::Cone(x) => {
                let (vl, vr) = match rho {
                    Some(rho) => contamination_speeds(kernel, rho),
                    None => {
                        let v = kernel.entries().iter().map(|&(k, p)| k.unsigned_abs() as f64 * p).sum();
                        (v, v)
                    }
                };
                let slack = 4.0 * t.sqrt() + 16.0 * kernel.range() as f64;
                ((x * vl * t + slack).ceil() as i64, (x * vr * t + slack).ceil() as i64)
            }
        }
    }

    pub fn window(&self, observe: Window, kernel: &JumpKernel, t: f64) -> Window {
        observe.expand(self.margin(kernel, t))
    }

    /// Window for observing `observe` up to time `t` at density `rho`.
    pub fn window_at(&self, observe: Window, kernel: &JumpKernel, t: f64, rho: f64) -> Window {
        let (l, r) = self.margins(kernel, t, Some(rho));
        Window { lo: observe.lo - l, hi: observe.hi + r }
    }

    pub fn parse(text: &str) -> Result<Self> {
        let text = text.trim();
        if text == "default" {
            return Ok(MarginPolicy::Default);
        }
        let bad = || Error::Parse(format!("margin `{text}` is not default, factor:<x>, cone:<x> or fixed:<m>"));
        let (kind, value) = text.split_once(':').ok_or_else(bad)?;
        let factor = || -> Result<f64> {
            let f: f64 = value.trim().parse().map_err(|_| bad())?;
            if !(f.is_finite() && f >= 0.0) {
                return Err(bad());
            }
            Ok(f)
        };
        match kind.trim() {
            "factor" => Ok(MarginPolicy::Factor(factor()?)),
            "cone" => Ok(MarginPolicy::Cone(factor()?)),
            "fixed" => {
                let m: i64 = value.trim().parse().map_err(|_| bad())?;
                if m < 0 {
                    return Err(bad());
                }
                Ok(MarginPolicy::Fixed(m))
            }
            _ => Err(bad()),
        }
    }
}

impl std::fmt::Display for MarginPolicy {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            MarginPolicy::Default => write!(f, "default"),
            MarginPolicy::Factor(x) => write!(f, "factor:{x}"),
            MarginPolicy::Fixed(m) => write!(f, "fixed:{m}"),
            MarginPolicy::Cone(x) => write!(f, "cone:{x}"),
        }
    }
}

pub(crate) fn check_window(window: Window, boundary: Boundary, kernel: &JumpKernel) -> Result<()> {
    let range = kernel.range() as usize;
    let need = match boundary {
        Boundary::Periodic => 2 * range + 1,
        Boundary::Frozen => range + 1,
    };
    if window.len() < need {
        return Err(Error::WindowTooSmall { len: window.len(), range: kernel.range() });
    }
    Ok(())
}

pub(crate) fn sources_for(window: Window, boundary: Boundary, kernel: &JumpKernel) -> Window {
    match boundary {
        Boundary::Periodic => window,
        Boundary::Frozen => window.expand(kernel.range() as i64),
    }
}

/// Pushes every stream with an endpoint in `lo..=hi`.
pub(crate) fn push_streams(disps: &[i32], lo: i64, hi: i64, out: &mut Vec<(i64, usize)>) {
    for s in lo..=hi {
        for (kidx, &k) in disps.iter().enumerate() {
            out.push((s, kidx));
            out.push((s - k as i64, kidx));
        }
    }
}

#[derive(Clone, Debug)]
pub struct ExclusionDynamics {
    config: Occupancy,
    disps: Vec<i32>,
    cone: Option<LightCone>,
    sources: Window,
}

impl ExclusionDynamics {
    pub fn new(config: Occupancy, kernel: &JumpKernel, protect: Option<Window>) -> Result<Self> {
        check_window(config.window(), config.boundary(), kernel)?;
        let cone = match config.boundary() {
            Boundary::Frozen => Some(LightCone::new(config.window(), protect)),
            Boundary::Periodic => None,
        };
        Ok(Self {
            sources: sources_for(config.window(), config.boundary(), kernel),
            disps: kernel.entries().iter().map(|&(k, _)| k).collect(),
            cone,
            config,
        })
    }

    pub fn config(&self) -> &Occupancy {
        &self.config
    }

    pub fn audit(&self) -> AuditReport {
        self.cone.as_ref().map_or_else(AuditReport::unaudited, LightCone::report)
    }

    #[inline]
    fn can_jump(&self, i: i64, j: i64) -> bool {
        matches!((self.config.get(i), self.config.get(j)), (Some(1), Some(0)))
    }

    #[inline]
    fn threat(&self, i: i64, j: i64) -> Option<(i64, i64)> {
        let cone = self.cone.as_ref()?;
        let c = cone.threat(i, j, || self.config.at(i) == 1, || self.config.at(j) == 0)?;
        Some((c, if c == i { j } else { i }))
    }
}

impl Dynamics for ExclusionDynamics {
    fn sources(&self) -> Window {
        self.sources
    }

    #[inline]
    fn is_live(&self, site: i64, kidx: usize) -> bool {
        let j = site + self.disps[kidx] as i64;
        self.can_jump(site, j) || self.threat(site, j).is_some()
    }

    fn fire(&mut self, site: i64, kidx: usize, time: f64, affected: &mut Vec<(i64, usize)>) -> bool {
        let j = site + self.disps[kidx] as i64;
        if let Some((c, from)) = self.threat(site, j) {
            let (lo, hi) = self.cone.as_mut().unwrap().contaminate(c, from, time);
            let r = self.disps.iter().map(|k| k.unsigned_abs() as i64).max().unwrap_or(1);
            push_streams(&self.disps, lo - r, hi + r, affected);
        }
        if !self.can_jump(site, j) {
            return false;
        }
        self.config.set(site, 0);
        self.config.set(j, 1);
        debug_assert!(self.config.index(site) != self.config.index(j));
        debug_assert_eq!((self.config.at(site), self.config.at(j)), (0, 1));
        push_streams(&self.disps, site, site, affected);
        push_streams(&self.disps, j, j, affected);
        true
    }
}

/// An exclusion process that can be advanced and inspected repeatedly.
#[derive(Clone, Debug)]
pub struct ExclusionProcess {
    sim: Simulation<ExclusionDynamics>,
}

impl ExclusionProcess {
    /// `protect` is the region the audit must keep clean (ignored for
    /// periodic windows).
    pub fn new(config: Occupancy, kernel: &JumpKernel, clock: &ClockRealization, protect: Option<Window>) -> Result<Self> {
        clock.check_kernel(kernel)?;
        let dynamics = ExclusionDynamics::new(config, kernel, protect)?;
        Ok(Self { sim: Simulation::new(clock.clone(), dynamics) })
    }

    pub fn advance_to(&mut self, t: f64) -> Result<()> {
        self.sim.advance_to(t)
    }

    pub fn advance_observed<O: Observer<ExclusionDynamics>>(&mut self, t: f64, observer: &mut O) -> Result<()> {
        self.sim.advance_observed(t, observer)
    }

    pub fn config(&self) -> &Occupancy {
        self.sim.dynamics().config()
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

/// Result of [`evolve`].
#[derive(Clone, Debug, PartialEq)]
pub struct ExclusionRun {
    pub config: Occupancy,
    pub audit: AuditReport,
    pub log: Option<EventLog>,
}

/// Evolves `config` to time `t` on `clock`. Accepted events are logged when
/// `log` is set.
pub fn evolve(config: Occupancy, kernel: &JumpKernel, clock: &ClockRealization, t: f64, log: bool) -> Result<ExclusionRun> {
    let mut process = ExclusionProcess::new(config, kernel, clock, None)?;
    let mut events = EventLog::default();
    if log {
        process.advance_observed(t, &mut events)?;
    } else {
        process.advance_to(t)?;
    }
    Ok(ExclusionRun { audit: process.audit(), config: process.config().clone(), log: log.then_some(events) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::occupancy::Conditioning;

    #[test]
    fn empty_stays_empty() {
        let w = Window::symmetric(30);
        let k = JumpKernel::nearest_neighbour(0.6, 0.4).unwrap();
        let clock = ClockRealization::new(3, &k, 50.0).unwrap();
        let run = evolve(Occupancy::empty(w, Boundary::Frozen), &k, &clock, 50.0, true).unwrap();
        assert_eq!(run.config.particle_count(), 0);
        assert!(run.log.unwrap().records.is_empty());
    }

    #[test]
    fn full_periodic_is_frozen() {
        let w = Window::symmetric(10);
        let k = JumpKernel::new([(1, 0.5), (-2, 0.5)]).unwrap();
        let clock = ClockRealization::new(3, &k, 50.0).unwrap();
        let run = evolve(Occupancy::full(w, Boundary::Periodic), &k, &clock, 50.0, false).unwrap();
        assert_eq!(run.config, Occupancy::full(w, Boundary::Periodic));
    }

    #[test]
    fn periodic_conserves_particles() {
        let w = Window::new(0, 40).unwrap();
        let k = JumpKernel::new([(1, 0.5), (-2, 0.3), (3, 0.2)]).unwrap();
        let c = Occupancy::sample_equilibrium(0.4, w, 5, Conditioning::None, Boundary::Periodic).unwrap();
        let n = c.particle_count();
        let clock = ClockRealization::new(8, &k, 30.0).unwrap();
        let run = evolve(c, &k, &clock, 30.0, true).unwrap();
        assert_eq!(run.config.particle_count(), n);
        assert!(!run.log.unwrap().records.is_empty());
    }

    #[test]
    fn rejects_mismatched_clock_and_horizon() {
        let w = Window::symmetric(10);
        let clock = ClockRealization::tasep(1, 5.0).unwrap();
        let k = JumpKernel::nearest_neighbour(0.5, 0.5).unwrap();
        assert_eq!(
            evolve(Occupancy::empty(w, Boundary::Frozen), &k, &clock, 1.0, false).unwrap_err(),
            Error::ClockKernelMismatch
        );
        let tasep = JumpKernel::tasep();
        assert!(matches!(
            evolve(Occupancy::empty(w, Boundary::Frozen), &tasep, &clock, 6.0, false),
            Err(Error::HorizonExceeded { .. })
        ));
        let tiny = Window::new(0, 2).unwrap();
        let far = JumpKernel::new([(3, 1.0), (-1, 1.0)]).unwrap();
        let clock = ClockRealization::new(1, &far, 5.0).unwrap();
        assert!(matches!(
            evolve(Occupancy::empty(tiny, Boundary::Periodic), &far, &clock, 1.0, false),
            Err(Error::WindowTooSmall { .. })
        ));
    }

    #[test]
    fn margin_policy_formula() {
        let k = JumpKernel::tasep();
        assert_eq!(MarginPolicy::Default.margin(&k, 100.0), 800 + 100 + 16);
        assert_eq!(MarginPolicy::Factor(0.5).margin(&k, 100.0), 100 + 100 + 16);
        assert_eq!(MarginPolicy::Fixed(7).margin(&k, 100.0), 7);
        let (l, r) = MarginPolicy::Cone(1.0).margins(&k, 100.0, Some(0.25));
        assert_eq!((l, r), (75 + 40 + 16, 25 + 40 + 16));
        for p in [MarginPolicy::Default, MarginPolicy::Factor(0.75), MarginPolicy::Fixed(12), MarginPolicy::Cone(1.2)] {
            assert_eq!(MarginPolicy::parse(&p.to_string()).unwrap(), p);
        }
        assert!(MarginPolicy::parse("factor:-1").is_err());
    }

    #[test]
    fn lone_tasep_particle_moves_at_its_own_epochs() {
        let w = Window::symmetric(200);
        let clock = ClockRealization::tasep(17, 40.0).unwrap();
        let c = Occupancy::from_fn(w, Boundary::Frozen, |i| i == 0);
        let run = evolve(c, &JumpKernel::tasep(), &clock, 40.0, true).unwrap();
        // Walk the particle through its own clock stream.
        let mut pos = 0i64;
        let mut t = 0.0;
        loop {
            let next = clock.next_epoch(pos, 0, crate::clock::EventKey { time: t, site: pos, disp: 1 });
            match next {
                Some(e) if e <= 40.0 => {
                    pos += 1;
                    t = e;
                }
                _ => break,
            }
        }
        assert_eq!(run.config.disagreements(&Occupancy::empty(w, Boundary::Frozen)), vec![pos]);
        assert_eq!(run.log.unwrap().records.len() as i64, pos);
    }

    #[test]
    fn event_log_round_trips() {
        let w = Window::symmetric(20);
        let k = JumpKernel::tasep();
        let clock = ClockRealization::tasep(2, 10.0).unwrap();
        let c = Occupancy::sample_equilibrium(0.5, w, 2, Conditioning::None, Boundary::Frozen).unwrap();
        let log = evolve(c, &k, &clock, 10.0, true).unwrap().log.unwrap();
        let mut buf = Vec::new();
        log.write_csv(&mut buf).unwrap();
        assert!(String::from_utf8_lossy(&buf).starts_with("time,site,displacement,accepted\n"));
        assert_eq!(EventLog::read_csv(buf.as_slice()).unwrap(), log);
    }
}
