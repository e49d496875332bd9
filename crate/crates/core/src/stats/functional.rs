//! Additive functionals `A_f(t) = int_0^t f(eta(s)) ds` and occupation of
//! the origin by the second-class particle, integrated exactly between
//! events.

use crate::clock::ClockRealization;
use crate::coupled::CoupledDynamics;
use crate::engine::{EventLog, EventRecord, Observer};
use crate::error::{Error, Result};
use crate::exclusion::{ExclusionDynamics, ExclusionProcess};
use crate::kernel::JumpKernel;
use crate::occupancy::Occupancy;

use super::local::LocalFunction;

/// An initial configuration and its accepted events up to `horizon`.
#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory {
    pub initial: Occupancy,
    pub log: EventLog,
    pub horizon: f64,
}

impl Trajectory {
    /// Runs the exclusion process to `horizon` and keeps its event log.
    pub fn record(initial: Occupancy, kernel: &JumpKernel, clock: &ClockRealization, horizon: f64) -> Result<Self> {
        let mut p = ExclusionProcess::new(initial.clone(), kernel, clock, None)?;
        let mut log = EventLog::default();
        p.advance_observed(horizon, &mut log)?;
        Ok(Self { initial, log, horizon })
    }
}

/// Exact `A_f(t)` along a recorded trajectory.
pub fn additive_functional(trajectory: &Trajectory, f: &LocalFunction<f64>, t: f64) -> Result<f64> {
    if t > trajectory.horizon {
        return Err(Error::HorizonExceeded { requested: t, horizon: trajectory.horizon });
    }
    if t < 0.0 {
        return Err(Error::InvalidArgument(format!("time {t}")));
    }
    let mut config = trajectory.initial.clone();
    let mut pattern = f.pattern_of(&config)?;
    let touches = |r: &EventRecord, c: &Occupancy| {
        let sites = [r.site, r.site + r.displacement as i64].map(|s| c.canonical(s));
        f.support().iter().any(|&s| sites.contains(&c.canonical(s)))
    };
    let (mut total, mut last) = (0.0, 0.0);
    for r in &trajectory.log.records {
        if r.time > t {
            break;
        }
        total += f.eval_pattern(pattern) * (r.time - last);
        last = r.time;
        let j = r.site + r.displacement as i64;
        config.set(r.site, 0);
        config.set(j, 1);
        if touches(r, &config) {
            pattern = f.pattern_of(&config)?;
        }
    }
    Ok(total + f.eval_pattern(pattern) * (t - last))
}

/// Integrals `int g(s) ds` and `int s g(s) ds` of a piecewise-constant
/// signal, summed once per change of value so that the result does not
/// depend on how stretches are subdivided.
#[derive(Clone, Copy, Debug, Default)]
struct Stretches {
    total: f64,
    moment: f64,
    current: Option<(f64, f64)>,
    end: f64,
}

fn run_integrals(v: f64, since: f64, until: f64) -> (f64, f64) {
    let len = until - since;
    (v * len, v * len * (until + since) / 2.0)
}

impl Stretches {
    fn hold(&mut self, value: f64, from: f64, to: f64) {
        match self.current {
            Some((v, _)) if v == value => {}
            Some((v, since)) => {
                let (a, m) = run_integrals(v, since, from);
                self.total += a;
                self.moment += m;
                self.current = Some((value, from));
            }
            None => self.current = Some((value, from)),
        }
        self.end = to;
    }

    fn open(&self) -> (f64, f64) {
        self.current.map_or((0.0, 0.0), |(v, since)| run_integrals(v, since, self.end))
    }

    fn value(&self) -> f64 {
        self.total + self.open().0
    }

    fn moment(&self) -> f64 {
        self.moment + self.open().1
    }
}

/// Accumulates `A_f` while an exclusion process runs.
#[derive(Clone, Debug)]
pub struct AdditiveObserver<'f> {
    f: &'f LocalFunction<f64>,
    acc: Stretches,
}

impl<'f> AdditiveObserver<'f> {
    pub fn new(f: &'f LocalFunction<f64>, config: &Occupancy) -> Result<Self> {
        f.pattern_of(config)?;
        Ok(Self { f, acc: Stretches::default() })
    }

    pub fn value(&self) -> f64 {
        self.acc.value()
    }
}

impl Observer<ExclusionDynamics> for AdditiveObserver<'_> {
    fn hold(&mut self, state: &ExclusionDynamics, from: f64, to: f64) {
        let p = self.f.pattern_of(state.config()).expect("support checked on construction");
        self.acc.hold(self.f.eval_pattern(p), from, to);
    }
}

/// Time the discrepancy of a coupled pair spends at the origin.
#[derive(Clone, Debug, Default)]
pub struct OriginDwell {
    acc: Stretches,
}

impl OriginDwell {
    pub fn time(&self) -> f64 {
        self.acc.value()
    }

    /// `int_0^t s 1{R(s) = 0} ds`.
    pub fn moment(&self) -> f64 {
        self.acc.moment()
    }
}

impl Observer<CoupledDynamics> for OriginDwell {
    fn hold(&mut self, state: &CoupledDynamics, from: f64, to: f64) {
        self.acc.hold(f64::from(u8::from(state.state().discrepancy() == 0)), from, to);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::EventRecord;
    use crate::occupancy::{Boundary, Conditioning, Window};

    fn rec(time: f64, site: i64) -> EventRecord {
        EventRecord { time, site, displacement: 1, accepted: true }
    }

    #[test]
    fn hand_built_log() {
        // particle at -1 hops onto 0 at 1.0, leaves at 2.5; another arrives at 4.0
        let w = Window::symmetric(5);
        let initial = Occupancy::from_fn(w, Boundary::Frozen, |i| i == -1 || i == -3);
        let log = EventLog {
            records: vec![rec(0.5, -3), rec(1.0, -1), rec(2.5, 0), rec(3.0, -2), rec(4.0, -1)],
        };
        let traj = Trajectory { initial, log, horizon: 6.0 };
        let f = LocalFunction::centered_occupation(0, 0.25);
        // occupied on [1, 2.5) and [4, 6)
        let expect = 1.5 * 0.75 + 2.0 * 0.75 + 2.5 * -0.25;
        assert!((additive_functional(&traj, &f, 6.0).unwrap() - expect).abs() < 1e-12);
        assert!((additive_functional(&traj, &f, 2.0).unwrap() - (1.0 * -0.25 + 1.0 * 0.75)).abs() < 1e-12);
        assert!(additive_functional(&traj, &f, 7.0).is_err());
        let zero = LocalFunction::constant(0.0);
        assert_eq!(additive_functional(&traj, &zero, 6.0).unwrap(), 0.0);
        let far = LocalFunction::centered_occupation(40, 0.25);
        assert!(matches!(additive_functional(&traj, &far, 6.0), Err(Error::SupportOutsideWindow(_))));
    }

    #[test]
    fn constant_function_integrates_to_time() {
        let k = JumpKernel::tasep();
        let w = Window::symmetric(50);
        let clock = ClockRealization::tasep(3, 30.0).unwrap();
        let c = Occupancy::sample_equilibrium(0.4, w, 3, Conditioning::None, Boundary::Frozen).unwrap();
        let traj = Trajectory::record(c, &k, &clock, 30.0).unwrap();
        assert!(!traj.log.records.is_empty());
        let one = LocalFunction::constant(1.0);
        assert!((additive_functional(&traj, &one, 30.0).unwrap() - 30.0).abs() < 1e-12);
        let frozen = Trajectory { log: EventLog::default(), ..traj.clone() };
        let f = LocalFunction::<f64>::current_function();
        let v0 = f.eval(&frozen.initial).unwrap();
        assert!((additive_functional(&frozen, &f, 12.0).unwrap() - 12.0 * v0).abs() < 1e-12);
    }

    #[test]
    fn observer_matches_replay() {
        let k = JumpKernel::tasep();
        let w = Window::symmetric(60);
        for seed in 0..5 {
            let clock = ClockRealization::tasep(seed, 25.0).unwrap();
            let c = Occupancy::sample_equilibrium(0.3, w, seed, Conditioning::None, Boundary::Frozen).unwrap();
            let traj = Trajectory::record(c.clone(), &k, &clock, 25.0).unwrap();
            let f = LocalFunction::monotone_monomial(vec![0, 1, 3], 0.3).unwrap();
            let mut obs = AdditiveObserver::new(&f, &c).unwrap();
            let mut p = ExclusionProcess::new(c, &k, &clock, None).unwrap();
            p.advance_observed(25.0, &mut obs).unwrap();
            assert!((obs.value() - additive_functional(&traj, &f, 25.0).unwrap()).abs() < 1e-9);
        }
    }

    #[test]
    fn dwell_of_a_lone_particle() {
        let k = JumpKernel::tasep();
        let clock = ClockRealization::tasep(6, 10.0).unwrap();
        let lower = Occupancy::empty(Window::symmetric(30), Boundary::Frozen);
        let state = crate::coupled::CoupledState::with_second_class(lower, 0).unwrap();
        let mut p = crate::coupled::CoupledProcess::new(state, &k, &clock, None).unwrap();
        let mut dwell = OriginDwell::default();
        p.advance_observed(10.0, &mut dwell).unwrap();
        let first = clock.epochs(0, 0)[0].min(10.0);
        assert!((dwell.time() - first).abs() < 1e-12);
        assert!((dwell.moment() - first * first / 2.0).abs() < 1e-12);
    }
}
