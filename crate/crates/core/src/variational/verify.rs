//! Pathwise check of the envelope identity and the variational formula for
//! the second-class particle on one seed.

use crate::clock::ClockRealization;
use crate::coupled::{CoupledProcess, CoupledState};
use crate::error::{Error, Result};
use crate::exclusion::MarginPolicy;
use crate::kernel::JumpKernel;
use crate::occupancy::{Boundary, Conditioning, Occupancy, Window};

use super::envelope::{default_reach, InterfaceFamily};
use super::height::{height_from_occupancy, HeightProcess};

#[derive(Clone, Debug)]
pub struct VerifySetup {
    pub rho: f64,
    /// Sampling times, increasing; the last one is the horizon.
    pub times: Vec<f64>,
    /// Sites where the dynamics and the envelope are compared.
    pub observe: Window,
    pub margin: MarginPolicy,
}

/// Per-seed outcome. `audit_ok` is false when some compared value could not
/// be certified; such a seed is inconclusive rather than failed.
#[derive(Clone, Debug, PartialEq, serde::Serialize)]
pub struct VerifyOutcome {
    pub seed: u64,
    pub audit_ok: bool,
    pub compared_sites: u64,
    pub envelope_mismatches: u64,
    pub discrepancy_checks: u64,
    pub discrepancy_mismatches: u64,
    /// Discrepancy positions at each sampling time.
    pub discrepancy: Vec<i64>,
    pub interfaces: usize,
    pub events: u64,
}

impl VerifyOutcome {
    pub fn passed(&self) -> bool {
        self.audit_ok && self.envelope_mismatches == 0 && self.discrepancy_mismatches == 0
    }
}

/// Runs the height process, the coupled pair (second-class particle at the
/// origin, origin empty in the lower configuration) and the interface family
/// on one TASEP clock, and compares them at every sampling time.
pub fn verify_seed(setup: &VerifySetup, seed: u64) -> Result<VerifyOutcome> {
    let horizon = *setup.times.last().ok_or_else(|| Error::InvalidArgument("no sampling times".into()))?;
    if setup.times.windows(2).any(|w| w[1] < w[0]) || setup.times[0] < 0.0 {
        return Err(Error::InvalidArgument("sampling times must be non-negative and increasing".into()));
    }
    let kernel = JumpKernel::tasep();
    let reach = default_reach(horizon);
    let search = Window { lo: -reach, hi: reach };
    let exact = Window { lo: setup.observe.lo.min(search.lo), hi: setup.observe.hi.max(search.hi) };
    let labels = Window { lo: exact.lo - reach, hi: exact.hi + reach };
    let mut window = setup.margin.window(exact, &kernel, horizon);
    window = Window { lo: window.lo.min(labels.lo), hi: window.hi.max(labels.hi) };

    let clock = ClockRealization::tasep(seed, horizon)?;
    let lower = Occupancy::sample_equilibrium(setup.rho, window, seed, Conditioning::OriginEmpty, Boundary::Frozen)?;
    let z0 = height_from_occupancy(&lower)?;
    let mut heights = HeightProcess::new(&z0, &clock, 0, Some(setup.observe))?;
    let mut pair = CoupledProcess::new(CoupledState::with_second_class(lower, 0)?, &kernel, &clock, None)?;
    let mut family = InterfaceFamily::for_horizon(&clock, labels, horizon)?;

    let mut out = VerifyOutcome {
        seed,
        audit_ok: true,
        compared_sites: 0,
        envelope_mismatches: 0,
        discrepancy_checks: 0,
        discrepancy_mismatches: 0,
        discrepancy: Vec::with_capacity(setup.times.len()),
        interfaces: 0,
        events: 0,
    };
    let inconclusive = |e: &Error| {
        matches!(e, Error::AuditTripped(_) | Error::UncertifiedWindow { .. } | Error::SearchWindowTooSmall { .. })
    };
    for &t in &setup.times {
        heights.advance_to(t)?;
        pair.advance_to(t)?;
        family.advance_to(t)?;
        for i in setup.observe.sites() {
            if !heights.is_exact(i) {
                out.audit_ok = false;
                continue;
            }
            match family.envelope(&z0, i) {
                Ok(v) => {
                    out.compared_sites += 1;
                    out.envelope_mismatches += u64::from(v != heights.get(i).unwrap());
                }
                Err(e) if inconclusive(&e) => out.audit_ok = false,
                Err(e) => return Err(e),
            }
        }
        let r = pair.discrepancy();
        out.discrepancy.push(r);
        if !pair.certify_discrepancy() {
            out.audit_ok = false;
            continue;
        }
        match family.second_class(&z0, 0, search) {
            Ok(v) => {
                out.discrepancy_checks += 1;
                out.discrepancy_mismatches += u64::from(v != r);
            }
            Err(e) if inconclusive(&e) => out.audit_ok = false,
            Err(e) => return Err(e),
        }
    }
    out.interfaces = family.materialized();
    out.events = family.events() + heights.events() + pair.events();
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn short_runs_verify() {
        let setup = VerifySetup {
            rho: 0.25,
            times: vec![2.0, 5.0, 10.0],
            observe: Window::symmetric(10),
            margin: MarginPolicy::Default,
        };
        for seed in 0..5 {
            let out = verify_seed(&setup, seed).unwrap();
            assert!(out.passed(), "{out:?}");
            assert_eq!(out.compared_sites, 63);
            assert_eq!(out.discrepancy_checks, 3);
        }
    }

    #[test]
    fn empty_background_gives_the_poisson_path() {
        let setup =
            VerifySetup { rho: 0.0, times: vec![1.0, 3.0, 6.0], observe: Window::symmetric(3), margin: MarginPolicy::Default };
        let out = verify_seed(&setup, 12).unwrap();
        assert!(out.passed());
        let clock = ClockRealization::tasep(12, 6.0).unwrap();
        // Alone, the particle jumps at every epoch of the stream at its site.
        let mut pos = 0i64;
        let mut at = crate::clock::EventKey::START;
        let mut path = Vec::new();
        for &t in &setup.times {
            while let Some(e) = clock.next_epoch(pos, 0, at).filter(|&e| e <= t) {
                at = crate::clock::EventKey { time: e, site: pos, disp: 1 };
                pos += 1;
            }
            path.push(pos);
        }
        assert_eq!(out.discrepancy, path);
    }
}
