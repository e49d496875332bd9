//! Envelope `sup_k { z_k(0) - xi^k_{i-k}(t) }` over a lazily built family of
//! interfaces, and the variational formula for the second-class particle.
//!
//! Certificate for site `i` and labels `[ka, kb]`: `xi^{ka}_{i-ka}(t) = 0`
//! and `xi^{kb}_{i-kb}(t) = kb - i`. Label monotonicity then bounds every
//! term with `k < ka` by the `ka` term and every term with `k > kb` by the
//! `kb` term, so the sup over all labels is the max over `[ka, kb]`.

use crate::clock::ClockRealization;
use crate::error::{Error, Result};
use crate::occupancy::Window;

use super::height::HeightProfile;
use super::interface::InterfaceProcess;

/// Interfaces `xi^k` for `k` in a label window, created on first use and
/// kept at a common time.
#[derive(Clone, Debug)]
pub struct InterfaceFamily {
    clock: ClockRealization,
    labels: Window,
    reach: i64,
    half_width: i64,
    time: f64,
    members: Vec<Option<InterfaceProcess>>,
}

/// Certificate distance suited to times up to `t`.
pub fn default_reach(t: f64) -> i64 {
    (t + 6.0 * t.sqrt() + 8.0).ceil() as i64
}

impl InterfaceFamily {
    /// Certificates at distance `reach`; each interface is simulated on
    /// `[-half_width, half_width]`.
    pub fn new(clock: &ClockRealization, labels: Window, reach: i64, half_width: i64) -> Result<Self> {
        if labels.is_empty() {
            return Err(Error::EmptyLabelWindow);
        }
        if reach < 1 || half_width < reach {
            return Err(Error::InvalidArgument(format!("reach {reach} and half width {half_width}")));
        }
        Ok(Self { clock: clock.clone(), labels, reach, half_width, time: 0.0, members: vec![None; labels.len()] })
    }

    /// Sizes chosen for times up to `horizon`.
    pub fn for_horizon(clock: &ClockRealization, labels: Window, horizon: f64) -> Result<Self> {
        let reach = default_reach(horizon);
        Self::new(clock, labels, reach, reach + (2.0 * horizon.sqrt()).ceil() as i64 + 8)
    }

    pub fn labels(&self) -> Window {
        self.labels
    }

    pub fn reach(&self) -> i64 {
        self.reach
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn materialized(&self) -> usize {
        self.members.iter().flatten().count()
    }

    pub fn events(&self) -> u64 {
        self.members.iter().flatten().map(InterfaceProcess::events).sum()
    }

    pub fn advance_to(&mut self, t: f64) -> Result<()> {
        for m in self.members.iter_mut().flatten() {
            m.advance_to(t)?;
        }
        self.clock.check_time(t)?;
        if t < self.time {
            return Err(Error::TimeReversed { requested: t, current: self.time });
        }
        self.time = t;
        Ok(())
    }

    fn member(&mut self, k: i64) -> Result<&InterfaceProcess> {
        if !self.labels.contains(k) {
            return Err(Error::InvalidArgument(format!("label {k} outside {:?}", self.labels)));
        }
        let slot = &mut self.members[(k - self.labels.lo) as usize];
        if slot.is_none() {
            let mut p = InterfaceProcess::new(k, Window::symmetric(self.half_width), &self.clock)?;
            p.advance_to(self.time)?;
            *slot = Some(p);
        }
        Ok(slot.as_ref().unwrap())
    }

    /// `xi^k_j` at the family time.
    pub fn xi(&mut self, k: i64, j: i64) -> Result<i64> {
        self.member(k)?.height(j)
    }

    /// Whether `[ka, kb]` carries a certificate for site `i`.
    pub fn certify(&mut self, i: i64, ka: i64, kb: i64) -> Result<bool> {
        if ka > kb {
            return Err(Error::EmptyLabelWindow);
        }
        Ok(self.xi(ka, i - ka)? == 0 && self.xi(kb, i - kb)? == kb - i)
    }

    /// Max over `[ka, kb]` without any certificate.
    pub fn envelope_over(&mut self, z0: &HeightProfile, i: i64, ka: i64, kb: i64) -> Result<i64> {
        if ka > kb {
            return Err(Error::EmptyLabelWindow);
        }
        let mut best = i64::MIN;
        for k in ka..=kb {
            let zk = z0.get(k).ok_or(Error::OutsideWindow(k))?;
            best = best.max(zk - self.xi(k, i - k)?);
        }
        Ok(best)
    }

    /// Labels `[i - reach, i + reach]` clipped to the family, if certified.
    pub fn certified_labels(&mut self, i: i64) -> Result<(i64, i64)> {
        let (ka, kb) = ((i - self.reach).max(self.labels.lo), (i + self.reach).min(self.labels.hi));
        if ka > kb {
            return Err(Error::EmptyLabelWindow);
        }
        if self.certify(i, ka, kb)? {
            Ok((ka, kb))
        } else {
            Err(Error::UncertifiedWindow { site: i, ka, kb })
        }
    }

    /// `sup_k { z_k(0) - xi^k_{i-k} }` at the family time.
    pub fn envelope(&mut self, z0: &HeightProfile, i: i64) -> Result<i64> {
        let (ka, kb) = self.certified_labels(i)?;
        self.envelope_over(z0, i, ka, kb)
    }

    /// Whether some `k >= r0` attains the envelope at `i`.
    fn attained(&mut self, z0: &HeightProfile, i: i64, r0: i64) -> Result<bool> {
        let (ka, kb) = self.certified_labels(i)?;
        let zi = self.envelope_over(z0, i, ka, kb)?;
        // A maximizer beyond kb implies kb attains too; likewise below ka.
        if kb < r0 {
            return Err(Error::UncertifiedWindow { site: i, ka, kb });
        }
        for k in ka.max(r0)..=kb {
            if z0.at(k) - self.xi(k, i - k)? == zi {
                return Ok(true);
            }
        }
        Ok(false)
    }

    /// `inf { i : z_i(t) = z_k(0) - xi^k_{i-k}(t) for some k >= r0 }`, searched
    /// over `search`. The lowest site must not attain, otherwise the infimum
    /// may lie below the window.
    pub fn second_class(&mut self, z0: &HeightProfile, r0: i64, search: Window) -> Result<i64> {
        let too_small = Error::SearchWindowTooSmall { lo: search.lo, hi: search.hi };
        if search.len() < 2 || self.attained(z0, search.lo, r0)? {
            return Err(too_small);
        }
        for i in search.lo + 1..=search.hi {
            if self.attained(z0, i, r0)? {
                return Ok(i);
            }
        }
        Err(too_small)
    }
}

/// Envelope at site `i` and time `t`.
pub fn envelope(z0: &HeightProfile, family: &mut InterfaceFamily, i: i64, t: f64) -> Result<i64> {
    family.advance_to(t)?;
    family.envelope(z0, i)
}

/// Certificate for labels `[floor(ta), floor(tb)]` at site `floor(tx)`.
pub fn finite_k_window(family: &mut InterfaceFamily, t: f64, x: f64, a: f64, b: f64) -> Result<bool> {
    if !(a < x - 1.0 && x + 1.0 < b) {
        return Err(Error::InvalidArgument(format!("need a < x - 1 < x + 1 < b, got a={a} x={x} b={b}")));
    }
    family.advance_to(t)?;
    let f = |v: f64| (t * v).floor() as i64;
    family.certify(f(x), f(a), f(b))
}

/// Second-class position from the variational formula, searching
/// `r0 - reach ..= r0 + reach`.
pub fn second_class_variational(z0: &HeightProfile, family: &mut InterfaceFamily, r0: i64, t: f64) -> Result<i64> {
    family.advance_to(t)?;
    let reach = family.reach();
    family.second_class(z0, r0, Window { lo: r0 - reach, hi: r0 + reach })
}
