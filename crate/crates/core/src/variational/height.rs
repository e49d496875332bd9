//! Height profiles and their literal max-rule dynamics.
//!
//! A profile `z` on `[a, b]` encodes occupancies `eta_i = z_i - z_{i-1}` on
//! `[a + 1, b]`. At an epoch of stream `i + offset` the value at `i` becomes
//! `max(z_i - 1, z_{i-1}, z_{i+1} - 1)`; the endpoints are frozen. With frozen
//! endpoints this is the frozen-boundary exclusion process on `[a + 1, b]`,
//! and the light-cone audit runs on those occupancies.

use std::io::{Read, Write};

use crate::audit::{AuditReport, LightCone};
use crate::clock::ClockRealization;
use crate::engine::{Dynamics, Observer, Simulation};
use crate::error::{Error, Result};
use crate::kernel::JumpKernel;
use crate::occupancy::{Boundary, Occupancy, Window};

/// How the additive constant of a profile was fixed.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Anchor {
    /// `z_0 = 0` at time zero.
    Origin,
    /// Arbitrary constant (for example a step profile `w^k`).
    Free,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HeightProfile {
    window: Window,
    values: Vec<i64>,
    anchor: Anchor,
}

#[derive(serde::Serialize, serde::Deserialize)]
struct SiteValue {
    site: i64,
    value: i64,
}

impl HeightProfile {
    /// Checks `0 <= z_{i+1} - z_i <= 1` throughout.
    pub fn new(window: Window, values: Vec<i64>, anchor: Anchor) -> Result<Self> {
        if window.is_empty() || values.len() != window.len() {
            return Err(Error::InvalidArgument(format!("{} values for a window of {} sites", values.len(), window.len())));
        }
        if let Some(p) = values.windows(2).position(|w| !(0..=1).contains(&(w[1] - w[0]))) {
            return Err(Error::IncrementViolation(window.lo + p as i64 + 1));
        }
        Ok(Self { window, values, anchor })
    }

    pub fn window(&self) -> Window {
        self.window
    }

    pub fn anchor(&self) -> Anchor {
        self.anchor
    }

    pub fn values(&self) -> &[i64] {
        &self.values
    }

    pub fn get(&self, i: i64) -> Option<i64> {
        self.window.contains(i).then(|| self.values[(i - self.window.lo) as usize])
    }

    pub fn at(&self, i: i64) -> i64 {
        self.get(i).unwrap_or_else(|| panic!("site {i} outside {:?}", self.window))
    }

    /// `site,value` rows.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        for (site, &value) in self.window.sites().zip(&self.values) {
            out.serialize(SiteValue { site, value })?;
        }
        out.flush()?;
        Ok(())
    }

    pub fn read_csv<R: Read>(r: R, anchor: Anchor) -> Result<Self> {
        let rows = csv::Reader::from_reader(r).deserialize().collect::<std::result::Result<Vec<SiteValue>, _>>()?;
        let lo = rows.first().ok_or_else(|| Error::Parse("empty profile".into()))?.site;
        if rows.iter().enumerate().any(|(n, r)| r.site != lo + n as i64) {
            return Err(Error::Parse("profile sites must be consecutive".into()));
        }
        let window = Window::new(lo, lo + rows.len() as i64 - 1)?;
        Self::new(window, rows.into_iter().map(|r| r.value).collect(), anchor)
    }
}

/// Profile on `[lo - 1, hi]` for an occupancy on `[lo, hi]`, normalized by
/// `z_0 = 0`.
pub fn height_from_occupancy(config: &Occupancy) -> Result<HeightProfile> {
    let w = config.window();
    if !w.contains(0) {
        return Err(Error::InvalidArgument(format!("{w:?} does not contain the origin")));
    }
    let below: i64 = (w.lo..=0).map(|j| config.at(j) as i64).sum();
    let mut values = Vec::with_capacity(w.len() + 1);
    let mut z = -below;
    values.push(z);
    for j in w.sites() {
        z += config.at(j) as i64;
        values.push(z);
    }
    Ok(HeightProfile { window: Window { lo: w.lo - 1, hi: w.hi }, values, anchor: Anchor::Origin })
}

/// Increments of `z` as a frozen-boundary occupancy on `[a + 1, b]`.
pub fn occupancy_from_height(z: &HeightProfile) -> Result<Occupancy> {
    let w = z.window;
    if w.len() < 2 {
        return Err(Error::InvalidArgument("a profile needs two sites to carry an increment".into()));
    }
    let mut bits = Vec::with_capacity(w.len() - 1);
    for (n, pair) in z.values.windows(2).enumerate() {
        match pair[1] - pair[0] {
            d @ (0 | 1) => bits.push(d as u8),
            _ => return Err(Error::IncrementViolation(w.lo + n as i64 + 1)),
        }
    }
    Occupancy::from_bits(Window { lo: w.lo + 1, hi: w.hi }, bits, Boundary::Frozen)
}

/// Max-rule dynamics of one profile driven by the translated TASEP clock.
#[derive(Clone, Debug)]
pub struct ProfileDynamics {
    window: Window,
    values: Vec<i64>,
    offset: i64,
    cone: LightCone,
}

impl ProfileDynamics {
    /// `protect` is given in profile indices; profile value `i` is exact when
    /// occupancies `i` and `i + 1` are clean.
    pub fn new(z: &HeightProfile, offset: i64, protect: Option<Window>) -> Result<Self> {
        if z.window.len() < 2 {
            return Err(Error::InvalidArgument("a profile needs two sites to carry an increment".into()));
        }
        let eta = Window { lo: z.window.lo + 1, hi: z.window.hi };
        let protect = protect.map(|p| Window { lo: p.lo.max(eta.lo), hi: (p.hi + 1).min(eta.hi) });
        Ok(Self { window: z.window, values: z.values.clone(), offset, cone: LightCone::new(eta, protect) })
    }

    #[inline]
    fn z(&self, i: i64) -> i64 {
        self.values[(i - self.window.lo) as usize]
    }

    /// Occupancy at a clean site.
    #[inline]
    fn eta(&self, i: i64) -> i64 {
        self.z(i) - self.z(i - 1)
    }

    #[inline]
    fn interior(&self, i: i64) -> bool {
        self.window.lo < i && i < self.window.hi
    }

    #[inline]
    fn proposal(&self, i: i64) -> i64 {
        (self.z(i) - 1).max(self.z(i - 1)).max(self.z(i + 1) - 1)
    }

    #[inline]
    fn threat(&self, i: i64) -> Option<(i64, i64)> {
        let c = self.cone.threat(i, i + 1, || self.eta(i) == 1, || self.eta(i + 1) == 0)?;
        Some((c, if c == i { i + 1 } else { i }))
    }

    pub fn profile(&self, anchor: Anchor) -> HeightProfile {
        HeightProfile { window: self.window, values: self.values.clone(), anchor }
    }

    pub fn get(&self, i: i64) -> Option<i64> {
        self.window.contains(i).then(|| self.z(i))
    }

    /// Whether the value at `i` is known to equal the infinite-lattice value.
    pub fn is_exact(&self, i: i64) -> bool {
        // z_i moves only when a particle crosses (i, i + 1); at a frozen end a
        // clean neighbour means no true crossing could have happened there.
        let w = self.window;
        w.contains(i) && self.cone.is_clean(i.max(w.lo + 1)) && self.cone.is_clean((i + 1).min(w.hi))
    }

    pub fn audit(&self) -> AuditReport {
        self.cone.report()
    }

    pub fn untouched(&self) -> bool {
        self.cone.report().contaminations == 0
    }

    pub fn offset(&self) -> i64 {
        self.offset
    }
}

impl Dynamics for ProfileDynamics {
    fn sources(&self) -> Window {
        Window { lo: self.window.lo + self.offset, hi: self.window.hi + self.offset }
    }

    #[inline]
    fn is_live(&self, site: i64, _kidx: usize) -> bool {
        let i = site - self.offset;
        (self.interior(i) && self.proposal(i) != self.z(i)) || self.threat(i).is_some()
    }

    fn fire(&mut self, site: i64, _kidx: usize, time: f64, affected: &mut Vec<(i64, usize)>) -> bool {
        let i = site - self.offset;
        if let Some((c, from)) = self.threat(i) {
            let (lo, hi) = self.cone.contaminate(c, from, time);
            affected.extend((lo - 2..=hi + 1).map(|s| (s + self.offset, 0)));
        }
        if !self.interior(i) {
            return false;
        }
        let new = self.proposal(i);
        if new == self.z(i) {
            return false;
        }
        self.values[(i - self.window.lo) as usize] = new;
        debug_assert!((0..=1).contains(&(self.z(i) - self.z(i - 1))) && (0..=1).contains(&(self.z(i + 1) - self.z(i))));
        affected.extend([(site - 1, 0), (site + 1, 0)]);
        true
    }
}

/// A profile evolving under the max rule with clock translation `offset`.
#[derive(Clone, Debug)]
pub struct HeightProcess {
    sim: Simulation<ProfileDynamics>,
    anchor: Anchor,
}

impl HeightProcess {
    pub fn new(z: &HeightProfile, clock: &ClockRealization, offset: i64, protect: Option<Window>) -> Result<Self> {
        clock.check_kernel(&JumpKernel::tasep()).map_err(|_| Error::NotTasep)?;
        Ok(Self { sim: Simulation::new(clock.clone(), ProfileDynamics::new(z, offset, protect)?), anchor: z.anchor })
    }

    pub fn advance_to(&mut self, t: f64) -> Result<()> {
        self.sim.advance_to(t)
    }

    pub fn advance_observed<O: Observer<ProfileDynamics>>(&mut self, t: f64, observer: &mut O) -> Result<()> {
        self.sim.advance_observed(t, observer)
    }

    pub fn time(&self) -> f64 {
        self.sim.time()
    }

    pub fn events(&self) -> u64 {
        self.sim.events()
    }

    pub fn dynamics(&self) -> &ProfileDynamics {
        self.sim.dynamics()
    }

    pub fn profile(&self) -> HeightProfile {
        self.sim.dynamics().profile(self.anchor)
    }

    pub fn get(&self, i: i64) -> Option<i64> {
        self.sim.dynamics().get(i)
    }

    pub fn is_exact(&self, i: i64) -> bool {
        self.sim.dynamics().is_exact(i)
    }

    pub fn audit(&self) -> AuditReport {
        self.sim.dynamics().audit()
    }
}

/// Runs the max rule to time `t`; fails if the audit leaves `protect`.
pub fn evolve_height(
    z: &HeightProfile,
    clock: &ClockRealization,
    offset: i64,
    t: f64,
    protect: Option<Window>,
) -> Result<HeightProfile> {
    let mut p = HeightProcess::new(z, clock, offset, protect)?;
    p.advance_to(t)?;
    p.audit().require_clean()?;
    Ok(p.profile())
}
