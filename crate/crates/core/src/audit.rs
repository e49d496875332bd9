//! Light-cone audit for frozen boundaries.
//!
//! Sites outside the simulated window are unknown. A site inside the window
//! is *clean* while its simulated state provably equals the infinite-lattice
//! state. The clean set is kept as an interval that only shrinks: an epoch on
//! a bond with one clean and one unclean endpoint contaminates the clean
//! endpoint whenever the unknown side could change the outcome, that is when
//! the clean endpoint is the source and holds a particle, or is the target
//! and is empty.

use crate::occupancy::Window;

#[derive(Clone, Debug, PartialEq)]
pub struct LightCone {
    lo: i64,
    hi: i64,
    protected: Option<Window>,
    tripped_at: Option<f64>,
    contaminations: u64,
}

/// Outcome of an audited run.
#[derive(Clone, Debug, PartialEq, serde::Serialize)]
pub struct AuditReport {
    pub tripped_at: Option<f64>,
    /// Sites still clean at the end of the run, if any.
    pub clean: Option<(i64, i64)>,
    pub contaminations: u64,
}

impl AuditReport {
    pub fn unaudited() -> Self {
        Self { tripped_at: None, clean: None, contaminations: 0 }
    }

    pub fn passed(&self) -> bool {
        self.tripped_at.is_none()
    }

    pub fn violations(&self) -> u64 {
        u64::from(self.tripped_at.is_some())
    }

    pub fn require_clean(&self) -> crate::Result<()> {
        match self.tripped_at {
            None => Ok(()),
            Some(t) => Err(crate::Error::AuditTripped(t)),
        }
    }
}

impl LightCone {
    /// Starts with the whole `window` clean. The audit trips as soon as the
    /// clean interval stops covering `protected`.
    pub fn new(window: Window, protected: Option<Window>) -> Self {
        let mut cone = Self { lo: window.lo, hi: window.hi, protected, tripped_at: None, contaminations: 0 };
        cone.check_protected(0.0);
        cone
    }

    #[inline]
    pub fn is_clean(&self, i: i64) -> bool {
        self.lo <= i && i <= self.hi
    }

    pub fn clean(&self) -> Option<(i64, i64)> {
        (self.lo <= self.hi).then_some((self.lo, self.hi))
    }

    pub fn tripped_at(&self) -> Option<f64> {
        self.tripped_at
    }

    /// The clean endpoint that an epoch on bond `source -> target` would
    /// contaminate. The closures are only evaluated for the clean endpoint.
    #[inline]
    pub fn threat(
        &self,
        source: i64,
        target: i64,
        source_occupied: impl FnOnce() -> bool,
        target_empty: impl FnOnce() -> bool,
    ) -> Option<i64> {
        let (cs, ct) = (self.is_clean(source), self.is_clean(target));
        match (cs, ct) {
            (true, false) if source_occupied() => Some(source),
            (false, true) if target_empty() => Some(target),
            _ => None,
        }
    }

    /// Marks `site` unclean, reached from the unclean site `from`. Returns the
    /// span of sites whose frontier status may have changed.
    pub fn contaminate(&mut self, site: i64, from: i64, time: f64) -> (i64, i64) {
        let span = if from < site {
            let old = self.lo;
            self.lo = site + 1;
            (old, self.lo)
        } else {
            let old = self.hi;
            self.hi = site - 1;
            (self.hi, old)
        };
        self.contaminations += 1;
        self.check_protected(time);
        span
    }

    /// Trips the audit if `site` is not clean.
    pub fn require(&mut self, site: i64, time: f64) {
        if !self.is_clean(site) && self.tripped_at.is_none() {
            self.tripped_at = Some(time);
        }
    }

    fn check_protected(&mut self, time: f64) {
        if let Some(p) = self.protected {
            if (p.lo < self.lo || p.hi > self.hi) && self.tripped_at.is_none() {
                self.tripped_at = Some(time);
            }
        }
    }

    pub fn report(&self) -> AuditReport {
        AuditReport { tripped_at: self.tripped_at, clean: self.clean(), contaminations: self.contaminations }
    }
}
