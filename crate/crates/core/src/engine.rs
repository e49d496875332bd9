//! Event-driven driver shared by every process in the crate.
//!
//! Only *live* streams are kept in the priority queue: a stream is live when
//! one of its epochs could change the state (including the audit state). An
//! epoch of a stream that is not live is a no-op, so skipping it is exact.
//! After each fired epoch the dynamics reports which streams may have
//! changed liveness; those are re-armed with their first epoch after the
//! current event key.

use std::cmp::Reverse;
use std::collections::BinaryHeap;
use std::io::{Read, Write};

use crate::clock::{ClockRealization, EventKey, StreamCursor};
use crate::error::{Error, Result};
use crate::occupancy::Window;

/// One examined clock epoch.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct EventRecord {
    pub time: f64,
    pub site: i64,
    pub displacement: i32,
    pub accepted: bool,
}

/// A process driven by a [`ClockRealization`].
pub trait Dynamics {
    /// Stream source sites that can ever be live.
    fn sources(&self) -> Window;
    fn is_live(&self, site: i64, kidx: usize) -> bool;
    /// Applies an epoch of stream `(site, kidx)` and pushes every stream whose
    /// liveness may have changed. Returns whether the state changed.
    fn fire(&mut self, site: i64, kidx: usize, time: f64, affected: &mut Vec<(i64, usize)>) -> bool;
}

/// Sees the trajectory as a sequence of constant stretches and events.
pub trait Observer<D: ?Sized> {
    /// The state is constant on `[from, to)`.
    fn hold(&mut self, _state: &D, _from: f64, _to: f64) {}
    /// Called after an epoch has been applied.
    fn event(&mut self, _state: &D, _record: &EventRecord) {}
}

impl<D: ?Sized> Observer<D> for () {}

impl<D: ?Sized, A: Observer<D>, B: Observer<D>> Observer<D> for (A, B) {
    fn hold(&mut self, state: &D, from: f64, to: f64) {
        self.0.hold(state, from, to);
        self.1.hold(state, from, to);
    }

    fn event(&mut self, state: &D, record: &EventRecord) {
        self.0.event(state, record);
        self.1.event(state, record);
    }
}

impl<D: ?Sized, O: Observer<D> + ?Sized> Observer<D> for &mut O {
    fn hold(&mut self, state: &D, from: f64, to: f64) {
        (**self).hold(state, from, to);
    }

    fn event(&mut self, state: &D, record: &EventRecord) {
        (**self).event(state, record);
    }
}

/// Records only accepted events.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct EventLog {
    pub records: Vec<EventRecord>,
}

impl<D: ?Sized> Observer<D> for EventLog {
    fn event(&mut self, _state: &D, record: &EventRecord) {
        if record.accepted {
            self.records.push(*record);
        }
    }
}

impl EventLog {
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        for r in &self.records {
            out.serialize(r)?;
        }
        out.flush()?;
        Ok(())
    }

    pub fn read_csv<R: Read>(r: R) -> Result<Self> {
        let mut rdr = csv::Reader::from_reader(r);
        let records = rdr.deserialize().collect::<std::result::Result<Vec<EventRecord>, _>>()?;
        Ok(Self { records })
    }
}

/// Queue entry packed as `time bits | source offset | stream index`.
/// Epoch times are positive, so integer order on the packed word is the
/// `(time, site, displacement)` order.
#[inline]
fn pack(time: f64, offset: usize, kidx: usize) -> u128 {
    ((time.to_bits() as u128) << 64) | ((offset as u128) << 16) | kidx as u128
}

#[inline]
fn unpack(word: u128) -> (f64, usize, usize) {
    (f64::from_bits((word >> 64) as u64), ((word >> 16) as u64 & 0xFFFF_FFFF_FFFF) as usize, (word & 0xFFFF) as usize)
}

#[derive(Clone, Debug, Default)]
struct Slot {
    cursor: StreamCursor,
    armed: bool,
}

/// A process together with its clock and pending epochs.
#[derive(Clone, Debug)]
pub struct Simulation<D> {
    clock: ClockRealization,
    dynamics: D,
    heap: BinaryHeap<Reverse<u128>>,
    slots: Vec<Slot>,
    sources: Window,
    now: EventKey,
    time: f64,
    affected: Vec<(i64, usize)>,
    fired: u64,
}

impl<D: Dynamics> Simulation<D> {
    pub fn new(clock: ClockRealization, dynamics: D) -> Self {
        let sources = dynamics.sources();
        let width = clock.width();
        let mut sim = Self {
            slots: vec![Slot::default(); sources.len() * width],
            clock,
            dynamics,
            heap: BinaryHeap::new(),
            sources,
            now: EventKey::START,
            time: 0.0,
            affected: Vec::new(),
            fired: 0,
        };
        for site in sources.sites() {
            for kidx in 0..width {
                sim.arm(site, kidx);
            }
        }
        sim
    }

    pub fn clock(&self) -> &ClockRealization {
        &self.clock
    }

    pub fn dynamics(&self) -> &D {
        &self.dynamics
    }

    /// Mutable access for bookkeeping that does not change liveness of any
    /// stream (audit checks, counters).
    pub(crate) fn dynamics_mut(&mut self) -> &mut D {
        &mut self.dynamics
    }

    pub fn into_dynamics(self) -> D {
        self.dynamics
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    /// Epochs examined so far.
    pub fn events(&self) -> u64 {
        self.fired
    }

    #[inline]
    fn slot(&self, site: i64, kidx: usize) -> usize {
        (site - self.sources.lo) as usize * self.clock.width() + kidx
    }

    #[inline]
    fn arm(&mut self, site: i64, kidx: usize) {
        if !self.sources.contains(site) {
            return;
        }
        let slot = self.slot(site, kidx);
        if self.slots[slot].armed || !self.dynamics.is_live(site, kidx) {
            return;
        }
        let Slot { cursor, armed } = &mut self.slots[slot];
        if let Some(time) = cursor.next_after(&self.clock, site, kidx, self.now) {
            *armed = true;
            self.heap.push(Reverse(pack(time, (site - self.sources.lo) as usize, kidx)));
        }
    }

    /// Time of the next pending epoch, if any.
    pub fn peek_time(&self) -> Option<f64> {
        self.heap.peek().map(|&Reverse(w)| unpack(w).0)
    }

    /// Runs every epoch with time `<= t`.
    pub fn advance_to(&mut self, t: f64) -> Result<()> {
        self.advance_observed(t, &mut ())
    }

    pub fn advance_observed<O: Observer<D>>(&mut self, t: f64, observer: &mut O) -> Result<()> {
        self.clock.check_time(t)?;
        if t < self.time {
            return Err(Error::TimeReversed { requested: t, current: self.time });
        }
        while let Some(&Reverse(word)) = self.heap.peek() {
            let (time, offset, kidx) = unpack(word);
            if time > t {
                break;
            }
            self.heap.pop();
            let site = self.sources.lo + offset as i64;
            let key = EventKey { time, site, disp: self.clock.displacement(kidx) };
            debug_assert!(key > self.now, "epochs must be processed in key order");
            observer.hold(&self.dynamics, self.time, time);
            self.time = time;
            self.now = key;
            let slot = self.slot(site, kidx);
            self.slots[slot].armed = false;
            let mut affected = std::mem::take(&mut self.affected);
            affected.clear();
            let accepted = self.dynamics.fire(site, kidx, time, &mut affected);
            self.fired += 1;
            self.arm(site, kidx);
            for &(s, k) in &affected {
                self.arm(s, k);
            }
            self.affected = affected;
            let record = EventRecord { time, site, displacement: key.disp, accepted };
            observer.event(&self.dynamics, &record);
        }
        observer.hold(&self.dynamics, self.time, t);
        self.time = t;
        Ok(())
    }

    /// Runs until `stop` returns true after an event, or until `t`. Returns
    /// whether the condition was met.
    pub fn advance_until(&mut self, t: f64, mut stop: impl FnMut(&D, &EventRecord) -> bool) -> Result<bool> {
        struct Until<'a, F> {
            stop: &'a mut F,
            hit: bool,
        }
        self.clock.check_time(t)?;
        loop {
            let next = match self.peek_time() {
                Some(n) if n <= t => n,
                _ => {
                    self.advance_to(t)?;
                    return Ok(false);
                }
            };
            let mut until = Until { stop: &mut stop, hit: false };
            impl<D, F: FnMut(&D, &EventRecord) -> bool> Observer<D> for Until<'_, F> {
                fn event(&mut self, state: &D, record: &EventRecord) {
                    if (self.stop)(state, record) {
                        self.hit = true;
                    }
                }
            }
            self.advance_observed(next, &mut until)?;
            if until.hit {
                return Ok(true);
            }
        }
    }
}
