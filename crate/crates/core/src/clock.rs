//! Poisson clock realizations for the graphical construction.
//!
//! There is one stream per `(site, displacement)` pair, running at rate
//! `p(displacement)`. Time is cut into blocks holding a few epochs on average;
//! the epochs of a block are an exponential-gap sequence drawn from a
//! generator keyed by `(seed, site, displacement, block)`. Restarting the gap
//! sequence at every block boundary is exact for a Poisson process, and it
//! makes any stream queryable at any time without replaying its history.

use std::cmp::Ordering;

use crate::error::{Error, Result};
use crate::kernel::JumpKernel;
use rand_pcg::Pcg64Mcg;

use crate::rng::{self, Domain};

/// Lexicographic `(time, site, displacement)` key. Distinct epochs never
/// compare equal, which is the tie-break that makes event order total.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EventKey {
    pub time: f64,
    pub site: i64,
    pub disp: i32,
}

impl EventKey {
    /// Smaller than every epoch.
    pub const START: EventKey = EventKey { time: 0.0, site: i64::MIN, disp: i32::MIN };
}

impl Eq for EventKey {}

impl PartialOrd for EventKey {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for EventKey {
    fn cmp(&self, other: &Self) -> Ordering {
        self.time
            .total_cmp(&other.time)
            .then(self.site.cmp(&other.site))
            .then(self.disp.cmp(&other.disp))
    }
}

/// Expected number of epochs per block.
const BLOCK_EPOCHS: f64 = 8.0;

#[derive(Clone, Debug, PartialEq)]
struct StreamRate {
    disp: i32,
    rate: f64,
    block_len: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ClockRealization {
    seed: u64,
    horizon: f64,
    streams: Vec<StreamRate>,
}

impl ClockRealization {
    pub fn new(seed: u64, kernel: &JumpKernel, horizon: f64) -> Result<Self> {
        if !(horizon.is_finite() && horizon >= 0.0) {
            return Err(Error::InvalidArgument(format!("horizon {horizon} must be finite and non-negative")));
        }
        let streams = kernel
            .entries()
            .iter()
            .map(|&(disp, rate)| StreamRate { disp, rate, block_len: BLOCK_EPOCHS / rate })
            .collect();
        Ok(Self { seed, horizon, streams })
    }

    /// Unit-rate streams `D_i` of the totally asymmetric construction.
    pub fn tasep(seed: u64, horizon: f64) -> Result<Self> {
        Self::new(seed, &JumpKernel::tasep(), horizon)
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    /// Number of displacement streams per site.
    pub fn width(&self) -> usize {
        self.streams.len()
    }

    pub fn displacement(&self, kidx: usize) -> i32 {
        self.streams[kidx].disp
    }

    pub fn rate(&self, kidx: usize) -> f64 {
        self.streams[kidx].rate
    }

    pub fn matches(&self, kernel: &JumpKernel) -> bool {
        self.streams.len() == kernel.len()
            && self.streams.iter().zip(kernel.entries()).all(|(s, &(k, r))| s.disp == k && s.rate == r)
    }

    pub(crate) fn check_kernel(&self, kernel: &JumpKernel) -> Result<()> {
        if self.matches(kernel) {
            Ok(())
        } else {
            Err(Error::ClockKernelMismatch)
        }
    }

    pub(crate) fn check_time(&self, t: f64) -> Result<()> {
        if t > self.horizon || t.is_nan() {
            Err(Error::HorizonExceeded { requested: t, horizon: self.horizon })
        } else {
            Ok(())
        }
    }

    fn block_of(&self, kidx: usize, t: f64) -> i64 {
        let len = self.streams[kidx].block_len;
        let mut b = (t / len).floor().max(0.0) as i64;
        while b > 0 && b as f64 * len > t {
            b -= 1;
        }
        b
    }

    /// First epoch `e` of stream `(site, kidx)` whose key
    /// `(e, site, displacement)` is strictly greater than `after`.
    pub fn next_epoch(&self, site: i64, kidx: usize, after: EventKey) -> Option<f64> {
        StreamCursor::new().next_after(self, site, kidx, after)
    }

    /// All epochs of a stream on `[0, horizon]`, increasing.
    pub fn epochs(&self, site: i64, kidx: usize) -> Vec<f64> {
        let disp = self.streams[kidx].disp;
        let mut cursor = StreamCursor::new();
        let mut out = Vec::new();
        let mut key = EventKey::START;
        while let Some(e) = cursor.next_after(self, site, kidx, key) {
            out.push(e);
            key = EventKey { time: e, site, disp };
        }
        out
    }
}

/// Incremental reader of one stream. Answers the same queries as
/// [`ClockRealization::next_epoch`], provided successive `after` keys never
/// decrease; each answer then costs O(1) amortized draws.
#[derive(Clone, Debug)]
pub struct StreamCursor {
    block: i64,
    rng: Pcg64Mcg,
    /// Last generated epoch, or the start of `block` when `has_epoch` is false.
    pos: f64,
    has_epoch: bool,
    done: bool,
}

impl Default for StreamCursor {
    fn default() -> Self {
        Self::new()
    }
}

impl StreamCursor {
    pub fn new() -> Self {
        Self { block: i64::MIN, rng: Pcg64Mcg::new(0), pos: 0.0, has_epoch: false, done: false }
    }

    fn load(&mut self, clock: &ClockRealization, site: i64, kidx: usize, block: i64) {
        let s = &clock.streams[kidx];
        let key = rng::key(Domain::Clock, &[clock.seed, site as u64, s.disp as i64 as u64, block as u64]);
        self.block = block;
        self.rng = rng::generator(key);
        self.pos = block as f64 * s.block_len;
        self.has_epoch = false;
        self.done = self.pos > clock.horizon;
    }

    fn step(&mut self, clock: &ClockRealization, site: i64, kidx: usize) {
        let s = &clock.streams[kidx];
        let end = (self.block + 1) as f64 * s.block_len;
        let mut t = self.pos + rng::exp1(&mut self.rng) / s.rate;
        if t <= self.pos {
            t = self.pos.next_up();
        }
        if t >= end {
            self.load(clock, site, kidx, self.block + 1);
        } else if t > clock.horizon {
            self.done = true;
        } else {
            self.pos = t;
            self.has_epoch = true;
        }
    }

    pub fn next_after(&mut self, clock: &ClockRealization, site: i64, kidx: usize, after: EventKey) -> Option<f64> {
        let b = clock.block_of(kidx, after.time);
        if self.block < b {
            self.load(clock, site, kidx, b);
        }
        let beats_tie = (site, clock.streams[kidx].disp) > (after.site, after.disp);
        loop {
            if self.done {
                return None;
            }
            if self.has_epoch && (self.pos > after.time || (self.pos == after.time && beats_tie)) {
                return Some(self.pos);
            }
            self.step(clock, site, kidx);
        }
    }
}
