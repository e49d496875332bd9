//! Finite-range translation-invariant jump rates.

use crate::error::{Error, Result};

/// Jump rates `p(k)` for displacements `k != 0`.
///
/// Only strictly positive rates are stored, sorted by displacement. The
/// sort order matters: it is the displacement order used to break ties
/// between clock epochs.
#[derive(Clone, Debug, PartialEq)]
pub struct JumpKernel {
    rates: Vec<(i32, f64)>,
}

impl JumpKernel {
    /// Builds a kernel from `(displacement, rate)` pairs. Zero rates are
    /// accepted and dropped.
    pub fn new<I: IntoIterator<Item = (i32, f64)>>(pairs: I) -> Result<Self> {
        let mut rates: Vec<(i32, f64)> = Vec::new();
        for (k, r) in pairs {
            if k == 0 {
                return Err(Error::InvalidKernel("displacement 0 is not a jump".into()));
            }
            if !r.is_finite() || r < 0.0 {
                return Err(Error::InvalidKernel(format!("rate p({k}) = {r} is not a finite non-negative number")));
            }
            if rates.iter().any(|&(j, _)| j == k) {
                return Err(Error::InvalidKernel(format!("displacement {k} given twice")));
            }
            rates.push((k, r));
        }
        rates.retain(|&(_, r)| r > 0.0);
        if rates.is_empty() {
            return Err(Error::InvalidKernel("no positive rate".into()));
        }
        rates.sort_by_key(|&(k, _)| k);
        // The symmetrization is irreducible iff the support generates Z.
        let g = rates.iter().fold(0u32, |g, &(k, _)| gcd(g, k.unsigned_abs()));
        if g != 1 {
            return Err(Error::InvalidKernel(format!(
                "symmetrized kernel is not irreducible (support generates {g}Z)"
            )));
        }
        Ok(Self { rates })
    }

    /// Totally asymmetric nearest-neighbour kernel, `p(1) = 1`.
    pub fn tasep() -> Self {
        Self { rates: vec![(1, 1.0)] }
    }

    /// Nearest-neighbour kernel with `p(1) = right`, `p(-1) = left`.
    pub fn nearest_neighbour(right: f64, left: f64) -> Result<Self> {
        Self::new([(-1, left), (1, right)])
    }

    pub fn entries(&self) -> &[(i32, f64)] {
        &self.rates
    }

    pub fn len(&self) -> usize {
        self.rates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rates.is_empty()
    }

    pub fn rate(&self, k: i32) -> f64 {
        self.rates.iter().find(|&&(j, _)| j == k).map_or(0.0, |&(_, r)| r)
    }

    /// Largest `|k|` with `p(k) > 0`.
    pub fn range(&self) -> u32 {
        self.rates.iter().map(|&(k, _)| k.unsigned_abs()).max().unwrap_or(0)
    }

    /// `sum_k k p(k)`.
    pub fn drift(&self) -> f64 {
        self.rates.iter().map(|&(k, r)| k as f64 * r).sum()
    }

    /// `sum_k p(k)`.
    pub fn total_rate(&self) -> f64 {
        self.rates.iter().map(|&(_, r)| r).sum()
    }

    /// `sum_k (p(k) + p(-k))`, the uniform bound on a second-class particle's
    /// total jump rate.
    pub fn two_sided_rate(&self) -> f64 {
        2.0 * self.total_rate()
    }

    /// `pbar(k) = (p(k) + p(-k)) / 2`, as sorted `(k, rate)` pairs.
    pub fn symmetrized(&self) -> Vec<(i32, f64)> {
        let mut out: Vec<(i32, f64)> = Vec::new();
        for &(k, _) in &self.rates {
            for d in [k, -k] {
                if !out.iter().any(|&(j, _)| j == d) {
                    out.push((d, 0.5 * (self.rate(d) + self.rate(-d))));
                }
            }
        }
        out.sort_by_key(|&(k, _)| k);
        out
    }

    pub fn is_tasep(&self) -> bool {
        self.rates == [(1, 1.0)]
    }

    pub fn is_symmetric(&self) -> bool {
        self.rates.iter().all(|&(k, r)| self.rate(-k) == r)
    }

    /// Nearest-neighbour comparison kernel `p'`: `p'(±1) = max(±drift, 0)`
    /// when the drift is non-zero, and `p'(±1) = 1` for mean-zero kernels.
    pub fn derive_pprime(&self) -> JumpKernel {
        let drift = self.drift();
        let (right, left) = if drift == 0.0 { (1.0, 1.0) } else { (drift.max(0.0), (-drift).max(0.0)) };
        let rates = [(-1, left), (1, right)].into_iter().filter(|&(_, r)| r > 0.0).collect();
        JumpKernel { rates }
    }

    /// `k:rate` pairs joined by commas, the format accepted by [`JumpKernel::parse`].
    pub fn to_spec_string(&self) -> String {
        self.rates.iter().map(|(k, r)| format!("{k}:{r}")).collect::<Vec<_>>().join(",")
    }

    /// Parses `"1:0.7,-1:0.3"`.
    pub fn parse(text: &str) -> Result<Self> {
        let mut pairs = Vec::new();
        for item in text.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            let (k, r) = item
                .split_once(':')
                .ok_or_else(|| Error::InvalidKernel(format!("entry `{item}` is not `displacement:rate`")))?;
            let k: i32 = k.trim().parse().map_err(|_| Error::InvalidKernel(format!("bad displacement `{k}`")))?;
            let r: f64 = r.trim().parse().map_err(|_| Error::InvalidKernel(format!("bad rate `{r}`")))?;
            pairs.push((k, r));
        }
        Self::new(pairs)
    }
}

fn gcd(a: u32, b: u32) -> u32 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}
