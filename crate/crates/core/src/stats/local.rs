//! Local functions of finitely many occupation variables and their centered
//! and monotone basis expansions.
//!
//! A pattern is a bit mask over the support: bit `m` is the occupation of
//! `support[m]`. Both expansions come from the monomial expansion
//! `f = sum_S c_S prod_{i in S} eta_i`, whose coefficients are the Moebius
//! inversion of the table over the subset lattice:
//!
//! * monotone: `prod_S eta = M_S + rho^|S|`, so `beta_S = c_S`;
//! * centered: `prod_S eta = sum_{J subset S} rho^{|S|-|J|} C_J`, so
//!   `alpha_J = sum_{S superset J} c_S rho^{|S|-|J|}`.

use std::collections::BTreeMap;
use std::fmt::Debug;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::occupancy::Occupancy;

/// Scalars the algebra runs over: `f64` for simulation, exact rationals for
/// verification.
pub trait Scalar:
    Clone + Debug + PartialOrd + Zero + One + std::ops::Sub<Output = Self> + std::ops::Neg<Output = Self> + std::ops::Mul<Output = Self>
{
}

impl<T> Scalar for T where
    T: Clone + Debug + PartialOrd + Zero + One + std::ops::Sub<Output = T> + std::ops::Neg<Output = T> + std::ops::Mul<Output = T>
{
}

fn pow<T: Scalar>(x: &T, n: u32) -> T {
    (0..n).fold(T::one(), |acc, _| acc * x.clone())
}

#[derive(Clone, Debug, PartialEq)]
pub struct LocalFunction<T> {
    support: Vec<i64>,
    table: Vec<T>,
}

/// Largest support handled; tables have `2^|support|` entries.
pub const MAX_SUPPORT: usize = 20;

impl<T: Scalar> LocalFunction<T> {
    pub fn new(support: Vec<i64>, table: Vec<T>) -> Result<Self> {
        if support.len() > MAX_SUPPORT {
            return Err(Error::InvalidArgument(format!("support of {} sites", support.len())));
        }
        let mut sorted = support.clone();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != support.len() {
            return Err(Error::InvalidArgument("support sites must be distinct".into()));
        }
        if table.len() != 1 << support.len() {
            return Err(Error::InvalidArgument(format!("{} table entries for {} sites", table.len(), support.len())));
        }
        Ok(Self { support, table })
    }

    /// Table from `f(pattern)`.
    pub fn from_fn(support: Vec<i64>, f: impl Fn(u32) -> T) -> Result<Self> {
        let n = support.len().min(MAX_SUPPORT + 1);
        Self::new(support, (0..1u32 << n).map(f).collect())
    }

    pub fn constant(c: T) -> Self {
        Self { support: Vec::new(), table: vec![c] }
    }

    /// `eta_site - rho`.
    pub fn centered_occupation(site: i64, rho: T) -> Self {
        Self { support: vec![site], table: vec![-rho.clone(), T::one() - rho] }
    }

    /// `prod_{i in sites} (eta_i - rho)`.
    pub fn centered_monomial(sites: Vec<i64>, rho: T) -> Result<Self> {
        let k = sites.len() as u32;
        let (up, down) = (T::one() - rho.clone(), -rho);
        Self::from_fn(sites, |p| pow(&up, p.count_ones()) * pow(&down, k - p.count_ones()))
    }

    /// `prod_{i in sites} eta_i - rho^|sites|`.
    pub fn monotone_monomial(sites: Vec<i64>, rho: T) -> Result<Self> {
        let k = sites.len() as u32;
        let full = (1u32 << k) - 1;
        let rk = pow(&rho, k);
        Self::from_fn(sites, |p| if p == full { T::one() - rk.clone() } else { -rk.clone() })
    }

    /// `eta_0 (1 - eta_1)`.
    pub fn current_function() -> Self {
        Self { support: vec![0, 1], table: vec![T::zero(), T::one(), T::zero(), T::zero()] }
    }

    pub fn support(&self) -> &[i64] {
        &self.support
    }

    pub fn table(&self) -> &[T] {
        &self.table
    }

    pub fn patterns(&self) -> std::ops::Range<u32> {
        0..1u32 << self.support.len()
    }

    pub fn eval_pattern(&self, pattern: u32) -> T {
        self.table[pattern as usize].clone()
    }

    pub fn pattern_of(&self, config: &Occupancy) -> Result<u32> {
        let mut p = 0u32;
        for (m, &s) in self.support.iter().enumerate() {
            match config.get(s) {
                Some(b) => p |= (b as u32) << m,
                None => return Err(Error::SupportOutsideWindow(self.support.clone())),
            }
        }
        Ok(p)
    }

    pub fn eval(&self, config: &Occupancy) -> Result<T> {
        Ok(self.eval_pattern(self.pattern_of(config)?))
    }

    /// Exact expectation under Bernoulli(`rho`) product measure.
    pub fn mean(&self, rho: &T) -> T {
        let n = self.support.len() as u32;
        let q = T::one() - rho.clone();
        self.patterns().fold(T::zero(), |acc, p| {
            let w = pow(rho, p.count_ones()) * pow(&q, n - p.count_ones());
            acc + w * self.eval_pattern(p)
        })
    }

    /// Pointwise `self - other` on the same support.
    pub fn sub(&self, other: &Self) -> Result<Self> {
        if self.support != other.support {
            return Err(Error::InvalidArgument("supports differ".into()));
        }
        Ok(Self {
            support: self.support.clone(),
            table: self.table.iter().zip(&other.table).map(|(a, b)| a.clone() - b.clone()).collect(),
        })
    }

    /// Whether `x <= y` coordinatewise implies `f(x) <= f(y)`, checked on
    /// every comparable pair.
    pub fn is_increasing(&self) -> bool {
        self.patterns().all(|y| {
            // all submasks x of y
            let mut x = y;
            loop {
                if self.table[x as usize] > self.table[y as usize] {
                    return false;
                }
                if x == 0 {
                    return true;
                }
                x = (x - 1) & y;
            }
        })
    }

    /// Coefficients `c_S` of the monomial expansion, indexed by mask.
    pub fn monomial_coefficients(&self) -> Vec<T> {
        let n = self.support.len();
        let mut c = self.table.clone();
        for b in 0..n {
            for p in 0..c.len() {
                if p & (1 << b) != 0 {
                    c[p] = c[p].clone() - c[p ^ (1 << b)].clone();
                }
            }
        }
        c
    }

    fn sites_of(&self, mask: u32) -> Vec<i64> {
        (0..self.support.len()).filter(|m| mask & (1 << m) != 0).map(|m| self.support[m]).collect()
    }
}

/// Coefficients in both bases; zero coefficients are omitted.
#[derive(Clone, Debug, PartialEq)]
pub struct BasisDecomposition<T> {
    pub rho: T,
    pub constant: T,
    pub centered: BTreeMap<Vec<i64>, T>,
    pub monotone: BTreeMap<Vec<i64>, T>,
    /// Largest `|I|` with a nonzero coefficient.
    pub k: usize,
    support: Vec<i64>,
}

pub fn decompose<T: Scalar>(f: &LocalFunction<T>, rho: T) -> BasisDecomposition<T> {
    let n = f.support.len();
    let c = f.monomial_coefficients();
    let full = (1usize << n) - 1;
    let mut centered = BTreeMap::new();
    let mut monotone = BTreeMap::new();
    let mut constant = T::zero();
    let mut k = 0;
    for j in 0..=full {
        // alpha_J = sum over S containing J of c_S rho^{|S| - |J|}
        let rest = full & !j;
        let mut alpha = T::zero();
        let mut extra = rest;
        loop {
            let s = j | extra;
            alpha = alpha + c[s].clone() * pow(&rho, extra.count_ones());
            if extra == 0 {
                break;
            }
            extra = (extra - 1) & rest;
        }
        if j == 0 {
            constant = alpha;
            continue;
        }
        if !alpha.is_zero() {
            k = k.max(j.count_ones() as usize);
            centered.insert(f.sites_of(j as u32), alpha);
        }
        if !c[j].is_zero() {
            k = k.max(j.count_ones() as usize);
            monotone.insert(f.sites_of(j as u32), c[j].clone());
        }
    }
    BasisDecomposition { rho, constant, centered, monotone, k, support: f.support.clone() }
}

impl<T: Scalar> BasisDecomposition<T> {
    fn mask(&self, sites: &[i64]) -> u32 {
        sites.iter().map(|s| 1u32 << self.support.iter().position(|x| x == s).unwrap()).fold(0, |a, b| a | b)
    }

    /// `E f + sum alpha_I C_I` at `pattern`.
    pub fn reconstruct_centered(&self, pattern: u32) -> T {
        let one = T::one();
        self.centered.iter().fold(self.constant.clone(), |acc, (sites, a)| {
            let m = self.mask(sites);
            let inside = (pattern & m).count_ones();
            let term = pow(&(one.clone() - self.rho.clone()), inside) * pow(&(-self.rho.clone()), m.count_ones() - inside);
            acc + a.clone() * term
        })
    }

    /// `E f + sum beta_I M_I` at `pattern`.
    pub fn reconstruct_monotone(&self, pattern: u32) -> T {
        self.monotone.iter().fold(self.constant.clone(), |acc, (sites, b)| {
            let m = self.mask(sites);
            let prod = if pattern & m == m { T::one() } else { T::zero() };
            acc + b.clone() * (prod - pow(&self.rho, m.count_ones()))
        })
    }

    fn partial(&self, keep: impl Fn(&T) -> bool, negate: bool) -> LocalFunction<T> {
        let sub = BasisDecomposition {
            constant: T::zero(),
            monotone: self
                .monotone
                .iter()
                .filter(|(_, b)| keep(b))
                .map(|(s, b)| (s.clone(), if negate { -b.clone() } else { b.clone() }))
                .collect(),
            centered: BTreeMap::new(),
            ..self.clone()
        };
        let f = LocalFunction {
            support: self.support.clone(),
            table: (0..1u32 << self.support.len()).map(|p| sub.reconstruct_monotone(p)).collect(),
        };
        // Each M_I is mean-zero already; subtracting the exact mean keeps the
        // split mean-zero whatever the scalar rounding.
        let mean = f.mean(&self.rho);
        LocalFunction { table: f.table.iter().map(|v| v.clone() - mean.clone()).collect(), support: f.support }
    }
}

/// `f_+` from the nonnegative monotone coefficients and `f_-` from the
/// negated negative ones, so that `f = E f + f_+ - f_-` with both parts
/// increasing and mean-zero.
pub fn monotone_split<T: Scalar>(d: &BasisDecomposition<T>) -> (LocalFunction<T>, LocalFunction<T>) {
    let zero = T::zero();
    (d.partial(|b| *b >= zero, false), d.partial(|b| *b < zero, true))
}

/// Both sides of
/// `(eta_0 - rho)(eta_1 - rho) = [rho(1 - rho) - eta_0(1 - eta_1)] + (1 - 2 rho)(eta_0 - rho) + rho[(eta_0 - rho) - (eta_1 - rho)]`
/// at every pattern of `(eta_0, eta_1)`.
pub fn pair_identity<T: Scalar>(rho: &T) -> Vec<(T, T)> {
    let one = T::one();
    let two = one.clone() + one.clone();
    (0..4u32)
        .map(|p| {
            let e0 = if p & 1 != 0 { one.clone() } else { T::zero() };
            let e1 = if p & 2 != 0 { one.clone() } else { T::zero() };
            let c0 = e0.clone() - rho.clone();
            let c1 = e1.clone() - rho.clone();
            let lhs = c0.clone() * c1.clone();
            let rhs = (rho.clone() * (one.clone() - rho.clone()) - e0.clone() * (one.clone() - e1.clone()))
                + (one.clone() - two.clone() * rho.clone()) * c0.clone()
                + rho.clone() * (c0 - c1);
            (lhs, rhs)
        })
        .collect()
}
