//! Experiment configuration files.
//!
//! One `key = value` pair per line, `#` starts a comment. Every problem in a
//! file is reported, not just the first one.

use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use asep_core::stats::LocalFunction;
use asep_core::{JumpKernel, MarginPolicy};

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Kind {
    VerifyCoupling,
    VerifyLpp,
    Lln,
    LdpTails,
    Relation,
    Current,
    VarianceCurve,
    Clt,
}

impl Kind {
    pub const ALL: [Kind; 8] = [
        Kind::VerifyCoupling,
        Kind::VerifyLpp,
        Kind::Lln,
        Kind::LdpTails,
        Kind::Relation,
        Kind::Current,
        Kind::VarianceCurve,
        Kind::Clt,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Kind::VerifyCoupling => "verify-coupling",
            Kind::VerifyLpp => "verify-lpp",
            Kind::Lln => "lln",
            Kind::LdpTails => "ldp-tails",
            Kind::Relation => "relation",
            Kind::Current => "current",
            Kind::VarianceCurve => "variance-curve",
            Kind::Clt => "clt",
        }
    }

    /// Kinds that check exact identities rather than estimate something.
    pub fn is_verification(self) -> bool {
        matches!(self, Kind::VerifyCoupling | Kind::VerifyLpp)
    }

    /// Keys the kind reads, besides the ones every kind reads.
    fn keys(self) -> &'static [&'static str] {
        match self {
            Kind::VerifyCoupling => &["kernel", "rho", "t", "times", "margin", "observe"],
            Kind::VerifyLpp => &["grid", "cells"],
            Kind::Lln => &["kernel", "rho", "t", "times", "margin", "tolerance"],
            Kind::LdpTails => &["kernel", "rho", "t", "times", "margin", "epsilon", "min_events"],
            Kind::Relation => &["kernel", "rho", "t", "horizons", "margin", "tolerance", "stabilization"],
            Kind::Current => &["kernel", "rho", "t", "times", "margin", "tolerance"],
            Kind::VarianceCurve => &["kernel", "rho", "t", "times", "margin", "function", "threshold", "expect"],
            Kind::Clt => &["kernel", "rho", "t", "margin", "function", "sigma2", "level"],
        }
    }
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Kind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Kind::ALL.into_iter().find(|k| k.name() == s).ok_or_else(|| {
            let names: Vec<_> = Kind::ALL.iter().map(|k| k.name()).collect();
            format!("unknown kind `{s}`, expected one of {}", names.join(", "))
        })
    }
}

/// Local function whose additive functional an experiment integrates.
#[derive(Clone, Debug, PartialEq)]
pub enum FunctionSpec {
    /// `eta_0 - rho`.
    Occupation,
    /// `prod (eta_i - rho)` over the listed sites.
    Centered(Vec<i64>),
    /// `prod eta_i - rho^|I|` over the listed sites.
    Monotone(Vec<i64>),
}

impl FunctionSpec {
    pub fn build(&self, rho: f64) -> asep_core::Result<LocalFunction<f64>> {
        match self {
            FunctionSpec::Occupation => Ok(LocalFunction::centered_occupation(0, rho)),
            FunctionSpec::Centered(s) => LocalFunction::centered_monomial(s.clone(), rho),
            FunctionSpec::Monotone(s) => LocalFunction::monotone_monomial(s.clone(), rho),
        }
    }
}

impl fmt::Display for FunctionSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let list = |s: &[i64]| s.iter().map(i64::to_string).collect::<Vec<_>>().join(",");
        match self {
            FunctionSpec::Occupation => f.write_str("occupation"),
            FunctionSpec::Centered(s) => write!(f, "centered:{}", list(s)),
            FunctionSpec::Monotone(s) => write!(f, "monotone:{}", list(s)),
        }
    }
}

impl FromStr for FunctionSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        if s == "occupation" {
            return Ok(FunctionSpec::Occupation);
        }
        let bad = || format!("`{s}` is not occupation, centered:<sites> or monotone:<sites>");
        let (name, sites) = s.split_once(':').ok_or_else(bad)?;
        let sites: Vec<i64> = parse_list(sites).map_err(|_| bad())?;
        if sites.is_empty() || sites.len() > asep_core::stats::MAX_SUPPORT {
            return Err(format!("support of {} sites", sites.len()));
        }
        let mut sorted = sites.clone();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != sites.len() {
            return Err("repeated site in support".into());
        }
        match name {
            "centered" => Ok(FunctionSpec::Centered(sites)),
            "monotone" => Ok(FunctionSpec::Monotone(sites)),
            _ => Err(bad()),
        }
    }
}

/// Expected long-time behaviour of `sigma^2_t / t`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Expectation {
    Bounded,
    Growing,
    None,
}

impl FromStr for Expectation {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "bounded" => Ok(Expectation::Bounded),
            "growing" => Ok(Expectation::Growing),
            "none" => Ok(Expectation::None),
            _ => Err(format!("`{s}` is not bounded, growing or none")),
        }
    }
}

impl fmt::Display for Expectation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Expectation::Bounded => "bounded",
            Expectation::Growing => "growing",
            Expectation::None => "none",
        })
    }
}

/// One problem found in a configuration file.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConfigIssue {
    pub line: Option<usize>,
    pub key: String,
    pub message: String,
}

impl fmt::Display for ConfigIssue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.line {
            Some(n) => write!(f, "line {n}: {}: {}", self.key, self.message),
            None => write!(f, "{}: {}", self.key, self.message),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConfigErrors(pub Vec<ConfigIssue>);

impl fmt::Display for ConfigErrors {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (n, issue) in self.0.iter().enumerate() {
            if n > 0 {
                writeln!(f)?;
            }
            write!(f, "{issue}")?;
        }
        Ok(())
    }
}

impl std::error::Error for ConfigErrors {}

const COMMON: [&str; 5] = ["kind", "replicas", "seed", "workers", "output"];

const KNOWN: [&str; 23] = [
    "kind",
    "kernel",
    "rho",
    "margin",
    "t",
    "replicas",
    "seed",
    "times",
    "horizons",
    "epsilon",
    "min_events",
    "observe",
    "grid",
    "cells",
    "function",
    "tolerance",
    "stabilization",
    "threshold",
    "expect",
    "sigma2",
    "level",
    "workers",
    "output",
];

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub kind: Kind,
    pub kernel: JumpKernel,
    pub rho: f64,
    pub margin: MarginPolicy,
    /// Horizon.
    pub t: f64,
    pub replicas: usize,
    pub seed: u64,
    /// Sampling times in `(0, t]`, increasing, ending at `t`.
    pub times: Vec<f64>,
    /// Horizons of the occupation integral; one of them is `t`.
    pub horizons: Vec<f64>,
    pub epsilon: f64,
    pub min_events: u64,
    /// Half-width of the window where pathwise identities are compared.
    pub observe: i64,
    /// Largest up-right grid side for the conjugacy check.
    pub grid: usize,
    /// Largest domain, in cells, for the path-enumeration check.
    pub cells: usize,
    pub function: FunctionSpec,
    /// Absolute for `lln`, relative otherwise.
    pub tolerance: f64,
    /// Relative size of the last occupation increment that counts as
    /// stabilized.
    pub stabilization: f64,
    /// Log-log slope separating bounded from growing curves.
    pub threshold: f64,
    pub expect: Expectation,
    pub sigma2: Option<f64>,
    /// Significance level of goodness-of-fit tests.
    pub level: f64,
    /// `0` uses every core.
    pub workers: usize,
    pub output: PathBuf,
    /// The file as given.
    pub source: String,
}

struct Entry {
    line: usize,
    value: String,
}

struct Reader {
    entries: BTreeMap<String, Entry>,
    issues: Vec<ConfigIssue>,
}

impl Reader {
    fn lex(text: &str) -> Self {
        let mut r = Reader { entries: BTreeMap::new(), issues: Vec::new() };
        for (n, raw) in text.lines().enumerate() {
            let line = n + 1;
            let body = raw.split_once('#').map_or(raw, |(b, _)| b).trim();
            if body.is_empty() {
                continue;
            }
            let Some((key, value)) = body.split_once('=') else {
                r.issues.push(ConfigIssue { line: Some(line), key: body.to_string(), message: "expected `key = value`".into() });
                continue;
            };
            let (key, value) = (key.trim().to_string(), value.trim().to_string());
            if !KNOWN.contains(&key.as_str()) {
                r.issues.push(ConfigIssue { line: Some(line), key, message: "unknown key".into() });
            } else if let Some(prev) = r.entries.get(&key) {
                let message = format!("repeated, first given on line {}", prev.line);
                r.issues.push(ConfigIssue { line: Some(line), key, message });
            } else {
                r.entries.insert(key, Entry { line, value });
            }
        }
        r
    }

    fn issue(&mut self, key: &str, message: impl Into<String>) {
        let line = self.entries.get(key).map(|e| e.line);
        self.issues.push(ConfigIssue { line, key: key.to_string(), message: message.into() });
    }

    /// Parses `key`, or returns `default` when it is absent. `None` after an
    /// issue has been recorded.
    fn get<T>(&mut self, key: &str, default: Option<T>, parse: impl FnOnce(&str) -> Result<T, String>) -> Option<T> {
        match self.entries.get(key) {
            Some(e) => {
                let v = e.value.clone();
                match parse(&v) {
                    Ok(x) => Some(x),
                    Err(m) => {
                        self.issue(key, m);
                        None
                    }
                }
            }
            None => {
                if default.is_none() {
                    self.issue(key, "required");
                }
                default
            }
        }
    }

    fn has(&self, key: &str) -> bool {
        self.entries.contains_key(key)
    }
}

fn number<T: FromStr>(s: &str) -> Result<T, String> {
    s.parse().map_err(|_| format!("`{s}` is not a valid number"))
}

fn parse_list<T: FromStr>(s: &str) -> Result<Vec<T>, String> {
    s.split(',').map(str::trim).filter(|x| !x.is_empty()).map(number).collect()
}

fn finite(s: &str) -> Result<f64, String> {
    let x: f64 = number(s)?;
    if x.is_finite() {
        Ok(x)
    } else {
        Err(format!("`{s}` is not finite"))
    }
}

/// `n` evenly spaced times ending at `t`.
fn spaced(t: f64, n: usize) -> Vec<f64> {
    (1..=n).map(|k| t * k as f64 / n as f64).collect()
}

/// `t / 2^(n-1), ..., t / 2, t`.
fn doubling(t: f64, n: u32) -> Vec<f64> {
    (0..n).rev().map(|k| t / f64::from(1u32 << k)).collect()
}

fn default_times(kind: Kind, t: f64) -> Vec<f64> {
    match kind {
        Kind::VerifyCoupling => spaced(t, 10),
        Kind::LdpTails | Kind::VarianceCurve => doubling(t, 4),
        Kind::Current => doubling(t, 3),
        _ => vec![t],
    }
}

fn default_expectation(kernel: &JumpKernel, rho: f64) -> Expectation {
    if kernel.drift() == 0.0 {
        Expectation::Growing
    } else if rho != 0.5 && rho > 0.0 && rho < 1.0 {
        Expectation::Bounded
    } else {
        Expectation::None
    }
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self, ConfigErrors> {
        let mut r = Reader::lex(text);
        let kind = r.get("kind", None, Kind::from_str);
        let kernel = r.get("kernel", Some(JumpKernel::tasep()), |s| JumpKernel::parse(s).map_err(|e| e.to_string()));
        let lpp = kind == Some(Kind::VerifyLpp);
        let rho = r.get("rho", lpp.then_some(0.5), |s| {
            let x = finite(s)?;
            if (0.0..=1.0).contains(&x) {
                Ok(x)
            } else {
                Err(format!("{x} is outside [0, 1]"))
            }
        });
        let margin = r.get("margin", Some(MarginPolicy::Default), |s| MarginPolicy::parse(s).map_err(|e| e.to_string()));
        let t = r.get("t", lpp.then_some(1.0), |s| {
            let x = finite(s)?;
            if x > 0.0 {
                Ok(x)
            } else {
                Err(format!("{x} is not positive"))
            }
        });
        let replicas = r.get("replicas", None, |s| {
            let n: usize = number(s)?;
            if n >= 1 {
                Ok(n)
            } else {
                Err("at least one replica is needed".into())
            }
        });
        let seed = r.get("seed", Some(0), number::<u64>);
        let times = r.get("times", Some(Vec::new()), parse_list::<f64>);
        let horizons = r.get("horizons", Some(Vec::new()), parse_list::<f64>);
        let positive = |s: &str| {
            let x = finite(s)?;
            if x > 0.0 {
                Ok(x)
            } else {
                Err(format!("{x} is not positive"))
            }
        };
        let epsilon = r.get("epsilon", Some(0.3), positive);
        let min_events = r.get("min_events", Some(10), number::<u64>);
        let observe = r.get("observe", Some(50), |s| {
            let n: i64 = number(s)?;
            if n >= 0 {
                Ok(n)
            } else {
                Err("negative half-width".into())
            }
        });
        let grid = r.get("grid", Some(30), |s| {
            let n: usize = number(s)?;
            if n >= 2 {
                Ok(n)
            } else {
                Err("grid side must be at least 2".into())
            }
        });
        let cells = r.get("cells", Some(12), |s| {
            let n: usize = number(s)?;
            if (1..=20).contains(&n) {
                Ok(n)
            } else {
                Err("path enumeration is limited to domains of 1 to 20 cells".into())
            }
        });
        let function = r.get("function", Some(FunctionSpec::Occupation), FunctionSpec::from_str);
        let tolerance = r.get("tolerance", Some(None), |s| positive(s).map(Some));
        let stabilization = r.get("stabilization", Some(0.05), positive);
        let threshold = r.get("threshold", Some(0.25), finite);
        let expect = r.get("expect", Some(None), |s| Expectation::from_str(s).map(Some));
        let sigma2 = r.get("sigma2", Some(None), |s| positive(s).map(Some));
        let level = r.get("level", Some(0.01), |s| {
            let x = finite(s)?;
            if x > 0.0 && x < 1.0 {
                Ok(x)
            } else {
                Err(format!("{x} is outside (0, 1)"))
            }
        });
        let workers = r.get("workers", Some(1), number::<usize>);
        let output = r.get("output", Some(PathBuf::from("results")), |s| Ok(PathBuf::from(s)));

        // Semantic checks that need several fields.
        if let Some(kind) = kind {
            for key in r.entries.keys().cloned().collect::<Vec<_>>() {
                if !COMMON.contains(&key.as_str()) && !kind.keys().contains(&key.as_str()) {
                    r.issue(&key, format!("not used by kind {kind}"));
                }
            }
            if let Some(k) = &kernel {
                if matches!(kind, Kind::VerifyCoupling | Kind::Current) && !k.is_tasep() && r.has("kernel") {
                    r.issue("kernel", format!("kind {kind} needs the totally asymmetric kernel 1:1"));
                }
            }
            if let Some(rho) = rho {
                let open = matches!(kind, Kind::Lln | Kind::LdpTails | Kind::Relation | Kind::Current);
                if open && !(rho > 0.0 && rho < 1.0) {
                    r.issue("rho", format!("{rho} is outside (0, 1), needed by kind {kind}"));
                }
            }
            if let Some(n) = replicas {
                let need = if kind.is_verification() { 1 } else { 4 };
                if n < need {
                    r.issue("replicas", format!("kind {kind} needs at least {need}"));
                }
            }
        }
        let mut times = times.unwrap_or_default();
        let mut horizons = horizons.unwrap_or_default();
        if let (Some(kind), Some(t)) = (kind, t) {
            if times.is_empty() {
                times = default_times(kind, t);
            } else if times.iter().any(|&s| !(s > 0.0 && s <= t)) || times.windows(2).any(|w| w[1] <= w[0]) {
                r.issue("times", format!("sampling times must increase within (0, {t}]"));
            } else if times.last() != Some(&t) {
                r.issue("times", format!("the last sampling time must be the horizon t = {t}"));
            }
            if kind == Kind::VarianceCurve && times.len() < 2 {
                r.issue("times", "a trend needs at least two sampling times");
            }
            if kind == Kind::Relation {
                if horizons.is_empty() {
                    horizons = vec![t / 2.0, t, 2.0 * t];
                } else if horizons.iter().any(|&s| !(s > 0.0 && s.is_finite())) || horizons.windows(2).any(|w| w[1] <= w[0]) {
                    r.issue("horizons", "horizons must be positive and increasing");
                } else if !horizons.contains(&t) {
                    r.issue("horizons", format!("one horizon must equal t = {t}"));
                }
            }
        }
        if !r.issues.is_empty() {
            r.issues.sort_by_key(|i| (i.line.unwrap_or(usize::MAX), i.key.clone()));
            return Err(ConfigErrors(r.issues));
        }
        let (kind, kernel, rho) = (kind.unwrap(), kernel.unwrap(), rho.unwrap());
        let expect = expect.unwrap().unwrap_or_else(|| default_expectation(&kernel, rho));
        let tolerance = tolerance.unwrap().unwrap_or(if kind == Kind::Lln { 0.05 } else { 0.15 });
        Ok(ExperimentConfig {
            kind,
            kernel,
            rho,
            margin: margin.unwrap(),
            t: t.unwrap(),
            replicas: replicas.unwrap(),
            seed: seed.unwrap(),
            times,
            horizons,
            epsilon: epsilon.unwrap(),
            min_events: min_events.unwrap(),
            observe: observe.unwrap(),
            grid: grid.unwrap(),
            cells: cells.unwrap(),
            function: function.unwrap(),
            tolerance,
            stabilization: stabilization.unwrap(),
            threshold: threshold.unwrap(),
            expect,
            sigma2: sigma2.unwrap(),
            level: level.unwrap(),
            workers: workers.unwrap(),
            output: output.unwrap(),
            source: text.to_string(),
        })
    }

    /// The `output` entry of a file that may not validate.
    pub fn output_hint(text: &str) -> Option<PathBuf> {
        text.lines().find_map(|raw| {
            let body = raw.split_once('#').map_or(raw, |(b, _)| b);
            let (k, v) = body.split_once('=')?;
            (k.trim() == "output" && !v.trim().is_empty()).then(|| PathBuf::from(v.trim()))
        })
    }

    /// Every key the kind reads, with defaults filled in, in file order.
    pub fn normalized(&self) -> Vec<(String, String)> {
        let list = |xs: &[f64]| xs.iter().map(f64::to_string).collect::<Vec<_>>().join(",");
        let value = |key: &str| -> String {
            match key {
                "kind" => self.kind.to_string(),
                "kernel" => self.kernel.to_spec_string(),
                "rho" => self.rho.to_string(),
                "margin" => self.margin.to_string(),
                "t" => self.t.to_string(),
                "replicas" => self.replicas.to_string(),
                "seed" => self.seed.to_string(),
                "times" => list(&self.times),
                "horizons" => list(&self.horizons),
                "epsilon" => self.epsilon.to_string(),
                "min_events" => self.min_events.to_string(),
                "observe" => self.observe.to_string(),
                "grid" => self.grid.to_string(),
                "cells" => self.cells.to_string(),
                "function" => self.function.to_string(),
                "tolerance" => self.tolerance.to_string(),
                "stabilization" => self.stabilization.to_string(),
                "threshold" => self.threshold.to_string(),
                "expect" => self.expect.to_string(),
                "sigma2" => self.sigma2.map_or("sample".into(), |s| s.to_string()),
                "level" => self.level.to_string(),
                "workers" => self.workers.to_string(),
                "output" => self.output.display().to_string(),
                _ => unreachable!("unknown key {key}"),
            }
        };
        KNOWN
            .iter()
            .filter(|k| COMMON.contains(k) || self.kind.keys().contains(k))
            .map(|k| (k.to_string(), value(k)))
            .collect()
    }

    /// The normalized configuration as a configuration file.
    pub fn to_text(&self) -> String {
        self.normalized().into_iter().map(|(k, v)| format!("{k} = {v}\n")).collect()
    }
}
