//! Acceptance suite: one line per criterion, written straight to stderr so
//! it shows up without `--nocapture`.

use std::io::Write;
use std::path::PathBuf;
use std::sync::OnceLock;

use asep_core::lpp::{corner_passage, shape_g, shape_gamma};
use asep_core::rng::generator;
use asep_core::stats::{
    chi_square_integer, decompose, mean_estimate, monotone_split, pair_identity, symmetric_walk_pmf, LocalFunction, Sampler,
};
use asep_core::{ensemble::run_replicas, JumpKernel, MarginPolicy};
use asep_harness::{run, run_experiment, ExperimentConfig, Outcome, ReplicaOrder, RunOptions, Status};
use num_rational::Ratio;
use rand::Rng;

type Q = Ratio<i128>;

fn report(n: u32, name: &str, pass: bool, detail: &str) {
    let line = format!("criterion {n:>2} {:<4} {name}: {detail}\n", if pass { "PASS" } else { "FAIL" });
    std::io::stderr().write_all(line.as_bytes()).unwrap();
}

fn config(text: &str) -> ExperimentConfig {
    ExperimentConfig::parse(text).unwrap_or_else(|e| panic!("{e}"))
}

fn outcome(text: &str) -> Outcome {
    run_experiment(&config(text), RunOptions { workers: 1, order: ReplicaOrder::Natural }).unwrap()
}

/// Reports the named criterion of an outcome; a clean audit is part of the
/// pass.
fn check(n: u32, name: &str, o: &Outcome, criterion: &str) -> bool {
    let c = o.criteria.iter().find(|c| c.name == criterion).unwrap_or_else(|| panic!("no criterion {criterion}"));
    let pass = c.pass && o.audit.violations == 0;
    report(n, name, pass, &format!("{}; audit violations {}", c.detail, o.audit.violations));
    pass
}

fn coupling() -> &'static Outcome {
    static RUN: OnceLock<Outcome> = OnceLock::new();
    RUN.get_or_init(|| outcome("kind = verify-coupling\nrho = 0.25\nt = 50\nreplicas = 100\nseed = 1\nobserve = 50\n"))
}

fn lpp() -> &'static Outcome {
    static RUN: OnceLock<Outcome> = OnceLock::new();
    RUN.get_or_init(|| outcome("kind = verify-lpp\nreplicas = 1000\nseed = 3\ngrid = 30\ncells = 12\n"))
}

#[test]
fn c01_envelope_identity() {
    let o = coupling();
    assert_eq!(o.summary["seeds"], 100);
    assert!(check(1, "envelope identity", o, "envelope identity"));
}

#[test]
fn c02_second_class_representation() {
    let o = coupling();
    assert!(check(2, "second-class representation", o, "second-class representation"));
}

#[test]
fn c03_conjugacy() {
    assert!(check(3, "three-step and up-right tables agree", lpp(), "conjugacy"));
}

#[test]
fn c04_path_enumeration() {
    assert!(check(4, "dynamic programming matches path enumeration", lpp(), "path enumeration"));
}

#[test]
fn c05_velocity() {
    let o = outcome("kind = lln\nrho = 0.25\nt = 2000\nreplicas = 200\nseed = 5\nmargin = cone:1\ntolerance = 0.05\n");
    assert!(check(5, "second-class velocity", &o, "velocity"));
}

#[test]
fn c06_tail_decay() {
    let o = outcome(
        "kind = ldp-tails\nrho = 0.1\nepsilon = 0.3\nt = 200\ntimes = 25,50,100,200\nreplicas = 20000\nseed = 6\nmargin = cone:1\n",
    );
    assert!(check(6, "tail probabilities decay exponentially", &o, "tail decay"));
}

#[test]
fn c07_current_variance() {
    let o = outcome("kind = current\nrho = 0.25\nt = 500\ntimes = 500\nreplicas = 10000\nseed = 7\nmargin = cone:1\ntolerance = 0.15\n");
    assert!(check(7, "current variance", &o, "variance limit"));
}

#[test]
fn c08_relation() {
    let o = outcome(
        "kind = relation\nrho = 0.25\nt = 200\nhorizons = 100,200,400\nreplicas = 4000\nseed = 8\nmargin = cone:1\ntolerance = 0.15\n",
    );
    for c in &o.criteria {
        let line = format!("             {}: {} ({})\n", c.name, if c.pass { "pass" } else { "fail" }, c.detail);
        std::io::stderr().write_all(line.as_bytes()).unwrap();
    }
    assert!(check(8, "occupation-time relation", &o, "relation"));
}

#[test]
fn c09_shape_function() {
    let n = 1000;
    let samples = run_replicas(50, 9, 1, |_, seed| Ok(corner_passage(n, seed) / n as f64)).unwrap();
    let m = mean_estimate(&samples).unwrap();
    let in_band = (3.80..=4.02).contains(&m.value);
    let mut worst = 0.0f64;
    for k in 0..1000 {
        let x = -0.999 + 1.998 * k as f64 / 999.0;
        worst = worst.max((shape_gamma(x, shape_g(x)).unwrap() - 1.0).abs());
    }
    let pass = in_band && worst <= 1e-12;
    let detail = format!("mean T(n,n)/n = {:.4} +- {:.4} at n = {n}; max |gamma(x, g(x)) - 1| = {worst:.2e}", m.value, m.stderr);
    report(9, "shape function", pass, &detail);
    assert!(pass);
}

#[test]
fn c10_basis_algebra() {
    let mut rng = generator(10);
    let densities = [Q::new(1, 2), Q::new(1, 3), Q::new(3, 10), Q::new(7, 10)];
    let (mut functions, mut patterns, mut bad) = (0, 0u64, 0u64);
    for k in 1..=12usize {
        let support: Vec<i64> = (0..k as i64).map(|i| 2 * i - 5).collect();
        let draws = if k <= 9 { 3 } else { 1 };
        for d in 0..draws {
            let rho = densities[(k + d) % densities.len()];
            let table: Vec<Q> = (0..1usize << k).map(|_| Q::new(rng.random_range(-20..=20), 7)).collect();
            let f = LocalFunction::new(support.clone(), table).unwrap();
            let dec = decompose(&f, rho);
            let (plus, minus) = monotone_split(&dec);
            let monotone = plus.is_increasing() && minus.is_increasing();
            let centered = plus.mean(&rho) == Q::from(0) && minus.mean(&rho) == Q::from(0);
            bad += u64::from(!monotone || !centered || dec.constant != f.mean(&rho));
            for p in f.patterns() {
                let v = f.eval_pattern(p);
                let split = dec.constant + plus.eval_pattern(p) - minus.eval_pattern(p);
                bad += u64::from(dec.reconstruct_centered(p) != v || dec.reconstruct_monotone(p) != v || split != v);
                patterns += 1;
            }
            functions += 1;
        }
    }
    let mut identities = 0;
    for num in 1..=9 {
        for (lhs, rhs) in pair_identity(&Q::new(num, 10)) {
            bad += u64::from(lhs != rhs);
            identities += 1;
        }
    }
    let pass = bad == 0;
    let detail = format!(
        "{functions} functions on supports of 1 to 12 sites, {patterns} patterns, {identities} pair identities, {bad} failures"
    );
    report(10, "basis algebra", pass, &detail);
    assert!(pass);
}

#[test]
fn c11_symmetric_walk() {
    let kernel = JumpKernel::parse("1:0.5,-1:0.5").unwrap();
    let sampler = Sampler::new(kernel, 0.5, MarginPolicy::Cone(1.0)).unwrap();
    let t = 50.0;
    let r = run_replicas(10_000, 11, 1, |_, seed| sampler.second_class(&[t], seed, false)).unwrap();
    let xs: Vec<i64> = r.iter().map(|s| s.positions[0]).collect();
    let fit = chi_square_integer(&xs, |n| symmetric_walk_pmf(n, t), 5.0).unwrap();
    let pass = !fit.rejected_at(0.01);
    let detail = format!(
        "chi-square {:.1} on {} degrees of freedom, p = {:.3}, {} replicas",
        fit.statistic,
        fit.degrees_of_freedom.unwrap(),
        fit.p_value,
        xs.len()
    );
    report(11, "symmetric kernel gives a symmetric walk", pass, &detail);
    assert!(pass);
}

fn files(dir: &PathBuf) -> Vec<(String, Vec<u8>)> {
    let mut names: Vec<String> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .filter(|n| n != "manifest.json")
        .collect();
    names.sort();
    names.into_iter().map(|n| (n.clone(), std::fs::read(dir.join(&n)).unwrap())).collect()
}

#[test]
fn c12_reproducibility() {
    let root = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("acceptance-c12");
    let _ = std::fs::remove_dir_all(&root);
    let configs = [
        "kind = lln\nrho = 0.25\nt = 100\ntimes = 50,100\nreplicas = 60\nseed = 12\nmargin = cone:1\n",
        "kind = relation\nrho = 0.25\nt = 40\nreplicas = 60\nseed = 12\nmargin = fixed:5\n",
        "kind = current\nrho = 0.3\nt = 60\nreplicas = 60\nseed = 12\n",
        "kind = verify-lpp\nreplicas = 20\nseed = 12\n",
    ];
    let (mut identical, mut permuted, mut compared) = (true, true, 0);
    for (k, text) in configs.iter().enumerate() {
        let c = config(text);
        let mut outputs = Vec::new();
        for (m, (workers, order)) in
            [(1, ReplicaOrder::Natural), (1, ReplicaOrder::Natural), (2, ReplicaOrder::Reversed), (3, ReplicaOrder::Shuffled(5))]
                .into_iter()
                .enumerate()
        {
            let dir = root.join(format!("{k}-{m}"));
            let manifest = run(&c, RunOptions { workers, order }, &dir).unwrap();
            assert_ne!(manifest.status, Status::Invalid);
            outputs.push(files(&dir));
        }
        compared += outputs[0].len();
        identical &= outputs[0] == outputs[1];
        permuted &= outputs[2..].iter().all(|o| *o == outputs[0]);
    }
    let pass = identical && permuted;
    let detail = format!(
        "{} configurations, {compared} result files; repeated runs identical: {identical}; permuted order and worker counts identical: {permuted}",
        configs.len()
    );
    report(12, "reproducibility", pass, &detail);
    assert!(pass);
}
