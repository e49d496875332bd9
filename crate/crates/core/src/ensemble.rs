//! Independent replicas.
//!
//! Replica `n` of an experiment with master seed `s` uses the seed
//! `replica_seed(s, n)` for everything it samples. Results come back in
//! index order whatever the worker count, so any reduction over them is
//! deterministic.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::rng::replica_seed;

/// Runs `f(index, seed)` for `index in 0..n` on up to `workers` threads
/// (`0` means one per core) and returns results in index order.
pub fn run_replicas<T, F>(n: usize, master: u64, workers: usize, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(usize, u64) -> Result<T> + Sync + Send,
{
    let order: Vec<usize> = (0..n).collect();
    run_replicas_in_order(&order, master, workers, f)
}

/// Like [`run_replicas`], but starts replicas in the given order. Output is
/// still sorted by replica index.
pub fn run_replicas_in_order<T, F>(order: &[usize], master: u64, workers: usize, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(usize, u64) -> Result<T> + Sync + Send,
{
    let mut seen = vec![false; order.len()];
    for &i in order {
        if i >= order.len() || std::mem::replace(&mut seen[i], true) {
            return Err(Error::InvalidArgument("replica order is not a permutation".into()));
        }
    }
    let job = || -> Result<Vec<(usize, T)>> {
        order.par_iter().map(|&i| f(i, replica_seed(master, i as u64)).map(|v| (i, v))).collect()
    };
    let mut out = if workers == 1 {
        order.iter().map(|&i| f(i, replica_seed(master, i as u64)).map(|v| (i, v))).collect::<Result<Vec<_>>>()?
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .build()
            .map_err(|e| Error::InvalidArgument(format!("thread pool: {e}")))?;
        pool.install(job)?
    };
    out.sort_by_key(|&(i, _)| i);
    Ok(out.into_iter().map(|(_, v)| v).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn order_and_workers_do_not_matter() {
        let f = |i: usize, seed: u64| Ok((i, seed));
        let base = run_replicas(50, 7, 1, f).unwrap();
        let mut order: Vec<usize> = (0..50).rev().collect();
        order.swap(3, 40);
        assert_eq!(run_replicas_in_order(&order, 7, 3, f).unwrap(), base);
        assert_eq!(run_replicas(50, 7, 0, f).unwrap(), base);
        assert!(run_replicas_in_order(&[0, 0], 7, 1, f).is_err());
    }

    #[test]
    fn errors_propagate() {
        let r = run_replicas(10, 1, 2, |i, _| if i == 4 { Err(Error::NotTasep) } else { Ok(i) });
        assert_eq!(r, Err(Error::NotTasep));
    }
}
