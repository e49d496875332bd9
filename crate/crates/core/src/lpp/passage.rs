//! Last-passage tables by dynamic programming, and a path-enumeration
//! oracle for small domains.

use std::io::Write;

use crate::error::{Error, Result};

use super::grid::{sample_row, Lattice, WeightGrid};

/// Passage values over the same domain as the weights they came from.
/// Boundary cells read as zero.
#[derive(Clone, Debug, PartialEq)]
pub struct PassageTable {
    lattice: Lattice,
    cols: usize,
    rows: usize,
    values: Vec<f64>,
}

#[derive(serde::Serialize)]
struct ValueRow {
    i: i64,
    j: i64,
    value: f64,
}

impl PassageTable {
    pub fn lattice(&self) -> Lattice {
        self.lattice
    }

    fn index(&self, a: i64, b: i64) -> Option<usize> {
        let k = match self.lattice {
            Lattice::UpRight => a,
            Lattice::ThreeStep => a + b,
        };
        let inside = match self.lattice {
            Lattice::UpRight => true,
            Lattice::ThreeStep => b >= 1 + 0.max(-a),
        };
        (inside && (1..=self.cols as i64).contains(&k) && (1..=self.rows as i64).contains(&b))
            .then(|| (b as usize - 1) * self.cols + (k as usize - 1))
    }

    fn is_boundary(&self, a: i64, b: i64) -> bool {
        match self.lattice {
            Lattice::UpRight => (a == 0 && b >= 0) || (b == 0 && a >= 0),
            // L_{i,0} = 0 and L_{-i,i} = 0 for i >= 0
            Lattice::ThreeStep => (b == 0 && a >= 0) || (a <= 0 && b == -a),
        }
    }

    /// Value at a domain or boundary cell.
    pub fn get(&self, a: i64, b: i64) -> Option<f64> {
        if self.is_boundary(a, b) {
            return Some(0.0);
        }
        self.index(a, b).map(|n| self.values[n])
    }

    pub fn at(&self, a: i64, b: i64) -> f64 {
        self.get(a, b).unwrap_or_else(|| panic!("cell ({a}, {b}) outside the table"))
    }

    pub fn cells(&self) -> impl Iterator<Item = (i64, i64)> + '_ {
        let lattice = self.lattice;
        (1..=self.rows as i64).flat_map(move |l| {
            (1..=self.cols as i64).map(move |k| match lattice {
                Lattice::UpRight => (k, l),
                Lattice::ThreeStep => (k - l, l),
            })
        })
    }

    /// `i,j,value` rows in row order.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        for (i, j) in self.cells() {
            out.serialize(ValueRow { i, j, value: self.at(i, j) })?;
        }
        out.flush()?;
        Ok(())
    }
}

fn check_cover(weights: &WeightGrid, lattice: Lattice, a: i64, b: i64) -> Result<()> {
    if weights.lattice() != lattice {
        return Err(Error::InvalidArgument(format!("expected a {lattice:?} grid, got {:?}", weights.lattice())));
    }
    let (ca, cb) = weights.corner();
    let covered = match lattice {
        Lattice::UpRight => a <= ca && b <= cb,
        Lattice::ThreeStep => b <= cb && a + b <= ca + cb,
    };
    if !covered || !weights.contains(a, b) {
        return Err(Error::DomainIncomplete(format!("weights end at {:?}, table requested up to ({a}, {b})", (ca, cb))));
    }
    Ok(())
}

fn three_step(weights: &WeightGrid, imax: i64, jmax: i64, vertical: bool) -> Result<PassageTable> {
    check_cover(weights, Lattice::ThreeStep, imax, jmax)?;
    let mut table =
        PassageTable { lattice: Lattice::ThreeStep, cols: (imax + jmax) as usize, rows: jmax as usize, values: Vec::new() };
    table.values = vec![0.0; table.cols * table.rows];
    for j in 1..=jmax {
        for i in (1 - j)..=(imax + jmax - j) {
            let left = table.at(i - 1, j);
            let down = if vertical { table.at(i, j - 1) } else { 0.0 };
            let diag = table.at(i + 1, j - 1);
            let n = table.index(i, j).unwrap();
            table.values[n] = left.max(down).max(diag) + weights.get(i, j).unwrap();
        }
    }
    Ok(table)
}

/// `L_{i,j} = max(L_{i-1,j}, L_{i,j-1}, L_{i+1,j-1}) + Y_{i,j}` with
/// `L_{i,0} = L_{-i,i} = 0`, up to corner `(imax, jmax)`.
pub fn lpp_three_step(weights: &WeightGrid, imax: i64, jmax: i64) -> Result<PassageTable> {
    three_step(weights, imax, jmax, true)
}

/// The same recursion without the `(0, 1)` step.
pub fn lpp_three_step_without_vertical(weights: &WeightGrid, imax: i64, jmax: i64) -> Result<PassageTable> {
    three_step(weights, imax, jmax, false)
}

/// `T_{k,l} = max(T_{k-1,l}, T_{k,l-1}) + W_{k,l}` with zero boundary.
pub fn lpp_upright(weights: &WeightGrid, kmax: i64, lmax: i64) -> Result<PassageTable> {
    check_cover(weights, Lattice::UpRight, kmax, lmax)?;
    let (cols, rows) = (kmax as usize, lmax as usize);
    let mut values = vec![0.0; cols * rows];
    for l in 0..rows {
        for k in 0..cols {
            let left: f64 = if k > 0 { values[l * cols + k - 1] } else { 0.0 };
            let down = if l > 0 { values[(l - 1) * cols + k] } else { 0.0 };
            values[l * cols + k] = left.max(down) + weights.get(k as i64 + 1, l as i64 + 1).unwrap();
        }
    }
    Ok(PassageTable { lattice: Lattice::UpRight, cols, rows, values })
}

/// `T_{n,n}` for a sampled up-right grid, keeping one row in memory. Equals
/// `lpp_upright(&WeightGrid::sample(UpRight, n, n, seed), n, n)` at `(n, n)`.
pub fn corner_passage(n: usize, seed: u64) -> f64 {
    let mut row = vec![0.0; n];
    let mut w = vec![0.0; n];
    for r in 0..n {
        sample_row(seed, r, &mut w);
        let mut left = 0.0f64;
        for k in 0..n {
            left = left.max(row[k]) + w[k];
            row[k] = left;
        }
    }
    row.last().copied().unwrap_or(0.0)
}

/// Maximum weight over every admissible path from the origin cell to
/// `(a, b)`, by explicit enumeration. Exponential cost; for small domains.
pub fn brute_force(weights: &WeightGrid, a: i64, b: i64) -> Result<f64> {
    if !weights.contains(a, b) {
        return Err(Error::OutOfDomain(a, b));
    }
    let (start, steps): ((i64, i64), &[(i64, i64)]) = match weights.lattice() {
        Lattice::ThreeStep => ((0, 1), &[(-1, 1), (0, 1), (1, 0)]),
        Lattice::UpRight => ((1, 1), &[(0, 1), (1, 0)]),
    };
    let mut best = f64::NEG_INFINITY;
    let mut path = vec![start];
    enumerate(weights, steps, (a, b), &mut path, &mut best);
    Ok(best)
}

fn enumerate(weights: &WeightGrid, steps: &[(i64, i64)], target: (i64, i64), path: &mut Vec<(i64, i64)>, best: &mut f64) {
    let here = *path.last().unwrap();
    if here == target {
        let total: f64 = path.iter().map(|&(a, b)| weights.get(a, b).unwrap()).sum();
        *best = best.max(total);
        return;
    }
    for &(da, db) in steps {
        let next = (here.0 + da, here.1 + db);
        // Every step raises the row or the column, so paths are finite; the
        // target must stay reachable from `next`.
        if weights.contains(next.0, next.1) && next.1 <= target.1 && next.0 + next.1 <= target.0 + target.1 {
            let ok = match weights.lattice() {
                Lattice::UpRight => next.0 <= target.0,
                Lattice::ThreeStep => true,
            };
            if ok {
                path.push(next);
                enumerate(weights, steps, target, path, best);
                path.pop();
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lpp::grid::{psi, psi_inverse};

    #[test]
    fn single_cells_and_zero_weights() {
        let g = WeightGrid::sample(Lattice::ThreeStep, 3, 3, 1).unwrap();
        let l = lpp_three_step(&g, 3, 3).unwrap();
        assert_eq!(l.at(0, 1), g.get(0, 1).unwrap());
        assert_eq!(l.at(4, 0), 0.0);
        assert_eq!(l.at(-2, 2), 0.0);
        let z = lpp_three_step(&WeightGrid::zeros(Lattice::ThreeStep, 3, 3).unwrap(), 3, 3).unwrap();
        assert!(z.cells().all(|(i, j)| z.at(i, j) == 0.0));

        let w = WeightGrid::sample(Lattice::UpRight, 5, 4, 2).unwrap();
        let t = lpp_upright(&w, 5, 4).unwrap();
        assert_eq!(t.at(1, 1), w.get(1, 1).unwrap());
        let mut row = 0.0;
        for k in 1..=5 {
            row += w.get(k, 1).unwrap();
            assert!((t.at(k, 1) - row).abs() <= 1e-12 * row);
        }
    }

    #[test]
    fn hand_grid() {
        // Up-right 2 x 2: the best path takes the larger off-diagonal cell.
        let w = WeightGrid::from_fn(Lattice::UpRight, 2, 2, |k, l| [[1.0, 5.0], [2.0, 1.0]][l as usize - 1][k as usize - 1])
            .unwrap();
        assert_eq!(lpp_upright(&w, 2, 2).unwrap().at(2, 2), 7.0);
        assert_eq!(brute_force(&w, 2, 2).unwrap(), 7.0);
    }

    #[test]
    fn tables_are_monotone_along_steps() {
        let g = WeightGrid::sample(Lattice::ThreeStep, 6, 5, 9).unwrap();
        let l = lpp_three_step(&g, 6, 5).unwrap();
        for (i, j) in l.cells() {
            for (pi, pj) in [(i - 1, j), (i, j - 1), (i + 1, j - 1)] {
                if let Some(p) = l.get(pi, pj) {
                    assert!(l.at(i, j) >= p);
                }
            }
        }
    }

    #[test]
    fn vertical_step_is_never_needed_and_psi_conjugates() {
        for seed in 0..50 {
            let y = WeightGrid::sample(Lattice::ThreeStep, 7, 6, seed).unwrap();
            let l = lpp_three_step(&y, 7, 6).unwrap();
            assert_eq!(l, lpp_three_step_without_vertical(&y, 7, 6).unwrap());
            let (k, m) = psi(7, 6).unwrap();
            let w = WeightGrid::from_fn(Lattice::UpRight, k, m, |k, l| {
                let (i, j) = psi_inverse(k, l).unwrap();
                y.get(i, j).unwrap()
            })
            .unwrap();
            let t = lpp_upright(&w, k, m).unwrap();
            assert!(l.cells().all(|(i, j)| {
                let (k, l2) = psi(i, j).unwrap();
                l.at(i, j) == t.at(k, l2)
            }));
        }
    }

    #[test]
    fn corner_matches_the_full_table() {
        let g = WeightGrid::sample(Lattice::UpRight, 40, 40, 77).unwrap();
        assert_eq!(corner_passage(40, 77), lpp_upright(&g, 40, 40).unwrap().at(40, 40));
    }

    #[test]
    fn small_domains_match_enumeration() {
        for seed in 0..20 {
            let y = WeightGrid::sample(Lattice::ThreeStep, 1, 3, seed).unwrap();
            let l = lpp_three_step(&y, 1, 3).unwrap();
            for (i, j) in l.cells() {
                assert_eq!(l.at(i, j), brute_force(&y, i, j).unwrap());
            }
        }
    }

    #[test]
    fn incomplete_domains_are_errors() {
        let g = WeightGrid::sample(Lattice::UpRight, 3, 3, 1).unwrap();
        assert!(matches!(lpp_upright(&g, 4, 3), Err(Error::DomainIncomplete(_))));
        let y = WeightGrid::sample(Lattice::ThreeStep, 2, 2, 1).unwrap();
        assert!(matches!(lpp_three_step(&y, 2, 3), Err(Error::DomainIncomplete(_))));
        assert!(lpp_three_step(&g, 1, 1).is_err());
    }

    #[test]
    fn value_csv_header() {
        let y = WeightGrid::sample(Lattice::ThreeStep, 0, 1, 1).unwrap();
        let mut buf = Vec::new();
        lpp_three_step(&y, 0, 1).unwrap().write_csv(&mut buf).unwrap();
        assert!(String::from_utf8(buf).unwrap().starts_with("i,j,value\n0,1,"));
    }
}
