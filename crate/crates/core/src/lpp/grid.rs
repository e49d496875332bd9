//! Weight grids on the three-step and up-right lattices.
//!
//! The three-step lattice is `{(i, j) : j >= 1 + max(0, -i)}` and the
//! up-right lattice is the positive quadrant; `psi(i, j) = (i + j, j)` maps
//! one onto the other. A finite three-step domain with corner `(imax, jmax)`
//! is the set of cells the recursion needs to reach that corner:
//! `1 <= j <= jmax` and `1 <= i + j <= imax + jmax`.

use std::io::{Read, Write};

use crate::error::{Error, Result};
use crate::rng::{exp1, generator, key, Domain};

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
pub enum Lattice {
    ThreeStep,
    UpRight,
}

pub fn psi(i: i64, j: i64) -> Result<(i64, i64)> {
    if j >= 1 + 0.max(-i) {
        Ok((i + j, j))
    } else {
        Err(Error::OutOfDomain(i, j))
    }
}

pub fn psi_inverse(k: i64, l: i64) -> Result<(i64, i64)> {
    if k >= 1 && l >= 1 {
        Ok((k - l, l))
    } else {
        Err(Error::OutOfDomain(k, l))
    }
}

/// Rectangular extent `[1, cols] x [1, rows]` in up-right coordinates; for
/// the three-step lattice row `j` holds `i` from `1 - j` upwards.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightGrid {
    lattice: Lattice,
    cols: usize,
    rows: usize,
    weights: Vec<f64>,
    seed: Option<u64>,
}

#[derive(serde::Serialize, serde::Deserialize)]
struct WeightRow {
    i: i64,
    j: i64,
    weight: f64,
}

/// Draws the exponential weights of row `row` of a sampled grid.
pub(crate) fn sample_row(seed: u64, row: usize, out: &mut [f64]) {
    let mut rng = generator(key(Domain::Weights, &[seed, row as u64]));
    for w in out {
        *w = exp1(&mut rng);
    }
}

impl WeightGrid {
    fn dims(lattice: Lattice, a: i64, b: i64) -> Result<(usize, usize)> {
        let (cols, rows) = match lattice {
            Lattice::UpRight => (a, b),
            Lattice::ThreeStep => (a + b, b),
        };
        if cols < 1 || rows < 1 {
            return Err(Error::OutOfDomain(a, b));
        }
        Ok((cols as usize, rows as usize))
    }

    /// Zero weights up to corner `(a, b)`: `(kmax, lmax)` or `(imax, jmax)`.
    pub fn zeros(lattice: Lattice, a: i64, b: i64) -> Result<Self> {
        let (cols, rows) = Self::dims(lattice, a, b)?;
        Ok(Self { lattice, cols, rows, weights: vec![0.0; cols * rows], seed: None })
    }

    /// I.i.d. mean-one exponential weights; row `r` is drawn from its own
    /// keyed stream, so a grid and any sub-grid share their weights.
    pub fn sample(lattice: Lattice, a: i64, b: i64, seed: u64) -> Result<Self> {
        let mut g = Self::zeros(lattice, a, b)?;
        for r in 0..g.rows {
            sample_row(seed, r, &mut g.weights[r * g.cols..(r + 1) * g.cols]);
        }
        g.seed = Some(seed);
        Ok(g)
    }

    /// Fills every cell of the domain from `f(cell)` in the lattice's own
    /// coordinates.
    pub fn from_fn(lattice: Lattice, a: i64, b: i64, mut f: impl FnMut(i64, i64) -> f64) -> Result<Self> {
        let mut g = Self::zeros(lattice, a, b)?;
        for cell in g.cells().collect::<Vec<_>>() {
            let w = f(cell.0, cell.1);
            g.set(cell.0, cell.1, w)?;
        }
        Ok(g)
    }

    pub fn lattice(&self) -> Lattice {
        self.lattice
    }

    pub fn seed(&self) -> Option<u64> {
        self.seed
    }

    /// Corner `(kmax, lmax)` or `(imax, jmax)`.
    pub fn corner(&self) -> (i64, i64) {
        match self.lattice {
            Lattice::UpRight => (self.cols as i64, self.rows as i64),
            Lattice::ThreeStep => (self.cols as i64 - self.rows as i64, self.rows as i64),
        }
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    /// Storage index of a cell given in the lattice's own coordinates.
    fn index(&self, a: i64, b: i64) -> Option<usize> {
        let (k, l) = match self.lattice {
            Lattice::UpRight => (a, b),
            Lattice::ThreeStep => (a + b, b),
        };
        let inside = match self.lattice {
            Lattice::UpRight => true,
            Lattice::ThreeStep => b >= 1 + 0.max(-a),
        };
        (inside && (1..=self.cols as i64).contains(&k) && (1..=self.rows as i64).contains(&l))
            .then(|| (l as usize - 1) * self.cols + (k as usize - 1))
    }

    pub fn contains(&self, a: i64, b: i64) -> bool {
        self.index(a, b).is_some()
    }

    pub fn get(&self, a: i64, b: i64) -> Option<f64> {
        self.index(a, b).map(|n| self.weights[n])
    }

    pub fn set(&mut self, a: i64, b: i64, w: f64) -> Result<()> {
        if !(w >= 0.0 && w.is_finite()) {
            return Err(Error::InvalidArgument(format!("weight {w} at ({a}, {b})")));
        }
        let n = self.index(a, b).ok_or(Error::OutOfDomain(a, b))?;
        self.weights[n] = w;
        self.seed = None;
        Ok(())
    }

    /// Cells row by row, in the lattice's own coordinates.
    pub fn cells(&self) -> impl Iterator<Item = (i64, i64)> + '_ {
        let lattice = self.lattice;
        (1..=self.rows as i64).flat_map(move |l| {
            (1..=self.cols as i64).map(move |k| match lattice {
                Lattice::UpRight => (k, l),
                Lattice::ThreeStep => (k - l, l),
            })
        })
    }

    /// `i,j,weight` rows (`k,l` for up-right grids), in row order.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        for (a, b) in self.cells() {
            out.serialize(WeightRow { i: a, j: b, weight: self.get(a, b).unwrap() })?;
        }
        out.flush()?;
        Ok(())
    }

    /// Reads a grid written by [`WeightGrid::write_csv`]; every cell of the
    /// domain spanned by the largest row and column must be present.
    pub fn read_csv<R: Read>(r: R, lattice: Lattice) -> Result<Self> {
        let rows = csv::Reader::from_reader(r).deserialize().collect::<std::result::Result<Vec<WeightRow>, _>>()?;
        let lmax = rows.iter().map(|r| r.j).max().ok_or_else(|| Error::Parse("empty grid".into()))?;
        let kmax = rows
            .iter()
            .map(|r| match lattice {
                Lattice::UpRight => r.i,
                Lattice::ThreeStep => r.i + r.j,
            })
            .max()
            .unwrap();
        let (a, b) = match lattice {
            Lattice::UpRight => (kmax, lmax),
            Lattice::ThreeStep => (kmax - lmax, lmax),
        };
        let mut g = Self::zeros(lattice, a, b)?;
        let mut seen = vec![false; g.len()];
        for r in &rows {
            let n = g.index(r.i, r.j).ok_or(Error::OutOfDomain(r.i, r.j))?;
            g.set(r.i, r.j, r.weight)?;
            seen[n] = true;
        }
        if let Some(n) = seen.iter().position(|&s| !s) {
            let (k, l) = ((n % g.cols) as i64 + 1, (n / g.cols) as i64 + 1);
            return Err(Error::DomainIncomplete(format!("no weight for up-right cell ({k}, {l})")));
        }
        Ok(g)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn psi_round_trips() {
        assert_eq!(psi(0, 1).unwrap(), (1, 1));
        for j in 1..20 {
            for i in (1 - j)..20 {
                let (k, l) = psi(i, j).unwrap();
                assert_eq!(psi_inverse(k, l).unwrap(), (i, j));
            }
        }
        assert_eq!(psi(-1, 1), Err(Error::OutOfDomain(-1, 1)));
        assert_eq!(psi(3, 0), Err(Error::OutOfDomain(3, 0)));
        assert_eq!(psi_inverse(0, 2), Err(Error::OutOfDomain(0, 2)));
    }

    #[test]
    fn three_step_domain_shape() {
        let g = WeightGrid::zeros(Lattice::ThreeStep, 2, 3).unwrap();
        assert_eq!(g.len(), 15);
        assert!(g.contains(0, 1) && g.contains(-2, 3) && g.contains(4, 1) && g.contains(2, 3));
        assert!(!g.contains(-1, 1) && !g.contains(3, 3) && !g.contains(5, 1) && !g.contains(0, 4));
        assert_eq!(g.corner(), (2, 3));
        assert!(g.cells().all(|(i, j)| psi(i, j).is_ok()));
    }

    #[test]
    fn sampled_weights_are_reproducible_and_nested() {
        let a = WeightGrid::sample(Lattice::UpRight, 6, 4, 3).unwrap();
        let b = WeightGrid::sample(Lattice::UpRight, 6, 9, 3).unwrap();
        assert_eq!(a, WeightGrid::sample(Lattice::UpRight, 6, 4, 3).unwrap());
        assert!(a.cells().all(|(k, l)| a.get(k, l) == b.get(k, l)));
        assert!(a.cells().all(|(k, l)| a.get(k, l).unwrap() > 0.0));
    }

    #[test]
    fn csv_round_trip_and_gaps() {
        let g = WeightGrid::sample(Lattice::ThreeStep, 1, 2, 8).unwrap();
        let mut buf = Vec::new();
        g.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("i,j,weight\n0,1,"));
        let mut back = WeightGrid::read_csv(&buf[..], Lattice::ThreeStep).unwrap();
        assert!(g.cells().all(|(i, j)| back.get(i, j) == g.get(i, j)));
        back.seed = g.seed;
        assert_eq!(back, g);
        let missing: String = text.lines().filter(|l| !l.starts_with("1,1,")).map(|l| format!("{l}\n")).collect();
        assert!(matches!(WeightGrid::read_csv(missing.as_bytes(), Lattice::ThreeStep), Err(Error::DomainIncomplete(_))));
    }

    #[test]
    fn rejects_negative_weights() {
        let mut g = WeightGrid::zeros(Lattice::UpRight, 2, 2).unwrap();
        assert!(g.set(1, 1, -0.5).is_err());
        assert_eq!(g.set(3, 1, 1.0), Err(Error::OutOfDomain(3, 1)));
    }
}
