//! Envelope (skyline) LDL^T factorisation of symmetric matrices.

use super::Csr;
use crate::error::{Error, Result};

/// `A = L D L^T` with unit lower `L` stored row by row from the first
/// nonzero column of each row.
#[derive(Clone, Debug)]
pub struct Skyline {
    n: usize,
    first: Vec<usize>,
    start: Vec<usize>,
    data: Vec<f64>,
    diag: Vec<f64>,
}

impl Skyline {
    /// Factorises the symmetric matrix `a`. Only the lower triangle is read.
    /// Fails with `NotPositiveDefinite` on the first pivot that is not
    /// positive, relative to the original diagonal.
    pub fn factor(a: &Csr) -> Result<Skyline> {
        let n = a.n;
        let mut first = vec![0; n];
        for (i, fi) in first.iter_mut().enumerate() {
            *fi = a.row(i).map(|(j, _)| j).filter(|&j| j <= i).min().unwrap_or(i);
        }
        let mut start = vec![0; n + 1];
        for i in 0..n {
            start[i + 1] = start[i] + (i - first[i]);
        }
        let mut data = vec![0.0; start[n]];
        let mut diag = vec![0.0; n];
        for i in 0..n {
            for (j, v) in a.row(i) {
                if j < i {
                    data[start[i] + j - first[i]] = v;
                } else if j == i {
                    diag[i] = v;
                }
            }
        }
        for i in 0..n {
            let fi = first[i];
            let (done, rest) = data.split_at_mut(start[i]);
            let row = &mut rest[..i - fi];
            // Row i holds g_ij = L_ij D_j until the row is finished.
            for j in fi..i {
                let fj = first[j];
                let k0 = fi.max(fj);
                if k0 < j {
                    let lj = &done[start[j] + k0 - fj..start[j] + j - fj];
                    let gi = &row[k0 - fi..j - fi];
                    let s: f64 = gi.iter().zip(lj).map(|(x, y)| x * y).sum();
                    row[j - fi] -= s;
                }
            }
            let mut d = diag[i];
            let a_ii = d.abs();
            for j in fi..i {
                let g = row[j - fi];
                let l = g / diag[j];
                d -= g * l;
                row[j - fi] = l;
            }
            if !(d > 1e-14 * a_ii) {
                return Err(Error::NotPositiveDefinite { row: i, pivot: d });
            }
            diag[i] = d;
        }
        Ok(Skyline {
            n,
            first,
            start,
            data,
            diag,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of stored off-diagonal entries.
    pub fn envelope(&self) -> usize {
        self.data.len()
    }

    pub fn solve_in_place(&self, x: &mut [f64]) {
        let n = self.n;
        for i in 0..n {
            let fi = self.first[i];
            let l = &self.data[self.start[i]..self.start[i + 1]];
            let s: f64 = l.iter().zip(&x[fi..i]).map(|(a, b)| a * b).sum();
            x[i] -= s;
        }
        for i in 0..n {
            x[i] /= self.diag[i];
        }
        for i in (0..n).rev() {
            let fi = self.first[i];
            let xi = x[i];
            let l = &self.data[self.start[i]..self.start[i + 1]];
            for (xj, a) in x[fi..i].iter_mut().zip(l) {
                *xj -= a * xi;
            }
        }
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let mut x = b.to_vec();
        self.solve_in_place(&mut x);
        x
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_spd(n: usize, band: usize, seed: u64) -> Csr {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut t = Vec::new();
        for i in 0..n {
            t.push((i, i, 2.0 * band as f64 + 1.0));
            for j in i.saturating_sub(band)..i {
                if rng.gen_bool(0.6) {
                    let v: f64 = rng.gen_range(-1.0..1.0);
                    t.push((i, j, v));
                    t.push((j, i, v));
                }
            }
        }
        Csr::from_triplets(n, t)
    }

    #[test]
    fn solves_against_dense_oracle() {
        let a = random_spd(40, 6, 3);
        let f = Skyline::factor(&a).unwrap();
        let x_true: Vec<f64> = (0..40).map(|i| (i as f64 * 0.37).sin()).collect();
        let b = a.matvec(&x_true);
        let x = f.solve(&b);
        for (u, v) in x.iter().zip(&x_true) {
            assert!((u - v).abs() < 1e-12);
        }
    }

    #[test]
    fn indefinite_rejected() {
        let a = Csr::from_triplets(2, vec![(0, 0, 1.0), (0, 1, 2.0), (1, 0, 2.0), (1, 1, 1.0)]);
        assert!(matches!(Skyline::factor(&a), Err(Error::NotPositiveDefinite { row: 1, .. })));
    }
}
