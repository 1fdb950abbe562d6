//! Sparse storage, envelope factorisation and the Lanczos pencil solver.

pub mod lanczos;
pub mod ordering;
pub mod skyline;

use std::io::{self, Write};

/// Compressed sparse row matrix with sorted column indices.
#[derive(Clone, Debug, PartialEq)]
pub struct Csr {
    pub n: usize,
    pub row_ptr: Vec<usize>,
    pub col: Vec<usize>,
    pub val: Vec<f64>,
}

impl Csr {
    /// Builds an `n x n` matrix from `(row, col, value)` triplets. Duplicates
    /// are summed; explicit zeros are kept so that forms sharing a triplet
    /// pattern share a sparsity structure.
    pub fn from_triplets(n: usize, mut t: Vec<(usize, usize, f64)>) -> Csr {
        t.sort_unstable_by_key(|&(r, c, _)| (r, c));
        let mut row_ptr = vec![0; n + 1];
        let mut col = Vec::with_capacity(t.len());
        let mut val: Vec<f64> = Vec::with_capacity(t.len());
        let mut last = None;
        for (r, c, v) in t {
            if last == Some((r, c)) {
                *val.last_mut().unwrap() += v;
            } else {
                col.push(c);
                val.push(v);
                row_ptr[r + 1] += 1;
                last = Some((r, c));
            }
        }
        for i in 0..n {
            row_ptr[i + 1] += row_ptr[i];
        }
        Csr { n, row_ptr, col, val }
    }

    pub fn nnz(&self) -> usize {
        self.val.len()
    }

    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let r = self.row_ptr[i]..self.row_ptr[i + 1];
        self.col[r.clone()].iter().copied().zip(self.val[r].iter().copied())
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let r = self.row_ptr[i]..self.row_ptr[i + 1];
        match self.col[r.clone()].binary_search(&j) {
            Ok(k) => self.val[r.start + k],
            Err(_) => 0.0,
        }
    }

    /// `y = A x`.
    pub fn matvec_into(&self, x: &[f64], y: &mut [f64]) {
        for (i, yi) in y.iter_mut().enumerate().take(self.n) {
            let mut s = 0.0;
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                s += self.val[k] * x[self.col[k]];
            }
            *yi = s;
        }
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.n];
        self.matvec_into(x, &mut y);
        y
    }

    /// `x^T A x`.
    pub fn quad(&self, x: &[f64]) -> f64 {
        (0..self.n)
            .map(|i| x[i] * self.row(i).map(|(j, v)| v * x[j]).sum::<f64>())
            .sum()
    }

    /// `a A + b B` for matrices with identical structure.
    pub fn lincomb(a: f64, ma: &Csr, b: f64, mb: &Csr) -> Csr {
        assert!(ma.row_ptr == mb.row_ptr && ma.col == mb.col, "structure mismatch");
        Csr {
            n: ma.n,
            row_ptr: ma.row_ptr.clone(),
            col: ma.col.clone(),
            val: ma.val.iter().zip(&mb.val).map(|(x, y)| a * x + b * y).collect(),
        }
    }

    pub fn is_symmetric(&self) -> bool {
        (0..self.n).all(|i| self.row(i).all(|(j, v)| self.get(j, i) == v))
    }

    /// Coordinate listing, one `row col value` line per stored entry.
    pub fn write_coo(&self, mut w: impl Write) -> io::Result<()> {
        for i in 0..self.n {
            for (j, v) in self.row(i) {
                writeln!(w, "{i} {j} {v:.17e}")?;
            }
        }
        Ok(())
    }
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

pub fn scale(alpha: f64, x: &mut [f64]) {
    x.iter_mut().for_each(|v| *v *= alpha);
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn triplets_sum_duplicates() {
        let a = Csr::from_triplets(
            3,
            vec![(0, 0, 1.0), (2, 1, 2.0), (0, 0, 3.0), (1, 2, 0.0), (2, 1, -1.0)],
        );
        assert_eq!(a.nnz(), 3);
        assert_eq!(a.get(0, 0), 4.0);
        assert_eq!(a.get(2, 1), 1.0);
        assert_eq!(a.matvec(&[1.0, 1.0, 1.0]), vec![4.0, 0.0, 1.0]);
    }
}
