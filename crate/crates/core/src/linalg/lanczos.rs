//! Lanczos iteration for the largest eigenpair of an operator that is
//! self-adjoint in the inner product of a positive definite matrix `M`.

use nalgebra::{DMatrix, SymmetricEigen};

use super::{axpy, dot, scale, Csr};

#[derive(Clone, Debug)]
pub struct Ritz {
    pub theta: f64,
    /// M-normalised Ritz vector.
    pub x: Vec<f64>,
    /// `||A x - theta x||_M`.
    pub residual: f64,
    /// Operator applications spent.
    pub steps: usize,
}

/// One Lanczos cycle of at most `max_dim` steps with full
/// reorthogonalisation, stopping as soon as the top Ritz pair has
/// `residual <= tol * |theta|`.
pub fn largest(
    mut op: impl FnMut(&[f64]) -> Vec<f64>,
    m: &Csr,
    start: &[f64],
    max_dim: usize,
    tol: f64,
) -> Ritz {
    let n = m.n;
    let max_dim = max_dim.min(n).max(1);
    let mut q: Vec<Vec<f64>> = Vec::with_capacity(max_dim);
    let mut mq: Vec<Vec<f64>> = Vec::with_capacity(max_dim);
    let mut alpha = Vec::with_capacity(max_dim);
    let mut beta: Vec<f64> = Vec::with_capacity(max_dim);

    let mut v = start.to_vec();
    let mut mv = m.matvec(&v);
    let nrm = dot(&v, &mv).sqrt();
    scale(1.0 / nrm, &mut v);
    scale(1.0 / nrm, &mut mv);

    let mut best = Ritz {
        theta: f64::NAN,
        x: v.clone(),
        residual: f64::INFINITY,
        steps: 0,
    };
    loop {
        q.push(v);
        mq.push(mv);
        let j = q.len() - 1;
        let mut w = op(&q[j]);
        best.steps += 1;
        let a = dot(&mq[j], &w);
        alpha.push(a);
        for _ in 0..2 {
            for (qi, mqi) in q.iter().zip(&mq) {
                let c = dot(mqi, &w);
                axpy(-c, qi, &mut w);
            }
        }
        let mut mw = m.matvec(&w);
        let b = dot(&w, &mw).max(0.0).sqrt();

        let k = alpha.len();
        let t = DMatrix::from_fn(k, k, |r, c| {
            if r == c {
                alpha[r]
            } else if r + 1 == c {
                beta[r]
            } else if c + 1 == r {
                beta[c]
            } else {
                0.0
            }
        });
        let eig = SymmetricEigen::new(t);
        let (top, theta) = eig
            .eigenvalues
            .iter()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |acc, (i, &e)| if e > acc.1 { (i, e) } else { acc });
        let y = eig.eigenvectors.column(top);
        let residual = b * y[k - 1].abs();
        let invariant = b <= 1e-13 * theta.abs().max(a.abs()).max(1e-300);
        if residual <= tol * theta.abs() || k == max_dim || invariant {
            let mut x = vec![0.0; n];
            for (i, qi) in q.iter().enumerate() {
                axpy(y[i], qi, &mut x);
            }
            best.theta = theta;
            best.x = x;
            best.residual = residual;
            return best;
        }
        beta.push(b);
        scale(1.0 / b, &mut w);
        scale(1.0 / b, &mut mw);
        v = w;
        mv = mw;
    }
}
