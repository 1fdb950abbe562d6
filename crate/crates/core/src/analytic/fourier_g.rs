//! Dirichlet energies of the truncated series `g = A + B` on the unit square
//! `Q1`, with `A = sum_{n <= N} sin(n pi x1) sinh(n pi (x2 - 1)) / (n sinh(n pi))`
//! and `B(x1, x2) = -A(x2, x1)`.
//!
//! `D(A) = D(B) = sum pi coth(pi n) / (2n)` and
//! `int grad A . grad B = sum_{n, m <= N} 1 / (n^2 + m^2)`, so
//! `D(g; Q1) = 2 (D(A) + cross)` grows like `2 pi ln N` while the reflected
//! combination on `Q2` has `D = 2 (D(A) - cross)`, which stays bounded.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

pub fn d_a(n_max: usize) -> f64 {
    (1..=n_max)
        .map(|n| {
            let n = n as f64;
            PI / (PI * n).tanh() / (2.0 * n)
        })
        .sum()
}

/// `sum_{n, m = 1..N} 1 / (n^2 + m^2)`.
pub fn cross(n_max: usize) -> f64 {
    let mut s = 0.0;
    for n in 1..=n_max {
        let n2 = (n * n) as f64;
        let mut row = 0.25 / n2;
        for m in n + 1..=n_max {
            row += 1.0 / (n2 + (m * m) as f64);
        }
        s += 2.0 * row;
    }
    s
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GEnergies {
    pub n: usize,
    pub d_a: f64,
    pub cross: f64,
    pub d_q1: f64,
    pub d_q2: f64,
}

pub fn fourier_g_energies(n_max: usize) -> GEnergies {
    let (a, c) = (d_a(n_max), cross(n_max));
    GEnergies {
        n: n_max,
        d_a: a,
        cross: c,
        d_q1: 2.0 * (a + c),
        d_q2: 2.0 * (a - c),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PartialSum {
    pub sum: f64,
    pub closed_form: f64,
    /// `sum_{m > N} 1 / (m^2 + n^2) <= 1 / N`.
    pub tail_bound: f64,
}

/// `sum_{m = 1..N} 1 / (m^2 + n^2)` against its limit
/// `(pi n coth(pi n) - 1) / (2 n^2)`.
pub fn partial_sum_identity(n: u64, n_max: u64) -> PartialSum {
    let nf = n as f64;
    let n2 = nf * nf;
    // Summed from the small terms up.
    let sum: f64 = (1..=n_max).rev().map(|m| 1.0 / ((m * m) as f64 + n2)).sum();
    PartialSum {
        sum,
        closed_form: (PI * nf / (PI * nf).tanh() - 1.0) / (2.0 * n2),
        tail_bound: if n_max == 0 { f64::INFINITY } else { 1.0 / n_max as f64 },
    }
}

/// Least-squares slope of `ys` against `ln xs`.
pub fn log_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let l: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let n = l.len() as f64;
    let (ml, my) = (l.iter().sum::<f64>() / n, ys.iter().sum::<f64>() / n);
    let cov: f64 = l.iter().zip(ys).map(|(a, b)| (a - ml) * (b - my)).sum();
    let var: f64 = l.iter().map(|a| (a - ml).powi(2)).sum();
    cov / var
}
