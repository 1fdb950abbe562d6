//! Explicit map with negative energy for the point-contact field
//! `(Q1, Q2, Q3, Q4) = (-c, 0, c, 0)` once `1 + 2 rho^2 - c rho < 0` and the
//! truncation `N` is large.
//!
//! On `Q1 = (0, 1)^2` the first component is `g = A + B` (see
//! [`super::fourier_g`]) and the second is `f_2 = rho (u(x1, x2) + u(x2, x1) - 2 k_N)`
//! with `u = sum_{n <= N} cos(n pi x1) cosh(n pi (x2 - 1)) / (n sinh(n pi))`,
//! so that `grad f_2 = rho cof grad g` and `det grad (g, f_2) = rho |grad g|^2`.
//! The map is carried to the other quadrants by reflections and extended
//! to `rQ` by linear cut-offs `a(s) = (r - s) / (r - 1)`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::fourier_g::fourier_g_energies;
use super::quad::Rule;
use super::{square_boundary, WitnessField};
use crate::error::{Error, Result};

/// Partial sums at `(s, t)`:
/// `[sum sin(n pi s) sh_n(t) / n, sum cos(n pi s) ch_n(t) / n,
///   sum pi sin(n pi s) ch_n(t), sum pi cos(n pi s) sh_n(t)]`
/// with `sh_n(t) = sinh(n pi (t - 1)) / sinh(n pi)` and
/// `ch_n(t) = cosh(n pi (t - 1)) / sinh(n pi)`, both in exponential form.
fn sums(n_max: usize, s: f64, t: f64) -> [f64; 4] {
    let (c1, s1) = ((PI * s).cos(), (PI * s).sin());
    let (mut cn, mut sn) = (c1, s1);
    let e1 = (PI * (t - 2.0)).exp();
    let e2 = (-PI * t).exp();
    let q = (-2.0 * PI).exp();
    let (mut p1, mut p2, mut pq) = (e1, e2, q);
    let mut out = [0.0; 4];
    for n in 1..=n_max {
        let inv = 1.0 / (1.0 - pq);
        let sh = (p1 - p2) * inv;
        let ch = (p1 + p2) * inv;
        let nf = n as f64;
        out[0] += sn * sh / nf;
        out[1] += cn * ch / nf;
        out[2] += PI * sn * ch;
        out[3] += PI * cn * sh;
        let c = cn * c1 - sn * s1;
        sn = sn * c1 + cn * s1;
        cn = c;
        p1 *= e1;
        p2 *= e2;
        pq *= q;
    }
    out
}

/// `k_N = sum (-1)^n / (n sinh(n pi))`, making `f_2(1, 1) = 0`.
fn corner_constant(n_max: usize) -> f64 {
    (1..=n_max)
        .map(|n| {
            let nf = n as f64;
            let e = (-PI * nf).exp();
            let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
            sign * 2.0 * e / (nf * (1.0 - e * e))
        })
        .sum()
}

/// Values on the closed unit square `Q1`: `(g, f_2)`.
fn q1_values(n_max: usize, rho: f64, kn: f64, x: f64, y: f64) -> (f64, f64) {
    let sxy = sums(n_max, x, y);
    let syx = sums(n_max, y, x);
    let g = sxy[0] - syx[0];
    let f = rho * (sxy[1] + syx[1] - 2.0 * kn);
    (g, f)
}

/// `d/dx f_2(x, 1)`.
fn f2_top_slope(n_max: usize, rho: f64, x: f64) -> f64 {
    // d/dx u(x, 1) = -sum pi sin(n pi x) ch_n(1); d/dx u(1, x) = sum pi cos(n pi) sh_n(x).
    rho * (-sums(n_max, x, 1.0)[2] + sums(n_max, 1.0, x)[3])
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PointContactEnergy {
    /// `8 D(A) + (4 rho^2 - 2 c rho) D(g; Q1)`: the series part inside `Q`.
    pub series: f64,
    /// Energy of the four cut-off layers in `rQ \ Q`.
    pub cut: f64,
    pub total: f64,
    /// `4 pi (1 + 2 rho^2 - c rho) ln N`.
    pub asymptotic: f64,
}

pub fn predicted_slope(rho: f64, c: f64) -> f64 {
    4.0 * PI * (1.0 + 2.0 * rho * rho - c * rho)
}

/// Continuum energy of the map, evaluated from the closed-form series and a
/// one-dimensional quadrature of the cut-off layers.
pub fn pointcontact_energy(n_max: usize, rho: f64, c: f64, r: f64) -> Result<PointContactEnergy> {
    check(n_max, r)?;
    let e = fourier_g_energies(n_max);
    let series = 8.0 * e.d_a + (4.0 * rho * rho - 2.0 * c * rho) * e.d_q1;
    // Layer above Q1: f_2(x, 1) a(y) on (0, 1) x (1, r). Its energy is
    // (eps / 3) int f_x^2 + (1 / eps) int f^2; the layer right of Q1 is its
    // mirror image. Each quadrant has both, so the total is 8 times one.
    let eps = r - 1.0;
    let kn = corner_constant(n_max);
    let rule = Rule::uniform(0.0, 1.0, 2 * n_max.max(4), 8);
    let (mut ff, mut fx) = (0.0, 0.0);
    for (&x, &w) in rule.nodes.iter().zip(&rule.weights) {
        let (_, f) = q1_values(n_max, rho, kn, x, 1.0);
        ff += w * f * f;
        fx += w * f2_top_slope(n_max, rho, x).powi(2);
    }
    let cut = 8.0 * (eps / 3.0 * fx + ff / eps);
    Ok(PointContactEnergy {
        series,
        cut,
        total: series + cut,
        asymptotic: predicted_slope(rho, c) * (n_max as f64).ln(),
    })
}

fn check(n_max: usize, r: f64) -> Result<()> {
    if !(r > 1.0 && r.is_finite()) {
        return Err(Error::InvalidParameter(format!("r = {r} must exceed 1")));
    }
    if n_max == 0 {
        return Err(Error::InvalidParameter("N must be at least 1".into()));
    }
    Ok(())
}

/// The map `Phi = (G, F)` on `rQ = (-r, r)^2`.
pub fn pointcontact_witness(n_max: usize, rho: f64, c: f64, r: f64) -> Result<WitnessField> {
    check(n_max, r)?;
    let eps = r - 1.0;
    let kn = corner_constant(n_max);
    let a = move |s: f64| (r - s) / eps;
    // First component on the closed upper half plane.
    let g_up = move |x: f64, y: f64| -> f64 {
        if x.abs() > 1.0 || y > 1.0 {
            return 0.0;
        }
        let xa = x.abs();
        let sxy = sums(n_max, xa, y);
        let syx = sums(n_max, y, xa);
        // A(x, y) = sxy[0], B(x, y) = -syx[0].
        if x >= 0.0 {
            sxy[0] - syx[0]
        } else {
            -syx[0] - sxy[0]
        }
    };
    // Second component on the closed first quadrant, cut off outside Q1.
    let f_q1 = move |x: f64, y: f64| -> f64 {
        match (x <= 1.0, y <= 1.0) {
            (true, true) => q1_values(n_max, rho, kn, x, y).1,
            (true, false) => q1_values(n_max, rho, kn, x, 1.0).1 * a(y),
            (false, true) => q1_values(n_max, rho, kn, 1.0, y).1 * a(x),
            (false, false) => 0.0,
        }
    };
    let mut w = WitnessField::new(
        "point-contact",
        vec![("N", n_max as f64), ("rho", rho), ("c", c), ("r", r)],
        square_boundary(r),
        move |p| {
            let [x, y] = p;
            if y >= 0.0 {
                [g_up(x, y), f_q1(x.abs(), y)]
            } else {
                [-g_up(-x, -y), f_q1(x.abs(), -y)]
            }
        },
    );
    w.predicted_energy = Some(predicted_slope(rho, c) * (n_max as f64).ln());
    Ok(w)
}
