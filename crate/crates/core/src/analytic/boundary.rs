//! Test maps on the half square `Q+ = (-1, 1) x (0, 1)` that vanish off
//! `Gamma = {x2 = 0}`, built from the inversion
//! `phi0(x) = delta (x - a) / |x - a|^2` about a point `a = (0, -delta)` just
//! below `Gamma`. The factor `delta` (a conformal `A = delta 1`) makes `phi`
//! invariant under joint scaling of `delta`, `R0` and `x`.
//!
//! With `phi = eta(|x|) phi0` and `eta` cutting off between `R0` and `2 R0`,
//! `Phi(y) = phi(2 R0 y) / (2 R0)`. The energy
//! `I++(Phi) = int_{Q+} |grad Phi|^2 + c det grad Phi` is `(2 R0)^-2` times
//! that of `phi`, and the latter only depends on `c` and `delta / R0`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::quad::Rule;
use super::WitnessField;
use crate::error::{Error, Result};

/// Quintic smoothstep: 1 on `[0, r0]`, 0 on `[2 r0, inf)`, `|eta'| <= 15 / (8 r0)`.
pub fn eta(s: f64, r0: f64) -> (f64, f64) {
    if s <= r0 {
        return (1.0, 0.0);
    }
    if s >= 2.0 * r0 {
        return (0.0, 0.0);
    }
    let t = (s - r0) / r0;
    let p = t * t * t * (10.0 - 15.0 * t + 6.0 * t * t);
    let dp = 30.0 * t * t * (1.0 - t) * (1.0 - t);
    (1.0 - p, -dp / r0)
}

/// Parameters of the map; see the module docs.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundaryWitness {
    pub delta: f64,
    pub r0: f64,
}

impl BoundaryWitness {
    pub fn new(delta: f64, r0: f64) -> Result<BoundaryWitness> {
        if !(delta > 0.0 && r0.is_finite()) {
            return Err(Error::InvalidParameter(format!("delta = {delta} must be positive")));
        }
        if delta >= 0.5 * r0 {
            return Err(Error::InvalidParameter(format!(
                "delta = {delta} must be below R0 / 2 = {}",
                0.5 * r0
            )));
        }
        Ok(BoundaryWitness { delta, r0 })
    }

    /// `phi(x)` and its gradient (rows are components) at `x` in the upper half plane.
    pub fn phi(&self, x: [f64; 2]) -> ([f64; 2], [[f64; 2]; 2]) {
        let r = x[0].hypot(x[1]);
        let (e, de) = eta(r, self.r0);
        if e == 0.0 && de == 0.0 {
            return ([0.0; 2], [[0.0; 2]; 2]);
        }
        let d = [x[0], x[1] + self.delta];
        let d2 = d[0] * d[0] + d[1] * d[1];
        let k = self.delta / d2;
        let p0 = [k * d[0], k * d[1]];
        let mut g = [[0.0; 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                let id = if i == j { 1.0 } else { 0.0 };
                g[i][j] = e * k * (id - 2.0 * d[i] * d[j] / d2);
                if de != 0.0 {
                    g[i][j] += de * p0[i] * x[j] / r;
                }
            }
        }
        ([e * p0[0], e * p0[1]], g)
    }

    /// `|grad phi|^2 + c det grad phi` at `x`.
    pub fn integrand(&self, c: f64, x: [f64; 2]) -> f64 {
        let (_, g) = self.phi(x);
        let frob = g[0][0] * g[0][0] + g[0][1] * g[0][1] + g[1][0] * g[1][0] + g[1][1] * g[1][1];
        frob + c * (g[0][0] * g[1][1] - g[0][1] * g[1][0])
    }

    /// `(int |grad Phi|^2, int det grad Phi)` over `Q+`. Both equal the
    /// integrals of `phi` over the upper half plane divided by `(2 R0)^2`,
    /// which are computed by a Gauss-Legendre rule in polar coordinates about
    /// `a`, graded geometrically in the radius.
    pub fn energy_parts(&self) -> (f64, f64) {
        let (delta, r0) = (self.delta, self.r0);
        let (mut dir, mut det) = (0.0, 0.0);
        let mut ring = |rho: f64, wr: f64| {
            let t0 = (delta / rho).min(1.0).asin();
            let ang = Rule::uniform(t0, PI - t0, 16, 12);
            for (&t, &wt) in ang.nodes.iter().zip(&ang.weights) {
                let x = [rho * t.cos(), rho * t.sin() - delta];
                let (_, g) = self.phi(x);
                let w = wr * wt * rho;
                dir += w * (g[0][0].powi(2) + g[0][1].powi(2) + g[1][0].powi(2) + g[1][1].powi(2));
                det += w * (g[0][0] * g[1][1] - g[0][1] * g[1][0]);
            }
        };
        // rho = delta sec(tau) on [delta, 2 delta] removes the square-root
        // behaviour of the angular range at rho = delta.
        let inner = Rule::uniform(0.0, PI / 3.0, 4, 12);
        for (&tau, &w) in inner.nodes.iter().zip(&inner.weights) {
            let rho = delta / tau.cos();
            ring(rho, w * rho * tau.tan());
        }
        // Beyond, geometric panels with breaks where eta changes regime.
        let mut knots = vec![2.0 * delta];
        for k in [r0 - delta, r0 + delta, 2.0 * r0 - delta, 2.0 * r0 + delta] {
            if k > 2.0 * delta * (1.0 + 1e-12) {
                knots.push(k);
            }
        }
        for win in knots.windows(2) {
            let panels = (((win[1] / win[0]).ln() / 0.15).ceil() as usize).max(4);
            let rule = Rule::geometric(win[0], win[1], panels, 12);
            for (&rho, &w) in rule.nodes.iter().zip(&rule.weights) {
                ring(rho, w);
            }
        }
        let s2 = 4.0 * r0 * r0;
        (dir / s2, det / s2)
    }

    /// `I++(Phi)` for the weight `c`.
    pub fn energy(&self, c: f64) -> f64 {
        let (dir, det) = self.energy_parts();
        dir + c * det
    }

    /// `int_{-2R0}^{2R0} |d1 phi(s, 0)|^2 ds`.
    pub fn trace_energy(&self) -> f64 {
        // The integrand is even in s.
        let (delta, r0) = (self.delta, self.r0);
        let mut breaks = vec![0.0];
        let panels = (((r0 / delta).ln() / 0.15).ceil() as usize).max(4);
        breaks.extend((0..=panels).map(|i| delta * ((r0 / delta).ln() * i as f64 / panels as f64).exp()));
        breaks.extend((1..=8).map(|i| r0 * (1.0 + i as f64 / 8.0)));
        let rule = Rule::composite(&breaks, 12);
        2.0 * rule.integrate(|s| {
            let (_, g) = self.phi([s, 0.0]);
            g[0][0] * g[0][0] + g[1][0] * g[1][0]
        })
    }

    /// `Phi` on `Q+`, extended by zero to `|y| >= 1`.
    pub fn field(&self, c: f64) -> WitnessField {
        let me = *self;
        let s = 2.0 * self.r0;
        let mut w = WitnessField::new(
            "boundary",
            vec![("c", c), ("delta", self.delta), ("R0", self.r0)],
            vec![[[-1.0, 0.0], [-1.0, 1.0]], [[-1.0, 1.0], [1.0, 1.0]], [[1.0, 1.0], [1.0, 0.0]]],
            move |y| {
                let (p, _) = me.phi([s * y[0], s * y[1]]);
                [p[0] / s, p[1] / s]
            },
        );
        w.predicted_energy = Some(self.energy(c));
        w
    }
}

/// The map `Phi` on `Q+`, with its quadrature energy as the predicted energy.
pub fn boundary_witness(c: f64, delta: f64, r0: f64) -> Result<WitnessField> {
    Ok(BoundaryWitness::new(delta, r0)?.field(c))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundarySearch {
    pub c: f64,
    /// `(delta, R0, energy)` for every grid point.
    pub energies: Vec<(f64, f64, f64)>,
    pub min: f64,
    pub argmin: (f64, f64),
}

/// Default search grid: `R0 = 1/2` and `delta / R0` from 0.4 down to 0.005.
pub fn default_grid() -> Vec<(f64, f64)> {
    [0.4, 0.2, 0.1, 0.05, 0.02, 0.01, 0.005]
        .iter()
        .map(|&q| (0.5 * q, 0.5))
        .collect()
}

pub fn boundary_search(c: f64, grid: &[(f64, f64)]) -> Result<BoundarySearch> {
    let mut out = BoundarySearch {
        c,
        energies: Vec::with_capacity(grid.len()),
        min: f64::INFINITY,
        argmin: (f64::NAN, f64::NAN),
    };
    for &(delta, r0) in grid {
        let e = BoundaryWitness::new(delta, r0)?.energy(c);
        out.energies.push((delta, r0, e));
        if e < out.min {
            out.min = e;
            out.argmin = (delta, r0);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eta_is_a_bounded_cutoff() {
        let r0 = 0.3;
        let mut worst: f64 = 0.0;
        for i in 0..=1000 {
            let s = 0.9 * r0 + 1.2 * r0 * i as f64 / 1000.0;
            let (e, de) = eta(s, r0);
            assert!((0.0..=1.0).contains(&e));
            worst = worst.max(de.abs());
            let h = 1e-7;
            let fd = (eta(s + h, r0).0 - eta(s - h, r0).0) / (2.0 * h);
            assert!((fd - de).abs() < 1e-5 / r0);
        }
        assert!(worst * r0 <= 15.0 / 8.0 + 1e-12);
    }

    #[test]
    fn inner_integrand_is_a_multiple_of_dirichlet() {
        let w = BoundaryWitness::new(0.05, 0.5).unwrap();
        for x in [[0.1, 0.2], [-0.3, 0.01], [0.0, 0.45], [0.2, 0.3]] {
            let (_, g) = w.phi(x);
            let frob = g.iter().flatten().map(|v| v * v).sum::<f64>();
            for c in [2.0, 2.5, 3.0] {
                let expect = -(c / 2.0 - 1.0) * frob;
                assert!((w.integrand(c, x) - expect).abs() <= 1e-8 * frob);
            }
        }
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let w = BoundaryWitness::new(0.05, 0.4).unwrap();
        let h = 1e-6;
        for x in [[0.5, 0.2], [-0.1, 0.6], [0.3, 0.05]] {
            let (_, g) = w.phi(x);
            for j in 0..2 {
                let mut xp = x;
                let mut xm = x;
                xp[j] += h;
                xm[j] -= h;
                let (pp, _) = w.phi(xp);
                let (pm, _) = w.phi(xm);
                for i in 0..2 {
                    let fd = (pp[i] - pm[i]) / (2.0 * h);
                    assert!((fd - g[i][j]).abs() < 1e-5 * (1.0 + fd.abs()), "{x:?} {i}{j}");
                }
            }
        }
    }

    #[test]
    fn inner_energy_against_closed_form() {
        // With a huge R0 the cutoff is negligible; int_{H+} delta^2 |x - a|^-4 = pi / 4.
        let w = BoundaryWitness::new(0.01, 1e3).unwrap();
        let (dir, det) = w.energy_parts();
        let exact = 2.0 * PI / 4.0 / (4.0 * 1e6);
        assert!((dir - exact).abs() < 1e-6 * exact, "{dir} vs {exact}");
        assert!((det + exact / 2.0).abs() < 1e-6 * exact);
    }

    #[test]
    fn scale_invariance() {
        let a = BoundaryWitness::new(0.02, 0.5).unwrap().energy(2.5) * 0.25;
        let b = BoundaryWitness::new(0.2, 5.0).unwrap().energy(2.5) * 25.0;
        assert!((a - b).abs() < 1e-9 * a.abs(), "{a} {b}");
    }

    #[test]
    fn vanishes_off_gamma() {
        let w = boundary_witness(2.5, 0.05, 0.5).unwrap();
        assert_eq!(w.boundary_max(1000), 0.0);
        assert!(boundary_witness(2.5, 0.25, 0.5).is_err());
    }
}
