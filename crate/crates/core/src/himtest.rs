//! Nonnegativity test for the assembled form `K + B`.
//!
//! `K + B >= 0` on the discrete space iff the smallest generalized eigenvalue
//! `mu_min` of `B v = mu K v` is at least `-1`. The pencil is solved by
//! Lanczos on `(K + s B)^{-1} K` in the `K` inner product, whose eigenvalues
//! are `1 / (1 + s mu)`. The descent method is a Steihaug trust-region
//! minimisation with an energy floor.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::assembly::QuadraticForm;
use crate::error::{Error, Result};
use crate::linalg::lanczos;
use crate::linalg::skyline::Skyline;
use crate::linalg::{axpy, dot, scale};

pub const DEFAULT_TOL: f64 = 1e-8;
pub const DEFAULT_SEED: u64 = 0x5eed;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Outcome {
    Nonnegative,
    Unbounded,
    /// `|mu_min + 1| <= 10 tol`: the field sits on the threshold.
    Critical,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Pencil,
    Descent,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub outcome: Outcome,
    /// Smallest Rayleigh quotient of `(B, K)`; absent for a descent run that
    /// did not compute it.
    pub mu_min: Option<f64>,
    /// Free-DOF vector with negative energy, present iff `Unbounded`.
    #[serde(skip)]
    pub witness: Option<Vec<f64>>,
    pub witness_energy: Option<f64>,
    pub iterations: usize,
    pub method: Method,
}

impl Verdict {
    /// Coercivity margin `1 + mu_min`.
    pub fn margin(&self) -> Option<f64> {
        self.mu_min.map(|m| 1.0 + m)
    }
}

#[derive(Clone, Debug)]
pub struct PencilMin {
    pub mu_min: f64,
    /// `K`-normalised minimiser.
    pub v: Vec<f64>,
    pub iterations: usize,
    /// Shifts `s` at which `K + s B` was factorised.
    pub shifts: Vec<f64>,
}

#[derive(Clone, Copy, Debug)]
pub struct PencilOptions {
    pub tol: f64,
    pub seed: u64,
    /// Total operator applications before giving up.
    pub max_iter: usize,
    /// Krylov dimension per restart cycle.
    pub krylov: usize,
}

impl Default for PencilOptions {
    fn default() -> Self {
        PencilOptions {
            tol: DEFAULT_TOL,
            seed: DEFAULT_SEED,
            max_iter: 3000,
            krylov: 60,
        }
    }
}

fn random_vector(n: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect()
}

fn rayleigh(q: &QuadraticForm, v: &[f64]) -> f64 {
    q.b.quad(v) / q.k.quad(v)
}

pub fn pencil_min(q: &QuadraticForm, tol: f64) -> Result<PencilMin> {
    pencil_min_with(
        q,
        PencilOptions {
            tol,
            ..Default::default()
        },
    )
}

/// Smallest eigenpair of `B v = mu K v`.
///
/// Shifts start at `1.9 / max|f|`, which keeps `K + s B` definite because
/// `|det F| <= |F|^2 / 2`. Once a Rayleigh quotient `r < 0` is known the
/// shift moves to `0.95 / |r|`, still below the pole at `-1 / mu_min`, which
/// separates the wanted eigenvalue from the rest of the spectrum.
pub fn pencil_min_with(q: &QuadraticForm, opt: PencilOptions) -> Result<PencilMin> {
    let n = q.n_free;
    let mut start = random_vector(n, opt.seed);
    if q.f_sup == 0.0 {
        let nk = q.k.quad(&start).sqrt();
        scale(1.0 / nk, &mut start);
        return Ok(PencilMin {
            mu_min: 0.0,
            v: start,
            iterations: 0,
            shifts: vec![],
        });
    }
    let s_safe = 1.9 / q.f_sup;
    let mut s = s_safe;
    let mut shifts = Vec::new();
    let mut used = 0;
    let mut best_mu = f64::INFINITY;
    let mut best_v = start.clone();
    let mut lower = f64::NEG_INFINITY;
    while used < opt.max_iter {
        let fac = match Skyline::factor(&q.shifted(s)) {
            Ok(f) => f,
            Err(Error::NotPositiveDefinite { .. }) if s > s_safe => {
                // Only reachable through rounding near the pole.
                s = 0.5 * (s + s_safe);
                continue;
            }
            Err(e) => return Err(e),
        };
        shifts.push(s);
        let op = |x: &[f64]| {
            let mut y = q.k.matvec(x);
            fac.solve_in_place(&mut y);
            y
        };
        let dim = opt.krylov.min(opt.max_iter - used);
        let r = lanczos::largest(op, &q.k, &start, dim, opt.tol);
        used += r.steps;
        let mu = rayleigh(q, &r.x);
        if mu < best_mu {
            best_mu = mu;
            best_v = r.x.clone();
        }
        // nu <= theta + residual bounds mu_min from below.
        let nu_hi = r.theta + r.residual;
        if nu_hi > 0.0 {
            lower = lower.max((1.0 / nu_hi - 1.0) / s);
        }
        if r.residual <= opt.tol * r.theta.abs() {
            let nk = q.k.quad(&best_v).sqrt();
            scale(1.0 / nk, &mut best_v);
            return Ok(PencilMin {
                mu_min: best_mu,
                v: best_v,
                iterations: used,
                shifts,
            });
        }
        start = r.x;
        if best_mu < 0.0 {
            let target = 0.95 / -best_mu;
            if target > s * 1.0001 {
                s = target;
            }
        }
    }
    Err(Error::NoConvergence {
        iterations: used,
        lower,
        upper: best_mu,
    })
}

pub fn classify(mu_min: f64, tol: f64) -> Outcome {
    if (mu_min + 1.0).abs() <= 10.0 * tol {
        Outcome::Critical
    } else if mu_min > -1.0 {
        Outcome::Nonnegative
    } else {
        Outcome::Unbounded
    }
}

pub fn decide(q: &QuadraticForm, tol: f64) -> Result<Verdict> {
    decide_with(
        q,
        PencilOptions {
            tol,
            ..Default::default()
        },
    )
}

/// Pencil verdict. An `Unbounded` witness is rescaled to energy `-1`.
pub fn decide_with(q: &QuadraticForm, opt: PencilOptions) -> Result<Verdict> {
    let p = pencil_min_with(q, opt)?;
    let outcome = classify(p.mu_min, opt.tol);
    let (witness, witness_energy) = match outcome {
        Outcome::Unbounded => {
            let mut v = p.v;
            let e = q.energy(&v)?;
            if !(e < 0.0) {
                return Err(Error::NoConvergence {
                    iterations: p.iterations,
                    lower: p.mu_min,
                    upper: p.mu_min,
                });
            }
            scale(1.0 / (-e).sqrt(), &mut v);
            let e = q.energy(&v)?;
            (Some(v), Some(e))
        }
        _ => (None, None),
    };
    Ok(Verdict {
        outcome,
        mu_min: Some(p.mu_min),
        witness,
        witness_energy,
        iterations: p.iterations,
        method: Method::Pencil,
    })
}

#[derive(Clone, Copy, Debug)]
pub struct DescentOptions {
    pub floor: f64,
    pub conv: f64,
    /// Total inner iterations; `None` means `10 n_free`.
    pub cap: Option<usize>,
}

impl Default for DescentOptions {
    fn default() -> Self {
        DescentOptions {
            floor: -100.0,
            conv: 1e-6,
            cap: None,
        }
    }
}

#[derive(Clone, Debug)]
pub struct Descent {
    pub verdict: Verdict,
    /// Energy after every accepted step, starting with `u0`.
    pub trajectory: Vec<f64>,
    pub u: Vec<f64>,
}

/// Seeded start vector normalised to `u^T K u = 1`.
pub fn start_vector(q: &QuadraticForm, seed: u64) -> Vec<f64> {
    let mut u = random_vector(q.n_free, seed);
    let nk = q.k.quad(&u).sqrt();
    scale(1.0 / nk, &mut u);
    u
}

/// Minimises `E(u) = u^T (K + B) u` from `u0` by trust-region steps whose
/// subproblem is solved by `K`-preconditioned Steihaug CG in the `K` norm.
/// Because `E` is quadratic the model is exact, so every step is accepted
/// and the radius doubles whenever a step reaches the boundary.
pub fn descend(q: &QuadraticForm, u0: &[f64], opt: DescentOptions) -> Result<Descent> {
    let n = q.n_free;
    if u0.len() != n {
        return Err(Error::Dimension {
            expected: n,
            got: u0.len(),
        });
    }
    let a = q.shifted(1.0);
    let kfac = Skyline::factor(&q.k)?;
    let cap = opt.cap.unwrap_or(10 * n);
    let mut u = u0.to_vec();
    let mut au = a.matvec(&u);
    let mut e = dot(&u, &au);
    let mut trajectory = vec![e];
    let mut radius = q.k.quad(&u).sqrt().max(1.0);
    let mut iters = 0;
    let done = |outcome, iters, u: Vec<f64>, e: f64, trajectory| {
        let unbounded = outcome == Outcome::Unbounded;
        Ok(Descent {
            verdict: Verdict {
                outcome,
                mu_min: None,
                witness: unbounded.then(|| u.clone()),
                witness_energy: unbounded.then_some(e),
                iterations: iters,
                method: Method::Descent,
            },
            trajectory,
            u,
        })
    };
    loop {
        if e < opt.floor {
            return done(Outcome::Unbounded, iters, u, e, trajectory);
        }
        // Gradient 2 A u; its K^{-1}-norm measures stationarity.
        let g: Vec<f64> = au.iter().map(|v| 2.0 * v).collect();
        let kg = kfac.solve(&g);
        let gnorm = dot(&g, &kg).max(0.0).sqrt();
        if gnorm < opt.conv && e.abs() < opt.conv {
            return done(Outcome::Nonnegative, iters, u, e, trajectory);
        }
        if iters >= cap {
            return Err(Error::Inconclusive {
                iterations: iters,
                energy: e,
            });
        }
        // Steihaug CG for min g.p + p.A.p subject to ||p||_K <= radius.
        let mut p = vec![0.0; n];
        let mut r: Vec<f64> = g.iter().map(|v| -0.5 * v).collect();
        let mut z = kg.iter().map(|v| -0.5 * v).collect::<Vec<_>>();
        let mut d = z.clone();
        let mut rz = dot(&r, &z);
        let rz0 = rz;
        let mut hit_boundary = false;
        loop {
            iters += 1;
            let ad = a.matvec(&d);
            let curv = dot(&d, &ad);
            let kd = q.k.matvec(&d);
            if curv <= 0.0 {
                let tau = boundary_step(&p, &d, &q.k.matvec(&p), &kd, radius);
                axpy(tau, &d, &mut p);
                hit_boundary = true;
                break;
            }
            let alpha = rz / curv;
            let mut pn = p.clone();
            axpy(alpha, &d, &mut pn);
            if q.k.quad(&pn).sqrt() >= radius {
                let tau = boundary_step(&p, &d, &q.k.matvec(&p), &kd, radius);
                axpy(tau, &d, &mut p);
                hit_boundary = true;
                break;
            }
            p = pn;
            axpy(-alpha, &ad, &mut r);
            z = kfac.solve(&r);
            let rz_new = dot(&r, &z);
            if rz_new <= (1e-24_f64).max(1e-20 * rz0) || iters >= cap {
                break;
            }
            let beta = rz_new / rz;
            rz = rz_new;
            for (di, zi) in d.iter_mut().zip(&z) {
                *di = zi + beta * *di;
            }
        }
        axpy(1.0, &p, &mut u);
        au = a.matvec(&u);
        let e_new = dot(&u, &au);
        if hit_boundary {
            radius *= 2.0;
        }
        e = e_new;
        trajectory.push(e);
    }
}

/// `tau >= 0` with `||p + tau d||_K = radius`.
fn boundary_step(p: &[f64], d: &[f64], kp: &[f64], kd: &[f64], radius: f64) -> f64 {
    let dd = dot(d, kd);
    let pd = dot(p, kd);
    let pp = dot(p, kp);
    let disc = (pd * pd + dd * (radius * radius - pp)).max(0.0);
    (-pd + disc.sqrt()) / dd
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::assembly::assemble;
    use crate::mesh::{build_rect_mesh, Pattern};
    use crate::regions::{element_values, FieldSpec};

    fn form(spec: &FieldSpec, n_div: usize) -> QuadraticForm {
        let mesh = build_rect_mesh(&spec.natural_domain(), n_div, Pattern::CrissCross).unwrap();
        assemble(&mesh, &element_values(spec, &mesh).unwrap()).unwrap()
    }

    #[test]
    fn zero_field() {
        let q = form(&FieldSpec::Constant { c: 0.0 }, 4);
        let p = pencil_min(&q, 1e-8).unwrap();
        assert_eq!(p.mu_min, 0.0);
    }

    #[test]
    fn constant_field_is_null() {
        let q = form(&FieldSpec::Constant { c: 5.0 }, 4);
        let v = decide(&q, 1e-8).unwrap();
        assert_eq!(v.outcome, Outcome::Nonnegative);
        assert!(v.mu_min.unwrap().abs() < 1e-10);
    }

    #[test]
    fn pencil_matches_dense_oracle() {
        use nalgebra::{DMatrix, SymmetricEigen};
        let q = form(&FieldSpec::PointContact { c: 3.0 }, 2);
        let n = q.n_free;
        let k = DMatrix::from_fn(n, n, |i, j| q.k.get(i, j));
        let b = DMatrix::from_fn(n, n, |i, j| q.b.get(i, j));
        let l = k.clone().cholesky().unwrap();
        let linv = l.l().try_inverse().unwrap();
        let c = &linv * b * linv.transpose();
        let eig = SymmetricEigen::new(c);
        let dense = eig.eigenvalues.iter().cloned().fold(f64::MAX, f64::min);
        let p = pencil_min(&q, 1e-10).unwrap();
        assert!((p.mu_min - dense).abs() < 1e-8 * dense.abs().max(1.0));
    }

    #[test]
    fn descent_agrees_with_pencil() {
        for c in [2.0, 4.0] {
            let q = form(&FieldSpec::PointContact { c }, 4);
            let v = decide(&q, 1e-8).unwrap();
            let d = descend(&q, &start_vector(&q, 1), DescentOptions::default()).unwrap();
            assert_eq!(v.outcome, d.verdict.outcome, "c = {c}");
        }
    }

    #[test]
    fn unbounded_witness_energy() {
        let q = form(&FieldSpec::HalfDomain { m_value: 8.0 }, 4);
        let v = decide(&q, 1e-8).unwrap();
        assert_eq!(v.outcome, Outcome::Unbounded);
        let w = v.witness.unwrap();
        assert!((q.energy(&w).unwrap() + 1.0).abs() < 1e-9);
    }

    #[test]
    fn half_domain_threshold_above_four() {
        let q = form(&FieldSpec::HalfDomain { m_value: 4.0 }, 4);
        assert_eq!(decide(&q, 1e-8).unwrap().outcome, Outcome::Nonnegative);
    }
}
