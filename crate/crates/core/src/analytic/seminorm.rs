//! `H^{1/2}` seminorms of periodic profiles and the even/odd extensions
//! `h^+`, `h^-` of a profile on `[0, pi]`.
//!
//! With `h(theta) = a_0 + sum_k a_k cos(k theta) + b_k sin(k theta)`,
//! `[h]^2 = int_0^{2pi} int_R (h(theta) - h(phi))^2 / (theta - phi)^2`
//! equals `2 pi^2 sum_k k (a_k^2 + b_k^2)`.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rustfft::num_complex::Complex;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use super::quad::Rule;
use crate::error::{Error, Result};

/// Samples used for the FFT of extended profiles.
pub const DEFAULT_SAMPLES: usize = 8192;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FourierProfile {
    pub a0: f64,
    /// `a_k`, `k = 1..=K`.
    pub a: Vec<f64>,
    /// `b_k`, `k = 1..=K`.
    pub b: Vec<f64>,
    /// Interval of `[0, pi]` holding the support of the generating profile.
    pub window: Option<(f64, f64)>,
}

impl FourierProfile {
    pub fn new(a0: f64, a: Vec<f64>, b: Vec<f64>) -> Result<FourierProfile> {
        if a.len() != b.len() {
            return Err(Error::Dimension {
                expected: a.len(),
                got: b.len(),
            });
        }
        Ok(FourierProfile {
            a0,
            a,
            b,
            window: None,
        })
    }

    pub fn zero() -> FourierProfile {
        FourierProfile {
            a0: 0.0,
            a: vec![],
            b: vec![],
            window: None,
        }
    }

    /// Coefficients from `m` equispaced samples `h(2 pi j / m)`, keeping
    /// modes below the Nyquist frequency.
    pub fn from_samples(samples: &[f64]) -> FourierProfile {
        let m = samples.len();
        let mut buf: Vec<Complex<f64>> = samples.iter().map(|&x| Complex::new(x, 0.0)).collect();
        FftPlanner::new().plan_fft_forward(m).process(&mut buf);
        let kmax = (m / 2).saturating_sub(1);
        let inv = 1.0 / m as f64;
        FourierProfile {
            a0: buf[0].re * inv,
            a: (1..=kmax).map(|k| 2.0 * buf[k].re * inv).collect(),
            b: (1..=kmax).map(|k| -2.0 * buf[k].im * inv).collect(),
            window: None,
        }
    }

    pub fn eval(&self, theta: f64) -> f64 {
        self.a0
            + self
                .a
                .iter()
                .zip(&self.b)
                .enumerate()
                .map(|(i, (a, b))| {
                    let k = (i + 1) as f64;
                    a * (k * theta).cos() + b * (k * theta).sin()
                })
                .sum::<f64>()
    }

    /// `sum_k k (a_k^2 + b_k^2)`.
    pub fn weighted_energy(&self) -> f64 {
        self.a
            .iter()
            .zip(&self.b)
            .enumerate()
            .map(|(i, (a, b))| (i + 1) as f64 * (a * a + b * b))
            .sum()
    }
}

/// `[h]^2_{1/2} = 2 pi^2 sum_k k (a_k^2 + b_k^2)`.
pub fn h12_seminorm(p: &FourierProfile) -> f64 {
    2.0 * PI * PI * p.weighted_energy()
}

/// Dirichlet energy of the harmonic extension of `p` into the unit disk,
/// `pi sum_k k (a_k^2 + b_k^2) = [h]^2 / (2 pi)`.
pub fn disk_energy(p: &FourierProfile) -> f64 {
    PI * p.weighted_energy()
}

/// `h^+(theta) = h(theta) + h(theta - pi)` and `h^-(theta) = h(theta) - h(theta - pi)`
/// on `[0, 2 pi)`, with `h` extended by zero outside `[0, pi]`.
///
/// `h` must vanish off `[pi/4, 3pi/4]` and satisfy `h(theta) = h(pi - theta)`,
/// both to `1e-10`.
pub fn extend_pm(
    h: impl Fn(f64) -> f64,
    samples: usize,
) -> Result<(FourierProfile, FourierProfile)> {
    check_profile(&h)?;
    let m = samples.max(8);
    let half: Vec<f64> = (0..m / 2)
        .map(|j| h(2.0 * PI * j as f64 / m as f64))
        .collect();
    let plus: Vec<f64> = half.iter().chain(&half).copied().collect();
    let minus: Vec<f64> = half.iter().copied().chain(half.iter().map(|v| -v)).collect();
    let mut hp = FourierProfile::from_samples(&plus);
    let mut hm = FourierProfile::from_samples(&minus);
    hp.window = Some((FRAC_PI_4, 3.0 * FRAC_PI_4));
    hm.window = hp.window;
    Ok((hp, hm))
}

fn check_profile(h: &impl Fn(f64) -> f64) -> Result<()> {
    let n = 4001;
    let mut worst: f64 = 0.0;
    for i in 0..n {
        let t = PI * i as f64 / (n - 1) as f64;
        let v = h(t);
        if !v.is_finite() {
            return Err(Error::ProfileViolation(f64::INFINITY));
        }
        if !(FRAC_PI_4 - 1e-12..=3.0 * FRAC_PI_4 + 1e-12).contains(&t) {
            worst = worst.max(v.abs());
        }
        worst = worst.max((v - h(PI - t)).abs());
    }
    if worst > 1e-10 {
        return Err(Error::ProfileViolation(worst));
    }
    Ok(())
}

/// `[h^+]^2 / [h^-]^2`.
pub fn gamma_ratio(h: impl Fn(f64) -> f64) -> Result<f64> {
    let (hp, hm) = extend_pm(h, DEFAULT_SAMPLES)?;
    let den = h12_seminorm(&hm);
    if den == 0.0 {
        return Err(Error::UndefinedRatio);
    }
    Ok(h12_seminorm(&hp) / den)
}

/// `cos^4` bump of half-width `w` centred at `c`.
pub fn bump(c: f64, w: f64, t: f64) -> f64 {
    let z = (t - c) / w;
    if z.abs() < 1.0 {
        (FRAC_PI_2 * z).cos().powi(4)
    } else {
        0.0
    }
}

/// Nonnegative combination of bumps, each mirrored about `pi/2`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BumpProfile {
    pub centres: Vec<f64>,
    pub widths: Vec<f64>,
    pub weights: Vec<f64>,
}

impl BumpProfile {
    pub fn eval(&self, t: f64) -> f64 {
        self.centres
            .iter()
            .zip(&self.widths)
            .zip(&self.weights)
            .map(|((&c, &w), &a)| a * (bump(c, w, t) + bump(PI - c, w, t)))
            .sum()
    }

    /// Random member: 12 bumps with centres in `[pi/4, pi/2]`, widths
    /// clipped so the support stays in `[pi/4, 3pi/4]`, and exponential
    /// weights of which about half are switched off.
    pub fn random(rng: &mut impl Rng) -> BumpProfile {
        const MIN_WIDTH: f64 = 0.02;
        let mut p = BumpProfile {
            centres: vec![],
            widths: vec![],
            weights: vec![],
        };
        for _ in 0..12 {
            let c = rng.gen_range(FRAC_PI_4 + MIN_WIDTH..=FRAC_PI_2);
            let w: f64 = rng.gen_range(MIN_WIDTH..FRAC_PI_4);
            let on = rng.gen_bool(0.5);
            let a = if on { -(1.0 - rng.gen::<f64>()).ln() } else { 0.0 };
            p.centres.push(c);
            p.widths.push(w.min(c - FRAC_PI_4));
            p.weights.push(a);
        }
        if p.weights.iter().all(|&a| a == 0.0) {
            p.weights[0] = 1.0;
        }
        p
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GammaSearch {
    pub min_ratio: f64,
    pub argmin: BumpProfile,
    pub members: usize,
}

/// Smallest `[h^+]^2 / [h^-]^2` over `size` random bump profiles.
pub fn gamma_search(size: usize, seed: u64) -> Result<GammaSearch> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best: Option<(f64, BumpProfile)> = None;
    for _ in 0..size {
        let p = BumpProfile::random(&mut rng);
        let r = gamma_ratio(|t| p.eval(t))?;
        if best.as_ref().is_none_or(|(b, _)| r < *b) {
            best = Some((r, p));
        }
    }
    let (min_ratio, argmin) =
        best.ok_or_else(|| Error::InvalidParameter("empty gamma family".into()))?;
    Ok(GammaSearch {
        min_ratio,
        argmin,
        members: size,
    })
}

/// Pieces of the split of `[h^+]^2` and `[h^-]^2` over the cells `[0, pi]^2`
/// shifted by `n pi`, with `T_n = (theta - phi - n pi)^{-2}`,
/// `delta = h(theta) - h(phi)` and `sigma = h(theta) + h(phi)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PmSplit {
    /// `int int delta^2 T_0`.
    pub t0: f64,
    /// `sum_{n >= 1} int int delta^2 T_n`.
    pub s_plus: f64,
    /// `sum_{k >= 1} int int delta^2 T_{2k} + sigma^2 T_{2k-1}`.
    pub s_minus: f64,
    /// `t0 + 2 s_plus`, which equals `[h^+]^2 / 2`.
    pub half_plus: f64,
    /// `t0 + 2 s_minus`, which equals `[h^-]^2 / 2`.
    pub half_minus: f64,
}

/// Direct evaluation of the split by tensor Gauss-Legendre quadrature,
/// summing `n <= n_max` and adding the integral estimate of the tail.
pub fn pm_split(h: impl Fn(f64) -> f64, n_max: usize, panels: usize) -> Result<PmSplit> {
    check_profile(&h)?;
    let rule = Rule::uniform(0.0, PI, panels, 12);
    let hv: Vec<f64> = rule.nodes.iter().map(|&t| h(t)).collect();
    let step = 1e-6;
    let dh: Vec<f64> = rule
        .nodes
        .iter()
        .map(|&t| (h(t + step) - h(t - step)) / (2.0 * step))
        .collect();
    let (mut t0, mut sp, mut sm) = (0.0, 0.0, 0.0);
    let kf = n_max as f64;
    for (i, &th) in rule.nodes.iter().enumerate() {
        for (j, &ph) in rule.nodes.iter().enumerate() {
            let w = rule.weights[i] * rule.weights[j];
            let d2 = (hv[i] - hv[j]).powi(2);
            let s2 = (hv[i] + hv[j]).powi(2);
            let t = th - ph;
            t0 += w * if i == j { dh[i] * dh[i] } else { d2 / (t * t) };
            if d2 == 0.0 && s2 == 0.0 {
                continue;
            }
            let (mut even, mut odd) = (0.0, 0.0);
            for n in 1..=n_max {
                let k = 1.0 / (t - n as f64 * PI).powi(2);
                if n % 2 == 0 {
                    even += k;
                } else {
                    odd += k;
                }
            }
            // sum_{n > N} (n pi - t)^{-2} ~ 1 / (pi (pi (N + 1/2) - t)),
            // split evenly between parities.
            let tail = 1.0 / (PI * (PI * (kf + 0.5) - t));
            sp += w * d2 * (even + odd + tail);
            sm += w * (d2 * (even + 0.5 * tail) + s2 * (odd + 0.5 * tail));
        }
    }
    Ok(PmSplit {
        t0,
        s_plus: sp,
        s_minus: sm,
        half_plus: t0 + 2.0 * sp,
        half_minus: t0 + 2.0 * sm,
    })
}
