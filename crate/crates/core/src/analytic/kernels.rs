//! The kernels `K_1..K_5` built from `K(phi, k) = 1 / (phi + k pi)` and the
//! quotient `Q(phi, k) = (K_1 + K_2 + K_3 + K_4) / K_5` for `phi` in
//! `[pi/4, 3pi/4]`.
//!
//! Every kernel is a sum of differences `K(phi, a) - K(phi, b)`, evaluated as
//! `(b - a) pi / ((phi + a pi)(phi + b pi))` so that nothing cancels for
//! large `k`.

use std::f64::consts::{FRAC_PI_4, PI};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// `K(phi, a) - K(phi, b)`.
fn pair(phi: f64, a: f64, b: f64) -> f64 {
    (b - a) * PI / ((phi + a * PI) * (phi + b * PI))
}

pub fn kernel(phi: f64, k: f64) -> f64 {
    1.0 / (phi + k * PI)
}

/// `[K_1, K_2, K_3, K_4, K_5]` at `(phi, k)`.
pub fn kernels(phi: f64, k: u64) -> [f64; 5] {
    let k = k as f64;
    let t = 2.0 * k;
    [
        pair(phi, -t - 0.25, -t) + pair(phi, -t - 1.0, -t - 0.75),
        pair(phi, t - 0.25, t) + pair(phi, t - 1.0, t - 0.75),
        pair(phi, -t + 0.75, -t + 1.0) + pair(phi, -t, -t + 0.25),
        pair(phi, t - 1.25, t - 1.0) + pair(phi, t - 2.0, t - 1.75),
        pair(phi, -t - 1.0, -t + 1.0) + pair(phi, t - 2.0, t),
    ]
}

pub fn kernel_quotient(phi: f64, k: u64) -> Result<f64> {
    if k == 0 {
        return Err(Error::InvalidParameter("k must be positive".into()));
    }
    let ks = kernels(phi, k);
    if !(ks[4] > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "K_5({phi}, {k}) = {} is not positive",
            ks[4]
        )));
    }
    Ok((ks[0] + ks[1] + ks[2] + ks[3]) / ks[4])
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KernelScan {
    pub min: f64,
    pub phi: f64,
    pub k: u64,
}

/// Minimum of `Q` over `n_phi` equispaced angles in `[pi/4, 3pi/4]` and
/// `k = 1..=k_max`.
pub fn kernel_scan(n_phi: usize, k_max: u64) -> Result<KernelScan> {
    let mut best = KernelScan {
        min: f64::INFINITY,
        phi: f64::NAN,
        k: 0,
    };
    for i in 0..n_phi.max(1) {
        let phi = if n_phi <= 1 {
            0.5 * PI
        } else {
            FRAC_PI_4 + 0.5 * PI * i as f64 / (n_phi - 1) as f64
        };
        for k in 1..=k_max {
            let q = kernel_quotient(phi, k)?;
            if q < best.min {
                best = KernelScan { min: q, phi, k };
            }
        }
    }
    Ok(best)
}
