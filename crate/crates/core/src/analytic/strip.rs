//! Three-block test map on `Omega = L u [0, delta] x [0, 1] u R` with
//! `L = [-1, 0] x [0, 1]`, `R = [delta, delta + 1] x [0, 1]` and
//! `f = c chi_L - c chi_R`.
//!
//! A half-square map `phi` on `L`, vanishing off `Gamma = {0} x [0, 1]`, is
//! frozen across the middle strip and mirrored into `R`. Its energy is
//! `2 I_L(c) + delta int_0^1 |d2 phi(0, x2)|^2`, affine in `delta`.

use serde::{Deserialize, Serialize};

use super::boundary::BoundaryWitness;
use super::{rect_boundary, WitnessField};
use crate::error::{Error, Result};

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct StripWitness {
    pub c: f64,
    pub c_prime: f64,
    pub delta: f64,
    /// `I_L(c) = int_L |grad phi|^2 + c det grad phi`.
    pub left_energy: f64,
    /// `int_0^1 |d2 phi(0, x2)|^2`.
    pub trace: f64,
    /// `2 I_L(c) + delta * trace`.
    pub energy: f64,
    /// Width below which the energy is negative.
    pub delta_star: f64,
    #[serde(skip)]
    pub field: Option<WitnessField>,
}

impl StripWitness {
    pub fn energy_at(&self, delta: f64) -> f64 {
        2.0 * self.left_energy + delta * self.trace
    }
}

/// `phi` on `L`: the half-square map `Phi` on `Q+` composed with
/// `x -> R(2 (x - (0, 1/2)))`, `R(y1, y2) = (y2, -y1)`. Both the dilation and
/// the rotation leave the energy unchanged, and `Gamma` lands on `{y2 = 0}`.
fn left_map(base: BoundaryWitness) -> impl Fn([f64; 2]) -> [f64; 2] + Send + Sync + Copy {
    let s = 2.0 * base.r0;
    move |x: [f64; 2]| {
        let y = [2.0 * (x[1] - 0.5), -2.0 * x[0]];
        if y[0].abs() >= 1.0 || y[1] >= 1.0 {
            return [0.0, 0.0];
        }
        let (p, _) = base.phi([s * y[0], s * y[1]]);
        [p[0] / s, p[1] / s]
    }
}

pub fn strip_witness(c: f64, c_prime: f64, delta: f64, base: &BoundaryWitness) -> Result<StripWitness> {
    if !(c > c_prime && c_prime > 2.0) {
        return Err(Error::InvalidParameter(format!(
            "need c > c' > 2, got c = {c}, c' = {c_prime}"
        )));
    }
    if !(delta >= 0.0) {
        return Err(Error::InvalidParameter(format!("delta = {delta} must be nonnegative")));
    }
    let (dir, det) = base.energy_parts();
    let margin = dir + c_prime * det;
    if margin >= 0.0 {
        return Err(Error::InsufficientMargin(margin));
    }
    let left_energy = dir + c * det;
    // d2 phi(0, x2) = 2 d1 Phi(2 x2 - 1, 0) = 2 d1 phi(2 R0 t, 0).
    let trace = base.trace_energy() / base.r0;
    let left = left_map(*base);
    let field = WitnessField::new(
        "strip",
        vec![("c", c), ("c'", c_prime), ("delta", delta), ("R0", base.r0), ("a", base.delta)],
        rect_boundary(-1.0, delta + 1.0, 0.0, 1.0),
        move |x| {
            if x[0] <= 0.0 {
                left(x)
            } else if x[0] <= delta {
                left([0.0, x[1]])
            } else {
                left([delta - x[0], x[1]])
            }
        },
    );
    let mut w = StripWitness {
        c,
        c_prime,
        delta,
        left_energy,
        trace,
        energy: 0.0,
        delta_star: -2.0 * left_energy / trace,
        field: None,
    };
    w.energy = w.energy_at(delta);
    let mut field = field;
    field.predicted_energy = Some(w.energy);
    w.field = Some(field);
    Ok(w)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytic::quad::Rule;

    fn base() -> BoundaryWitness {
        BoundaryWitness::new(0.01, 0.5).unwrap()
    }

    #[test]
    fn affine_in_width_with_root() {
        let s = strip_witness(2.5, 2.2, 0.0, &base()).unwrap();
        assert!(s.trace > 0.0);
        assert!((s.energy - 2.0 * s.left_energy).abs() < 1e-12 * s.energy.abs());
        assert!(s.delta_star > 0.0);
        assert!(s.energy_at(0.5 * s.delta_star) < 0.0);
        assert!(s.energy_at(2.0 * s.delta_star) > 0.0);
        let (a, b) = (s.energy_at(0.1), s.energy_at(0.3));
        assert!(((b - a) / 0.2 - s.trace).abs() < 1e-9 * s.trace);
    }

    #[test]
    fn trace_against_finite_differences() {
        let s = strip_witness(2.5, 2.2, 0.2, &base()).unwrap();
        let field = s.field.as_ref().unwrap();
        let h = 1e-6;
        let rule = Rule::uniform(0.0, 1.0, 1024, 8);
        let fd = rule.integrate(|x2| {
            let p = field.eval([0.1, x2 + h]);
            let m = field.eval([0.1, x2 - h]);
            let d = [(p[0] - m[0]) / (2.0 * h), (p[1] - m[1]) / (2.0 * h)];
            d[0] * d[0] + d[1] * d[1]
        });
        assert!((fd - s.trace).abs() < 1e-3 * s.trace, "{fd} vs {}", s.trace);
        assert!(field.boundary_max(2000) < 1e-12);
    }

    #[test]
    fn weak_base_is_rejected() {
        // delta / R0 = 0.4 leaves too little of the singular part for c' = 2.05.
        let weak = BoundaryWitness::new(0.2, 0.5).unwrap();
        assert!(matches!(
            strip_witness(2.5, 2.05, 0.1, &weak),
            Err(Error::InsufficientMargin(_))
        ));
        assert!(strip_witness(2.0, 2.5, 0.1, &base()).is_err());
    }
}
