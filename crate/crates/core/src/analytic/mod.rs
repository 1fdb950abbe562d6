//! Closed-form quantities and explicit test maps used to cross-check the
//! discrete results.

pub mod boundary;
pub mod fourier_g;
pub mod kernels;
pub mod pointcontact;
pub mod quad;
pub mod seminorm;
pub mod strip;

use std::fmt;
use std::io::{self, Write};
use std::sync::Arc;

use crate::assembly::element_energy;
use crate::error::{Error, Result};
use crate::mesh::Mesh;
use crate::regions::{element_values, FieldSpec};

type MapFn = dyn Fn([f64; 2]) -> [f64; 2] + Send + Sync;

/// An explicit map into `R^2` together with the boundary it must vanish on.
#[derive(Clone)]
pub struct WitnessField {
    pub name: &'static str,
    pub params: Vec<(&'static str, f64)>,
    /// Energy predicted by the construction, when it has a closed form.
    pub predicted_energy: Option<f64>,
    /// Segments on which the map vanishes.
    pub boundary: Vec<[[f64; 2]; 2]>,
    map: Arc<MapFn>,
}

impl fmt::Debug for WitnessField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("WitnessField")
            .field("name", &self.name)
            .field("params", &self.params)
            .field("predicted_energy", &self.predicted_energy)
            .finish()
    }
}

impl WitnessField {
    pub fn new(
        name: &'static str,
        params: Vec<(&'static str, f64)>,
        boundary: Vec<[[f64; 2]; 2]>,
        map: impl Fn([f64; 2]) -> [f64; 2] + Send + Sync + 'static,
    ) -> WitnessField {
        WitnessField {
            name,
            params,
            predicted_energy: None,
            boundary,
            map: Arc::new(map),
        }
    }

    /// The zero map on the boundary of `(-h, h)^2`.
    pub fn zero(h: f64) -> WitnessField {
        WitnessField::new("zero", vec![], square_boundary(h), |_| [0.0, 0.0])
    }

    pub fn eval(&self, p: [f64; 2]) -> [f64; 2] {
        (self.map)(p)
    }

    /// Largest `|w|` over `n` points spread along the declared boundary.
    pub fn boundary_max(&self, n: usize) -> f64 {
        let total: f64 = self.boundary.iter().map(seg_len).sum();
        let mut worst: f64 = 0.0;
        for s in &self.boundary {
            let k = ((n as f64 * seg_len(s) / total).ceil() as usize).max(2);
            for i in 0..k {
                let t = i as f64 / (k - 1) as f64;
                let p = [
                    s[0][0] + t * (s[1][0] - s[0][0]),
                    s[0][1] + t * (s[1][1] - s[0][1]),
                ];
                let w = self.eval(p);
                worst = worst.max(w[0].hypot(w[1]));
            }
        }
        worst
    }

    /// Nodal samples on `mesh`, one `x y u1 u2` line per node.
    pub fn write_nodal(&self, mesh: &Mesh, mut w: impl Write) -> io::Result<()> {
        for p in &mesh.nodes {
            let v = self.eval(*p);
            writeln!(w, "{:.17e} {:.17e} {:.17e} {:.17e}", p[0], p[1], v[0], v[1])?;
        }
        Ok(())
    }
}

fn seg_len(s: &[[f64; 2]; 2]) -> f64 {
    (s[1][0] - s[0][0]).hypot(s[1][1] - s[0][1])
}

pub(crate) fn square_boundary(h: f64) -> Vec<[[f64; 2]; 2]> {
    rect_boundary(-h, h, -h, h)
}

pub(crate) fn rect_boundary(x0: f64, x1: f64, y0: f64, y1: f64) -> Vec<[[f64; 2]; 2]> {
    vec![
        [[x0, y0], [x1, y0]],
        [[x1, y0], [x1, y1]],
        [[x1, y1], [x0, y1]],
        [[x0, y1], [x0, y0]],
    ]
}

/// Energy `int |grad w_h|^2 + f det grad w_h` of the nodal interpolant
/// `w_h` of `w`. The interpolation error is first order in the mesh size.
///
/// Boundary nodes must carry `|w| <= 1e-6 max|w|`; they are then set to zero.
pub fn interpolate_energy(mesh: &Mesh, spec: &FieldSpec, w: &WitnessField) -> Result<f64> {
    let (dir, det) = interpolate_energy_parts(mesh, spec, w)?;
    Ok(dir + det)
}

/// `(Dirichlet part, weighted determinant part)` of [`interpolate_energy`].
pub fn interpolate_energy_parts(
    mesh: &Mesh,
    spec: &FieldSpec,
    w: &WitnessField,
) -> Result<(f64, f64)> {
    let fvals = element_values(spec, mesh)?;
    let mut u: Vec<[f64; 2]> = mesh.nodes.iter().map(|&p| w.eval(p)).collect();
    let sup = u.iter().fold(0.0_f64, |m, v| m.max(v[0].hypot(v[1])));
    for (i, v) in u.iter_mut().enumerate() {
        if mesh.boundary[i] {
            let a = v[0].hypot(v[1]);
            if a > 1e-6 * sup {
                return Err(Error::WitnessBoundary(a));
            }
            *v = [0.0, 0.0];
        }
    }
    element_energy(mesh, &fvals, &u)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::assembly::assemble;
    use crate::mesh::{build_rect_mesh, Pattern};

    #[test]
    fn zero_witness_has_zero_energy() {
        let spec = FieldSpec::PointContact { c: 3.0 };
        let mesh = build_rect_mesh(&spec.natural_domain(), 4, Pattern::CrissCross).unwrap();
        assert_eq!(interpolate_energy(&mesh, &spec, &WitnessField::zero(1.0)).unwrap(), 0.0);
    }

    #[test]
    fn hat_function_matches_assembled_energy() {
        let spec = FieldSpec::PointContact { c: 3.0 };
        let mesh = build_rect_mesh(&spec.natural_domain(), 2, Pattern::Diagonal).unwrap();
        let node = mesh.nodes.iter().position(|p| p[0] == 0.5 && p[1] == 0.5).unwrap();
        let nb = mesh.nodes.iter().position(|p| p[0] == 0.0 && p[1] == 0.5).unwrap();
        let (pa, pb) = (mesh.nodes[node], mesh.nodes[nb]);
        let hat = WitnessField::new("hat", vec![], square_boundary(1.0), move |p| {
            let at = |q: [f64; 2]| (p[0] - q[0]).abs() < 1e-12 && (p[1] - q[1]).abs() < 1e-12;
            [if at(pa) { 1.0 } else { 0.0 }, if at(pb) { 0.7 } else { 0.0 }]
        });
        let e = interpolate_energy(&mesh, &spec, &hat).unwrap();
        let q = assemble(&mesh, &element_values(&spec, &mesh).unwrap()).unwrap();
        let mut u = vec![[0.0; 2]; mesh.n_nodes()];
        u[node][0] = 1.0;
        u[nb][1] = 0.7;
        let v = q.from_nodal(&u).unwrap();
        assert!((e - q.energy(&v).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn boundary_violation_rejected() {
        let spec = FieldSpec::Constant { c: 0.0 };
        let mesh = build_rect_mesh(&spec.natural_domain(), 2, Pattern::Diagonal).unwrap();
        let w = WitnessField::new("one", vec![], square_boundary(1.0), |_| [1.0, 0.0]);
        assert!(matches!(
            interpolate_energy(&mesh, &spec, &w),
            Err(Error::WitnessBoundary(_))
        ));
    }
}
