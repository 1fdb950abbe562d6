//! P1 assembly of the Dirichlet form `K` and the weighted determinant form
//! `B_f` on the free degrees of freedom.
//!
//! Free DOF `2 r + c` is component `c` of the `r`-th free node unit in the
//! chosen ordering. A unit is an interior node, or a pair of interior nodes
//! identified by a symmetry constraint.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::ordering::{profile, rcm};
use crate::linalg::Csr;
use crate::mesh::Mesh;

/// Optional linear constraint applied by identifying DOFs.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Symmetry {
    #[default]
    None,
    /// `phi(0, x2) = phi(0, -x2)` on the line `x1 = 0`.
    MirrorOnAxis,
}

#[derive(Clone, Debug)]
pub struct QuadraticForm {
    pub n_free: usize,
    pub k: Csr,
    /// Already weighted by `f`. Shares the sparsity structure of `k`.
    pub b: Csr,
    /// `dof_map[2 * node + comp]`: free DOF index, `None` if constrained to 0.
    pub dof_map: Vec<Option<usize>>,
    /// `max |f|` over elements.
    pub f_sup: f64,
}

impl QuadraticForm {
    pub fn k_energy(&self, u: &[f64]) -> Result<f64> {
        self.check(u)?;
        Ok(self.k.quad(u))
    }

    pub fn b_energy(&self, u: &[f64]) -> Result<f64> {
        self.check(u)?;
        Ok(self.b.quad(u))
    }

    /// `u^T (K + B) u`.
    pub fn energy(&self, u: &[f64]) -> Result<f64> {
        self.check(u)?;
        Ok(self.k.quad(u) + self.b.quad(u))
    }

    /// `K + s B`.
    pub fn shifted(&self, s: f64) -> Csr {
        Csr::lincomb(1.0, &self.k, s, &self.b)
    }

    /// Same form with `B` scaled by `lambda` (the field `lambda f`).
    pub fn scaled(&self, lambda: f64) -> QuadraticForm {
        QuadraticForm {
            n_free: self.n_free,
            k: self.k.clone(),
            b: Csr::lincomb(lambda, &self.b, 0.0, &self.b),
            dof_map: self.dof_map.clone(),
            f_sup: self.f_sup * lambda.abs(),
        }
    }

    /// Nodal field from free DOFs; constrained DOFs are zero.
    pub fn to_nodal(&self, u: &[f64]) -> Result<Vec<[f64; 2]>> {
        self.check(u)?;
        let nn = self.dof_map.len() / 2;
        Ok((0..nn)
            .map(|i| {
                [0, 1].map(|c| self.dof_map[2 * i + c].map_or(0.0, |d| u[d]))
            })
            .collect())
    }

    /// Restriction of a nodal field to the free DOFs. Values on constrained
    /// nodes are ignored; identified nodes take the last value written.
    pub fn from_nodal(&self, u: &[[f64; 2]]) -> Result<Vec<f64>> {
        if 2 * u.len() != self.dof_map.len() {
            return Err(Error::Dimension {
                expected: self.dof_map.len() / 2,
                got: u.len(),
            });
        }
        let mut out = vec![0.0; self.n_free];
        for (i, p) in u.iter().enumerate() {
            for c in 0..2 {
                if let Some(d) = self.dof_map[2 * i + c] {
                    out[d] = p[c];
                }
            }
        }
        Ok(out)
    }

    fn check(&self, u: &[f64]) -> Result<()> {
        if u.len() != self.n_free {
            return Err(Error::Dimension {
                expected: self.n_free,
                got: u.len(),
            });
        }
        Ok(())
    }
}

pub fn assemble(mesh: &Mesh, fvals: &[f64]) -> Result<QuadraticForm> {
    assemble_with(mesh, fvals, Symmetry::None)
}

pub fn assemble_with(mesh: &Mesh, fvals: &[f64], sym: Symmetry) -> Result<QuadraticForm> {
    if fvals.len() != mesh.n_triangles() {
        return Err(Error::Dimension {
            expected: mesh.n_triangles(),
            got: fvals.len(),
        });
    }
    let (unit_of, n_units) = node_units(mesh, sym);
    if n_units == 0 {
        return Err(Error::EmptyFreeSpace);
    }
    let rank = order_units(mesh, &unit_of, n_units);
    let nn = mesh.n_nodes();
    let mut dof_map = vec![None; 2 * nn];
    for i in 0..nn {
        if let Some(u) = unit_of[i] {
            dof_map[2 * i] = Some(2 * rank[u]);
            dof_map[2 * i + 1] = Some(2 * rank[u] + 1);
        }
    }
    let n_free = 2 * n_units;
    let mut tk = Vec::with_capacity(mesh.n_triangles() * 36);
    let mut tb = Vec::with_capacity(mesh.n_triangles() * 36);
    for (t, tri) in mesh.triangles.iter().enumerate() {
        let g = &mesh.grads[t];
        let area = mesh.area[t];
        let f = fvals[t];
        for a in 0..3 {
            for b in 0..3 {
                let kab = area * (g[a][0] * g[b][0] + g[a][1] * g[b][1]);
                // det grad u = u1^T C u2 with C_ab = g_a0 g_b1 - g_a1 g_b0.
                let cab = 0.5 * area * f * (g[a][0] * g[b][1] - g[a][1] * g[b][0]);
                for ci in 0..2 {
                    for cj in 0..2 {
                        let (Some(r), Some(c)) =
                            (dof_map[2 * tri[a] + ci], dof_map[2 * tri[b] + cj])
                        else {
                            continue;
                        };
                        let k = if ci == cj { kab } else { 0.0 };
                        let bv = match (ci, cj) {
                            (0, 1) => cab,
                            (1, 0) => 0.5 * area * f * (g[b][0] * g[a][1] - g[b][1] * g[a][0]),
                            _ => 0.0,
                        };
                        tk.push((r, c, k));
                        tb.push((r, c, bv));
                    }
                }
            }
        }
    }
    let f_sup = fvals.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    Ok(QuadraticForm {
        n_free,
        k: Csr::from_triplets(n_free, tk),
        b: Csr::from_triplets(n_free, tb),
        dof_map,
        f_sup,
    })
}

/// Maps every interior node to a unit index.
fn node_units(mesh: &Mesh, sym: Symmetry) -> (Vec<Option<usize>>, usize) {
    let nn = mesh.n_nodes();
    let mut unit_of = vec![None; nn];
    let mut n_units = 0;
    let mut axis: HashMap<i64, usize> = HashMap::new();
    let key = |y: f64| (y * 1e9).round() as i64;
    let scale = mesh.max_edge().max(1e-300);
    for i in 0..nn {
        if mesh.boundary[i] {
            continue;
        }
        let p = mesh.nodes[i];
        if sym == Symmetry::MirrorOnAxis && p[0].abs() <= 1e-9 * scale {
            if let Some(&u) = axis.get(&key(p[1].abs())) {
                unit_of[i] = Some(u);
                continue;
            }
            axis.insert(key(p[1].abs()), n_units);
        }
        unit_of[i] = Some(n_units);
        n_units += 1;
    }
    (unit_of, n_units)
}

/// Rank of each unit in the ordering with the smallest envelope among the
/// construction order, a lexicographic `(y, x)` sort and reverse
/// Cuthill-McKee.
fn order_units(mesh: &Mesh, unit_of: &[Option<usize>], n_units: usize) -> Vec<usize> {
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n_units];
    for tri in &mesh.triangles {
        for a in 0..3 {
            for b in 0..3 {
                if let (Some(u), Some(v)) = (unit_of[tri[a]], unit_of[tri[b]]) {
                    if u != v {
                        adj[u].push(v);
                    }
                }
            }
        }
    }
    for a in adj.iter_mut() {
        a.sort_unstable();
        a.dedup();
    }
    let mut rep = vec![[0.0; 2]; n_units];
    let mut first_node = vec![usize::MAX; n_units];
    for (i, u) in unit_of.iter().enumerate() {
        if let Some(u) = *u {
            if first_node[u] == usize::MAX {
                first_node[u] = i;
                rep[u] = mesh.nodes[i];
            }
        }
    }
    let natural: Vec<usize> = (0..n_units).collect();
    let mut lex = natural.clone();
    lex.sort_by(|&a, &b| {
        rep[a][1]
            .total_cmp(&rep[b][1])
            .then(rep[a][0].total_cmp(&rep[b][0]))
    });
    let best = [natural, lex, rcm(&adj)]
        .into_iter()
        .min_by_key(|p| profile(&adj, p))
        .unwrap();
    let mut rank = vec![0; n_units];
    for (r, &u) in best.iter().enumerate() {
        rank[u] = r;
    }
    rank
}

/// `sum_T area_T det grad u_h` for a nodal field vanishing on the boundary.
pub fn det_integral(mesh: &Mesh, u: &[[f64; 2]]) -> Result<f64> {
    check_nodal(mesh, u)?;
    Ok((0..mesh.n_triangles())
        .map(|t| {
            let g = mesh.element_gradient(t, u);
            mesh.area[t] * (g[0][0] * g[1][1] - g[0][1] * g[1][0])
        })
        .sum())
}

/// `(int |grad u_h|^2, int f det grad u_h)` summed element by element,
/// without the assembled matrices.
pub fn element_energy(mesh: &Mesh, fvals: &[f64], u: &[[f64; 2]]) -> Result<(f64, f64)> {
    check_nodal(mesh, u)?;
    if fvals.len() != mesh.n_triangles() {
        return Err(Error::Dimension {
            expected: mesh.n_triangles(),
            got: fvals.len(),
        });
    }
    let mut dir = 0.0;
    let mut det = 0.0;
    for t in 0..mesh.n_triangles() {
        let g = mesh.element_gradient(t, u);
        dir += mesh.area[t] * (g[0][0].powi(2) + g[0][1].powi(2) + g[1][0].powi(2) + g[1][1].powi(2));
        det += mesh.area[t] * fvals[t] * (g[0][0] * g[1][1] - g[0][1] * g[1][0]);
    }
    Ok((dir, det))
}

fn check_nodal(mesh: &Mesh, u: &[[f64; 2]]) -> Result<()> {
    if u.len() != mesh.n_nodes() {
        return Err(Error::Dimension {
            expected: mesh.n_nodes(),
            got: u.len(),
        });
    }
    if let Some(i) = (0..u.len()).find(|&i| mesh.boundary[i] && (u[i][0] != 0.0 || u[i][1] != 0.0)) {
        return Err(Error::BoundaryValue(i));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{build_rect_mesh, Domain, Pattern};

    #[test]
    fn hat_function_stencil() {
        // 2x2 cells on the unit square, one-diagonal pattern: the centre hat
        // has Dirichlet energy 4 in each component.
        let m = build_rect_mesh(&Domain::unit_square(), 2, Pattern::Diagonal).unwrap();
        let q = assemble(&m, &vec![0.0; m.n_triangles()]).unwrap();
        assert_eq!(q.n_free, 2);
        assert!((q.k.get(0, 0) - 4.0).abs() < 1e-13);
        assert!((q.k.get(1, 1) - 4.0).abs() < 1e-13);
        assert_eq!(q.k.get(0, 1), 0.0);
    }

    #[test]
    fn forms_are_symmetric() {
        let m = build_rect_mesh(&Domain::unit_square(), 4, Pattern::CrissCross).unwrap();
        let f: Vec<f64> = (0..m.n_triangles()).map(|t| (t as f64).sin()).collect();
        let q = assemble(&m, &f).unwrap();
        assert!(q.k.is_symmetric());
        assert!(q.b.is_symmetric());
    }

    #[test]
    fn empty_free_space() {
        let m = build_rect_mesh(&Domain::unit_square(), 1, Pattern::Diagonal).unwrap();
        assert!(matches!(assemble(&m, &[0.0, 0.0]), Err(Error::EmptyFreeSpace)));
    }

    #[test]
    fn boundary_values_rejected() {
        let m = build_rect_mesh(&Domain::unit_square(), 2, Pattern::Diagonal).unwrap();
        let mut u = vec![[0.0; 2]; m.n_nodes()];
        u[0] = [1.0, 0.0];
        assert!(matches!(det_integral(&m, &u), Err(Error::BoundaryValue(0))));
    }

    #[test]
    fn mirror_constraint_identifies_axis_nodes() {
        let d = Domain::square(1.0, vec![0.0], vec![0.0]);
        let m = build_rect_mesh(&d, 2, Pattern::Diagonal).unwrap();
        let plain = assemble(&m, &vec![0.0; m.n_triangles()]).unwrap();
        let mir = assemble_with(&m, &vec![0.0; m.n_triangles()], Symmetry::MirrorOnAxis).unwrap();
        // Interior axis nodes sit at x2 = -0.5, 0, 0.5; one pair merges.
        assert_eq!(plain.n_free - mir.n_free, 2);
    }
}
