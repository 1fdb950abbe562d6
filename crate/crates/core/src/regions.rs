//! Piecewise-constant weight fields `f` and their per-element evaluation.
//!
//! Unless stated otherwise a field lives on `Q = (-1, 1)^2`. `natural_domain`
//! returns that domain together with every interface line, so a mesh built
//! from it is aligned with the field.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mesh::{Domain, Mesh, Rect};

const SQRT8: f64 = 2.828_427_124_746_190_3;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "kebab-case")]
pub enum Island {
    Rect(Rect),
    /// Disk island. Meshes can only approximate it, so alignment checks are
    /// skipped and the interface error is O(h).
    Disk { centre: [f64; 2], radius: f64 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum FieldSpec {
    Constant {
        c: f64,
    },
    /// `M` on the island, zero elsewhere.
    TwoStateIsland {
        island: Island,
        #[serde(rename = "m")]
        m_value: f64,
    },
    /// `M` on the upper half `x2 > 0`.
    HalfDomain {
        #[serde(rename = "m")]
        m_value: f64,
    },
    /// Three vertical bands with values `-c`, `0`, `c` from left to right,
    /// laid out by [`Domain::Strip`] with height 2.
    Insulation {
        w_minus: f64,
        w_zero: f64,
        w_plus: f64,
        #[serde(default)]
        alpha: f64,
        c: f64,
    },
    /// Quadrant values `(Q1, Q2, Q3, Q4) = (-c, 0, c, 0)`.
    PointContact {
        c: f64,
    },
    /// `m x m` subsquares; square `(i, j)` (1-based, from the left and from
    /// the bottom) carries `sqrt(8) ((i + j) - (m + 1))`.
    DiagonalGrid {
        m: usize,
    },
    Scaled {
        lambda: f64,
        inner: Box<FieldSpec>,
    },
}

impl FieldSpec {
    /// Insulation field on `Q` with `w_-4 = w_4` and `rho = w_0 / w_4`.
    pub fn insulation_rho(rho: f64, alpha: f64, c: f64) -> Result<FieldSpec> {
        if !(rho > 0.0 && rho.is_finite()) {
            return Err(Error::InvalidParameter(format!("rho = {rho}")));
        }
        let w4 = 2.0 / (2.0 + rho);
        Ok(FieldSpec::Insulation {
            w_minus: w4,
            w_zero: 2.0 * rho / (2.0 + rho),
            w_plus: w4,
            alpha,
            c,
        })
    }

    pub fn scaled(self, lambda: f64) -> FieldSpec {
        FieldSpec::Scaled {
            lambda,
            inner: Box::new(self),
        }
    }

    fn validate(&self) -> Result<()> {
        match self {
            FieldSpec::DiagonalGrid { m } if *m < 2 => Err(Error::InvalidParameter(format!(
                "DiagonalGrid needs m >= 2, got {m}"
            ))),
            FieldSpec::Insulation {
                w_minus,
                w_zero,
                w_plus,
                ..
            } if [w_minus, w_zero, w_plus].iter().any(|w| !(**w > 0.0)) => Err(
                Error::InvalidParameter("insulation widths must be positive".into()),
            ),
            FieldSpec::Scaled { inner, .. } => inner.validate(),
            _ => Ok(()),
        }
    }

    /// The domain the field is defined on, with every interface as a grid line.
    pub fn natural_domain(&self) -> Domain {
        match self {
            FieldSpec::Constant { .. } => Domain::square(1.0, vec![], vec![]),
            FieldSpec::TwoStateIsland { island, .. } => match island {
                Island::Rect(r) => Domain::square(1.0, vec![r.x0, r.x1], vec![r.y0, r.y1]),
                Island::Disk { .. } => Domain::square(1.0, vec![], vec![]),
            },
            FieldSpec::HalfDomain { .. } => Domain::square(1.0, vec![], vec![0.0]),
            FieldSpec::Insulation {
                w_minus,
                w_zero,
                w_plus,
                alpha,
                ..
            } => Domain::Strip {
                widths: [*w_minus, *w_zero, *w_plus],
                height: 2.0,
                alpha: *alpha,
            },
            FieldSpec::PointContact { .. } => Domain::square(1.0, vec![0.0], vec![0.0]),
            FieldSpec::DiagonalGrid { m } => {
                let lines: Vec<f64> = (1..*m).map(|k| -1.0 + 2.0 * k as f64 / *m as f64).collect();
                Domain::square(1.0, lines.clone(), lines)
            }
            FieldSpec::Scaled { inner, .. } => inner.natural_domain(),
        }
    }

    /// Region index and value at `p`.
    pub fn locate(&self, p: [f64; 2]) -> Result<(i32, f64)> {
        self.validate()?;
        self.locate_unchecked(p)
    }

    fn locate_unchecked(&self, p: [f64; 2]) -> Result<(i32, f64)> {
        let on = |a: f64, b: f64| (a - b).abs() <= 1e-12 * (1.0 + b.abs());
        let iface = || Error::InterfacePoint(p[0], p[1]);
        let [x, y] = p;
        match self {
            FieldSpec::Constant { c } => Ok((0, *c)),
            FieldSpec::TwoStateIsland { island, m_value } => {
                let inside = match island {
                    Island::Rect(r) => {
                        let on_x = (on(x, r.x0) || on(x, r.x1)) && y >= r.y0 && y <= r.y1;
                        let on_y = (on(y, r.y0) || on(y, r.y1)) && x >= r.x0 && x <= r.x1;
                        if on_x || on_y {
                            return Err(iface());
                        }
                        x > r.x0 && x < r.x1 && y > r.y0 && y < r.y1
                    }
                    Island::Disk { centre, radius } => {
                        let d = (x - centre[0]).hypot(y - centre[1]);
                        if on(d, *radius) {
                            return Err(iface());
                        }
                        d < *radius
                    }
                };
                Ok(if inside { (1, *m_value) } else { (0, 0.0) })
            }
            FieldSpec::HalfDomain { m_value } => {
                if on(y, 0.0) {
                    return Err(iface());
                }
                Ok(if y > 0.0 { (1, *m_value) } else { (0, 0.0) })
            }
            FieldSpec::Insulation {
                w_minus,
                w_zero,
                w_plus,
                c,
                ..
            } => {
                let a = -0.5 * (w_minus + w_zero + w_plus) + w_minus;
                let b = a + w_zero;
                if on(x, a) || on(x, b) {
                    return Err(iface());
                }
                Ok(if x < a {
                    (0, -c)
                } else if x < b {
                    (1, 0.0)
                } else {
                    (2, *c)
                })
            }
            FieldSpec::PointContact { c } => {
                if on(x, 0.0) || on(y, 0.0) {
                    return Err(iface());
                }
                Ok(match (x > 0.0, y > 0.0) {
                    (true, true) => (1, -c),
                    (false, true) => (2, 0.0),
                    (false, false) => (3, *c),
                    (true, false) => (4, 0.0),
                })
            }
            FieldSpec::DiagonalGrid { m } => {
                let s = 0.5 * (*m as f64);
                let (u, v) = ((x + 1.0) * s, (y + 1.0) * s);
                if on(u, u.round()) || on(v, v.round()) {
                    return Err(iface());
                }
                let i = (u.floor() as i64).clamp(0, *m as i64 - 1) + 1;
                let j = (v.floor() as i64).clamp(0, *m as i64 - 1) + 1;
                let val = SQRT8 * ((i + j) - (*m as i64 + 1)) as f64;
                Ok((((j - 1) * *m as i64 + (i - 1)) as i32, val))
            }
            FieldSpec::Scaled { lambda, inner } => {
                let (r, v) = inner.locate_unchecked(p)?;
                Ok((r, lambda * v))
            }
        }
    }

    /// Largest value taken, in closed form.
    pub fn max_value(&self) -> f64 {
        self.range().1
    }

    pub fn min_value(&self) -> f64 {
        self.range().0
    }

    /// Total variation `max f - min f`, in closed form.
    pub fn total_variation(&self) -> f64 {
        let (lo, hi) = self.range();
        hi - lo
    }

    /// Largest `|f|`.
    pub fn sup_norm(&self) -> f64 {
        let (lo, hi) = self.range();
        lo.abs().max(hi.abs())
    }

    fn range(&self) -> (f64, f64) {
        match self {
            FieldSpec::Constant { c } => (*c, *c),
            FieldSpec::TwoStateIsland { m_value, .. } | FieldSpec::HalfDomain { m_value } => {
                (m_value.min(0.0), m_value.max(0.0))
            }
            FieldSpec::Insulation { c, .. } | FieldSpec::PointContact { c } => (-c.abs(), c.abs()),
            FieldSpec::DiagonalGrid { m } => {
                let t = SQRT8 * (*m as f64 - 1.0);
                (-t, t)
            }
            FieldSpec::Scaled { lambda, inner } => {
                let (lo, hi) = inner.range();
                if *lambda >= 0.0 {
                    (lambda * lo, lambda * hi)
                } else {
                    (lambda * hi, lambda * lo)
                }
            }
        }
    }

    fn is_approximate(&self) -> bool {
        match self {
            FieldSpec::TwoStateIsland {
                island: Island::Disk { .. },
                ..
            } => true,
            FieldSpec::Scaled { inner, .. } => inner.is_approximate(),
            _ => false,
        }
    }
}

/// Value of `spec` at `p`. Points on an interface are rejected.
pub fn field_at(spec: &FieldSpec, p: [f64; 2]) -> Result<f64> {
    spec.locate(p).map(|(_, v)| v)
}

/// Per-element values, checked for alignment. Besides the centroid, points
/// just inside each vertex and each edge midpoint must lie in the same
/// region; otherwise the element straddles an interface.
pub fn element_values(spec: &FieldSpec, mesh: &Mesh) -> Result<Vec<f64>> {
    tagged_values(spec, mesh).map(|(_, v)| v)
}

/// Writes region indices into `mesh.region_tag` and returns the element values.
pub fn tag_mesh(spec: &FieldSpec, mesh: &mut Mesh) -> Result<Vec<f64>> {
    let (tags, vals) = tagged_values(spec, mesh)?;
    mesh.region_tag = tags;
    Ok(vals)
}

fn tagged_values(spec: &FieldSpec, mesh: &Mesh) -> Result<(Vec<i32>, Vec<f64>)> {
    spec.validate()?;
    let check = !spec.is_approximate();
    let mut tags = Vec::with_capacity(mesh.n_triangles());
    let mut vals = Vec::with_capacity(mesh.n_triangles());
    const PULL: f64 = 1e-6;
    for t in 0..mesh.n_triangles() {
        let c = mesh.centroid(t);
        let (tag, val) = spec
            .locate_unchecked(c)
            .map_err(|_| Error::StraddlingElement(t))?;
        if check {
            let v = mesh.triangles[t].map(|k| mesh.nodes[k]);
            let mids = [0, 1, 2].map(|k| {
                let (a, b) = (v[k], v[(k + 1) % 3]);
                [0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1])]
            });
            for q in v.iter().chain(&mids) {
                let s = [q[0] + PULL * (c[0] - q[0]), q[1] + PULL * (c[1] - q[1])];
                match spec.locate_unchecked(s) {
                    Ok((r, _)) if r == tag => {}
                    _ => return Err(Error::StraddlingElement(t)),
                }
            }
        }
        tags.push(tag);
        vals.push(val);
    }
    Ok((tags, vals))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{build_rect_mesh, Pattern};

    #[test]
    fn point_values() {
        assert_eq!(field_at(&FieldSpec::Constant { c: 3.0 }, [0.2, 0.1]).unwrap(), 3.0);
        let f2 = FieldSpec::DiagonalGrid { m: 2 };
        assert!((field_at(&f2, [0.5, 0.5]).unwrap() - SQRT8).abs() < 1e-15);
        assert!((field_at(&f2, [-0.5, -0.5]).unwrap() + SQRT8).abs() < 1e-15);
        assert_eq!(field_at(&f2, [-0.5, 0.5]).unwrap(), 0.0);
        let s = FieldSpec::PointContact { c: SQRT8 }.scaled(2.0);
        assert!((field_at(&s, [-0.3, -0.3]).unwrap() - 2.0 * SQRT8).abs() < 1e-15);
    }

    #[test]
    fn interface_points_rejected() {
        let f = FieldSpec::PointContact { c: 1.0 };
        assert!(matches!(field_at(&f, [0.0, 0.5]), Err(Error::InterfacePoint(..))));
        let g = FieldSpec::DiagonalGrid { m: 4 };
        assert!(field_at(&g, [0.5, 0.1]).is_err());
    }

    #[test]
    fn half_domain_elements() {
        let f = FieldSpec::HalfDomain { m_value: 4.0 };
        let mesh = build_rect_mesh(&f.natural_domain(), 4, Pattern::Diagonal).unwrap();
        let v = element_values(&f, &mesh).unwrap();
        for t in 0..mesh.n_triangles() {
            let c = mesh.centroid(t);
            assert_eq!(v[t], if c[1] > 0.0 { 4.0 } else { 0.0 });
        }
    }

    #[test]
    fn misaligned_mesh_detected() {
        let f = FieldSpec::HalfDomain { m_value: 4.0 };
        // Three cells across the height put the interface inside a cell row.
        let d = Domain::Rects {
            rects: vec![Rect::new(-1.0, 1.0, -1.0, 1.0)],
            lines_x: vec![],
            lines_y: vec![],
        };
        let mesh = build_rect_mesh(&d, 3, Pattern::Diagonal).unwrap();
        assert!(matches!(element_values(&f, &mesh), Err(Error::StraddlingElement(_))));
    }

    #[test]
    fn diagonal_grid_extremes() {
        let f = FieldSpec::DiagonalGrid { m: 5 };
        let mesh = build_rect_mesh(&f.natural_domain(), 1, Pattern::Diagonal).unwrap();
        let v = element_values(&f, &mesh).unwrap();
        let max = v.iter().cloned().fold(f64::MIN, f64::max);
        assert!((max - SQRT8 * 4.0).abs() < 1e-12);
        // Largest jump between squares sharing a corner.
        let val = |i: i64, j: i64| SQRT8 * ((i + j) - 6) as f64;
        let mut jump: f64 = 0.0;
        for i in 1..=5 {
            for j in 1..=5 {
                for (di, dj) in [(1, 1), (1, -1), (1, 0), (0, 1)] {
                    let (a, b) = (i + di, j + dj);
                    if (1..=5).contains(&a) && (1..=5).contains(&b) {
                        jump = jump.max((val(i, j) - val(a, b)).abs());
                    }
                }
            }
        }
        assert!(jump <= 2.0 * SQRT8 + 1e-12);
        assert!((f.total_variation() - 2.0 * SQRT8 * 4.0).abs() < 1e-12);
    }

    #[test]
    fn insulation_from_rho() {
        let f = FieldSpec::insulation_rho(2.0, 0.0, 4.0).unwrap();
        if let FieldSpec::Insulation { w_minus, w_zero, .. } = f {
            assert!((w_minus - 0.5).abs() < 1e-15 && (w_zero - 1.0).abs() < 1e-15);
        }
        assert_eq!(field_at(&f, [-0.9, 0.3]).unwrap(), -4.0);
        assert_eq!(field_at(&f, [0.2, 0.3]).unwrap(), 0.0);
        assert_eq!(field_at(&f, [0.9, 0.3]).unwrap(), 4.0);
    }

    #[test]
    fn toml_round_trip() {
        let f = FieldSpec::TwoStateIsland {
            island: Island::Rect(Rect::new(-0.5, 0.5, -0.25, 0.25)),
            m_value: 4.8,
        }
        .scaled(0.5);
        let s = toml::to_string(&f).unwrap();
        let back: FieldSpec = toml::from_str(&s).unwrap();
        assert_eq!(back, f);
    }
}
