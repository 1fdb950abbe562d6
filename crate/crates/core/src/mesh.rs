//! Structured P1 triangulations of rectangle unions and of the deflected
//! three-band strip.
//!
//! Meshes are built on a tensor grid whose lines contain every rectangle edge
//! and every requested interface line, so piecewise-constant fields declared on
//! those lines are resolved exactly by the elements.

use std::collections::HashMap;
use std::io::{self, BufRead, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Rect {
    pub x0: f64,
    pub x1: f64,
    pub y0: f64,
    pub y1: f64,
}

impl Rect {
    pub fn new(x0: f64, x1: f64, y0: f64, y1: f64) -> Self {
        Rect { x0, x1, y0, y1 }
    }

    fn contains(&self, p: [f64; 2]) -> bool {
        p[0] > self.x0 && p[0] < self.x1 && p[1] > self.y0 && p[1] < self.y1
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Domain {
    /// Union of axis-aligned rectangles. `lines_x`/`lines_y` add interior
    /// mesh lines (field interfaces).
    Rects {
        rects: Vec<Rect>,
        #[serde(default)]
        lines_x: Vec<f64>,
        #[serde(default)]
        lines_y: Vec<f64>,
    },
    /// Three vertical bands of widths `widths`, centred on the origin, of
    /// height `height`. For `alpha != 0` the top and bottom edges of the middle
    /// band are bent into a roof of slope `tan(alpha)` with its apex over the
    /// band centre (outward for `alpha > 0`, a notch for `alpha < 0`).
    Strip {
        widths: [f64; 3],
        height: f64,
        #[serde(default)]
        alpha: f64,
    },
}

impl Domain {
    /// `(-h, h)^2` with optional interface lines.
    pub fn square(h: f64, lines_x: Vec<f64>, lines_y: Vec<f64>) -> Self {
        Domain::Rects {
            rects: vec![Rect::new(-h, h, -h, h)],
            lines_x,
            lines_y,
        }
    }

    pub fn unit_square() -> Self {
        Domain::Rects {
            rects: vec![Rect::new(0.0, 1.0, 0.0, 1.0)],
            lines_x: vec![],
            lines_y: vec![],
        }
    }

    /// Exact area of the domain.
    pub fn area(&self) -> Result<f64> {
        match self {
            Domain::Rects { rects, .. } => {
                let (xs, ys) = self.breakpoints()?;
                let mut a = 0.0;
                for j in 0..ys.len() - 1 {
                    for i in 0..xs.len() - 1 {
                        let c = [0.5 * (xs[i] + xs[i + 1]), 0.5 * (ys[j] + ys[j + 1])];
                        if rects.iter().any(|r| r.contains(c)) {
                            a += (xs[i + 1] - xs[i]) * (ys[j + 1] - ys[j]);
                        }
                    }
                }
                Ok(a)
            }
            Domain::Strip {
                widths,
                height,
                alpha,
            } => {
                let w: f64 = widths.iter().sum();
                Ok(w * height + 0.5 * widths[1] * widths[1] * alpha.tan())
            }
        }
    }

    fn validate(&self) -> Result<()> {
        match self {
            Domain::Rects { rects, .. } => {
                if rects.is_empty() {
                    return Err(Error::DegenerateDomain("no rectangles".into()));
                }
                for r in rects {
                    if !(r.x1 > r.x0 && r.y1 > r.y0) || !r.x0.is_finite() || !r.y1.is_finite() {
                        return Err(Error::DegenerateDomain(format!("{r:?}")));
                    }
                }
            }
            Domain::Strip {
                widths,
                height,
                alpha,
            } => {
                if widths.iter().any(|w| !(*w > 0.0)) || !(*height > 0.0) {
                    return Err(Error::DegenerateDomain(format!(
                        "strip widths {widths:?}, height {height}"
                    )));
                }
                if !(alpha.abs() < std::f64::consts::FRAC_PI_2) {
                    return Err(Error::BadAngle(*alpha));
                }
                if 1.0 + alpha.tan() * widths[1] / height <= 0.0 {
                    return Err(Error::BadAngle(*alpha));
                }
            }
        }
        Ok(())
    }

    /// Sorted, deduplicated grid lines before subdivision.
    fn breakpoints(&self) -> Result<(Vec<f64>, Vec<f64>)> {
        let (mut xs, mut ys) = match self {
            Domain::Rects {
                rects,
                lines_x,
                lines_y,
            } => {
                let mut xs: Vec<f64> = rects.iter().flat_map(|r| [r.x0, r.x1]).collect();
                let mut ys: Vec<f64> = rects.iter().flat_map(|r| [r.y0, r.y1]).collect();
                let (xlo, xhi) = min_max(&xs);
                let (ylo, yhi) = min_max(&ys);
                xs.extend(lines_x.iter().copied().filter(|x| *x > xlo && *x < xhi));
                ys.extend(lines_y.iter().copied().filter(|y| *y > ylo && *y < yhi));
                (xs, ys)
            }
            Domain::Strip {
                widths,
                height,
                alpha,
            } => {
                let w: f64 = widths.iter().sum();
                let x0 = -0.5 * w;
                let mut xs = vec![x0, x0 + widths[0], x0 + widths[0] + widths[1], 0.5 * w];
                if *alpha != 0.0 {
                    xs.push(x0 + widths[0] + 0.5 * widths[1]);
                }
                (xs, vec![-0.5 * height, 0.5 * height])
            }
        };
        for v in [&mut xs, &mut ys] {
            v.sort_by(f64::total_cmp);
            v.dedup_by(|a, b| (*a - *b).abs() <= 1e-14 * (1.0 + b.abs()));
        }
        if xs.len() < 2 || ys.len() < 2 {
            return Err(Error::DegenerateDomain("fewer than two grid lines".into()));
        }
        Ok((xs, ys))
    }

    fn includes(&self, c: [f64; 2]) -> bool {
        match self {
            Domain::Rects { rects, .. } => rects.iter().any(|r| r.contains(c)),
            Domain::Strip { .. } => true,
        }
    }
}

fn min_max(v: &[f64]) -> (f64, f64) {
    v.iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &x| {
            (lo.min(x), hi.max(x))
        })
}

/// How each grid cell is split into triangles.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Pattern {
    /// Two triangles per cell along the lower-left to upper-right diagonal.
    #[default]
    Diagonal,
    /// Four triangles per cell meeting at an added centre node.
    CrissCross,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Mesh {
    pub nodes: Vec<[f64; 2]>,
    /// Counterclockwise node triples.
    pub triangles: Vec<[usize; 3]>,
    pub boundary: Vec<bool>,
    pub area: Vec<f64>,
    /// Gradients of the three barycentric basis functions, one row per vertex.
    pub grads: Vec<[[f64; 2]; 3]>,
    pub region_tag: Vec<i32>,
}

/// Tensor grid used during construction.
struct Grid {
    xs: Vec<f64>,
    ys: Vec<f64>,
}

fn subdivide(breaks: &[f64], h: f64) -> Vec<f64> {
    let mut out = vec![breaks[0]];
    for w in breaks.windows(2) {
        let (a, b) = (w[0], w[1]);
        let pieces = ((b - a) / h).round().max(1.0) as usize;
        for k in 1..=pieces {
            out.push(if k == pieces {
                b
            } else {
                a + (b - a) * k as f64 / pieces as f64
            });
        }
    }
    out
}

/// Builds a conforming triangulation of `domain`. The shortest breakpoint
/// interval is divided into `n_div` pieces and every other interval gets the
/// nearest whole number of pieces of that size.
pub fn build_rect_mesh(domain: &Domain, n_div: usize, pattern: Pattern) -> Result<Mesh> {
    if n_div == 0 {
        return Err(Error::InvalidParameter("n_div must be at least 1".into()));
    }
    domain.validate()?;
    if domain.area()? <= 0.0 {
        return Err(Error::DegenerateDomain("zero area".into()));
    }
    let (bx, by) = domain.breakpoints()?;
    let shortest = bx
        .windows(2)
        .chain(by.windows(2))
        .map(|w| w[1] - w[0])
        .fold(f64::INFINITY, f64::min);
    let h = shortest / n_div as f64;
    let grid = Grid {
        xs: subdivide(&bx, h),
        ys: subdivide(&by, h),
    };
    let mut mesh = grid_mesh(&grid, |c| domain.includes(c), pattern)?;
    if let Domain::Strip {
        widths,
        height,
        alpha,
    } = domain
    {
        if *alpha != 0.0 {
            let w: f64 = widths.iter().sum();
            let xc = -0.5 * w + widths[0] + 0.5 * widths[1];
            let (half, t) = (0.5 * widths[1], alpha.tan());
            let hh = 0.5 * height;
            for p in mesh.nodes.iter_mut() {
                let d = (p[0] - xc).abs();
                if d <= half + 1e-12 * w {
                    p[1] *= 1.0 + t * (half - d).max(0.0) / hh;
                }
            }
            mesh.compute_geometry()?;
        }
    }
    Ok(mesh)
}

fn grid_mesh(grid: &Grid, include: impl Fn([f64; 2]) -> bool, pattern: Pattern) -> Result<Mesh> {
    let (nx, ny) = (grid.xs.len() - 1, grid.ys.len() - 1);
    let cell_in: Vec<bool> = (0..ny)
        .flat_map(|j| (0..nx).map(move |i| (i, j)))
        .map(|(i, j)| {
            include([
                0.5 * (grid.xs[i] + grid.xs[i + 1]),
                0.5 * (grid.ys[j] + grid.ys[j + 1]),
            ])
        })
        .collect();
    let cell = |i: isize, j: isize| -> bool {
        i >= 0 && j >= 0 && (i as usize) < nx && (j as usize) < ny && cell_in[j as usize * nx + i as usize]
    };

    let mut nodes = Vec::new();
    let mut boundary = Vec::new();
    let mut grid_id = vec![usize::MAX; (nx + 1) * (ny + 1)];
    let mut centre_id = vec![usize::MAX; nx * ny];
    for j in 0..=ny {
        for i in 0..=nx {
            let (ii, jj) = (i as isize, j as isize);
            let around = [
                cell(ii - 1, jj - 1),
                cell(ii, jj - 1),
                cell(ii - 1, jj),
                cell(ii, jj),
            ];
            if around.iter().any(|&b| b) {
                grid_id[j * (nx + 1) + i] = nodes.len();
                nodes.push([grid.xs[i], grid.ys[j]]);
                boundary.push(!around.iter().all(|&b| b));
            }
        }
        if j < ny && pattern == Pattern::CrissCross {
            for i in 0..nx {
                if cell_in[j * nx + i] {
                    centre_id[j * nx + i] = nodes.len();
                    nodes.push([
                        0.5 * (grid.xs[i] + grid.xs[i + 1]),
                        0.5 * (grid.ys[j] + grid.ys[j + 1]),
                    ]);
                    boundary.push(false);
                }
            }
        }
    }
    let mut triangles = Vec::new();
    for j in 0..ny {
        for i in 0..nx {
            if !cell_in[j * nx + i] {
                continue;
            }
            let g = |di: usize, dj: usize| grid_id[(j + dj) * (nx + 1) + i + di];
            let (a, b, d, e) = (g(0, 0), g(1, 0), g(1, 1), g(0, 1));
            match pattern {
                Pattern::Diagonal => {
                    triangles.push([a, b, d]);
                    triangles.push([a, d, e]);
                }
                Pattern::CrissCross => {
                    let c = centre_id[j * nx + i];
                    triangles.extend([[a, b, c], [b, d, c], [d, e, c], [e, a, c]]);
                }
            }
        }
    }
    Mesh::from_parts(nodes, triangles, boundary)
}

impl Mesh {
    /// Assembles a mesh and computes per-element geometry.
    pub fn from_parts(
        nodes: Vec<[f64; 2]>,
        triangles: Vec<[usize; 3]>,
        boundary: Vec<bool>,
    ) -> Result<Mesh> {
        let nt = triangles.len();
        let mut m = Mesh {
            nodes,
            triangles,
            boundary,
            area: vec![0.0; nt],
            grads: vec![[[0.0; 2]; 3]; nt],
            region_tag: vec![0; nt],
        };
        m.compute_geometry()?;
        Ok(m)
    }

    /// Recomputes areas and basis gradients from the current node positions.
    pub fn compute_geometry(&mut self) -> Result<()> {
        for (t, tri) in self.triangles.iter().enumerate() {
            let [p0, p1, p2] = tri.map(|k| self.nodes[k]);
            let d = (p1[0] - p0[0]) * (p2[1] - p0[1]) - (p2[0] - p0[0]) * (p1[1] - p0[1]);
            if !(d > 0.0) {
                return Err(Error::DegenerateDomain(format!(
                    "triangle {t} has non-positive orientation"
                )));
            }
            self.area[t] = 0.5 * d;
            self.grads[t] = [
                [(p1[1] - p2[1]) / d, (p2[0] - p1[0]) / d],
                [(p2[1] - p0[1]) / d, (p0[0] - p2[0]) / d],
                [(p0[1] - p1[1]) / d, (p1[0] - p0[0]) / d],
            ];
        }
        Ok(())
    }

    pub fn n_nodes(&self) -> usize {
        self.nodes.len()
    }

    pub fn n_triangles(&self) -> usize {
        self.triangles.len()
    }

    pub fn total_area(&self) -> f64 {
        self.area.iter().sum()
    }

    pub fn n_interior(&self) -> usize {
        self.boundary.iter().filter(|b| !**b).count()
    }

    pub fn centroid(&self, t: usize) -> [f64; 2] {
        let [a, b, c] = self.triangles[t].map(|k| self.nodes[k]);
        [(a[0] + b[0] + c[0]) / 3.0, (a[1] + b[1] + c[1]) / 3.0]
    }

    /// Longest edge length over all elements.
    pub fn max_edge(&self) -> f64 {
        self.triangles
            .iter()
            .flat_map(|t| [(t[0], t[1]), (t[1], t[2]), (t[2], t[0])])
            .map(|(a, b)| {
                let (p, q) = (self.nodes[a], self.nodes[b]);
                (p[0] - q[0]).hypot(p[1] - q[1])
            })
            .fold(0.0, f64::max)
    }

    /// Gradient of the P1 interpolant of `u` on element `t`, rows per component.
    pub fn element_gradient(&self, t: usize, u: &[[f64; 2]]) -> [[f64; 2]; 2] {
        let g = &self.grads[t];
        let mut out = [[0.0; 2]; 2];
        for (v, &k) in self.triangles[t].iter().enumerate() {
            for c in 0..2 {
                out[c][0] += u[k][c] * g[v][0];
                out[c][1] += u[k][c] * g[v][1];
            }
        }
        out
    }

    /// Applies `f` to every node and recomputes geometry. Boundary flags are
    /// kept.
    pub fn map_nodes(&self, f: impl Fn([f64; 2]) -> [f64; 2]) -> Result<Mesh> {
        let mut m = self.clone();
        for p in m.nodes.iter_mut() {
            *p = f(*p);
        }
        m.compute_geometry()?;
        Ok(m)
    }

    /// Writes the plain-text listing: a `nodes N` header, `x y boundary_flag`
    /// lines, a `triangles M` header and `i j k region_tag` lines.
    pub fn write_text(&self, mut w: impl Write) -> io::Result<()> {
        writeln!(w, "nodes {}", self.nodes.len())?;
        for (p, b) in self.nodes.iter().zip(&self.boundary) {
            writeln!(w, "{:.17e} {:.17e} {}", p[0], p[1], u8::from(*b))?;
        }
        writeln!(w, "triangles {}", self.triangles.len())?;
        for (t, tag) in self.triangles.iter().zip(&self.region_tag) {
            writeln!(w, "{} {} {} {}", t[0], t[1], t[2], tag)?;
        }
        Ok(())
    }

    /// Parses the listing written by [`Mesh::write_text`].
    pub fn read_text(r: impl BufRead) -> Result<Mesh> {
        let bad = |s: &str| Error::InvalidParameter(format!("mesh listing: {s}"));
        let mut lines = r.lines();
        let mut next = || -> Result<String> {
            lines
                .next()
                .ok_or_else(|| bad("truncated"))?
                .map_err(|e| bad(&e.to_string()))
        };
        let count = |l: String, name: &str| -> Result<usize> {
            let mut it = l.split_whitespace();
            if it.next() != Some(name) {
                return Err(bad(&format!("expected `{name}` header")));
            }
            it.next()
                .and_then(|s| s.parse().ok())
                .ok_or_else(|| bad("bad count"))
        };
        let nn = count(next()?, "nodes")?;
        let mut nodes = Vec::with_capacity(nn);
        let mut boundary = Vec::with_capacity(nn);
        for _ in 0..nn {
            let l = next()?;
            let f: Vec<&str> = l.split_whitespace().collect();
            if f.len() != 3 {
                return Err(bad(&l));
            }
            let x: f64 = f[0].parse().map_err(|_| bad(&l))?;
            let y: f64 = f[1].parse().map_err(|_| bad(&l))?;
            nodes.push([x, y]);
            boundary.push(f[2] == "1");
        }
        let nt = count(next()?, "triangles")?;
        let mut triangles = Vec::with_capacity(nt);
        let mut tags = Vec::with_capacity(nt);
        for _ in 0..nt {
            let l = next()?;
            let f: Vec<i64> = l
                .split_whitespace()
                .map(|s| s.parse().map_err(|_| bad(&l)))
                .collect::<Result<_>>()?;
            if f.len() != 4 || f[..3].iter().any(|&k| k < 0 || k as usize >= nn) {
                return Err(bad(&l));
            }
            triangles.push([f[0] as usize, f[1] as usize, f[2] as usize]);
            tags.push(f[3] as i32);
        }
        let mut m = Mesh::from_parts(nodes, triangles, boundary)?;
        m.region_tag = tags;
        Ok(m)
    }

    /// One level of red refinement: every triangle is split into four by its
    /// edge midpoints. A midpoint is a boundary node iff its edge belongs to a
    /// single triangle.
    pub fn refine(&self) -> Result<Mesh> {
        let key = |a: usize, b: usize| (a.min(b), a.max(b));
        let mut uses: HashMap<(usize, usize), u8> = HashMap::new();
        for t in &self.triangles {
            for (a, b) in [(t[0], t[1]), (t[1], t[2]), (t[2], t[0])] {
                *uses.entry(key(a, b)).or_default() += 1;
            }
        }
        let mut nodes = self.nodes.clone();
        let mut boundary = self.boundary.clone();
        let mut mid: HashMap<(usize, usize), usize> = HashMap::with_capacity(uses.len());
        let mut midpoint = |a: usize, b: usize, nodes: &mut Vec<[f64; 2]>| -> usize {
            *mid.entry(key(a, b)).or_insert_with(|| {
                let (p, q) = (nodes[a], nodes[b]);
                nodes.push([0.5 * (p[0] + q[0]), 0.5 * (p[1] + q[1])]);
                boundary.push(uses[&key(a, b)] == 1);
                nodes.len() - 1
            })
        };
        let mut triangles = Vec::with_capacity(4 * self.triangles.len());
        let mut tags = Vec::with_capacity(4 * self.triangles.len());
        for (t, &[a, b, c]) in self.triangles.iter().enumerate() {
            let ab = midpoint(a, b, &mut nodes);
            let bc = midpoint(b, c, &mut nodes);
            let ca = midpoint(c, a, &mut nodes);
            triangles.extend([[a, ab, ca], [ab, b, bc], [ca, bc, c], [ab, bc, ca]]);
            tags.extend([self.region_tag[t]; 4]);
        }
        let mut m = Mesh::from_parts(nodes, triangles, boundary)?;
        m.region_tag = tags;
        Ok(m)
    }

    /// Applies `levels` rounds of red refinement.
    pub fn refined(&self, levels: usize) -> Result<Mesh> {
        let mut m = self.clone();
        for _ in 0..levels {
            m = m.refine()?;
        }
        Ok(m)
    }
}
