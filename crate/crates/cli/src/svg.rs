//! Hand-written SVG output: element colour maps, deformed meshes and line
//! charts. Numbers are printed with fixed precision so output is byte-stable.

use std::fmt::Write;

use himlab::mesh::Mesh;

const SIZE: f64 = 480.0;
const PAD: f64 = 40.0;

/// Blue-white-red colour for `t` in `[-1, 1]`.
pub fn diverging(t: f64) -> (u8, u8, u8) {
    let t = t.clamp(-1.0, 1.0);
    let mix = |a: f64, b: f64, s: f64| (a + (b - a) * s).round() as u8;
    if t < 0.0 {
        let s = -t;
        (mix(255.0, 33.0, s), mix(255.0, 102.0, s), mix(255.0, 172.0, s))
    } else {
        (mix(255.0, 178.0, t), mix(255.0, 24.0, t), mix(255.0, 43.0, t))
    }
}

struct Frame {
    x0: f64,
    y1: f64,
    scale: f64,
}

impl Frame {
    fn fit(points: impl Iterator<Item = [f64; 2]>) -> Frame {
        let (mut x0, mut x1, mut y0, mut y1) = (f64::MAX, f64::MIN, f64::MAX, f64::MIN);
        for p in points {
            x0 = x0.min(p[0]);
            x1 = x1.max(p[0]);
            y0 = y0.min(p[1]);
            y1 = y1.max(p[1]);
        }
        let span = (x1 - x0).max(y1 - y0).max(1e-12);
        Frame {
            x0,
            y1,
            scale: (SIZE - 2.0 * PAD) / span,
        }
    }

    fn map(&self, p: [f64; 2]) -> (f64, f64) {
        (PAD + (p[0] - self.x0) * self.scale, PAD + (self.y1 - p[1]) * self.scale)
    }
}

fn header(title: &str, width: f64, height: f64) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width:.0}" height="{height:.0}" viewBox="0 0 {width:.0} {height:.0}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(s, r#"<text x="{:.1}" y="20" text-anchor="middle">{}</text>"#, width / 2.0, escape(title));
    s
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn triangle(s: &mut String, fr: &Frame, p: [[f64; 2]; 3], fill: &str, stroke: &str) {
    let q: Vec<(f64, f64)> = p.iter().map(|&v| fr.map(v)).collect();
    let _ = writeln!(
        s,
        r#"<polygon points="{:.2},{:.2} {:.2},{:.2} {:.2},{:.2}" fill="{fill}" stroke="{stroke}" stroke-width="0.3"/>"#,
        q[0].0, q[0].1, q[1].0, q[1].1, q[2].0, q[2].1
    );
}

/// Elements coloured by `values`, symmetric about zero.
pub fn element_map(mesh: &Mesh, values: &[f64], title: &str) -> String {
    let fr = Frame::fit(mesh.nodes.iter().copied());
    let vmax = values.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    let mut s = header(&format!("{title} (|max| = {vmax:.4e})"), SIZE, SIZE);
    let outline = if mesh.n_triangles() > 5000 { "none" } else { "#555" };
    for (t, tri) in mesh.triangles.iter().enumerate() {
        let (r, g, b) = diverging(if vmax > 0.0 { values[t] / vmax } else { 0.0 });
        let p = [mesh.nodes[tri[0]], mesh.nodes[tri[1]], mesh.nodes[tri[2]]];
        triangle(&mut s, &fr, p, &format!("#{r:02x}{g:02x}{b:02x}"), outline);
    }
    s.push_str("</svg>\n");
    s
}

/// Positive multiple of `u` whose largest nodal displacement is a tenth of
/// the domain diameter. A zero field is returned unchanged.
pub fn rescale(mesh: &Mesh, u: &[[f64; 2]]) -> Vec<[f64; 2]> {
    let umax = u.iter().fold(0.0_f64, |m, v| m.max(v[0].hypot(v[1])));
    if umax == 0.0 {
        return u.to_vec();
    }
    let (mut x0, mut x1, mut y0, mut y1) = (f64::MAX, f64::MIN, f64::MAX, f64::MIN);
    for p in &mesh.nodes {
        x0 = x0.min(p[0]);
        x1 = x1.max(p[0]);
        y0 = y0.min(p[1]);
        y1 = y1.max(p[1]);
    }
    let k = 0.1 * (x1 - x0).hypot(y1 - y0) / umax;
    u.iter().map(|v| [k * v[0], k * v[1]]).collect()
}

/// The mesh moved by `x -> x + u` over the undeformed mesh in grey.
pub fn deformed_mesh(mesh: &Mesh, u: &[[f64; 2]], title: &str) -> String {
    let moved: Vec<[f64; 2]> = mesh
        .nodes
        .iter()
        .zip(u)
        .map(|(p, v)| [p[0] + v[0], p[1] + v[1]])
        .collect();
    let fr = Frame::fit(mesh.nodes.iter().chain(moved.iter()).copied());
    let mut s = header(title, SIZE, SIZE);
    for tri in &mesh.triangles {
        let p = [mesh.nodes[tri[0]], mesh.nodes[tri[1]], mesh.nodes[tri[2]]];
        triangle(&mut s, &fr, p, "none", "#ccc");
    }
    for tri in &mesh.triangles {
        let p = [moved[tri[0]], moved[tri[1]], moved[tri[2]]];
        triangle(&mut s, &fr, p, "none", "#1f4e9c");
    }
    s.push_str("</svg>\n");
    s
}

pub struct Series {
    pub label: String,
    pub points: Vec<(f64, f64)>,
}

const COLOURS: [&str; 4] = ["#1f4e9c", "#b2182b", "#2b8a3e", "#7b3294"];

fn nice_range(lo: f64, hi: f64) -> (f64, f64) {
    if (hi - lo).abs() < 1e-12 {
        let d = 0.5 * lo.abs().max(1.0);
        return (lo - d, hi + d);
    }
    let pad = 0.05 * (hi - lo);
    (lo - pad, hi + pad)
}

fn chart_body(s: &mut String, ox: f64, title: &str, xlabel: &str, ylabel: &str, series: &[Series], log_x: bool) {
    let (w, h) = (SIZE, SIZE * 0.75);
    let (left, top) = (ox + 64.0, 40.0);
    let (pw, ph) = (w - 64.0 - 24.0, h - 40.0 - 48.0);
    let tx = |x: f64| if log_x { x.log2() } else { x };
    let pts = series.iter().flat_map(|s| s.points.iter().copied());
    let (mut x0, mut x1, mut y0, mut y1) = (f64::MAX, f64::MIN, f64::MAX, f64::MIN);
    for (x, y) in pts {
        x0 = x0.min(tx(x));
        x1 = x1.max(tx(x));
        y0 = y0.min(y);
        y1 = y1.max(y);
    }
    if x0 > x1 {
        (x0, x1, y0, y1) = (0.0, 1.0, 0.0, 1.0);
    }
    let (x0, x1) = nice_range(x0, x1);
    let (y0, y1) = nice_range(y0, y1);
    let px = |x: f64| left + (tx(x) - x0) / (x1 - x0) * pw;
    let py = |y: f64| top + (y1 - y) / (y1 - y0) * ph;
    let _ = writeln!(s, r#"<text x="{:.1}" y="24" text-anchor="middle">{}</text>"#, left + pw / 2.0, escape(title));
    let _ = writeln!(s, r##"<rect x="{left:.1}" y="{top:.1}" width="{pw:.1}" height="{ph:.1}" fill="none" stroke="#333"/>"##);
    for i in 0..=4 {
        let y = y0 + (y1 - y0) * i as f64 / 4.0;
        let _ = writeln!(s, r#"<text x="{:.1}" y="{:.1}" text-anchor="end">{y:.4}</text>"#, left - 4.0, py(y) + 4.0);
        let xv = x0 + (x1 - x0) * i as f64 / 4.0;
        let xl = if log_x { 2f64.powf(xv) } else { xv };
        let xpos = left + pw * i as f64 / 4.0;
        let _ = writeln!(s, r#"<text x="{xpos:.1}" y="{:.1}" text-anchor="middle">{xl:.4}</text>"#, top + ph + 16.0);
    }
    let _ = writeln!(s, r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">{}</text>"#, left + pw / 2.0, top + ph + 36.0, escape(xlabel));
    let _ = writeln!(
        s,
        r#"<text x="{:.1}" y="{:.1}" text-anchor="middle" transform="rotate(-90 {:.1} {:.1})">{}</text>"#,
        ox + 14.0,
        top + ph / 2.0,
        ox + 14.0,
        top + ph / 2.0,
        escape(ylabel)
    );
    for (k, ser) in series.iter().enumerate() {
        let c = COLOURS[k % COLOURS.len()];
        let path: Vec<String> = ser.points.iter().map(|&(x, y)| format!("{:.2},{:.2}", px(x), py(y))).collect();
        let _ = writeln!(s, r#"<polyline points="{}" fill="none" stroke="{c}" stroke-width="1.5"/>"#, path.join(" "));
        for &(x, y) in &ser.points {
            let _ = writeln!(s, r#"<circle cx="{:.2}" cy="{:.2}" r="3" fill="{c}"/>"#, px(x), py(y));
        }
        let _ = writeln!(
            s,
            r#"<text x="{:.1}" y="{:.1}" fill="{c}">{}</text>"#,
            left + 8.0,
            top + 16.0 + 14.0 * k as f64,
            escape(&ser.label)
        );
    }
}

pub fn line_chart(title: &str, xlabel: &str, ylabel: &str, series: &[Series], log_x: bool) -> String {
    let mut s = header("", SIZE, SIZE * 0.75);
    chart_body(&mut s, 0.0, title, xlabel, ylabel, series, log_x);
    s.push_str("</svg>\n");
    s
}

/// Two charts side by side; each entry is `(title, xlabel, ylabel, series)`.
pub fn dual_chart(left: (&str, &str, &str, &[Series]), right: (&str, &str, &str, &[Series])) -> String {
    let mut s = header("", 2.0 * SIZE, SIZE * 0.75);
    chart_body(&mut s, 0.0, left.0, left.1, left.2, left.3, false);
    chart_body(&mut s, SIZE, right.0, right.1, right.2, right.3, false);
    s.push_str("</svg>\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use himlab::mesh::{build_rect_mesh, Domain, Pattern};

    #[test]
    fn zero_witness_leaves_mesh_in_place() {
        let mesh = build_rect_mesh(&Domain::unit_square(), 2, Pattern::Diagonal).unwrap();
        let u = rescale(&mesh, &vec![[0.0; 2]; mesh.n_nodes()]);
        let svg = deformed_mesh(&mesh, &u, "zero");
        let polys: Vec<&str> = svg.lines().filter(|l| l.starts_with("<polygon")).collect();
        let n = mesh.n_triangles();
        for i in 0..n {
            let strip = |l: &str| l.split("fill").next().unwrap().to_string();
            assert_eq!(strip(polys[i]), strip(polys[n + i]));
        }
    }

    #[test]
    fn rescale_keeps_sign_and_hits_a_tenth_of_the_diameter() {
        let mesh = build_rect_mesh(&Domain::unit_square(), 2, Pattern::Diagonal).unwrap();
        let mut u = vec![[0.0; 2]; mesh.n_nodes()];
        u[4] = [0.003, -0.004];
        let r = rescale(&mesh, &u);
        assert!(r[4][0] > 0.0 && r[4][1] < 0.0);
        assert!((r[4][0].hypot(r[4][1]) - 0.1 * 2f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn output_is_deterministic() {
        let mesh = build_rect_mesh(&Domain::unit_square(), 3, Pattern::CrissCross).unwrap();
        let v: Vec<f64> = (0..mesh.n_triangles()).map(|t| (t as f64).sin()).collect();
        assert_eq!(element_map(&mesh, &v, "f"), element_map(&mesh, &v, "f"));
        let s = [Series {
            label: "a".into(),
            points: vec![(256.0, 1.33), (1024.0, 1.2), (4096.0, 1.14)],
        }];
        let c = line_chart("t", "elements", "lambda", &s, true);
        assert!(c.contains("<polyline") && c.ends_with("</svg>\n"));
    }
}
