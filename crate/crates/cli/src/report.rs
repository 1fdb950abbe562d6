//! CSV tables and nodal field files.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use himlab::mesh::Mesh;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::CliError;

/// Per-element energy densities of a nodal field.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ElementRow {
    pub element: usize,
    pub x: f64,
    pub y: f64,
    pub area: f64,
    pub f: f64,
    /// `|grad u|^2`.
    pub grad2: f64,
    pub det: f64,
    /// `|grad u|^2 + f det grad u`.
    pub integrand: f64,
}

pub fn element_rows(mesh: &Mesh, fvals: &[f64], u: Option<&[[f64; 2]]>) -> Vec<ElementRow> {
    (0..mesh.n_triangles())
        .map(|t| {
            let c = mesh.centroid(t);
            let (grad2, det) = match u {
                Some(u) => {
                    let g = mesh.element_gradient(t, u);
                    (
                        g[0][0] * g[0][0] + g[0][1] * g[0][1] + g[1][0] * g[1][0] + g[1][1] * g[1][1],
                        g[0][0] * g[1][1] - g[0][1] * g[1][0],
                    )
                }
                None => (0.0, 0.0),
            };
            ElementRow {
                element: t,
                x: c[0],
                y: c[1],
                area: mesh.area[t],
                f: fvals[t],
                grad2,
                det,
                integrand: grad2 + fvals[t] * det,
            }
        })
        .collect()
}

/// One row of a lambda sweep over mesh levels or of a grid study.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub family: String,
    pub mesh_level: usize,
    pub elements: usize,
    pub m: Option<usize>,
    pub lambda: f64,
    pub delta_f: Option<f64>,
}

pub fn write_csv<T: Serialize>(path: &Path, rows: &[T]) -> Result<(), CliError> {
    let mut w = csv::Writer::from_path(path).map_err(|e| CliError::Other(format!("{}: {e}", path.display())))?;
    for r in rows {
        w.serialize(r)
            .map_err(|e| CliError::Other(format!("{}: {e}", path.display())))?;
    }
    w.flush().map_err(|e| CliError::io(path, e))
}

pub fn read_csv<T: DeserializeOwned>(path: &Path) -> Result<Vec<T>, CliError> {
    let mut r = csv::Reader::from_path(path).map_err(|e| CliError::Other(format!("{}: {e}", path.display())))?;
    r.deserialize()
        .map(|row| {
            row.map_err(|e| CliError::Parse {
                origin: path.display().to_string(),
                message: e.to_string(),
            })
        })
        .collect()
}

/// Nodal field file: one `x y u1 u2` line per mesh node, in node order.
pub fn write_nodal(path: &Path, mesh: &Mesh, u: &[[f64; 2]]) -> Result<(), CliError> {
    let f = File::create(path).map_err(|e| CliError::io(path, e))?;
    let mut w = BufWriter::new(f);
    for (p, v) in mesh.nodes.iter().zip(u) {
        writeln!(w, "{:.17e} {:.17e} {:.17e} {:.17e}", p[0], p[1], v[0], v[1])
            .map_err(|e| CliError::io(path, e))?;
    }
    w.flush().map_err(|e| CliError::io(path, e))
}

pub fn read_nodal(path: &Path) -> Result<Vec<[f64; 2]>, CliError> {
    let f = File::open(path).map_err(|e| CliError::io(path, e))?;
    let mut out = Vec::new();
    for (i, line) in BufReader::new(f).lines().enumerate() {
        let line = line.map_err(|e| CliError::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let v: Vec<f64> = line
            .split_whitespace()
            .map(|s| s.parse::<f64>())
            .collect::<Result<_, _>>()
            .map_err(|e| CliError::Parse {
                origin: format!("{}:{}", path.display(), i + 1),
                message: e.to_string(),
            })?;
        if v.len() != 4 {
            return Err(CliError::Parse {
                origin: format!("{}:{}", path.display(), i + 1),
                message: format!("expected `x y u1 u2`, got {} values", v.len()),
            });
        }
        out.push([v[2], v[3]]);
    }
    Ok(out)
}

pub fn write_mesh(path: &Path, mesh: &Mesh) -> Result<(), CliError> {
    let f = File::create(path).map_err(|e| CliError::io(path, e))?;
    let mut w = BufWriter::new(f);
    mesh.write_text(&mut w).map_err(|e| CliError::io(path, e))?;
    w.flush().map_err(|e| CliError::io(path, e))
}

pub fn read_mesh(path: &Path) -> Result<Mesh, CliError> {
    let f = File::open(path).map_err(|e| CliError::io(path, e))?;
    Mesh::read_text(BufReader::new(f)).map_err(|e| CliError::Parse {
        origin: path.display().to_string(),
        message: e.to_string(),
    })
}
