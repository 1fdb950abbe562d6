//! Critical scalings `lambda_crit` of one-parameter families `lambda f` by
//! bisection on the verdict.
//!
//! The set of `lambda > 0` for which `lambda f` passes is an interval
//! `(0, lambda_crit)`, so a bracket `[lo, hi]` with a passing `lo` and a
//! failing `hi` shrinks to the threshold. The returned value is the failing
//! end, an upper bound for the continuum threshold on every mesh.

use serde::{Deserialize, Serialize};

use crate::assembly::{assemble, QuadraticForm};
use crate::error::{Error, Result};
use crate::himtest::{decide_with, Outcome, PencilOptions};
use crate::mesh::{build_rect_mesh, Mesh, Pattern};
use crate::regions::{element_values, FieldSpec};

#[derive(Clone, Copy, Debug)]
pub struct BisectOptions {
    /// Final bracket width.
    pub tol: f64,
    pub pencil: PencilOptions,
    /// Geometric bracket expansions allowed at each end.
    pub max_expand: usize,
    /// Probe this value first, typically the previous mesh level's result.
    pub seed: Option<f64>,
    /// Probe `-lambda / mu_min` from the last pencil solve, `+-0.4 tol`.
    pub spectral_seed: bool,
}

impl Default for BisectOptions {
    fn default() -> Self {
        BisectOptions {
            tol: 1e-4,
            pencil: PencilOptions::default(),
            max_expand: 16,
            seed: None,
            spectral_seed: true,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Probe {
    pub lambda: f64,
    pub outcome: Outcome,
    pub mu_min: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Bisection {
    /// Upper end of the final bracket.
    pub lambda: f64,
    pub lo: f64,
    pub hi: f64,
    pub history: Vec<Probe>,
}

/// Bisection on an assembled base form; `B` is scaled by `lambda`.
pub fn critical_lambda_form(
    q: &QuadraticForm,
    bracket: [f64; 2],
    opt: BisectOptions,
) -> Result<Bisection> {
    let [mut lo, mut hi] = bracket;
    if !(lo > 0.0 && hi > lo) {
        return Err(Error::InvalidParameter(format!("bracket [{lo}, {hi}]")));
    }
    let mut history = Vec::new();
    let eval = |lambda: f64, history: &mut Vec<Probe>| -> Result<Probe> {
        let v = decide_with(&q.scaled(lambda), opt.pencil)?;
        let p = Probe {
            lambda,
            outcome: v.outcome,
            mu_min: v.mu_min.unwrap_or(f64::NAN),
        };
        history.push(p.clone());
        Ok(p)
    };
    let passes = |p: &Probe| p.outcome == Outcome::Nonnegative;

    let mut expanded = 0;
    let mut p_lo = eval(lo, &mut history)?;
    while !passes(&p_lo) {
        if expanded == opt.max_expand {
            return Err(Error::NoSignChange { lo, hi });
        }
        hi = lo;
        lo *= 0.5;
        expanded += 1;
        p_lo = eval(lo, &mut history)?;
    }
    let mut expanded = 0;
    let mut p_hi = eval(hi, &mut history)?;
    while passes(&p_hi) {
        if expanded == opt.max_expand {
            return Err(Error::NoSignChange { lo, hi });
        }
        lo = hi;
        hi *= 2.0;
        expanded += 1;
        p_hi = eval(hi, &mut history)?;
    }
    let mut last = p_hi;

    let shrink = |x: f64, lo: &mut f64, hi: &mut f64, history: &mut Vec<Probe>| -> Result<Probe> {
        let p = eval(x, history)?;
        if passes(&p) {
            *lo = x;
        } else {
            *hi = x;
        }
        Ok(p)
    };
    if let Some(s) = opt.seed {
        if s > lo && s < hi {
            last = shrink(s, &mut lo, &mut hi, &mut history)?;
        }
    }
    if opt.spectral_seed {
        let mut tries = 0;
        while hi - lo > opt.tol && tries < 3 && last.mu_min < 0.0 {
            tries += 1;
            let star = -last.lambda / last.mu_min;
            let (a, b) = (star - 0.4 * opt.tol, star + 0.4 * opt.tol);
            if !(a > lo && b < hi) {
                break;
            }
            last = shrink(a, &mut lo, &mut hi, &mut history)?;
            if passes(&last) {
                last = shrink(b, &mut lo, &mut hi, &mut history)?;
            }
        }
    }
    while hi - lo > opt.tol {
        shrink(0.5 * (lo + hi), &mut lo, &mut hi, &mut history)?;
    }
    Ok(Bisection {
        lambda: hi,
        lo,
        hi,
        history,
    })
}

/// Critical scaling of `base` on `mesh`.
pub fn critical_lambda(
    base: &FieldSpec,
    mesh: &Mesh,
    bracket: [f64; 2],
    tol: f64,
) -> Result<f64> {
    let q = assemble(mesh, &element_values(base, mesh)?)?;
    let opt = BisectOptions {
        tol,
        ..Default::default()
    };
    Ok(critical_lambda_form(&q, bracket, opt)?.lambda)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LevelRow {
    pub level: usize,
    pub elements: usize,
    pub lambda: f64,
}

/// Critical scaling of `base` over nested meshes: `coarse` followed by
/// `levels - 1` red refinements. Each level seeds its bracket with the
/// previous result.
pub fn nested_study(
    base: &FieldSpec,
    coarse: &Mesh,
    levels: usize,
    bracket: [f64; 2],
    opt: BisectOptions,
) -> Result<Vec<LevelRow>> {
    let mut rows: Vec<LevelRow> = Vec::new();
    let mut mesh = coarse.clone();
    for level in 0..levels {
        if level > 0 {
            mesh = mesh.refine()?;
        }
        let q = assemble(&mesh, &element_values(base, &mesh)?)?;
        let o = BisectOptions {
            seed: rows.last().map(|r| r.lambda),
            ..opt
        };
        let b = critical_lambda_form(&q, bracket, o)?;
        rows.push(LevelRow {
            level,
            elements: mesh.n_triangles(),
            lambda: b.lambda,
        });
    }
    Ok(rows)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridRow {
    pub m: usize,
    pub elements: usize,
    pub lambda: f64,
    /// `delta(lambda f_m) = 2 sqrt(8) (m - 1) lambda`.
    pub delta_f: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridFit {
    /// Least squares `lambda = c0 / (m + 1)`.
    pub c0: f64,
    /// Least squares `lambda = a / (m + 1) + b`, reported alongside.
    pub affine: (f64, f64),
    /// `lim delta(lambda f_m) = 2 sqrt(8) c0`; reported, not asserted.
    pub delta_asymptote: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub family: String,
    pub rows: Vec<GridRow>,
    pub fit: Option<GridFit>,
    /// Set when a bisection failed; `rows` holds the finished part.
    pub error: Option<String>,
}

/// Mesh used for `f_m`: about `cells` grid cells per side of `Q`, rounded so
/// that every subsquare gets a whole number of cells.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridMesh {
    pub cells: usize,
    pub pattern: Pattern,
}

impl GridMesh {
    pub fn build(&self, m: usize) -> Result<Mesh> {
        let spec = FieldSpec::DiagonalGrid { m };
        let n_div = ((self.cells as f64 / m as f64).round() as usize).max(1);
        build_rect_mesh(&spec.natural_domain(), n_div, self.pattern)
    }
}

pub fn fit_grid(rows: &[GridRow]) -> Option<GridFit> {
    if rows.len() < 2 {
        return None;
    }
    let xs: Vec<f64> = rows.iter().map(|r| 1.0 / (r.m as f64 + 1.0)).collect();
    let ys: Vec<f64> = rows.iter().map(|r| r.lambda).collect();
    let sxx: f64 = xs.iter().map(|x| x * x).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| x * y).sum();
    let c0 = sxy / sxx;
    let n = xs.len() as f64;
    let (mx, my) = (xs.iter().sum::<f64>() / n, ys.iter().sum::<f64>() / n);
    let cov: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let var: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let a = cov / var;
    Some(GridFit {
        c0,
        affine: (a, my - a * mx),
        delta_asymptote: 2.0 * 8f64.sqrt() * c0,
    })
}

/// `lambda_approx(m)` for `f_m`, `m` in `m_range`, with the `c0` fit.
/// A failing `m` stops the sweep; the partial table is returned with the
/// error recorded.
pub fn grid_study(
    m_range: std::ops::RangeInclusive<usize>,
    mesh: GridMesh,
    bracket: [f64; 2],
    opt: BisectOptions,
) -> Result<SweepResult> {
    if *m_range.start() < 2 || *m_range.end() > 25 {
        return Err(Error::InvalidParameter(format!(
            "m range {m_range:?} outside 2..=25"
        )));
    }
    let mut rows = Vec::new();
    let mut error = None;
    for m in m_range {
        let spec = FieldSpec::DiagonalGrid { m };
        let run = || -> Result<GridRow> {
            let mesh = mesh.build(m)?;
            let q = assemble(&mesh, &element_values(&spec, &mesh)?)?;
            let b = critical_lambda_form(&q, bracket, opt)?;
            Ok(GridRow {
                m,
                elements: mesh.n_triangles(),
                lambda: b.lambda,
                delta_f: spec.total_variation() * b.lambda,
            })
        };
        match run() {
            Ok(r) => rows.push(r),
            Err(e) => {
                error = Some(format!("m = {m}: {e}"));
                break;
            }
        }
    }
    let fit = fit_grid(&rows);
    Ok(SweepResult {
        family: "diagonal-grid".into(),
        rows,
        fit,
        error,
    })
}
