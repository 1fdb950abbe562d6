use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use himlab::analytic::boundary::{boundary_search, default_grid, BoundaryWitness};
use himlab::analytic::fourier_g::{fourier_g_energies, partial_sum_identity};
use himlab::analytic::kernels::kernel_scan;
use himlab::analytic::pointcontact::{pointcontact_energy, pointcontact_witness};
use himlab::analytic::seminorm::{gamma_search, h12_seminorm, FourierProfile};
use himlab::analytic::strip::strip_witness;
use himlab::analytic::WitnessField;
use himlab::bisect::{grid_study, nested_study, BisectOptions, GridMesh};
use himlab::himtest::{Method, PencilOptions};
use himlab::mesh::{Domain, Pattern};
use himlab_cli::pipeline::{ensure_dir, run_suite, Overrides};
use himlab_cli::report::{
    read_csv, read_mesh, read_nodal, write_csv, write_mesh, ElementRow, SweepRow,
};
use himlab_cli::runlog::{read_log, MeshStats, RunLog};
use himlab_cli::scenario::{bundled, Scenario, Suite};
use himlab_cli::svg::{self, Series};
use himlab_cli::CliError;
use serde::Serialize;

const EXIT_MISMATCH: u8 = 2;
const EXIT_INCONCLUSIVE: u8 = 3;

#[derive(Parser)]
#[command(name = "himlab", version, about = "Finite-element checks of Hadamard-in-the-mean inequalities")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args)]
struct Global {
    /// Extra red refinements on top of each scenario's mesh.
    #[arg(long, global = true)]
    mesh_level: Option<usize>,
    #[arg(long, global = true)]
    tol: Option<f64>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true, value_enum)]
    method: Option<MethodArg>,
    #[arg(long, global = true, default_value = "himlab-out")]
    out_dir: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Pencil,
    Descent,
}

impl From<MethodArg> for Method {
    fn from(m: MethodArg) -> Method {
        match m {
            MethodArg::Pencil => Method::Pencil,
            MethodArg::Descent => Method::Descent,
        }
    }
}

#[derive(Args)]
struct Select {
    /// Scenario files.
    files: Vec<PathBuf>,
    /// Include the scenarios shipped with the binary.
    #[arg(long)]
    bundled: bool,
    /// Keep only scenarios with these names.
    #[arg(long)]
    only: Vec<String>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Build each scenario's mesh and write it as text.
    Mesh(Select),
    /// Run scenarios and append to `<out-dir>/runs.jsonl`.
    Run {
        #[command(flatten)]
        select: Select,
        /// Exit with code 2 when a verdict differs from its expectation.
        #[arg(long)]
        ci: bool,
        #[arg(long, default_value_t = default_threads())]
        threads: usize,
    },
    /// Critical scaling of each scenario's field over nested meshes.
    Bisect {
        #[command(flatten)]
        select: Select,
        /// Number of nested levels, starting from the scenario mesh.
        #[arg(long, default_value_t = 3)]
        levels: usize,
        #[arg(long, num_args = 2, default_values_t = [0.5, 2.0])]
        bracket: Vec<f64>,
        /// Final bracket width.
        #[arg(long, default_value_t = 1e-4)]
        width: f64,
    },
    /// Critical scaling of the diagonal grid family `f_m`.
    GridStudy {
        #[arg(long, default_value_t = 3)]
        m_min: usize,
        #[arg(long, default_value_t = 12)]
        m_max: usize,
        /// Grid cells per side of the square.
        #[arg(long, default_value_t = 48)]
        cells: usize,
        #[arg(long, num_args = 2, default_values_t = [0.1, 2.0])]
        bracket: Vec<f64>,
        #[arg(long, default_value_t = 1e-4)]
        width: f64,
    },
    /// Semi-analytic computations; results go to stdout as JSON.
    #[command(subcommand)]
    Analytic(AnalyticCmd),
    /// SVG figures from a run log, a sweep table or a grid study table.
    Plot {
        /// Run log written by `run`.
        #[arg(long)]
        log: Option<PathBuf>,
        /// Table written by `bisect`.
        #[arg(long)]
        sweep: Option<PathBuf>,
        /// Table written by `grid-study`.
        #[arg(long)]
        grid: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum AnalyticCmd {
    /// `[h]^2_{1/2}` of `cos(k theta)` sampled on `samples` points.
    Seminorm {
        #[arg(long, default_value_t = 1)]
        mode: usize,
        #[arg(long, default_value_t = 256)]
        samples: usize,
    },
    /// Smallest `[h+]^2 / [h-]^2` over random bump profiles.
    Gamma {
        #[arg(long, default_value_t = 1000)]
        size: usize,
    },
    /// Minimum of the kernel quotient over angles and frequencies.
    Kernels {
        #[arg(long, default_value_t = 201)]
        n_phi: usize,
        #[arg(long, default_value_t = 10_000)]
        k_max: u64,
    },
    /// Dirichlet energies of `g` on the quadrants for each truncation `N`.
    FourierG {
        #[arg(long, num_args = 1.., default_values_t = [10usize, 100, 1000, 10_000])]
        n: Vec<usize>,
    },
    /// Negative-energy witness maps.
    Witness {
        #[command(subcommand)]
        kind: WitnessKind,
    },
}

#[derive(Subcommand)]
enum WitnessKind {
    /// Point-contact map with truncation `N`.
    PointContact {
        #[arg(long, num_args = 1.., default_values_t = [8usize, 16, 32, 64, 128])]
        n: Vec<usize>,
        #[arg(long, default_value_t = 0.75)]
        rho: f64,
        #[arg(long, default_value_t = 3.0)]
        c: f64,
        /// Side ratio of the cut-off square.
        #[arg(long, default_value_t = 1.4)]
        r: f64,
        /// Also write nodal samples of the map for the first `N`.
        #[arg(long)]
        nodal: bool,
    },
    /// Half-domain map on the default `(delta, R0)` grid.
    Boundary {
        #[arg(long, default_value_t = 2.5)]
        c: f64,
    },
    /// Strip map glued from a boundary map with constant `c_prime`.
    Strip {
        #[arg(long, default_value_t = 2.5)]
        c: f64,
        #[arg(long, default_value_t = 2.2)]
        c_prime: f64,
        #[arg(long, default_value_t = 0.005)]
        delta: f64,
        #[arg(long, default_value_t = 0.5)]
        r0: f64,
    },
}

fn default_threads() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_inconclusive() { EXIT_INCONCLUSIVE } else { 1 })
        }
    }
}

fn overrides(g: &Global) -> Overrides {
    Overrides {
        mesh_level: None,
        tol: g.tol,
        seed: g.seed,
        method: g.method.map(Method::from),
    }
}

/// Selected scenarios with the global overrides applied. `--mesh-level`
/// adds refinements to each scenario's own level.
fn select(sel: &Select, g: &Global) -> Result<Vec<Scenario>, CliError> {
    let mut all = Vec::new();
    if sel.bundled {
        all.extend(bundled().scenarios);
    }
    for f in &sel.files {
        all.extend(Suite::load(f)?.scenarios);
    }
    if all.is_empty() {
        return Err(CliError::Other("no scenarios: pass files or --bundled".into()));
    }
    for name in &sel.only {
        if !all.iter().any(|s| &s.name == name) {
            return Err(CliError::Other(format!("no scenario named `{name}`")));
        }
    }
    let o = overrides(g);
    Ok(all
        .iter()
        .filter(|s| sel.only.is_empty() || sel.only.contains(&s.name))
        .map(|s| {
            let mut s = o.apply(s);
            s.mesh.levels += g.mesh_level.unwrap_or(0);
            s
        })
        .collect())
}

fn print_json<T: Serialize>(v: &T) -> Result<(), CliError> {
    let s = serde_json::to_string_pretty(v).map_err(|e| CliError::Other(e.to_string()))?;
    println!("{s}");
    Ok(())
}

fn write_text(path: &Path, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text).map_err(|e| CliError::io(path, e))?;
    eprintln!("wrote {}", path.display());
    Ok(())
}

fn dispatch(cli: Cli) -> Result<u8, CliError> {
    let g = &cli.global;
    match &cli.cmd {
        Cmd::Mesh(sel) => {
            ensure_dir(&g.out_dir)?;
            for s in select(sel, g)? {
                let mesh = s.build_mesh()?;
                let path = g.out_dir.join(format!("{}.mesh.txt", s.name));
                write_mesh(&path, &mesh)?;
                print_json(&serde_json::json!({
                    "scenario": s.name,
                    "mesh": MeshStats::of(&mesh, 2 * mesh.n_interior()),
                    "file": path,
                }))?;
            }
            Ok(0)
        }
        Cmd::Run { select: sel, ci, threads } => {
            let scenarios = select(sel, g)?;
            ensure_dir(&g.out_dir)?;
            let log = RunLog::open(&g.out_dir.join("runs.jsonl"))?;
            let mut code = 0;
            for (s, r) in scenarios.iter().zip(run_suite(&scenarios, Some(&log), *threads)) {
                match r {
                    Ok(rec) => {
                        let mu = rec.verdict.mu_min.map_or("-".to_string(), |m| format!("{m:.10}"));
                        let tag = match rec.matches {
                            Some(true) => "ok",
                            Some(false) => "MISMATCH",
                            None => "",
                        };
                        println!(
                            "{:<32} {:>7} el  {:<12} mu_min {mu}  {tag}",
                            rec.scenario,
                            rec.mesh.triangles,
                            format!("{:?}", rec.verdict.outcome).to_lowercase()
                        );
                        if *ci && rec.matches == Some(false) && code == 0 {
                            code = EXIT_MISMATCH;
                        }
                    }
                    Err(e) => {
                        eprintln!("{}: {e}", s.name);
                        code = if e.is_inconclusive() { EXIT_INCONCLUSIVE } else { code.max(1) };
                    }
                }
            }
            Ok(code)
        }
        Cmd::Bisect {
            select: sel,
            levels,
            bracket,
            width,
        } => {
            ensure_dir(&g.out_dir)?;
            let mut rows = Vec::new();
            for s in select(sel, g)? {
                let coarse = s.build_mesh()?;
                let opt = BisectOptions {
                    tol: *width,
                    pencil: PencilOptions {
                        tol: s.tol,
                        seed: s.seed,
                        ..Default::default()
                    },
                    ..Default::default()
                };
                let study = nested_study(&s.field, &coarse, *levels, [bracket[0], bracket[1]], opt)
                    .map_err(|e| CliError::stage(&s.name, "bisect", e))?;
                for r in study {
                    println!("{:<32} level {} {:>8} el  lambda {:.6}", s.name, r.level, r.elements, r.lambda);
                    rows.push(SweepRow {
                        family: s.name.clone(),
                        mesh_level: r.level,
                        elements: r.elements,
                        m: None,
                        lambda: r.lambda,
                        delta_f: None,
                    });
                }
            }
            write_csv(&g.out_dir.join("sweep.csv"), &rows)?;
            Ok(0)
        }
        Cmd::GridStudy {
            m_min,
            m_max,
            cells,
            bracket,
            width,
        } => {
            ensure_dir(&g.out_dir)?;
            let opt = BisectOptions {
                tol: *width,
                pencil: PencilOptions {
                    tol: g.tol.unwrap_or(PencilOptions::default().tol),
                    seed: g.seed.unwrap_or(PencilOptions::default().seed),
                    ..Default::default()
                },
                ..Default::default()
            };
            let mesh = GridMesh {
                cells: *cells,
                pattern: Pattern::Diagonal,
            };
            let res = grid_study(*m_min..=*m_max, mesh, [bracket[0], bracket[1]], opt)
                .map_err(|e| CliError::stage("grid-study", "bisect", e))?;
            let rows: Vec<SweepRow> = res
                .rows
                .iter()
                .map(|r| SweepRow {
                    family: res.family.clone(),
                    mesh_level: 0,
                    elements: r.elements,
                    m: Some(r.m),
                    lambda: r.lambda,
                    delta_f: Some(r.delta_f),
                })
                .collect();
            write_csv(&g.out_dir.join("grid.csv"), &rows)?;
            print_json(&res)?;
            if let Some(e) = &res.error {
                eprintln!("grid study stopped early: {e}");
                return Ok(EXIT_INCONCLUSIVE);
            }
            Ok(0)
        }
        Cmd::Analytic(a) => analytic(a, g),
        Cmd::Plot { log, sweep, grid } => {
            ensure_dir(&g.out_dir)?;
            if log.is_none() && sweep.is_none() && grid.is_none() {
                return Err(CliError::Other("plot needs --log, --sweep or --grid".into()));
            }
            if let Some(p) = log {
                plot_log(p, &g.out_dir)?;
            }
            if let Some(p) = sweep {
                let rows: Vec<SweepRow> = read_csv(p)?;
                write_text(&g.out_dir.join("sweep.svg"), &sweep_chart(&rows))?;
            }
            if let Some(p) = grid {
                let rows: Vec<SweepRow> = read_csv(p)?;
                write_text(&g.out_dir.join("grid.svg"), &grid_chart(&rows))?;
            }
            Ok(0)
        }
    }
}

fn analytic(a: &AnalyticCmd, g: &Global) -> Result<u8, CliError> {
    let core = |e| CliError::stage("analytic", "analytic", e);
    match a {
        AnalyticCmd::Seminorm { mode, samples } => {
            let m = (*samples).max(2 * mode + 2);
            let xs: Vec<f64> = (0..m)
                .map(|j| (*mode as f64 * std::f64::consts::TAU * j as f64 / m as f64).cos())
                .collect();
            let p = FourierProfile::from_samples(&xs);
            print_json(&serde_json::json!({ "mode": mode, "samples": m, "seminorm2": h12_seminorm(&p) }))?;
        }
        AnalyticCmd::Gamma { size } => {
            let seed = g.seed.unwrap_or(himlab::himtest::DEFAULT_SEED);
            print_json(&gamma_search(*size, seed).map_err(core)?)?;
        }
        AnalyticCmd::Kernels { n_phi, k_max } => {
            print_json(&kernel_scan(*n_phi, *k_max).map_err(core)?)?;
        }
        AnalyticCmd::FourierG { n } => {
            let rows: Vec<_> = n
                .iter()
                .map(|&n| {
                    let e = fourier_g_energies(n);
                    let ps = partial_sum_identity(1, n as u64);
                    serde_json::json!({
                        "n": n,
                        "d_q1": e.d_q1,
                        "d_q2": e.d_q2,
                        "d_q1_over_2pi_ln_n": e.d_q1 / (std::f64::consts::TAU * (n as f64).ln()),
                        "partial_sum_error": (ps.sum - ps.closed_form).abs(),
                    })
                })
                .collect();
            print_json(&rows)?;
        }
        AnalyticCmd::Witness { kind } => witness(kind, g)?,
    }
    Ok(0)
}

fn witness(kind: &WitnessKind, g: &Global) -> Result<(), CliError> {
    let core = |e| CliError::stage("witness", "analytic", e);
    match kind {
        WitnessKind::PointContact { n, rho, c, r, nodal } => {
            let rows = n
                .iter()
                .map(|&n| {
                    pointcontact_energy(n, *rho, *c, *r).map(|e| serde_json::json!({ "n": n, "energy": e }))
                })
                .collect::<Result<Vec<_>, _>>()
                .map_err(core)?;
            print_json(&rows)?;
            if *nodal {
                let w = pointcontact_witness(n[0], *rho, *c, *r).map_err(core)?;
                let domain = Domain::square(*r, vec![-1.0, 0.0, 1.0], vec![-1.0, 0.0, 1.0]);
                write_witness(&w, &domain, &g.out_dir, "pointcontact")?;
            }
        }
        WitnessKind::Boundary { c } => {
            print_json(&boundary_search(*c, &default_grid()).map_err(core)?)?;
        }
        WitnessKind::Strip { c, c_prime, delta, r0 } => {
            let base = BoundaryWitness::new(*delta, *r0).map_err(core)?;
            print_json(&strip_witness(*c, *c_prime, *delta, &base).map_err(core)?)?;
        }
    }
    Ok(())
}

fn write_witness(w: &WitnessField, domain: &Domain, dir: &Path, name: &str) -> Result<(), CliError> {
    ensure_dir(dir)?;
    let mesh = himlab::mesh::build_rect_mesh(domain, 20, Pattern::Diagonal)
        .map_err(|e| CliError::stage(name, "mesh", e))?;
    write_mesh(&dir.join(format!("{name}.mesh.txt")), &mesh)?;
    let path = dir.join(format!("{name}.witness.txt"));
    let f = std::fs::File::create(&path).map_err(|e| CliError::io(&path, e))?;
    w.write_nodal(&mesh, std::io::BufWriter::new(f))
        .map_err(|e| CliError::io(&path, e))?;
    eprintln!("wrote {}", path.display());
    Ok(())
}

type Column = fn(&ElementRow) -> f64;

fn plot_log(path: &Path, out: &Path) -> Result<(), CliError> {
    let base = path.parent().unwrap_or(Path::new("."));
    for rec in read_log(path)? {
        let find = |file: &str| {
            rec.artifacts
                .iter()
                .find(|a| a.ends_with(file))
                .map(|a| base.join(a))
        };
        let (Some(mesh_path), Some(csv_path)) = (find("mesh.txt"), find("elements.csv")) else {
            eprintln!("warning: `{}` has no mesh or element table, skipped", rec.scenario);
            continue;
        };
        let mesh = read_mesh(&mesh_path)?;
        let rows: Vec<ElementRow> = read_csv(&csv_path)?;
        let dir = out.join(&rec.scenario);
        ensure_dir(&dir)?;
        let col = |f: fn(&ElementRow) -> f64| rows.iter().map(f).collect::<Vec<f64>>();
        let name = &rec.scenario;
        write_text(&dir.join("field.svg"), &svg::element_map(&mesh, &col(|r| r.f), &format!("{name}: f")))?;
        let Some(w_path) = find("witness.txt") else {
            eprintln!("warning: `{name}` has no witness, density and deformation plots skipped");
            continue;
        };
        let densities: [(&str, &str, Column); 3] = [
            ("density-plus.svg", "|grad u|^2 + 2 det", |r| r.grad2 + 2.0 * r.det),
            ("density-minus.svg", "|grad u|^2 - 2 det", |r| r.grad2 - 2.0 * r.det),
            ("integrand.svg", "|grad u|^2 + f det", |r| r.integrand),
        ];
        for (file, title, f) in densities {
            write_text(&dir.join(file), &svg::element_map(&mesh, &col(f), &format!("{name}: {title}")))?;
        }
        let u = svg::rescale(&mesh, &read_nodal(&w_path)?);
        write_text(&dir.join("deformed.svg"), &svg::deformed_mesh(&mesh, &u, &format!("{name}: x + u(x)")))?;
    }
    Ok(())
}

fn by_family(rows: &[SweepRow], x: impl Fn(&SweepRow) -> f64, y: impl Fn(&SweepRow) -> Option<f64>) -> Vec<Series> {
    let mut out: Vec<Series> = Vec::new();
    for r in rows {
        let Some(v) = y(r) else { continue };
        match out.iter_mut().find(|s| s.label == r.family) {
            Some(s) => s.points.push((x(r), v)),
            None => out.push(Series {
                label: r.family.clone(),
                points: vec![(x(r), v)],
            }),
        }
    }
    out
}

fn sweep_chart(rows: &[SweepRow]) -> String {
    let s = by_family(rows, |r| r.elements as f64, |r| Some(r.lambda));
    svg::line_chart("critical scaling over nested meshes", "elements", "lambda", &s, true)
}

fn grid_chart(rows: &[SweepRow]) -> String {
    let m = |r: &SweepRow| r.m.unwrap_or(0) as f64;
    let lam = by_family(rows, m, |r| Some(r.lambda));
    let df = by_family(rows, m, |r| r.delta_f);
    svg::dual_chart(
        ("lambda_crit(m)", "m", "lambda", &lam),
        ("delta f(m)", "m", "total variation", &df),
    )
}
