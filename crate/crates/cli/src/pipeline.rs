//! mesh -> regions -> assembly -> himtest for one scenario, with artifacts.

use std::fs;
use std::path::Path;

use himlab::assembly::{assemble_with, QuadraticForm};
use himlab::himtest::{
    decide_with, descend, start_vector, DescentOptions, Method, PencilOptions, Verdict,
};
use himlab::mesh::Mesh;
use himlab::regions::element_values;

use crate::report::{element_rows, write_csv, write_mesh, write_nodal};
use crate::runlog::{now, MeshStats, RunLog, RunRecord};
use crate::scenario::Scenario;
use crate::CliError;

/// Command-line overrides applied on top of a scenario.
#[derive(Clone, Copy, Debug, Default)]
pub struct Overrides {
    pub mesh_level: Option<usize>,
    pub tol: Option<f64>,
    pub seed: Option<u64>,
    pub method: Option<Method>,
}

impl Overrides {
    pub fn apply(&self, s: &Scenario) -> Scenario {
        let mut s = s.clone();
        if let Some(l) = self.mesh_level {
            s.mesh.levels = l;
        }
        if let Some(t) = self.tol {
            s.tol = t;
        }
        if let Some(seed) = self.seed {
            s.seed = seed;
        }
        if let Some(m) = self.method {
            s.method = m;
        }
        s
    }
}

pub struct Outcome {
    pub mesh: Mesh,
    pub fvals: Vec<f64>,
    pub form: QuadraticForm,
    pub verdict: Verdict,
    /// Nodal witness, present iff the verdict is unbounded.
    pub witness: Option<Vec<[f64; 2]>>,
}

/// Runs the pipeline without writing anything.
pub fn execute(s: &Scenario) -> Result<Outcome, CliError> {
    let mesh = s.build_mesh()?;
    let fvals = element_values(&s.field, &mesh).map_err(|e| CliError::stage(&s.name, "regions", e))?;
    let form = assemble_with(&mesh, &fvals, s.symmetry).map_err(|e| CliError::stage(&s.name, "assembly", e))?;
    let himtest = |e| CliError::stage(&s.name, "himtest", e);
    let (verdict, witness) = match s.method {
        Method::Pencil => {
            let opt = PencilOptions {
                tol: s.tol,
                seed: s.seed,
                ..PencilOptions::default()
            };
            let v = decide_with(&form, opt).map_err(himtest)?;
            let w = v.witness.clone();
            (v, w)
        }
        Method::Descent => {
            let d = descend(&form, &start_vector(&form, s.seed), DescentOptions::default()).map_err(himtest)?;
            let w = d.verdict.witness.clone();
            (d.verdict, w)
        }
    };
    let witness = match witness {
        Some(w) => Some(form.to_nodal(&w).map_err(himtest)?),
        None => None,
    };
    Ok(Outcome {
        mesh,
        fvals,
        form,
        verdict,
        witness,
    })
}

/// Runs one scenario. With a log, writes the mesh, the per-element energy
/// table and the witness under `<log dir>/<name>/` and appends a record.
pub fn run_scenario(s: &Scenario, log: Option<&RunLog>) -> Result<(RunRecord, Outcome), CliError> {
    let out = execute(s)?;
    let mut artifacts = Vec::new();
    if let Some(log) = log {
        let dir = log.dir().join(&s.name);
        fs::create_dir_all(&dir).map_err(|e| CliError::io(&dir, e))?;
        let mut put = |file: &str| -> std::path::PathBuf {
            artifacts.push(format!("{}/{file}", s.name));
            dir.join(file)
        };
        write_mesh(&put("mesh.txt"), &out.mesh)?;
        let rows = element_rows(&out.mesh, &out.fvals, out.witness.as_deref());
        write_csv(&put("elements.csv"), &rows)?;
        if let Some(w) = &out.witness {
            write_nodal(&put("witness.txt"), &out.mesh, w)?;
        }
    }
    let record = RunRecord {
        scenario: s.name.clone(),
        timestamp: now(),
        mesh: MeshStats::of(&out.mesh, out.form.n_free),
        verdict: out.verdict.clone(),
        expect: s.expect,
        matches: s.expect.map(|e| e == out.verdict.outcome),
        artifacts,
        version: env!("CARGO_PKG_VERSION").to_string(),
        config: s.clone(),
    };
    if let Some(log) = log {
        log.append(&record)?;
    }
    Ok((record, out))
}

/// Runs scenarios on up to `threads` worker threads. Results come back in
/// input order; log lines are appended as runs finish.
pub fn run_suite(
    scenarios: &[Scenario],
    log: Option<&RunLog>,
    threads: usize,
) -> Vec<Result<RunRecord, CliError>> {
    let threads = threads.max(1).min(scenarios.len().max(1));
    let next = std::sync::atomic::AtomicUsize::new(0);
    let slots: Vec<std::sync::Mutex<Option<Result<RunRecord, CliError>>>> =
        scenarios.iter().map(|_| std::sync::Mutex::new(None)).collect();
    std::thread::scope(|scope| {
        for _ in 0..threads {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, std::sync::atomic::Ordering::Relaxed);
                if i >= scenarios.len() {
                    break;
                }
                let r = run_scenario(&scenarios[i], log).map(|(rec, _)| rec);
                *slots[i].lock().unwrap() = Some(r);
            });
        }
    });
    slots
        .into_iter()
        .map(|m| m.into_inner().unwrap().expect("every scenario ran"))
        .collect()
}

/// Re-runs the scenario stored in a record.
pub fn replay(record: &RunRecord) -> Result<Verdict, CliError> {
    Ok(execute(&record.config)?.verdict)
}

pub fn ensure_dir(dir: &Path) -> Result<(), CliError> {
    fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))
}
