//! Append-only JSON-lines run log.

use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::sync::Mutex;
use std::time::{SystemTime, UNIX_EPOCH};

use himlab::himtest::{Outcome, Verdict};
use himlab::mesh::Mesh;
use serde::{Deserialize, Serialize};

use crate::scenario::Scenario;
use crate::CliError;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeshStats {
    pub nodes: usize,
    pub triangles: usize,
    pub interior_nodes: usize,
    pub free_dofs: usize,
    pub max_edge: f64,
}

impl MeshStats {
    pub fn of(mesh: &Mesh, free_dofs: usize) -> MeshStats {
        MeshStats {
            nodes: mesh.n_nodes(),
            triangles: mesh.n_triangles(),
            interior_nodes: mesh.n_interior(),
            free_dofs,
            max_edge: mesh.max_edge(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub scenario: String,
    /// Seconds since the Unix epoch.
    pub timestamp: u64,
    pub mesh: MeshStats,
    pub verdict: Verdict,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expect: Option<Outcome>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matches: Option<bool>,
    /// Files written for this run, relative to the run log's directory.
    pub artifacts: Vec<String>,
    pub version: String,
    /// The scenario as run, with overrides applied, for replay.
    pub config: Scenario,
}

pub fn now() -> u64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0)
}

/// A run log file. Appends go through one lock, so concurrent runs write
/// whole lines.
pub struct RunLog {
    path: PathBuf,
    file: Mutex<File>,
}

impl RunLog {
    pub fn open(path: &Path) -> Result<RunLog, CliError> {
        let file = OpenOptions::new()
            .create(true)
            .append(true)
            .open(path)
            .map_err(|e| CliError::io(path, e))?;
        Ok(RunLog {
            path: path.to_path_buf(),
            file: Mutex::new(file),
        })
    }

    pub fn dir(&self) -> &Path {
        self.path.parent().unwrap_or(Path::new("."))
    }

    pub fn append(&self, record: &RunRecord) -> Result<(), CliError> {
        for a in &record.artifacts {
            let p = self.dir().join(a);
            if !p.is_file() {
                return Err(CliError::Other(format!(
                    "run `{}` references missing artifact {}",
                    record.scenario,
                    p.display()
                )));
            }
        }
        let line = serde_json::to_string(record).map_err(|e| CliError::Other(e.to_string()))?;
        let mut f = self.file.lock().expect("run log lock poisoned");
        writeln!(f, "{line}").map_err(|e| CliError::io(&self.path, e))?;
        f.flush().map_err(|e| CliError::io(&self.path, e))
    }
}

pub fn read_log(path: &Path) -> Result<Vec<RunRecord>, CliError> {
    let f = File::open(path).map_err(|e| CliError::io(path, e))?;
    let mut out = Vec::new();
    for (i, line) in BufReader::new(f).lines().enumerate() {
        let line = line.map_err(|e| CliError::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let r = serde_json::from_str(&line).map_err(|e| CliError::Parse {
            origin: format!("{}:{}", path.display(), i + 1),
            message: e.to_string(),
        })?;
        out.push(r);
    }
    Ok(out)
}
