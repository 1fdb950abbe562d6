//! Scenario runner, run log, CSV tables and SVG plots for `himlab`.

pub mod pipeline;
pub mod report;
pub mod runlog;
pub mod scenario;
pub mod svg;

use std::path::Path;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{origin}: {message}")]
    Parse { origin: String, message: String },
    #[error("scenario `{scenario}`, stage {stage}: {source}")]
    Stage {
        scenario: String,
        stage: &'static str,
        source: himlab::Error,
    },
    #[error("{path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("{0}")]
    Other(String),
}

impl CliError {
    pub fn stage(scenario: &str, stage: &'static str, source: himlab::Error) -> CliError {
        CliError::Stage {
            scenario: scenario.to_string(),
            stage,
            source,
        }
    }

    pub fn io(path: &Path, source: std::io::Error) -> CliError {
        CliError::Io {
            path: path.display().to_string(),
            source,
        }
    }

    /// True when the underlying failure is an inconclusive solver run.
    pub fn is_inconclusive(&self) -> bool {
        matches!(
            self,
            CliError::Stage {
                source: himlab::Error::Inconclusive { .. } | himlab::Error::NoConvergence { .. },
                ..
            }
        )
    }
}
