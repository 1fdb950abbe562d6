//! Scenario files: TOML suites of `[[scenario]]` tables.
//!
//! ```toml
//! [[scenario]]
//! name = "point-contact-sqrt8"
//! expect = "nonnegative"
//!
//! [scenario.field]
//! kind = "point-contact"
//! c = 2.8284271247461903
//!
//! [scenario.mesh]
//! n_div = 8
//! levels = 1
//! pattern = "criss-cross"
//! ```

use std::collections::HashSet;
use std::path::Path;

use himlab::assembly::Symmetry;
use himlab::himtest::{Method, Outcome, DEFAULT_SEED, DEFAULT_TOL};
use himlab::mesh::{build_rect_mesh, Domain, Mesh, Pattern};
use himlab::regions::FieldSpec;
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeshSpec {
    /// Pieces on the shortest breakpoint interval of the domain.
    pub n_div: usize,
    /// Red refinements applied after building.
    #[serde(default)]
    pub levels: usize,
    #[serde(default)]
    pub pattern: Pattern,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub description: Option<String>,
    pub field: FieldSpec,
    /// Defaults to the field's natural domain.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub domain: Option<Domain>,
    pub mesh: MeshSpec,
    #[serde(default = "default_method")]
    pub method: Method,
    #[serde(default = "default_tol")]
    pub tol: f64,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default)]
    pub symmetry: Symmetry,
    /// Verdict the run must reproduce in CI mode.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expect: Option<Outcome>,
}

fn default_method() -> Method {
    Method::Pencil
}

fn default_tol() -> f64 {
    DEFAULT_TOL
}

fn default_seed() -> u64 {
    DEFAULT_SEED
}

impl Scenario {
    pub fn domain(&self) -> Domain {
        self.domain.clone().unwrap_or_else(|| self.field.natural_domain())
    }

    pub fn build_mesh(&self) -> Result<Mesh, CliError> {
        let stage = |e| CliError::stage(&self.name, "mesh", e);
        let mesh = build_rect_mesh(&self.domain(), self.mesh.n_div, self.mesh.pattern).map_err(stage)?;
        mesh.refined(self.mesh.levels).map_err(stage)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Suite {
    #[serde(rename = "scenario", default)]
    pub scenarios: Vec<Scenario>,
}

impl Suite {
    /// Parses a suite; `origin` names the source in error messages.
    pub fn parse(text: &str, origin: &str) -> Result<Suite, CliError> {
        let suite: Suite = toml::from_str(text).map_err(|e| CliError::Parse {
            origin: origin.to_string(),
            message: e.to_string(),
        })?;
        let mut seen = HashSet::new();
        for s in &suite.scenarios {
            if !seen.insert(s.name.as_str()) {
                return Err(CliError::Parse {
                    origin: origin.to_string(),
                    message: format!("duplicate scenario name `{}`", s.name),
                });
            }
        }
        Ok(suite)
    }

    pub fn load(path: &Path) -> Result<Suite, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Suite::parse(&text, &path.display().to_string())
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("scenario suites always serialize")
    }

    pub fn find(&self, name: &str) -> Option<&Scenario> {
        self.scenarios.iter().find(|s| s.name == name)
    }
}

/// Scenario files shipped with the binary.
pub const BUNDLED: &[(&str, &str)] = &[
    ("two-state.toml", include_str!("../scenarios/two-state.toml")),
    ("insulation.toml", include_str!("../scenarios/insulation.toml")),
    ("point-contact.toml", include_str!("../scenarios/point-contact.toml")),
];

/// All bundled scenarios as one suite.
pub fn bundled() -> Suite {
    let mut all = Suite::default();
    for (name, text) in BUNDLED {
        let s = Suite::parse(text, name).expect("bundled scenarios parse");
        all.scenarios.extend(s.scenarios);
    }
    all
}
