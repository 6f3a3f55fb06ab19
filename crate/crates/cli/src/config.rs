//! Run configuration: a TOML file, overridden by command-line flags.

use std::path::PathBuf;

use clap::ValueEnum;
use cmc_core::{ContinuationConfig, Signature};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::CliError;
use crate::spec::{parse_boundary_data, parse_domain};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    Solve,
    Verify,
    Catalog,
    Predicates,
    Sweep,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub command: Option<Command>,
    pub domain: String,
    #[serde(rename = "H")]
    pub mean_curvature: f64,
    pub signature: Signature,
    pub h: f64,
    pub boundary_data: String,
    /// Boundary samples used for the min/max of the data in height bounds.
    pub phi_samples: usize,
    pub out: PathBuf,
    pub jobs: Option<usize>,
    pub continuation: ContinuationConfig,
    pub sweep: SweepConfig,
    pub catalog: CatalogConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            command: None,
            domain: "unit_disk".into(),
            mean_curvature: 0.5,
            signature: Signature::Euclidean,
            h: 1.0 / 64.0,
            boundary_data: "zero".into(),
            phi_samples: 1024,
            out: PathBuf::from("out"),
            jobs: None,
            continuation: ContinuationConfig::default(),
            sweep: SweepConfig::default(),
            catalog: CatalogConfig::default(),
        }
    }
}

/// Parameter grid of a sweep. Empty lists fall back to the top-level value.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepConfig {
    #[serde(rename = "H")]
    pub mean_curvatures: Vec<f64>,
    pub signatures: Vec<Signature>,
    pub domains: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CatalogConfig {
    /// Table resolution per axis.
    pub samples: usize,
    pub profile_c: f64,
    pub family_c: Vec<f64>,
}

impl Default for CatalogConfig {
    fn default() -> Self {
        Self {
            samples: 41,
            profile_c: -1.0,
            family_c: vec![-0.1, -1.0, -10.0],
        }
    }
}

/// Flag values that override the file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub command: Option<Command>,
    pub out: Option<PathBuf>,
    pub h: Option<f64>,
    pub mean_curvature: Option<f64>,
    pub signature: Option<Signature>,
    pub domain: Option<String>,
    pub jobs: Option<usize>,
    pub boundary_data: Option<String>,
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Config(e.message().to_string()))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("run config serializes")
    }

    pub fn apply(&mut self, o: &Overrides) {
        if o.command.is_some() {
            self.command = o.command;
        }
        if let Some(v) = &o.out {
            self.out = v.clone();
        }
        if let Some(v) = o.h {
            self.h = v;
        }
        if let Some(v) = o.mean_curvature {
            self.mean_curvature = v;
        }
        if let Some(v) = o.signature {
            self.signature = v;
        }
        if let Some(v) = &o.domain {
            self.domain = v.clone();
        }
        if o.jobs.is_some() {
            self.jobs = o.jobs;
        }
        if let Some(v) = &o.boundary_data {
            self.boundary_data = v.clone();
        }
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let bad = |m: String| Err(CliError::Config(m));
        if self.command.is_none() {
            return bad("no command given (flag or `command` key)".into());
        }
        if !self.mean_curvature.is_finite() {
            return bad(format!("H must be finite, got {}", self.mean_curvature));
        }
        if !(self.h.is_finite() && self.h > 0.0) {
            return bad(format!("h must be positive and finite, got {}", self.h));
        }
        if self.phi_samples < 16 {
            return bad("phi_samples must be at least 16".into());
        }
        if self.jobs == Some(0) {
            return bad("jobs must be positive".into());
        }
        if self.sweep.mean_curvatures.iter().any(|h| !h.is_finite()) {
            return bad("sweep H values must be finite".into());
        }
        if !self.catalog.profile_c.is_finite() || self.catalog.family_c.iter().any(|c| !c.is_finite()) {
            return bad("catalog constants must be finite".into());
        }
        if self.catalog.samples < 2 {
            return bad("catalog samples must be at least 2".into());
        }
        self.continuation
            .validate()
            .or_else(|e| bad(e.to_string()))?;
        parse_domain(&self.domain)?;
        for d in &self.sweep.domains {
            parse_domain(d)?;
        }
        parse_boundary_data(&self.boundary_data)?;
        Ok(())
    }

    /// SHA-256 of the effective configuration as TOML.
    pub fn hash(&self) -> String {
        hex::encode(Sha256::digest(self.to_toml().as_bytes()))
    }
}
