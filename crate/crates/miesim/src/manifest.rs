//! JSON record written next to every run's CSV.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::config::ExperimentConfig;
use crate::run::Check;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunManifest {
    pub name: String,
    pub kind: String,
    pub check: String,
    pub seed: u64,
    pub config: BTreeMap<String, BTreeMap<String, String>>,
    pub code_version: String,
    pub wall_time_secs: f64,
    pub threads: usize,
    pub csv: String,
    pub checks: Vec<Check>,
    pub pass: bool,
}

impl RunManifest {
    pub fn new(
        cfg: &ExperimentConfig,
        checks: Vec<Check>,
        wall_time_secs: f64,
        threads: usize,
    ) -> Self {
        RunManifest {
            name: cfg.name.clone(),
            kind: cfg.kind.name().into(),
            check: cfg.check.clone(),
            seed: cfg.seed,
            config: cfg.echo.clone(),
            code_version: env!("CARGO_PKG_VERSION").into(),
            wall_time_secs,
            threads,
            csv: cfg.csv.display().to_string(),
            pass: checks.iter().all(|c| c.pass),
            checks,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("manifest serializes")
    }
}
