//! Experiment runner for `miesim-core`: configuration files, CSV output,
//! run manifests and SVG plots.

pub mod config;
pub mod manifest;
pub mod plot;
pub mod run;

pub use config::{parse as parse_config, ConfigError, ExperimentConfig};
pub use manifest::RunManifest;
pub use plot::{plot_csv, PlotError, PlotKind};
pub use run::{run, Check, RunOutput};
