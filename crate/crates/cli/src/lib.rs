//! Configuration parsing, experiment presets, acceptance checks and result
//! files for the `shellmc` command-line tool.

pub mod checks;
pub mod config;
pub mod output;
pub mod presets;
pub mod runner;

pub use config::{parse_config, ConfigError, Importance, RunSpec};
pub use presets::{presets, ExperimentPreset};
pub use runner::{execute, prepare, Report, Request};
