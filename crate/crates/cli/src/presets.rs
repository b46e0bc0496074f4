//! Named experiments: the verification cases, the stationary and unsteady
//! variance-reduction tables at desk scale, and the shell-source profile.

use crate::checks::{Check, Engine};

#[derive(Debug, Clone)]
pub struct ExperimentPreset {
    pub name: &'static str,
    pub description: &'static str,
    /// Configuration text in the `key = value` format.
    pub config: String,
    pub checks: Vec<Check>,
}

const STATIONARY_09: &str = "r0 = 0.1\nr1 = 1\nkappa_s = 0.9\nkappa_t = 1\nt_final = 10\nn = 10000\nseed = 1\n";
const STATIONARY_01: &str = "r0 = 0.1\nr1 = 1\nkappa_s = 0.1\nkappa_t = 1\nt_final = 10\nn = 10000\nseed = 1\n";
const UNSTEADY_09: &str = "mode = unsteady\nalpha = 0.37625\nbeta = -0.027625\nr1 = 1\nkappa_s = 0.9\nkappa_t = 1\nt_final = 10\ndt = 0.01\nn = 20\nseed = 1\n";
const STREAMING: &str = "mode = unsteady\nalpha = 0.37625\nbeta = -0.027625\nr1 = 1\nkappa_s = 0\nkappa_t = 0\nt_final = 10\ndt = 0.01\nn = 200\nsource_end = tmax\nseed = 1\n";
const ABSORBING: &str = "mode = unsteady\nalpha = 0.37625\nbeta = -0.027625\nr1 = 1\nkappa_s = 0\nkappa_t = 1\nt_final = 10\ndt = 0.01\nn = 200\nsource_end = tmax\nseed = 1\n";
const SHELL: &str = "r0 = 0\nr1 = 1\nsource = shell\nr_source = 0.45\nkappa_s = 0\nkappa_t = 1\nn = 100000\ntally_cells = 25\nseed = 1\n";

/// Reference means of the stationary tables, compared at ±15% as warnings only.
pub const TABLE_MEAN_09: f64 = 0.0381;
pub const TABLE_MEAN_01: f64 = 0.0191;
pub const STREAMING_FLUX: f64 = 0.25172763696;
pub const ABSORBING_FLUX: f64 = 0.11385526445;

fn stationary_pair(mean: f64) -> Vec<Check> {
    vec![
        Check::VarianceRatioAtLeast(20.0),
        Check::ReachAtLeast(Engine::Biased, 0.8),
        Check::ReachAtMost(Engine::Analog, 0.05),
        Check::EnginesAgree,
        Check::SoftFlux(Engine::Biased, mean, 0.15),
    ]
}

pub fn presets() -> Vec<ExperimentPreset> {
    vec![
        ExperimentPreset {
            name: "table1",
            description: "stationary, kappa_s = 0.9, analog",
            config: concat_cfg(STATIONARY_09, "importance = off\n"),
            checks: vec![Check::ReachAtMost(Engine::Analog, 0.05), Check::SoftFlux(Engine::Analog, TABLE_MEAN_09, 0.15)],
        },
        ExperimentPreset {
            name: "table2",
            description: "stationary, kappa_s = 0.9, analog and importance-sampled",
            config: concat_cfg(STATIONARY_09, "importance = both\n"),
            checks: stationary_pair(TABLE_MEAN_09),
        },
        ExperimentPreset {
            name: "table3",
            description: "stationary, kappa_s = 0.1, analog",
            config: concat_cfg(STATIONARY_01, "importance = off\n"),
            checks: vec![Check::ReachAtMost(Engine::Analog, 0.05), Check::SoftFlux(Engine::Analog, TABLE_MEAN_01, 0.15)],
        },
        ExperimentPreset {
            name: "table4",
            description: "stationary, kappa_s = 0.1, analog and importance-sampled",
            config: concat_cfg(STATIONARY_01, "importance = both\n"),
            checks: stationary_pair(TABLE_MEAN_01),
        },
        ExperimentPreset {
            name: "table5",
            description: "moving inner sphere, kappa_s = 0.9, analog",
            config: concat_cfg(UNSTEADY_09, "importance = off\n"),
            checks: vec![],
        },
        ExperimentPreset {
            name: "table6",
            description: "moving inner sphere, kappa_s = 0.9, analog and importance-sampled",
            config: concat_cfg(UNSTEADY_09, "importance = both\n"),
            checks: vec![Check::VarianceRatioAtLeast(10.0), Check::EnginesAgree],
        },
        ExperimentPreset {
            name: "verify_streaming",
            description: "moving inner sphere in vacuum against the exact flux",
            config: STREAMING.into(),
            checks: vec![Check::FluxMatches(Engine::Analog, STREAMING_FLUX)],
        },
        ExperimentPreset {
            name: "verify_absorbing",
            description: "moving inner sphere in a pure absorber against the exact flux",
            config: ABSORBING.into(),
            checks: vec![Check::FluxMatches(Engine::Analog, ABSORBING_FLUX)],
        },
        ExperimentPreset {
            name: "shell_profile",
            description: "scalar-flux profile of a shell source in a pure absorber",
            config: SHELL.into(),
            checks: vec![Check::ShellProfile { min_crossings: 100 }],
        },
    ]
}

pub fn find(name: &str) -> Option<ExperimentPreset> {
    presets().into_iter().find(|p| p.name == name)
}

pub fn names() -> Vec<&'static str> {
    presets().iter().map(|p| p.name).collect()
}

fn concat_cfg(a: &str, b: &str) -> String {
    format!("{a}{b}")
}
