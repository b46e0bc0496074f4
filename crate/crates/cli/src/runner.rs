use std::collections::BTreeMap;

use anyhow::{Context, Result};
use serde::Serialize;
use shellmc::biased::run_biased;
use shellmc::transport::run_analog;
use shellmc::TallyResult64;

use crate::checks::{evaluate, Check, Outcome, Results};
use crate::config::{build_spec, insert_pair, parse_pairs, render_config, RunSpec};
use crate::presets;

/// What to run: a preset by name or a configuration file, plus overrides.
#[derive(Debug, Clone)]
pub struct Request {
    pub target: String,
    pub overrides: Vec<(String, String)>,
}

#[derive(Debug, thiserror::Error)]
pub enum RequestError {
    #[error("unknown preset `{0}` (available: {1})")]
    UnknownPreset(String, String),
    #[error(transparent)]
    Config(#[from] crate::config::ConfigError),
    #[error("cannot read {path}: {source}")]
    Read { path: String, source: std::io::Error },
}

#[derive(Debug, Clone)]
pub struct Prepared {
    pub name: String,
    pub spec: RunSpec,
    pub checks: Vec<Check>,
}

/// Resolves a preset name or config path and applies overrides.
pub fn prepare(req: &Request) -> Result<Prepared, RequestError> {
    let path = std::path::Path::new(&req.target);
    let (name, text, checks) = if let Some(p) = presets::find(&req.target) {
        (p.name.to_string(), p.config, p.checks)
    } else if path.is_file() {
        let text = std::fs::read_to_string(path).map_err(|source| RequestError::Read { path: req.target.clone(), source })?;
        let name = path.file_stem().map_or("run".into(), |s| s.to_string_lossy().into_owned());
        (name, text, Vec::new())
    } else {
        return Err(RequestError::UnknownPreset(req.target.clone(), presets::names().join(", ")));
    };
    let mut pairs: BTreeMap<String, String> = parse_pairs(&text)?;
    for (k, v) in &req.overrides {
        insert_pair(&mut pairs, k, v, true)?;
    }
    Ok(Prepared { name, spec: build_spec(&pairs)?, checks })
}

#[derive(Debug, Clone)]
pub struct Report {
    pub name: String,
    pub spec: RunSpec,
    pub analog: Option<TallyResult64>,
    pub biased: Option<TallyResult64>,
    pub outcomes: Vec<Outcome>,
}

impl Report {
    /// True when every hard check passed.
    pub fn passed(&self) -> bool {
        self.outcomes.iter().all(|o| o.passed || o.warning_only)
    }

    pub fn warnings(&self) -> impl Iterator<Item = &Outcome> {
        self.outcomes.iter().filter(|o| o.warning_only && !o.passed)
    }
}

pub fn execute(prepared: &Prepared) -> Result<Report> {
    let spec = &prepared.spec;
    let analog = if spec.importance.runs_analog() {
        Some(run_analog(&spec.problem).context("analog run")?)
    } else {
        None
    };
    let biased = if spec.importance.runs_biased() {
        Some(run_biased(&spec.problem).context("importance-sampled run")?)
    } else {
        None
    };
    let res = Results { spec, analog: analog.as_ref(), biased: biased.as_ref() };
    let outcomes = prepared.checks.iter().map(|c| evaluate(c, &res)).collect();
    Ok(Report { name: prepared.name.clone(), spec: spec.clone(), analog, biased, outcomes })
}

#[derive(Debug, Serialize)]
pub struct EngineSummary {
    pub n_histories: u64,
    pub mean: f64,
    pub sigma2: f64,
    #[serde(rename = "Sigma2")]
    pub mean_variance: f64,
    pub std_dev: f64,
    pub time1_s: f64,
    pub time2_s: f64,
    pub fom1: Option<f64>,
    pub fom2: Option<f64>,
    pub p_reach: f64,
    pub exited_inner: u64,
    pub exited_outer: u64,
    pub absorbed_cutoff: u64,
    pub census: u64,
}

impl From<&TallyResult64> for EngineSummary {
    fn from(r: &TallyResult64) -> Self {
        Self {
            n_histories: r.histories,
            mean: r.flux,
            sigma2: r.sample_variance,
            mean_variance: r.mean_variance,
            std_dev: r.std_dev(),
            time1_s: r.wall_seconds,
            time2_s: r.wall_seconds - r.setup_seconds,
            fom1: r.fom_total(),
            fom2: r.fom_transport(),
            p_reach: r.reach_fraction,
            exited_inner: r.status.exited_inner,
            exited_outer: r.status.exited_outer,
            absorbed_cutoff: r.status.absorbed_cutoff,
            census: r.status.census,
        }
    }
}

#[derive(Debug, Serialize)]
pub struct JsonSummary<'a> {
    pub name: &'a str,
    pub config: String,
    pub engines: BTreeMap<&'static str, EngineSummary>,
    pub checks: &'a [Outcome],
    pub warnings: Vec<String>,
    pub passed: bool,
}

pub fn json_summary(report: &Report) -> JsonSummary<'_> {
    let mut engines = BTreeMap::new();
    if let Some(a) = &report.analog {
        engines.insert("analog", EngineSummary::from(a));
    }
    if let Some(b) = &report.biased {
        engines.insert("biased", EngineSummary::from(b));
    }
    JsonSummary {
        name: &report.name,
        config: render_config(&report.spec),
        engines,
        checks: &report.outcomes,
        warnings: report.warnings().map(|o| o.detail.clone()).collect(),
        passed: report.passed(),
    }
}
