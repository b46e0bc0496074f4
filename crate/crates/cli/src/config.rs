//! Flat `key = value` run configuration.
//!
//! ```text
//! # stationary desk case
//! r0 = 0.1
//! r1 = 1
//! kappa_s = 0.9
//! kappa_t = 1
//! n = 1000
//! seed = 42
//! ```
//!
//! `n` is the number of histories in stationary mode and the number emitted
//! per step in unsteady mode. A stationary flux is integrated over
//! `t_final` (default 1, i.e. a rate).

use std::collections::BTreeMap;
use std::path::PathBuf;

use shellmc::oracles::exact_tmax;
use shellmc::transport::{Mode, ProblemConfig, Source};
use shellmc::ProblemConfig64;

#[derive(Debug, thiserror::Error, PartialEq)]
#[error("{key}: {reason}")]
pub struct ConfigError {
    pub key: String,
    pub reason: String,
}

impl ConfigError {
    fn new(key: impl Into<String>, reason: impl Into<String>) -> Self {
        Self { key: key.into(), reason: reason.into() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Importance {
    Off,
    On,
    Both,
}

impl Importance {
    pub fn runs_analog(self) -> bool {
        self != Importance::On
    }

    pub fn runs_biased(self) -> bool {
        self != Importance::Off
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunSpec {
    pub problem: ProblemConfig64,
    pub importance: Importance,
    pub output_dir: Option<PathBuf>,
}

pub const KEYS: &[&str] = &[
    "mode",
    "r1",
    "r0",
    "alpha",
    "beta",
    "kappa_s",
    "kappa_t",
    "t_final",
    "dt",
    "n",
    "particles_per_step",
    "n_r",
    "n_mu",
    "tally_cells",
    "seed",
    "source",
    "r_source",
    "source_end",
    "importance",
    "weight_cutoff",
    "output_dir",
    "workers",
];

/// Parses `key = value` lines into a map, rejecting unknown and repeated keys.
pub fn parse_pairs(text: &str) -> Result<BTreeMap<String, String>, ConfigError> {
    let mut pairs = BTreeMap::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| ConfigError::new(format!("line {}", lineno + 1), format!("expected key = value, got `{line}`")))?;
        insert_pair(&mut pairs, key.trim(), value.trim(), false)?;
    }
    Ok(pairs)
}

/// Adds or (with `replace`) overrides one key.
pub fn insert_pair(pairs: &mut BTreeMap<String, String>, key: &str, value: &str, replace: bool) -> Result<(), ConfigError> {
    if !KEYS.contains(&key) {
        return Err(ConfigError::new(key, format!("unknown key (known: {})", KEYS.join(", "))));
    }
    if value.is_empty() {
        return Err(ConfigError::new(key, "missing value"));
    }
    if pairs.insert(key.to_string(), value.to_string()).is_some() && !replace {
        return Err(ConfigError::new(key, "given more than once"));
    }
    Ok(())
}

pub fn parse_config(text: &str) -> Result<RunSpec, ConfigError> {
    build_spec(&parse_pairs(text)?)
}

struct Reader<'a>(&'a BTreeMap<String, String>);

impl Reader<'_> {
    fn raw(&self, key: &str) -> Option<&str> {
        self.0.get(key).map(String::as_str)
    }

    fn parse<V: std::str::FromStr>(&self, key: &str) -> Result<Option<V>, ConfigError>
    where
        V::Err: std::fmt::Display,
    {
        self.raw(key)
            .map(|v| v.parse::<V>().map_err(|e| ConfigError::new(key, format!("cannot parse `{v}`: {e}"))))
            .transpose()
    }

    fn real(&self, key: &str, default: f64) -> Result<f64, ConfigError> {
        let v = self.parse::<f64>(key)?.unwrap_or(default);
        if !v.is_finite() {
            return Err(ConfigError::new(key, "must be finite"));
        }
        Ok(v)
    }

    fn count(&self, key: &str, default: usize) -> Result<usize, ConfigError> {
        Ok(self.parse::<usize>(key)?.unwrap_or(default))
    }
}

pub fn build_spec(pairs: &BTreeMap<String, String>) -> Result<RunSpec, ConfigError> {
    let rd = Reader(pairs);
    let mode = match rd.raw("mode").unwrap_or("stationary") {
        "stationary" => Mode::Stationary,
        "unsteady" => Mode::Unsteady,
        other => return Err(ConfigError::new("mode", format!("expected stationary or unsteady, got `{other}`"))),
    };
    if rd.raw("r0").is_some() && rd.raw("alpha").is_some() {
        return Err(ConfigError::new("r0", "r0 and alpha name the same quantity; give one"));
    }
    let alpha_key = if rd.raw("alpha").is_some() { "alpha" } else { "r0" };
    let alpha = rd.real(alpha_key, 0.0)?;
    let r1 = rd.real("r1", 1.0)?;
    let kappa_s = rd.real("kappa_s", 0.0)?;
    let kappa_t = rd.real("kappa_t", 1.0)?;
    let seed = rd.parse::<u64>("seed")?.unwrap_or(1);

    let mut cfg = match mode {
        Mode::Stationary => {
            if rd.raw("beta").is_some_and(|b| b.parse::<f64>().ok() != Some(0.0)) {
                return Err(ConfigError::new("beta", "stationary mode needs beta = 0"));
            }
            if rd.raw("particles_per_step").is_some() {
                return Err(ConfigError::new("particles_per_step", "only meaningful in unsteady mode (use n)"));
            }
            if rd.raw("dt").is_some() {
                return Err(ConfigError::new("dt", "only meaningful in unsteady mode"));
            }
            let n = rd.count("n", 10_000)?;
            let mut cfg = ProblemConfig::stationary(alpha, r1, kappa_s, kappa_t, n, seed);
            cfg.t_final = rd.real("t_final", 1.0)?;
            cfg
        }
        Mode::Unsteady => {
            let t_final = rd.parse::<f64>("t_final")?.ok_or_else(|| ConfigError::new("t_final", "required in unsteady mode"))?;
            let dt = rd.parse::<f64>("dt")?.ok_or_else(|| ConfigError::new("dt", "required in unsteady mode"))?;
            if rd.raw("n").is_some() && rd.raw("particles_per_step").is_some() {
                return Err(ConfigError::new("n", "n and particles_per_step name the same quantity in unsteady mode"));
            }
            let m_key = if rd.raw("particles_per_step").is_some() { "particles_per_step" } else { "n" };
            let m = rd.count(m_key, 100)?;
            ProblemConfig::unsteady(alpha, rd.real("beta", 0.0)?, r1, kappa_s, kappa_t, t_final, dt, m, seed)
        }
    };
    cfg.n_r = rd.count("n_r", cfg.n_r)?;
    cfg.n_mu = rd.count("n_mu", cfg.n_mu)?;
    cfg.tally_cells = rd.count("tally_cells", 0)?;
    cfg.weight_cutoff = rd.real("weight_cutoff", cfg.weight_cutoff)?;
    cfg.workers = rd.count("workers", 1)?;
    cfg.source = match rd.raw("source").unwrap_or("outer_boundary") {
        "outer_boundary" => {
            if rd.raw("r_source").is_some() {
                return Err(ConfigError::new("r_source", "only meaningful with source = shell"));
            }
            Source::OuterBoundary
        }
        "shell" => Source::Shell {
            radius: rd.parse::<f64>("r_source")?.ok_or_else(|| ConfigError::new("r_source", "required with source = shell"))?,
        },
        other => return Err(ConfigError::new("source", format!("expected outer_boundary or shell, got `{other}`"))),
    };
    cfg.source_end = match rd.raw("source_end") {
        None => None,
        Some("tmax") => {
            let t = exact_tmax(cfg.alpha, cfg.beta, cfg.r_outer, cfg.t_final).map_err(|e| ConfigError::new("source_end", e.to_string()))?;
            Some(t.value)
        }
        Some(_) => Some(rd.real("source_end", 0.0)?),
    };
    if cfg.source_end.is_some() && mode == Mode::Stationary {
        return Err(ConfigError::new("source_end", "only meaningful in unsteady mode"));
    }
    let importance = match rd.raw("importance").unwrap_or("off") {
        "off" => Importance::Off,
        "on" => Importance::On,
        "both" => Importance::Both,
        other => return Err(ConfigError::new("importance", format!("expected off, on or both, got `{other}`"))),
    };
    cfg.validate().map_err(|e| match e {
        shellmc::Error::Config(msg) => ConfigError::new("config", msg),
        other => ConfigError::new("config", other.to_string()),
    })?;
    Ok(RunSpec { problem: cfg, importance, output_dir: rd.raw("output_dir").map(PathBuf::from) })
}

/// Inverse of [`parse_config`] for the keys a spec actually sets.
pub fn render_config(spec: &RunSpec) -> String {
    let c = &spec.problem;
    let mut out = String::new();
    let mut put = |k: &str, v: String| out.push_str(&format!("{k} = {v}\n"));
    match c.mode {
        Mode::Stationary => {
            put("mode", "stationary".into());
            put("r0", c.alpha.to_string());
            put("n", c.histories.to_string());
            put("t_final", c.t_final.to_string());
        }
        Mode::Unsteady => {
            put("mode", "unsteady".into());
            put("alpha", c.alpha.to_string());
            put("beta", c.beta.to_string());
            put("t_final", c.t_final.to_string());
            put("dt", c.dt.to_string());
            put("particles_per_step", c.particles_per_step.to_string());
            if let Some(end) = c.source_end {
                put("source_end", end.to_string());
            }
        }
    }
    put("r1", c.r_outer.to_string());
    put("kappa_s", c.kappa_s.to_string());
    put("kappa_t", c.kappa_t.to_string());
    put("n_r", c.n_r.to_string());
    put("n_mu", c.n_mu.to_string());
    put("tally_cells", c.tally_cells.to_string());
    put("seed", c.seed.to_string());
    match c.source {
        Source::OuterBoundary => put("source", "outer_boundary".into()),
        Source::Shell { radius } => {
            put("source", "shell".into());
            put("r_source", radius.to_string());
        }
    }
    put("importance", serde_json::to_value(spec.importance).unwrap().as_str().unwrap().to_string());
    put("weight_cutoff", c.weight_cutoff.to_string());
    put("workers", c.workers.to_string());
    if let Some(dir) = &spec.output_dir {
        put("output_dir", dir.display().to_string());
    }
    out
}
