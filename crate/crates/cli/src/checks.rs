use serde::Serialize;
use shellmc::oracles::uncollided_shell_cell_average;
use shellmc::transport::Source;
use shellmc::TallyResult64;

use crate::config::RunSpec;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Engine {
    Analog,
    Biased,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Check {
    /// `|F − reference| ≤ 3Σ`.
    FluxMatches(Engine, f64),
    /// `Σ/F ≤ max`.
    RelativeStdAtMost(Engine, f64),
    /// `Σ²_analog / Σ²_biased ≥ min`.
    VarianceRatioAtLeast(f64),
    ReachAtLeast(Engine, f64),
    ReachAtMost(Engine, f64),
    /// `|F_a − F_b| ≤ 3√(Σ²_a + Σ²_b)`.
    EnginesAgree,
    /// Analog profile against the pure-absorber shell oracle, cell by cell at 3σ.
    ShellProfile { min_crossings: u64 },
    /// Relative distance to a reference mean; reported as a warning, never fails.
    SoftFlux(Engine, f64, f64),
}

#[derive(Debug, Clone, Serialize)]
pub struct Outcome {
    pub check: String,
    pub passed: bool,
    /// Warning-level checks never fail a run.
    pub warning_only: bool,
    pub detail: String,
    /// `F − reference` for checks against a reference value.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
}

pub struct Results<'a> {
    pub spec: &'a RunSpec,
    pub analog: Option<&'a TallyResult64>,
    pub biased: Option<&'a TallyResult64>,
}

impl Results<'_> {
    fn get(&self, e: Engine) -> Result<&TallyResult64, String> {
        match e {
            Engine::Analog => self.analog,
            Engine::Biased => self.biased,
        }
        .ok_or_else(|| format!("{} engine was not run", e.name()))
    }
}

impl Check {
    pub fn label(&self) -> String {
        match *self {
            Check::FluxMatches(e, r) => format!("{} flux within 3 sigma of {r}", e.name()),
            Check::RelativeStdAtMost(e, m) => format!("{} relative std <= {m}", e.name()),
            Check::VarianceRatioAtLeast(m) => format!("variance ratio analog/biased >= {m}"),
            Check::ReachAtLeast(e, m) => format!("{} reach fraction >= {m}", e.name()),
            Check::ReachAtMost(e, m) => format!("{} reach fraction <= {m}", e.name()),
            Check::EnginesAgree => "analog and biased means agree within 3 combined sigma".into(),
            Check::ShellProfile { min_crossings } => {
                format!("profile matches shell oracle within 3 sigma (cells with >= {min_crossings} crossings)")
            }
            Check::SoftFlux(e, r, rel) => format!("{} flux within {}% of {r}", e.name(), rel * 100.0),
        }
    }
}

impl Engine {
    pub fn name(self) -> &'static str {
        match self {
            Engine::Analog => "analog",
            Engine::Biased => "biased",
        }
    }
}

pub fn evaluate(check: &Check, res: &Results) -> Outcome {
    let mut delta = None;
    let name = check.label();
    let warning_only = matches!(check, Check::SoftFlux(..));
    let verdict: Result<(bool, String), String> = (|| match *check {
        Check::FluxMatches(e, reference) => {
            let r = res.get(e)?;
            delta = Some(r.flux - reference);
            let ok = (r.flux - reference).abs() <= 3.0 * r.std_dev();
            Ok((ok, format!("F = {:e} ± {:e}, reference {reference:e}", r.flux, r.std_dev())))
        }
        Check::RelativeStdAtMost(e, max) => {
            let r = res.get(e)?;
            let rel = r.std_dev() / r.flux.abs();
            Ok((rel <= max, format!("Σ/F = {rel:e} (max {max:e})")))
        }
        Check::VarianceRatioAtLeast(min) => {
            let ratio = res.get(Engine::Analog)?.mean_variance / res.get(Engine::Biased)?.mean_variance;
            Ok((ratio >= min, format!("variance ratio {ratio:.2} (min {min})")))
        }
        Check::ReachAtLeast(e, min) => {
            let p = res.get(e)?.reach_fraction;
            Ok((p >= min, format!("P = {p:.4} (min {min})")))
        }
        Check::ReachAtMost(e, max) => {
            let p = res.get(e)?.reach_fraction;
            Ok((p <= max, format!("P = {p:.4} (max {max})")))
        }
        Check::EnginesAgree => {
            let (a, b) = (res.get(Engine::Analog)?, res.get(Engine::Biased)?);
            let bound = 3.0 * (a.mean_variance + b.mean_variance).sqrt();
            delta = Some(b.flux - a.flux);
            Ok(((a.flux - b.flux).abs() <= bound, format!("analog {:e}, biased {:e}, bound {bound:e}", a.flux, b.flux)))
        }
        Check::ShellProfile { min_crossings } => {
            let verdict = shell_profile_check(res, min_crossings)?;
            Ok((verdict.failed == 0, format!("{} of {} compared cells outside 3σ", verdict.failed, verdict.compared)))
        }
        Check::SoftFlux(e, reference, rel) => {
            let r = res.get(e)?;
            let dev = (r.flux - reference) / reference;
            delta = Some(r.flux - reference);
            Ok((dev.abs() <= rel, format!("F = {:e}, reference mean {reference:e}, relative deviation {dev:+.3}", r.flux)))
        }
    })();
    match verdict {
        Ok((passed, detail)) => Outcome { check: name, passed, warning_only, detail, delta },
        Err(detail) => Outcome { check: name, passed: false, warning_only, detail, delta },
    }
}

#[derive(Debug, Clone, Default)]
pub struct ProfileVerdict {
    pub compared: usize,
    pub failed: usize,
    pub cells: Vec<(usize, f64, f64, f64)>,
}

/// Compares the analog ψ profile with cell averages of the uncollided shell
/// flux; only cells with at least `min_crossings` segments take part.
pub fn shell_profile_check(res: &Results, min_crossings: u64) -> Result<ProfileVerdict, String> {
    let cfg = &res.spec.problem;
    let Source::Shell { radius } = cfg.source else {
        return Err("shell-profile check needs source = shell".into());
    };
    if cfg.kappa_s != 0.0 {
        return Err("shell-profile oracle only covers kappa_s = 0".into());
    }
    let profile = res.get(Engine::Analog)?.profile.as_ref().ok_or("no profile tallied (tally_cells = 0)")?;
    let mut v = ProfileVerdict::default();
    for j in 0..profile.psi.len() {
        if profile.crossings[j] < min_crossings {
            continue;
        }
        let exact = uncollided_shell_cell_average(profile.edges[j], profile.edges[j + 1], radius, cfg.kappa_t)
            .map_err(|e| e.to_string())?
            .value;
        v.compared += 1;
        if (profile.psi[j] - exact).abs() > 3.0 * profile.psi_std[j] {
            v.failed += 1;
        }
        v.cells.push((j, profile.psi[j], profile.psi_std[j], exact));
    }
    if v.compared == 0 {
        return Err("no cell has enough crossings".into());
    }
    Ok(v)
}
