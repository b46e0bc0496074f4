//! CSV and JSON writers. Numbers are written with `{:e}`, which round-trips f64 exactly.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use shellmc::{ImportanceTable64, ShellProfile64, TallyResult64};

use crate::runner::{json_summary, Report};

pub const SUMMARY_HEADER: [&str; 9] = ["n_histories", "flux", "variance", "std_dev", "time1_s", "time2_s", "fom1", "fom2", "p_reach"];

fn sci(x: f64) -> String {
    format!("{x:e}")
}

fn opt(x: Option<f64>) -> String {
    x.map_or_else(|| "nan".to_string(), sci)
}

pub fn write_summary_csv(path: &Path, r: &TallyResult64) -> Result<()> {
    let mut w = csv::Writer::from_path(path).with_context(|| format!("creating {}", path.display()))?;
    w.write_record(SUMMARY_HEADER)?;
    w.write_record([
        r.histories.to_string(),
        sci(r.flux),
        sci(r.mean_variance),
        sci(r.std_dev()),
        sci(r.wall_seconds),
        sci(r.wall_seconds - r.setup_seconds),
        opt(r.fom_total()),
        opt(r.fom_transport()),
        sci(r.reach_fraction),
    ])?;
    w.flush()?;
    Ok(())
}

pub fn write_profile_csv(path: &Path, p: &ShellProfile64) -> Result<()> {
    let mut w = csv::Writer::from_path(path).with_context(|| format!("creating {}", path.display()))?;
    w.write_record(["r_center", "psi", "psi_std", "n_crossings"])?;
    for j in 0..p.psi.len() {
        w.write_record([sci(p.r_center[j]), sci(p.psi[j]), sci(p.psi_std[j]), p.crossings[j].to_string()])?;
    }
    w.flush()?;
    Ok(())
}

/// Writes every result file of `report` into `dir` and returns their paths.
pub fn write_report(dir: &Path, report: &Report) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let mut written = Vec::new();
    for (tag, result) in [("analog", &report.analog), ("biased", &report.biased)] {
        let Some(r) = result else { continue };
        let path = dir.join(format!("summary_{tag}.csv"));
        write_summary_csv(&path, r)?;
        written.push(path);
        if let Some(p) = &r.profile {
            let path = dir.join(format!("profile_{tag}.csv"));
            write_profile_csv(&path, p)?;
            written.push(path);
        }
    }
    let path = dir.join("summary.json");
    fs::write(&path, serde_json::to_string_pretty(&json_summary(report))? + "\n")?;
    written.push(path);
    Ok(written)
}

/// Writes `phi.csv` (r_center, phi) and `importance.csv`
/// (r_center, mu_center, I, kappa_s_tilde, kappa_t_tilde).
pub fn write_importance(dir: &Path, table: &ImportanceTable64) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let rc = table.rmesh().centers();
    let mc = table.dmesh().centers();

    let phi_path = dir.join("phi.csv");
    let mut w = csv::Writer::from_path(&phi_path)?;
    w.write_record(["r_center", "phi"])?;
    for (r, phi) in rc.iter().zip(table.phi()) {
        w.write_record([sci(*r), sci(*phi)])?;
    }
    w.flush()?;

    let table_path = dir.join("importance.csv");
    let mut w = csv::Writer::from_path(&table_path)?;
    w.write_record(["r_center", "mu_center", "I", "kappa_s_tilde", "kappa_t_tilde"])?;
    for (j, r) in rc.iter().enumerate() {
        for (l, mu) in mc.iter().enumerate() {
            w.write_record([
                sci(*r),
                sci(*mu),
                sci(table.importance(j, l)),
                sci(table.kappa_s_tilde(j, l)),
                sci(table.kappa_t_tilde(j, l)),
            ])?;
        }
    }
    w.flush()?;
    Ok(vec![phi_path, table_path])
}
