use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};
use shellmc::biased::importance_for;
use shellmc_cli::output::{write_importance, write_report};
use shellmc_cli::runner::RequestError;
use shellmc_cli::{execute, parse_config, prepare, presets, Request};

#[derive(Parser)]
#[command(name = "shellmc", version, about = "Monte Carlo transport in a spherical shell")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a preset or a configuration file.
    Run {
        /// Preset name or path to a key = value configuration file.
        target: String,
        /// Override a configuration key (repeatable).
        #[arg(long = "set", value_name = "KEY=VALUE")]
        set: Vec<String>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        workers: Option<usize>,
        /// Output directory (default: output_dir from the config, else ./shellmc-out/<name>).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// List the available presets.
    ListPresets,
    /// Write the adjoint solution and importance table of a configuration as CSV.
    DumpImportance {
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

const EXIT_FAIL: u8 = 1;
const EXIT_USAGE: u8 = 2;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::ListPresets => {
            for p in presets() {
                println!("{:<18} {}", p.name, p.description);
            }
            ExitCode::SUCCESS
        }
        Command::Run { target, set, seed, workers, out } => {
            let mut overrides = Vec::new();
            for kv in &set {
                match kv.split_once('=') {
                    Some((k, v)) => overrides.push((k.trim().to_string(), v.trim().to_string())),
                    None => {
                        eprintln!("error: --set expects KEY=VALUE, got `{kv}`");
                        return ExitCode::from(EXIT_USAGE);
                    }
                }
            }
            if let Some(s) = seed {
                overrides.push(("seed".into(), s.to_string()));
            }
            if let Some(w) = workers {
                overrides.push(("workers".into(), w.to_string()));
            }
            let prepared = match prepare(&Request { target, overrides }) {
                Ok(p) => p,
                Err(e) => {
                    eprintln!("error: {e}");
                    return ExitCode::from(EXIT_USAGE);
                }
            };
            let dir = out
                .or_else(|| prepared.spec.output_dir.clone())
                .unwrap_or_else(|| PathBuf::from("shellmc-out").join(&prepared.name));
            match run_and_write(&prepared, &dir) {
                Ok(true) => ExitCode::SUCCESS,
                Ok(false) => ExitCode::from(EXIT_FAIL),
                Err(e) => {
                    eprintln!("error: {e:#}");
                    ExitCode::from(EXIT_FAIL)
                }
            }
        }
        Command::DumpImportance { config, out } => match dump(&config, out) {
            Ok(()) => ExitCode::SUCCESS,
            Err(e) => {
                eprintln!("error: {e:#}");
                let usage = e.downcast_ref::<RequestError>().is_some() || e.downcast_ref::<shellmc_cli::ConfigError>().is_some();
                ExitCode::from(if usage { EXIT_USAGE } else { EXIT_FAIL })
            }
        },
    }
}

fn run_and_write(prepared: &shellmc_cli::runner::Prepared, dir: &std::path::Path) -> Result<bool> {
    let report = execute(prepared)?;
    for (tag, r) in [("analog", &report.analog), ("biased", &report.biased)] {
        if let Some(r) = r {
            println!(
                "{tag:<7} F = {:.6e} ± {:.3e}  P = {:.4}  time {:.2} s ({:.2} s transport)",
                r.flux,
                r.std_dev(),
                r.reach_fraction,
                r.wall_seconds,
                r.wall_seconds - r.setup_seconds
            );
        }
    }
    for o in &report.outcomes {
        let mark = match (o.passed, o.warning_only) {
            (true, _) => "pass",
            (false, true) => "warn",
            (false, false) => "FAIL",
        };
        println!("[{mark}] {}: {}", o.check, o.detail);
    }
    for path in write_report(dir, &report)? {
        println!("wrote {}", path.display());
    }
    Ok(report.passed())
}

fn dump(config: &std::path::Path, out: Option<PathBuf>) -> Result<()> {
    let text = std::fs::read_to_string(config)
        .map_err(|source| RequestError::Read { path: config.display().to_string(), source })?;
    let spec = parse_config(&text)?;
    let table = importance_for(&spec.problem, 0.0).context("building the importance table")?;
    let dir = out.or(spec.output_dir).unwrap_or_else(|| PathBuf::from("shellmc-out").join("importance"));
    for path in write_importance(&dir, &table)? {
        println!("wrote {}", path.display());
    }
    Ok(())
}
