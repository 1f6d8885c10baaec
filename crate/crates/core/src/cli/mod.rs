//! Batch front-end: one scenario per invocation, results written as JSON
//! and CSV under an output directory.
//!
//! Exit codes: 0 success, 1 destabilization sought but inconclusive,
//! 2 configuration error, 3 numerical-consistency failure.

mod commands;
mod config;

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::variation::{ErrorRecord, VariationReport};

pub use commands::{
    execute, status_of, Command, Outcome, Status, DRIFT_TOLERANCE, INVARIANCE_TOLERANCE,
    KILLING_CONSTANT_TOLERANCE, KILLING_RESIDUAL_TOLERANCE,
};
pub use config::{CustomTerm, Resolution, Scenario, ScenarioConfig, MIN_RESOLUTION};

#[derive(Debug, Parser)]
#[command(
    name = "jholo",
    version,
    about = "Variations of area under deformations of the ambient symplectic form"
)]
struct Cli {
    #[command(subcommand)]
    command: Sub,
}

#[derive(Debug, Subcommand)]
enum Sub {
    /// Kähler angle and area density per node (angle.csv).
    Angle(Flags),
    /// First variation along the configured path, with its oracle.
    FirstVariation(Flags),
    /// Second variation along the configured path, with its oracle.
    SecondVariation(Flags),
    /// Search for a destabilizing deformation and certify the result.
    Destabilize(Flags),
    /// Killing-potential constants at a node of a surface in CP^N.
    KillingCheck(Flags),
    /// Area invariance under random exact deformations.
    Invariance(Flags),
}

#[derive(Debug, Args)]
struct Flags {
    /// Scenario file (TOML).
    #[arg(long)]
    config: PathBuf,
    /// Output directory; overrides `out` in the config.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Grid nodes per axis; overrides `resolution` in the config.
    #[arg(long)]
    resolution: Option<usize>,
    /// Seed for random draws; overrides `seed` in the config.
    #[arg(long)]
    seed: Option<u64>,
}

impl Sub {
    fn split(self) -> (Command, Flags) {
        match self {
            Sub::Angle(f) => (Command::Angle, f),
            Sub::FirstVariation(f) => (Command::FirstVariation, f),
            Sub::SecondVariation(f) => (Command::SecondVariation, f),
            Sub::Destabilize(f) => (Command::Destabilize, f),
            Sub::KillingCheck(f) => (Command::KillingCheck, f),
            Sub::Invariance(f) => (Command::Invariance, f),
        }
    }
}

/// Contents of `report.json`.
#[derive(Debug, Serialize)]
pub struct RunRecord<'a> {
    pub version: &'static str,
    pub command: Command,
    pub config_hash: Option<String>,
    pub config: Option<&'a ScenarioConfig>,
    pub exit_code: i32,
    pub report: Option<&'a VariationReport>,
    pub error: Option<ErrorRecord>,
}

fn load(flags: &Flags) -> Result<Scenario> {
    let mut cfg = ScenarioConfig::load(&flags.config)?;
    if let Some(n) = flags.resolution {
        cfg.resolution = Resolution::Square(n);
    }
    if let Some(s) = flags.seed {
        cfg.seed = s;
    }
    if let Some(o) = &flags.out {
        cfg.out = Some(o.clone());
    }
    cfg.resolve()
}

fn write(dir: &Path, name: &str, contents: &str) -> Result<()> {
    fs::write(dir.join(name), contents)
        .map_err(|e| Error::Config(format!("cannot write {}: {e}", dir.join(name).display())))
}

fn to_json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("report serializes");
    s.push('\n');
    s
}

/// Run one command and write its outputs; returns the exit code.
pub fn run_command(command: Command, scenario: Result<Scenario>, out: Option<PathBuf>) -> i32 {
    let out = out.or_else(|| scenario.as_ref().ok().and_then(|s| s.config.out.clone()));
    let out = out.unwrap_or_else(|| PathBuf::from("out"));
    let (outcome, error, sc) = match scenario {
        Ok(sc) => match execute(command, &sc) {
            Ok(o) => (Some(o), None, Some(sc)),
            Err(e) => (None, Some(e), Some(sc)),
        },
        Err(e) => (None, Some(e), None),
    };
    let status = match (&outcome, &error) {
        (Some(o), _) => o.status,
        (None, Some(e)) => status_of(e),
        (None, None) => unreachable!(),
    };
    if let Some(e) = &error {
        eprintln!("jholo {}: {e}", command.name());
    }
    let record = RunRecord {
        version: crate::VERSION,
        command,
        config_hash: sc.as_ref().map(|s| s.hash.clone()),
        config: sc.as_ref().map(|s| &s.config),
        exit_code: status as i32,
        report: outcome.as_ref().map(|o| &o.report),
        error: error.as_ref().map(ErrorRecord::from),
    };
    let written = fs::create_dir_all(&out)
        .map_err(|e| Error::Config(format!("cannot create {}: {e}", out.display())))
        .and_then(|_| write(&out, "report.json", &to_json(&record)))
        .and_then(|_| {
            let Some(o) = &outcome else { return Ok(()) };
            for (name, table) in &o.tables {
                write(&out, name, table)?;
            }
            let timings: serde_json::Map<String, serde_json::Value> = o
                .timings
                .iter()
                .map(|(k, v)| (k.clone(), serde_json::Value::from(*v)))
                .collect();
            write(&out, "timings.json", &to_json(&timings))
        });
    if let Err(e) = written {
        eprintln!("jholo: {e}");
        return Status::ConfigError as i32;
    }
    if let Some(o) = &outcome {
        if let Some(c) = o.report.certificate {
            println!(
                "certificate: {}",
                serde_json::to_string(&c)
                    .unwrap_or_default()
                    .trim_matches('"')
            );
        }
    }
    status as i32
}

/// Parse arguments and run; returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                Status::ConfigError as i32
            } else {
                0
            };
        }
    };
    let (command, flags) = cli.command.split();
    let scenario = load(&flags);
    run_command(command, scenario, flags.out.clone())
}
