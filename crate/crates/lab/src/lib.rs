//! Command-line front end for `subgauss-core`: configuration files, CSV and
//! JSON outputs, run manifests and a rayon-backed executor.

pub mod config;
pub mod error;
pub mod manifest;
pub mod output;
pub mod pool;

mod commands;

use std::ffi::OsString;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use chrono::Utc;
use clap::{Args, Parser, Subcommand};
use serde_json::Value;

use crate::config::{Config, Params};
use crate::error::{LabError, Result, EXIT_INVALID, EXIT_OK};
use crate::manifest::{timestamp, RunManifest, BUILD_ID, RESOLVED_CONFIG_NAME};
use crate::output::write_text;
use crate::pool::Pool;

#[derive(Debug, Parser)]
#[command(
    name = "subgauss",
    version,
    about = "Concentration experiments for sums of sub-Gaussian outer products"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct Common {
    /// Configuration file (`key = value` lines, `[section]` headers).
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Master seed; overrides `seed` from the config file.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output directory.
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
    /// Worker threads (default: available parallelism).
    #[arg(long)]
    pub threads: Option<usize>,
    /// Print the run summary as JSON.
    #[arg(long)]
    pub json: bool,
    /// Override a config key, e.g. `--set union.trials=500`.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    pub set: Vec<String>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Draw a row ensemble and export it as CSV.
    Sample {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        family: Option<String>,
        #[arg(long)]
        dim: Option<usize>,
        #[arg(long)]
        rows: Option<usize>,
    },
    /// Moment-growth norm estimates.
    Norm {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        mode: Option<String>,
        #[arg(long)]
        law: Option<String>,
        #[arg(long)]
        samples: Option<usize>,
    },
    /// Build a sphere net and probe its covering radius.
    Net {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        dim: Option<usize>,
        #[arg(long)]
        eps: Option<f64>,
        #[arg(long)]
        probes: Option<usize>,
    },
    /// Failure probabilities, decay fits and the union-bound gap.
    Theorem1 {
        #[command(flatten)]
        common: Common,
    },
    /// Per-vector and pooled measurement examples and sweeps.
    Example {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        task: Option<String>,
    },
}

impl Command {
    fn parts(&self) -> (&'static str, &Common, Vec<(&'static str, String)>) {
        let mut flags = Vec::new();
        let mut put = |key: &'static str, v: Option<String>| {
            if let Some(v) = v {
                flags.push((key, v));
            }
        };
        let (name, common) = match self {
            Command::Sample {
                common,
                family,
                dim,
                rows,
            } => {
                put("family", family.clone());
                put("dim", dim.map(|v| v.to_string()));
                put("rows", rows.map(|v| v.to_string()));
                ("sample", common)
            }
            Command::Norm {
                common,
                mode,
                law,
                samples,
            } => {
                put("mode", mode.clone());
                put("law", law.clone());
                put("samples", samples.map(|v| v.to_string()));
                ("norm", common)
            }
            Command::Net {
                common,
                dim,
                eps,
                probes,
            } => {
                put("dim", dim.map(|v| v.to_string()));
                put("eps", eps.map(|v| v.to_string()));
                put("probes", probes.map(|v| v.to_string()));
                ("net", common)
            }
            Command::Theorem1 { common } => ("theorem1", common),
            Command::Example { common, task } => {
                put("task", task.clone());
                ("example", common)
            }
        };
        (name, common, flags)
    }
}

/// What a command produced.
pub struct Outcome {
    pub summary: Value,
    pub lines: Vec<String>,
    pub outputs: Vec<PathBuf>,
}

fn load_config(common: &Common, flags: &[(&str, String)]) -> Result<Config> {
    let mut config = match &common.config {
        Some(path) => Config::load(path)?,
        None => Config::default(),
    };
    for item in &common.set {
        let (k, v) = item
            .split_once('=')
            .ok_or_else(|| LabError::config(format!("--set expects KEY=VALUE, got `{item}`")))?;
        config.set(k.trim(), v.trim());
    }
    for (k, v) in flags {
        config.set(k, v);
    }
    if let Some(seed) = common.seed {
        config.set("seed", &seed.to_string());
    }
    Ok(config)
}

fn execute(name: &str, common: &Common, flags: &[(&str, String)], manifest: &mut RunManifest) -> Result<Outcome> {
    let config = load_config(common, flags)?;
    let params = Params::resolve(&config, &commands::schema(name, &config)?)?;
    manifest.resolved_config = params
        .config()
        .keys()
        .map(|k| (k.to_string(), Value::from(params.config().get(k).unwrap_or_default())))
        .collect();
    let threads = match common.threads {
        Some(t) => t,
        None => std::thread::available_parallelism().map_or(1, |n| n.get()),
    };
    let pool = Pool::new(threads)?;
    manifest.threads = pool.threads();
    ensure_dir(&common.out)?;
    let resolved = common.out.join(RESOLVED_CONFIG_NAME);
    write_text(&resolved, &params.config().to_text())?;
    let mut outcome = commands::run(name, &params, &common.out, &pool)?;
    outcome.outputs.insert(0, resolved);
    Ok(outcome)
}

fn ensure_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| LabError::io(format!("creating {}", dir.display()), e))
}

/// Runs the command line and returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INVALID } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    let (name, common, flags) = cli.command.parts();
    let mut manifest = RunManifest {
        command: name.to_string(),
        config_path: common.config.as_ref().map(|p| p.display().to_string()),
        resolved_config: serde_json::Map::new(),
        git_or_build_id: BUILD_ID.to_string(),
        threads: 0,
        started_at: timestamp(Utc::now()),
        finished_at: String::new(),
        output_paths: Vec::new(),
        error: None,
    };
    let result = execute(name, common, &flags, &mut manifest);
    manifest.finished_at = timestamp(Utc::now());
    let code = match &result {
        Ok(outcome) => {
            manifest.output_paths = outcome.outputs.iter().map(|p| p.display().to_string()).collect();
            let mut stdout = io::stdout().lock();
            let _ = if common.json {
                writeln!(
                    stdout,
                    "{}",
                    serde_json::to_string_pretty(&outcome.summary).unwrap_or_default()
                )
            } else {
                outcome.lines.iter().try_for_each(|l| writeln!(stdout, "{l}"))
            };
            EXIT_OK
        }
        Err(e) => {
            eprintln!("error: {e}");
            manifest.error = Some(e.to_string());
            e.exit_code()
        }
    };
    let written = ensure_dir(&common.out).and_then(|_| manifest.write(&common.out));
    if let Err(e) = written {
        eprintln!("error: cannot write manifest: {e}");
        if code == EXIT_OK {
            return e.exit_code();
        }
    }
    code
}
