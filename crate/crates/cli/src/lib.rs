//! Batch experiment runner for `walkbench-core`.
//!
//! `walkbench run config.json` writes CSV/TSV tables, `summary.json` and a
//! `manifest.json` that replays the run when passed back to `run`.

pub mod catalog;
pub mod config;
mod diagnostics;
mod dispatch;
pub mod error;
pub mod output;

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

pub use config::{ExperimentConfig, Manifest, Resolved};
pub use diagnostics::execute;
pub use error::CliError;
pub use output::{RunOutput, Table};

/// Environment variable naming the default output directory.
pub const OUT_ENV: &str = "WALKBENCH_OUT";
pub const DEFAULT_OUT: &str = "walkbench-out";

#[derive(Debug, Parser)]
#[command(name = "walkbench", version, about = "Random walks on groups: exact diagnostics")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run an experiment from a config or a manifest.
    Run(RunArgs),
    /// List groups, actions, metrics, measures, oracles or diagnostics.
    List { category: Option<String> },
    /// Describe one registered name.
    Describe { name: String },
    /// Check a config and print it with defaults filled in.
    Validate(ConfigArgs),
}

#[derive(Debug, Args)]
pub struct ConfigArgs {
    /// Config or manifest (JSON). Defaults apply when omitted.
    pub config: Option<PathBuf>,
    /// Override any field, e.g. `--set kv.depth=1`.
    #[arg(long = "set", value_name = "PATH=VALUE")]
    pub set: Vec<String>,
    #[arg(long)]
    pub diagnostic: Option<String>,
    #[arg(long)]
    pub group: Option<String>,
    #[arg(long)]
    pub mode: Option<String>,
    #[arg(long)]
    pub n_max: Option<u64>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub trials: Option<u64>,
}

#[derive(Debug, Args)]
pub struct RunArgs {
    #[command(flatten)]
    pub config: ConfigArgs,
    /// Output directory; falls back to the config, then $WALKBENCH_OUT.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Worker threads; artifacts do not depend on it.
    #[arg(long, default_value_t = 1)]
    pub workers: usize,
    #[arg(long, short)]
    pub quiet: bool,
}

impl ConfigArgs {
    /// Flag overrides in application order.
    pub fn overrides(&self) -> Vec<String> {
        let mut v = self.set.clone();
        let mut push = |k: &str, val: Option<String>| {
            if let Some(x) = val {
                v.push(format!("{k}={x}"));
            }
        };
        push("diagnostic", self.diagnostic.clone());
        push("group", self.group.clone());
        push("mode", self.mode.clone());
        push("n_max", self.n_max.map(|x| x.to_string()));
        push("seed", self.seed.map(|x| x.to_string()));
        push("trials", self.trials.map(|x| x.to_string()));
        v
    }

    pub fn resolve(&self) -> Result<Resolved, CliError> {
        let base = config::load(self.config.as_deref())?;
        let r = config::apply_overrides(base, &self.overrides())?;
        r.config.validate()?;
        Ok(r)
    }
}

/// `--out`, then `output.dir`, then `$WALKBENCH_OUT`, then `walkbench-out`.
pub fn output_dir(flag: Option<&Path>, cfg: &ExperimentConfig) -> PathBuf {
    if let Some(p) = flag {
        return p.to_path_buf();
    }
    if let Some(d) = &cfg.output.dir {
        return PathBuf::from(d);
    }
    match std::env::var_os(OUT_ENV) {
        Some(v) if !v.is_empty() => PathBuf::from(v),
        _ => PathBuf::from(DEFAULT_OUT),
    }
}

/// Resolves, runs and writes; returns the process exit code.
pub fn run(args: &RunArgs) -> Result<i32, CliError> {
    let resolved = args.config.resolve()?;
    let dir = output_dir(args.out.as_deref(), &resolved.config);
    let out = execute(&resolved.config, args.workers)?;
    let manifest = output::write_run(&dir, &resolved, &out)?;
    if !args.quiet {
        let status = out.summary.get("status").and_then(|s| s.as_str()).unwrap_or("done");
        println!("{}: {status}", resolved.config.diagnostic);
        for a in &manifest.artifacts {
            println!("  {}", dir.join(&a.file).display());
        }
        println!("  {}", dir.join("manifest.json").display());
    }
    Ok(if out.violation { error::EXIT_VIOLATION } else { error::EXIT_OK })
}

pub fn main_with<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { error::EXIT_CONFIG } else { error::EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    let result = match &cli.command {
        Command::Run(a) => run(a),
        Command::List { category } => catalog::list(category.as_deref()).map(|s| {
            print!("{s}");
            error::EXIT_OK
        }),
        Command::Describe { name } => catalog::describe(name).map(|s| {
            print!("{s}");
            error::EXIT_OK
        }),
        Command::Validate(a) => a.resolve().map(|r| {
            print!("{}", config::to_pretty_json(&r.config));
            error::EXIT_OK
        }),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("walkbench: {e}");
            e.exit_code()
        }
    }
}
