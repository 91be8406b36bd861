//! Command-line front end: configuration, subcommands and verification suites.

pub mod commands;
pub mod config;
pub mod verify;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use crate::criteria::Criterion;
use crate::error::{Error, Result};
use config::{Overrides, RunConfig};

#[derive(Debug, Parser)]
#[command(name = "blowup", version, about = "Spectral flow solvers and blow-up criteria on the periodic torus")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Option<Command>,
}

#[derive(Debug, Args)]
pub struct GlobalArgs {
    /// TOML configuration file.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Seed for random initial data (overrides the config)
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads; 1 gives byte-reproducible output.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Print the default configuration and exit.
    #[arg(long)]
    pub print_defaults: bool,
}

#[derive(Debug, Args, Default)]
pub struct CriteriaArgs {
    /// Comma-separated candidate blow-up times.
    #[arg(long, value_delimiter = ',')]
    pub t_star: Option<Vec<f64>>,
    /// Log-correction exponent (> 1) for the log-corrected criteria
    #[arg(long)]
    pub eps0: Option<f64>,
    /// Lower-bound threshold K.
    #[arg(long)]
    pub threshold: Option<f64>,
    /// Comma-separated criterion ids.
    #[arg(long, value_delimiter = ',')]
    pub criteria: Option<Vec<Criterion>>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run a simulation and record its diagnostic series.
    Simulate(CriteriaArgs),
    /// Evaluate criteria on a recorded series.
    Criteria {
        /// Series CSV (sidecar JSON alongside).
        #[arg(long)]
        series: PathBuf,
        #[command(flatten)]
        args: CriteriaArgs,
    },
    /// Run a verification suite.
    Verify {
        #[arg(default_value = "all")]
        suite: String,
        /// Emit JSON instead of a table.
        #[arg(long)]
        json: bool,
    },
    /// Write a synthetic series.
    Synth {
        /// Profile kind, overriding the config.
        #[arg(long)]
        kind: Option<String>,
    },
    /// Fit the inequality constants over a random family.
    FitConstants,
}

fn load_config(global: &GlobalArgs, extra: &CriteriaArgs) -> Result<RunConfig> {
    let mut cfg = match &global.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    cfg.apply_overrides(&Overrides {
        out: global.out.clone(),
        seed: global.seed,
        t_star: extra.t_star.clone(),
        eps0: extra.eps0,
        threshold: extra.threshold,
        criteria: extra.criteria.clone(),
    });
    Ok(cfg)
}

/// Default parameters of each synthetic kind, for `--kind`.
fn kind_from_name(name: &str) -> Result<crate::criteria::ProfileKind> {
    let v = serde_json::json!({ "kind": name });
    serde_json::from_value(v).map_err(|_| {
        Error::param(format!(
            "unknown profile kind `{name}`; available: self_similar, log_corrected, integrable_deficit, supercritical, decaying"
        ))
    })
}

/// Runs the CLI. Exit code 1 means a failure (including failed verification checks),
/// 2 a usage error.
pub fn run(cli: Cli) -> ExitCode {
    if cli.global.print_defaults {
        print!("{}", RunConfig::defaults_toml());
        return ExitCode::SUCCESS;
    }
    let Some(command) = cli.command else {
        eprintln!("no subcommand given; see --help");
        return ExitCode::from(2);
    };
    if let Some(n) = cli.global.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    match dispatch(&cli.global, command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::Config(_) | Error::Toml(_) => ExitCode::from(2),
                Error::InvalidParameter(ref m) if m.starts_with("unknown") => ExitCode::from(2),
                _ => ExitCode::FAILURE,
            }
        }
    }
}

fn dispatch(global: &GlobalArgs, command: Command) -> Result<ExitCode> {
    match command {
        Command::Simulate(args) => {
            let cfg = load_config(global, &args)?;
            let (written, report) = commands::simulate(&cfg)?;
            if let Some(p) = written.series {
                println!("series: {}", p.display());
            }
            if let (Some(p), Some(r)) = (written.report, report) {
                print!("{}", commands::verdict_table(&r));
                println!("report: {}", p.display());
            }
        }
        Command::Criteria { series, args } => {
            let cfg = load_config(global, &args)?;
            let (path, report) = commands::criteria(&series, &cfg)?;
            print!("{}", commands::verdict_table(&report));
            println!("report: {}", path.display());
        }
        Command::Verify { suite, json } => {
            let cfg = load_config(global, &CriteriaArgs::default())?;
            let seed = global.seed.unwrap_or(verify::DEFAULT_SEED);
            let report = verify::run_suite(&suite, seed, &cfg.fit)?;
            if json {
                println!("{}", serde_json::to_string_pretty(&report)?);
            } else {
                print!("{}", report.table());
            }
            if !report.passed {
                return Ok(ExitCode::FAILURE);
            }
        }
        Command::Synth { kind } => {
            let mut cfg = load_config(global, &CriteriaArgs::default())?;
            if let Some(k) = kind {
                cfg.synth.profile = kind_from_name(&k)?;
            }
            let (path, series) = commands::synthesize(&cfg)?;
            println!("series: {} ({} samples)", path.display(), series.len());
        }
        Command::FitConstants => {
            let cfg = load_config(global, &CriteriaArgs::default())?;
            let (path, report) = commands::fit(&cfg)?;
            print!("{}", commands::constants_table(&report));
            println!("constants: {}", path.display());
        }
    }
    Ok(ExitCode::SUCCESS)
}
