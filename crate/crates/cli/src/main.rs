//! Batch runner: `run`, `verify`, `fit` and `bound` over a JSON experiment
//! configuration.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use bsde_bounds::error::Error;
use bsde_bounds::experiment::{self, ExperimentConfig, ExperimentResult, FittedCell, DEFAULT_SEED};
use clap::{Args, Parser, Subcommand};
use serde_json::Value;

const SEED_ENV: &str = "BSDE_BOUNDS_SEED";
const DEFAULT_STEM: &str = "results";

/// Exit code for a violated truncation condition.
const EXIT_TRUNCATION: u8 = 2;

#[derive(Parser)]
#[command(
    name = "bsde-bounds",
    version,
    about = "Monte Carlo upper and lower bounds for convex dynamic programs"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Fit, evaluate the bounds and write `<stem>.csv` and `<stem>.json`.
    Run(Overrides),
    /// Run the diagnostic checks at reduced sample counts.
    Verify(Overrides),
    /// Fit the input approximations only and write `<stem>.fit.json`.
    Fit(Overrides),
    /// Evaluate the bounds for approximations written by `fit`.
    Bound {
        #[command(flatten)]
        overrides: Overrides,
        /// Output of a previous `fit`.
        #[arg(long)]
        fit: PathBuf,
    },
}

/// Flags override the matching scalar fields of the configuration file.
#[derive(Args)]
struct Overrides {
    /// Experiment configuration (JSON).
    config: PathBuf,
    /// Random seed; falls back to the config, then to $BSDE_BOUNDS_SEED.
    #[arg(long)]
    seed: Option<u64>,
    /// generic-minimization, nongeneric-minimization or lsmc.
    #[arg(long)]
    method: Option<String>,
    #[arg(long)]
    k_max: Option<usize>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    outer: Option<usize>,
    #[arg(long)]
    middle: Option<usize>,
    #[arg(long)]
    inner: Option<usize>,
    #[arg(long)]
    regression: Option<usize>,
    #[arg(long)]
    mini: Option<usize>,
    #[arg(long)]
    test: Option<usize>,
    /// zero, input or nested.
    #[arg(long)]
    lower_martingale: Option<String>,
    #[arg(long)]
    verify_samples: Option<usize>,
    /// Replace sampled branches by exact enumeration.
    #[arg(long)]
    enumerate: bool,
    #[arg(long)]
    no_control_variates: bool,
    /// Output path stem.
    #[arg(long, short)]
    output: Option<String>,
}

fn set(doc: &mut Value, pointer: &str, value: Value) -> Result<()> {
    let (parent, key) = pointer.rsplit_once('/').expect("pointer has a key");
    let target = if parent.is_empty() {
        Some(&mut *doc)
    } else {
        if doc.pointer(parent).is_none() {
            doc[&parent[1..]] = Value::Object(Default::default());
        }
        doc.pointer_mut(parent)
    };
    match target {
        Some(Value::Object(map)) => {
            map.insert(key.to_owned(), value);
            Ok(())
        }
        _ => bail!("cannot override '{pointer}': parent is not an object"),
    }
}

fn env_seed() -> Result<Option<u64>> {
    match std::env::var(SEED_ENV) {
        Ok(s) => s
            .trim()
            .parse()
            .map(Some)
            .with_context(|| format!("${SEED_ENV} = '{s}' is not a valid seed")),
        Err(_) => Ok(None),
    }
}

impl Overrides {
    /// Reads the configuration, applies the flags and resolves the seed.
    fn load(&self) -> Result<ExperimentConfig> {
        let text = fs::read_to_string(&self.config).with_context(|| format!("reading {}", self.config.display()))?;
        let mut doc: Value =
            serde_json::from_str(&text).with_context(|| format!("parsing {}", self.config.display()))?;
        if !doc.is_object() {
            bail!("{}: the configuration must be a JSON object", self.config.display());
        }
        let scalars: [(&str, Option<Value>); 15] = [
            ("/seed", self.seed.map(Value::from)),
            ("/method", self.method.clone().map(Value::from)),
            ("/k_max", self.k_max.map(Value::from)),
            ("/alpha", self.alpha.map(Value::from)),
            ("/paths/outer", self.outer.map(Value::from)),
            ("/paths/middle", self.middle.map(Value::from)),
            ("/paths/inner", self.inner.map(Value::from)),
            ("/paths/regression", self.regression.map(Value::from)),
            ("/paths/mini", self.mini.map(Value::from)),
            ("/paths/test", self.test.map(Value::from)),
            ("/lower_martingale", self.lower_martingale.clone().map(Value::from)),
            ("/verify_samples", self.verify_samples.map(Value::from)),
            ("/enumerate", self.enumerate.then_some(Value::Bool(true))),
            (
                "/control_variates",
                self.no_control_variates.then_some(Value::Bool(false)),
            ),
            ("/output", self.output.clone().map(Value::from)),
        ];
        for (pointer, value) in scalars {
            if let Some(v) = value {
                set(&mut doc, pointer, v)?;
            }
        }
        let mut cfg: ExperimentConfig =
            serde_json::from_value(doc).with_context(|| format!("invalid configuration {}", self.config.display()))?;
        if cfg.seed.is_none() {
            cfg.seed = Some(env_seed()?.unwrap_or(DEFAULT_SEED));
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

fn stem(cfg: &ExperimentConfig) -> &str {
    cfg.output.as_deref().unwrap_or(DEFAULT_STEM)
}

fn write(path: &Path, contents: &str) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    fs::write(path, contents).with_context(|| format!("writing {}", path.display()))
}

fn write_result(cfg: &ExperimentConfig, result: &ExperimentResult) -> Result<()> {
    let stem = stem(cfg);
    let csv = result.to_csv();
    write(Path::new(&format!("{stem}.csv")), &csv)?;
    write(Path::new(&format!("{stem}.json")), &result.to_json()?)?;
    print!("{csv}");
    let flagged = result.rows.iter().filter(|r| !r.converged).count();
    if flagged > 0 {
        log::warn!("{flagged} rows come from an approximation whose optimizer did not converge");
    }
    eprintln!("wrote {stem}.csv and {stem}.json");
    Ok(())
}

fn execute(command: Command) -> Result<ExitCode> {
    match command {
        Command::Run(o) => {
            let cfg = o.load()?;
            let result = experiment::run(&cfg)?;
            write_result(&cfg, &result)?;
        }
        Command::Fit(o) => {
            let cfg = o.load()?;
            let fits = experiment::fit(&cfg)?;
            let path = format!("{}.fit.json", stem(&cfg));
            write(Path::new(&path), &serde_json::to_string_pretty(&fits)?)?;
            eprintln!("wrote {path}");
        }
        Command::Bound { overrides, fit } => {
            let cfg = overrides.load()?;
            let text = fs::read_to_string(&fit).with_context(|| format!("reading {}", fit.display()))?;
            let fits: Vec<FittedCell> =
                serde_json::from_str(&text).with_context(|| format!("parsing {}", fit.display()))?;
            let result = experiment::bound(&cfg, &fits)?;
            write_result(&cfg, &result)?;
        }
        Command::Verify(o) => {
            let cfg = o.load()?;
            let report = experiment::verify(&cfg)?;
            print!("{report}");
            if report.truncation_failure().is_some() {
                return Ok(ExitCode::from(EXIT_TRUNCATION));
            }
            if !report.passed() {
                return Ok(ExitCode::FAILURE);
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match execute(cli.command) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            match err.downcast_ref::<Error>().map(Error::root) {
                Some(Error::Truncation { slack, .. }) => {
                    eprintln!("truncation slack: {slack}");
                    ExitCode::from(EXIT_TRUNCATION)
                }
                _ => ExitCode::FAILURE,
            }
        }
    }
}
