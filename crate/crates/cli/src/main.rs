//! `mfunc`: reproducible M-function experiments with JSON reports and CSV data.

mod config;
mod experiments;
mod report;

use clap::Parser;
use config::{parse_assignment, ConfigError, Experiment};
use experiments::RunError;
use mfunc_core::ErrorKind;
use report::OutDir;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

const EXIT_CONFIG: u8 = 2;
const EXIT_PRECONDITION: u8 = 3;
const EXIT_PRECISION: u8 = 4;

#[derive(Parser, Debug)]
#[command(name = "mfunc", version, about = "Explicit M-function constructions and their oracles")]
struct Cli {
    #[arg(value_enum)]
    experiment: Experiment,
    /// JSON experiment configuration.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory (default `out/<experiment>`).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads (default: all cores).
    #[arg(long)]
    threads: Option<usize>,
    /// Tolerance override `name=value`; repeatable.
    #[arg(long = "tolerance", value_name = "NAME=VALUE")]
    tolerances: Vec<String>,
    /// Config field override `key=value` (value parsed as JSON); repeatable.
    #[arg(long = "param", value_name = "KEY=VALUE")]
    params: Vec<String>,
}

fn fail(code: u8, tag: &str, message: &str) -> ExitCode {
    let body = serde_json::json!({ "error": tag, "message": message, "exit_code": code });
    eprintln!("{body}");
    ExitCode::from(code)
}

fn config_failure(e: ConfigError) -> ExitCode {
    fail(EXIT_CONFIG, "config", &e.0)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => return fail(EXIT_CONFIG, "usage", &e.to_string()),
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(RunError::Config(e)) => config_failure(e),
        Err(RunError::Core(e)) => {
            let code = match e.kind() {
                ErrorKind::Config => EXIT_CONFIG,
                ErrorKind::Precondition => EXIT_PRECONDITION,
                ErrorKind::Precision => EXIT_PRECISION,
            };
            fail(code, e.tag(), &e.to_string())
        }
    }
}

fn run(cli: Cli) -> Result<(), RunError> {
    let start = Instant::now();
    let params = cli.params.iter().map(|s| parse_assignment(s)).collect::<Result<Vec<_>, _>>()?;
    let tolerances = cli.tolerances.iter().map(|s| parse_assignment(s)).collect::<Result<Vec<_>, _>>()?;
    let mut cfg = config::load(cli.config.as_deref(), &params, &tolerances)?;
    match cfg.experiment {
        Some(e) if e != cli.experiment => {
            return Err(ConfigError(format!("config is for `{}`, not `{}`", e.name(), cli.experiment.name())).into())
        }
        _ => cfg.experiment = Some(cli.experiment),
    }
    if cli.seed.is_some() {
        cfg.seed = cli.seed;
    }
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(ConfigError("--threads must be positive".into()).into());
        }
        #[cfg(feature = "parallel")]
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| ConfigError(format!("thread pool: {e}")))?;
    }
    let dir = cli.out.unwrap_or_else(|| PathBuf::from("out").join(cli.experiment.name()));
    let mut out = OutDir::create(&dir)?;
    let outcome = experiments::run(cli.experiment, &mut cfg, &mut out)?;
    out.finish(cli.experiment, &cfg, &outcome, start.elapsed().as_secs_f64())?;
    println!("{}", dir.join("report.json").display());
    Ok(())
}
