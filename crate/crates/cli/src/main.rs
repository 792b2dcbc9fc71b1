mod artifacts;
mod config;
mod experiments;
mod validate;

use std::path::PathBuf;
use std::process::ExitCode;

use binormal_core::Error;
use clap::{Parser, Subcommand};
use serde::Serialize;

use artifacts::Artifacts;
use config::{config_hash, ConfigError, ExperimentConfig};
use experiments::Check;

#[derive(Parser)]
#[command(name = "binormal", version, about = "Binormal flow and vortex-filament experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the experiment described by a TOML config.
    Run {
        config: PathBuf,
        /// Output directory; overrides `output_dir` in the config.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check a config without running it.
    Validate { config: PathBuf },
}

#[derive(Serialize)]
struct ErrorInfo {
    kind: &'static str,
    message: String,
}

#[derive(Serialize)]
struct Report {
    experiment: config::Experiment,
    status: &'static str,
    config_sha256: String,
    warnings: Vec<String>,
    checks: Vec<Check>,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<ErrorInfo>,
    summary: serde_json::Value,
}

const EXIT_FAIL: u8 = 1;
const EXIT_CONFIG: u8 = 2;

fn error_kind(e: &Error) -> &'static str {
    match e {
        Error::Grid(_) => "grid",
        Error::NonFinite(_) => "non-finite",
        Error::Precondition(_) => "precondition",
        Error::Resolution { .. } => "resolution",
        Error::Extrapolation { .. } => "extrapolation",
        Error::BlowUp { .. } => "blow-up",
        Error::ModulusFloor { .. } => "modulus-floor",
        Error::NonContraction { .. } => "non-contraction",
        Error::OutOfRange(_) => "out-of-range",
        Error::Format(_) => "format",
        Error::Io(_) => "io",
    }
}

fn is_config_error(e: &Error) -> bool {
    matches!(e, Error::Grid(_) | Error::Precondition(_) | Error::OutOfRange(_))
}

fn load(path: &PathBuf) -> Result<ExperimentConfig, ExitCode> {
    config::load(path).map_err(|e| {
        eprintln!("error: {e}");
        ExitCode::from(match e {
            ConfigError::Io(_) => EXIT_FAIL,
            _ => EXIT_CONFIG,
        })
    })
}

fn init_threads() {
    if let Some(n) = std::env::var("BINORMAL_THREADS").ok().and_then(|s| s.parse::<usize>().ok()) {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
}

fn run(path: PathBuf, out: Option<PathBuf>) -> ExitCode {
    let cfg = match load(&path) {
        Ok(c) => c,
        Err(code) => return code,
    };
    let diag = validate::validate(&cfg);
    for w in &diag.warnings {
        eprintln!("warning: {w}");
    }
    if !diag.ok() {
        for e in &diag.errors {
            eprintln!("error: {e}");
        }
        return ExitCode::from(EXIT_CONFIG);
    }
    let dir = out.or_else(|| cfg.output_dir.clone()).unwrap_or_else(|| PathBuf::from("out"));
    let mut art = match Artifacts::create(&dir) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("error: cannot create {}: {e}", dir.display());
            return ExitCode::from(EXIT_FAIL);
        }
    };
    let hash = config_hash(&cfg);
    init_threads();
    let (report, code) = match experiments::run(&cfg, &mut art) {
        Ok((checks, summary)) => {
            let pass = checks.iter().all(|c| c.pass);
            for c in &checks {
                println!("{} {}: {}", if c.pass { "PASS" } else { "FAIL" }, c.name, c.detail);
            }
            let status = if pass { "pass" } else { "fail" };
            let r = Report { experiment: cfg.experiment, status, config_sha256: hash.clone(), warnings: diag.warnings, checks, error: None, summary };
            (r, if pass { 0 } else { EXIT_FAIL })
        }
        Err(e) => {
            eprintln!("error: {e}");
            let code = if is_config_error(&e) { EXIT_CONFIG } else { EXIT_FAIL };
            let r = Report {
                experiment: cfg.experiment,
                status: "error",
                config_sha256: hash.clone(),
                warnings: diag.warnings,
                checks: Vec::new(),
                error: Some(ErrorInfo { kind: error_kind(&e), message: e.to_string() }),
                summary: serde_json::Value::Null,
            };
            (r, code)
        }
    };
    let name = serde_json::to_value(cfg.experiment).ok().and_then(|v| v.as_str().map(String::from)).unwrap_or_default();
    let written = art.json("report.json", "experiment-report", &report).and_then(|_| art.finish(&name, &hash, cfg.seed));
    if let Err(e) = written {
        eprintln!("error: cannot write artifacts: {e}");
        return ExitCode::from(EXIT_FAIL);
    }
    println!("{} -> {}", report.status, dir.display());
    ExitCode::from(code)
}

fn check(path: PathBuf) -> ExitCode {
    let cfg = match load(&path) {
        Ok(c) => c,
        Err(code) => return code,
    };
    let d = validate::validate(&cfg);
    for w in &d.warnings {
        println!("warning: {w}");
    }
    for e in &d.errors {
        println!("error: {e}");
    }
    if d.ok() {
        println!("ok");
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_CONFIG)
    }
}

fn main() -> ExitCode {
    match Cli::parse().command {
        Command::Run { config, out } => run(config, out),
        Command::Validate { config } => check(config),
    }
}
