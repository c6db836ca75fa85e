use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use bellforge::cli::{
    load_config, run_bounds, run_brute, run_sweep, run_value, run_violate, validate_config,
    ReportDocument,
};
use bellforge::optimize::ViolationMode;

/// Non-local game laboratory: evaluate classical and entangled strategies
/// for the CHSH, Hidden Matching and Khot-Vishnoi games.
///
/// Parallelism follows the rayon default; set RAYON_NUM_THREADS to override.
#[derive(Parser)]
#[command(name = "bellforge", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct CommonArgs {
    /// Path to the JSON experiment config.
    #[arg(long)]
    config: PathBuf,
    /// Overrides the config's seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Write the report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Output format (json for reports; sweep always emits csv).
    #[arg(long, default_value = "json")]
    format: String,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate the configured strategies.
    Value(CommonArgs),
    /// Exact classical value by brute force.
    Brute(CommonArgs),
    /// Formula bounds and Fourier diagnostics.
    Bounds(CommonArgs),
    /// Assemble a classical-vs-quantum violation report.
    Violate {
        #[command(flatten)]
        common: CommonArgs,
        /// "ratio" or "deviation".
        #[arg(long, default_value = "ratio")]
        mode: String,
    },
    /// Grid sweep emitting CSV rows.
    Sweep(CommonArgs),
    /// Validate a config without running anything.
    Validate {
        #[arg(long)]
        config: PathBuf,
    },
}

fn emit(text: &str, out: &Option<PathBuf>) -> bellforge::Result<()> {
    match out {
        Some(path) => std::fs::write(path, text)?,
        None => println!("{text}"),
    }
    Ok(())
}

fn emit_report(report: &ReportDocument, common: &CommonArgs) -> bellforge::Result<()> {
    if common.format != "json" {
        return Err(bellforge::Error::Schema(format!(
            "unsupported report format '{}'",
            common.format
        )));
    }
    emit(&report.to_json()?, &common.out)
}

fn run() -> bellforge::Result<()> {
    let cli = Cli::parse();
    match &cli.command {
        Command::Validate { config } => {
            let cfg = load_config(config)?;
            validate_config(&cfg).map_err(|errs| bellforge::Error::Schema(errs.join("; ")))?;
            println!("ok");
            Ok(())
        }
        Command::Value(common) => {
            let cfg = with_seed(load_config(&common.config)?, common.seed);
            emit_report(&run_value(&cfg)?, common)
        }
        Command::Brute(common) => {
            let cfg = with_seed(load_config(&common.config)?, common.seed);
            emit_report(&run_brute(&cfg)?, common)
        }
        Command::Bounds(common) => {
            let cfg = with_seed(load_config(&common.config)?, common.seed);
            emit_report(&run_bounds(&cfg)?, common)
        }
        Command::Violate { common, mode } => {
            let cfg = with_seed(load_config(&common.config)?, common.seed);
            let mode = match mode.as_str() {
                "ratio" => ViolationMode::Ratio,
                "deviation" => ViolationMode::Deviation,
                other => {
                    return Err(bellforge::Error::Schema(format!(
                        "unknown violation mode '{other}'"
                    )))
                }
            };
            emit_report(&run_violate(&cfg, mode)?, common)
        }
        Command::Sweep(common) => {
            if common.format != "csv" && common.format != "json" {
                return Err(bellforge::Error::Schema(format!(
                    "unsupported sweep format '{}'",
                    common.format
                )));
            }
            let cfg = with_seed(load_config(&common.config)?, common.seed);
            let csv = run_sweep(&cfg)?;
            emit(&csv, &common.out)
        }
    }
}

fn with_seed(
    mut cfg: bellforge::cli::ExperimentConfig,
    seed: Option<u64>,
) -> bellforge::cli::ExperimentConfig {
    if let Some(seed) = seed {
        cfg.seed = Some(seed);
    }
    cfg
}

fn main() -> ExitCode {
    match run() {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
