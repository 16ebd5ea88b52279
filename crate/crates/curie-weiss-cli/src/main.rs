//! Command-line entry point: parse flags, merge them over the TOML
//! configuration, resolve the model, dispatch, and map the outcome to an
//! exit code (0 pass, 1 failed assertion or run error, 2 bad configuration).

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use curie_weiss_cli::commands;
use curie_weiss_cli::config::ExperimentConfig;
use curie_weiss_cli::{CliError, Context, Outcome};

#[derive(Parser)]
#[command(
    name = "curie-weiss",
    version,
    about = "Exact analysis of a mean-field spin model with a quenched \
             quasiperiodic external field"
)]
struct Cli {
    /// TOML experiment configuration; flags below override single values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Output directory for CSV tables and summaries.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Seed for any randomized probe points or samplers.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Inverse temperature; replaces the configured beta ladder.
    #[arg(long, global = true)]
    beta: Option<f64>,

    /// Interaction strength J.
    #[arg(long, global = true)]
    j: Option<f64>,

    /// System size; replaces the configured size ladder.
    #[arg(long, global = true)]
    n: Option<usize>,

    /// Rotation angle: golden, sqrt2, or a decimal in (0, 1).
    #[arg(long, global = true)]
    alpha: Option<String>,

    /// Field function: identity, half, two-point:<lambda>, or table:<path>.
    #[arg(long, global = true)]
    field: Option<String>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Tabulate the rotation orbit and the field along it.
    Orbit,
    /// Continued-fraction expansion of the angle with the approximation
    /// quality of every convergent.
    Cfrac,
    /// Star discrepancy of the orbit along the size ladder.
    Discrepancy,
    /// Estimate the approximation exponent of the angle from a finite
    /// frequency box.
    Eta,
    /// Check orbit-sum and discrepancy bounds along the orbit.
    Bounds,
    /// Locate and classify the minima of the limiting free energy.
    GAnalyze,
    /// The critical inverse temperature of the configured field.
    BetaC,
    /// Tabulate the large-deviation rate function per beta.
    Rate,
    /// Exact magnetization law tables (content-addressed cache).
    Pmf,
    /// Concentration of the mean magnetization below the critical point.
    VerifyLln,
    /// Normal fluctuations at scale sqrt(n) below the critical point.
    VerifyClt,
    /// Non-normal fluctuations at the critical point.
    VerifyCritical,
    /// Two-peak structure above the critical point.
    VerifySupercritical,
    /// Full showcase scenario for the uniform field on the golden rotation.
    #[command(name = "paper-5-7")]
    Paper57,
}

fn build_config(cli: &Cli) -> Result<ExperimentConfig, CliError> {
    let mut config = match &cli.config {
        Some(path) => ExperimentConfig::load(path)?,
        None => ExperimentConfig::default(),
    };
    if let Some(out) = &cli.out {
        config.out = out.clone();
    }
    if let Some(seed) = cli.seed {
        config.seed = seed;
    }
    if let Some(beta) = cli.beta {
        config.betas = vec![beta];
    }
    if let Some(j) = cli.j {
        config.j = j;
    }
    if let Some(n) = cli.n {
        config.ns = vec![n];
    }
    if let Some(alpha) = &cli.alpha {
        config.alpha = alpha.clone();
    }
    if let Some(field) = &cli.field {
        config.field = field.clone();
    }
    Ok(config)
}

fn run(cli: &Cli) -> Result<Outcome, CliError> {
    let config = build_config(cli)?;
    let ctx = Context::resolve(config)?;
    match cli.command {
        Command::Orbit => commands::orbit(&ctx),
        Command::Cfrac => commands::cfrac(&ctx),
        Command::Discrepancy => commands::discrepancy(&ctx),
        Command::Eta => commands::eta(&ctx),
        Command::Bounds => commands::bounds(&ctx),
        Command::GAnalyze => commands::g_analyze(&ctx),
        Command::BetaC => commands::beta_c(&ctx),
        Command::Rate => commands::rate(&ctx),
        Command::Pmf => commands::pmf(&ctx),
        Command::VerifyLln => commands::verify_lln(&ctx),
        Command::VerifyClt => commands::verify_clt(&ctx),
        Command::VerifyCritical => commands::verify_critical(&ctx),
        Command::VerifySupercritical => commands::verify_supercritical(&ctx),
        Command::Paper57 => commands::showcase(&ctx),
    }
}

fn main() -> ExitCode {
    if let Ok(spec) = std::env::var("CURIE_WEISS_THREADS") {
        match spec.parse::<usize>() {
            Ok(threads) if threads >= 1 => {
                // Ignore the error from double initialization in tests.
                let _ = rayon::ThreadPoolBuilder::new()
                    .num_threads(threads)
                    .build_global();
            }
            _ => {
                eprintln!(
                    "config error: CURIE_WEISS_THREADS must be a positive integer (got {spec})"
                );
                return ExitCode::from(2);
            }
        }
    }
    let cli = Cli::parse();
    match run(&cli) {
        Ok(outcome) => ExitCode::from(u8::try_from(outcome.exit_code()).unwrap_or(1)),
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(u8::try_from(e.exit_code()).unwrap_or(1))
        }
    }
}
