//! Library half of the experiment harness: configuration, the config-to-model
//! resolution layer, and the subcommand implementations. The binary in
//! `main.rs` is a thin flag-parsing shell over [`commands`].

pub mod commands;
pub mod config;

use std::fmt;
use std::path::Path;

use curie_weiss::dynsys::{FieldFunction, FieldSequence, TorusRotation};
use curie_weiss::freeenergy::FieldDistribution;

use config::ExperimentConfig;

/// Failures are split by exit code: configuration problems (exit 2) versus
/// assertion or computation failures during a run (exit 1).
#[derive(Debug)]
pub enum CliError {
    Config(String),
    Run(String),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(msg) => write!(f, "config error: {msg}"),
            CliError::Run(msg) => write!(f, "run error: {msg}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<curie_weiss::Error> for CliError {
    fn from(e: curie_weiss::Error) -> Self {
        CliError::Run(e.to_string())
    }
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Run(_) => 1,
        }
    }
}

/// Result of a completed subcommand: the summary lines that were printed
/// and whether every configured assertion held.
#[derive(Debug)]
pub struct Outcome {
    pub passed: bool,
    pub summary: Vec<String>,
}

impl Outcome {
    pub fn exit_code(&self) -> i32 {
        if self.passed {
            0
        } else {
            1
        }
    }
}

/// The configuration resolved into model objects.
pub struct Context {
    pub config: ExperimentConfig,
    pub system: TorusRotation,
    pub field: FieldFunction,
    pub distribution: FieldDistribution,
}

impl Context {
    pub fn resolve(config: ExperimentConfig) -> Result<Self, CliError> {
        config.validate()?;
        let system = parse_alpha(&config.alpha, config.start.len())?;
        let field = parse_field(&config.field)?;
        let distribution = FieldDistribution::of_field(&field)
            .map_err(|e| CliError::Config(format!("field spec {}: {e}", config.field)))?;
        Ok(Context {
            config,
            system,
            field,
            distribution,
        })
    }

    /// Quenched field values along the orbit from the configured start.
    pub fn field_sequence(&self, n: usize) -> Result<FieldSequence, CliError> {
        Ok(FieldSequence::along_orbit(
            &self.system,
            &self.field,
            &self.config.start,
            n,
        )?)
    }

    pub fn largest_n(&self) -> usize {
        *self.config.ns.last().expect("validated nonempty")
    }
}

fn parse_alpha(spec: &str, dimension: usize) -> Result<TorusRotation, CliError> {
    let named = match spec {
        "golden" => Some(TorusRotation::golden()),
        "sqrt2" => Some(TorusRotation::sqrt2()),
        _ => None,
    };
    if let Some(system) = named {
        if dimension != 1 {
            return Err(CliError::Config(format!(
                "alpha {spec} is one-dimensional but the start point has {dimension} coordinates"
            )));
        }
        return Ok(system);
    }
    let value: f64 = spec.parse().map_err(|_| {
        CliError::Config(format!(
            "alpha must be golden, sqrt2, or a decimal in (0, 1) (got {spec})"
        ))
    })?;
    if dimension != 1 {
        return Err(CliError::Config(format!(
            "a decimal alpha defines a circle rotation; the start point has {dimension} coordinates"
        )));
    }
    TorusRotation::new(vec![value]).map_err(|e| CliError::Config(format!("alpha {spec}: {e}")))
}

fn parse_field(spec: &str) -> Result<FieldFunction, CliError> {
    if spec == "identity" {
        return Ok(FieldFunction::Identity);
    }
    if spec == "half" {
        return Ok(FieldFunction::constant(0.5).expect("1/2 is admissible"));
    }
    if let Some(rest) = spec.strip_prefix("two-point:") {
        let lambda: f64 = rest.parse().map_err(|_| {
            CliError::Config(format!(
                "two-point field needs a numeric level (got {rest})"
            ))
        })?;
        return FieldFunction::two_point(lambda)
            .map_err(|e| CliError::Config(format!("field spec {spec}: {e}")));
    }
    if let Some(path) = spec.strip_prefix("table:") {
        let values = read_table(Path::new(path))?;
        return FieldFunction::table(values, None)
            .map_err(|e| CliError::Config(format!("field table {path}: {e}")));
    }
    Err(CliError::Config(format!(
        "field must be identity, half, two-point:<lambda>, or table:<path> (got {spec})"
    )))
}

/// A field table file is whitespace- or newline-separated values in [0, 1].
fn read_table(path: &Path) -> Result<Vec<f64>, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| {
        CliError::Config(format!("cannot read field table {}: {e}", path.display()))
    })?;
    let mut values = Vec::new();
    for token in text.split(|c: char| c.is_whitespace() || c == ',') {
        if token.is_empty() {
            continue;
        }
        let v: f64 = token.parse().map_err(|_| {
            CliError::Config(format!(
                "field table {} holds a non-numeric entry: {token}",
                path.display()
            ))
        })?;
        values.push(v);
    }
    if values.is_empty() {
        return Err(CliError::Config(format!(
            "field table {} holds no values",
            path.display()
        )));
    }
    Ok(values)
}
