//! Declarative experiment configuration: a versioned TOML file whose values
//! individual command-line flags may override. The struct round-trips
//! losslessly through serialization so configs can be regenerated from runs.

use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};

use crate::CliError;

pub const CONFIG_VERSION: u32 = 1;

/// Assertion thresholds used by the `verify-*` scenarios.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Tolerances {
    /// Kolmogorov-Smirnov budget for normal-limit checks.
    pub ks: f64,
    /// Kolmogorov-Smirnov budget for the flatter critical-limit check.
    pub ks_critical: f64,
    /// Relative error allowed on predicted variances.
    pub variance_rel: f64,
    /// Half-width of the concentration window for the mean-law check.
    pub lln_epsilon: f64,
    /// Mass allowed outside the concentration window at the largest n.
    pub tail_mass: f64,
    /// Mass allowed away from the two peaks above the transition.
    pub peak_stray_mass: f64,
    /// Absolute error allowed on critical-temperature values.
    pub beta_c_abs: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            ks: 0.05,
            ks_critical: 0.07,
            variance_rel: 0.05,
            lln_epsilon: 0.05,
            tail_mass: 1e-3,
            peak_stray_mass: 0.05,
            beta_c_abs: 1e-6,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentConfig {
    /// Schema version; this build reads version 1.
    pub version: u32,
    /// Rotation angle: "golden", "sqrt2", or a decimal in (0, 1).
    pub alpha: String,
    /// Orbit starting point (one coordinate per torus dimension).
    pub start: Vec<f64>,
    /// Field profile: "identity", "half", "two-point:<lambda>",
    /// or "table:<path>".
    pub field: String,
    /// Inverse-temperature grid.
    pub betas: Vec<f64>,
    /// Coupling constant J.
    pub j: f64,
    /// Ladder of system sizes, strictly increasing.
    pub ns: Vec<usize>,
    /// Seed for each stochastic cross-check.
    pub seed: u64,
    /// Output directory for CSV and summary artifacts.
    pub out: PathBuf,
    pub tolerances: Tolerances,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            version: CONFIG_VERSION,
            alpha: "golden".to_string(),
            start: vec![0.3],
            field: "identity".to_string(),
            betas: vec![1.0],
            j: 1.0,
            ns: vec![1000, 4000, 10_000],
            seed: 7,
            out: PathBuf::from("artifacts"),
            tolerances: Tolerances::default(),
        }
    }
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read config {}: {e}", path.display())))?;
        let config: ExperimentConfig = toml::from_str(&text).map_err(|e| {
            CliError::Config(format!("cannot parse config {}: {e}", path.display()))
        })?;
        Ok(config)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string_pretty(self).expect("config serializes")
    }

    /// Checks every structural invariant; error messages name the violated
    /// rule.
    pub fn validate(&self) -> Result<(), CliError> {
        let fail = |msg: String| Err(CliError::Config(msg));
        if self.version != CONFIG_VERSION {
            return fail(format!(
                "config version {} is not supported (expected {CONFIG_VERSION})",
                self.version
            ));
        }
        if self.betas.is_empty() {
            return fail("beta grid must be nonempty".into());
        }
        for &b in &self.betas {
            if !(b >= 0.0 && b.is_finite()) {
                return fail(format!(
                    "beta grid entries must be finite and >= 0 (got {b})"
                ));
            }
        }
        if !(self.j > 0.0 && self.j.is_finite()) {
            return fail(format!(
                "coupling j must be finite and > 0 (got {})",
                self.j
            ));
        }
        if self.ns.is_empty() {
            return fail("n ladder must be nonempty".into());
        }
        if self.ns[0] < 1 {
            return fail("n ladder must start at n >= 1".into());
        }
        if self.ns.windows(2).any(|w| w[1] <= w[0]) {
            return fail(format!(
                "n ladder must be strictly increasing (got {:?})",
                self.ns
            ));
        }
        if self.start.is_empty() {
            return fail("orbit start point must have at least one coordinate".into());
        }
        for &x in &self.start {
            if !(0.0..1.0).contains(&x) {
                return fail(format!(
                    "orbit start coordinates must lie in [0, 1) (got {x})"
                ));
            }
        }
        let t = &self.tolerances;
        for (name, v) in [
            ("ks", t.ks),
            ("ks_critical", t.ks_critical),
            ("variance_rel", t.variance_rel),
            ("lln_epsilon", t.lln_epsilon),
            ("tail_mass", t.tail_mass),
            ("peak_stray_mass", t.peak_stray_mass),
            ("beta_c_abs", t.beta_c_abs),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return fail(format!("tolerance {name} must be finite and > 0 (got {v})"));
            }
        }
        Ok(())
    }
}
