use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::failure::Failure;

#[derive(Debug, Parser)]
#[command(name = "mixgap", version, about = "Mixing-time estimation from a single Markov chain trajectory")]
pub struct Cli {
    /// JSON file of parameters; flags given on the command line take precedence.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Write output here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Render the JSON result as an aligned key/value table.
    #[arg(long, global = true, conflicts_with = "csv")]
    pub table: bool,
    /// Render the JSON result as long-format `key,value` rows.
    #[arg(long, global = true)]
    pub csv: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Exact spectral quantities and mixing-time bounds of a known chain.
    Spectrum(SpectrumArgs),
    /// Simulate a trajectory from a known chain.
    Simulate(SimulateArgs),
    /// Point estimates and confidence intervals from a trajectory file.
    Estimate(EstimateArgs),
    /// Empirical coverage of the confidence intervals over repeated runs.
    Coverage(CoverageArgs),
    /// Emit a lower-bound family instance as a matrix file.
    Family(FamilyArgs),
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(default)]
pub struct SpectrumArgs {
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub matrix: Option<PathBuf>,
    /// Largest power scanned for the pseudo-spectral gaps (automatic if absent).
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kmax: Option<usize>,
    /// Precision of the reported mixing time (default 0.25).
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub xi: Option<f64>,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(default)]
pub struct SimulateArgs {
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub matrix: Option<PathBuf>,
    /// Trajectory length.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m: Option<usize>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    /// Initial law: `stationary` (default), `uniform`, or comma-separated probabilities.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mu: Option<String>,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(default)]
pub struct EstimateArgs {
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub traj: Option<PathBuf>,
    /// Number of states.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub d: Option<usize>,
    /// Largest skip rate.
    #[arg(long = "K", conflicts_with = "adaptive_eps")]
    #[serde(rename = "K", skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    /// Choose K = ⌈(N_min/ε)^{1/3}⌉ from the data.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub adaptive_eps: Option<f64>,
    /// Smoothing (default 1/(m−1)).
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    /// Confidence parameter (default 0.05).
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    /// Also report the interval for a reversible chain's absolute spectral gap.
    #[arg(long)]
    #[serde(skip_serializing_if = "std::ops::Not::not")]
    pub reversible: bool,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(default)]
pub struct CoverageArgs {
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub matrix: Option<PathBuf>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m: Option<usize>,
    /// Number of independent runs.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub runs: Option<usize>,
    #[arg(long = "K", conflicts_with = "adaptive_eps")]
    #[serde(rename = "K", skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub adaptive_eps: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    /// Run `i` uses seed `seed + i`.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FamilyKind {
    Star,
    Symmetric,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(default)]
pub struct FamilyArgs {
    #[arg(value_enum)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kind: Option<FamilyKind>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    /// Number of spokes (star) or states (symmetric).
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub d: Option<usize>,
    /// Spoke weights for the star chain, comma-separated (default uniform).
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p: Option<String>,
}

/// Overlays `flags` on the parameters read from `config`.
pub fn with_config<T>(flags: &T, config: Option<&Path>) -> Result<T, Failure>
where
    T: Serialize + DeserializeOwned + Clone,
{
    let Some(path) = config else {
        return Ok(flags.clone());
    };
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::parse(format!("config {}: {e}", path.display())))?;
    let mut merged: Value = serde_json::from_str(&text)
        .map_err(|e| Failure::parse(format!("config {}: {e}", path.display())))?;
    let Value::Object(base) = &mut merged else {
        return Err(Failure::parse("config must be a JSON object"));
    };
    let Value::Object(overrides) = serde_json::to_value(flags).expect("flags serialize") else {
        unreachable!("argument structs serialize to objects");
    };
    base.extend(overrides);
    serde_json::from_value(merged).map_err(|e| Failure::parse(format!("config {}: {e}", path.display())))
}

pub fn required<T>(value: Option<T>, flag: &str) -> Result<T, Failure> {
    value.ok_or_else(|| Failure::precondition(format!("missing required parameter --{flag}")))
}

pub fn parse_vector(text: &str, what: &str) -> Result<Vec<f64>, Failure> {
    text.split(',')
        .map(|s| {
            s.trim()
                .parse::<f64>()
                .map_err(|e| Failure::parse(format!("{what}: {:?}: {e}", s.trim())))
        })
        .collect()
}
