//! Run configuration: an optional JSON file overlaid by command-line flags.

use std::path::{Path, PathBuf};

use clap::Args;
use serde::Deserialize;

use crate::table::Format;

/// Flags shared by the data-producing commands.
#[derive(Debug, Clone, Default, Args)]
pub struct CommonArgs {
    /// JSON file with any of the flag names as keys; flags take precedence.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Initial mean photon number.
    #[arg(long)]
    pub nbar: Option<f64>,
    /// Coupling ratio R = g2/g1.
    #[arg(long)]
    pub ratio: Option<f64>,
    /// Coherent-state phase in radians.
    #[arg(long, allow_negative_numbers = true)]
    pub phase: Option<f64>,
    /// Fock cutoff (default: automatic).
    #[arg(long)]
    pub cutoff: Option<usize>,
    #[arg(long, allow_negative_numbers = true)]
    pub tmin: Option<f64>,
    #[arg(long)]
    pub tmax: Option<f64>,
    /// Number of grid points including both ends.
    #[arg(long)]
    pub steps: Option<usize>,
    /// Output path, `-` for standard output.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub nbar: Option<f64>,
    pub ratio: Option<f64>,
    pub phase: Option<f64>,
    pub cutoff: Option<usize>,
    pub tmin: Option<f64>,
    pub tmax: Option<f64>,
    pub steps: Option<usize>,
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
    pub axis: Option<String>,
    pub values: Option<Vec<f64>>,
    pub threshold: Option<f64>,
}

pub fn load_file(path: &Path) -> Result<FileConfig, String> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| format!("cannot read config {}: {e}", path.display()))?;
    serde_json::from_str(&text).map_err(|e| format!("invalid config {}: {e}", path.display()))
}

/// Flags merged over the file, with no defaults applied yet.
#[derive(Debug, Clone, Default)]
pub struct Merged {
    pub nbar: Option<f64>,
    pub ratio: Option<f64>,
    pub phase: Option<f64>,
    pub cutoff: Option<usize>,
    pub tmin: Option<f64>,
    pub tmax: Option<f64>,
    pub steps: Option<usize>,
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
    pub file: FileConfig,
}

impl CommonArgs {
    pub fn merge(&self) -> Result<Merged, String> {
        let file = match &self.config {
            Some(p) => load_file(p)?,
            None => FileConfig::default(),
        };
        Ok(Merged {
            nbar: self.nbar.or(file.nbar),
            ratio: self.ratio.or(file.ratio),
            phase: self.phase.or(file.phase),
            cutoff: self.cutoff.or(file.cutoff),
            tmin: self.tmin.or(file.tmin),
            tmax: self.tmax.or(file.tmax),
            steps: self.steps.or(file.steps),
            out: self.out.clone().or_else(|| file.out.clone()),
            format: self.format.or(file.format),
            file,
        })
    }
}
