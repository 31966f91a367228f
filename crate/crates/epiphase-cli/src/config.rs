//! Run configuration with the precedence: command-line flags, then the
//! `EPIPHASE_TOL` environment variable, then the config file, then
//! defaults.

use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use serde::Deserialize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum OutputFormat {
    Text,
    Json,
}

/// Optional config file, JSON with a `schema: 1` marker.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub schema: Option<u32>,
    pub dimension: Option<u32>,
    pub tol: Option<f64>,
    pub seed: Option<u64>,
    pub trials: Option<usize>,
    pub output: Option<String>,
}

/// Shared flags; every subcommand resolves these into a [`RunConfig`].
#[derive(Debug, clap::Args)]
pub struct CommonArgs {
    /// Hilbert-space dimension (prime, 2..=11)
    #[arg(long = "d")]
    pub dimension: Option<u32>,
    /// Absolute numerical tolerance
    #[arg(long)]
    pub tol: Option<f64>,
    /// Seed for the deterministic random suites
    #[arg(long)]
    pub seed: Option<u64>,
    /// Number of randomized trials per check
    #[arg(long)]
    pub trials: Option<usize>,
    /// Output format
    #[arg(long, value_enum)]
    pub output: Option<OutputFormat>,
    /// JSON config file (lowest precedence after defaults)
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug)]
pub struct RunConfig {
    pub dimension: u32,
    pub tol: f64,
    pub seed: u64,
    pub trials: usize,
    pub output: OutputFormat,
}

impl CommonArgs {
    pub fn resolve(&self, default_dimension: u32) -> Result<RunConfig> {
        let file = match &self.config {
            Some(path) => {
                let raw = std::fs::read_to_string(path)
                    .with_context(|| format!("cannot read config file {}", path.display()))?;
                let parsed: ConfigFile =
                    serde_json::from_str(&raw).context("malformed config file")?;
                if let Some(schema) = parsed.schema {
                    if schema != 1 {
                        bail!("unsupported config schema {schema}; this build reads schema 1");
                    }
                }
                parsed
            }
            None => ConfigFile::default(),
        };

        let env_tol = match std::env::var("EPIPHASE_TOL") {
            Ok(raw) => {
                Some(raw.parse::<f64>().context("EPIPHASE_TOL is not a valid number")?)
            }
            Err(_) => None,
        };

        let output = match self.output {
            Some(fmt) => fmt,
            None => match file.output.as_deref() {
                Some("json") => OutputFormat::Json,
                Some("text") | None => OutputFormat::Text,
                Some(other) => bail!("unknown output format {other:?} in config file"),
            },
        };

        let tol = self.tol.or(env_tol).or(file.tol).unwrap_or(epiphase::DEFAULT_TOL);
        if !tol.is_finite() || tol <= 0.0 {
            bail!("tolerance must be a positive finite number, got {tol}");
        }

        Ok(RunConfig {
            dimension: self.dimension.or(file.dimension).unwrap_or(default_dimension),
            tol,
            seed: self.seed.or(file.seed).unwrap_or(0),
            trials: self.trials.or(file.trials).unwrap_or(100),
            output,
        })
    }
}
