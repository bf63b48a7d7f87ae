use std::path::{Path, PathBuf};

use clap::ValueEnum;
use serde::{Deserialize, Serialize};

use crate::{CliError, CliResult};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

/// Every flag, optional; read from a TOML file given with `--config`.
/// Keys are the flag names (`line-sum`, `cluster-radius`, …). Flags given on
/// the command line take precedence.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub struct ConfigFile {
    pub j: Option<u32>,
    pub gx: Option<f64>,
    pub gy: Option<f64>,
    pub eps: Option<f64>,
    pub line_sum: Option<f64>,
    pub diagonal: Option<bool>,
    pub from: Option<f64>,
    pub to: Option<f64>,
    pub steps: Option<usize>,
    pub state: Option<usize>,
    pub levels: Option<Vec<f64>>,
    pub gamma: Option<f64>,
    pub n: Option<usize>,
    pub slice: Option<usize>,
    pub samples: Option<usize>,
    pub seed: Option<u64>,
    pub format: Option<Format>,
    pub out: Option<PathBuf>,
    pub threads: Option<usize>,
    pub cluster_radius: Option<f64>,
    pub pairing_tolerance: Option<f64>,
}

impl ConfigFile {
    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path)?;
        toml::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
    }
}

pub fn pick<T>(flag: Option<T>, file: Option<T>, name: &str) -> CliResult<T> {
    flag.or(file)
        .ok_or_else(|| CliError::Usage(format!("missing required option --{name}")))
}

pub fn positive(x: f64, name: &str) -> CliResult<f64> {
    if x > 0.0 && x.is_finite() {
        Ok(x)
    } else {
        Err(CliError::Usage(format!("--{name} must be positive, got {x}")))
    }
}

/// Environment variable consulted when neither `--threads` nor the config
/// file sets the worker count.
pub const THREADS_ENV: &str = "PAIRON_THREADS";

pub fn thread_count(flag: Option<usize>, file: Option<usize>) -> CliResult<Option<usize>> {
    let n = match flag.or(file) {
        Some(n) => Some(n),
        None => match std::env::var(THREADS_ENV) {
            Ok(v) => Some(v.trim().parse().map_err(|_| {
                CliError::Usage(format!("{THREADS_ENV} must be a positive integer, got {v:?}"))
            })?),
            Err(_) => None,
        },
    };
    if n == Some(0) {
        return Err(CliError::Usage("thread count must be >= 1".into()));
    }
    Ok(n)
}

/// Runs `f` on a dedicated pool when a thread count is set.
pub fn with_threads<T: Send>(n: Option<usize>, f: impl FnOnce() -> T + Send) -> CliResult<T> {
    match n {
        None => Ok(f()),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| CliError::Usage(format!("thread pool: {e}")))?;
            Ok(pool.install(f))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_kebab_keys() {
        let c: ConfigFile =
            toml::from_str("j = 10\nline-sum = 10.0\nlevels = [0.0, 0.5]\nformat = \"json\"").unwrap();
        assert_eq!(c.j, Some(10));
        assert_eq!(c.line_sum, Some(10.0));
        assert_eq!(c.levels, Some(vec![0.0, 0.5]));
        assert_eq!(c.format, Some(Format::Json));
        assert!(toml::from_str::<ConfigFile>("bogus = 1").is_err());
    }

    #[test]
    fn flags_win() {
        assert_eq!(pick(Some(3), Some(4), "j").unwrap(), 3);
        assert_eq!(pick(None, Some(4), "j").unwrap(), 4);
        assert!(matches!(pick::<u32>(None, None, "j"), Err(CliError::Usage(_))));
    }
}
