use std::collections::HashSet;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::Serialize;

use crate::dynamics::DEFAULT_DT;
use crate::error::{Error, Result};

/// Settings of one twin experiment.
///
/// The file format is one `key = value` per line; `#` starts a comment and
/// blank lines are ignored. Every key is optional:
///
/// | key                 | default         |
/// |---------------------|-----------------|
/// | `N`                 | 40              |
/// | `steps`             | 3000            |
/// | `dt`                | 0.05            |
/// | `seed`              | 1               |
/// | `R_variance`        | 1e-8            |
/// | `B_variance`        | 1e12            |
/// | `spinup_steps`      | 1000            |
/// | `cyclic_cov`        | false           |
/// | `output_dir`        | out             |
/// | `epsilons`          | 0.1, 0.01, 0.001 |
/// | `model_error_scale` | 1               |
/// | `cov_entry`         | N/2, N/2 (1-based) |
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentConfig {
    pub n: usize,
    pub steps: usize,
    pub dt: f64,
    pub seed: u64,
    pub r_variance: f64,
    pub b_variance: f64,
    pub spinup_steps: usize,
    pub cyclic_cov: bool,
    pub output_dir: PathBuf,
    pub epsilons: Vec<f64>,
    /// Multiplies the prescribed model-error mean; the covariance is scaled by
    /// its square. Zero turns model error off.
    pub model_error_scale: f64,
    /// 0-based covariance entry `(i, j)` that the covariance bound certifies.
    /// `None` picks the middle diagonal entry, see [`ExperimentConfig::entry`].
    pub cov_entry: Option<(usize, usize)>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            n: 40,
            steps: 3000,
            dt: DEFAULT_DT,
            seed: 1,
            r_variance: 1e-8,
            b_variance: 1e12,
            spinup_steps: 1000,
            cyclic_cov: false,
            output_dir: PathBuf::from("out"),
            epsilons: vec![1e-1, 1e-2, 1e-3],
            model_error_scale: 1.0,
            cov_entry: None,
        }
    }
}

fn invalid(field: &str, message: impl Into<String>) -> Error {
    Error::ConfigInvalid {
        field: field.to_string(),
        message: message.into(),
    }
}

fn parse_value<T: FromStr>(line: usize, key: &str, value: &str) -> Result<T> {
    value.parse().map_err(|_| Error::ConfigParse {
        line,
        message: format!("cannot parse `{value}` as a value for `{key}`"),
    })
}

fn parse_list<T: FromStr>(line: usize, key: &str, value: &str) -> Result<Vec<T>> {
    value
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| parse_value(line, key, s))
        .collect()
}

impl ExperimentConfig {
    pub fn parse_str(text: &str) -> Result<Self> {
        let mut cfg = ExperimentConfig::default();
        let mut seen = HashSet::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let (key, value) = content.split_once('=').ok_or_else(|| Error::ConfigParse {
                line,
                message: format!("expected `key = value`, got `{content}`"),
            })?;
            let (key, value) = (key.trim(), value.trim());
            if !seen.insert(key.to_string()) {
                return Err(Error::ConfigParse {
                    line,
                    message: format!("duplicate key `{key}`"),
                });
            }
            match key {
                "N" => cfg.n = parse_value(line, key, value)?,
                "steps" => cfg.steps = parse_value(line, key, value)?,
                "dt" => cfg.dt = parse_value(line, key, value)?,
                "seed" => cfg.seed = parse_value(line, key, value)?,
                "R_variance" => cfg.r_variance = parse_value(line, key, value)?,
                "B_variance" => cfg.b_variance = parse_value(line, key, value)?,
                "spinup_steps" => cfg.spinup_steps = parse_value(line, key, value)?,
                "cyclic_cov" => cfg.cyclic_cov = parse_value(line, key, value)?,
                "output_dir" => cfg.output_dir = PathBuf::from(value),
                "epsilons" => cfg.epsilons = parse_list(line, key, value)?,
                "model_error_scale" => cfg.model_error_scale = parse_value(line, key, value)?,
                "cov_entry" => {
                    let idx: Vec<usize> = parse_list(line, key, value)?;
                    match idx[..] {
                        [i, j] if i >= 1 && j >= 1 => cfg.cov_entry = Some((i - 1, j - 1)),
                        _ => {
                            return Err(Error::ConfigParse {
                                line,
                                message: "`cov_entry` takes two 1-based indices `i, j`".into(),
                            })
                        }
                    }
                }
                other => {
                    return Err(Error::ConfigParse {
                        line,
                        message: format!("unknown key `{other}`"),
                    })
                }
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }

    /// Reads and validates a config file.
    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse_str(&text)
    }

    /// The certified covariance entry, `(N/2 - 1, N/2 - 1)` unless set.
    pub fn entry(&self) -> (usize, usize) {
        self.cov_entry.unwrap_or_else(|| {
            let m = (self.n / 2).saturating_sub(1);
            (m, m)
        })
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 5 {
            return Err(invalid("N", format!("N >= 5 required, got {}", self.n)));
        }
        if self.steps < 3 {
            return Err(invalid(
                "steps",
                format!("steps >= 3 required, got {}", self.steps),
            ));
        }
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(invalid("dt", format!("dt > 0 required, got {}", self.dt)));
        }
        if !(self.r_variance > 0.0 && self.r_variance.is_finite()) {
            return Err(invalid(
                "R_variance",
                format!("must be > 0, got {}", self.r_variance),
            ));
        }
        if !(self.b_variance > 0.0 && self.b_variance.is_finite()) {
            return Err(invalid(
                "B_variance",
                format!("must be > 0, got {}", self.b_variance),
            ));
        }
        if let Some(e) = self.epsilons.iter().find(|e| !(**e > 0.0 && e.is_finite())) {
            return Err(invalid(
                "epsilons",
                format!("every epsilon must be > 0, got {e}"),
            ));
        }
        if !(self.model_error_scale >= 0.0 && self.model_error_scale.is_finite()) {
            return Err(invalid(
                "model_error_scale",
                format!("must be >= 0, got {}", self.model_error_scale),
            ));
        }
        let (i, j) = self.entry();
        if i >= self.n || j >= self.n {
            return Err(invalid(
                "cov_entry",
                format!("entry ({}, {}) is outside 1..={}", i + 1, j + 1, self.n),
            ));
        }
        Ok(())
    }
}
