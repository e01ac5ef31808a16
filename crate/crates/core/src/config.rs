//! Run configuration and its flat `key = value` text format.
//!
//! ```text
//! # comments start with '#'
//! problem_id = p1
//! coa.max_iterations = 50
//! scalarizer.normalize = false
//! ```
//!
//! Nested fields use dotted keys. Unknown or repeated keys are errors.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::coa::CoaParams;
use crate::error::{Error, Result};
use crate::oracle::OracleConfig;
use crate::problems::{builtin_with_extent, ProblemSpec, DEFAULT_BOX_EXTENT};
use crate::scalarization::ScalarizerConfig;

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub problem_id: String,
    /// Extent used for box directions the problem leaves open.
    pub box_extent: f64,
    pub coa: CoaParams,
    pub scalarizer: ScalarizerConfig,
    pub n_weight_samples: usize,
    pub master_seed: u64,
    pub oracle: OracleConfig,
    pub output_dir: PathBuf,
    pub emit_plot_data: bool,
    /// Write wall-clock time into metrics.json. Off by default so that
    /// identical configs give byte-identical files.
    pub record_runtime: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            problem_id: "p1".into(),
            box_extent: DEFAULT_BOX_EXTENT,
            coa: CoaParams::default(),
            scalarizer: ScalarizerConfig::default(),
            n_weight_samples: 50,
            master_seed: 42,
            oracle: OracleConfig::default(),
            output_dir: PathBuf::from("out"),
            emit_plot_data: false,
            record_runtime: false,
        }
    }
}

fn parse_value<T: FromStr>(key: &str, raw: &str, line: usize) -> Result<T>
where
    T::Err: std::fmt::Display,
{
    raw.parse().map_err(|e| Error::Config {
        line,
        message: format!("invalid value `{raw}` for `{key}`: {e}"),
    })
}

fn parse_optional(key: &str, raw: &str, line: usize) -> Result<Option<f64>> {
    match raw {
        "none" | "" => Ok(None),
        _ => parse_value(key, raw, line).map(Some),
    }
}

fn fmt_optional(v: Option<f64>) -> String {
    v.map_or_else(|| "none".to_string(), |x| format!("{x:e}"))
}

impl RunConfig {
    pub fn problem(&self) -> Result<ProblemSpec> {
        builtin_with_extent(&self.problem_id, self.box_extent)
    }

    pub fn validate(&self) -> Result<()> {
        self.problem()?;
        self.coa.validate()?;
        self.scalarizer.validate()?;
        if self.n_weight_samples < 1 {
            return Err(Error::InvalidParams(
                "n_weight_samples must be at least 1".into(),
            ));
        }
        if self.oracle.resolution < 2 {
            return Err(Error::InvalidParams(format!(
                "oracle.resolution must be at least 2, got {}",
                self.oracle.resolution
            )));
        }
        Ok(())
    }

    /// Parses the flat text format on top of the defaults and validates.
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = Self::default();
        let mut seen = std::collections::HashSet::new();
        for (idx, raw_line) in text.lines().enumerate() {
            let line = idx + 1;
            let content = raw_line.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let (key, value) = content.split_once('=').ok_or_else(|| Error::Config {
                line,
                message: format!("expected `key = value`, got `{content}`"),
            })?;
            let (key, value) = (key.trim(), value.trim());
            if !seen.insert(key.to_string()) {
                return Err(Error::Config {
                    line,
                    message: format!("duplicate key `{key}`"),
                });
            }
            cfg.set(key, value, line)?;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text)
    }

    fn set(&mut self, key: &str, v: &str, line: usize) -> Result<()> {
        match key {
            "problem_id" => self.problem_id = v.to_string(),
            "box_extent" => self.box_extent = parse_value(key, v, line)?,
            "n_weight_samples" => self.n_weight_samples = parse_value(key, v, line)?,
            "master_seed" => self.master_seed = parse_value(key, v, line)?,
            "output_dir" => self.output_dir = PathBuf::from(v),
            "emit_plot_data" => self.emit_plot_data = parse_value(key, v, line)?,
            "record_runtime" => self.record_runtime = parse_value(key, v, line)?,
            "coa.initial_population" => self.coa.initial_population = parse_value(key, v, line)?,
            "coa.min_eggs" => self.coa.min_eggs = parse_value(key, v, line)?,
            "coa.max_eggs" => self.coa.max_eggs = parse_value(key, v, line)?,
            "coa.max_iterations" => self.coa.max_iterations = parse_value(key, v, line)?,
            "coa.n_clusters" => self.coa.n_clusters = parse_value(key, v, line)?,
            "coa.lambda_max" => self.coa.lambda_max = parse_value(key, v, line)?,
            "coa.egg_laying_alpha" => self.coa.egg_laying_alpha = parse_value(key, v, line)?,
            "coa.max_cuckoos" => self.coa.max_cuckoos = parse_value(key, v, line)?,
            "coa.pop_variance_stop" => self.coa.pop_variance_stop = parse_value(key, v, line)?,
            "coa.accuracy_stop" => self.coa.accuracy_stop = parse_optional(key, v, line)?,
            "coa.detection_epsilon_frac" => {
                self.coa.detection_epsilon_frac = parse_value(key, v, line)?
            }
            "scalarizer.penalty_coefficient" => {
                self.scalarizer.penalty_coefficient = parse_value(key, v, line)?
            }
            "scalarizer.normalize" => self.scalarizer.normalize = parse_value(key, v, line)?,
            "oracle.resolution" => self.oracle.resolution = parse_value(key, v, line)?,
            _ => {
                return Err(Error::Config {
                    line,
                    message: format!("unknown key `{key}`"),
                })
            }
        }
        Ok(())
    }

    /// Renders every field in the text format; `parse(dump())` round-trips.
    pub fn dump(&self) -> String {
        let mut s = String::new();
        let c = &self.coa;
        let entries: [(&str, String); 21] = [
            ("problem_id", self.problem_id.clone()),
            ("box_extent", self.box_extent.to_string()),
            ("n_weight_samples", self.n_weight_samples.to_string()),
            ("master_seed", self.master_seed.to_string()),
            ("output_dir", self.output_dir.display().to_string()),
            ("emit_plot_data", self.emit_plot_data.to_string()),
            ("record_runtime", self.record_runtime.to_string()),
            ("coa.initial_population", c.initial_population.to_string()),
            ("coa.min_eggs", c.min_eggs.to_string()),
            ("coa.max_eggs", c.max_eggs.to_string()),
            ("coa.max_iterations", c.max_iterations.to_string()),
            ("coa.n_clusters", c.n_clusters.to_string()),
            ("coa.lambda_max", c.lambda_max.to_string()),
            ("coa.egg_laying_alpha", c.egg_laying_alpha.to_string()),
            ("coa.max_cuckoos", c.max_cuckoos.to_string()),
            (
                "coa.pop_variance_stop",
                format!("{:e}", c.pop_variance_stop),
            ),
            ("coa.accuracy_stop", fmt_optional(c.accuracy_stop)),
            (
                "coa.detection_epsilon_frac",
                format!("{:e}", c.detection_epsilon_frac),
            ),
            (
                "scalarizer.penalty_coefficient",
                format!("{:e}", self.scalarizer.penalty_coefficient),
            ),
            (
                "scalarizer.normalize",
                self.scalarizer.normalize.to_string(),
            ),
            ("oracle.resolution", self.oracle.resolution.to_string()),
        ];
        for (k, v) in entries {
            let _ = writeln!(s, "{k} = {v}");
        }
        s
    }
}
