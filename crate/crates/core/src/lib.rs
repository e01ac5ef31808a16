//! Multi-objective optimization by repeated weighted-sum scalarization solved
//! with the Cuckoo Optimization Algorithm (COA).
//!
//! Every run draws one weight vector on the simplex, collapses the objectives
//! into a single penalized cost and lets a small cuckoo population minimize
//! it. The best habitats of many such runs are merged into a Pareto archive,
//! which is then scored against a brute-force grid reference front.
//!
//! ```no_run
//! use coaw::runner::{run_coaw, RunConfig};
//!
//! let mut config = RunConfig::default();
//! config.problem_id = "p1".into();
//! let report = run_coaw(&config).unwrap();
//! println!("{} front points, GD {}", report.archive.len(), report.metrics.generational_distance);
//! ```

pub mod cli;
pub mod coa;
pub mod config;
pub mod error;
pub mod exec;
pub mod oracle;
pub mod output;
pub mod pareto;
pub mod problems;
pub mod runner;
pub mod scalarization;

pub use crate::coa::{CoaOutcome, CoaParams, Habitat, StopReason};
pub use crate::error::{Error, Result};
pub use crate::exec::Execution;
pub use crate::pareto::{FrontMetrics, ParetoArchive};
pub use crate::problems::{EvalResult, ProblemSpec};
pub use crate::scalarization::{ScalarizerConfig, WeightVector};
