//! The outer weighted-sum loop: many independent COA runs, each with its own
//! weights, merged into one Pareto archive and scored against the grid
//! oracle.

use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::coa::{run_single_coa, StopReason};
use crate::error::Result;
use crate::exec::Execution;
use crate::oracle::{grid_reference_front_with, ReferencePoint};
use crate::pareto::{FrontMetrics, ParetoArchive};
use crate::problems::ProblemSpec;
use crate::scalarization::{sample_weights, WeightVector};

pub use crate::config::RunConfig;

/// Independent rng stream for weight sample `index`.
///
/// Streams are addressed by index, so the result of a sample does not depend
/// on which other samples ran before it.
pub fn child_rng(master_seed: u64, index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(index as u64);
    rng
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunSummary {
    pub index: usize,
    pub weights: WeightVector,
    pub best_cost: f64,
    pub best_objectives: Vec<f64>,
    pub best_feasible: bool,
    pub iterations: usize,
    pub stop_reason: StopReason,
}

/// A candidate for the archive.
#[derive(Debug, Clone, PartialEq)]
pub struct Candidate {
    pub x: Vec<f64>,
    pub f: Vec<f64>,
    pub feasible: bool,
}

/// Output of one weight sample.
#[derive(Debug, Clone)]
pub struct SampleOutcome {
    pub summary: RunSummary,
    /// Best-ever habitat first, then the final population.
    pub candidates: Vec<Candidate>,
}

#[derive(Debug, Clone)]
pub struct RunReport {
    pub problem_id: String,
    pub archive: ParetoArchive,
    pub oracle_front: Vec<ReferencePoint>,
    pub metrics: FrontMetrics,
    pub runs: Vec<RunSummary>,
    pub runtime_seconds: f64,
}

/// Draws the weights for sample `index` and runs one COA with them.
pub fn run_weight_sample(
    config: &RunConfig,
    problem: &ProblemSpec,
    index: usize,
) -> Result<SampleOutcome> {
    let mut rng = child_rng(config.master_seed, index);
    let weights = sample_weights(problem.n_obj(), &mut rng)?;
    let out = run_single_coa(problem, &weights, &config.coa, &config.scalarizer, &mut rng)?;
    let candidates = std::iter::once(&out.best)
        .chain(&out.population)
        .map(|h| Candidate {
            x: h.x.clone(),
            f: h.eval.objectives.clone(),
            feasible: h.is_feasible(),
        })
        .collect();
    Ok(SampleOutcome {
        summary: RunSummary {
            index,
            weights,
            best_cost: out.best.cost,
            best_objectives: out.best.eval.objectives.clone(),
            best_feasible: out.best.is_feasible(),
            iterations: out.iterations,
            stop_reason: out.stop_reason,
        },
        candidates,
    })
}

/// Merges sample outcomes into an archive. The resulting set does not
/// depend on the order of `outcomes`.
pub fn collect_archive<'a>(outcomes: impl IntoIterator<Item = &'a SampleOutcome>) -> ParetoArchive {
    let mut archive = ParetoArchive::new();
    for o in outcomes {
        for c in &o.candidates {
            archive.insert(c.x.clone(), c.f.clone(), c.feasible);
        }
    }
    archive
}

/// Runs the full procedure with the default execution mode.
pub fn run_coaw(config: &RunConfig) -> Result<RunReport> {
    run_coaw_with(config, Execution::default())
}

pub fn run_coaw_with(config: &RunConfig, exec: Execution) -> Result<RunReport> {
    let started = Instant::now();
    config.validate()?;
    let problem = config.problem()?;

    let outcomes = exec
        .map_indexed(config.n_weight_samples, |k| {
            run_weight_sample(config, &problem, k)
        })
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    let mut report = assemble_report(config, &problem, outcomes, exec)?;
    report.runtime_seconds = started.elapsed().as_secs_f64();
    Ok(report)
}

/// Builds the report from sample outcomes given in any order: merges the
/// archive, computes the oracle front and the metrics.
pub fn assemble_report(
    config: &RunConfig,
    problem: &ProblemSpec,
    mut outcomes: Vec<SampleOutcome>,
    exec: Execution,
) -> Result<RunReport> {
    outcomes.sort_by_key(|o| o.summary.index);
    let archive = collect_archive(&outcomes);

    let oracle_front = grid_reference_front_with(problem, &config.oracle, exec)?;
    let reference: Vec<&[f64]> = oracle_front.iter().map(|p| p.f.as_slice()).collect();
    let metrics = archive.metrics(&reference)?;

    Ok(RunReport {
        problem_id: config.problem_id.clone(),
        archive,
        oracle_front,
        metrics,
        runs: outcomes.into_iter().map(|o| o.summary).collect(),
        runtime_seconds: 0.0,
    })
}
