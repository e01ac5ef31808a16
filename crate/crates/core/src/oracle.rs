//! Brute-force reference fronts.

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::pareto::pareto_filter;
use crate::problems::ProblemSpec;

/// Constraint slack admitted on grid points so active-constraint points count
/// as feasible.
pub const FEASIBILITY_TOLERANCE: f64 = 1e-9;

const MAX_GRID_DIM: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OracleConfig {
    /// Grid points per dimension.
    pub resolution: usize,
}

impl Default for OracleConfig {
    fn default() -> Self {
        Self { resolution: 801 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReferencePoint {
    pub x: Vec<f64>,
    pub f: Vec<f64>,
}

pub fn grid_coordinate(lower: f64, upper: f64, i: usize, resolution: usize) -> f64 {
    if i + 1 == resolution {
        upper
    } else {
        lower + (upper - lower) * i as f64 / (resolution - 1) as f64
    }
}

/// Nondominated feasible points of a full grid over the problem box.
pub fn grid_reference_front(
    problem: &ProblemSpec,
    cfg: &OracleConfig,
) -> Result<Vec<ReferencePoint>> {
    grid_reference_front_with(problem, cfg, Execution::default())
}

pub fn grid_reference_front_with(
    problem: &ProblemSpec,
    cfg: &OracleConfig,
    exec: Execution,
) -> Result<Vec<ReferencePoint>> {
    let dim = problem.dim();
    if dim > MAX_GRID_DIM {
        return Err(Error::InvalidParams(format!(
            "grid oracle supports at most {MAX_GRID_DIM} dimensions, problem has {dim}"
        )));
    }
    if cfg.resolution < 2 {
        return Err(Error::InvalidParams(format!(
            "oracle.resolution must be at least 2, got {}",
            cfg.resolution
        )));
    }
    let res = cfg.resolution;
    let inner = res.pow(dim as u32 - 1);

    // one slab per index of the first coordinate, pre-filtered
    let slabs = exec.map_indexed(res, |i0| -> Result<Vec<ReferencePoint>> {
        let mut pts = Vec::new();
        let mut x = vec![0.0; dim];
        x[0] = grid_coordinate(problem.lower()[0], problem.upper()[0], i0, res);
        for mut rest in 0..inner {
            for d in (1..dim).rev() {
                let i = rest % res;
                rest /= res;
                x[d] = grid_coordinate(problem.lower()[d], problem.upper()[d], i, res);
            }
            let eval = problem.evaluate(&x)?;
            if eval.violations.iter().all(|v| *v <= FEASIBILITY_TOLERANCE) {
                pts.push(ReferencePoint {
                    x: x.clone(),
                    f: eval.objectives,
                });
            }
        }
        Ok(nondominated(pts))
    });
    let mut all = Vec::new();
    for slab in slabs {
        all.extend(slab?);
    }
    Ok(nondominated(all))
}

fn nondominated(points: Vec<ReferencePoint>) -> Vec<ReferencePoint> {
    let objs: Vec<&[f64]> = points.iter().map(|p| p.f.as_slice()).collect();
    let keep = pareto_filter(&objs);
    let mut flags = vec![false; points.len()];
    for i in keep {
        flags[i] = true;
    }
    points
        .into_iter()
        .zip(flags)
        .filter_map(|(p, k)| k.then_some(p))
        .collect()
}

/// `{(t, t^3 - 3t)}` for `n_points` equally spaced `t` in `[-1, 1]`: the
/// trade-off boundary of problem p3.
pub fn analytic_front_p3(n_points: usize) -> Result<Vec<Vec<f64>>> {
    if n_points < 2 {
        return Err(Error::InvalidParams(format!(
            "analytic front needs at least 2 points, got {n_points}"
        )));
    }
    Ok((0..n_points)
        .map(|i| {
            let t = grid_coordinate(-1.0, 1.0, i, n_points);
            vec![t, t.powi(3) - 3.0 * t]
        })
        .collect())
}
