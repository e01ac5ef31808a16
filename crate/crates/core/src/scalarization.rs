//! Simple additive weighting (SAW) and exterior-penalty cost.

use rand::Rng;
use rand_distr::Exp1;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::problems::EvalResult;

const SUM_TOLERANCE: f64 = 1e-12;

/// Nonnegative weights summing to one.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct WeightVector(Vec<f64>);

impl WeightVector {
    pub fn new(w: Vec<f64>) -> Result<Self> {
        if w.is_empty() {
            return Err(Error::InvalidWeights("no components".into()));
        }
        if let Some(bad) = w
            .iter()
            .find(|v| !(v.is_finite() && **v >= 0.0 && **v <= 1.0))
        {
            return Err(Error::InvalidWeights(format!(
                "component {bad} outside [0, 1]"
            )));
        }
        let sum: f64 = w.iter().sum();
        if (sum - 1.0).abs() > SUM_TOLERANCE {
            return Err(Error::InvalidWeights(format!("components sum to {sum}")));
        }
        Ok(Self(w))
    }

    /// Rescales arbitrary nonnegative weights onto the simplex.
    pub fn normalized(w: &[f64]) -> Result<Self> {
        if w.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
            return Err(Error::InvalidWeights(
                "negative or non-finite component".into(),
            ));
        }
        let sum: f64 = w.iter().sum();
        if sum <= 0.0 {
            return Err(Error::InvalidWeights("all components are zero".into()));
        }
        Self::new(w.iter().map(|v| v / sum).collect())
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScalarizerConfig {
    pub penalty_coefficient: f64,
    /// Min-max rescale objectives over each generation before weighting.
    pub normalize: bool,
}

impl Default for ScalarizerConfig {
    fn default() -> Self {
        Self {
            penalty_coefficient: 1e6,
            normalize: false,
        }
    }
}

impl ScalarizerConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.penalty_coefficient.is_finite() && self.penalty_coefficient > 0.0) {
            return Err(Error::InvalidParams(format!(
                "scalarizer.penalty_coefficient must be > 0, got {}",
                self.penalty_coefficient
            )));
        }
        Ok(())
    }
}

/// Draws weights uniformly on the simplex (symmetric Dirichlet(1) built from
/// normalized exponential variates).
pub fn sample_weights<R: Rng + ?Sized>(n_obj: usize, rng: &mut R) -> Result<WeightVector> {
    if n_obj < 2 {
        return Err(Error::InvalidWeights(format!(
            "need at least 2 objectives, got {n_obj}"
        )));
    }
    loop {
        let draws: Vec<f64> = (0..n_obj).map(|_| rng.sample::<f64, _>(Exp1)).collect();
        let sum: f64 = draws.iter().sum();
        if sum > 0.0 {
            let mut w: Vec<f64> = draws.iter().map(|v| v / sum).collect();
            // put rounding residue on the largest component so the sum is tight
            let residue = 1.0 - w.iter().sum::<f64>();
            let imax = argmax(&w);
            w[imax] = (w[imax] + residue).clamp(0.0, 1.0);
            return WeightVector::new(w);
        }
    }
}

fn argmax(v: &[f64]) -> usize {
    let mut best = 0;
    for (i, x) in v.iter().enumerate() {
        if *x > v[best] {
            best = i;
        }
    }
    best
}

/// `sum_i w_i * f_i`.
pub fn saw_scalarize(objectives: &[f64], weights: &WeightVector) -> Result<f64> {
    if objectives.len() != weights.len() {
        return Err(Error::DimensionMismatch {
            expected: weights.len(),
            got: objectives.len(),
        });
    }
    Ok(objectives
        .iter()
        .zip(weights.as_slice())
        .map(|(f, w)| f * w)
        .sum())
}

/// SAW composite plus `penalty_coefficient * total_violation`.
pub fn penalized_cost(
    eval: &EvalResult,
    weights: &WeightVector,
    cfg: &ScalarizerConfig,
) -> Result<f64> {
    let base = saw_scalarize(&eval.objectives, weights)?;
    if eval.total_violation == 0.0 {
        Ok(base)
    } else {
        Ok(base + cfg.penalty_coefficient * eval.total_violation)
    }
}

/// Rescales every column to `[0, 1]` by `(v - min) / (max - min)`; constant
/// columns become zeros.
pub fn normalize_generation(rows: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let Some(first) = rows.first() else {
        return Vec::new();
    };
    let cols = first.len();
    let mut lo = vec![f64::INFINITY; cols];
    let mut hi = vec![f64::NEG_INFINITY; cols];
    for row in rows {
        for (c, v) in row.iter().enumerate() {
            lo[c] = lo[c].min(*v);
            hi[c] = hi[c].max(*v);
        }
    }
    rows.iter()
        .map(|row| {
            row.iter()
                .enumerate()
                .map(|(c, v)| {
                    let span = hi[c] - lo[c];
                    if span > 0.0 {
                        (v - lo[c]) / span
                    } else {
                        0.0
                    }
                })
                .collect()
        })
        .collect()
}
