//! Constrained multi-objective problem model and the built-in benchmarks.
//!
//! Objectives are always in minimization sense. Constraints are stored as
//! `g(x) - b`, so a point is feasible when every stored value is `<= 0`.
//! Sign bounds on single variables are folded into the box instead of being
//! stored as constraints.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

/// A real-valued function of the decision vector.
pub type Evaluator = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;

/// Extent used for box directions the benchmark definitions leave open.
pub const DEFAULT_BOX_EXTENT: f64 = 4.0;

/// Identifiers of the built-in problems.
pub const BUILTIN_IDS: [&str; 3] = ["p1", "p2", "p3"];

#[derive(Clone)]
pub struct ProblemSpec {
    id: String,
    lower: Vec<f64>,
    upper: Vec<f64>,
    objectives: Vec<Evaluator>,
    constraints: Vec<Evaluator>,
}

impl fmt::Debug for ProblemSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ProblemSpec")
            .field("id", &self.id)
            .field("lower", &self.lower)
            .field("upper", &self.upper)
            .field("n_obj", &self.objectives.len())
            .field("n_constraints", &self.constraints.len())
            .finish()
    }
}

impl ProblemSpec {
    /// Builds a problem from its box and evaluators.
    ///
    /// Requires at least one dimension, at least two objectives and finite
    /// bounds with `lower[d] < upper[d]`.
    pub fn new(
        id: impl Into<String>,
        lower: Vec<f64>,
        upper: Vec<f64>,
        objectives: Vec<Evaluator>,
        constraints: Vec<Evaluator>,
    ) -> Result<Self> {
        if lower.is_empty() {
            return Err(Error::InvalidProblem("dim must be at least 1".into()));
        }
        if lower.len() != upper.len() {
            return Err(Error::InvalidProblem(format!(
                "lower has {} bounds but upper has {}",
                lower.len(),
                upper.len()
            )));
        }
        if objectives.len() < 2 {
            return Err(Error::InvalidProblem(
                "at least two objectives are required".into(),
            ));
        }
        for (d, (lo, hi)) in lower.iter().zip(&upper).enumerate() {
            if !lo.is_finite() || !hi.is_finite() || lo >= hi {
                return Err(Error::InvalidProblem(format!(
                    "bounds of dimension {d} must be finite with lower < upper, got [{lo}, {hi}]"
                )));
            }
        }
        Ok(Self {
            id: id.into(),
            lower,
            upper,
            objectives,
            constraints,
        })
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn n_obj(&self) -> usize {
        self.objectives.len()
    }

    pub fn n_constraints(&self) -> usize {
        self.constraints.len()
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    /// `upper[d] - lower[d]`.
    pub fn range(&self, d: usize) -> f64 {
        self.upper[d] - self.lower[d]
    }

    /// Clamps `x` into the box in place.
    pub fn clip(&self, x: &mut [f64]) {
        for ((v, lo), hi) in x.iter_mut().zip(&self.lower).zip(&self.upper) {
            *v = v.clamp(*lo, *hi);
        }
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.len() == self.dim()
            && x.iter()
                .zip(&self.lower)
                .zip(&self.upper)
                .all(|((v, lo), hi)| *lo <= *v && *v <= *hi)
    }

    /// Evaluates objectives and constraint violations at `x`.
    ///
    /// The point is not clipped to the box.
    pub fn evaluate(&self, x: &[f64]) -> Result<EvalResult> {
        if x.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: x.len(),
            });
        }
        if let Some(index) = x.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFiniteInput { index });
        }
        let objectives = self.objectives.iter().map(|f| f(x)).collect();
        let violations: Vec<f64> = self.constraints.iter().map(|g| g(x).max(0.0)).collect();
        let total_violation = violations.iter().sum();
        Ok(EvalResult {
            objectives,
            violations,
            total_violation,
        })
    }

    /// Raw constraint values `g(x) - b`, without the `max(0, .)`.
    pub fn constraint_values(&self, x: &[f64]) -> Vec<f64> {
        self.constraints.iter().map(|g| g(x)).collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvalResult {
    pub objectives: Vec<f64>,
    /// `max(0, g_j(x))` per constraint.
    pub violations: Vec<f64>,
    pub total_violation: f64,
}

impl EvalResult {
    pub fn is_feasible(&self) -> bool {
        self.total_violation == 0.0
    }
}

/// Looks up a built-in problem with the default box extent.
pub fn get_builtin(id: &str) -> Result<ProblemSpec> {
    builtin_with_extent(id, DEFAULT_BOX_EXTENT)
}

/// Looks up a built-in problem, using `extent` for open box directions.
pub fn builtin_with_extent(id: &str, extent: f64) -> Result<ProblemSpec> {
    if !(extent.is_finite() && extent > 0.0) {
        return Err(Error::InvalidParams(format!(
            "box extent must be finite and positive, got {extent}"
        )));
    }
    let b = extent;
    match id {
        // min (x1, x2) s.t. (x1-2)^2 + (x2-2)^2 <= 4, x >= 0
        "p1" => ProblemSpec::new(
            "p1",
            vec![0.0, 0.0],
            vec![b, b],
            vec![Arc::new(|x| x[0]), Arc::new(|x| x[1])],
            vec![Arc::new(|x| {
                (x[0] - 2.0).powi(2) + (x[1] - 2.0).powi(2) - 4.0
            })],
        ),
        // min (2 x1 - x2, -x2) s.t. (x1-1)^3 + x2 <= 0, x >= 0
        "p2" => ProblemSpec::new(
            "p2",
            vec![0.0, 0.0],
            vec![b, b],
            vec![Arc::new(|x| 2.0 * x[0] - x[1]), Arc::new(|x| -x[1])],
            vec![Arc::new(|x| (x[0] - 1.0).powi(3) + x[1])],
        ),
        // min (x1, x2) s.t. x1^3 - 3 x1 - x2 <= 0, x1 >= -1, x2 <= 2
        "p3" => ProblemSpec::new(
            "p3",
            vec![-1.0, -b],
            vec![b, 2.0],
            vec![Arc::new(|x| x[0]), Arc::new(|x| x[1])],
            vec![Arc::new(|x| x[0].powi(3) - 3.0 * x[0] - x[1])],
        ),
        _ => Err(Error::UnknownProblem {
            id: id.to_string(),
            valid: BUILTIN_IDS.join(", "),
        }),
    }
}
