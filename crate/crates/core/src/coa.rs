//! Cuckoo Optimization Algorithm over a scalarized problem.
//!
//! One iteration: assign eggs, lay them inside each cuckoo's egg-laying
//! radius, drop eggs the hosts detect (near-duplicates), evaluate the
//! survivors, cap the population, cluster it with K-means and migrate every
//! cuckoo toward the best habitat of the best cluster.
//!
//! A run is sequential; its result is a pure function of the problem, the
//! weights, the parameters and the rng stream.

use rand::seq::index::sample;
use rand::Rng;

use crate::error::{Error, Result};
use crate::problems::{EvalResult, ProblemSpec};
use crate::scalarization::{
    normalize_generation, penalized_cost, saw_scalarize, ScalarizerConfig, WeightVector,
};

#[derive(Debug, Clone, PartialEq)]
pub struct Habitat {
    pub x: Vec<f64>,
    pub eval: EvalResult,
    /// Penalized SAW cost of `eval` under the run's weights.
    pub cost: f64,
    pub n_eggs: usize,
}

impl Habitat {
    pub fn is_feasible(&self) -> bool {
        self.eval.is_feasible()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CoaParams {
    pub initial_population: usize,
    pub min_eggs: usize,
    pub max_eggs: usize,
    pub max_iterations: usize,
    pub n_clusters: usize,
    pub lambda_max: f64,
    pub egg_laying_alpha: f64,
    pub max_cuckoos: usize,
    /// Stop once the variance of population costs drops below this.
    /// Zero disables the check.
    pub pop_variance_stop: f64,
    /// Stop once the best cost is at or below this value.
    pub accuracy_stop: Option<f64>,
    /// Detection distance as a fraction of each dimension's range.
    pub detection_epsilon_frac: f64,
}

impl Default for CoaParams {
    fn default() -> Self {
        Self {
            initial_population: 5,
            min_eggs: 2,
            max_eggs: 4,
            max_iterations: 50,
            n_clusters: 1,
            lambda_max: 5.0,
            egg_laying_alpha: 5.0,
            max_cuckoos: 10,
            pop_variance_stop: 1e-13,
            accuracy_stop: None,
            detection_epsilon_frac: 1e-6,
        }
    }
}

impl CoaParams {
    pub fn validate(&self) -> Result<()> {
        let fail = |m: String| Err(Error::InvalidParams(m));
        if self.min_eggs < 1 || self.min_eggs > self.max_eggs {
            return fail(format!(
                "coa.min_eggs ({}) must satisfy 1 <= min_eggs <= max_eggs ({})",
                self.min_eggs, self.max_eggs
            ));
        }
        if self.initial_population < 1 || self.initial_population > self.max_cuckoos {
            return fail(format!(
                "coa.initial_population ({}) must satisfy 1 <= initial_population <= max_cuckoos ({})",
                self.initial_population, self.max_cuckoos
            ));
        }
        if self.max_iterations < 1 {
            return fail("coa.max_iterations must be at least 1".into());
        }
        if self.n_clusters < 1 || self.n_clusters > self.max_cuckoos {
            return fail(format!(
                "coa.n_clusters ({}) must satisfy 1 <= n_clusters <= max_cuckoos ({})",
                self.n_clusters, self.max_cuckoos
            ));
        }
        for (name, v) in [
            ("coa.lambda_max", self.lambda_max),
            ("coa.egg_laying_alpha", self.egg_laying_alpha),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return fail(format!("{name} must be > 0, got {v}"));
            }
        }
        if self.pop_variance_stop.is_nan() || self.pop_variance_stop < 0.0 {
            return fail(format!(
                "coa.pop_variance_stop must be >= 0, got {}",
                self.pop_variance_stop
            ));
        }
        if !(self.detection_epsilon_frac.is_finite() && self.detection_epsilon_frac >= 0.0) {
            return fail(format!(
                "coa.detection_epsilon_frac must be >= 0, got {}",
                self.detection_epsilon_frac
            ));
        }
        if let Some(a) = self.accuracy_stop {
            if !a.is_finite() {
                return fail("coa.accuracy_stop must be finite".into());
            }
        }
        Ok(())
    }
}

/// A problem together with the weights and penalty that turn it into a
/// single cost.
#[derive(Debug, Clone, Copy)]
pub struct Scalarized<'a> {
    pub problem: &'a ProblemSpec,
    pub weights: &'a WeightVector,
    pub scalarizer: &'a ScalarizerConfig,
}

impl<'a> Scalarized<'a> {
    pub fn new(
        problem: &'a ProblemSpec,
        weights: &'a WeightVector,
        scalarizer: &'a ScalarizerConfig,
    ) -> Result<Self> {
        if weights.len() != problem.n_obj() {
            return Err(Error::DimensionMismatch {
                expected: problem.n_obj(),
                got: weights.len(),
            });
        }
        Ok(Self {
            problem,
            weights,
            scalarizer,
        })
    }

    pub fn habitat(&self, x: Vec<f64>) -> Result<Habitat> {
        let eval = self.problem.evaluate(&x)?;
        let cost = penalized_cost(&eval, self.weights, self.scalarizer)?;
        Ok(Habitat {
            x,
            eval,
            cost,
            n_eggs: 0,
        })
    }

    /// Keys used for selection. With normalization on, objectives are
    /// min-max rescaled over the given population first.
    fn selection_keys(&self, population: &[Habitat]) -> Result<Vec<f64>> {
        if !self.scalarizer.normalize {
            return Ok(population.iter().map(|h| h.cost).collect());
        }
        let rows: Vec<Vec<f64>> = population
            .iter()
            .map(|h| h.eval.objectives.clone())
            .collect();
        normalize_generation(&rows)
            .iter()
            .zip(population)
            .map(|(row, h)| {
                let base = saw_scalarize(row, self.weights)?;
                Ok(if h.eval.total_violation == 0.0 {
                    base
                } else {
                    base + self.scalarizer.penalty_coefficient * h.eval.total_violation
                })
            })
            .collect()
    }
}

pub fn init_population<R: Rng + ?Sized>(
    target: &Scalarized<'_>,
    params: &CoaParams,
    rng: &mut R,
) -> Result<Vec<Habitat>> {
    let p = target.problem;
    (0..params.initial_population)
        .map(|_| {
            let x = (0..p.dim())
                .map(|d| rng.random_range(p.lower()[d]..=p.upper()[d]))
                .collect();
            target.habitat(x)
        })
        .collect()
}

/// Gives every habitat a uniform egg count in `[min_eggs, max_eggs]`.
pub fn assign_eggs<R: Rng + ?Sized>(population: &mut [Habitat], params: &CoaParams, rng: &mut R) {
    for h in population {
        h.n_eggs = rng.random_range(params.min_eggs..=params.max_eggs);
    }
}

/// `alpha * (habitat_eggs / total_eggs) * (upper[d] - lower[d])` per dimension.
pub fn egg_laying_radius(
    habitat_eggs: usize,
    total_eggs: usize,
    params: &CoaParams,
    problem: &ProblemSpec,
) -> Result<Vec<f64>> {
    if total_eggs == 0 {
        return Err(Error::InvalidParams("total egg count is zero".into()));
    }
    let share = habitat_eggs as f64 / total_eggs as f64;
    Ok((0..problem.dim())
        .map(|d| params.egg_laying_alpha * share * problem.range(d))
        .collect())
}

/// Lays `habitat.n_eggs` eggs uniformly in the axis-aligned box of half-width
/// `radius[d]` around the habitat, clipped to the problem bounds.
pub fn lay_eggs<R: Rng + ?Sized>(
    habitat: &Habitat,
    radius: &[f64],
    rng: &mut R,
    problem: &ProblemSpec,
) -> Vec<Vec<f64>> {
    (0..habitat.n_eggs)
        .map(|_| {
            let mut egg: Vec<f64> = habitat
                .x
                .iter()
                .zip(radius)
                .map(|(c, r)| {
                    if *r > 0.0 {
                        c + rng.random_range(-*r..=*r)
                    } else {
                        *c
                    }
                })
                .collect();
            problem.clip(&mut egg);
            egg
        })
        .collect()
}

fn within(a: &[f64], b: &[f64], eps: &[f64]) -> bool {
    a.iter()
        .zip(b)
        .zip(eps)
        .all(|((u, v), e)| (u - v).abs() <= *e)
}

/// Removes eggs that lie within the detection distance (in every dimension)
/// of an existing habitat or of an earlier surviving egg.
pub fn detect_and_destroy(
    eggs: Vec<Vec<f64>>,
    existing: &[Habitat],
    params: &CoaParams,
    problem: &ProblemSpec,
) -> Vec<Vec<f64>> {
    let eps: Vec<f64> = (0..problem.dim())
        .map(|d| params.detection_epsilon_frac * problem.range(d))
        .collect();
    let mut survivors: Vec<Vec<f64>> = Vec::with_capacity(eggs.len());
    for egg in eggs {
        let detected = existing.iter().any(|h| within(&egg, &h.x, &eps))
            || survivors.iter().any(|s| within(&egg, s, &eps));
        if !detected {
            survivors.push(egg);
        }
    }
    survivors
}

/// Keeps the `max_cuckoos` lowest-cost habitats, preserving their order.
pub fn enforce_capacity(population: Vec<Habitat>, params: &CoaParams) -> Vec<Habitat> {
    let keys: Vec<f64> = population.iter().map(|h| h.cost).collect();
    keep_lowest(population, &keys, params.max_cuckoos)
}

fn keep_lowest(population: Vec<Habitat>, keys: &[f64], cap: usize) -> Vec<Habitat> {
    if population.len() <= cap {
        return population;
    }
    let mut order: Vec<usize> = (0..population.len()).collect();
    order.sort_by(|&a, &b| keys[a].total_cmp(&keys[b]).then(a.cmp(&b)));
    let mut keep = vec![false; population.len()];
    for &i in &order[..cap] {
        keep[i] = true;
    }
    population
        .into_iter()
        .zip(keep)
        .filter_map(|(h, k)| k.then_some(h))
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct Clustering {
    /// Cluster index per habitat.
    pub assignment: Vec<usize>,
    pub centroids: Vec<Vec<f64>>,
    /// Cluster with the lowest mean cost.
    pub best_cluster: usize,
    /// Index of the lowest-cost habitat inside the best cluster.
    pub goal_index: usize,
    pub goal: Vec<f64>,
}

const MAX_LLOYD_ITERATIONS: usize = 100;

/// Lloyd's K-means on habitat positions; picks the goal point as the best
/// habitat of the cluster with the lowest mean cost.
pub fn kmeans_cluster<R: Rng + ?Sized>(
    population: &[Habitat],
    k: usize,
    rng: &mut R,
) -> Result<Clustering> {
    let costs: Vec<f64> = population.iter().map(|h| h.cost).collect();
    kmeans_with_costs(population, &costs, k, rng)
}

fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(u, v)| (u - v) * (u - v)).sum()
}

fn kmeans_with_costs<R: Rng + ?Sized>(
    population: &[Habitat],
    costs: &[f64],
    k: usize,
    rng: &mut R,
) -> Result<Clustering> {
    let n = population.len();
    if k == 0 {
        return Err(Error::InvalidParams("k must be at least 1".into()));
    }
    if n < k {
        return Err(Error::TooFewPoints { population: n, k });
    }
    let dim = population[0].x.len();
    let mut centroids: Vec<Vec<f64>> = sample(rng, n, k)
        .into_iter()
        .map(|i| population[i].x.clone())
        .collect();

    let assign = |centroids: &[Vec<f64>]| -> Vec<usize> {
        population
            .iter()
            .map(|h| {
                let mut best = 0;
                let mut best_d = sq_dist(&h.x, &centroids[0]);
                for (c, centroid) in centroids.iter().enumerate().skip(1) {
                    let d = sq_dist(&h.x, centroid);
                    if d < best_d {
                        best = c;
                        best_d = d;
                    }
                }
                best
            })
            .collect()
    };

    let mut assignment = assign(&centroids);
    for _ in 0..MAX_LLOYD_ITERATIONS {
        let mut sums = vec![vec![0.0; dim]; k];
        let mut counts = vec![0usize; k];
        for (h, &c) in population.iter().zip(&assignment) {
            counts[c] += 1;
            for (s, v) in sums[c].iter_mut().zip(&h.x) {
                *s += v;
            }
        }
        for c in 0..k {
            if counts[c] > 0 {
                centroids[c] = sums[c].iter().map(|s| s / counts[c] as f64).collect();
            } else {
                // empty cluster: re-seed at the point farthest from where it was
                let old = &centroids[c];
                let mut far = 0;
                let mut far_d = f64::NEG_INFINITY;
                for (i, h) in population.iter().enumerate() {
                    let d = sq_dist(&h.x, old);
                    if d > far_d {
                        far = i;
                        far_d = d;
                    }
                }
                centroids[c] = population[far].x.clone();
            }
        }
        let next = assign(&centroids);
        if next == assignment {
            break;
        }
        assignment = next;
    }

    let mut mean_cost = vec![0.0; k];
    let mut counts = vec![0usize; k];
    for (&c, cost) in assignment.iter().zip(costs) {
        mean_cost[c] += cost;
        counts[c] += 1;
    }
    let mut best_cluster = None;
    for c in 0..k {
        if counts[c] == 0 {
            continue;
        }
        let m = mean_cost[c] / counts[c] as f64;
        mean_cost[c] = m;
        match best_cluster {
            Some(b) if mean_cost[b] <= m => {}
            _ => best_cluster = Some(c),
        }
    }
    let best_cluster = best_cluster.expect("at least one nonempty cluster");
    let goal_index = (0..n)
        .filter(|&i| assignment[i] == best_cluster)
        .min_by(|&a, &b| costs[a].total_cmp(&costs[b]).then(a.cmp(&b)))
        .expect("best cluster is nonempty");
    Ok(Clustering {
        assignment,
        centroids,
        best_cluster,
        goal_index,
        goal: population[goal_index].x.clone(),
    })
}

/// Moves `x` along the ray toward `goal` by a factor drawn from
/// `U[0, lambda_max]`, then clips to the box.
pub fn migrate<R: Rng + ?Sized>(
    x: &[f64],
    goal: &[f64],
    params: &CoaParams,
    rng: &mut R,
    problem: &ProblemSpec,
) -> Vec<f64> {
    let lambda = rng.random_range(0.0..=params.lambda_max);
    migrate_with_lambda(x, goal, lambda, problem)
}

pub fn migrate_with_lambda(
    x: &[f64],
    goal: &[f64],
    lambda: f64,
    problem: &ProblemSpec,
) -> Vec<f64> {
    let mut next: Vec<f64> = x
        .iter()
        .zip(goal)
        .map(|(a, g)| a + lambda * (g - a))
        .collect();
    problem.clip(&mut next);
    next
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum StopReason {
    MaxIterations,
    PopulationVariance,
    Accuracy,
}

/// Points inside an iteration where [`run_single_coa_observed`] reports the
/// population.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stage {
    Initialized,
    EggsLaid,
    CapacityEnforced,
    Migrated,
}

#[derive(Debug, Clone)]
pub struct CoaOutcome {
    /// Lowest-cost habitat seen during the run.
    pub best: Habitat,
    pub population: Vec<Habitat>,
    /// Best-so-far cost after each iteration.
    pub trace: Vec<f64>,
    pub iterations: usize,
    pub stop_reason: StopReason,
}

pub fn run_single_coa<R: Rng + ?Sized>(
    problem: &ProblemSpec,
    weights: &WeightVector,
    params: &CoaParams,
    scalarizer: &ScalarizerConfig,
    rng: &mut R,
) -> Result<CoaOutcome> {
    run_single_coa_observed(problem, weights, params, scalarizer, rng, |_, _, _| {})
}

/// [`run_single_coa`] with a callback invoked as
/// `observer(iteration, stage, population)` at every [`Stage`].
pub fn run_single_coa_observed<R, F>(
    problem: &ProblemSpec,
    weights: &WeightVector,
    params: &CoaParams,
    scalarizer: &ScalarizerConfig,
    rng: &mut R,
    mut observer: F,
) -> Result<CoaOutcome>
where
    R: Rng + ?Sized,
    F: FnMut(usize, Stage, &[Habitat]),
{
    params.validate()?;
    scalarizer.validate()?;
    let target = Scalarized::new(problem, weights, scalarizer)?;

    let mut population = init_population(&target, params, rng)?;
    observer(0, Stage::Initialized, &population);
    let mut best = lowest_cost(&population).clone();
    let mut trace = Vec::with_capacity(params.max_iterations);
    let mut stop_reason = StopReason::MaxIterations;

    for iteration in 1..=params.max_iterations {
        assign_eggs(&mut population, params, rng);
        let total_eggs: usize = population.iter().map(|h| h.n_eggs).sum();
        let mut eggs = Vec::with_capacity(total_eggs);
        for h in &population {
            let radius = egg_laying_radius(h.n_eggs, total_eggs, params, problem)?;
            eggs.extend(lay_eggs(h, &radius, rng, problem));
        }
        let survivors = detect_and_destroy(eggs, &population, params, problem);
        for egg in survivors {
            population.push(target.habitat(egg)?);
        }
        update_best(&mut best, &population);
        observer(iteration, Stage::EggsLaid, &population);

        let keys = target.selection_keys(&population)?;
        population = keep_lowest(population, &keys, params.max_cuckoos);
        observer(iteration, Stage::CapacityEnforced, &population);

        let keys = target.selection_keys(&population)?;
        let k = params.n_clusters.min(population.len());
        let clusters = kmeans_with_costs(&population, &keys, k, rng)?;
        for (i, h) in population.iter_mut().enumerate() {
            if i == clusters.goal_index {
                continue;
            }
            let x = migrate(&h.x, &clusters.goal, params, rng, problem);
            *h = target.habitat(x)?;
        }
        update_best(&mut best, &population);
        observer(iteration, Stage::Migrated, &population);
        trace.push(best.cost);

        if let Some(acc) = params.accuracy_stop {
            if best.cost <= acc {
                stop_reason = StopReason::Accuracy;
                break;
            }
        }
        if cost_variance(&population) < params.pop_variance_stop {
            stop_reason = StopReason::PopulationVariance;
            break;
        }
    }

    Ok(CoaOutcome {
        best,
        iterations: trace.len(),
        population,
        trace,
        stop_reason,
    })
}

fn lowest_cost(population: &[Habitat]) -> &Habitat {
    population
        .iter()
        .reduce(|a, b| if b.cost < a.cost { b } else { a })
        .expect("population is nonempty")
}

fn update_best(best: &mut Habitat, population: &[Habitat]) {
    let candidate = lowest_cost(population);
    if candidate.cost < best.cost {
        *best = candidate.clone();
    }
}

fn cost_variance(population: &[Habitat]) -> f64 {
    let n = population.len() as f64;
    let mean = population.iter().map(|h| h.cost).sum::<f64>() / n;
    population
        .iter()
        .map(|h| (h.cost - mean).powi(2))
        .sum::<f64>()
        / n
}
