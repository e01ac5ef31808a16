//! Pareto dominance, nondominated filtering, the archive and front metrics.
//!
//! Everything here is in minimization sense.

use serde::Serialize;

use crate::error::{Error, Result};

/// `a` dominates `b`: no worse everywhere, strictly better somewhere.
pub fn dominates(a: &[f64], b: &[f64]) -> Result<bool> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch {
            expected: a.len(),
            got: b.len(),
        });
    }
    Ok(dominates_unchecked(a, b))
}

pub(crate) fn dominates_unchecked(a: &[f64], b: &[f64]) -> bool {
    let mut strict = false;
    for (x, y) in a.iter().zip(b) {
        if x > y {
            return false;
        }
        if x < y {
            strict = true;
        }
    }
    strict
}

fn lex_cmp(a: &[f64], b: &[f64]) -> std::cmp::Ordering {
    for (x, y) in a.iter().zip(b) {
        match x.total_cmp(y) {
            std::cmp::Ordering::Equal => continue,
            o => return o,
        }
    }
    a.len().cmp(&b.len())
}

/// Indices (ascending) of the points no other point dominates. Among exact
/// duplicates only the lowest index is kept.
pub fn pareto_filter<P: AsRef<[f64]>>(points: &[P]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..points.len()).collect();
    order.sort_by(|&a, &b| lex_cmp(points[a].as_ref(), points[b].as_ref()).then(a.cmp(&b)));
    // A dominator always precedes its victim in lexicographic order, and a
    // dominated dominator is itself covered by some kept point.
    let mut kept: Vec<usize> = Vec::new();
    for i in order {
        let p = points[i].as_ref();
        let covered = kept.iter().any(|&k| {
            let q = points[k].as_ref();
            q == p || dominates_unchecked(q, p)
        });
        if !covered {
            kept.push(i);
        }
    }
    kept.sort_unstable();
    kept
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ArchiveEntry {
    pub x: Vec<f64>,
    pub f: Vec<f64>,
}

/// Mutually nondominated, feasible, duplicate-free set of solutions.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ParetoArchive {
    entries: Vec<ArchiveEntry>,
}

impl ParetoArchive {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn entries(&self) -> &[ArchiveEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn objectives(&self) -> Vec<Vec<f64>> {
        self.entries.iter().map(|e| e.f.clone()).collect()
    }

    /// Offers a candidate. Returns whether it was inserted.
    ///
    /// Infeasible, dominated and duplicate candidates are ignored; an
    /// inserted candidate evicts every entry it dominates.
    pub fn insert(&mut self, x: Vec<f64>, f: Vec<f64>, feasible: bool) -> bool {
        if !feasible || f.iter().any(|v| !v.is_finite()) {
            return false;
        }
        if let Some(first) = self.entries.first() {
            if first.f.len() != f.len() {
                return false;
            }
        }
        if self
            .entries
            .iter()
            .any(|e| e.f == f || dominates_unchecked(&e.f, &f))
        {
            return false;
        }
        self.entries.retain(|e| !dominates_unchecked(&f, &e.f));
        self.entries.push(ArchiveEntry { x, f });
        true
    }

    /// Entries sorted ascending by objectives (f1, then f2, ...).
    pub fn sorted(&self) -> Vec<ArchiveEntry> {
        let mut v = self.entries.clone();
        v.sort_by(|a, b| lex_cmp(&a.f, &b.f).then_with(|| lex_cmp(&a.x, &b.x)));
        v
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FrontMetrics {
    /// Mean distance from each front point to its nearest reference point.
    pub generational_distance: f64,
    /// Largest distance between matching per-objective best points.
    pub extreme_error: f64,
    /// Std of consecutive gaps along f1 over their mean; two objectives only.
    pub spread: Option<f64>,
}

fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(u, v)| (u - v) * (u - v))
        .sum::<f64>()
        .sqrt()
}

/// Point with the smallest value of objective `m`; ties go to the
/// lexicographically smallest vector.
pub fn objective_best<P: AsRef<[f64]>>(points: &[P], m: usize) -> Option<&[f64]> {
    points
        .iter()
        .map(|p| p.as_ref())
        .min_by(|a, b| a[m].total_cmp(&b[m]).then_with(|| lex_cmp(a, b)))
}

pub fn generational_distance<P: AsRef<[f64]>, Q: AsRef<[f64]>>(
    front: &[P],
    reference: &[Q],
) -> f64 {
    let total: f64 = front
        .iter()
        .map(|p| {
            reference
                .iter()
                .map(|r| dist(p.as_ref(), r.as_ref()))
                .fold(f64::INFINITY, f64::min)
        })
        .sum();
    total / front.len() as f64
}

pub fn spread<P: AsRef<[f64]>>(front: &[P]) -> Option<f64> {
    if front.iter().any(|p| p.as_ref().len() != 2) {
        return None;
    }
    let mut pts: Vec<&[f64]> = front.iter().map(|p| p.as_ref()).collect();
    pts.sort_by(|a, b| lex_cmp(a, b));
    let gaps: Vec<f64> = pts.windows(2).map(|w| dist(w[0], w[1])).collect();
    if gaps.is_empty() {
        return Some(0.0);
    }
    let mean = gaps.iter().sum::<f64>() / gaps.len() as f64;
    if mean == 0.0 {
        return Some(0.0);
    }
    let var = gaps.iter().map(|g| (g - mean).powi(2)).sum::<f64>() / gaps.len() as f64;
    Some(var.sqrt() / mean)
}

/// Scores an approximation front against a reference front.
pub fn front_metrics<P: AsRef<[f64]>, Q: AsRef<[f64]>>(
    front: &[P],
    reference: &[Q],
) -> Result<FrontMetrics> {
    if front.is_empty() {
        return Err(Error::EmptyInput("front"));
    }
    if reference.is_empty() {
        return Err(Error::EmptyInput("reference front"));
    }
    let n_obj = front[0].as_ref().len();
    if let Some(bad) = front
        .iter()
        .map(|p| p.as_ref().len())
        .chain(reference.iter().map(|r| r.as_ref().len()))
        .find(|len| *len != n_obj)
    {
        return Err(Error::DimensionMismatch {
            expected: n_obj,
            got: bad,
        });
    }
    let extreme_error = (0..n_obj)
        .map(|m| {
            let a = objective_best(front, m).expect("nonempty");
            let r = objective_best(reference, m).expect("nonempty");
            dist(a, r)
        })
        .fold(0.0, f64::max);
    Ok(FrontMetrics {
        generational_distance: generational_distance(front, reference),
        extreme_error,
        spread: spread(front),
    })
}

impl ParetoArchive {
    pub fn metrics<Q: AsRef<[f64]>>(&self, reference: &[Q]) -> Result<FrontMetrics> {
        front_metrics(&self.objectives(), reference)
    }
}
