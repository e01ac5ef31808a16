//! Result files: `front.csv`, `oracle_front.csv`, `metrics.json` and the
//! optional gnuplot script `front.gp`.
//!
//! CSV files have the header `x1,...,xD,f1,...,fM` and rows sorted by f1,
//! then f2. Values use Rust's shortest round-trip float formatting.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::config::RunConfig;
use crate::error::{Error, Result};
use crate::pareto::FrontMetrics;
use crate::runner::{RunReport, RunSummary};

pub const FRONT_CSV: &str = "front.csv";
pub const ORACLE_CSV: &str = "oracle_front.csv";
pub const METRICS_JSON: &str = "metrics.json";
pub const PLOT_SCRIPT: &str = "front.gp";

/// A front as (decision, objectives) rows.
#[derive(Debug, Clone, PartialEq)]
pub struct FrontRows {
    pub rows: Vec<(Vec<f64>, Vec<f64>)>,
}

impl FrontRows {
    pub fn new(mut rows: Vec<(Vec<f64>, Vec<f64>)>) -> Self {
        rows.sort_by(|a, b| {
            a.1.iter()
                .zip(&b.1)
                .map(|(u, v)| u.total_cmp(v))
                .find(|o| o.is_ne())
                .unwrap_or(std::cmp::Ordering::Equal)
        });
        Self { rows }
    }

    pub fn objectives(&self) -> Vec<Vec<f64>> {
        self.rows.iter().map(|r| r.1.clone()).collect()
    }

    fn header(dim: usize, n_obj: usize) -> Vec<String> {
        (1..=dim)
            .map(|i| format!("x{i}"))
            .chain((1..=n_obj).map(|i| format!("f{i}")))
            .collect()
    }

    pub fn to_csv_string(&self, dim: usize, n_obj: usize) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(Self::header(dim, n_obj))?;
        for (x, f) in &self.rows {
            w.write_record(x.iter().chain(f).map(|v| v.to_string()))?;
        }
        let bytes = w
            .into_inner()
            .map_err(|e| Error::io("<csv buffer>", e.into_error()))?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }

    /// Reads a front file; columns named `f*` are objectives, the rest are
    /// decision variables.
    pub fn read_csv(path: &Path) -> Result<Self> {
        let bad = |message: String| Error::FrontFile {
            path: path.to_path_buf(),
            message,
        };
        let mut reader = csv::Reader::from_path(path).map_err(|e| match e.kind() {
            csv::ErrorKind::Io(_) => bad(e.to_string()),
            _ => Error::Csv(e),
        })?;
        let header = reader.headers()?.clone();
        let is_obj: Vec<bool> = header.iter().map(|h| h.trim().starts_with('f')).collect();
        if !is_obj.iter().any(|b| *b) {
            return Err(bad("no objective columns (f1, f2, ...) in header".into()));
        }
        let mut rows = Vec::new();
        for (n, record) in reader.records().enumerate() {
            let record = record?;
            let mut x = Vec::new();
            let mut f = Vec::new();
            for (field, obj) in record.iter().zip(&is_obj) {
                let v: f64 = field
                    .trim()
                    .parse()
                    .map_err(|_| bad(format!("row {}: `{field}` is not a number", n + 2)))?;
                if *obj {
                    f.push(v);
                } else {
                    x.push(v);
                }
            }
            rows.push((x, f));
        }
        Ok(Self { rows })
    }
}

#[derive(Debug, Serialize)]
struct MetricsFile<'a> {
    generational_distance: f64,
    extreme_error: f64,
    spread: Option<f64>,
    runtime_seconds: Option<f64>,
    n_front_points: usize,
    per_run: &'a [RunSummary],
}

pub fn metrics_json(report: &RunReport, record_runtime: bool) -> Result<String> {
    let FrontMetrics {
        generational_distance,
        extreme_error,
        spread,
    } = report.metrics;
    let file = MetricsFile {
        generational_distance,
        extreme_error,
        spread,
        runtime_seconds: record_runtime.then_some(report.runtime_seconds),
        n_front_points: report.archive.len(),
        per_run: &report.runs,
    };
    let mut s = serde_json::to_string_pretty(&file)?;
    s.push('\n');
    Ok(s)
}

fn plot_script(problem_id: &str) -> String {
    format!(
        "set datafile separator ','\n\
         set key autotitle columnhead\n\
         set title 'Pareto front: {problem_id}'\n\
         set xlabel 'f1'\n\
         set ylabel 'f2'\n\
         set grid\n\
         plot '{ORACLE_CSV}' using 'f1':'f2' with dots lc rgb 'gray' title 'grid oracle', \\\n     \
         '{FRONT_CSV}' using 'f1':'f2' with points pt 7 ps 0.6 lc rgb 'blue' title 'COAW'\n"
    )
}

fn write_file(path: PathBuf, contents: &str) -> Result<PathBuf> {
    fs::write(&path, contents).map_err(|e| Error::io(&path, e))?;
    Ok(path)
}

pub fn front_rows(report: &RunReport) -> (FrontRows, FrontRows) {
    let front = FrontRows::new(
        report
            .archive
            .entries()
            .iter()
            .map(|e| (e.x.clone(), e.f.clone()))
            .collect(),
    );
    let oracle = FrontRows::new(
        report
            .oracle_front
            .iter()
            .map(|p| (p.x.clone(), p.f.clone()))
            .collect(),
    );
    (front, oracle)
}

/// Renders everything first and only then touches the filesystem, so a
/// formatting failure leaves no partial output.
pub fn write_outputs(report: &RunReport, config: &RunConfig) -> Result<Vec<PathBuf>> {
    let problem = config.problem()?;
    let (dim, n_obj) = (problem.dim(), problem.n_obj());
    let (front, oracle) = front_rows(report);
    let front_csv = front.to_csv_string(dim, n_obj)?;
    let oracle_csv = oracle.to_csv_string(dim, n_obj)?;
    let metrics = metrics_json(report, config.record_runtime)?;

    let dir = &config.output_dir;
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut written = vec![
        write_file(dir.join(FRONT_CSV), &front_csv)?,
        write_file(dir.join(ORACLE_CSV), &oracle_csv)?,
        write_file(dir.join(METRICS_JSON), &metrics)?,
    ];
    let gp = dir.join(PLOT_SCRIPT);
    if config.emit_plot_data {
        written.push(write_file(gp, &plot_script(&report.problem_id))?);
    } else if gp.exists() {
        fs::remove_file(&gp).map_err(|e| Error::io(&gp, e))?;
    }
    Ok(written)
}
