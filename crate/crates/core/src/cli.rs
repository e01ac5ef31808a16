//! Command-line entry point.
//!
//! Exit status: 0 on success, 2 on usage or configuration errors, 1 on
//! runtime errors.

use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand};

use crate::config::RunConfig;
use crate::error::{Error, Result};
use crate::oracle::{grid_reference_front, OracleConfig};
use crate::output::{write_outputs, FrontRows, ORACLE_CSV};
use crate::pareto::front_metrics;
use crate::problems::{builtin_with_extent, DEFAULT_BOX_EXTENT};
use crate::runner::run_coaw;

pub const EXIT_OK: i32 = 0;
pub const EXIT_RUNTIME: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "coaw",
    version,
    about = "Cuckoo optimization with weighted-sum scalarization"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run the full weighted-sum COA procedure from a config file.
    Run {
        #[arg(long)]
        config: PathBuf,
    },
    /// Write the brute-force grid reference front of a built-in problem.
    Oracle {
        #[arg(long)]
        problem: String,
        #[arg(long, default_value_t = 801)]
        resolution: usize,
        #[arg(long, default_value_t = DEFAULT_BOX_EXTENT)]
        box_extent: f64,
        #[arg(long, default_value = ".")]
        out_dir: PathBuf,
    },
    /// Recompute front metrics from two front CSV files.
    Metrics {
        #[arg(long)]
        front: PathBuf,
        #[arg(long)]
        reference: PathBuf,
    },
}

fn execute(command: Command, out: &mut dyn Write) -> Result<()> {
    match command {
        Command::Run { config } => {
            let cfg = RunConfig::from_file(&config).map_err(|e| match e {
                // a missing config file is a configuration problem
                Error::Io { path, source } => {
                    Error::ConfigValue(format!("cannot read {}: {source}", path.display()))
                }
                other => other,
            })?;
            let report = run_coaw(&cfg)?;
            let files = write_outputs(&report, &cfg)?;
            let _ = writeln!(
                out,
                "problem {}: {} front points, generational_distance {}, extreme_error {}, {:.3}s",
                report.problem_id,
                report.archive.len(),
                report.metrics.generational_distance,
                report.metrics.extreme_error,
                report.runtime_seconds
            );
            for f in files {
                let _ = writeln!(out, "wrote {}", f.display());
            }
        }
        Command::Oracle {
            problem,
            resolution,
            box_extent,
            out_dir,
        } => {
            let spec = builtin_with_extent(&problem, box_extent)?;
            let cfg = OracleConfig { resolution };
            if resolution < 2 {
                return Err(Error::InvalidParams(format!(
                    "resolution must be at least 2, got {resolution}"
                )));
            }
            let front = grid_reference_front(&spec, &cfg)?;
            let rows = FrontRows::new(front.into_iter().map(|p| (p.x, p.f)).collect());
            let csv = rows.to_csv_string(spec.dim(), spec.n_obj())?;
            std::fs::create_dir_all(&out_dir).map_err(|e| Error::io(&out_dir, e))?;
            let path = out_dir.join(ORACLE_CSV);
            std::fs::write(&path, csv).map_err(|e| Error::io(&path, e))?;
            let _ = writeln!(out, "wrote {} ({} points)", path.display(), rows.rows.len());
        }
        Command::Metrics { front, reference } => {
            let a = FrontRows::read_csv(&front)?.objectives();
            let b = FrontRows::read_csv(&reference)?.objectives();
            let m = front_metrics(&a, &b)?;
            let _ = writeln!(out, "{}", serde_json::to_string_pretty(&m)?);
        }
    }
    Ok(())
}

/// Parses `args` (including the program name) and runs the subcommand.
pub fn run_cli<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
            let _ = if e.use_stderr() {
                write!(err, "{e}")
            } else {
                write!(out, "{e}")
            };
            return code;
        }
    };
    match execute(cli.command, out) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            if e.is_config() {
                EXIT_CONFIG
            } else {
                EXIT_RUNTIME
            }
        }
    }
}
