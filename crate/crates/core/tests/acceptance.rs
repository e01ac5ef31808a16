//! Acceptance criteria. Every criterion prints one PASS/FAIL line; the test
//! fails if any criterion fails.
//!
//! Run with `cargo test -p coaw --test acceptance -- --nocapture`.

use std::fs;
use std::path::Path;

use coaw::cli::run_cli;
use coaw::coa::{run_single_coa_observed, CoaParams, Stage};
use coaw::oracle::{analytic_front_p3, grid_reference_front, OracleConfig};
use coaw::output::{write_outputs, FRONT_CSV, METRICS_JSON};
use coaw::pareto::{
    dominates, generational_distance, objective_best, pareto_filter, ParetoArchive,
};
use coaw::problems::get_builtin;
use coaw::runner::{assemble_report, run_coaw, run_weight_sample, RunConfig, RunReport};
use coaw::scalarization::{sample_weights, ScalarizerConfig};
use coaw::Execution;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

const ENDPOINT_TOLERANCE: f64 = 0.15;
const GD_TOLERANCE: f64 = 0.05;
const LOW_POPULATION_GD_TOLERANCE: f64 = 0.1;

fn check(cond: bool, detail: String) -> Outcome {
    if cond {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn dist(a: &[f64], b: &[f64]) -> f64 {
    (a[0] - b[0]).hypot(a[1] - b[1])
}

fn run(problem: &str, samples: usize) -> RunReport {
    let config = RunConfig {
        problem_id: problem.into(),
        n_weight_samples: samples,
        master_seed: 42,
        ..RunConfig::default()
    };
    run_coaw(&config).expect("run succeeds")
}

fn oracle_objectives(report: &RunReport) -> Vec<Vec<f64>> {
    report.oracle_front.iter().map(|p| p.f.clone()).collect()
}

fn endpoints(objs: &[Vec<f64>]) -> (Vec<f64>, Vec<f64>) {
    (
        objective_best(objs, 0).unwrap().to_vec(),
        objective_best(objs, 1).unwrap().to_vec(),
    )
}

fn all_feasible(report: &RunReport, problem: &str) -> bool {
    let p = get_builtin(problem).unwrap();
    report
        .archive
        .entries()
        .iter()
        .all(|e| p.evaluate(&e.x).unwrap().is_feasible())
}

fn criterion_1(p1: &RunReport) -> Outcome {
    let (lo, hi) = endpoints(&p1.archive.objectives());
    let (d0, d1) = (dist(&lo, &[0.0, 2.0]), dist(&hi, &[2.0, 0.0]));
    // cross-check the analytic extremes against the grid oracle
    let (olo, ohi) = endpoints(&oracle_objectives(p1));
    check(
        d0 <= ENDPOINT_TOLERANCE
            && d1 <= ENDPOINT_TOLERANCE
            && olo == [0.0, 2.0]
            && ohi == [2.0, 0.0],
        format!("f1-best {lo:?} at {d0:.4}, f2-best {hi:?} at {d1:.4} (tol {ENDPOINT_TOLERANCE})"),
    )
}

fn criterion_2(p1: &RunReport) -> Outcome {
    let gd = generational_distance(&p1.archive.objectives(), &oracle_objectives(p1));
    let n = p1.archive.len();
    check(
        gd <= GD_TOLERANCE && n >= 20 && all_feasible(p1, "p1"),
        format!("GD {gd:.5} (tol {GD_TOLERANCE}), {n} distinct points (min 20)"),
    )
}

fn criterion_3(p3: &RunReport) -> Outcome {
    let front = p3.archive.objectives();
    let gd = generational_distance(&front, &analytic_front_p3(1000).unwrap());
    let (lo, hi) = endpoints(&front);
    let (d0, d1) = (dist(&lo, &[-1.0, 2.0]), dist(&hi, &[1.0, -2.0]));
    check(
        gd <= GD_TOLERANCE
            && d0 <= ENDPOINT_TOLERANCE
            && d1 <= ENDPOINT_TOLERANCE
            && all_feasible(p3, "p3"),
        format!(
            "GD vs analytic {gd:.5}, endpoints at {d0:.4} and {d1:.4}, {} points",
            front.len()
        ),
    )
}

fn criterion_4(p2: &RunReport) -> Outcome {
    let oracle = oracle_objectives(p2);
    let gd = generational_distance(&p2.archive.objectives(), &oracle);
    check(
        gd <= GD_TOLERANCE && all_feasible(p2, "p2"),
        format!(
            "GD {gd:.3e} vs {}-point oracle front {:?}",
            oracle.len(),
            oracle.first()
        ),
    )
}

const DEFAULT_CONFIG_GOLDEN: &str = "\
problem_id = p1
box_extent = 4
n_weight_samples = 50
master_seed = 42
output_dir = out
emit_plot_data = false
record_runtime = false
coa.initial_population = 5
coa.min_eggs = 2
coa.max_eggs = 4
coa.max_iterations = 50
coa.n_clusters = 1
coa.lambda_max = 5
coa.egg_laying_alpha = 5
coa.max_cuckoos = 10
coa.pop_variance_stop = 1e-13
coa.accuracy_stop = none
coa.detection_epsilon_frac = 1e-6
scalarizer.penalty_coefficient = 1e6
scalarizer.normalize = false
oracle.resolution = 801
";

fn criterion_5() -> Outcome {
    let cfg = RunConfig::default();
    let c = &cfg.coa;
    let fields_ok = c.initial_population == 5
        && c.min_eggs == 2
        && c.max_eggs == 4
        && c.max_iterations == 50
        && c.n_clusters == 1
        && c.lambda_max == 5.0
        && c.egg_laying_alpha == 5.0
        && c.max_cuckoos == 10
        && c.pop_variance_stop == 1e-13;
    let dump = cfg.dump();
    check(
        fields_ok && dump == DEFAULT_CONFIG_GOLDEN,
        if dump == DEFAULT_CONFIG_GOLDEN {
            "default config dump matches golden".into()
        } else {
            format!("dump differs:\n{dump}")
        },
    )
}

fn brute_force_filter(points: &[Vec<f64>]) -> Vec<usize> {
    (0..points.len())
        .filter(|&i| {
            !(0..points.len()).any(|j| {
                dominates(&points[j], &points[i]).unwrap() || (j < i && points[j] == points[i])
            })
        })
        .collect()
}

fn criterion_6() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut mismatches = 0;
    for set in 0..1000 {
        let n = rng.random_range(1..=500);
        let m = if set % 4 == 3 { 3 } else { 2 };
        // half the sets on a coarse lattice to force ties and duplicates
        let coarse = set % 2 == 0;
        let pts: Vec<Vec<f64>> = (0..n)
            .map(|_| {
                (0..m)
                    .map(|_| {
                        if coarse {
                            rng.random_range(0..25) as f64
                        } else {
                            rng.random_range(-1.0..1.0)
                        }
                    })
                    .collect()
            })
            .collect();
        if pareto_filter(&pts) != brute_force_filter(&pts) {
            mismatches += 1;
        }
    }
    let mut bad_triples = 0;
    for _ in 0..100_000 {
        let mut p = || -> Vec<f64> { (0..2).map(|_| rng.random_range(0..4) as f64).collect() };
        let (a, b, c) = (p(), p(), p());
        let ab = dominates(&a, &b).unwrap();
        let ba = dominates(&b, &a).unwrap();
        let bc = dominates(&b, &c).unwrap();
        let ac = dominates(&a, &c).unwrap();
        if dominates(&a, &a).unwrap() || (ab && ba) || (ab && bc && !ac) {
            bad_triples += 1;
        }
    }
    check(
        mismatches == 0 && bad_triples == 0,
        format!("{mismatches}/1000 filter mismatches, {bad_triples}/100000 dominance violations"),
    )
}

fn run_cli_in(dir: &Path) -> (Vec<u8>, Vec<u8>) {
    let cfg = dir.join("run.cfg");
    fs::write(
        &cfg,
        format!(
            "problem_id = p1\nmaster_seed = 42\noutput_dir = {}\n",
            dir.join("out").display()
        ),
    )
    .unwrap();
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = run_cli(
        ["coaw", "run", "--config", cfg.to_str().unwrap()],
        &mut out,
        &mut err,
    );
    assert_eq!(code, 0, "{}", String::from_utf8_lossy(&err));
    (
        fs::read(dir.join("out").join(FRONT_CSV)).unwrap(),
        fs::read(dir.join("out").join(METRICS_JSON)).unwrap(),
    )
}

fn criterion_7() -> Outcome {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let first = run_cli_in(a.path());
    let second = run_cli_in(b.path());
    let repeat_ok = first == second;

    // same config, samples executed in a shuffled order
    let c = tempfile::tempdir().unwrap();
    let config = RunConfig {
        problem_id: "p1".into(),
        master_seed: 42,
        output_dir: c.path().join("out"),
        ..RunConfig::default()
    };
    let problem = config.problem().unwrap();
    let mut order: Vec<usize> = (0..config.n_weight_samples).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(7));
    let outcomes = order
        .iter()
        .map(|&k| run_weight_sample(&config, &problem, k).unwrap())
        .collect();
    let report = assemble_report(&config, &problem, outcomes, Execution::Sequential).unwrap();
    write_outputs(&report, &config).unwrap();
    let permuted = (
        fs::read(config.output_dir.join(FRONT_CSV)).unwrap(),
        fs::read(config.output_dir.join(METRICS_JSON)).unwrap(),
    );
    let permuted_ok = permuted == first;
    check(
        repeat_ok && permuted_ok,
        format!(
            "repeat identical: {repeat_ok}, shuffled order identical: {permuted_ok} ({} + {} bytes)",
            first.0.len(),
            first.1.len()
        ),
    )
}

fn criterion_8() -> Outcome {
    let params = CoaParams::default();
    let scal = ScalarizerConfig::default();
    let mut runs = 0;
    let mut box_violations = 0;
    let mut trace_violations = 0;
    let mut archive_violations = 0;
    for id in ["p1", "p2", "p3"] {
        let problem = get_builtin(id).unwrap();
        let mut archive = ParetoArchive::new();
        for seed in 0..40u64 {
            let mut rng = ChaCha8Rng::seed_from_u64(1000 + seed);
            let w = sample_weights(2, &mut rng).unwrap();
            let out = run_single_coa_observed(
                &problem,
                &w,
                &params,
                &scal,
                &mut rng,
                |_, _: Stage, pop| {
                    box_violations += pop.iter().filter(|h| !problem.contains(&h.x)).count();
                },
            )
            .unwrap();
            if !problem.contains(&out.best.x) {
                box_violations += 1;
            }
            trace_violations += out.trace.windows(2).filter(|t| t[1] > t[0]).count();
            for h in std::iter::once(&out.best).chain(&out.population) {
                archive.insert(h.x.clone(), h.eval.objectives.clone(), h.is_feasible());
                let e = archive.entries();
                for a in e {
                    if e.iter().any(|b| dominates(&a.f, &b.f).unwrap()) {
                        archive_violations += 1;
                    }
                }
            }
            runs += 1;
        }
    }
    check(
        runs >= 100 && box_violations + trace_violations + archive_violations == 0,
        format!(
            "{runs} runs: {box_violations} box, {trace_violations} trace, {archive_violations} archive violations"
        ),
    )
}

fn criterion_9() -> Outcome {
    let report = run("p1", 25);
    let gd = report.metrics.generational_distance;
    check(
        gd <= LOW_POPULATION_GD_TOLERANCE,
        format!("population 5, 25 weight samples: GD {gd:.5} (tol {LOW_POPULATION_GD_TOLERANCE})"),
    )
}

#[test]
fn acceptance_criteria() {
    let p1 = run("p1", 50);
    let p2 = run("p2", 50);
    let p3 = run("p3", 50);
    // reference fronts used by the report are the resolution-801 grid oracle
    assert_eq!(
        p1.oracle_front,
        grid_reference_front(
            &get_builtin("p1").unwrap(),
            &OracleConfig { resolution: 801 }
        )
        .unwrap()
    );

    let results: Vec<(&str, Outcome)> = vec![
        ("1 p1 endpoint identification", criterion_1(&p1)),
        ("2 p1 front accuracy", criterion_2(&p1)),
        ("3 p3 front accuracy", criterion_3(&p3)),
        ("4 p2 oracle agreement", criterion_4(&p2)),
        ("5 parameter fidelity", criterion_5()),
        ("6 filter/dominance oracle equivalence", criterion_6()),
        ("7 determinism", criterion_7()),
        ("8 engine invariants", criterion_8()),
        ("9 low-population front", criterion_9()),
    ];
    let mut failed = Vec::new();
    for (name, outcome) in &results {
        match outcome {
            Ok(detail) => println!("PASS  criterion {name}: {detail}"),
            Err(detail) => {
                println!("FAIL  criterion {name}: {detail}");
                failed.push(*name);
            }
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
