use coaw::coa::{
    detect_and_destroy, enforce_capacity, kmeans_cluster, run_single_coa_observed, CoaParams,
    Habitat, Stage,
};
use coaw::pareto::{dominates, pareto_filter, ParetoArchive};
use coaw::problems::{get_builtin, EvalResult};
use coaw::scalarization::{penalized_cost, sample_weights, ScalarizerConfig};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn hab(x: Vec<f64>, cost: f64) -> Habitat {
    Habitat {
        eval: EvalResult {
            objectives: x.clone(),
            violations: vec![],
            total_violation: 0.0,
        },
        x,
        cost,
        n_eggs: 0,
    }
}

#[test]
fn engine_invariants_over_seeded_runs() {
    let scal = ScalarizerConfig::default();
    let params = CoaParams::default();
    let mut checked_runs = 0;
    for id in ["p1", "p2", "p3"] {
        let problem = get_builtin(id).unwrap();
        for seed in 0..40u64 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let w = sample_weights(2, &mut rng).unwrap();
            let mut violations = Vec::new();
            let out = run_single_coa_observed(
                &problem,
                &w,
                &params,
                &scal,
                &mut rng,
                |it, stage, pop| {
                    for h in pop {
                        if !problem.contains(&h.x) {
                            violations.push(format!(
                                "{id}/{seed} iter {it} {stage:?}: {:?} outside box",
                                h.x
                            ));
                        }
                        if h.cost != penalized_cost(&h.eval, &w, &scal).unwrap() {
                            violations.push(format!("{id}/{seed}: stale cost"));
                        }
                    }
                    if stage == Stage::CapacityEnforced && pop.len() > params.max_cuckoos {
                        violations.push(format!(
                            "{id}/{seed}: population {} over capacity",
                            pop.len()
                        ));
                    }
                },
            )
            .unwrap();
            assert!(violations.is_empty(), "{violations:?}");
            assert!(
                out.trace.windows(2).all(|t| t[1] <= t[0]),
                "{id}/{seed} trace increased"
            );
            assert!(problem.contains(&out.best.x));
            checked_runs += 1;
        }
    }
    assert!(checked_runs >= 100);
}

#[test]
fn archive_stays_nondominated_over_random_inserts() {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let mut archive = ParetoArchive::new();
    for i in 0..10_000 {
        // coarse values so duplicates and ties actually occur
        let f = vec![
            (rng.random_range(0..200) as f64) / 10.0,
            (rng.random_range(0..200) as f64) / 10.0,
        ];
        let feasible = rng.random_bool(0.9);
        archive.insert(vec![i as f64], f, feasible);
        let e = archive.entries();
        for a in e {
            for b in e {
                assert!(!dominates(&a.f, &b.f).unwrap());
            }
        }
        for (i, a) in e.iter().enumerate() {
            assert!(e[i + 1..].iter().all(|b| b.f != a.f));
        }
    }
}

#[test]
fn archive_matches_filter_of_all_feasible_inserts() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let pts: Vec<Vec<f64>> = (0..300)
        .map(|_| {
            vec![
                rng.random_range(0..30) as f64,
                rng.random_range(0..30) as f64,
            ]
        })
        .collect();
    let mut archive = ParetoArchive::new();
    for p in &pts {
        archive.insert(p.clone(), p.clone(), true);
    }
    let mut expected: Vec<Vec<f64>> = pareto_filter(&pts)
        .into_iter()
        .map(|i| pts[i].clone())
        .collect();
    let mut got = archive.objectives();
    expected.sort_by(|a, b| a.partial_cmp(b).unwrap());
    got.sort_by(|a, b| a.partial_cmp(b).unwrap());
    assert_eq!(got, expected);
}

/// Best sum of squared distances to cluster means over all 2-partitions.
fn best_two_partition(points: &[Vec<f64>]) -> (f64, Vec<usize>) {
    let n = points.len();
    let sse = |mask: u32, side: u32| -> f64 {
        let members: Vec<&Vec<f64>> = (0..n)
            .filter(|i| (mask >> i) & 1 == side)
            .map(|i| &points[i])
            .collect();
        let m = members.len() as f64;
        let mean: Vec<f64> = (0..2)
            .map(|d| members.iter().map(|p| p[d]).sum::<f64>() / m)
            .collect();
        members
            .iter()
            .map(|p| (p[0] - mean[0]).powi(2) + (p[1] - mean[1]).powi(2))
            .sum()
    };
    let mut best = (f64::INFINITY, vec![]);
    for mask in 1..(1u32 << n) - 1 {
        let total = sse(mask, 0) + sse(mask, 1);
        if total < best.0 {
            best = (total, (0..n).map(|i| ((mask >> i) & 1) as usize).collect());
        }
    }
    best
}

fn same_partition(a: &[usize], b: &[usize]) -> bool {
    a.iter().zip(b).all(|(x, y)| (x == y) == (a[0] == b[0]))
}

#[test]
fn kmeans_two_blobs_matches_partition_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for trial in 0..50 {
        let n = rng.random_range(4..=8);
        let points: Vec<Vec<f64>> = (0..n)
            .map(|i| {
                let c = if i % 2 == 0 { 0.0 } else { 10.0 };
                vec![
                    c + rng.random_range(-1.0..1.0),
                    c + rng.random_range(-1.0..1.0),
                ]
            })
            .collect();
        let pop: Vec<Habitat> = points
            .iter()
            .enumerate()
            .map(|(i, p)| hab(p.clone(), i as f64))
            .collect();
        let (_, oracle) = best_two_partition(&points);
        let got = kmeans_cluster(&pop, 2, &mut rng).unwrap();
        assert!(
            same_partition(&got.assignment, &oracle),
            "trial {trial}: {:?} vs {oracle:?}",
            got.assignment
        );
        // goal: best habitat of the cluster with lower mean cost
        let goal_cluster = got.assignment[got.goal_index];
        assert_eq!(goal_cluster, got.best_cluster);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn kmeans_k1_centroid_is_mean(pts in proptest::collection::vec((-4.0f64..4.0, -4.0f64..4.0), 1..15), seed: u64) {
        let pop: Vec<Habitat> = pts.iter().map(|(a, b)| hab(vec![*a, *b], a + b)).collect();
        let c = kmeans_cluster(&pop, 1, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap();
        let n = pts.len() as f64;
        let mean = vec![
            pts.iter().map(|p| p.0).sum::<f64>() / n,
            pts.iter().map(|p| p.1).sum::<f64>() / n,
        ];
        prop_assert_eq!(&c.centroids[0], &mean);
        let best = pop.iter().map(|h| h.cost).fold(f64::INFINITY, f64::min);
        prop_assert_eq!(pop[c.goal_index].cost, best);
    }

    #[test]
    fn capacity_never_grows_or_drops_better(costs in proptest::collection::vec(-10i32..10, 1..25), cap in 1usize..15) {
        let pop: Vec<Habitat> = costs.iter().enumerate().map(|(i, c)| hab(vec![i as f64, 0.0], *c as f64)).collect();
        let params = CoaParams { max_cuckoos: cap, ..CoaParams::default() };
        let kept = enforce_capacity(pop.clone(), &params);
        prop_assert!(kept.len() <= pop.len());
        prop_assert_eq!(kept.len(), pop.len().min(cap));
        let worst_kept = kept.iter().map(|h| h.cost).fold(f64::NEG_INFINITY, f64::max);
        for h in &pop {
            if !kept.contains(h) {
                prop_assert!(h.cost >= worst_kept);
            }
        }
    }

    #[test]
    fn detection_is_idempotent(
        eggs in proptest::collection::vec((0u8..20, 0u8..20), 0..40),
        habs in proptest::collection::vec((0u8..20, 0u8..20), 0..5),
    ) {
        let p = get_builtin("p1").unwrap();
        let params = CoaParams { detection_epsilon_frac: 0.01, ..CoaParams::default() };
        let to_x = |(a, b): &(u8, u8)| vec![*a as f64 / 5.0, *b as f64 / 5.0];
        let existing: Vec<Habitat> = habs.iter().map(|h| hab(to_x(h), 0.0)).collect();
        let once = detect_and_destroy(eggs.iter().map(to_x).collect(), &existing, &params, &p);
        let twice = detect_and_destroy(once.clone(), &existing, &params, &p);
        prop_assert_eq!(once, twice);
    }
}
