//! Seeded re-runs of the published experiments at desk scale: target
//! (1,1,7), population 20, 500 iterations, seeds 1..=10.

use ik_core::bench::{median, run_bench, BenchConfig};
use ik_core::{make_ik_problem, run, Algorithm, Position, RobotModel, RunConfig};
use std::path::PathBuf;

fn final_errors(alg: Algorithm) -> Vec<f64> {
    let problem = make_ik_problem(&RobotModel::default(), Position::new(1.0, 1.0, 7.0)).unwrap();
    (1..=10).map(|s| run(&problem, &RunConfig::with_seed(s), alg).unwrap().final_cost()).collect()
}

fn median_error(alg: Algorithm) -> f64 {
    median(&final_errors(alg))
}

#[test]
fn pso_median_below_1e_4() {
    let m = median_error(Algorithm::Pso);
    assert!(m <= 1e-4, "pso median {m:e}");
}

#[test]
fn cro_median_below_1() {
    let m = median_error(Algorithm::Cro);
    assert!(m <= 1.0, "cro median {m:e}");
}

#[test]
fn mvo_median_below_1e_2() {
    let m = median_error(Algorithm::Mvo);
    assert!(m <= 1e-2, "mvo median {m:e}");
}

#[test]
fn nro_median_below_1e_1() {
    let m = median_error(Algorithm::Nro);
    assert!(m <= 1e-1, "nro median {m:e}");
}

#[test]
#[ignore = "known miss: one offspring per iteration gives a median near 6e-2 cm; see RESULTS.md"]
fn efo_median_below_1e_4() {
    let m = median_error(Algorithm::Efo);
    assert!(m <= 1e-4, "efo median {m:e}");
}

#[test]
fn bes_zero_error_in_nine_of_ten_seeds() {
    let hits = final_errors(Algorithm::Bes).iter().filter(|e| **e <= 1e-12).count();
    assert!(hits >= 9, "{hits}/10");
}

#[test]
fn bes_median_is_lowest() {
    let bes = median_error(Algorithm::Bes);
    for a in Algorithm::ALL {
        assert!(bes <= median_error(a), "bes {bes:e} vs {a}");
    }
}

#[test]
fn bes_trace_ends_at_or_below_pso() {
    let problem = make_ik_problem(&RobotModel::default(), Position::new(1.0, 1.0, 7.0)).unwrap();
    let wins = (1..=10)
        .filter(|&s| {
            let config = RunConfig::with_seed(s);
            let bes = run(&problem, &config, Algorithm::Bes).unwrap();
            let pso = run(&problem, &config, Algorithm::Pso).unwrap();
            bes.best_cost_per_iteration.last() <= pso.best_cost_per_iteration.last()
        })
        .count();
    assert!(wins >= 8, "{wins}/10");
}

#[test]
#[ignore = "known miss: 7 of 100 BES runs stall, mostly with the base joint pinned at 0; see RESULTS.md"]
fn bes_zero_on_published_points() {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data/published_points.json");
    let mut config = BenchConfig::load(&path).unwrap();
    config.algorithms = vec![Algorithm::Bes];
    let report = run_bench(&config, 4).unwrap();
    let mean = report.aggregate(Algorithm::Bes).unwrap().mean_error;
    assert!(mean <= 1e-12, "bes mean {mean:e}");
}

#[test]
fn published_points_config_loads() {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data/published_points.json");
    let config = BenchConfig::load(&path).unwrap();
    assert_eq!(config.targets.len(), 10);
    assert_eq!(config.algorithms, Algorithm::ALL.to_vec());
}
