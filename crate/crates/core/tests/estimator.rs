//! End-to-end estimator and tuner behavior on generated scenarios.

use kdsos::estimator::{aggregate, cluster_time_point, kd_sos_with, KernelSpec, SeriesAggregator};
use kdsos::exec::Execution;
use kdsos::experiment::mean_hamming;
use kdsos::model::hamming_error;
use kdsos::rng::derive_seed;
use kdsos::simulator::{build_probability_matrix, sample_network, ConnectivitySchedule, Process, REFERENCE_B_EVEN};
use kdsos::tuner::{split_score_at, tune_bandwidth};
use kdsos::{generate_scenario, kd_sos, Adjacency, AdjacencySeries, ScenarioConfig};

fn static_scenario(n: usize, time_points: usize, rho: f64, b: Vec<Vec<f64>>, sizes: Vec<usize>, seed: u64) -> ScenarioConfig {
    ScenarioConfig {
        n,
        k: sizes.len(),
        time_points,
        gamma: 0.0,
        rho,
        process: Process::Bernoulli,
        transition: None,
        initial_sizes: sizes,
        connectivity: ConnectivitySchedule::constant(b),
        seed,
    }
}

#[test]
fn noiseless_recovery() {
    let b = vec![vec![0.9, 0.1, 0.1], vec![0.1, 0.9, 0.1], vec![0.1, 0.1, 0.9]];
    let config = static_scenario(60, 5, 1.0, b, vec![20, 20, 20], 3);
    let (series, truth) = generate_scenario(&config).unwrap();
    let est = kd_sos(&series, 3, &KernelSpec::boxcar(0.4), 9).unwrap();
    assert_eq!(mean_hamming(&est, &truth.memberships).unwrap(), 0.0);
    assert!(est.alignable);
    assert!((1..5).all(|t| est.aligned.row(t) == est.aligned.row(0)));
}

#[test]
fn heterophilic_connectivity_is_recovered() {
    let b: Vec<Vec<f64>> = REFERENCE_B_EVEN.iter().map(|r| r.to_vec()).collect();
    let mut total = 0.0;
    for seed in 0..5 {
        let config = static_scenario(300, 20, 0.8, b.clone(), vec![120, 30, 150], derive_seed(21, &[seed]));
        let (series, truth) = generate_scenario(&config).unwrap();
        let est = kd_sos(&series, 3, &KernelSpec::all(), seed).unwrap();
        total += mean_hamming(&est, &truth.memberships).unwrap();
    }
    assert!(total / 5.0 < 0.05, "mean Hamming {}", total / 5.0);
}

#[test]
fn singleton_matches_per_snapshot_clustering_and_alignment_only_relabels() {
    let config = ScenarioConfig::reference(0.05, 0.5, 4).unwrap().with_nodes(80);
    let config = ScenarioConfig { time_points: 6, ..config };
    let (series, _) = generate_scenario(&config).unwrap();
    let seed = 17;
    let est = kd_sos(&series, 3, &KernelSpec::singleton(), seed).unwrap();
    for t in 0..series.len() {
        let z = aggregate(&series, t, &KernelSpec::singleton()).unwrap();
        let labels = cluster_time_point(&z, 3, derive_seed(seed, &[kdsos::rng::STREAM_CLUSTER, t as u64])).unwrap();
        assert_eq!(est.raw[t], labels);
        assert_eq!(hamming_error(est.aligned.row(t), &est.raw[t], 3).unwrap(), 0.0);
    }
    let agg = SeriesAggregator::new(&series);
    let seq = kd_sos_with(&agg, 3, &KernelSpec::all(), seed, Execution::Sequential).unwrap();
    let par = kd_sos_with(&agg, 3, &KernelSpec::all(), seed, Execution::Parallel).unwrap();
    assert_eq!(seq.aligned, par.aligned);
}

/// Two communities whose split changes completely halfway through.
fn two_regime_series(seed: u64) -> (AdjacencySeries, usize) {
    let n = 60;
    let first: Vec<usize> = (0..n).map(|i| if i < n / 2 { 1 } else { 2 }).collect();
    let second: Vec<usize> = (0..n).map(|i| if i % 2 == 0 { 1 } else { 2 }).collect();
    let b = vec![vec![0.9, 0.1], vec![0.1, 0.9]];
    let time_points = 50;
    let change = 25;
    let snapshots: Vec<Adjacency> = (0..time_points)
        .map(|t| {
            let labels = if t < change { &first } else { &second };
            let (_, p) = build_probability_matrix(labels, &b, 1.0).unwrap();
            sample_network(p.as_ref(), derive_seed(seed, &[t as u64])).unwrap()
        })
        .collect();
    (AdjacencySeries::new(snapshots).unwrap(), change)
}

#[test]
fn regime_change_peaks_the_split_score() {
    let (series, change) = two_regime_series(31);
    let scores: Vec<(usize, f64)> = (0..series.len())
        .filter_map(|t| split_score_at(&series, t, 0.02, 2, 2.0).unwrap().map(|s| (t, s)))
        .collect();
    let (argmax, _) = scores.iter().copied().fold((0, f64::MIN), |b, x| if x.1 > b.1 { x } else { b });
    assert!(argmax.abs_diff(change) <= 1, "peak at {argmax}");
    let table = tune_bandwidth(&series, &[0.02, 0.1], 2, 2.0).unwrap();
    assert_eq!(table.chosen, 0.02, "{:?}", table.scores);
}

#[test]
fn score_decreases_with_bandwidth_on_static_data() {
    let b = vec![vec![0.6, 0.3], vec![0.3, 0.6]];
    let time_points = 30;
    let grid: Vec<f64> = (1..=8).map(|s| s as f64 / time_points as f64).collect();
    let mut mean = vec![0.0; grid.len()];
    let seeds = 25;
    for seed in 0..seeds {
        let config = static_scenario(60, time_points, 0.5, b.clone(), vec![30, 30], derive_seed(41, &[seed]));
        let (series, _) = generate_scenario(&config).unwrap();
        let table = tune_bandwidth(&series, &grid, 2, 2.0).unwrap();
        for (m, s) in mean.iter_mut().zip(&table.scores) {
            *m += s.unwrap() / seeds as f64;
        }
    }
    assert!(mean.windows(2).all(|w| w[1] <= w[0]), "{mean:?}");
}
