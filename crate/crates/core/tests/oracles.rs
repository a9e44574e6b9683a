//! Statistical checks of the estimators against simulation.

use cpmine::oracle::{empirical_z_distribution, exhaustive_ind_moments, mean_std};
use cpmine::{
    column_orders, combine, copula_cdf, estimate_block, gen_planted, ind_model, support, Itemset,
    PlantSpec,
};
use rayon::prelude::*;

fn set(items: &[usize]) -> Itemset {
    Itemset::new(items.to_vec()).unwrap()
}

/// Dataset with columns `0..size` planted as one dependent block and the
/// remaining columns independent.
fn dependent(n: usize, k: usize, size: usize, seed: u64) -> cpmine::Dataset {
    let spec = PlantSpec {
        clusters: vec![Itemset::new((0..size).collect()).unwrap()],
        membership_prob: 0.4,
        plant_value: 0.5,
        seed,
    };
    gen_planted(n, k, &spec).unwrap().data
}

#[test]
fn block_beta_matches_simulated_variance() {
    let (n, reps) = (2000, 400);
    for size in [2, 3] {
        let block = Itemset::new((0..size).collect()).unwrap();
        let runs: Vec<(f64, f64)> = (0..reps)
            .into_par_iter()
            .map(|r| {
                let data = dependent(n, size, size, 77 + r as u64);
                let cdf = copula_cdf(&data).unwrap();
                let stats = estimate_block(&cdf, &column_orders(&data), &block).unwrap();
                ((n as f64).sqrt() * stats.mu, stats.beta)
            })
            .collect();
        let (_, sd) = mean_std(&runs.iter().map(|r| r.0).collect::<Vec<_>>());
        let (beta, _) = mean_std(&runs.iter().map(|r| r.1).collect::<Vec<_>>());
        let empirical = sd * sd;
        let rel = (beta - empirical).abs() / empirical;
        assert!(rel <= 0.2, "size {size}: beta {beta} vs simulated {empirical}");
    }
}

#[test]
fn z_at_true_partition_is_standardised() {
    let (n, reps) = (1500, 300);
    let x = set(&[0, 1, 2]);
    let zs: Vec<f64> = (0..reps)
        .into_par_iter()
        .map(|r| {
            let data = dependent(n, 3, 2, 5000 + r as u64);
            let cdf = copula_cdf(&data).unwrap();
            let orders = column_orders(&data);
            let blocks = [set(&[0, 1]), set(&[2])]
                .map(|b| estimate_block(&cdf, &orders, &b).unwrap());
            let (mu, var) = combine(&blocks).unwrap();
            let cp = support(&cdf, &x).unwrap();
            (n as f64).sqrt() * (cp - mu) / var.sqrt()
        })
        .collect();
    let (mean, sd) = mean_std(&zs);
    assert!(mean.abs() <= 0.25, "mean {mean}");
    assert!((0.8..=1.2).contains(&sd), "sd {sd}");
}

#[test]
fn normality_of_z_ind_for_triples() {
    let (mean, sd) = empirical_z_distribution(500, 1000, 3, 31).unwrap();
    assert!(mean.abs() <= 0.2, "mean {mean}");
    assert!((0.8..=1.2).contains(&sd), "sd {sd}");
}

#[test]
fn exhaustive_moments_beyond_acceptance_sizes() {
    for (n, m) in [(6, 2), (7, 2), (3, 4), (4, 3)] {
        let (mean, var) = exhaustive_ind_moments(n, m).unwrap();
        let model = ind_model(m, n).unwrap();
        assert!((mean - model.mu).abs() <= 1e-10, "n={n} m={m}");
        assert!((var - model.var_sqrt_n).abs() <= 1e-10, "n={n} m={m}: {var} vs {}", model.var_sqrt_n);
    }
}
