//! Independent reference computations used to check the fast paths:
//! Monte-Carlo threshold sampling, exhaustive moment enumeration,
//! brute-force mining and empirical `z_ind` distributions.
//!
//! Random streams come from ChaCha8 seeded with `seed_from_u64`; replicate
//! `r` of a run uses stream `r` of the run's seed, so results do not depend
//! on how replicates are scheduled across threads.

use itertools::Itertools;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::dataset::{gen_independent, Dataset};
use crate::error::{Error, Result};
use crate::indstats::z_ind;
use crate::miner::Pattern;
use crate::ranking::{copula_cdf, CdfMatrix};
use crate::support::{is_frequent, support, Itemset};

/// Sample mean of a Monte-Carlo estimate with its standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub samples: usize,
}

impl McEstimate {
    /// Whether `value` lies within `k` standard errors of the mean.
    pub fn covers(&self, value: f64, k: f64) -> bool {
        (self.mean - value).abs() <= k * self.std_error
    }
}

pub(crate) fn replicate_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Estimates copula support by binarising the data with random thresholds.
///
/// Per sample and item, a gap index `g` is drawn uniformly from `1..N`
/// and the threshold is placed just above the `g`-th smallest value; a cell
/// binarises to 1 when it is strictly greater than that order statistic.
/// The binary support of the itemset is then averaged over samples.
pub fn mc_threshold_support(
    data: &Dataset,
    x: &Itemset,
    samples: usize,
    seed: u64,
) -> Result<McEstimate> {
    if samples == 0 {
        return Err(Error::InvalidConfig("at least one sample is required".into()));
    }
    let n = data.n_rows();
    if let Some(&item) = x.items().iter().find(|&&j| j >= data.n_cols()) {
        return Err(Error::ItemOutOfRange { item, k: data.n_cols() });
    }
    let sorted: Vec<Vec<f64>> = x
        .items()
        .iter()
        .map(|&j| {
            let mut col = data.column(j).to_vec();
            col.sort_by(f64::total_cmp);
            col
        })
        .collect();
    let columns: Vec<&[f64]> = x.items().iter().map(|&j| data.column(j)).collect();

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut thresholds = vec![0.0; columns.len()];
    let mut sum = 0.0;
    let mut sum_sq = 0.0;
    for _ in 0..samples {
        for (t, s) in thresholds.iter_mut().zip(&sorted) {
            let gap = rng.gen_range(1..n);
            *t = s[gap - 1];
        }
        let covered = (0..n)
            .filter(|&i| columns.iter().zip(&thresholds).all(|(col, &t)| col[i] > t))
            .count();
        let supp = covered as f64 / n as f64;
        sum += supp;
        sum_sq += supp * supp;
    }
    let m = samples as f64;
    let mean = sum / m;
    let var = if samples > 1 { ((sum_sq - m * mean * mean) / (m - 1.0)).max(0.0) } else { 0.0 };
    Ok(McEstimate { mean, std_error: (var / m).sqrt(), samples })
}

/// Largest `(n!)^(m-1)` accepted by [`exhaustive_ind_moments`].
const MAX_CONFIGURATIONS: usize = 14_400;

/// Exact `E[U]` and `Var(sqrt(n) U)` of copula support under independence,
/// by enumerating every relative arrangement of `m` rank columns.
///
/// The first column is fixed to ranks `0..n`; each other column runs over
/// all `n!` permutations. Each configuration is equally likely when the
/// columns are independent and tie-free.
pub fn exhaustive_ind_moments(n: usize, m: usize) -> Result<(f64, f64)> {
    if n < 2 || m < 1 {
        return Err(Error::InvalidConfig(format!("invalid sizes n={n}, m={m}")));
    }
    let per_column: usize = (1..=n).product();
    let configs = (1..m).try_fold(1usize, |acc, _| acc.checked_mul(per_column));
    if !configs.is_some_and(|c| c <= MAX_CONFIGURATIONS) {
        return Err(Error::InvalidConfig(format!(
            "(n!)^(m-1) exceeds {MAX_CONFIGURATIONS} for n={n}, m={m}"
        )));
    }
    let ranks: Vec<f64> = (0..n).map(|i| i as f64 / (n - 1) as f64).collect();
    let perms: Vec<Vec<usize>> = (0..n).permutations(n).collect();

    let mut sum = 0.0;
    let mut sum_sq = 0.0;
    let mut count = 0usize;
    let others = std::iter::repeat_n(perms.iter(), m - 1).multi_cartesian_product();
    let mut visit = |choice: &[&Vec<usize>]| {
        let u = (0..n)
            .map(|i| choice.iter().fold(ranks[i], |acc, perm| acc * ranks[perm[i]]))
            .sum::<f64>()
            / n as f64;
        sum += u;
        sum_sq += u * u;
        count += 1;
    };
    if m == 1 {
        visit(&[]);
    } else {
        for choice in others {
            visit(&choice);
        }
    }
    let c = count as f64;
    let mean = sum / c;
    let var = n as f64 * (sum_sq / c - mean * mean);
    Ok((mean, var.max(0.0)))
}

/// Largest column count accepted by [`brute_force_mine`].
pub const BRUTE_FORCE_MAX_K: usize = 20;

/// Every non-empty itemset of size at most `max_size` whose support
/// reaches `min_support`, evaluated straight from the definition without
/// pruning. Sorted lexicographically.
pub fn brute_force_mine(cdf: &CdfMatrix, min_support: f64, max_size: usize) -> Result<Vec<Pattern>> {
    let k = cdf.n_cols();
    if k > BRUTE_FORCE_MAX_K {
        return Err(Error::InvalidConfig(format!(
            "brute force limited to {BRUTE_FORCE_MAX_K} columns, got {k}"
        )));
    }
    let n = cdf.n_rows();
    let mut out = Vec::new();
    for mask in 1u32..(1 << k) {
        if mask.count_ones() as usize > max_size {
            continue;
        }
        let items: Vec<usize> = (0..k).filter(|j| mask & (1 << j) != 0).collect();
        let total: f64 = (0..n)
            .map(|i| items.iter().map(|&j| cdf.get(i, j)).product::<f64>())
            .sum();
        let s = total / n as f64;
        if is_frequent(s, min_support) {
            out.push(Pattern::new(Itemset::new(items)?, s));
        }
    }
    out.sort_by(|a, b| a.itemset.cmp(&b.itemset));
    Ok(out)
}

/// Sample mean and standard deviation of `z_ind` of the full itemset over
/// `reps` independent `n x m` uniform datasets.
pub fn empirical_z_distribution(reps: usize, n: usize, m: usize, seed: u64) -> Result<(f64, f64)> {
    if reps < 2 {
        return Err(Error::InvalidConfig("need at least 2 replicates".into()));
    }
    let all = Itemset::new((0..m).collect())?;
    let zs = (0..reps)
        .into_par_iter()
        .map(|r| {
            let rep_seed = replicate_rng(seed, r as u64).gen::<u64>();
            let data = gen_independent(n, m, rep_seed)?;
            let cp = support(&copula_cdf(&data)?, &all)?;
            z_ind(cp, m, n)
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(mean_std(&zs))
}

/// Mean and sample standard deviation.
pub fn mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ranking::copula_cdf;

    fn example() -> Dataset {
        Dataset::from_rows(
            &[
                vec![1.2, 4.5, 3.8, 8.9],
                vec![4.4, 4.7, 1.9, 8.8],
                vec![8.2, 8.5, 3.0, 6.5],
            ],
            None,
        )
        .unwrap()
    }

    fn set(items: &[usize]) -> Itemset {
        Itemset::new(items.to_vec()).unwrap()
    }

    #[test]
    fn mc_worked_example() {
        let est = mc_threshold_support(&example(), &set(&[1, 2]), 100_000, 3).unwrap();
        assert!(est.covers(1.0 / 6.0, 4.0), "{est:?}");
        let single = mc_threshold_support(&example(), &set(&[0]), 100_000, 4).unwrap();
        assert!(single.covers(0.5, 4.0), "{single:?}");
    }

    #[test]
    fn mc_ties_follow_strict_counting() {
        let d = Dataset::from_columns(vec![vec![5.0, 5.0, 7.0, 6.0]], None).unwrap();
        let est = mc_threshold_support(&d, &set(&[0]), 50_000, 9).unwrap();
        let exact = support(&copula_cdf(&d).unwrap(), &set(&[0])).unwrap();
        assert!(est.covers(exact, 4.0), "{est:?} vs {exact}");
    }

    #[test]
    fn mc_is_deterministic() {
        let a = mc_threshold_support(&example(), &set(&[0, 3]), 1, 7).unwrap();
        let b = mc_threshold_support(&example(), &set(&[0, 3]), 1, 7).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.std_error, 0.0);
        assert!(mc_threshold_support(&example(), &set(&[0]), 0, 7).is_err());
    }

    #[test]
    fn exhaustive_n3_m2_by_hand() {
        let (mean, var) = exhaustive_ind_moments(3, 2).unwrap();
        // U values {1.25, 1, 1, 0.5, 0.5, 0.25} / 3
        let us = [1.25, 1.0, 1.0, 0.5, 0.5, 0.25].map(|u| u / 3.0);
        let m = us.iter().sum::<f64>() / 6.0;
        let v = 3.0 * (us.iter().map(|u| u * u).sum::<f64>() / 6.0 - m * m);
        assert!((mean - 0.25).abs() < 1e-15);
        assert!((var - 1.0 / 24.0).abs() < 1e-15);
        assert!((var - v).abs() < 1e-15);
    }

    #[test]
    fn exhaustive_singletons_and_bounds() {
        for n in 2..=8 {
            let (mean, var) = exhaustive_ind_moments(n, 1).unwrap();
            assert!((mean - 0.5).abs() < 1e-15);
            assert!(var.abs() < 1e-15);
        }
        assert!(exhaustive_ind_moments(6, 3).is_err());
        assert!(exhaustive_ind_moments(9, 2).is_err());
    }

    #[test]
    fn brute_force_small_cases() {
        let cdf = copula_cdf(&example()).unwrap();
        let cols3 = (0..3).map(|j| cdf.column(j).to_vec()).collect();
        let three = crate::ranking::custom_cdf(cols3).unwrap();
        assert_eq!(brute_force_mine(&three, 0.0, 3).unwrap().len(), 7);
        assert!(brute_force_mine(&three, 1.0 + 1e-9, 3).unwrap().is_empty());
        let wide = crate::ranking::custom_cdf(vec![vec![1.0, 1.0]; 21]).unwrap();
        assert!(brute_force_mine(&wide, 0.5, 2).is_err());
    }

    #[test]
    fn z_distribution_is_reproducible() {
        let a = empirical_z_distribution(2, 50, 2, 5).unwrap();
        let b = empirical_z_distribution(2, 50, 2, 5).unwrap();
        assert_eq!(a, b);
        assert!(empirical_z_distribution(1, 50, 2, 5).is_err());
    }
}
