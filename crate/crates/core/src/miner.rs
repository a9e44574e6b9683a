//! Depth-first enumeration of frequent itemsets and their scoring.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::indstats::z_ind;
use crate::partstats::{z_part, BlockCache, Partition, ZPartOptions};
use crate::ranking::{truncation, CdfMatrix, ColumnOrder};
use crate::support::{is_frequent, support, Itemset, RowProducts};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MinerConfig {
    pub min_support: f64,
    /// `None` means unlimited.
    pub max_size: Option<usize>,
    /// Truncation level of the mining support.
    pub alpha: f64,
    pub zpart_cap: usize,
    pub two_sided: bool,
    pub score_ind: bool,
    pub score_part: bool,
}

impl Default for MinerConfig {
    fn default() -> Self {
        MinerConfig {
            min_support: 0.1,
            max_size: Some(8),
            alpha: 0.25,
            zpart_cap: 10,
            two_sided: false,
            score_ind: true,
            score_part: true,
        }
    }
}

impl MinerConfig {
    pub fn validate(&self, n: usize) -> Result<()> {
        if !(self.min_support > 0.0 && self.min_support <= 1.0) {
            return Err(Error::InvalidConfig(format!(
                "min support {} outside (0, 1]",
                self.min_support
            )));
        }
        if self.max_size == Some(0) {
            return Err(Error::InvalidConfig("max size must be at least 1".into()));
        }
        truncation(self.alpha, n)?;
        Ok(())
    }
}

/// A mined itemset and its scores.
#[derive(Debug, Clone, PartialEq)]
pub struct Pattern {
    pub itemset: Itemset,
    /// Support used for mining (truncated copula).
    pub support_alpha: f64,
    /// Plain copula support, filled by [`score`].
    pub support: Option<f64>,
    pub z_ind: Option<f64>,
    pub z_part: Option<f64>,
    pub best_partition: Option<Partition>,
    /// Why a score is missing, when it is missing for a reason other than
    /// size.
    pub note: Option<String>,
}

impl Pattern {
    pub fn new(itemset: Itemset, support_alpha: f64) -> Self {
        Pattern {
            itemset,
            support_alpha,
            support: None,
            z_ind: None,
            z_part: None,
            best_partition: None,
            note: None,
        }
    }
}

/// Every itemset `X` with `support(cdf_alpha, X) >= min_support` (see
/// [`is_frequent`]) and
/// `|X| <= max_size`, sorted lexicographically.
///
/// Prefix-tree DFS: a node keeps the row products of its frequent
/// extensions, and the children of `P ∪ {a}` are `P ∪ {a, b}` for frequent
/// siblings `b > a`. Top-level subtrees run in parallel on the current
/// rayon pool; the final sort makes the output independent of scheduling.
pub fn mine(cdf_alpha: &CdfMatrix, config: &MinerConfig) -> Result<Vec<Pattern>> {
    config.validate(cdf_alpha.n_rows())?;
    let max_size = config.max_size.unwrap_or(usize::MAX);
    let k = cdf_alpha.n_cols();
    let root = RowProducts::empty(cdf_alpha.n_rows());
    let singles: Vec<(usize, RowProducts)> = (0..k)
        .into_par_iter()
        .map(|j| (j, root.extend(cdf_alpha, j).expect("item in range")))
        .filter(|(_, p)| is_frequent(p.support(), config.min_support))
        .collect();

    let mut out: Vec<Pattern> = (0..singles.len())
        .into_par_iter()
        .flat_map_iter(|a| {
            let mut found = Vec::new();
            let (_, products) = &singles[a];
            found.push(Pattern::new(products.itemset().clone(), products.support()));
            if max_size > 1 {
                let siblings: Vec<usize> = singles[a + 1..].iter().map(|(j, _)| *j).collect();
                expand(cdf_alpha, products, &siblings, config.min_support, max_size, &mut found);
            }
            found
        })
        .collect();
    out.sort_by(|a, b| a.itemset.cmp(&b.itemset));
    Ok(out)
}

fn expand(
    cdf: &CdfMatrix,
    node: &RowProducts,
    candidates: &[usize],
    min_support: f64,
    max_size: usize,
    out: &mut Vec<Pattern>,
) {
    let frequent: Vec<(RowProducts, f64)> = candidates
        .iter()
        .map(|&j| node.extend(cdf, j).expect("candidate in range"))
        .map(|p| {
            let s = p.support();
            (p, s)
        })
        .filter(|(_, s)| is_frequent(*s, min_support))
        .collect();
    let depth = node.itemset().len() + 1;
    for (a, (child, s)) in frequent.iter().enumerate() {
        out.push(Pattern::new(child.itemset().clone(), *s));
        if depth < max_size && a + 1 < frequent.len() {
            let next: Vec<usize> =
                frequent[a + 1..].iter().map(|(p, _)| *p.itemset().items().last().unwrap()).collect();
            expand(cdf, child, &next, min_support, max_size, out);
        }
    }
}

/// Fills plain copula support, `z_ind` (size >= 2) and `z_part`
/// (`2 <= size <= zpart_cap`). Failures of `z_part` become notes on the
/// pattern.
pub fn score(
    mut patterns: Vec<Pattern>,
    cdf_plain: &CdfMatrix,
    orders: &ColumnOrder,
    config: &MinerConfig,
) -> Result<Vec<Pattern>> {
    let n = cdf_plain.n_rows();
    let cache = BlockCache::new();
    let opts = ZPartOptions { cap: config.zpart_cap, two_sided: config.two_sided };
    patterns.par_iter_mut().try_for_each(|p| -> Result<()> {
        let size = p.itemset.len();
        let cp = support(cdf_plain, &p.itemset)?;
        p.support = Some(cp);
        if size < 2 {
            return Ok(());
        }
        if config.score_ind {
            p.z_ind = Some(z_ind(cp, size, n)?);
        }
        if config.score_part && size <= config.zpart_cap {
            match z_part(cdf_plain, orders, &p.itemset, &cache, opts) {
                Ok(zp) => {
                    p.z_part = Some(zp.z());
                    p.best_partition = Some(zp.best.partition);
                    if zp.skipped > 0 {
                        p.note = Some(format!("{} partitions skipped", zp.skipped));
                    }
                }
                Err(Error::Degenerate(msg)) => p.note = Some(msg),
                Err(e) => return Err(e),
            }
        }
        Ok(())
    })?;
    Ok(patterns)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::{gen_independent, Dataset};
    use crate::ranking::{column_orders, copula_cdf, custom_cdf, truncated_cdf};

    fn config(min_support: f64) -> MinerConfig {
        MinerConfig { min_support, max_size: None, ..Default::default() }
    }

    #[test]
    fn singletons_all_frequent_at_half() {
        let d = gen_independent(50, 6, 3).unwrap();
        let cdf = copula_cdf(&d).unwrap();
        let out = mine(&cdf, &MinerConfig { max_size: Some(1), ..config(0.5) }).unwrap();
        assert_eq!(out.len(), 6);
        assert!(out.iter().all(|p| (p.support_alpha - 0.5).abs() < 1e-12));
    }

    #[test]
    fn threshold_one_keeps_only_all_ones_rows() {
        let d = gen_independent(50, 4, 3).unwrap();
        let cdf = copula_cdf(&d).unwrap();
        assert!(mine(&cdf, &config(1.0)).unwrap().is_empty());
        let mut cols = vec![vec![1.0; 5]; 3];
        cols.push(vec![1.0, 0.5, 1.0, 1.0, 1.0]);
        let custom = custom_cdf(cols).unwrap();
        let out = mine(&custom, &config(1.0)).unwrap();
        assert_eq!(out.len(), 7);
        assert!(out.iter().all(|p| !p.itemset.contains(3)));
    }

    #[test]
    fn invalid_configs() {
        let d = gen_independent(10, 3, 3).unwrap();
        let cdf = copula_cdf(&d).unwrap();
        assert!(mine(&cdf, &config(1.01)).is_err());
        assert!(mine(&cdf, &config(0.0)).is_err());
        assert!(mine(&cdf, &MinerConfig { max_size: Some(0), ..config(0.2) }).is_err());
        assert!(mine(&cdf, &MinerConfig { alpha: 0.5, ..config(0.2) }).is_err());
    }

    #[test]
    fn max_size_limits_depth() {
        let cdf = custom_cdf(vec![vec![1.0; 4]; 5]).unwrap();
        let out = mine(&cdf, &MinerConfig { max_size: Some(2), ..config(0.5) }).unwrap();
        assert_eq!(out.len(), 5 + 10);
        assert_eq!(mine(&cdf, &config(0.5)).unwrap().len(), 31);
    }

    #[test]
    fn output_is_sorted_and_closed() {
        let d = gen_independent(200, 9, 5).unwrap();
        let cdf = truncated_cdf(&d, 0.25).unwrap();
        let out = mine(&cdf, &config(0.12)).unwrap();
        assert!(out.windows(2).all(|w| w[0].itemset < w[1].itemset));
        let sets: std::collections::HashSet<_> = out.iter().map(|p| p.itemset.clone()).collect();
        for p in &out {
            for &j in p.itemset.items() {
                let sub = p.itemset.without(j);
                assert!(sub.is_empty() || sets.contains(&sub));
            }
        }
    }

    #[test]
    fn scoring_fills_fields_by_size() {
        let d = gen_independent(300, 5, 8).unwrap();
        let cdf = truncated_cdf(&d, 0.25).unwrap();
        let plain = copula_cdf(&d).unwrap();
        let cfg = MinerConfig { zpart_cap: 2, ..config(0.1) };
        let scored = score(mine(&cdf, &cfg).unwrap(), &plain, &column_orders(&d), &cfg).unwrap();
        for p in &scored {
            assert_eq!(p.support, Some(support(&plain, &p.itemset).unwrap()));
            match p.itemset.len() {
                1 => assert!(p.z_ind.is_none() && p.z_part.is_none()),
                2 => {
                    assert!(p.z_ind.is_some() && p.z_part.is_some());
                    assert_eq!(p.best_partition.as_ref().unwrap().len(), 2);
                }
                _ => assert!(p.z_ind.is_some() && p.z_part.is_none()),
            }
        }
    }

    #[test]
    fn worked_example_supports() {
        let d = Dataset::from_rows(
            &[
                vec![1.2, 4.5, 3.8, 8.9],
                vec![4.4, 4.7, 1.9, 8.8],
                vec![8.2, 8.5, 3.0, 6.5],
            ],
            None,
        )
        .unwrap();
        let cdf = copula_cdf(&d).unwrap();
        let out = mine(&cdf, &MinerConfig { alpha: 0.0, ..config(0.1) }).unwrap();
        let a23 = out.iter().find(|p| p.itemset.items() == [1, 2]).unwrap();
        assert!((a23.support_alpha - 1.0 / 6.0).abs() < 1e-15);
    }
}
