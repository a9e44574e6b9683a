//! Partition-model normalisation.
//!
//! Under a partition `P_1, ..., P_L` of an itemset, items in different
//! blocks are assumed independent while dependence inside a block is left
//! arbitrary. Each block contributes three estimated statistics (mean
//! support, mean squared row product, asymptotic variance of
//! `sqrt(N) * support`), which combine into the mean and variance of the
//! whole itemset's support. `z_part` is the smallest standardised score over
//! all partitions with at least two blocks.

use std::collections::HashMap;
use std::fmt;
use std::sync::RwLock;

use crate::error::{Error, Result};
use crate::ranking::{CdfKind, CdfMatrix, ColumnOrder};
use crate::support::{mean, row_products, support, Itemset};

/// Disjoint non-empty blocks, sorted by smallest element.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Partition {
    blocks: Vec<Itemset>,
}

impl Partition {
    /// Canonicalises `blocks`. Emptiness and overlap are rejected; at least
    /// two blocks are required.
    pub fn new(mut blocks: Vec<Itemset>) -> Result<Self> {
        if blocks.len() < 2 {
            return Err(Error::InvalidConfig("a partition needs at least 2 blocks".into()));
        }
        if blocks.iter().any(Itemset::is_empty) {
            return Err(Error::InvalidConfig("empty partition block".into()));
        }
        blocks.sort_by_key(|b| b.items()[0]);
        let mut all: Vec<usize> = blocks.iter().flat_map(|b| b.items().iter().copied()).collect();
        all.sort_unstable();
        Itemset::new(all)?;
        Ok(Partition { blocks })
    }

    pub fn blocks(&self) -> &[Itemset] {
        &self.blocks
    }

    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    /// Union of all blocks.
    pub fn itemset(&self) -> Itemset {
        let items = self.blocks.iter().flat_map(|b| b.items().iter().copied()).collect();
        Itemset::from_unsorted(items).expect("blocks are disjoint")
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, b) in self.blocks.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "{b}")?;
        }
        Ok(())
    }
}

/// Restricted growth strings of length `n` in lexicographic order, skipping
/// the all-zero string (the one-block partition).
struct RestrictedGrowth {
    labels: Vec<usize>,
    done: bool,
}

impl RestrictedGrowth {
    fn new(n: usize) -> Self {
        RestrictedGrowth { labels: vec![0; n], done: n < 2 }
    }

    fn advance(&mut self) -> bool {
        let n = self.labels.len();
        for i in (1..n).rev() {
            let prefix_max = *self.labels[..i].iter().max().unwrap();
            if self.labels[i] <= prefix_max {
                self.labels[i] += 1;
                self.labels[i + 1..].fill(0);
                return true;
            }
        }
        false
    }

    /// Next labelling as block bitmasks over element positions.
    fn next_masks(&mut self) -> Option<Vec<u32>> {
        if self.done || !self.advance() {
            self.done = true;
            return None;
        }
        let blocks = self.labels.iter().max().unwrap() + 1;
        let mut masks = vec![0u32; blocks];
        for (pos, &label) in self.labels.iter().enumerate() {
            masks[label] |= 1 << pos;
        }
        Some(masks)
    }
}

fn mask_itemset(x: &Itemset, mask: u32) -> Itemset {
    let items = x
        .items()
        .iter()
        .enumerate()
        .filter(|(pos, _)| mask & (1 << pos) != 0)
        .map(|(_, &item)| item)
        .collect();
    Itemset::new(items).expect("subset of a sorted itemset")
}

/// Largest itemset whose partitions can be enumerated as bitmasks.
const MAX_PARTITION_ITEMS: usize = 20;

/// Every set partition of `x` into at least two blocks, each exactly once,
/// in canonical form. Yields `Bell(|x|) - 1` partitions.
pub fn enumerate_partitions(x: &Itemset) -> Result<impl Iterator<Item = Partition> + '_> {
    if x.len() < 2 {
        return Err(Error::InvalidConfig("partitions need an itemset of size >= 2".into()));
    }
    if x.len() > MAX_PARTITION_ITEMS {
        return Err(Error::PartitionCapExceeded { size: x.len(), cap: MAX_PARTITION_ITEMS });
    }
    let mut rgs = RestrictedGrowth::new(x.len());
    Ok(std::iter::from_fn(move || {
        rgs.next_masks().map(|masks| Partition {
            blocks: masks.into_iter().map(|m| mask_itemset(x, m)).collect(),
        })
    }))
}

/// Estimated statistics of one block.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockStats {
    pub block: Itemset,
    /// Copula support of the block.
    pub mu: f64,
    /// Mean squared row product.
    pub alpha: f64,
    /// Asymptotic variance of `sqrt(N) * support`.
    pub beta: f64,
}

/// Estimates `(mu, alpha, beta)` for `block` in `O(N |block|)`.
///
/// For each item `x` the rows are visited in descending-`x` order while a
/// running sum of the rank products of `block \ {x}` over strictly larger
/// rows is kept; `c[k][x]` is that sum at row `k` divided by `N - 1`. Then
///
/// ```text
/// beta = alpha - (|block| + 1)^2 mu^2
///        + (1/N) sum_k [ (sum_x c[k][x])^2 + sum_x c[k][x]^2 ]
/// ```
///
/// The two sums account for the cross-item and the row-versus-comparison
/// terms of the asymptotic variance respectively; for a single item they
/// coincide.
pub fn estimate_block(cdf: &CdfMatrix, orders: &ColumnOrder, block: &Itemset) -> Result<BlockStats> {
    if block.is_empty() {
        return Err(Error::InvalidConfig("empty block".into()));
    }
    if cdf.kind() != CdfKind::Copula {
        return Err(Error::NotCopula);
    }
    if orders.n_cols() != cdf.n_cols() {
        return Err(Error::InvalidDimensions("column orders do not match the cdf".into()));
    }
    let n = cdf.n_rows();
    let products = row_products(cdf, block)?;
    let mu = products.support();
    let squares: Vec<f64> = products.values().iter().map(|t| t * t).collect();
    let alpha = mean(&squares);

    let inv = 1.0 / (n - 1) as f64;
    let mut c_sum = vec![0.0; n];
    let mut c_sq = vec![0.0; n];
    for &x in block.items() {
        let rest = row_products(cdf, &block.without(x))?;
        let rest = rest.values();
        let order = orders.column(x);
        let col = cdf.column(x);
        let mut running = 0.0;
        let mut pending = 0.0;
        for (pos, &row) in order.iter().enumerate() {
            // tied rows share a cdf value and do not count as larger
            if pos > 0 && col[row] != col[order[pos - 1]] {
                running += pending;
                pending = 0.0;
            }
            let c = running * inv;
            c_sum[row] += c;
            c_sq[row] += c * c;
            pending += rest[row];
        }
    }
    let spread: Vec<f64> = c_sum.iter().zip(&c_sq).map(|(s, q)| s * s + q).collect();
    let m1 = (block.len() + 1) as f64;
    let beta = (alpha + mean(&spread)) - m1 * m1 * mu * mu;
    Ok(BlockStats { block: block.clone(), mu, alpha, beta })
}

/// Mean and asymptotic `Var(sqrt(N) U)` of the support of the union of
/// independent blocks.
pub fn combine(blocks: &[BlockStats]) -> Result<(f64, f64)> {
    if blocks.len() < 2 {
        return Err(Error::InvalidConfig("combine needs at least 2 blocks".into()));
    }
    if let Some(b) = blocks.iter().find(|b| b.mu <= 0.0) {
        return Err(Error::Degenerate(format!("block {} has zero mean support", b.block)));
    }
    let mu: f64 = blocks.iter().map(|b| b.mu).product();
    let alpha: f64 = blocks.iter().map(|b| b.alpha).product();
    let spread: f64 = blocks.iter().map(|b| (b.beta - b.alpha) / (b.mu * b.mu)).sum();
    let l = blocks.len() as f64;
    Ok((mu, alpha + (l - 1.0) * mu * mu + mu * mu * spread))
}

/// Memo of block statistics keyed by block, shared across partitions and
/// itemsets of one mining run. Every entry belongs to the `(cdf, orders)`
/// pair it was first filled from.
#[derive(Debug, Default)]
pub struct BlockCache {
    entries: RwLock<HashMap<Itemset, BlockStats>>,
}

impl BlockCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.entries.read().unwrap().len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn get_or_estimate(
        &self,
        cdf: &CdfMatrix,
        orders: &ColumnOrder,
        block: &Itemset,
    ) -> Result<BlockStats> {
        if let Some(stats) = self.entries.read().unwrap().get(block) {
            return Ok(stats.clone());
        }
        let stats = estimate_block(cdf, orders, block)?;
        let mut entries = self.entries.write().unwrap();
        Ok(entries.entry(block.clone()).or_insert(stats).clone())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZPartOptions {
    /// Largest itemset scored.
    pub cap: usize,
    /// Score `|z|` instead of the one-sided `z`.
    pub two_sided: bool,
}

impl Default for ZPartOptions {
    fn default() -> Self {
        ZPartOptions { cap: 10, two_sided: false }
    }
}

/// Null model for one partition.
#[derive(Debug, Clone, PartialEq)]
pub struct PartitionModel {
    pub partition: Partition,
    pub mu: f64,
    pub var_limit: f64,
    pub z: f64,
}

/// Result of [`z_part`].
#[derive(Debug, Clone, PartialEq)]
pub struct ZPart {
    pub support: f64,
    pub best: PartitionModel,
    /// Partitions dropped for a zero-mean block or a non-positive variance.
    pub skipped: usize,
}

impl ZPart {
    pub fn z(&self) -> f64 {
        self.best.z
    }
}

/// Minimum over partitions of `sqrt(N) (cp(X) - mu_P) / sqrt(var_P)`.
///
/// Ties keep the first partition in enumeration order.
pub fn z_part(
    cdf: &CdfMatrix,
    orders: &ColumnOrder,
    x: &Itemset,
    cache: &BlockCache,
    opts: ZPartOptions,
) -> Result<ZPart> {
    if x.len() < 2 {
        return Err(Error::Degenerate("z_part needs at least 2 items".into()));
    }
    if x.len() > opts.cap.min(MAX_PARTITION_ITEMS) {
        return Err(Error::PartitionCapExceeded { size: x.len(), cap: opts.cap });
    }
    let cp = support(cdf, x)?;
    let root_n = (cdf.n_rows() as f64).sqrt();

    let mut local: Vec<Option<BlockStats>> = vec![None; 1 << x.len()];
    let mut rgs = RestrictedGrowth::new(x.len());
    let mut best: Option<(Vec<u32>, f64, f64, f64)> = None;
    let mut skipped = 0;
    while let Some(masks) = rgs.next_masks() {
        let mut stats = Vec::with_capacity(masks.len());
        for &m in &masks {
            let slot = &mut local[m as usize];
            if slot.is_none() {
                *slot = Some(cache.get_or_estimate(cdf, orders, &mask_itemset(x, m))?);
            }
            stats.push(slot.clone().unwrap());
        }
        let (mu, var) = match combine(&stats) {
            Ok((mu, var)) if var > 0.0 => (mu, var),
            _ => {
                skipped += 1;
                continue;
            }
        };
        let mut z = root_n * (cp - mu) / var.sqrt();
        if opts.two_sided {
            z = z.abs();
        }
        if best.as_ref().is_none_or(|b| z < b.3) {
            best = Some((masks, mu, var, z));
        }
    }
    let (masks, mu, var_limit, z) = best.ok_or_else(|| {
        Error::Degenerate(format!("every partition of {x} has a degenerate null model"))
    })?;
    let partition = Partition { blocks: masks.into_iter().map(|m| mask_itemset(x, m)).collect() };
    Ok(ZPart { support: cp, best: PartitionModel { partition, mu, var_limit, z }, skipped })
}
