//! Per-cell threshold CDF matrices `p(R_j <= d_ij)` and per-column sort
//! orders.
//!
//! Ties are handled by strict-less counting: a cell's copula value is the
//! number of rows in its column with a strictly smaller value, divided by
//! `N - 1`. Tied cells therefore share a value and a threshold falling
//! between them never separates them.

use crate::dataset::Dataset;
use crate::error::{Error, Result};

/// Which threshold distribution produced a [`CdfMatrix`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CdfKind {
    Copula,
    /// Truncated copula; the top and bottom `floor(alpha * N)` values of
    /// each column always binarise to 1 and 0 respectively.
    Truncated(f64),
    Custom,
}

/// `N x K` matrix of threshold CDF values in `[0, 1]`, column-major.
#[derive(Debug, Clone, PartialEq)]
pub struct CdfMatrix {
    p: Vec<f64>,
    n: usize,
    k: usize,
    kind: CdfKind,
}

impl CdfMatrix {
    pub fn n_rows(&self) -> usize {
        self.n
    }

    pub fn n_cols(&self) -> usize {
        self.k
    }

    pub fn kind(&self) -> CdfKind {
        self.kind
    }

    pub fn column(&self, j: usize) -> &[f64] {
        &self.p[j * self.n..(j + 1) * self.n]
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.p[col * self.n + row]
    }
}

/// Strict-less counts `s_ij = |{l : d_lj < d_ij}|` for one column.
fn strict_less_counts(col: &[f64]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..col.len()).collect();
    idx.sort_by(|&a, &b| col[a].total_cmp(&col[b]).then(a.cmp(&b)));
    let mut counts = vec![0; col.len()];
    let mut group_start = 0;
    for (pos, &row) in idx.iter().enumerate() {
        if pos > 0 && col[row] != col[idx[pos - 1]] {
            group_start = pos;
        }
        counts[row] = group_start;
    }
    counts
}

fn build(data: &Dataset, kind: CdfKind, f: impl Fn(usize) -> f64) -> CdfMatrix {
    let n = data.n_rows();
    let mut p = Vec::with_capacity(n * data.n_cols());
    for col in data.columns() {
        p.extend(strict_less_counts(col).into_iter().map(&f));
    }
    CdfMatrix { p, n, k: data.n_cols(), kind }
}

/// Copula ranks: `p_ij = s_ij / (N - 1)`.
pub fn copula_cdf(data: &Dataset) -> Result<CdfMatrix> {
    let n = data.n_rows();
    if n < 2 {
        return Err(Error::TooFewRows(n));
    }
    let denom = (n - 1) as f64;
    Ok(build(data, CdfKind::Copula, |s| s as f64 / denom))
}

/// Truncated copula: `p_ij = clamp((s_ij - M) / (N - 1 - 2M), 0, 1)` with
/// `M = floor(alpha * N)`.
///
/// `alpha = 0` reproduces [`copula_cdf`] bit for bit, including the kind.
pub fn truncated_cdf(data: &Dataset, alpha: f64) -> Result<CdfMatrix> {
    let n = data.n_rows();
    let cut = truncation(alpha, n)?;
    if cut == 0 {
        return copula_cdf(data);
    }
    let denom = (n - 1 - 2 * cut) as f64;
    Ok(build(data, CdfKind::Truncated(alpha), |s| {
        ((s as f64 - cut as f64) / denom).clamp(0.0, 1.0)
    }))
}

/// Number of rows `M = floor(alpha * N)` cut from each end, validating that
/// at least one threshold interval remains.
pub fn truncation(alpha: f64, n: usize) -> Result<usize> {
    if !(0.0..0.5).contains(&alpha) {
        return Err(Error::InvalidConfig(format!("alpha {alpha} outside [0, 0.5)")));
    }
    let cut = (alpha * n as f64).floor() as usize;
    if n < 2 || n - 1 < 2 * cut + 1 {
        return Err(Error::AlphaTooLarge { alpha, n });
    }
    Ok(cut)
}

/// Wraps user-supplied CDF evaluations given as columns.
pub fn custom_cdf(columns: Vec<Vec<f64>>) -> Result<CdfMatrix> {
    let k = columns.len();
    let n = columns.first().map_or(0, Vec::len);
    if k == 0 || n == 0 {
        return Err(Error::InvalidDimensions("empty cdf matrix".into()));
    }
    let mut p = Vec::with_capacity(n * k);
    for (j, col) in columns.into_iter().enumerate() {
        if col.len() != n {
            return Err(Error::InvalidDimensions(format!(
                "cdf column {j} has {} rows, expected {n}",
                col.len()
            )));
        }
        if let Some(row) = col.iter().position(|v| !(0.0..=1.0).contains(v)) {
            return Err(Error::CdfOutOfRange { row, column: j, value: col[row] });
        }
        p.extend(col);
    }
    Ok(CdfMatrix { p, n, k, kind: CdfKind::Custom })
}

/// Per-column row permutations, sorted by value descending with ties
/// broken by ascending row index.
#[derive(Debug, Clone, PartialEq)]
pub struct ColumnOrder {
    orders: Vec<Vec<usize>>,
}

impl ColumnOrder {
    pub fn column(&self, j: usize) -> &[usize] {
        &self.orders[j]
    }

    pub fn n_cols(&self) -> usize {
        self.orders.len()
    }
}

pub fn column_orders(data: &Dataset) -> ColumnOrder {
    let orders = data
        .columns()
        .map(|col| {
            let mut idx: Vec<usize> = (0..col.len()).collect();
            idx.sort_by(|&a, &b| col[b].total_cmp(&col[a]).then(a.cmp(&b)));
            idx
        })
        .collect();
    ColumnOrder { orders }
}
