//! Mining and ranking itemsets from real-valued data.
//!
//! Each column is binarised with a random threshold and the support of an
//! itemset is averaged over thresholds. With the rank-based ("copula")
//! threshold distribution, that average is the mean over rows of the
//! product of the row's normalised ranks. Supports are anti-monotone, so
//! frequent itemsets are mined with an ordinary depth-first search, and
//! each pattern is then ranked against two null models:
//!
//! * `z_ind`: all items independent; mean and variance are exact.
//! * `z_part`: items independent across the blocks of some partition; the
//!   best-fitting partition is chosen and per-block statistics are
//!   estimated from the data.
//!
//! ```
//! use cpmine::{copula_cdf, support, Dataset, Itemset};
//!
//! let data = Dataset::from_rows(
//!     &[vec![1.2, 4.5, 3.8], vec![4.4, 4.7, 1.9], vec![8.2, 8.5, 3.0]],
//!     None,
//! )?;
//! let cdf = copula_cdf(&data)?;
//! let cp = support(&cdf, &Itemset::new(vec![1, 2])?)?;
//! assert!((cp - 1.0 / 6.0).abs() < 1e-15);
//! # Ok::<(), cpmine::Error>(())
//! ```

pub mod cli;
pub mod dataset;
mod error;
pub mod indstats;
pub mod miner;
pub mod oracle;
pub mod partstats;
pub mod ranking;
pub mod support;

pub use dataset::{gen_independent, gen_planted, load_csv, Dataset, PlantSpec, Planted};
pub use error::{Error, Result};
pub use indstats::{ind_model, z_ind, IndModel};
pub use miner::{mine, score, MinerConfig, Pattern};
pub use partstats::{
    combine, enumerate_partitions, estimate_block, z_part, BlockCache, BlockStats, Partition,
    PartitionModel, ZPart, ZPartOptions,
};
pub use ranking::{
    column_orders, copula_cdf, custom_cdf, truncated_cdf, CdfKind, CdfMatrix, ColumnOrder,
};
pub use support::{is_frequent, row_products, support, Itemset, RowProducts};
