//! Threshold-averaged support: the mean over rows of the product of the
//! row's CDF values across the itemset's columns.

use std::fmt;

use crate::error::{Error, Result};
use crate::ranking::CdfMatrix;

/// Strictly increasing list of column indices.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Itemset(Vec<usize>);

impl Itemset {
    /// Wraps `items`, which must be strictly increasing.
    pub fn new(items: Vec<usize>) -> Result<Self> {
        if let Some(w) = items.windows(2).find(|w| w[0] >= w[1]) {
            return Err(if w[0] == w[1] {
                Error::DuplicateItem(w[0])
            } else {
                Error::InvalidConfig(format!("itemset {items:?} is not sorted"))
            });
        }
        Ok(Itemset(items))
    }

    /// Sorts `items`; duplicates are an error.
    pub fn from_unsorted(mut items: Vec<usize>) -> Result<Self> {
        items.sort_unstable();
        Self::new(items)
    }

    pub fn empty() -> Self {
        Itemset(Vec::new())
    }

    pub fn items(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, item: usize) -> bool {
        self.0.binary_search(&item).is_ok()
    }

    pub fn is_subset(&self, other: &Itemset) -> bool {
        self.0.iter().all(|&i| other.contains(i))
    }

    /// Copy with `item` inserted in sorted position.
    pub fn with(&self, item: usize) -> Result<Self> {
        match self.0.binary_search(&item) {
            Ok(_) => Err(Error::DuplicateItem(item)),
            Err(pos) => {
                let mut items = self.0.clone();
                items.insert(pos, item);
                Ok(Itemset(items))
            }
        }
    }

    /// Copy with `item` removed (no-op when absent).
    pub fn without(&self, item: usize) -> Self {
        Itemset(self.0.iter().copied().filter(|&i| i != item).collect())
    }

    pub(crate) fn check_range(&self, k: usize) -> Result<()> {
        match self.0.last() {
            Some(&item) if item >= k => Err(Error::ItemOutOfRange { item, k }),
            _ => Ok(()),
        }
    }
}

impl fmt::Display for Itemset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, item) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{item}")?;
        }
        write!(f, "}}")
    }
}

/// Row length above which [`mean`] switches to compensated summation.
const KAHAN_THRESHOLD: usize = 100_000;

/// Arithmetic mean; Kahan-compensated for long vectors.
pub fn mean(values: &[f64]) -> f64 {
    let n = values.len() as f64;
    if values.len() < KAHAN_THRESHOLD {
        return values.iter().sum::<f64>() / n;
    }
    let mut sum = 0.0;
    let mut carry = 0.0;
    for &v in values {
        let y = v - carry;
        let t = sum + y;
        carry = (t - sum) - y;
        sum = t;
    }
    sum / n
}

/// Absolute slack in the frequency test, so that supports which equal the
/// threshold in exact arithmetic are not lost to rounding.
pub const SUPPORT_EPS: f64 = 1e-12;

/// `support >= min_support`, up to [`SUPPORT_EPS`].
pub fn is_frequent(support: f64, min_support: f64) -> bool {
    support >= min_support - SUPPORT_EPS
}

/// Per-row products `prod_{j in X} p_ij` for an itemset.
#[derive(Debug, Clone, PartialEq)]
pub struct RowProducts {
    itemset: Itemset,
    values: Vec<f64>,
}

impl RowProducts {
    /// Products of the empty itemset: all ones.
    pub fn empty(n: usize) -> Self {
        RowProducts { itemset: Itemset::empty(), values: vec![1.0; n] }
    }

    pub fn itemset(&self) -> &Itemset {
        &self.itemset
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn support(&self) -> f64 {
        mean(&self.values)
    }

    /// Products for `itemset ∪ {item}`; the new factor multiplies last, so a
    /// chain of extends in increasing item order matches [`row_products`]
    /// exactly.
    pub fn extend(&self, cdf: &CdfMatrix, item: usize) -> Result<RowProducts> {
        if item >= cdf.n_cols() {
            return Err(Error::ItemOutOfRange { item, k: cdf.n_cols() });
        }
        let itemset = self.itemset.with(item)?;
        Ok(RowProducts { itemset, values: multiply(&self.values, cdf.column(item)) })
    }
}

pub(crate) fn multiply(values: &[f64], column: &[f64]) -> Vec<f64> {
    values.iter().zip(column).map(|(a, b)| a * b).collect()
}

pub fn row_products(cdf: &CdfMatrix, x: &Itemset) -> Result<RowProducts> {
    x.check_range(cdf.n_cols())?;
    let mut values = vec![1.0; cdf.n_rows()];
    for &j in x.items() {
        for (v, p) in values.iter_mut().zip(cdf.column(j)) {
            *v *= p;
        }
    }
    Ok(RowProducts { itemset: x.clone(), values })
}

/// `(1/N) sum_i prod_{j in X} p_ij`; the empty itemset has support 1.
pub fn support(cdf: &CdfMatrix, x: &Itemset) -> Result<f64> {
    Ok(row_products(cdf, x)?.support())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::Dataset;
    use crate::ranking::{copula_cdf, custom_cdf};

    fn example_cdf() -> CdfMatrix {
        let d = Dataset::from_rows(
            &[
                vec![1.2, 4.5, 3.8, 8.9],
                vec![4.4, 4.7, 1.9, 8.8],
                vec![8.2, 8.5, 3.0, 6.5],
            ],
            None,
        )
        .unwrap();
        copula_cdf(&d).unwrap()
    }

    fn set(items: &[usize]) -> Itemset {
        Itemset::new(items.to_vec()).unwrap()
    }

    #[test]
    fn itemset_validation() {
        assert!(matches!(Itemset::new(vec![1, 1]), Err(Error::DuplicateItem(1))));
        assert!(Itemset::new(vec![2, 1]).is_err());
        assert_eq!(Itemset::from_unsorted(vec![3, 0, 2]).unwrap().items(), &[0, 2, 3]);
        assert_eq!(set(&[1, 4]).with(2).unwrap().items(), &[1, 2, 4]);
        assert!(set(&[1, 4]).with(4).is_err());
        assert_eq!(set(&[1, 4]).to_string(), "{1,4}");
    }

    #[test]
    fn worked_example_support() {
        let cdf = example_cdf();
        let x = set(&[1, 2]);
        assert_eq!(row_products(&cdf, &x).unwrap().values(), &[0.0, 0.0, 0.5]);
        assert!((support(&cdf, &x).unwrap() - 1.0 / 6.0).abs() < 1e-15);
        for j in 0..4 {
            assert_eq!(support(&cdf, &set(&[j])).unwrap(), 0.5);
        }
        assert_eq!(support(&cdf, &Itemset::empty()).unwrap(), 1.0);
    }

    #[test]
    fn out_of_range_item() {
        assert!(matches!(
            support(&example_cdf(), &set(&[0, 4])),
            Err(Error::ItemOutOfRange { item: 4, k: 4 })
        ));
        assert!(RowProducts::empty(3).extend(&example_cdf(), 9).is_err());
    }

    #[test]
    fn extend_matches_direct() {
        let cdf = example_cdf();
        let a2 = row_products(&cdf, &set(&[1])).unwrap();
        let a23 = a2.extend(&cdf, 2).unwrap();
        assert_eq!(a23, row_products(&cdf, &set(&[1, 2])).unwrap());
        assert!(matches!(a23.extend(&cdf, 2), Err(Error::DuplicateItem(2))));
        let root = RowProducts::empty(3);
        assert_eq!(root.extend(&cdf, 3).unwrap().values(), cdf.column(3));
    }

    #[test]
    fn custom_extremes() {
        let ones = custom_cdf(vec![vec![1.0; 4]; 3]).unwrap();
        let zeros = custom_cdf(vec![vec![0.0; 4]; 3]).unwrap();
        let all = set(&[0, 1, 2]);
        assert_eq!(row_products(&ones, &all).unwrap().values(), &[1.0; 4]);
        assert_eq!(support(&ones, &all).unwrap(), 1.0);
        assert_eq!(support(&zeros, &set(&[1])).unwrap(), 0.0);
        let p = row_products(&ones, &set(&[0])).unwrap();
        assert_eq!(p.extend(&ones, 2).unwrap().values(), p.values());
    }

    #[test]
    fn custom_copy_of_copula_matches() {
        let cdf = example_cdf();
        let cols = (0..4).map(|j| cdf.column(j).to_vec()).collect();
        let custom = custom_cdf(cols).unwrap();
        let x = set(&[0, 1, 3]);
        assert_eq!(support(&custom, &x).unwrap(), support(&cdf, &x).unwrap());
    }

    #[test]
    fn kahan_mean_on_long_vectors() {
        let values = vec![0.1; 200_000];
        assert!((mean(&values) - 0.1).abs() < 1e-15);
    }
}
