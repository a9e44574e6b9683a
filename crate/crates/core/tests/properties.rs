use cpmine::dataset::read_csv;
use cpmine::oracle::brute_force_mine;
use cpmine::{
    copula_cdf, enumerate_partitions, mine, row_products, support, truncated_cdf, Dataset,
    Itemset, MinerConfig, RowProducts,
};
use proptest::prelude::*;

/// Integer-valued columns (so monotone transforms stay exact) with
/// frequent ties.
fn dataset(max_rows: usize, max_cols: usize) -> impl Strategy<Value = Dataset> {
    (3..=max_rows, 1..=max_cols).prop_flat_map(|(n, k)| {
        prop::collection::vec(prop::collection::vec(-20i32..20, n), k).prop_map(|cols| {
            let cols = cols.into_iter().map(|c| c.into_iter().map(f64::from).collect()).collect();
            Dataset::from_columns(cols, None).unwrap()
        })
    })
}

fn subset(mask: u32, k: usize) -> Itemset {
    Itemset::new((0..k).filter(|j| mask & (1 << j) != 0).collect()).unwrap()
}

proptest! {
    #[test]
    fn support_is_anti_monotone(data in dataset(30, 5), mask in any::<u32>(), extra in 0usize..5) {
        let k = data.n_cols();
        let x = subset(mask, k);
        let extra = extra % k;
        prop_assume!(!x.contains(extra));
        let y = x.with(extra).unwrap();
        let mut cdfs = vec![copula_cdf(&data).unwrap()];
        if let Ok(t) = truncated_cdf(&data, 0.2) {
            cdfs.push(t);
        }
        for cdf in &cdfs {
            let (sx, sy) = (support(cdf, &x).unwrap(), support(cdf, &y).unwrap());
            prop_assert!(sy <= sx + 1e-14, "{sy} > {sx}");
            prop_assert!((0.0..=1.0).contains(&sy));
        }
    }

    #[test]
    fn ranks_ignore_monotone_transforms(data in dataset(25, 4)) {
        let cubed: Vec<Vec<f64>> = data.columns().map(|c| c.iter().map(|v| v * v * v + 2.0 * v).collect()).collect();
        let shifted: Vec<Vec<f64>> = data.columns().map(|c| c.iter().map(|v| 3.0 * v - 11.0).collect()).collect();
        let base = copula_cdf(&data).unwrap();
        for cols in [cubed, shifted] {
            let other = copula_cdf(&Dataset::from_columns(cols, None).unwrap()).unwrap();
            for j in 0..data.n_cols() {
                prop_assert_eq!(base.column(j), other.column(j));
            }
        }
    }

    #[test]
    fn extend_chain_matches_direct(data in dataset(20, 5), mask in 1u32..32) {
        let k = data.n_cols();
        let x = subset(mask, k);
        prop_assume!(!x.is_empty());
        let cdf = copula_cdf(&data).unwrap();
        let chained = x.items().iter().fold(RowProducts::empty(data.n_rows()), |p, &j| p.extend(&cdf, j).unwrap());
        let direct = row_products(&cdf, &x).unwrap();
        prop_assert_eq!(chained.values(), direct.values());
        prop_assert_eq!(chained.support(), support(&cdf, &x).unwrap());
    }

    #[test]
    fn csv_round_trip(rows in prop::collection::vec(prop::collection::vec(-1e12f64..1e12, 3), 2..20)) {
        let data = Dataset::from_rows(&rows, None).unwrap();
        let mut buf = Vec::new();
        data.write_csv(&mut buf).unwrap();
        let back = read_csv(std::str::from_utf8(&buf).unwrap(), true).unwrap();
        prop_assert_eq!(back, data);
    }

    #[test]
    fn partitions_are_complete_and_distinct(size in 2usize..7) {
        let x = Itemset::new((0..size).collect()).unwrap();
        let parts: Vec<_> = enumerate_partitions(&x).unwrap().collect();
        let bell = [1usize, 1, 2, 5, 15, 52, 203][size];
        prop_assert_eq!(parts.len(), bell - 1);
        let unique: std::collections::HashSet<_> = parts.iter().map(|p| p.to_string()).collect();
        prop_assert_eq!(unique.len(), parts.len());
        for p in &parts {
            prop_assert!(p.len() >= 2);
            prop_assert_eq!(p.itemset(), x.clone());
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn miner_matches_brute_force(data in dataset(40, 7), min_support in 0.05f64..0.6) {
        let cdf = copula_cdf(&data).unwrap();
        let config = MinerConfig { min_support, alpha: 0.0, max_size: None, ..Default::default() };
        let fast = mine(&cdf, &config).unwrap();
        let slow = brute_force_mine(&cdf, min_support, data.n_cols()).unwrap();
        prop_assert_eq!(fast.len(), slow.len());
        for (a, b) in fast.iter().zip(&slow) {
            prop_assert_eq!(&a.itemset, &b.itemset);
            prop_assert!((a.support_alpha - b.support_alpha).abs() <= 1e-12);
        }
    }
}
