//! Real-valued datasets: CSV loading and the synthetic `Ind` / `Plant`
//! benchmark generators.

use std::collections::HashSet;
use std::fs;
use std::io::{self, Write};
use std::path::Path;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::support::Itemset;

/// An `N x K` matrix of finite reals with named columns.
///
/// Values are stored column-major since every consumer (ranking, support
/// evaluation) scans one column at a time.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    values: Vec<f64>,
    n: usize,
    names: Vec<String>,
}

impl Dataset {
    /// Builds a dataset from columns. Names default to `c0, c1, ...`.
    pub fn from_columns(columns: Vec<Vec<f64>>, names: Option<Vec<String>>) -> Result<Self> {
        let k = columns.len();
        if k == 0 {
            return Err(Error::InvalidDimensions("no columns".into()));
        }
        let n = columns[0].len();
        if n < 2 {
            return Err(Error::TooFewRows(n));
        }
        let names = names.unwrap_or_else(|| default_names(k));
        if names.len() != k {
            return Err(Error::InvalidDimensions(format!(
                "{} names for {} columns",
                names.len(),
                k
            )));
        }
        check_unique(&names)?;
        let mut values = Vec::with_capacity(n * k);
        for (j, col) in columns.into_iter().enumerate() {
            if col.len() != n {
                return Err(Error::InvalidDimensions(format!(
                    "column {j} has {} rows, expected {n}",
                    col.len()
                )));
            }
            if let Some(i) = col.iter().position(|v| !v.is_finite()) {
                return Err(Error::NonFinite { line: i + 1, column: j + 1 });
            }
            values.extend(col);
        }
        Ok(Dataset { values, n, names })
    }

    /// Builds a dataset from row vectors.
    pub fn from_rows(rows: &[Vec<f64>], names: Option<Vec<String>>) -> Result<Self> {
        let k = rows.first().map_or(0, Vec::len);
        let mut columns = vec![Vec::with_capacity(rows.len()); k];
        for (i, row) in rows.iter().enumerate() {
            if row.len() != k {
                return Err(Error::Ragged { line: i + 1, expected: k, found: row.len() });
            }
            for (col, &v) in columns.iter_mut().zip(row) {
                col.push(v);
            }
        }
        if rows.len() < 2 {
            return Err(Error::TooFewRows(rows.len()));
        }
        Self::from_columns(columns, names)
    }

    pub fn n_rows(&self) -> usize {
        self.n
    }

    pub fn n_cols(&self) -> usize {
        self.names.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn column(&self, j: usize) -> &[f64] {
        &self.values[j * self.n..(j + 1) * self.n]
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.values[col * self.n + row]
    }

    pub fn columns(&self) -> impl Iterator<Item = &[f64]> {
        self.values.chunks_exact(self.n)
    }

    /// Writes the dataset as comma-separated values with a header row.
    ///
    /// Floats use Rust's shortest round-trip formatting, so `read_csv`
    /// recovers the exact bits.
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "{}", self.names.join(","))?;
        let mut line = String::new();
        for i in 0..self.n {
            line.clear();
            for j in 0..self.n_cols() {
                if j > 0 {
                    line.push(',');
                }
                line.push_str(&format!("{:?}", self.get(i, j)));
            }
            writeln!(out, "{line}")?;
        }
        Ok(())
    }
}

fn default_names(k: usize) -> Vec<String> {
    (0..k).map(|j| format!("c{j}")).collect()
}

fn check_unique(names: &[String]) -> Result<()> {
    let mut seen = HashSet::with_capacity(names.len());
    for name in names {
        if !seen.insert(name.as_str()) {
            return Err(Error::DuplicateName(name.clone()));
        }
    }
    Ok(())
}

/// Loads a comma-separated numeric table. Blank lines are ignored.
pub fn load_csv<P: AsRef<Path>>(path: P, has_header: bool) -> Result<Dataset> {
    let text = fs::read_to_string(path)?;
    read_csv(&text, has_header)
}

/// Parses comma-separated numeric text; see [`load_csv`].
pub fn read_csv(text: &str, has_header: bool) -> Result<Dataset> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim_end_matches('\r')))
        .filter(|(_, l)| !l.trim().is_empty());

    let mut names = None;
    if has_header {
        match lines.next() {
            Some((_, header)) => {
                names = Some(header.split(',').map(|s| s.trim().to_string()).collect::<Vec<_>>())
            }
            None => return Err(Error::TooFewRows(0)),
        }
    }

    let mut width = names.as_ref().map(Vec::len);
    let mut columns: Vec<Vec<f64>> = Vec::new();
    let mut rows = 0;
    for (line_no, line) in lines {
        let fields: Vec<&str> = line.split(',').collect();
        let expected = *width.get_or_insert(fields.len());
        if fields.len() != expected {
            return Err(Error::Ragged { line: line_no, expected, found: fields.len() });
        }
        if columns.is_empty() {
            columns = vec![Vec::new(); expected];
        }
        for (j, field) in fields.iter().enumerate() {
            let field = field.trim();
            let v: f64 = field.parse().map_err(|_| Error::Parse {
                line: line_no,
                column: j + 1,
                text: field.to_string(),
            })?;
            if !v.is_finite() {
                return Err(Error::NonFinite { line: line_no, column: j + 1 });
            }
            columns[j].push(v);
        }
        rows += 1;
    }
    if rows < 2 {
        return Err(Error::TooFewRows(rows));
    }
    Dataset::from_columns(columns, names)
}

/// `n x k` matrix of i.i.d. Uniform[0, 1) values.
pub fn gen_independent(n: usize, k: usize, seed: u64) -> Result<Dataset> {
    check_dims(n, k)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut columns = vec![Vec::with_capacity(n); k];
    for _ in 0..n {
        for col in columns.iter_mut() {
            col.push(rng.gen::<f64>());
        }
    }
    Dataset::from_columns(columns, None)
}

fn check_dims(n: usize, k: usize) -> Result<()> {
    if n < 2 || k < 1 {
        return Err(Error::InvalidDimensions(format!(
            "need at least 2 rows and 1 column, got {n} x {k}"
        )));
    }
    Ok(())
}

/// Parameters of the planted subspace-cluster generator.
#[derive(Debug, Clone, PartialEq)]
pub struct PlantSpec {
    pub clusters: Vec<Itemset>,
    pub membership_prob: f64,
    pub plant_value: f64,
    pub seed: u64,
}

impl PlantSpec {
    /// `count` disjoint clusters of `size` columns each, placed at random
    /// columns drawn with `seed`.
    pub fn disjoint(
        k: usize,
        count: usize,
        size: usize,
        membership_prob: f64,
        plant_value: f64,
        seed: u64,
    ) -> Result<Self> {
        if count * size > k {
            return Err(Error::InvalidDimensions(format!(
                "{count} clusters of {size} items do not fit in {k} columns"
            )));
        }
        if size == 0 {
            return Err(Error::InvalidDimensions("empty cluster".into()));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut cols: Vec<usize> = (0..k).collect();
        cols.shuffle(&mut rng);
        let clusters = cols
            .chunks_exact(size)
            .take(count)
            .map(|c| Itemset::from_unsorted(c.to_vec()))
            .collect::<Result<Vec<_>>>()?;
        Ok(PlantSpec { clusters, membership_prob, plant_value, seed })
    }
}

/// Output of [`gen_planted`].
#[derive(Debug, Clone)]
pub struct Planted {
    pub data: Dataset,
    pub clusters: Vec<Itemset>,
    /// `membership[t][i]` is the sampled `B_ti`: whether row `t` belongs to
    /// cluster `i`.
    pub membership: Vec<Vec<bool>>,
}

/// Generates a dataset with planted subspace clusters.
///
/// Each row joins each cluster independently with probability
/// `membership_prob`. Member rows get `plant_value` on the cluster's
/// columns, all other cells get 0, and Uniform[0, 1) noise is added to
/// every cell.
pub fn gen_planted(n: usize, k: usize, spec: &PlantSpec) -> Result<Planted> {
    check_dims(n, k)?;
    let p = spec.membership_prob;
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidProbability(p));
    }
    if !spec.plant_value.is_finite() {
        return Err(Error::InvalidConfig("plant value must be finite".into()));
    }
    for cluster in &spec.clusters {
        if let Some(&item) = cluster.items().iter().find(|&&j| j >= k) {
            return Err(Error::ItemOutOfRange { item, k });
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut columns = vec![vec![0.0; n]; k];
    let mut membership = Vec::with_capacity(n);
    for t in 0..n {
        let row: Vec<bool> = spec.clusters.iter().map(|_| rng.gen_bool(p)).collect();
        for (cluster, &member) in spec.clusters.iter().zip(&row) {
            if member {
                for &j in cluster.items() {
                    columns[j][t] = spec.plant_value;
                }
            }
        }
        for col in columns.iter_mut() {
            col[t] += rng.gen::<f64>();
        }
        membership.push(row);
    }
    Ok(Planted {
        data: Dataset::from_columns(columns, None)?,
        clusters: spec.clusters.clone(),
        membership,
    })
}
