//! Command-line front end: `gen`, `mine` and `validate`.
//!
//! Exit codes: 0 success, 1 usage or parameter error, 2 data or i/o error,
//! 3 validation failure.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::dataset::{gen_independent, gen_planted, load_csv, Dataset, PlantSpec};
use crate::error::Error;
use crate::indstats::ind_model;
use crate::miner::{mine, score, MinerConfig, Pattern};
use crate::oracle::{
    brute_force_mine, empirical_z_distribution, exhaustive_ind_moments, mc_threshold_support,
    replicate_rng,
};
use crate::ranking::{column_orders, copula_cdf, truncated_cdf};
use crate::support::{support, Itemset};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_DATA: i32 = 2;
pub const EXIT_VALIDATION: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "cpmine", version, about = "Mine and rank itemsets in real-valued data")]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Generate a synthetic dataset as CSV.
    Gen(GenArgs),
    /// Mine frequent itemsets and score them.
    Mine(MineArgs),
    /// Run the verification oracles.
    Validate(ValidateArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum GenKind {
    /// Independent Uniform[0, 1) columns.
    Ind,
    /// Planted subspace clusters on top of uniform noise.
    Plant,
}

#[derive(Debug, Args)]
struct GenArgs {
    kind: GenKind,
    /// Number of rows.
    rows: usize,
    /// Number of columns.
    cols: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output CSV path. Planted itemsets go to `<out>.planted`.
    #[arg(short, long)]
    out: PathBuf,
    #[arg(long, default_value_t = 5)]
    clusters: usize,
    #[arg(long, default_value_t = 4)]
    cluster_size: usize,
    /// Probability that a row belongs to a cluster.
    #[arg(long, default_value_t = 0.4)]
    prob: f64,
    /// Base value of planted cells before noise.
    #[arg(long, default_value_t = 0.5)]
    value: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Rank {
    None,
    Ind,
    Part,
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Jsonl,
    Csv,
}

#[derive(Debug, Args)]
struct MineArgs {
    /// Input CSV.
    input: PathBuf,
    /// The input has no header row.
    #[arg(long)]
    no_header: bool,
    /// Truncation level of the mining support.
    #[arg(long, default_value_t = 0.25)]
    alpha: f64,
    #[arg(long, default_value_t = 0.1)]
    min_support: f64,
    /// Largest itemset mined; 0 means unlimited.
    #[arg(long, default_value_t = 8)]
    max_size: usize,
    /// Largest itemset given a z_part score.
    #[arg(long, default_value_t = 10)]
    zpart_cap: usize,
    #[arg(long, value_enum, default_value_t = Rank::Both)]
    rank: Rank,
    /// Score partitions by |z|.
    #[arg(long)]
    two_sided: bool,
    /// Output path; stdout when omitted.
    #[arg(short, long)]
    output: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Jsonl)]
    format: Format,
    /// Worker threads for mining and scoring; 0 picks the core count.
    #[arg(long, env = "CPMINE_THREADS", default_value_t = 0)]
    threads: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    Mc,
    Moments,
    Normality,
    Equivalence,
    All,
}

#[derive(Debug, Args)]
struct ValidateArgs {
    #[arg(long, value_enum, default_value_t = Suite::All)]
    suite: Suite,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

/// One output line per mined pattern.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PatternRecord {
    pub items: Vec<String>,
    pub size: usize,
    pub support_alpha: f64,
    pub support: f64,
    pub z_ind: Option<f64>,
    pub z_part: Option<f64>,
    pub best_partition: Option<Vec<Vec<String>>>,
}

impl PatternRecord {
    pub fn from_pattern(p: &Pattern, names: &[String]) -> Self {
        let named = |x: &Itemset| x.items().iter().map(|&j| names[j].clone()).collect::<Vec<_>>();
        PatternRecord {
            items: named(&p.itemset),
            size: p.itemset.len(),
            support_alpha: p.support_alpha,
            support: p.support.unwrap_or(f64::NAN),
            z_ind: p.z_ind,
            z_part: p.z_part,
            best_partition: p
                .best_partition
                .as_ref()
                .map(|part| part.blocks().iter().map(named).collect()),
        }
    }

    pub const CSV_HEADER: &'static str =
        "items,size,support_alpha,support,z_ind,z_part,best_partition";

    /// CSV row: items joined by `;`, partition blocks joined by `|`,
    /// missing values left empty.
    pub fn to_csv(&self) -> String {
        let opt = |v: Option<f64>| v.map(|v| format!("{v:?}")).unwrap_or_default();
        let partition = self
            .best_partition
            .as_ref()
            .map(|p| p.iter().map(|b| b.join(";")).collect::<Vec<_>>().join("|"))
            .unwrap_or_default();
        format!(
            "{},{},{:?},{:?},{},{},{}",
            self.items.join(";"),
            self.size,
            self.support_alpha,
            self.support,
            opt(self.z_ind),
            opt(self.z_part),
            partition
        )
    }

    pub fn from_csv(line: &str) -> Result<Self, String> {
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 7 {
            return Err(format!("expected 7 fields, found {}", fields.len()));
        }
        let num = |s: &str| s.parse::<f64>().map_err(|e| format!("{s:?}: {e}"));
        let opt = |s: &str| if s.is_empty() { Ok(None) } else { num(s).map(Some) };
        let names = |s: &str| s.split(';').map(str::to_string).collect::<Vec<_>>();
        Ok(PatternRecord {
            items: names(fields[0]),
            size: fields[1].parse().map_err(|e| format!("size: {e}"))?,
            support_alpha: num(fields[2])?,
            support: num(fields[3])?,
            z_ind: opt(fields[4])?,
            z_part: opt(fields[5])?,
            best_partition: if fields[6].is_empty() {
                None
            } else {
                Some(fields[6].split('|').map(names).collect())
            },
        })
    }
}

/// Deterministic run summary written after the records.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub patterns: usize,
    pub patterns_size2plus: usize,
    pub zpart_undefined: usize,
    pub rows: usize,
    pub cols: usize,
    pub alpha: f64,
    pub min_support: f64,
    pub max_size: usize,
    pub zpart_cap: usize,
    pub rank: Rank,
    pub two_sided: bool,
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum JsonLine {
    Summary { summary: Summary },
    Record(PatternRecord),
}

/// Parses `mine --format jsonl` output back into records and the summary.
pub fn parse_jsonl(text: &str) -> Result<(Vec<PatternRecord>, Option<Summary>), String> {
    let mut records = Vec::new();
    let mut summary = None;
    for (i, line) in text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty()) {
        match serde_json::from_str(line).map_err(|e| format!("line {}: {e}", i + 1))? {
            JsonLine::Summary { summary: s } => summary = Some(s),
            JsonLine::Record(r) => records.push(r),
        }
    }
    Ok((records, summary))
}

/// Parses `mine --format csv` output, skipping the header and the `#`
/// footer.
pub fn parse_csv(text: &str) -> Result<Vec<PatternRecord>, String> {
    text.lines()
        .filter(|l| !l.is_empty() && !l.starts_with('#') && *l != PatternRecord::CSV_HEADER)
        .map(PatternRecord::from_csv)
        .collect()
}

/// Parses `args` (including the program name) and runs the command,
/// returning the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    let result = match cli.command {
        Command::Gen(args) => cmd_gen(&args),
        Command::Mine(args) => cmd_mine(&args),
        Command::Validate(args) => cmd_validate(&args),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::InvalidConfig(_)
        | Error::InvalidDimensions(_)
        | Error::InvalidProbability(_)
        | Error::AlphaTooLarge { .. }
        | Error::PartitionCapExceeded { .. } => EXIT_USAGE,
        _ => EXIT_DATA,
    }
}

fn cmd_gen(args: &GenArgs) -> crate::Result<i32> {
    let data = match args.kind {
        GenKind::Ind => gen_independent(args.rows, args.cols, args.seed)?,
        GenKind::Plant => {
            if args.rows < 2 || args.cols < 1 {
                return Err(Error::InvalidDimensions(format!("{} x {}", args.rows, args.cols)));
            }
            let spec = PlantSpec::disjoint(
                args.cols,
                args.clusters,
                args.cluster_size,
                args.prob,
                args.value,
                args.seed,
            )?;
            let planted = gen_planted(args.rows, args.cols, &spec)?;
            let mut side = BufWriter::new(File::create(sidecar_path(&args.out))?);
            for cluster in &planted.clusters {
                let names: Vec<&str> =
                    cluster.items().iter().map(|&j| planted.data.names()[j].as_str()).collect();
                writeln!(side, "{}", names.join(","))?;
            }
            side.flush()?;
            planted.data
        }
    };
    let mut out = BufWriter::new(File::create(&args.out)?);
    data.write_csv(&mut out)?;
    out.flush()?;
    Ok(EXIT_OK)
}

/// Where `gen plant` writes the planted itemsets for `out`.
pub fn sidecar_path(out: &Path) -> PathBuf {
    let mut s = out.as_os_str().to_owned();
    s.push(".planted");
    PathBuf::from(s)
}

fn cmd_mine(args: &MineArgs) -> crate::Result<i32> {
    let config = MinerConfig {
        min_support: args.min_support,
        max_size: (args.max_size > 0).then_some(args.max_size),
        alpha: args.alpha,
        zpart_cap: args.zpart_cap,
        two_sided: args.two_sided,
        score_ind: matches!(args.rank, Rank::Ind | Rank::Both),
        score_part: matches!(args.rank, Rank::Part | Rank::Both),
    };
    if !(config.min_support > 0.0 && config.min_support <= 1.0) {
        return Err(Error::InvalidConfig(format!(
            "--min-support {} outside (0, 1]",
            config.min_support
        )));
    }
    let data = load_csv(&args.input, !args.no_header)?;
    config.validate(data.n_rows())?;

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(args.threads)
        .build()
        .map_err(|e| Error::InvalidConfig(format!("thread pool: {e}")))?;
    let start = Instant::now();
    let patterns = pool.install(|| mine_and_score(&data, &config))?;
    let elapsed = start.elapsed();

    let summary = Summary {
        patterns: patterns.len(),
        patterns_size2plus: patterns.iter().filter(|p| p.itemset.len() >= 2).count(),
        zpart_undefined: patterns
            .iter()
            .filter(|p| config.score_part && p.note.is_some() && p.z_part.is_none())
            .count(),
        rows: data.n_rows(),
        cols: data.n_cols(),
        alpha: config.alpha,
        min_support: config.min_support,
        max_size: args.max_size,
        zpart_cap: config.zpart_cap,
        rank: args.rank,
        two_sided: config.two_sided,
    };

    let sink: Box<dyn Write> = match &args.output {
        Some(path) => Box::new(File::create(path)?),
        None => Box::new(io::stdout().lock()),
    };
    let mut out = BufWriter::new(sink);
    write_patterns(&mut out, &patterns, data.names(), &summary, args.format)?;
    out.flush()?;
    eprintln!(
        "mined {} patterns ({} of size >= 2) from {} x {} in {:.3} s",
        summary.patterns,
        summary.patterns_size2plus,
        summary.rows,
        summary.cols,
        elapsed.as_secs_f64()
    );
    Ok(EXIT_OK)
}

/// Full pipeline on a dataset: truncated-support mining followed by
/// scoring against the plain copula ranks.
pub fn mine_and_score(data: &Dataset, config: &MinerConfig) -> crate::Result<Vec<Pattern>> {
    let cdf_alpha = truncated_cdf(data, config.alpha)?;
    let patterns = mine(&cdf_alpha, config)?;
    let plain = copula_cdf(data)?;
    score(patterns, &plain, &column_orders(data), config)
}

pub fn write_patterns<W: Write>(
    out: &mut W,
    patterns: &[Pattern],
    names: &[String],
    summary: &Summary,
    format: Format,
) -> io::Result<()> {
    match format {
        Format::Jsonl => {
            for p in patterns {
                serde_json::to_writer(&mut *out, &PatternRecord::from_pattern(p, names))?;
                out.write_all(b"\n")?;
            }
            serde_json::to_writer(&mut *out, &serde_json::json!({ "summary": summary }))?;
            out.write_all(b"\n")?;
        }
        Format::Csv => {
            writeln!(out, "{}", PatternRecord::CSV_HEADER)?;
            for p in patterns {
                writeln!(out, "{}", PatternRecord::from_pattern(p, names).to_csv())?;
            }
            writeln!(
                out,
                "# patterns={} patterns_size2plus={} zpart_undefined={} rows={} cols={} alpha={:?} \
                 min_support={:?} max_size={} zpart_cap={} rank={:?} two_sided={}",
                summary.patterns,
                summary.patterns_size2plus,
                summary.zpart_undefined,
                summary.rows,
                summary.cols,
                summary.alpha,
                summary.min_support,
                summary.max_size,
                summary.zpart_cap,
                summary.rank,
                summary.two_sided
            )?;
        }
    }
    Ok(())
}

/// Outcome of one validation check.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    fn new(name: impl Into<String>, passed: bool, detail: String) -> Self {
        Check { name: name.into(), passed, detail }
    }
}

fn cmd_validate(args: &ValidateArgs) -> crate::Result<i32> {
    let checks = run_suite(args.suite, args.seed)?;
    for c in &checks {
        println!("{} {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
    }
    let failed = checks.iter().filter(|c| !c.passed).count();
    println!("{} checks, {} failed", checks.len(), failed);
    Ok(if failed == 0 { EXIT_OK } else { EXIT_VALIDATION })
}

/// Runs one oracle suite (or all of them) with its default sizes.
pub fn run_suite(suite: Suite, seed: u64) -> crate::Result<Vec<Check>> {
    let mut checks = Vec::new();
    let all = suite == Suite::All;
    if all || suite == Suite::Moments {
        checks.extend(suite_moments()?);
    }
    if all || suite == Suite::Mc {
        checks.extend(suite_mc(seed)?);
    }
    if all || suite == Suite::Equivalence {
        checks.extend(suite_equivalence(seed)?);
    }
    if all || suite == Suite::Normality {
        checks.extend(suite_normality(seed)?);
    }
    Ok(checks)
}

fn suite_moments() -> crate::Result<Vec<Check>> {
    let mut checks = Vec::new();
    for n in 3..=5 {
        for m in 1..=3 {
            let (mean, var) = exhaustive_ind_moments(n, m)?;
            let model = ind_model(m, n)?;
            let (dm, dv) = ((mean - model.mu).abs(), (var - model.var_sqrt_n).abs());
            checks.push(Check::new(
                format!("moments n={n} m={m}"),
                dm <= 1e-10 && dv <= 1e-10,
                format!(
                    "exhaustive ({mean:.12}, {var:.12}) closed form ({:.12}, {:.12})",
                    model.mu, model.var_sqrt_n
                ),
            ));
        }
    }
    Ok(checks)
}

fn suite_mc(seed: u64) -> crate::Result<Vec<Check>> {
    const SAMPLES: usize = 20_000;
    let mut checks = Vec::new();
    for r in 0..6u64 {
        let mut rng = replicate_rng(seed, r);
        let data = gen_independent(60, 4, rng.gen())?;
        let cdf = copula_cdf(&data)?;
        let size = 1 + (r as usize % 3);
        let mut items: Vec<usize> = (0..4).collect();
        rand::seq::SliceRandom::shuffle(&mut items[..], &mut rng);
        let x = Itemset::from_unsorted(items[..size].to_vec())?;
        let exact = support(&cdf, &x)?;
        let est = mc_threshold_support(&data, &x, SAMPLES, rng.gen())?;
        checks.push(Check::new(
            format!("mc dataset {r} itemset {x}"),
            est.covers(exact, 4.0),
            format!("exact {exact:.6} mc {:.6} +- {:.6}", est.mean, est.std_error),
        ));
    }
    Ok(checks)
}

fn suite_equivalence(seed: u64) -> crate::Result<Vec<Check>> {
    let mut checks = Vec::new();
    for r in 0..5u64 {
        let mut rng = replicate_rng(seed, 100 + r);
        let k = 10 + (r as usize % 3);
        let data = gen_independent(200, k, rng.gen())?;
        let cdf = truncated_cdf(&data, 0.25)?;
        let config = MinerConfig { min_support: 0.12, max_size: None, ..Default::default() };
        let fast = mine(&cdf, &config)?;
        let slow = brute_force_mine(&cdf, config.min_support, k)?;
        let same = fast.len() == slow.len()
            && fast.iter().zip(&slow).all(|(a, b)| {
                a.itemset == b.itemset && (a.support_alpha - b.support_alpha).abs() <= 1e-12
            });
        checks.push(Check::new(
            format!("equivalence instance {r} (K={k})"),
            same,
            format!("dfs {} patterns, brute force {}", fast.len(), slow.len()),
        ));
    }
    Ok(checks)
}

fn suite_normality(seed: u64) -> crate::Result<Vec<Check>> {
    let mut checks = Vec::new();
    for (m, lo, hi) in [(2, 0.85, 1.15), (3, 0.8, 1.2)] {
        let (mean, std) = empirical_z_distribution(500, 1000, m, seed.wrapping_add(m as u64))?;
        let mut detail = String::new();
        let _ = write!(detail, "mean {mean:.4} std {std:.4}");
        checks.push(Check::new(
            format!("normality m={m}"),
            mean.abs() <= 0.2 && (lo..=hi).contains(&std),
            detail,
        ));
    }
    Ok(checks)
}
