//! Experiment grids, parallel execution, summaries and file output.
//!
//! Every run gets its own stream seeded from `(master seed, cell index, run
//! index)`, so results do not depend on scheduling or thread count.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use rayon::prelude::*;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::analytics::{scramble_jump_scale, swap_jump_scale};
use crate::benchmarks::{BenchmarkKind, BenchmarkSpec};
use crate::ea::{run, Initial, RunConfig, RunRecord};
use crate::error::{Error, Result};
use crate::mutation::{OperatorName, VoidClass};
use crate::permutation::Permutation;
use crate::sampling::{derive_seed, stream, DEFAULT_BETA};

/// Budget used for `PLeadingOnes` and `PHam` unless configured otherwise.
pub const DEFAULT_BUDGET: u64 = 1_000_000_000;

/// Default cap on `evals_all`. For `PJump` this is 50 times the larger of
/// `e·(m!)²·C(n,m)` and `n^{2⌈m/2⌉}`, saturating at `u64::MAX`.
pub fn default_budget(kind: BenchmarkKind, n: usize, m: Option<usize>) -> u64 {
    match (kind, m) {
        (BenchmarkKind::PJump, Some(m)) => {
            let slowest = (std::f64::consts::E * scramble_jump_scale(n, m)).max(swap_jump_scale(n, m));
            let budget = 50.0 * slowest;
            if budget >= u64::MAX as f64 {
                u64::MAX
            } else {
                (budget.ceil() as u64).max(DEFAULT_BUDGET)
            }
        }
        _ => DEFAULT_BUDGET,
    }
}

/// Excludes grid points from an experiment; unset fields match anything.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SkipRule {
    pub operator: Option<OperatorName>,
    #[serde(default)]
    pub n: Option<usize>,
    #[serde(default)]
    pub m: Option<usize>,
}

impl SkipRule {
    fn matches(&self, operator: OperatorName, n: usize, m: Option<usize>) -> bool {
        self.operator.is_none_or(|o| o == operator)
            && self.n.is_none_or(|v| v == n)
            && self.m.is_none_or(|v| Some(v) == m)
    }
}

fn default_beta() -> f64 {
    DEFAULT_BETA
}

/// A grid of `(n, m, operator)` cells, each run `runs` times.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub benchmark: BenchmarkKind,
    pub n: Vec<usize>,
    /// Jump sizes; required for `PJump`, must be empty otherwise.
    #[serde(default)]
    pub m: Vec<usize>,
    pub operators: Vec<OperatorName>,
    #[serde(default = "default_beta")]
    pub beta: f64,
    pub runs: usize,
    #[serde(default)]
    pub seed: u64,
    /// Cap on `evals_all` per run; [`default_budget`] when absent.
    #[serde(default)]
    pub budget: Option<u64>,
    #[serde(default)]
    pub initial: Initial,
    #[serde(default)]
    pub skip: Vec<SkipRule>,
    /// Free-form description carried into output metadata.
    #[serde(default)]
    pub note: Option<String>,
}

/// One grid point of an experiment.
#[derive(Clone, Debug)]
pub struct Cell {
    pub index: usize,
    pub benchmark: BenchmarkSpec,
    pub kind: BenchmarkKind,
    pub n: usize,
    pub m: Option<usize>,
    pub operator: OperatorName,
    pub beta: Option<f64>,
    pub budget: u64,
}

impl ExperimentConfig {
    /// Single-cell configuration with default budget and random start.
    pub fn single(
        benchmark: BenchmarkKind,
        n: usize,
        m: Option<usize>,
        operator: OperatorName,
        runs: usize,
        seed: u64,
    ) -> Self {
        Self {
            benchmark,
            n: vec![n],
            m: m.into_iter().collect(),
            operators: vec![operator],
            beta: DEFAULT_BETA,
            runs,
            seed,
            budget: None,
            initial: Initial::UniformRandom,
            skip: Vec::new(),
            note: None,
        }
    }

    pub fn from_toml_str(s: &str) -> Result<Self> {
        let config: Self = toml::from_str(s).map_err(|e| Error::Config(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        let config: Self = serde_json::from_str(s).map_err(|e| Error::Config(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    /// Reads a `.json` file as JSON and anything else as TOML.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let parsed = if path.extension().is_some_and(|e| e == "json") {
            Self::from_json_str(&text)
        } else {
            Self::from_toml_str(&text)
        };
        parsed.map_err(|e| Error::Config(format!("{}: {e}", path.display())))
    }

    pub fn validate(&self) -> Result<()> {
        self.cells().map(|_| ())
    }

    /// Expands the grid in `n`, then `m`, then operator order. Skipped
    /// points do not consume a cell index.
    pub fn cells(&self) -> Result<Vec<Cell>> {
        if self.runs == 0 {
            return Err(Error::Config("runs must be at least 1".into()));
        }
        if self.n.is_empty() || self.operators.is_empty() {
            return Err(Error::Config("the n list and the operator list must be non-empty".into()));
        }
        let ms: Vec<Option<usize>> = match self.benchmark {
            BenchmarkKind::PJump if self.m.is_empty() => {
                return Err(Error::Config("pjump needs a non-empty m list".into()))
            }
            BenchmarkKind::PJump => self.m.iter().copied().map(Some).collect(),
            _ if !self.m.is_empty() => {
                return Err(Error::Config(format!("{} takes no m parameter", self.benchmark)))
            }
            _ => vec![None],
        };
        if self.budget == Some(0) {
            return Err(Error::Config("budget must be at least 1".into()));
        }
        let mut cells = Vec::new();
        for &n in &self.n {
            for &m in &ms {
                let benchmark = BenchmarkSpec::from_kind(self.benchmark, n, m)?;
                for &operator in &self.operators {
                    if self.skip.iter().any(|r| r.matches(operator, n, m)) {
                        continue;
                    }
                    // validates beta and the operator against n
                    let spec = operator.build(n, self.beta)?;
                    RunConfig::new(benchmark.clone(), spec, Some(1), self.initial.clone(), 0)?;
                    cells.push(Cell {
                        index: cells.len(),
                        benchmark: benchmark.clone(),
                        kind: self.benchmark,
                        n,
                        m,
                        operator,
                        beta: operator.is_heavy_tailed().then_some(self.beta),
                        budget: self.budget.unwrap_or_else(|| default_budget(self.benchmark, n, m)),
                    });
                }
            }
        }
        if cells.is_empty() {
            return Err(Error::Config("every grid point is skipped".into()));
        }
        Ok(cells)
    }
}

/// One run as written to CSV and JSON output.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentRecord {
    pub benchmark: BenchmarkKind,
    pub n: usize,
    pub m: Option<usize>,
    pub operator: OperatorName,
    pub beta: Option<f64>,
    pub run_index: usize,
    pub seed: u64,
    pub success: bool,
    pub evals_all: u64,
    pub evals_effective: u64,
    pub easy_void: u64,
    pub hard_void: u64,
    pub final_fitness: f64,
    pub censored: bool,
}

/// Column order of record CSV files.
pub const RECORD_COLUMNS: [&str; 14] = [
    "benchmark",
    "n",
    "m",
    "operator",
    "beta",
    "run_index",
    "seed",
    "success",
    "evals_all",
    "evals_effective",
    "easy_void",
    "hard_void",
    "final_fitness",
    "censored",
];

impl ExperimentRecord {
    fn from_run(cell: &Cell, run_index: usize, rec: RunRecord) -> Self {
        Self {
            benchmark: cell.kind,
            n: cell.n,
            m: cell.m,
            operator: cell.operator,
            beta: cell.beta,
            run_index,
            seed: rec.seed,
            success: rec.success,
            evals_all: rec.evals_all,
            evals_effective: rec.evals_effective,
            easy_void: rec.easy_void_count,
            hard_void: rec.hard_void_count,
            final_fitness: rec.final_fitness,
            censored: !rec.success,
        }
    }

    /// Mutation iterations, i.e. `evals_all` minus the initial evaluation.
    pub fn iterations(&self) -> u64 {
        self.evals_all - 1
    }

    fn cell_key(&self) -> CellKey {
        CellKey {
            benchmark: self.benchmark,
            n: self.n,
            m: self.m,
            operator: self.operator,
            beta_bits: self.beta.map(f64::to_bits),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
struct CellKey {
    benchmark: BenchmarkKind,
    m: Option<usize>,
    operator: OperatorName,
    beta_bits: Option<u64>,
    n: usize,
}

fn run_cell(config: &ExperimentConfig, cell: &Cell, run_index: usize) -> ExperimentRecord {
    let seed = derive_seed(config.seed, cell.index as u64, run_index as u64);
    let operator = cell
        .operator
        .build(cell.n, config.beta)
        .expect("operator validated when the grid was built");
    let rc = RunConfig::new(
        cell.benchmark.clone(),
        operator,
        Some(cell.budget),
        config.initial.clone(),
        seed,
    )
    .expect("run configuration validated when the grid was built");
    ExperimentRecord::from_run(cell, run_index, run(&rc))
}

/// Runs every cell `runs` times on the global rayon pool. Records come back
/// ordered by `(cell index, run index)`.
pub fn run_experiment(config: &ExperimentConfig) -> Result<Vec<ExperimentRecord>> {
    let cells = config.cells()?;
    let jobs: Vec<(usize, usize)> = (0..cells.len())
        .flat_map(|c| (0..config.runs).map(move |r| (c, r)))
        .collect();
    Ok(jobs
        .par_iter()
        .map(|&(c, r)| run_cell(config, &cells[c], r))
        .collect())
}

/// [`run_experiment`] on a dedicated pool with `threads` workers.
pub fn run_experiment_with_threads(
    config: &ExperimentConfig,
    threads: usize,
) -> Result<Vec<ExperimentRecord>> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::Config(format!("cannot start {threads} worker threads: {e}")))?;
    pool.install(|| run_experiment(config))
}

/// Statistics of one cell over its uncensored runs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CellSummary {
    pub benchmark: BenchmarkKind,
    pub n: usize,
    pub m: Option<usize>,
    pub operator: OperatorName,
    pub beta: Option<f64>,
    pub runs: usize,
    pub censored: usize,
    pub mean_evals_all: Option<f64>,
    pub std_evals_all: Option<f64>,
    pub var_evals_all: Option<f64>,
    pub mean_evals_effective: Option<f64>,
    pub std_evals_effective: Option<f64>,
    pub var_evals_effective: Option<f64>,
    /// Set when only one run is uncensored; standard deviations then read 0.
    pub std_undefined: bool,
    /// Easy voids over mutation iterations, pooled over all runs of the cell.
    pub easy_void_rate: Option<f64>,
    pub hard_void_rate: Option<f64>,
}

pub const SUMMARY_COLUMNS: [&str; 16] = [
    "benchmark",
    "n",
    "m",
    "operator",
    "beta",
    "runs",
    "censored",
    "mean_evals_all",
    "std_evals_all",
    "var_evals_all",
    "mean_evals_effective",
    "std_evals_effective",
    "var_evals_effective",
    "std_undefined",
    "easy_void_rate",
    "hard_void_rate",
];

impl CellSummary {
    pub fn all_censored(&self) -> bool {
        self.censored == self.runs
    }
}

/// Mean and Bessel-corrected variance from exact integer sums.
fn moments(values: impl Iterator<Item = u64>) -> Option<(f64, f64)> {
    let (mut k, mut s, mut sq) = (0u128, 0u128, 0u128);
    for v in values {
        let v = v as u128;
        k += 1;
        s += v;
        sq += v * v;
    }
    if k == 0 {
        return None;
    }
    let mean = s as f64 / k as f64;
    let var = if k < 2 {
        0.0
    } else {
        (k * sq - s * s) as f64 / (k * (k - 1)) as f64
    };
    Some((mean, var))
}

/// Groups records by cell and summarizes each group. Output is sorted by
/// benchmark, `m`, operator, `β`, then `n`, and does not depend on input order.
pub fn summarize(records: &[ExperimentRecord]) -> Vec<CellSummary> {
    let mut groups: BTreeMap<CellKey, Vec<&ExperimentRecord>> = BTreeMap::new();
    for r in records {
        groups.entry(r.cell_key()).or_default().push(r);
    }
    groups
        .into_iter()
        .map(|(key, rs)| {
            let ok = || rs.iter().filter(|r| !r.censored);
            let all = moments(ok().map(|r| r.evals_all));
            let eff = moments(ok().map(|r| r.evals_effective));
            let uncensored = ok().count();
            let iterations: u128 = rs.iter().map(|r| r.iterations() as u128).sum();
            let rate = |count: u128| (iterations > 0).then(|| count as f64 / iterations as f64);
            CellSummary {
                benchmark: key.benchmark,
                n: key.n,
                m: key.m,
                operator: key.operator,
                beta: key.beta_bits.map(f64::from_bits),
                runs: rs.len(),
                censored: rs.len() - uncensored,
                mean_evals_all: all.map(|x| x.0),
                std_evals_all: all.map(|x| x.1.sqrt()),
                var_evals_all: all.map(|x| x.1),
                mean_evals_effective: eff.map(|x| x.0),
                std_evals_effective: eff.map(|x| x.1.sqrt()),
                var_evals_effective: eff.map(|x| x.1),
                std_undefined: uncensored < 2,
                easy_void_rate: rate(rs.iter().map(|r| r.easy_void as u128).sum()),
                hard_void_rate: rate(rs.iter().map(|r| r.hard_void as u128).sum()),
            }
        })
        .collect()
}

/// Ratio of means between consecutive problem sizes of one curve.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScalingRow {
    pub benchmark: BenchmarkKind,
    pub m: Option<usize>,
    pub operator: OperatorName,
    pub beta: Option<f64>,
    pub n1: usize,
    pub n2: usize,
    pub ratio_all: Option<f64>,
    pub ratio_effective: Option<f64>,
    /// `(n2/n1)^p`.
    pub hypothesis: f64,
}

/// Compares consecutive-`n` mean ratios of each curve against `(n₂/n₁)^p`.
/// Curves with a single `n` contribute no rows.
pub fn scaling_report(summaries: &[CellSummary], exponent: f64) -> Vec<ScalingRow> {
    let mut curves: BTreeMap<_, Vec<&CellSummary>> = BTreeMap::new();
    for s in summaries {
        curves
            .entry((s.benchmark, s.m, s.operator, s.beta.map(f64::to_bits)))
            .or_default()
            .push(s);
    }
    let ratio = |a: Option<f64>, b: Option<f64>| match (a, b) {
        (Some(a), Some(b)) if a > 0.0 => Some(b / a),
        _ => None,
    };
    let mut rows = Vec::new();
    for (_, mut curve) in curves {
        curve.sort_by_key(|s| s.n);
        for pair in curve.windows(2) {
            let (a, b) = (pair[0], pair[1]);
            rows.push(ScalingRow {
                benchmark: a.benchmark,
                m: a.m,
                operator: a.operator,
                beta: a.beta,
                n1: a.n,
                n2: b.n,
                ratio_all: ratio(a.mean_evals_all, b.mean_evals_all),
                ratio_effective: ratio(a.mean_evals_effective, b.mean_evals_effective),
                hypothesis: (b.n as f64 / a.n as f64).powf(exponent),
            });
        }
    }
    rows
}

/// Monte-Carlo void counts of one operator applied to random parents.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VoidRateEstimate {
    pub operator: OperatorName,
    pub n: usize,
    pub samples: u64,
    pub easy_void: u64,
    pub hard_void: u64,
}

impl VoidRateEstimate {
    pub fn easy_rate(&self) -> f64 {
        self.easy_void as f64 / self.samples as f64
    }

    pub fn hard_rate(&self) -> f64 {
        self.hard_void as f64 / self.samples as f64
    }
}

const VOID_CHUNK: u64 = 1 << 16;

/// Applies `operator` `samples` times, in parallel chunks that each draw a
/// fresh uniform parent from their own stream `(seed, operator, chunk)`.
pub fn estimate_void_rate(
    operator: OperatorName,
    n: usize,
    beta: f64,
    samples: u64,
    seed: u64,
) -> Result<VoidRateEstimate> {
    let spec = operator.build(n, beta)?;
    if n < 2 {
        return Err(Error::NoTransposition(n));
    }
    let op_index = OperatorName::ALL.iter().position(|&o| o == operator).unwrap_or(0) as u64;
    let chunks = samples.div_ceil(VOID_CHUNK);
    let (easy_void, hard_void) = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = stream(derive_seed(seed, op_index, c));
            let parent = Permutation::uniform_random(n, &mut rng);
            let mut child = parent.clone();
            let len = VOID_CHUNK.min(samples - c * VOID_CHUNK);
            let (mut easy, mut hard) = (0u64, 0u64);
            for _ in 0..len {
                match spec
                    .mutate_into(&parent, &mut child, &mut rng)
                    .expect("size checked above")
                    .void_class
                {
                    VoidClass::EasyVoid => easy += 1,
                    VoidClass::HardVoid => hard += 1,
                    VoidClass::NotVoid => {}
                }
            }
            (easy, hard)
        })
        .reduce(|| (0, 0), |a, b| (a.0 + b.0, a.1 + b.1));
    Ok(VoidRateEstimate {
        operator,
        n,
        samples,
        easy_void,
        hard_void,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

impl std::str::FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            _ => Err(Error::UnknownName(s.to_string())),
        }
    }
}

/// Writes rows as a CSV table with a fixed header (also for zero rows) or
/// as a pretty-printed JSON array. `label` names the sink in errors.
pub fn write_rows<T: Serialize, W: Write>(
    rows: &[T],
    columns: &[&str],
    format: Format,
    writer: W,
    label: &Path,
) -> Result<()> {
    match format {
        Format::Csv => {
            let csv_err = |source| Error::Csv {
                path: label.to_path_buf(),
                source,
            };
            let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(writer);
            w.write_record(columns).map_err(csv_err)?;
            for row in rows {
                w.serialize(row).map_err(csv_err)?;
            }
            w.flush().map_err(|source| Error::Io {
                path: label.to_path_buf(),
                source,
            })
        }
        Format::Json => {
            let mut writer = writer;
            serde_json::to_writer_pretty(&mut writer, rows).map_err(|source| Error::Json {
                path: label.to_path_buf(),
                source,
            })?;
            writeln!(writer).map_err(|source| Error::Io {
                path: label.to_path_buf(),
                source,
            })
        }
    }
}

/// Reads rows written by [`write_rows`].
pub fn read_rows<T: DeserializeOwned, R: Read>(reader: R, format: Format, label: &Path) -> Result<Vec<T>> {
    match format {
        Format::Csv => csv::Reader::from_reader(reader)
            .deserialize()
            .collect::<std::result::Result<_, _>>()
            .map_err(|source| Error::Csv {
                path: label.to_path_buf(),
                source,
            }),
        Format::Json => serde_json::from_reader(reader).map_err(|source| Error::Json {
            path: label.to_path_buf(),
            source,
        }),
    }
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    File::create(path).map(BufWriter::new).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn open(path: &Path) -> Result<BufReader<File>> {
    File::open(path).map(BufReader::new).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn write_records(records: &[ExperimentRecord], format: Format, path: &Path) -> Result<()> {
    write_rows(records, &RECORD_COLUMNS, format, create(path)?, path)
}

pub fn read_records(path: &Path, format: Format) -> Result<Vec<ExperimentRecord>> {
    read_rows(open(path)?, format, path)
}

pub fn write_summaries(summaries: &[CellSummary], format: Format, path: &Path) -> Result<()> {
    write_rows(summaries, &SUMMARY_COLUMNS, format, create(path)?, path)
}

pub fn read_summaries(path: &Path, format: Format) -> Result<Vec<CellSummary>> {
    read_rows(open(path)?, format, path)
}

/// Infers the format from the file extension, defaulting to CSV.
pub fn format_for(path: &Path) -> Format {
    if path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json")) {
        Format::Json
    } else {
        Format::Csv
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn record(evals_all: u64, evals_effective: u64, censored: bool) -> ExperimentRecord {
        ExperimentRecord {
            benchmark: BenchmarkKind::PLeadingOnes,
            n: 10,
            m: None,
            operator: OperatorName::SwapPoi,
            beta: None,
            run_index: 0,
            seed: 0,
            success: !censored,
            evals_all,
            evals_effective,
            easy_void: evals_all - evals_effective,
            hard_void: 0,
            final_fitness: 10.0,
            censored,
        }
    }

    fn summary(n: usize, mean: f64) -> CellSummary {
        let mut s = summarize(&[record(2, 2, false)]).remove(0);
        s.n = n;
        s.mean_evals_all = Some(mean);
        s.mean_evals_effective = Some(mean);
        s
    }

    #[test]
    fn identity_start_gives_one_record_with_one_evaluation() {
        let mut config = ExperimentConfig::single(
            BenchmarkKind::PLeadingOnes,
            8,
            None,
            OperatorName::SwapPoi,
            1,
            3,
        );
        config.initial = Initial::Provided(Permutation::identity(8));
        let records = run_experiment(&config).unwrap();
        assert_eq!(records.len(), 1);
        assert_eq!(records[0].evals_all, 1);
        assert!(records[0].success && !records[0].censored);
    }

    #[test]
    fn grid_size_and_order() {
        let config = ExperimentConfig {
            benchmark: BenchmarkKind::PLeadingOnes,
            n: vec![5, 6],
            m: vec![],
            operators: OperatorName::ALL.to_vec(),
            beta: 1.5,
            runs: 3,
            seed: 11,
            budget: None,
            initial: Initial::UniformRandom,
            skip: vec![],
            note: None,
        };
        let records = run_experiment(&config).unwrap();
        assert_eq!(records.len(), 2 * 4 * 3);
        assert_eq!(records[0].n, 5);
        assert_eq!(records[3].operator, OperatorName::SwapHt);
        assert_eq!(records[23].n, 6);
        assert_eq!(records[23].run_index, 2);
        assert_eq!(records[23].seed, derive_seed(11, 7, 2));
        assert_eq!(records[1].beta, None);
        assert_eq!(records[3].beta, Some(1.5));
        assert_eq!(records, run_experiment(&config).unwrap());
    }

    #[test]
    fn skip_rules_and_validation() {
        let mut config = ExperimentConfig::single(
            BenchmarkKind::PJump,
            10,
            Some(3),
            OperatorName::ScramblePoi,
            1,
            0,
        );
        config.m = vec![3, 4];
        config.skip = vec![SkipRule {
            operator: Some(OperatorName::ScramblePoi),
            n: None,
            m: Some(4),
        }];
        let cells = config.cells().unwrap();
        assert_eq!(cells.len(), 1);
        assert_eq!(cells[0].m, Some(3));
        assert_eq!(cells[0].budget, default_budget(BenchmarkKind::PJump, 10, Some(3)));

        let mut bad = config.clone();
        bad.runs = 0;
        assert!(bad.cells().is_err());
        let mut bad = config.clone();
        bad.m.clear();
        assert!(bad.cells().is_err());
        let mut bad = config.clone();
        bad.m = vec![11];
        assert!(bad.cells().is_err());
        let mut bad = config.clone();
        bad.benchmark = BenchmarkKind::PHam;
        assert!(bad.cells().is_err());
        let mut bad = config;
        bad.operators = vec![OperatorName::ScrambleHt];
        bad.beta = 0.5;
        assert!(bad.cells().is_err());
    }

    #[test]
    fn config_parses_from_toml_and_json() {
        let toml = r#"
            benchmark = "pjump"
            n = [20]
            m = [3, 4]
            operators = ["swap-poi", "scramble-ht"]
            runs = 30
            seed = 7
            [[skip]]
            operator = "scramble-ht"
            m = 4
        "#;
        let config = ExperimentConfig::from_toml_str(toml).unwrap();
        assert_eq!(config.beta, 1.5);
        assert_eq!(config.cells().unwrap().len(), 3);
        let json = serde_json::to_string(&config).unwrap();
        assert_eq!(ExperimentConfig::from_json_str(&json).unwrap(), config);
        assert!(ExperimentConfig::from_toml_str("benchmark = \"pjump\"\nn = [20]\noperators = []\nruns = 1").is_err());
        assert!(ExperimentConfig::from_toml_str("bogus = 1").is_err());
    }

    #[test]
    fn default_budgets() {
        assert_eq!(default_budget(BenchmarkKind::PLeadingOnes, 200, None), 1_000_000_000);
        let b = default_budget(BenchmarkKind::PJump, 20, Some(4));
        assert!(b as f64 >= 50.0 * std::f64::consts::E * 576.0 * 4845.0);
        assert_eq!(default_budget(BenchmarkKind::PJump, 200, Some(100)), u64::MAX);
    }

    #[test]
    fn summary_statistics() {
        let s = summarize(&[record(2, 2, false), record(4, 4, false)]);
        assert_eq!(s.len(), 1);
        assert_eq!(s[0].mean_evals_all, Some(3.0));
        assert!((s[0].std_evals_all.unwrap() - 2f64.sqrt()).abs() < 1e-12);
        assert!(!s[0].std_undefined);

        let s = summarize(&[record(7, 5, false)]).remove(0);
        assert_eq!(s.mean_evals_all, Some(7.0));
        assert_eq!(s.std_evals_all, Some(0.0));
        assert!(s.std_undefined);
        assert_eq!(s.easy_void_rate, Some(2.0 / 6.0));

        let s = summarize(&[record(9, 9, true), record(9, 9, true)]).remove(0);
        assert!(s.all_censored());
        assert_eq!(s.mean_evals_all, None);
        assert!(s.std_undefined);

        let s = summarize(&[record(9, 9, true), record(3, 3, false)]).remove(0);
        assert_eq!((s.censored, s.mean_evals_all), (1, Some(3.0)));
    }

    #[test]
    fn variance_is_square_of_std() {
        let records: Vec<_> = (1..40u64).map(|i| record(i * i * 977 + 3, i * 5 + 1, false)).collect();
        let s = summarize(&records).remove(0);
        let (sd, var) = (s.std_evals_all.unwrap(), s.var_evals_all.unwrap());
        assert!(((sd * sd - var) / var).abs() < 1e-9);
    }

    #[test]
    fn summaries_ignore_record_order() {
        let config = ExperimentConfig {
            benchmark: BenchmarkKind::PHam,
            n: vec![6, 7],
            m: vec![],
            operators: vec![OperatorName::SwapPoi, OperatorName::ScrambleHt],
            beta: 1.5,
            runs: 5,
            seed: 2,
            budget: None,
            initial: Initial::UniformRandom,
            skip: vec![],
            note: None,
        };
        let mut records = run_experiment(&config).unwrap();
        let forward = summarize(&records);
        records.reverse();
        records.swap(1, 7);
        assert_eq!(summarize(&records), forward);
    }

    #[test]
    fn scaling_ratios() {
        let c = 0.37;
        let rows = scaling_report(&[summary(150, c * 150f64.powi(3)), summary(200, c * 200f64.powi(3))], 3.0);
        assert_eq!(rows.len(), 1);
        assert!((rows[0].ratio_all.unwrap() - 64.0 / 27.0).abs() < 1e-12);
        assert!((rows[0].hypothesis - 2.370_370).abs() < 1e-6);

        let rows = scaling_report(&[summary(10, 5.0), summary(20, 5.0)], 3.0);
        assert_eq!(rows[0].ratio_effective, Some(1.0));
        assert!((rows[0].hypothesis - 8.0).abs() < 1e-12);

        let rows = scaling_report(&[summary(200, 3.0 * 40000.0), summary(100, 3.0 * 10000.0)], 2.0);
        assert_eq!((rows[0].n1, rows[0].n2), (100, 200));
        assert!((rows[0].ratio_all.unwrap() - 4.0).abs() < 1e-12);
        assert!((rows[0].hypothesis - 4.0).abs() < 1e-12);

        assert!(scaling_report(&[summary(10, 1.0)], 1.0).is_empty());
    }

    #[test]
    fn empty_csv_has_header_only() {
        let mut buf = Vec::new();
        write_rows::<ExperimentRecord, _>(&[], &RECORD_COLUMNS, Format::Csv, &mut buf, Path::new("-")).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), format!("{}\n", RECORD_COLUMNS.join(",")));
    }

    #[test]
    fn csv_columns_match_serialized_fields() {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.serialize(record(3, 2, false)).unwrap();
        let text = String::from_utf8(w.into_inner().unwrap()).unwrap();
        assert_eq!(text.lines().next().unwrap(), RECORD_COLUMNS.join(","));

        let mut w = csv::Writer::from_writer(Vec::new());
        w.serialize(summarize(&[record(3, 2, false)]).remove(0)).unwrap();
        let text = String::from_utf8(w.into_inner().unwrap()).unwrap();
        assert_eq!(text.lines().next().unwrap(), SUMMARY_COLUMNS.join(","));
    }

    #[test]
    fn file_round_trips() {
        let dir = tempfile::tempdir().unwrap();
        let mut config = ExperimentConfig::single(
            BenchmarkKind::PJump,
            8,
            Some(3),
            OperatorName::ScrambleHt,
            4,
            9,
        );
        config.operators.push(OperatorName::SwapPoi);
        let records = run_experiment(&config).unwrap();
        let summaries = summarize(&records);
        for format in [Format::Csv, Format::Json] {
            let path = dir.path().join(format!("records.{format:?}"));
            write_records(&records, format, &path).unwrap();
            assert_eq!(read_records(&path, format).unwrap(), records);
            assert_eq!(summarize(&read_records(&path, format).unwrap()), summaries);
            let path = dir.path().join(format!("summary.{format:?}"));
            write_summaries(&summaries, format, &path).unwrap();
            assert_eq!(read_summaries(&path, format).unwrap(), summaries);
        }
        let path = dir.path().join("r.json");
        write_records(&records, Format::Json, &path).unwrap();
        let value: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
        let first = value.as_array().unwrap()[0].as_object().unwrap();
        for key in RECORD_COLUMNS {
            assert!(first.contains_key(key), "{key}");
        }
    }

    #[test]
    fn io_errors_carry_the_path() {
        let err = write_records(&[], Format::Csv, Path::new("/nonexistent/dir/out.csv")).unwrap_err();
        assert!(err.to_string().contains("/nonexistent/dir/out.csv"));
    }

    #[test]
    fn void_rate_estimates() {
        let est = estimate_void_rate(OperatorName::SwapPoi, 30, 1.5, 200_000, 4).unwrap();
        assert_eq!(est.samples, 200_000);
        assert!((est.easy_rate() - (-1.0f64).exp()).abs() < 0.005);
        assert!(est.hard_rate() < 0.01);
        assert_eq!(est, estimate_void_rate(OperatorName::SwapPoi, 30, 1.5, 200_000, 4).unwrap());
        let est = estimate_void_rate(OperatorName::SwapHt, 30, 1.5, 100_000, 4).unwrap();
        assert_eq!(est.easy_void, 0);
        let est = estimate_void_rate(OperatorName::ScrambleHt, 30, 1.5, 10, 4).unwrap();
        assert_eq!(est.hard_void, 0);
        assert!(estimate_void_rate(OperatorName::SwapPoi, 1, 1.5, 10, 0).is_err());
    }

    #[test]
    fn format_inference() {
        assert_eq!(format_for(Path::new("a.JSON")), Format::Json);
        assert_eq!(format_for(Path::new("a.csv")), Format::Csv);
        assert_eq!("json".parse::<Format>().unwrap(), Format::Json);
    }
}
