//! Command-line front end: `prepare`, `run` and `stats`.
//!
//! Exit codes: 0 success, 1 usage error, 2 data error, 3 training error.

use std::collections::HashMap;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::eval::{
    grid_search, split_folds, GridReport, GridSpec, LearnerGrid, MetricCurve, MetricOptions, RecommenderKind,
    StatTestResult, TuningMode,
};
use crate::ingest::{load_dataset, preset, read_interactions, write_interactions, DatasetSpec, DatasetStats, PRESET_NAMES};
use crate::interactions::InteractionMatrix;
use crate::recommend::{Metric, DEFAULT_RATIOS};

pub const CANONICAL_FILE: &str = "interactions.tsv";
pub const STATS_FILE: &str = "stats.txt";
pub const RESULTS_JSON: &str = "results.json";
pub const RESULTS_CSV: &str = "results.csv";
pub const CURVES_DIR: &str = "curves";
pub const CHECKPOINT_DIR: &str = "checkpoints";

#[derive(Debug, Parser)]
#[command(name = "wsims", version, about = "Weighted user-item / item-item similarity recommender experiments")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Parse and preprocess a raw dataset into a canonical interactions file.
    Prepare(PrepareArgs),
    /// Run the cross-validated grid search and write result files.
    Run(RunArgs),
    /// Friedman test and Nemenyi critical difference over a results table.
    Stats(StatsArgs),
}

#[derive(Debug, Args)]
pub struct PrepareArgs {
    /// Built-in dataset layout (see --help for names); requires --input.
    #[arg(long, conflicts_with = "spec", requires = "input")]
    pub preset: Option<String>,
    /// Raw ratings/events file read with --preset.
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// TOML dataset description (name, path, columns, delimiter, ...).
    #[arg(long)]
    pub spec: Option<PathBuf>,
    /// Output directory for the canonical file and the stats line.
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
}

#[derive(Debug, Default, Args)]
pub struct RunArgs {
    /// TOML run configuration; flags override its fields.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Prepared canonical interactions file.
    #[arg(long)]
    pub dataset: Option<PathBuf>,
    /// als, bpr or external (default grid of that learner).
    #[arg(long)]
    pub learner: Option<String>,
    /// Per-fold embedding file template for the external learner, `{fold}` = 0..4.
    #[arg(long)]
    pub embeddings: Option<String>,
    /// reuse or fine_tune.
    #[arg(long)]
    pub mode: Option<String>,
    /// Seed for the fold split and the learners.
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub n_max: Option<usize>,
    /// Comma-separated similarities: dot, cosine.
    #[arg(long, value_delimiter = ',')]
    pub metric: Option<Vec<String>>,
    /// Comma-separated `w_R:w_S` pairs, e.g. `0.25:0.75,0.5:0.5`.
    #[arg(long)]
    pub weights: Option<String>,
    /// Output directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct StatsArgs {
    /// CSV table: wide (dataset,<model>...) or long (dataset,model,value[,metric]).
    pub table: PathBuf,
    #[arg(long, default_value_t = 0.10)]
    pub alpha: f64,
    /// Rows of a long table kept when it has a `metric` column.
    #[arg(long, default_value = "ndcg@10")]
    pub metric: String,
}

/// Where the interactions of a run come from.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged, deny_unknown_fields)]
pub enum DatasetSource {
    Prepared { prepared: PathBuf },
    Preset { preset: String, path: PathBuf },
    Raw(DatasetSpec),
}

impl DatasetSource {
    pub fn name(&self) -> String {
        match self {
            DatasetSource::Prepared { prepared } => {
                let stem = prepared.file_stem().and_then(|s| s.to_str()).unwrap_or("dataset");
                if stem == "interactions" {
                    prepared
                        .parent()
                        .and_then(Path::file_name)
                        .and_then(|s| s.to_str())
                        .unwrap_or(stem)
                        .to_owned()
                } else {
                    stem.to_owned()
                }
            }
            DatasetSource::Preset { preset, .. } => preset.clone(),
            DatasetSource::Raw(spec) => spec.name.clone(),
        }
    }

    fn resolve(&mut self, base: &Path) {
        let join = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        match self {
            DatasetSource::Prepared { prepared } => join(prepared),
            DatasetSource::Preset { path, .. } => join(path),
            DatasetSource::Raw(spec) => join(&mut spec.path),
        }
    }

    pub fn load(&self) -> Result<InteractionMatrix> {
        match self {
            DatasetSource::Prepared { prepared } => read_interactions(prepared),
            DatasetSource::Preset { preset: name, path } => {
                let spec = preset(name, path).ok_or_else(|| unknown_preset(name))?;
                Ok(load_dataset(&spec)?.0)
            }
            DatasetSource::Raw(spec) => {
                spec.validate()?;
                Ok(load_dataset(spec)?.0)
            }
        }
    }
}

fn unknown_preset(name: &str) -> Error {
    Error::InvalidConfig(format!("unknown preset {name:?}; known: {}", PRESET_NAMES.join(", ")))
}

/// One experiment: dataset, learner grid, ensemble grid and protocol settings.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub dataset: DatasetSource,
    #[serde(default = "LearnerGrid::als_default")]
    pub learner: LearnerGrid,
    #[serde(default = "default_ratios")]
    pub weights: Vec<(f64, f64)>,
    #[serde(default = "default_metrics")]
    pub metrics: Vec<Metric>,
    #[serde(default = "default_n_max")]
    pub n_max: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_mode")]
    pub mode: TuningMode,
    #[serde(default)]
    pub metric_options: MetricOptions,
    #[serde(default = "default_out")]
    pub out: PathBuf,
}

fn default_ratios() -> Vec<(f64, f64)> {
    DEFAULT_RATIOS.to_vec()
}

fn default_metrics() -> Vec<Metric> {
    Metric::ALL.to_vec()
}

fn default_n_max() -> usize {
    20
}

fn default_mode() -> TuningMode {
    TuningMode::Reuse
}

fn default_out() -> PathBuf {
    PathBuf::from("results")
}

impl RunConfig {
    pub fn new(dataset: DatasetSource, learner: LearnerGrid) -> Self {
        Self {
            dataset,
            learner,
            weights: default_ratios(),
            metrics: default_metrics(),
            n_max: default_n_max(),
            seed: 0,
            mode: default_mode(),
            metric_options: MetricOptions::default(),
            out: default_out(),
        }
    }

    /// Parses a TOML configuration; relative input paths are taken relative
    /// to `base`.
    pub fn from_toml(text: &str, base: &Path) -> Result<Self> {
        let mut cfg: RunConfig = toml::from_str(text)?;
        cfg.dataset.resolve(base);
        if let LearnerGrid::External { embeddings } = &mut cfg.learner {
            for p in embeddings {
                if Path::new(p).is_relative() {
                    *p = base.join(&*p).to_string_lossy().into_owned();
                }
            }
        }
        if cfg.out.is_relative() {
            cfg.out = base.join(&cfg.out);
        }
        cfg.learner.set_seed(cfg.seed);
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml(&text, path.parent().unwrap_or(Path::new("")))
    }

    /// Resolves a configuration from an optional file plus flag overrides.
    pub fn from_args(args: &RunArgs) -> Result<Self> {
        let mut cfg = match (&args.config, &args.dataset) {
            (Some(path), _) => Self::load(path)?,
            (None, Some(dataset)) => Self::new(
                DatasetSource::Prepared {
                    prepared: dataset.clone(),
                },
                LearnerGrid::als_default(),
            ),
            (None, None) => return Err(Error::InvalidConfig("either --config or --dataset is required".into())),
        };
        if let Some(dataset) = &args.dataset {
            cfg.dataset = DatasetSource::Prepared {
                prepared: dataset.clone(),
            };
        }
        if let Some(name) = &args.learner {
            if name != cfg.learner.name() {
                cfg.learner = match name.as_str() {
                    "als" => LearnerGrid::als_default(),
                    "bpr" => LearnerGrid::bpr_default(),
                    "external" => LearnerGrid::External { embeddings: Vec::new() },
                    other => return Err(Error::InvalidConfig(format!("unknown learner {other:?}"))),
                };
            }
        }
        if let Some(template) = &args.embeddings {
            match &mut cfg.learner {
                LearnerGrid::External { embeddings } => *embeddings = vec![template.clone()],
                _ => return Err(Error::InvalidConfig("--embeddings requires the external learner".into())),
            }
        }
        if let Some(mode) = &args.mode {
            cfg.mode = parse_mode(mode)?;
        }
        if let Some(seed) = args.seed {
            cfg.seed = seed;
        }
        if let Some(n) = args.n_max {
            cfg.n_max = n;
        }
        if let Some(metrics) = &args.metric {
            cfg.metrics = metrics.iter().map(|m| m.parse()).collect::<Result<_>>()?;
        }
        if let Some(w) = &args.weights {
            cfg.weights = parse_weights(w)?;
        }
        if let Some(out) = &args.out {
            cfg.out = out.clone();
        }
        cfg.learner.set_seed(cfg.seed);
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_max == 0 {
            return Err(Error::InvalidConfig("n_max must be at least 1".into()));
        }
        if let LearnerGrid::External { embeddings } = &self.learner {
            if embeddings.is_empty() {
                return Err(Error::InvalidConfig("the external learner requires an embeddings path".into()));
            }
        }
        self.grid_spec().validate()
    }

    pub fn grid_spec(&self) -> GridSpec {
        GridSpec {
            learner: self.learner.clone(),
            weight_ratios: self.weights.clone(),
            metrics: self.metrics.clone(),
            mode: self.mode,
            n_max: self.n_max,
            metric_options: self.metric_options,
        }
    }

    /// SHA-256 of the resolved configuration.
    pub fn hash(&self) -> Result<String> {
        Ok(sha256_hex(&serde_json::to_vec(self)?))
    }
}

pub fn parse_mode(s: &str) -> Result<TuningMode> {
    match s {
        "reuse" => Ok(TuningMode::Reuse),
        "fine_tune" | "fine-tune" => Ok(TuningMode::FineTune),
        other => Err(Error::InvalidConfig(format!("unknown mode {other:?} (reuse, fine_tune)"))),
    }
}

/// Parses `w_R:w_S` pairs separated by commas.
pub fn parse_weights(s: &str) -> Result<Vec<(f64, f64)>> {
    s.split(',')
        .map(|pair| {
            let bad = || Error::InvalidConfig(format!("bad weight pair {pair:?}, expected w_R:w_S"));
            let (r, w) = pair.trim().split_once(':').ok_or_else(bad)?;
            Ok((r.trim().parse().map_err(|_| bad())?, w.trim().parse().map_err(|_| bad())?))
        })
        .collect()
}

fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

/// Parses, preprocesses and writes `<out>/interactions.tsv` and
/// `<out>/stats.txt`; returns the stats.
pub fn cmd_prepare(spec: &DatasetSpec, out: &Path) -> Result<DatasetStats> {
    spec.validate()?;
    let (m, parsed) = load_dataset(spec)?;
    if parsed.rejected > 0 {
        log::warn!(
            "{}: {} rows rejected (first lines: {:?})",
            spec.name,
            parsed.rejected,
            parsed.rejected_lines
        );
    }
    let stats = DatasetStats::of(&m)?;
    fs::create_dir_all(out).map_err(|e| Error::io(out, e))?;
    write_interactions(&m, &out.join(CANONICAL_FILE))?;
    let stats_path = out.join(STATS_FILE);
    let line = format!(
        "{} {stats} parsed={} rejected={}\n",
        spec.name,
        parsed.records.len(),
        parsed.rejected
    );
    fs::write(&stats_path, &line).map_err(|e| Error::io(&stats_path, e))?;
    print!("{line}");
    Ok(stats)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub tool: String,
    pub version: String,
    pub config_hash: String,
    pub dataset_hash: String,
    pub fold_seed: u64,
    pub learner_seed: u64,
    pub learner: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FoldSummary {
    pub train_interactions: usize,
    pub test_interactions: usize,
    pub cold_start_dropped: usize,
}

/// Contents of `results.json`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunResults {
    pub provenance: Provenance,
    pub config: RunConfig,
    pub dataset: String,
    pub stats: DatasetStats,
    pub folds: Vec<FoldSummary>,
    pub report: GridReport,
}

fn dataset_hash(m: &InteractionMatrix) -> String {
    let mut h = Sha256::new();
    for (u, i) in m.iter() {
        h.update(m.user_map().id(u).as_bytes());
        h.update(b"\t");
        h.update(m.item_map().id(i).as_bytes());
        h.update(b"\n");
    }
    h.finalize().iter().map(|b| format!("{b:02x}")).collect()
}

fn learner_seed(l: &LearnerGrid) -> u64 {
    match l {
        LearnerGrid::Als { seed, .. } | LearnerGrid::Bpr { seed, .. } => *seed,
        LearnerGrid::External { .. } => 0,
    }
}

/// Cutoffs reported in `results.csv`.
fn report_cutoffs(n_max: usize) -> Vec<usize> {
    let mut out: Vec<usize> = [1, 5, 10, 20].into_iter().filter(|&n| n <= n_max).collect();
    if out.last() != Some(&n_max) {
        out.push(n_max);
    }
    out
}

/// Runs the full protocol and writes `results.json`, `results.csv` and
/// `curves/<learner>_<recommender>.csv` under `cfg.out`.
pub fn cmd_run(cfg: &RunConfig) -> Result<RunResults> {
    cfg.validate()?;
    let m = cfg.dataset.load()?;
    let stats = DatasetStats::of(&m)?;
    log::info!("{}: {stats}", cfg.dataset.name());
    let split = split_folds(&m, cfg.seed)?;
    fs::create_dir_all(&cfg.out).map_err(|e| Error::io(&cfg.out, e))?;
    let report = grid_search(&split, &cfg.grid_spec(), Some(&cfg.out.join(CHECKPOINT_DIR)))?;
    for e in &report.errors {
        log::warn!("grid cell {} failed: {}", e.hyper, e.message);
    }

    let results = RunResults {
        provenance: Provenance {
            tool: env!("CARGO_PKG_NAME").to_owned(),
            version: env!("CARGO_PKG_VERSION").to_owned(),
            config_hash: cfg.hash()?,
            dataset_hash: dataset_hash(&m),
            fold_seed: cfg.seed,
            learner_seed: learner_seed(&cfg.learner),
            learner: cfg.learner.name().to_owned(),
        },
        config: cfg.clone(),
        dataset: cfg.dataset.name(),
        stats,
        folds: split
            .folds
            .iter()
            .map(|f| FoldSummary {
                train_interactions: f.train.interaction_count(),
                test_interactions: f.test.len(),
                cold_start_dropped: f.cold_start_dropped,
            })
            .collect(),
        report,
    };
    write_results(&results, &cfg.out)?;
    for kind in RecommenderKind::ALL {
        let r = results.report.best().get(kind);
        let n = results.report.tuning_cutoff;
        println!(
            "{:<9} ndcg@{n}={:.4} hr@{n}={:.4}  {}  {}",
            kind.label(),
            r.mean.ndcg_at(n),
            r.mean.hr_at(n),
            r.hyper,
            r.recommender.weights
        );
    }
    Ok(results)
}

fn write_results(results: &RunResults, out: &Path) -> Result<()> {
    let json_path = out.join(RESULTS_JSON);
    let mut json = serde_json::to_string_pretty(results)?;
    json.push('\n');
    fs::write(&json_path, json).map_err(|e| Error::io(&json_path, e))?;

    let csv_path = out.join(RESULTS_CSV);
    let mut w = csv::Writer::from_path(&csv_path)?;
    w.write_record([
        "dataset",
        "model",
        "metric",
        "value",
        "mode",
        "hyper",
        "similarity",
        "w_user_item",
        "w_item_item",
    ])?;
    let best = results.report.best();
    let mode = match results.report.mode {
        TuningMode::Reuse => "reuse",
        TuningMode::FineTune => "fine_tune",
    };
    for kind in RecommenderKind::ALL {
        let r = best.get(kind);
        let model = format!("{}/{}", results.provenance.learner, kind.label());
        for n in report_cutoffs(r.mean.n_max()) {
            for (name, value) in [("ndcg", r.mean.ndcg_at(n)), ("hr", r.mean.hr_at(n))] {
                w.write_record([
                    results.dataset.clone(),
                    model.clone(),
                    format!("{name}@{n}"),
                    value.to_string(),
                    mode.to_owned(),
                    r.hyper.clone(),
                    r.recommender.weights.metric.to_string(),
                    r.recommender.weights.user_item.to_string(),
                    r.recommender.weights.item_item.to_string(),
                ])?;
            }
        }
    }
    w.flush().map_err(|e| Error::io(&csv_path, e))?;

    let curves = out.join(CURVES_DIR);
    fs::create_dir_all(&curves).map_err(|e| Error::io(&curves, e))?;
    for kind in RecommenderKind::ALL {
        let path = curves.join(format!("{}_{}.csv", results.provenance.learner, kind.label()));
        fs::write(&path, curve_csv(&best.get(kind).mean)).map_err(|e| Error::io(&path, e))?;
    }
    Ok(())
}

/// `N,ndcg,hr` with one row per cutoff.
pub fn curve_csv(c: &MetricCurve) -> String {
    let mut s = String::from("N,ndcg,hr\n");
    for n in 1..=c.n_max() {
        s.push_str(&format!("{n},{},{}\n", c.ndcg_at(n), c.hr_at(n)));
    }
    s
}

/// A complete datasets × models score table.
#[derive(Clone, Debug, PartialEq)]
pub struct StatsTable {
    pub datasets: Vec<String>,
    pub models: Vec<String>,
    /// `scores[dataset][model]`, NaN where the input had no value.
    pub scores: Vec<Vec<f64>>,
}

/// Reads a wide table (`dataset,<model>...`) or a long one
/// (`dataset,model,value` plus an optional `metric` column filtered on
/// `metric`).
pub fn read_stats_table(path: &Path, metric: &str) -> Result<StatsTable> {
    let mut r = csv::ReaderBuilder::new().trim(csv::Trim::All).from_path(path)?;
    let headers = r.headers()?.clone();
    let col = |name: &str| headers.iter().position(|h| h == name);
    let parse = |v: &str, row: usize| {
        v.parse::<f64>()
            .map_err(|_| Error::StatsInput(format!("row {row}: {v:?} is not a number")))
    };
    if let (Some(d), Some(m), Some(v)) = (col("dataset"), col("model"), col("value")) {
        let metric_col = col("metric");
        let mut datasets: Vec<String> = Vec::new();
        let mut models: Vec<String> = Vec::new();
        let mut cells: HashMap<(usize, usize), f64> = HashMap::new();
        for (row, rec) in r.records().enumerate() {
            let rec = rec?;
            if metric_col.is_some_and(|c| rec.get(c) != Some(metric)) {
                continue;
            }
            let field = |c: usize| rec.get(c).unwrap_or("");
            let di = index_or_push(&mut datasets, field(d));
            let mi = index_or_push(&mut models, field(m));
            if cells.insert((di, mi), parse(field(v), row + 2)?).is_some() {
                return Err(Error::StatsInput(format!(
                    "duplicate value for dataset {:?}, model {:?}",
                    field(d),
                    field(m)
                )));
            }
        }
        let scores = (0..datasets.len())
            .map(|di| {
                (0..models.len())
                    .map(|mi| cells.get(&(di, mi)).copied().unwrap_or(f64::NAN))
                    .collect()
            })
            .collect();
        return Ok(StatsTable {
            datasets,
            models,
            scores,
        });
    }
    let models: Vec<String> = headers.iter().skip(1).map(str::to_owned).collect();
    let mut datasets = Vec::new();
    let mut scores = Vec::new();
    for (row, rec) in r.records().enumerate() {
        let rec = rec?;
        datasets.push(rec.get(0).unwrap_or("").to_owned());
        let values = (1..=models.len())
            .map(|c| match rec.get(c) {
                None | Some("") => Ok(f64::NAN),
                Some(v) => parse(v, row + 2),
            })
            .collect::<Result<Vec<f64>>>()?;
        scores.push(values);
    }
    Ok(StatsTable {
        datasets,
        models,
        scores,
    })
}

fn index_or_push(names: &mut Vec<String>, name: &str) -> usize {
    match names.iter().position(|n| n == name) {
        Some(i) => i,
        None => {
            names.push(name.to_owned());
            names.len() - 1
        }
    }
}

/// Runs the Friedman/Nemenyi test on a table file and prints the outcome.
pub fn cmd_stats(path: &Path, alpha: f64, metric: &str) -> Result<(StatsTable, StatTestResult)> {
    let table = read_stats_table(path, metric)?;
    let result = crate::eval::friedman_test(&table.scores, alpha)?;
    println!(
        "Friedman X2_r = {:.4} (n={} datasets, k={} models)",
        result.friedman_statistic, result.n, result.k
    );
    println!("average ranks:");
    for (name, rank) in table.models.iter().zip(&result.average_ranks) {
        println!("  {name:<24} {rank:.4}");
    }
    println!("Nemenyi CD (alpha={:.2}) = {:.4}", result.alpha, result.nemenyi_cd);
    let pairs = result.significant_pairs();
    if pairs.is_empty() {
        println!("no pair differs by more than the critical difference");
    } else {
        println!("pairs differing by more than the critical difference:");
        for (a, b) in pairs {
            let diff = (result.average_ranks[a] - result.average_ranks[b]).abs();
            println!("  {} vs {} ({diff:.4})", table.models[a], table.models[b]);
        }
    }
    Ok((table, result))
}

fn prepare_spec(args: &PrepareArgs) -> Result<DatasetSpec> {
    match (&args.preset, &args.input, &args.spec) {
        (Some(name), Some(input), None) => preset(name, input).ok_or_else(|| unknown_preset(name)),
        (None, _, Some(path)) => {
            let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
            let mut spec: DatasetSpec = toml::from_str(&text)?;
            if spec.path.is_relative() {
                spec.path = path.parent().unwrap_or(Path::new("")).join(&spec.path);
            }
            Ok(spec)
        }
        _ => Err(Error::InvalidConfig("prepare needs --preset with --input, or --spec".into())),
    }
}

/// Dispatches a parsed command line.
pub fn execute(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Prepare(args) => cmd_prepare(&prepare_spec(&args)?, &args.out).map(drop),
        Command::Run(args) => cmd_run(&RunConfig::from_args(&args)?).map(drop),
        Command::Stats(args) => cmd_stats(&args.table, args.alpha, &args.metric).map(drop),
    }
}

/// Entry point of the `wsims` binary; returns the process exit code.
pub fn main() -> i32 {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match execute(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
