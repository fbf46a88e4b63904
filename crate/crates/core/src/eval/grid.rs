//! Cross-validated grid search over embedding hyperparameters and ensemble
//! weights.
//!
//! Embedding cells that differ only in their epoch count share one training
//! run per fold: the factors after `k` epochs of a longer run are exactly the
//! factors of a `k`-epoch run with the same seed.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::folds::{Fold, FoldSplit, UserTest};
use super::metrics::{metric_curve, MetricCurve, MetricOptions};
use crate::embed::{import_embeddings, AlsConfig, AlsSolver, AlsTrainer, BprConfig, BprTrainer};
use crate::embedding::EmbeddingPair;
use crate::error::{Error, Result};
use crate::recommend::{select_top, Metric, RecommendationList, Scorer, WeightConfig, DEFAULT_RATIOS};

/// Cutoff used to pick the best configuration.
pub const TUNING_CUTOFF: usize = 10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TuningMode {
    /// Tune embeddings for the user-item recommender only and reuse them.
    Reuse,
    /// Tune embeddings separately for every recommender.
    FineTune,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RecommenderKind {
    UserItem,
    ItemItem,
    Weighted,
}

impl RecommenderKind {
    pub const ALL: [RecommenderKind; 3] = [RecommenderKind::UserItem, RecommenderKind::ItemItem, RecommenderKind::Weighted];

    pub fn label(self) -> &'static str {
        match self {
            RecommenderKind::UserItem => "user_item",
            RecommenderKind::ItemItem => "item_item",
            RecommenderKind::Weighted => "weighted",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RecommenderConfig {
    pub kind: RecommenderKind,
    pub weights: WeightConfig,
}

impl RecommenderConfig {
    /// The base recommender ranks by dot product, the learners' native score.
    pub fn user_item() -> Self {
        Self {
            kind: RecommenderKind::UserItem,
            weights: WeightConfig::user_item(Metric::Dot),
        }
    }

    pub fn item_item(metric: Metric) -> Self {
        Self {
            kind: RecommenderKind::ItemItem,
            weights: WeightConfig::item_item(metric),
        }
    }

    pub fn weighted(weights: WeightConfig) -> Self {
        Self {
            kind: RecommenderKind::Weighted,
            weights,
        }
    }
}

/// Hyperparameter grid of one embedding learner.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum LearnerGrid {
    Als {
        #[serde(default = "grid_epochs")]
        epochs: Vec<usize>,
        #[serde(default = "grid_rates")]
        regularization: Vec<f64>,
        #[serde(default = "grid_dims")]
        dim: Vec<usize>,
        #[serde(default = "default_confidence")]
        confidence_scale: f64,
        #[serde(default = "default_solver")]
        solver: AlsSolver,
        #[serde(default)]
        seed: u64,
    },
    Bpr {
        #[serde(default = "grid_epochs")]
        epochs: Vec<usize>,
        #[serde(default = "grid_rates")]
        learning_rate: Vec<f64>,
        #[serde(default = "grid_rates")]
        regularization: Vec<f64>,
        #[serde(default = "grid_dims")]
        dim: Vec<usize>,
        #[serde(default)]
        seed: u64,
    },
    /// Externally trained embeddings, one file per fold. `{fold}` in a path
    /// is replaced by the fold index (0-based).
    External { embeddings: Vec<String> },
}

fn default_confidence() -> f64 {
    40.0
}

fn default_solver() -> AlsSolver {
    AlsSolver::Cholesky
}

const GRID_EPOCHS: [usize; 3] = [15, 30, 50];
const GRID_RATES: [f64; 3] = [1e-3, 1e-2, 1e-1];
const GRID_DIMS: [usize; 3] = [32, 64, 128];

fn grid_epochs() -> Vec<usize> {
    GRID_EPOCHS.to_vec()
}

fn grid_rates() -> Vec<f64> {
    GRID_RATES.to_vec()
}

fn grid_dims() -> Vec<usize> {
    GRID_DIMS.to_vec()
}

impl LearnerGrid {
    /// epochs {15, 30, 50} × regularization {1e-3, 1e-2, 1e-1} × dim {32, 64, 128}.
    pub fn als_default() -> Self {
        LearnerGrid::Als {
            epochs: grid_epochs(),
            regularization: grid_rates(),
            dim: grid_dims(),
            confidence_scale: default_confidence(),
            solver: default_solver(),
            seed: 0,
        }
    }

    /// epochs × learning rate × regularization × dim, each from the grids above.
    pub fn bpr_default() -> Self {
        LearnerGrid::Bpr {
            epochs: grid_epochs(),
            learning_rate: grid_rates(),
            regularization: grid_rates(),
            dim: grid_dims(),
            seed: 0,
        }
    }

    /// Replaces the training seed of trainable learners.
    pub fn set_seed(&mut self, new_seed: u64) {
        match self {
            LearnerGrid::Als { seed, .. } | LearnerGrid::Bpr { seed, .. } => *seed = new_seed,
            LearnerGrid::External { .. } => {}
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            LearnerGrid::Als { .. } => "als",
            LearnerGrid::Bpr { .. } => "bpr",
            LearnerGrid::External { .. } => "external",
        }
    }

    /// Every hyperparameter cell, in grid order.
    pub fn cells(&self) -> Vec<Hyper> {
        let mut out = Vec::new();
        match self {
            LearnerGrid::Als {
                epochs,
                regularization,
                dim,
                confidence_scale,
                solver,
                seed,
            } => {
                for &e in epochs {
                    for &r in regularization {
                        for &d in dim {
                            out.push(Hyper::Als(AlsConfig {
                                epochs: e,
                                regularization: r,
                                dim: d,
                                confidence_scale: *confidence_scale,
                                seed: *seed,
                                solver: *solver,
                            }));
                        }
                    }
                }
            }
            LearnerGrid::Bpr {
                epochs,
                learning_rate,
                regularization,
                dim,
                seed,
            } => {
                for &e in epochs {
                    for &a in learning_rate {
                        for &d in dim {
                            for &r in regularization {
                                out.push(Hyper::Bpr(BprConfig {
                                    epochs: e,
                                    learning_rate: a,
                                    regularization: r,
                                    dim: d,
                                    seed: *seed,
                                }));
                            }
                        }
                    }
                }
            }
            LearnerGrid::External { embeddings } => {
                out.extend(embeddings.iter().map(|p| Hyper::External { embeddings: p.clone() }));
            }
        }
        out
    }
}

/// One hyperparameter setting of a learner.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Hyper {
    Als(AlsConfig),
    Bpr(BprConfig),
    External { embeddings: String },
}

impl Hyper {
    pub fn describe(&self) -> String {
        match self {
            Hyper::Als(c) => c.describe(),
            Hyper::Bpr(c) => c.describe(),
            Hyper::External { embeddings } => format!("external {embeddings}"),
        }
    }

    fn epochs(&self) -> usize {
        match self {
            Hyper::Als(c) => c.epochs,
            Hyper::Bpr(c) => c.epochs,
            Hyper::External { .. } => 0,
        }
    }

    fn with_epochs(&self, epochs: usize) -> Hyper {
        match self {
            Hyper::Als(c) => Hyper::Als(AlsConfig { epochs, ..*c }),
            Hyper::Bpr(c) => Hyper::Bpr(BprConfig { epochs, ..*c }),
            other => other.clone(),
        }
    }
}

/// Resolves `{fold}` in an external embedding path.
pub fn fold_path(template: &str, fold: usize) -> PathBuf {
    PathBuf::from(template.replace("{fold}", &fold.to_string()))
}

/// Metrics of one recommender configuration across all folds.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub learner: String,
    pub hyper: String,
    pub recommender: RecommenderConfig,
    pub folds: Vec<MetricCurve>,
    pub mean: MetricCurve,
}

impl EvalReport {
    /// Mean NDCG at `min(10, n_max)`, the selection criterion.
    pub fn tuning_score(&self) -> f64 {
        self.mean.ndcg_at(TUNING_CUTOFF.min(self.mean.n_max()))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CellError {
    pub hyper: String,
    pub message: String,
}

/// Best configuration per recommender kind.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BestSet {
    pub user_item: EvalReport,
    pub item_item: EvalReport,
    pub weighted: EvalReport,
}

impl BestSet {
    pub fn get(&self, kind: RecommenderKind) -> &EvalReport {
        match kind {
            RecommenderKind::UserItem => &self.user_item,
            RecommenderKind::ItemItem => &self.item_item,
            RecommenderKind::Weighted => &self.weighted,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridReport {
    pub learner: String,
    pub mode: TuningMode,
    pub fold_seed: u64,
    pub tuning_cutoff: usize,
    /// Every evaluated (hyperparameters, recommender) cell.
    pub cells: Vec<EvalReport>,
    pub errors: Vec<CellError>,
    /// Selection under embedding reuse (always available).
    pub reuse: BestSet,
    /// Selection with per-recommender embedding tuning.
    pub fine_tune: Option<BestSet>,
    /// `(fine_tune - reuse) / reuse` of the tuning score per recommender.
    pub improvement: Option<BTreeMap<RecommenderKind, f64>>,
}

impl GridReport {
    /// The selection of the mode the search ran in.
    pub fn best(&self) -> &BestSet {
        match (&self.mode, &self.fine_tune) {
            (TuningMode::FineTune, Some(ft)) => ft,
            _ => &self.reuse,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub learner: LearnerGrid,
    /// `(w_R, w_S)` pairs for the weighted recommender.
    pub weight_ratios: Vec<(f64, f64)>,
    /// Similarities tried by the item-item and weighted recommenders.
    pub metrics: Vec<Metric>,
    pub mode: TuningMode,
    pub n_max: usize,
    pub metric_options: MetricOptions,
}

impl GridSpec {
    pub fn new(learner: LearnerGrid, mode: TuningMode) -> Self {
        Self {
            learner,
            weight_ratios: DEFAULT_RATIOS.to_vec(),
            metrics: Metric::ALL.to_vec(),
            mode,
            n_max: 20,
            metric_options: MetricOptions::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.learner.cells().is_empty() {
            return Err(Error::InvalidConfig("empty hyperparameter grid".into()));
        }
        if self.weight_ratios.is_empty() || self.metrics.is_empty() {
            return Err(Error::InvalidConfig("empty weight or metric grid".into()));
        }
        if self.n_max == 0 {
            return Err(Error::InvalidConfig("n_max must be at least 1".into()));
        }
        for &(r, s) in &self.weight_ratios {
            WeightConfig::new(r, s, Metric::Dot)?;
        }
        Ok(())
    }

    /// User-item, then item-item per metric, then weighted per metric × ratio.
    pub fn recommender_configs(&self) -> Vec<RecommenderConfig> {
        let mut out = vec![RecommenderConfig::user_item()];
        out.extend(self.metrics.iter().map(|&m| RecommenderConfig::item_item(m)));
        for &metric in &self.metrics {
            for &(r, s) in &self.weight_ratios {
                out.push(RecommenderConfig::weighted(WeightConfig {
                    user_item: r,
                    item_item: s,
                    metric,
                }));
            }
        }
        out
    }
}

/// Top-`n_max` lists of every configuration for the users of `test`,
/// indexed `[config][user]`.
pub fn recommend_all(
    e: &EmbeddingPair,
    fold: &Fold,
    test: &[UserTest],
    configs: &[RecommenderConfig],
    n_max: usize,
) -> Vec<Vec<RecommendationList>> {
    let mut out: Vec<Vec<RecommendationList>> = vec![Vec::new(); configs.len()];
    let mut metrics: Vec<Metric> = configs.iter().map(|c| c.weights.metric).collect();
    metrics.sort();
    metrics.dedup();
    for metric in metrics {
        let idx: Vec<usize> = (0..configs.len()).filter(|&k| configs[k].weights.metric == metric).collect();
        let need_r = idx.iter().any(|&k| configs[k].weights.user_item > 0.0);
        let need_s = idx.iter().any(|&k| configs[k].weights.item_item > 0.0);
        let scorer = Scorer::new(e, metric);
        let per_user: Vec<Vec<RecommendationList>> = test
            .par_iter()
            .map(|t| {
                let history = fold.train.row(t.user);
                let r = if need_r { scorer.user_item_scores(t.user) } else { Vec::new() };
                let s = if need_s { scorer.item_item_scores(history) } else { Vec::new() };
                idx.iter()
                    .map(|&k| {
                        let w = &configs[k].weights;
                        let z: Vec<f64> = if w.item_item == 0.0 {
                            r.iter().map(|&r| w.combine(r, 0.0)).collect()
                        } else if w.user_item == 0.0 {
                            s.iter().map(|&s| w.combine(0.0, s)).collect()
                        } else {
                            r.iter().zip(&s).map(|(&r, &s)| w.combine(r, s)).collect()
                        };
                        select_top(t.user, &z, history, n_max)
                    })
                    .collect()
            })
            .collect();
        for lists in per_user {
            for (&k, list) in idx.iter().zip(lists) {
                out[k].push(list);
            }
        }
    }
    out
}

fn evaluate_fold(
    e: &EmbeddingPair,
    fold: &Fold,
    test: &[UserTest],
    configs: &[RecommenderConfig],
    n_max: usize,
    opts: MetricOptions,
) -> Result<Vec<MetricCurve>> {
    recommend_all(e, fold, test, configs, n_max)
        .iter()
        .map(|lists| metric_curve(lists, test, n_max, opts))
        .collect()
}

/// Evaluates fixed per-fold embeddings (one per fold) under each configuration.
pub fn evaluate_embeddings(
    split: &FoldSplit,
    embeddings: &[EmbeddingPair],
    configs: &[RecommenderConfig],
    n_max: usize,
    opts: MetricOptions,
    learner: &str,
    hyper: &str,
) -> Result<Vec<EvalReport>> {
    if embeddings.len() != split.folds.len() {
        return Err(Error::InvalidConfig(format!(
            "{} embeddings for {} folds",
            embeddings.len(),
            split.folds.len()
        )));
    }
    let mut per_config: Vec<Vec<MetricCurve>> = vec![Vec::new(); configs.len()];
    for (fold, e) in split.folds.iter().zip(embeddings) {
        let test = fold.test_by_user();
        for (k, c) in evaluate_fold(e, fold, &test, configs, n_max, opts)?.into_iter().enumerate() {
            per_config[k].push(c);
        }
    }
    Ok(configs
        .iter()
        .zip(per_config)
        .map(|(&recommender, folds)| EvalReport {
            learner: learner.to_owned(),
            hyper: hyper.to_owned(),
            recommender,
            mean: MetricCurve::mean(&folds),
            folds,
        })
        .collect())
}

/// Cells sharing everything but the epoch count train once per fold.
struct TrainGroup {
    base: Hyper,
    /// `(epochs, cell index)` ascending by epochs.
    checkpoints: Vec<(usize, usize)>,
}

fn group_cells(cells: &[Hyper], wanted: &[usize]) -> Vec<TrainGroup> {
    let mut groups: Vec<TrainGroup> = Vec::new();
    for &c in wanted {
        let base = cells[c].with_epochs(0);
        match groups.iter_mut().find(|g| g.base == base && !matches!(base, Hyper::External { .. })) {
            Some(g) => g.checkpoints.push((cells[c].epochs(), c)),
            None => groups.push(TrainGroup {
                base,
                checkpoints: vec![(cells[c].epochs(), c)],
            }),
        }
    }
    for g in &mut groups {
        g.checkpoints.sort_by_key(|&(e, c)| (e, c));
    }
    groups
}

#[allow(clippy::large_enum_variant)]
enum Trainer<'a> {
    Als(AlsTrainer<'a>),
    Bpr(BprTrainer<'a>),
}

impl Trainer<'_> {
    fn step(&mut self) -> Result<()> {
        match self {
            Trainer::Als(t) => t.step(),
            Trainer::Bpr(t) => t.step(),
        }
    }

    fn embeddings(&self) -> EmbeddingPair {
        match self {
            Trainer::Als(t) => t.embeddings(),
            Trainer::Bpr(t) => t.embeddings(),
        }
    }
}

/// Trains `group` on one fold, calling `visit` with the embeddings of every
/// checkpoint. A failure is reported for the checkpoint it prevents and all
/// later ones.
fn train_fold(
    group: &TrainGroup,
    fold_index: usize,
    fold: &Fold,
    mut visit: impl FnMut(usize, std::result::Result<EmbeddingPair, String>),
) {
    if let Hyper::External { embeddings } = &group.base {
        let path = fold_path(embeddings, fold_index);
        let e = import_embeddings(&path, fold.train.user_map(), fold.train.item_map()).map_err(|e| e.to_string());
        for &(_, c) in &group.checkpoints {
            visit(c, e.clone());
        }
        return;
    }
    let max_epochs = group.checkpoints.last().map_or(0, |&(e, _)| e);
    let trainer = match &group.base {
        Hyper::Als(c) => AlsTrainer::new(&fold.train, AlsConfig { epochs: max_epochs, ..*c }).map(Trainer::Als),
        Hyper::Bpr(c) => BprTrainer::new(&fold.train, BprConfig { epochs: max_epochs, ..*c }).map(Trainer::Bpr),
        Hyper::External { .. } => unreachable!("handled above"),
    };
    let mut trainer = match trainer {
        Ok(t) => t,
        Err(e) => {
            for &(_, c) in &group.checkpoints {
                visit(c, Err(e.to_string()));
            }
            return;
        }
    };
    let mut epoch = 0;
    for (k, &(target, c)) in group.checkpoints.iter().enumerate() {
        while epoch < target {
            if let Err(e) = trainer.step() {
                for &(_, rest) in &group.checkpoints[k..] {
                    visit(rest, Err(e.to_string()));
                }
                return;
            }
            epoch += 1;
        }
        visit(c, Ok(trainer.embeddings()));
    }
}

/// On-disk cache of finished cells keyed by everything that determines them.
struct Checkpoints {
    dir: PathBuf,
    prefix: String,
}

impl Checkpoints {
    fn new(dir: &Path, split: &FoldSplit, spec: &GridSpec) -> Result<Self> {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        let mut h = Sha256::new();
        h.update(split.seed.to_le_bytes());
        if let Some(first) = split.folds.first() {
            for id in first.train.user_map().ids().iter().chain(first.train.item_map().ids()) {
                h.update(id.as_bytes());
                h.update(b"\n");
            }
        }
        for f in &split.folds {
            h.update(f.train.interaction_count().to_le_bytes());
            for (u, i) in f.train.iter() {
                h.update(u.to_le_bytes());
                h.update(i.to_le_bytes());
            }
            for &(u, i) in &f.test {
                h.update(u.to_le_bytes());
                h.update(i.to_le_bytes());
            }
        }
        h.update(serde_json::to_vec(&(spec.n_max, &spec.metric_options))?);
        Ok(Self {
            dir: dir.to_owned(),
            prefix: hex(&h.finalize()),
        })
    }

    fn path(&self, hyper: &Hyper, configs: &[RecommenderConfig]) -> Result<PathBuf> {
        let mut h = Sha256::new();
        h.update(self.prefix.as_bytes());
        h.update(serde_json::to_vec(&(hyper, configs))?);
        Ok(self.dir.join(format!("{}.json", hex(&h.finalize()))))
    }

    fn load(&self, hyper: &Hyper, configs: &[RecommenderConfig]) -> Option<Vec<EvalReport>> {
        let path = self.path(hyper, configs).ok()?;
        let bytes = fs::read(path).ok()?;
        serde_json::from_slice(&bytes).ok()
    }

    fn store(&self, hyper: &Hyper, configs: &[RecommenderConfig], reports: &[EvalReport]) -> Result<()> {
        let path = self.path(hyper, configs)?;
        let tmp = path.with_extension("tmp");
        fs::write(&tmp, serde_json::to_vec(reports)?).map_err(|e| Error::io(&tmp, e))?;
        fs::rename(&tmp, &path).map_err(|e| Error::io(&path, e))
    }
}

fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

/// Evaluates `configs` on the cells `wanted`; returns reports per cell (in
/// `wanted` order) and errors for cells that failed on any fold.
fn run_cells(
    split: &FoldSplit,
    spec: &GridSpec,
    cells: &[Hyper],
    wanted: &[usize],
    configs: &[RecommenderConfig],
    store: Option<&Checkpoints>,
) -> Result<(CellReports, Vec<CellError>)> {
    let learner = spec.learner.name();
    let mut done: BTreeMap<usize, Vec<EvalReport>> = BTreeMap::new();
    let mut todo = Vec::new();
    for &c in wanted {
        match store.and_then(|s| s.load(&cells[c], configs)) {
            Some(r) => {
                log::info!("{learner}: reusing checkpoint for {}", cells[c].describe());
                done.insert(c, r);
            }
            None => todo.push(c),
        }
    }

    let tests: Vec<Vec<UserTest>> = split.folds.iter().map(Fold::test_by_user).collect();
    let mut errors: BTreeMap<usize, String> = BTreeMap::new();
    for group in group_cells(cells, &todo) {
        log::info!("{learner}: training {} ({} checkpoints)", group.base.describe(), group.checkpoints.len());
        let mut curves: BTreeMap<usize, Vec<Vec<MetricCurve>>> = BTreeMap::new();
        for (f, fold) in split.folds.iter().enumerate() {
            train_fold(&group, f, fold, |c, e| {
                if errors.contains_key(&c) {
                    return;
                }
                let result = e.and_then(|e| {
                    evaluate_fold(&e, fold, &tests[f], configs, spec.n_max, spec.metric_options)
                        .map_err(|err| err.to_string())
                });
                match result {
                    Ok(per_config) => curves.entry(c).or_default().push(per_config),
                    Err(err) => {
                        log::warn!("{learner}: {} fold {f}: {err}", cells[c].describe());
                        errors.insert(c, format!("fold {f}: {err}"));
                    }
                }
            });
        }
        for (c, per_fold) in curves {
            if errors.contains_key(&c) {
                continue;
            }
            let reports: Vec<EvalReport> = configs
                .iter()
                .enumerate()
                .map(|(k, &recommender)| {
                    let folds: Vec<MetricCurve> = per_fold.iter().map(|pc| pc[k].clone()).collect();
                    EvalReport {
                        learner: learner.to_owned(),
                        hyper: cells[c].describe(),
                        recommender,
                        mean: MetricCurve::mean(&folds),
                        folds,
                    }
                })
                .collect();
            if let Some(s) = store {
                s.store(&cells[c], configs, &reports)?;
            }
            done.insert(c, reports);
        }
    }
    let ordered = wanted
        .iter()
        .filter_map(|c| done.remove(c).map(|r| (*c, r)))
        .collect();
    let errors = errors
        .into_iter()
        .map(|(c, message)| CellError {
            hyper: cells[c].describe(),
            message,
        })
        .collect();
    Ok((ordered, errors))
}

/// Evaluated cells as `(cell index, one report per recommender config)`.
type CellReports = Vec<(usize, Vec<EvalReport>)>;

/// First report with the strictly highest tuning score.
fn argmax<'a>(reports: impl IntoIterator<Item = &'a EvalReport>) -> Option<&'a EvalReport> {
    let mut best: Option<&EvalReport> = None;
    for r in reports {
        if best.is_none_or(|b| r.tuning_score() > b.tuning_score()) {
            best = Some(r);
        }
    }
    best
}

fn best_of_kind<'a>(reports: impl IntoIterator<Item = &'a EvalReport>, kind: RecommenderKind) -> Option<EvalReport> {
    argmax(reports.into_iter().filter(|r| r.recommender.kind == kind)).cloned()
}

fn no_cells(errors: &[CellError]) -> Error {
    match errors.first() {
        Some(e) => Error::GridFailed {
            hyper: e.hyper.clone(),
            message: e.message.clone(),
        },
        None => Error::GridFailed {
            hyper: "-".into(),
            message: "no cell produced a result".into(),
        },
    }
}

/// Runs the cross-validated search described by `spec` on a shared split.
/// With `checkpoint_dir`, finished cells are cached there and reused.
pub fn grid_search(split: &FoldSplit, spec: &GridSpec, checkpoint_dir: Option<&Path>) -> Result<GridReport> {
    spec.validate()?;
    let store = checkpoint_dir.map(|d| Checkpoints::new(d, split, spec)).transpose()?;
    let cells = spec.learner.cells();
    let all: Vec<usize> = (0..cells.len()).collect();
    let configs = spec.recommender_configs();

    let (evaluated, mut errors, reuse_pick) = match spec.mode {
        TuningMode::Reuse => {
            let base = [RecommenderConfig::user_item()];
            let (first, errors) = run_cells(split, spec, &cells, &all, &base, store.as_ref())?;
            let best = argmax(first.iter().flat_map(|(_, r)| r)).ok_or_else(|| no_cells(&errors))?;
            let pick = first
                .iter()
                .find(|(_, r)| r.iter().any(|x| std::ptr::eq(x, best)))
                .map(|(c, _)| *c)
                .expect("argmax comes from the evaluated cells");
            let (second, more) = run_cells(split, spec, &cells, &[pick], &configs, store.as_ref())?;
            let mut errors = errors;
            errors.extend(more);
            let mut evaluated: Vec<(usize, Vec<EvalReport>)> = first.into_iter().filter(|(c, _)| *c != pick).collect();
            evaluated.extend(second);
            evaluated.sort_by_key(|(c, _)| *c);
            (evaluated, errors, pick)
        }
        TuningMode::FineTune => {
            let (evaluated, errors) = run_cells(split, spec, &cells, &all, &configs, store.as_ref())?;
            let best = argmax(
                evaluated
                    .iter()
                    .flat_map(|(_, r)| r)
                    .filter(|r| r.recommender.kind == RecommenderKind::UserItem),
            )
            .ok_or_else(|| no_cells(&errors))?;
            let pick = evaluated
                .iter()
                .find(|(_, r)| r.iter().any(|x| std::ptr::eq(x, best)))
                .map(|(c, _)| *c)
                .expect("argmax comes from the evaluated cells");
            (evaluated, errors, pick)
        }
    };

    let at_pick: &Vec<EvalReport> = evaluated
        .iter()
        .find(|(c, _)| *c == reuse_pick)
        .map(|(_, r)| r)
        .ok_or_else(|| {
            errors.push(CellError {
                hyper: cells[reuse_pick].describe(),
                message: "selected cell failed on re-evaluation".into(),
            });
            no_cells(&errors)
        })?;
    let reuse = BestSet {
        user_item: best_of_kind(at_pick, RecommenderKind::UserItem).ok_or_else(|| no_cells(&errors))?,
        item_item: best_of_kind(at_pick, RecommenderKind::ItemItem).ok_or_else(|| no_cells(&errors))?,
        weighted: best_of_kind(at_pick, RecommenderKind::Weighted).ok_or_else(|| no_cells(&errors))?,
    };

    let (fine_tune, improvement) = match spec.mode {
        TuningMode::Reuse => (None, None),
        TuningMode::FineTune => {
            let flat = || evaluated.iter().flat_map(|(_, r)| r);
            let ft = BestSet {
                user_item: best_of_kind(flat(), RecommenderKind::UserItem).ok_or_else(|| no_cells(&errors))?,
                item_item: best_of_kind(flat(), RecommenderKind::ItemItem).ok_or_else(|| no_cells(&errors))?,
                weighted: best_of_kind(flat(), RecommenderKind::Weighted).ok_or_else(|| no_cells(&errors))?,
            };
            let imp = RecommenderKind::ALL
                .iter()
                .map(|&k| {
                    let base = reuse.get(k).tuning_score();
                    let tuned = ft.get(k).tuning_score();
                    let rel = if base > 0.0 { (tuned - base) / base } else { 0.0 };
                    (k, rel)
                })
                .collect();
            (Some(ft), Some(imp))
        }
    };

    Ok(GridReport {
        learner: spec.learner.name().to_owned(),
        mode: spec.mode,
        fold_seed: split.seed,
        tuning_cutoff: TUNING_CUTOFF.min(spec.n_max),
        cells: evaluated.into_iter().flat_map(|(_, r)| r).collect(),
        errors,
        reuse,
        fine_tune,
        improvement,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_grids_have_expected_sizes() {
        assert_eq!(LearnerGrid::als_default().cells().len(), 27);
        assert_eq!(LearnerGrid::bpr_default().cells().len(), 81);
        let spec = GridSpec::new(LearnerGrid::als_default(), TuningMode::Reuse);
        assert_eq!(spec.recommender_configs().len(), 1 + 2 + 10);
    }

    #[test]
    fn grouping_shares_epochs() {
        let cells = LearnerGrid::als_default().cells();
        let all: Vec<usize> = (0..cells.len()).collect();
        let groups = group_cells(&cells, &all);
        assert_eq!(groups.len(), 9);
        for g in &groups {
            let epochs: Vec<usize> = g.checkpoints.iter().map(|&(e, _)| e).collect();
            assert_eq!(epochs, vec![15, 30, 50]);
        }
        let ext = LearnerGrid::External {
            embeddings: vec!["a".into(), "b".into()],
        };
        assert_eq!(group_cells(&ext.cells(), &[0, 1]).len(), 2);
    }

    #[test]
    fn fold_placeholder() {
        assert_eq!(fold_path("emb/recvae_{fold}.wse", 3), PathBuf::from("emb/recvae_3.wse"));
    }
}
