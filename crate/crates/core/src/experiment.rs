//! The evaluation grid: every (method, elimination percentage, classifier)
//! cell cross-validated on the same corpus, plus ranking timings and the
//! pairwise overlap of surviving vocabularies.

use std::collections::{BTreeMap, HashSet};
use std::io::Write;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::classify::{
    cross_validate_matrix, ClassifierKind, CvResult, FeatureMatrix, LogisticRegression, LrConfig,
    NaiveBayes,
};
use crate::corpus::Corpus;
use crate::embedding::{train_skipgram, EmbeddingModel, TrainConfig};
use crate::error::{Error, Result};
use crate::geometry::analyze;
use crate::ranking::{check_percentage, Method, RankedWordList};
use crate::selectors::{overlap, rank_by_selector, rank_random};

pub const DEFAULT_PERCENTAGES: [u32; 11] = [0, 10, 20, 30, 40, 50, 60, 70, 80, 90, 99];

/// Ranking timings report the median of this many repetitions.
pub const RANKING_REPETITIONS: usize = 3;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridSeeds {
    pub embedding: u64,
    pub random: u64,
    pub cv: u64,
}

impl Default for GridSeeds {
    fn default() -> Self {
        Self::from_master(0)
    }
}

impl GridSeeds {
    pub fn from_master(seed: u64) -> Self {
        Self {
            embedding: seed,
            random: seed.wrapping_add(1),
            cv: seed.wrapping_add(2),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentGrid {
    pub methods: Vec<Method>,
    pub percentages: Vec<u32>,
    pub classifiers: Vec<ClassifierKind>,
    pub folds: usize,
    pub seeds: GridSeeds,
    pub min_count: u64,
    pub embedding: TrainConfig,
    pub lr: LrConfig,
}

impl Default for ExperimentGrid {
    fn default() -> Self {
        Self {
            methods: Method::ALL.to_vec(),
            percentages: DEFAULT_PERCENTAGES.to_vec(),
            classifiers: vec![ClassifierKind::Nb, ClassifierKind::Lr],
            folds: 10,
            seeds: GridSeeds::default(),
            min_count: 5,
            embedding: TrainConfig::default(),
            lr: LrConfig::default(),
        }
    }
}

fn reject_duplicates<T: std::hash::Hash + Eq + std::fmt::Debug>(name: &str, items: &[T]) -> Result<()> {
    if items.is_empty() {
        return Err(Error::Config(format!("{name} must not be empty")));
    }
    let mut seen = HashSet::new();
    for item in items {
        if !seen.insert(item) {
            return Err(Error::Config(format!("{name} lists {item:?} twice")));
        }
    }
    Ok(())
}

impl ExperimentGrid {
    pub fn validate(&self) -> Result<()> {
        reject_duplicates("methods", &self.methods)?;
        reject_duplicates("percentages", &self.percentages)?;
        reject_duplicates("classifiers", &self.classifiers)?;
        for &p in &self.percentages {
            check_percentage(p)?;
        }
        if self.folds < 2 {
            return Err(Error::Config("folds must be at least 2".into()));
        }
        if self.needs_embedding() {
            self.embedding.validate()?;
        }
        Ok(())
    }

    /// True when some percentage lies outside the default 11-step grid.
    pub fn custom_percentages(&self) -> bool {
        self.percentages.iter().any(|p| !DEFAULT_PERCENTAGES.contains(p))
    }

    pub fn needs_embedding(&self) -> bool {
        self.methods.iter().any(|m| m.needs_embedding())
    }

    pub fn cell_count(&self) -> usize {
        self.methods.len() * self.percentages.len() * self.classifiers.len()
    }
}

/// Median of `RANKING_REPETITIONS` timed runs of `f`, with the last result.
fn timed_median<T>(mut f: impl FnMut() -> Result<T>) -> Result<(T, f64)> {
    let mut times = Vec::with_capacity(RANKING_REPETITIONS);
    let mut last = None;
    for _ in 0..RANKING_REPETITIONS {
        let start = Instant::now();
        let value = f()?;
        times.push(start.elapsed().as_secs_f64());
        last = Some(value);
    }
    times.sort_by(f64::total_cmp);
    Ok((last.expect("at least one repetition"), times[times.len() / 2]))
}

/// Build the ranking for `method`, returning it with its median wall time.
/// Hyperplane methods need `model`; embedding training is never timed here.
pub fn timed_ranking(
    corpus: &Corpus,
    method: Method,
    model: Option<&EmbeddingModel>,
    random_seed: u64,
) -> Result<(RankedWordList, f64)> {
    let vocab = &corpus.vocab;
    let need_model = || {
        model.ok_or_else(|| {
            Error::Config(format!(
                "method {method} needs an embedding; pass a trained model or enable training"
            ))
        })
    };
    match method {
        Method::Hyperplane => {
            let model = need_model()?;
            timed_median(|| analyze(model, vocab).map(|a| a.ranking))
        }
        Method::HyperplaneLongest => {
            let model = need_model()?;
            timed_median(|| {
                analyze(model, vocab).map(|a| a.ranking.reversed(Method::HyperplaneLongest))
            })
        }
        Method::Chi2 | Method::Mi => timed_median(|| rank_by_selector(vocab, method)),
        Method::Random => timed_median(|| Ok(rank_random(vocab, random_seed))),
    }
}

pub fn evaluate_cell(
    corpus: &Corpus,
    ranking: &RankedWordList,
    pct: u32,
    classifier: ClassifierKind,
    grid: &ExperimentGrid,
) -> Result<CvResult> {
    let keep = ranking.survivor_mask(&corpus.vocab, pct)?;
    let data = FeatureMatrix::from_corpus(corpus, &keep)?;
    match classifier {
        ClassifierKind::Nb => cross_validate_matrix(&data, &NaiveBayes, grid.folds, grid.seeds.cv),
        ClassifierKind::Lr => {
            let lr = LogisticRegression {
                config: grid.lr.clone(),
            };
            cross_validate_matrix(&data, &lr, grid.folds, grid.seeds.cv)
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CorpusSummary {
    pub documents: usize,
    pub vocab_size: usize,
    pub labels: [String; 2],
    pub class_counts: [usize; 2],
    pub empty_documents: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EmbeddingSummary {
    pub dim: usize,
    pub vocab_hash: String,
    /// False when a pre-trained model was supplied.
    pub trained: bool,
    pub train_time_s: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RankingSummary {
    pub method: Method,
    pub ranking_time_s: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CellStatus {
    Ok,
    Failed,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CellReport {
    pub method: Method,
    pub elimination_pct: u32,
    pub classifier: ClassifierKind,
    pub status: CellStatus,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    pub folds: Vec<f64>,
    pub folds_used: usize,
    pub mean_accuracy: f64,
    pub vocab_size: usize,
    pub empty_doc_count: usize,
    pub train_time_s: f64,
    pub predict_time_s: f64,
    pub fold_train_time_s: Vec<f64>,
    pub fold_predict_time_s: Vec<f64>,
}

impl CellReport {
    fn new(
        method: Method,
        pct: u32,
        classifier: ClassifierKind,
        result: Result<CvResult>,
    ) -> Self {
        match result {
            Ok(cv) => Self {
                method,
                elimination_pct: pct,
                classifier,
                status: CellStatus::Ok,
                error: None,
                train_time_s: cv.train_time_s(),
                predict_time_s: cv.predict_time_s(),
                folds: cv.fold_accuracies,
                folds_used: cv.folds_used,
                mean_accuracy: cv.mean_accuracy,
                vocab_size: cv.vocab_size,
                empty_doc_count: cv.empty_doc_count,
                fold_train_time_s: cv.train_time_per_fold,
                fold_predict_time_s: cv.predict_time_per_fold,
            },
            Err(e) => Self {
                method,
                elimination_pct: pct,
                classifier,
                status: CellStatus::Failed,
                error: Some(e.to_string()),
                folds: Vec::new(),
                folds_used: 0,
                mean_accuracy: f64::NAN,
                vocab_size: 0,
                empty_doc_count: 0,
                train_time_s: 0.0,
                predict_time_s: 0.0,
                fold_train_time_s: Vec::new(),
                fold_predict_time_s: Vec::new(),
            },
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OverlapRow {
    pub elimination_pct: u32,
    pub method_x: Method,
    pub method_y: Method,
    pub overlap: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EvalReport {
    pub grid: ExperimentGrid,
    pub custom_percentages: bool,
    pub corpus: CorpusSummary,
    pub embedding: Option<EmbeddingSummary>,
    pub rankings: Vec<RankingSummary>,
    pub cells: Vec<CellReport>,
    pub overlaps: Vec<OverlapRow>,
    pub failed_cells: usize,
}

/// Remove every `*time_s` field, recursively.
pub fn strip_timings(value: &mut serde_json::Value) {
    match value {
        serde_json::Value::Object(map) => {
            map.retain(|k, _| !k.ends_with("time_s"));
            map.values_mut().for_each(strip_timings);
        }
        serde_json::Value::Array(items) => items.iter_mut().for_each(strip_timings),
        _ => {}
    }
}

impl EvalReport {
    pub fn cell(&self, method: Method, pct: u32, classifier: ClassifierKind) -> Option<&CellReport> {
        self.cells.iter().find(|c| {
            c.method == method && c.elimination_pct == pct && c.classifier == classifier
        })
    }

    pub fn ranking_time(&self, method: Method) -> Option<f64> {
        self.rankings
            .iter()
            .find(|r| r.method == method)
            .map(|r| r.ranking_time_s)
    }

    /// Pretty JSON; with `timings == false` every wall-clock field is dropped
    /// so two runs can be compared byte for byte.
    pub fn to_json(&self, timings: bool) -> Result<String> {
        let mut value = serde_json::to_value(self)?;
        if !timings {
            strip_timings(&mut value);
        }
        let mut text = serde_json::to_string_pretty(&value)?;
        text.push('\n');
        Ok(text)
    }

    /// One row per cell for plotting accuracy against elimination percentage.
    pub fn write_cells_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record([
            "method",
            "elimination_pct",
            "classifier",
            "mean_accuracy",
            "vocab_size",
            "empty_doc_count",
            "train_time_s",
            "predict_time_s",
            "status",
        ])?;
        for c in &self.cells {
            w.write_record([
                c.method.to_string(),
                c.elimination_pct.to_string(),
                c.classifier.to_string(),
                c.mean_accuracy.to_string(),
                c.vocab_size.to_string(),
                c.empty_doc_count.to_string(),
                c.train_time_s.to_string(),
                c.predict_time_s.to_string(),
                match c.status {
                    CellStatus::Ok => "ok".to_owned(),
                    CellStatus::Failed => "failed".to_owned(),
                },
            ])?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn write_overlap_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["elimination_pct", "method_x", "method_y", "overlap"])?;
        for o in &self.overlaps {
            w.write_record([
                o.elimination_pct.to_string(),
                o.method_x.to_string(),
                o.method_y.to_string(),
                o.overlap.to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Run the full grid. Hyperplane methods use `model` when given, otherwise an
/// embedding is trained with `grid.embedding` (seeded by `grid.seeds`).
pub fn run_grid(
    corpus: &Corpus,
    grid: &ExperimentGrid,
    model: Option<&EmbeddingModel>,
) -> Result<EvalReport> {
    grid.validate()?;
    let mut trained = None;
    let embedding = if grid.needs_embedding() {
        match model {
            Some(m) => {
                m.check_vocab(&corpus.vocab)?;
                Some(EmbeddingSummary {
                    dim: m.dim(),
                    vocab_hash: m.vocab_hash(),
                    trained: false,
                    train_time_s: 0.0,
                })
            }
            None => {
                let config = TrainConfig {
                    seed: grid.seeds.embedding,
                    ..grid.embedding.clone()
                };
                let start = Instant::now();
                let m = train_skipgram(corpus, &config)?;
                let summary = EmbeddingSummary {
                    dim: m.dim(),
                    vocab_hash: m.vocab_hash(),
                    trained: true,
                    train_time_s: start.elapsed().as_secs_f64(),
                };
                trained = Some(m);
                Some(summary)
            }
        }
    } else {
        None
    };
    let model = trained.as_ref().or(model);

    let mut rankings = BTreeMap::new();
    let mut timings = Vec::new();
    for &method in &grid.methods {
        let (ranking, time) = timed_ranking(corpus, method, model, grid.seeds.random)?;
        rankings.insert(method, ranking);
        timings.push(RankingSummary {
            method,
            ranking_time_s: time,
        });
    }

    let cells: Vec<(Method, u32, ClassifierKind)> = grid
        .methods
        .iter()
        .flat_map(|&m| {
            grid.percentages.iter().flat_map(move |&p| {
                grid.classifiers.iter().map(move |&c| (m, p, c))
            })
        })
        .collect();
    let cells: Vec<CellReport> = cells
        .into_par_iter()
        .map(|(m, p, c)| CellReport::new(m, p, c, evaluate_cell(corpus, &rankings[&m], p, c, grid)))
        .collect();

    check_reference_cells(&cells)?;

    let mut overlaps = Vec::new();
    for &pct in &grid.percentages {
        for (i, &x) in grid.methods.iter().enumerate() {
            for &y in &grid.methods[i + 1..] {
                overlaps.push(OverlapRow {
                    elimination_pct: pct,
                    method_x: x,
                    method_y: y,
                    overlap: overlap(&rankings[&x], &rankings[&y], pct)?,
                });
            }
        }
    }

    let failed_cells = cells.iter().filter(|c| c.status == CellStatus::Failed).count();
    Ok(EvalReport {
        grid: grid.clone(),
        custom_percentages: grid.custom_percentages(),
        corpus: CorpusSummary {
            documents: corpus.documents.len(),
            vocab_size: corpus.vocab.len(),
            labels: corpus.labels.clone(),
            class_counts: corpus.class_counts(),
            empty_documents: corpus.empty_documents.len(),
        },
        embedding,
        rankings: timings,
        cells,
        overlaps,
        failed_cells,
    })
}

/// Nothing is eliminated at 0%, so those cells must agree across methods.
fn check_reference_cells(cells: &[CellReport]) -> Result<()> {
    let mut reference: BTreeMap<ClassifierKind, &CellReport> = BTreeMap::new();
    for cell in cells
        .iter()
        .filter(|c| c.elimination_pct == 0 && c.status == CellStatus::Ok)
    {
        match reference.get(&cell.classifier) {
            Some(first) if first.folds != cell.folds => {
                return Err(Error::Invariant(format!(
                    "0% cells differ between {} and {} for {}",
                    first.method, cell.method, cell.classifier
                )));
            }
            Some(_) => {}
            None => {
                reference.insert(cell.classifier, cell);
            }
        }
    }
    Ok(())
}

/// Run the grid on a dedicated pool of `jobs` threads; `jobs == 1` is fully
/// serial.
pub fn run_grid_with_jobs(
    corpus: &Corpus,
    grid: &ExperimentGrid,
    model: Option<&EmbeddingModel>,
    jobs: usize,
) -> Result<EvalReport> {
    if jobs == 0 {
        return run_grid(corpus, grid, model);
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| Error::Config(format!("cannot build thread pool: {e}")))?;
    pool.install(|| run_grid(corpus, grid, model))
}
