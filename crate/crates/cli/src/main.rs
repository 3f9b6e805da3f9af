//! `hyperstop`: synthesize corpora, rank words, and evaluate eliminations.
//!
//! Exit codes: 0 success, 1 usage or configuration error, 2 data error,
//! 3 some grid cells failed.

use std::fs::{self, File};
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use hyperstop::classify::ClassifierKind;
use hyperstop::corpus::{build_corpus, load_corpus, write_jsonl, Corpus};
use hyperstop::embedding::{load_model_for, save_model, train_skipgram, EmbeddingModel, TrainConfig};
use hyperstop::experiment::{run_grid_with_jobs, timed_ranking, ExperimentGrid, GridSeeds, DEFAULT_PERCENTAGES};
use hyperstop::geometry::{analyze, project_2d};
use hyperstop::ranking::{Method, RankedWordList};
use hyperstop::selectors::overlap;
use hyperstop::synth::{generate, SynthConfig};
use hyperstop::Error;

#[derive(Parser)]
#[command(name = "hyperstop", version, about = "Domain-specific stop words by distance from a class-separating hyperplane")]
struct Cli {
    /// Directory for all output files
    #[arg(long, global = true, default_value = ".")]
    out_dir: PathBuf,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate the synthetic two-class benchmark corpus
    Synth(SynthArgs),
    /// Dump the vocabulary with per-class document counts
    Vocab(VocabArgs),
    /// Rank the vocabulary with one selection method
    Rank(RankArgs),
    /// Cross-validate classifiers over a grid of methods and percentages
    Eval(EvalArgs),
    /// Overlap of surviving words between two ranking files
    Overlap(OverlapArgs),
    /// 2-D PCA coordinates of words nearest and farthest from the hyperplane
    Project(ProjectArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Profile {
    Desk,
    Paper,
}

#[derive(Args)]
struct SynthArgs {
    #[arg(long, value_enum, default_value = "desk")]
    profile: Profile,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    docs_per_class: Option<usize>,
    #[arg(long)]
    doc_len: Option<usize>,
    #[arg(long)]
    class_dict_size: Option<usize>,
    #[arg(long)]
    common_dict_size: Option<usize>,
    #[arg(long)]
    common_per_doc: Option<usize>,
}

#[derive(Args)]
struct CorpusArgs {
    /// JSON-lines corpus with `text` and `label` fields
    #[arg(long)]
    corpus: PathBuf,
    /// Drop words occurring fewer times than this
    #[arg(long)]
    min_count: Option<u64>,
}

const DEFAULT_MIN_COUNT: u64 = 5;

#[derive(Args)]
struct VocabArgs {
    #[command(flatten)]
    corpus: CorpusArgs,
}

/// Skip-gram settings; unset flags keep the defaults (or the config file).
#[derive(Args, Default)]
struct EmbeddingArgs {
    #[arg(long)]
    dim: Option<usize>,
    #[arg(long)]
    window: Option<usize>,
    #[arg(long)]
    negatives: Option<usize>,
    #[arg(long)]
    epochs: Option<usize>,
    #[arg(long)]
    initial_lr: Option<f32>,
    #[arg(long)]
    subsample: Option<f64>,
    #[arg(long)]
    embedding_seed: Option<u64>,
}

impl EmbeddingArgs {
    fn apply(&self, config: &mut TrainConfig) {
        if let Some(v) = self.dim {
            config.dim = v;
        }
        if let Some(v) = self.window {
            config.window = v;
        }
        if let Some(v) = self.negatives {
            config.negatives = v;
        }
        if let Some(v) = self.epochs {
            config.epochs = v;
        }
        if let Some(v) = self.initial_lr {
            config.initial_lr = v;
        }
        if let Some(v) = self.subsample {
            config.subsample_threshold = v;
        }
        if let Some(v) = self.embedding_seed {
            config.seed = v;
        }
    }
}

#[derive(Args)]
struct ModelArgs {
    /// Pre-trained model file
    #[arg(long, conflicts_with = "train")]
    embedding: Option<PathBuf>,
    /// Train a skip-gram embedding on the corpus
    #[arg(long)]
    train: bool,
    /// Write the trained model here
    #[arg(long, requires = "train")]
    save_embedding: Option<PathBuf>,
    #[command(flatten)]
    settings: EmbeddingArgs,
}

#[derive(Args)]
struct RankArgs {
    #[command(flatten)]
    corpus: CorpusArgs,
    #[arg(long)]
    method: Method,
    /// Seed for the random method
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    model: ModelArgs,
}

#[derive(Args)]
struct EvalArgs {
    #[command(flatten)]
    corpus: CorpusArgs,
    /// TOML grid configuration; flags override its fields
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, value_delimiter = ',')]
    methods: Option<Vec<Method>>,
    #[arg(long, value_delimiter = ',')]
    percentages: Option<Vec<u32>>,
    #[arg(long, value_delimiter = ',')]
    classifiers: Option<Vec<ClassifierKind>>,
    #[arg(long)]
    folds: Option<usize>,
    /// Master seed for embedding, random ranking and fold assignment
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads; 1 runs everything serially, 0 uses all cores
    #[arg(long, default_value_t = 0)]
    jobs: usize,
    /// Pre-trained model file (otherwise trained when a hyperplane method is requested)
    #[arg(long)]
    embedding: Option<PathBuf>,
    /// Leave wall-clock fields out of report.json
    #[arg(long)]
    omit_timings: bool,
    #[command(flatten)]
    settings: EmbeddingArgs,
}

#[derive(Args)]
struct OverlapArgs {
    /// First ranking CSV
    #[arg(long)]
    x: PathBuf,
    /// Second ranking CSV
    #[arg(long)]
    y: PathBuf,
    #[arg(long, value_delimiter = ',', default_values_t = DEFAULT_PERCENTAGES)]
    percentages: Vec<u32>,
}

#[derive(Args)]
struct ProjectArgs {
    #[command(flatten)]
    corpus: CorpusArgs,
    #[command(flatten)]
    model: ModelArgs,
    #[arg(long, default_value_t = 300)]
    n_shortest: usize,
    #[arg(long, default_value_t = 300)]
    n_longest: usize,
    /// Extra words to place, one per line (e.g. a conventional stop word list)
    #[arg(long)]
    words: Option<PathBuf>,
}

fn usage(msg: impl Into<String>) -> anyhow::Error {
    Error::Config(msg.into()).into()
}

fn create(out_dir: &Path, name: &str) -> Result<BufWriter<File>> {
    fs::create_dir_all(out_dir).with_context(|| format!("creating {}", out_dir.display()))?;
    let path = out_dir.join(name);
    let file = File::create(&path).with_context(|| format!("creating {}", path.display()))?;
    Ok(BufWriter::new(file))
}

fn load(args: &CorpusArgs, default_min_count: u64) -> Result<Corpus> {
    let docs = load_corpus(&args.corpus)
        .with_context(|| format!("reading {}", args.corpus.display()))?;
    let corpus = build_corpus(&docs, args.min_count.unwrap_or(default_min_count))?;
    if !corpus.empty_documents.is_empty() {
        eprintln!(
            "warning: {} documents have no tokens after filtering",
            corpus.empty_documents.len()
        );
    }
    Ok(corpus)
}

/// Load or train the embedding, returning it with its training time.
fn obtain_model(corpus: &Corpus, args: &ModelArgs) -> Result<(EmbeddingModel, Option<f64>)> {
    if let Some(path) = &args.embedding {
        let model = load_model_for(path, &corpus.vocab)
            .with_context(|| format!("loading {}", path.display()))?;
        return Ok((model, None));
    }
    if !args.train {
        return Err(usage(
            "the hyperplane methods need word vectors: pass --embedding <model file> or --train",
        ));
    }
    let mut config = TrainConfig::default();
    args.settings.apply(&mut config);
    let start = Instant::now();
    let model = train_skipgram(corpus, &config)?;
    let elapsed = start.elapsed().as_secs_f64();
    if let Some(path) = &args.save_embedding {
        save_model(&model, path).with_context(|| format!("writing {}", path.display()))?;
    }
    Ok((model, Some(elapsed)))
}

fn synth(out_dir: &Path, args: SynthArgs) -> Result<()> {
    let mut config = match args.profile {
        Profile::Desk => SynthConfig::desk(args.seed),
        Profile::Paper => SynthConfig::paper(args.seed),
    };
    for (field, value) in [
        (&mut config.docs_per_class, args.docs_per_class),
        (&mut config.doc_len, args.doc_len),
        (&mut config.class_dict_size, args.class_dict_size),
        (&mut config.common_dict_size, args.common_dict_size),
        (&mut config.common_per_doc, args.common_per_doc),
    ] {
        if let Some(v) = value {
            *field = v;
        }
    }
    let corpus = generate(&config)?;
    write_jsonl(&corpus.documents, create(out_dir, "corpus.jsonl")?)?;
    corpus.manifest.write_json(create(out_dir, "manifest.json")?)?;
    eprintln!(
        "wrote {} documents ({} words) to {}",
        corpus.documents.len(),
        corpus.manifest.vocab_size(),
        out_dir.display()
    );
    Ok(())
}

fn vocab(out_dir: &Path, args: VocabArgs) -> Result<()> {
    let corpus = load(&args.corpus, DEFAULT_MIN_COUNT)?;
    corpus.vocab.write_csv(create(out_dir, "vocab.csv")?)?;
    Ok(())
}

#[derive(Serialize)]
struct RankTiming {
    method: Method,
    vocab_size: usize,
    ranking_time_s: f64,
    embedding_train_time_s: Option<f64>,
}

fn rank(out_dir: &Path, args: RankArgs) -> Result<()> {
    let corpus = load(&args.corpus, DEFAULT_MIN_COUNT)?;
    let (model, train_time) = if args.method.needs_embedding() {
        let (m, t) = obtain_model(&corpus, &args.model)?;
        (Some(m), t)
    } else {
        (None, None)
    };
    let (ranking, time) = timed_ranking(&corpus, args.method, model.as_ref(), args.seed)?;
    ranking.write_csv(create(out_dir, &format!("{}_ranking.csv", args.method))?)?;
    let timing = RankTiming {
        method: args.method,
        vocab_size: ranking.len(),
        ranking_time_s: time,
        embedding_train_time_s: train_time,
    };
    let mut out = create(out_dir, &format!("{}_timing.json", args.method))?;
    serde_json::to_writer_pretty(&mut out, &timing)?;
    out.write_all(b"\n")?;
    eprintln!("ranked {} words with {} in {time:.6}s", ranking.len(), args.method);
    Ok(())
}

fn resolve_grid(args: &EvalArgs) -> Result<ExperimentGrid> {
    let mut grid = match &args.config {
        Some(path) => {
            let text = fs::read_to_string(path)
                .with_context(|| format!("reading {}", path.display()))?;
            toml::from_str(&text)
                .map_err(|e| usage(format!("{}: {e}", path.display())))?
        }
        None => ExperimentGrid::default(),
    };
    if let Some(v) = &args.methods {
        grid.methods = v.clone();
    }
    if let Some(v) = &args.percentages {
        grid.percentages = v.clone();
    }
    if let Some(v) = &args.classifiers {
        grid.classifiers = v.clone();
    }
    if let Some(v) = args.folds {
        grid.folds = v;
    }
    if let Some(v) = args.corpus.min_count {
        grid.min_count = v;
    }
    if let Some(seed) = args.seed {
        grid.seeds = GridSeeds::from_master(seed);
        grid.lr.seed = seed;
    }
    args.settings.apply(&mut grid.embedding);
    grid.validate()?;
    Ok(grid)
}

fn eval(out_dir: &Path, args: EvalArgs) -> Result<ExitCode> {
    let grid = resolve_grid(&args)?;
    let corpus = load(&args.corpus, grid.min_count)?;
    let model = match &args.embedding {
        Some(path) => Some(
            load_model_for(path, &corpus.vocab)
                .with_context(|| format!("loading {}", path.display()))?,
        ),
        None => None,
    };
    if grid.custom_percentages() {
        eprintln!("note: percentages outside the default 0,10,...,90,99 grid");
    }
    let report = run_grid_with_jobs(&corpus, &grid, model.as_ref(), args.jobs)?;
    create(out_dir, "report.json")?.write_all(report.to_json(!args.omit_timings)?.as_bytes())?;
    report.write_cells_csv(create(out_dir, "cells.csv")?)?;
    report.write_overlap_csv(create(out_dir, "overlap.csv")?)?;
    eprintln!(
        "{} cells evaluated, {} failed",
        report.cells.len(),
        report.failed_cells
    );
    Ok(if report.failed_cells > 0 {
        ExitCode::from(3)
    } else {
        ExitCode::SUCCESS
    })
}

fn read_ranking(path: &Path) -> Result<RankedWordList> {
    let file = File::open(path).with_context(|| format!("opening {}", path.display()))?;
    RankedWordList::read_csv(BufReader::new(file))
        .with_context(|| format!("parsing {}", path.display()))
}

fn overlap_cmd(out_dir: &Path, args: OverlapArgs) -> Result<()> {
    let x = read_ranking(&args.x)?;
    let y = read_ranking(&args.y)?;
    let mut out = csv::Writer::from_writer(create(out_dir, "overlap.csv")?);
    out.write_record(["elimination_pct", "overlap"])?;
    for pct in args.percentages {
        let value = overlap(&x, &y, pct)?;
        out.write_record([pct.to_string(), value.to_string()])?;
    }
    out.flush()?;
    Ok(())
}

const MISSING: &str = "NA";

fn project(out_dir: &Path, args: ProjectArgs) -> Result<()> {
    let corpus = load(&args.corpus, DEFAULT_MIN_COUNT)?;
    let (model, _) = obtain_model(&corpus, &args.model)?;
    let analysis = analyze(&model, &corpus.vocab)?;
    let ranked: Vec<&str> = analysis.ranking.words().collect();
    let n_shortest = args.n_shortest.min(ranked.len());
    let n_longest = args.n_longest.min(ranked.len() - n_shortest);
    let mut selected: Vec<&str> = ranked[..n_shortest].to_vec();
    selected.extend(ranked[ranked.len() - n_longest..].iter().rev());

    let extra: Vec<String> = match &args.words {
        Some(path) => fs::read_to_string(path)
            .with_context(|| format!("reading {}", path.display()))?
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty())
            .map(str::to_owned)
            .collect(),
        None => Vec::new(),
    };
    let mut fit_words = selected.clone();
    fit_words.extend(
        extra
            .iter()
            .map(String::as_str)
            .filter(|w| corpus.vocab.contains(w) && !selected.contains(w)),
    );
    let projection = project_2d(&model, &corpus.vocab, &analysis.plane, &fit_words)?;

    let mut out = csv::Writer::from_writer(create(out_dir, "projection.csv")?);
    out.write_record(["word", "pc1", "pc2", "distance"])?;
    fn emit<W: Write>(
        out: &mut csv::Writer<W>,
        word: &str,
        coords: [f64; 2],
        distance: f64,
    ) -> csv::Result<()> {
        out.write_record([
            word.to_owned(),
            coords[0].to_string(),
            coords[1].to_string(),
            distance.to_string(),
        ])
    }
    for point in &projection.points[..selected.len()] {
        emit(&mut out, &point.word, point.coords, point.distance)?;
    }
    for centroid in [&analysis.centroid_a, &analysis.centroid_b] {
        let name = format!("__centroid_{}__", corpus.label(centroid.class));
        emit(
            &mut out,
            &name,
            projection.project(&centroid.vector),
            analysis.plane.distance(&centroid.vector)?,
        )?;
    }
    for word in &extra {
        match corpus.vocab.id(word) {
            Some(id) => {
                let v = model.vector(id);
                emit(&mut out, word, projection.project(v), analysis.plane.distance(v)?)?;
            }
            None => out.write_record([word.as_str(), MISSING, MISSING, MISSING])?,
        }
    }
    out.flush()?;
    Ok(())
}

fn run(cli: Cli) -> Result<ExitCode> {
    let out_dir = cli.out_dir;
    match cli.command {
        Command::Synth(args) => synth(&out_dir, args)?,
        Command::Vocab(args) => vocab(&out_dir, args)?,
        Command::Rank(args) => rank(&out_dir, args)?,
        Command::Eval(args) => return eval(&out_dir, args),
        Command::Overlap(args) => overlap_cmd(&out_dir, args)?,
        Command::Project(args) => project(&out_dir, args)?,
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            let is_usage = e
                .chain()
                .find_map(|c| c.downcast_ref::<Error>())
                .is_some_and(Error::is_usage);
            ExitCode::from(if is_usage { 1 } else { 2 })
        }
    }
}
