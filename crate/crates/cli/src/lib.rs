//! Subcommand implementations behind the `infogen` binary.
//!
//! Every command returns a typed error whose [`CliError::exit_code`] is the
//! process exit status, so the functions can be driven directly from tests.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::Serialize;

use infogen::adapt::{self, AdaptionTrace, ProposalParams};
use infogen::corpus::{self, learn_distribution, CorpusError, ExampleLibrary};
use infogen::init::{initialize, Draft};
use infogen::render::render_to_string;
use infogen::retrieval::{build_index, retrieve, sample_queries};
use infogen::scorer::{self, Layout, ModelError, ScorerModel, TrainConfig, TrainError};
use infogen::statement::{self, SegmentError};

pub const DEFAULT_CORPUS: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/../../data/corpus.json");
pub const DEFAULT_MODEL: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/../../data/model.bin");

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Parse(String),
    #[error("{0}")]
    Missing(String),
    #[error("{0}")]
    Diverged(#[from] TrainError),
    #[error("{0}")]
    Invalid(String),
    #[error("cannot write {path}: {source}")]
    Write { path: String, source: std::io::Error },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Invalid(_) => 1,
            CliError::Parse(_) => 2,
            CliError::Missing(_) | CliError::Write { .. } => 3,
            CliError::Diverged(_) => 4,
        }
    }
}

impl From<SegmentError> for CliError {
    fn from(e: SegmentError) -> Self {
        CliError::Parse(format!("cannot segment statement: {e}"))
    }
}

impl From<CorpusError> for CliError {
    fn from(e: CorpusError) -> Self {
        match e {
            CorpusError::Io { .. } => CliError::Missing(e.to_string()),
            CorpusError::Parse(_) => CliError::Parse(e.to_string()),
            _ => CliError::Invalid(e.to_string()),
        }
    }
}

impl From<ModelError> for CliError {
    fn from(e: ModelError) -> Self {
        match e {
            ModelError::Io { .. } => CliError::Missing(e.to_string()),
            _ => CliError::Parse(e.to_string()),
        }
    }
}

fn write_file(path: &Path, contents: impl AsRef<[u8]>) -> Result<(), CliError> {
    std::fs::write(path, contents).map_err(|source| CliError::Write { path: path.display().to_string(), source })
}

fn create_dir(path: &Path) -> Result<(), CliError> {
    std::fs::create_dir_all(path).map_err(|source| CliError::Write { path: path.display().to_string(), source })
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub corpus_path: PathBuf,
    pub model_path: PathBuf,
    pub output_dir: PathBuf,
    pub m_prime: usize,
    pub seed: u64,
    pub iterations: usize,
    pub sigma_pos: f64,
    pub sigma_size: f64,
    pub snap_epsilon: f64,
    pub trace: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        let p = ProposalParams::default();
        RunConfig {
            corpus_path: DEFAULT_CORPUS.into(),
            model_path: DEFAULT_MODEL.into(),
            output_dir: "out".into(),
            m_prime: 5,
            seed: 0,
            iterations: p.iterations,
            sigma_pos: p.sigma_pos,
            sigma_size: p.sigma_size,
            snap_epsilon: adapt::DEFAULT_SNAP_EPSILON,
            trace: false,
        }
    }
}

/// One generated infographic as listed in `manifest.json`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ManifestEntry {
    pub index: usize,
    pub svg: String,
    pub draft: String,
    pub choice: String,
    pub example_id: String,
    pub distance: f64,
    pub unmatched_elements: usize,
    pub pictograph_count: Option<u32>,
    pub initial_anchor_score: f64,
    pub final_anchor_score: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Manifest {
    pub statement: String,
    pub seed: u64,
    pub m_prime: usize,
    pub outputs: Vec<ManifestEntry>,
}

struct Generated {
    entry: ManifestEntry,
    draft: Draft,
    trace: AdaptionTrace,
}

fn query_seed(seed: u64, k: usize) -> u64 {
    seed ^ (k as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15)
}

fn thread_pool() -> rayon::ThreadPool {
    let mut b = rayon::ThreadPoolBuilder::new();
    if let Some(n) = std::env::var("INFOGEN_THREADS").ok().and_then(|v| v.parse::<usize>().ok()).filter(|&n| n > 0) {
        b = b.num_threads(n);
    }
    b.build().expect("thread pool")
}

/// Segments, retrieves, initializes, refines, snaps and renders `m_prime`
/// infographics into `config.output_dir`.
pub fn cmd_generate(statement_text: &str, config: &RunConfig) -> Result<Manifest, CliError> {
    if config.m_prime == 0 {
        return Err(CliError::Parse("m_prime must be at least 1".into()));
    }
    let lib = corpus::load_library(&config.corpus_path)?;
    let model = scorer::load_model(&config.model_path)?;
    let seg = statement::segment(statement_text)?;
    let dist = learn_distribution(&lib);
    let queries = sample_queries(statement_text, &dist, config.m_prime, config.seed)?;
    let index = build_index(&lib);

    let run = |k: usize| -> Result<Generated, CliError> {
        let q = &queries[k];
        let found = retrieve(&index, q).expect("library is non-empty");
        let example = lib.get(&found.index.example_id).expect("indexed example");
        let d0 = initialize(example, q);
        let params = ProposalParams {
            sigma_pos: config.sigma_pos,
            sigma_size: config.sigma_size,
            iterations: config.iterations,
            seed: query_seed(config.seed, k),
        };
        let map = |e: adapt::AdaptError| CliError::Parse(e.to_string());
        let (refined, trace, count) = if adapt::pictograph_index(&d0).is_some() {
            let c = adapt::choose_pictograph_count(&d0, &model, &params).map_err(map)?;
            (c.draft, c.trace, Some(c.count))
        } else {
            let (d, t) = adapt::refine(&d0, &model, &params).map_err(map)?;
            (d, t, None)
        };
        let draft = adapt::snap_align(&refined, config.snap_epsilon);
        let anchor = model.extract_features(&Layout::from(&d0));
        let initial = model.compare(&anchor, &anchor).0;
        let final_score = model.compare(&model.extract_features(&Layout::from(&draft)), &anchor).0;
        let entry = ManifestEntry {
            index: k,
            svg: format!("infographic-{k}.svg"),
            draft: format!("draft-{k}.json"),
            choice: q.choice.to_string(),
            example_id: example.id.clone(),
            distance: found.distance,
            unmatched_elements: d0.provenance.unmatched.len(),
            pictograph_count: count,
            initial_anchor_score: initial,
            final_anchor_score: final_score,
        };
        Ok(Generated { entry, draft, trace })
    };
    let results: Vec<Result<Generated, CliError>> = thread_pool().install(|| {
        use rayon::prelude::*;
        (0..queries.len()).into_par_iter().map(run).collect()
    });

    create_dir(&config.output_dir)?;
    let mut outputs = Vec::with_capacity(results.len());
    for r in results {
        let g = r?;
        write_file(&config.output_dir.join(&g.entry.svg), render_to_string(&g.draft))?;
        write_file(&config.output_dir.join(&g.entry.draft), g.draft.to_json() + "\n")?;
        if config.trace {
            write_file(&config.output_dir.join(format!("trace-{}.jsonl", g.entry.index)), g.trace.to_json_lines())?;
        }
        outputs.push(g.entry);
    }
    let manifest = Manifest { statement: seg.raw, seed: config.seed, m_prime: config.m_prime, outputs };
    let text = serde_json::to_string_pretty(&manifest).expect("manifest serializes") + "\n";
    write_file(&config.output_dir.join("manifest.json"), text)?;
    Ok(manifest)
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainArgs {
    pub corpus_path: PathBuf,
    pub model_out: PathBuf,
    pub metrics_csv: Option<PathBuf>,
    pub n_train: usize,
    pub n_val: usize,
    pub config: TrainConfig,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainReport {
    pub metrics: Vec<scorer::EpochMetrics>,
    pub best: scorer::EpochMetrics,
}

pub fn metrics_csv(metrics: &[scorer::EpochMetrics]) -> String {
    let mut out = String::from("epoch,train_loss,val_loss,val_accuracy,val_accuracy_original,val_accuracy_perturbed\n");
    for m in metrics {
        let _ = writeln!(
            out,
            "{},{:.6},{:.6},{:.4},{:.4},{:.4}",
            m.epoch, m.train_loss, m.val_loss, m.val_accuracy, m.val_accuracy_original, m.val_accuracy_perturbed
        );
    }
    out
}

/// Builds perturbation pairs from the corpus, trains and saves the scorer.
pub fn cmd_train(args: &TrainArgs, mut progress: impl FnMut(&scorer::EpochMetrics)) -> Result<TrainReport, CliError> {
    let lib = corpus::load_library(&args.corpus_path)?;
    let (train, val) = scorer::build_training_set(&lib, args.n_train, args.n_val, args.config.seed);
    let model = ScorerModel::new(args.config.hidden, args.config.seed);
    let (model, metrics) = scorer::train_with(model, &train, &val, &args.config, &mut progress)?;
    scorer::save_model(&model, &args.config, &args.model_out)?;
    if let Some(path) = &args.metrics_csv {
        write_file(path, metrics_csv(&metrics))?;
    }
    let best = metrics
        .iter()
        .fold(None::<&scorer::EpochMetrics>, |b, m| match b {
            Some(b) if b.val_accuracy >= m.val_accuracy => Some(b),
            _ => Some(m),
        })
        .expect("at least one epoch")
        .clone();
    Ok(TrainReport { metrics, best })
}

/// Every problem found in a corpus file, one line each.
pub fn cmd_validate(corpus_path: &Path) -> Result<Vec<String>, CliError> {
    let text = std::fs::read_to_string(corpus_path)
        .map_err(|e| CliError::Missing(format!("cannot read corpus {}: {e}", corpus_path.display())))?;
    let lib: ExampleLibrary =
        serde_json::from_str(&text).map_err(|e| CliError::Parse(format!("malformed corpus: {e}")))?;
    let mut problems = Vec::new();
    if lib.examples.is_empty() {
        problems.push("corpus contains no examples".to_string());
    }
    let mut seen = std::collections::HashSet::new();
    for e in &lib.examples {
        if !seen.insert(e.id.as_str()) {
            problems.push(format!("{}: duplicate example id", e.id));
        }
        for v in corpus::validate_example(e) {
            problems.push(format!("{}: {v}", e.id));
        }
    }
    Ok(problems)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairDataset {
    pub seed: u64,
    pub train: Vec<scorer::TrainingPair>,
    pub val: Vec<scorer::TrainingPair>,
}

/// Writes a training/validation pair set as JSON.
pub fn cmd_perturb(corpus_path: &Path, out: &Path, seed: u64, n_train: usize, n_val: usize) -> Result<PairDataset, CliError> {
    let lib = corpus::load_library(corpus_path)?;
    let (train, val) = scorer::build_training_set(&lib, n_train, n_val, seed);
    let data = PairDataset { seed, train, val };
    write_file(out, serde_json::to_string(&data).expect("pairs serialize") + "\n")?;
    Ok(data)
}

fn read_draft(path: &Path) -> Result<Draft, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Missing(format!("cannot read draft {}: {e}", path.display())))?;
    Draft::from_json(&text).map_err(|e| CliError::Parse(format!("malformed draft {}: {e}", path.display())))
}

pub fn cmd_score(model_path: &Path, draft_a: &Path, draft_b: &Path) -> Result<(f64, f64), CliError> {
    let model = scorer::load_model(model_path)?;
    let (a, b) = (read_draft(draft_a)?, read_draft(draft_b)?);
    Ok(scorer::score_pair(&model, &a, &b))
}

/// Writes a synthetic example library.
pub fn cmd_synth(out: &Path, seed: u64, n: usize) -> Result<ExampleLibrary, CliError> {
    if n == 0 {
        return Err(CliError::Parse("example count must be at least 1".into()));
    }
    let lib = corpus::gen_synthetic_corpus(seed, n);
    write_file(out, lib.to_json() + "\n")?;
    Ok(lib)
}
