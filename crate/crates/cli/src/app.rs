//! The `relstance` command line.
//!
//! Settings resolve in three layers: built-in defaults, then an optional
//! JSON `--config` file, then explicit flags. The resolved settings are
//! recorded in the run manifest.

use std::ffi::OsString;
use std::fs;
use std::io::BufReader;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};

use relstance_core::data::{InteractionKind, InteractionSet, Split, TweetDataset, WordVectorTable};
use relstance_core::eval::{grid_search_with, GridSpec};
use relstance_core::pipeline::{run_system, Resources, System, SystemParams};
use relstance_core::relemb::{build_corpus, CorpusMode, EpochStats};
use relstance_core::synth::{generate, Preset, SynthConfig};
use relstance_core::viz::{emit_scatter, user_labels, PcaModel};
use relstance_core::{RelationalEmbedding, TrainConfig};

use crate::formats;
use crate::manifest::{write_atomic, RunManifest};
use crate::parallel::train_parallel;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "relstance",
    version,
    about = "Relational user embeddings for stance detection",
    propagate_version = true
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a planted-community dataset.
    Synth(SynthArgs),
    /// Learn user embeddings from interaction pairs.
    TrainEmb(TrainEmbArgs),
    /// Train a stance system on TRAIN and evaluate it on TEST.
    Pipeline(PipelineArgs),
    /// Cross-validated grid search over the TRAIN split.
    Cv(CvArgs),
    /// Project user embeddings to 2-D and plot them by stance.
    Viz(VizArgs),
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    /// clean, overlap or transversal.
    #[arg(long, default_value = "clean")]
    pub preset: String,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub text_noise: Option<f64>,
    #[arg(long)]
    pub unknown_user_fraction: Option<f64>,
    /// JSON file with generator settings; flags take precedence.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub out_dir: PathBuf,
}

#[derive(Debug, Args)]
pub struct TrainEmbArgs {
    /// Edge file, optionally suffixed with `:retweet` or `:friend` to set
    /// the kind of lines that do not name one. Repeatable.
    #[arg(long, required = true)]
    pub edges: Vec<String>,
    /// retweet, friends or mixed.
    #[arg(long)]
    pub mode: Option<String>,
    #[arg(long)]
    pub dim: Option<usize>,
    #[arg(long)]
    pub epochs: Option<usize>,
    /// Negatives per pair.
    #[arg(long)]
    pub neg: Option<usize>,
    /// Subsampling threshold.
    #[arg(long)]
    pub subsample: Option<f64>,
    /// Initial learning rate.
    #[arg(long)]
    pub lr: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Worker threads. With more than one thread updates race without
    /// locks, so the output is no longer reproducible across runs.
    #[arg(long)]
    pub threads: Option<usize>,
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Suppress per-epoch progress on stderr.
    #[arg(long)]
    pub quiet: bool,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct PipelineArgs {
    /// relemb-svm, tfidf-svm, ftemb-svm, backoff:<text system> or
    /// ensemble:<text system>.
    #[arg(long)]
    pub system: Option<String>,
    #[arg(long)]
    pub tweets: PathBuf,
    #[arg(long)]
    pub emb: Option<PathBuf>,
    #[arg(long)]
    pub wordvecs: Option<PathBuf>,
    #[arg(long = "C", visible_alias = "c")]
    pub c: Option<f64>,
    #[arg(long)]
    pub gamma: Option<f64>,
    /// Keep only the most frequent TF-IDF terms.
    #[arg(long)]
    pub max_features: Option<usize>,
    /// cosine or negative-euclidean (back-off relational rule).
    #[arg(long)]
    pub similarity: Option<String>,
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub out_dir: PathBuf,
}

#[derive(Debug, Args)]
pub struct CvArgs {
    #[arg(long)]
    pub system: Option<String>,
    #[arg(long)]
    pub tweets: PathBuf,
    /// Edge files as in `train-emb`; needed by systems using embeddings.
    #[arg(long)]
    pub edges: Vec<String>,
    #[arg(long)]
    pub wordvecs: Option<PathBuf>,
    /// Grid axes, e.g. `dims=10,20 C=1,10 gamma=0.1,1`.
    #[arg(long, num_args = 1..)]
    pub grid: Vec<String>,
    /// Corpus modes to try, e.g. `retweet,mixed`.
    #[arg(long)]
    pub modes: Option<String>,
    #[arg(long)]
    pub folds: Option<usize>,
    /// by-tweet or by-user.
    #[arg(long)]
    pub fold_mode: Option<String>,
    #[arg(long)]
    pub epochs: Option<usize>,
    /// Seeds both the folds and the embedding trainer.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Embedding trainer threads; see `train-emb --help`.
    #[arg(long)]
    pub threads: Option<usize>,
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub quiet: bool,
    #[arg(long)]
    pub out_dir: PathBuf,
}

#[derive(Debug, Args)]
pub struct VizArgs {
    #[arg(long)]
    pub emb: PathBuf,
    #[arg(long)]
    pub tweets: PathBuf,
    /// SVG output path.
    #[arg(long)]
    pub out: PathBuf,
    /// Coordinates TSV; defaults to the SVG path with a `.tsv` extension.
    #[arg(long)]
    pub coords: Option<PathBuf>,
    /// Label users from all tweets instead of TRAIN only.
    #[arg(long)]
    pub all_users: bool,
    #[arg(long)]
    pub title: Option<String>,
}

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Runtime(anyhow::Error),
}

impl From<anyhow::Error> for CliError {
    fn from(e: anyhow::Error) -> Self {
        CliError::Runtime(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Runtime(e.into())
    }
}

impl From<relstance_core::Error> for CliError {
    fn from(e: relstance_core::Error) -> Self {
        CliError::Runtime(e.into())
    }
}

impl From<formats::FormatError> for CliError {
    fn from(e: formats::FormatError) -> Self {
        CliError::Runtime(e.into())
    }
}

type CliResult<T> = Result<T, CliError>;

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

/// Parses `args` (program name first), runs the command and returns the
/// process exit code. Errors go to stderr.
pub fn run_from<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match run(cli) {
        Ok(()) => EXIT_OK,
        Err(CliError::Usage(m)) => {
            eprintln!("error: {m}");
            EXIT_USAGE
        }
        Err(CliError::Runtime(e)) => {
            eprintln!("error: {e:#}");
            EXIT_FAILURE
        }
    }
}

pub fn run(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Synth(a) => cmd_synth(a),
        Command::TrainEmb(a) => cmd_train_emb(a),
        Command::Pipeline(a) => cmd_pipeline(a),
        Command::Cv(a) => cmd_cv(a),
        Command::Viz(a) => cmd_viz(a),
    }
}

// ---- settings resolution ----

fn merge(base: &mut Value, over: Value) {
    match (base, over) {
        (Value::Object(b), Value::Object(o)) => {
            for (k, v) in o {
                match b.get_mut(&k) {
                    Some(slot) if slot.is_object() && v.is_object() => merge(slot, v),
                    _ => {
                        b.insert(k, v);
                    }
                }
            }
        }
        (b, o) => *b = o,
    }
}

/// Sets `path` (dot-separated) in `map` when `value` is present.
fn flag<T: Serialize>(map: &mut Value, path: &str, value: Option<T>) {
    let Some(v) = value else { return };
    let mut over = serde_json::to_value(v).expect("flag values serialize");
    for key in path.rsplit('.') {
        let mut m = Map::new();
        m.insert(key.to_string(), over);
        over = Value::Object(m);
    }
    merge(map, over);
}

fn resolve<T: Serialize + DeserializeOwned>(
    defaults: T,
    config: Option<&Path>,
    flags: Value,
) -> CliResult<T> {
    let mut v = serde_json::to_value(defaults).expect("defaults serialize");
    if let Some(path) = config {
        let text = fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        let file: Value = serde_json::from_str(&text)
            .map_err(|e| usage(format!("config {}: {e}", path.display())))?;
        if !file.is_object() {
            return Err(usage(format!("config {}: expected a JSON object", path.display())));
        }
        merge(&mut v, file);
    }
    merge(&mut v, flags);
    serde_json::from_value(v).map_err(|e| usage(format!("invalid settings: {e}")))
}

// ---- input helpers ----

fn open(path: &Path) -> CliResult<BufReader<fs::File>> {
    let f = fs::File::open(path).with_context(|| format!("opening {}", path.display()))?;
    Ok(BufReader::new(f))
}

fn read_tweets(path: &Path) -> CliResult<TweetDataset> {
    formats::parse_tweets(open(path)?)
        .with_context(|| format!("reading tweets {}", path.display()))
        .map_err(CliError::Runtime)
}

fn read_embedding(path: &Path) -> CliResult<RelationalEmbedding> {
    formats::read_embedding(open(path)?)
        .with_context(|| format!("reading embedding {}", path.display()))
        .map_err(CliError::Runtime)
}

fn read_word_vectors(path: &Path) -> CliResult<WordVectorTable> {
    formats::load_word_vectors(open(path)?)
        .with_context(|| format!("reading word vectors {}", path.display()))
        .map_err(CliError::Runtime)
}

/// Splits `path[:kind]`. The suffix only counts when it names a kind, so
/// paths containing colons still work.
pub fn parse_edge_spec(spec: &str) -> (PathBuf, InteractionKind) {
    if let Some((path, kind)) = spec.rsplit_once(':') {
        if let Ok(k) = kind.parse::<InteractionKind>() {
            return (PathBuf::from(path), k);
        }
    }
    (PathBuf::from(spec), InteractionKind::Retweet)
}

/// Reads every edge file and splits the pairs by kind.
fn read_edges(specs: &[String], manifest: &mut RunManifest) -> CliResult<(InteractionSet, InteractionSet)> {
    let mut all = InteractionSet::new();
    for spec in specs {
        let (path, kind) = parse_edge_spec(spec);
        let set = formats::parse_edges(open(&path)?, kind)
            .with_context(|| format!("reading edges {}", path.display()))?;
        manifest.add_input(&path)?;
        all.extend(set.iter().cloned());
    }
    Ok((
        all.filter_kind(InteractionKind::Retweet),
        all.filter_kind(InteractionKind::Friend),
    ))
}

fn write_file(path: &Path, bytes: &[u8], manifest: &mut RunManifest) -> CliResult<()> {
    write_atomic(path, bytes).with_context(|| format!("writing {}", path.display()))?;
    manifest.add_output(path);
    Ok(())
}

fn ensure_dir(dir: &Path) -> CliResult<()> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    Ok(())
}

fn sidecar(path: &Path) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(".manifest.json");
    PathBuf::from(s)
}

fn progress_printer(quiet: bool, total: usize) -> impl FnMut(&EpochStats) {
    move |s: &EpochStats| {
        if !quiet {
            eprintln!(
                "epoch {}/{}  loss {:.6}  lr {:.6}  pairs {} (dropped {})",
                s.epoch, total, s.mean_loss, s.lr, s.trained, s.dropped
            );
        }
    }
}

fn to_json<T: Serialize>(v: &T) -> Vec<u8> {
    let mut out = serde_json::to_vec_pretty(v).expect("serializable");
    out.push(b'\n');
    out
}

// ---- synth ----

fn cmd_synth(a: SynthArgs) -> CliResult<()> {
    let preset: Preset = a.preset.parse().map_err(|e: relstance_core::Error| usage(e.to_string()))?;
    let mut flags = json!({});
    flag(&mut flags, "seed", a.seed);
    flag(&mut flags, "text_noise", a.text_noise);
    flag(&mut flags, "unknown_user_fraction", a.unknown_user_fraction);
    let cfg: SynthConfig = resolve(preset.config(), a.config.as_deref(), flags)?;
    cfg.validate().map_err(|e| usage(e.to_string()))?;
    let data = generate(&cfg)?;

    ensure_dir(&a.out_dir)?;
    let mut manifest = RunManifest::new(
        "synth",
        json!({ "preset": preset, "generator": cfg }),
        cfg.seed,
    );
    if let Some(c) = &a.config {
        manifest.add_input(c)?;
    }
    let mut buf = Vec::new();
    formats::serialize_edges(&data.retweets, &mut buf)?;
    write_file(&a.out_dir.join("retweets.tsv"), &buf, &mut manifest)?;
    buf.clear();
    formats::serialize_edges(&data.friends, &mut buf)?;
    write_file(&a.out_dir.join("friends.tsv"), &buf, &mut manifest)?;
    buf.clear();
    formats::write_tweets(&data.tweets, &mut buf)?;
    write_file(&a.out_dir.join("tweets.tsv"), &buf, &mut manifest)?;
    buf.clear();
    formats::write_word_vectors(&data.word_vectors, &mut buf)?;
    write_file(&a.out_dir.join("wordvecs.vec"), &buf, &mut manifest)?;
    manifest.write(&a.out_dir.join("manifest.json"))?;
    Ok(())
}

// ---- train-emb ----

#[derive(Debug, Clone, Serialize, Deserialize)]
struct TrainEmbSettings {
    mode: CorpusMode,
    #[serde(flatten)]
    train: TrainConfig,
}

fn cmd_train_emb(a: TrainEmbArgs) -> CliResult<()> {
    let mut flags = json!({});
    flag(&mut flags, "mode", a.mode);
    flag(&mut flags, "dim", a.dim);
    flag(&mut flags, "epochs", a.epochs);
    flag(&mut flags, "negatives_k", a.neg);
    flag(&mut flags, "subsample_t", a.subsample);
    flag(&mut flags, "initial_lr", a.lr);
    flag(&mut flags, "seed", a.seed);
    flag(&mut flags, "threads", a.threads);
    let defaults = TrainEmbSettings {
        mode: CorpusMode::Retweet,
        train: TrainConfig::default(),
    };
    let s: TrainEmbSettings = resolve(defaults, a.config.as_deref(), flags)?;
    s.train.validate().map_err(|e| usage(e.to_string()))?;

    let mut manifest = RunManifest::new("train-emb", serde_json::to_value(&s).unwrap(), s.train.seed);
    if let Some(c) = &a.config {
        manifest.add_input(c)?;
    }
    let (retweets, friends) = read_edges(&a.edges, &mut manifest)?;
    let corpus = build_corpus(&retweets, &friends, s.mode)?;
    let emb = train_parallel(&corpus, &s.train, progress_printer(a.quiet, s.train.epochs))?;
    let mut buf = Vec::new();
    formats::write_embedding(&emb, &mut buf)?;
    write_file(&a.out, &buf, &mut manifest)?;
    manifest.write(&sidecar(&a.out))?;
    Ok(())
}

// ---- pipeline ----

#[derive(Debug, Clone, Serialize, Deserialize)]
struct PipelineSettings {
    system: System,
    #[serde(flatten)]
    params: SystemParams,
}

fn system_flags(
    flags: &mut Value,
    system: Option<String>,
    c: Option<f64>,
    gamma: Option<f64>,
    max_features: Option<usize>,
    similarity: Option<String>,
) {
    flag(flags, "system", system);
    flag(flags, "svm.c", c);
    flag(flags, "svm.gamma", gamma);
    flag(flags, "max_features", max_features);
    flag(flags, "similarity", similarity);
}

/// Rejects system/input combinations that cannot run.
fn check_inputs(system: System, has_emb: bool, has_wordvecs: bool, emb_flag: &str) -> CliResult<()> {
    if system.needs_embedding() && !has_emb {
        return Err(usage(format!("system {system} needs {emb_flag}")));
    }
    if system.needs_word_vectors() && !has_wordvecs {
        return Err(usage(format!("system {system} needs --wordvecs")));
    }
    Ok(())
}

fn cmd_pipeline(a: PipelineArgs) -> CliResult<()> {
    let mut flags = json!({});
    system_flags(&mut flags, a.system, a.c, a.gamma, a.max_features, a.similarity);
    let defaults = PipelineSettings {
        system: System::RelembSvm,
        params: SystemParams::default(),
    };
    let s: PipelineSettings = resolve(defaults, a.config.as_deref(), flags)?;
    check_inputs(s.system, a.emb.is_some(), a.wordvecs.is_some(), "--emb")?;

    let mut manifest = RunManifest::new("pipeline", serde_json::to_value(&s).unwrap(), 0);
    if let Some(c) = &a.config {
        manifest.add_input(c)?;
    }
    let data = read_tweets(&a.tweets)?;
    manifest.add_input(&a.tweets)?;
    let emb = match &a.emb {
        Some(p) if s.system.needs_embedding() => {
            manifest.add_input(p)?;
            Some(read_embedding(p)?)
        }
        _ => None,
    };
    let wordvecs = match &a.wordvecs {
        Some(p) if s.system.needs_word_vectors() => {
            manifest.add_input(p)?;
            Some(read_word_vectors(p)?)
        }
        _ => None,
    };
    let res = Resources {
        embedding: emb.as_ref(),
        word_vectors: wordvecs.as_ref(),
    };
    let run = run_system(s.system, &data, &res, &s.params)?;

    ensure_dir(&a.out_dir)?;
    let dir = &a.out_dir;
    write_file(&dir.join("predictions.tsv"), run.predictions_tsv().as_bytes(), &mut manifest)?;
    write_file(&dir.join("report.json"), &to_json(&run.report), &mut manifest)?;
    write_file(&dir.join("report.txt"), run.report.to_table().as_bytes(), &mut manifest)?;
    write_file(&dir.join("confusion.tsv"), run.report.confusion.to_tsv().as_bytes(), &mut manifest)?;
    let model = json!({
        "version": relstance_core::MODEL_FORMAT_VERSION,
        "system": s.system,
        "tfidf": run.artifacts.tfidf,
        "svm": run.artifacts.svm,
        "class_distance": run.artifacts.class_distance,
    });
    write_file(&dir.join("model.json"), &to_json(&model), &mut manifest)?;
    manifest.write(&dir.join("manifest.json"))?;
    Ok(())
}

// ---- cv ----

#[derive(Debug, Clone, Serialize, Deserialize)]
struct CvSettings {
    system: System,
    grid: GridSpec,
    embedding: TrainConfig,
    #[serde(flatten)]
    params: SystemParams,
}

fn parse_list<T: std::str::FromStr>(axis: &str, values: &str) -> CliResult<Vec<T>> {
    values
        .split(',')
        .map(|v| {
            v.trim()
                .parse()
                .map_err(|_| usage(format!("bad value `{v}` for grid axis {axis}")))
        })
        .collect()
}

fn cmd_cv(a: CvArgs) -> CliResult<()> {
    let mut flags = json!({});
    flag(&mut flags, "system", a.system);
    for g in &a.grid {
        let (axis, values) = g
            .split_once('=')
            .ok_or_else(|| usage(format!("grid axis `{g}` is not of the form name=v1,v2")))?;
        match axis.to_ascii_lowercase().as_str() {
            "dims" | "dim" => flag(&mut flags, "grid.dims", Some(parse_list::<usize>(axis, values)?)),
            "c" => flag(&mut flags, "grid.cs", Some(parse_list::<f64>(axis, values)?)),
            "gamma" | "gammas" => flag(&mut flags, "grid.gammas", Some(parse_list::<f64>(axis, values)?)),
            _ => return Err(usage(format!("unknown grid axis `{axis}`"))),
        }
    }
    if let Some(m) = a.modes {
        let modes: Vec<&str> = m.split(',').map(str::trim).collect();
        flag(&mut flags, "grid.modes", Some(modes));
    }
    flag(&mut flags, "grid.folds", a.folds);
    flag(&mut flags, "grid.fold_mode", a.fold_mode);
    flag(&mut flags, "grid.seed", a.seed);
    flag(&mut flags, "embedding.seed", a.seed);
    flag(&mut flags, "embedding.epochs", a.epochs);
    flag(&mut flags, "embedding.threads", a.threads);
    let defaults = CvSettings {
        system: System::RelembSvm,
        grid: GridSpec::default(),
        embedding: TrainConfig::default(),
        params: SystemParams::default(),
    };
    let s: CvSettings = resolve(defaults, a.config.as_deref(), flags)?;
    s.grid.validate(s.system).map_err(|e| usage(e.to_string()))?;
    s.embedding.validate().map_err(|e| usage(e.to_string()))?;
    check_inputs(s.system, !a.edges.is_empty(), a.wordvecs.is_some(), "--edges")?;

    let mut manifest = RunManifest::new("cv", serde_json::to_value(&s).unwrap(), s.grid.seed);
    if let Some(c) = &a.config {
        manifest.add_input(c)?;
    }
    let data = read_tweets(&a.tweets)?;
    manifest.add_input(&a.tweets)?;
    let (retweets, friends) = if s.system.needs_embedding() {
        read_edges(&a.edges, &mut manifest)?
    } else {
        (InteractionSet::new(), InteractionSet::new())
    };
    let wordvecs = match &a.wordvecs {
        Some(p) if s.system.needs_word_vectors() => {
            manifest.add_input(p)?;
            Some(read_word_vectors(p)?)
        }
        _ => None,
    };
    let quiet = a.quiet;
    let mut trainer = |corpus: &InteractionSet, cfg: &TrainConfig| {
        if !quiet {
            eprintln!("training embedding: dim {} on {} pairs", cfg.dim, corpus.len());
        }
        train_parallel(corpus, cfg, |_| {})
    };
    let result = grid_search_with(
        &data,
        &retweets,
        &friends,
        &s.grid,
        s.system,
        &s.embedding,
        &s.params,
        wordvecs.as_ref(),
        &mut trainer,
    )?;

    ensure_dir(&a.out_dir)?;
    write_file(&a.out_dir.join("cv.json"), &to_json(&result), &mut manifest)?;
    write_file(&a.out_dir.join("cv.txt"), result.to_table().as_bytes(), &mut manifest)?;
    manifest.write(&a.out_dir.join("manifest.json"))?;
    Ok(())
}

// ---- viz ----

fn cmd_viz(a: VizArgs) -> CliResult<()> {
    let split = if a.all_users { None } else { Some(Split::Train) };
    let mut manifest = RunManifest::new(
        "viz",
        json!({ "users": if a.all_users { "all" } else { "train" } }),
        0,
    );
    let emb = read_embedding(&a.emb)?;
    manifest.add_input(&a.emb)?;
    let data = read_tweets(&a.tweets)?;
    manifest.add_input(&a.tweets)?;

    let labelled: Vec<(String, relstance_core::Stance, &[f64])> = user_labels(&data, split)
        .into_iter()
        .filter_map(|(u, s)| emb.row(&u).map(|r| (u, s, r)))
        .collect();
    if labelled.len() < 2 {
        return Err(CliError::Runtime(anyhow!(
            "need at least two labelled users with embeddings, found {}",
            labelled.len()
        )));
    }
    let rows: Vec<&[f64]> = labelled.iter().map(|x| x.2).collect();
    let pca = PcaModel::fit(&rows, 2)?;
    let mut points = Vec::with_capacity(rows.len());
    let mut tsv = String::from("user\tx\ty\tlabel\n");
    for (u, s, r) in &labelled {
        let p = pca.transform(r)?;
        points.push((p[0], p[1]));
        tsv.push_str(&format!("{u}\t{}\t{}\t{s}\n", formats::fmt_g9(p[0]), formats::fmt_g9(p[1])));
    }
    let labels: Vec<_> = labelled.iter().map(|x| x.1).collect();
    let title = a.title.clone().unwrap_or_else(|| "User embeddings (PCA)".into());
    let svg = emit_scatter(&points, &labels, &title);

    let coords = a.coords.clone().unwrap_or_else(|| a.out.with_extension("tsv"));
    if let Some(d) = a.out.parent().filter(|d| !d.as_os_str().is_empty()) {
        ensure_dir(d)?;
    }
    write_file(&a.out, svg.as_bytes(), &mut manifest)?;
    write_file(&coords, tsv.as_bytes(), &mut manifest)?;
    manifest.write(&sidecar(&a.out))?;
    Ok(())
}
