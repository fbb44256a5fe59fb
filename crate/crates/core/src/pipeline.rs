//! End-to-end driver: configuration, validation, stages, caching and the manifest.
//!
//! Stages run in order `corpus → lda → aggregate → network`. Each stage reads
//! its inputs from the output directory and writes its artifacts there, so a
//! stage can run on its own once its predecessors have run. A stage is skipped
//! when caching is on and its input hash matches the previous manifest and its
//! recorded outputs are intact.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::aggregate::{self, SpeakerYearProportions, Weighting};
use crate::corpus::{self, Corpus, CorpusFormat, SpeechSummary, Stopwords};
use crate::lda::{self, Hyperparams, ModelFile};
use crate::network::{self, LinkParams, LinkRule, NullModelParams, SpeakerLabels};

pub const MANIFEST_FILE: &str = "manifest.json";

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("invalid configuration:\n{0}")]
    Invalid(ValidationReport),
    #[error("cannot read configuration {path}: {message}")]
    Config { path: String, message: String },
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("missing artifact {0}; run the earlier stages first")]
    MissingArtifact(String),
    #[error("{path}: {message}")]
    Artifact { path: String, message: String },
    #[error(transparent)]
    Corpus(#[from] corpus::CorpusError),
    #[error(transparent)]
    Lda(#[from] lda::LdaError),
    #[error(transparent)]
    Aggregate(#[from] aggregate::AggregateError),
    #[error(transparent)]
    Network(#[from] network::NetworkError),
    #[error("csv output: {0}")]
    Csv(#[from] csv::Error),
    #[error("term {0} has no documents")]
    UnknownTerm(u32),
    #[error("stage `{stage}` failed: {source}")]
    Stage {
        stage: Stage,
        #[source]
        source: Box<PipelineError>,
    },
}

impl PipelineError {
    /// 1 for configuration problems, 2 for everything that fails at run time.
    pub fn exit_code(&self) -> i32 {
        match self {
            PipelineError::Invalid(_) | PipelineError::Config { .. } => 1,
            _ => 2,
        }
    }
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> PipelineError + '_ {
    move |source| PipelineError::Io {
        path: path.display().to_string(),
        source,
    }
}

/// Every tunable of the pipeline. Relative paths are resolved against the
/// directory of the configuration file they were read from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    pub input: PathBuf,
    pub format: CorpusFormat,
    pub output_dir: PathBuf,
    /// Extra stopword files, one token per line.
    pub stopwords: Vec<PathBuf>,
    /// Include the bundled English stopword list.
    pub builtin_stopwords: bool,
    /// Include the bundled parliamentary procedure list.
    pub procedural_stopwords: bool,
    /// Speeches with fewer whitespace words are dropped.
    pub min_words_speech: usize,
    pub speech_histogram_bin: usize,
    pub topics: usize,
    /// Defaults to 50 / topics.
    pub alpha: Option<f64>,
    pub beta: f64,
    pub iterations: usize,
    pub burn_in: usize,
    pub seed: u64,
    pub excluded_topics: Vec<usize>,
    pub top_words: usize,
    pub weighting: Weighting,
    pub speaker_histogram_bin: u64,
    pub link_threshold: f64,
    pub link_rule: LinkRule,
    pub min_words_speaker_term: u64,
    pub null_runs: usize,
    pub swaps_per_edge: usize,
    pub parallel: bool,
    /// Terms to build networks for; empty means every term in the data.
    pub terms: Vec<u32>,
    /// Optional `speaker_id,code` CSV used for node labels.
    pub speaker_labels: Option<PathBuf>,
    pub top_communities: usize,
    pub cache: bool,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            input: PathBuf::new(),
            format: CorpusFormat::Jsonl,
            output_dir: PathBuf::from("out"),
            stopwords: Vec::new(),
            builtin_stopwords: true,
            procedural_stopwords: false,
            min_words_speech: corpus::DEFAULT_MIN_WORDS,
            speech_histogram_bin: 10,
            topics: 30,
            alpha: None,
            beta: 0.01,
            iterations: 1000,
            burn_in: 500,
            seed: 42,
            excluded_topics: Vec::new(),
            top_words: 20,
            weighting: Weighting::Words,
            speaker_histogram_bin: 10_000,
            link_threshold: 0.067,
            link_rule: LinkRule::AnyYear,
            min_words_speaker_term: 10_000,
            null_runs: 1000,
            swaps_per_edge: 10,
            parallel: true,
            terms: Vec::new(),
            speaker_labels: None,
            top_communities: 3,
            cache: true,
        }
    }
}

/// One failed configuration check.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub field: String,
    pub message: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }

    fn push(&mut self, field: &str, message: impl Into<String>) {
        self.violations.push(Violation {
            field: field.to_owned(),
            message: message.into(),
        });
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for v in &self.violations {
            writeln!(f, "  {}: {}", v.field, v.message)?;
        }
        Ok(())
    }
}

impl PipelineConfig {
    /// Reads a TOML file and resolves its relative paths.
    pub fn load(path: &Path) -> Result<Self, PipelineError> {
        let text = fs::read_to_string(path).map_err(|e| PipelineError::Config {
            path: path.display().to_string(),
            message: e.to_string(),
        })?;
        let mut cfg: PipelineConfig = toml::from_str(&text).map_err(|e| PipelineError::Config {
            path: path.display().to_string(),
            message: e.to_string(),
        })?;
        let base = path.parent().unwrap_or(Path::new(""));
        cfg.resolve_paths(base);
        Ok(cfg)
    }

    fn resolve_paths(&mut self, base: &Path) {
        let fix = |p: &mut PathBuf| {
            if p.is_relative() && !p.as_os_str().is_empty() {
                *p = base.join(&*p);
            }
        };
        fix(&mut self.input);
        fix(&mut self.output_dir);
        self.stopwords.iter_mut().for_each(fix);
        if let Some(p) = self.speaker_labels.as_mut() {
            fix(p);
        }
    }

    pub fn hyperparams(&self) -> Hyperparams {
        let base = Hyperparams::with_topics(self.topics);
        Hyperparams {
            alpha: self.alpha.unwrap_or(base.alpha),
            beta: self.beta,
            iterations: self.iterations,
            burn_in: self.burn_in,
            seed: self.seed,
            ..base
        }
    }

    pub fn link_params(&self) -> LinkParams {
        LinkParams {
            threshold: self.link_threshold,
            min_words: self.min_words_speaker_term,
            rule: self.link_rule,
        }
    }

    pub fn null_params(&self) -> NullModelParams {
        NullModelParams {
            runs: self.null_runs,
            seed: self.seed,
            swaps_per_edge: self.swaps_per_edge,
            parallel: self.parallel,
        }
    }

    /// Checks every field without touching the corpus; collects all violations.
    pub fn validate(&self) -> ValidationReport {
        let mut r = ValidationReport::default();
        if self.input.as_os_str().is_empty() {
            r.push("input", "no input corpus given");
        }
        if self.output_dir.as_os_str().is_empty() {
            r.push("output_dir", "no output directory given");
        }
        if self.min_words_speech < 1 {
            r.push("min_words_speech", "must be >= 1");
        }
        if self.speech_histogram_bin < 1 {
            r.push("speech_histogram_bin", "must be >= 1");
        }
        if self.topics < 1 {
            r.push("topics", "must be >= 1");
        }
        if let Some(a) = self.alpha {
            if !(a > 0.0 && a.is_finite()) {
                r.push("alpha", format!("must be > 0, got {a}"));
            }
        }
        if !(self.beta > 0.0 && self.beta.is_finite()) {
            r.push("beta", format!("must be > 0, got {}", self.beta));
        }
        if self.burn_in > self.iterations {
            r.push(
                "burn_in",
                format!(
                    "must not exceed iterations ({} > {})",
                    self.burn_in, self.iterations
                ),
            );
        }
        let distinct: BTreeSet<_> = self.excluded_topics.iter().collect();
        if let Some(k) = self.excluded_topics.iter().find(|&&k| k >= self.topics) {
            r.push(
                "excluded_topics",
                format!("topic {k} out of range 0..{}", self.topics),
            );
        } else if self.topics > 0 && distinct.len() >= self.topics {
            r.push("excluded_topics", "cannot exclude every topic");
        }
        if self.top_words < 1 {
            r.push("top_words", "must be >= 1");
        }
        if self.speaker_histogram_bin < 1 {
            r.push("speaker_histogram_bin", "must be >= 1");
        }
        if !(self.link_threshold > 0.0 && self.link_threshold < 1.0) {
            r.push(
                "link_threshold",
                format!("must lie in (0, 1), got {}", self.link_threshold),
            );
        }
        if self.null_runs < 1 {
            r.push("null_runs", "must be >= 1");
        }
        if self.swaps_per_edge < 1 {
            r.push("swaps_per_edge", "must be >= 1");
        }
        if self.top_communities < 1 {
            r.push("top_communities", "must be >= 1");
        }
        r
    }

    /// Effective settings, one `key = value` per line.
    pub fn describe(&self) -> String {
        let hp = self.hyperparams();
        let mut s = String::new();
        let mut line = |k: &str, v: String, note: &str| {
            if note.is_empty() {
                s.push_str(&format!("{k} = {v}\n"));
            } else {
                s.push_str(&format!("{k} = {v}  # {note}\n"));
            }
        };
        line(
            "input",
            format!("{:?}", self.input.display().to_string()),
            "",
        );
        line(
            "output_dir",
            format!("{:?}", self.output_dir.display().to_string()),
            "",
        );
        line(
            "min_words_speech",
            self.min_words_speech.to_string(),
            &format!(
                "speeches of {} words or fewer are removed",
                self.min_words_speech.saturating_sub(1)
            ),
        );
        line("topics", self.topics.to_string(), "");
        line(
            "alpha",
            hp.alpha.to_string(),
            if self.alpha.is_none() {
                "50 / topics"
            } else {
                ""
            },
        );
        line("beta", self.beta.to_string(), "");
        line("iterations", self.iterations.to_string(), "");
        line("burn_in", self.burn_in.to_string(), "");
        line("seed", self.seed.to_string(), "");
        line("excluded_topics", format!("{:?}", self.excluded_topics), "");
        line(
            "weighting",
            format!("{:?}", self.weighting).to_lowercase(),
            "",
        );
        line(
            "link_threshold",
            self.link_threshold.to_string(),
            "minimum topic share for a link",
        );
        let rule = match self.link_rule {
            LinkRule::AnyYear => "any-year",
            LinkRule::TermAggregate => "term-aggregate",
        };
        line("link_rule", rule.to_owned(), "");
        line(
            "min_words_speaker_term",
            self.min_words_speaker_term.to_string(),
            "speakers with fewer words in a term are dropped",
        );
        line(
            "null_runs",
            self.null_runs.to_string(),
            "configuration-model rewirings",
        );
        line("swaps_per_edge", self.swaps_per_edge.to_string(), "");
        line("terms", format!("{:?}", self.terms), "");
        line("cache", self.cache.to_string(), "");
        s
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Stage {
    Corpus,
    Lda,
    Aggregate,
    Network,
}

impl Stage {
    pub const ALL: [Stage; 4] = [Stage::Corpus, Stage::Lda, Stage::Aggregate, Stage::Network];

    pub fn name(self) -> &'static str {
        match self {
            Stage::Corpus => "corpus",
            Stage::Lda => "lda",
            Stage::Aggregate => "aggregate",
            Stage::Network => "network",
        }
    }
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StageStatus {
    Ran,
    Cached,
    Failed,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StageRecord {
    pub stage: Stage,
    pub status: StageStatus,
    pub input_hash: String,
    pub output_hash: Option<String>,
    pub wall_time_ms: u128,
    /// Paths relative to the output directory.
    pub outputs: Vec<String>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub stages: Vec<StageRecord>,
    pub failed_stage: Option<Stage>,
}

impl Manifest {
    pub fn record(&self, stage: Stage) -> Option<&StageRecord> {
        self.stages.iter().find(|r| r.stage == stage)
    }

    fn upsert(&mut self, rec: StageRecord) {
        match self.stages.iter_mut().find(|r| r.stage == rec.stage) {
            Some(slot) => *slot = rec,
            None => self.stages.push(rec),
        }
        self.stages.sort_by_key(|r| r.stage);
    }

    fn load(dir: &Path) -> Option<Manifest> {
        let text = fs::read_to_string(dir.join(MANIFEST_FILE)).ok()?;
        serde_json::from_str(&text).ok()
    }

    fn save(&self, dir: &Path) -> Result<(), PipelineError> {
        let path = dir.join(MANIFEST_FILE);
        let text = serde_json::to_string_pretty(self).expect("manifest serializes");
        fs::write(&path, text + "\n").map_err(io_err(&path))
    }
}

// Internal artifacts passed between stages.
const CORPUS_JSON: &str = "corpus/corpus.json";
const MODEL_JSON: &str = "lda/model.json";
const TABLE_JSON: &str = "aggregate/speaker_years.json";

#[derive(Serialize, Deserialize)]
struct CorpusArtifact {
    corpus: Corpus,
    speeches: Vec<SpeechSummary>,
}

#[derive(Serialize, Deserialize)]
struct TableArtifact {
    kept_topics: Vec<usize>,
    rows: Vec<SpeakerYearProportions>,
}

fn sha_hex(parts: &[&[u8]]) -> String {
    let mut h = Sha256::new();
    for p in parts {
        h.update((p.len() as u64).to_le_bytes());
        h.update(p);
    }
    hex::encode(h.finalize())
}

fn file_hash(path: &Path) -> Result<String, PipelineError> {
    let bytes = fs::read(path).map_err(io_err(path))?;
    Ok(sha_hex(&[&bytes]))
}

/// Collects the files a stage writes and hashes them.
struct Outputs<'a> {
    dir: &'a Path,
    files: Vec<String>,
}

impl<'a> Outputs<'a> {
    fn new(dir: &'a Path) -> Self {
        Outputs {
            dir,
            files: Vec::new(),
        }
    }

    fn write(
        &mut self,
        rel: &str,
        f: impl FnOnce(&mut BufWriter<File>) -> Result<(), PipelineError>,
    ) -> Result<(), PipelineError> {
        let path = self.dir.join(rel);
        if let Some(parent) = path.parent() {
            fs::create_dir_all(parent).map_err(io_err(parent))?;
        }
        let file = File::create(&path).map_err(io_err(&path))?;
        let mut w = BufWriter::new(file);
        f(&mut w)?;
        w.flush().map_err(io_err(&path))?;
        self.files.push(rel.to_owned());
        Ok(())
    }

    fn json<T: Serialize>(&mut self, rel: &str, value: &T) -> Result<(), PipelineError> {
        let path = self.dir.join(rel);
        self.write(rel, |w| {
            serde_json::to_writer(&mut *w, value).map_err(|e| PipelineError::Artifact {
                path: path.display().to_string(),
                message: e.to_string(),
            })?;
            w.write_all(b"\n").map_err(io_err(&path))
        })
    }
}

fn outputs_hash(dir: &Path, files: &[String]) -> Result<String, PipelineError> {
    let mut sorted: Vec<&String> = files.iter().collect();
    sorted.sort();
    let mut parts = Vec::new();
    for rel in sorted {
        parts.push(rel.as_bytes().to_vec());
        parts.push(file_hash(&dir.join(rel))?.into_bytes());
    }
    let refs: Vec<&[u8]> = parts.iter().map(Vec::as_slice).collect();
    Ok(sha_hex(&refs))
}

fn read_artifact<T: for<'de> Deserialize<'de>>(dir: &Path, rel: &str) -> Result<T, PipelineError> {
    let path = dir.join(rel);
    let text = fs::read_to_string(&path)
        .map_err(|_| PipelineError::MissingArtifact(path.display().to_string()))?;
    serde_json::from_str(&text).map_err(|e| PipelineError::Artifact {
        path: path.display().to_string(),
        message: e.to_string(),
    })
}

fn artifact_hash(dir: &Path, rel: &str) -> Result<String, PipelineError> {
    let path = dir.join(rel);
    if !path.exists() {
        return Err(PipelineError::MissingArtifact(path.display().to_string()));
    }
    file_hash(&path)
}

fn csv_write<W: Write>(
    f: impl FnOnce(&mut W) -> csv::Result<()>,
    w: &mut W,
) -> Result<(), PipelineError> {
    f(w).map_err(PipelineError::from)
}

/// Runs stages of one configuration against its output directory.
pub struct Pipeline {
    config: PipelineConfig,
}

impl Pipeline {
    /// Fails with [`PipelineError::Invalid`] before anything is read or written.
    pub fn new(config: PipelineConfig) -> Result<Self, PipelineError> {
        let report = config.validate();
        if !report.is_ok() {
            return Err(PipelineError::Invalid(report));
        }
        Ok(Pipeline { config })
    }

    pub fn config(&self) -> &PipelineConfig {
        &self.config
    }

    fn out(&self) -> &Path {
        &self.config.output_dir
    }

    /// Runs every stage in order.
    pub fn run(&self) -> Result<Manifest, PipelineError> {
        self.run_stages(&Stage::ALL)
    }

    /// Runs the given stages in order, updating the manifest after each.
    pub fn run_stages(&self, stages: &[Stage]) -> Result<Manifest, PipelineError> {
        let dir = self.out();
        fs::create_dir_all(dir).map_err(io_err(dir))?;
        let previous = Manifest::load(dir).unwrap_or_default();
        let mut manifest = previous.clone();
        manifest.failed_stage = None;

        for &stage in stages {
            let started = Instant::now();
            let result = self.input_hash(stage).and_then(|input_hash| {
                if let Some(hit) = self.cached(&previous, stage, &input_hash) {
                    log::info!("{stage}: inputs unchanged, skipping");
                    return Ok(StageRecord {
                        status: StageStatus::Cached,
                        wall_time_ms: started.elapsed().as_millis(),
                        ..hit
                    });
                }
                log::info!("{stage}: running");
                let files = self.execute(stage)?;
                Ok(StageRecord {
                    stage,
                    status: StageStatus::Ran,
                    input_hash,
                    output_hash: Some(outputs_hash(dir, &files)?),
                    wall_time_ms: started.elapsed().as_millis(),
                    outputs: files,
                    error: None,
                })
            });
            match result {
                Ok(rec) => {
                    manifest.upsert(rec);
                    manifest.save(dir)?;
                }
                Err(e) => {
                    manifest.upsert(StageRecord {
                        stage,
                        status: StageStatus::Failed,
                        input_hash: String::new(),
                        output_hash: None,
                        wall_time_ms: started.elapsed().as_millis(),
                        outputs: Vec::new(),
                        error: Some(e.to_string()),
                    });
                    manifest.failed_stage = Some(stage);
                    manifest.save(dir)?;
                    return Err(PipelineError::Stage {
                        stage,
                        source: Box::new(e),
                    });
                }
            }
        }
        Ok(manifest)
    }

    fn cached(&self, previous: &Manifest, stage: Stage, input_hash: &str) -> Option<StageRecord> {
        if !self.config.cache {
            return None;
        }
        let rec = previous.record(stage)?;
        if rec.status == StageStatus::Failed || rec.input_hash != input_hash {
            return None;
        }
        let now = outputs_hash(self.out(), &rec.outputs).ok()?;
        (rec.output_hash.as_deref() == Some(now.as_str())).then(|| rec.clone())
    }

    /// Hash over everything a stage reads: upstream artifacts and its settings.
    pub fn input_hash(&self, stage: Stage) -> Result<String, PipelineError> {
        let c = &self.config;
        let dir = self.out();
        let mut parts: Vec<Vec<u8>> = vec![stage.name().as_bytes().to_vec()];
        let settings = match stage {
            Stage::Corpus => {
                parts.push(file_hash(&c.input)?.into_bytes());
                for p in &c.stopwords {
                    parts.push(file_hash(p)?.into_bytes());
                }
                serde_json::json!([
                    c.format,
                    c.builtin_stopwords,
                    c.procedural_stopwords,
                    c.min_words_speech,
                    c.speech_histogram_bin
                ])
            }
            Stage::Lda => {
                parts.push(artifact_hash(dir, CORPUS_JSON)?.into_bytes());
                serde_json::json!([c.hyperparams(), c.excluded_topics, c.top_words])
            }
            Stage::Aggregate => {
                parts.push(artifact_hash(dir, CORPUS_JSON)?.into_bytes());
                parts.push(artifact_hash(dir, MODEL_JSON)?.into_bytes());
                serde_json::json!([c.weighting, c.speaker_histogram_bin])
            }
            Stage::Network => {
                parts.push(artifact_hash(dir, TABLE_JSON)?.into_bytes());
                if let Some(p) = &c.speaker_labels {
                    parts.push(file_hash(p)?.into_bytes());
                }
                serde_json::json!([
                    c.link_params(),
                    c.null_params().runs,
                    c.seed,
                    c.swaps_per_edge,
                    c.terms,
                    c.top_communities
                ])
            }
        };
        parts.push(settings.to_string().into_bytes());
        let refs: Vec<&[u8]> = parts.iter().map(Vec::as_slice).collect();
        Ok(sha_hex(&refs))
    }

    fn execute(&self, stage: Stage) -> Result<Vec<String>, PipelineError> {
        match stage {
            Stage::Corpus => self.corpus_stage(),
            Stage::Lda => self.lda_stage(),
            Stage::Aggregate => self.aggregate_stage(),
            Stage::Network => self.network_stage(),
        }
    }

    fn stopwords(&self) -> Result<Stopwords, PipelineError> {
        let mut s = Stopwords::new();
        if self.config.builtin_stopwords {
            s.extend(Stopwords::english());
        }
        if self.config.procedural_stopwords {
            s.extend(Stopwords::procedural());
        }
        for p in &self.config.stopwords {
            s.extend(Stopwords::load(p)?);
        }
        Ok(s)
    }

    fn corpus_stage(&self) -> Result<Vec<String>, PipelineError> {
        let c = &self.config;
        let records = corpus::parse_corpus(&c.input, c.format)?;
        let (kept, stats) = corpus::filter_short(records, c.min_words_speech);
        log::info!(
            "corpus: kept {} of {} speeches ({:.1}% removed)",
            stats.kept_count,
            stats.total(),
            100.0 * stats.removed_fraction()
        );
        let built = corpus::build_corpus(&kept, &self.stopwords()?)?;
        let artifact = CorpusArtifact {
            speeches: kept.iter().map(SpeechSummary::from).collect(),
            corpus: built,
        };
        let mut out = Outputs::new(self.out());
        out.write("corpus/corpus_stats.csv", |w| {
            csv_write(|w| stats.write_csv(w, c.speech_histogram_bin), w)
        })?;
        out.json(CORPUS_JSON, &artifact)?;
        Ok(out.files)
    }

    fn load_corpus(&self) -> Result<CorpusArtifact, PipelineError> {
        read_artifact(self.out(), CORPUS_JSON)
    }

    fn lda_stage(&self) -> Result<Vec<String>, PipelineError> {
        let c = &self.config;
        let CorpusArtifact { corpus, .. } = self.load_corpus()?;
        let hp = c.hyperparams();
        log::info!(
            "lda: {} documents, {} tokens, vocabulary {}, K = {}",
            corpus.documents.len(),
            corpus.total_tokens(),
            corpus.vocabulary.len(),
            hp.topics
        );
        let (_, model) = lda::train(&corpus.documents, corpus.vocabulary.len(), &hp)?;
        let model = model.exclude_topics(&c.excluded_topics.iter().copied().collect())?;
        let file = ModelFile {
            hyperparams: hp,
            vocab_hash: corpus.vocabulary.content_hash(),
            doc_ids: corpus.documents.iter().map(|d| d.doc_id.clone()).collect(),
            model,
        };
        let mut out = Outputs::new(self.out());
        out.json(MODEL_JSON, &file)?;
        out.write("lda/topics_keywords.csv", |w| {
            csv_write(
                |w| {
                    file.model
                        .write_keywords_csv(w, &corpus.vocabulary, c.top_words)
                },
                w,
            )
        })?;
        out.write("lda/doc_topics.csv", |w| {
            csv_write(|w| file.model.write_doc_topics_csv(w, &corpus.documents), w)
        })?;
        Ok(out.files)
    }

    fn aggregate_stage(&self) -> Result<Vec<String>, PipelineError> {
        let c = &self.config;
        let CorpusArtifact { corpus, speeches } = self.load_corpus()?;
        let file: ModelFile = read_artifact(self.out(), MODEL_JSON)?;
        if file.vocab_hash != corpus.vocabulary.content_hash() {
            return Err(PipelineError::Artifact {
                path: MODEL_JSON.into(),
                message: "model was trained on a different vocabulary".into(),
            });
        }
        let table = aggregate::speaker_year_table(&file.model, &file.doc_ids, &corpus.documents)?;
        let kept = file.model.kept_topics();
        let overall = aggregate::yearly_topic_series(&table, &kept, None, c.weighting);
        let by_party = aggregate::yearly_topic_series_by_party(&table, &kept, c.weighting);
        let party_term = aggregate::words_per_party_per_term(&speeches);
        let per_speaker = aggregate::words_per_speaker(&speeches);

        let mut out = Outputs::new(self.out());
        out.write("aggregate/topic_series_overall.csv", |w| {
            csv_write(|w| aggregate::write_series_csv(w, &overall, false), w)
        })?;
        out.write("aggregate/topic_series_by_party.csv", |w| {
            csv_write(|w| aggregate::write_series_csv(w, &by_party, true), w)
        })?;
        out.write("aggregate/words_party_term.csv", |w| {
            csv_write(|w| aggregate::write_party_term_csv(w, &party_term), w)
        })?;
        out.write("aggregate/words_speaker.csv", |w| {
            csv_write(|w| per_speaker.write_totals_csv(w), w)
        })?;
        out.write("aggregate/words_speaker_hist.csv", |w| {
            csv_write(
                |w| per_speaker.write_histogram_csv(w, c.speaker_histogram_bin),
                w,
            )
        })?;
        out.json(
            TABLE_JSON,
            &TableArtifact {
                kept_topics: kept,
                rows: table,
            },
        )?;
        Ok(out.files)
    }

    fn network_stage(&self) -> Result<Vec<String>, PipelineError> {
        let c = &self.config;
        let TableArtifact { kept_topics, rows } = read_artifact(self.out(), TABLE_JSON)?;
        let labels = match &c.speaker_labels {
            Some(p) => SpeakerLabels::load(p)?,
            None => SpeakerLabels::new(),
        };
        let mut by_term: BTreeMap<u32, Vec<SpeakerYearProportions>> = BTreeMap::new();
        for r in rows {
            by_term.entry(r.term).or_default().push(r);
        }
        let terms: Vec<u32> = if c.terms.is_empty() {
            by_term.keys().copied().collect()
        } else {
            c.terms.clone()
        };

        let mut out = Outputs::new(self.out());
        let mut homophily = Vec::new();
        let mut avg_degree = Vec::new();
        for term in terms {
            let table = by_term.get(&term).ok_or(PipelineError::UnknownTerm(term))?;
            let g = network::build_bipartite(table, &kept_topics, &c.link_params())?;
            let p = network::project(&g);
            let partition = network::louvain(&p);
            let degrees = network::degree_distributions(&g, &p);
            let composition = network::community_composition(&partition, &p, c.top_communities);
            log::info!(
                "network: term {term}: {} speakers, {} links, {} projected edges, {} communities, Q = {:.4}",
                g.speakers().len(),
                g.link_count(),
                p.edge_count(),
                partition.community_count(),
                partition.modularity
            );
            match network::configuration_null(&p, &c.null_params()) {
                Ok(rep) => homophily.push((term, rep)),
                Err(e) => log::warn!("network: term {term}: homophily undefined ({e})"),
            }
            avg_degree.push((term, network::average_degree_by_party(&p)));

            let base = format!("network/term_{term}");
            out.write(&format!("{base}/bipartite.graphml"), |w| {
                network::write_bipartite_graphml(&mut *w, &g, &labels)
                    .map_err(io_err(Path::new(&base)))
            })?;
            out.write(&format!("{base}/projection.graphml"), |w| {
                network::write_projection_graphml(&mut *w, &p, Some(&partition), &labels)
                    .map_err(io_err(Path::new(&base)))
            })?;
            out.write(&format!("{base}/degree_topics.csv"), |w| {
                csv_write(|w| network::write_degree_csv(w, &degrees.topics), w)
            })?;
            out.write(&format!("{base}/degree_speakers.csv"), |w| {
                csv_write(|w| network::write_degree_csv(w, &degrees.speakers), w)
            })?;
            out.write(&format!("{base}/degree_projection.csv"), |w| {
                csv_write(|w| network::write_degree_csv(w, &degrees.projection), w)
            })?;
            out.write(&format!("{base}/communities.csv"), |w| {
                csv_write(|w| network::write_composition_csv(w, &composition), w)
            })?;
            out.write(&format!("{base}/partition.csv"), |w| {
                csv_write(
                    |w| {
                        let mut cw = csv::Writer::from_writer(w);
                        cw.write_record(["speaker_id", "party", "community"])?;
                        for (node, comm) in p.nodes().iter().zip(&partition.communities) {
                            cw.write_record([
                                node.id.as_str(),
                                node.party.as_str(),
                                &comm.to_string(),
                            ])?;
                        }
                        cw.flush()?;
                        Ok(())
                    },
                    w,
                )
            })?;
        }
        out.write("network/homophily.csv", |w| {
            csv_write(|w| network::write_homophily_csv(w, &homophily), w)
        })?;
        out.write("network/average_degree_party.csv", |w| {
            csv_write(
                |w| {
                    let mut cw = csv::Writer::from_writer(w);
                    cw.write_record(["term", "party", "mean_degree"])?;
                    for (term, rows) in &avg_degree {
                        for (party, mean) in rows {
                            cw.write_record([term.to_string(), party.clone(), mean.to_string()])?;
                        }
                    }
                    cw.flush()?;
                    Ok(())
                },
                w,
            )
        })?;
        Ok(out.files)
    }
}
