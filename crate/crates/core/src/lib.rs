//! Speech corpus to topic model to speaker network.
//!
//! The crate turns attributed parliamentary speeches into
//!
//! * an LDA topic model trained by collapsed Gibbs sampling ([`lda`]),
//! * yearly topic-popularity series overall and per party ([`aggregate`]),
//! * per-term speaker–topic bipartite networks and their weighted speaker
//!   projections, with degree distributions, party homophily against a
//!   configuration-model null and Louvain communities ([`network`]).
//!
//! [`pipeline`] chains the stages from a single configuration.

pub mod aggregate;
pub mod corpus;
pub mod lda;
pub mod network;
pub mod pipeline;
pub mod synthetic;

pub use aggregate::{SpeakerYearProportions, TopicTimeSeries, Weighting};
pub use corpus::{Corpus, CorpusStats, SpeechRecord, Stopwords, TokenizedDocument, Vocabulary};
pub use lda::{GibbsState, Hyperparams, TopicModel};
pub use network::{BipartiteGraph, HomophilyReport, Partition, WeightedProjection};
pub use pipeline::{Manifest, Pipeline, PipelineConfig, PipelineError, Stage, ValidationReport};
