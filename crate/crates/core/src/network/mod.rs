//! Speaker–topic bipartite networks and their speaker projections.

mod assortativity;
mod bipartite;
mod composition;
mod graphml;
mod louvain;
mod null_model;
mod projection;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use assortativity::{assortativity, attribute_assortativity, party_classes};
pub use bipartite::{build_bipartite, BipartiteGraph, LinkParams, LinkRule};
pub use composition::{community_composition, write_composition_csv, CommunityComposition};
pub use graphml::{write_bipartite_graphml, write_projection_graphml, SpeakerLabels};
pub use louvain::{louvain, louvain_weighted, modularity, Partition, WeightedGraph};
pub use null_model::{
    configuration_null, configuration_null_edges, double_edge_swaps, write_homophily_csv,
    HomophilyReport, NullModelParams,
};
pub use projection::{
    average_degree_by_party, degree_distributions, project, write_average_degree_csv,
    write_degree_csv, DegreeDistributions, WeightedProjection,
};

#[derive(Debug, Error, PartialEq)]
pub enum NetworkError {
    #[error("no speaker-year rows to build a network from")]
    EmptyTable,
    #[error("link threshold must lie in (0, 1), got {0}")]
    InvalidThreshold(f64),
    #[error("rows span several terms: expected {expected}, found {found}")]
    MixedTerms { expected: u32, found: u32 },
    #[error("link ({speaker}, {topic}) refers to a missing node")]
    DanglingLink { speaker: usize, topic: usize },
    #[error("graph has no edges")]
    NoEdges,
    #[error("degenerate mixing: edges touch fewer than two attribute classes")]
    DegenerateMixing,
    #[error("{labels} class labels for {nodes} nodes")]
    LabelCount { labels: usize, nodes: usize },
    #[error("null model needs at least one run")]
    NoRuns,
    #[error("invalid label mapping line {line}: {message}")]
    Labels { line: usize, message: String },
}

/// A speaker node with the attributes used downstream.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpeakerNode {
    pub id: String,
    pub party: String,
    /// Words spoken over the term.
    pub words: u64,
}
