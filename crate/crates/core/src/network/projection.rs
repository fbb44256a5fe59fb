use std::collections::BTreeMap;
use std::io::Write;

use serde::{Deserialize, Serialize};

use super::{BipartiteGraph, SpeakerNode};

/// Speaker network where two speakers are joined when they share a topic;
/// the weight is the number of topics they share.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightedProjection {
    pub term: u32,
    nodes: Vec<SpeakerNode>,
    /// (u, v, weight) with u < v, sorted.
    edges: Vec<(usize, usize, u32)>,
    #[serde(skip)]
    adjacency: Vec<Vec<(usize, u32)>>,
}

impl WeightedProjection {
    pub fn from_edges(
        term: u32,
        nodes: Vec<SpeakerNode>,
        edges: impl IntoIterator<Item = (usize, usize, u32)>,
    ) -> Self {
        let mut merged: BTreeMap<(usize, usize), u32> = BTreeMap::new();
        for (a, b, w) in edges {
            if a == b || w == 0 {
                continue;
            }
            *merged.entry((a.min(b), a.max(b))).or_insert(0) += w;
        }
        let edges: Vec<_> = merged.into_iter().map(|((a, b), w)| (a, b, w)).collect();
        let mut p = WeightedProjection {
            term,
            nodes,
            edges,
            adjacency: Vec::new(),
        };
        p.rebuild_adjacency();
        p
    }

    fn rebuild_adjacency(&mut self) {
        let mut adj = vec![Vec::new(); self.nodes.len()];
        for &(a, b, w) in &self.edges {
            adj[a].push((b, w));
            adj[b].push((a, w));
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        self.adjacency = adj;
    }

    pub fn nodes(&self) -> &[SpeakerNode] {
        &self.nodes
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edges(&self) -> &[(usize, usize, u32)] {
        &self.edges
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Edge list without weights.
    pub fn unweighted_edges(&self) -> Vec<(usize, usize)> {
        self.edges.iter().map(|&(a, b, _)| (a, b)).collect()
    }

    pub fn neighbors(&self, u: usize) -> &[(usize, u32)] {
        &self.adjacency[u]
    }

    /// Unweighted degree.
    pub fn degree(&self, u: usize) -> usize {
        self.adjacency[u].len()
    }

    pub fn weight(&self, u: usize, v: usize) -> Option<u32> {
        let list = &self.adjacency[u];
        list.binary_search_by_key(&v, |&(n, _)| n)
            .ok()
            .map(|i| list[i].1)
    }

    pub fn from_json(text: &str) -> serde_json::Result<Self> {
        let mut p: WeightedProjection = serde_json::from_str(text)?;
        p.rebuild_adjacency();
        Ok(p)
    }
}

/// Projects `g` onto its speaker nodes with shared-topic counts as weights.
pub fn project(g: &BipartiteGraph) -> WeightedProjection {
    let mut weights: BTreeMap<(usize, usize), u32> = BTreeMap::new();
    for members in g.topic_neighbors() {
        for (i, &a) in members.iter().enumerate() {
            for &b in &members[i + 1..] {
                *weights.entry((a, b)).or_insert(0) += 1;
            }
        }
    }
    WeightedProjection::from_edges(
        g.term,
        g.speakers().to_vec(),
        weights.into_iter().map(|((a, b), w)| (a, b, w)),
    )
}

/// Exact-degree histograms (degree -> node count).
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct DegreeDistributions {
    /// Speakers linked to each topic.
    pub topics: BTreeMap<usize, usize>,
    /// Topics linked to each speaker.
    pub speakers: BTreeMap<usize, usize>,
    /// Speakers linked to each speaker in the projection.
    pub projection: BTreeMap<usize, usize>,
}

fn histogram(degrees: impl Iterator<Item = usize>) -> BTreeMap<usize, usize> {
    let mut h = BTreeMap::new();
    for d in degrees {
        *h.entry(d).or_insert(0) += 1;
    }
    h
}

pub fn degree_distributions(g: &BipartiteGraph, p: &WeightedProjection) -> DegreeDistributions {
    DegreeDistributions {
        topics: histogram(g.topic_neighbors().iter().map(Vec::len)),
        speakers: histogram(g.speaker_neighbors().iter().map(Vec::len)),
        projection: histogram((0..p.node_count()).map(|u| p.degree(u))),
    }
}

/// Mean unweighted projected degree per party, isolated nodes included.
pub fn average_degree_by_party(p: &WeightedProjection) -> Vec<(String, f64)> {
    let mut acc: BTreeMap<&str, (usize, usize)> = BTreeMap::new();
    for (u, node) in p.nodes().iter().enumerate() {
        let e = acc.entry(&node.party).or_insert((0, 0));
        e.0 += p.degree(u);
        e.1 += 1;
    }
    acc.into_iter()
        .map(|(party, (sum, n))| (party.to_owned(), sum as f64 / n as f64))
        .collect()
}

pub fn write_degree_csv<W: Write>(out: W, hist: &BTreeMap<usize, usize>) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["degree", "count"])?;
    for (d, n) in hist {
        w.write_record([d.to_string(), n.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_average_degree_csv<W: Write>(
    out: W,
    term: u32,
    rows: &[(String, f64)],
) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["term", "party", "mean_degree"])?;
    for (party, mean) in rows {
        w.write_record([term.to_string(), party.clone(), mean.to_string()])?;
    }
    w.flush()?;
    Ok(())
}
