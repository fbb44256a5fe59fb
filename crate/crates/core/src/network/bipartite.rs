use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::{NetworkError, SpeakerNode};
use crate::aggregate::SpeakerYearProportions;

/// How yearly proportions are turned into a term-level link.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LinkRule {
    /// Linked if the threshold is met in at least one year of the term.
    #[default]
    AnyYear,
    /// Linked if the word-weighted mean proportion over the term meets the threshold.
    TermAggregate,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinkParams {
    /// Minimum topic share for a link. 0.067 is about twice the uniform share of 30 topics.
    pub threshold: f64,
    /// Speakers with fewer words over the term are dropped.
    pub min_words: u64,
    pub rule: LinkRule,
}

impl Default for LinkParams {
    fn default() -> Self {
        LinkParams {
            threshold: 0.067,
            min_words: 10_000,
            rule: LinkRule::AnyYear,
        }
    }
}

/// Speakers on one side, topics on the other; links only cross sides.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BipartiteGraph {
    pub term: u32,
    speakers: Vec<SpeakerNode>,
    /// Topic ids of the topic nodes.
    topics: Vec<usize>,
    /// (speaker index, topic node index)
    links: BTreeSet<(usize, usize)>,
}

impl BipartiteGraph {
    pub fn new(
        term: u32,
        speakers: Vec<SpeakerNode>,
        topics: Vec<usize>,
        links: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<Self, NetworkError> {
        let links: BTreeSet<_> = links.into_iter().collect();
        if let Some(&(speaker, topic)) = links
            .iter()
            .find(|(s, t)| *s >= speakers.len() || *t >= topics.len())
        {
            return Err(NetworkError::DanglingLink { speaker, topic });
        }
        Ok(BipartiteGraph {
            term,
            speakers,
            topics,
            links,
        })
    }

    pub fn speakers(&self) -> &[SpeakerNode] {
        &self.speakers
    }

    pub fn topics(&self) -> &[usize] {
        &self.topics
    }

    pub fn links(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.links.iter().copied()
    }

    pub fn link_count(&self) -> usize {
        self.links.len()
    }

    pub fn has_link(&self, speaker: usize, topic: usize) -> bool {
        self.links.contains(&(speaker, topic))
    }

    /// Speaker indices linked to each topic node, ascending.
    pub fn topic_neighbors(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.topics.len()];
        for &(s, t) in &self.links {
            out[t].push(s);
        }
        out
    }

    /// Topic node indices linked to each speaker, ascending.
    pub fn speaker_neighbors(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.speakers.len()];
        for &(s, t) in &self.links {
            out[s].push(t);
        }
        out
    }
}

/// Builds the speaker–topic graph of one term.
///
/// `topics` lists the topic ids that become topic nodes (normally the kept
/// topics). Speakers below `min_words` for the term are dropped; speakers with
/// no link stay as isolated nodes.
pub fn build_bipartite(
    table: &[SpeakerYearProportions],
    topics: &[usize],
    params: &LinkParams,
) -> Result<BipartiteGraph, NetworkError> {
    let first = table.first().ok_or(NetworkError::EmptyTable)?;
    if !(params.threshold > 0.0 && params.threshold < 1.0) {
        return Err(NetworkError::InvalidThreshold(params.threshold));
    }
    if let Some(r) = table.iter().find(|r| r.term != first.term) {
        return Err(NetworkError::MixedTerms {
            expected: first.term,
            found: r.term,
        });
    }

    let mut by_speaker: BTreeMap<&str, Vec<&SpeakerYearProportions>> = BTreeMap::new();
    for r in table {
        by_speaker.entry(&r.speaker_id).or_default().push(r);
    }

    let mut speakers = Vec::new();
    let mut links = Vec::new();
    for (id, rows) in by_speaker {
        let words: u64 = rows.iter().map(|r| r.words_spoken).sum();
        if words < params.min_words {
            continue;
        }
        let u = speakers.len();
        for (t, &k) in topics.iter().enumerate() {
            let share = |r: &SpeakerYearProportions| r.proportions.get(k).copied().unwrap_or(0.0);
            let linked = match params.rule {
                LinkRule::AnyYear => rows.iter().any(|r| share(r) >= params.threshold),
                LinkRule::TermAggregate => {
                    let mean = if words == 0 {
                        0.0
                    } else {
                        rows.iter()
                            .map(|r| share(r) * r.words_spoken as f64)
                            .sum::<f64>()
                            / words as f64
                    };
                    mean >= params.threshold
                }
            };
            if linked {
                links.push((u, t));
            }
        }
        speakers.push(SpeakerNode {
            id: id.to_owned(),
            party: majority_party(&rows),
            words,
        });
    }
    BipartiteGraph::new(first.term, speakers, topics.to_vec(), links)
}

fn majority_party(rows: &[&SpeakerYearProportions]) -> String {
    let mut counts: BTreeMap<&str, usize> = BTreeMap::new();
    for r in rows {
        *counts.entry(&r.party).or_insert(0) += 1;
    }
    let best = counts.values().copied().max().unwrap_or(0);
    counts
        .into_iter()
        .find(|(_, c)| *c == best)
        .map(|(p, _)| p.to_owned())
        .unwrap_or_default()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(speaker: &str, year: i32, words: u64, p: Vec<f64>) -> SpeakerYearProportions {
        SpeakerYearProportions {
            doc_id: format!("{speaker}:{year}"),
            speaker_id: speaker.into(),
            party: "X".into(),
            year,
            term: 48,
            proportions: p,
            words_spoken: words,
        }
    }

    #[test]
    fn uniform_speaker_has_no_links() {
        let uniform = vec![1.0 / 30.0; 30];
        let t = [
            row("a", 2006, 6000, uniform.clone()),
            row("a", 2007, 6000, uniform),
        ];
        let g = build_bipartite(&t, &(0..30).collect::<Vec<_>>(), &LinkParams::default()).unwrap();
        assert_eq!(g.speakers().len(), 1);
        assert_eq!(g.link_count(), 0);
    }

    #[test]
    fn speaker_below_word_cutoff_is_dropped() {
        let p = vec![0.5, 0.5];
        let t = [row("a", 2006, 9_999, p.clone()), row("b", 2006, 10_000, p)];
        let g = build_bipartite(&t, &[0, 1], &LinkParams::default()).unwrap();
        let ids: Vec<_> = g.speakers().iter().map(|s| s.id.as_str()).collect();
        assert_eq!(ids, ["b"]);
    }

    #[test]
    fn threshold_is_inclusive_and_any_year() {
        let t = [
            row("a", 2006, 6000, vec![0.067, 0.933, 0.0]),
            row("a", 2007, 6000, vec![0.0, 0.9, 0.1]),
        ];
        let g = build_bipartite(&t, &[0, 1, 2], &LinkParams::default()).unwrap();
        assert!(g.has_link(0, 0) && g.has_link(0, 1) && g.has_link(0, 2));

        let agg = LinkParams {
            rule: LinkRule::TermAggregate,
            ..LinkParams::default()
        };
        let g = build_bipartite(&t, &[0, 1, 2], &agg).unwrap();
        // term means: 0.0335, 0.9165, 0.05
        assert!(!g.has_link(0, 0) && g.has_link(0, 1) && !g.has_link(0, 2));
    }

    #[test]
    fn only_listed_topics_become_nodes() {
        let t = [row("a", 2006, 20_000, vec![0.5, 0.0, 0.5])];
        let g = build_bipartite(&t, &[0, 1], &LinkParams::default()).unwrap();
        assert_eq!(g.topics(), &[0, 1]);
        assert_eq!(g.links().collect::<Vec<_>>(), [(0, 0)]);
    }

    #[test]
    fn errors() {
        assert_eq!(
            build_bipartite(&[], &[0], &LinkParams::default()).unwrap_err(),
            NetworkError::EmptyTable
        );
        let t = [row("a", 2006, 20_000, vec![1.0])];
        for bad in [0.0, 1.0, 1.5, -0.1] {
            let p = LinkParams {
                threshold: bad,
                ..LinkParams::default()
            };
            assert_eq!(
                build_bipartite(&t, &[0], &p).unwrap_err(),
                NetworkError::InvalidThreshold(bad)
            );
        }
        let mut other = row("b", 2009, 20_000, vec![1.0]);
        other.term = 49;
        assert!(matches!(
            build_bipartite(&[t[0].clone(), other], &[0], &LinkParams::default()),
            Err(NetworkError::MixedTerms {
                expected: 48,
                found: 49
            })
        ));
        assert!(matches!(
            BipartiteGraph::new(1, vec![], vec![0], [(0, 0)]),
            Err(NetworkError::DanglingLink { .. })
        ));
    }
}
