//! Summary tables over the trained model and the filtered speeches.

use std::collections::{BTreeMap, BTreeSet};
use std::io::Write;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::{SpeechSummary, TokenizedDocument};
use crate::lda::TopicModel;

#[derive(Debug, Error, PartialEq)]
pub enum AggregateError {
    #[error("document `{doc}` has no matching row in the model")]
    Join { doc: String },
    #[error("model holds {model} documents but {metadata} metadata rows were given")]
    LengthMismatch { model: usize, metadata: usize },
}

/// Topic mixture of one speaker in one year, over kept topics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpeakerYearProportions {
    pub doc_id: String,
    pub speaker_id: String,
    pub party: String,
    pub year: i32,
    pub term: u32,
    /// Length K; excluded topics hold 0 and the rest sum to 1.
    pub proportions: Vec<f64>,
    pub words_spoken: u64,
}

/// Joins theta rows with document metadata. `doc_ids` are the ids the model was trained on.
pub fn speaker_year_table(
    model: &TopicModel,
    doc_ids: &[String],
    docs: &[TokenizedDocument],
) -> Result<Vec<SpeakerYearProportions>, AggregateError> {
    if docs.len() != model.num_docs() || doc_ids.len() != model.num_docs() {
        if let Some(extra) = docs.iter().find(|d| !doc_ids.contains(&d.doc_id)) {
            return Err(AggregateError::Join {
                doc: extra.doc_id.clone(),
            });
        }
        return Err(AggregateError::LengthMismatch {
            model: model.num_docs(),
            metadata: docs.len(),
        });
    }
    docs.iter()
        .zip(doc_ids)
        .enumerate()
        .map(|(d, (doc, id))| {
            if &doc.doc_id != id {
                return Err(AggregateError::Join {
                    doc: doc.doc_id.clone(),
                });
            }
            Ok(SpeakerYearProportions {
                doc_id: doc.doc_id.clone(),
                speaker_id: doc.speaker_id.clone(),
                party: doc.party.clone(),
                year: doc.year,
                term: doc.term,
                proportions: model.kept_proportions(d),
                words_spoken: doc.word_count_raw,
            })
        })
        .collect()
}

/// How speakers are weighted when averaging their proportions within a year.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Weighting {
    /// By words spoken in the year.
    #[default]
    Words,
    /// Every speaker counts once.
    Uniform,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TopicTimeSeries {
    pub topic: usize,
    pub party: Option<String>,
    /// Year -> proportion. Years without matching speakers are absent.
    pub series: BTreeMap<i32, f64>,
}

/// Per-year popularity of each topic in `topics`, optionally restricted to one party.
///
/// Each year's values are the weighted mean of the matching speakers'
/// proportions, rescaled so the listed topics sum to one.
pub fn yearly_topic_series(
    table: &[SpeakerYearProportions],
    topics: &[usize],
    party: Option<&str>,
    weighting: Weighting,
) -> Vec<TopicTimeSeries> {
    let mut by_year: BTreeMap<i32, (f64, Vec<f64>)> = BTreeMap::new();
    for row in table.iter().filter(|r| party.is_none_or(|p| r.party == p)) {
        let weight = match weighting {
            Weighting::Words => row.words_spoken as f64,
            Weighting::Uniform => 1.0,
        };
        let entry = by_year
            .entry(row.year)
            .or_insert_with(|| (0.0, vec![0.0; topics.len()]));
        entry.0 += weight;
        for (acc, &k) in entry.1.iter_mut().zip(topics) {
            *acc += weight * row.proportions.get(k).copied().unwrap_or(0.0);
        }
    }

    let mut out: Vec<TopicTimeSeries> = topics
        .iter()
        .map(|&topic| TopicTimeSeries {
            topic,
            party: party.map(str::to_owned),
            series: BTreeMap::new(),
        })
        .collect();
    for (year, (weight, sums)) in by_year {
        if weight <= 0.0 {
            continue;
        }
        let mass: f64 = sums.iter().sum();
        if mass <= 0.0 {
            continue;
        }
        for (ts, s) in out.iter_mut().zip(&sums) {
            ts.series.insert(year, s / mass);
        }
    }
    out
}

/// [`yearly_topic_series`] for every party present in the table, parties in sorted order.
pub fn yearly_topic_series_by_party(
    table: &[SpeakerYearProportions],
    topics: &[usize],
    weighting: Weighting,
) -> Vec<TopicTimeSeries> {
    let parties: BTreeSet<&str> = table.iter().map(|r| r.party.as_str()).collect();
    parties
        .into_iter()
        .flat_map(|p| yearly_topic_series(table, topics, Some(p), weighting))
        .collect()
}

/// Writes `topic_id,party,year,proportion`; the party column is empty for overall series.
pub fn write_series_csv<W: Write>(
    out: W,
    series: &[TopicTimeSeries],
    with_party: bool,
) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    if with_party {
        w.write_record(["topic_id", "party", "year", "proportion"])?;
    } else {
        w.write_record(["topic_id", "year", "proportion"])?;
    }
    for ts in series {
        for (year, p) in &ts.series {
            if with_party {
                w.write_record([
                    ts.topic.to_string(),
                    ts.party.clone().unwrap_or_default(),
                    year.to_string(),
                    p.to_string(),
                ])?;
            } else {
                w.write_record([ts.topic.to_string(), year.to_string(), p.to_string()])?;
            }
        }
    }
    w.flush()?;
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PartyTermWords {
    pub term: u32,
    pub party: String,
    pub words: u64,
}

/// Total words per (term, party), sorted by term then party.
pub fn words_per_party_per_term(speeches: &[SpeechSummary]) -> Vec<PartyTermWords> {
    let mut totals: BTreeMap<(u32, &str), u64> = BTreeMap::new();
    for s in speeches {
        *totals.entry((s.term, s.party.as_str())).or_insert(0) += s.words;
    }
    totals
        .into_iter()
        .map(|((term, party), words)| PartyTermWords {
            term,
            party: party.to_owned(),
            words,
        })
        .collect()
}

pub fn write_party_term_csv<W: Write>(out: W, rows: &[PartyTermWords]) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["term", "party", "words"])?;
    for r in rows {
        w.write_record([r.term.to_string(), r.party.clone(), r.words.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

/// Words spoken by each speaker across all terms.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpeakerWords {
    pub totals: BTreeMap<String, u64>,
}

impl SpeakerWords {
    /// Number of speakers per bin of `bin_width` words, keyed by bin start.
    pub fn histogram(&self, bin_width: u64) -> BTreeMap<u64, usize> {
        let width = bin_width.max(1);
        let mut h = BTreeMap::new();
        for &total in self.totals.values() {
            *h.entry(total / width * width).or_insert(0) += 1;
        }
        h
    }

    pub fn write_totals_csv<W: Write>(&self, out: W) -> csv::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["speaker_id", "words"])?;
        for (speaker, words) in &self.totals {
            w.write_record([speaker.clone(), words.to_string()])?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn write_histogram_csv<W: Write>(&self, out: W, bin_width: u64) -> csv::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["words_bin", "speakers"])?;
        for (bin, n) in self.histogram(bin_width) {
            w.write_record([bin.to_string(), n.to_string()])?;
        }
        w.flush()?;
        Ok(())
    }
}

pub fn words_per_speaker(speeches: &[SpeechSummary]) -> SpeakerWords {
    let mut totals = BTreeMap::new();
    for s in speeches {
        *totals.entry(s.speaker_id.clone()).or_insert(0) += s.words;
    }
    SpeakerWords { totals }
}
