//! Latent Dirichlet Allocation trained by collapsed Gibbs sampling.
//!
//! Each token's topic is resampled from
//!
//! ```text
//! P(z = k | rest) ∝ (n_dk + α) · (n_kw + β) / (n_k + Vβ)
//! ```
//!
//! where the counts exclude the token being resampled. The chain draws one
//! topic uniformly per token at initialization (`random_range(0..K)`) and one
//! uniform `f64` per token per sweep, visiting documents and tokens in order.
//! That draw pattern is part of the contract: it is what makes a run
//! reproducible from `(corpus, hyperparams)` alone.

use std::collections::BTreeSet;
use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::{TokenizedDocument, Vocabulary};

#[derive(Debug, Error, PartialEq)]
pub enum LdaError {
    #[error("invalid hyperparameters: {0}")]
    InvalidHyperparams(String),
    #[error("corpus has no documents or no tokens")]
    EmptyCorpus,
    #[error("vocabulary is empty")]
    EmptyVocabulary,
    #[error("document {doc} holds word id {word} outside vocabulary of size {vocab_size}")]
    WordOutOfRange {
        doc: usize,
        word: u32,
        vocab_size: usize,
    },
    #[error("sampler state inconsistent with its assignments: {0}")]
    Inconsistent(String),
    #[error("topic {topic} out of range for a model with {topics} topics")]
    TopicOutOfRange { topic: usize, topics: usize },
    #[error("cannot exclude every topic")]
    ExcludesAll,
}

/// Sampler settings. `alpha` and `beta` are symmetric Dirichlet priors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Hyperparams {
    pub topics: usize,
    pub alpha: f64,
    pub beta: f64,
    pub iterations: usize,
    pub burn_in: usize,
    pub seed: u64,
}

impl Hyperparams {
    /// Defaults for `topics` topics: α = 50/K, β = 0.01, 1000 sweeps, 500 burn-in.
    pub fn with_topics(topics: usize) -> Self {
        Hyperparams {
            topics,
            alpha: 50.0 / topics.max(1) as f64,
            beta: 0.01,
            iterations: 1000,
            burn_in: 500,
            seed: 42,
        }
    }

    pub fn validate(&self) -> Result<(), LdaError> {
        let bad = |m: String| Err(LdaError::InvalidHyperparams(m));
        if self.topics < 1 {
            return bad("topics must be >= 1".into());
        }
        if !(self.alpha > 0.0 && self.alpha.is_finite()) {
            return bad(format!("alpha must be > 0, got {}", self.alpha));
        }
        if !(self.beta > 0.0 && self.beta.is_finite()) {
            return bad(format!("beta must be > 0, got {}", self.beta));
        }
        if self.burn_in > self.iterations {
            return bad(format!(
                "burn_in ({}) exceeds iterations ({})",
                self.burn_in, self.iterations
            ));
        }
        Ok(())
    }
}

impl Default for Hyperparams {
    fn default() -> Self {
        Self::with_topics(30)
    }
}

/// Count matrices rebuilt from scratch out of a set of assignments.
#[derive(Debug, Clone, PartialEq, Eq)]
struct Counts {
    n_dk: Vec<u32>,
    n_kw: Vec<u32>,
    n_k: Vec<u32>,
}

impl Counts {
    fn from_assignments<D: AsRef<[u32]>>(
        z: &[Vec<u32>],
        docs: &[D],
        topics: usize,
        vocab: usize,
    ) -> Self {
        let mut c = Counts {
            n_dk: vec![0; docs.len() * topics],
            n_kw: vec![0; topics * vocab],
            n_k: vec![0; topics],
        };
        for (d, (zd, doc)) in z.iter().zip(docs).enumerate() {
            for (&k, &w) in zd.iter().zip(doc.as_ref()) {
                let k = k as usize;
                c.n_dk[d * topics + k] += 1;
                c.n_kw[k * vocab + w as usize] += 1;
                c.n_k[k] += 1;
            }
        }
        c
    }
}

/// Collapsed Gibbs chain: assignments, counts and the generator that drives them.
#[derive(Debug, Clone)]
pub struct GibbsState {
    topics: usize,
    vocab_size: usize,
    z: Vec<Vec<u32>>,
    n_dk: Vec<u32>,
    n_kw: Vec<u32>,
    n_k: Vec<u32>,
    rng: ChaCha8Rng,
    sweeps: usize,
    // scratch for the cumulative conditional
    cumulative: Vec<f64>,
}

impl PartialEq for GibbsState {
    fn eq(&self, other: &Self) -> bool {
        self.topics == other.topics
            && self.vocab_size == other.vocab_size
            && self.z == other.z
            && self.n_dk == other.n_dk
            && self.n_kw == other.n_kw
            && self.n_k == other.n_k
            && self.rng == other.rng
            && self.sweeps == other.sweeps
    }
}

impl GibbsState {
    /// Assigns every token a uniformly random topic and builds the counts.
    pub fn init<D: AsRef<[u32]>>(
        docs: &[D],
        vocab_size: usize,
        hp: &Hyperparams,
    ) -> Result<Self, LdaError> {
        hp.validate()?;
        if vocab_size == 0 {
            return Err(LdaError::EmptyVocabulary);
        }
        let total: usize = docs.iter().map(|d| d.as_ref().len()).sum();
        if docs.is_empty() || total == 0 {
            return Err(LdaError::EmptyCorpus);
        }
        for (d, doc) in docs.iter().enumerate() {
            if let Some(&w) = doc.as_ref().iter().find(|&&w| w as usize >= vocab_size) {
                return Err(LdaError::WordOutOfRange {
                    doc: d,
                    word: w,
                    vocab_size,
                });
            }
        }
        if hp.topics > total {
            log::warn!("{} topics requested for only {} tokens", hp.topics, total);
        }

        let k = hp.topics as u32;
        let mut rng = ChaCha8Rng::seed_from_u64(hp.seed);
        let z: Vec<Vec<u32>> = docs
            .iter()
            .map(|doc| {
                doc.as_ref()
                    .iter()
                    .map(|_| rng.random_range(0..k))
                    .collect()
            })
            .collect();
        let Counts { n_dk, n_kw, n_k } = Counts::from_assignments(&z, docs, hp.topics, vocab_size);
        Ok(GibbsState {
            topics: hp.topics,
            vocab_size,
            z,
            n_dk,
            n_kw,
            n_k,
            rng,
            sweeps: 0,
            cumulative: vec![0.0; hp.topics],
        })
    }

    pub fn topics(&self) -> usize {
        self.topics
    }

    pub fn vocab_size(&self) -> usize {
        self.vocab_size
    }

    pub fn num_docs(&self) -> usize {
        self.z.len()
    }

    /// Completed sweeps.
    pub fn sweeps(&self) -> usize {
        self.sweeps
    }

    /// Topic assignment of every token, per document.
    pub fn assignments(&self) -> &[Vec<u32>] {
        &self.z
    }

    pub fn doc_topic(&self, d: usize, k: usize) -> u32 {
        self.n_dk[d * self.topics + k]
    }

    pub fn topic_word(&self, k: usize, w: usize) -> u32 {
        self.n_kw[k * self.vocab_size + w]
    }

    pub fn topic_total(&self, k: usize) -> u32 {
        self.n_k[k]
    }

    /// Rebuilds all counts from the assignments and compares with the stored ones.
    pub fn check_consistency<D: AsRef<[u32]>>(&self, docs: &[D]) -> Result<(), LdaError> {
        if docs.len() != self.z.len() {
            return Err(LdaError::Inconsistent(format!(
                "{} documents given, state holds {}",
                docs.len(),
                self.z.len()
            )));
        }
        for (d, (zd, doc)) in self.z.iter().zip(docs).enumerate() {
            if zd.len() != doc.as_ref().len() {
                return Err(LdaError::Inconsistent(format!(
                    "document {d}: {} assignments for {} tokens",
                    zd.len(),
                    doc.as_ref().len()
                )));
            }
            if zd.iter().any(|&k| k as usize >= self.topics) {
                return Err(LdaError::Inconsistent(format!(
                    "document {d}: topic out of range"
                )));
            }
        }
        let fresh = Counts::from_assignments(&self.z, docs, self.topics, self.vocab_size);
        if fresh.n_dk != self.n_dk {
            return Err(LdaError::Inconsistent("document-topic counts".into()));
        }
        if fresh.n_kw != self.n_kw {
            return Err(LdaError::Inconsistent("topic-word counts".into()));
        }
        if fresh.n_k != self.n_k {
            return Err(LdaError::Inconsistent("topic totals".into()));
        }
        Ok(())
    }

    /// One full pass resampling every token once, in document then token order.
    pub fn sweep<D: AsRef<[u32]>>(&mut self, docs: &[D], hp: &Hyperparams) -> Result<(), LdaError> {
        self.check_consistency(docs)?;
        let k_count = self.topics;
        let v = self.vocab_size;
        let (alpha, beta) = (hp.alpha, hp.beta);
        let v_beta = v as f64 * beta;

        for (d, doc) in docs.iter().enumerate() {
            let row = d * k_count;
            for (i, &w) in doc.as_ref().iter().enumerate() {
                let w = w as usize;
                let old = self.z[d][i] as usize;
                self.n_dk[row + old] -= 1;
                self.n_kw[old * v + w] -= 1;
                self.n_k[old] -= 1;

                let mut total = 0.0;
                for k in 0..k_count {
                    total += (self.n_dk[row + k] as f64 + alpha)
                        * (self.n_kw[k * v + w] as f64 + beta)
                        / (self.n_k[k] as f64 + v_beta);
                    self.cumulative[k] = total;
                }
                let u = self.rng.random::<f64>() * total;
                let new = self
                    .cumulative
                    .iter()
                    .position(|&c| c > u)
                    .unwrap_or(k_count - 1);

                self.z[d][i] = new as u32;
                self.n_dk[row + new] += 1;
                self.n_kw[new * v + w] += 1;
                self.n_k[new] += 1;
            }
        }
        self.sweeps += 1;
        Ok(())
    }

    /// Smoothed point estimates from the current counts.
    pub fn estimate(&self, hp: &Hyperparams) -> TopicModel {
        let (k_count, v) = (self.topics, self.vocab_size);
        let mut phi = vec![0.0; k_count * v];
        for k in 0..k_count {
            let denom = self.n_k[k] as f64 + v as f64 * hp.beta;
            for w in 0..v {
                phi[k * v + w] = (self.n_kw[k * v + w] as f64 + hp.beta) / denom;
            }
        }
        let d_count = self.z.len();
        let mut theta = vec![0.0; d_count * k_count];
        for d in 0..d_count {
            let denom = self.z[d].len() as f64 + k_count as f64 * hp.alpha;
            for k in 0..k_count {
                theta[d * k_count + k] = (self.n_dk[d * k_count + k] as f64 + hp.alpha) / denom;
            }
        }
        TopicModel {
            topics: k_count,
            vocab_size: v,
            num_docs: d_count,
            phi,
            theta,
            keep_mask: vec![true; k_count],
        }
    }
}

/// Runs `hp.iterations` sweeps from a fresh chain and estimates from the final sample.
pub fn train<D: AsRef<[u32]>>(
    docs: &[D],
    vocab_size: usize,
    hp: &Hyperparams,
) -> Result<(GibbsState, TopicModel), LdaError> {
    let mut state = GibbsState::init(docs, vocab_size, hp)?;
    for it in 0..hp.iterations {
        state.sweep(docs, hp)?;
        if (it + 1) % 100 == 0 {
            log::debug!("lda: {} / {} sweeps", it + 1, hp.iterations);
        }
    }
    let model = state.estimate(hp);
    Ok((state, model))
}

/// Topic–word (`phi`, K×V) and document–topic (`theta`, D×K) distributions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TopicModel {
    topics: usize,
    vocab_size: usize,
    num_docs: usize,
    phi: Vec<f64>,
    theta: Vec<f64>,
    keep_mask: Vec<bool>,
}

impl TopicModel {
    /// Builds a model from row-major matrices; rows are not renormalized.
    pub fn from_parts(phi: Vec<Vec<f64>>, theta: Vec<Vec<f64>>) -> Result<Self, LdaError> {
        let topics = phi.len();
        let vocab_size = phi.first().map_or(0, Vec::len);
        if topics == 0 || vocab_size == 0 {
            return Err(LdaError::EmptyVocabulary);
        }
        if phi.iter().any(|r| r.len() != vocab_size) || theta.iter().any(|r| r.len() != topics) {
            return Err(LdaError::Inconsistent("ragged matrix".into()));
        }
        Ok(TopicModel {
            topics,
            vocab_size,
            num_docs: theta.len(),
            phi: phi.concat(),
            theta: theta.concat(),
            keep_mask: vec![true; topics],
        })
    }

    pub fn topics(&self) -> usize {
        self.topics
    }

    pub fn vocab_size(&self) -> usize {
        self.vocab_size
    }

    pub fn num_docs(&self) -> usize {
        self.num_docs
    }

    pub fn phi_row(&self, k: usize) -> &[f64] {
        &self.phi[k * self.vocab_size..(k + 1) * self.vocab_size]
    }

    pub fn theta_row(&self, d: usize) -> &[f64] {
        &self.theta[d * self.topics..(d + 1) * self.topics]
    }

    pub fn keep_mask(&self) -> &[bool] {
        &self.keep_mask
    }

    pub fn kept_topics(&self) -> Vec<usize> {
        (0..self.topics).filter(|&k| self.keep_mask[k]).collect()
    }

    /// The `n` most probable word ids of topic `k`, ties broken by lower id.
    pub fn top_keywords(&self, k: usize, n: usize) -> Result<Vec<(u32, f64)>, LdaError> {
        if k >= self.topics {
            return Err(LdaError::TopicOutOfRange {
                topic: k,
                topics: self.topics,
            });
        }
        let row = self.phi_row(k);
        let mut ids: Vec<u32> = (0..self.vocab_size as u32).collect();
        ids.sort_by(|&a, &b| row[b as usize].total_cmp(&row[a as usize]).then(a.cmp(&b)));
        ids.truncate(n);
        Ok(ids.into_iter().map(|w| (w, row[w as usize])).collect())
    }

    /// Copy of the model with `excluded` topics masked out.
    pub fn exclude_topics(&self, excluded: &BTreeSet<usize>) -> Result<TopicModel, LdaError> {
        if let Some(&k) = excluded.iter().find(|&&k| k >= self.topics) {
            return Err(LdaError::TopicOutOfRange {
                topic: k,
                topics: self.topics,
            });
        }
        if excluded.len() >= self.topics {
            return Err(LdaError::ExcludesAll);
        }
        let mut model = self.clone();
        model.keep_mask = (0..self.topics).map(|k| !excluded.contains(&k)).collect();
        Ok(model)
    }

    /// Theta row of document `d`, renormalized over kept topics (excluded entries are 0).
    pub fn kept_proportions(&self, d: usize) -> Vec<f64> {
        renormalize_kept(self.theta_row(d), &self.keep_mask)
    }

    /// Writes `topic_id,rank,token,probability` for the top `n` words of every topic.
    pub fn write_keywords_csv<W: Write>(
        &self,
        out: W,
        vocab: &Vocabulary,
        n: usize,
    ) -> csv::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["topic_id", "rank", "token", "probability"])?;
        for k in 0..self.topics {
            let top = self.top_keywords(k, n).expect("topic in range");
            for (rank, (id, p)) in top.into_iter().enumerate() {
                w.write_record([
                    k.to_string(),
                    (rank + 1).to_string(),
                    vocab.token(id).unwrap_or("").to_string(),
                    p.to_string(),
                ])?;
            }
        }
        w.flush()?;
        Ok(())
    }

    /// Writes `doc_id,speaker_id,year,topic_0..topic_{K-1}` with raw theta rows.
    pub fn write_doc_topics_csv<W: Write>(
        &self,
        out: W,
        docs: &[TokenizedDocument],
    ) -> csv::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let mut header = vec!["doc_id".to_string(), "speaker_id".into(), "year".into()];
        header.extend((0..self.topics).map(|k| format!("topic_{k}")));
        w.write_record(&header)?;
        for (d, doc) in docs.iter().enumerate().take(self.num_docs) {
            let mut row = vec![
                doc.doc_id.clone(),
                doc.speaker_id.clone(),
                doc.year.to_string(),
            ];
            row.extend(self.theta_row(d).iter().map(f64::to_string));
            w.write_record(&row)?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Zeroes excluded entries and rescales the rest to sum to one.
pub fn renormalize_kept(row: &[f64], keep_mask: &[bool]) -> Vec<f64> {
    let kept_sum: f64 = row
        .iter()
        .zip(keep_mask)
        .filter(|(_, &k)| k)
        .map(|(p, _)| p)
        .sum();
    row.iter()
        .zip(keep_mask)
        .map(|(&p, &keep)| {
            if keep && kept_sum > 0.0 {
                p / kept_sum
            } else {
                0.0
            }
        })
        .collect()
}

/// Serialized model: hyperparameters, a vocabulary fingerprint and the estimates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelFile {
    pub hyperparams: Hyperparams,
    /// [`Vocabulary::content_hash`] of the vocabulary the model was trained on.
    pub vocab_hash: String,
    pub doc_ids: Vec<String>,
    pub model: TopicModel,
}
