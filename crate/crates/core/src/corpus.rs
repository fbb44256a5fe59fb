//! Speech ingestion, short-speech filtering, tokenization and corpus building.
//!
//! Input is line-delimited JSON, one speech object per line:
//!
//! ```text
//! {"speech_id":"s1","speaker_id":"mp07","speaker_name":"A. Member","party":"Labour",
//!  "date":"2004-03-18","term":47,"text":"..."}
//! ```
//!
//! Documents are formed by concatenating every speech a speaker gave in one
//! calendar year. Document order, speech order inside a document and token ids
//! are canonical, so the corpus does not depend on the order of input lines.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;
use std::str::FromStr;

use chrono::{Datelike, NaiveDate};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Speeches with fewer words than this are removed (150 words or fewer).
pub const DEFAULT_MIN_WORDS: usize = 151;

/// Tokens with fewer characters than this are dropped.
pub const MIN_TOKEN_CHARS: usize = 3;

const ENGLISH_STOPWORDS: &str = include_str!("../data/stopwords_en.txt");
const PROCEDURAL_STOPWORDS: &str = include_str!("../data/stopwords_procedural.txt");

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("failed to read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("line {line}: malformed record: {message}")]
    Malformed { line: usize, message: String },
    #[error("line {line}: missing required field `{field}`")]
    MissingField { line: usize, field: &'static str },
    #[error("line {line}: invalid field `{field}`: {message}")]
    InvalidField {
        line: usize,
        field: &'static str,
        message: String,
    },
    #[error("line {line}: duplicate speech_id `{speech_id}`")]
    DuplicateId { line: usize, speech_id: String },
    #[error("empty corpus: no document has a token left after tokenization")]
    EmptyCorpus,
    #[error("unknown corpus format `{0}`")]
    UnknownFormat(String),
}

/// On-disk layout of the speech corpus.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CorpusFormat {
    /// One JSON object per line.
    #[default]
    Jsonl,
}

impl FromStr for CorpusFormat {
    type Err = CorpusError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "jsonl" | "ndjson" => Ok(CorpusFormat::Jsonl),
            other => Err(CorpusError::UnknownFormat(other.to_string())),
        }
    }
}

/// One attributed speech.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpeechRecord {
    pub speech_id: String,
    pub speaker_id: String,
    pub speaker_name: String,
    pub party: String,
    pub date: NaiveDate,
    /// Parliament number.
    pub term: u32,
    pub text: String,
}

impl SpeechRecord {
    /// Number of maximal whitespace-separated substrings of the text.
    pub fn word_count(&self) -> usize {
        word_count(&self.text)
    }

    pub fn year(&self) -> i32 {
        self.date.year()
    }
}

pub fn word_count(text: &str) -> usize {
    text.split_whitespace().count()
}

#[derive(Deserialize)]
struct RawRecord {
    speech_id: Option<String>,
    speaker_id: Option<String>,
    speaker_name: Option<String>,
    party: Option<String>,
    date: Option<String>,
    term: Option<serde_json::Value>,
    text: Option<String>,
}

fn required(
    value: Option<String>,
    line: usize,
    field: &'static str,
) -> Result<String, CorpusError> {
    match value {
        Some(v) if !v.trim().is_empty() => Ok(v),
        _ => Err(CorpusError::MissingField { line, field }),
    }
}

impl RawRecord {
    fn validate(self, line: usize) -> Result<SpeechRecord, CorpusError> {
        let speech_id = required(self.speech_id, line, "speech_id")?;
        let speaker_id = required(self.speaker_id, line, "speaker_id")?;
        let speaker_name = required(self.speaker_name, line, "speaker_name")?;
        let party = required(self.party, line, "party")?;
        let date_raw = required(self.date, line, "date")?;
        let date = parse_date(&date_raw).ok_or_else(|| CorpusError::InvalidField {
            line,
            field: "date",
            message: format!("`{date_raw}` is not an ISO-8601 date"),
        })?;
        let term = match self.term {
            None | Some(serde_json::Value::Null) => {
                return Err(CorpusError::MissingField {
                    line,
                    field: "term",
                })
            }
            Some(v) => parse_term(&v).ok_or_else(|| CorpusError::InvalidField {
                line,
                field: "term",
                message: format!("`{v}` is not a positive integer"),
            })?,
        };
        let text = required(self.text, line, "text")?;
        Ok(SpeechRecord {
            speech_id,
            speaker_id,
            speaker_name,
            party,
            date,
            term,
            text,
        })
    }
}

fn parse_date(raw: &str) -> Option<NaiveDate> {
    let raw = raw.trim();
    // Accept full timestamps by keeping the calendar date part.
    let day = raw.get(..10).unwrap_or(raw);
    NaiveDate::parse_from_str(day, "%Y-%m-%d").ok()
}

fn parse_term(v: &serde_json::Value) -> Option<u32> {
    let n = match v {
        serde_json::Value::Number(n) => n.as_u64()?,
        serde_json::Value::String(s) => s.trim().parse::<u64>().ok()?,
        _ => return None,
    };
    u32::try_from(n).ok().filter(|&t| t >= 1)
}

/// Reads a speech corpus. Blank lines are skipped; line numbers in errors are 1-based.
pub fn parse_corpus(path: &Path, format: CorpusFormat) -> Result<Vec<SpeechRecord>, CorpusError> {
    let file = File::open(path).map_err(|source| CorpusError::Io {
        path: path.display().to_string(),
        source,
    })?;
    match format {
        CorpusFormat::Jsonl => parse_jsonl(BufReader::new(file), &path.display().to_string()),
    }
}

/// Parses JSON-lines records from any reader. `origin` only labels I/O errors.
pub fn parse_jsonl<R: BufRead>(reader: R, origin: &str) -> Result<Vec<SpeechRecord>, CorpusError> {
    let mut records = Vec::new();
    let mut seen = HashSet::new();
    for (idx, line) in reader.lines().enumerate() {
        let line_no = idx + 1;
        let line = line.map_err(|source| CorpusError::Io {
            path: origin.to_string(),
            source,
        })?;
        if line.trim().is_empty() {
            continue;
        }
        let raw: RawRecord = serde_json::from_str(&line).map_err(|e| CorpusError::Malformed {
            line: line_no,
            message: e.to_string(),
        })?;
        let record = raw.validate(line_no)?;
        if !seen.insert(record.speech_id.clone()) {
            return Err(CorpusError::DuplicateId {
                line: line_no,
                speech_id: record.speech_id,
            });
        }
        records.push(record);
    }
    Ok(records)
}

/// Writes records as JSON lines, the same layout [`parse_jsonl`] reads.
pub fn write_jsonl<W: Write>(mut out: W, records: &[SpeechRecord]) -> std::io::Result<()> {
    for r in records {
        serde_json::to_writer(&mut out, r)?;
        out.write_all(b"\n")?;
    }
    Ok(())
}

/// Word-count histogram of every ingested speech plus the filter outcome.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorpusStats {
    /// Exact word count -> number of speeches.
    pub histogram: BTreeMap<usize, usize>,
    pub removed_count: usize,
    pub kept_count: usize,
    pub min_words: usize,
}

impl CorpusStats {
    pub fn total(&self) -> usize {
        self.removed_count + self.kept_count
    }

    pub fn removed_fraction(&self) -> f64 {
        if self.total() == 0 {
            0.0
        } else {
            self.removed_count as f64 / self.total() as f64
        }
    }

    /// Histogram folded into bins of `bin_width` words, keyed by bin start.
    pub fn binned(&self, bin_width: usize) -> BTreeMap<usize, usize> {
        let width = bin_width.max(1);
        let mut bins = BTreeMap::new();
        for (&count, &freq) in &self.histogram {
            *bins.entry(count / width * width).or_insert(0) += freq;
        }
        bins
    }

    /// CSV with header `word_count_bin,frequency`.
    pub fn write_csv<W: Write>(&self, out: W, bin_width: usize) -> csv::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["word_count_bin", "frequency"])?;
        for (bin, freq) in self.binned(bin_width) {
            w.write_record([bin.to_string(), freq.to_string()])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Keeps speeches with at least `min_words` whitespace words.
pub fn filter_short(
    records: Vec<SpeechRecord>,
    min_words: usize,
) -> (Vec<SpeechRecord>, CorpusStats) {
    let mut stats = CorpusStats {
        min_words,
        ..CorpusStats::default()
    };
    let mut kept = Vec::with_capacity(records.len());
    for record in records {
        let n = record.word_count();
        *stats.histogram.entry(n).or_insert(0) += 1;
        if n >= min_words {
            stats.kept_count += 1;
            kept.push(record);
        } else {
            stats.removed_count += 1;
        }
    }
    (kept, stats)
}

/// Lower-cased stopword set.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Stopwords(HashSet<String>);

impl Stopwords {
    pub fn new() -> Self {
        Self::default()
    }

    /// Bundled general English list.
    pub fn english() -> Self {
        Self::parse(ENGLISH_STOPWORDS)
    }

    /// Bundled parliamentary procedure list ("bill", "member", "speaker", ...).
    pub fn procedural() -> Self {
        Self::parse(PROCEDURAL_STOPWORDS)
    }

    /// One token per line; blank lines and lines starting with `#` are ignored.
    pub fn parse(text: &str) -> Self {
        Stopwords(
            text.lines()
                .map(str::trim)
                .filter(|l| !l.is_empty() && !l.starts_with('#'))
                .map(str::to_lowercase)
                .collect(),
        )
    }

    pub fn load(path: &Path) -> Result<Self, CorpusError> {
        let text = std::fs::read_to_string(path).map_err(|source| CorpusError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Ok(Self::parse(&text))
    }

    pub fn extend(&mut self, other: Stopwords) {
        self.0.extend(other.0);
    }

    pub fn contains(&self, token: &str) -> bool {
        self.0.contains(token)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl<S: Into<String>> FromIterator<S> for Stopwords {
    fn from_iter<I: IntoIterator<Item = S>>(iter: I) -> Self {
        Stopwords(iter.into_iter().map(|s| s.into().to_lowercase()).collect())
    }
}

/// Lower-cases, splits on non-alphabetic characters and drops short and stop tokens.
pub fn tokenize(text: &str, stopwords: &Stopwords) -> Vec<String> {
    text.to_lowercase()
        .split(|c: char| !c.is_alphabetic())
        .filter(|t| t.chars().count() >= MIN_TOKEN_CHARS && !stopwords.contains(t))
        .map(str::to_owned)
        .collect()
}

/// Dense token <-> id map. Serialized as the token list in id order.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(from = "Vec<String>", into = "Vec<String>")]
pub struct Vocabulary {
    id_to_token: Vec<String>,
    token_to_id: HashMap<String, u32>,
}

impl From<Vec<String>> for Vocabulary {
    fn from(id_to_token: Vec<String>) -> Self {
        let token_to_id = id_to_token
            .iter()
            .enumerate()
            .map(|(i, t)| (t.clone(), i as u32))
            .collect();
        Vocabulary {
            id_to_token,
            token_to_id,
        }
    }
}

impl From<Vocabulary> for Vec<String> {
    fn from(v: Vocabulary) -> Self {
        v.id_to_token
    }
}

impl Vocabulary {
    pub fn new() -> Self {
        Self::default()
    }

    /// Returns the id of `token`, assigning the next free id on first sight.
    pub fn intern(&mut self, token: &str) -> u32 {
        if let Some(&id) = self.token_to_id.get(token) {
            return id;
        }
        let id = self.id_to_token.len() as u32;
        self.id_to_token.push(token.to_owned());
        self.token_to_id.insert(token.to_owned(), id);
        id
    }

    pub fn id(&self, token: &str) -> Option<u32> {
        self.token_to_id.get(token).copied()
    }

    pub fn token(&self, id: u32) -> Option<&str> {
        self.id_to_token.get(id as usize).map(String::as_str)
    }

    pub fn len(&self) -> usize {
        self.id_to_token.len()
    }

    pub fn is_empty(&self) -> bool {
        self.id_to_token.is_empty()
    }

    pub fn tokens(&self) -> &[String] {
        &self.id_to_token
    }

    /// SHA-256 over the newline-joined token list, hex encoded.
    pub fn content_hash(&self) -> String {
        use sha2::{Digest, Sha256};
        let mut h = Sha256::new();
        for t in &self.id_to_token {
            h.update(t.as_bytes());
            h.update(b"\n");
        }
        hex::encode(h.finalize())
    }
}

/// All speeches of one speaker in one calendar year, tokenized.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TokenizedDocument {
    pub doc_id: String,
    pub speaker_id: String,
    pub year: i32,
    /// Majority party across the grouped speeches.
    pub party: String,
    /// Majority term across the grouped speeches.
    pub term: u32,
    pub tokens: Vec<u32>,
    /// Whitespace word count of the source speeches before tokenization.
    pub word_count_raw: u64,
}

impl TokenizedDocument {
    pub fn group_key(&self) -> (&str, i32) {
        (&self.speaker_id, self.year)
    }
}

impl AsRef<[u32]> for TokenizedDocument {
    fn as_ref(&self) -> &[u32] {
        &self.tokens
    }
}

/// Metadata of a speech that survived the short-speech filter.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpeechSummary {
    pub speaker_id: String,
    pub speaker_name: String,
    pub party: String,
    pub term: u32,
    pub year: i32,
    pub words: u64,
}

impl From<&SpeechRecord> for SpeechSummary {
    fn from(r: &SpeechRecord) -> Self {
        SpeechSummary {
            speaker_id: r.speaker_id.clone(),
            speaker_name: r.speaker_name.clone(),
            party: r.party.clone(),
            term: r.term,
            year: r.year(),
            words: r.word_count() as u64,
        }
    }
}

/// Integer-encoded documents with their vocabulary.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Corpus {
    pub documents: Vec<TokenizedDocument>,
    pub vocabulary: Vocabulary,
}

impl Corpus {
    pub fn total_tokens(&self) -> usize {
        self.documents.iter().map(|d| d.tokens.len()).sum()
    }

    pub fn from_json(text: &str) -> serde_json::Result<Self> {
        serde_json::from_str(text)
    }
}

/// Most frequent value; ties go to the smallest value.
fn majority<T: Ord + Clone>(values: impl IntoIterator<Item = T>) -> Option<T> {
    let mut counts: BTreeMap<T, usize> = BTreeMap::new();
    for v in values {
        *counts.entry(v).or_insert(0) += 1;
    }
    let best = counts.values().copied().max()?;
    counts.into_iter().find(|(_, c)| *c == best).map(|(v, _)| v)
}

/// Groups speeches by (speaker, calendar year) and encodes them.
///
/// Documents are ordered by `(speaker_id, year)`, speeches inside a document
/// by `(date, speech_id)`. Token ids follow first appearance in that order.
/// Groups whose speeches leave no token are dropped.
pub fn build_corpus(
    records: &[SpeechRecord],
    stopwords: &Stopwords,
) -> Result<Corpus, CorpusError> {
    let mut groups: BTreeMap<(&str, i32), Vec<&SpeechRecord>> = BTreeMap::new();
    for r in records {
        groups
            .entry((r.speaker_id.as_str(), r.year()))
            .or_default()
            .push(r);
    }

    let mut vocabulary = Vocabulary::new();
    let mut documents = Vec::with_capacity(groups.len());
    for ((speaker_id, year), mut speeches) in groups {
        speeches.sort_by(|a, b| (a.date, &a.speech_id).cmp(&(b.date, &b.speech_id)));
        let mut tokens = Vec::new();
        let mut word_count_raw = 0u64;
        for s in &speeches {
            word_count_raw += s.word_count() as u64;
            for t in tokenize(&s.text, stopwords) {
                tokens.push(vocabulary.intern(&t));
            }
        }
        if tokens.is_empty() {
            continue;
        }
        documents.push(TokenizedDocument {
            doc_id: format!("{speaker_id}:{year}"),
            speaker_id: speaker_id.to_owned(),
            year,
            party: majority(speeches.iter().map(|s| s.party.clone())).unwrap_or_default(),
            term: majority(speeches.iter().map(|s| s.term)).unwrap_or_default(),
            tokens,
            word_count_raw,
        });
    }
    if documents.is_empty() {
        return Err(CorpusError::EmptyCorpus);
    }
    Ok(Corpus {
        documents,
        vocabulary,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn record(id: &str, speaker: &str, date: &str, words: usize) -> SpeechRecord {
        SpeechRecord {
            speech_id: id.into(),
            speaker_id: speaker.into(),
            speaker_name: speaker.to_uppercase(),
            party: "Green".into(),
            date: NaiveDate::parse_from_str(date, "%Y-%m-%d").unwrap(),
            term: 48,
            text: vec!["word"; words].join(" "),
        }
    }

    const LINE: &str = r#"{"speech_id":"s1","speaker_id":"mp1","speaker_name":"One","party":"Labour","date":"2004-05-06","term":47,"text":"hello there"}"#;

    #[test]
    fn parses_lines_in_order() {
        let input = [LINE, &LINE.replace("s1", "s2"), &LINE.replace("s1", "s3")].join("\n");
        let recs = parse_jsonl(input.as_bytes(), "mem").unwrap();
        let ids: Vec<_> = recs.iter().map(|r| r.speech_id.as_str()).collect();
        assert_eq!(ids, ["s1", "s2", "s3"]);
        assert_eq!(recs[0].term, 47);
        assert_eq!(recs[0].year(), 2004);
    }

    #[test]
    fn empty_input_is_empty_corpus() {
        assert!(parse_jsonl("".as_bytes(), "mem").unwrap().is_empty());
    }

    #[test]
    fn missing_party_names_line_and_field() {
        let line = LINE.replace(r#""party":"Labour","#, "");
        let err = parse_jsonl(line.as_bytes(), "mem").unwrap_err();
        match err {
            CorpusError::MissingField { line, field } => {
                assert_eq!(line, 1);
                assert_eq!(field, "party");
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn rejects_bad_term_date_and_duplicates() {
        let bad_term = LINE.replace(r#""term":47"#, r#""term":0"#);
        assert!(matches!(
            parse_jsonl(bad_term.as_bytes(), "m"),
            Err(CorpusError::InvalidField { field: "term", .. })
        ));
        let bad_date = LINE.replace("2004-05-06", "yesterday");
        assert!(matches!(
            parse_jsonl(bad_date.as_bytes(), "m"),
            Err(CorpusError::InvalidField { field: "date", .. })
        ));
        let dup = format!("{LINE}\n\n{LINE}");
        assert!(matches!(
            parse_jsonl(dup.as_bytes(), "m"),
            Err(CorpusError::DuplicateId { line: 3, .. })
        ));
        assert!(matches!(
            parse_jsonl("{not json".as_bytes(), "m"),
            Err(CorpusError::Malformed { line: 1, .. })
        ));
    }

    #[test]
    fn missing_file_is_io_error() {
        let err = parse_corpus(
            Path::new("/nonexistent/speeches.jsonl"),
            CorpusFormat::Jsonl,
        );
        assert!(matches!(err, Err(CorpusError::Io { .. })));
    }

    #[test]
    fn filter_boundary_at_150_words() {
        let (kept, stats) = filter_short(
            vec![
                record("a", "x", "2005-01-01", 150),
                record("b", "x", "2005-01-01", 151),
            ],
            DEFAULT_MIN_WORDS,
        );
        assert_eq!(kept.len(), 1);
        assert_eq!(kept[0].speech_id, "b");
        assert_eq!(stats.removed_count, 1);
        assert_eq!(stats.histogram.values().sum::<usize>(), 2);
    }

    #[test]
    fn word_count_uses_maximal_whitespace_runs() {
        assert_eq!(word_count("  a\tb \n\n c  "), 3);
        assert_eq!(word_count(""), 0);
    }

    #[test]
    fn tokenize_examples() {
        let stop: Stopwords = ["the"].into_iter().collect();
        assert_eq!(
            tokenize("The Economy, the economy!", &stop),
            ["economy", "economy"]
        );
        assert!(tokenize("", &stop).is_empty());
        // Short fragments and digits disappear, non-ASCII letters stay.
        assert_eq!(
            tokenize("wh a1b2 Māori te reo 2004", &Stopwords::new()),
            ["māori", "reo"]
        );
    }

    #[test]
    fn bundled_stopwords_load() {
        let en = Stopwords::english();
        assert!(en.contains("the") && en.contains("and"));
        let proc = Stopwords::procedural();
        for w in ["bill", "member", "speaker"] {
            assert!(proc.contains(w), "{w}");
        }
    }

    #[test]
    fn same_speaker_year_is_concatenated() {
        let mut a = record("a", "x", "2005-02-01", 0);
        a.text = "alpha beta".into();
        let mut b = record("b", "x", "2005-09-01", 0);
        b.text = "gamma alpha".into();
        // Input order reversed; canonical order is by date.
        let corpus = build_corpus(&[b, a], &Stopwords::new()).unwrap();
        assert_eq!(corpus.documents.len(), 1);
        let toks: Vec<_> = corpus.documents[0]
            .tokens
            .iter()
            .map(|&t| corpus.vocabulary.token(t).unwrap())
            .collect();
        assert_eq!(toks, ["alpha", "beta", "gamma", "alpha"]);
        assert_eq!(corpus.documents[0].word_count_raw, 4);
        assert_eq!(corpus.documents[0].doc_id, "x:2005");
    }

    #[test]
    fn two_speakers_give_disjoint_groups() {
        let mut a = record("a", "x", "2005-02-01", 0);
        a.text = "alpha".into();
        let mut b = record("b", "y", "2005-02-01", 0);
        b.text = "beta".into();
        let corpus = build_corpus(&[a, b], &Stopwords::new()).unwrap();
        let keys: Vec<_> = corpus.documents.iter().map(|d| d.group_key()).collect();
        assert_eq!(keys, [("x", 2005), ("y", 2005)]);
    }

    #[test]
    fn all_empty_documents_is_error() {
        let mut a = record("a", "x", "2005-02-01", 0);
        a.text = "the of".into();
        let stop = Stopwords::english();
        assert!(matches!(
            build_corpus(&[a], &stop),
            Err(CorpusError::EmptyCorpus)
        ));
    }

    #[test]
    fn majority_term_and_party() {
        let mut a = record("a", "x", "2008-02-01", 0);
        a.text = "alpha".into();
        a.term = 48;
        let mut b = a.clone();
        b.speech_id = "b".into();
        b.term = 49;
        b.party = "Blue".into();
        let mut c = b.clone();
        c.speech_id = "c".into();
        let corpus = build_corpus(&[a, b, c], &Stopwords::new()).unwrap();
        assert_eq!(corpus.documents[0].term, 49);
        assert_eq!(corpus.documents[0].party, "Blue");
        assert_eq!(majority([2, 1, 1, 2]), Some(1));
    }

    #[test]
    fn vocabulary_survives_json() {
        let mut a = record("a", "x", "2005-02-01", 0);
        a.text = "alpha beta".into();
        let corpus = build_corpus(&[a], &Stopwords::new()).unwrap();
        let back = Corpus::from_json(&serde_json::to_string(&corpus).unwrap()).unwrap();
        assert_eq!(back.vocabulary.id("beta"), Some(1));
        assert_eq!(back, corpus);
    }

    #[test]
    fn binned_histogram_and_csv() {
        let (_, stats) = filter_short(
            vec![
                record("a", "x", "2005-01-01", 5),
                record("b", "x", "2005-01-01", 12),
                record("c", "x", "2005-01-01", 19),
            ],
            10,
        );
        assert_eq!(stats.binned(10), BTreeMap::from([(0, 1), (10, 2)]));
        let mut buf = Vec::new();
        stats.write_csv(&mut buf, 10).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "word_count_bin,frequency\n0,1\n10,2\n"
        );
    }
}
