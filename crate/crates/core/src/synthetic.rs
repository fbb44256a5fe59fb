//! Deterministic synthetic speech corpus used for demos and end-to-end tests.
//!
//! Speakers belong to parties, parties lean towards a few themes, and every
//! speech mixes filler words with words drawn from its speaker's themes.
//! About a fifth of the speeches are at most 150 words long.

use chrono::NaiveDate;
use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::corpus::SpeechRecord;

const ONSETS: &[&str] = &[
    "b", "c", "d", "f", "g", "h", "k", "l", "m", "n", "p", "r", "s", "t", "v", "w", "br", "cr",
    "dr", "gr", "pl", "st", "tr",
];
const NUCLEI: &[&str] = &["a", "e", "i", "o", "u", "ai", "ou", "ea"];
const FILLER: &[&str] = &[
    "the", "and", "of", "to", "in", "that", "is", "for", "this", "we", "it", "on", "are", "with",
    "as", "have", "be", "not", "will", "our",
];

/// Shape of the generated corpus.
#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticSpec {
    pub seed: u64,
    pub parties: Vec<String>,
    pub speakers: usize,
    pub themes: usize,
    pub words_per_theme: usize,
    /// (term, first year, last year)
    pub terms: Vec<(u32, i32, i32)>,
    pub speeches_per_year: usize,
    /// Probability that a speech is 150 words or shorter.
    pub short_fraction: f64,
}

impl Default for SyntheticSpec {
    fn default() -> Self {
        SyntheticSpec {
            seed: 7,
            parties: ["Red", "Blue", "Green"].map(String::from).to_vec(),
            speakers: 20,
            themes: 8,
            words_per_theme: 30,
            terms: vec![
                (47, 2003, 2005),
                (48, 2006, 2008),
                (49, 2009, 2011),
                (50, 2012, 2014),
            ],
            speeches_per_year: 3,
            short_fraction: 0.2,
        }
    }
}

fn pseudo_word(rng: &mut ChaCha8Rng) -> String {
    let syllables = rng.random_range(2..=3);
    (0..syllables)
        .map(|_| {
            format!(
                "{}{}",
                ONSETS.choose(rng).unwrap(),
                NUCLEI.choose(rng).unwrap()
            )
        })
        .collect()
}

/// Generates the corpus described by `spec`. Same spec, same records.
pub fn generate(spec: &SyntheticSpec) -> Vec<SpeechRecord> {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);

    let mut seen = std::collections::HashSet::new();
    let themes: Vec<Vec<String>> = (0..spec.themes)
        .map(|_| {
            let mut words = Vec::with_capacity(spec.words_per_theme);
            while words.len() < spec.words_per_theme {
                let w = pseudo_word(&mut rng);
                if seen.insert(w.clone()) {
                    words.push(w);
                }
            }
            words
        })
        .collect();

    // each party favours two themes; each speaker adds one personal theme
    let party_themes: Vec<[usize; 2]> = (0..spec.parties.len())
        .map(|p| [(2 * p) % spec.themes, (2 * p + 1) % spec.themes])
        .collect();
    let speakers: Vec<(String, String, usize, usize)> = (0..spec.speakers)
        .map(|i| {
            let party = i % spec.parties.len();
            let personal = rng.random_range(0..spec.themes);
            (format!("mp{i:03}"), format!("Member {i}"), party, personal)
        })
        .collect();

    let mut records = Vec::new();
    let mut counter = 0usize;
    for &(term, first, last) in &spec.terms {
        for year in first..=last {
            for (speaker_id, name, party, personal) in &speakers {
                let [a, b] = party_themes[*party];
                for _ in 0..spec.speeches_per_year {
                    counter += 1;
                    let len = if rng.random_bool(spec.short_fraction) {
                        rng.random_range(20..=150)
                    } else {
                        rng.random_range(151..=420)
                    };
                    let mut words = Vec::with_capacity(len);
                    for i in 0..len {
                        let w = if rng.random_bool(0.3) {
                            FILLER.choose(&mut rng).unwrap().to_string()
                        } else {
                            let roll: f64 = rng.random();
                            let theme = if roll < 0.4 {
                                a
                            } else if roll < 0.75 {
                                b
                            } else if roll < 0.9 {
                                *personal
                            } else {
                                rng.random_range(0..spec.themes)
                            };
                            themes[theme].choose(&mut rng).unwrap().clone()
                        };
                        if i % 17 == 16 {
                            words.push(format!("{w}."));
                        } else {
                            words.push(w);
                        }
                    }
                    let month = rng.random_range(2..=11);
                    let day = rng.random_range(1..=28);
                    records.push(SpeechRecord {
                        speech_id: format!("sp{counter:06}"),
                        speaker_id: speaker_id.clone(),
                        speaker_name: name.clone(),
                        party: spec.parties[*party].clone(),
                        date: NaiveDate::from_ymd_opt(year, month, day).expect("valid date"),
                        term,
                        text: words.join(" "),
                    });
                }
            }
        }
    }
    records
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_and_well_formed() {
        let spec = SyntheticSpec {
            speakers: 4,
            terms: vec![(47, 2003, 2004)],
            ..SyntheticSpec::default()
        };
        let a = generate(&spec);
        assert_eq!(a, generate(&spec));
        assert_eq!(a.len(), 4 * 2 * 3);
        let ids: std::collections::HashSet<_> = a.iter().map(|r| &r.speech_id).collect();
        assert_eq!(ids.len(), a.len());
        assert!(a.iter().all(|r| r.term == 47 && !r.text.is_empty()));
    }
}
