//! Corpus ingestion and occurrence-probability assignment.
//!
//! A corpus file is UTF-8 text, one token per line, with an optional
//! `word,probability` CSV variant; `#` lines are comments. Rank order is
//! file order, which matters when a Zipf distribution is fitted over the
//! ranked words.

use rand::Rng;

use crate::error::{Error, Result};
use crate::trie::normalize_word;

/// Words with occurrence probabilities summing to 1; the sampling ground truth.
#[derive(Debug, Clone)]
pub struct CorpusModel {
    entries: Vec<(String, f64)>,
    cumulative: Vec<f64>,
}

/// Raw parse of a corpus file before probabilities are assigned.
#[derive(Debug, Clone)]
pub struct LoadedCorpus {
    pub words: Vec<String>,
    /// Explicit probabilities, present iff the file used the CSV variant.
    pub probabilities: Option<Vec<f64>>,
    /// Entries dropped because they failed alphabet validation.
    pub dropped: usize,
}

/// Parses a corpus file. Words are lowercased; entries with out-of-alphabet
/// characters are dropped and counted. Duplicate words are an error.
pub fn load_corpus(text: &str) -> Result<LoadedCorpus> {
    let mut words: Vec<String> = Vec::new();
    let mut probs: Vec<f64> = Vec::new();
    let mut has_probs = false;
    let mut dropped = 0usize;
    let mut seen = std::collections::HashSet::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (word_part, prob_part) = match line.split_once(',') {
            Some((w, p)) => (w.trim(), Some(p.trim())),
            None => (line, None),
        };
        let word = word_part.to_lowercase();
        if normalize_word(&word).is_err() {
            dropped += 1;
            continue;
        }
        if !seen.insert(word.clone()) {
            return Err(Error::DuplicateWord(word));
        }
        match prob_part {
            Some(p) => {
                let p: f64 = p.parse().map_err(|_| {
                    Error::Corpus(format!("line {}: bad probability {p:?}", idx + 1))
                })?;
                if p <= 0.0 || !p.is_finite() {
                    return Err(Error::Corpus(format!(
                        "line {}: probability must be positive, got {p}",
                        idx + 1
                    )));
                }
                has_probs = true;
                probs.push(p);
            }
            None => {
                if has_probs {
                    return Err(Error::Corpus(format!(
                        "line {}: missing probability in CSV corpus",
                        idx + 1
                    )));
                }
            }
        }
        words.push(word);
    }
    if words.is_empty() {
        return Err(Error::Corpus("no usable words in corpus".into()));
    }
    if has_probs && probs.len() != words.len() {
        return Err(Error::Corpus(
            "corpus mixes bare words and word,probability lines".into(),
        ));
    }
    Ok(LoadedCorpus {
        words,
        probabilities: has_probs.then_some(probs),
        dropped,
    })
}

/// Zipf probabilities over `n` ranks: `p_r = r^(-s) / sum_k k^(-s)`.
pub fn fit_zipf(n: usize, s: f64) -> Result<Vec<f64>> {
    if n == 0 {
        return Err(Error::Corpus("cannot fit Zipf over zero words".into()));
    }
    if s < 0.0 {
        return Err(Error::Corpus(format!(
            "Zipf exponent must be >= 0, got {s}"
        )));
    }
    let weights: Vec<f64> = (1..=n).map(|r| (r as f64).powf(-s)).collect();
    let norm: f64 = weights.iter().sum();
    Ok(weights.into_iter().map(|w| w / norm).collect())
}

impl CorpusModel {
    /// Pairs words with probabilities, renormalizing to sum to 1.
    pub fn with_probabilities(words: Vec<String>, probs: Vec<f64>) -> Result<Self> {
        if words.is_empty() {
            return Err(Error::Corpus("empty corpus".into()));
        }
        if words.len() != probs.len() {
            return Err(Error::Corpus(format!(
                "{} words but {} probabilities",
                words.len(),
                probs.len()
            )));
        }
        for p in &probs {
            if *p <= 0.0 || !p.is_finite() {
                return Err(Error::Corpus(format!(
                    "probability must be positive, got {p}"
                )));
            }
        }
        let norm: f64 = probs.iter().sum();
        let entries: Vec<(String, f64)> = words
            .into_iter()
            .zip(probs.into_iter().map(|p| p / norm))
            .collect();
        let mut cumulative = Vec::with_capacity(entries.len());
        let mut acc = 0.0;
        for (_, p) in &entries {
            acc += p;
            cumulative.push(acc);
        }
        if let Some(last) = cumulative.last_mut() {
            *last = 1.0;
        }
        Ok(CorpusModel {
            entries,
            cumulative,
        })
    }

    /// Uniform probabilities over the words.
    pub fn uniform(words: Vec<String>) -> Result<Self> {
        let n = words.len();
        Self::with_probabilities(words, vec![1.0; n.max(1)])
    }

    /// Zipf probabilities by file rank.
    pub fn zipf(words: Vec<String>, s: f64) -> Result<Self> {
        let probs = fit_zipf(words.len(), s)?;
        Self::with_probabilities(words, probs)
    }

    /// Builds a model from a parsed file: explicit probabilities when present,
    /// otherwise a Zipf fit over the file's rank order.
    pub fn from_loaded(loaded: LoadedCorpus, zipf_exponent: f64) -> Result<Self> {
        match loaded.probabilities {
            Some(p) => Self::with_probabilities(loaded.words, p),
            None => Self::zipf(loaded.words, zipf_exponent),
        }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[(String, f64)] {
        &self.entries
    }

    pub fn words(&self) -> impl Iterator<Item = &str> {
        self.entries.iter().map(|(w, _)| w.as_str())
    }

    pub fn probability_of(&self, word: &str) -> Option<f64> {
        self.entries
            .iter()
            .find(|(w, _)| w == word)
            .map(|(_, p)| *p)
    }

    /// Draws one word i.i.d. according to the occurrence probabilities.
    pub fn sample_word<R: Rng + ?Sized>(&self, rng: &mut R) -> &str {
        let u: f64 = rng.gen();
        let idx = match self
            .cumulative
            .binary_search_by(|c| c.partial_cmp(&u).expect("finite"))
        {
            Ok(i) => i + 1,
            Err(i) => i,
        };
        let idx = idx.min(self.entries.len() - 1);
        self.entries[idx].0.as_str()
    }

    /// Pairs `(w1, w2)` where `w1` is a proper prefix of `w2`.
    pub fn prefix_pairs(&self) -> Vec<(&str, &str)> {
        let mut out = Vec::new();
        for (w1, _) in &self.entries {
            for (w2, _) in &self.entries {
                if w1.len() < w2.len() && w2.starts_with(w1.as_str()) {
                    out.push((w1.as_str(), w2.as_str()));
                }
            }
        }
        out
    }
}
