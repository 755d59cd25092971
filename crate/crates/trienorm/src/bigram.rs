//! Character bigram scoring used to prune the correction beam.
//!
//! A word `s1..sn` scores `prod C[s_i][s_{i+1}]`; candidates whose score
//! clears the threshold are expanded one more edit step.

use crate::corpus::CorpusModel;
use crate::error::{Error, Result};
use crate::trie::normalize_word;

const ALPHABET: usize = 26;
const SMOOTHING: f64 = 1e-6;

/// Row-stochastic 26x26 letter transition matrix; all entries positive.
#[derive(Debug, Clone)]
pub struct BigramModel {
    rows: [[f64; ALPHABET]; ALPHABET],
}

impl BigramModel {
    /// All transitions equally likely.
    pub fn uniform() -> Self {
        BigramModel {
            rows: [[1.0 / ALPHABET as f64; ALPHABET]; ALPHABET],
        }
    }

    /// Estimates transitions from a corpus, weighting each word's adjacent
    /// pairs by its occurrence probability, with add-one smoothing of
    /// `1e-6` mass per cell before row normalization.
    pub fn estimate(corpus: &CorpusModel) -> Self {
        let mut rows = [[SMOOTHING; ALPHABET]; ALPHABET];
        for (word, p) in corpus.entries() {
            let bytes = word.as_bytes();
            for pair in bytes.windows(2) {
                let i = (pair[0] - b'a') as usize;
                let j = (pair[1] - b'a') as usize;
                rows[i][j] += p;
            }
        }
        for row in &mut rows {
            let sum: f64 = row.iter().sum();
            for cell in row.iter_mut() {
                *cell /= sum;
            }
        }
        BigramModel { rows }
    }

    /// Transition probability from letter `from` to letter `to`.
    pub fn get(&self, from: char, to: char) -> f64 {
        self.rows[(from as u8 - b'a') as usize][(to as u8 - b'a') as usize]
    }

    /// Product of consecutive-pair transition probabilities; a length-1 word
    /// scores 1 (empty product).
    pub fn score(&self, word: &str) -> Result<f64> {
        let bytes = normalize_word(word)?;
        Ok(bytes
            .windows(2)
            .map(|p| self.rows[(p[0] - b'a') as usize][(p[1] - b'a') as usize])
            .product())
    }

    pub fn row_sum(&self, from: char) -> f64 {
        self.rows[(from as u8 - b'a') as usize].iter().sum()
    }
}

/// Beam threshold: either a fixed constant or a per-transition floor
/// `tau^(L-1)` for a candidate of length `L`.
#[derive(Debug, Clone, Copy)]
pub enum Gamma {
    Fixed(f64),
    PerTransition(f64),
}

impl Gamma {
    /// Default per-transition floor.
    pub const DEFAULT_TAU: f64 = 0.01;

    pub fn threshold(&self, word_len: usize) -> f64 {
        match *self {
            Gamma::Fixed(g) => g,
            Gamma::PerTransition(tau) => tau.powi(word_len.saturating_sub(1) as i32),
        }
    }
}

impl Default for Gamma {
    fn default() -> Self {
        Gamma::PerTransition(Self::DEFAULT_TAU)
    }
}

pub(crate) fn validate_gamma(g: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&g) {
        return Err(Error::Config(format!("gamma must lie in [0, 1], got {g}")));
    }
    Ok(())
}
