//! A counting-trie probability estimator for words, with a dummy-node
//! variant whose estimates are unbiased and consistent, plus a Bayesian
//! noisy-channel corrector for SMS-style text and a simulation harness
//! that verifies the estimator's convergence empirically.
//!
//! The narrative guide lives in `book/`; start with the
//! [`trie`] module for the core data structure.
//!
//! ```
//! use trienorm::trie::{CountingTrie, Mode};
//!
//! let mut trie = CountingTrie::new(Mode::Baseline);
//! for w in ["bill", "bird", "bills", "bell", "fox", "fish", "face", "fact"] {
//!     trie.train(w).unwrap();
//! }
//! assert_eq!(trie.probability("bird").unwrap(), 0.125);
//! assert!(trie.contains("bill"));
//! assert!(!trie.contains("bi"));
//! ```

pub mod bigram;
pub mod channel;
pub mod cli;
pub mod corpus;
pub mod edits;
pub mod error;
pub mod rank;
pub mod sim;
pub mod trie;

pub use error::{Error, Result};

/// Default phonetic substitution table shipped with the crate.
pub const DEFAULT_PHONETIC_TABLE: &str = include_str!("../data/phonetic.txt");
