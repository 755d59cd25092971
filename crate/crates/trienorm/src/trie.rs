//! The counting trie.
//!
//! Every training insertion increments a per-node counter along the word's
//! path. The probability of a word is the product, over its path, of
//! child-selection probabilities `count(child) / sum(count of all children)`.
//!
//! In [`Mode::Improved`] a childless *dummy* node is maintained under any
//! end-of-word node that also has real children. The dummy absorbs the
//! probability mass of the word ending there, so a prefix word ("bill") and
//! its extension ("bills") receive distinct probabilities. [`Mode::Baseline`]
//! never creates dummies and exhibits the classic defect: a prefix word and
//! its extension always score the same.
//!
//! ```
//! use trienorm::trie::{CountingTrie, Mode};
//!
//! let mut trie = CountingTrie::new(Mode::Improved);
//! for w in ["bill", "bill", "bill", "bills", "bill"] {
//!     trie.train(w).unwrap();
//! }
//! assert_eq!(trie.probability("bill").unwrap(), 0.8);
//! assert_eq!(trie.probability("bills").unwrap(), 0.2);
//! ```

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};

/// Marker used for dummy nodes in the serialized form.
pub const DUMMY_MARKER: &str = "#DUMMY#";

/// Child key: a lowercase letter, or the reserved dummy slot.
/// `Dummy` sorts after all letters, which fixes the serialization order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Key {
    Letter(u8),
    Dummy,
}

impl fmt::Display for Key {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Key::Letter(b) => write!(f, "{}", *b as char),
            Key::Dummy => f.write_str(DUMMY_MARKER),
        }
    }
}

/// Training/scoring behavior.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    /// Dummy-node variant: probabilities converge to occurrence probabilities.
    Improved,
    /// Prior-work variant without dummy nodes.
    Baseline,
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Improved => "improved",
            Mode::Baseline => "baseline",
        }
    }
}

impl std::str::FromStr for Mode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "improved" => Ok(Mode::Improved),
            "baseline" => Ok(Mode::Baseline),
            other => Err(Error::Config(format!(
                "unknown mode {other:?} (expected improved|baseline)"
            ))),
        }
    }
}

/// One character position in the trie.
#[derive(Debug, Clone, Default)]
struct TrieNode {
    children: BTreeMap<Key, TrieNode>,
    count: u64,
    end_of_word: bool,
    is_dummy: bool,
}

impl TrieNode {
    fn non_dummy_children(&self) -> impl Iterator<Item = (&Key, &TrieNode)> {
        self.children.iter().filter(|(k, _)| **k != Key::Dummy)
    }

    fn child_count_sum(&self) -> u64 {
        self.children.values().map(|c| c.count).sum()
    }
}

/// The estimator object: a synthetic character-less root plus a mode switch.
#[derive(Debug, Clone)]
pub struct CountingTrie {
    root: TrieNode,
    mode: Mode,
}

/// Lowercases and validates a word against the a-z alphabet.
pub fn normalize_word(word: &str) -> Result<Vec<u8>> {
    if word.is_empty() {
        return Err(Error::EmptyWord);
    }
    let mut out = Vec::with_capacity(word.len());
    for ch in word.chars() {
        let lower = ch.to_ascii_lowercase();
        if lower.is_ascii_lowercase() {
            out.push(lower as u8);
        } else {
            return Err(Error::OutOfAlphabet {
                word: word.to_string(),
                ch,
            });
        }
    }
    Ok(out)
}

impl CountingTrie {
    pub fn new(mode: Mode) -> Self {
        CountingTrie {
            root: TrieNode::default(),
            mode,
        }
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    /// Total number of training calls.
    pub fn root_count(&self) -> u64 {
        self.root.count
    }

    /// Inserts one occurrence of `word`.
    ///
    /// Counters along the path are incremented and the final node is marked
    /// end-of-word. In improved mode the dummy bookkeeping then runs: an
    /// existing dummy at the final node is incremented; otherwise, if the
    /// insertion created no new node and the final node has a real child, a
    /// dummy is created holding the parent count minus all sibling counts.
    pub fn train(&mut self, word: &str) -> Result<()> {
        let bytes = normalize_word(word)?;
        self.root.count += 1;
        let mut node = &mut self.root;
        let mut created_new_node = false;
        for &b in &bytes {
            let child = node.children.entry(Key::Letter(b)).or_insert_with(|| {
                created_new_node = true;
                TrieNode::default()
            });
            child.count += 1;
            node = child;
        }
        node.end_of_word = true;
        if self.mode == Mode::Improved {
            if let Some(dummy) = node.children.get_mut(&Key::Dummy) {
                dummy.count += 1;
            } else if !created_new_node && node.non_dummy_children().next().is_some() {
                // Parent count already includes the current insertion, so the
                // dummy starts at the number of insertions of the prefix word.
                let siblings: u64 = node.non_dummy_children().map(|(_, c)| c.count).sum();
                let count = node.count - siblings;
                node.children.insert(
                    Key::Dummy,
                    TrieNode {
                        count,
                        is_dummy: true,
                        ..TrieNode::default()
                    },
                );
            }
        }
        Ok(())
    }

    /// Word probability as an exact rational product of count ratios.
    ///
    /// Returns 0 if the path is missing or the final node is not end-of-word.
    /// At an end-of-word node that owns a dummy child, the dummy's selection
    /// probability is the last factor.
    pub fn probability_exact(&self, word: &str) -> Result<BigRational> {
        let bytes = normalize_word(word)?;
        let zero = BigRational::zero();
        let mut node = &self.root;
        let mut probab = BigRational::one();
        for &b in &bytes {
            let total = node.child_count_sum();
            let child = match node.children.get(&Key::Letter(b)) {
                Some(c) => c,
                None => return Ok(zero),
            };
            probab *= BigRational::new(BigInt::from(child.count), BigInt::from(total));
            node = child;
        }
        if !node.end_of_word {
            return Ok(zero);
        }
        if let Some(dummy) = node.children.get(&Key::Dummy) {
            let total = node.child_count_sum();
            probab *= BigRational::new(BigInt::from(dummy.count), BigInt::from(total));
        }
        Ok(probab)
    }

    /// Word probability rendered to floating point.
    pub fn probability(&self, word: &str) -> Result<f64> {
        Ok(rational_to_f64(&self.probability_exact(word)?))
    }

    /// True iff the path exists and ends at an end-of-word node.
    /// Out-of-alphabet input yields `false`.
    pub fn contains(&self, word: &str) -> bool {
        let bytes = match normalize_word(word) {
            Ok(b) => b,
            Err(_) => return false,
        };
        let mut node = &self.root;
        for &b in &bytes {
            match node.children.get(&Key::Letter(b)) {
                Some(c) => node = c,
                None => return false,
            }
        }
        node.end_of_word
    }

    /// Number of nodes, excluding the synthetic root.
    pub fn node_count(&self) -> usize {
        fn walk(node: &TrieNode) -> usize {
            node.children.values().map(|c| 1 + walk(c)).sum()
        }
        walk(&self.root)
    }

    /// Number of dummy nodes.
    pub fn dummy_count(&self) -> usize {
        fn walk(node: &TrieNode) -> usize {
            node.children
                .iter()
                .map(|(k, c)| usize::from(*k == Key::Dummy) + walk(c))
                .sum()
        }
        walk(&self.root)
    }

    /// True iff every end-of-word node that has a real child also has a dummy.
    /// Once this holds, improved-mode probabilities of the stored words sum
    /// to exactly one.
    pub fn all_dummies_present(&self) -> bool {
        fn walk(node: &TrieNode) -> bool {
            let needs_dummy = node.end_of_word && node.non_dummy_children().next().is_some();
            if needs_dummy && !node.children.contains_key(&Key::Dummy) {
                return false;
            }
            node.children.values().all(walk)
        }
        walk(&self.root)
    }

    /// Versioned line-oriented text form; pre-order, letters before the dummy.
    pub fn serialize(&self) -> String {
        fn walk(node: &TrieNode, depth: usize, out: &mut String) {
            for (key, child) in &node.children {
                out.push_str(&format!(
                    "{} {} {} {}\n",
                    depth,
                    key,
                    child.count,
                    u8::from(child.end_of_word)
                ));
                walk(child, depth + 1, out);
            }
        }
        let mut out = format!("TRIE v1 mode={}\n", self.mode.as_str());
        walk(&self.root, 1, &mut out);
        out
    }

    /// Parses the [`serialize`](Self::serialize) form.
    pub fn deserialize(input: &str) -> Result<CountingTrie> {
        let fail = |offset: usize, reason: String| Error::Format { offset, reason };
        let mut offset = 0usize;
        let mut lines = input.split_inclusive('\n');

        let header = lines
            .next()
            .ok_or_else(|| fail(0, "missing header".into()))?;
        let mode = header
            .trim_end()
            .strip_prefix("TRIE v1 mode=")
            .ok_or_else(|| fail(0, format!("bad header {:?}", header.trim_end())))?
            .parse::<Mode>()
            .map_err(|_| fail(0, format!("bad mode in header {:?}", header.trim_end())))?;
        offset += header.len();

        let mut trie = CountingTrie::new(mode);
        // Stack of raw pointers would be unsafe; rebuild via a path of keys.
        let mut path: Vec<Key> = Vec::new();
        for line in lines {
            let line_offset = offset;
            offset += line.len();
            let trimmed = line.trim_end_matches('\n');
            if trimmed.is_empty() {
                continue;
            }
            let fields: Vec<&str> = trimmed.split(' ').collect();
            if fields.len() != 4 {
                return Err(fail(
                    line_offset,
                    format!("expected 4 fields, got {}", fields.len()),
                ));
            }
            let depth: usize = fields[0]
                .parse()
                .map_err(|_| fail(line_offset, "bad depth".into()))?;
            let key_str = fields[1];
            let key = if key_str == DUMMY_MARKER {
                Key::Dummy
            } else {
                let bytes = key_str.as_bytes();
                if bytes.len() == 1 && bytes[0].is_ascii_lowercase() {
                    Key::Letter(bytes[0])
                } else {
                    return Err(fail(line_offset, format!("bad character {key_str:?}")));
                }
            };
            let count: u64 = fields[2]
                .parse()
                .map_err(|_| fail(line_offset, "bad count".into()))?;
            let eow = match fields[3] {
                "0" => false,
                "1" => true,
                other => return Err(fail(line_offset, format!("bad eow flag {other:?}"))),
            };
            if depth == 0 || depth > path.len() + 1 {
                return Err(fail(
                    line_offset,
                    format!("depth {depth} does not follow depth {}", path.len()),
                ));
            }
            path.truncate(depth - 1);
            let mut node = &mut trie.root;
            for k in &path {
                node = node.children.get_mut(k).expect("path follows insertions");
            }
            if node.is_dummy {
                return Err(fail(line_offset, "dummy node cannot have children".into()));
            }
            node.children.insert(
                key,
                TrieNode {
                    count,
                    end_of_word: eow,
                    is_dummy: key == Key::Dummy,
                    ..TrieNode::default()
                },
            );
            path.push(key);
        }
        // Every insertion passes through exactly one child of the root.
        trie.root.count = trie.root.child_count_sum();
        Ok(trie)
    }
}

/// Exact-to-float rendering that survives magnitudes beyond f64 integer range.
pub fn rational_to_f64(r: &BigRational) -> f64 {
    use num_traits::ToPrimitive;
    if r.is_zero() {
        return 0.0;
    }
    // Scale the quotient to ~64 significant bits before converting.
    let numer = r.numer();
    let denom = r.denom();
    let shift = (denom.bits() as i64 + 64) - numer.bits() as i64;
    let scaled: BigInt = if shift >= 0 {
        (numer.clone() << shift as u64) / denom
    } else {
        (numer.clone() >> (-shift) as u64) / denom
    };
    scaled.to_f64().unwrap_or(f64::INFINITY) * 2f64.powi(-shift as i32)
}
