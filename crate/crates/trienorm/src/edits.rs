//! Candidate generation: single-edit neighbors, phonetic rewrites, and the
//! bigram-pruned expansion to distance two.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::bigram::{BigramModel, Gamma};
use crate::error::{Error, Result};
use crate::trie::normalize_word;

/// The five error classes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum EditKind {
    Insertion,
    Deletion,
    Replacement,
    Swap,
    Phonetic,
}

impl EditKind {
    pub fn as_str(self) -> &'static str {
        match self {
            EditKind::Insertion => "insertion",
            EditKind::Deletion => "deletion",
            EditKind::Replacement => "replacement",
            EditKind::Swap => "swap",
            EditKind::Phonetic => "phonetic",
        }
    }
}

impl std::str::FromStr for EditKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "insertion" => Ok(EditKind::Insertion),
            "deletion" => Ok(EditKind::Deletion),
            "replacement" => Ok(EditKind::Replacement),
            "swap" => Ok(EditKind::Swap),
            "phonetic" => Ok(EditKind::Phonetic),
            other => Err(Error::UnknownEditType(other.to_string())),
        }
    }
}

/// One recorded edit: what changed and where.
#[derive(Debug, Clone, Serialize)]
pub struct EditRecord {
    pub kind: EditKind,
    pub position: usize,
    pub from: String,
    pub to: String,
}

/// A candidate correction with its edit history.
#[derive(Debug, Clone, Serialize)]
pub struct EditCandidate {
    pub word: String,
    pub edits: Vec<EditRecord>,
    pub dl_distance: u8,
}

const LETTERS: std::ops::RangeInclusive<u8> = b'a'..=b'z';

/// All distinct strings at Damerau-Levenshtein distance exactly one from
/// `token`: deletions, adjacent transpositions, replacements, insertions.
/// The original token and the empty string are excluded.
pub fn edits1(token: &str) -> Result<Vec<EditCandidate>> {
    let bytes = normalize_word(token)?;
    let token: String = bytes.iter().map(|&b| b as char).collect();
    let mut out: BTreeMap<String, EditCandidate> = BTreeMap::new();
    let mut push = |word: String, record: EditRecord| {
        if word.is_empty() || word == token {
            return;
        }
        out.entry(word.clone()).or_insert(EditCandidate {
            word,
            edits: vec![record],
            dl_distance: 1,
        });
    };

    for i in 0..bytes.len() {
        // The user *inserted* bytes[i]; deleting it recovers the target.
        let mut w = bytes.clone();
        let removed = w.remove(i);
        push(
            String::from_utf8(w).unwrap(),
            EditRecord {
                kind: EditKind::Insertion,
                position: i,
                from: (removed as char).to_string(),
                to: String::new(),
            },
        );
    }
    for i in 0..bytes.len().saturating_sub(1) {
        if bytes[i] != bytes[i + 1] {
            let mut w = bytes.clone();
            w.swap(i, i + 1);
            push(
                String::from_utf8(w).unwrap(),
                EditRecord {
                    kind: EditKind::Swap,
                    position: i,
                    from: format!("{}{}", bytes[i] as char, bytes[i + 1] as char),
                    to: format!("{}{}", bytes[i + 1] as char, bytes[i] as char),
                },
            );
        }
    }
    for i in 0..bytes.len() {
        for c in LETTERS {
            if c != bytes[i] {
                let mut w = bytes.clone();
                w[i] = c;
                push(
                    String::from_utf8(w).unwrap(),
                    EditRecord {
                        kind: EditKind::Replacement,
                        position: i,
                        from: (bytes[i] as char).to_string(),
                        to: (c as char).to_string(),
                    },
                );
            }
        }
    }
    for i in 0..=bytes.len() {
        for c in LETTERS {
            // The user *deleted* c here; re-inserting it recovers the target.
            let mut w = bytes.clone();
            w.insert(i, c);
            push(
                String::from_utf8(w).unwrap(),
                EditRecord {
                    kind: EditKind::Deletion,
                    position: i,
                    from: String::new(),
                    to: (c as char).to_string(),
                },
            );
        }
    }
    Ok(out.into_values().collect())
}

/// Phonetic substitution table: each key substring may be rewritten to any
/// of its expansions.
#[derive(Debug, Clone, Default)]
pub struct PhoneticTable {
    entries: Vec<(String, Vec<String>)>,
}

impl PhoneticTable {
    /// Parses lines of the form `key=exp1|exp2`; `#` lines are comments.
    pub fn parse(text: &str) -> Result<Self> {
        let mut entries = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, exps) = line.split_once('=').ok_or_else(|| {
                Error::Config(format!("phonetic table line {}: missing '='", idx + 1))
            })?;
            let expansions: Vec<String> = exps
                .split('|')
                .map(|e| e.trim().to_lowercase())
                .filter(|e| !e.is_empty())
                .collect();
            if key.trim().is_empty() || expansions.is_empty() {
                return Err(Error::Config(format!(
                    "phonetic table line {}: empty key or expansion",
                    idx + 1
                )));
            }
            entries.push((key.trim().to_lowercase(), expansions));
        }
        Ok(PhoneticTable { entries })
    }

    pub fn entries(&self) -> &[(String, Vec<String>)] {
        &self.entries
    }

    pub fn expansions_of(&self, key: &str) -> Option<&[String]> {
        self.entries
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, e)| e.as_slice())
    }
}

/// For every occurrence of a table key inside `token`, emits the token with
/// that occurrence replaced by each expansion. Applied once per occurrence,
/// never recursively.
pub fn phonetic_variants(token: &str, table: &PhoneticTable) -> Vec<EditCandidate> {
    let token = token.to_lowercase();
    let mut out: BTreeMap<String, EditCandidate> = BTreeMap::new();
    for (key, expansions) in &table.entries {
        for (pos, _) in token.match_indices(key.as_str()) {
            for exp in expansions {
                let mut word = String::with_capacity(token.len() + exp.len());
                word.push_str(&token[..pos]);
                word.push_str(exp);
                word.push_str(&token[pos + key.len()..]);
                if word.is_empty() || word == token {
                    continue;
                }
                out.entry(word.clone()).or_insert(EditCandidate {
                    word,
                    edits: vec![EditRecord {
                        kind: EditKind::Phonetic,
                        position: pos,
                        from: key.clone(),
                        to: exp.clone(),
                    }],
                    dl_distance: 1,
                });
            }
        }
    }
    out.into_values().collect()
}

/// Expands distance-1 candidates whose bigram score clears the threshold by
/// one more edit. Results exclude the original token, every input string,
/// and carry their two-edit history.
pub fn expand_beam(
    token: &str,
    candidates: &[EditCandidate],
    bigram: &BigramModel,
    gamma: Gamma,
) -> Vec<EditCandidate> {
    let token = token.to_lowercase();
    let excluded: std::collections::BTreeSet<&str> =
        candidates.iter().map(|c| c.word.as_str()).collect();
    let mut out: BTreeMap<String, EditCandidate> = BTreeMap::new();
    for cand in candidates {
        let score = match bigram.score(&cand.word) {
            Ok(s) => s,
            Err(_) => continue, // out-of-alphabet intermediate, e.g. leftover digit
        };
        if score <= gamma.threshold(cand.word.len()) {
            continue;
        }
        let second = match edits1(&cand.word) {
            Ok(s) => s,
            Err(_) => continue,
        };
        for next in second {
            if next.word == token || excluded.contains(next.word.as_str()) {
                continue;
            }
            let mut edits = cand.edits.clone();
            edits.extend(next.edits);
            out.entry(next.word.clone()).or_insert(EditCandidate {
                word: next.word,
                edits,
                dl_distance: 2,
            });
        }
    }
    out.into_values().collect()
}
