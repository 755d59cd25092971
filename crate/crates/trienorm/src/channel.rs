//! The noisy channel: P(observed token | intended word).
//!
//! Each recorded edit contributes a per-type base probability times a
//! normalized confusion weight for the characters involved. Edit records
//! describe the user's error: `from` is what was typed, `to` what was meant.

use std::collections::HashMap;

use crate::edits::{EditKind, EditRecord};
use crate::error::{Error, Result};

const EDIT_KINDS: [EditKind; 5] = [
    EditKind::Insertion,
    EditKind::Deletion,
    EditKind::Replacement,
    EditKind::Swap,
    EditKind::Phonetic,
];

/// Per-edit-type base probabilities plus optional per-character confusion
/// weights for replacement, insertion, and deletion.
#[derive(Debug, Clone)]
pub struct ChannelModel {
    base: HashMap<EditKind, f64>,
    /// (kind, typed, meant) -> weight; unlisted pairs default to 1.
    confusion: HashMap<(EditKind, char, char), f64>,
}

impl Default for ChannelModel {
    fn default() -> Self {
        Self::uniform()
    }
}

impl ChannelModel {
    /// Uniform base probability per edit type (1/5 each) and uniform
    /// confusion weights.
    pub fn uniform() -> Self {
        ChannelModel {
            base: EDIT_KINDS.iter().map(|k| (*k, 0.2)).collect(),
            confusion: HashMap::new(),
        }
    }

    /// Overrides confusion weights from CSV lines `type,from,to,weight`.
    /// `from`/`to` are single characters, or `*` where the slot is unused
    /// (insertion uses only `from`, deletion only `to`).
    pub fn load_confusion(&mut self, text: &str) -> Result<()> {
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = line.split(',').map(str::trim).collect();
            if fields.len() != 4 {
                return Err(Error::Config(format!(
                    "confusion line {}: expected type,from,to,weight",
                    idx + 1
                )));
            }
            let kind: EditKind = fields[0].parse()?;
            let from = single_char(fields[1], idx)?;
            let to = single_char(fields[2], idx)?;
            let weight: f64 = fields[3]
                .parse()
                .map_err(|_| Error::Config(format!("confusion line {}: bad weight", idx + 1)))?;
            if weight < 0.0 || !weight.is_finite() {
                return Err(Error::Config(format!(
                    "confusion line {}: weight must be >= 0",
                    idx + 1
                )));
            }
            self.confusion.insert((kind, from, to), weight);
        }
        Ok(())
    }

    /// Scales every per-type base probability by a common constant. The
    /// posterior is unnormalized, so this cannot change any ordering.
    pub fn scale_base(&mut self, factor: f64) {
        for v in self.base.values_mut() {
            *v *= factor;
        }
    }

    fn weight(&self, kind: EditKind, from: char, to: char) -> f64 {
        *self.confusion.get(&(kind, from, to)).unwrap_or(&1.0)
    }

    /// Normalized confusion factor for one edit.
    fn confusion_factor(&self, edit: &EditRecord) -> Result<f64> {
        let letters = || ('a'..='z').collect::<Vec<char>>();
        match edit.kind {
            EditKind::Replacement => {
                let typed = first_char(edit, &edit.from)?;
                let meant = first_char(edit, &edit.to)?;
                let norm: f64 = letters()
                    .into_iter()
                    .filter(|c| *c != typed)
                    .map(|c| self.weight(EditKind::Replacement, typed, c))
                    .sum();
                Ok(checked_ratio(
                    self.weight(EditKind::Replacement, typed, meant),
                    norm,
                ))
            }
            EditKind::Insertion => {
                // Spurious character: recorded in `from`.
                let typed = first_char(edit, &edit.from)?;
                let norm: f64 = letters()
                    .into_iter()
                    .map(|c| self.weight(EditKind::Insertion, c, '*'))
                    .sum();
                Ok(checked_ratio(
                    self.weight(EditKind::Insertion, typed, '*'),
                    norm,
                ))
            }
            EditKind::Deletion => {
                // Missing character: recorded in `to`.
                let meant = first_char(edit, &edit.to)?;
                let norm: f64 = letters()
                    .into_iter()
                    .map(|c| self.weight(EditKind::Deletion, '*', c))
                    .sum();
                Ok(checked_ratio(
                    self.weight(EditKind::Deletion, '*', meant),
                    norm,
                ))
            }
            // The characters of a swap are fixed by the position, and a
            // phonetic rewrite is a whole-group substitution; no per-character
            // choice remains to spread mass over.
            EditKind::Swap | EditKind::Phonetic => Ok(1.0),
        }
    }

    /// Likelihood of a sequence of edits: the product of per-edit factors.
    pub fn probability(&self, edits: &[EditRecord]) -> Result<f64> {
        if edits.is_empty() {
            return Err(Error::Config("channel probability of zero edits".into()));
        }
        let mut p = 1.0;
        for edit in edits {
            let base = *self
                .base
                .get(&edit.kind)
                .ok_or_else(|| Error::UnknownEditType(edit.kind.as_str().into()))?;
            p *= base * self.confusion_factor(edit)?;
        }
        Ok(p)
    }
}

fn single_char(field: &str, idx: usize) -> Result<char> {
    let mut chars = field.chars();
    match (chars.next(), chars.next()) {
        (Some(c), None) => Ok(c),
        _ => Err(Error::Config(format!(
            "confusion line {}: expected a single character, got {field:?}",
            idx + 1
        ))),
    }
}

fn first_char(edit: &EditRecord, s: &str) -> Result<char> {
    s.chars().next().ok_or_else(|| {
        Error::Config(format!(
            "malformed {} edit record at position {}",
            edit.kind.as_str(),
            edit.position
        ))
    })
}

fn checked_ratio(num: f64, denom: f64) -> f64 {
    if denom > 0.0 {
        num / denom
    } else {
        0.0
    }
}
