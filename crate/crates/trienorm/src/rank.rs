//! Bayesian ranking of correction candidates: score = P(token|word) * P(word),
//! with the trie probability as the prior.

use serde::Serialize;

use crate::bigram::{BigramModel, Gamma};
use crate::channel::ChannelModel;
use crate::edits::{
    edits1, expand_beam, phonetic_variants, EditCandidate, EditRecord, PhoneticTable,
};
use crate::error::{Error, Result};
use crate::trie::CountingTrie;

/// A ranked correction candidate.
#[derive(Debug, Clone, Serialize)]
pub struct Suggestion {
    pub word: String,
    pub prior: f64,
    pub likelihood: f64,
    pub score: f64,
    pub dl_distance: u8,
    pub edits: Vec<EditRecord>,
}

/// Everything the ranker needs besides the trie.
pub struct Ranker<'a> {
    pub channel: &'a ChannelModel,
    pub bigram: &'a BigramModel,
    pub phonetic: &'a PhoneticTable,
    pub gamma: Gamma,
}

impl Ranker<'_> {
    /// Top-`k` suggestions for `token`.
    ///
    /// An in-lexicon token is returned at rank 1 with its prior as score,
    /// still followed by alternatives. Otherwise candidates come from single
    /// edits, phonetic rewrites, and the bigram-pruned distance-2 beam,
    /// filtered to words stored in the trie and sorted by posterior score
    /// (ties broken lexicographically).
    pub fn rank_suggestions(
        &self,
        token: &str,
        trie: &CountingTrie,
        k: usize,
    ) -> Result<Vec<Suggestion>> {
        if token.is_empty() {
            return Err(Error::EmptyWord);
        }
        let token = token.to_lowercase();

        let mut candidates: Vec<EditCandidate> = Vec::new();
        // Tokens with out-of-alphabet characters (texting digits) only go
        // through the phonetic table; edit candidates require pure a-z.
        if let Ok(first) = edits1(&token) {
            candidates.extend(expand_beam(&token, &first, self.bigram, self.gamma));
            candidates.extend(first);
        }
        candidates.extend(phonetic_variants(&token, self.phonetic));

        let mut best: std::collections::BTreeMap<String, Suggestion> =
            std::collections::BTreeMap::new();
        for cand in candidates {
            if cand.word == token || !trie.contains(&cand.word) {
                continue;
            }
            let likelihood = self.channel.probability(&cand.edits)?;
            let prior = trie.probability(&cand.word)?;
            let score = likelihood * prior;
            let entry = Suggestion {
                word: cand.word.clone(),
                prior,
                likelihood,
                score,
                dl_distance: cand.dl_distance,
                edits: cand.edits,
            };
            match best.get(&cand.word) {
                Some(existing) if existing.score >= score => {}
                _ => {
                    best.insert(cand.word.clone(), entry);
                }
            }
        }

        let mut ranked: Vec<Suggestion> = best.into_values().collect();
        ranked.sort_by(|a, b| {
            b.score
                .partial_cmp(&a.score)
                .expect("scores are finite")
                .then_with(|| a.word.cmp(&b.word))
        });

        let mut out = Vec::with_capacity(k);
        if trie.contains(&token) {
            out.push(Suggestion {
                word: token.clone(),
                prior: trie.probability(&token)?,
                likelihood: 1.0,
                score: trie.probability(&token)?,
                dl_distance: 0,
                edits: Vec::new(),
            });
        }
        out.extend(ranked.into_iter().take(k.saturating_sub(out.len())));
        out.truncate(k);
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::trie::Mode;

    fn small_trie() -> CountingTrie {
        let mut trie = CountingTrie::new(Mode::Improved);
        for (word, times) in [("train", 8), ("than", 4), ("tan", 2), ("mate", 2)] {
            for _ in 0..times {
                trie.train(word).unwrap();
            }
        }
        trie
    }

    fn ranker<'a>(
        channel: &'a ChannelModel,
        bigram: &'a BigramModel,
        phonetic: &'a PhoneticTable,
    ) -> Ranker<'a> {
        Ranker {
            channel,
            bigram,
            phonetic,
            gamma: Gamma::Fixed(0.0),
        }
    }

    #[test]
    fn in_lexicon_tokens_pass_through_at_rank_one() {
        let trie = small_trie();
        let channel = ChannelModel::uniform();
        let bigram = BigramModel::uniform();
        let phonetic = PhoneticTable::default();
        let r = ranker(&channel, &bigram, &phonetic);
        let out = r.rank_suggestions("train", &trie, 5).unwrap();
        assert_eq!(out[0].word, "train");
        assert_eq!(out[0].dl_distance, 0);
        assert!((out[0].score - out[0].prior).abs() < 1e-15);
        assert!(out.len() > 1, "alternatives still follow");
    }

    #[test]
    fn corrections_are_ranked_by_posterior() {
        let trie = small_trie();
        let channel = ChannelModel::uniform();
        let bigram = BigramModel::uniform();
        let phonetic = PhoneticTable::default();
        let r = ranker(&channel, &bigram, &phonetic);
        let out = r.rank_suggestions("tran", &trie, 5).unwrap();
        let words: Vec<&str> = out.iter().map(|s| s.word.as_str()).collect();
        assert!(words.contains(&"train"));
        assert!(words.contains(&"than"));
        for pair in out.windows(2) {
            assert!(pair[0].score >= pair[1].score);
        }
        for s in &out {
            assert!((s.score - s.likelihood * s.prior).abs() < 1e-18);
        }
    }

    #[test]
    fn digit_tokens_go_through_the_phonetic_table_only() {
        let trie = small_trie();
        let channel = ChannelModel::uniform();
        let bigram = BigramModel::uniform();
        let phonetic = PhoneticTable::parse("8=ate|eight\n").unwrap();
        let r = ranker(&channel, &bigram, &phonetic);
        let out = r.rank_suggestions("m8", &trie, 5).unwrap();
        assert_eq!(out.len(), 1);
        assert_eq!(out[0].word, "mate");
        assert_eq!(out[0].edits[0].kind, crate::edits::EditKind::Phonetic);
    }

    #[test]
    fn unknown_tokens_with_no_candidates_yield_an_empty_list() {
        let trie = small_trie();
        let channel = ChannelModel::uniform();
        let bigram = BigramModel::uniform();
        let phonetic = PhoneticTable::default();
        let r = ranker(&channel, &bigram, &phonetic);
        let out = r.rank_suggestions("zzzzzzzzzz", &trie, 5).unwrap();
        assert!(out.is_empty());
    }

    #[test]
    fn ranking_is_deterministic() {
        let trie = small_trie();
        let channel = ChannelModel::uniform();
        let bigram = BigramModel::uniform();
        let phonetic = PhoneticTable::default();
        let r = ranker(&channel, &bigram, &phonetic);
        let a = r.rank_suggestions("tran", &trie, 10).unwrap();
        let b = r.rank_suggestions("tran", &trie, 10).unwrap();
        let words = |v: &[Suggestion]| v.iter().map(|s| s.word.clone()).collect::<Vec<_>>();
        assert_eq!(words(&a), words(&b));
    }

    #[test]
    fn scaling_base_probabilities_preserves_order() {
        // A common scale multiplies a d-edit likelihood by scale^d, so the
        // guarantee applies among candidates of equal edit count; "tran"
        // against this trie yields distance-1 candidates only.
        let trie = small_trie();
        let bigram = BigramModel::uniform();
        let phonetic = PhoneticTable::default();
        let uniform = ChannelModel::uniform();
        let mut scaled = ChannelModel::uniform();
        scaled.scale_base(3.5);
        let gamma = Gamma::Fixed(1.0); // no beam: keeps every candidate at one edit
        let order = |channel: &ChannelModel| -> Vec<String> {
            Ranker {
                channel,
                bigram: &bigram,
                phonetic: &phonetic,
                gamma,
            }
            .rank_suggestions("tran", &trie, 10)
            .unwrap()
            .into_iter()
            .map(|s| s.word)
            .collect()
        };
        assert_eq!(order(&uniform), order(&scaled));
    }
}
