//! Randomized structural invariants for the trie, the probability measure,
//! and the candidate generators.

mod common;

use std::collections::BTreeSet;

use num_rational::BigRational;
use num_traits::One;
use proptest::prelude::*;

use trienorm::bigram::{BigramModel, Gamma};
use trienorm::edits::edits1;
use trienorm::trie::{CountingTrie, Mode};

fn word() -> impl Strategy<Value = String> {
    "[a-z]{1,8}"
}

fn words() -> impl Strategy<Value = Vec<String>> {
    prop::collection::vec(word(), 1..12)
}

fn has_prefix_pair(words: &[String]) -> bool {
    let distinct: BTreeSet<&String> = words.iter().collect();
    distinct.iter().any(|w| {
        distinct
            .iter()
            .any(|v| v.len() > w.len() && v.starts_with(w.as_str()))
    })
}

/// Parsed serialized node: (depth, is_dummy, count, end_of_word).
fn parse_nodes(serialized: &str) -> Vec<(usize, bool, u64, bool)> {
    serialized
        .lines()
        .skip(1)
        .map(|line| {
            let f: Vec<&str> = line.split(' ').collect();
            (
                f[0].parse().unwrap(),
                f[1] == "#DUMMY#",
                f[2].parse().unwrap(),
                f[3] == "1",
            )
        })
        .collect()
}

/// Sum of the direct children's counts for every node, aligned by index.
/// Index 0 stands for the root.
fn child_sums(nodes: &[(usize, bool, u64, bool)]) -> Vec<u64> {
    let mut sums = vec![0u64; nodes.len() + 1];
    // stack[d] = index (1-based into sums) of the last node seen at depth d
    let mut stack = vec![0usize];
    for (i, (depth, _, count, _)) in nodes.iter().enumerate() {
        stack.truncate(*depth);
        sums[stack[depth - 1]] += count;
        stack.push(i + 1);
    }
    sums
}

proptest! {
    #[test]
    fn root_count_equals_train_calls_and_counts_sum_to_path_lengths(ws in words()) {
        let mut trie = CountingTrie::new(Mode::Improved);
        for w in &ws {
            trie.train(w).unwrap();
        }
        prop_assert_eq!(trie.root_count(), ws.len() as u64);
        let nodes = parse_nodes(&trie.serialize());
        let non_dummy_total: u64 = nodes
            .iter()
            .filter(|(_, dummy, _, _)| !dummy)
            .map(|(_, _, c, _)| c)
            .sum();
        let path_total: u64 = ws.iter().map(|w| w.len() as u64).sum();
        prop_assert_eq!(non_dummy_total, path_total);
    }

    #[test]
    fn counts_are_conserved_down_the_tree(ws in words(), mode_improved in any::<bool>()) {
        let mode = if mode_improved { Mode::Improved } else { Mode::Baseline };
        let mut trie = CountingTrie::new(mode);
        // Two passes so every prefix word gets its dummy in improved mode.
        for w in ws.iter().chain(ws.iter()) {
            trie.train(w).unwrap();
        }
        let nodes = parse_nodes(&trie.serialize());
        let sums = child_sums(&nodes);
        prop_assert_eq!(sums[0], trie.root_count());
        for (i, (_, _, count, eow)) in nodes.iter().enumerate() {
            let children = sums[i + 1];
            if children == 0 {
                continue;
            }
            prop_assert!(*count >= children);
            if !eow {
                // Only word endings retain mass at the node itself.
                prop_assert_eq!(*count, children);
            }
        }
    }

    #[test]
    fn trained_words_form_an_exact_probability_measure(ws in words()) {
        let mut trie = CountingTrie::new(Mode::Improved);
        for w in ws.iter().chain(ws.iter()) {
            trie.train(w).unwrap();
        }
        prop_assert!(trie.all_dummies_present());
        let distinct: BTreeSet<&String> = ws.iter().collect();
        let total: BigRational = distinct
            .iter()
            .map(|w| trie.probability_exact(w).unwrap())
            .sum();
        prop_assert_eq!(total, BigRational::one());
    }

    #[test]
    fn prefix_pairs_break_the_measure_without_dummies(
        mut ws in words(),
        stem in word(),
        ext in "[a-z]{1,4}",
    ) {
        // Random word lists rarely contain prefix pairs; plant one.
        ws.push(stem.clone());
        ws.push(format!("{stem}{ext}"));
        prop_assert!(has_prefix_pair(&ws));
        let mut trie = CountingTrie::new(Mode::Baseline);
        for w in ws.iter().chain(ws.iter()) {
            trie.train(w).unwrap();
        }
        let distinct: BTreeSet<&String> = ws.iter().collect();
        let total: BigRational = distinct
            .iter()
            .map(|w| trie.probability_exact(w).unwrap())
            .sum();
        prop_assert!(total > BigRational::one());
    }

    #[test]
    fn prefix_free_corpora_make_the_modes_agree(ws in words()) {
        prop_assume!(!has_prefix_pair(&ws));
        let mut improved = CountingTrie::new(Mode::Improved);
        let mut baseline = CountingTrie::new(Mode::Baseline);
        for w in &ws {
            improved.train(w).unwrap();
            baseline.train(w).unwrap();
        }
        prop_assert_eq!(improved.dummy_count(), 0);
        for w in &ws {
            prop_assert_eq!(
                improved.probability_exact(w).unwrap(),
                baseline.probability_exact(w).unwrap()
            );
        }
    }

    #[test]
    fn serialization_round_trips_bit_for_bit(ws in words(), mode_improved in any::<bool>()) {
        let mode = if mode_improved { Mode::Improved } else { Mode::Baseline };
        let mut trie = CountingTrie::new(mode);
        for w in ws.iter().chain(ws.iter()) {
            trie.train(w).unwrap();
        }
        let text = trie.serialize();
        let restored = CountingTrie::deserialize(&text).unwrap();
        prop_assert_eq!(restored.serialize(), text);
        prop_assert_eq!(restored.root_count(), trie.root_count());
        for w in &ws {
            prop_assert_eq!(
                restored.probability_exact(w).unwrap(),
                trie.probability_exact(w).unwrap()
            );
        }
    }

    #[test]
    fn probabilities_stay_in_the_unit_interval(ws in words(), query in word()) {
        let mut trie = CountingTrie::new(Mode::Improved);
        for w in &ws {
            trie.train(w).unwrap();
        }
        let p = trie.probability(&query).unwrap();
        prop_assert!((0.0..=1.0).contains(&p));
        if !trie.contains(&query) {
            prop_assert_eq!(p, 0.0);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn single_edit_candidates_match_the_distance_oracle(token in "[a-z]{1,3}") {
        let got: BTreeSet<String> =
            edits1(&token).unwrap().into_iter().map(|c| c.word).collect();
        let (want, _) = common::within_two(&token);
        prop_assert_eq!(got, want);
    }

    #[test]
    fn beam_candidates_are_at_distance_exactly_two(token in "[a-z]{1,3}") {
        let first = edits1(&token).unwrap();
        let bigram = BigramModel::uniform();
        let beam = trienorm::edits::expand_beam(&token, &first, &bigram, Gamma::Fixed(0.0));
        for cand in &beam {
            prop_assert_eq!(common::dl(&cand.word, &token), 2, "word {}", cand.word);
        }
    }
}
