//! Simulation harness: trains tries by i.i.d. sampling from a corpus and
//! records convergence traces of the estimated word probabilities.
//!
//! Every run starts with one deterministic pass over the corpus (so each
//! word is trained at least once) followed by random sampling; the seeding
//! pass counts toward the training budget `n` and is recorded as the first
//! checkpoint.

use num_rational::BigRational;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::corpus::CorpusModel;
use crate::error::{Error, Result};
use crate::trie::{CountingTrie, Mode};

/// Probabilities of every corpus word observed at one training-step count.
#[derive(Debug, Clone, Serialize)]
pub struct Checkpoint {
    /// Total training calls made so far (seeding pass included).
    pub n: u64,
    pub p_hat: Vec<f64>,
}

/// One training trajectory.
#[derive(Debug, Clone, Serialize)]
pub struct ConvergenceTrace {
    pub words: Vec<String>,
    pub p_true: Vec<f64>,
    pub mode: String,
    pub seed: u64,
    pub checkpoints: Vec<Checkpoint>,
}

/// Cross-replicate mean and standard error per checkpoint.
#[derive(Debug, Clone, Serialize)]
pub struct EnsembleCheckpoint {
    pub n: u64,
    pub mean: Vec<f64>,
    pub standard_error: Vec<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct EnsembleTrace {
    pub words: Vec<String>,
    pub p_true: Vec<f64>,
    pub mode: String,
    pub seed: u64,
    pub replicates: usize,
    pub checkpoints: Vec<EnsembleCheckpoint>,
}

/// Paired improved/baseline run on an identical sample sequence.
#[derive(Debug)]
pub struct ModelComparison {
    pub improved: ConvergenceTrace,
    pub baseline: ConvergenceTrace,
    /// Sum of estimated probabilities over corpus words, per checkpoint.
    pub improved_sums: Vec<f64>,
    pub baseline_sums: Vec<f64>,
    /// Exact sums at the final checkpoint.
    pub improved_final_sum: BigRational,
    pub baseline_final_sum: BigRational,
    pub all_dummies_present: bool,
    /// Number of proper-prefix pairs in the corpus; 0 makes the comparison
    /// vacuous and is reported as a warning.
    pub prefix_pairs: usize,
    pub improved_trie: CountingTrie,
    pub baseline_trie: CountingTrie,
}

fn validate(corpus: &CorpusModel, n: u64, checkpoints: &[u64]) -> Result<()> {
    let seed_len = corpus.len() as u64;
    if n < seed_len {
        return Err(Error::Checkpoints(format!(
            "training budget n={n} is below the corpus size {seed_len}"
        )));
    }
    let mut prev = seed_len;
    for &c in checkpoints {
        if c < seed_len || c > n {
            return Err(Error::Checkpoints(format!(
                "checkpoint {c} outside [{seed_len}, {n}]"
            )));
        }
        if c < prev {
            return Err(Error::Checkpoints("checkpoints must be increasing".into()));
        }
        prev = c;
    }
    Ok(())
}

/// Log-spaced checkpoints between the seeding pass and `n`.
pub fn log_spaced_checkpoints(corpus_len: usize, n: u64, count: usize) -> Vec<u64> {
    let lo = corpus_len as f64;
    let hi = n as f64;
    let mut out: Vec<u64> = Vec::new();
    for i in 0..count.max(1) {
        let t = i as f64 / (count.max(2) - 1) as f64;
        let v = (lo.ln() + t * (hi.ln() - lo.ln())).exp().round() as u64;
        let v = v.clamp(corpus_len as u64, n);
        if out.last() != Some(&v) {
            out.push(v);
        }
    }
    if out.last() != Some(&n) {
        out.push(n);
    }
    out
}

/// The sample sequence for one run: corpus order first, then i.i.d. draws.
fn sample_sequence(corpus: &CorpusModel, n: u64, seed: u64) -> Vec<usize> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut seq: Vec<usize> = (0..corpus.len()).collect();
    let index_of: std::collections::HashMap<&str, usize> =
        corpus.words().enumerate().map(|(i, w)| (w, i)).collect();
    for _ in corpus.len() as u64..n {
        let w = corpus.sample_word(&mut rng);
        seq.push(index_of[w]);
    }
    seq
}

fn record(trie: &CountingTrie, corpus: &CorpusModel) -> Vec<f64> {
    corpus
        .words()
        .map(|w| trie.probability(w).expect("corpus words are valid"))
        .collect()
}

fn run_sequence(
    corpus: &CorpusModel,
    mode: Mode,
    seq: &[usize],
    checkpoints: &[u64],
    seed: u64,
) -> (CountingTrie, ConvergenceTrace) {
    let words: Vec<String> = corpus.words().map(str::to_string).collect();
    let mut trie = CountingTrie::new(mode);
    let mut trace = ConvergenceTrace {
        words: words.clone(),
        p_true: corpus.entries().iter().map(|(_, p)| *p).collect(),
        mode: mode.as_str().to_string(),
        seed,
        checkpoints: Vec::new(),
    };
    let mut next = checkpoints.iter().copied().peekable();
    for (step, &idx) in seq.iter().enumerate() {
        trie.train(&words[idx]).expect("corpus words are valid");
        let done = (step + 1) as u64;
        if done == corpus.len() as u64 {
            trace.checkpoints.push(Checkpoint {
                n: done,
                p_hat: record(&trie, corpus),
            });
        }
        while next.peek() == Some(&done) {
            next.next();
            if done != corpus.len() as u64 {
                trace.checkpoints.push(Checkpoint {
                    n: done,
                    p_hat: record(&trie, corpus),
                });
            }
        }
    }
    (trie, trace)
}

/// Trains one trie for `n` total calls, recording probabilities of every
/// corpus word at each checkpoint. Deterministic per seed.
pub fn run_training(
    corpus: &CorpusModel,
    mode: Mode,
    n: u64,
    checkpoints: &[u64],
    seed: u64,
) -> Result<(CountingTrie, ConvergenceTrace)> {
    validate(corpus, n, checkpoints)?;
    let seq = sample_sequence(corpus, n, seed);
    Ok(run_sequence(corpus, mode, &seq, checkpoints, seed))
}

/// `k` independent runs with derived seeds; per-checkpoint mean and standard
/// error across replicates.
pub fn run_replicates(
    corpus: &CorpusModel,
    mode: Mode,
    n: u64,
    k: usize,
    checkpoints: &[u64],
    seed: u64,
) -> Result<(EnsembleTrace, Vec<ConvergenceTrace>)> {
    if k == 0 {
        return Err(Error::Config("replicate count must be >= 1".into()));
    }
    validate(corpus, n, checkpoints)?;
    let mut seed_rng = ChaCha8Rng::seed_from_u64(seed);
    let traces: Vec<ConvergenceTrace> = (0..k)
        .map(|_| {
            let run_seed: u64 = seed_rng.gen();
            run_training(corpus, mode, n, checkpoints, run_seed).map(|(_, t)| t)
        })
        .collect::<Result<_>>()?;

    let n_checkpoints = traces[0].checkpoints.len();
    let n_words = corpus.len();
    let mut ensemble = EnsembleTrace {
        words: traces[0].words.clone(),
        p_true: traces[0].p_true.clone(),
        mode: mode.as_str().to_string(),
        seed,
        replicates: k,
        checkpoints: Vec::with_capacity(n_checkpoints),
    };
    for c in 0..n_checkpoints {
        let mut mean = vec![0.0; n_words];
        let mut se = vec![0.0; n_words];
        for t in &traces {
            for (w, v) in t.checkpoints[c].p_hat.iter().enumerate() {
                mean[w] += v;
            }
        }
        for m in &mut mean {
            *m /= k as f64;
        }
        if k > 1 {
            for t in &traces {
                for (w, v) in t.checkpoints[c].p_hat.iter().enumerate() {
                    se[w] += (v - mean[w]).powi(2);
                }
            }
            for s in &mut se {
                *s = (*s / (k as f64 - 1.0)).sqrt() / (k as f64).sqrt();
            }
        }
        ensemble.checkpoints.push(EnsembleCheckpoint {
            n: traces[0].checkpoints[c].n,
            mean,
            standard_error: se,
        });
    }
    Ok((ensemble, traces))
}

/// Trains improved and baseline tries on the identical sample sequence and
/// reports both traces plus the probability-sum series.
pub fn compare_models(
    corpus: &CorpusModel,
    n: u64,
    checkpoints: &[u64],
    seed: u64,
) -> Result<ModelComparison> {
    validate(corpus, n, checkpoints)?;
    let seq = sample_sequence(corpus, n, seed);
    let (improved_trie, improved) = run_sequence(corpus, Mode::Improved, &seq, checkpoints, seed);
    let (baseline_trie, baseline) = run_sequence(corpus, Mode::Baseline, &seq, checkpoints, seed);

    let sums = |t: &ConvergenceTrace| -> Vec<f64> {
        t.checkpoints.iter().map(|c| c.p_hat.iter().sum()).collect()
    };
    let exact_sum = |trie: &CountingTrie| -> BigRational {
        corpus.words().fold(BigRational::zero(), |acc, w| {
            acc + trie.probability_exact(w).expect("corpus words are valid")
        })
    };
    Ok(ModelComparison {
        improved_sums: sums(&improved),
        baseline_sums: sums(&baseline),
        improved_final_sum: exact_sum(&improved_trie),
        baseline_final_sum: exact_sum(&baseline_trie),
        all_dummies_present: improved_trie.all_dummies_present(),
        prefix_pairs: corpus.prefix_pairs().len(),
        improved,
        baseline,
        improved_trie,
        baseline_trie,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::One;

    fn uniform(words: &[&str]) -> CorpusModel {
        CorpusModel::uniform(words.iter().map(|w| w.to_string()).collect()).unwrap()
    }

    #[test]
    fn degenerate_corpus_is_exact_at_every_checkpoint() {
        let corpus = uniform(&["word"]);
        let (_, trace) = run_training(&corpus, Mode::Improved, 100, &[10, 50, 100], 1).unwrap();
        for cp in &trace.checkpoints {
            assert_eq!(cp.p_hat, vec![1.0]);
        }
    }

    #[test]
    fn traces_are_deterministic_per_seed() {
        let corpus = uniform(&["bill", "bird", "bell"]);
        let run = |seed| {
            run_training(&corpus, Mode::Improved, 500, &[100, 500], seed)
                .unwrap()
                .1
        };
        let a = run(9);
        let b = run(9);
        for (ca, cb) in a.checkpoints.iter().zip(&b.checkpoints) {
            assert_eq!(ca.n, cb.n);
            assert_eq!(ca.p_hat, cb.p_hat);
        }
        let c = run(10);
        assert_ne!(
            a.checkpoints.last().unwrap().p_hat,
            c.checkpoints.last().unwrap().p_hat
        );
    }

    #[test]
    fn seeding_pass_is_recorded_first() {
        let corpus = uniform(&["cat", "dog"]);
        let (_, trace) = run_training(&corpus, Mode::Baseline, 50, &[25, 50], 3).unwrap();
        assert_eq!(trace.checkpoints[0].n, 2);
        assert!(trace.checkpoints.windows(2).all(|w| w[0].n < w[1].n));
    }

    #[test]
    fn invalid_checkpoints_are_rejected() {
        let corpus = uniform(&["cat", "dog"]);
        assert!(run_training(&corpus, Mode::Improved, 50, &[60], 1).is_err());
        assert!(run_training(&corpus, Mode::Improved, 50, &[1], 1).is_err());
        assert!(run_training(&corpus, Mode::Improved, 50, &[30, 20], 1).is_err());
        assert!(run_training(&corpus, Mode::Improved, 1, &[], 1).is_err());
    }

    #[test]
    fn single_replicate_ensemble_matches_run_training() {
        let corpus = uniform(&["bill", "bird"]);
        let (ensemble, traces) =
            run_replicates(&corpus, Mode::Improved, 200, 1, &[100, 200], 7).unwrap();
        assert_eq!(traces.len(), 1);
        for (ec, tc) in ensemble.checkpoints.iter().zip(&traces[0].checkpoints) {
            assert_eq!(ec.mean, tc.p_hat);
            assert!(ec.standard_error.iter().all(|s| *s == 0.0));
        }
    }

    #[test]
    fn baseline_keeps_prefix_words_tied() {
        let corpus =
            CorpusModel::with_probabilities(vec!["bill".into(), "bills".into()], vec![0.75, 0.25])
                .unwrap();
        let (_, trace) = run_training(&corpus, Mode::Baseline, 2_000, &[500, 2_000], 11).unwrap();
        for cp in &trace.checkpoints {
            assert_eq!(cp.p_hat[0], cp.p_hat[1]);
        }
    }

    #[test]
    fn prefix_free_corpus_makes_the_modes_agree_exactly() {
        let corpus = uniform(&["bird", "bell", "fox", "fish"]);
        let cmp = compare_models(&corpus, 1_000, &[100, 1_000], 5).unwrap();
        assert_eq!(cmp.prefix_pairs, 0);
        assert_eq!(cmp.improved_trie.dummy_count(), 0);
        for (ci, cb) in cmp
            .improved
            .checkpoints
            .iter()
            .zip(&cmp.baseline.checkpoints)
        {
            assert_eq!(ci.p_hat, cb.p_hat);
        }
        assert_eq!(cmp.improved_final_sum, cmp.baseline_final_sum);
        assert_eq!(cmp.improved_final_sum, BigRational::one());
    }

    #[test]
    fn prefix_pair_corpus_separates_the_modes() {
        let corpus = CorpusModel::with_probabilities(
            vec!["bill".into(), "bills".into(), "car".into(), "cart".into()],
            vec![0.4, 0.1, 0.4, 0.1],
        )
        .unwrap();
        let cmp = compare_models(&corpus, 5_000, &[1_000, 5_000], 17).unwrap();
        assert_eq!(cmp.prefix_pairs, 2);
        assert!(cmp.all_dummies_present);
        assert!(cmp.baseline_final_sum > BigRational::one());
        assert_eq!(cmp.improved_final_sum, BigRational::one());
    }

    #[test]
    fn log_spaced_checkpoints_cover_the_range() {
        let cps = log_spaced_checkpoints(8, 50_000, 20);
        assert_eq!(*cps.first().unwrap(), 8);
        assert_eq!(*cps.last().unwrap(), 50_000);
        assert!(cps.windows(2).all(|w| w[0] < w[1]));
    }
}
