//! Command-line entry point: `train`, `correct`, `simulate`, `compare`.
//!
//! Every parameter can come from a `key=value` config file (`--config`);
//! flags override the file, defaults fill the rest. The effective config is
//! echoed into output artifacts so each run is reproducible from them.
//!
//! Exit codes: 0 success, 1 statistical-check failure, 2 usage/IO error.

use std::collections::BTreeMap;
use std::io::{BufRead, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::bigram::{BigramModel, Gamma};
use crate::channel::ChannelModel;
use crate::corpus::{load_corpus, CorpusModel};
use crate::edits::PhoneticTable;
use crate::error::{Error, Result};
use crate::rank::Ranker;
use crate::sim;
use crate::trie::{CountingTrie, Mode};

const SEED_ENV: &str = "TRIE_NORM_SEED";

#[derive(Parser)]
#[command(
    name = "trienorm",
    version,
    about = "Counting-trie word probability estimation and noisy-channel text correction"
)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Train a trie from a corpus and persist it.
    Train(TrainArgs),
    /// Suggest corrections for tokens (or run a REPL on stdin).
    Correct(CorrectArgs),
    /// Run a convergence simulation and write trace files.
    Simulate(SimulateArgs),
    /// Train improved and baseline tries on one sample stream and compare.
    Compare(CompareArgs),
}

#[derive(Args)]
struct Common {
    /// key=value config file; flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Args)]
struct TrainArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long)]
    corpus: Option<PathBuf>,
    /// improved | baseline
    #[arg(long)]
    mode: Option<String>,
    /// Number of random training samples after the seeding pass.
    #[arg(long)]
    n: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    /// Zipf exponent used when the corpus file carries no probabilities.
    #[arg(long)]
    zipf_s: Option<f64>,
    /// Output path for the serialized trie.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CorrectArgs {
    #[command(flatten)]
    common: Common,
    /// Serialized trie file.
    #[arg(long)]
    trie: Option<PathBuf>,
    /// Corpus used to estimate the character bigram model.
    #[arg(long)]
    corpus: Option<PathBuf>,
    #[arg(long)]
    zipf_s: Option<f64>,
    #[arg(long)]
    topk: Option<usize>,
    /// Per-transition beam floor; the threshold for a word of length L is tau^(L-1).
    #[arg(long)]
    tau: Option<f64>,
    /// Fixed beam threshold; overrides --tau when given.
    #[arg(long)]
    gamma: Option<f64>,
    #[arg(long)]
    phonetic_table: Option<PathBuf>,
    /// Confusion-weight CSV: type,from,to,weight.
    #[arg(long)]
    confusion: Option<PathBuf>,
    /// Emit machine-readable JSON.
    #[arg(long)]
    json: bool,
    /// Tokens to correct; reads stdin line by line when empty.
    tokens: Vec<String>,
}

#[derive(Args)]
struct SimulateArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long)]
    corpus: Option<PathBuf>,
    #[arg(long)]
    mode: Option<String>,
    /// Total training budget, seeding pass included.
    #[arg(long)]
    n: Option<u64>,
    #[arg(long)]
    replicates: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Comma-separated training-step counts; default is log-spaced.
    #[arg(long)]
    checkpoints: Option<String>,
    #[arg(long)]
    zipf_s: Option<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Write the JSON variant (with ensemble statistics) instead of CSV.
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct CompareArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long)]
    corpus: Option<PathBuf>,
    #[arg(long)]
    n: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    checkpoints: Option<String>,
    #[arg(long)]
    zipf_s: Option<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    json: bool,
}

/// Parsed `key=value` config file.
struct FileConfig(BTreeMap<String, String>);

impl FileConfig {
    fn load(path: Option<&Path>) -> Result<Self> {
        let mut map = BTreeMap::new();
        if let Some(path) = path {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
            for (idx, raw) in text.lines().enumerate() {
                let line = raw.trim();
                if line.is_empty() || line.starts_with('#') {
                    continue;
                }
                let (k, v) = line.split_once('=').ok_or_else(|| {
                    Error::Config(format!("{} line {}: missing '='", path.display(), idx + 1))
                })?;
                map.insert(k.trim().to_string(), v.trim().to_string());
            }
        }
        Ok(FileConfig(map))
    }

    fn get<T: FromStr>(&self, key: &str) -> Result<Option<T>> {
        match self.0.get(key) {
            Some(v) => v
                .parse()
                .map(Some)
                .map_err(|_| Error::Config(format!("bad value for {key}: {v:?}"))),
            None => Ok(None),
        }
    }
}

fn seed_fallback() -> Result<Option<u64>> {
    match std::env::var(SEED_ENV) {
        Ok(v) => v
            .parse()
            .map(Some)
            .map_err(|_| Error::Config(format!("bad {SEED_ENV} value {v:?}"))),
        Err(_) => Ok(None),
    }
}

fn require<T>(value: Option<T>, name: &str) -> Result<T> {
    value.ok_or_else(|| Error::Config(format!("missing required parameter {name}")))
}

fn read_corpus(path: &Path, zipf_s: f64) -> Result<(CorpusModel, usize)> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Config(format!("cannot read corpus {}: {e}", path.display())))?;
    let loaded = load_corpus(&text)?;
    let dropped = loaded.dropped;
    Ok((CorpusModel::from_loaded(loaded, zipf_s)?, dropped))
}

fn parse_checkpoints(spec: Option<&str>, corpus_len: usize, n: u64) -> Result<Vec<u64>> {
    match spec {
        Some(list) => list
            .split(',')
            .map(|c| {
                c.trim()
                    .parse()
                    .map_err(|_| Error::Checkpoints(format!("bad checkpoint {c:?}")))
            })
            .collect(),
        None => Ok(sim::log_spaced_checkpoints(corpus_len, n, 20)),
    }
}

fn config_echo(entries: &[(&str, String)]) -> String {
    entries
        .iter()
        .map(|(k, v)| format!("# {k}={v}\n"))
        .collect()
}

fn config_json(entries: &[(&str, String)]) -> serde_json::Value {
    serde_json::Value::Object(
        entries
            .iter()
            .map(|(k, v)| (k.to_string(), serde_json::Value::String(v.clone())))
            .collect(),
    )
}

/// Runs the CLI; returns the process exit code.
pub fn run() -> i32 {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Train(args) => cmd_train(args),
        Command::Correct(args) => cmd_correct(args),
        Command::Simulate(args) => cmd_simulate(args),
        Command::Compare(args) => cmd_compare(args),
    };
    match outcome {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            2
        }
    }
}

fn cmd_train(args: TrainArgs) -> Result<i32> {
    let cfg = FileConfig::load(args.common.config.as_deref())?;
    let corpus_path = require(args.corpus.or(cfg.get::<PathBuf>("corpus")?), "--corpus")?;
    let mode: Mode = require(args.mode.or(cfg.get("mode")?), "--mode")
        .unwrap_or_else(|_| "improved".into())
        .parse()?;
    let n = args.n.or(cfg.get("n")?).unwrap_or(0);
    let seed = match args.seed.or(cfg.get("seed")?).or(seed_fallback()?) {
        Some(s) => s,
        None if n == 0 => 0,
        None => return Err(Error::Config("missing required parameter --seed".into())),
    };
    let zipf_s = args.zipf_s.or(cfg.get("zipf_s")?).unwrap_or(0.25);
    let out = require(args.out.or(cfg.get::<PathBuf>("out")?), "--out")?;

    let (corpus, dropped) = read_corpus(&corpus_path, zipf_s)?;
    if dropped > 0 {
        eprintln!("warning: dropped {dropped} out-of-alphabet corpus entries");
    }
    let mut trie = CountingTrie::new(mode);
    for word in corpus.words() {
        trie.train(word)?;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..n {
        let w = corpus.sample_word(&mut rng).to_string();
        trie.train(&w)?;
    }
    std::fs::write(&out, trie.serialize())?;
    println!(
        "trained {} words ({} samples after seeding): {} nodes, {} dummies, root count {}",
        corpus.len(),
        n,
        trie.node_count(),
        trie.dummy_count(),
        trie.root_count()
    );
    println!("trie written to {}", out.display());
    Ok(0)
}

fn cmd_correct(args: CorrectArgs) -> Result<i32> {
    let cfg = FileConfig::load(args.common.config.as_deref())?;
    let trie_path = require(args.trie.or(cfg.get::<PathBuf>("trie")?), "--trie")?;
    let corpus_path = require(args.corpus.or(cfg.get::<PathBuf>("corpus")?), "--corpus")?;
    let zipf_s = args.zipf_s.or(cfg.get("zipf_s")?).unwrap_or(0.25);
    let topk = args.topk.or(cfg.get("topk")?).unwrap_or(5);
    let tau = args.tau.or(cfg.get("tau")?).unwrap_or(Gamma::DEFAULT_TAU);
    let gamma = match args.gamma.or(cfg.get("gamma")?) {
        Some(g) => {
            crate::bigram::validate_gamma(g)?;
            Gamma::Fixed(g)
        }
        None => Gamma::PerTransition(tau),
    };

    let trie_text = std::fs::read_to_string(&trie_path)
        .map_err(|e| Error::Config(format!("cannot read trie {}: {e}", trie_path.display())))?;
    let trie = CountingTrie::deserialize(&trie_text)?;
    let (corpus, _) = read_corpus(&corpus_path, zipf_s)?;
    let bigram = BigramModel::estimate(&corpus);

    let phonetic = match args
        .phonetic_table
        .or(cfg.get::<PathBuf>("phonetic_table")?)
    {
        Some(p) => PhoneticTable::parse(&std::fs::read_to_string(&p)?)?,
        None => PhoneticTable::parse(crate::DEFAULT_PHONETIC_TABLE)?,
    };
    let mut channel = ChannelModel::uniform();
    if let Some(p) = args.confusion.or(cfg.get::<PathBuf>("confusion")?) {
        channel.load_confusion(&std::fs::read_to_string(&p)?)?;
    }
    let ranker = Ranker {
        channel: &channel,
        bigram: &bigram,
        phonetic: &phonetic,
        gamma,
    };

    let emit = |token: &str| -> Result<()> {
        let suggestions = ranker.rank_suggestions(token, &trie, topk)?;
        if args.json {
            let obj = serde_json::json!({ "token": token, "suggestions": suggestions });
            println!("{}", serde_json::to_string(&obj).expect("serializable"));
        } else if suggestions.is_empty() {
            println!("{token}: no suggestions");
        } else {
            println!("{token}:");
            for (rank, s) in suggestions.iter().enumerate() {
                println!(
                    "  {:>2}. {:<16} score={:.3e} prior={:.3e} likelihood={:.3e} distance={}",
                    rank + 1,
                    s.word,
                    s.score,
                    s.prior,
                    s.likelihood,
                    s.dl_distance
                );
            }
        }
        Ok(())
    };

    if args.tokens.is_empty() {
        let stdin = std::io::stdin();
        for line in stdin.lock().lines() {
            let line = line?;
            for token in line.split_whitespace() {
                emit(token)?;
            }
        }
    } else {
        for token in &args.tokens {
            emit(token)?;
        }
    }
    Ok(0)
}

fn write_trace_csv(out: &mut String, trace: &sim::ConvergenceTrace) {
    for cp in &trace.checkpoints {
        for (word, p_hat) in trace.words.iter().zip(&cp.p_hat) {
            let p_true = trace.p_true[trace.words.iter().position(|w| w == word).unwrap()];
            out.push_str(&format!(
                "{},{},{},{},{},{}\n",
                cp.n, word, p_hat, p_true, trace.mode, trace.seed
            ));
        }
    }
}

fn deviation_table(words: &[String], p_true: &[f64], p_hat: &[f64]) -> String {
    let mut out = String::from("word            p_true      p_hat       |dev|\n");
    for ((w, t), h) in words.iter().zip(p_true).zip(p_hat) {
        out.push_str(&format!(
            "{:<15} {:<11.6} {:<11.6} {:.6}\n",
            w,
            t,
            h,
            (t - h).abs()
        ));
    }
    out
}

fn cmd_simulate(args: SimulateArgs) -> Result<i32> {
    let cfg = FileConfig::load(args.common.config.as_deref())?;
    let corpus_path = require(args.corpus.or(cfg.get::<PathBuf>("corpus")?), "--corpus")?;
    let mode: Mode = args
        .mode
        .or(cfg.get("mode")?)
        .unwrap_or_else(|| "improved".into())
        .parse()?;
    let n = args.n.or(cfg.get("n")?).unwrap_or(50_000);
    let replicates = args.replicates.or(cfg.get("replicates")?).unwrap_or(1);
    let seed = require(
        args.seed.or(cfg.get("seed")?).or(seed_fallback()?),
        "--seed",
    )?;
    let zipf_s = args.zipf_s.or(cfg.get("zipf_s")?).unwrap_or(0.25);
    let checkpoint_spec = args.checkpoints.or(cfg.get("checkpoints")?);
    let out = require(args.out.or(cfg.get::<PathBuf>("out")?), "--out")?;

    let (corpus, _) = read_corpus(&corpus_path, zipf_s)?;
    let checkpoints = parse_checkpoints(checkpoint_spec.as_deref(), corpus.len(), n)?;

    let effective = vec![
        (
            "checkpoints",
            checkpoints
                .iter()
                .map(u64::to_string)
                .collect::<Vec<_>>()
                .join(","),
        ),
        ("command", "simulate".to_string()),
        ("corpus", corpus_path.display().to_string()),
        ("mode", mode.as_str().to_string()),
        ("n", n.to_string()),
        ("out", out.display().to_string()),
        ("replicates", replicates.to_string()),
        ("seed", seed.to_string()),
        ("zipf_s", zipf_s.to_string()),
    ];

    let (ensemble, traces) = sim::run_replicates(&corpus, mode, n, replicates, &checkpoints, seed)?;

    if args.json {
        let doc = serde_json::json!({
            "config": config_json(&effective),
            "ensemble": ensemble,
            "traces": traces,
        });
        std::fs::write(
            &out,
            serde_json::to_string_pretty(&doc).expect("serializable"),
        )?;
    } else {
        let mut body = config_echo(&effective);
        body.push_str("n,word,p_hat,p_true,mode,seed\n");
        for trace in &traces {
            write_trace_csv(&mut body, trace);
        }
        std::fs::write(&out, body)?;
    }
    println!("trace written to {}", out.display());

    let last = ensemble
        .checkpoints
        .last()
        .expect("at least one checkpoint");
    println!("final checkpoint (n = {}):", last.n);
    print!(
        "{}",
        deviation_table(&ensemble.words, &ensemble.p_true, &last.mean)
    );

    // Statistical checks: 3*SE per cell for ensembles (1% false-failure
    // allowance), 6-sigma binomial bound plus dummy-window slack for single
    // runs once n is large enough for the bound to be meaningful.
    let mut ok = true;
    if replicates > 1 {
        // The deterministic seeding pass dominates small-n checkpoints:
        // replicates are nearly identical there (SE ~ 0) while the mean
        // still carries the seeding counts, so the CLT band only applies
        // once random samples outweigh the pass.
        let min_n = 25 * corpus.len() as u64;
        let checked: Vec<_> = ensemble
            .checkpoints
            .iter()
            .filter(|cp| cp.n >= min_n)
            .collect();
        let cells = checked.len() * ensemble.words.len();
        let allowed = (cells as f64 * 0.01).ceil() as usize;
        let mut failures = 0usize;
        for cp in &checked {
            for ((m, se), t) in cp.mean.iter().zip(&cp.standard_error).zip(&ensemble.p_true) {
                if (m - t).abs() > 3.0 * se.max(1e-12) {
                    failures += 1;
                }
            }
        }
        println!(
            "3*SE check over checkpoints with n >= {min_n}: {failures} of {cells} cells exceed (allowed {allowed})"
        );
        ok = failures <= allowed;
    } else if n >= 10_000 {
        for ((h, t), w) in last.mean.iter().zip(&ensemble.p_true).zip(&ensemble.words) {
            let bound = 6.0 * (t * (1.0 - t) / n as f64).sqrt() + 1.0 / n as f64;
            if (h - t).abs() > bound {
                println!("deviation bound exceeded for {w}: |{h} - {t}| > {bound}");
                ok = false;
            }
        }
        if ok {
            println!("6-sigma deviation bound holds for all words");
        }
    }
    Ok(if ok { 0 } else { 1 })
}

fn cmd_compare(args: CompareArgs) -> Result<i32> {
    let cfg = FileConfig::load(args.common.config.as_deref())?;
    let corpus_path = require(args.corpus.or(cfg.get::<PathBuf>("corpus")?), "--corpus")?;
    let n = args.n.or(cfg.get("n")?).unwrap_or(50_000);
    let seed = require(
        args.seed.or(cfg.get("seed")?).or(seed_fallback()?),
        "--seed",
    )?;
    let zipf_s = args.zipf_s.or(cfg.get("zipf_s")?).unwrap_or(0.25);
    let checkpoint_spec = args.checkpoints.or(cfg.get("checkpoints")?);
    let out = require(args.out.or(cfg.get::<PathBuf>("out")?), "--out")?;

    let (corpus, _) = read_corpus(&corpus_path, zipf_s)?;
    let checkpoints = parse_checkpoints(checkpoint_spec.as_deref(), corpus.len(), n)?;

    let effective = vec![
        (
            "checkpoints",
            checkpoints
                .iter()
                .map(u64::to_string)
                .collect::<Vec<_>>()
                .join(","),
        ),
        ("command", "compare".to_string()),
        ("corpus", corpus_path.display().to_string()),
        ("n", n.to_string()),
        ("out", out.display().to_string()),
        ("seed", seed.to_string()),
        ("zipf_s", zipf_s.to_string()),
    ];

    let cmp = sim::compare_models(&corpus, n, &checkpoints, seed)?;
    if cmp.prefix_pairs == 0 {
        eprintln!("warning: corpus has no prefix pairs; the comparison is vacuous");
    }

    if args.json {
        let doc = serde_json::json!({
            "config": config_json(&effective),
            "improved": cmp.improved,
            "baseline": cmp.baseline,
            "improved_sums": cmp.improved_sums,
            "baseline_sums": cmp.baseline_sums,
            "all_dummies_present": cmp.all_dummies_present,
            "prefix_pairs": cmp.prefix_pairs,
        });
        std::fs::write(
            &out,
            serde_json::to_string_pretty(&doc).expect("serializable"),
        )?;
    } else {
        let mut body = config_echo(&effective);
        body.push_str("n,word,p_hat,p_true,mode,seed\n");
        write_trace_csv(&mut body, &cmp.improved);
        write_trace_csv(&mut body, &cmp.baseline);
        std::fs::write(&out, body)?;
    }
    println!("paired traces written to {}", out.display());

    println!("probability sums per checkpoint:");
    println!("{:<10} {:<12} baseline", "n", "improved");
    for ((cp, imp), base) in cmp
        .improved
        .checkpoints
        .iter()
        .zip(&cmp.improved_sums)
        .zip(&cmp.baseline_sums)
    {
        println!("{:<10} {:<12.8} {:.8}", cp.n, imp, base);
    }
    println!(
        "final sums: improved = {} (all dummies present: {}), baseline = {}",
        cmp.improved_sums.last().unwrap(),
        cmp.all_dummies_present,
        cmp.baseline_sums.last().unwrap()
    );

    let last_imp = cmp.improved.checkpoints.last().unwrap();
    println!("final deviations (improved):");
    print!(
        "{}",
        deviation_table(&cmp.improved.words, &cmp.improved.p_true, &last_imp.p_hat)
    );
    std::io::stdout().flush()?;
    Ok(0)
}
