//! Acceptance checks. Prints one PASS, FAIL or SKIP line per criterion and
//! exits non-zero if any criterion fails.
//!
//! The reference-corpus check runs only when `WORDSEG_REFERENCE_CORPUS`
//! names the 9790-utterance child-directed speech transcript;
//! `WORDSEG_REFERENCE_RUNS` overrides its 25 permutations.

// Comparisons are written so that NaN fails them.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod support;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::sync::Arc;
use std::time::{Duration, Instant};

use wordseg::experiments::{baseline_experiment, fully_trained, run_experiment, ExperimentKind, ExperimentSpec};
use wordseg::inventory::Phone;
use wordseg::segmenter::score_segmentation;
use wordseg::{
    eval_utterance, run, segment_and_learn, Corpus, LanguageModel, ModelConfig, Order, PhonemeInventory, PhonemeMode,
    RunConfig,
};

enum Outcome {
    Pass(String),
    Skip(String),
}

type Check = fn() -> Result<Outcome, String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn oracle_equivalence() -> Result<Outcome, String> {
    let start = Instant::now();
    let inv = support::small_inventory(4);
    let mut rng = support::rng(2024);
    let mut instances = 0;
    for order in Order::ALL {
        for case in 0..500 {
            let config = support::random_config(&mut rng, order);
            let lm = support::random_model(&mut rng, config, &inv);
            let u = support::random_utterance(&mut rng, 4, 12);
            let seg = eval_utterance(&lm, &u).map_err(|e| e.to_string())?;
            let best = support::all_boundaries(u.len())
                .map(|b| score_segmentation(&lm, &u, &b).unwrap())
                .fold(f64::INFINITY, f64::min);
            ensure!(
                seg.score == best,
                "order {order} case {case}: search {} vs exhaustive {best} on {u:?}",
                seg.score
            );
            let rescored = score_segmentation(&lm, &u, &seg.boundaries).map_err(|e| e.to_string())?;
            ensure!(
                rescored == seg.score,
                "order {order} case {case}: boundaries rescore to {rescored}"
            );
            instances += 1;
        }
    }
    let elapsed = start.elapsed();
    ensure!(elapsed < Duration::from_secs(30), "took {elapsed:?}");
    Ok(Outcome::Pass(format!(
        "{instances} instances, exact match, {elapsed:.2?}"
    )))
}

fn normalization() -> Result<Outcome, String> {
    let mut rng = support::rng(5);
    let mut worst_a: f64 = 0.0;
    let mut worst_b: f64 = 0.0;
    let inv4 = support::small_inventory(4);
    for _ in 0..200 {
        let config = support::random_config(&mut rng, Order::Unigram);
        let lm = support::random_model(&mut rng, config, &inv4);
        let (n1, s1) = (lm.unigrams().distinct() as f64, lm.unigrams().total() as f64);
        if n1 == 0.0 {
            continue;
        }
        let seen: f64 = (0..lm.lexicon_size() as u32)
            .map(|id| (-lm.word_logprob(lm.word(id)).unwrap()).exp())
            .sum();
        let probe = support::random_word(&mut rng, 4, 6);
        if lm.unigram_count(&probe) > 0 {
            continue;
        }
        let escape = (lm.novel_word_logprob(&probe).unwrap() - lm.word_logprob(&probe).unwrap()).exp();
        worst_a = worst_a
            .max((seen - s1 / (n1 + s1)).abs())
            .max((escape - n1 / (n1 + s1)).abs())
            .max((seen + escape - 1.0).abs());
    }
    ensure!(worst_a <= 1e-12, "unigram mass off by {worst_a:e}");

    let inv3 = support::small_inventory(3);
    let mut words: Vec<Vec<Phone>> = vec![vec![]];
    let mut all = Vec::new();
    for _ in 0..8 {
        words = words
            .iter()
            .flat_map(|w| (0..3).map(move |x| [w.as_slice(), &[x]].concat()))
            .collect();
        all.extend(words.iter().cloned());
    }
    for mode in PhonemeMode::ALL {
        for trial in 0..4 {
            let mut lm = LanguageModel::new(
                ModelConfig {
                    phoneme_mode: mode,
                    ..ModelConfig::default()
                },
                &inv3,
            );
            for _ in 0..trial * 5 {
                lm.commit_words(&[support::random_word(&mut rng, 3, 5)]).unwrap();
            }
            let r_end = (-lm.phoneme_logprob(inv3.sentinel()).unwrap()).exp();
            let total: f64 = all.iter().map(|w| (-lm.novel_word_logprob(w).unwrap()).exp()).sum();
            worst_b = worst_b.max((total - (1.0 - (1.0 - r_end).powi(8))).abs());
        }
    }
    ensure!(worst_b <= 1e-9, "spelled-word mass off by {worst_b:e}");
    Ok(Outcome::Pass(format!(
        "unigram {worst_a:.1e} <= 1e-12, spelled words {worst_b:.1e} <= 1e-9"
    )))
}

fn damnbritish() -> Result<Outcome, String> {
    let inv = PhonemeInventory::english();
    let e = |s: &str| inv.encode(s).unwrap();
    let mut flip = None;
    for x in 1..=12 {
        let mut lm = LanguageModel::new(ModelConfig::default(), &inv);
        let present = |lm: &mut LanguageModel, s: &str| segment_and_learn(lm, &e(s)).unwrap();
        for s in ["damnbritish", "damn", "damn"] {
            ensure!(present(&mut lm, s).boundaries.is_empty(), "{s} was split");
        }
        for _ in 0..x {
            ensure!(present(&mut lm, "british").boundaries.is_empty(), "british was split");
        }
        let before: Vec<f64> = ["damnbritish", "damn", "british"]
            .iter()
            .map(|w| lm.word_logprob(&e(w)).unwrap())
            .collect();
        let seg = present(&mut lm, "damnbritish");
        match seg.boundaries.as_slice() {
            [] => ensure!(flip.is_none(), "rejoined after splitting at x = {x}"),
            [4] => {
                if flip.is_none() {
                    flip = Some((x, before));
                }
            }
            other => return Err(format!("unexpected split {other:?} at x = {x}")),
        }
    }
    let (x, scores) = flip.ok_or("never split")?;
    ensure!(x == 7, "split first at {x} presentations of british");
    for (got, want) in scores.iter().zip([2.6, 1.9, 0.6]) {
        ensure!((got - want).abs() <= 0.05, "score {got:.4} not within 0.05 of {want}");
    }
    Ok(Outcome::Pass(format!(
        "whole through 6, split at 7; scores {:.3} {:.3} {:.3}",
        scores[0], scores[1], scores[2]
    )))
}

fn first_utterance() -> Result<Outcome, String> {
    let inv = PhonemeInventory::english();
    let mut rng = support::rng(17);
    for order in Order::ALL {
        for mode in PhonemeMode::ALL {
            for i in 0..100 {
                let lm = LanguageModel::new(
                    ModelConfig {
                        order,
                        phoneme_mode: mode,
                        ..ModelConfig::default()
                    },
                    &inv,
                );
                let u = support::random_utterance(&mut rng, inv.len(), 20);
                let seg = eval_utterance(&lm, &u).map_err(|e| e.to_string())?;
                ensure!(
                    seg.boundaries.is_empty(),
                    "order {order} {mode} utterance {i} split: {:?}",
                    seg.boundaries
                );
            }
        }
    }
    Ok(Outcome::Pass(
        "100 utterances x 3 orders x 3 phoneme modes kept whole".into(),
    ))
}

fn fully_trained_consistency() -> Result<Outcome, String> {
    let mut rng = support::rng(31);
    let mut lines = support::synthetic_lines(41, 500, 60);
    let vocab = support::prefix_free_vocab(&mut rng, 200);
    // Rare words that the Zipf draw above never produces together.
    let (a, x, y) = (&vocab[197], &vocab[198], &vocab[199]);
    let consistent = format!("{a} {x} {y}");
    for i in (10..330).step_by(40) {
        lines[i] = consistent.clone();
    }
    lines[400] = consistent.clone();

    let mut spec = ExperimentSpec::new(ExperimentKind::FullyTrained);
    spec.orders = vec![Order::Trigram];
    let clean = fully_trained(&support::corpus_from_lines(&lines), &spec).map_err(|e| e.to_string())?;
    let r = &clean[0].report;
    ensure!(
        r.precision == 100.0 && r.recall == 100.0 && clean[0].errors.is_empty(),
        "clean corpus: precision {} recall {} errors {:?}",
        r.precision,
        r.recall,
        clean[0].errors
    );

    lines[400] = format!("{a} {x}{y}");
    let planted = fully_trained(&support::corpus_from_lines(&lines), &spec).map_err(|e| e.to_string())?;
    let listed: Vec<usize> = planted[0].errors.iter().map(|e| e.utterance).collect();
    ensure!(listed == [401], "planted inconsistency at line 401, listing {listed:?}");
    Ok(Outcome::Pass(format!(
        "clean: 100/100 on {} utterances; planted: errors at lines {listed:?}",
        lines.len()
    )))
}

fn determinism() -> Result<Outcome, String> {
    let corpus = support::corpus_from_lines(&support::synthetic_lines(8, 120, 40));
    let mut bytes = 0;
    for kind in [
        ExperimentKind::Baseline,
        ExperimentKind::TrainSweep,
        ExperimentKind::FullyTrained,
        ExperimentKind::PhonemeMatrix,
        ExperimentKind::LexiconGrowth,
    ] {
        let mut spec = ExperimentSpec::new(kind);
        spec.runs = 4;
        spec.base_seed = 1234;
        spec.orders = Order::ALL.to_vec();
        spec.sweep_step_percent = 25;
        spec.growth_step_percent = 10;
        let a = run_experiment(&corpus, &spec).map_err(|e| e.to_string())?;
        let b = run_experiment(&corpus, &spec).map_err(|e| e.to_string())?;
        ensure!(a == b, "{kind} output differs between invocations");
        bytes += a.iter().map(|f| f.contents.len()).sum::<usize>();
    }
    Ok(Outcome::Pass(format!(
        "5 experiment kinds, {bytes} bytes identical across invocations"
    )))
}

fn reference_reproduction() -> Result<Outcome, String> {
    let Some(path) = std::env::var_os("WORDSEG_REFERENCE_CORPUS") else {
        return Ok(Outcome::Skip(
            "WORDSEG_REFERENCE_CORPUS not set; reference corpus unavailable".into(),
        ));
    };
    let runs: usize = std::env::var("WORDSEG_REFERENCE_RUNS")
        .ok()
        .and_then(|s| s.parse().ok())
        .unwrap_or(25);
    ensure!(runs >= 25, "at least 25 permutations required, got {runs}");
    let bytes = std::fs::read(&path).map_err(|e| format!("{}: {e}", path.to_string_lossy()))?;
    let corpus = Corpus::parse(&bytes, Arc::new(PhonemeInventory::english())).map_err(|e| e.to_string())?;
    let stats = corpus.stats().map_err(|e| e.to_string())?;
    ensure!(
        stats.utterances == 9790 && stats.tokens == 33399,
        "corpus has {} utterances and {} tokens",
        stats.utterances,
        stats.tokens
    );

    for order in Order::ALL {
        let config = RunConfig {
            model: ModelConfig {
                order,
                ..ModelConfig::default()
            },
            ..RunConfig::default()
        };
        let start = Instant::now();
        run(&corpus, &config).map_err(|e| e.to_string())?;
        let t = start.elapsed();
        ensure!(t < Duration::from_secs(10), "order {order} single run took {t:?}");
    }

    let whole = |order: Order, mode: PhonemeMode| {
        let mut spec = ExperimentSpec::new(ExperimentKind::Baseline);
        spec.runs = runs;
        spec.orders = vec![order];
        spec.config.model.phoneme_mode = mode;
        baseline_experiment(&corpus, &spec)
            .map(|r| r[0].aggregate.clone())
            .map_err(|e| e.to_string())
    };
    let lex1 = whole(Order::Unigram, PhonemeMode::Lexicon)?;
    let uni1 = whole(Order::Unigram, PhonemeMode::Uniform)?;
    let lex3 = whole(Order::Trigram, PhonemeMode::Lexicon)?;
    let (p1, r1, l1) = (lex1.precision.mean, lex1.recall.mean, lex1.lexicon_precision.mean);
    let (p3, r3) = (lex3.precision.mean, lex3.recall.mean);
    ensure!((p1 - 67.7).abs() <= 2.0, "order-1 precision {p1:.2}");
    ensure!((r1 - 70.18).abs() <= 2.0, "order-1 recall {r1:.2}");
    ensure!((l1 - 52.85).abs() <= 2.5, "order-1 lexicon precision {l1:.2}");
    ensure!(
        (uni1.precision.mean - 58.08).abs() <= 2.5,
        "uniform order-1 precision {:.2}",
        uni1.precision.mean
    );
    ensure!(
        r3 < r1 && p3 >= p1,
        "order 3 P/R {p3:.2}/{r3:.2} vs order 1 {p1:.2}/{r1:.2}"
    );
    Ok(Outcome::Pass(format!(
        "{runs} runs: order 1 P/R/LP {p1:.2}/{r1:.2}/{l1:.2}, uniform P {:.2}, order 3 P/R {p3:.2}/{r3:.2}",
        uni1.precision.mean
    )))
}

fn main() -> ExitCode {
    let checks: [(&str, Check); 7] = [
        ("oracle equivalence", oracle_equivalence),
        ("normalization", normalization),
        ("damnbritish flip point", damnbritish),
        ("first utterance kept whole", first_utterance),
        ("fully-trained consistency", fully_trained_consistency),
        ("determinism", determinism),
        ("reference corpus reproduction", reference_reproduction),
    ];
    let mut failed = 0;
    for (name, check) in checks {
        let outcome = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        match outcome {
            Ok(Outcome::Pass(detail)) => println!("PASS  {name}: {detail}"),
            Ok(Outcome::Skip(why)) => println!("SKIP  {name}: {why}"),
            Err(why) => {
                failed += 1;
                println!("FAIL  {name}: {why}");
            }
        }
    }
    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        ExitCode::FAILURE
    } else {
        ExitCode::SUCCESS
    }
}
