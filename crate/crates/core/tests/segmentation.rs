mod support;

use std::sync::Arc;

use wordseg::corpus::Utterance;
use wordseg::inventory::Phone;
use wordseg::segmenter::{run_with, score_segmentation, Step};
use wordseg::{
    eval_utterance, run, segment_and_learn, train_on, Corpus, LanguageModel, ModelConfig, Order, PhonemeInventory,
    RunConfig, TrainFraction,
};

fn config(order: Order) -> ModelConfig {
    ModelConfig {
        order,
        ..ModelConfig::default()
    }
}

#[test]
fn first_utterance_is_one_word() {
    let inv = PhonemeInventory::english();
    let mut lm = LanguageModel::new(config(Order::Trigram), &inv);
    let u = inv.encode("hQsIli6vmi").unwrap();
    let seg = segment_and_learn(&mut lm, &u).unwrap();
    assert!(seg.boundaries.is_empty());
    assert_eq!(lm.unigrams().distinct(), 1);
    assert_eq!(lm.unigram_count(&u), 1);
}

#[test]
fn repeated_utterance_scores_never_increase() {
    let inv = PhonemeInventory::english();
    for order in Order::ALL {
        let mut lm = LanguageModel::new(config(order), &inv);
        let u = inv.encode("lUkD6dOgi").unwrap();
        let mut last = f64::INFINITY;
        for _ in 0..20 {
            let seg = segment_and_learn(&mut lm, &u).unwrap();
            assert!(seg.score <= last, "order {order}: {} > {last}", seg.score);
            last = seg.score;
        }
    }
}

#[test]
fn damnbritish_presentation_sequence() {
    let inv = PhonemeInventory::english();
    let mut lm = LanguageModel::new(config(Order::Unigram), &inv);
    let e = |s: &str| inv.encode(s).unwrap();
    let mut present = |s: &str| segment_and_learn(&mut lm, &e(s)).unwrap();
    assert!(present("damnbritish").boundaries.is_empty());
    assert!(present("damn").boundaries.is_empty());
    assert!(present("damn").boundaries.is_empty());
    for _ in 0..7 {
        assert!(present("british").boundaries.is_empty());
    }
    assert_eq!(present("damnbritish").boundaries, vec![4]);
}

#[test]
fn train_on_matches_committing_the_same_split() {
    let inv = support::small_inventory(5);
    let mut a = LanguageModel::new(config(Order::Trigram), &inv);
    let mut b = LanguageModel::new(config(Order::Trigram), &inv);
    let words: [&[Phone]; 3] = [&[0], &[1, 2], &[3, 4]];
    train_on(&mut a, &Utterance::from_words(&words)).unwrap();
    b.commit_words(&words).unwrap();
    assert_eq!(a.to_snapshot(&inv), b.to_snapshot(&inv));
}

#[test]
fn train_on_requires_gold() {
    let inv = support::small_inventory(2);
    let mut lm = LanguageModel::new(config(Order::Unigram), &inv);
    assert!(train_on(&mut lm, &Utterance::unsegmented(vec![0, 1])).is_err());
}

#[test]
fn zero_training_prefix_starts_from_a_fresh_model() {
    let corpus = support::english_corpus("lUk\nD6 dOgi\n");
    let mut first_state = None;
    let cfg = RunConfig {
        train_fraction: TrainFraction::ZERO,
        ..RunConfig::default()
    };
    run_with(&corpus, &cfg, |i, step, lm| {
        if i == 0 {
            assert!(matches!(step, Step::Segmented(_)));
            first_state = Some(lm.unigrams().total());
        }
    })
    .unwrap();
    // Only the first utterance (one word) had been committed.
    assert_eq!(first_state, Some(1));
}

#[test]
fn training_prefix_is_floor_of_fraction() {
    let lines = support::synthetic_lines(3, 10, 8);
    let corpus = support::corpus_from_lines(&lines);
    let cfg = RunConfig {
        train_fraction: "0.35".parse().unwrap(),
        ..RunConfig::default()
    };
    let mut trained = 0;
    let segs = run_with(&corpus, &cfg, |_, step, _| {
        if step == Step::Trained {
            trained += 1;
        }
    })
    .unwrap();
    assert_eq!(trained, 3);
    assert_eq!(segs.len(), 7);
    let all = run(
        &corpus,
        &RunConfig {
            train_fraction: TrainFraction::ONE,
            ..cfg
        },
    )
    .unwrap();
    assert!(all.is_empty());
}

#[test]
fn unsegmented_corpus_runs_without_gold() {
    let inv = Arc::new(PhonemeInventory::english());
    let corpus = Corpus::new(
        vec![
            Utterance::unsegmented(inv.encode("lUkD6dOgi").unwrap()),
            Utterance::unsegmented(inv.encode("lUk").unwrap()),
        ],
        inv,
    );
    let segs = run(&corpus, &RunConfig::default()).unwrap();
    assert_eq!(segs.len(), 2);
    let missing = run(
        &corpus,
        &RunConfig {
            train_fraction: TrainFraction::ONE,
            ..RunConfig::default()
        },
    );
    assert!(missing.is_err());
}

#[test]
fn search_score_equals_rescoring_its_boundaries() {
    let inv = support::small_inventory(4);
    let mut rng = support::rng(99);
    for order in Order::ALL {
        for _ in 0..200 {
            let cfg = support::random_config(&mut rng, order);
            let lm = support::random_model(&mut rng, cfg, &inv);
            let u = support::random_utterance(&mut rng, 4, 12);
            let seg = eval_utterance(&lm, &u).unwrap();
            assert_eq!(seg.score, score_segmentation(&lm, &u, &seg.boundaries).unwrap());
        }
    }
}

#[test]
fn ties_prefer_fewer_words() {
    // Six isolated "british" leave both readings of "damnbritish" at exactly
    // the same cost; the single word wins.
    let inv = PhonemeInventory::english();
    let mut lm = LanguageModel::new(config(Order::Unigram), &inv);
    let e = |s: &str| inv.encode(s).unwrap();
    lm.commit_words(&[e("damnbritish")]).unwrap();
    lm.commit_words(&[e("damn")]).unwrap();
    lm.commit_words(&[e("damn")]).unwrap();
    for _ in 0..6 {
        lm.commit_words(&[e("british")]).unwrap();
    }
    let u = e("damnbritish");
    let whole = score_segmentation(&lm, &u, &[]).unwrap();
    let split = score_segmentation(&lm, &u, &[4]).unwrap();
    assert_eq!(whole, split);
    assert!(eval_utterance(&lm, &u).unwrap().boundaries.is_empty());
}

#[test]
fn empty_utterance_is_rejected() {
    let inv = support::small_inventory(2);
    let lm = LanguageModel::new(config(Order::Unigram), &inv);
    assert!(eval_utterance(&lm, &[]).is_err());
}
