// Shared fixtures for the integration tests. Not every test file uses every
// helper.
#![allow(dead_code)]

use std::sync::Arc;

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use wordseg::corpus::Utterance;
use wordseg::inventory::Phone;
use wordseg::{Corpus, DenominatorMode, LanguageModel, ModelConfig, Order, PhonemeInventory, PhonemeMode};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// First `n` letters of "abcdefgh" as an inventory.
pub fn small_inventory(n: usize) -> PhonemeInventory {
    PhonemeInventory::from_chars(&"abcdefgh"[..n]).unwrap()
}

pub fn random_word(rng: &mut impl Rng, symbols: usize, max_len: usize) -> Vec<Phone> {
    let len = rng.random_range(1..=max_len);
    (0..len).map(|_| rng.random_range(0..symbols) as Phone).collect()
}

pub fn random_config(rng: &mut impl Rng, order: Order) -> ModelConfig {
    ModelConfig {
        order,
        phoneme_mode: *PhonemeMode::ALL.choose(rng).unwrap(),
        denominator: if rng.random_bool(0.5) {
            DenominatorMode::Context
        } else {
            DenominatorMode::AsWritten
        },
        phoneme_prior: 1,
    }
}

/// A model whose tables were filled by committing a random number of
/// utterances drawn from a small random vocabulary, so words, bigrams and
/// trigrams repeat. Sometimes left empty.
pub fn random_model(rng: &mut impl Rng, config: ModelConfig, inv: &PhonemeInventory) -> LanguageModel {
    let mut lm = LanguageModel::new(config, inv);
    let vocab: Vec<Vec<Phone>> = (0..rng.random_range(1..=8))
        .map(|_| random_word(rng, inv.len(), 4))
        .collect();
    for _ in 0..rng.random_range(0..=12) {
        let words: Vec<&Vec<Phone>> = (0..rng.random_range(1..=5))
            .map(|_| vocab.choose(rng).unwrap())
            .collect();
        lm.commit_words(&words).unwrap();
    }
    lm
}

pub fn random_utterance(rng: &mut impl Rng, symbols: usize, max_len: usize) -> Vec<Phone> {
    random_word(rng, symbols, max_len)
}

/// Every boundary set of an utterance of length `len`.
pub fn all_boundaries(len: usize) -> impl Iterator<Item = Vec<usize>> {
    let cuts = len.saturating_sub(1);
    (0u32..(1 << cuts)).map(move |mask| (1..len).filter(|&b| mask >> (b - 1) & 1 == 1).collect())
}

const CONSONANTS: &[u8] = b"pbmtdnkgfvszhlrwy";
const VOWELS: &[u8] = b"aeiou";

/// A prefix-free vocabulary: every word is consonants followed by exactly
/// one vowel, so any phoneme string parses into these words at most one way.
pub fn prefix_free_vocab(rng: &mut impl Rng, size: usize) -> Vec<String> {
    let mut out: Vec<String> = Vec::new();
    while out.len() < size {
        let cons = rng.random_range(2..=4);
        let mut w: String = (0..cons).map(|_| *CONSONANTS.choose(rng).unwrap() as char).collect();
        w.push(*VOWELS.choose(rng).unwrap() as char);
        if !out.contains(&w) {
            out.push(w);
        }
    }
    out
}

/// Zipf-ish draw: index i has weight 1/(i+1).
pub fn zipf_pick<'a>(rng: &mut impl Rng, vocab: &'a [String]) -> &'a str {
    let weights: Vec<f64> = (0..vocab.len()).map(|i| 1.0 / (i + 1) as f64).collect();
    let total: f64 = weights.iter().sum();
    let mut x = rng.random::<f64>() * total;
    for (w, &p) in vocab.iter().zip(&weights) {
        if x < p {
            return w;
        }
        x -= p;
    }
    vocab.last().unwrap()
}

/// Lines of a synthetic, internally consistent corpus.
pub fn synthetic_lines(seed: u64, utterances: usize, vocab_size: usize) -> Vec<String> {
    let mut rng = rng(seed);
    let vocab = prefix_free_vocab(&mut rng, vocab_size);
    (0..utterances)
        .map(|_| {
            let n = rng.random_range(1..=6);
            (0..n)
                .map(|_| zipf_pick(&mut rng, &vocab))
                .collect::<Vec<_>>()
                .join(" ")
        })
        .collect()
}

pub fn corpus_from_lines(lines: &[String]) -> Corpus {
    let text = lines.join("\n") + "\n";
    Corpus::parse(text.as_bytes(), Arc::new(PhonemeInventory::english())).unwrap()
}

pub fn english_corpus(text: &str) -> Corpus {
    Corpus::parse(text.as_bytes(), Arc::new(PhonemeInventory::english())).unwrap()
}

pub fn utterance_of(words: &[&[Phone]]) -> Utterance {
    Utterance::from_words(words)
}

/// Back-off probabilities recomputed from raw table counts, written without
/// reference to the library's own scoring helpers.
pub mod oracle {
    use wordseg::inventory::Phone;
    use wordseg::{DenominatorMode, LanguageModel, PhonemeMode};

    pub fn phone_p(lm: &LanguageModel, x: Phone) -> f64 {
        let counts = lm.phonemes().counts();
        let total: u64 = counts.iter().sum();
        if lm.config().phoneme_mode == PhonemeMode::Uniform || total == 0 {
            1.0 / counts.len() as f64
        } else {
            counts[x as usize] as f64 / total as f64
        }
    }

    pub fn novel_p(lm: &LanguageModel, w: &[Phone]) -> f64 {
        let r = phone_p(lm, lm.phonemes().sentinel());
        w.iter().map(|&x| phone_p(lm, x)).product::<f64>() * r / (1.0 - r)
    }

    fn escape(n: u64, s: u64) -> f64 {
        if n == 0 && s == 0 {
            1.0
        } else {
            n as f64 / (n as f64 + s as f64)
        }
    }

    fn seen_weight(n: u64, s: u64) -> f64 {
        s as f64 / (n as f64 + s as f64)
    }

    pub fn unigram_p(lm: &LanguageModel, w: &[Phone]) -> f64 {
        let t = lm.unigrams();
        let c = lm.unigram_count(w);
        if c > 0 {
            c as f64 / (t.distinct() as f64 + t.total() as f64)
        } else {
            escape(t.distinct(), t.total()) * novel_p(lm, w)
        }
    }

    pub fn bigram_p(lm: &LanguageModel, v: &[Phone], w: &[Phone]) -> f64 {
        let t = lm.bigrams();
        let c = lm.bigram_count(v, w);
        if c > 0 {
            let d = match lm.config().denominator {
                DenominatorMode::Context => lm.unigram_count(v),
                DenominatorMode::AsWritten => lm.unigram_count(w),
            };
            seen_weight(t.distinct(), t.total()) * c as f64 / d as f64
        } else {
            escape(t.distinct(), t.total()) * unigram_p(lm, w)
        }
    }

    pub fn trigram_p(lm: &LanguageModel, u: &[Phone], v: &[Phone], w: &[Phone]) -> f64 {
        let t = lm.trigrams();
        let c = lm.trigram_count(u, v, w);
        if c > 0 {
            let d = match lm.config().denominator {
                DenominatorMode::Context => lm.bigram_count(u, v),
                DenominatorMode::AsWritten => lm.bigram_count(v, w),
            };
            seen_weight(t.distinct(), t.total()) * c as f64 / d as f64
        } else {
            escape(t.distinct(), t.total()) * bigram_p(lm, v, w)
        }
    }
}
