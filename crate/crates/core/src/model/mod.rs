//! Back-off n-gram word model over an open vocabulary.
//!
//! Word probabilities back off trigram → bigram → unigram → spelled-out
//! phoneme string, paying the Witten-Bell escape mass `N/(N+S)` of each
//! table on the way down. All quantities are negative natural logs.

mod phoneme;
mod snapshot;
mod table;

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::inventory::{Phone, PhonemeInventory};

pub use phoneme::{PhonemeMode, PhonemeModel};
pub use snapshot::SnapshotError;
pub use table::NGramTable;

/// Dense id of a word that has entered the lexicon.
pub type WordId = u32;

#[derive(Debug, Error, PartialEq)]
pub enum ModelError {
    #[error("phoneme id {0} is not in the inventory")]
    UnknownPhone(Phone),
    #[error("empty word")]
    EmptyWord,
    #[error("{0}-gram probability requested from a model of lower order")]
    OrderTooLow(u8),
    #[error("{order}-gram seen {count} times but its conditioning count is zero")]
    Inconsistent { order: u8, count: u64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub enum Order {
    #[default]
    Unigram = 1,
    Bigram = 2,
    Trigram = 3,
}

impl Order {
    pub const ALL: [Order; 3] = [Order::Unigram, Order::Bigram, Order::Trigram];

    pub fn get(self) -> u8 {
        self as u8
    }

    pub fn from_u8(n: u8) -> Option<Order> {
        match n {
            1 => Some(Order::Unigram),
            2 => Some(Order::Bigram),
            3 => Some(Order::Trigram),
            _ => None,
        }
    }
}

impl fmt::Display for Order {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.get())
    }
}

impl FromStr for Order {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        s.parse::<u8>()
            .ok()
            .and_then(Order::from_u8)
            .ok_or_else(|| format!("order must be 1, 2 or 3, got {s:?}"))
    }
}

/// Which count divides a seen bigram or trigram count.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum DenominatorMode {
    /// Standard conditioning: `C(v,w)/C(v)` and `C(u,v,w)/C(u,v)`.
    #[default]
    Context,
    /// The literal formula: `C(v,w)/C(w)` and `C(u,v,w)/C(v,w)`.
    AsWritten,
}

impl DenominatorMode {
    pub fn as_str(self) -> &'static str {
        match self {
            DenominatorMode::Context => "context",
            DenominatorMode::AsWritten => "as-written",
        }
    }
}

impl fmt::Display for DenominatorMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for DenominatorMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "context" => Ok(DenominatorMode::Context),
            "as-written" => Ok(DenominatorMode::AsWritten),
            _ => Err(format!("unknown denominator mode {s:?}")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ModelConfig {
    pub order: Order,
    pub phoneme_mode: PhonemeMode,
    pub denominator: DenominatorMode,
    /// Pseudo-count every phoneme and the sentinel start with.
    pub phoneme_prior: u64,
}

impl Default for ModelConfig {
    fn default() -> Self {
        ModelConfig {
            order: Order::Unigram,
            phoneme_mode: PhonemeMode::Lexicon,
            denominator: DenominatorMode::Context,
            phoneme_prior: 1,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
struct Vocab {
    ids: HashMap<Box<[Phone]>, WordId>,
    words: Vec<Box<[Phone]>>,
}

impl Vocab {
    fn get(&self, word: &[Phone]) -> Option<WordId> {
        self.ids.get(word).copied()
    }

    fn intern(&mut self, word: &[Phone]) -> WordId {
        if let Some(id) = self.get(word) {
            return id;
        }
        let id = self.words.len() as WordId;
        self.words.push(word.into());
        self.ids.insert(word.into(), id);
        id
    }
}

/// Incrementally trained back-off language model.
///
/// Single writer: commits mutate every table, so queries and commits from
/// one run must be sequenced. Independent runs use independent instances.
#[derive(Debug, Clone, PartialEq)]
pub struct LanguageModel {
    config: ModelConfig,
    symbols: usize,
    vocab: Vocab,
    unigrams: NGramTable<WordId>,
    bigrams: NGramTable<[WordId; 2]>,
    trigrams: NGramTable<[WordId; 3]>,
    phonemes: PhonemeModel,
}

impl LanguageModel {
    pub fn new(config: ModelConfig, inventory: &PhonemeInventory) -> Self {
        LanguageModel {
            config,
            symbols: inventory.len(),
            vocab: Vocab::default(),
            unigrams: NGramTable::new(),
            bigrams: NGramTable::new(),
            trigrams: NGramTable::new(),
            phonemes: PhonemeModel::new(inventory.len(), config.phoneme_mode, config.phoneme_prior),
        }
    }

    pub fn config(&self) -> &ModelConfig {
        &self.config
    }

    pub fn order(&self) -> Order {
        self.config.order
    }

    pub fn phonemes(&self) -> &PhonemeModel {
        &self.phonemes
    }

    pub fn unigrams(&self) -> &NGramTable<WordId> {
        &self.unigrams
    }

    pub fn bigrams(&self) -> &NGramTable<[WordId; 2]> {
        &self.bigrams
    }

    pub fn trigrams(&self) -> &NGramTable<[WordId; 3]> {
        &self.trigrams
    }

    /// Number of distinct words committed so far.
    pub fn lexicon_size(&self) -> usize {
        self.vocab.words.len()
    }

    pub fn word_id(&self, word: &[Phone]) -> Option<WordId> {
        self.vocab.get(word)
    }

    pub fn word(&self, id: WordId) -> &[Phone] {
        &self.vocab.words[id as usize]
    }

    pub fn unigram_count(&self, word: &[Phone]) -> u64 {
        self.word_id(word).map_or(0, |id| self.unigrams.count(&id))
    }

    pub fn bigram_count(&self, prev: &[Phone], word: &[Phone]) -> u64 {
        match (self.word_id(prev), self.word_id(word)) {
            (Some(a), Some(b)) => self.bigrams.count(&[a, b]),
            _ => 0,
        }
    }

    pub fn trigram_count(&self, w2: &[Phone], w1: &[Phone], word: &[Phone]) -> u64 {
        match (self.word_id(w2), self.word_id(w1), self.word_id(word)) {
            (Some(a), Some(b), Some(c)) => self.trigrams.count(&[a, b, c]),
            _ => 0,
        }
    }

    fn check_word(&self, word: &[Phone]) -> Result<(), ModelError> {
        if word.is_empty() {
            return Err(ModelError::EmptyWord);
        }
        match word.iter().find(|&&p| p as usize >= self.symbols) {
            Some(&p) => Err(ModelError::UnknownPhone(p)),
            None => Ok(()),
        }
    }

    /// `-ln r(x)` for a symbol or the sentinel.
    pub fn phoneme_logprob(&self, phone: Phone) -> Result<f64, ModelError> {
        self.phonemes.logprob(phone)
    }

    /// `-ln P_Σ(w)`: the spelled-out probability of a word, without the
    /// unigram escape factor.
    pub fn novel_word_logprob(&self, word: &[Phone]) -> Result<f64, ModelError> {
        self.check_word(word)?;
        let mut nll = self.phonemes.sentinel_term();
        for &p in word {
            nll += self.phonemes.logprob_unchecked(p);
        }
        Ok(nll)
    }

    /// `-ln P(w)`.
    pub fn word_logprob(&self, word: &[Phone]) -> Result<f64, ModelError> {
        self.check_word(word)?;
        match self.word_id(word) {
            Some(id) => Ok(self.seen_unigram_nll(id)),
            None => Ok(self.unseen_unigram_nll(self.novel_word_logprob(word)?)),
        }
    }

    /// `-ln P(w | prev)`.
    pub fn bigram_logprob(&self, prev: &[Phone], word: &[Phone]) -> Result<f64, ModelError> {
        if self.config.order < Order::Bigram {
            return Err(ModelError::OrderTooLow(2));
        }
        self.check_word(prev)?;
        let uni = self.word_logprob(word)?;
        self.bigram_nll(self.word_id(prev), self.word_id(word), uni)
    }

    /// `-ln P(w | w2, w1)`.
    pub fn trigram_logprob(&self, w2: &[Phone], w1: &[Phone], word: &[Phone]) -> Result<f64, ModelError> {
        if self.config.order < Order::Trigram {
            return Err(ModelError::OrderTooLow(3));
        }
        self.check_word(w2)?;
        self.check_word(w1)?;
        let uni = self.word_logprob(word)?;
        self.trigram_nll(self.word_id(w2), self.word_id(w1), self.word_id(word), uni)
    }

    #[inline]
    pub(crate) fn seen_unigram_nll(&self, id: WordId) -> f64 {
        let c = self.unigrams.count(&id);
        let denom = self.unigrams.distinct() + self.unigrams.total();
        -(c as f64 / denom as f64).ln()
    }

    #[inline]
    pub(crate) fn unseen_unigram_nll(&self, novel_nll: f64) -> f64 {
        self.unigrams.escape_nll() + novel_nll
    }

    /// Bigram cost given the already computed unigram cost of `word`.
    pub(crate) fn bigram_nll(
        &self,
        prev: Option<WordId>,
        word: Option<WordId>,
        word_nll: f64,
    ) -> Result<f64, ModelError> {
        if let (Some(v), Some(w)) = (prev, word) {
            let c = self.bigrams.count(&[v, w]);
            if c > 0 {
                let d = match self.config.denominator {
                    DenominatorMode::Context => self.unigrams.count(&v),
                    DenominatorMode::AsWritten => self.unigrams.count(&w),
                };
                if d == 0 {
                    return Err(ModelError::Inconsistent { order: 2, count: c });
                }
                let p = self.bigrams.seen_weight() * (c as f64 / d as f64);
                return Ok(-p.ln());
            }
        }
        Ok(self.bigrams.escape_nll() + word_nll)
    }

    /// Trigram cost given the already computed unigram cost of `word`.
    pub(crate) fn trigram_nll(
        &self,
        w2: Option<WordId>,
        w1: Option<WordId>,
        word: Option<WordId>,
        word_nll: f64,
    ) -> Result<f64, ModelError> {
        if let (Some(u), Some(v), Some(w)) = (w2, w1, word) {
            let c = self.trigrams.count(&[u, v, w]);
            if c > 0 {
                let d = match self.config.denominator {
                    DenominatorMode::Context => self.bigrams.count(&[u, v]),
                    DenominatorMode::AsWritten => self.bigrams.count(&[v, w]),
                };
                if d == 0 {
                    return Err(ModelError::Inconsistent { order: 3, count: c });
                }
                let p = self.trigrams.seen_weight() * (c as f64 / d as f64);
                return Ok(-p.ln());
            }
        }
        Ok(self.trigrams.escape_nll() + self.bigram_nll(w1, word, word_nll)?)
    }

    /// Commits the words of one utterance: unigram, bigram and trigram
    /// counts (up to the model order) and phoneme counts per the phoneme
    /// mode. No utterance start or end markers are added.
    pub fn commit_words<W: AsRef<[Phone]>>(&mut self, words: &[W]) -> Result<(), ModelError> {
        for w in words {
            self.check_word(w.as_ref())?;
        }
        let order = self.config.order;
        let mut ids: Vec<WordId> = Vec::with_capacity(words.len());
        for w in words {
            let w = w.as_ref();
            let id = self.vocab.intern(w);
            let count = self.unigrams.increment(id);
            match self.config.phoneme_mode {
                PhonemeMode::Corpus => self.phonemes.observe(w),
                PhonemeMode::Lexicon if count == 1 => self.phonemes.observe(w),
                _ => {}
            }
            ids.push(id);
        }
        if order >= Order::Bigram {
            for pair in ids.windows(2) {
                self.bigrams.increment([pair[0], pair[1]]);
            }
        }
        if order >= Order::Trigram {
            for triple in ids.windows(3) {
                self.trigrams.increment([triple[0], triple[1], triple[2]]);
            }
        }
        self.phonemes.refresh();
        debug_assert_eq!(
            self.unigrams.recount(),
            (self.unigrams.distinct(), self.unigrams.total())
        );
        Ok(())
    }
}
