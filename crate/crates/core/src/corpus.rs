//! Transcript corpora: one utterance per line, words separated by single
//! spaces. Spaces are gold word boundaries.

use std::collections::HashSet;
use std::sync::Arc;

use log::warn;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::inventory::{Phone, PhonemeInventory};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CorpusError {
    #[error("line {line}, column {column}: symbol {symbol:?} is not in the phoneme inventory")]
    UnknownSymbol { line: usize, column: usize, symbol: char },
    #[error("line {line}, column {column}: empty word (words are separated by exactly one space)")]
    EmptyWord { line: usize, column: usize },
    #[error("input is not valid UTF-8 at byte {offset}")]
    Utf8 { offset: usize },
    #[error("utterance {index} has no gold segmentation")]
    MissingGold { index: usize },
    #[error("boundaries {boundaries:?} are not strictly increasing inside (0, {len})")]
    BadBoundaries { boundaries: Vec<usize>, len: usize },
}

/// Splits `phones` at interior cut positions. Positions must be strictly
/// increasing and lie in `(0, phones.len())`.
pub fn words_at<'a>(phones: &'a [Phone], boundaries: &'a [usize]) -> impl Iterator<Item = &'a [Phone]> + 'a {
    spans(phones.len(), boundaries).map(move |(s, e)| &phones[s..e])
}

/// `(start, end)` spans of the words implied by `boundaries`.
pub fn spans(len: usize, boundaries: &[usize]) -> impl Iterator<Item = (usize, usize)> + '_ {
    let starts = std::iter::once(0).chain(boundaries.iter().copied());
    let ends = boundaries.iter().copied().chain(std::iter::once(len));
    starts.zip(ends)
}

/// True when `boundaries` is a valid cut set for an utterance of length `len`.
pub fn valid_boundaries(len: usize, boundaries: &[usize]) -> bool {
    let mut prev = 0;
    for &b in boundaries {
        if b <= prev || b >= len {
            return false;
        }
        prev = b;
    }
    true
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Utterance {
    phones: Vec<Phone>,
    gold: Option<Vec<usize>>,
}

impl Utterance {
    /// An utterance with no gold segmentation.
    pub fn unsegmented(phones: Vec<Phone>) -> Self {
        Utterance { phones, gold: None }
    }

    pub fn with_gold(phones: Vec<Phone>, gold: Vec<usize>) -> Result<Self, CorpusError> {
        if !valid_boundaries(phones.len(), &gold) {
            return Err(CorpusError::BadBoundaries {
                boundaries: gold,
                len: phones.len(),
            });
        }
        Ok(Utterance {
            phones,
            gold: Some(gold),
        })
    }

    /// Builds a gold-segmented utterance from its words.
    pub fn from_words<W: AsRef<[Phone]>>(words: &[W]) -> Self {
        let mut phones = Vec::new();
        let mut gold = Vec::new();
        for w in words {
            if !phones.is_empty() {
                gold.push(phones.len());
            }
            phones.extend_from_slice(w.as_ref());
        }
        Utterance {
            phones,
            gold: Some(gold),
        }
    }

    pub fn phones(&self) -> &[Phone] {
        &self.phones
    }

    pub fn len(&self) -> usize {
        self.phones.len()
    }

    pub fn is_empty(&self) -> bool {
        self.phones.is_empty()
    }

    pub fn gold(&self) -> Option<&[usize]> {
        self.gold.as_deref()
    }

    /// Gold words, if the utterance carries a segmentation.
    pub fn gold_words(&self) -> Option<impl Iterator<Item = &[Phone]> + '_> {
        self.gold.as_deref().map(|g| words_at(&self.phones, g))
    }

    /// Renders the utterance in corpus format (no trailing newline).
    pub fn render(&self, inventory: &PhonemeInventory) -> String {
        render_words(inventory, &self.phones, self.gold.as_deref().unwrap_or(&[]))
    }
}

/// Renders `phones` split at `boundaries` as space-separated words.
pub fn render_words(inventory: &PhonemeInventory, phones: &[Phone], boundaries: &[usize]) -> String {
    let mut out = String::with_capacity(phones.len() + boundaries.len());
    for (i, w) in words_at(phones, boundaries).enumerate() {
        if i > 0 {
            out.push(' ');
        }
        out.push_str(&inventory.decode(w));
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct CorpusStats {
    pub utterances: usize,
    pub tokens: usize,
    pub distinct_words: usize,
    /// Mean utterance length in phonemes.
    pub mean_length: f64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Corpus {
    utterances: Vec<Utterance>,
    inventory: Arc<PhonemeInventory>,
}

impl Corpus {
    pub fn new(utterances: Vec<Utterance>, inventory: Arc<PhonemeInventory>) -> Self {
        Corpus { utterances, inventory }
    }

    /// Parses a corpus. Lines that are empty or contain only spaces are
    /// skipped; a trailing `\r` is tolerated.
    pub fn parse(bytes: &[u8], inventory: Arc<PhonemeInventory>) -> Result<Self, CorpusError> {
        let text = std::str::from_utf8(bytes).map_err(|e| CorpusError::Utf8 {
            offset: e.valid_up_to(),
        })?;
        let mut utterances = Vec::new();
        for (i, raw) in text.split('\n').enumerate() {
            let line_no = i + 1;
            let line = raw.strip_suffix('\r').unwrap_or(raw);
            if line.chars().all(|c| c == ' ') {
                if !line.is_empty() {
                    warn!("line {line_no}: skipping line containing only spaces");
                }
                continue;
            }
            utterances.push(parse_line(line, line_no, &inventory)?);
        }
        Ok(Corpus { utterances, inventory })
    }

    pub fn utterances(&self) -> &[Utterance] {
        &self.utterances
    }

    pub fn inventory(&self) -> &Arc<PhonemeInventory> {
        &self.inventory
    }

    pub fn len(&self) -> usize {
        self.utterances.len()
    }

    pub fn is_empty(&self) -> bool {
        self.utterances.is_empty()
    }

    /// Gold word-token count; utterances without gold count as one word.
    pub fn token_count(&self) -> usize {
        self.utterances
            .iter()
            .map(|u| u.gold.as_ref().map_or(1, |g| g.len() + 1))
            .sum()
    }

    /// A uniformly random reordering, fixed by `seed`.
    ///
    /// Uses ChaCha8 seeded through `SeedableRng::seed_from_u64` and a
    /// Fisher-Yates shuffle, so orderings are identical on every platform.
    pub fn permute(&self, seed: u64) -> Corpus {
        let mut order: Vec<usize> = (0..self.utterances.len()).collect();
        fisher_yates(&mut order, seed);
        self.reorder(&order)
    }

    /// Reorders utterances; `order[i]` is the source index of position `i`.
    pub fn reorder(&self, order: &[usize]) -> Corpus {
        Corpus {
            utterances: order.iter().map(|&i| self.utterances[i].clone()).collect(),
            inventory: Arc::clone(&self.inventory),
        }
    }

    /// The corpus followed by a second copy of itself.
    pub fn concat_self(&self) -> Corpus {
        let mut utterances = Vec::with_capacity(self.utterances.len() * 2);
        utterances.extend_from_slice(&self.utterances);
        utterances.extend_from_slice(&self.utterances);
        Corpus {
            utterances,
            inventory: Arc::clone(&self.inventory),
        }
    }

    pub fn stats(&self) -> Result<CorpusStats, CorpusError> {
        let mut tokens = 0;
        let mut phones = 0;
        let mut distinct = HashSet::new();
        for (index, u) in self.utterances.iter().enumerate() {
            let words = u.gold_words().ok_or(CorpusError::MissingGold { index })?;
            for w in words {
                tokens += 1;
                distinct.insert(w);
            }
            phones += u.len();
        }
        let n = self.utterances.len();
        Ok(CorpusStats {
            utterances: n,
            tokens,
            distinct_words: distinct.len(),
            mean_length: if n == 0 { 0.0 } else { phones as f64 / n as f64 },
        })
    }

    /// Every word occurring anywhere in the gold segmentation.
    pub fn gold_lexicon(&self) -> Result<HashSet<Vec<Phone>>, CorpusError> {
        let mut lexicon = HashSet::new();
        for (index, u) in self.utterances.iter().enumerate() {
            let words = u.gold_words().ok_or(CorpusError::MissingGold { index })?;
            for w in words {
                if !lexicon.contains(w) {
                    lexicon.insert(w.to_vec());
                }
            }
        }
        Ok(lexicon)
    }

    /// Serializes in corpus format, one line per utterance.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for u in &self.utterances {
            out.push_str(&u.render(&self.inventory));
            out.push('\n');
        }
        out
    }
}

fn parse_line(line: &str, line_no: usize, inventory: &PhonemeInventory) -> Result<Utterance, CorpusError> {
    let mut phones = Vec::with_capacity(line.len());
    let mut gold = Vec::new();
    let mut word_len = 0;
    for (col, c) in line.chars().enumerate() {
        let column = col + 1;
        if c == ' ' {
            if word_len == 0 {
                return Err(CorpusError::EmptyWord { line: line_no, column });
            }
            gold.push(phones.len());
            word_len = 0;
            continue;
        }
        let phone = inventory.lookup(c).ok_or(CorpusError::UnknownSymbol {
            line: line_no,
            column,
            symbol: c,
        })?;
        phones.push(phone);
        word_len += 1;
    }
    if word_len == 0 {
        return Err(CorpusError::EmptyWord {
            line: line_no,
            column: line.chars().count(),
        });
    }
    Ok(Utterance {
        phones,
        gold: Some(gold),
    })
}

/// Fisher-Yates shuffle driven by ChaCha8 seeded from `seed`.
pub fn fisher_yates<T>(items: &mut [T], seed: u64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for i in (1..items.len()).rev() {
        let j = rng.random_range(0..=i);
        items.swap(i, j);
    }
}
