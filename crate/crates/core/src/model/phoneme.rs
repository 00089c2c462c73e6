use std::fmt;
use std::str::FromStr;

use super::ModelError;
use crate::inventory::Phone;

/// Where phoneme relative frequencies come from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum PhonemeMode {
    /// Fixed uniform distribution over symbols and the sentinel.
    Uniform,
    /// Counted once per distinct word, when it first enters the lexicon.
    #[default]
    Lexicon,
    /// Counted over every committed word token.
    Corpus,
}

impl PhonemeMode {
    pub const ALL: [PhonemeMode; 3] = [PhonemeMode::Uniform, PhonemeMode::Lexicon, PhonemeMode::Corpus];

    pub fn as_str(self) -> &'static str {
        match self {
            PhonemeMode::Uniform => "uniform",
            PhonemeMode::Lexicon => "lexicon",
            PhonemeMode::Corpus => "corpus",
        }
    }
}

impl fmt::Display for PhonemeMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for PhonemeMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "uniform" => Ok(PhonemeMode::Uniform),
            "lexicon" => Ok(PhonemeMode::Lexicon),
            "corpus" => Ok(PhonemeMode::Corpus),
            _ => Err(format!("unknown phoneme mode {s:?}")),
        }
    }
}

/// Relative-frequency table over the transcription symbols plus the
/// end-of-word sentinel (the last id).
///
/// Every symbol starts at `prior`. Negative log frequencies are cached and
/// refreshed after each update.
#[derive(Debug, Clone, PartialEq)]
pub struct PhonemeModel {
    mode: PhonemeMode,
    prior: u64,
    counts: Vec<u64>,
    total: u64,
    nll: Vec<f64>,
    sentinel_term: f64,
}

impl PhonemeModel {
    /// `symbols` is the inventory size, not counting the sentinel.
    pub fn new(symbols: usize, mode: PhonemeMode, prior: u64) -> Self {
        let counts = vec![prior; symbols + 1];
        Self::from_counts(mode, prior, counts)
    }

    pub(crate) fn from_counts(mode: PhonemeMode, prior: u64, counts: Vec<u64>) -> Self {
        let mut model = PhonemeModel {
            mode,
            prior,
            total: counts.iter().sum(),
            nll: vec![0.0; counts.len()],
            counts,
            sentinel_term: 0.0,
        };
        model.refresh();
        model
    }

    pub fn mode(&self) -> PhonemeMode {
        self.mode
    }

    pub fn prior(&self) -> u64 {
        self.prior
    }

    pub fn sentinel(&self) -> Phone {
        (self.counts.len() - 1) as Phone
    }

    /// Number of outcomes, symbols plus the sentinel.
    pub fn outcomes(&self) -> usize {
        self.counts.len()
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    /// `r(x)`. Uniform mode, and an all-zero table, give `1 / outcomes`.
    pub fn relative_frequency(&self, phone: Phone) -> Result<f64, ModelError> {
        let count = *self.counts.get(phone as usize).ok_or(ModelError::UnknownPhone(phone))?;
        Ok(self.frequency_of(count))
    }

    fn frequency_of(&self, count: u64) -> f64 {
        if self.mode == PhonemeMode::Uniform || self.total == 0 {
            1.0 / self.counts.len() as f64
        } else {
            count as f64 / self.total as f64
        }
    }

    /// `-ln r(x)`.
    pub fn logprob(&self, phone: Phone) -> Result<f64, ModelError> {
        self.nll
            .get(phone as usize)
            .copied()
            .ok_or(ModelError::UnknownPhone(phone))
    }

    #[inline]
    pub(crate) fn logprob_unchecked(&self, phone: Phone) -> f64 {
        self.nll[phone as usize]
    }

    /// `-ln( r(#) / (1 - r(#)) )`, the length-independent part of a novel
    /// word's cost.
    pub fn sentinel_term(&self) -> f64 {
        self.sentinel_term
    }

    /// Counts one occurrence of `word` followed by a sentinel. No-op in
    /// uniform mode. Symbols must already be validated.
    pub(crate) fn observe(&mut self, word: &[Phone]) {
        if self.mode == PhonemeMode::Uniform {
            return;
        }
        for &p in word {
            self.counts[p as usize] += 1;
        }
        let sentinel = self.counts.len() - 1;
        self.counts[sentinel] += 1;
        self.total += word.len() as u64 + 1;
    }

    pub(crate) fn refresh(&mut self) {
        for i in 0..self.counts.len() {
            self.nll[i] = -self.frequency_of(self.counts[i]).ln();
        }
        let r0 = self.frequency_of(self.counts[self.counts.len() - 1]);
        self.sentinel_term = -(r0 / (1.0 - r0)).ln();
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn uniform_over_symbols_and_sentinel() {
        let m = PhonemeModel::new(50, PhonemeMode::Uniform, 1);
        for p in 0..=50 {
            assert_eq!(m.relative_frequency(p).unwrap(), 1.0 / 51.0);
        }
        assert!(m.relative_frequency(51).is_err());
        assert!(m.logprob(51).is_err());
    }

    #[test]
    fn uniform_mode_ignores_observations() {
        let mut m = PhonemeModel::new(3, PhonemeMode::Uniform, 1);
        m.observe(&[0, 0, 1]);
        m.refresh();
        assert_eq!(m.counts(), &[1, 1, 1, 1]);
    }

    #[test]
    fn corpus_counts_with_zero_prior() {
        // symbols a=0, b=1; sentinel=2
        let mut m = PhonemeModel::new(2, PhonemeMode::Corpus, 0);
        m.observe(&[0]);
        m.observe(&[0, 1]);
        m.refresh();
        assert_eq!(m.counts(), &[2, 1, 2]);
        assert_eq!(m.relative_frequency(0).unwrap(), 2.0 / 5.0);
    }

    #[test]
    fn empty_zero_prior_table_is_uniform() {
        let m = PhonemeModel::new(4, PhonemeMode::Corpus, 0);
        assert_eq!(m.relative_frequency(2).unwrap(), 0.2);
    }

    #[test]
    fn frequencies_sum_to_one() {
        let mut m = PhonemeModel::new(5, PhonemeMode::Corpus, 1);
        m.observe(&[0, 3, 3, 4]);
        m.observe(&[1]);
        m.refresh();
        let sum: f64 = (0..6).map(|p| m.relative_frequency(p).unwrap()).sum();
        assert!((sum - 1.0).abs() < 1e-12);
    }
}
