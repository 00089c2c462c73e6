//! Word-level precision, recall and lexicon precision, scored over
//! consecutive blocks of utterances and averaged across runs.

use std::collections::HashSet;

use thiserror::Error;

use crate::corpus::{spans, Utterance};
use crate::inventory::Phone;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ScoreError {
    #[error("predicted utterance has {predicted} phonemes but gold has {gold}")]
    LengthMismatch { predicted: usize, gold: usize },
    #[error("predicted and gold utterances spell different phonemes")]
    ContentMismatch,
    #[error("utterance has no segmentation to score")]
    MissingBoundaries,
    #[error("block size must be at least 1")]
    ZeroBlockSize,
    #[error("no runs to aggregate")]
    NoRuns,
    #[error("run {run} has a different block structure from run 0")]
    Ragged { run: usize },
}

/// Span-level match counts for one or more utterances.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct WordMatch {
    pub true_positives: usize,
    pub predicted: usize,
    pub gold: usize,
}

impl WordMatch {
    pub fn add(&mut self, other: WordMatch) {
        self.true_positives += other.true_positives;
        self.predicted += other.predicted;
        self.gold += other.gold;
    }

    pub fn precision(&self) -> f64 {
        percent(self.true_positives, self.predicted)
    }

    pub fn recall(&self) -> f64 {
        percent(self.true_positives, self.gold)
    }
}

/// `100 * n / d`, or 0 when `d` is 0.
pub fn percent(n: usize, d: usize) -> f64 {
    if d == 0 {
        0.0
    } else {
        100.0 * n as f64 / d as f64
    }
}

/// Counts predicted words whose `(start, end)` span equals a gold span.
pub fn match_words(predicted: &Utterance, gold: &Utterance) -> Result<WordMatch, ScoreError> {
    if predicted.len() != gold.len() {
        return Err(ScoreError::LengthMismatch {
            predicted: predicted.len(),
            gold: gold.len(),
        });
    }
    if predicted.phones() != gold.phones() {
        return Err(ScoreError::ContentMismatch);
    }
    let (p, g) = match (predicted.gold(), gold.gold()) {
        (Some(p), Some(g)) => (p, g),
        _ => return Err(ScoreError::MissingBoundaries),
    };
    Ok(match_boundaries(gold.len(), p, g))
}

/// Span matching on boundary sets over an utterance of length `len`.
pub fn match_boundaries(len: usize, predicted: &[usize], gold: &[usize]) -> WordMatch {
    let mut g = spans(len, gold).peekable();
    let mut tp = 0;
    for ps in spans(len, predicted) {
        while g.next_if(|gs| gs.0 < ps.0).is_some() {}
        if g.peek() == Some(&ps) {
            tp += 1;
        }
    }
    WordMatch {
        true_positives: tp,
        predicted: predicted.len() + 1,
        gold: gold.len() + 1,
    }
}

/// Tracks the distinct words inferred so far and how many of them occur in
/// the gold lexicon.
#[derive(Debug, Clone)]
pub struct LexiconTracker<'g> {
    gold: &'g HashSet<Vec<Phone>>,
    seen: HashSet<Vec<Phone>>,
    correct: usize,
    incorrect: usize,
}

impl<'g> LexiconTracker<'g> {
    pub fn new(gold: &'g HashSet<Vec<Phone>>) -> Self {
        LexiconTracker {
            gold,
            seen: HashSet::new(),
            correct: 0,
            incorrect: 0,
        }
    }

    /// Records a word; returns whether it was correct if it is new.
    pub fn observe(&mut self, word: &[Phone]) -> Option<bool> {
        if self.seen.contains(word) {
            return None;
        }
        self.seen.insert(word.to_vec());
        let ok = self.gold.contains(word);
        if ok {
            self.correct += 1;
        } else {
            self.incorrect += 1;
        }
        Some(ok)
    }

    pub fn correct(&self) -> usize {
        self.correct
    }

    pub fn incorrect(&self) -> usize {
        self.incorrect
    }

    pub fn len(&self) -> usize {
        self.seen.len()
    }

    pub fn is_empty(&self) -> bool {
        self.seen.is_empty()
    }

    pub fn precision(&self) -> f64 {
        percent(self.correct, self.correct + self.incorrect)
    }
}

/// Scoring inputs for one test utterance: its span matches and the new
/// lexicon entries it introduced.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct UtteranceScore {
    pub matches: WordMatch,
    pub new_correct: usize,
    pub new_incorrect: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BlockReport {
    /// 1-based.
    pub block_index: usize,
    pub utterances: usize,
    /// Fewer than `block_size` utterances (only ever the last block).
    pub partial: bool,
    pub matches: WordMatch,
    pub precision: f64,
    pub recall: f64,
    /// Cumulative over every block up to and including this one.
    pub lexicon_precision: f64,
    pub correct_lexicon: usize,
    pub incorrect_lexicon: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunReport {
    pub blocks: Vec<BlockReport>,
    /// Pooled counts over the whole run.
    pub totals: WordMatch,
    pub precision: f64,
    pub recall: f64,
    pub lexicon_precision: f64,
    pub correct_lexicon: usize,
    pub incorrect_lexicon: usize,
}

/// Splits per-utterance scores into consecutive blocks of `block_size`.
/// Precision and recall use each block's own counts; lexicon counts carry
/// over from block to block.
pub fn block_scores(results: &[UtteranceScore], block_size: usize) -> Result<Vec<BlockReport>, ScoreError> {
    if block_size == 0 {
        return Err(ScoreError::ZeroBlockSize);
    }
    let (mut correct, mut incorrect) = (0, 0);
    Ok(results
        .chunks(block_size)
        .enumerate()
        .map(|(i, chunk)| {
            let mut matches = WordMatch::default();
            for r in chunk {
                matches.add(r.matches);
                correct += r.new_correct;
                incorrect += r.new_incorrect;
            }
            BlockReport {
                block_index: i + 1,
                utterances: chunk.len(),
                partial: chunk.len() < block_size,
                matches,
                precision: matches.precision(),
                recall: matches.recall(),
                lexicon_precision: percent(correct, correct + incorrect),
                correct_lexicon: correct,
                incorrect_lexicon: incorrect,
            }
        })
        .collect())
}

impl RunReport {
    pub fn new(results: &[UtteranceScore], block_size: usize) -> Result<Self, ScoreError> {
        let blocks = block_scores(results, block_size)?;
        let mut totals = WordMatch::default();
        for b in &blocks {
            totals.add(b.matches);
        }
        let (correct, incorrect) = blocks
            .last()
            .map_or((0, 0), |b| (b.correct_lexicon, b.incorrect_lexicon));
        Ok(RunReport {
            precision: totals.precision(),
            recall: totals.recall(),
            lexicon_precision: percent(correct, correct + incorrect),
            correct_lexicon: correct,
            incorrect_lexicon: incorrect,
            totals,
            blocks,
        })
    }
}

/// Mean and sample standard deviation.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Stat {
    pub mean: f64,
    pub sd: f64,
}

impl Stat {
    /// Values are summed in sorted order, so the result does not depend on
    /// the order they are given in. One value has `sd = 0`.
    pub fn of(values: &[f64]) -> Stat {
        if values.is_empty() {
            return Stat::default();
        }
        let mut v = values.to_vec();
        v.sort_by(f64::total_cmp);
        let n = v.len() as f64;
        let mean = v.iter().sum::<f64>() / n;
        if v.len() == 1 {
            return Stat { mean, sd: 0.0 };
        }
        let mut sq: Vec<f64> = v.iter().map(|x| (x - mean) * (x - mean)).collect();
        sq.sort_by(f64::total_cmp);
        let var = sq.iter().sum::<f64>() / (n - 1.0);
        Stat { mean, sd: var.sqrt() }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BlockAggregate {
    pub block_index: usize,
    pub utterances: usize,
    pub precision: Stat,
    pub recall: Stat,
    pub lexicon_precision: Stat,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AggregateReport {
    pub n_runs: usize,
    pub blocks: Vec<BlockAggregate>,
    pub precision: Stat,
    pub recall: Stat,
    pub lexicon_precision: Stat,
}

/// Per-block and whole-run mean and standard deviation across runs.
pub fn aggregate_runs(reports: &[RunReport]) -> Result<AggregateReport, ScoreError> {
    let first = reports.first().ok_or(ScoreError::NoRuns)?;
    for (run, r) in reports.iter().enumerate() {
        let same = r.blocks.len() == first.blocks.len()
            && r.blocks
                .iter()
                .zip(&first.blocks)
                .all(|(a, b)| a.utterances == b.utterances);
        if !same {
            return Err(ScoreError::Ragged { run });
        }
    }
    let column = |f: &dyn Fn(&RunReport) -> f64| Stat::of(&reports.iter().map(f).collect::<Vec<_>>());
    let blocks = first
        .blocks
        .iter()
        .enumerate()
        .map(|(i, b)| BlockAggregate {
            block_index: b.block_index,
            utterances: b.utterances,
            precision: column(&|r| r.blocks[i].precision),
            recall: column(&|r| r.blocks[i].recall),
            lexicon_precision: column(&|r| r.blocks[i].lexicon_precision),
        })
        .collect();
    Ok(AggregateReport {
        n_runs: reports.len(),
        blocks,
        precision: column(&|r| r.precision),
        recall: column(&|r| r.recall),
        lexicon_precision: column(&|r| r.lexicon_precision),
    })
}
