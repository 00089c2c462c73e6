//! Minimum-cost segmentation by dynamic programming, and the incremental
//! segment-then-commit learning loop.
//!
//! The unigram search keeps one state per end position. Bigram search keys
//! states by the span of the last word, trigram search by the spans of the
//! last two words, so every n-gram context is exact. The first word of an
//! utterance is scored by the unigram model and the second by the bigram
//! model; no start or end markers are used.
//!
//! Ties are broken toward fewer words, then toward the earlier final
//! boundary (and recursively toward earlier boundaries before it).

use thiserror::Error;

use crate::corpus::{spans, valid_boundaries, words_at, Corpus, CorpusError, Utterance};
use crate::inventory::Phone;
use crate::model::{LanguageModel, ModelConfig, ModelError, Order, WordId};

#[derive(Debug, Error, PartialEq)]
pub enum SegmentError {
    #[error("cannot segment an empty utterance")]
    EmptyUtterance,
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Corpus(#[from] CorpusError),
}

/// Word boundaries inferred for one utterance, with the total cost.
#[derive(Debug, Clone, PartialEq)]
pub struct Segmentation {
    /// Interior cut positions, strictly increasing inside `(0, len)`.
    pub boundaries: Vec<usize>,
    /// Negative log probability of the segmentation.
    pub score: f64,
}

impl Segmentation {
    pub fn word_count(&self) -> usize {
        self.boundaries.len() + 1
    }

    pub fn words<'a>(&'a self, phones: &'a [Phone]) -> impl Iterator<Item = &'a [Phone]> + 'a {
        words_at(phones, &self.boundaries)
    }

    pub fn spans(&self, len: usize) -> impl Iterator<Item = (usize, usize)> + '_ {
        spans(len, &self.boundaries)
    }
}

/// Exact rational training fraction in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct TrainFraction {
    num: u64,
    den: u64,
}

impl TrainFraction {
    pub const ZERO: TrainFraction = TrainFraction { num: 0, den: 1 };
    pub const ONE: TrainFraction = TrainFraction { num: 1, den: 1 };

    pub fn new(num: u64, den: u64) -> Option<Self> {
        (den > 0 && num <= den).then_some(TrainFraction { num, den })
    }

    pub fn percent(p: u64) -> Option<Self> {
        Self::new(p, 100)
    }

    /// `floor(fraction * m)`, computed exactly.
    pub fn of(self, m: usize) -> usize {
        ((self.num as u128 * m as u128) / self.den as u128) as usize
    }

    pub fn as_f64(self) -> f64 {
        self.num as f64 / self.den as f64
    }
}

impl Default for TrainFraction {
    fn default() -> Self {
        Self::ZERO
    }
}

impl std::str::FromStr for TrainFraction {
    type Err = String;

    /// Accepts `p/q` or a decimal such as `0.25`.
    fn from_str(s: &str) -> Result<Self, String> {
        let bad = || format!("training fraction must be a number in [0, 1], got {s:?}");
        if let Some((p, q)) = s.split_once('/') {
            let p = p.trim().parse().map_err(|_| bad())?;
            let q = q.trim().parse().map_err(|_| bad())?;
            return Self::new(p, q).ok_or_else(bad);
        }
        let (int, frac) = s.split_once('.').unwrap_or((s, ""));
        if int.is_empty() && frac.is_empty() {
            return Err(bad());
        }
        if !int.chars().all(|c| c.is_ascii_digit()) || !frac.chars().all(|c| c.is_ascii_digit()) || frac.len() > 18 {
            return Err(bad());
        }
        let den = 10u64.pow(frac.len() as u32);
        let int: u64 = if int.is_empty() {
            0
        } else {
            int.parse().map_err(|_| bad())?
        };
        let frac: u64 = if frac.is_empty() {
            0
        } else {
            frac.parse().map_err(|_| bad())?
        };
        let num = int.checked_mul(den).and_then(|n| n.checked_add(frac)).ok_or_else(bad)?;
        Self::new(num, den).ok_or_else(bad)
    }
}

impl std::fmt::Display for TrainFraction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RunConfig {
    pub model: ModelConfig,
    pub seed: u64,
    pub train_fraction: TrainFraction,
    pub block_size: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            model: ModelConfig::default(),
            seed: 0,
            train_fraction: TrainFraction::ZERO,
            block_size: 100,
        }
    }
}

/// DP cost: score first, then word count.
#[derive(Debug, Clone, Copy, PartialEq)]
struct Cost {
    score: f64,
    words: u32,
}

impl Cost {
    const INF: Cost = Cost {
        score: f64::INFINITY,
        words: u32::MAX,
    };

    #[inline]
    fn better_than(self, other: Cost) -> bool {
        self.score < other.score || (self.score == other.score && self.words < other.words)
    }

    #[inline]
    fn extend(self, nll: f64) -> Cost {
        Cost {
            score: self.score + nll,
            words: self.words + 1,
        }
    }
}

/// Per-utterance lookups shared by all orders: the lexicon id and unigram
/// cost of every span.
struct Spans {
    n: usize,
    ids: Vec<Option<WordId>>,
    uni: Vec<f64>,
}

impl Spans {
    fn new(lm: &LanguageModel, u: &[Phone]) -> Self {
        let n = u.len();
        let mut ids = vec![None; (n + 1) * (n + 1)];
        let mut uni = vec![f64::INFINITY; (n + 1) * (n + 1)];
        let phonemes = lm.phonemes();
        for s in 0..n {
            let mut novel = phonemes.sentinel_term();
            for e in s + 1..=n {
                novel += phonemes.logprob_unchecked(u[e - 1]);
                let k = s * (n + 1) + e;
                ids[k] = lm.word_id(&u[s..e]);
                uni[k] = match ids[k] {
                    Some(id) => lm.seen_unigram_nll(id),
                    None => lm.unseen_unigram_nll(novel),
                };
            }
        }
        Spans { n, ids, uni }
    }

    #[inline]
    fn at(&self, s: usize, e: usize) -> usize {
        s * (self.n + 1) + e
    }
}

/// Finds the minimum-cost segmentation of `u` under `lm`.
pub fn eval_utterance(lm: &LanguageModel, u: &[Phone]) -> Result<Segmentation, SegmentError> {
    if u.is_empty() {
        return Err(SegmentError::EmptyUtterance);
    }
    if let Some(&p) = u.iter().find(|&&p| p >= lm.phonemes().sentinel()) {
        return Err(ModelError::UnknownPhone(p).into());
    }
    let spans = Spans::new(lm, u);
    match lm.order() {
        Order::Unigram => Ok(unigram_search(&spans)),
        Order::Bigram => bigram_search(lm, &spans),
        Order::Trigram => trigram_search(lm, &spans),
    }
}

fn unigram_search(sp: &Spans) -> Segmentation {
    let n = sp.n;
    let mut best = vec![Cost::INF; n + 1];
    let mut back = vec![0usize; n + 1];
    best[0] = Cost { score: 0.0, words: 0 };
    for e in 1..=n {
        for s in 0..e {
            let c = best[s].extend(sp.uni[sp.at(s, e)]);
            if c.better_than(best[e]) {
                best[e] = c;
                back[e] = s;
            }
        }
    }
    let mut boundaries = Vec::new();
    let mut e = n;
    while back[e] > 0 {
        e = back[e];
        boundaries.push(e);
    }
    boundaries.reverse();
    Segmentation {
        boundaries,
        score: best[n].score,
    }
}

fn bigram_search(lm: &LanguageModel, sp: &Spans) -> Result<Segmentation, SegmentError> {
    let n = sp.n;
    // best[at(s, e)]: cheapest segmentation of [0, e) whose last word is [s, e)
    let mut best = vec![Cost::INF; (n + 1) * (n + 1)];
    let mut back = vec![0usize; (n + 1) * (n + 1)];
    for e in 1..=n {
        best[sp.at(0, e)] = Cost {
            score: sp.uni[sp.at(0, e)],
            words: 1,
        };
        for s in 1..e {
            let w = sp.at(s, e);
            let mut cell = Cost::INF;
            let mut from = 0;
            for p in 0..s {
                let prev = sp.at(p, s);
                if best[prev].score.is_infinite() {
                    continue;
                }
                let nll = lm.bigram_nll(sp.ids[prev], sp.ids[w], sp.uni[w])?;
                let c = best[prev].extend(nll);
                if c.better_than(cell) {
                    cell = c;
                    from = p;
                }
            }
            best[w] = cell;
            back[w] = from;
        }
    }
    let mut last = 0;
    for s in 1..n {
        if best[sp.at(s, n)].better_than(best[sp.at(last, n)]) {
            last = s;
        }
    }
    let score = best[sp.at(last, n)].score;
    let mut boundaries = Vec::new();
    let (mut s, mut e) = (last, n);
    while s > 0 {
        boundaries.push(s);
        let p = back[sp.at(s, e)];
        e = s;
        s = p;
    }
    boundaries.reverse();
    Ok(Segmentation { boundaries, score })
}

fn trigram_search(lm: &LanguageModel, sp: &Spans) -> Result<Segmentation, SegmentError> {
    let n = sp.n;
    let m = n + 1;
    // State (p, s, e): last word [s, e), previous word [p, s). When s == 0
    // the last word is the first and p is unused (stored at p = 0).
    let idx = |p: usize, s: usize, e: usize| (p * m + s) * m + e;
    let mut best = vec![Cost::INF; m * m * m];
    let mut back = vec![0usize; m * m * m];
    for e in 1..=n {
        best[idx(0, 0, e)] = Cost {
            score: sp.uni[sp.at(0, e)],
            words: 1,
        };
        for s in 1..e {
            let w = sp.at(s, e);
            // Second word: bigram against the first.
            {
                let first = sp.at(0, s);
                let nll = lm.bigram_nll(sp.ids[first], sp.ids[w], sp.uni[w])?;
                best[idx(0, s, e)] = best[idx(0, 0, s)].extend(nll);
            }
            // Third word onward: trigram over (q..p, p..s, s..e).
            for p in 1..s {
                let mut cell = Cost::INF;
                let mut from = 0;
                for q in 0..p {
                    let state = best[idx(q, p, s)];
                    if state.score.is_infinite() {
                        continue;
                    }
                    let nll = lm.trigram_nll(sp.ids[sp.at(q, p)], sp.ids[sp.at(p, s)], sp.ids[w], sp.uni[w])?;
                    let c = state.extend(nll);
                    if c.better_than(cell) {
                        cell = c;
                        from = q;
                    }
                }
                best[idx(p, s, e)] = cell;
                back[idx(p, s, e)] = from;
            }
        }
    }
    let (mut bp, mut bs) = (0, 0);
    for s in 1..n {
        for p in 0..s {
            if best[idx(p, s, n)].better_than(best[idx(bp, bs, n)]) {
                bp = p;
                bs = s;
            }
        }
    }
    let score = best[idx(bp, bs, n)].score;
    let mut boundaries = Vec::new();
    let (mut p, mut s, mut e) = (bp, bs, n);
    while s > 0 {
        boundaries.push(s);
        if p == 0 {
            break;
        }
        let q = back[idx(p, s, e)];
        e = s;
        s = p;
        p = q;
    }
    boundaries.reverse();
    Ok(Segmentation { boundaries, score })
}

/// Scores a given segmentation left to right with the same composition the
/// search uses.
pub fn score_segmentation(lm: &LanguageModel, u: &[Phone], boundaries: &[usize]) -> Result<f64, SegmentError> {
    if !valid_boundaries(u.len(), boundaries) {
        return Err(CorpusError::BadBoundaries {
            boundaries: boundaries.to_vec(),
            len: u.len(),
        }
        .into());
    }
    let words: Vec<&[Phone]> = words_at(u, boundaries).collect();
    let mut score = 0.0;
    for (i, w) in words.iter().enumerate() {
        let nll = match (lm.order(), i) {
            (_, 0) | (Order::Unigram, _) => lm.word_logprob(w)?,
            (Order::Bigram, _) | (Order::Trigram, 1) => lm.bigram_logprob(words[i - 1], w)?,
            (Order::Trigram, _) => lm.trigram_logprob(words[i - 2], words[i - 1], w)?,
        };
        score += nll;
    }
    Ok(score)
}

/// Segments `u`, then commits the inferred words.
pub fn segment_and_learn(lm: &mut LanguageModel, u: &[Phone]) -> Result<Segmentation, SegmentError> {
    let seg = eval_utterance(lm, u)?;
    let words: Vec<&[Phone]> = seg.words(u).collect();
    debug_assert_eq!(words.concat(), u);
    lm.commit_words(&words)?;
    Ok(seg)
}

/// Commits the gold words of `u` without searching.
pub fn train_on(lm: &mut LanguageModel, u: &Utterance) -> Result<(), SegmentError> {
    let words: Vec<&[Phone]> = u.gold_words().ok_or(CorpusError::MissingGold { index: 0 })?.collect();
    lm.commit_words(&words)?;
    Ok(())
}

/// What the learner did with one utterance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Step<'a> {
    Trained,
    Segmented(&'a Segmentation),
}

/// Trains on the first `train_fraction` of the corpus, then segments and
/// learns from the rest in order. Returns the test-part segmentations.
pub fn run(corpus: &Corpus, config: &RunConfig) -> Result<Vec<Segmentation>, SegmentError> {
    run_with(corpus, config, |_, _, _| {})
}

/// [`run`] with an observer called after every utterance with its index,
/// what happened, and the model state after the update.
pub fn run_with<F>(corpus: &Corpus, config: &RunConfig, mut observe: F) -> Result<Vec<Segmentation>, SegmentError>
where
    F: FnMut(usize, Step<'_>, &LanguageModel),
{
    let mut lm = LanguageModel::new(config.model, corpus.inventory());
    let utterances = corpus.utterances();
    let train = config.train_fraction.of(utterances.len());
    for (index, u) in utterances[..train].iter().enumerate() {
        train_on(&mut lm, u).map_err(|e| match e {
            SegmentError::Corpus(CorpusError::MissingGold { .. }) => CorpusError::MissingGold { index }.into(),
            e => e,
        })?;
        observe(index, Step::Trained, &lm);
    }
    let mut out = Vec::with_capacity(utterances.len() - train);
    for (index, u) in utterances.iter().enumerate().skip(train) {
        let seg = segment_and_learn(&mut lm, u.phones())?;
        observe(index, Step::Segmented(&seg), &lm);
        out.push(seg);
    }
    Ok(out)
}
