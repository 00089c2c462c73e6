//! Experiment orchestration: seeded permutation runs, scoring and CSV
//! reports. Every experiment goes through [`score_run`], which wraps
//! [`segmenter::run_with`](crate::segmenter::run_with).
//!
//! Run `i` of an experiment permutes the corpus with [`run_seed`]`(base_seed, i)`,
//! so any subset of runs can be reproduced on its own.

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use thiserror::Error;

use crate::corpus::{render_words, Corpus, CorpusError};
use crate::inventory::Phone;
use crate::model::{Order, PhonemeMode};
use crate::scoring::{
    aggregate_runs, match_boundaries, AggregateReport, LexiconTracker, RunReport, ScoreError, Stat, UtteranceScore,
    WordMatch,
};
use crate::segmenter::{run_with, RunConfig, SegmentError, Segmentation, Step, TrainFraction};

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error(transparent)]
    Corpus(#[from] CorpusError),
    #[error(transparent)]
    Segment(#[from] SegmentError),
    #[error(transparent)]
    Score(#[from] ScoreError),
    #[error("invalid experiment: {0}")]
    Invalid(String),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ExperimentKind {
    Baseline,
    TrainSweep,
    FullyTrained,
    PhonemeMatrix,
    LexiconGrowth,
}

impl ExperimentKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ExperimentKind::Baseline => "baseline",
            ExperimentKind::TrainSweep => "train-sweep",
            ExperimentKind::FullyTrained => "fully-trained",
            ExperimentKind::PhonemeMatrix => "phoneme-matrix",
            ExperimentKind::LexiconGrowth => "lexicon-growth",
        }
    }

    /// Run counts used when none is given.
    pub fn default_runs(self) -> usize {
        match self {
            ExperimentKind::Baseline | ExperimentKind::PhonemeMatrix => 1000,
            ExperimentKind::TrainSweep => 25,
            ExperimentKind::LexiconGrowth => 100,
            ExperimentKind::FullyTrained => 1,
        }
    }
}

impl fmt::Display for ExperimentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ExperimentKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "baseline" => Ok(ExperimentKind::Baseline),
            "train-sweep" => Ok(ExperimentKind::TrainSweep),
            "fully-trained" => Ok(ExperimentKind::FullyTrained),
            "phoneme-matrix" => Ok(ExperimentKind::PhonemeMatrix),
            "lexicon-growth" => Ok(ExperimentKind::LexiconGrowth),
            _ => Err(format!("unknown experiment {s:?}")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExperimentSpec {
    pub kind: ExperimentKind,
    pub runs: usize,
    pub base_seed: u64,
    /// Model orders to run. `config.model.order` is overridden per order.
    pub orders: Vec<Order>,
    pub config: RunConfig,
    /// Training-sweep step, in percent of the corpus.
    pub sweep_step_percent: u64,
    /// Largest training percentage in the sweep.
    pub sweep_cap_percent: u64,
    /// Lexicon-growth sampling interval, in percent of the corpus.
    pub growth_step_percent: u64,
}

impl ExperimentSpec {
    pub fn new(kind: ExperimentKind) -> Self {
        ExperimentSpec {
            kind,
            runs: kind.default_runs(),
            base_seed: 0,
            orders: vec![Order::Unigram],
            config: RunConfig::default(),
            sweep_step_percent: 1,
            sweep_cap_percent: 75,
            growth_step_percent: 1,
        }
    }

    pub fn validate(&self) -> Result<(), ExperimentError> {
        let bad = |m: &str| Err(ExperimentError::Invalid(m.to_string()));
        if self.runs == 0 {
            return bad("runs must be at least 1");
        }
        if self.orders.is_empty() {
            return bad("at least one order is required");
        }
        if self.config.block_size == 0 {
            return bad("block size must be at least 1");
        }
        if self.sweep_step_percent == 0 || self.growth_step_percent == 0 {
            return bad("step sizes must be positive");
        }
        if self.sweep_cap_percent > 100 || self.growth_step_percent > 100 {
            return bad("percentages must not exceed 100");
        }
        Ok(())
    }

    fn config_for(&self, order: Order) -> RunConfig {
        let mut c = self.config;
        c.model.order = order;
        c
    }
}

/// A named output file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OutputFile {
    pub name: String,
    pub contents: String,
}

/// Seed for run `index`: SplitMix64 of `base_seed + index * 0x9E3779B97F4A7C15`.
pub fn run_seed(base_seed: u64, index: usize) -> u64 {
    let mut z = base_seed.wrapping_add((index as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// One scored run over one corpus ordering.
#[derive(Debug, Clone)]
pub struct ScoredRun {
    /// Training utterances at the start of the corpus.
    pub train_len: usize,
    /// Scores over the segmented (test) utterances only.
    pub test: RunReport,
    /// Scores over the whole corpus, counting training utterances as
    /// segmented correctly and their words as lexicon entries.
    pub whole: RunReport,
    pub segmentations: Vec<Segmentation>,
}

/// Runs the learner over `corpus` in its given order and scores the result
/// against the gold segmentation. `observe` sees the model after each
/// utterance.
pub fn score_run<F>(
    corpus: &Corpus,
    config: &RunConfig,
    gold_lexicon: &HashSet<Vec<Phone>>,
    mut observe: F,
) -> Result<ScoredRun, ExperimentError>
where
    F: FnMut(usize, &crate::model::LanguageModel),
{
    let utterances = corpus.utterances();
    let mut test_lex = LexiconTracker::new(gold_lexicon);
    let mut whole_lex = LexiconTracker::new(gold_lexicon);
    let mut test_scores = Vec::new();
    let mut whole_scores = Vec::with_capacity(utterances.len());
    let mut failure = None;
    let segmentations = run_with(corpus, config, |index, step, lm| {
        let u = &utterances[index];
        let Some(gold) = u.gold() else {
            failure.get_or_insert(CorpusError::MissingGold { index });
            return;
        };
        match step {
            Step::Trained => {
                let n = gold.len() + 1;
                let mut score = UtteranceScore {
                    matches: WordMatch {
                        true_positives: n,
                        predicted: n,
                        gold: n,
                    },
                    ..Default::default()
                };
                for w in u.gold_words().into_iter().flatten() {
                    tally(&mut score, whole_lex.observe(w));
                }
                whole_scores.push(score);
            }
            Step::Segmented(seg) => {
                let matches = match_boundaries(u.len(), &seg.boundaries, gold);
                let mut test = UtteranceScore {
                    matches,
                    ..Default::default()
                };
                let mut whole = test;
                for w in seg.words(u.phones()) {
                    tally(&mut test, test_lex.observe(w));
                    tally(&mut whole, whole_lex.observe(w));
                }
                test_scores.push(test);
                whole_scores.push(whole);
            }
        }
        observe(index, lm);
    })?;
    if let Some(e) = failure {
        return Err(e.into());
    }
    Ok(ScoredRun {
        train_len: utterances.len() - segmentations.len(),
        test: RunReport::new(&test_scores, config.block_size)?,
        whole: RunReport::new(&whole_scores, config.block_size)?,
        segmentations,
    })
}

fn tally(score: &mut UtteranceScore, new_entry: Option<bool>) {
    match new_entry {
        Some(true) => score.new_correct += 1,
        Some(false) => score.new_incorrect += 1,
        None => {}
    }
}

/// `runs` seeded permutations of `corpus` under `config`, in run order.
fn permutation_runs<F, T>(corpus: &Corpus, runs: usize, base_seed: u64, per_run: F) -> Result<Vec<T>, ExperimentError>
where
    F: Fn(usize, &Corpus) -> Result<T, ExperimentError> + Sync,
    T: Send,
{
    (0..runs)
        .into_par_iter()
        .map(|i| per_run(i, &corpus.permute(run_seed(base_seed, i))))
        .collect()
}

fn fmt2(x: f64) -> String {
    format!("{x:.2}")
}

fn csv_string<F>(header: &[&str], fill: F) -> Result<String, ExperimentError>
where
    F: FnOnce(&mut csv::Writer<Vec<u8>>) -> Result<(), csv::Error>,
{
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    fill(&mut w)?;
    let bytes = w.into_inner().map_err(|e| ExperimentError::Invalid(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
}

fn stat_fields(s: Stat) -> [String; 2] {
    [fmt2(s.mean), fmt2(s.sd)]
}

// ---------------------------------------------------------------------------
// baseline

#[derive(Debug, Clone)]
pub struct BaselineResult {
    pub order: Order,
    pub phoneme_mode: PhonemeMode,
    pub runs: Vec<RunReport>,
    pub aggregate: AggregateReport,
    /// Test utterances of run 0 in corpus format, one per line.
    pub first_run_output: String,
}

/// Unsupervised runs over seeded permutations, one set per order.
pub fn baseline_experiment(corpus: &Corpus, spec: &ExperimentSpec) -> Result<Vec<BaselineResult>, ExperimentError> {
    spec.validate()?;
    let gold = corpus.gold_lexicon()?;
    spec.orders
        .iter()
        .map(|&order| {
            let config = spec.config_for(order);
            let outcomes = permutation_runs(corpus, spec.runs, spec.base_seed, |i, permuted| {
                let run = score_run(permuted, &config, &gold, |_, _| {})?;
                let output = if i == 0 {
                    render_output(permuted, &run)
                } else {
                    String::new()
                };
                Ok((run.test, output))
            })?;
            let mut first_run_output = String::new();
            let mut runs = Vec::with_capacity(outcomes.len());
            for (i, (report, output)) in outcomes.into_iter().enumerate() {
                if i == 0 {
                    first_run_output = output;
                }
                runs.push(report);
            }
            let aggregate = aggregate_or_empty(&runs)?;
            Ok(BaselineResult {
                order,
                phoneme_mode: config.model.phoneme_mode,
                runs,
                aggregate,
                first_run_output,
            })
        })
        .collect()
}

fn aggregate_or_empty(runs: &[RunReport]) -> Result<AggregateReport, ExperimentError> {
    Ok(aggregate_runs(runs)?)
}

/// Test-part segmentations of a run, in corpus format.
pub fn render_output(corpus: &Corpus, run: &ScoredRun) -> String {
    let inv = corpus.inventory();
    let mut out = String::new();
    for (u, seg) in corpus.utterances()[run.train_len..].iter().zip(&run.segmentations) {
        out.push_str(&render_words(inv, u.phones(), &seg.boundaries));
        out.push('\n');
    }
    out
}

pub fn runs_csv(runs: &[RunReport]) -> Result<String, ExperimentError> {
    csv_string(
        &[
            "run_id",
            "block_index",
            "utterances",
            "precision",
            "recall",
            "lexicon_precision",
            "correct_lex",
            "incorrect_lex",
        ],
        |w| {
            for (run_id, r) in runs.iter().enumerate() {
                for b in &r.blocks {
                    w.write_record([
                        run_id.to_string(),
                        b.block_index.to_string(),
                        b.utterances.to_string(),
                        fmt2(b.precision),
                        fmt2(b.recall),
                        fmt2(b.lexicon_precision),
                        b.correct_lexicon.to_string(),
                        b.incorrect_lexicon.to_string(),
                    ])?;
                }
            }
            Ok(())
        },
    )
}

pub fn aggregate_csv(agg: &AggregateReport) -> Result<String, ExperimentError> {
    csv_string(
        &[
            "block_index",
            "utterances",
            "precision_mean",
            "precision_sd",
            "recall_mean",
            "recall_sd",
            "lexicon_precision_mean",
            "lexicon_precision_sd",
            "n_runs",
        ],
        |w| {
            for b in &agg.blocks {
                let mut row = vec![b.block_index.to_string(), b.utterances.to_string()];
                row.extend(stat_fields(b.precision));
                row.extend(stat_fields(b.recall));
                row.extend(stat_fields(b.lexicon_precision));
                row.push(agg.n_runs.to_string());
                w.write_record(row)?;
            }
            Ok(())
        },
    )
}

const SUMMARY_HEADER: [&str; 9] = [
    "phoneme_mode",
    "order",
    "n_runs",
    "precision_mean",
    "precision_sd",
    "recall_mean",
    "recall_sd",
    "lexicon_precision_mean",
    "lexicon_precision_sd",
];

fn summary_row(mode: PhonemeMode, order: Order, agg: &AggregateReport) -> Vec<String> {
    let mut row = vec![mode.to_string(), order.to_string(), agg.n_runs.to_string()];
    row.extend(stat_fields(agg.precision));
    row.extend(stat_fields(agg.recall));
    row.extend(stat_fields(agg.lexicon_precision));
    row
}

pub fn render_baseline(results: &[BaselineResult]) -> Result<Vec<OutputFile>, ExperimentError> {
    let mut files = Vec::new();
    for r in results {
        let k = r.order;
        files.push(OutputFile {
            name: format!("baseline_order{k}_runs.csv"),
            contents: runs_csv(&r.runs)?,
        });
        files.push(OutputFile {
            name: format!("baseline_order{k}_aggregate.csv"),
            contents: aggregate_csv(&r.aggregate)?,
        });
        files.push(OutputFile {
            name: format!("baseline_order{k}_run0_segmentation.txt"),
            contents: r.first_run_output.clone(),
        });
    }
    files.push(OutputFile {
        name: "baseline_summary.csv".into(),
        contents: csv_string(&SUMMARY_HEADER, |w| {
            for r in results {
                w.write_record(summary_row(r.phoneme_mode, r.order, &r.aggregate))?;
            }
            Ok(())
        })?,
    });
    Ok(files)
}

// ---------------------------------------------------------------------------
// training sweep

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub order: Order,
    pub train_percent: u64,
    pub train_utterances: usize,
    pub test_utterances: usize,
    pub n_runs: usize,
    /// `None` when the test remainder is empty.
    pub test: Option<(Stat, Stat, Stat)>,
    /// Whole-corpus precision, recall, lexicon precision.
    pub whole: (Stat, Stat, Stat),
}

/// Precision and recall as the supervised prefix grows from 0% to the cap.
pub fn train_sweep(corpus: &Corpus, spec: &ExperimentSpec) -> Result<Vec<SweepRow>, ExperimentError> {
    spec.validate()?;
    let gold = corpus.gold_lexicon()?;
    let m = corpus.len();
    let mut rows = Vec::new();
    for &order in &spec.orders {
        for pct in (0..=spec.sweep_cap_percent).step_by(spec.sweep_step_percent as usize) {
            let mut config = spec.config_for(order);
            config.train_fraction = TrainFraction::percent(pct).expect("cap is at most 100");
            let train = config.train_fraction.of(m);
            let runs = permutation_runs(corpus, spec.runs, spec.base_seed, |_, permuted| {
                let r = score_run(permuted, &config, &gold, |_, _| {})?;
                Ok((r.test, r.whole))
            })?;
            let stats = |reports: &[&RunReport]| {
                let col = |f: fn(&RunReport) -> f64| Stat::of(&reports.iter().map(|r| f(r)).collect::<Vec<_>>());
                (col(|r| r.precision), col(|r| r.recall), col(|r| r.lexicon_precision))
            };
            let tests: Vec<&RunReport> = runs.iter().map(|(t, _)| t).collect();
            let wholes: Vec<&RunReport> = runs.iter().map(|(_, w)| w).collect();
            rows.push(SweepRow {
                order,
                train_percent: pct,
                train_utterances: train,
                test_utterances: m - train,
                n_runs: spec.runs,
                test: (train < m).then(|| stats(&tests)),
                whole: stats(&wholes),
            });
        }
    }
    Ok(rows)
}

pub fn render_train_sweep(rows: &[SweepRow]) -> Result<Vec<OutputFile>, ExperimentError> {
    let contents = csv_string(
        &[
            "order",
            "train_percent",
            "train_utterances",
            "test_utterances",
            "n_runs",
            "empty_test",
            "test_precision_mean",
            "test_precision_sd",
            "test_recall_mean",
            "test_recall_sd",
            "test_lexicon_precision_mean",
            "test_lexicon_precision_sd",
            "whole_precision_mean",
            "whole_recall_mean",
            "whole_lexicon_precision_mean",
        ],
        |w| {
            for r in rows {
                let mut row = vec![
                    r.order.to_string(),
                    r.train_percent.to_string(),
                    r.train_utterances.to_string(),
                    r.test_utterances.to_string(),
                    r.n_runs.to_string(),
                ];
                match r.test {
                    Some((p, rc, l)) => {
                        row.push("0".into());
                        for s in [p, rc, l] {
                            row.extend(stat_fields(s));
                        }
                    }
                    None => {
                        row.push("1".into());
                        row.extend(std::iter::repeat_n(String::new(), 6));
                    }
                }
                row.push(fmt2(r.whole.0.mean));
                row.push(fmt2(r.whole.1.mean));
                row.push(fmt2(r.whole.2.mean));
                w.write_record(row)?;
            }
            Ok(())
        },
    )?;
    Ok(vec![OutputFile {
        name: "train_sweep.csv".into(),
        contents,
    }])
}

// ---------------------------------------------------------------------------
// fully trained

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ErrorRow {
    /// 1-based position in the original (undoubled) corpus.
    pub utterance: usize,
    pub predicted: String,
    pub gold: String,
}

#[derive(Debug, Clone)]
pub struct FullyTrainedResult {
    pub order: Order,
    pub report: RunReport,
    pub errors: Vec<ErrorRow>,
}

/// Trains on the corpus, then segments an identical copy of it. The corpus
/// is used in file order so error positions refer to its lines.
pub fn fully_trained(corpus: &Corpus, spec: &ExperimentSpec) -> Result<Vec<FullyTrainedResult>, ExperimentError> {
    spec.validate()?;
    let gold = corpus.gold_lexicon()?;
    let doubled = corpus.concat_self();
    let inv = corpus.inventory();
    spec.orders
        .iter()
        .map(|&order| {
            let mut config = spec.config_for(order);
            config.train_fraction = TrainFraction::new(1, 2).expect("valid fraction");
            let run = score_run(&doubled, &config, &gold, |_, _| {})?;
            debug_assert_eq!(run.train_len, corpus.len());
            let mut errors = Vec::new();
            for (i, (u, seg)) in corpus.utterances().iter().zip(&run.segmentations).enumerate() {
                let g = u.gold().ok_or(CorpusError::MissingGold { index: i })?;
                if seg.boundaries != g {
                    errors.push(ErrorRow {
                        utterance: i + 1,
                        predicted: render_words(inv, u.phones(), &seg.boundaries),
                        gold: render_words(inv, u.phones(), g),
                    });
                }
            }
            Ok(FullyTrainedResult {
                order,
                report: run.test,
                errors,
            })
        })
        .collect()
}

pub fn render_fully_trained(results: &[FullyTrainedResult]) -> Result<Vec<OutputFile>, ExperimentError> {
    let mut files = Vec::new();
    for r in results {
        let mut listing = String::from("utterance\tpredicted\tgold\n");
        for e in &r.errors {
            listing.push_str(&format!("{}\t{}\t{}\n", e.utterance, e.predicted, e.gold));
        }
        files.push(OutputFile {
            name: format!("fully_trained_order{}_errors.tsv", r.order),
            contents: listing,
        });
    }
    files.push(OutputFile {
        name: "fully_trained.csv".into(),
        contents: csv_string(
            &[
                "order",
                "test_utterances",
                "erroneous_utterances",
                "precision",
                "recall",
                "lexicon_precision",
            ],
            |w| {
                for r in results {
                    w.write_record([
                        r.order.to_string(),
                        r.report.blocks.iter().map(|b| b.utterances).sum::<usize>().to_string(),
                        r.errors.len().to_string(),
                        fmt2(r.report.precision),
                        fmt2(r.report.recall),
                        fmt2(r.report.lexicon_precision),
                    ])?;
                }
                Ok(())
            },
        )?,
    });
    Ok(files)
}

// ---------------------------------------------------------------------------
// phoneme estimation matrix

#[derive(Debug, Clone)]
pub struct MatrixCell {
    pub phoneme_mode: PhonemeMode,
    pub order: Order,
    pub aggregate: AggregateReport,
}

/// The baseline under each phoneme estimation mode.
pub fn phoneme_matrix(corpus: &Corpus, spec: &ExperimentSpec) -> Result<Vec<MatrixCell>, ExperimentError> {
    let mut cells = Vec::new();
    for mode in PhonemeMode::ALL {
        let mut s = spec.clone();
        s.config.model.phoneme_mode = mode;
        for r in baseline_experiment(corpus, &s)? {
            cells.push(MatrixCell {
                phoneme_mode: mode,
                order: r.order,
                aggregate: r.aggregate,
            });
        }
    }
    Ok(cells)
}

pub fn render_phoneme_matrix(cells: &[MatrixCell]) -> Result<Vec<OutputFile>, ExperimentError> {
    Ok(vec![OutputFile {
        name: "phoneme_matrix.csv".into(),
        contents: csv_string(&SUMMARY_HEADER, |w| {
            for c in cells {
                w.write_record(summary_row(c.phoneme_mode, c.order, &c.aggregate))?;
            }
            Ok(())
        })?,
    }])
}

// ---------------------------------------------------------------------------
// lexicon growth

#[derive(Debug, Clone, PartialEq)]
pub struct GrowthPoint {
    pub percent: u64,
    pub utterances: usize,
    pub gold_tokens: f64,
    pub gold_lexicon: f64,
    /// Mean inferred lexicon size, one entry per requested order.
    pub inferred: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GrowthCurves {
    pub orders: Vec<Order>,
    pub n_runs: usize,
    pub points: Vec<GrowthPoint>,
}

/// Least-squares fits of `y = k sqrt(x)` and `y = a x`, both through the
/// origin: `(k, sse_sqrt, a, sse_linear)`.
pub fn fit_sqrt_vs_linear(xs: &[f64], ys: &[f64]) -> (f64, f64, f64, f64) {
    let fit = |f: &dyn Fn(f64) -> f64| {
        let num: f64 = xs.iter().zip(ys).map(|(&x, &y)| f(x) * y).sum();
        let den: f64 = xs.iter().map(|&x| f(x) * f(x)).sum();
        let coef = if den == 0.0 { 0.0 } else { num / den };
        let sse = xs.iter().zip(ys).map(|(&x, &y)| (y - coef * f(x)).powi(2)).sum();
        (coef, sse)
    };
    let (k, sse_sqrt) = fit(&|x: f64| x.sqrt());
    let (a, sse_lin) = fit(&|x| x);
    (k, sse_sqrt, a, sse_lin)
}

/// Lexicon size sampled every `growth_step_percent` of the corpus, for the
/// gold segmentation and each order, averaged over permutations.
pub fn lexicon_growth(corpus: &Corpus, spec: &ExperimentSpec) -> Result<GrowthCurves, ExperimentError> {
    spec.validate()?;
    let gold = corpus.gold_lexicon()?;
    let m = corpus.len();
    let percents: Vec<u64> = (0..=100).step_by(spec.growth_step_percent as usize).collect();
    let marks: Vec<usize> = percents
        .iter()
        .map(|&p| TrainFraction::percent(p).unwrap().of(m))
        .collect();
    let orders = spec.orders.clone();

    // Per run: (gold tokens, gold lexicon, inferred per order) at each mark.
    type Samples = Vec<(usize, usize, Vec<usize>)>;
    let per_run = permutation_runs(corpus, spec.runs, spec.base_seed, |_, permuted| {
        let mut sizes = vec![vec![0usize; m + 1]; orders.len()];
        for (k, &order) in orders.iter().enumerate() {
            let mut config = spec.config_for(order);
            config.train_fraction = TrainFraction::ZERO;
            let row = &mut sizes[k];
            score_run(permuted, &config, &gold, |i, lm| row[i + 1] = lm.lexicon_size())?;
        }
        let mut seen = HashSet::new();
        let mut tokens = vec![0usize; m + 1];
        let mut distinct = vec![0usize; m + 1];
        for (i, u) in permuted.utterances().iter().enumerate() {
            tokens[i + 1] = tokens[i];
            for w in u.gold_words().into_iter().flatten() {
                tokens[i + 1] += 1;
                seen.insert(w);
            }
            distinct[i + 1] = seen.len();
        }
        let points: Samples = marks
            .iter()
            .map(|&c| (tokens[c], distinct[c], sizes.iter().map(|s| s[c]).collect()))
            .collect();
        Ok(points)
    })?;

    let n = spec.runs as f64;
    let mean = |f: &dyn Fn(&Samples) -> usize| -> f64 { per_run.iter().map(|r| f(r) as f64).sum::<f64>() / n };
    let points = percents
        .iter()
        .zip(&marks)
        .enumerate()
        .map(|(j, (&percent, &utterances))| GrowthPoint {
            percent,
            utterances,
            gold_tokens: mean(&|r| r[j].0),
            gold_lexicon: mean(&|r| r[j].1),
            inferred: (0..orders.len()).map(|k| mean(&|r| r[j].2[k])).collect(),
        })
        .collect();
    Ok(GrowthCurves {
        orders,
        n_runs: spec.runs,
        points,
    })
}

pub fn render_lexicon_growth(curves: &GrowthCurves) -> Result<Vec<OutputFile>, ExperimentError> {
    let mut header: Vec<String> = ["percent", "utterances", "gold_tokens_mean", "gold_lexicon_mean"]
        .into_iter()
        .map(String::from)
        .collect();
    header.extend(curves.orders.iter().map(|o| format!("order{o}_lexicon_mean")));
    header.push("n_runs".into());
    let header_refs: Vec<&str> = header.iter().map(String::as_str).collect();
    let curve = csv_string(&header_refs, |w| {
        for p in &curves.points {
            let mut row = vec![
                p.percent.to_string(),
                p.utterances.to_string(),
                fmt2(p.gold_tokens),
                fmt2(p.gold_lexicon),
            ];
            row.extend(p.inferred.iter().map(|&x| fmt2(x)));
            row.push(curves.n_runs.to_string());
            w.write_record(row)?;
        }
        Ok(())
    })?;

    let xs: Vec<f64> = curves.points.iter().map(|p| p.gold_tokens).collect();
    let mut series: Vec<(String, Vec<f64>)> =
        vec![("gold".into(), curves.points.iter().map(|p| p.gold_lexicon).collect())];
    for (k, o) in curves.orders.iter().enumerate() {
        series.push((
            format!("order{o}"),
            curves.points.iter().map(|p| p.inferred[k]).collect(),
        ));
    }
    let fits = csv_string(&["curve", "k_sqrt", "sse_sqrt", "a_linear", "sse_linear"], |w| {
        for (name, ys) in &series {
            let (k, s1, a, s2) = fit_sqrt_vs_linear(&xs, ys);
            w.write_record([
                name.clone(),
                format!("{k:.6}"),
                format!("{s1:.4}"),
                format!("{a:.6}"),
                format!("{s2:.4}"),
            ])?;
        }
        Ok(())
    })?;
    Ok(vec![
        OutputFile {
            name: "lexicon_growth.csv".into(),
            contents: curve,
        },
        OutputFile {
            name: "lexicon_growth_fit.csv".into(),
            contents: fits,
        },
    ])
}

/// Runs the experiment named by `spec.kind` and renders its output files.
pub fn run_experiment(corpus: &Corpus, spec: &ExperimentSpec) -> Result<Vec<OutputFile>, ExperimentError> {
    match spec.kind {
        ExperimentKind::Baseline => render_baseline(&baseline_experiment(corpus, spec)?),
        ExperimentKind::TrainSweep => render_train_sweep(&train_sweep(corpus, spec)?),
        ExperimentKind::FullyTrained => render_fully_trained(&fully_trained(corpus, spec)?),
        ExperimentKind::PhonemeMatrix => render_phoneme_matrix(&phoneme_matrix(corpus, spec)?),
        ExperimentKind::LexiconGrowth => render_lexicon_growth(&lexicon_growth(corpus, spec)?),
    }
}
