//! Unsupervised, incremental word segmentation of continuous phonemic
//! transcripts.
//!
//! Each utterance is segmented by an exact dynamic-programming search under
//! a back-off n-gram model (orders 1 to 3) whose lowest level spells novel
//! words out phoneme by phoneme. The chosen segmentation is committed to the
//! model before the next utterance is read.
//!
//! ```
//! use std::sync::Arc;
//! use wordseg::corpus::Corpus;
//! use wordseg::inventory::PhonemeInventory;
//! use wordseg::segmenter::{run, RunConfig};
//!
//! let inventory = Arc::new(PhonemeInventory::english());
//! let corpus = Corpus::parse(b"lUk\nlUk D6 dOgi\n", inventory).unwrap();
//! let segs = run(&corpus, &RunConfig::default()).unwrap();
//! assert_eq!(segs.len(), 2);
//! ```

pub mod corpus;
pub mod experiments;
pub mod inventory;
pub mod model;
pub mod scoring;
pub mod segmenter;

pub use corpus::{Corpus, CorpusError, CorpusStats, Utterance};
pub use inventory::{Phone, PhonemeInventory};
pub use model::{DenominatorMode, LanguageModel, ModelConfig, ModelError, Order, PhonemeMode};
pub use segmenter::{eval_utterance, run, segment_and_learn, train_on, RunConfig, Segmentation, TrainFraction};
