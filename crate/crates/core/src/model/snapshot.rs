//! Line-oriented text dump of a [`LanguageModel`].
//!
//! ```text
//! wordseg-model<TAB>order=2<TAB>phonemes=lexicon<TAB>denominator=context<TAB>prior=1
//! [unigrams]<TAB>N=2<TAB>S=3
//! a<TAB>2
//! bc<TAB>1
//! [bigrams]<TAB>N=1<TAB>S=1
//! a bc<TAB>1
//! [trigrams]<TAB>N=0<TAB>S=0
//! [phonemes]<TAB>total=9
//! a<TAB>3
//! ...
//! <sentinel><TAB>3
//! ```
//!
//! Each section header declares how many entry lines follow. Entries are
//! sorted by their rendered key, so equal models dump to identical text.

use thiserror::Error;

use super::{LanguageModel, ModelConfig, NGramTable, Order, PhonemeModel, WordId};
use crate::inventory::{Phone, PhonemeInventory};

const MAGIC: &str = "wordseg-model";
const SENTINEL: &str = "<sentinel>";

#[derive(Debug, Error, PartialEq, Eq)]
#[error("snapshot line {line}: {message}")]
pub struct SnapshotError {
    pub line: usize,
    pub message: String,
}

fn err<T>(line: usize, message: impl Into<String>) -> Result<T, SnapshotError> {
    Err(SnapshotError {
        line,
        message: message.into(),
    })
}

impl LanguageModel {
    /// Renders every table and the phoneme counts.
    pub fn to_snapshot(&self, inventory: &PhonemeInventory) -> String {
        let c = &self.config;
        let mut out = format!(
            "{MAGIC}\torder={}\tphonemes={}\tdenominator={}\tprior={}\n",
            c.order, c.phoneme_mode, c.denominator, c.phoneme_prior
        );
        let render = |ids: &[WordId]| {
            ids.iter()
                .map(|&id| inventory.decode(self.word(id)))
                .collect::<Vec<_>>()
                .join(" ")
        };
        write_table(&mut out, "unigrams", &self.unigrams, |k| render(&[*k]));
        write_table(&mut out, "bigrams", &self.bigrams, |k| render(k));
        write_table(&mut out, "trigrams", &self.trigrams, |k| render(k));
        let counts = self.phonemes.counts();
        out.push_str(&format!("[phonemes]\ttotal={}\n", counts.iter().sum::<u64>()));
        for (p, count) in counts.iter().enumerate() {
            match inventory.symbol(p as Phone) {
                Some(sym) => out.push(sym),
                None => out.push_str(SENTINEL),
            }
            out.push_str(&format!("\t{count}\n"));
        }
        out
    }

    /// Restores a model from [`to_snapshot`](Self::to_snapshot) output.
    /// Word ids may differ from the original; all counts are identical.
    pub fn from_snapshot(text: &str, inventory: &PhonemeInventory) -> Result<Self, SnapshotError> {
        let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
        let (n, header) = lines.next().ok_or(SnapshotError {
            line: 1,
            message: "empty snapshot".into(),
        })?;
        let config = parse_header(n, header)?;

        let mut lm = LanguageModel::new(config, inventory);

        let uni = read_section(&mut lines, "unigrams")?;
        for (line, key, count) in &uni.entries {
            let words = parse_key(*line, key, 1, inventory)?;
            let id = lm.vocab.intern(&words[0]);
            if lm.unigrams.count(&id) > 0 {
                return err(*line, "duplicate unigram");
            }
            lm.unigrams.add(id, *count);
        }
        uni.check(&lm.unigrams)?;

        let bi = read_section(&mut lines, "bigrams")?;
        if config.order < Order::Bigram && !bi.entries.is_empty() {
            return err(bi.header_line, "bigrams present in a unigram model");
        }
        for (line, key, count) in &bi.entries {
            let ids = lookup_ids::<2>(&lm, *line, parse_key(*line, key, 2, inventory)?)?;
            if lm.bigrams.count(&ids) > 0 {
                return err(*line, "duplicate bigram");
            }
            lm.bigrams.add(ids, *count);
        }
        bi.check(&lm.bigrams)?;

        let tri = read_section(&mut lines, "trigrams")?;
        if config.order < Order::Trigram && !tri.entries.is_empty() {
            return err(tri.header_line, "trigrams present in a lower-order model");
        }
        for (line, key, count) in &tri.entries {
            let ids = lookup_ids::<3>(&lm, *line, parse_key(*line, key, 3, inventory)?)?;
            if lm.trigrams.count(&ids) > 0 {
                return err(*line, "duplicate trigram");
            }
            lm.trigrams.add(ids, *count);
        }
        tri.check(&lm.trigrams)?;

        let (n, header) = lines.next().ok_or(SnapshotError {
            line: 0,
            message: "missing [phonemes] section".into(),
        })?;
        let total: u64 = header
            .strip_prefix("[phonemes]\ttotal=")
            .and_then(|t| t.parse().ok())
            .ok_or(SnapshotError {
                line: n,
                message: "expected [phonemes] header".into(),
            })?;
        let mut counts = Vec::with_capacity(inventory.len() + 1);
        for p in 0..=inventory.len() {
            let (n, l) = lines.next().ok_or(SnapshotError {
                line: 0,
                message: "truncated [phonemes] section".into(),
            })?;
            let (sym, count) = split_entry(n, l)?;
            let expected = match inventory.symbol(p as Phone) {
                Some(c) => c.to_string(),
                None => SENTINEL.to_string(),
            };
            if sym != expected {
                return err(n, format!("expected phoneme {expected:?}, found {sym:?}"));
            }
            counts.push(count);
        }
        let sum = counts.iter().try_fold(0u64, |acc, &c| acc.checked_add(c));
        if sum != Some(total) {
            return err(n, "phoneme counts do not sum to the declared total");
        }
        if let Some((n, _)) = lines.find(|(_, l)| !l.is_empty()) {
            return err(n, "trailing data after [phonemes] section");
        }
        lm.phonemes = PhonemeModel::from_counts(config.phoneme_mode, config.phoneme_prior, counts);
        Ok(lm)
    }
}

fn write_table<K, F>(out: &mut String, name: &str, table: &NGramTable<K>, render: F)
where
    K: std::hash::Hash + Eq,
    F: Fn(&K) -> String,
{
    out.push_str(&format!("[{name}]\tN={}\tS={}\n", table.distinct(), table.total()));
    let mut rows: Vec<(String, u64)> = table.iter().map(|(k, c)| (render(k), c)).collect();
    rows.sort();
    for (key, count) in rows {
        out.push_str(&format!("{key}\t{count}\n"));
    }
}

fn parse_header(line: usize, header: &str) -> Result<ModelConfig, SnapshotError> {
    let mut fields = header.split('\t');
    if fields.next() != Some(MAGIC) {
        return err(line, "not a wordseg model snapshot");
    }
    let mut value = |key: &str| -> Result<&str, SnapshotError> {
        fields
            .next()
            .and_then(|f| f.strip_prefix(key))
            .and_then(|f| f.strip_prefix('='))
            .ok_or(SnapshotError {
                line,
                message: format!("missing header field {key}"),
            })
    };
    let bad = |e: String| SnapshotError { line, message: e };
    let order = value("order")?.parse().map_err(bad)?;
    let phoneme_mode = value("phonemes")?.parse().map_err(bad)?;
    let denominator = value("denominator")?.parse().map_err(bad)?;
    let phoneme_prior = value("prior")?.parse().map_err(|_| SnapshotError {
        line,
        message: "bad prior".into(),
    })?;
    Ok(ModelConfig {
        order,
        phoneme_mode,
        denominator,
        phoneme_prior,
    })
}

struct Section<'a> {
    header_line: usize,
    distinct: u64,
    total: u64,
    entries: Vec<(usize, &'a str, u64)>,
}

impl Section<'_> {
    fn check<K: std::hash::Hash + Eq>(&self, table: &NGramTable<K>) -> Result<(), SnapshotError> {
        if table.distinct() != self.distinct || table.total() != self.total {
            return err(self.header_line, "declared N/S do not match the entries");
        }
        Ok(())
    }
}

fn read_section<'a, I>(lines: &mut I, name: &str) -> Result<Section<'a>, SnapshotError>
where
    I: Iterator<Item = (usize, &'a str)>,
{
    let (n, header) = lines.next().ok_or(SnapshotError {
        line: 0,
        message: format!("missing [{name}] section"),
    })?;
    let rest = header.strip_prefix(&format!("[{name}]\tN=")).ok_or(SnapshotError {
        line: n,
        message: format!("expected [{name}] header"),
    })?;
    let (distinct, total) = rest
        .split_once("\tS=")
        .and_then(|(a, b)| Some((a.parse::<u64>().ok()?, b.parse::<u64>().ok()?)))
        .ok_or(SnapshotError {
            line: n,
            message: "malformed N/S".into(),
        })?;
    let mut entries = Vec::new();
    let mut sum: u64 = 0;
    for _ in 0..distinct {
        let (line, l) = lines.next().ok_or(SnapshotError {
            line: n,
            message: format!("[{name}] section is truncated"),
        })?;
        let (key, count) = split_entry(line, l)?;
        if count == 0 {
            return err(line, "zero count");
        }
        sum = sum.checked_add(count).ok_or(SnapshotError {
            line,
            message: "counts overflow".into(),
        })?;
        entries.push((line, key, count));
    }
    Ok(Section {
        header_line: n,
        distinct,
        total,
        entries,
    })
}

fn split_entry(line: usize, l: &str) -> Result<(&str, u64), SnapshotError> {
    let (key, count) = l.rsplit_once('\t').ok_or(SnapshotError {
        line,
        message: "expected KEY<TAB>COUNT".into(),
    })?;
    let count = count.parse().map_err(|_| SnapshotError {
        line,
        message: format!("bad count {count:?}"),
    })?;
    Ok((key, count))
}

fn parse_key(
    line: usize,
    key: &str,
    arity: usize,
    inventory: &PhonemeInventory,
) -> Result<Vec<Vec<Phone>>, SnapshotError> {
    let words: Vec<&str> = key.split(' ').collect();
    if words.len() != arity {
        return err(line, format!("expected {arity} words, found {}", words.len()));
    }
    words
        .into_iter()
        .map(|w| {
            if w.is_empty() {
                return err(line, "empty word");
            }
            inventory
                .encode(w)
                .or_else(|c| err(line, format!("symbol {c:?} is not in the inventory")))
        })
        .collect()
}

fn lookup_ids<const K: usize>(
    lm: &LanguageModel,
    line: usize,
    words: Vec<Vec<Phone>>,
) -> Result<[WordId; K], SnapshotError> {
    let mut ids = [0; K];
    for (slot, w) in ids.iter_mut().zip(&words) {
        *slot = lm.vocab.get(w).ok_or(SnapshotError {
            line,
            message: "n-gram uses a word missing from [unigrams]".into(),
        })?;
    }
    Ok(ids)
}
