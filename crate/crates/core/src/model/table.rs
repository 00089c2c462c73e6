use std::collections::HashMap;
use std::hash::Hash;

/// Frequency table for one n-gram order.
///
/// Tracks the number of distinct keys with nonzero count (`N`) and the sum
/// of all counts (`S`) alongside the counts themselves.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NGramTable<K: Hash + Eq> {
    counts: HashMap<K, u64>,
    distinct: u64,
    total: u64,
}

impl<K: Hash + Eq> Default for NGramTable<K> {
    fn default() -> Self {
        NGramTable {
            counts: HashMap::new(),
            distinct: 0,
            total: 0,
        }
    }
}

impl<K: Hash + Eq> NGramTable<K> {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds `by` to the count of `key` and returns the new count.
    pub fn add(&mut self, key: K, by: u64) -> u64 {
        if by == 0 {
            return self.count(&key);
        }
        let slot = self.counts.entry(key).or_insert(0);
        if *slot == 0 {
            self.distinct += 1;
        }
        *slot += by;
        self.total += by;
        *slot
    }

    pub fn increment(&mut self, key: K) -> u64 {
        self.add(key, 1)
    }

    pub fn count(&self, key: &K) -> u64 {
        self.counts.get(key).copied().unwrap_or(0)
    }

    /// `N`: number of distinct keys seen.
    pub fn distinct(&self) -> u64 {
        self.distinct
    }

    /// `S`: sum of all counts.
    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn is_empty(&self) -> bool {
        self.distinct == 0
    }

    /// Probability mass reserved for unseen keys, `N / (N + S)`.
    /// An empty table escapes with probability 1.
    pub fn escape_probability(&self) -> f64 {
        if self.distinct + self.total == 0 {
            1.0
        } else {
            self.distinct as f64 / (self.distinct + self.total) as f64
        }
    }

    /// `-ln` of [`escape_probability`](Self::escape_probability).
    pub fn escape_nll(&self) -> f64 {
        -self.escape_probability().ln()
    }

    /// Mass left for seen keys, `S / (N + S)`.
    pub fn seen_weight(&self) -> f64 {
        if self.distinct + self.total == 0 {
            0.0
        } else {
            self.total as f64 / (self.distinct + self.total) as f64
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (&K, u64)> {
        self.counts.iter().map(|(k, &c)| (k, c))
    }

    /// Recounts `N` and `S` from the stored counts.
    pub fn recount(&self) -> (u64, u64) {
        self.counts
            .values()
            .fold((0, 0), |(n, s), &c| (n + u64::from(c > 0), s + c))
    }
}
