//! Phoneme inventories.
//!
//! Symbols are stored as dense ids (`Phone`) in the order they were declared.
//! The end-of-word sentinel is out of band: its id is `len()`, one past the
//! last transcription symbol, so it can never collide with a character that
//! appears in a transcript (the default inventory uses `#` as a vowel).

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

/// Dense id of a transcription symbol or the sentinel.
pub type Phone = u8;

/// Most symbols an inventory may hold; one id is reserved for the sentinel.
pub const MAX_SYMBOLS: usize = u8::MAX as usize;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum InventoryError {
    #[error("line {line}: expected a single-character symbol, found {found:?}")]
    BadSymbol { line: usize, found: String },
    #[error("line {line}: unknown phoneme class {class:?}")]
    BadClass { line: usize, class: String },
    #[error("line {line}: symbol {symbol:?} declared twice")]
    Duplicate { line: usize, symbol: char },
    #[error("symbol {0:?} is whitespace and cannot be a phoneme")]
    Whitespace(char),
    #[error("inventory declares no symbols")]
    Empty,
    #[error("inventory declares more than {MAX_SYMBOLS} symbols")]
    TooLarge,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PhonemeClass {
    Consonant,
    Vowel,
    VowelR,
}

impl PhonemeClass {
    pub fn as_str(self) -> &'static str {
        match self {
            PhonemeClass::Consonant => "consonant",
            PhonemeClass::Vowel => "vowel",
            PhonemeClass::VowelR => "vowel+r",
        }
    }
}

impl FromStr for PhonemeClass {
    type Err = ();

    fn from_str(s: &str) -> Result<Self, ()> {
        match s {
            "consonant" => Ok(PhonemeClass::Consonant),
            "vowel" => Ok(PhonemeClass::Vowel),
            "vowel+r" => Ok(PhonemeClass::VowelR),
            _ => Err(()),
        }
    }
}

impl fmt::Display for PhonemeClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

const CONSONANTS: &str = "pbmtdnkgNfvTDszSZhcGlrywWLM~";
const VOWELS: &str = "IE&AaOU6ieuo9Q7";
const VOWELS_R: &str = "3R#%*()";

/// An ordered set of single-character transcription symbols.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PhonemeInventory {
    symbols: Vec<char>,
    classes: Vec<Option<PhonemeClass>>,
    index: HashMap<char, Phone>,
}

impl PhonemeInventory {
    /// Builds an inventory from a list of symbols with optional classes.
    pub fn new<I>(entries: I) -> Result<Self, InventoryError>
    where
        I: IntoIterator<Item = (char, Option<PhonemeClass>)>,
    {
        let mut inv = PhonemeInventory {
            symbols: Vec::new(),
            classes: Vec::new(),
            index: HashMap::new(),
        };
        for (i, (symbol, class)) in entries.into_iter().enumerate() {
            inv.push(i + 1, symbol, class)?;
        }
        if inv.symbols.is_empty() {
            return Err(InventoryError::Empty);
        }
        Ok(inv)
    }

    /// Unclassified inventory over the characters of `alphabet`, in order.
    pub fn from_chars(alphabet: &str) -> Result<Self, InventoryError> {
        Self::new(alphabet.chars().map(|c| (c, None)))
    }

    fn push(&mut self, line: usize, symbol: char, class: Option<PhonemeClass>) -> Result<(), InventoryError> {
        if symbol.is_whitespace() {
            return Err(InventoryError::Whitespace(symbol));
        }
        if self.index.contains_key(&symbol) {
            return Err(InventoryError::Duplicate { line, symbol });
        }
        if self.symbols.len() == MAX_SYMBOLS {
            return Err(InventoryError::TooLarge);
        }
        self.index.insert(symbol, self.symbols.len() as Phone);
        self.symbols.push(symbol);
        self.classes.push(class);
        Ok(())
    }

    /// The 50-symbol ASCII phonemic alphabet used by the child-directed
    /// speech corpus: 28 consonants, 15 vowels and 7 r-colored vowels.
    pub fn english() -> Self {
        let entries = CONSONANTS
            .chars()
            .map(|c| (c, Some(PhonemeClass::Consonant)))
            .chain(VOWELS.chars().map(|c| (c, Some(PhonemeClass::Vowel))))
            .chain(VOWELS_R.chars().map(|c| (c, Some(PhonemeClass::VowelR))));
        Self::new(entries).expect("built-in inventory is valid")
    }

    /// Parses the inventory file format: one symbol per line, optionally
    /// followed by whitespace and a class tag. Blank lines are ignored.
    pub fn parse(text: &str) -> Result<Self, InventoryError> {
        let mut inv = PhonemeInventory {
            symbols: Vec::new(),
            classes: Vec::new(),
            index: HashMap::new(),
        };
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let mut fields = raw.split_whitespace();
            let Some(sym) = fields.next() else { continue };
            let mut chars = sym.chars();
            let symbol = match (chars.next(), chars.next()) {
                (Some(c), None) => c,
                _ => {
                    return Err(InventoryError::BadSymbol {
                        line,
                        found: sym.to_string(),
                    })
                }
            };
            let class = match fields.next() {
                None => None,
                Some(tag) => Some(tag.parse().map_err(|_| InventoryError::BadClass {
                    line,
                    class: tag.to_string(),
                })?),
            };
            if let Some(extra) = fields.next() {
                return Err(InventoryError::BadClass {
                    line,
                    class: extra.to_string(),
                });
            }
            inv.push(line, symbol, class)?;
        }
        if inv.symbols.is_empty() {
            return Err(InventoryError::Empty);
        }
        Ok(inv)
    }

    /// Serializes to the inventory file format.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (sym, class) in self.symbols.iter().zip(&self.classes) {
            out.push(*sym);
            if let Some(class) = class {
                out.push(' ');
                out.push_str(class.as_str());
            }
            out.push('\n');
        }
        out
    }

    /// Number of transcription symbols (the sentinel is not counted).
    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    /// Id reserved for the end-of-word sentinel.
    pub fn sentinel(&self) -> Phone {
        self.symbols.len() as Phone
    }

    pub fn lookup(&self, symbol: char) -> Option<Phone> {
        self.index.get(&symbol).copied()
    }

    /// Character for a symbol id, or `None` for the sentinel and out-of-range ids.
    pub fn symbol(&self, phone: Phone) -> Option<char> {
        self.symbols.get(phone as usize).copied()
    }

    pub fn class(&self, phone: Phone) -> Option<PhonemeClass> {
        self.classes.get(phone as usize).copied().flatten()
    }

    pub fn symbols(&self) -> &[char] {
        &self.symbols
    }

    /// Encodes a string of symbols, returning the offending character on failure.
    pub fn encode(&self, text: &str) -> Result<Vec<Phone>, char> {
        text.chars().map(|c| self.lookup(c).ok_or(c)).collect()
    }

    /// Decodes symbol ids back into text. Panics on ids outside the inventory.
    pub fn decode(&self, phones: &[Phone]) -> String {
        phones.iter().map(|&p| self.symbols[p as usize]).collect()
    }
}

impl Default for PhonemeInventory {
    fn default() -> Self {
        Self::english()
    }
}
