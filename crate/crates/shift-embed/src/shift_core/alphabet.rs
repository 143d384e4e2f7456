use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Index of a symbol inside its alphabet.
pub type Sym = u32;

/// A finite word as a sequence of symbol indices.
pub type Word = Vec<Sym>;

pub const BLANK: &str = "*";

/// Ordered list of distinct symbol names.
#[derive(Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<String>", into = "Vec<String>")]
pub struct Alphabet {
    names: Vec<String>,
    #[serde(skip)]
    index: HashMap<String, Sym>,
}

impl fmt::Debug for Alphabet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(&self.names).finish()
    }
}

impl Alphabet {
    /// Builds an alphabet; rejects duplicates, empty names and the reserved blank.
    pub fn new<S: Into<String>>(names: impl IntoIterator<Item = S>) -> Result<Self> {
        let names: Vec<String> = names.into_iter().map(Into::into).collect();
        if names.iter().any(|n| n == BLANK) {
            return Err(Error::InvalidInput(format!(
                "symbol {BLANK:?} is reserved for blanks"
            )));
        }
        Self::build(names)
    }

    /// Builds an alphabet that may contain the blank symbol.
    pub fn with_blank<S: Into<String>>(names: impl IntoIterator<Item = S>) -> Result<Self> {
        Self::build(names.into_iter().map(Into::into).collect())
    }

    fn build(names: Vec<String>) -> Result<Self> {
        if names.is_empty() {
            return Err(Error::InvalidInput("alphabet is empty".into()));
        }
        let mut index = HashMap::with_capacity(names.len());
        for (i, n) in names.iter().enumerate() {
            if n.is_empty() || n.chars().any(char::is_whitespace) {
                return Err(Error::InvalidInput(format!("bad symbol name {n:?}")));
            }
            if index.insert(n.clone(), i as Sym).is_some() {
                return Err(Error::InvalidInput(format!("duplicate symbol {n:?}")));
            }
        }
        Ok(Alphabet { names, index })
    }

    /// The alphabet {0, 1, ..., k-1}.
    pub fn digits(k: usize) -> Self {
        Self::new((0..k).map(|i| i.to_string())).expect("digit names are distinct")
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, s: Sym) -> &str {
        &self.names[s as usize]
    }

    pub fn sym(&self, name: &str) -> Option<Sym> {
        self.index.get(name).copied()
    }

    pub fn symbols(&self) -> impl Iterator<Item = Sym> {
        0..self.names.len() as Sym
    }

    pub fn blank(&self) -> Option<Sym> {
        self.sym(BLANK)
    }

    fn compact(&self) -> bool {
        self.names.iter().all(|n| n.chars().count() == 1)
    }

    /// Renders a word; single-character alphabets concatenate, others use spaces.
    pub fn render(&self, w: &[Sym]) -> String {
        let sep = if self.compact() { "" } else { " " };
        w.iter()
            .map(|&s| self.name(s))
            .collect::<Vec<_>>()
            .join(sep)
    }

    /// Parses a word written as by [`Alphabet::render`].
    pub fn parse(&self, text: &str) -> Result<Word> {
        let text = text.trim();
        let tokens: Vec<String> = if self.compact() && !text.contains(char::is_whitespace) {
            text.chars().map(String::from).collect()
        } else {
            text.split_whitespace().map(String::from).collect()
        };
        tokens
            .iter()
            .enumerate()
            .map(|(i, t)| {
                self.sym(t).ok_or_else(|| {
                    Error::Malformed(format!("symbol {t:?} at position {i} is not in the alphabet"))
                })
            })
            .collect()
    }

    /// Appends the blank symbol.
    pub fn extend_with_blank(&self) -> Result<Alphabet> {
        if self.blank().is_some() {
            return Err(Error::InvalidInput("alphabet already has a blank".into()));
        }
        let mut names = self.names.clone();
        names.push(BLANK.to_string());
        Self::with_blank(names)
    }

    /// Alphabet whose symbols name the given words over `self`.
    pub fn of_words(&self, words: &[Word]) -> Result<Alphabet> {
        let sep = if self.compact() { "" } else { "." };
        Self::with_blank(words.iter().map(|w| {
            w.iter()
                .map(|&s| self.name(s))
                .collect::<Vec<_>>()
                .join(sep)
        }))
    }
}

impl TryFrom<Vec<String>> for Alphabet {
    type Error = Error;
    fn try_from(v: Vec<String>) -> Result<Self> {
        Alphabet::with_blank(v)
    }
}

impl From<Alphabet> for Vec<String> {
    fn from(a: Alphabet) -> Self {
        a.names
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_duplicates_and_blank() {
        assert!(Alphabet::new(["a", "a"]).is_err());
        assert!(Alphabet::new(["a", "*"]).is_err());
        assert!(Alphabet::new(Vec::<String>::new()).is_err());
        assert!(Alphabet::with_blank(["a", "*"]).unwrap().blank().is_some());
    }

    #[test]
    fn render_and_parse() {
        let a = Alphabet::new(["a", "b"]).unwrap();
        assert_eq!(a.parse("abba").unwrap(), vec![0, 1, 1, 0]);
        assert_eq!(a.render(&[1, 0]), "ba");
        let wide = Alphabet::new(["00", "01", "10"]).unwrap();
        assert_eq!(wide.parse("01 10").unwrap(), vec![1, 2]);
        assert_eq!(wide.render(&[0, 2]), "00 10");
        assert!(a.parse("abc").is_err());
    }
}
