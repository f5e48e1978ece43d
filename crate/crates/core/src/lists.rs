//! Plain-text word lists (stopwords, smilies).
//!
//! One entry per line; blank lines and lines starting with `#` are ignored.

use std::collections::BTreeSet;
use std::path::Path;

use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

pub const DEFAULT_STOPWORDS: &str = include_str!("../data/stopwords.txt");
pub const DEFAULT_SMILIES: &str = include_str!("../data/smilies.txt");

/// An ordered, deduplicated word list.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct WordList {
    entries: BTreeSet<String>,
}

impl WordList {
    pub fn parse(text: &str) -> Self {
        let entries = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
            .map(str::to_owned)
            .collect();
        WordList { entries }
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Ok(Self::parse(&text))
    }

    pub fn default_stopwords() -> Self {
        Self::parse(DEFAULT_STOPWORDS)
    }

    pub fn default_smilies() -> Self {
        Self::parse(DEFAULT_SMILIES)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &str> {
        self.entries.iter().map(String::as_str)
    }

    /// SHA-256 over the sorted entries joined by `\n`, hex encoded.
    pub fn hash(&self) -> String {
        let mut h = Sha256::new();
        for (i, e) in self.entries.iter().enumerate() {
            if i > 0 {
                h.update(b"\n");
            }
            h.update(e.as_bytes());
        }
        hex::encode(h.finalize())
    }
}

impl FromIterator<String> for WordList {
    fn from_iter<I: IntoIterator<Item = String>>(iter: I) -> Self {
        WordList {
            entries: iter.into_iter().collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn comments_and_blanks_are_skipped() {
        let l = WordList::parse("# header\n\nthe\n  and \n#x\nthe\n");
        assert_eq!(l.iter().collect::<Vec<_>>(), vec!["and", "the"]);
    }

    #[test]
    fn hash_ignores_order_and_comments() {
        let a = WordList::parse("b\na\n");
        let b = WordList::parse("# c\na\nb\n");
        assert_eq!(a.hash(), b.hash());
        assert_ne!(a.hash(), WordList::parse("a\n").hash());
    }

    #[test]
    fn defaults_are_populated() {
        assert!(WordList::default_stopwords().len() > 400);
        assert!(WordList::default_smilies().len() > 150);
        assert!(WordList::default_stopwords().iter().any(|w| w == "see"));
    }
}
