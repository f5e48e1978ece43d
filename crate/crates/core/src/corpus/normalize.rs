use std::collections::{HashMap, HashSet};
use std::sync::LazyLock;

use regex::Regex;
use unicode_general_category::{get_general_category, GeneralCategory};
use unicode_normalization::char::is_combining_mark;
use unicode_normalization::UnicodeNormalization;

use super::markdown::strip_markdown;
use crate::error::{Error, Result};
use crate::lists::WordList;

/// Which of the six normalization steps run. Stopword removal always runs
/// (an empty stopword list makes it a no-op).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Steps {
    pub lowercase: bool,
    pub markdown: bool,
    pub diacritics: bool,
    pub urls: bool,
    pub punctuation: bool,
    pub repeats: bool,
}

impl Default for Steps {
    fn default() -> Self {
        Steps {
            lowercase: true,
            markdown: true,
            diacritics: true,
            urls: true,
            punctuation: true,
            repeats: true,
        }
    }
}

#[derive(Debug, Clone)]
pub struct NormalizationConfig {
    stopwords: HashSet<String>,
    smilies: HashSet<String>,
    /// Smilies indexed for placeholder substitution, in sorted order.
    smiley_index: HashMap<String, char>,
    smiley_by_placeholder: HashMap<char, String>,
    max_char_repeat: usize,
    steps: Steps,
    stopwords_hash: String,
    smilies_hash: String,
}

const PLACEHOLDER_BASE: u32 = 0xF_0000;

fn is_placeholder(c: char) -> bool {
    (PLACEHOLDER_BASE..=0xF_FFFD).contains(&(c as u32))
}

impl NormalizationConfig {
    /// Build a configuration. Smilies are lowercased and have their repeats
    /// collapsed so they survive the later steps verbatim; stopwords are
    /// lowercased and stripped of apostrophes to match normalized tokens.
    pub fn new(stopwords: &WordList, smilies: &WordList, max_char_repeat: usize, steps: Steps) -> Result<Self> {
        if max_char_repeat == 0 {
            return Err(Error::Config("max_char_repeat must be at least 1".into()));
        }
        if steps.punctuation && smilies.is_empty() {
            return Err(Error::Config(
                "smiley list must be nonempty when punctuation removal is enabled".into(),
            ));
        }
        let mut smiley_list: Vec<String> = smilies
            .iter()
            .map(|s| collapse_repeats(&s.to_lowercase(), max_char_repeat))
            .filter(|s| !s.chars().any(char::is_whitespace))
            .collect();
        smiley_list.sort();
        smiley_list.dedup();
        if smiley_list.len() > (0xF_FFFD - PLACEHOLDER_BASE) as usize {
            return Err(Error::Config("too many smilies".into()));
        }
        let smiley_index: HashMap<String, char> = smiley_list
            .iter()
            .enumerate()
            .map(|(i, s)| (s.clone(), char::from_u32(PLACEHOLDER_BASE + i as u32).unwrap()))
            .collect();
        let smiley_by_placeholder = smiley_index.iter().map(|(s, &c)| (c, s.clone())).collect();
        let stopwords_hash = stopwords.hash();
        let stopwords = stopwords
            .iter()
            .map(|w| w.to_lowercase().chars().filter(|c| !is_apostrophe(*c)).collect())
            .collect();
        Ok(NormalizationConfig {
            stopwords,
            smilies: smiley_list.into_iter().collect(),
            smiley_index,
            smiley_by_placeholder,
            max_char_repeat,
            steps,
            stopwords_hash,
            smilies_hash: smilies.hash(),
        })
    }

    /// Default lists, repeat limit 3, all steps on.
    pub fn with_defaults() -> Self {
        Self::new(
            &WordList::default_stopwords(),
            &WordList::default_smilies(),
            3,
            Steps::default(),
        )
        .expect("bundled lists are valid")
    }

    pub fn max_char_repeat(&self) -> usize {
        self.max_char_repeat
    }

    pub fn steps(&self) -> Steps {
        self.steps
    }

    pub fn is_stopword(&self, token: &str) -> bool {
        self.stopwords.contains(token)
    }

    pub fn is_smiley(&self, token: &str) -> bool {
        self.smilies.contains(token)
    }

    pub fn smilies(&self) -> impl Iterator<Item = &str> {
        self.smilies.iter().map(String::as_str)
    }

    pub fn stopwords_hash(&self) -> &str {
        &self.stopwords_hash
    }

    pub fn smilies_hash(&self) -> &str {
        &self.smilies_hash
    }
}

fn is_apostrophe(c: char) -> bool {
    matches!(c, '\'' | '\u{2019}' | '\u{2018}' | '\u{02BC}')
}

fn is_punctuation(c: char) -> bool {
    if c.is_ascii() {
        return c.is_ascii_punctuation();
    }
    matches!(
        get_general_category(c),
        GeneralCategory::ConnectorPunctuation
            | GeneralCategory::DashPunctuation
            | GeneralCategory::OpenPunctuation
            | GeneralCategory::ClosePunctuation
            | GeneralCategory::InitialPunctuation
            | GeneralCategory::FinalPunctuation
            | GeneralCategory::OtherPunctuation
    )
}

static URL: LazyLock<Regex> = LazyLock::new(|| Regex::new(r#"(?:(?:https?|ftp)://|www\.)[^\s<>"]+"#).unwrap());

/// Host part of a URL match, or `None` when it is not a plausible host name.
fn hostname(url: &str) -> Option<String> {
    let rest = match url.find("://") {
        Some(i) => &url[i + 3..],
        None => url,
    };
    let authority = rest.split(['/', '?', '#']).next().unwrap_or("");
    let authority = authority.rsplit('@').next().unwrap_or("");
    let host = authority.split(':').next().unwrap_or("");
    let host = host.trim_matches(|c: char| !c.is_alphanumeric());
    let valid = !host.is_empty()
        && host
            .split('.')
            .all(|l| !l.is_empty() && l.chars().all(|c| c.is_alphanumeric() || c == '-'));
    valid.then(|| host.to_lowercase())
}

/// `label.label.tld` (alphabetic TLD of two or more letters) or a dotted quad.
/// Such words keep their dots through punctuation removal, which makes
/// hostnames emitted by the URL step stable under re-normalization.
fn is_hostname_shaped(word: &str) -> bool {
    let labels: Vec<&str> = word.split('.').collect();
    if labels.len() < 2 {
        return false;
    }
    let label_ok = |l: &&str| {
        !l.is_empty() && l.chars().all(|c| c.is_alphanumeric() || c == '-') && !l.starts_with('-') && !l.ends_with('-')
    };
    if !labels.iter().all(label_ok) {
        return false;
    }
    let tld = labels[labels.len() - 1];
    let alpha_tld = tld.chars().count() >= 2 && tld.chars().all(char::is_alphabetic);
    let dotted_quad = labels.len() == 4 && labels.iter().all(|l| l.chars().all(|c| c.is_ascii_digit()));
    alpha_tld || dotted_quad
}

/// Shorten every run of one character to at most `max` characters.
pub(crate) fn collapse_repeats(s: &str, max: usize) -> String {
    let mut out = String::with_capacity(s.len());
    let mut prev = None;
    let mut run = 0;
    for c in s.chars() {
        if Some(c) == prev {
            run += 1;
        } else {
            prev = Some(c);
            run = 1;
        }
        if run <= max {
            out.push(c);
        }
    }
    out
}

/// Compose, then drop every combining mark that did not fold into a
/// precomposed character.
fn strip_stacked_diacritics(s: &str) -> String {
    s.nfc().filter(|&c| !is_combining_mark(c)).collect()
}

enum Piece {
    Text(String),
    Host(String),
}

impl NormalizationConfig {
    fn protect_smilies(&self, text: &str) -> String {
        let mut out = String::with_capacity(text.len());
        let mut word = String::new();
        let flush = |word: &mut String, out: &mut String| {
            match self.smiley_index.get(word.as_str()) {
                Some(&p) => out.push(p),
                None => out.push_str(word),
            }
            word.clear();
        };
        for c in text.chars() {
            if c.is_whitespace() {
                flush(&mut word, &mut out);
                out.push(c);
            } else {
                word.push(c);
            }
        }
        flush(&mut word, &mut out);
        out
    }

    fn restore_smilies(&self, text: &str) -> String {
        let mut out = String::with_capacity(text.len());
        for c in text.chars() {
            match self.smiley_by_placeholder.get(&c) {
                Some(s) => {
                    out.push(' ');
                    out.push_str(s);
                    out.push(' ');
                }
                None => out.push(c),
            }
        }
        out
    }

    fn strip_punctuation(&self, word: &str, out: &mut Vec<String>) {
        if self.smilies.contains(word) {
            out.push(word.to_owned());
            return;
        }
        let trimmed = word.trim_matches(|c: char| is_punctuation(c) || is_apostrophe(c));
        if is_hostname_shaped(trimmed) {
            out.push(trimmed.to_owned());
            return;
        }
        let cleaned: String = word
            .chars()
            .filter(|&c| !is_apostrophe(c))
            .map(|c| if is_punctuation(c) { ' ' } else { c })
            .collect();
        out.extend(cleaned.split_whitespace().map(str::to_owned));
    }
}

/// Normalize one comment body into unigram tokens.
///
/// Steps, in order: lowercase; markdown removal; stacked diacritic removal;
/// URL to hostname; punctuation removal (smilies and hostnames kept);
/// repeated-character collapse; whitespace tokenization; stopword removal.
pub fn normalize(body: &str, cfg: &NormalizationConfig) -> Vec<String> {
    let steps = cfg.steps;
    // Private-use placeholders are reserved for smiley protection.
    let mut text: String = body.chars().filter(|&c| !is_placeholder(c)).collect();

    if steps.lowercase {
        text = text.to_lowercase();
    }
    if steps.markdown {
        let protected = cfg.protect_smilies(&text);
        text = cfg.restore_smilies(&strip_markdown(&protected));
    }
    if steps.diacritics {
        text = strip_stacked_diacritics(&text);
        if steps.lowercase {
            text = text.to_lowercase();
        }
    }

    let mut pieces = Vec::new();
    if steps.urls {
        let mut last = 0;
        for m in URL.find_iter(&text) {
            pieces.push(Piece::Text(text[last..m.start()].to_owned()));
            if let Some(h) = hostname(m.as_str()) {
                pieces.push(Piece::Host(h));
            }
            last = m.end();
        }
        pieces.push(Piece::Text(text[last..].to_owned()));
    } else {
        pieces.push(Piece::Text(text));
    }

    let mut words = Vec::new();
    for piece in pieces {
        match piece {
            Piece::Host(h) => words.push(h),
            Piece::Text(t) => {
                for w in t.split_whitespace() {
                    if steps.punctuation {
                        cfg.strip_punctuation(w, &mut words);
                    } else {
                        words.push(w.to_owned());
                    }
                }
            }
        }
    }

    words
        .into_iter()
        .map(|w| {
            if steps.repeats {
                collapse_repeats(&w, cfg.max_char_repeat)
            } else {
                w
            }
        })
        .filter(|w| !w.is_empty() && !cfg.stopwords.contains(w))
        .collect()
}
