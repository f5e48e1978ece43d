use std::collections::BTreeSet;

use rand::distributions::{Distribution as _, WeightedIndex};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::GroundTruthLink;
use crate::corpus::{ProfileKey, RawComment};
use crate::error::{Error, Result};
use crate::lists::WordList;

/// Parameters of the synthetic two-community corpus.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthConfig {
    pub users: usize,
    pub topics: usize,
    pub comments_per_user: usize,
    pub min_len: usize,
    pub max_len: usize,
    /// Mean weight of a user's personal vocabulary in their text; each user
    /// draws their own weight around it.
    pub idiosyncrasy: f64,
    /// Weight of each community's own topic ranking against the ranking
    /// both communities share.
    pub community_shift: f64,
    pub words_per_topic: usize,
    pub style_vocab: usize,
    pub personal_words: usize,
    pub seed: u64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig {
            users: 500,
            topics: 20,
            comments_per_user: 60,
            min_len: 8,
            max_len: 24,
            idiosyncrasy: 0.15,
            community_shift: 0.2,
            words_per_topic: 150,
            style_vocab: 3000,
            personal_words: 40,
            seed: 42,
        }
    }
}

impl SynthConfig {
    fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidArgument(m.into()));
        if self.users < 2 {
            return bad("need at least 2 users");
        }
        if self.topics < 2 {
            return bad("need at least 2 topics");
        }
        if self.comments_per_user < 2 {
            return bad("each user needs at least 2 comments");
        }
        if self.min_len == 0 || self.min_len > self.max_len {
            return bad("comment lengths must satisfy 1 <= min_len <= max_len");
        }
        if !(0.0..=1.0).contains(&self.idiosyncrasy) {
            return bad("idiosyncrasy must lie in [0, 1]");
        }
        if !(0.0..=1.0).contains(&self.community_shift) {
            return bad("community_shift must lie in [0, 1]");
        }
        if self.words_per_topic == 0 || self.personal_words == 0 || self.personal_words > self.style_vocab {
            return bad("vocabulary sizes must be positive and personal_words <= style_vocab");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SynthCorpus {
    pub a: Vec<RawComment>,
    pub b: Vec<RawComment>,
    pub links: Vec<GroundTruthLink>,
}

pub const COMMUNITY_A: &str = "a";
pub const COMMUNITY_B: &str = "b";

const SYLLABLES: [&str; 40] = [
    "ba", "ke", "lo", "mi", "nu", "pa", "re", "si", "to", "vu", "da", "fe", "gi", "ho", "ju", "ka", "le", "mo", "ni",
    "pu", "ra", "se", "ti", "vo", "za", "bi", "de", "fo", "gu", "ha", "ji", "ku", "la", "me", "no", "pi", "ro", "su",
    "te", "vi",
];

/// Distinct pronounceable words that survive normalization unchanged.
struct WordMint {
    next: usize,
    seen: BTreeSet<String>,
    stopwords: WordList,
}

impl WordMint {
    fn new() -> Self {
        WordMint {
            next: 0,
            seen: BTreeSet::new(),
            stopwords: WordList::default_stopwords(),
        }
    }

    fn word(&mut self) -> String {
        loop {
            let mut i = self.next;
            self.next += 1;
            let mut w = String::new();
            for _ in 0..3 {
                w.push_str(SYLLABLES[i % SYLLABLES.len()]);
                i /= SYLLABLES.len();
            }
            while i > 0 {
                w.push_str(SYLLABLES[i % SYLLABLES.len()]);
                i /= SYLLABLES.len();
            }
            if !self.stopwords.iter().any(|s| s == w) && self.seen.insert(w.clone()) {
                return w;
            }
        }
    }
}

fn zipf_weights(n: usize) -> Vec<f64> {
    (1..=n).map(|r| 1.0 / r as f64).collect()
}

fn topic_ranks(n: usize, rng: &mut ChaCha8Rng) -> Vec<usize> {
    let mut ranks: Vec<usize> = (0..n).collect();
    ranks.shuffle(rng);
    ranks
}

/// Community language: a skewed mixture over topic vocabularies, blending a
/// ranking of topics shared by all communities with the community's own.
struct Community {
    words: Vec<String>,
    index: WeightedIndex<f64>,
}

impl Community {
    fn new(topic_words: &[Vec<String>], shared: &[usize], shift: f64, rng: &mut ChaCha8Rng) -> Result<Self> {
        let own = topic_ranks(topic_words.len(), rng);
        let norm: f64 = zipf_weights(topic_words.len()).iter().sum();
        let mut words = Vec::new();
        let mut weights = Vec::new();
        for t in 0..topic_words.len() {
            let topic_weight = ((1.0 - shift) / (shared[t] + 1) as f64 + shift / (own[t] + 1) as f64) / norm;
            for (w, z) in topic_words[t].iter().zip(zipf_weights(topic_words[t].len())) {
                words.push(w.clone());
                weights.push(topic_weight * z);
            }
        }
        let index = WeightedIndex::new(&weights).map_err(|e| Error::InvalidArgument(e.to_string()))?;
        Ok(Community { words, index })
    }
}

/// Generate two communities whose users each post in both.
///
/// Every token of a user's comment comes from their personal vocabulary with
/// probability `w_u` and from the community language otherwise, where
/// `w_u = idiosyncrasy * U(0.25, 1.75)` clipped to `[0, 1]`. Comments are
/// split between the communities at random, at least one in each.
pub fn synth_corpus(cfg: &SynthConfig) -> Result<SynthCorpus> {
    cfg.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut mint = WordMint::new();

    let topic_words: Vec<Vec<String>> = (0..cfg.topics)
        .map(|_| (0..cfg.words_per_topic).map(|_| mint.word()).collect())
        .collect();
    let style: Vec<String> = (0..cfg.style_vocab).map(|_| mint.word()).collect();
    let shared = topic_ranks(cfg.topics, &mut rng);
    let communities = [
        Community::new(&topic_words, &shared, cfg.community_shift, &mut rng)?,
        Community::new(&topic_words, &shared, cfg.community_shift, &mut rng)?,
    ];
    let personal_zipf = zipf_weights(cfg.personal_words);
    let personal_index = WeightedIndex::new(&personal_zipf).map_err(|e| Error::InvalidArgument(e.to_string()))?;

    let width = (cfg.users - 1).to_string().len();
    let mut out = [Vec::new(), Vec::new()];
    let mut links = Vec::with_capacity(cfg.users);
    for u in 0..cfg.users {
        let author = format!("user{u:0width$}");
        let weight = (cfg.idiosyncrasy * rng.gen_range(0.25..1.75)).clamp(0.0, 1.0);
        let personal: Vec<&String> = style.choose_multiple(&mut rng, cfg.personal_words).collect();
        for n in 0..cfg.comments_per_user {
            let side = match n {
                0 => 0,
                1 => 1,
                _ => rng.gen_range(0..2),
            };
            let len = rng.gen_range(cfg.min_len..=cfg.max_len);
            let tokens: Vec<&str> = (0..len)
                .map(|_| {
                    if rng.gen::<f64>() < weight {
                        personal[personal_index.sample(&mut rng)].as_str()
                    } else {
                        let c = &communities[side];
                        c.words[c.index.sample(&mut rng)].as_str()
                    }
                })
                .collect();
            out[side].push(RawComment {
                author_id: author.clone(),
                community_id: [COMMUNITY_A, COMMUNITY_B][side].to_string(),
                body: tokens.join(" "),
                created_at: Some((u * cfg.comments_per_user + n) as i64),
            });
        }
        links.push(GroundTruthLink {
            source: ProfileKey::new(&author, COMMUNITY_A),
            target: ProfileKey::new(&author, COMMUNITY_B),
            same_user: true,
        });
    }
    let [a, b] = out;
    Ok(SynthCorpus { a, b, links })
}
