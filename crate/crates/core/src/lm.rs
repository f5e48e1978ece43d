//! Unigram language models and sparse probability distributions.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::corpus::{ProfileKey, TokenStream};
use crate::error::{Error, Result};

/// Token counts of one profile, community, or the whole corpus.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct UnigramModel {
    counts: BTreeMap<String, u64>,
    total: u64,
}

impl UnigramModel {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_tokens<I, S>(tokens: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let mut m = Self::new();
        for t in tokens {
            m.add(t.as_ref(), 1);
        }
        m
    }

    /// Zero counts are ignored so that the support stays exact.
    pub fn from_counts<I, S>(counts: I) -> Self
    where
        I: IntoIterator<Item = (S, u64)>,
        S: Into<String>,
    {
        let mut m = Self::new();
        for (t, c) in counts {
            if c > 0 {
                *m.counts.entry(t.into()).or_default() += c;
                m.total += c;
            }
        }
        m
    }

    pub fn add(&mut self, token: &str, count: u64) {
        if count == 0 {
            return;
        }
        match self.counts.get_mut(token) {
            Some(c) => *c += count,
            None => {
                self.counts.insert(token.to_owned(), count);
            }
        }
        self.total += count;
    }

    pub fn merge(&mut self, other: &UnigramModel) {
        for (t, &c) in &other.counts {
            self.add(t, c);
        }
    }

    pub fn count(&self, token: &str) -> u64 {
        self.counts.get(token).copied().unwrap_or(0)
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn support_size(&self) -> usize {
        self.counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.total == 0
    }

    pub fn counts(&self) -> &BTreeMap<String, u64> {
        &self.counts
    }

    /// Relative frequencies `count / total`.
    pub fn to_distribution(&self) -> Result<Distribution> {
        if self.total == 0 {
            return Err(Error::EmptyModel);
        }
        let total = self.total as f64;
        let probs = self
            .counts
            .iter()
            .map(|(t, &c)| (t.clone(), c as f64 / total))
            .collect();
        Ok(Distribution { probs })
    }

    /// The `k` most frequent tokens, ties broken by token ascending.
    pub fn top_k(&self, k: usize) -> Vec<(String, u64)> {
        let mut all: Vec<(&String, u64)> = self.counts.iter().map(|(t, &c)| (t, c)).collect();
        all.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(b.0)));
        all.into_iter().take(k).map(|(t, c)| (t.clone(), c)).collect()
    }
}

/// A sparse probability distribution over tokens. Stored sorted by token,
/// without zero entries.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Distribution {
    probs: BTreeMap<String, f64>,
}

impl Distribution {
    /// Build from weights, dropping non-positive entries and normalizing.
    pub fn from_weights<I, S>(weights: I) -> Result<Self>
    where
        I: IntoIterator<Item = (S, f64)>,
        S: Into<String>,
    {
        let mut probs: BTreeMap<String, f64> = BTreeMap::new();
        for (t, w) in weights {
            if !w.is_finite() || w < 0.0 {
                return Err(Error::InvalidArgument(format!("invalid weight {w}")));
            }
            if w > 0.0 {
                *probs.entry(t.into()).or_default() += w;
            }
        }
        let total: f64 = probs.values().sum();
        if total <= 0.0 {
            return Err(Error::EmptyModel);
        }
        for p in probs.values_mut() {
            *p /= total;
        }
        Ok(Distribution { probs })
    }

    pub fn point(token: impl Into<String>) -> Self {
        Distribution {
            probs: [(token.into(), 1.0)].into(),
        }
    }

    pub fn prob(&self, token: &str) -> f64 {
        self.probs.get(token).copied().unwrap_or(0.0)
    }

    pub fn support_size(&self) -> usize {
        self.probs.len()
    }

    /// Entries in ascending token order.
    pub fn iter(&self) -> impl ExactSizeIterator<Item = (&str, f64)> {
        self.probs.iter().map(|(t, &p)| (t.as_str(), p))
    }

    pub fn total_mass(&self) -> f64 {
        self.probs.values().sum()
    }
}

/// All models built from a set of token streams.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ModelSet {
    pub profiles: BTreeMap<ProfileKey, UnigramModel>,
    pub communities: BTreeMap<String, UnigramModel>,
    pub global: UnigramModel,
}

impl ModelSet {
    /// Profiles of one community, in key order.
    pub fn community_profiles(&self, community: &str) -> Vec<(&ProfileKey, &UnigramModel)> {
        self.profiles.iter().filter(|(k, _)| k.community == community).collect()
    }
}

/// Aggregate token streams into profile, community and global models.
///
/// Profile models are counted in parallel; community and global models are
/// merged in sorted key order, so the result does not depend on scheduling.
pub fn build_models<'a, I>(streams: I) -> ModelSet
where
    I: IntoIterator<Item = &'a TokenStream>,
{
    let streams: Vec<&TokenStream> = streams.into_iter().collect();
    let built: Vec<(ProfileKey, UnigramModel)> = streams
        .par_iter()
        .map(|s| (s.key.clone(), UnigramModel::from_tokens(&s.tokens)))
        .collect();

    let mut profiles: BTreeMap<ProfileKey, UnigramModel> = BTreeMap::new();
    for (k, m) in built {
        profiles.entry(k).or_default().merge(&m);
    }
    let mut communities: BTreeMap<String, UnigramModel> = BTreeMap::new();
    for (k, m) in &profiles {
        communities.entry(k.community.clone()).or_default().merge(m);
    }
    let mut global = UnigramModel::new();
    for m in communities.values() {
        global.merge(m);
    }
    ModelSet {
        profiles,
        communities,
        global,
    }
}
