//! Comment ingestion, text normalization and profile filtering.

mod filter;
mod ingest;
mod markdown;
mod normalize;

use serde::{Deserialize, Serialize};

pub use filter::{filter_interesting, FilterStats};
pub use ingest::{ingest_jsonl, ingest_path, write_jsonl, Ingested, Strictness};
pub use markdown::strip_markdown;
pub use normalize::{normalize, NormalizationConfig, Steps};

/// One raw comment as read from a corpus file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RawComment {
    pub author_id: String,
    pub community_id: String,
    pub body: String,
    pub created_at: Option<i64>,
}

/// A pseudonymous profile: one author within one community.
///
/// Ordered by community first so that sorted key sets group profiles of the
/// same community together.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ProfileKey {
    pub community: String,
    pub author: String,
}

impl ProfileKey {
    pub fn new(author: impl Into<String>, community: impl Into<String>) -> Self {
        ProfileKey {
            community: community.into(),
            author: author.into(),
        }
    }
}

impl std::fmt::Display for ProfileKey {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}/{}", self.community, self.author)
    }
}

/// Normalized tokens of one profile, in source order, plus the number of
/// comments they came from.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TokenStream {
    pub key: ProfileKey,
    pub comments: usize,
    pub tokens: Vec<String>,
}

/// Normalize every comment and concatenate the results per profile.
///
/// Comments are normalized in parallel; the per-profile token order follows
/// the input order of the comments regardless of scheduling.
pub fn build_streams(
    comments: &[RawComment],
    cfg: &NormalizationConfig,
) -> std::collections::BTreeMap<ProfileKey, TokenStream> {
    use rayon::prelude::*;

    let normalized: Vec<Vec<String>> = comments.par_iter().map(|c| normalize(&c.body, cfg)).collect();

    let mut out: std::collections::BTreeMap<ProfileKey, TokenStream> = Default::default();
    for (c, tokens) in comments.iter().zip(normalized) {
        let key = ProfileKey::new(&c.author_id, &c.community_id);
        let entry = out.entry(key.clone()).or_insert_with(|| TokenStream {
            key,
            comments: 0,
            tokens: Vec::new(),
        });
        entry.comments += 1;
        entry.tokens.extend(tokens);
    }
    out
}
