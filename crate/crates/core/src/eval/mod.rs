//! Cross-community linkage experiment: distance statistics, candidate
//! ranking, precision@k, anonymous-subset bins and the matched-versus-average
//! scatter, plus a synthetic corpus with known ground truth.

mod synth;

use std::cmp::Ordering;
use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

pub use synth::{synth_corpus, SynthConfig, SynthCorpus, COMMUNITY_A, COMMUNITY_B};

use crate::anonymity::{CrossMatrix, DistanceMatrix};
use crate::corpus::ProfileKey;
use crate::error::{Error, Result};
use crate::lm::{Distribution, ModelSet};
use crate::metric::{distance, Vocabulary};

/// Default cutoffs for precision@k.
pub const DEFAULT_KS: [usize; 4] = [1, 5, 10, 20];

/// Width of the anonymous-subset-size bins.
pub const BIN_WIDTH: usize = 10;

/// A source profile in one community and a target profile in another.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct GroundTruthLink {
    pub source: ProfileKey,
    pub target: ProfileKey,
    pub same_user: bool,
}

/// Pair profiles of the two communities that share an author.
pub fn ground_truth_links(sources: &[ProfileKey], targets: &[ProfileKey]) -> Vec<GroundTruthLink> {
    let by_author: BTreeMap<&str, &ProfileKey> = targets.iter().map(|t| (t.author.as_str(), t)).collect();
    sources
        .iter()
        .filter_map(|s| {
            by_author.get(s.author.as_str()).map(|t| GroundTruthLink {
                source: s.clone(),
                target: (*t).clone(),
                same_user: true,
            })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DistanceStats {
    pub pairs: usize,
    pub min: f64,
    pub max: f64,
    pub mean: f64,
}

fn stats(values: impl Iterator<Item = f64>) -> Option<DistanceStats> {
    let (mut n, mut min, mut max, mut sum) = (0usize, f64::INFINITY, f64::NEG_INFINITY, 0.0);
    for v in values {
        n += 1;
        min = min.min(v);
        max = max.max(v);
        sum += v;
    }
    (n > 0).then(|| DistanceStats {
        pairs: n,
        min,
        max,
        mean: sum / n as f64,
    })
}

/// Statistics over all unordered pairs of distinct profiles in one community.
pub fn within_stats<K>(m: &DistanceMatrix<K>) -> Result<DistanceStats> {
    stats(m.upper().iter().copied()).ok_or_else(|| Error::InvalidArgument("need at least 2 profiles".into()))
}

/// Statistics over all pairs across two communities.
pub fn across_stats<R, C>(m: &CrossMatrix<R, C>) -> Result<DistanceStats> {
    if m.rows().len() + m.cols().len() < 2 {
        return Err(Error::InvalidArgument("need at least 2 profiles".into()));
    }
    stats(m.data().iter().copied()).ok_or_else(|| Error::InvalidArgument("need at least 2 profiles".into()))
}

/// Distance statistics for a set of models, or across two sets.
pub fn cross_distance_stats(a: &[Distribution], b: Option<&[Distribution]>) -> Result<DistanceStats> {
    let out = match b {
        None => stats(
            (0..a.len())
                .flat_map(|i| (i + 1..a.len()).map(move |j| (i, j)))
                .map(|(i, j)| distance(&a[i], &a[j])),
        ),
        Some(b) => {
            if a.len() + b.len() < 2 {
                None
            } else {
                stats(a.iter().flat_map(|p| b.iter().map(move |q| distance(p, q))))
            }
        }
    };
    out.ok_or_else(|| Error::InvalidArgument("need at least 2 profiles".into()))
}

fn by_distance_then_key<K: Ord>(a: (&K, f64), b: (&K, f64)) -> Ordering {
    a.1.total_cmp(&b.1).then_with(|| a.0.cmp(b.0))
}

/// Targets ordered by ascending distance to `source`, ties by key.
pub fn rank_candidates<K: Ord + Clone>(source: &Distribution, targets: &[(K, Distribution)]) -> Vec<(K, f64)> {
    let mut out: Vec<(K, f64)> = targets.iter().map(|(k, d)| (k.clone(), distance(source, d))).collect();
    out.sort_by(|a, b| by_distance_then_key((&a.0, a.1), (&b.0, b.1)));
    out
}

/// 1-based rank of column `t` in row `i` under the ranking order, without
/// sorting the row.
fn rank_of<R, C: Ord>(cross: &CrossMatrix<R, C>, i: usize, t: usize) -> usize {
    let row = cross.row(i);
    let cols = cross.cols();
    let key = (&cols[t], row[t]);
    1 + (0..cols.len())
        .filter(|&j| j != t && by_distance_then_key((&cols[j], row[j]), key) == Ordering::Less)
        .count()
}

/// Everything the experiment needs for one ordered community pair: the
/// distance matrix inside the source community, the cross matrix from
/// sources (rows) to targets (columns) and the true links.
#[derive(Debug, Clone)]
pub struct Linkage {
    pub within: DistanceMatrix<ProfileKey>,
    pub cross: CrossMatrix<ProfileKey, ProfileKey>,
    pub links: Vec<GroundTruthLink>,
    /// Profiles left out because their models were empty.
    pub skipped_empty: Vec<ProfileKey>,
}

/// Per-link positions into the matrices.
#[derive(Debug, Clone, Copy)]
struct LinkIdx {
    source: usize,
    target: usize,
}

impl Linkage {
    pub fn build(models: &ModelSet, community_a: &str, community_b: &str) -> Result<Self> {
        if community_a == community_b {
            return Err(Error::InvalidArgument("communities must differ".into()));
        }
        let mut skipped_empty = Vec::new();
        let mut collect = |c: &str| -> Result<(Vec<ProfileKey>, Vec<Distribution>)> {
            let mut keys = Vec::new();
            let mut dists = Vec::new();
            for (k, m) in models.community_profiles(c) {
                if m.is_empty() {
                    skipped_empty.push(k.clone());
                    continue;
                }
                keys.push(k.clone());
                dists.push(m.to_distribution()?);
            }
            if keys.is_empty() {
                return Err(Error::InvalidArgument(format!("community {c:?} has no profiles")));
            }
            Ok((keys, dists))
        };
        let (ka, da) = collect(community_a)?;
        let (kb, db) = collect(community_b)?;
        let vocab = Vocabulary::from_distributions(da.iter().chain(&db));
        let ia = da.iter().map(|d| vocab.index(d)).collect::<Result<Vec<_>>>()?;
        let ib = db.iter().map(|d| vocab.index(d)).collect::<Result<Vec<_>>>()?;
        let links = ground_truth_links(&ka, &kb);
        let within = DistanceMatrix::from_distributions(ka.clone(), &ia)?;
        let cross = CrossMatrix::from_distributions(ka, &ia, kb, &ib)?;
        Ok(Linkage {
            within,
            cross,
            links,
            skipped_empty,
        })
    }

    /// Assemble from precomputed matrices. Rows of `cross` must be the keys
    /// of `within`.
    pub fn from_parts(
        within: DistanceMatrix<ProfileKey>,
        cross: CrossMatrix<ProfileKey, ProfileKey>,
        links: Vec<GroundTruthLink>,
    ) -> Result<Self> {
        if within.keys() != cross.rows() {
            return Err(Error::InvalidArgument(
                "cross matrix rows must match the source matrix".into(),
            ));
        }
        let l = Linkage {
            within,
            cross,
            links,
            skipped_empty: Vec::new(),
        };
        l.indices()?;
        Ok(l)
    }

    fn indices(&self) -> Result<Vec<LinkIdx>> {
        let rows: BTreeMap<&ProfileKey, usize> = self.cross.rows().iter().enumerate().map(|(i, k)| (k, i)).collect();
        let cols: BTreeMap<&ProfileKey, usize> = self.cross.cols().iter().enumerate().map(|(i, k)| (k, i)).collect();
        self.links
            .iter()
            .filter(|l| l.same_user)
            .map(|l| {
                let source = *rows
                    .get(&l.source)
                    .ok_or_else(|| Error::UnknownProfile(l.source.to_string()))?;
                let target = *cols
                    .get(&l.target)
                    .ok_or_else(|| Error::UnknownProfile(l.target.to_string()))?;
                Ok(LinkIdx { source, target })
            })
            .collect()
    }

    fn true_links(&self) -> Result<Vec<LinkIdx>> {
        let idx = self.indices()?;
        if idx.is_empty() {
            return Err(Error::InvalidArgument("no ground-truth links".into()));
        }
        Ok(idx)
    }

    /// Fraction of true links whose target ranks within the top `k`.
    pub fn precision_at_k(&self, k: usize) -> Result<f64> {
        if k == 0 {
            return Err(Error::InvalidArgument("k must be at least 1".into()));
        }
        let idx = self.true_links()?;
        let hits = idx
            .iter()
            .filter(|l| rank_of(&self.cross, l.source, l.target) <= k)
            .count();
        Ok(hits as f64 / idx.len() as f64)
    }

    /// Per link: rank of the true target, matching distance and the size of
    /// the source's anonymous subset at that radius.
    pub fn link_details(&self) -> Result<Vec<LinkDetail>> {
        let idx = self.true_links()?;
        Ok(idx
            .iter()
            .map(|l| {
                let c = self.cross.get(l.source, l.target);
                LinkDetail {
                    source: self.cross.rows()[l.source].clone(),
                    target: self.cross.cols()[l.target].clone(),
                    matching_distance: c,
                    rank: rank_of(&self.cross, l.source, l.target),
                    anon_size: crate::anonymity::anonymous_subset_size(&self.within, l.source, c),
                }
            })
            .collect())
    }

    /// Precision@k per anonymous-subset-size bin.
    pub fn anon_vs_precision(&self, k: usize) -> Result<PrecisionReport> {
        if k == 0 {
            return Err(Error::InvalidArgument("k must be at least 1".into()));
        }
        Ok(bin_precision(&self.link_details()?, k))
    }

    /// One row per true link: average distance from the source to every
    /// non-matching target against the distance to the matching target.
    pub fn matched_vs_average_scatter(&self) -> Result<Scatter> {
        let idx = self.true_links()?;
        let nc = self.cross.cols().len();
        if nc < 2 {
            return Err(Error::InvalidArgument("need at least 2 target profiles".into()));
        }
        let rows: Vec<ScatterRow> = idx
            .iter()
            .map(|l| {
                let row = self.cross.row(l.source);
                let others: f64 = row
                    .iter()
                    .enumerate()
                    .filter(|&(j, _)| j != l.target)
                    .map(|(_, v)| v)
                    .sum();
                ScatterRow {
                    source: self.cross.rows()[l.source].clone(),
                    target: self.cross.cols()[l.target].clone(),
                    avg_nonmatching: others / (nc - 1) as f64,
                    matching: row[l.target],
                }
            })
            .collect();
        let below = rows.iter().filter(|r| r.matching < r.avg_nonmatching).count();
        Ok(Scatter {
            below_diagonal: below as f64 / rows.len() as f64,
            rows,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LinkDetail {
    pub source: ProfileKey,
    pub target: ProfileKey,
    pub matching_distance: f64,
    pub rank: usize,
    pub anon_size: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PrecisionBin {
    /// Inclusive bounds of the anonymous-subset sizes in this bin.
    pub lo: usize,
    pub hi: usize,
    pub pairs: usize,
    pub hits: usize,
    pub precision: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PrecisionReport {
    pub k: usize,
    /// Nonempty bins in ascending order.
    pub bins: Vec<PrecisionBin>,
}

/// Group links into bins `[1, 10]`, `[11, 20]`, ... by anonymous-subset size.
pub fn bin_precision(details: &[LinkDetail], k: usize) -> PrecisionReport {
    let mut acc: BTreeMap<usize, (usize, usize)> = BTreeMap::new();
    for d in details {
        let b = d.anon_size.saturating_sub(1) / BIN_WIDTH;
        let e = acc.entry(b).or_default();
        e.0 += 1;
        e.1 += (d.rank <= k) as usize;
    }
    PrecisionReport {
        k,
        bins: acc
            .into_iter()
            .map(|(b, (pairs, hits))| PrecisionBin {
                lo: b * BIN_WIDTH + 1,
                hi: (b + 1) * BIN_WIDTH,
                pairs,
                hits,
                precision: hits as f64 / pairs as f64,
            })
            .collect(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScatterRow {
    pub source: ProfileKey,
    pub target: ProfileKey,
    pub avg_nonmatching: f64,
    pub matching: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Scatter {
    pub rows: Vec<ScatterRow>,
    /// Fraction of rows with `matching < avg_nonmatching`.
    pub below_diagonal: f64,
}

fn average_ranks(x: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..x.len()).collect();
    order.sort_by(|&a, &b| x[a].total_cmp(&x[b]));
    let mut ranks = vec![0.0; x.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && x[order[j + 1]] == x[order[i]] {
            j += 1;
        }
        let r = (i + j) as f64 / 2.0 + 1.0;
        for &o in &order[i..=j] {
            ranks[o] = r;
        }
        i = j + 1;
    }
    ranks
}

/// Spearman rank correlation with average ranks for ties. `None` when either
/// side is constant or the lengths differ.
pub fn spearman(x: &[f64], y: &[f64]) -> Option<f64> {
    if x.len() != y.len() || x.len() < 2 {
        return None;
    }
    let (rx, ry) = (average_ranks(x), average_ranks(y));
    let n = x.len() as f64;
    let (mx, my) = (rx.iter().sum::<f64>() / n, ry.iter().sum::<f64>() / n);
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in rx.iter().zip(&ry) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx) * (a - mx);
        syy += (b - my) * (b - my);
    }
    (sxx > 0.0 && syy > 0.0).then(|| sxy / (sxx * syy).sqrt())
}
