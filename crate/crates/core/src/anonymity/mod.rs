//! d-convergence, (k,d)-anonymity, c-matching and the bounds on an
//! adversary that links entities by similarity alone.

mod matrix;

use serde::Serialize;

pub use matrix::{CrossMatrix, DistanceMatrix};

use crate::error::{Error, Result};

/// Slack for comparisons that hold exactly in real arithmetic but may be off
/// by rounding in floating point (triangle inequality on computed distances).
pub const ROUNDING_SLACK: f64 = 1e-12;

/// The maximal anonymous subset of `subject` at radius `d`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AnonymityResult<K> {
    pub subject: K,
    pub d: f64,
    /// Members in matrix order; always contains `subject`.
    pub members: Vec<K>,
    pub k: usize,
}

fn check_radius(d: f64) -> Result<()> {
    if (0.0..=1.0).contains(&d) {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("radius {d} outside [0, 1]")))
    }
}

fn locate<K: Ord + Clone + Send + Sync + std::fmt::Debug>(m: &DistanceMatrix<K>, key: &K) -> Result<usize> {
    m.position(key).ok_or_else(|| Error::UnknownProfile(format!("{key:?}")))
}

/// Every entity within distance `d` of `subject` (inclusive). This is the
/// largest collection that is d-convergent for `subject`.
pub fn convergent_subset<K>(m: &DistanceMatrix<K>, subject: &K, d: f64) -> Result<AnonymityResult<K>>
where
    K: Ord + Clone + Send + Sync + std::fmt::Debug,
{
    check_radius(d)?;
    let s = locate(m, subject)?;
    let members: Vec<K> = (0..m.len())
        .filter(|&j| m.get(s, j) <= d)
        .map(|j| m.keys()[j].clone())
        .collect();
    Ok(AnonymityResult {
        subject: subject.clone(),
        d,
        k: members.len(),
        members,
    })
}

/// Size of the anonymous subset of row `s` at radius `d`, without
/// materializing members.
pub fn anonymous_subset_size<K>(m: &DistanceMatrix<K>, s: usize, d: f64) -> usize {
    (0..m.len()).filter(|&j| m.get(s, j) <= d).count()
}

/// Whether `subject` is (k,d)-anonymous in the matrix's collection.
pub fn is_kd_anonymous<K>(m: &DistanceMatrix<K>, subject: &K, k: usize, d: f64) -> Result<bool>
where
    K: Ord + Clone + Send + Sync + std::fmt::Debug,
{
    if k == 0 {
        return Err(Error::InvalidArgument("k must be at least 1".into()));
    }
    Ok(convergent_subset(m, subject, d)?.k >= k)
}

/// `dist <= c`.
pub fn c_matches(dist: f64, c: f64) -> bool {
    dist <= c
}

/// Verify that a collection d-convergent for `anchor`, where `anchor`
/// c-matches `target`, (c+d)-matches `target`.
///
/// `within` holds distances among candidates, `cross` distances from
/// candidates (rows) to targets (columns). Errors if the preconditions do not
/// hold for the given inputs.
pub fn check_c_plus_d_match<K, C>(
    within: &DistanceMatrix<K>,
    cross: &CrossMatrix<K, C>,
    anchor: &K,
    subject_set: &[K],
    target: &C,
    c: f64,
    d: f64,
) -> Result<bool>
where
    K: Ord + Clone + Send + Sync + std::fmt::Debug,
    C: PartialEq + std::fmt::Debug,
{
    let a = locate(within, anchor)?;
    let t = cross
        .cols()
        .iter()
        .position(|x| x == target)
        .ok_or_else(|| Error::UnknownProfile(format!("{target:?}")))?;
    if cross.rows() != within.keys() {
        return Err(Error::InvalidArgument(
            "cross matrix rows must match the collection".into(),
        ));
    }
    if !c_matches(cross.get(a, t), c) {
        return Err(Error::Precondition(format!(
            "anchor is at distance {} from target, more than c = {c}",
            cross.get(a, t)
        )));
    }
    let mut rows = Vec::with_capacity(subject_set.len());
    for member in subject_set {
        let i = locate(within, member)?;
        if within.get(a, i) > d {
            return Err(Error::Precondition(format!(
                "{member:?} is at distance {} from the anchor, more than d = {d}",
                within.get(a, i)
            )));
        }
        rows.push(i);
    }
    Ok(rows.into_iter().all(|i| cross.get(i, t) <= c + d + ROUNDING_SLACK))
}

/// Likelihood that a similarity-only adversary picks a candidate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ChoiceLikelihood {
    /// `1 - dist(chosen) / sum(dist)`; a distribution only for two candidates.
    pub score: f64,
    /// `score / (n - 1)`; sums to one over all candidates.
    pub normalized: f64,
}

/// Choice likelihood of `chosen` given each candidate's distance to the target.
pub fn choice_likelihood(distances: &[f64], chosen: usize) -> Result<ChoiceLikelihood> {
    let n = distances.len();
    if n < 2 {
        return Err(Error::InvalidArgument("need at least two candidates".into()));
    }
    if chosen >= n {
        return Err(Error::InvalidArgument(format!("chosen index {chosen} out of range")));
    }
    let total: f64 = distances.iter().sum();
    if total <= 0.0 {
        return Err(Error::DegenerateChoice);
    }
    let score = 1.0 - distances[chosen] / total;
    Ok(ChoiceLikelihood {
        score,
        normalized: score / (n - 1) as f64,
    })
}

/// Choice likelihood using a cross matrix: `candidates` are row keys,
/// `target` a column key.
pub fn choice_likelihood_in<K, C>(
    cross: &CrossMatrix<K, C>,
    candidates: &[K],
    target: &C,
    chosen: &K,
) -> Result<ChoiceLikelihood>
where
    K: PartialEq + std::fmt::Debug,
    C: PartialEq + std::fmt::Debug,
{
    let t = cross
        .cols()
        .iter()
        .position(|x| x == target)
        .ok_or_else(|| Error::UnknownProfile(format!("{target:?}")))?;
    let mut dists = Vec::with_capacity(candidates.len());
    let mut chosen_idx = None;
    for (n, cand) in candidates.iter().enumerate() {
        let i = cross
            .rows()
            .iter()
            .position(|x| x == cand)
            .ok_or_else(|| Error::UnknownProfile(format!("{cand:?}")))?;
        if cand == chosen {
            chosen_idx = Some(n);
        }
        dists.push(cross.get(i, t));
    }
    let chosen_idx = chosen_idx.ok_or_else(|| Error::InvalidArgument(format!("{chosen:?} is not a candidate")))?;
    choice_likelihood(&dists, chosen_idx)
}

/// Upper bound on the linking likelihood of a (k,d)-anonymous entity that
/// c-matches its target.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MatchingBound {
    pub c: f64,
    pub d: f64,
    pub k: usize,
    pub t: f64,
}

/// `t = 1 - c / (c + (k - 1)(c + d))`.
pub fn matching_bound(c: f64, d: f64, k: usize) -> Result<MatchingBound> {
    if !c.is_finite() || !d.is_finite() {
        return Err(Error::InvalidArgument("c and d must be finite".into()));
    }
    if c == 0.0 {
        return Err(Error::ZeroMatchingDistance);
    }
    if c < 0.0 || d < 0.0 {
        return Err(Error::InvalidArgument("c must be positive and d nonnegative".into()));
    }
    if k == 0 {
        return Err(Error::InvalidArgument("k must be at least 1".into()));
    }
    let t = 1.0 - c / (c + (k - 1) as f64 * (c + d));
    Ok(MatchingBound { c, d, k, t })
}

/// The σ for which the matched pair is σ-unlinkable; equal to the bound `t`.
pub fn unlinkability_sigma(c: f64, d: f64, k: usize) -> Result<f64> {
    matching_bound(c, d, k).map(|b| b.t)
}
