//! Kullback-Leibler and Jensen-Shannon divergences (base 2) and the
//! square-root Jensen-Shannon distance.
//!
//! All sums run over the union support in ascending token order. That fixes
//! the floating point evaluation order, so results are bit-identical for
//! swapped arguments and across thread counts.

use std::cmp::Ordering;
use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::lm::Distribution;

/// `D_KL(P || Q)` in bits. Requires `support(P) ⊆ support(Q)`.
pub fn kl(p: &Distribution, q: &Distribution) -> Result<f64> {
    let mut sum = 0.0;
    for (t, pw) in p.iter() {
        let qw = q.prob(t);
        if qw <= 0.0 {
            return Err(Error::KlUndefined { token: t.to_owned() });
        }
        sum += pw * (pw / qw).log2();
    }
    Ok(sum)
}

/// Contribution of one token with masses `a` (own side) and `b` (other side)
/// to `KL(A || M)`, with `M = (A + B) / 2`.
#[inline]
fn half_term(a: f64, b: f64) -> f64 {
    if a > 0.0 {
        a * (2.0 * a / (a + b)).log2()
    } else {
        0.0
    }
}

#[inline]
fn pair_term(a: f64, b: f64) -> f64 {
    // IEEE addition is commutative, so pair_term(a, b) == pair_term(b, a).
    half_term(a, b) + half_term(b, a)
}

/// Sum pair terms over a merge of two sorted sparse sequences.
fn js_merge<K: Ord, I, J>(mut a: I, mut b: J) -> f64
where
    I: Iterator<Item = (K, f64)>,
    J: Iterator<Item = (K, f64)>,
{
    let mut sum = 0.0;
    let mut x = a.next();
    let mut y = b.next();
    loop {
        match (&x, &y) {
            (Some((ka, pa)), Some((kb, pb))) => match ka.cmp(kb) {
                Ordering::Less => {
                    sum += pair_term(*pa, 0.0);
                    x = a.next();
                }
                Ordering::Greater => {
                    sum += pair_term(0.0, *pb);
                    y = b.next();
                }
                Ordering::Equal => {
                    sum += pair_term(*pa, *pb);
                    x = a.next();
                    y = b.next();
                }
            },
            (Some((_, pa)), None) => {
                sum += pair_term(*pa, 0.0);
                x = a.next();
            }
            (None, Some((_, pb))) => {
                sum += pair_term(0.0, *pb);
                y = b.next();
            }
            (None, None) => break,
        }
    }
    (0.5 * sum).clamp(0.0, 1.0)
}

/// Jensen-Shannon divergence in bits, in `[0, 1]`.
pub fn js(p: &Distribution, q: &Distribution) -> f64 {
    js_merge(p.iter(), q.iter())
}

/// `sqrt(JS(P, Q))`, a metric on distributions with values in `[0, 1]`.
pub fn distance(p: &Distribution, q: &Distribution) -> f64 {
    js(p, q).sqrt()
}

/// Token interner. Ids follow ascending token order, so iterating an
/// [`IndexedDistribution`] by id visits tokens in the same order as the
/// string-keyed [`Distribution`] and yields bit-identical sums.
#[derive(Debug, Clone, Default)]
pub struct Vocabulary {
    ids: BTreeMap<String, u32>,
}

impl Vocabulary {
    pub fn from_distributions<'a, I>(dists: I) -> Self
    where
        I: IntoIterator<Item = &'a Distribution>,
    {
        let mut ids: BTreeMap<String, u32> = BTreeMap::new();
        for d in dists {
            for (t, _) in d.iter() {
                if !ids.contains_key(t) {
                    ids.insert(t.to_owned(), 0);
                }
            }
        }
        for (i, v) in ids.values_mut().enumerate() {
            *v = i as u32;
        }
        Vocabulary { ids }
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    /// Tokens missing from the vocabulary are an error.
    pub fn index(&self, d: &Distribution) -> Result<IndexedDistribution> {
        let mut ids = Vec::with_capacity(d.support_size());
        let mut probs = Vec::with_capacity(d.support_size());
        for (t, p) in d.iter() {
            let id = *self
                .ids
                .get(t)
                .ok_or_else(|| Error::InvalidArgument(format!("token {t:?} not in vocabulary")))?;
            ids.push(id);
            probs.push(p);
        }
        Ok(IndexedDistribution { ids, probs })
    }
}

/// A distribution stored as parallel id/probability vectors, sorted by id.
#[derive(Debug, Clone, PartialEq)]
pub struct IndexedDistribution {
    ids: Vec<u32>,
    probs: Vec<f64>,
}

impl IndexedDistribution {
    fn iter(&self) -> impl Iterator<Item = (u32, f64)> + '_ {
        self.ids.iter().copied().zip(self.probs.iter().copied())
    }

    pub fn support_size(&self) -> usize {
        self.ids.len()
    }
}

pub fn js_indexed(p: &IndexedDistribution, q: &IndexedDistribution) -> f64 {
    js_merge(p.iter(), q.iter())
}

pub fn distance_indexed(p: &IndexedDistribution, q: &IndexedDistribution) -> f64 {
    js_indexed(p, q).sqrt()
}
