use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{EntityModel, Universe};
use crate::error::{Error, Result};

const MASS_TOLERANCE: f64 = 1e-12;

/// Per-profile probability mass over the candidate models of a universe.
#[derive(Debug, Clone, PartialEq)]
pub struct Belief {
    universe: Universe,
    masses: BTreeMap<String, Vec<f64>>,
}

impl Belief {
    pub fn new(universe: Universe, masses: BTreeMap<String, Vec<f64>>) -> Result<Self> {
        for (p, m) in &masses {
            check_masses(m, universe.len()).map_err(|e| Error::Config(format!("belief for {p:?}: {e}")))?;
        }
        Ok(Belief { universe, masses })
    }

    /// Uniform mass over all candidates for each listed profile.
    pub fn uniform<I, S>(universe: Universe, profiles: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let n = universe.len();
        let masses = profiles
            .into_iter()
            .map(|p| (p.into(), vec![1.0 / n as f64; n]))
            .collect();
        Belief { universe, masses }
    }

    pub fn universe(&self) -> &Universe {
        &self.universe
    }

    pub fn slice(&self, profile: &str) -> Option<BeliefSlice<'_>> {
        self.masses.get(profile).map(|m| BeliefSlice {
            universe: &self.universe,
            masses: m.clone(),
        })
    }
}

fn check_masses(m: &[f64], n: usize) -> std::result::Result<(), String> {
    if m.len() != n {
        return Err(format!("expected {n} masses, got {}", m.len()));
    }
    if m.iter().any(|x| !x.is_finite() || *x < 0.0) {
        return Err("masses must be finite and nonnegative".into());
    }
    let total: f64 = m.iter().sum();
    if (total - 1.0).abs() > MASS_TOLERANCE {
        return Err(format!("masses sum to {total}, not 1"));
    }
    Ok(())
}

/// One profile's distribution over the universe's candidate models.
#[derive(Debug, Clone, PartialEq)]
pub struct BeliefSlice<'a> {
    universe: &'a Universe,
    masses: Vec<f64>,
}

impl<'a> BeliefSlice<'a> {
    pub fn new(universe: &'a Universe, masses: Vec<f64>) -> Result<Self> {
        check_masses(&masses, universe.len()).map_err(Error::Config)?;
        Ok(BeliefSlice { universe, masses })
    }

    pub fn masses(&self) -> &[f64] {
        &self.masses
    }

    pub fn universe(&self) -> &Universe {
        self.universe
    }

    /// Total mass of the models with `attr = value`.
    pub fn mass_where(&self, attr: &str, value: &str) -> f64 {
        self.universe
            .candidates()
            .iter()
            .zip(&self.masses)
            .filter(|(c, _)| c.values.get(attr) == Some(value))
            .map(|(_, m)| m)
            .sum()
    }

    /// Masses keyed by candidate id.
    pub fn by_id(&self) -> BTreeMap<String, f64> {
        self.universe
            .candidates()
            .iter()
            .zip(&self.masses)
            .map(|(c, &m)| (c.id.clone(), m))
            .collect()
    }
}

/// The adversary's likelihood model `Pr[observation | candidate]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum WorldKnowledge {
    /// No inference rules: the observed restricted model is taken as the
    /// whole model. Likelihood 1 for the identical candidate, 0 otherwise.
    Literal,
    /// Likelihood 1 for every candidate that agrees with the observation on
    /// the observed attributes, 0 otherwise.
    Consistent,
    /// Per-attribute emission tables
    /// `tables[attr][observed value][true value] = Pr[observed | true]`, with
    /// the true value `"NULL"` standing for NULL. Observed attributes without
    /// a table fall back to exact agreement; missing entries are 0.
    Emission {
        tables: BTreeMap<String, BTreeMap<String, BTreeMap<String, f64>>>,
    },
    /// Explicit likelihood per candidate id, independent of the observation.
    Table { likelihoods: BTreeMap<String, f64> },
}

impl WorldKnowledge {
    pub fn likelihood(&self, observed: &EntityModel, id: &str, candidate: &EntityModel) -> f64 {
        match self {
            WorldKnowledge::Literal => (candidate == observed) as u8 as f64,
            WorldKnowledge::Consistent => candidate.consistent_with(observed) as u8 as f64,
            WorldKnowledge::Emission { tables } => {
                let mut l = 1.0;
                for (attr, seen) in observed.values() {
                    let truth = candidate.get(attr).unwrap_or("NULL");
                    l *= match tables.get(attr) {
                        Some(t) => t.get(seen).and_then(|row| row.get(truth)).copied().unwrap_or(0.0),
                        None => (truth == seen) as u8 as f64,
                    };
                }
                l
            }
            WorldKnowledge::Table { likelihoods } => likelihoods.get(id).copied().unwrap_or(0.0),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Adversary {
    pub prior: Belief,
    pub knowledge: WorldKnowledge,
}

/// Published restricted models, one per observed profile.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Observation {
    pub published: BTreeMap<String, EntityModel>,
}

impl Observation {
    pub fn single(profile: impl Into<String>, model: EntityModel) -> Self {
        Observation {
            published: [(profile.into(), model)].into(),
        }
    }
}

/// Bayesian update of the adversary's belief about `profile`.
///
/// A profile missing from the observation is treated as having published
/// nothing (the all-NULL model).
pub fn posterior<'a>(adv: &'a Adversary, obs: &Observation, profile: &str) -> Result<BeliefSlice<'a>> {
    let prior = adv
        .prior
        .slice(profile)
        .ok_or_else(|| Error::UnknownProfile(profile.to_owned()))?;
    let empty = EntityModel::new();
    let observed = obs.published.get(profile).unwrap_or(&empty);
    let universe = adv.prior.universe();
    let weighted: Vec<f64> = universe
        .candidates()
        .iter()
        .zip(prior.masses())
        .map(|(c, &b)| {
            if b == 0.0 {
                0.0
            } else {
                adv.knowledge.likelihood(observed, &c.id, &c.values) * b
            }
        })
        .collect();
    let evidence: f64 = weighted.iter().sum();
    if !(evidence > 0.0) {
        return Err(Error::ZeroEvidence);
    }
    let masses = weighted.into_iter().map(|w| w / evidence).collect();
    Ok(BeliefSlice { universe, masses })
}
