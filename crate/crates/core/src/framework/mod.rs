//! Open-setting privacy framework on finite toy universes: entity models,
//! publication, Bayesian adversaries, privacy policies and the sensitivity of
//! attribute sets.

mod belief;
mod policy;
mod publish;
mod scenario;
mod semantic;

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use belief::{posterior, Adversary, Belief, BeliefSlice, Observation, WorldKnowledge};
pub use policy::{
    critical_sets, is_critical, is_sensitive, policy_satisfied, requirement_masses, sigma_satisfies, PrivacyPolicy,
    Requirement,
};
pub use publish::{publish, Perturbation, PublicationConfig};
pub use scenario::{run_scenario, PriorSpec, ProfileReport, RequirementReport, Scenario, ScenarioReport};
pub use semantic::{impossibility_demo, total_variation, ImpossibilityReport};

/// Attribute values of one entity. Attributes that are absent map to NULL.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct EntityModel {
    values: BTreeMap<String, String>,
}

impl EntityModel {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_pairs<I, A, V>(pairs: I) -> Self
    where
        I: IntoIterator<Item = (A, V)>,
        A: Into<String>,
        V: Into<String>,
    {
        EntityModel {
            values: pairs.into_iter().map(|(a, v)| (a.into(), v.into())).collect(),
        }
    }

    /// `None` is NULL.
    pub fn get(&self, attr: &str) -> Option<&str> {
        self.values.get(attr).map(String::as_str)
    }

    pub fn set(&mut self, attr: impl Into<String>, value: Option<String>) {
        let attr = attr.into();
        match value {
            Some(v) => {
                self.values.insert(attr, v);
            }
            None => {
                self.values.remove(&attr);
            }
        }
    }

    /// Attributes with a non-NULL value.
    pub fn domain(&self) -> BTreeSet<&str> {
        self.values.keys().map(String::as_str).collect()
    }

    pub fn values(&self) -> &BTreeMap<String, String> {
        &self.values
    }

    /// Keep `attrs`, NULL everywhere else. `attrs` must be nonempty.
    pub fn restrict(&self, attrs: &BTreeSet<String>) -> Result<EntityModel> {
        if attrs.is_empty() {
            return Err(Error::InvalidArgument(
                "restriction needs a nonempty attribute set".into(),
            ));
        }
        Ok(self.keep(|a| attrs.contains(a)))
    }

    /// NULL out `attrs`, keep the rest. Unlike [`restrict`](Self::restrict)
    /// this may produce the all-NULL model.
    pub fn without(&self, attrs: &BTreeSet<String>) -> EntityModel {
        self.keep(|a| !attrs.contains(a))
    }

    fn keep(&self, pred: impl Fn(&str) -> bool) -> EntityModel {
        EntityModel {
            values: self
                .values
                .iter()
                .filter(|(a, _)| pred(a))
                .map(|(a, v)| (a.clone(), v.clone()))
                .collect(),
        }
    }

    /// Whether this model agrees with `observed` on every non-NULL attribute
    /// of `observed`.
    pub fn consistent_with(&self, observed: &EntityModel) -> bool {
        observed.values.iter().all(|(a, v)| self.get(a) == Some(v.as_str()))
    }
}

/// A declared finite attribute set and candidate models over it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Universe {
    attributes: BTreeSet<String>,
    candidates: Vec<Candidate>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Candidate {
    pub id: String,
    #[serde(default)]
    pub values: EntityModel,
}

impl Universe {
    pub fn new(attributes: BTreeSet<String>, candidates: Vec<Candidate>) -> Result<Self> {
        let mut ids = BTreeSet::new();
        for c in &candidates {
            if !ids.insert(c.id.as_str()) {
                return Err(Error::Config(format!("duplicate candidate id {:?}", c.id)));
            }
            if let Some(a) = c.values.domain().into_iter().find(|a| !attributes.contains(*a)) {
                return Err(Error::Config(format!(
                    "candidate {:?} uses undeclared attribute {a:?}",
                    c.id
                )));
            }
        }
        if candidates.is_empty() {
            return Err(Error::Config("universe has no candidate models".into()));
        }
        Ok(Universe { attributes, candidates })
    }

    /// Every assignment of `values[a]` or NULL to each attribute, with ids
    /// `m0, m1, ...` in enumeration order.
    pub fn enumerate(values: &BTreeMap<String, Vec<String>>) -> Self {
        let mut models = vec![EntityModel::new()];
        for (attr, vals) in values {
            let mut next = Vec::with_capacity(models.len() * (vals.len() + 1));
            for m in &models {
                next.push(m.clone());
                for v in vals {
                    let mut m2 = m.clone();
                    m2.set(attr.clone(), Some(v.clone()));
                    next.push(m2);
                }
            }
            models = next;
        }
        models.sort();
        models.dedup();
        let candidates = models
            .into_iter()
            .enumerate()
            .map(|(i, values)| Candidate {
                id: format!("m{i}"),
                values,
            })
            .collect();
        Universe {
            attributes: values.keys().cloned().collect(),
            candidates,
        }
    }

    pub fn attributes(&self) -> &BTreeSet<String> {
        &self.attributes
    }

    pub fn candidates(&self) -> &[Candidate] {
        &self.candidates
    }

    pub fn len(&self) -> usize {
        self.candidates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.candidates.is_empty()
    }

    pub fn position(&self, model: &EntityModel) -> Option<usize> {
        self.candidates.iter().position(|c| &c.values == model)
    }

    pub fn position_of_id(&self, id: &str) -> Option<usize> {
        self.candidates.iter().position(|c| c.id == id)
    }

    pub fn check_model(&self, m: &EntityModel) -> Result<()> {
        match m.domain().into_iter().find(|a| !self.attributes.contains(*a)) {
            Some(a) => Err(Error::Config(format!("undeclared attribute {a:?}"))),
            None => Ok(()),
        }
    }
}

/// The profile models of one user.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct UserModel {
    profiles: BTreeMap<String, EntityModel>,
}

impl UserModel {
    pub fn new(profiles: BTreeMap<String, EntityModel>) -> Result<Self> {
        if profiles.is_empty() {
            return Err(Error::InvalidArgument("a user needs at least one profile".into()));
        }
        Ok(UserModel { profiles })
    }

    pub fn profiles(&self) -> &BTreeMap<String, EntityModel> {
        &self.profiles
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn attrs(xs: &[&str]) -> BTreeSet<String> {
        xs.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn restrict_examples() {
        let m = EntityModel::from_pairs([("name", "bob"), ("city", "x")]);
        let r = m.restrict(&attrs(&["name"])).unwrap();
        assert_eq!(r.get("name"), Some("bob"));
        assert_eq!(r.get("city"), None);

        let dom: BTreeSet<String> = m.domain().into_iter().map(str::to_owned).collect();
        assert_eq!(m.restrict(&dom).unwrap(), m);

        let r = m.restrict(&attrs(&["age"])).unwrap();
        assert!(r.domain().is_empty());

        assert!(m.restrict(&BTreeSet::new()).is_err());
    }

    #[test]
    fn enumeration_covers_nulls() {
        let vals: BTreeMap<String, Vec<String>> = [
            ("a".to_string(), vec!["1".to_string(), "2".to_string()]),
            ("b".to_string(), vec!["1".to_string()]),
        ]
        .into();
        let u = Universe::enumerate(&vals);
        assert_eq!(u.len(), 3 * 2);
        assert!(u.position(&EntityModel::new()).is_some());
    }

    #[test]
    fn universe_validation() {
        let c = |id: &str, a: &str| Candidate {
            id: id.into(),
            values: EntityModel::from_pairs([(a, "v")]),
        };
        assert!(Universe::new(attrs(&["a"]), vec![c("x", "a"), c("x", "a")]).is_err());
        assert!(Universe::new(attrs(&["a"]), vec![c("x", "b")]).is_err());
        assert!(Universe::new(attrs(&["a"]), vec![]).is_err());
        assert!(UserModel::new(BTreeMap::new()).is_err());
    }
}
