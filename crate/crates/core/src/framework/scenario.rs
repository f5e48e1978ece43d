use std::collections::{BTreeMap, BTreeSet};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::belief::{posterior, Adversary, Belief, Observation, WorldKnowledge};
use super::policy::{critical_sets, is_sensitive, requirement_masses, sigma_satisfies, PrivacyPolicy};
use super::publish::{publish, PublicationConfig};
use super::{Candidate, EntityModel, Universe};
use crate::error::{Error, Result};

/// `"uniform"`, or explicit masses per profile keyed by candidate id.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PriorSpec {
    Named(String),
    PerProfile(BTreeMap<String, BTreeMap<String, f64>>),
}

impl Default for PriorSpec {
    fn default() -> Self {
        PriorSpec::Named("uniform".into())
    }
}

/// A complete toy setting as read from a scenario file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub attributes: BTreeSet<String>,
    /// Explicit candidate models. When absent, `values` is enumerated.
    #[serde(default)]
    pub candidates: Option<Vec<Candidate>>,
    #[serde(default)]
    pub values: Option<BTreeMap<String, Vec<String>>>,
    /// True model of each profile.
    pub profiles: BTreeMap<String, EntityModel>,
    #[serde(default)]
    pub prior: PriorSpec,
    pub knowledge: WorldKnowledge,
    /// Publication function per profile.
    pub publication: BTreeMap<String, PublicationConfig>,
    #[serde(default)]
    pub policy: PrivacyPolicy,
    pub sigma: f64,
    #[serde(default)]
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RequirementReport {
    pub forbidden: BTreeMap<String, String>,
    pub masses: BTreeMap<String, f64>,
    pub satisfied: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProfileReport {
    pub published: EntityModel,
    pub posterior: BTreeMap<String, f64>,
    pub requirements: Vec<RequirementReport>,
    pub sensitive_attributes: Vec<String>,
    pub critical_sets: Vec<BTreeSet<String>>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScenarioReport {
    pub sigma: f64,
    pub seed: u64,
    pub policy_satisfied: bool,
    pub profiles: BTreeMap<String, ProfileReport>,
}

impl Scenario {
    pub fn from_json(text: &str) -> Result<Self> {
        let s: Scenario = serde_json::from_str(text)?;
        Ok(s)
    }

    pub fn universe(&self) -> Result<Universe> {
        match (&self.candidates, &self.values) {
            (Some(c), None) => Universe::new(self.attributes.clone(), c.clone()),
            (None, Some(v)) => {
                if let Some(a) = v.keys().find(|a| !self.attributes.contains(*a)) {
                    return Err(Error::Config(format!("values given for undeclared attribute {a:?}")));
                }
                let mut full = v.clone();
                for a in &self.attributes {
                    full.entry(a.clone()).or_default();
                }
                Ok(Universe::enumerate(&full))
            }
            _ => Err(Error::Config(
                "scenario needs exactly one of `candidates` or `values`".into(),
            )),
        }
    }

    fn prior(&self, universe: Universe) -> Result<Belief> {
        match &self.prior {
            PriorSpec::Named(n) if n == "uniform" => Ok(Belief::uniform(universe, self.profiles.keys().cloned())),
            PriorSpec::Named(n) => Err(Error::Config(format!("unknown prior {n:?}"))),
            PriorSpec::PerProfile(map) => {
                let mut masses = BTreeMap::new();
                for p in self.profiles.keys() {
                    let m = map
                        .get(p)
                        .ok_or_else(|| Error::Config(format!("no prior for profile {p:?}")))?;
                    if let Some(id) = m.keys().find(|id| universe.position_of_id(id).is_none()) {
                        return Err(Error::Config(format!("prior names unknown candidate {id:?}")));
                    }
                    let v = universe
                        .candidates()
                        .iter()
                        .map(|c| m.get(&c.id).copied().unwrap_or(0.0))
                        .collect();
                    masses.insert(p.clone(), v);
                }
                Belief::new(universe, masses)
            }
        }
    }

    fn validate(&self, universe: &Universe) -> Result<()> {
        if !(0.0..=1.0).contains(&self.sigma) {
            return Err(Error::Config(format!("sigma {} outside [0, 1]", self.sigma)));
        }
        for (p, m) in &self.profiles {
            universe
                .check_model(m)
                .map_err(|e| Error::Config(format!("profile {p:?}: {e}")))?;
            if !self.publication.contains_key(p) {
                return Err(Error::Config(format!("no publication function for profile {p:?}")));
            }
        }
        if let Some(p) = self.publication.keys().find(|p| !self.profiles.contains_key(*p)) {
            return Err(Error::Config(format!("publication for unknown profile {p:?}")));
        }
        for r in &self.policy.requirements {
            if !self.profiles.contains_key(&r.profile) {
                return Err(Error::Config(format!(
                    "requirement for unknown profile {:?}",
                    r.profile
                )));
            }
            if let Some(a) = r.forbidden.keys().find(|a| !self.attributes.contains(*a)) {
                return Err(Error::Config(format!("requirement uses undeclared attribute {a:?}")));
            }
        }
        Ok(())
    }
}

/// Publish every profile, update the adversary and evaluate the policy.
pub fn run_scenario(s: &Scenario) -> Result<ScenarioReport> {
    let universe = s.universe()?;
    s.validate(&universe)?;
    let adv = Adversary {
        prior: s.prior(universe)?,
        knowledge: s.knowledge.clone(),
    };
    let mut rng = ChaCha8Rng::seed_from_u64(s.seed);
    let mut obs = Observation::default();
    for (p, model) in &s.profiles {
        obs.published
            .insert(p.clone(), publish(model, &s.publication[p], &mut rng)?);
    }

    let mut profiles = BTreeMap::new();
    let mut all_ok = true;
    for (p, published) in &obs.published {
        let post = posterior(&adv, &obs, p)?;
        let requirements: Vec<RequirementReport> = s
            .policy
            .for_profile(p)
            .map(|r| {
                let masses = requirement_masses(&post, r)
                    .into_iter()
                    .map(|(a, _, m)| (a, m))
                    .collect();
                RequirementReport {
                    forbidden: r.forbidden.clone(),
                    masses,
                    satisfied: sigma_satisfies(&post, r, s.sigma),
                }
            })
            .collect();
        all_ok &= requirements.iter().all(|r| r.satisfied);
        let sensitive_attributes = published
            .domain()
            .into_iter()
            .filter(|a| is_sensitive(&[a.to_string()].into(), &s.policy, p))
            .map(str::to_owned)
            .collect();
        profiles.insert(
            p.clone(),
            ProfileReport {
                published: published.clone(),
                posterior: post.by_id(),
                requirements,
                sensitive_attributes,
                critical_sets: critical_sets(p, published, &adv, &s.policy, s.sigma)?,
            },
        );
    }
    Ok(ScenarioReport {
        sigma: s.sigma,
        seed: s.seed,
        policy_satisfied: all_ok,
        profiles,
    })
}
