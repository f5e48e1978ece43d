use std::collections::{BTreeMap, BTreeSet};

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::EntityModel;
use crate::error::{Error, Result};

/// How a published attribute is altered before release.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Perturbation {
    /// Replace with a fixed value (`None` publishes NULL).
    Replace { value: Option<String> },
    /// Replace with a uniformly chosen value (`None` entries publish NULL).
    Choose { values: Vec<Option<String>> },
}

/// A publication function: which attributes are released and which of them
/// are perturbed. At least one released attribute must stay untouched.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PublicationConfig {
    pub attributes: BTreeSet<String>,
    #[serde(default)]
    pub perturb: BTreeMap<String, Perturbation>,
}

impl PublicationConfig {
    /// Release `attributes` unchanged.
    pub fn identity(attributes: BTreeSet<String>) -> Self {
        PublicationConfig {
            attributes,
            perturb: BTreeMap::new(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.attributes.is_empty() {
            return Err(Error::Config("publication releases no attributes".into()));
        }
        if let Some(a) = self.perturb.keys().find(|a| !self.attributes.contains(*a)) {
            return Err(Error::Config(format!("perturbed attribute {a:?} is not released")));
        }
        if self.attributes.iter().all(|a| self.perturb.contains_key(a)) {
            return Err(Error::Config(
                "publication must release at least one attribute unperturbed".into(),
            ));
        }
        for (a, p) in &self.perturb {
            if let Perturbation::Choose { values } = p {
                if values.is_empty() {
                    return Err(Error::Config(format!("no replacement values for {a:?}")));
                }
            }
        }
        Ok(())
    }
}

/// Apply a publication function to a model.
pub fn publish<R: Rng + ?Sized>(model: &EntityModel, cfg: &PublicationConfig, rng: &mut R) -> Result<EntityModel> {
    cfg.validate()?;
    let mut out = model.restrict(&cfg.attributes)?;
    for (attr, p) in &cfg.perturb {
        let v = match p {
            Perturbation::Replace { value } => value.clone(),
            Perturbation::Choose { values } => values.choose(rng).cloned().flatten(),
        };
        out.set(attr.clone(), v);
    }
    Ok(out)
}
