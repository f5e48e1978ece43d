use std::collections::{BTreeMap, BTreeSet};

use rand::SeedableRng;
use serde::Serialize;

use super::belief::{posterior, Adversary, Belief, Observation, WorldKnowledge};
use super::publish::{publish, PublicationConfig};
use super::{EntityModel, Universe};
use crate::error::Result;

/// Total variation distance of two finite distributions, `½·Σ|x−y|` over
/// the union of their supports.
pub fn total_variation<K: Ord>(x: &BTreeMap<K, f64>, y: &BTreeMap<K, f64>) -> f64 {
    let keys: BTreeSet<&K> = x.keys().chain(y.keys()).collect();
    let l1: f64 = keys
        .into_iter()
        .map(|k| (x.get(k).copied().unwrap_or(0.0) - y.get(k).copied().unwrap_or(0.0)).abs())
        .sum();
    (0.5 * l1).clamp(0.0, 1.0)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ImpossibilityReport {
    pub sd: f64,
    pub transcript: Vec<String>,
    pub original_posterior: BTreeMap<String, f64>,
    pub modified_posterior: BTreeMap<String, f64>,
}

/// Two profiles that differ only in the released attribute `alpha`
/// (`x` versus the default `x_star`), observed by an adversary with a
/// uniform prior and no inference rules.
pub fn impossibility_demo(x: &str, x_star: &str) -> Result<ImpossibilityReport> {
    const PROFILE: &str = "P";
    let mut alpha_values = vec![x.to_string()];
    if x_star != x {
        alpha_values.push(x_star.to_string());
    }
    let values: BTreeMap<String, Vec<String>> = [
        ("alpha".to_string(), alpha_values),
        ("beta".to_string(), vec!["y".to_string()]),
    ]
    .into();
    let universe = Universe::enumerate(&values);
    let mut transcript = vec![format!(
        "universe: attributes alpha, beta; {} candidate models including NULL assignments",
        universe.len()
    )];

    let adv = Adversary {
        prior: Belief::uniform(universe, [PROFILE]),
        knowledge: WorldKnowledge::Literal,
    };
    transcript.push(format!(
        "adversary: uniform prior 1/{} per model, no inference rules",
        adv.prior.universe().len()
    ));

    let original = EntityModel::from_pairs([("alpha", x), ("beta", "y")]);
    let mut modified = original.clone();
    modified.set("alpha", Some(x_star.to_string()));
    transcript.push(format!(
        "profile model {:?}; modified model {:?}",
        original.values(),
        modified.values()
    ));

    let g = PublicationConfig::identity(["alpha".to_string()].into());
    g.validate()?;
    // The identity configuration draws no randomness.
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0);
    let published = publish(&original, &g, &mut rng)?;
    let published_mod = publish(&modified, &g, &mut rng)?;
    transcript.push(format!(
        "publication keeps alpha unchanged: {:?} and {:?}",
        published.values(),
        published_mod.values()
    ));

    let b = posterior(&adv, &Observation::single(PROFILE, published), PROFILE)?.by_id();
    let b_mod = posterior(&adv, &Observation::single(PROFILE, published_mod), PROFILE)?.by_id();
    for (label, post) in [("original", &b), ("modified", &b_mod)] {
        let support: Vec<String> = post
            .iter()
            .filter(|(_, &m)| m > 0.0)
            .map(|(id, m)| format!("{id}={m}"))
            .collect();
        transcript.push(format!("{label} posterior support: {}", support.join(", ")));
    }
    let sd = total_variation(&b, &b_mod);
    transcript.push(format!("SD = {sd}"));
    Ok(ImpossibilityReport {
        sd,
        transcript,
        original_posterior: b,
        modified_posterior: b_mod,
    })
}
