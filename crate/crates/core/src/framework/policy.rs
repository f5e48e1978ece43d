use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::belief::{posterior, Adversary, BeliefSlice, Observation};
use super::EntityModel;
use crate::error::{Error, Result};

/// Profile `profile` must not expose `attr = value` for any forbidden pair.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Requirement {
    pub profile: String,
    pub forbidden: BTreeMap<String, String>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PrivacyPolicy {
    pub requirements: Vec<Requirement>,
}

impl PrivacyPolicy {
    pub fn for_profile<'a>(&'a self, profile: &'a str) -> impl Iterator<Item = &'a Requirement> + 'a {
        self.requirements.iter().filter(move |r| r.profile == profile)
    }
}

/// Posterior mass on each forbidden pair, in attribute order.
pub fn requirement_masses(slice: &BeliefSlice<'_>, req: &Requirement) -> Vec<(String, String, f64)> {
    req.forbidden
        .iter()
        .map(|(a, v)| (a.clone(), v.clone(), slice.mass_where(a, v)))
        .collect()
}

/// Per-attribute marginals: every forbidden pair carries at most `sigma`
/// posterior mass.
pub fn sigma_satisfies(slice: &BeliefSlice<'_>, req: &Requirement, sigma: f64) -> bool {
    req.forbidden.iter().all(|(a, v)| slice.mass_where(a, v) <= sigma)
}

/// Whether every requirement of the policy is σ-satisfied by the posterior
/// of its profile.
pub fn policy_satisfied(adv: &Adversary, obs: &Observation, policy: &PrivacyPolicy, sigma: f64) -> Result<bool> {
    for r in &policy.requirements {
        let post = posterior(adv, obs, &r.profile)?;
        if !sigma_satisfies(&post, r, sigma) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// `attrs` is sensitive for `profile` when some requirement on that profile
/// covers all of it.
pub fn is_sensitive(attrs: &BTreeSet<String>, policy: &PrivacyPolicy, profile: &str) -> bool {
    policy
        .for_profile(profile)
        .any(|r| attrs.iter().all(|a| r.forbidden.contains_key(a)))
}

fn violations(
    adv: &Adversary,
    profile: &str,
    published: &EntityModel,
    reqs: &[&Requirement],
    sigma: f64,
) -> Result<Vec<bool>> {
    let obs = Observation::single(profile, published.clone());
    let post = posterior(adv, &obs, profile)?;
    Ok(reqs.iter().map(|r| !sigma_satisfies(&post, r, sigma)).collect())
}

/// `attrs` is σ-critical when withholding it from the published model turns
/// some σ-violated requirement of `profile` into a satisfied one.
pub fn is_critical(
    attrs: &BTreeSet<String>,
    profile: &str,
    published: &EntityModel,
    adv: &Adversary,
    policy: &PrivacyPolicy,
    sigma: f64,
) -> Result<bool> {
    let dom = published.domain();
    if let Some(a) = attrs.iter().find(|a| !dom.contains(a.as_str())) {
        return Err(Error::Precondition(format!("attribute {a:?} is not published")));
    }
    let reqs: Vec<&Requirement> = policy.for_profile(profile).collect();
    if reqs.is_empty() {
        return Ok(false);
    }
    let before = violations(adv, profile, published, &reqs, sigma)?;
    if !before.iter().any(|&v| v) {
        return Ok(false);
    }
    let after = violations(adv, profile, &published.without(attrs), &reqs, sigma)?;
    Ok(before.iter().zip(&after).any(|(&b, &a)| b && !a))
}

/// Every nonempty subset of the published domain that is σ-critical.
pub fn critical_sets(
    profile: &str,
    published: &EntityModel,
    adv: &Adversary,
    policy: &PrivacyPolicy,
    sigma: f64,
) -> Result<Vec<BTreeSet<String>>> {
    let dom: Vec<String> = published.domain().into_iter().map(str::to_owned).collect();
    if dom.len() > 20 {
        return Err(Error::InvalidArgument("published domain too large to enumerate".into()));
    }
    let reqs: Vec<&Requirement> = policy.for_profile(profile).collect();
    if reqs.is_empty() {
        return Ok(Vec::new());
    }
    let before = violations(adv, profile, published, &reqs, sigma)?;
    if !before.iter().any(|&v| v) {
        return Ok(Vec::new());
    }
    let mut out = Vec::new();
    for mask in 1u32..(1 << dom.len()) {
        let subset: BTreeSet<String> = dom
            .iter()
            .enumerate()
            .filter(|(i, _)| mask & (1 << i) != 0)
            .map(|(_, a)| a.clone())
            .collect();
        let after = violations(adv, profile, &published.without(&subset), &reqs, sigma)?;
        if before.iter().zip(&after).any(|(&b, &a)| b && !a) {
            out.push(subset);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::framework::{Belief, Candidate, Universe, WorldKnowledge};

    fn set(xs: &[&str]) -> BTreeSet<String> {
        xs.iter().map(|s| s.to_string()).collect()
    }

    fn req(profile: &str, pairs: &[(&str, &str)]) -> Requirement {
        Requirement {
            profile: profile.into(),
            forbidden: pairs.iter().map(|(a, v)| (a.to_string(), v.to_string())).collect(),
        }
    }

    fn two_point_slice(universe: &Universe, mass_on_x: f64) -> BeliefSlice<'_> {
        BeliefSlice::new(universe, vec![mass_on_x, 1.0 - mass_on_x]).unwrap()
    }

    fn xy_universe() -> Universe {
        Universe::new(
            set(&["a"]),
            vec![
                Candidate {
                    id: "x".into(),
                    values: EntityModel::from_pairs([("a", "x")]),
                },
                Candidate {
                    id: "y".into(),
                    values: EntityModel::from_pairs([("a", "y")]),
                },
            ],
        )
        .unwrap()
    }

    #[test]
    fn sigma_satisfaction_boundaries() {
        let u = xy_universe();
        let r = req("P", &[("a", "x")]);
        assert!(sigma_satisfies(&two_point_slice(&u, 0.3), &r, 0.5));
        assert!(sigma_satisfies(&two_point_slice(&u, 0.5), &r, 0.5));
        assert!(!sigma_satisfies(&two_point_slice(&u, 1.0), &r, 0.99));
    }

    #[test]
    fn sensitivity() {
        let policy = PrivacyPolicy {
            requirements: vec![req("P", &[("a", "1"), ("b", "2")])],
        };
        assert!(is_sensitive(&set(&["a", "b"]), &policy, "P"));
        assert!(is_sensitive(&set(&["a"]), &policy, "P"));
        assert!(!is_sensitive(&set(&["c"]), &policy, "P"));
        assert!(!is_sensitive(&set(&["a"]), &policy, "Q"));
    }

    /// Attributes `proxy` and `secret`; the prior only contains models where
    /// `proxy = p1` comes with `secret = s1`, so observing the proxy reveals
    /// the secret.
    fn proxy_setup() -> (Adversary, PrivacyPolicy, EntityModel) {
        let models = [
            [("proxy", "p1"), ("secret", "s1")],
            [("proxy", "p2"), ("secret", "s1")],
            [("proxy", "p2"), ("secret", "s2")],
            [("proxy", "p3"), ("secret", "s2")],
        ];
        let candidates = models
            .iter()
            .enumerate()
            .map(|(i, m)| Candidate {
                id: format!("m{i}"),
                values: EntityModel::from_pairs(m.iter().copied()),
            })
            .collect();
        let u = Universe::new(set(&["proxy", "secret"]), candidates).unwrap();
        let adv = Adversary {
            prior: Belief::uniform(u, ["P"]),
            knowledge: WorldKnowledge::Consistent,
        };
        let policy = PrivacyPolicy {
            requirements: vec![req("P", &[("secret", "s1")])],
        };
        (adv, policy, EntityModel::from_pairs([("proxy", "p1")]))
    }

    #[test]
    fn proxy_attribute_is_critical() {
        let (adv, policy, published) = proxy_setup();
        // Brute force: with the proxy published, posterior mass on s1 is 1.
        let post = posterior(&adv, &Observation::single("P", published.clone()), "P").unwrap();
        assert_eq!(post.mass_where("secret", "s1"), 1.0);
        // Withheld: prior mass on s1 is 2/4.
        let post = posterior(&adv, &Observation::default(), "P").unwrap();
        assert_eq!(post.mass_where("secret", "s1"), 0.5);

        assert!(is_critical(&set(&["proxy"]), "P", &published, &adv, &policy, 0.6).unwrap());
        assert!(!is_critical(&set(&["proxy"]), "P", &published, &adv, &policy, 0.4).unwrap());
        assert!(!is_sensitive(&set(&["proxy"]), &policy, "P"));
        assert_eq!(
            critical_sets("P", &published, &adv, &policy, 0.6).unwrap(),
            vec![set(&["proxy"])]
        );
    }

    #[test]
    fn attributes_without_effect_are_not_critical() {
        let (adv, policy, _) = proxy_setup();
        // p2 is compatible with both secrets: mass on s1 stays 1/2.
        let published = EntityModel::from_pairs([("proxy", "p2")]);
        assert!(!is_critical(&set(&["proxy"]), "P", &published, &adv, &policy, 0.5).unwrap());
    }

    #[test]
    fn sensitive_published_attribute_is_zero_critical() {
        let vals: BTreeMap<String, Vec<String>> = [("a".to_string(), vec!["1".to_string(), "2".to_string()])].into();
        let u = Universe::enumerate(&vals);
        let adv = Adversary {
            prior: Belief::uniform(u, ["P"]),
            knowledge: WorldKnowledge::Literal,
        };
        let policy = PrivacyPolicy {
            requirements: vec![req("P", &[("a", "1")])],
        };
        let published = EntityModel::from_pairs([("a", "1")]);
        assert!(is_sensitive(&set(&["a"]), &policy, "P"));
        assert!(is_critical(&set(&["a"]), "P", &published, &adv, &policy, 0.0).unwrap());
    }

    #[test]
    fn unpublished_attributes_violate_precondition() {
        let (adv, policy, published) = proxy_setup();
        assert!(matches!(
            is_critical(&set(&["secret"]), "P", &published, &adv, &policy, 0.5),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn policy_level_satisfaction() {
        let (adv, policy, published) = proxy_setup();
        let obs = Observation::single("P", published);
        assert!(!policy_satisfied(&adv, &obs, &policy, 0.9).unwrap());
        assert!(policy_satisfied(&adv, &obs, &policy, 1.0).unwrap());
        assert!(policy_satisfied(&adv, &Observation::default(), &policy, 0.5).unwrap());
    }
}
