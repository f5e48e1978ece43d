use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use super::{ProfileKey, TokenStream};

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct FilterStats {
    pub profiles_in: usize,
    pub profiles_qualifying: usize,
    pub profiles_kept: usize,
    pub communities_kept: usize,
}

/// Keep profiles with at least `min_comments` comments whose community has at
/// least `min_profiles` such profiles. Communities listed in `exclude` are
/// dropped first.
///
/// Single pass: dropping a community never re-qualifies or disqualifies
/// anything else, so no fixpoint is computed.
pub fn filter_interesting(
    profiles: BTreeMap<ProfileKey, TokenStream>,
    min_comments: usize,
    min_profiles: usize,
    exclude: &BTreeSet<String>,
) -> (BTreeMap<ProfileKey, TokenStream>, FilterStats) {
    let profiles_in = profiles.len();
    let qualifying: BTreeMap<ProfileKey, TokenStream> = profiles
        .into_iter()
        .filter(|(k, s)| s.comments >= min_comments && !exclude.contains(&k.community))
        .collect();

    let mut per_community: BTreeMap<&str, usize> = BTreeMap::new();
    for k in qualifying.keys() {
        *per_community.entry(k.community.as_str()).or_default() += 1;
    }
    let keep: BTreeSet<String> = per_community
        .into_iter()
        .filter(|(_, n)| *n >= min_profiles)
        .map(|(c, _)| c.to_owned())
        .collect();

    let profiles_qualifying = qualifying.len();
    let kept: BTreeMap<_, _> = qualifying
        .into_iter()
        .filter(|(k, _)| keep.contains(&k.community))
        .collect();
    let stats = FilterStats {
        profiles_in,
        profiles_qualifying,
        profiles_kept: kept.len(),
        communities_kept: keep.len(),
    };
    (kept, stats)
}
