//! Linkability risk for pseudonymous text profiles: text normalization,
//! unigram models, the √JS metric, (k,d)-anonymity and matching bounds, a
//! toy-scale open-setting privacy framework and the cross-community
//! evaluation pipeline.

pub mod anonymity;
pub mod corpus;
pub mod error;
pub mod eval;
pub mod framework;
pub mod lists;
pub mod lm;
pub mod metric;
pub mod store;

pub use anonymity::{
    choice_likelihood, convergent_subset, is_kd_anonymous, matching_bound, AnonymityResult, ChoiceLikelihood,
    CrossMatrix, DistanceMatrix, MatchingBound,
};
pub use corpus::{normalize, NormalizationConfig, ProfileKey, RawComment, TokenStream};
pub use error::{Error, Result};
pub use eval::{GroundTruthLink, Linkage, PrecisionReport, SynthConfig};
pub use framework::{EntityModel, Scenario, ScenarioReport, Universe};
pub use lists::WordList;
pub use lm::{build_models, Distribution, ModelSet, UnigramModel};
pub use metric::{distance, js, kl, Vocabulary};
