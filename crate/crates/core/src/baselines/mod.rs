//! Informal-text baselines: most-frequent-sense disambiguation and
//! proof-sentence pattern counts.

mod patterns;
mod wsd;

pub use patterns::{
    normalize_sentence, pattern_stats, NormalizeConfig, Normalized, Normalizer, PatternStats, MATH_TOKEN,
    REF_TOKEN,
};
pub use wsd::{parse_wsd_tsv, wsd_evaluate, wsd_predict, wsd_train, Fallback, Prediction, SenseTable, WsdError, WsdScore};
