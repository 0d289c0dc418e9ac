//! Ranking evaluation with nDCG@k under two relevance sources: ad-hoc rank
//! buckets, and φ, a monotone relevance function interpolated from the
//! distribution of the candidates' ground-truth scores.

pub mod dataset;
pub mod error;
pub mod metrics;
pub mod numfmt;
pub mod relevance;
pub mod synth;

pub use error::{Error, Result};
pub use metrics::{
    adhoc_relevance, dcg, discount_logarithmic, discount_zipfian, evaluate_ranking,
    gain_exponential, gain_linear, ndcg, phi_relevance, Buckets, DiscountKind, GainKind,
    MetricConfig, NdcgOutcome, Ranking, RelevanceSource, RelevanceVector, ScoredItem,
};
pub use relevance::{
    alpha, build_control_points, fit_pchip, quantile, ControlPoint, ControlPoints,
    RelevanceFunction, ScoreSummary,
};
