//! Synthetic comparison of ad-hoc nDCG@k against nDCG_φ@k.
//!
//! Each sample draws `n` scores, orders them ideally (descending score),
//! applies an ordering error and evaluates the result under both relevance
//! sources. Sample `i` uses its own ChaCha8 stream seeded with `seed ^ i`, so
//! results do not depend on how samples are scheduled across threads.

use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metrics::{
    evaluate_ranking, Buckets, DiscountKind, GainKind, MetricConfig, Ranking, RelevanceSource,
    ScoredItem,
};
use crate::numfmt;
use crate::relevance::{quantile_sorted, RelevanceFunction};

pub const BALANCED_RANGE: (f64, f64) = (1.0, 1000.0);
pub const IMBALANCED_LOW_RANGE: (f64, f64) = (1.0, 100.0);
pub const IMBALANCED_HIGH_RANGE: (f64, f64) = (100.0, 1000.0);
pub const IMBALANCED_LOW_SHARE: f64 = 0.9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Distribution {
    Balanced,
    Imbalanced,
}

impl FromStr for Distribution {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "balanced" => Ok(Distribution::Balanced),
            "imbalanced" => Ok(Distribution::Imbalanced),
            other => Err(Error::InvalidConfig(format!(
                "unknown distribution `{other}`"
            ))),
        }
    }
}

/// Ordering error applied to the ideal ranking. Positions are 1-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scenario {
    Swap {
        i: usize,
        j: usize,
    },
    /// Reverse the top-k positions.
    Invert,
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scenario::Swap { i, j } => write!(f, "swap:{i}:{j}"),
            Scenario::Invert => f.write_str("invert"),
        }
    }
}

impl FromStr for Scenario {
    type Err = Error;

    /// `invert` or `swap:i:j`.
    fn from_str(s: &str) -> Result<Self> {
        if s == "invert" {
            return Ok(Scenario::Invert);
        }
        let bad = || Error::InvalidConfig(format!("unknown scenario `{s}`"));
        let rest = s.strip_prefix("swap:").ok_or_else(bad)?;
        let (i, j) = rest.split_once(':').ok_or_else(bad)?;
        Ok(Scenario::Swap {
            i: i.parse().map_err(|_| bad())?,
            j: j.parse().map_err(|_| bad())?,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub n: usize,
    pub k: usize,
    pub samples: usize,
    pub distribution: Distribution,
    pub scenario: Scenario,
    pub seed: u64,
    pub gain: GainKind,
    pub discount: DiscountKind,
    pub buckets: Buckets,
}

impl ExperimentConfig {
    /// n = 100, k = 10, 1000 samples, exponential gain, logarithmic
    /// discount, default buckets.
    pub fn new(distribution: Distribution, scenario: Scenario, seed: u64) -> Self {
        ExperimentConfig {
            n: 100,
            k: 10,
            samples: 1000,
            distribution,
            scenario,
            seed,
            gain: GainKind::Exponential,
            discount: DiscountKind::Logarithmic,
            buckets: Buckets::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 1 {
            return Err(Error::InvalidSize(self.n));
        }
        if self.k < 1 || self.k > self.n {
            return Err(Error::InvalidConfig(format!(
                "k = {} must lie in [1, n = {}]",
                self.k, self.n
            )));
        }
        if self.samples < 1 {
            return Err(Error::InvalidConfig("samples must be at least 1".into()));
        }
        if let Scenario::Swap { i, j } = self.scenario {
            if i < 1 || j < 1 || i > self.n || j > self.n || i == j {
                return Err(Error::InvalidConfig(format!(
                    "swap positions {i} and {j} must be distinct and within [1, {}]",
                    self.n
                )));
            }
        }
        Ok(())
    }

    fn metric(&self, relevance: RelevanceSource) -> Result<MetricConfig> {
        MetricConfig::new(self.gain, self.discount, self.k, relevance)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FiveNumberSummary {
    #[serde(serialize_with = "numfmt::serialize")]
    pub min: f64,
    #[serde(serialize_with = "numfmt::serialize")]
    pub q1: f64,
    #[serde(serialize_with = "numfmt::serialize")]
    pub median: f64,
    #[serde(serialize_with = "numfmt::serialize")]
    pub q3: f64,
    #[serde(serialize_with = "numfmt::serialize")]
    pub max: f64,
}

impl FiveNumberSummary {
    pub fn from_values(values: &[f64]) -> Result<Self> {
        let mut sorted = values.to_vec();
        sorted.sort_by(f64::total_cmp);
        Ok(FiveNumberSummary {
            min: quantile_sorted(&sorted, 0.0)?,
            q1: quantile_sorted(&sorted, 0.25)?,
            median: quantile_sorted(&sorted, 0.5)?,
            q3: quantile_sorted(&sorted, 0.75)?,
            max: quantile_sorted(&sorted, 1.0)?,
        })
    }

    pub fn iqr(&self) -> f64 {
        self.q3 - self.q1
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentResult {
    pub config: ExperimentConfig,
    pub k_effective: usize,
    /// Ad-hoc nDCG@k; identical across samples.
    #[serde(serialize_with = "numfmt::serialize")]
    pub adhoc_value: f64,
    #[serde(serialize_with = "numfmt::serialize_vec")]
    pub adhoc_values: Vec<f64>,
    #[serde(serialize_with = "numfmt::serialize_vec")]
    pub phi_values: Vec<f64>,
    pub phi_summary: FiveNumberSummary,
    /// Samples whose φ was degenerate or whose ideal φ-DCG was zero.
    pub degenerate_samples: usize,
}

impl ExperimentResult {
    /// `(sample_index, metric, value)` rows, samples in index order.
    pub fn long_rows(&self) -> impl Iterator<Item = (usize, &'static str, f64)> + '_ {
        self.adhoc_values
            .iter()
            .zip(&self.phi_values)
            .enumerate()
            .flat_map(|(i, (&a, &p))| [(i, "ndcg_adhoc", a), (i, "ndcg_phi", p)])
    }
}

fn uniform<R: Rng + ?Sized>(rng: &mut R, (lo, hi): (f64, f64)) -> f64 {
    rng.random_range(lo..hi)
}

/// `n` uniform draws on `[1, 1000)`.
pub fn gen_balanced<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<Vec<f64>> {
    if n < 1 {
        return Err(Error::InvalidSize(n));
    }
    Ok((0..n).map(|_| uniform(rng, BALANCED_RANGE)).collect())
}

/// `round(0.9 n)` draws on `[1, 100)`, the rest on `[100, 1000)`, shuffled.
pub fn gen_imbalanced<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<Vec<f64>> {
    if n < 1 {
        return Err(Error::InvalidSize(n));
    }
    let low = (IMBALANCED_LOW_SHARE * n as f64).round() as usize;
    let mut scores: Vec<f64> = (0..n)
        .map(|i| {
            let range = if i < low {
                IMBALANCED_LOW_RANGE
            } else {
                IMBALANCED_HIGH_RANGE
            };
            uniform(rng, range)
        })
        .collect();
    scores.shuffle(rng);
    Ok(scores)
}

pub fn generate<R: Rng + ?Sized>(
    distribution: Distribution,
    n: usize,
    rng: &mut R,
) -> Result<Vec<f64>> {
    match distribution {
        Distribution::Balanced => gen_balanced(n, rng),
        Distribution::Imbalanced => gen_imbalanced(n, rng),
    }
}

/// Exchanges 1-based positions `i < j`.
pub fn scenario_swap<T: Clone>(ideal_order: &[T], i: usize, j: usize) -> Result<Vec<T>> {
    if i < 1 {
        return Err(Error::InvalidPosition(i));
    }
    if j <= i || j > ideal_order.len() {
        return Err(Error::InvalidPosition(j));
    }
    let mut out = ideal_order.to_vec();
    out.swap(i - 1, j - 1);
    Ok(out)
}

/// Reverses the first `k` positions.
pub fn scenario_invert<T: Clone>(ideal_order: &[T], k: usize) -> Result<Vec<T>> {
    if k < 1 || k > ideal_order.len() {
        return Err(Error::InvalidPosition(k));
    }
    let mut out = ideal_order.to_vec();
    out[..k].reverse();
    Ok(out)
}

pub fn apply_scenario<T: Clone>(scenario: Scenario, ideal_order: &[T], k: usize) -> Result<Vec<T>> {
    match scenario {
        Scenario::Swap { i, j } => scenario_swap(ideal_order, i.min(j), i.max(j)),
        Scenario::Invert => scenario_invert(ideal_order, k),
    }
}

/// RNG for sample `index` under master `seed`.
pub fn sample_rng(seed: u64, index: usize) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed ^ index as u64)
}

/// Scores for an experiment sample as a ranking in ideal order.
pub fn ideal_ranking(id: impl Into<String>, scores: &[f64]) -> Result<Ranking> {
    let width = scores.len().to_string().len();
    let items: Vec<ScoredItem> = scores
        .iter()
        .enumerate()
        .map(|(i, &s)| ScoredItem::new(format!("y{i:0width$}"), s))
        .collect();
    let unordered = Ranking::from_ordered(id, items)?;
    unordered.with_order(unordered.ideal_order())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SampleOutcome {
    pub adhoc: f64,
    pub phi: f64,
    pub degenerate: bool,
}

/// Evaluates one sample; `run_experiment` maps this over sample indices.
pub fn run_sample(config: &ExperimentConfig, index: usize) -> Result<SampleOutcome> {
    let mut rng = sample_rng(config.seed, index);
    let scores = generate(config.distribution, config.n, &mut rng)?;
    let ideal = ideal_ranking(format!("sample-{index}"), &scores)?;
    let ranking = ideal.with_order(apply_scenario(
        config.scenario,
        ideal.system_order(),
        config.k,
    )?)?;

    let adhoc_cfg = config.metric(RelevanceSource::AdHoc(config.buckets.clone()))?;
    let phi_cfg = config.metric(RelevanceSource::Phi)?;
    let phi = RelevanceFunction::from_scores(&scores)?;
    let adhoc = evaluate_ranking(&ranking, &adhoc_cfg, None)?;
    let phi_out = evaluate_ranking(&ranking, &phi_cfg, Some(&phi))?;
    Ok(SampleOutcome {
        adhoc: adhoc.value,
        phi: phi_out.value,
        degenerate: phi.is_degenerate() || phi_out.degenerate,
    })
}

pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentResult> {
    config.validate()?;
    let outcomes: Vec<SampleOutcome> = (0..config.samples)
        .into_par_iter()
        .map(|i| run_sample(config, i))
        .collect::<Result<_>>()?;

    let adhoc_values: Vec<f64> = outcomes.iter().map(|o| o.adhoc).collect();
    let phi_values: Vec<f64> = outcomes.iter().map(|o| o.phi).collect();
    Ok(ExperimentResult {
        config: config.clone(),
        k_effective: config.k.min(config.n),
        adhoc_value: adhoc_values[0],
        phi_summary: FiveNumberSummary::from_values(&phi_values)?,
        degenerate_samples: outcomes.iter().filter(|o| o.degenerate).count(),
        adhoc_values,
        phi_values,
    })
}
