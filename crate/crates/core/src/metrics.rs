//! DCG-family ranking metrics.
//!
//! `DCG@k = sum_{i=1..k} d(i) * g(v_i)` where `d` is a positional discount and
//! `g` a gain applied to the relevance judgment `v` of the item at position `i`.
//! `nDCG@k` divides by the DCG@k of the ideal ordering of the candidate set.
//!
//! Summation is plain sequential accumulation in ascending position order, so
//! two gain sequences that are equal element-wise produce bit-identical sums.

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::relevance::RelevanceFunction;

/// `1 / log2(position + 1)`.
pub fn discount_logarithmic(position: usize) -> Result<f64> {
    if position < 1 {
        return Err(Error::InvalidPosition(position));
    }
    Ok(1.0 / ((position + 1) as f64).log2())
}

/// `1 / position`.
pub fn discount_zipfian(position: usize) -> Result<f64> {
    if position < 1 {
        return Err(Error::InvalidPosition(position));
    }
    Ok(1.0 / position as f64)
}

/// `2^v - 1`.
pub fn gain_exponential(v: f64) -> Result<f64> {
    check_relevance(v)?;
    Ok(v.exp2() - 1.0)
}

pub fn gain_linear(v: f64) -> Result<f64> {
    check_relevance(v)?;
    Ok(v)
}

fn check_relevance(v: f64) -> Result<()> {
    if !v.is_finite() || v < 0.0 {
        return Err(Error::InvalidRelevance(v));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GainKind {
    Linear,
    Exponential,
}

impl GainKind {
    pub fn apply(self, v: f64) -> Result<f64> {
        match self {
            GainKind::Linear => gain_linear(v),
            GainKind::Exponential => gain_exponential(v),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DiscountKind {
    Logarithmic,
    Zipfian,
}

impl DiscountKind {
    pub fn weight(self, position: usize) -> Result<f64> {
        match self {
            DiscountKind::Logarithmic => discount_logarithmic(position),
            DiscountKind::Zipfian => discount_zipfian(position),
        }
    }
}

/// Rank-bucket relevance levels.
///
/// The item at score rank `r` (1-based) receives `levels[b]` for the first
/// bucket `b` with `r <= ranks[b]`, and `levels[ranks.len()]` past the last
/// bucket boundary.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Buckets {
    ranks: Vec<usize>,
    levels: Vec<u32>,
}

impl Buckets {
    pub fn new(ranks: Vec<usize>, levels: Vec<u32>) -> Result<Self> {
        if levels.len() != ranks.len() + 1 {
            return Err(Error::InvalidConfig(format!(
                "expected {} bucket levels for {} bucket ranks, got {}",
                ranks.len() + 1,
                ranks.len(),
                levels.len()
            )));
        }
        if ranks.first() == Some(&0) {
            return Err(Error::InvalidConfig("bucket ranks are 1-based".into()));
        }
        if ranks.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidConfig(
                "bucket ranks must be strictly increasing".into(),
            ));
        }
        if levels.windows(2).any(|w| w[0] <= w[1]) {
            return Err(Error::InvalidConfig(
                "bucket levels must be strictly decreasing".into(),
            ));
        }
        Ok(Buckets { ranks, levels })
    }

    pub fn ranks(&self) -> &[usize] {
        &self.ranks
    }

    pub fn levels(&self) -> &[u32] {
        &self.levels
    }

    /// Relevance level for a 1-based score rank.
    pub fn level_for_rank(&self, rank: usize) -> u32 {
        let bucket = self.ranks.partition_point(|&bound| bound < rank);
        self.levels[bucket]
    }
}

impl Default for Buckets {
    /// Top-10 → 3, top-25 → 2, top-50 → 1, rest → 0.
    fn default() -> Self {
        Buckets {
            ranks: vec![10, 25, 50],
            levels: vec![3, 2, 1, 0],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RelevanceSource {
    AdHoc(Buckets),
    Phi,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricConfig {
    pub gain: GainKind,
    pub discount: DiscountKind,
    pub k: usize,
    pub relevance: RelevanceSource,
}

impl MetricConfig {
    pub fn new(
        gain: GainKind,
        discount: DiscountKind,
        k: usize,
        relevance: RelevanceSource,
    ) -> Result<Self> {
        if k < 1 {
            return Err(Error::InvalidConfig("cut-off k must be at least 1".into()));
        }
        Ok(MetricConfig {
            gain,
            discount,
            k,
            relevance,
        })
    }

    /// Exponential gain, logarithmic discount.
    pub fn standard(k: usize, relevance: RelevanceSource) -> Result<Self> {
        Self::new(
            GainKind::Exponential,
            DiscountKind::Logarithmic,
            k,
            relevance,
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoredItem {
    pub item_id: String,
    pub score: f64,
}

impl ScoredItem {
    pub fn new(item_id: impl Into<String>, score: f64) -> Self {
        ScoredItem {
            item_id: item_id.into(),
            score,
        }
    }
}

/// A system-proposed ordering over a scored candidate set.
///
/// The candidate set (`scores`) may be larger than `system_order`; the ideal
/// DCG is always computed over the full candidate set.
#[derive(Debug, Clone, PartialEq)]
pub struct Ranking {
    ranking_id: String,
    system_order: Vec<String>,
    scores: BTreeMap<String, f64>,
}

impl Ranking {
    pub fn new(
        ranking_id: impl Into<String>,
        system_order: Vec<String>,
        candidates: impl IntoIterator<Item = ScoredItem>,
    ) -> Result<Self> {
        let ranking_id = ranking_id.into();
        let mut scores = BTreeMap::new();
        for item in candidates {
            if !item.score.is_finite() {
                return Err(Error::InvalidScore(item.score));
            }
            if scores.insert(item.item_id.clone(), item.score).is_some() {
                return Err(Error::InvalidRanking(format!(
                    "duplicate candidate `{}` in `{ranking_id}`",
                    item.item_id
                )));
            }
        }
        let mut seen = HashSet::with_capacity(system_order.len());
        for id in &system_order {
            if !seen.insert(id.as_str()) {
                return Err(Error::InvalidRanking(format!(
                    "item `{id}` appears twice in `{ranking_id}`"
                )));
            }
            if !scores.contains_key(id) {
                return Err(Error::InvalidRanking(format!(
                    "item `{id}` in `{ranking_id}` has no score"
                )));
            }
        }
        Ok(Ranking {
            ranking_id,
            system_order,
            scores,
        })
    }

    /// A ranking whose candidate set is exactly the ordered items.
    pub fn from_ordered(
        ranking_id: impl Into<String>,
        items: impl IntoIterator<Item = ScoredItem>,
    ) -> Result<Self> {
        let items: Vec<ScoredItem> = items.into_iter().collect();
        let order = items.iter().map(|i| i.item_id.clone()).collect();
        Self::new(ranking_id, order, items)
    }

    pub fn ranking_id(&self) -> &str {
        &self.ranking_id
    }

    pub fn system_order(&self) -> &[String] {
        &self.system_order
    }

    pub fn scores(&self) -> &BTreeMap<String, f64> {
        &self.scores
    }

    pub fn score(&self, item_id: &str) -> Option<f64> {
        self.scores.get(item_id).copied()
    }

    pub fn candidate_count(&self) -> usize {
        self.scores.len()
    }

    pub fn score_values(&self) -> Vec<f64> {
        self.scores.values().copied().collect()
    }

    /// Candidate ids ordered by descending score, ties by ascending id.
    pub fn ideal_order(&self) -> Vec<String> {
        sorted_by_score(&self.scores)
    }

    /// Same candidate set, different system order.
    pub fn with_order(&self, system_order: Vec<String>) -> Result<Self> {
        Ranking::new(
            self.ranking_id.clone(),
            system_order,
            self.scores
                .iter()
                .map(|(id, &score)| ScoredItem::new(id.clone(), score)),
        )
    }
}

fn sorted_by_score(scores: &BTreeMap<String, f64>) -> Vec<String> {
    let mut ids: Vec<(&String, f64)> = scores.iter().map(|(id, &s)| (id, s)).collect();
    // BTreeMap iteration is already ascending by id, and the sort is stable.
    ids.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap_or(Ordering::Equal));
    ids.into_iter().map(|(id, _)| id.clone()).collect()
}

/// Per-item relevance judgments.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct RelevanceVector {
    pub values: BTreeMap<String, f64>,
}

impl RelevanceVector {
    pub fn get(&self, item_id: &str) -> Option<f64> {
        self.values.get(item_id).copied()
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

impl FromIterator<(String, f64)> for RelevanceVector {
    fn from_iter<T: IntoIterator<Item = (String, f64)>>(iter: T) -> Self {
        RelevanceVector {
            values: iter.into_iter().collect(),
        }
    }
}

/// Assigns bucket levels by score rank (descending score, ties by ascending id).
pub fn adhoc_relevance(
    scores: &BTreeMap<String, f64>,
    buckets: &Buckets,
) -> Result<RelevanceVector> {
    if scores.is_empty() {
        return Err(Error::EmptyInput);
    }
    if let Some(bad) = scores.values().find(|s| !s.is_finite()) {
        return Err(Error::InvalidScore(*bad));
    }
    Ok(sorted_by_score(scores)
        .into_iter()
        .enumerate()
        .map(|(idx, id)| (id, f64::from(buckets.level_for_rank(idx + 1))))
        .collect())
}

/// φ applied to every candidate score.
pub fn phi_relevance(
    scores: &BTreeMap<String, f64>,
    phi: &RelevanceFunction,
) -> Result<RelevanceVector> {
    scores
        .iter()
        .map(|(id, &s)| Ok((id.clone(), phi.eval(s)?)))
        .collect::<Result<_>>()
}

pub fn dcg(gains_in_rank_order: &[f64], discount: DiscountKind, k: usize) -> Result<f64> {
    let mut total = 0.0;
    for (idx, &gain) in gains_in_rank_order.iter().take(k).enumerate() {
        if !gain.is_finite() || gain < 0.0 {
            return Err(Error::InvalidGain(gain));
        }
        total += discount.weight(idx + 1)? * gain;
    }
    Ok(total)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NdcgOutcome {
    pub value: f64,
    /// Ideal DCG@k was zero; `value` is 1.0 by convention.
    pub degenerate: bool,
    pub k_effective: usize,
}

pub fn ndcg(
    ranking: &Ranking,
    relevance: &RelevanceVector,
    config: &MetricConfig,
) -> Result<NdcgOutcome> {
    let gain_of = |id: &String| -> Result<f64> {
        let v = relevance
            .get(id)
            .ok_or_else(|| Error::MissingRelevance(id.clone()))?;
        config.gain.apply(v)
    };

    let system: Vec<f64> = ranking
        .system_order
        .iter()
        .map(gain_of)
        .collect::<Result<_>>()?;
    let mut ideal: Vec<f64> = ranking.scores.keys().map(gain_of).collect::<Result<_>>()?;
    ideal.sort_by(|a, b| b.total_cmp(a));

    let k_effective = config.k.min(ideal.len());
    let ideal_dcg = dcg(&ideal, config.discount, k_effective)?;
    if ideal_dcg == 0.0 {
        return Ok(NdcgOutcome {
            value: 1.0,
            degenerate: true,
            k_effective,
        });
    }
    let system_dcg = dcg(&system, config.discount, k_effective)?;
    Ok(NdcgOutcome {
        value: (system_dcg / ideal_dcg).min(1.0),
        degenerate: false,
        k_effective,
    })
}

/// nDCG@k with the relevance source named in `config`.
pub fn evaluate_ranking(
    ranking: &Ranking,
    config: &MetricConfig,
    phi: Option<&RelevanceFunction>,
) -> Result<NdcgOutcome> {
    let relevance = match &config.relevance {
        RelevanceSource::AdHoc(buckets) => adhoc_relevance(&ranking.scores, buckets)?,
        RelevanceSource::Phi => {
            let phi = phi.ok_or(Error::MissingRelevanceFunction)?;
            phi_relevance(&ranking.scores, phi)?
        }
    };
    ndcg(ranking, &relevance, config)
}
