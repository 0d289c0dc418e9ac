//! Ranking datasets: CSV ingestion and batch nDCG vs nDCG_φ reports.
//!
//! Input format, one row per (ranking, item):
//!
//! ```text
//! ranking_id,item_id,position,score
//! day2,N102,1,100
//! day2,N114,2,20
//! ```
//!
//! An empty `score` field reads as 0.

use std::collections::HashMap;
use std::io::{Read, Write};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metrics::{
    evaluate_ranking, Buckets, DiscountKind, GainKind, MetricConfig, Ranking, RelevanceSource,
    ScoredItem,
};
use crate::numfmt::{self, fmt_sig15};
use crate::relevance::{quantile_sorted, RelevanceFunction};

pub const HEADER: [&str; 4] = ["ranking_id", "item_id", "position", "score"];

struct Row {
    line: u64,
    item_id: String,
    position: usize,
    score: f64,
}

fn parse_error(line: u64, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

fn csv_error(err: csv::Error) -> Error {
    let line = err.position().map(|p| p.line()).unwrap_or(0);
    match err.kind() {
        csv::ErrorKind::Io(e) => Error::Io(e.to_string()),
        _ => parse_error(line, err.to_string()),
    }
}

/// Reads rankings, grouped by `ranking_id` in order of first appearance.
pub fn parse_rankings<R: Read>(input: R) -> Result<Vec<Ranking>> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(input);

    let header = reader.headers().map_err(csv_error)?.clone();
    if header.is_empty() || header.iter().all(str::is_empty) {
        return Err(Error::EmptyInput);
    }
    if header.iter().ne(HEADER) {
        return Err(parse_error(
            1,
            format!(
                "expected header `{}`, found `{}`",
                HEADER.join(","),
                header.iter().collect::<Vec<_>>().join(",")
            ),
        ));
    }

    let mut groups: Vec<(String, Vec<Row>)> = Vec::new();
    let mut index: HashMap<String, usize> = HashMap::new();
    for record in reader.records() {
        let record = record.map_err(csv_error)?;
        let line = record.position().map(|p| p.line()).unwrap_or(0);
        let ranking_id = &record[0];
        let item_id = &record[1];
        if ranking_id.is_empty() {
            return Err(parse_error(line, "empty ranking_id"));
        }
        if item_id.is_empty() {
            return Err(parse_error(line, "empty item_id"));
        }
        let position: usize = record[2].parse().ok().filter(|&p| p >= 1).ok_or_else(|| {
            parse_error(
                line,
                format!("position `{}` is not an integer >= 1", &record[2]),
            )
        })?;
        let score = match &record[3] {
            "" => 0.0,
            s => s
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite() && *v >= 0.0)
                .ok_or_else(|| {
                    parse_error(line, format!("score `{s}` is not a finite number >= 0"))
                })?,
        };
        let slot = *index.entry(ranking_id.to_string()).or_insert_with(|| {
            groups.push((ranking_id.to_string(), Vec::new()));
            groups.len() - 1
        });
        groups[slot].1.push(Row {
            line,
            item_id: item_id.to_string(),
            position,
            score,
        });
    }
    if groups.is_empty() {
        return Err(Error::EmptyInput);
    }
    groups
        .into_iter()
        .map(|(id, rows)| build_ranking(id, rows))
        .collect()
}

fn build_ranking(ranking_id: String, mut rows: Vec<Row>) -> Result<Ranking> {
    let invalid = |message: String| Error::Validation {
        ranking_id: ranking_id.clone(),
        message,
    };
    rows.sort_by_key(|r| r.position);
    for (expected, row) in (1..).zip(&rows) {
        if row.position < expected {
            return Err(invalid(format!(
                "duplicate position {} (line {})",
                row.position, row.line
            )));
        }
        if row.position > expected {
            return Err(invalid(format!(
                "positions must be contiguous from 1; position {expected} is missing"
            )));
        }
    }
    let mut seen = HashMap::with_capacity(rows.len());
    for row in &rows {
        if let Some(first) = seen.insert(row.item_id.as_str(), row.line) {
            return Err(invalid(format!(
                "item `{}` appears on lines {first} and {}",
                row.item_id, row.line
            )));
        }
    }
    let items = rows
        .iter()
        .map(|r| ScoredItem::new(r.item_id.clone(), r.score));
    Ranking::from_ordered(ranking_id.clone(), items)
}

/// Writes rankings in the input CSV format (system order only).
pub fn write_rankings<W: Write>(rankings: &[Ranking], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(HEADER).map_err(csv_error)?;
    for r in rankings {
        for (pos, id) in r.system_order().iter().enumerate() {
            let score = r.score(id).unwrap_or_default();
            w.write_record([
                r.ranking_id(),
                id.as_str(),
                &(pos + 1).to_string(),
                &score.to_string(),
            ])
            .map_err(csv_error)?;
        }
    }
    w.flush().map_err(|e| Error::Io(e.to_string()))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluationConfig {
    pub gain: GainKind,
    pub discount: DiscountKind,
    pub ks: Vec<usize>,
    pub buckets: Buckets,
}

impl Default for EvaluationConfig {
    fn default() -> Self {
        EvaluationConfig {
            gain: GainKind::Exponential,
            discount: DiscountKind::Logarithmic,
            ks: vec![10],
            buckets: Buckets::default(),
        }
    }
}

impl EvaluationConfig {
    pub fn validate(&self) -> Result<()> {
        if self.ks.is_empty() {
            return Err(Error::InvalidConfig(
                "at least one cut-off k is required".into(),
            ));
        }
        if self.ks.contains(&0) {
            return Err(Error::InvalidConfig("cut-off k must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct DegenerateFlags {
    /// All candidate scores at or below the median; φ is identically zero.
    pub relevance_function: bool,
    /// Ideal ad-hoc DCG@k was zero.
    pub adhoc: bool,
    /// Ideal φ DCG@k was zero.
    pub phi: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankingRow {
    pub ranking_id: String,
    pub k: usize,
    pub k_effective: usize,
    #[serde(serialize_with = "numfmt::serialize")]
    pub ndcg_adhoc: f64,
    #[serde(serialize_with = "numfmt::serialize")]
    pub ndcg_phi: f64,
    /// `ndcg_adhoc - ndcg_phi`
    #[serde(serialize_with = "numfmt::serialize")]
    pub difference: f64,
    pub degenerate: DegenerateFlags,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ColumnSummary {
    #[serde(serialize_with = "numfmt::serialize")]
    pub mean: f64,
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

impl ColumnSummary {
    pub fn from_values(values: &[f64]) -> Option<Self> {
        if values.is_empty() {
            return None;
        }
        let mut sorted = values.to_vec();
        sorted.sort_by(f64::total_cmp);
        let q = |p| quantile_sorted(&sorted, p).expect("non-empty, p in [0, 1]");
        Some(ColumnSummary {
            mean: values.iter().sum::<f64>() / values.len() as f64,
            min: sorted[0],
            q1: q(0.25),
            median: q(0.5),
            q3: q(0.75),
            max: sorted[sorted.len() - 1],
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CutoffSummary {
    pub k: usize,
    pub rankings: usize,
    pub ndcg_adhoc: Option<ColumnSummary>,
    pub ndcg_phi: Option<ColumnSummary>,
    pub difference: Option<ColumnSummary>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankingError {
    pub ranking_id: String,
    pub code: String,
    pub message: String,
}

impl RankingError {
    pub fn new(ranking_id: impl Into<String>, error: &Error) -> Self {
        RankingError {
            ranking_id: ranking_id.into(),
            code: error.code().to_string(),
            message: error.to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluationReport {
    pub config: EvaluationConfig,
    pub per_ranking: Vec<RankingRow>,
    pub summary: Vec<CutoffSummary>,
    pub errors: Vec<RankingError>,
}

impl EvaluationReport {
    pub fn rows_for_k(&self, k: usize) -> impl Iterator<Item = &RankingRow> {
        self.per_ranking.iter().filter(move |r| r.k == k)
    }

    pub fn mean_difference(&self, k: usize) -> Option<f64> {
        self.summary
            .iter()
            .find(|s| s.k == k)
            .and_then(|s| s.difference.as_ref())
            .map(|d| d.mean)
    }
}

/// Both metrics for one ranking at every configured cut-off, with φ fitted
/// on this ranking's candidate scores.
pub fn evaluate_single(ranking: &Ranking, config: &EvaluationConfig) -> Result<Vec<RankingRow>> {
    let phi = RelevanceFunction::from_scores(&ranking.score_values())?;
    config
        .ks
        .iter()
        .map(|&k| {
            let adhoc_cfg = MetricConfig::new(
                config.gain,
                config.discount,
                k,
                RelevanceSource::AdHoc(config.buckets.clone()),
            )?;
            let phi_cfg = MetricConfig::new(config.gain, config.discount, k, RelevanceSource::Phi)?;
            let adhoc = evaluate_ranking(ranking, &adhoc_cfg, None)?;
            let phi_out = evaluate_ranking(ranking, &phi_cfg, Some(&phi))?;
            Ok(RankingRow {
                ranking_id: ranking.ranking_id().to_string(),
                k,
                k_effective: adhoc.k_effective,
                ndcg_adhoc: adhoc.value,
                ndcg_phi: phi_out.value,
                difference: adhoc.value - phi_out.value,
                degenerate: DegenerateFlags {
                    relevance_function: phi.is_degenerate(),
                    adhoc: adhoc.degenerate,
                    phi: phi_out.degenerate,
                },
            })
        })
        .collect()
}

/// Evaluates every ranking independently. Per-ranking failures are recorded
/// in `errors`; only an invalid `config` fails the whole batch.
pub fn evaluate_dataset(
    rankings: &[Ranking],
    config: &EvaluationConfig,
) -> Result<EvaluationReport> {
    config.validate()?;
    let results: Vec<Result<Vec<RankingRow>>> = rankings
        .par_iter()
        .map(|r| evaluate_single(r, config))
        .collect();

    let mut per_ranking = Vec::new();
    let mut errors = Vec::new();
    for (ranking, result) in rankings.iter().zip(results) {
        match result {
            Ok(rows) => per_ranking.extend(rows),
            Err(e) => errors.push(RankingError::new(ranking.ranking_id(), &e)),
        }
    }

    let summary = config
        .ks
        .iter()
        .map(|&k| {
            let rows: Vec<&RankingRow> = per_ranking.iter().filter(|r| r.k == k).collect();
            let column = |f: fn(&RankingRow) -> f64| {
                ColumnSummary::from_values(&rows.iter().map(|r| f(r)).collect::<Vec<_>>())
            };
            CutoffSummary {
                k,
                rankings: rows.len(),
                ndcg_adhoc: column(|r| r.ndcg_adhoc),
                ndcg_phi: column(|r| r.ndcg_phi),
                difference: column(|r| r.difference),
            }
        })
        .collect();

    Ok(EvaluationReport {
        config: config.clone(),
        per_ranking,
        summary,
        errors,
    })
}

pub const REPORT_CSV_HEADER: [&str; 9] = [
    "ranking_id",
    "k",
    "k_effective",
    "ndcg_adhoc",
    "ndcg_phi",
    "difference",
    "degenerate_relevance_function",
    "degenerate_adhoc",
    "degenerate_phi",
];

/// Per-ranking rows as CSV.
pub fn write_report_csv<W: Write>(report: &EvaluationReport, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(REPORT_CSV_HEADER).map_err(csv_error)?;
    for r in &report.per_ranking {
        w.write_record([
            r.ranking_id.clone(),
            r.k.to_string(),
            r.k_effective.to_string(),
            fmt_sig15(r.ndcg_adhoc),
            fmt_sig15(r.ndcg_phi),
            fmt_sig15(r.difference),
            r.degenerate.relevance_function.to_string(),
            r.degenerate.adhoc.to_string(),
            r.degenerate.phi.to_string(),
        ])
        .map_err(csv_error)?;
    }
    w.flush().map_err(|e| Error::Io(e.to_string()))
}
