//! Score-driven relevance function φ.
//!
//! φ maps an item score to a relevance judgment in `[0, 1]`. It is a monotone
//! cubic Hermite interpolant through control points built from the score
//! sample:
//!
//! * `(min, 0)` and `(median, 0)`: everything at or below the median is
//!   non-relevant,
//! * `(max, 1)`,
//! * when the maximum is a boxplot outlier, `(upper_whisker, 1 - alpha)` with
//!   `alpha = (max - upper_whisker) / (max - min)`.

mod pchip;
mod quantile;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use pchip::{fritsch_carlson_slopes, hermite_segment};
pub use quantile::{quantile, quantile_sorted, ScoreSummary};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ControlPoint {
    pub x: f64,
    pub v: f64,
}

impl ControlPoint {
    pub fn new(x: f64, v: f64) -> Self {
        ControlPoint { x, v }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ControlPoints {
    Knots(Vec<ControlPoint>),
    /// `max == median`: φ is identically zero.
    Degenerate,
}

/// Relative distance of the maximum beyond the upper whisker.
pub fn alpha(summary: &ScoreSummary) -> Result<f64> {
    if summary.max == summary.min {
        return Err(Error::DegenerateDistribution);
    }
    if !summary.has_outliers {
        return Err(Error::NoOutlier);
    }
    Ok((summary.max - summary.upper_whisker) / (summary.max - summary.min))
}

pub fn build_control_points(scores: &[f64]) -> Result<ControlPoints> {
    let summary = ScoreSummary::from_scores(scores)?;
    Ok(control_points_from_summary(&summary))
}

fn control_points_from_summary(s: &ScoreSummary) -> ControlPoints {
    if s.max == s.median {
        return ControlPoints::Degenerate;
    }
    let mut knots = Vec::with_capacity(4);
    if s.min < s.median {
        knots.push(ControlPoint::new(s.min, 0.0));
    }
    knots.push(ControlPoint::new(s.median, 0.0));
    if s.has_outliers && s.median < s.upper_whisker && s.upper_whisker < s.max {
        // has_outliers and max > min hold here, so alpha is defined
        let a = (s.max - s.upper_whisker) / (s.max - s.min);
        knots.push(ControlPoint::new(s.upper_whisker, 1.0 - a));
    }
    knots.push(ControlPoint::new(s.max, 1.0));
    ControlPoints::Knots(knots)
}

/// A fitted relevance function.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RelevanceFunction {
    knots: Vec<ControlPoint>,
    derivatives: Vec<f64>,
    degenerate: bool,
    domain: (f64, f64),
}

impl RelevanceFunction {
    /// Fits φ to a score sample.
    pub fn from_scores(scores: &[f64]) -> Result<Self> {
        let summary = ScoreSummary::from_scores(scores)?;
        match control_points_from_summary(&summary) {
            ControlPoints::Knots(knots) => {
                let mut f = fit_pchip(&knots)?;
                f.domain = (summary.min, summary.max);
                Ok(f)
            }
            ControlPoints::Degenerate => Ok(RelevanceFunction {
                knots: vec![ControlPoint::new(summary.median, 0.0)],
                derivatives: vec![0.0],
                degenerate: true,
                domain: (summary.min, summary.max),
            }),
        }
    }

    pub fn knots(&self) -> &[ControlPoint] {
        &self.knots
    }

    pub fn derivatives(&self) -> &[f64] {
        &self.derivatives
    }

    pub fn is_degenerate(&self) -> bool {
        self.degenerate
    }

    pub fn domain(&self) -> (f64, f64) {
        self.domain
    }

    /// Evaluates φ at `y`, clamping to the end knot values outside the knots.
    pub fn eval(&self, y: f64) -> Result<f64> {
        if !y.is_finite() {
            return Err(Error::InvalidScore(y));
        }
        if self.degenerate {
            return Ok(0.0);
        }
        let first = self.knots[0];
        let last = self.knots[self.knots.len() - 1];
        if y <= first.x {
            return Ok(first.v);
        }
        if y >= last.x {
            return Ok(last.v);
        }
        // first knot with x > y; y is strictly inside the knot span
        let j = self.knots.partition_point(|k| k.x <= y) - 1;
        let (a, b) = (self.knots[j], self.knots[j + 1]);
        let v = hermite_segment(
            a.x,
            b.x,
            a.v,
            b.v,
            self.derivatives[j],
            self.derivatives[j + 1],
            y,
        );
        Ok(v.clamp(a.v, b.v))
    }
}

/// Fits a monotone cubic Hermite interpolant through `points`.
///
/// Abscissas must be strictly increasing, relevances finite, non-decreasing
/// and within `[0, 1]`.
pub fn fit_pchip(points: &[ControlPoint]) -> Result<RelevanceFunction> {
    if points.len() < 2 {
        return Err(Error::InsufficientPoints(points.len()));
    }
    for w in points.windows(2) {
        if !(w[0].x.is_finite() && w[1].x.is_finite() && w[0].x < w[1].x) {
            return Err(Error::InvalidKnots(format!(
                "abscissas must be finite and strictly increasing ({} then {})",
                w[0].x, w[1].x
            )));
        }
        if w[1].v < w[0].v {
            return Err(Error::InvalidKnots(format!(
                "relevance must be non-decreasing ({} then {})",
                w[0].v, w[1].v
            )));
        }
    }
    if let Some(p) = points.iter().find(|p| !(0.0..=1.0).contains(&p.v)) {
        return Err(Error::InvalidKnots(format!(
            "relevance {} outside [0, 1]",
            p.v
        )));
    }
    let xs: Vec<f64> = points.iter().map(|p| p.x).collect();
    let vs: Vec<f64> = points.iter().map(|p| p.v).collect();
    let derivatives = fritsch_carlson_slopes(&xs, &vs)?;
    Ok(RelevanceFunction {
        knots: points.to_vec(),
        derivatives,
        degenerate: false,
        domain: (xs[0], xs[xs.len() - 1]),
    })
}
