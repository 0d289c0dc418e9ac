use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Linearly interpolated quantile at 1-based fractional index `h = (n-1)p + 1`.
pub fn quantile(scores: &[f64], p: f64) -> Result<f64> {
    let sorted = sorted_finite(scores)?;
    quantile_sorted(&sorted, p)
}

/// As [`quantile`], for input already sorted ascending.
pub fn quantile_sorted(sorted: &[f64], p: f64) -> Result<f64> {
    if sorted.is_empty() {
        return Err(Error::EmptyInput);
    }
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidProbability(p));
    }
    let h = (sorted.len() - 1) as f64 * p;
    let lo = h.floor() as usize;
    let frac = h - lo as f64;
    let low = sorted[lo];
    match sorted.get(lo + 1) {
        Some(&next) if frac > 0.0 => {
            let gap = next - low;
            let v = if gap.is_finite() {
                low + frac * gap
            } else {
                (1.0 - frac) * low + frac * next
            };
            Ok(v.clamp(low, next))
        }
        _ => Ok(low),
    }
}

pub(crate) fn sorted_finite(scores: &[f64]) -> Result<Vec<f64>> {
    if scores.is_empty() {
        return Err(Error::EmptyInput);
    }
    if let Some(&bad) = scores.iter().find(|s| !s.is_finite()) {
        return Err(Error::InvalidScore(bad));
    }
    let mut sorted = scores.to_vec();
    sorted.sort_by(f64::total_cmp);
    Ok(sorted)
}

/// Five-number summary plus the boxplot upper whisker.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScoreSummary {
    pub min: f64,
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
    pub max: f64,
    pub iqr: f64,
    /// `q3 + 1.5 * iqr`
    pub upper_whisker: f64,
    /// `max > upper_whisker`
    pub has_outliers: bool,
}

impl ScoreSummary {
    pub fn from_scores(scores: &[f64]) -> Result<Self> {
        let sorted = sorted_finite(scores)?;
        let q1 = quantile_sorted(&sorted, 0.25)?;
        let median = quantile_sorted(&sorted, 0.5)?;
        let q3 = quantile_sorted(&sorted, 0.75)?;
        let max = sorted[sorted.len() - 1];
        let iqr = q3 - q1;
        let upper_whisker = q3 + 1.5 * iqr;
        Ok(ScoreSummary {
            min: sorted[0],
            q1,
            median,
            q3,
            max,
            iqr,
            upper_whisker,
            has_outliers: max > upper_whisker,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn quantile_examples() {
        let ys = [1.0, 2.0, 3.0, 4.0, 100.0];
        assert_eq!(quantile(&ys, 0.5).unwrap(), 3.0);
        assert_eq!(quantile(&ys, 0.75).unwrap(), 4.0);
        assert_eq!(quantile(&[10.0, 20.0], 0.5).unwrap(), 15.0);
        assert_eq!(quantile(&[20.0, 10.0], 0.25).unwrap(), 12.5);
        assert_eq!(quantile(&[7.0], 0.3).unwrap(), 7.0);
        assert_eq!(quantile(&[-f64::MAX, f64::MAX], 0.5).unwrap(), 0.0);
    }

    #[test]
    fn quantile_errors() {
        assert_eq!(quantile(&[], 0.5), Err(Error::EmptyInput));
        assert_eq!(quantile(&[1.0], 1.5), Err(Error::InvalidProbability(1.5)));
        assert!(matches!(
            quantile(&[1.0], -0.1),
            Err(Error::InvalidProbability(_))
        ));
        assert!(matches!(
            quantile(&[f64::NAN], 0.5),
            Err(Error::InvalidScore(_))
        ));
    }

    #[test]
    fn summary_of_skewed_sample() {
        let s = ScoreSummary::from_scores(&[1.0, 2.0, 3.0, 4.0, 100.0]).unwrap();
        assert_eq!(
            (s.min, s.q1, s.median, s.q3, s.max),
            (1.0, 2.0, 3.0, 4.0, 100.0)
        );
        assert_eq!(s.iqr, 2.0);
        assert_eq!(s.upper_whisker, 7.0);
        assert!(s.has_outliers);

        let s = ScoreSummary::from_scores(&[1., 2., 3., 4., 5., 6., 7., 8., 9.]).unwrap();
        assert_eq!((s.q1, s.median, s.q3), (3.0, 5.0, 7.0));
        assert_eq!(s.upper_whisker, 13.0);
        assert!(!s.has_outliers);
    }

    proptest! {
        #[test]
        fn summary_is_ordered(ys in prop::collection::vec(-1e6f64..1e6, 1..200)) {
            let s = ScoreSummary::from_scores(&ys).unwrap();
            prop_assert!(s.min <= s.q1 && s.q1 <= s.median);
            prop_assert!(s.median <= s.q3 && s.q3 <= s.max);
            prop_assert!(s.iqr >= 0.0);
        }
    }
}
