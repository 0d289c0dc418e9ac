//! Monotone piecewise cubic Hermite interpolation (Fritsch–Carlson slopes).

use crate::error::{Error, Result};

/// Per-knot derivatives for a monotone cubic Hermite interpolant.
///
/// `xs` must be strictly increasing and `vs` the same length (at least 2).
pub fn fritsch_carlson_slopes(xs: &[f64], vs: &[f64]) -> Result<Vec<f64>> {
    let n = xs.len();
    if n < 2 || vs.len() != n {
        return Err(Error::InsufficientPoints(n.min(vs.len())));
    }
    let mut h = Vec::with_capacity(n - 1);
    let mut delta = Vec::with_capacity(n - 1);
    for (xw, vw) in xs.windows(2).zip(vs.windows(2)) {
        let hi = xw[1] - xw[0];
        if hi.partial_cmp(&0.0) != Some(std::cmp::Ordering::Greater) {
            return Err(Error::InvalidKnots(format!(
                "abscissas must be strictly increasing ({} then {})",
                xw[0], xw[1]
            )));
        }
        h.push(hi);
        delta.push((vw[1] - vw[0]) / hi);
    }

    if n == 2 {
        return Ok(vec![delta[0], delta[0]]);
    }

    let mut d = vec![0.0; n];
    for j in 1..n - 1 {
        let (s1, s2) = (delta[j - 1], delta[j]);
        if s1 == 0.0 || s2 == 0.0 || s1.signum() != s2.signum() {
            continue;
        }
        let w1 = 2.0 * h[j] + h[j - 1];
        let w2 = h[j] + 2.0 * h[j - 1];
        d[j] = (w1 + w2) / (w1 / s1 + w2 / s2);
    }
    d[0] = endpoint_slope(h[0], h[1], delta[0], delta[1]);
    d[n - 1] = endpoint_slope(h[n - 2], h[n - 3], delta[n - 2], delta[n - 3]);
    Ok(d)
}

/// Non-centred three-point estimate; `h0`/`s0` belong to the end segment.
fn endpoint_slope(h0: f64, h1: f64, s0: f64, s1: f64) -> f64 {
    let d = ((2.0 * h0 + h1) * s0 - h0 * s1) / (h0 + h1);
    if s0 == 0.0 || d.signum() != s0.signum() {
        0.0
    } else if d.abs() > 3.0 * s0.abs() {
        3.0 * s0
    } else {
        d
    }
}

/// Cubic Hermite value on `[x0, x1]` at `y`.
#[allow(clippy::too_many_arguments)]
pub fn hermite_segment(x0: f64, x1: f64, v0: f64, v1: f64, d0: f64, d1: f64, y: f64) -> f64 {
    let h = x1 - x0;
    let t = (y - x0) / h;
    let s = 1.0 - t;
    v0 + (v1 - v0) * t * t * (3.0 - 2.0 * t) + h * t * s * (s * d0 - t * d1)
}
