use serde::{Deserialize, Serialize};

use super::sweep::ResultRow;
use crate::error::{Error, Result};

/// Least-squares line through (log n, log mse).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SlopeFit {
    pub slope: f64,
    /// Standard error of the slope (0 with exactly collinear points).
    pub stderr: f64,
    pub r2: f64,
    pub points: usize,
}

/// Minimum number of distinct n values in a fit.
pub const MIN_FIT_POINTS: usize = 4;
/// Minimum span max n / min n of a fit.
pub const MIN_FIT_SPAN: f64 = 100.0;

/// OLS slope of log y against log x. Points with y ≤ 0 (or non-finite) are
/// dropped with a warning; the rest must cover at least four distinct x
/// values spanning two decades.
pub fn fit_loglog_slope(points: &[(f64, f64)]) -> Result<SlopeFit> {
    let mut kept = Vec::with_capacity(points.len());
    for &(x, y) in points {
        if y > 0.0 && y.is_finite() && x > 0.0 {
            kept.push((x.ln(), y.ln()));
        } else {
            log::warn!("excluding point ({x}, {y}) from log-log fit: nonpositive value");
        }
    }
    let mut xs: Vec<f64> = kept.iter().map(|p| p.0).collect();
    xs.sort_by(f64::total_cmp);
    xs.dedup();
    if xs.len() < MIN_FIT_POINTS {
        return Err(Error::InsufficientData(format!(
            "{} distinct n values, need {MIN_FIT_POINTS}",
            xs.len()
        )));
    }
    let span = (xs[xs.len() - 1] - xs[0]).exp();
    if span < MIN_FIT_SPAN * (1.0 - 1e-12) {
        return Err(Error::InsufficientData(format!(
            "n values span a factor of {span:.3}, need {MIN_FIT_SPAN}"
        )));
    }
    let m = kept.len() as f64;
    let mx = kept.iter().map(|p| p.0).sum::<f64>() / m;
    let my = kept.iter().map(|p| p.1).sum::<f64>() / m;
    let sxx: f64 = kept.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = kept.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let syy: f64 = kept.iter().map(|p| (p.1 - my).powi(2)).sum();
    let slope = sxy / sxx;
    let sse = kept
        .iter()
        .map(|p| (p.1 - my - slope * (p.0 - mx)).powi(2))
        .sum::<f64>()
        .max(0.0);
    let stderr = if kept.len() > 2 {
        (sse / (m - 2.0) / sxx).sqrt()
    } else {
        0.0
    };
    let r2 = if syy > 0.0 { 1.0 - sse / syy } else { 1.0 };
    Ok(SlopeFit {
        slope,
        stderr,
        r2,
        points: kept.len(),
    })
}

/// Fit over the rows of one mechanism (and ε, when given) with n ≥ `min_n`.
pub fn fit_rows(rows: &[ResultRow], mechanism: &str, epsilon: Option<f64>, min_n: usize) -> Result<SlopeFit> {
    let points: Vec<(f64, f64)> = select(rows, mechanism, epsilon)
        .filter(|r| r.n >= min_n)
        .map(|r| (r.n as f64, r.mse_mean))
        .collect();
    fit_loglog_slope(&points)
}

/// Rows of `mechanism`; with `epsilon = Some(e)` only rows at that budget.
pub fn select<'a>(
    rows: &'a [ResultRow],
    mechanism: &'a str,
    epsilon: Option<f64>,
) -> impl Iterator<Item = &'a ResultRow> + 'a {
    rows.iter()
        .filter(move |r| r.mechanism == mechanism && (epsilon.is_none() || r.epsilon == epsilon))
}
