use serde::{Deserialize, Serialize};

use super::basis::{trig_basis_eval, trig_basis_prefix};
use crate::error::{invalid, Result};

/// Minimum number of Simpson panels used for density integrals on [0, 1].
pub const QUADRATURE_PANELS: usize = 4096;

/// A real function on [0, 1] that can be compared in L².
///
/// Implementors expose their non-smooth points so quadrature can split there,
/// and optionally an exact representation that enables closed-form distances.
pub trait Density: Send + Sync {
    fn eval(&self, x: f64) -> f64;

    /// Interior points of (0, 1) where the function or a derivative jumps.
    fn breakpoints(&self) -> Vec<f64> {
        Vec::new()
    }

    fn domain(&self) -> (f64, f64) {
        (0.0, 1.0)
    }

    /// Bin values when the function is piecewise constant on k equal bins.
    fn piecewise_bins(&self) -> Option<&[f64]> {
        None
    }

    /// Coefficients on φ_0, φ_1, … when the function is a finite trig series.
    fn series_coefficients(&self) -> Option<&[f64]> {
        None
    }
}

/// A density estimate: a k-bin histogram or a truncated trigonometric series.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "variant", rename_all = "snake_case")]
pub enum DensityModel {
    /// Value `bin_values[j]` on [j/k, (j+1)/k); the last bin is closed.
    PiecewiseConstant { bin_values: Vec<f64> },
    /// Σ_j coefficients[j] · φ_j with φ the 0-based trigonometric basis.
    Series { coefficients: Vec<f64> },
}

impl DensityModel {
    pub fn piecewise(bin_values: Vec<f64>) -> Result<Self> {
        if bin_values.is_empty() {
            return Err(invalid("histogram needs at least one bin"));
        }
        Ok(Self::PiecewiseConstant { bin_values })
    }

    pub fn series(coefficients: Vec<f64>) -> Result<Self> {
        if coefficients.is_empty() {
            return Err(invalid("series needs at least one coefficient"));
        }
        Ok(Self::Series { coefficients })
    }

    /// Number of bins or retained coefficients.
    pub fn len(&self) -> usize {
        match self {
            Self::PiecewiseConstant { bin_values } => bin_values.len(),
            Self::Series { coefficients } => coefficients.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn integral(&self) -> f64 {
        match self {
            Self::PiecewiseConstant { bin_values } => {
                bin_values.iter().sum::<f64>() / bin_values.len() as f64
            }
            Self::Series { coefficients } => coefficients[0],
        }
    }
}

impl Density for DensityModel {
    fn eval(&self, x: f64) -> f64 {
        match self {
            Self::PiecewiseConstant { bin_values } => {
                let k = bin_values.len();
                let j = ((x * k as f64).floor() as isize).clamp(0, k as isize - 1) as usize;
                bin_values[j]
            }
            Self::Series { coefficients } => {
                if coefficients.len() <= 64 {
                    let mut phi = [0.0; 64];
                    let phi = &mut phi[..coefficients.len()];
                    trig_basis_prefix(x, phi);
                    phi.iter().zip(coefficients).map(|(p, c)| p * c).sum()
                } else {
                    coefficients
                        .iter()
                        .enumerate()
                        .map(|(j, c)| c * trig_basis_eval(j, x))
                        .sum()
                }
            }
        }
    }

    fn breakpoints(&self) -> Vec<f64> {
        match self {
            Self::PiecewiseConstant { bin_values } => {
                let k = bin_values.len();
                (1..k).map(|j| j as f64 / k as f64).collect()
            }
            Self::Series { .. } => Vec::new(),
        }
    }

    fn piecewise_bins(&self) -> Option<&[f64]> {
        match self {
            Self::PiecewiseConstant { bin_values } => Some(bin_values),
            Self::Series { .. } => None,
        }
    }

    fn series_coefficients(&self) -> Option<&[f64]> {
        match self {
            Self::Series { coefficients } => Some(coefficients),
            Self::PiecewiseConstant { .. } => None,
        }
    }
}

fn merged_breakpoints(a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut pts: Vec<f64> = std::iter::once(0.0)
        .chain(a.iter().chain(b).copied().filter(|x| *x > 0.0 && *x < 1.0))
        .chain(std::iter::once(1.0))
        .collect();
    pts.sort_by(f64::total_cmp);
    pts.dedup_by(|x, y| (*x - *y).abs() < 1e-15);
    pts
}

/// Composite Simpson integral of `g` over [0, 1], split at `breakpoints`.
///
/// Every segment gets an even panel count proportional to its length, with
/// at least [`QUADRATURE_PANELS`] panels overall.
pub fn integrate(g: impl Fn(f64) -> f64, breakpoints: &[f64]) -> f64 {
    let pts = merged_breakpoints(breakpoints, &[]);
    let mut total = 0.0;
    for w in pts.windows(2) {
        let (a, b) = (w[0], w[1]);
        let len = b - a;
        let mut panels = ((QUADRATURE_PANELS as f64 * len).ceil() as usize).max(2);
        panels += panels % 2;
        let h = len / panels as f64;
        // endpoints are taken one ulp inside so jumps at breakpoints are
        // evaluated on this segment's side
        let mut acc = g(a.next_up()) + g(b.next_down());
        for p in 1..panels {
            let weight = if p % 2 == 1 { 4.0 } else { 2.0 };
            acc += weight * g(a + p as f64 * h);
        }
        total += acc * h / 3.0;
    }
    total
}

/// ∫₀¹ (f − g)² dx.
///
/// Exact per piece for two histograms, Parseval for two trig series, and
/// breakpoint-aware Simpson quadrature otherwise.
pub fn l2_distance_squared(f: &dyn Density, g: &dyn Density) -> Result<f64> {
    if f.domain() != (0.0, 1.0) || g.domain() != (0.0, 1.0) {
        return Err(invalid(format!(
            "L2 distance needs both functions on [0,1], got {:?} and {:?}",
            f.domain(),
            g.domain()
        )));
    }
    if let (Some(a), Some(b)) = (f.piecewise_bins(), g.piecewise_bins()) {
        let pts = merged_breakpoints(&f.breakpoints(), &g.breakpoints());
        let total = pts
            .windows(2)
            .map(|w| {
                let mid = 0.5 * (w[0] + w[1]);
                let ia = ((mid * a.len() as f64) as usize).min(a.len() - 1);
                let ib = ((mid * b.len() as f64) as usize).min(b.len() - 1);
                (a[ia] - b[ib]).powi(2) * (w[1] - w[0])
            })
            .sum();
        return Ok(total);
    }
    if let (Some(a), Some(b)) = (f.series_coefficients(), g.series_coefficients()) {
        let n = a.len().max(b.len());
        let total = (0..n)
            .map(|j| {
                let x = a.get(j).copied().unwrap_or(0.0);
                let y = b.get(j).copied().unwrap_or(0.0);
                (x - y) * (x - y)
            })
            .sum();
        return Ok(total);
    }
    let pts = merged_breakpoints(&f.breakpoints(), &g.breakpoints());
    Ok(integrate(|x| (f.eval(x) - g.eval(x)).powi(2), &pts[1..pts.len() - 1]))
}

#[cfg(test)]
mod tests {
    use super::*;

    struct OffDomain;
    impl Density for OffDomain {
        fn eval(&self, _: f64) -> f64 {
            1.0
        }
        fn domain(&self) -> (f64, f64) {
            (0.0, 2.0)
        }
    }

    /// Forces the quadrature path for a series model.
    struct Opaque<'a>(&'a DensityModel);
    impl Density for Opaque<'_> {
        fn eval(&self, x: f64) -> f64 {
            self.0.eval(x)
        }
    }

    #[test]
    fn identical_models_are_at_distance_zero() {
        let h = DensityModel::piecewise(vec![0.5, 1.5]).unwrap();
        assert_eq!(l2_distance_squared(&h, &h).unwrap(), 0.0);
        let s = DensityModel::series(vec![1.0, 0.2]).unwrap();
        assert_eq!(l2_distance_squared(&s, &s).unwrap(), 0.0);
    }

    #[test]
    fn piecewise_closed_form() {
        let a = DensityModel::piecewise(vec![2.0, 0.0]).unwrap();
        let b = DensityModel::piecewise(vec![0.0, 2.0]).unwrap();
        assert!((l2_distance_squared(&a, &b).unwrap() - 4.0).abs() < 1e-15);
    }

    #[test]
    fn piecewise_mismatched_bin_counts() {
        // [1,1] vs [0,3,0]: on thirds/halves grid
        let a = DensityModel::piecewise(vec![1.0, 1.0]).unwrap();
        let b = DensityModel::piecewise(vec![0.0, 3.0, 0.0]).unwrap();
        let exact = (1.0 / 3.0) * 1.0 + (1.0 / 3.0) * 4.0 + (1.0 / 3.0) * 1.0;
        assert!((l2_distance_squared(&a, &b).unwrap() - exact).abs() < 1e-14);
        let q = integrate(|x| (a.eval(x) - b.eval(x)).powi(2), &[1.0 / 3.0, 0.5, 2.0 / 3.0]);
        assert!((q - exact).abs() < 1e-12);
    }

    #[test]
    fn parseval_matches_quadrature() {
        let a = DensityModel::series(vec![1.0, 0.3]).unwrap();
        let b = DensityModel::series(vec![1.0, 0.0]).unwrap();
        let parseval = l2_distance_squared(&a, &b).unwrap();
        assert!((parseval - 0.09).abs() < 1e-15);
        let quad = l2_distance_squared(&Opaque(&a), &b).unwrap();
        assert!((quad - parseval).abs() < 1e-6);

        let c = DensityModel::series(vec![1.0, -0.2, 0.1, 0.05, 0.0, 0.3]).unwrap();
        let d = DensityModel::series(vec![0.9, 0.1]).unwrap();
        let p = l2_distance_squared(&c, &d).unwrap();
        let q = l2_distance_squared(&Opaque(&c), &d).unwrap();
        assert!((p - q).abs() < 1e-6, "{p} vs {q}");
    }

    #[test]
    fn mixed_models_use_quadrature() {
        // histogram [1,1] is the constant 1 = series (1)
        let h = DensityModel::piecewise(vec![1.0, 1.0]).unwrap();
        let s = DensityModel::series(vec![1.0, 0.5]).unwrap();
        assert!((l2_distance_squared(&h, &s).unwrap() - 0.25).abs() < 1e-9);
    }

    #[test]
    fn rejects_other_domains() {
        let h = DensityModel::piecewise(vec![1.0]).unwrap();
        assert!(l2_distance_squared(&OffDomain, &h).is_err());
    }

    #[test]
    fn last_bin_is_closed() {
        let h = DensityModel::piecewise(vec![1.0, 2.0, 3.0, 4.0]).unwrap();
        assert_eq!(h.eval(1.0), 4.0);
        assert_eq!(h.eval(0.25), 2.0);
        assert_eq!(h.eval(0.0), 1.0);
    }

    #[test]
    fn integrals() {
        let h = DensityModel::piecewise(vec![0.0, 4.0, 0.0, 0.0]).unwrap();
        assert_eq!(h.integral(), 1.0);
        let s = DensityModel::series(vec![1.0, 0.7, -0.2]).unwrap();
        assert!((integrate(|x| s.eval(x), &[]) - 1.0).abs() < 1e-12);
    }
}
