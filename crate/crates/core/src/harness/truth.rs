use rand_distr::{Binomial, Distribution};
use serde::{Deserialize, Serialize};

use crate::domain::{l2_distance_squared, trig_basis_eval, Density, DensityModel, RngStream, SimplexVector};
use crate::error::{invalid, Result};

/// Number of cells in the tabulated inverse CDF of series test densities.
pub const INVERSE_CDF_CELLS: usize = 1 << 14;

/// Trigonometric coefficients carried by the `sobolev2` test density.
const SOBOLEV2_TERMS: usize = 512;
/// Decay exponent of the `sobolev2` coefficients, θ_j ∝ j^{−2.6}.
const SOBOLEV2_DECAY: f64 = 2.6;
/// Σ_j j⁴θ_j² of the `sobolev2` density (inside the unit ball F₂[1]).
const SOBOLEV2_NORM_SQ: f64 = 0.9;

/// Named test densities on [0, 1].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DensityName {
    /// f ≡ 1.
    Uniform,
    /// f = 1 + g₁ with g₁ the tent bump: 1-Lipschitz, closed-form CDF.
    Tent,
    /// f = 1 + a·Σ_{j=1}^{512} j^{−2.6} φ_j with Σ j⁴θ_j² = 0.9, inside F₂[1].
    Sobolev2,
}

/// Ground truth of an experiment as written in a config file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TruthSpec {
    Simplex(Vec<f64>),
    Density(DensityName),
}

/// A test density ready for sampling and exact risk evaluation.
#[derive(Debug, Clone)]
pub struct TestDensity {
    name: DensityName,
    /// Trigonometric coefficients when the density is a finite series.
    coefficients: Option<Vec<f64>>,
    /// CDF on a uniform grid of `INVERSE_CDF_CELLS + 1` points (series only).
    cdf_table: Vec<f64>,
}

impl TestDensity {
    pub fn new(name: DensityName) -> Self {
        match name {
            DensityName::Uniform | DensityName::Tent => Self {
                name,
                coefficients: None,
                cdf_table: Vec::new(),
            },
            DensityName::Sobolev2 => {
                let raw: Vec<f64> = (1..=SOBOLEV2_TERMS).map(|j| (j as f64).powf(-SOBOLEV2_DECAY)).collect();
                let weighted: f64 = raw.iter().enumerate().map(|(i, t)| ((i + 1) as f64).powi(4) * t * t).sum();
                let a = (SOBOLEV2_NORM_SQ / weighted).sqrt();
                let coefficients: Vec<f64> = std::iter::once(1.0).chain(raw.iter().map(|t| a * t)).collect();
                let cdf_table = (0..=INVERSE_CDF_CELLS)
                    .map(|i| series_cdf(&coefficients, i as f64 / INVERSE_CDF_CELLS as f64))
                    .collect();
                Self {
                    name,
                    coefficients: Some(coefficients),
                    cdf_table,
                }
            }
        }
    }

    pub fn name(&self) -> DensityName {
        self.name
    }

    /// Trigonometric coefficients θ_0, θ_1, … when known exactly.
    pub fn coefficients(&self) -> Option<&[f64]> {
        self.coefficients.as_deref()
    }

    pub fn cdf(&self, x: f64) -> f64 {
        let x = x.clamp(0.0, 1.0);
        match self.name {
            DensityName::Uniform => x,
            DensityName::Tent => x + tent_integral(x),
            DensityName::Sobolev2 => series_cdf(self.coefficients.as_ref().expect("series density"), x),
        }
    }

    /// One draw from the density: closed-form inverse CDF for the uniform
    /// and tent densities, linear interpolation of the tabulated CDF otherwise.
    pub fn sample(&self, rng: &mut RngStream) -> f64 {
        let u = rng.unit();
        match self.name {
            DensityName::Uniform => u,
            DensityName::Tent => tent_quantile(u),
            DensityName::Sobolev2 => {
                let t = &self.cdf_table;
                let hi = t.partition_point(|&c| c <= u).clamp(1, t.len() - 1);
                let lo = hi - 1;
                let w = (u - t[lo]) / (t[hi] - t[lo]);
                ((lo as f64 + w) / INVERSE_CDF_CELLS as f64).clamp(0.0, 1.0)
            }
        }
    }

    /// P(X ∈ [(j−1)/k, j/k)) for j = 1..k.
    pub fn bin_probabilities(&self, k: usize) -> Vec<f64> {
        let edges: Vec<f64> = (0..=k).map(|j| self.cdf(j as f64 / k as f64)).collect();
        edges.windows(2).map(|w| (w[1] - w[0]).max(0.0)).collect()
    }

    /// ∫₀¹ f².
    pub fn squared_norm(&self) -> f64 {
        match self.name {
            DensityName::Uniform => 1.0,
            DensityName::Tent => 1.0 + 1.0 / 48.0,
            DensityName::Sobolev2 => self.coefficients.as_ref().expect("series density").iter().map(|t| t * t).sum(),
        }
    }

    /// ∫(f − ĥ)² for a k-bin histogram ĥ, exactly:
    /// ∫f² − 2Σ ĥ_j P(bin j) + Σ ĥ_j²/k.
    pub fn histogram_error(&self, bins: &[f64]) -> f64 {
        let k = bins.len();
        let p = self.bin_probabilities(k);
        let cross: f64 = bins.iter().zip(&p).map(|(h, q)| h * q).sum();
        let own: f64 = bins.iter().map(|h| h * h).sum::<f64>() / k as f64;
        (self.squared_norm() - 2.0 * cross + own).max(0.0)
    }

    /// ∫(f − f̂)² for a trigonometric series estimate f̂ (Parseval when the
    /// truth is a known series, quadrature otherwise).
    pub fn series_error(&self, coefficients: &[f64]) -> Result<f64> {
        match (&self.coefficients, self.name) {
            (Some(theta), _) => Ok(parseval(theta, coefficients)),
            (None, DensityName::Uniform) => Ok(parseval(&[1.0], coefficients)),
            (None, _) => l2_distance_squared(self, &DensityModel::series(coefficients.to_vec())?),
        }
    }
}

impl Density for TestDensity {
    fn eval(&self, x: f64) -> f64 {
        match self.name {
            DensityName::Uniform => 1.0,
            DensityName::Tent => 1.0 + crate::bounds::bump_eval(1, x.clamp(0.0, 1.0)).expect("beta 1"),
            DensityName::Sobolev2 => self
                .coefficients
                .as_ref()
                .expect("series density")
                .iter()
                .enumerate()
                .map(|(j, t)| t * trig_basis_eval(j, x))
                .sum(),
        }
    }

    fn breakpoints(&self) -> Vec<f64> {
        match self.name {
            DensityName::Tent => vec![0.25, 0.5, 0.75],
            _ => Vec::new(),
        }
    }

    fn series_coefficients(&self) -> Option<&[f64]> {
        self.coefficients.as_deref()
    }
}

fn parseval(a: &[f64], b: &[f64]) -> f64 {
    (0..a.len().max(b.len()))
        .map(|j| {
            let d = a.get(j).copied().unwrap_or(0.0) - b.get(j).copied().unwrap_or(0.0);
            d * d
        })
        .sum()
}

/// ∫₀ˣ Σ θ_j φ_j.
fn series_cdf(theta: &[f64], x: f64) -> f64 {
    use std::f64::consts::{PI, SQRT_2};
    let mut total = theta[0] * x;
    for (j, t) in theta.iter().enumerate().skip(1) {
        let m = j.div_ceil(2) as f64;
        let w = 2.0 * PI * m;
        total += if j % 2 == 1 {
            t * SQRT_2 * (1.0 - (w * x).cos()) / w
        } else {
            t * SQRT_2 * (w * x).sin() / w
        };
    }
    total
}

/// ∫₀ˣ g₁.
fn tent_integral(x: f64) -> f64 {
    let half = |y: f64| {
        if y <= 0.25 {
            y * y / 2.0
        } else {
            1.0 / 16.0 - (0.5 - y) * (0.5 - y) / 2.0
        }
    };
    if x <= 0.5 {
        half(x)
    } else {
        1.0 / 16.0 - half(x - 0.5)
    }
}

/// Inverse of x ↦ x + ∫₀ˣ g₁, solved piecewise (the CDF is quadratic on
/// each quarter of [0, 1]).
fn tent_quantile(u: f64) -> f64 {
    if u <= 9.0 / 32.0 {
        -1.0 + (1.0 + 2.0 * u).sqrt()
    } else if u <= 9.0 / 16.0 {
        0.5 - (-1.0 + (17.0 / 8.0 - 2.0 * u).sqrt())
    } else if u <= 25.0 / 32.0 {
        0.5 + 1.0 - (1.0 - 2.0 * (u - 9.0 / 16.0)).max(0.0).sqrt()
    } else {
        1.0 - (1.0 - (2.0 * u - 1.0).max(0.0).sqrt())
    }
}

/// Ground truth prepared for a sweep.
#[derive(Debug, Clone)]
pub enum PreparedTruth {
    Simplex(SimplexVector),
    Density(TestDensity),
}

impl PreparedTruth {
    pub fn new(spec: &TruthSpec) -> Result<Self> {
        Ok(match spec {
            TruthSpec::Simplex(v) => PreparedTruth::Simplex(SimplexVector::new(v.clone())?),
            TruthSpec::Density(name) => PreparedTruth::Density(TestDensity::new(*name)),
        })
    }

    pub fn simplex(&self) -> Result<&SimplexVector> {
        match self {
            PreparedTruth::Simplex(s) => Ok(s),
            PreparedTruth::Density(_) => Err(invalid("multinomial strategies need a simplex truth")),
        }
    }

    pub fn density(&self) -> Result<&TestDensity> {
        match self {
            PreparedTruth::Density(d) => Ok(d),
            PreparedTruth::Simplex(_) => Err(invalid("density strategies need a density truth")),
        }
    }
}

/// Multinomial(n, p) counts by sequential conditional binomials.
pub fn multinomial_counts(n: usize, p: &[f64], rng: &mut RngStream) -> Vec<u64> {
    let mut remaining = n as u64;
    let mut mass = 1.0;
    let mut out = Vec::with_capacity(p.len());
    for (j, &pj) in p.iter().enumerate() {
        if j + 1 == p.len() {
            out.push(remaining);
            break;
        }
        let q = if mass > 0.0 { (pj / mass).clamp(0.0, 1.0) } else { 0.0 };
        let c = if remaining == 0 || q == 0.0 {
            0
        } else {
            Binomial::new(remaining, q).expect("valid binomial").sample(rng)
        };
        out.push(c);
        remaining -= c;
        mass -= pj;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::integrate;

    #[test]
    fn tent_cdf_and_quantile_are_inverse() {
        let f = TestDensity::new(DensityName::Tent);
        assert!((f.cdf(1.0) - 1.0).abs() < 1e-15);
        assert!((f.cdf(0.5) - (0.5 + 1.0 / 16.0)).abs() < 1e-15);
        for i in 0..=1000 {
            let x = i as f64 / 1000.0;
            assert!((tent_quantile(f.cdf(x)) - x).abs() < 1e-12, "x={x}");
        }
        for x in [0.1, 0.3, 0.6, 0.9] {
            let q = integrate(|t| if t <= x { f.eval(t) } else { 0.0 }, &[0.25, 0.5, 0.75, x]);
            assert!((q - f.cdf(x)).abs() < 1e-10, "x={x}");
        }
    }

    #[test]
    fn sobolev2_is_in_the_unit_ball_and_a_density() {
        let f = TestDensity::new(DensityName::Sobolev2);
        let c = f.coefficients().unwrap();
        let norm: f64 = c.iter().enumerate().map(|(j, t)| (j as f64).powi(4) * t * t).sum();
        assert!((norm - 0.9).abs() < 1e-12);
        assert!((0..=2000).all(|i| f.eval(i as f64 / 2000.0) > 0.0));
        assert!((f.cdf(1.0) - 1.0).abs() < 1e-12);
        assert!(f.cdf_table.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn samplers_match_cdfs() {
        for name in [DensityName::Uniform, DensityName::Tent, DensityName::Sobolev2] {
            let f = TestDensity::new(name);
            let mut rng = RngStream::new(81, 0);
            let n = 200_000;
            let mut xs: Vec<f64> = (0..n).map(|_| f.sample(&mut rng)).collect();
            xs.sort_by(f64::total_cmp);
            let ks = xs
                .iter()
                .enumerate()
                .map(|(i, &x)| (f.cdf(x) - (i + 1) as f64 / n as f64).abs())
                .fold(0.0, f64::max);
            // 1.63/√n is the 1% Kolmogorov–Smirnov critical value
            assert!(ks < 1.63 / (n as f64).sqrt(), "{name:?}: {ks}");
        }
    }

    #[test]
    fn exact_errors_match_quadrature() {
        for name in [DensityName::Tent, DensityName::Sobolev2] {
            let f = TestDensity::new(name);
            let h = DensityModel::piecewise(vec![0.7, 1.4, 1.1, 0.8, 1.0]).unwrap();
            let exact = f.histogram_error(h.piecewise_bins().unwrap());
            let quad = l2_distance_squared(&f, &h).unwrap();
            assert!((exact - quad).abs() < 1e-8, "{name:?}: {exact} vs {quad}");
        }
        let f = TestDensity::new(DensityName::Sobolev2);
        let est = [1.0, 0.2, -0.1, 0.05];
        let quad = {
            struct Opaque<'a>(&'a TestDensity);
            impl Density for Opaque<'_> {
                fn eval(&self, x: f64) -> f64 {
                    self.0.eval(x)
                }
            }
            l2_distance_squared(&Opaque(&f), &DensityModel::series(est.to_vec()).unwrap()).unwrap()
        };
        assert!((f.series_error(&est).unwrap() - quad).abs() < 1e-6);
        let t = TestDensity::new(DensityName::Tent);
        assert!(t.series_error(&[1.0]).unwrap() > 0.0);
    }

    #[test]
    fn multinomial_counts_sum_to_n() {
        let mut rng = RngStream::new(82, 0);
        let p = [0.1, 0.2, 0.3, 0.4];
        let n = 100_000;
        let c = multinomial_counts(n, &p, &mut rng);
        assert_eq!(c.iter().sum::<u64>(), n as u64);
        for (ci, pi) in c.iter().zip(p) {
            let sd = (n as f64 * pi * (1.0 - pi)).sqrt();
            assert!((*ci as f64 - n as f64 * pi).abs() < 4.0 * sd);
        }
        assert_eq!(multinomial_counts(0, &p, &mut rng), vec![0, 0, 0, 0]);
    }
}
