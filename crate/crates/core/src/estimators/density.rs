use super::summarize;
use crate::channels::{histogram_bin, Mechanism, PrivatizedRecord};
use crate::domain::{project_simplex, trig_basis_prefix, DensityModel};
use crate::error::{Error, Result};

/// θ̂ = Π_{kΔ_k}((k/n)·Σ Z_i) as a k-bin piecewise-constant density.
pub fn histogram_from_sums(sums: &[f64], n: usize) -> Result<DensityModel> {
    if n == 0 {
        return Err(Error::InsufficientData("no records to estimate from".into()));
    }
    let k = sums.len() as f64;
    let raw: Vec<f64> = sums.iter().map(|s| k * s / n as f64).collect();
    DensityModel::piecewise(project_simplex(&raw, k))
}

/// Private histogram estimator from Laplace-perturbed bin indicators.
pub fn histogram_density_estimate(records: &[PrivatizedRecord], k: usize) -> Result<DensityModel> {
    let (n, _, sums) = summarize(records, Mechanism::LaplaceHistogram, k)?;
    histogram_from_sums(&sums, n)
}

/// Non-private k-bin histogram of raw samples in [0, 1].
pub fn classical_histogram_estimate(samples: &[f64], k: usize) -> Result<DensityModel> {
    if samples.is_empty() {
        return Err(Error::InsufficientData("no samples to estimate from".into()));
    }
    let mut counts = vec![0.0; k];
    for &x in samples {
        counts[histogram_bin(x, k)? - 1] += 1.0;
    }
    let scale = k as f64 / samples.len() as f64;
    DensityModel::piecewise(counts.into_iter().map(|c| c * scale).collect())
}

/// Series density with coefficients Σ Z_i / n on φ_0, …, φ_{k−1}.
pub fn series_from_sums(sums: &[f64], n: usize) -> Result<DensityModel> {
    if n == 0 {
        return Err(Error::InsufficientData("no records to estimate from".into()));
    }
    DensityModel::series(sums.iter().map(|s| s / n as f64).collect())
}

/// Orthogonal-series estimator from halfspace-channel records (unprojected).
pub fn series_density_estimate(records: &[PrivatizedRecord], k: usize) -> Result<DensityModel> {
    let (n, _, sums) = summarize(records, Mechanism::HalfspaceSeries, k)?;
    series_from_sums(&sums, n)
}

/// The same averaging over Laplace-perturbed basis vectors.
pub fn naive_series_density_estimate(records: &[PrivatizedRecord], k: usize) -> Result<DensityModel> {
    let (n, _, sums) = summarize(records, Mechanism::NaiveLaplaceSeries, k)?;
    series_from_sums(&sums, n)
}

/// Non-private empirical basis coefficients θ̂_j = (1/n)Σ φ_j(X_i), j < k.
pub fn classical_series_estimate(samples: &[f64], k: usize) -> Result<DensityModel> {
    if samples.is_empty() {
        return Err(Error::InsufficientData("no samples to estimate from".into()));
    }
    if k == 0 {
        return Err(Error::InvalidParameter("truncation k must be >= 1".into()));
    }
    let mut sums = vec![0.0; k];
    let mut phi = vec![0.0; k];
    for &x in samples {
        if !(0.0..=1.0).contains(&x) {
            return Err(Error::OutOfRange(format!("sample {x} outside [0,1]")));
        }
        trig_basis_prefix(x, &mut phi);
        sums.iter_mut().zip(&phi).for_each(|(s, p)| *s += p);
    }
    series_from_sums(&sums, samples.len())
}
