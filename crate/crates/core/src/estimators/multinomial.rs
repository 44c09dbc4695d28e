use super::summarize;
use crate::channels::{ChannelConfig, Mechanism, PrivatizedRecord};
use crate::domain::SimplexVector;
use crate::error::{Error, Result};

fn check_config_matches(cfg: &ChannelConfig, mechanism: Mechanism, eps: f64) -> Result<()> {
    if cfg.mechanism != mechanism {
        return Err(Error::MixedRecords(format!(
            "config is for {}, records for {mechanism}",
            cfg.mechanism
        )));
    }
    if eps != cfg.eps() {
        return Err(Error::MixedRecords(format!(
            "records carry epsilon {eps}, config {}",
            cfg.eps()
        )));
    }
    Ok(())
}

/// Unbiased randomized-response estimate before projection:
/// (1/n)Σ(Z_i − 1/(1+e^{ε/2})·1)·(e^{ε/2}+1)/(e^{ε/2}−1).
pub fn rr_partial_from_sums(sums: &[f64], n: usize, epsilon: f64) -> Result<Vec<f64>> {
    if n == 0 {
        return Err(Error::InsufficientData("no records to estimate from".into()));
    }
    // (e^{ε/2}+1)/(e^{ε/2}−1) = 1/tanh(ε/4); infinite or negative once ε ≤ 0
    let gain = 1.0 / (epsilon / 4.0).tanh();
    if !(epsilon > 0.0 && gain.is_finite()) {
        return Err(Error::ZeroEpsilon);
    }
    let offset = 1.0 / (1.0 + (epsilon / 2.0).exp());
    Ok(sums.iter().map(|s| (s / n as f64 - offset) * gain).collect())
}

pub fn rr_multinomial_partial(records: &[PrivatizedRecord], cfg: &ChannelConfig) -> Result<Vec<f64>> {
    let (n, eps, sums) = summarize(records, Mechanism::RandomizedResponse, cfg.dims)?;
    check_config_matches(cfg, Mechanism::RandomizedResponse, eps)?;
    rr_partial_from_sums(&sums, n, eps)
}

/// Randomized-response estimator projected onto Δ_d.
pub fn rr_multinomial_estimate(records: &[PrivatizedRecord], cfg: &ChannelConfig) -> Result<SimplexVector> {
    Ok(SimplexVector::from_projection(&rr_multinomial_partial(records, cfg)?))
}

/// Sample mean of Laplace-perturbed payloads.
pub fn laplace_partial_from_sums(sums: &[f64], n: usize) -> Result<Vec<f64>> {
    if n == 0 {
        return Err(Error::InsufficientData("no records to estimate from".into()));
    }
    Ok(sums.iter().map(|s| s / n as f64).collect())
}

pub fn laplace_multinomial_partial(records: &[PrivatizedRecord], cfg: &ChannelConfig) -> Result<Vec<f64>> {
    let (n, eps, sums) = summarize(records, Mechanism::LaplaceMultinomial, cfg.dims)?;
    check_config_matches(cfg, Mechanism::LaplaceMultinomial, eps)?;
    laplace_partial_from_sums(&sums, n)
}

/// Laplace-perturbation estimator projected onto Δ_d.
pub fn laplace_multinomial_estimate(records: &[PrivatizedRecord], cfg: &ChannelConfig) -> Result<SimplexVector> {
    Ok(SimplexVector::from_projection(&laplace_multinomial_partial(records, cfg)?))
}

/// Empirical frequencies of categories in 1..=d (non-private baseline).
pub fn mle_multinomial_estimate(samples: &[usize], d: usize) -> Result<SimplexVector> {
    if samples.is_empty() {
        return Err(Error::InsufficientData("no samples to estimate from".into()));
    }
    let mut counts = vec![0usize; d];
    for &x in samples {
        if x == 0 || x > d {
            return Err(Error::OutOfRange(format!("category {x} not in 1..={d}")));
        }
        counts[x - 1] += 1;
    }
    let n = samples.len() as f64;
    SimplexVector::new(counts.iter().map(|&c| c as f64 / n).collect())
}
