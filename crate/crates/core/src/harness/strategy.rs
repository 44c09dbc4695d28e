use rand_distr::{Binomial, Distribution, Gamma};

use super::spec::{ProblemKind, TruncationRule};
use super::truth::{multinomial_counts, PreparedTruth};
use crate::channels::{naive_series_rate, rr_keep_probability, ChannelConfig, HalfspaceSampler, Mechanism};
use crate::domain::{trig_basis_prefix, Density, RngStream, SimplexVector, TRIG_BASIS_BOUND};
use crate::estimators::{histogram_from_sums, laplace_partial_from_sums, rr_partial_from_sums};
use crate::error::{invalid, Result};

/// Largest truncation level tried by the naive Laplace series strategy under
/// the rate-optimal rule (it has no closed-form rate-optimal k worth trusting at
/// desk scale, so it scans 1..=NAIVE_SCAN_MAX and keeps the best).
pub const NAIVE_SCAN_MAX: usize = 12;

/// Everything a strategy needs to run one replication at one grid cell.
#[derive(Debug, Clone, Copy)]
pub struct TrialContext<'a> {
    pub n: usize,
    /// `None` for non-private strategies.
    pub epsilon: Option<f64>,
    pub beta: Option<u32>,
    pub truth: &'a PreparedTruth,
    pub truncation: &'a TruncationRule,
}

impl TrialContext<'_> {
    fn eps(&self) -> Result<f64> {
        self.epsilon.ok_or_else(|| invalid("private strategy run without epsilon"))
    }

    fn beta(&self) -> Result<f64> {
        self.beta
            .map(f64::from)
            .ok_or_else(|| invalid("series strategy run without beta"))
    }
}

/// One estimation pipeline (privatize → estimate → score) selectable by name.
pub trait Strategy: Send + Sync {
    fn name(&self) -> &'static str;
    fn problem(&self) -> ProblemKind;
    fn is_private(&self) -> bool;
    /// Candidate dimensions (d, bins or truncation level) for a grid cell.
    /// With more than one candidate the sweep keeps the best mean error.
    fn dims_for(&self, ctx: &TrialContext<'_>) -> Result<Vec<usize>>;
    /// Squared estimation error for each candidate in `dims`, one replication.
    fn run_trial(&self, ctx: &TrialContext<'_>, dims: &[usize], rng: &mut RngStream) -> Result<Vec<f64>>;
}

static REGISTRY: [&dyn Strategy; 8] = [
    &RandomizedResponse,
    &LaplaceMultinomial,
    &MleMultinomial,
    &LaplaceHistogram,
    &ClassicalHistogram,
    &HalfspaceSeries,
    &NaiveLaplaceSeries,
    &ClassicalSeries,
];

/// All registered strategies.
pub fn registry() -> &'static [&'static dyn Strategy] {
    &REGISTRY
}

pub fn find_strategy(name: &str) -> Result<&'static dyn Strategy> {
    REGISTRY.iter().copied().find(|s| s.name() == name).ok_or_else(|| {
        let known: Vec<_> = REGISTRY.iter().map(|s| s.name()).collect();
        invalid(format!("unknown strategy `{name}` (known: {})", known.join(", ")))
    })
}

/// round(base^power), at least 1.
fn rate_k(base: f64, power: f64) -> usize {
    (base.powf(power).round() as usize).max(1)
}

fn density_dims(ctx: &TrialContext<'_>, rate_optimal: impl FnOnce() -> Result<Vec<usize>>) -> Result<Vec<usize>> {
    match ctx.truncation {
        TruncationRule::RateOptimal => rate_optimal(),
        TruncationRule::Fixed { k } => Ok(vec![*k]),
        TruncationRule::Scan { ks } => Ok(ks.clone()),
    }
}

fn multinomial_dims(ctx: &TrialContext<'_>) -> Result<Vec<usize>> {
    Ok(vec![ctx.truth.simplex()?.dim()])
}

/// Σ of n i.i.d. Laplace(α) draws, exactly: (1/α)(G₁ − G₂) with G ~ Gamma(n, 1).
fn laplace_sum(n: usize, alpha: f64, rng: &mut RngStream) -> f64 {
    if n == 0 {
        return 0.0;
    }
    let g = Gamma::new(n as f64, 1.0).expect("positive shape");
    (g.sample(rng) - g.sample(rng)) / alpha
}

fn binomial(n: u64, p: f64, rng: &mut RngStream) -> u64 {
    if n == 0 {
        return 0;
    }
    Binomial::new(n, p.clamp(0.0, 1.0)).expect("valid binomial").sample(rng)
}

fn simplex_error(truth: &SimplexVector, partial: &[f64]) -> f64 {
    truth.squared_distance(SimplexVector::from_projection(partial).as_slice())
}

/// Randomized response on one-hot vectors; RR sums drawn as binomials
/// (kept ones among the c_j hits plus flipped zeros among the n − c_j misses).
struct RandomizedResponse;

impl Strategy for RandomizedResponse {
    fn name(&self) -> &'static str {
        Mechanism::RandomizedResponse.name()
    }
    fn problem(&self) -> ProblemKind {
        ProblemKind::Multinomial
    }
    fn is_private(&self) -> bool {
        true
    }
    fn dims_for(&self, ctx: &TrialContext<'_>) -> Result<Vec<usize>> {
        multinomial_dims(ctx)
    }
    fn run_trial(&self, ctx: &TrialContext<'_>, _dims: &[usize], rng: &mut RngStream) -> Result<Vec<f64>> {
        let p = ctx.truth.simplex()?;
        let eps = ctx.eps()?;
        let keep = rr_keep_probability(eps);
        let counts = multinomial_counts(ctx.n, p.as_slice(), rng);
        let sums: Vec<f64> = counts
            .iter()
            .map(|&c| (binomial(c, keep, rng) + binomial(ctx.n as u64 - c, 1.0 - keep, rng)) as f64)
            .collect();
        Ok(vec![simplex_error(p, &rr_partial_from_sums(&sums, ctx.n, eps)?)])
    }
}

/// One-hot vectors plus Laplace(ε/2) noise, projected onto the simplex.
struct LaplaceMultinomial;

impl Strategy for LaplaceMultinomial {
    fn name(&self) -> &'static str {
        Mechanism::LaplaceMultinomial.name()
    }
    fn problem(&self) -> ProblemKind {
        ProblemKind::Multinomial
    }
    fn is_private(&self) -> bool {
        true
    }
    fn dims_for(&self, ctx: &TrialContext<'_>) -> Result<Vec<usize>> {
        multinomial_dims(ctx)
    }
    fn run_trial(&self, ctx: &TrialContext<'_>, _dims: &[usize], rng: &mut RngStream) -> Result<Vec<f64>> {
        let p = ctx.truth.simplex()?;
        let alpha = ctx.eps()? / 2.0;
        let counts = multinomial_counts(ctx.n, p.as_slice(), rng);
        let sums: Vec<f64> = counts
            .iter()
            .map(|&c| c as f64 + laplace_sum(ctx.n, alpha, rng))
            .collect();
        Ok(vec![simplex_error(p, &laplace_partial_from_sums(&sums, ctx.n)?)])
    }
}

/// Non-private empirical frequencies.
struct MleMultinomial;

impl Strategy for MleMultinomial {
    fn name(&self) -> &'static str {
        "mle_multinomial"
    }
    fn problem(&self) -> ProblemKind {
        ProblemKind::Multinomial
    }
    fn is_private(&self) -> bool {
        false
    }
    fn dims_for(&self, ctx: &TrialContext<'_>) -> Result<Vec<usize>> {
        multinomial_dims(ctx)
    }
    fn run_trial(&self, ctx: &TrialContext<'_>, _dims: &[usize], rng: &mut RngStream) -> Result<Vec<f64>> {
        let p = ctx.truth.simplex()?;
        let counts = multinomial_counts(ctx.n, p.as_slice(), rng);
        let freq: Vec<f64> = counts.iter().map(|&c| c as f64 / ctx.n as f64).collect();
        Ok(vec![p.squared_distance(&freq)])
    }
}

/// Private histogram: bin counts plus Laplace(ε/2) noise per bin, projected
/// onto kΔ_k. Rate-optimal rule k = round((nε²)^{1/4}).
struct LaplaceHistogram;

impl Strategy for LaplaceHistogram {
    fn name(&self) -> &'static str {
        Mechanism::LaplaceHistogram.name()
    }
    fn problem(&self) -> ProblemKind {
        ProblemKind::Density
    }
    fn is_private(&self) -> bool {
        true
    }
    fn dims_for(&self, ctx: &TrialContext<'_>) -> Result<Vec<usize>> {
        let eps = ctx.eps()?;
        density_dims(ctx, || Ok(vec![rate_k(ctx.n as f64 * eps * eps, 0.25)]))
    }
    fn run_trial(&self, ctx: &TrialContext<'_>, dims: &[usize], rng: &mut RngStream) -> Result<Vec<f64>> {
        let f = ctx.truth.density()?;
        let alpha = ctx.eps()? / 2.0;
        dims.iter()
            .map(|&k| {
                let counts = multinomial_counts(ctx.n, &f.bin_probabilities(k), rng);
                let sums: Vec<f64> = counts
                    .iter()
                    .map(|&c| c as f64 + laplace_sum(ctx.n, alpha, rng))
                    .collect();
                let est = histogram_from_sums(&sums, ctx.n)?;
                Ok(f.histogram_error(est.piecewise_bins().expect("histogram")))
            })
            .collect()
    }
}

/// Non-private k-bin histogram. Rate-optimal rule k = round(n^{1/3}).
struct ClassicalHistogram;

impl Strategy for ClassicalHistogram {
    fn name(&self) -> &'static str {
        "classical_histogram"
    }
    fn problem(&self) -> ProblemKind {
        ProblemKind::Density
    }
    fn is_private(&self) -> bool {
        false
    }
    fn dims_for(&self, ctx: &TrialContext<'_>) -> Result<Vec<usize>> {
        density_dims(ctx, || Ok(vec![rate_k(ctx.n as f64, 1.0 / 3.0)]))
    }
    fn run_trial(&self, ctx: &TrialContext<'_>, dims: &[usize], rng: &mut RngStream) -> Result<Vec<f64>> {
        let f = ctx.truth.density()?;
        Ok(dims
            .iter()
            .map(|&k| {
                let counts = multinomial_counts(ctx.n, &f.bin_probabilities(k), rng);
                let scale = k as f64 / ctx.n as f64;
                let bins: Vec<f64> = counts.iter().map(|&c| c as f64 * scale).collect();
                f.histogram_error(&bins)
            })
            .collect())
    }
}

/// Private orthogonal series through the halfspace channel, simulated one
/// sample at a time. Rate-optimal rule k = round((nε²)^{1/(2β+2)}).
struct HalfspaceSeries;

impl Strategy for HalfspaceSeries {
    fn name(&self) -> &'static str {
        Mechanism::HalfspaceSeries.name()
    }
    fn problem(&self) -> ProblemKind {
        ProblemKind::Density
    }
    fn is_private(&self) -> bool {
        true
    }
    fn dims_for(&self, ctx: &TrialContext<'_>) -> Result<Vec<usize>> {
        let (eps, beta) = (ctx.eps()?, ctx.beta()?);
        density_dims(ctx, || Ok(vec![rate_k(ctx.n as f64 * eps * eps, 1.0 / (2.0 * beta + 2.0))]))
    }
    fn run_trial(&self, ctx: &TrialContext<'_>, dims: &[usize], rng: &mut RngStream) -> Result<Vec<f64>> {
        let f = ctx.truth.density()?;
        let eps = ctx.eps()?;
        dims.iter()
            .map(|&k| {
                let sampler = HalfspaceSampler::new(&ChannelConfig::new(Mechanism::HalfspaceSeries, eps, k)?)?;
                let mut sums = vec![0.0; k];
                let mut z = vec![0.0; k];
                for _ in 0..ctx.n {
                    let x = f.sample(rng);
                    sampler.privatize_into(x, rng, &mut z);
                    sums.iter_mut().zip(&z).for_each(|(s, v)| *s += v);
                }
                let theta: Vec<f64> = sums.iter().map(|s| s / ctx.n as f64).collect();
                f.series_error(&theta)
            })
            .collect()
    }
}

/// Σ_i φ_j(X_i) for j < k_max over n fresh samples.
fn basis_sums(ctx: &TrialContext<'_>, k_max: usize, rng: &mut RngStream) -> Result<Vec<f64>> {
    let f = ctx.truth.density()?;
    let mut sums = vec![0.0; k_max];
    let mut phi = vec![0.0; k_max];
    for _ in 0..ctx.n {
        trig_basis_prefix(f.sample(rng), &mut phi);
        sums.iter_mut().zip(&phi).for_each(|(s, p)| *s += p);
    }
    Ok(sums)
}

/// Basis vectors plus Laplace(ε/(2B₀k)) noise. Under the rate-optimal rule it scans
/// k = 1..=NAIVE_SCAN_MAX on shared samples (fresh noise per k).
struct NaiveLaplaceSeries;

impl Strategy for NaiveLaplaceSeries {
    fn name(&self) -> &'static str {
        Mechanism::NaiveLaplaceSeries.name()
    }
    fn problem(&self) -> ProblemKind {
        ProblemKind::Density
    }
    fn is_private(&self) -> bool {
        true
    }
    fn dims_for(&self, ctx: &TrialContext<'_>) -> Result<Vec<usize>> {
        density_dims(ctx, || Ok((1..=NAIVE_SCAN_MAX).collect()))
    }
    fn run_trial(&self, ctx: &TrialContext<'_>, dims: &[usize], rng: &mut RngStream) -> Result<Vec<f64>> {
        let f = ctx.truth.density()?;
        let eps = ctx.eps()?;
        let k_max = dims.iter().copied().max().unwrap_or(0);
        let signal = basis_sums(ctx, k_max, rng)?;
        dims.iter()
            .map(|&k| {
                let alpha = naive_series_rate(eps, TRIG_BASIS_BOUND, k);
                let theta: Vec<f64> = signal[..k]
                    .iter()
                    .map(|s| (s + laplace_sum(ctx.n, alpha, rng)) / ctx.n as f64)
                    .collect();
                f.series_error(&theta)
            })
            .collect()
    }
}

/// Non-private empirical basis coefficients. Rate-optimal rule k = round(n^{1/(2β+1)}).
struct ClassicalSeries;

impl Strategy for ClassicalSeries {
    fn name(&self) -> &'static str {
        "classical_series"
    }
    fn problem(&self) -> ProblemKind {
        ProblemKind::Density
    }
    fn is_private(&self) -> bool {
        false
    }
    fn dims_for(&self, ctx: &TrialContext<'_>) -> Result<Vec<usize>> {
        let beta = ctx.beta()?;
        density_dims(ctx, || Ok(vec![rate_k(ctx.n as f64, 1.0 / (2.0 * beta + 1.0))]))
    }
    fn run_trial(&self, ctx: &TrialContext<'_>, dims: &[usize], rng: &mut RngStream) -> Result<Vec<f64>> {
        let f = ctx.truth.density()?;
        let k_max = dims.iter().copied().max().unwrap_or(0);
        let sums = basis_sums(ctx, k_max, rng)?;
        dims.iter()
            .map(|&k| {
                let theta: Vec<f64> = sums[..k].iter().map(|s| s / ctx.n as f64).collect();
                f.series_error(&theta)
            })
            .collect()
    }
}
