use super::config::{ChannelConfig, Mechanism, PrivatizedRecord};
use super::constant::compute_ck;
use crate::domain::{trig_basis_prefix, RngStream};
use crate::error::{Error, Result};

/// Reusable sampler for the hypercube-halfspace channel at fixed (k, ε, B₀).
///
/// Given τ ∈ [−B₀, B₀]^k, it draws τ̃ ∈ {±B₀}^k coordinatewise with
/// P(τ̃_j = B₀) = 1/2 + τ_j/(2B₀), then a sign vector v with
/// P(v | τ̃) ∝ e^ε, (e^ε+1)/2 or 1 as ⟨v, τ̃⟩ is positive, zero or negative,
/// and outputs Z = B̄·v. Splitting the tie mass evenly between the two
/// branches keeps the channel exactly ε-private for even k as well.
///
/// The sign vector is drawn by first sampling the number h of coordinates
/// where v disagrees with sign(τ̃) (P(h) ∝ C(k,h)·w(k−2h)) and then a uniform
/// subset of that size, which is exact and needs no rejection loop.
#[derive(Debug, Clone)]
pub struct HalfspaceSampler {
    k: usize,
    epsilon: f64,
    basis_bound: f64,
    amplitude: f64,
    level_cdf: Vec<f64>,
}

impl HalfspaceSampler {
    pub fn new(cfg: &ChannelConfig) -> Result<Self> {
        cfg.expect(Mechanism::HalfspaceSeries)?;
        let k = cfg.dims;
        let eps = cfg.eps();
        let amplitude = compute_ck(k).amplitude(eps, cfg.b0());
        let mut log_binom = 0.0;
        let mut weights = Vec::with_capacity(k + 1);
        for h in 0..=k {
            if h > 0 {
                log_binom += ((k - h + 1) as f64 / h as f64).ln();
            }
            let s = k as i64 - 2 * h as i64;
            // log w(s) − ε keeps every weight ≤ 1 in magnitude
            let log_w = match s.signum() {
                1 => 0.0,
                0 => (0.5 + 0.5 * (-eps).exp()).ln(),
                _ => -eps,
            };
            weights.push(log_binom + log_w);
        }
        let top = weights.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let mut acc = 0.0;
        let mut level_cdf: Vec<f64> = weights
            .iter()
            .map(|lw| {
                acc += (lw - top).exp();
                acc
            })
            .collect();
        level_cdf.iter_mut().for_each(|c| *c /= acc);
        Ok(Self {
            k,
            epsilon: eps,
            basis_bound: cfg.b0(),
            amplitude,
            level_cdf,
        })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// B̄, the magnitude of every output coordinate.
    pub fn amplitude(&self) -> f64 {
        self.amplitude
    }

    fn branch_weight(&self, inner: i64) -> f64 {
        let e = self.epsilon.exp();
        match inner.signum() {
            1 => e,
            0 => (e + 1.0) / 2.0,
            _ => 1.0,
        }
    }

    /// Writes Z for the input vector τ into `out` (length k).
    pub fn privatize_tau(&self, tau: &[f64], rng: &mut RngStream, out: &mut [f64]) {
        debug_assert_eq!(tau.len(), self.k);
        out.copy_from_slice(tau);
        self.privatize_in_place(out, rng);
    }

    /// Writes Z for the raw sample x (τ_j = φ_{j−1}(x)) into `out`.
    pub fn privatize_into(&self, x: f64, rng: &mut RngStream, out: &mut [f64]) {
        debug_assert_eq!(out.len(), self.k);
        trig_basis_prefix(x, out);
        self.privatize_in_place(out, rng);
    }

    /// Replaces τ held in `buf` by a draw of Z.
    fn privatize_in_place(&self, buf: &mut [f64], rng: &mut RngStream) {
        for t in buf.iter_mut() {
            let p = (0.5 + *t / (2.0 * self.basis_bound)).clamp(0.0, 1.0);
            *t = if rng.bernoulli(p) { 1.0 } else { -1.0 };
        }
        let u = rng.unit();
        let mut flips = self.level_cdf.partition_point(|&c| c <= u).min(self.k);
        // selection sampling of a uniform subset of size `flips`
        for (i, o) in buf.iter_mut().enumerate() {
            if flips > 0 && rng.below(self.k - i) < flips {
                *o = -*o;
                flips -= 1;
            }
            *o *= self.amplitude;
        }
    }

    /// Reference sampler: uniform sign vectors accepted with probability
    /// w(⟨v, τ̃⟩)/e^ε. Same law as [`privatize_tau`](Self::privatize_tau).
    pub fn privatize_tau_rejection(&self, tau: &[f64], rng: &mut RngStream, out: &mut [f64]) {
        let mut signs = tau.to_vec();
        for t in signs.iter_mut() {
            let p = (0.5 + *t / (2.0 * self.basis_bound)).clamp(0.0, 1.0);
            *t = if rng.bernoulli(p) { 1.0 } else { -1.0 };
        }
        let top = self.epsilon.exp();
        loop {
            let mut inner = 0i64;
            for (o, s) in out.iter_mut().zip(&signs) {
                *o = if rng.bernoulli(0.5) { 1.0 } else { -1.0 };
                inner += (*o * s) as i64;
            }
            if rng.unit() * top < self.branch_weight(inner) {
                break;
            }
        }
        out.iter_mut().for_each(|o| *o *= self.amplitude);
    }

    /// Exact P(Z = B̄·v | τ) by summing over all τ̃; `v` holds ±1 entries.
    pub fn output_probability(&self, tau: &[f64], v: &[f64], max_bits: u32) -> Result<f64> {
        if self.k as u32 > max_bits {
            return Err(Error::EnumerationTooLarge {
                size: 1u128 << self.k.min(127),
                cap: 1u128 << max_bits,
            });
        }
        let norm = 2.0 / ((self.epsilon.exp() + 1.0) * (1u64 << self.k) as f64);
        let mut total = 0.0;
        for mask in 0u64..(1u64 << self.k) {
            let mut p = 1.0;
            let mut inner = 0i64;
            for j in 0..self.k {
                let plus = 0.5 + tau[j] / (2.0 * self.basis_bound);
                let sign = if mask >> j & 1 == 1 { 1.0 } else { -1.0 };
                p *= if sign > 0.0 { plus } else { 1.0 - plus };
                inner += (sign * v[j]) as i64;
            }
            if p > 0.0 {
                total += p * self.branch_weight(inner) * norm;
            }
        }
        Ok(total)
    }

    fn record(&self, payload: Vec<f64>) -> PrivatizedRecord {
        PrivatizedRecord {
            mechanism: Mechanism::HalfspaceSeries,
            epsilon: self.epsilon,
            payload,
            amplitude: Some(self.amplitude),
        }
    }
}

/// Hypercube-halfspace channel on a raw sample x ∈ [0, 1] with truncation
/// k = cfg.dims; E[Z_j | x] = φ_{j−1}(x) exactly.
pub fn halfspace_series_channel(x: f64, cfg: &ChannelConfig, rng: &mut RngStream) -> Result<PrivatizedRecord> {
    let sampler = HalfspaceSampler::new(cfg)?;
    check_unit(x)?;
    let mut payload = vec![0.0; cfg.dims];
    sampler.privatize_into(x, rng, &mut payload);
    Ok(sampler.record(payload))
}

/// Same channel through the rejection sampler; used to cross-check the
/// production sampler.
pub fn halfspace_series_channel_rejection(
    x: f64,
    cfg: &ChannelConfig,
    rng: &mut RngStream,
) -> Result<PrivatizedRecord> {
    let sampler = HalfspaceSampler::new(cfg)?;
    check_unit(x)?;
    let mut tau = vec![0.0; cfg.dims];
    trig_basis_prefix(x, &mut tau);
    let mut payload = vec![0.0; cfg.dims];
    sampler.privatize_tau_rejection(&tau, rng, &mut payload);
    Ok(sampler.record(payload))
}

fn check_unit(x: f64) -> Result<()> {
    if (0.0..=1.0).contains(&x) {
        Ok(())
    } else {
        Err(Error::OutOfRange(format!("sample {x} outside [0,1]")))
    }
}
