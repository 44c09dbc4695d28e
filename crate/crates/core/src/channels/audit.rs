use serde::{Deserialize, Serialize};

use super::config::{ChannelConfig, Mechanism};
use super::halfspace::HalfspaceSampler;
use super::laplace::{histogram_bin, naive_series_rate};
use super::rr::rr_keep_probability;
use crate::domain::trig_basis_prefix;
use crate::error::{invalid, Error, Result};

/// Default cap on the number of (input, output) evaluations an audit may do.
pub const DEFAULT_ENUMERATION_CAP: u128 = 1 << 26;

/// Output grid points per coordinate for the continuous (Laplace) channels.
const LAPLACE_GRID_POINTS: usize = 101;

/// Raw inputs over which an audit takes the worst case.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AuditGrid {
    /// Category indices in 1..=d (randomized response).
    Categories(Vec<usize>),
    /// Input vectors: simplex points for the multinomial Laplace channel,
    /// τ ∈ [−B₀, B₀]^k for the halfspace channel.
    Vectors(Vec<Vec<f64>>),
    /// Samples x ∈ [0, 1] (histogram and series channels).
    Points(Vec<f64>),
}

/// The pair of inputs and the output at which the worst ratio occurs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub input: Vec<f64>,
    pub input_prime: Vec<f64>,
    pub output: Vec<f64>,
}

/// Result of a privacy audit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuditReport {
    pub mechanism: Mechanism,
    pub epsilon: f64,
    pub dims: usize,
    /// `enumeration` (exact output law) or `grid` (densities on an output grid).
    pub method: String,
    pub max_log_ratio: f64,
    pub witness: Option<Witness>,
    pub pass: bool,
}

/// The standard audit inputs for a channel: all categories, simplex corners
/// and the barycentre, bin centres, every corner of the halfspace input box
/// together with basis vectors φ(x), or an x grid for the naive series.
pub fn default_audit_grid(cfg: &ChannelConfig) -> AuditGrid {
    let d = cfg.dims;
    match cfg.mechanism {
        Mechanism::RandomizedResponse => AuditGrid::Categories((1..=d).collect()),
        Mechanism::LaplaceMultinomial => {
            let mut v: Vec<Vec<f64>> = (0..d)
                .map(|j| (0..d).map(|i| if i == j { 1.0 } else { 0.0 }).collect())
                .collect();
            v.push(vec![1.0 / d as f64; d]);
            AuditGrid::Vectors(v)
        }
        Mechanism::LaplaceHistogram => {
            AuditGrid::Points((0..d).map(|j| (j as f64 + 0.5) / d as f64).collect())
        }
        Mechanism::HalfspaceSeries => {
            let b0 = cfg.b0();
            let mut v = Vec::new();
            if d <= 16 {
                for mask in 0u32..(1 << d) {
                    v.push((0..d).map(|j| if mask >> j & 1 == 1 { b0 } else { -b0 }).collect());
                }
            }
            for i in 0..=10 {
                let mut tau = vec![0.0; d];
                trig_basis_prefix(i as f64 / 10.0, &mut tau);
                v.push(tau);
            }
            AuditGrid::Vectors(v)
        }
        Mechanism::NaiveLaplaceSeries => AuditGrid::Points((0..=100).map(|i| i as f64 / 100.0).collect()),
    }
}

/// Worst-case log-likelihood ratio of the channel over pairs of grid inputs.
///
/// Randomized response and the halfspace channel are audited exactly by
/// enumerating their finite output spaces. The Laplace channels are audited on
/// an output grid of 101 points per coordinate spanning
/// [min input − 5/α, max input + 5/α]; since their log-density ratio is a sum
/// of per-coordinate terms α(|z_j − x′_j| − |z_j − x_j|), the maximum over the
/// product grid is the sum of per-coordinate maxima. The grid is a spot check;
/// the closed-form bound α·‖x − x′‖₁ ≤ ε is the actual guarantee.
pub fn audit_channel(cfg: &ChannelConfig, grid: &AuditGrid, tolerance: f64, cap: u128) -> Result<AuditReport> {
    cfg.validate()?;
    let (method, max, witness) = match cfg.mechanism {
        Mechanism::RandomizedResponse => {
            let AuditGrid::Categories(cats) = grid else {
                return Err(invalid("randomized_response audits take category inputs"));
            };
            let (m, w) = audit_rr(cfg, cats, cap)?;
            ("enumeration", m, w)
        }
        Mechanism::HalfspaceSeries => {
            let taus = match grid {
                AuditGrid::Vectors(v) => v.clone(),
                AuditGrid::Points(xs) => xs
                    .iter()
                    .map(|&x| {
                        let mut t = vec![0.0; cfg.dims];
                        trig_basis_prefix(x, &mut t);
                        t
                    })
                    .collect(),
                AuditGrid::Categories(_) => return Err(invalid("halfspace audits take vectors or points")),
            };
            let (m, w) = audit_halfspace(cfg, &taus, cap)?;
            ("enumeration", m, w)
        }
        Mechanism::LaplaceMultinomial | Mechanism::LaplaceHistogram | Mechanism::NaiveLaplaceSeries => {
            let (inputs, alpha) = laplace_inputs(cfg, grid)?;
            let (m, w) = audit_laplace(&inputs, alpha, cap)?;
            ("grid", m, w)
        }
    };
    Ok(AuditReport {
        mechanism: cfg.mechanism,
        epsilon: cfg.eps(),
        dims: cfg.dims,
        method: method.to_string(),
        max_log_ratio: max,
        witness,
        pass: max <= cfg.eps() + tolerance,
    })
}

fn check_cap(size: u128, cap: u128) -> Result<()> {
    if size > cap {
        Err(Error::EnumerationTooLarge { size, cap })
    } else {
        Ok(())
    }
}

fn one_hot(x: usize, d: usize) -> Vec<f64> {
    (1..=d).map(|j| if j == x { 1.0 } else { 0.0 }).collect()
}

fn audit_rr(cfg: &ChannelConfig, cats: &[usize], cap: u128) -> Result<(f64, Option<Witness>)> {
    let d = cfg.dims;
    if let Some(bad) = cats.iter().find(|&&c| c == 0 || c > d) {
        return Err(Error::OutOfRange(format!("category {bad} not in 1..={d}")));
    }
    if d >= 64 {
        return Err(Error::EnumerationTooLarge { size: u128::MAX, cap });
    }
    check_cap((cats.len() as u128) * (1u128 << d), cap)?;
    let keep = rr_keep_probability(cfg.eps());
    let (lk, lf) = (keep.ln(), (1.0 - keep).ln());
    let mut best = (f64::NEG_INFINITY, None);
    for mask in 0u64..(1u64 << d) {
        let logp: Vec<f64> = cats
            .iter()
            .map(|&c| {
                (0..d)
                    .map(|j| {
                        let z = mask >> j & 1 == 1;
                        if z == (j + 1 == c) {
                            lk
                        } else {
                            lf
                        }
                    })
                    .sum()
            })
            .collect();
        for (a, la) in cats.iter().zip(&logp) {
            for (b, lb) in cats.iter().zip(&logp) {
                if la - lb > best.0 {
                    best = (
                        la - lb,
                        Some(Witness {
                            input: one_hot(*a, d),
                            input_prime: one_hot(*b, d),
                            output: (0..d).map(|j| (mask >> j & 1) as f64).collect(),
                        }),
                    );
                }
            }
        }
    }
    Ok(best)
}

fn audit_halfspace(cfg: &ChannelConfig, taus: &[Vec<f64>], cap: u128) -> Result<(f64, Option<Witness>)> {
    let k = cfg.dims;
    if let Some(bad) = taus.iter().find(|t| t.len() != k || t.iter().any(|v| v.abs() > cfg.b0() + 1e-12)) {
        return Err(Error::OutOfRange(format!("halfspace input {bad:?} not in [-B0,B0]^{k}")));
    }
    if k >= 32 {
        return Err(Error::EnumerationTooLarge { size: u128::MAX, cap });
    }
    check_cap((taus.len() as u128) << (2 * k), cap)?;
    let sampler = HalfspaceSampler::new(cfg)?;
    let signs = |mask: u64| -> Vec<f64> { (0..k).map(|j| if mask >> j & 1 == 1 { 1.0 } else { -1.0 }).collect() };
    let mut best = (f64::NEG_INFINITY, None);
    for mask in 0u64..(1u64 << k) {
        let v = signs(mask);
        let logp = taus
            .iter()
            .map(|t| sampler.output_probability(t, &v, 31).map(f64::ln))
            .collect::<Result<Vec<_>>>()?;
        for (a, la) in taus.iter().zip(&logp) {
            for (b, lb) in taus.iter().zip(&logp) {
                if la - lb > best.0 {
                    best = (
                        la - lb,
                        Some(Witness {
                            input: a.clone(),
                            input_prime: b.clone(),
                            output: v.iter().map(|s| s * sampler.amplitude()).collect(),
                        }),
                    );
                }
            }
        }
    }
    Ok(best)
}

fn laplace_inputs(cfg: &ChannelConfig, grid: &AuditGrid) -> Result<(Vec<Vec<f64>>, f64)> {
    let d = cfg.dims;
    match (cfg.mechanism, grid) {
        (Mechanism::LaplaceMultinomial, AuditGrid::Vectors(v)) => {
            if v.iter().any(|x| x.len() != d || x.iter().any(|c| *c < 0.0) || x.iter().sum::<f64>() > 1.0 + 1e-12) {
                return Err(Error::OutOfRange("laplace_multinomial inputs must lie in the simplex".into()));
            }
            Ok((v.clone(), cfg.eps() / 2.0))
        }
        (Mechanism::LaplaceHistogram, AuditGrid::Points(xs)) => {
            let v = xs
                .iter()
                .map(|&x| histogram_bin(x, d).map(|j| one_hot(j, d)))
                .collect::<Result<Vec<_>>>()?;
            Ok((v, cfg.eps() / 2.0))
        }
        (Mechanism::NaiveLaplaceSeries, AuditGrid::Points(xs)) => {
            if let Some(bad) = xs.iter().find(|x| !(0.0..=1.0).contains(*x)) {
                return Err(Error::OutOfRange(format!("sample {bad} outside [0,1]")));
            }
            let v = xs
                .iter()
                .map(|&x| {
                    let mut t = vec![0.0; d];
                    trig_basis_prefix(x, &mut t);
                    t
                })
                .collect();
            Ok((v, naive_series_rate(cfg.eps(), cfg.b0(), d)))
        }
        (m, _) => Err(invalid(format!("grid kind does not match mechanism {m}"))),
    }
}

fn audit_laplace(inputs: &[Vec<f64>], alpha: f64, cap: u128) -> Result<(f64, Option<Witness>)> {
    let d = inputs.first().map_or(0, Vec::len);
    let n = inputs.len() as u128;
    check_cap(n * n * d as u128 * LAPLACE_GRID_POINTS as u128, cap)?;
    let scale = 1.0 / alpha;
    let lo = inputs.iter().flatten().copied().fold(0.0, f64::min) - 5.0 * scale;
    let hi = inputs.iter().flatten().copied().fold(1.0, f64::max) + 5.0 * scale;
    let zs: Vec<f64> = (0..LAPLACE_GRID_POINTS)
        .map(|i| lo + (hi - lo) * i as f64 / (LAPLACE_GRID_POINTS - 1) as f64)
        .collect();
    let mut best = (f64::NEG_INFINITY, None);
    for a in inputs {
        for b in inputs {
            let mut total = 0.0;
            let mut arg = Vec::with_capacity(d);
            for (xa, xb) in a.iter().zip(b) {
                let (val, z) = zs
                    .iter()
                    .map(|&z| (alpha * ((z - xb).abs() - (z - xa).abs()), z))
                    .fold((f64::NEG_INFINITY, 0.0), |m, c| if c.0 > m.0 { c } else { m });
                total += val;
                arg.push(z);
            }
            if total > best.0 {
                best = (
                    total,
                    Some(Witness {
                        input: a.clone(),
                        input_prime: b.clone(),
                        output: arg,
                    }),
                );
            }
        }
    }
    Ok(best)
}
