use log::debug;
use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::linalg::{lambda_max, lambda_max_power};
use crate::domain::RngStream;
use crate::error::{invalid, Error, Result};

/// Which family a packing belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PackingKind {
    /// Vectors in {0,1}^d with exactly s ones.
    BinaryWeighted { d: usize, s: usize },
    /// Vectors in {−1,1}^k.
    Sign { k: usize },
}

/// Measured properties of a packing, recomputed from its vectors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    /// Smallest pairwise ℓ₁ distance (a certified lower bound when
    /// `separation_scanned` is false).
    pub min_l1_separation: u64,
    pub separation_scanned: bool,
    pub required_l1_separation: u64,
    /// λ_max of cov(V) for binary packings, of (1/|V|)Σνν^T for sign packings.
    pub cov_lambda_max: f64,
    /// The same eigenvalue by power iteration.
    pub cov_lambda_max_power: f64,
    /// Binary: λ_max·d/s. Sign: λ_max.
    pub c2: f64,
    /// Sign packings: min ℓ₁ separation / k.
    pub c1: Option<f64>,
    pub log_cardinality: f64,
}

/// A finite packing together with its certificate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PackingSet {
    pub kind: PackingKind,
    pub vectors: Vec<Vec<i8>>,
    pub certified: Certificate,
    /// Log of the cardinality the construction aims for before capping.
    pub theoretical_log_cardinality: f64,
    pub construction: String,
    pub attempts: usize,
}

/// Everything except the vectors, for reports.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PackingSummary {
    pub kind: PackingKind,
    pub cardinality: usize,
    pub certified: Certificate,
    pub theoretical_log_cardinality: f64,
    pub construction: String,
    pub attempts: usize,
}

/// Tuning knobs for the randomized constructions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PackingOptions {
    pub max_retries: usize,
    /// Cap on the number of sampled vectors in the binary construction.
    pub k_max: usize,
    /// Largest accepted c₂ for sampled binary packings.
    pub max_c2: f64,
    /// Cap on the size of sign packings.
    pub sign_cap: usize,
    /// Candidate draws allowed per sign packing.
    pub sign_budget: usize,
    /// Largest full weight-s slice that will be enumerated.
    pub max_enumeration: usize,
}

impl Default for PackingOptions {
    fn default() -> Self {
        Self {
            max_retries: 20,
            k_max: 1 << 16,
            max_c2: 8.0,
            sign_cap: 1 << 10,
            sign_budget: 1 << 18,
            max_enumeration: 1 << 22,
        }
    }
}

impl PackingSet {
    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn dim(&self) -> usize {
        match self.kind {
            PackingKind::BinaryWeighted { d, .. } => d,
            PackingKind::Sign { k } => k,
        }
    }

    pub fn summary(&self) -> PackingSummary {
        PackingSummary {
            kind: self.kind,
            cardinality: self.len(),
            certified: self.certified.clone(),
            theoretical_log_cardinality: self.theoretical_log_cardinality,
            construction: self.construction.clone(),
            attempts: self.attempts,
        }
    }

    /// cov(V) for binary packings, (1/|V|)Σνν^T for sign packings; built from
    /// integer co-occurrence counts.
    pub fn moment_matrix(&self) -> DMatrix<f64> {
        let n = self.dim();
        let count = self.vectors.len() as i128;
        let mut co = vec![0i128; n * n];
        let mut sums = vec![0i128; n];
        for v in &self.vectors {
            match self.kind {
                PackingKind::BinaryWeighted { .. } => {
                    let ones: Vec<usize> = (0..n).filter(|&i| v[i] == 1).collect();
                    for &i in &ones {
                        sums[i] += 1;
                        for &j in &ones {
                            co[i * n + j] += 1;
                        }
                    }
                }
                PackingKind::Sign { .. } => {
                    for i in 0..n {
                        for j in 0..n {
                            co[i * n + j] += (v[i] * v[j]) as i128;
                        }
                    }
                }
            }
        }
        match self.kind {
            PackingKind::BinaryWeighted { .. } => DMatrix::from_fn(n, n, |i, j| {
                (count * co[i * n + j] - sums[i] * sums[j]) as f64 / (count * count) as f64
            }),
            PackingKind::Sign { .. } => DMatrix::from_fn(n, n, |i, j| co[i * n + j] as f64 / count as f64),
        }
    }
}

fn required_separation(kind: PackingKind) -> u64 {
    match kind {
        PackingKind::BinaryWeighted { s, .. } => (s / 4).max(1) as u64,
        PackingKind::Sign { k } => 2 * k.div_ceil(4) as u64,
    }
}

fn l1(a: &[i8], b: &[i8]) -> u64 {
    a.iter().zip(b).map(|(x, y)| (x - y).unsigned_abs() as u64).sum()
}

/// Recomputes the certificate of `set` from its vectors alone and checks
/// membership, separation and (for binary packings) weight constraints.
pub fn verify_packing(set: &PackingSet) -> Result<Certificate> {
    let fail = |detail: String| Error::PackingFailed { attempts: set.attempts, detail };
    let n = set.dim();
    if set.vectors.len() < 2 {
        return Err(fail("packing has fewer than two vectors".into()));
    }
    for v in &set.vectors {
        if v.len() != n {
            return Err(fail(format!("vector of length {} in dimension {n}", v.len())));
        }
        match set.kind {
            PackingKind::BinaryWeighted { s, .. } => {
                if v.iter().any(|&x| x != 0 && x != 1) || v.iter().filter(|&&x| x == 1).count() != s {
                    return Err(fail(format!("vector is not binary of weight {s}")));
                }
            }
            PackingKind::Sign { .. } => {
                if v.iter().any(|&x| x != 1 && x != -1) {
                    return Err(fail("vector is not a sign vector".into()));
                }
            }
        }
    }
    let count = set.vectors.len();
    let required = required_separation(set.kind);
    let scan = (count as u128).pow(2) * n as u128 <= 1 << 32;
    let min_sep = if scan {
        let mut best = u64::MAX;
        for i in 0..count {
            for j in i + 1..count {
                best = best.min(l1(&set.vectors[i], &set.vectors[j]));
            }
        }
        best
    } else {
        // distinct vectors of equal weight differ in at least two places
        let mut sorted = set.vectors.clone();
        sorted.sort_unstable();
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            0
        } else {
            2
        }
    };
    if min_sep < required {
        return Err(fail(format!("min l1 separation {min_sep} < required {required}")));
    }
    let m = set.moment_matrix();
    let lam = lambda_max(&m);
    let lam_power = lambda_max_power(&m, 2000);
    let (c2, c1) = match set.kind {
        PackingKind::BinaryWeighted { d, s } => (lam * d as f64 / s as f64, None),
        PackingKind::Sign { k } => (lam, Some(min_sep as f64 / k as f64)),
    };
    Ok(Certificate {
        min_l1_separation: min_sep,
        separation_scanned: scan,
        required_l1_separation: required,
        cov_lambda_max: lam,
        cov_lambda_max_power: lam_power,
        c2,
        c1,
        log_cardinality: (count as f64).ln(),
    })
}

fn ln_binomial(n: usize, r: usize) -> f64 {
    (0..r).map(|i| ((n - i) as f64 / (i + 1) as f64).ln()).sum()
}

fn all_weight_s(d: usize, s: usize) -> Vec<Vec<i8>> {
    let mut out = Vec::new();
    let mut idx: Vec<usize> = (0..s).collect();
    loop {
        let mut v = vec![0i8; d];
        idx.iter().for_each(|&i| v[i] = 1);
        out.push(v);
        // next combination in lexicographic order
        let Some(pos) = (0..s).rev().find(|&p| idx[p] < d - s + p) else {
            return out;
        };
        idx[pos] += 1;
        for q in pos + 1..s {
            idx[q] = idx[q - 1] + 1;
        }
    }
}

fn random_weight_s(d: usize, s: usize, rng: &mut RngStream) -> Vec<i8> {
    let mut perm: Vec<usize> = (0..d).collect();
    let mut v = vec![0i8; d];
    for i in 0..s {
        let j = i + rng.below(d - i);
        perm.swap(i, j);
        v[perm[i]] = 1;
    }
    v
}

/// Binary packing of weight-s vectors in {0,1}^d with certified separation
/// ≥ max{⌊s/4⌋, 1} and measured covariance constant c₂.
///
/// s ≤ 4: the full weight-s slice. s ∈ 4ℕ: K = ⌈(d/(6t))^{3t/2}⌉ (t = s/4,
/// capped at `k_max`) uniform draws from the slice, re-drawn until the set
/// is separated and c₂ ≤ `max_c2`. Other s: a packing for (d − r, s − r),
/// r = s mod 4, with r trailing ones appended.
pub fn build_weighted_packing(d: usize, s: usize, rng: &mut RngStream, opts: &PackingOptions) -> Result<PackingSet> {
    if s == 0 || s > d {
        return Err(invalid(format!("need 1 <= s <= d, got s={s}, d={d}")));
    }
    if s == d {
        return Err(invalid("s = d leaves a single vector; no packing exists"));
    }
    let kind = PackingKind::BinaryWeighted { d, s };
    if s <= 4 {
        let size = ln_binomial(d, s).exp().round();
        if size > opts.max_enumeration as f64 {
            return Err(Error::EnumerationTooLarge {
                size: size as u128,
                cap: opts.max_enumeration as u128,
            });
        }
        let mut set = PackingSet {
            kind,
            vectors: all_weight_s(d, s),
            certified: empty_certificate(),
            theoretical_log_cardinality: ln_binomial(d, s),
            construction: "full weight-s slice".into(),
            attempts: 1,
        };
        set.certified = verify_packing(&set)?;
        return Ok(set);
    }
    let r = s % 4;
    if r != 0 {
        let inner = build_weighted_packing(d - r, s - r, rng, opts)?;
        let mut set = PackingSet {
            kind,
            vectors: inner
                .vectors
                .into_iter()
                .map(|mut v| {
                    v.extend(std::iter::repeat_n(1i8, r));
                    v
                })
                .collect(),
            certified: empty_certificate(),
            theoretical_log_cardinality: inner.theoretical_log_cardinality,
            construction: format!("{} with {r} ones appended", inner.construction),
            attempts: inner.attempts,
        };
        set.certified = verify_packing(&set)?;
        return Ok(set);
    }
    let t = s / 4;
    let log_target = 1.5 * t as f64 * (d as f64 / (6.0 * t as f64)).ln();
    let max_distinct = ln_binomial(d, s).exp();
    let count = (log_target.exp().ceil()).clamp(2.0, opts.k_max as f64).min(max_distinct) as usize;
    let mut last = String::new();
    for attempt in 1..=opts.max_retries {
        let vectors = (0..count).map(|_| random_weight_s(d, s, rng)).collect();
        let mut set = PackingSet {
            kind,
            vectors,
            certified: empty_certificate(),
            theoretical_log_cardinality: log_target,
            construction: format!("{count} uniform draws from the weight-{s} slice"),
            attempts: attempt,
        };
        match verify_packing(&set) {
            Ok(cert) if cert.c2 <= opts.max_c2 => {
                set.certified = cert;
                return Ok(set);
            }
            Ok(cert) => last = format!("c2 = {} exceeds {}", cert.c2, opts.max_c2),
            Err(e) => last = e.to_string(),
        }
        debug!("weighted packing attempt {attempt} rejected: {last}");
    }
    Err(Error::PackingFailed {
        attempts: opts.max_retries,
        detail: last,
    })
}

/// Sign packing of {−1,1}^k by random coding: uniform sign vectors are kept
/// when their Hamming distance to every kept vector is ≥ k/4, until
/// min{⌈e^{k/16}⌉, sign_cap} vectors are found or the draw budget runs out.
pub fn build_sign_packing(k: usize, rng: &mut RngStream, opts: &PackingOptions) -> Result<PackingSet> {
    if k < 2 {
        return Err(invalid("sign packing needs k >= 2"));
    }
    let kind = PackingKind::Sign { k };
    let target = ((k as f64 / 16.0).exp().ceil() as usize).clamp(2, opts.sign_cap);
    let required = required_separation(kind);
    let mut kept: Vec<Vec<i8>> = Vec::new();
    let mut draws = 0;
    if k == 2 {
        kept = vec![vec![1, 1], vec![-1, -1]];
    }
    while kept.len() < target && draws < opts.sign_budget {
        draws += 1;
        let v: Vec<i8> = (0..k).map(|_| if rng.bernoulli(0.5) { 1 } else { -1 }).collect();
        if kept.iter().all(|u| l1(u, &v) >= required) {
            kept.push(v);
        }
    }
    if kept.len() < 2 {
        return Err(Error::PackingFailed {
            attempts: draws,
            detail: format!("only {} vector(s) after {draws} draws", kept.len()),
        });
    }
    let mut set = PackingSet {
        kind,
        vectors: kept,
        certified: empty_certificate(),
        theoretical_log_cardinality: k as f64 / 16.0,
        construction: "random coding with Hamming distance >= k/4".into(),
        attempts: draws.max(1),
    };
    set.certified = verify_packing(&set)?;
    Ok(set)
}

fn empty_certificate() -> Certificate {
    Certificate {
        min_l1_separation: 0,
        separation_scanned: false,
        required_l1_separation: 0,
        cov_lambda_max: 0.0,
        cov_lambda_max_power: 0.0,
        c2: 0.0,
        c1: None,
        log_cardinality: 0.0,
    }
}
