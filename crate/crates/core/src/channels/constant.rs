use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Unbiasedness constant c_k of the halfspace channel together with its k.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChannelConstant {
    pub k: usize,
    pub c_k: f64,
}

impl ChannelConstant {
    /// B̄ = B₀√k(e^ε+1)/(c_k(e^ε−1)), the amplitude that makes E[Z | x] = τ.
    pub fn amplitude(&self, epsilon: f64, basis_bound: f64) -> f64 {
        basis_bound * (self.k as f64).sqrt() / (self.c_k * (epsilon / 2.0).tanh())
    }
}

/// Exact c_k in O(k).
///
/// Conditioning on one coordinate, the shift E[z₁ | τ̃ = 1] equals
/// ((e^ε−1)/(e^ε+1))·(P(R=0) + P(R=1)) where R is a sum of k−1 Rademacher
/// signs, so c_k = √k·(P(R=0) + P(R=1)). Only one of the two terms is
/// non-zero, and both equal the central probability C(2m,m)/4^m with
/// m = ⌈(k−1)/2⌉, accumulated here by its ratio recurrence.
pub fn compute_ck(k: usize) -> ChannelConstant {
    assert!(k >= 1, "compute_ck needs k >= 1");
    let m = (k - 1).div_ceil(2);
    let central = (1..=m).fold(1.0, |a, i| a * (2 * i - 1) as f64 / (2 * i) as f64);
    ChannelConstant {
        k,
        c_k: (k as f64).sqrt() * central,
    }
}

/// c_k by brute-force summation over all 2^k sign vectors at τ̃ = (1,…,1),
/// using the channel's own output law. Serves as the oracle for [`compute_ck`].
pub fn compute_ck_by_enumeration(k: usize, max_bits: u32) -> Result<ChannelConstant> {
    assert!(k >= 1, "compute_ck needs k >= 1");
    if k as u32 > max_bits {
        return Err(Error::EnumerationTooLarge {
            size: 1u128 << k.min(127),
            cap: 1u128 << max_bits,
        });
    }
    let eps = 1.0_f64;
    let e = eps.exp();
    let weight = |s: i64| match s.signum() {
        1 => e,
        0 => (e + 1.0) / 2.0,
        _ => 1.0,
    };
    let mut total = 0.0;
    let mut first = 0.0;
    for mask in 0u64..(1u64 << k) {
        let ones = mask.count_ones() as i64;
        let s = 2 * ones - k as i64;
        let w = weight(s);
        total += w;
        first += if mask & 1 == 1 { w } else { -w };
    }
    let mean = first / total;
    Ok(ChannelConstant {
        k,
        c_k: (k as f64).sqrt() * mean * (e + 1.0) / (e - 1.0),
    })
}
