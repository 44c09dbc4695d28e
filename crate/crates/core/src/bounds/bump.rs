use serde::{Deserialize, Serialize};

use super::packing::{PackingKind, PackingSet};
use crate::domain::{integrate, trig_basis_eval, Density};
use crate::error::{invalid, Result};

/// The bump g_β on [0, 1] used to build packed densities, β ∈ {1, 2}.
///
/// g₁ is the tent min(x, 1/2 − x) on [0, 1/2]; g₂ is 2x²(1/2 − x)², whose
/// second derivative has sup-norm exactly 1. Both are continued to [1/2, 1]
/// by g(x) = −g(x − 1/2).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BumpFunction {
    pub beta: u32,
    /// ∫₀^{1/2} g_β.
    pub c_half: f64,
}

impl BumpFunction {
    pub fn new(beta: u32) -> Result<Self> {
        let c_half = match beta {
            1 => 1.0 / 16.0,
            2 => 1.0 / 480.0,
            _ => return Err(invalid(format!("bump functions exist for beta in {{1,2}}, got {beta}"))),
        };
        Ok(Self { beta, c_half })
    }

    pub fn eval(&self, x: f64) -> f64 {
        let half = |y: f64| match self.beta {
            1 => y.min(0.5 - y),
            _ => 2.0 * y * y * (0.5 - y) * (0.5 - y),
        };
        if x <= 0.5 {
            half(x.max(0.0))
        } else {
            -half((x - 0.5).min(0.5))
        }
    }

    /// ∫₀¹ g_β².
    pub fn squared_norm(&self) -> f64 {
        match self.beta {
            1 => 1.0 / 48.0,
            _ => 1.0 / 40320.0,
        }
    }
}

/// g_β(x) for β ∈ {1, 2}.
pub fn bump_eval(beta: u32, x: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&x) {
        return Err(invalid(format!("bump argument {x} outside [0,1]")));
    }
    Ok(BumpFunction::new(beta)?.eval(x))
}

/// Densities f_ν = 1 + Σ_j ν_j k^{−β} g_β(k(x − (j−1)/k)) indexed by a sign
/// packing of {−1,1}^k.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityPacking {
    pub beta: u32,
    pub k: usize,
    pub packing: PackingSet,
}

/// One member f_ν of a [`DensityPacking`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PackedDensity {
    pub bump: BumpFunction,
    pub nu: Vec<i8>,
}

impl DensityPacking {
    pub fn new(beta: u32, packing: PackingSet) -> Result<Self> {
        BumpFunction::new(beta)?;
        let PackingKind::Sign { k } = packing.kind else {
            return Err(invalid("density packings need a sign packing"));
        };
        Ok(Self { beta, k, packing })
    }

    pub fn member(&self, index: usize) -> Result<PackedDensity> {
        let nu = self
            .packing
            .vectors
            .get(index)
            .ok_or_else(|| invalid(format!("packing has no member {index}")))?;
        density_packing_member(&self.packing, nu, self.beta, self.k)
    }

    /// ‖f_ν − f_ν′‖² = 4·H(ν,ν′)·k^{−2β−1}·∫g_β².
    pub fn pair_distance_sq(&self, a: usize, b: usize) -> f64 {
        let bump = BumpFunction::new(self.beta).expect("validated at construction");
        let h = self.packing.vectors[a]
            .iter()
            .zip(&self.packing.vectors[b])
            .filter(|(x, y)| x != y)
            .count();
        4.0 * h as f64 * (self.k as f64).powi(-(2 * self.beta as i32) - 1) * bump.squared_norm()
    }
}

/// f_ν for a sign vector ν of length k.
pub fn density_packing_member(packing: &PackingSet, nu: &[i8], beta: u32, k: usize) -> Result<PackedDensity> {
    if packing.dim() != k || nu.len() != k {
        return Err(invalid(format!(
            "packing dimension {} / vector length {} do not match k={k}",
            packing.dim(),
            nu.len()
        )));
    }
    if nu.iter().any(|&v| v != 1 && v != -1) {
        return Err(invalid("density packing members need sign vectors"));
    }
    Ok(PackedDensity {
        bump: BumpFunction::new(beta)?,
        nu: nu.to_vec(),
    })
}

impl PackedDensity {
    pub fn k(&self) -> usize {
        self.nu.len()
    }

    /// Σ_{j=1}^{n} j^{2β} θ_j² over the first `n_coeffs` trigonometric
    /// coefficients (index 0 excluded), each by Simpson quadrature.
    pub fn sobolev_norm_estimate(&self, n_coeffs: usize) -> f64 {
        let breaks = self.breakpoints();
        (1..n_coeffs)
            .map(|j| {
                let theta = integrate(|x| self.eval(x) * trig_basis_eval(j, x), &breaks);
                (j as f64).powi(2 * self.bump.beta as i32) * theta * theta
            })
            .sum()
    }
}

impl Density for PackedDensity {
    fn eval(&self, x: f64) -> f64 {
        let k = self.nu.len();
        let kf = k as f64;
        let j = ((x * kf).floor() as usize).min(k - 1);
        let local = (kf * x - j as f64).clamp(0.0, 1.0);
        1.0 + self.nu[j] as f64 * kf.powi(-(self.bump.beta as i32)) * self.bump.eval(local)
    }

    fn breakpoints(&self) -> Vec<f64> {
        let k = self.nu.len();
        (1..2 * k).map(|i| i as f64 / (2 * k) as f64).collect()
    }
}
