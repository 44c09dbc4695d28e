use serde::{Deserialize, Serialize};

use super::basis::TRIG_BASIS_BOUND;
use crate::error::{invalid, Result};

/// Elliptical Sobolev ball F_β[C] over the trigonometric basis:
/// Σ_j j^{2β} θ_j² ≤ C², j the 0-based basis index.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SobolevClass {
    pub beta: u32,
    pub radius: f64,
    pub basis_bound: f64,
}

impl SobolevClass {
    pub fn new(beta: u32, radius: f64) -> Result<Self> {
        if beta < 1 {
            return Err(invalid("smoothness beta must be >= 1"));
        }
        if !(radius.is_finite() && radius > 0.0) {
            return Err(invalid(format!("radius must be positive, got {radius}")));
        }
        Ok(Self {
            beta,
            radius,
            basis_bound: TRIG_BASIS_BOUND,
        })
    }

    /// Σ_j j^{2β} θ_j² for coefficients on φ_0, φ_1, ….
    pub fn weighted_norm_sq(&self, coefficients: &[f64]) -> f64 {
        coefficients
            .iter()
            .enumerate()
            .skip(1)
            .map(|(j, t)| (j as f64).powi(2 * self.beta as i32) * t * t)
            .sum()
    }

    pub fn contains(&self, coefficients: &[f64]) -> bool {
        self.weighted_norm_sq(coefficients) <= self.radius * self.radius
    }
}
