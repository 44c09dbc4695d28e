use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// Tolerance on Σθ_j = 1.
pub const SIMPLEX_SUM_TOL: f64 = 1e-12;

/// A point of the probability simplex Δ_d.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct SimplexVector(Vec<f64>);

impl SimplexVector {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.is_empty() {
            return Err(invalid("simplex vector must have at least one coordinate"));
        }
        if let Some(bad) = coords.iter().find(|c| !(c.is_finite() && **c >= 0.0)) {
            return Err(invalid(format!("simplex coordinate {bad} is negative or non-finite")));
        }
        let sum: f64 = coords.iter().sum();
        if (sum - 1.0).abs() > SIMPLEX_SUM_TOL {
            return Err(invalid(format!("simplex coordinates sum to {sum}, not 1")));
        }
        Ok(Self(coords))
    }

    /// Projects an arbitrary vector onto Δ_d.
    pub fn from_projection(v: &[f64]) -> Self {
        Self(project_simplex(v, 1.0))
    }

    pub fn uniform(d: usize) -> Result<Self> {
        if d == 0 {
            return Err(invalid("dimension must be >= 1"));
        }
        Ok(Self(vec![1.0 / d as f64; d]))
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }

    pub fn squared_distance(&self, other: &[f64]) -> f64 {
        self.0
            .iter()
            .zip(other)
            .map(|(a, b)| (a - b) * (a - b))
            .sum()
    }
}

impl TryFrom<Vec<f64>> for SimplexVector {
    type Error = crate::Error;

    fn try_from(v: Vec<f64>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<SimplexVector> for Vec<f64> {
    fn from(s: SimplexVector) -> Vec<f64> {
        s.0
    }
}

/// Euclidean projection of `v` onto `scale · Δ_d`.
///
/// Sort-and-threshold: find θ with Σ max(v_i − θ, 0) = scale, then clip.
pub fn project_simplex(v: &[f64], scale: f64) -> Vec<f64> {
    assert!(scale > 0.0, "scale must be positive");
    if v.is_empty() {
        return Vec::new();
    }
    let mut sorted = v.to_vec();
    sorted.sort_unstable_by(|a, b| b.total_cmp(a));
    let mut cumsum = 0.0;
    let mut theta = 0.0;
    for (i, &u) in sorted.iter().enumerate() {
        cumsum += u;
        let candidate = (cumsum - scale) / (i + 1) as f64;
        if u - candidate > 0.0 {
            theta = candidate;
        } else {
            break;
        }
    }
    v.iter().map(|&x| (x - theta).max(0.0)).collect()
}
