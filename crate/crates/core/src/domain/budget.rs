use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// Largest ε for which the minimax lower bounds are stated.
pub const THEOREM_EPSILON_MAX: f64 = 0.25;

/// A local differential privacy level ε > 0.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct PrivacyBudget(f64);

impl PrivacyBudget {
    pub fn new(epsilon: f64) -> Result<Self> {
        if !(epsilon.is_finite() && epsilon > 0.0) {
            return Err(invalid(format!(
                "epsilon must be positive and finite, got {epsilon}"
            )));
        }
        Ok(Self(epsilon))
    }

    #[inline]
    pub fn epsilon(self) -> f64 {
        self.0
    }

    /// True when ε ≤ 1/4, the range covered by the lower-bound theorems.
    pub fn in_theorem_range(self) -> bool {
        self.0 <= THEOREM_EPSILON_MAX
    }
}

impl TryFrom<f64> for PrivacyBudget {
    type Error = crate::Error;

    fn try_from(value: f64) -> Result<Self> {
        Self::new(value)
    }
}

impl From<PrivacyBudget> for f64 {
    fn from(b: PrivacyBudget) -> f64 {
        b.0
    }
}
