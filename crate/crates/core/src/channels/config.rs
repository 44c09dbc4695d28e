use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::domain::{PrivacyBudget, TRIG_BASIS_BOUND};
use crate::error::{invalid, Error, Result};

/// The five privatization mechanisms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mechanism {
    RandomizedResponse,
    LaplaceMultinomial,
    LaplaceHistogram,
    HalfspaceSeries,
    NaiveLaplaceSeries,
}

impl Mechanism {
    pub const ALL: [Mechanism; 5] = [
        Mechanism::RandomizedResponse,
        Mechanism::LaplaceMultinomial,
        Mechanism::LaplaceHistogram,
        Mechanism::HalfspaceSeries,
        Mechanism::NaiveLaplaceSeries,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Mechanism::RandomizedResponse => "randomized_response",
            Mechanism::LaplaceMultinomial => "laplace_multinomial",
            Mechanism::LaplaceHistogram => "laplace_histogram",
            Mechanism::HalfspaceSeries => "halfspace_series",
            Mechanism::NaiveLaplaceSeries => "naive_laplace_series",
        }
    }

    /// Series mechanisms need the basis bound B₀.
    pub fn is_series(self) -> bool {
        matches!(self, Mechanism::HalfspaceSeries | Mechanism::NaiveLaplaceSeries)
    }
}

impl fmt::Display for Mechanism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Mechanism {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Mechanism::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| invalid(format!("unknown mechanism `{s}`")))
    }
}

/// Parameters of one channel: mechanism, ε, dimension (d or k) and, for the
/// series mechanisms only, the basis bound B₀.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChannelConfig {
    pub mechanism: Mechanism,
    pub epsilon: PrivacyBudget,
    pub dims: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub basis_bound: Option<f64>,
}

impl ChannelConfig {
    /// Builds a validated config; series mechanisms get B₀ = √2.
    pub fn new(mechanism: Mechanism, epsilon: f64, dims: usize) -> Result<Self> {
        let basis_bound = mechanism.is_series().then_some(TRIG_BASIS_BOUND);
        let cfg = Self {
            mechanism,
            epsilon: PrivacyBudget::new(epsilon)?,
            dims,
            basis_bound,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.dims == 0 {
            return Err(invalid("channel dims must be >= 1"));
        }
        match (self.mechanism.is_series(), self.basis_bound) {
            (true, Some(b)) if b.is_finite() && b > 0.0 => Ok(()),
            (true, Some(b)) => Err(invalid(format!("basis bound must be positive, got {b}"))),
            (true, None) => Err(invalid(format!("{} requires a basis bound", self.mechanism))),
            (false, Some(_)) => Err(invalid(format!(
                "{} does not take a basis bound",
                self.mechanism
            ))),
            (false, None) => Ok(()),
        }
    }

    pub fn eps(&self) -> f64 {
        self.epsilon.epsilon()
    }

    /// B₀; only meaningful for series mechanisms.
    pub fn b0(&self) -> f64 {
        self.basis_bound.unwrap_or(TRIG_BASIS_BOUND)
    }

    pub(crate) fn expect(&self, mechanism: Mechanism) -> Result<()> {
        self.validate()?;
        if self.mechanism != mechanism {
            return Err(invalid(format!(
                "config is for {}, expected {mechanism}",
                self.mechanism
            )));
        }
        Ok(())
    }
}

/// One privatized view Z_i.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PrivatizedRecord {
    pub mechanism: Mechanism,
    pub epsilon: f64,
    pub payload: Vec<f64>,
    /// Realized amplitude B̄ of the halfspace channel.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub amplitude: Option<f64>,
}

impl PrivatizedRecord {
    pub fn dims(&self) -> usize {
        self.payload.len()
    }
}
