use serde::{Deserialize, Serialize};

/// Estimation problem whose minimax rates are predicted.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "problem", rename_all = "snake_case")]
pub enum Problem {
    Multinomial { d: usize },
    Density { beta: u32 },
}

/// A rate `argument^(−exponent)` with unit constant, clipped at 1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RateTerm {
    pub argument: f64,
    pub exponent: f64,
    pub value: f64,
}

impl RateTerm {
    fn new(argument: f64, exponent: f64) -> Self {
        Self {
            argument,
            exponent,
            value: argument.powf(-exponent).min(1.0),
        }
    }
}

/// Unit-constant rate envelopes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RatePrediction {
    pub problem: Problem,
    pub n: usize,
    pub epsilon: f64,
    pub private_lower: f64,
    pub private_upper: f64,
    pub classical: f64,
    /// Rate of the naive Laplace series estimator (density problems only).
    pub naive: Option<f64>,
    /// The power-law terms the envelopes are built from.
    pub terms: Vec<RateTerm>,
}

/// Multinomial: lower min{1, 1/√(nε²), d/(nε²)}, upper min{1, d/(nε²)},
/// classical (1/n)(1 − 1/d). Density: private (nε²)^{−2β/(2β+2)}, classical
/// n^{−2β/(2β+1)}, naive (nε²)^{−2β/(2β+3)}; all clipped at 1.
pub fn predict_rates(problem: Problem, n: usize, epsilon: f64) -> RatePrediction {
    let nf = n as f64;
    let ne2 = nf * epsilon * epsilon;
    match problem {
        Problem::Multinomial { d } => {
            let df = d as f64;
            let root = RateTerm::new(ne2, 0.5);
            let linear = RateTerm::new(ne2 / df, 1.0);
            RatePrediction {
                problem,
                n,
                epsilon,
                private_lower: 1f64.min(root.value).min(linear.value),
                private_upper: linear.value,
                classical: ((1.0 - 1.0 / df) / nf).min(1.0),
                naive: None,
                terms: vec![root, linear],
            }
        }
        Problem::Density { beta } => {
            let b = 2.0 * beta as f64;
            let private = RateTerm::new(ne2, b / (b + 2.0));
            let classical = RateTerm::new(nf, b / (b + 1.0));
            let naive = RateTerm::new(ne2, b / (b + 3.0));
            RatePrediction {
                problem,
                n,
                epsilon,
                private_lower: private.value,
                private_upper: private.value,
                classical: classical.value,
                naive: Some(naive.value),
                terms: vec![private, classical, naive],
            }
        }
    }
}
