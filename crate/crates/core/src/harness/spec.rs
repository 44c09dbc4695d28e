use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::strategy::find_strategy;
use super::truth::{DensityName, TruthSpec};
use crate::domain::SimplexVector;
use crate::error::{invalid, Error, Result};

/// Minimum number of trials for a sweep whose rows feed a slope fit.
pub const MIN_TRIALS_FOR_FIT: usize = 30;

/// Which estimation problem a sweep (or strategy) addresses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProblemKind {
    Multinomial,
    Density,
}

impl ProblemKind {
    pub fn name(self) -> &'static str {
        match self {
            ProblemKind::Multinomial => "multinomial",
            ProblemKind::Density => "density",
        }
    }
}

impl fmt::Display for ProblemKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for ProblemKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "multinomial" => Ok(ProblemKind::Multinomial),
            "density" => Ok(ProblemKind::Density),
            other => Err(invalid(format!("unknown problem `{other}`"))),
        }
    }
}

/// How density strategies choose their truncation level / bin count.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "snake_case")]
pub enum TruncationRule {
    /// Each strategy's own rate-optimal rule (see the strategy docs).
    #[default]
    RateOptimal,
    /// The same k for every strategy and n.
    Fixed { k: usize },
    /// Every k in the list; the row with the smallest mean error is kept.
    Scan { ks: Vec<usize> },
}

/// Closed-form upper bounds a sweep can be checked against.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "form", rename_all = "snake_case")]
pub enum UpperBound {
    /// constant · min{1, d/(nε²)}.
    Multinomial { constant: f64 },
    /// 5(ε²n)^{−1/2} + √ε·n^{−3/4}.
    LipschitzHistogram,
}

impl UpperBound {
    pub fn value(&self, n: usize, epsilon: f64, dims: usize) -> f64 {
        let nf = n as f64;
        match self {
            UpperBound::Multinomial { constant } => constant * (dims as f64 / (nf * epsilon * epsilon)).min(1.0),
            UpperBound::LipschitzHistogram => 5.0 / (epsilon * epsilon * nf).sqrt() + epsilon.sqrt() * nf.powf(-0.75),
        }
    }
}

/// A pass/fail check evaluated on the rows of a sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CheckSpec {
    /// Fitted log-log slope within `expected_exponent ± tolerance`.
    Slope {
        mechanism: String,
        #[serde(default)]
        epsilon: Option<f64>,
        expected_exponent: f64,
        tolerance: f64,
        #[serde(default)]
        min_n: Option<usize>,
    },
    /// Fitted log-log slope no steeper than `minimum`.
    SlopeAtLeast {
        mechanism: String,
        #[serde(default)]
        epsilon: Option<f64>,
        minimum: f64,
    },
    /// mse_mean ≤ bound at every grid point of the mechanism.
    UpperBound {
        mechanism: String,
        #[serde(default)]
        epsilon: Option<f64>,
        bound: UpperBound,
    },
    /// mse_mean(worse) > mse_mean(better) at every n ≥ min_n.
    Ordering {
        worse: String,
        better: String,
        #[serde(default)]
        epsilon: Option<f64>,
        min_n: usize,
    },
    /// The effective-sample-size ratio n′/n scales as ε² between two budgets,
    /// within a multiplicative `factor`.
    EffectiveSampleSize {
        private: String,
        classical: String,
        epsilon_low: f64,
        epsilon_high: f64,
        factor: f64,
    },
    /// The unit-constant private lower rate is below mse_mean + sigmas·stderr
    /// for every private row.
    LowerBoundDominance {
        #[serde(default = "default_sigmas")]
        sigmas: f64,
    },
}

fn default_sigmas() -> f64 {
    3.0
}

/// A Monte Carlo sweep, as read from a JSON config file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSpec {
    pub problem: ProblemKind,
    /// Strategy names from the registry.
    pub mechanisms: Vec<String>,
    pub n_grid: Vec<usize>,
    /// Budgets for private strategies; non-private strategies run once per n.
    pub epsilon_grid: Vec<f64>,
    /// Optional n grid for non-private baselines (defaults to `n_grid`); used
    /// to extend the baseline below the private grid for effective sample sizes.
    #[serde(default)]
    pub classical_n_grid: Option<Vec<usize>>,
    #[serde(default)]
    pub d: Option<usize>,
    #[serde(default)]
    pub beta: Option<u32>,
    #[serde(default)]
    pub truncation: TruncationRule,
    pub trials: usize,
    pub seed: u64,
    pub truth: TruthSpec,
    /// Record wall-clock time per row; off by default because timings make
    /// the CSV nondeterministic.
    #[serde(default)]
    pub record_timing: bool,
    #[serde(default)]
    pub checks: Vec<CheckSpec>,
}

impl ExperimentSpec {
    pub fn from_json(text: &str) -> Result<Self> {
        let spec: Self = serde_json::from_str(text)?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_json(&text)
    }

    /// Whether any configured check fits a slope.
    pub fn feeds_fit(&self) -> bool {
        self.checks.iter().any(|c| {
            matches!(
                c,
                CheckSpec::Slope { .. } | CheckSpec::SlopeAtLeast { .. } | CheckSpec::EffectiveSampleSize { .. }
            )
        })
    }

    pub fn classical_grid(&self) -> &[usize] {
        self.classical_n_grid.as_deref().unwrap_or(&self.n_grid)
    }

    pub fn validate(&self) -> Result<()> {
        if self.mechanisms.is_empty() {
            return Err(Error::InvalidExperiment("no mechanisms listed".into()));
        }
        for name in &self.mechanisms {
            let s = find_strategy(name)?;
            if s.problem() != self.problem {
                return Err(Error::InvalidExperiment(format!(
                    "strategy `{name}` solves the {} problem, the experiment is {}",
                    s.problem(),
                    self.problem
                )));
            }
        }
        check_grid("n_grid", &self.n_grid)?;
        if let Some(g) = &self.classical_n_grid {
            check_grid("classical_n_grid", g)?;
        }
        if self.epsilon_grid.is_empty() || self.epsilon_grid.iter().any(|e| !(e.is_finite() && *e > 0.0)) {
            return Err(Error::InvalidExperiment(
                "epsilon_grid must be a nonempty list of positive reals".into(),
            ));
        }
        if self.trials == 0 {
            return Err(Error::InvalidExperiment("trials must be positive".into()));
        }
        if self.feeds_fit() && self.trials < MIN_TRIALS_FOR_FIT {
            return Err(Error::InvalidExperiment(format!(
                "slope checks need at least {MIN_TRIALS_FOR_FIT} trials, got {}",
                self.trials
            )));
        }
        match (self.problem, &self.truth) {
            (ProblemKind::Multinomial, TruthSpec::Simplex(p)) => {
                let d = self
                    .d
                    .ok_or_else(|| Error::InvalidExperiment("multinomial experiments need `d`".into()))?;
                if p.len() != d {
                    return Err(Error::InvalidExperiment(format!(
                        "truth has {} coordinates, d = {d}",
                        p.len()
                    )));
                }
                SimplexVector::new(p.clone())?;
            }
            (ProblemKind::Density, TruthSpec::Density(name)) => {
                let beta = self
                    .beta
                    .ok_or_else(|| Error::InvalidExperiment("density experiments need `beta`".into()))?;
                if beta == 0 {
                    return Err(Error::InvalidExperiment("beta must be positive".into()));
                }
                if *name == DensityName::Tent && beta > 1 {
                    return Err(Error::InvalidExperiment(
                        "the tent density is only Lipschitz; use beta = 1".into(),
                    ));
                }
            }
            (p, _) => {
                return Err(Error::InvalidExperiment(format!(
                    "truth does not match the {p} problem"
                )))
            }
        }
        match &self.truncation {
            TruncationRule::Fixed { k } if *k == 0 => {
                return Err(Error::InvalidExperiment("fixed truncation k must be positive".into()))
            }
            TruncationRule::Scan { ks } if ks.is_empty() || ks.contains(&0) => {
                return Err(Error::InvalidExperiment("scan truncation needs positive ks".into()))
            }
            _ => {}
        }
        Ok(())
    }
}

fn check_grid(label: &str, grid: &[usize]) -> Result<()> {
    if grid.is_empty() || grid[0] == 0 || grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidExperiment(format!(
            "{label} must be a nonempty strictly increasing list of positive integers"
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn base() -> ExperimentSpec {
        ExperimentSpec::from_json(
            r#"{"problem":"multinomial","mechanisms":["randomized_response","mle_multinomial"],
                "n_grid":[10,100],"epsilon_grid":[1.0],"d":2,"trials":30,"seed":1,
                "truth":{"simplex":[0.5,0.5]}}"#,
        )
        .unwrap()
    }

    #[test]
    fn parses_with_defaults() {
        let s = base();
        assert_eq!(s.truncation, TruncationRule::RateOptimal);
        assert!(!s.record_timing);
        assert!(s.checks.is_empty());
        assert_eq!(s.classical_grid(), &[10, 100]);
    }

    #[test]
    fn rejects_bad_grids_and_pairings() {
        let mut s = base();
        s.n_grid = vec![100, 10];
        assert!(matches!(s.validate(), Err(Error::InvalidExperiment(_))));
        let mut s = base();
        s.mechanisms.push("halfspace_series".into());
        assert!(matches!(s.validate(), Err(Error::InvalidExperiment(_))));
        let mut s = base();
        s.mechanisms = vec!["nope".into()];
        assert!(s.validate().is_err());
        let mut s = base();
        s.truth = TruthSpec::Density(DensityName::Tent);
        assert!(s.validate().is_err());
        let mut s = base();
        s.epsilon_grid = vec![0.0];
        assert!(s.validate().is_err());
    }

    #[test]
    fn slope_checks_need_thirty_trials() {
        let mut s = base();
        s.trials = 10;
        assert!(s.validate().is_ok());
        s.checks.push(CheckSpec::Slope {
            mechanism: "randomized_response".into(),
            epsilon: Some(1.0),
            expected_exponent: -1.0,
            tolerance: 0.1,
            min_n: None,
        });
        assert!(matches!(s.validate(), Err(Error::InvalidExperiment(_))));
    }

    #[test]
    fn checks_round_trip_through_json() {
        let c = CheckSpec::UpperBound {
            mechanism: "laplace_histogram".into(),
            epsilon: Some(1.0),
            bound: UpperBound::LipschitzHistogram,
        };
        let text = serde_json::to_string(&c).unwrap();
        assert!(text.contains("\"kind\":\"upper_bound\""));
        assert_eq!(serde_json::from_str::<CheckSpec>(&text).unwrap(), c);
        assert!((UpperBound::Multinomial { constant: 5.0 }.value(100_000, 1.0, 10) - 5e-4).abs() < 1e-15);
    }
}
