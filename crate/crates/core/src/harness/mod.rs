//! Monte Carlo experiment engine: JSON experiment specs, a registry of
//! estimation strategies, seeded parallel sweeps, log-log slope fits and the
//! results.csv / summary.json / plot.gp outputs.

mod fit;
mod report;
mod spec;
mod strategy;
mod sweep;
mod truth;

pub use fit::{fit_loglog_slope, fit_rows, SlopeFit, MIN_FIT_POINTS, MIN_FIT_SPAN};
pub use report::{
    effective_sample_size_report, emit_outputs, evaluate_checks, expected_exponent, fit_all, parse_csv,
    plot_script, predictions, read_csv, slope_from_rows, summarize, write_csv, Check, EffectiveSampleSize,
    FitRecord, PredictionRecord, Summary, CSV_HEADER,
};
pub use spec::{CheckSpec, ExperimentSpec, ProblemKind, TruncationRule, UpperBound, MIN_TRIALS_FOR_FIT};
pub use strategy::{find_strategy, registry, Strategy, TrialContext, NAIVE_SCAN_MAX};
pub use sweep::{run_sweep, stream_id, ResultRow};
pub use truth::{multinomial_counts, DensityName, PreparedTruth, TestDensity, TruthSpec, INVERSE_CDF_CELLS};
