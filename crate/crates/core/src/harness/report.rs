use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::fit::{fit_loglog_slope, fit_rows, select, SlopeFit};
use super::spec::{CheckSpec, ExperimentSpec, ProblemKind};
use super::strategy::find_strategy;
use super::sweep::ResultRow;
use crate::bounds::{predict_rates, Problem};
use crate::error::{Error, Result};

/// Column order of results.csv.
pub const CSV_HEADER: [&str; 10] = [
    "mechanism",
    "problem",
    "n",
    "dims",
    "epsilon",
    "beta",
    "trials",
    "mse_mean",
    "mse_stderr",
    "wall_ms",
];

/// Slope fit of one (mechanism, ε) series, with the exponent the theory predicts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitRecord {
    pub mechanism: String,
    pub epsilon: Option<f64>,
    pub expected_exponent: Option<f64>,
    #[serde(flatten)]
    pub fit: SlopeFit,
}

/// A measured private row next to the unit-constant rate envelopes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PredictionRecord {
    pub mechanism: String,
    pub n: usize,
    pub epsilon: f64,
    pub mse_mean: f64,
    pub private_lower: f64,
    pub private_upper: f64,
    pub classical: f64,
    pub naive: Option<f64>,
}

/// The n′ at which the classical baseline matches a private row's error.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EffectiveSampleSize {
    pub mechanism: String,
    pub epsilon: f64,
    pub dims: usize,
    pub n: usize,
    pub private_mse: f64,
    pub n_prime: f64,
    /// n′/n.
    pub ratio: f64,
    /// ε²/d, the predicted proportionality (constant not pinned).
    pub predicted: f64,
}

/// Outcome of one configured check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub expected_exponent: Option<f64>,
    pub measured: Option<f64>,
    pub tolerance: Option<f64>,
    pub pass: bool,
    pub detail: String,
    /// CLI invocation that reproduces the check.
    pub command: String,
}

/// Everything written to summary.json.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub spec: ExperimentSpec,
    pub fits: Vec<FitRecord>,
    pub predictions: Vec<PredictionRecord>,
    pub effective_sample_size: Vec<EffectiveSampleSize>,
    pub checks: Vec<Check>,
    pub all_pass: bool,
}

/// The rate exponent theory predicts for a strategy's error curve.
pub fn expected_exponent(mechanism: &str, problem: ProblemKind, beta: Option<u32>) -> Option<f64> {
    let strategy = find_strategy(mechanism).ok()?;
    match problem {
        ProblemKind::Multinomial => Some(-1.0),
        ProblemKind::Density => {
            // piecewise-constant estimators cannot exploit smoothness beyond β = 1
            let b = if mechanism.contains("histogram") {
                1.0
            } else {
                f64::from(beta?)
            };
            let offset = match (strategy.is_private(), mechanism) {
                (_, "naive_laplace_series") => 3.0,
                (true, _) => 2.0,
                (false, _) => 1.0,
            };
            Some(-2.0 * b / (2.0 * b + offset))
        }
    }
}

/// Fits every (mechanism, ε) series that meets the fit preconditions.
pub fn fit_all(rows: &[ResultRow]) -> Vec<FitRecord> {
    let mut keys: Vec<(String, Option<f64>)> = Vec::new();
    for r in rows {
        if !keys.iter().any(|(m, e)| *m == r.mechanism && *e == r.epsilon) {
            keys.push((r.mechanism.clone(), r.epsilon));
        }
    }
    keys.into_iter()
        .filter_map(|(mechanism, epsilon)| {
            let fit = fit_rows(rows, &mechanism, epsilon, 0).ok()?;
            let first = select(rows, &mechanism, epsilon).next()?;
            Some(FitRecord {
                expected_exponent: expected_exponent(&mechanism, first.problem, first.beta),
                mechanism,
                epsilon,
                fit,
            })
        })
        .collect()
}

fn rate_problem(row: &ResultRow) -> Option<Problem> {
    match row.problem {
        ProblemKind::Multinomial => Some(Problem::Multinomial { d: row.dims }),
        ProblemKind::Density => row.beta.map(|beta| Problem::Density { beta }),
    }
}

/// predict_rates at every private row.
pub fn predictions(rows: &[ResultRow]) -> Vec<PredictionRecord> {
    rows.iter()
        .filter_map(|r| {
            let eps = r.epsilon?;
            let p = predict_rates(rate_problem(r)?, r.n, eps);
            Some(PredictionRecord {
                mechanism: r.mechanism.clone(),
                n: r.n,
                epsilon: eps,
                mse_mean: r.mse_mean,
                private_lower: p.private_lower,
                private_upper: p.private_upper,
                classical: p.classical,
                naive: p.naive,
            })
        })
        .collect()
}

/// For each private row, the classical sample size n′ with the same error,
/// by log-log interpolation of the classical curve. Private rows whose error
/// lies outside the classical range are skipped; if none overlaps the result
/// is an error.
pub fn effective_sample_size_report(
    private_rows: &[ResultRow],
    classical_rows: &[ResultRow],
) -> Result<Vec<EffectiveSampleSize>> {
    let mut curve: Vec<(f64, f64)> = classical_rows
        .iter()
        .filter(|r| r.mse_mean > 0.0)
        .map(|r| ((r.n as f64).ln(), r.mse_mean.ln()))
        .collect();
    curve.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut out = Vec::new();
    for r in private_rows {
        if r.mse_mean <= 0.0 {
            continue;
        }
        let target = r.mse_mean.ln();
        let hit = curve.windows(2).find_map(|w| {
            let (lo, hi) = (w[0].1.min(w[1].1), w[0].1.max(w[1].1));
            if target < lo || target > hi {
                return None;
            }
            let t = if w[1].1 == w[0].1 {
                0.0
            } else {
                (target - w[0].1) / (w[1].1 - w[0].1)
            };
            Some((w[0].0 + t * (w[1].0 - w[0].0)).exp())
        });
        let Some(n_prime) = hit else {
            log::debug!(
                "{} at n = {}: mse {} outside the classical range",
                r.mechanism,
                r.n,
                r.mse_mean
            );
            continue;
        };
        let eps = r.epsilon.unwrap_or(f64::INFINITY);
        out.push(EffectiveSampleSize {
            mechanism: r.mechanism.clone(),
            epsilon: eps,
            dims: r.dims,
            n: r.n,
            private_mse: r.mse_mean,
            n_prime,
            ratio: n_prime / r.n as f64,
            predicted: eps * eps / r.dims as f64,
        });
    }
    if out.is_empty() {
        return Err(Error::InsufficientData(
            "private and classical MSE ranges do not overlap".into(),
        ));
    }
    Ok(out)
}

fn geometric_mean(values: impl Iterator<Item = f64>) -> Option<f64> {
    let (sum, count) = values.fold((0.0, 0usize), |(s, c), v| (s + v.ln(), c + 1));
    (count > 0).then(|| (sum / count as f64).exp())
}

fn fmt_eps(epsilon: Option<f64>) -> String {
    epsilon.map_or_else(String::new, |e| format!(" eps={e}"))
}

fn failed(name: String, detail: String, command: &str) -> Check {
    Check {
        name,
        expected_exponent: None,
        measured: None,
        tolerance: None,
        pass: false,
        detail,
        command: command.to_string(),
    }
}

/// Evaluates every configured check on the sweep rows. `command` is the CLI
/// invocation recorded in each check.
pub fn evaluate_checks(spec: &ExperimentSpec, rows: &[ResultRow], command: &str) -> Vec<Check> {
    spec.checks
        .iter()
        .map(|c| evaluate_check(c, rows, command))
        .collect()
}

fn evaluate_check(check: &CheckSpec, rows: &[ResultRow], command: &str) -> Check {
    match check {
        CheckSpec::Slope {
            mechanism,
            epsilon,
            expected_exponent,
            tolerance,
            min_n,
        } => {
            let name = format!("slope {mechanism}{}", fmt_eps(*epsilon));
            match fit_rows(rows, mechanism, *epsilon, min_n.unwrap_or(0)) {
                Ok(fit) => Check {
                    pass: (fit.slope - expected_exponent).abs() <= *tolerance,
                    detail: format!("slope {:.4} ± {:.4} (r² {:.4})", fit.slope, fit.stderr, fit.r2),
                    name,
                    expected_exponent: Some(*expected_exponent),
                    measured: Some(fit.slope),
                    tolerance: Some(*tolerance),
                    command: command.to_string(),
                },
                Err(e) => failed(name, e.to_string(), command),
            }
        }
        CheckSpec::SlopeAtLeast {
            mechanism,
            epsilon,
            minimum,
        } => {
            let name = format!("slope {mechanism}{} >= {minimum}", fmt_eps(*epsilon));
            match fit_rows(rows, mechanism, *epsilon, 0) {
                Ok(fit) => Check {
                    pass: fit.slope >= *minimum,
                    detail: format!("one-sided: slope {:.4} ± {:.4}", fit.slope, fit.stderr),
                    name,
                    expected_exponent: Some(*minimum),
                    measured: Some(fit.slope),
                    tolerance: None,
                    command: command.to_string(),
                },
                Err(e) => failed(name, e.to_string(), command),
            }
        }
        CheckSpec::UpperBound {
            mechanism,
            epsilon,
            bound,
        } => {
            let name = format!("upper bound {mechanism}{}", fmt_eps(*epsilon));
            let worst = select(rows, mechanism, *epsilon)
                .filter_map(|r| Some((r.n, r.epsilon?, r.mse_mean / bound.value(r.n, r.epsilon?, r.dims))))
                .max_by(|a, b| a.2.total_cmp(&b.2));
            match worst {
                Some((n, eps, ratio)) => Check {
                    pass: ratio <= 1.0,
                    detail: format!("max mse/bound = {ratio:.4} at n = {n}, eps = {eps}"),
                    name,
                    expected_exponent: None,
                    measured: Some(ratio),
                    tolerance: Some(1.0),
                    command: command.to_string(),
                },
                None => failed(name, "no private rows".into(), command),
            }
        }
        CheckSpec::Ordering {
            worse,
            better,
            epsilon,
            min_n,
        } => {
            let name = format!("{worse} worse than {better}{} for n >= {min_n}", fmt_eps(*epsilon));
            let ratios: Vec<(usize, f64)> = select(rows, worse, *epsilon)
                .filter(|r| r.n >= *min_n)
                .filter_map(|w| {
                    // a non-private baseline has no ε and matches every budget
                    let b = select(rows, better, None)
                        .find(|b| b.n == w.n && (b.epsilon.is_none() || b.epsilon == w.epsilon))?;
                    Some((w.n, w.mse_mean / b.mse_mean))
                })
                .collect();
            match ratios.iter().copied().min_by(|a, b| a.1.total_cmp(&b.1)) {
                Some((n, ratio)) => Check {
                    pass: ratio > 1.0,
                    detail: format!("min mse ratio {ratio:.4} at n = {n} over {} grid points", ratios.len()),
                    name,
                    expected_exponent: None,
                    measured: Some(ratio),
                    tolerance: None,
                    command: command.to_string(),
                },
                None => failed(name, "no matching rows".into(), command),
            }
        }
        CheckSpec::EffectiveSampleSize {
            private,
            classical,
            epsilon_low,
            epsilon_high,
            factor,
        } => {
            let name = format!("effective sample size {private} eps {epsilon_low}->{epsilon_high}");
            let baseline: Vec<ResultRow> = select(rows, classical, None).cloned().collect();
            let at = |eps: f64| -> Option<f64> {
                let private_rows: Vec<ResultRow> = select(rows, private, Some(eps)).cloned().collect();
                let table = effective_sample_size_report(&private_rows, &baseline).ok()?;
                geometric_mean(table.iter().map(|e| e.ratio))
            };
            match (at(*epsilon_low), at(*epsilon_high)) {
                (Some(lo), Some(hi)) => {
                    let expected = (epsilon_high / epsilon_low).powi(2);
                    let measured = hi / lo;
                    Check {
                        pass: measured >= expected / factor && measured <= expected * factor,
                        detail: format!(
                            "geometric-mean n'/n: {lo:.4e} at eps {epsilon_low}, {hi:.4e} at eps {epsilon_high}; \
                             expected change x{expected}, measured x{measured:.4}"
                        ),
                        name,
                        expected_exponent: Some(2.0),
                        measured: Some(measured.ln() / (epsilon_high / epsilon_low).ln()),
                        tolerance: Some(factor.ln() / (epsilon_high / epsilon_low).ln()),
                        command: command.to_string(),
                    }
                }
                _ => failed(name, "private and classical MSE ranges do not overlap".into(), command),
            }
        }
        CheckSpec::LowerBoundDominance { sigmas } => {
            let name = "private lower rate below measured error".to_string();
            let worst = rows
                .iter()
                .filter_map(|r| {
                    let eps = r.epsilon?;
                    let lower = predict_rates(rate_problem(r)?, r.n, eps).private_lower;
                    Some((r, lower / (r.mse_mean + sigmas * r.mse_stderr)))
                })
                .max_by(|a, b| a.1.total_cmp(&b.1));
            match worst {
                Some((r, ratio)) => Check {
                    pass: ratio <= 1.0,
                    detail: format!(
                        "max lower/(mse + {sigmas} se) = {ratio:.4} ({} n = {} eps = {:?})",
                        r.mechanism, r.n, r.epsilon
                    ),
                    name,
                    expected_exponent: None,
                    measured: Some(ratio),
                    tolerance: Some(1.0),
                    command: command.to_string(),
                },
                None => failed(name, "no private rows".into(), command),
            }
        }
    }
}

/// Builds the summary: fits, rate predictions, effective sample sizes (for
/// multinomial sweeps with a non-private baseline) and checks.
pub fn summarize(spec: &ExperimentSpec, rows: &[ResultRow], command: &str) -> Summary {
    let mut ess = Vec::new();
    if spec.problem == ProblemKind::Multinomial {
        let baseline: Vec<ResultRow> = rows.iter().filter(|r| r.epsilon.is_none()).cloned().collect();
        let private: Vec<ResultRow> = rows.iter().filter(|r| r.epsilon.is_some()).cloned().collect();
        if !baseline.is_empty() && !private.is_empty() {
            ess = effective_sample_size_report(&private, &baseline).unwrap_or_default();
        }
    }
    let checks = evaluate_checks(spec, rows, command);
    Summary {
        spec: spec.clone(),
        fits: fit_all(rows),
        predictions: predictions(rows),
        effective_sample_size: ess,
        all_pass: checks.iter().all(|c| c.pass),
        checks,
    }
}

fn io_error(path: &Path) -> impl FnOnce(std::io::Error) -> Error + '_ {
    move |source| Error::Io {
        path: path.display().to_string(),
        source,
    }
}

fn csv_error(path: &Path, e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(source) => Error::Io {
            path: path.display().to_string(),
            source,
        },
        other => Error::CsvParse {
            line: 0,
            detail: format!("{other:?}"),
        },
    }
}

/// `{:.16e}`: 17 significant digits, enough to round-trip every f64.
fn float(v: f64) -> String {
    format!("{v:.16e}")
}

/// Writes rows in the results.csv format.
pub fn write_csv(path: &Path, rows: &[ResultRow]) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| csv_error(path, e))?;
    w.write_record(CSV_HEADER).map_err(|e| csv_error(path, e))?;
    for r in rows {
        w.write_record([
            r.mechanism.clone(),
            r.problem.to_string(),
            r.n.to_string(),
            r.dims.to_string(),
            r.epsilon.map(float).unwrap_or_default(),
            r.beta.map(|b| b.to_string()).unwrap_or_default(),
            r.trials.to_string(),
            float(r.mse_mean),
            float(r.mse_stderr),
            float(r.wall_ms),
        ])
        .map_err(|e| csv_error(path, e))?;
    }
    w.flush().map_err(io_error(path))
}

/// Parses results.csv text back into rows.
pub fn parse_csv(text: &str) -> Result<Vec<ResultRow>> {
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    let header = reader.headers().map_err(|e| Error::CsvParse {
        line: 1,
        detail: e.to_string(),
    })?;
    if header.iter().ne(CSV_HEADER) {
        return Err(Error::CsvParse {
            line: 1,
            detail: format!("expected header {}", CSV_HEADER.join(",")),
        });
    }
    reader
        .records()
        .enumerate()
        .map(|(i, rec)| {
            let line = i + 2;
            let rec = rec.map_err(|e| Error::CsvParse {
                line,
                detail: e.to_string(),
            })?;
            let bad = |field: &str, e: &dyn std::fmt::Display| Error::CsvParse {
                line,
                detail: format!("{field}: {e}"),
            };
            macro_rules! num {
                ($idx:expr, $t:ty) => {
                    rec[$idx].parse::<$t>().map_err(|e| bad(CSV_HEADER[$idx], &e))?
                };
            }
            macro_rules! opt {
                ($idx:expr, $t:ty) => {
                    if rec[$idx].is_empty() {
                        None
                    } else {
                        Some(num!($idx, $t))
                    }
                };
            }
            if rec.len() != CSV_HEADER.len() {
                return Err(bad("record", &format!("{} fields", rec.len())));
            }
            Ok(ResultRow {
                mechanism: rec[0].to_string(),
                problem: rec[1].parse().map_err(|e: Error| bad("problem", &e))?,
                n: num!(2, usize),
                dims: num!(3, usize),
                epsilon: opt!(4, f64),
                beta: opt!(5, u32),
                trials: num!(6, usize),
                mse_mean: num!(7, f64),
                mse_stderr: num!(8, f64),
                wall_ms: num!(9, f64),
            })
        })
        .collect()
}

pub fn read_csv(path: &Path) -> Result<Vec<ResultRow>> {
    parse_csv(&fs::read_to_string(path).map_err(io_error(path))?)
}

/// A gnuplot script drawing one log-log curve per (mechanism, ε) from
/// results.csv in the same directory.
pub fn plot_script(rows: &[ResultRow]) -> String {
    let mut keys: Vec<(String, Option<f64>)> = Vec::new();
    for r in rows {
        if !keys.iter().any(|(m, e)| *m == r.mechanism && *e == r.epsilon) {
            keys.push((r.mechanism.clone(), r.epsilon));
        }
    }
    let mut s = String::new();
    s.push_str("set datafile separator ','\n");
    s.push_str("set terminal pngcairo size 1000,700\n");
    s.push_str("set output 'plot.png'\n");
    s.push_str("set logscale xy\n");
    s.push_str("set xlabel 'n'\nset ylabel 'mean squared error'\nset key outside right\n");
    let curves: Vec<String> = keys
        .iter()
        .map(|(m, e)| {
            let filter = match e {
                Some(eps) => format!("strcol(1) eq '{m}' && strcol(5) ne '' && abs($5 - {eps:?}) < 1e-12"),
                None => format!("strcol(1) eq '{m}' && strcol(5) eq ''"),
            };
            let title = match e {
                Some(eps) => format!("{m} eps={eps}"),
                None => m.clone(),
            };
            format!("'results.csv' using ({filter} ? $3 : NaN):8 with linespoints title '{title}'")
        })
        .collect();
    let _ = writeln!(s, "plot {}", curves.join(", \\\n     "));
    s
}

/// Writes results.csv, summary.json and plot.gp into `dir` (created if needed).
pub fn emit_outputs(dir: &Path, rows: &[ResultRow], summary: &Summary) -> Result<()> {
    if rows.is_empty() {
        return Err(Error::InvalidExperiment("no rows to write".into()));
    }
    fs::create_dir_all(dir).map_err(io_error(dir))?;
    write_csv(&dir.join("results.csv"), rows)?;
    let json = dir.join("summary.json");
    fs::write(&json, serde_json::to_string_pretty(summary)? + "\n").map_err(io_error(&json))?;
    let plot = dir.join("plot.gp");
    fs::write(&plot, plot_script(rows)).map_err(io_error(&plot))
}

/// Fits (n, mse) pairs of one mechanism/ε read from results.csv.
pub fn slope_from_rows(rows: &[ResultRow], mechanism: &str, epsilon: Option<f64>) -> Result<SlopeFit> {
    let points: Vec<(f64, f64)> = select(rows, mechanism, epsilon)
        .map(|r| (r.n as f64, r.mse_mean))
        .collect();
    if points.is_empty() {
        return Err(Error::InsufficientData(format!(
            "no rows for {mechanism}{}",
            fmt_eps(epsilon)
        )));
    }
    fit_loglog_slope(&points)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::truth::TruthSpec;

    fn row(mechanism: &str, n: usize, epsilon: Option<f64>, mse: f64) -> ResultRow {
        ResultRow {
            mechanism: mechanism.into(),
            problem: ProblemKind::Multinomial,
            n,
            dims: 10,
            epsilon,
            beta: None,
            trials: 100,
            mse_mean: mse,
            mse_stderr: mse / 10.0,
            wall_ms: 0.0,
        }
    }

    fn spec() -> ExperimentSpec {
        ExperimentSpec {
            problem: ProblemKind::Multinomial,
            mechanisms: vec!["randomized_response".into(), "mle_multinomial".into()],
            n_grid: vec![1 << 10, 1 << 12],
            epsilon_grid: vec![1.0],
            classical_n_grid: None,
            d: Some(2),
            beta: None,
            truncation: Default::default(),
            trials: 30,
            seed: 1,
            truth: TruthSpec::Simplex(vec![0.5, 0.5]),
            record_timing: false,
            checks: vec![],
        }
    }

    #[test]
    fn csv_round_trip_is_bitwise() {
        let mut rows = vec![
            row("randomized_response", 1024, Some(0.1 + 0.2), 1.0 / 3.0),
            row("mle_multinomial", 7, None, f64::MIN_POSITIVE),
        ];
        rows[1].problem = ProblemKind::Density;
        rows[1].beta = Some(2);
        rows[0].wall_ms = 12.345678901234567;
        rows[0].mse_stderr = std::f64::consts::PI * 1e-300;
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("r.csv");
        write_csv(&path, &rows).unwrap();
        let back = read_csv(&path).unwrap();
        assert_eq!(back.len(), 2);
        for (a, b) in rows.iter().zip(&back) {
            assert_eq!(a, b);
            assert_eq!(a.mse_mean.to_bits(), b.mse_mean.to_bits());
            assert_eq!(a.epsilon.map(f64::to_bits), b.epsilon.map(f64::to_bits));
        }
        let text = fs::read_to_string(&path).unwrap();
        assert!(text.starts_with("mechanism,problem,n,dims,epsilon,beta,trials,mse_mean,mse_stderr,wall_ms\n"));
        assert!(text.contains("mle_multinomial,density,7,10,,2,100,"));
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        let text = "mechanism,problem,n,dims,epsilon,beta,trials,mse_mean,mse_stderr,wall_ms\n\
                    x,multinomial,10,2,,,30,0.1,0.01,0\n\
                    x,multinomial,ten,2,,,30,0.1,0.01,0\n";
        match parse_csv(text) {
            Err(Error::CsvParse { line, .. }) => assert_eq!(line, 3),
            other => panic!("{other:?}"),
        }
        assert!(parse_csv("a,b\n").is_err());
    }

    #[test]
    fn identical_inputs_give_unit_ratio() {
        let classical: Vec<_> = (0..6).map(|i| row("mle_multinomial", 10 << i, None, 1.0 / (10 << i) as f64)).collect();
        let private: Vec<_> = classical
            .iter()
            .map(|r| ResultRow {
                mechanism: "randomized_response".into(),
                epsilon: Some(1.0),
                ..r.clone()
            })
            .collect();
        let table = effective_sample_size_report(&private, &classical).unwrap();
        assert_eq!(table.len(), 6);
        assert!(table.iter().all(|e| (e.ratio - 1.0).abs() < 1e-12));
    }

    #[test]
    fn effective_sample_size_interpolates_and_rejects_disjoint_ranges() {
        let classical: Vec<_> = (0..10).map(|i| row("mle_multinomial", 1 << i, None, 1.0 / (1u64 << i) as f64)).collect();
        // private mse = d/(nε²) with d=10, ε=1 → n' = n/10
        let private = vec![row("randomized_response", 1000, Some(1.0), 0.01)];
        let table = effective_sample_size_report(&private, &classical).unwrap();
        assert!((table[0].ratio - 0.1).abs() < 1e-12);
        assert!((table[0].predicted - 0.1).abs() < 1e-15);
        let far = vec![row("randomized_response", 1000, Some(1.0), 1e-9)];
        assert!(matches!(
            effective_sample_size_report(&far, &classical),
            Err(Error::InsufficientData(_))
        ));
    }

    #[test]
    fn checks_report_schema_and_outcomes() {
        let mut rows: Vec<_> = (10..=18)
            .map(|e| row("randomized_response", 1 << e, Some(1.0), 20.0 / (1u64 << e) as f64))
            .collect();
        rows.extend((0..=18).map(|e| row("mle_multinomial", 1 << e, None, 0.5 / (1u64 << e) as f64)));
        rows.extend((10..=18).map(|e| row("randomized_response", 1 << e, Some(0.5), 80.0 / (1u64 << e) as f64)));
        let mut s = spec();
        s.checks = vec![
            CheckSpec::Slope {
                mechanism: "randomized_response".into(),
                epsilon: Some(1.0),
                expected_exponent: -1.0,
                tolerance: 0.1,
                min_n: None,
            },
            CheckSpec::UpperBound {
                mechanism: "randomized_response".into(),
                epsilon: None,
                bound: crate::harness::spec::UpperBound::Multinomial { constant: 5.0 },
            },
            CheckSpec::EffectiveSampleSize {
                private: "randomized_response".into(),
                classical: "mle_multinomial".into(),
                epsilon_low: 0.5,
                epsilon_high: 1.0,
                factor: 2.0,
            },
            CheckSpec::Ordering {
                worse: "randomized_response".into(),
                better: "mle_multinomial".into(),
                epsilon: Some(1.0),
                min_n: 1 << 12,
            },
            CheckSpec::LowerBoundDominance { sigmas: 3.0 },
        ];
        let summary = summarize(&s, &rows, "lpme multinomial --config c.json --out o");
        assert_eq!(summary.checks.len(), 5);
        assert!(summary.all_pass, "{:#?}", summary.checks);
        let slope = &summary.checks[0];
        assert_eq!(slope.expected_exponent, Some(-1.0));
        assert!((slope.measured.unwrap() + 1.0).abs() < 1e-12);
        assert!((summary.checks[2].measured.unwrap() - 2.0).abs() < 1e-9);
        assert_eq!(summary.fits.len(), 3);
        assert!(!summary.effective_sample_size.is_empty());
        let json = serde_json::to_value(&summary).unwrap();
        for key in ["expected_exponent", "measured", "tolerance", "pass", "command"] {
            assert!(json["checks"][0].get(key).is_some(), "{key}");
        }
    }

    #[test]
    fn empty_fit_list_and_outputs() {
        let s = spec();
        let rows = vec![row("randomized_response", 1024, Some(1.0), 0.01)];
        let summary = summarize(&s, &rows, "cmd");
        assert!(summary.fits.is_empty());
        let dir = tempfile::tempdir().unwrap();
        emit_outputs(dir.path(), &rows, &summary).unwrap();
        let json: serde_json::Value =
            serde_json::from_str(&fs::read_to_string(dir.path().join("summary.json")).unwrap()).unwrap();
        assert_eq!(json["fits"], serde_json::json!([]));
        let gp = fs::read_to_string(dir.path().join("plot.gp")).unwrap();
        assert!(gp.contains("set datafile separator ','"));
        assert!(gp.contains("randomized_response eps=1"));
        assert!(emit_outputs(dir.path(), &[], &summary).is_err());
    }

    #[test]
    fn expected_exponents() {
        assert_eq!(expected_exponent("randomized_response", ProblemKind::Multinomial, None), Some(-1.0));
        assert_eq!(expected_exponent("laplace_histogram", ProblemKind::Density, Some(1)), Some(-0.5));
        assert_eq!(expected_exponent("classical_histogram", ProblemKind::Density, Some(2)), Some(-2.0 / 3.0));
        assert_eq!(expected_exponent("halfspace_series", ProblemKind::Density, Some(2)), Some(-2.0 / 3.0));
        assert_eq!(expected_exponent("classical_series", ProblemKind::Density, Some(2)), Some(-0.8));
        assert_eq!(expected_exponent("naive_laplace_series", ProblemKind::Density, Some(2)), Some(-4.0 / 7.0));
    }
}
