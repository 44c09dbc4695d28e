use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use lpme::bounds::{
    build_sign_packing, build_weighted_packing, fano_bound, info_bound_density, info_bound_multinomial,
    predict_rates, BumpFunction, DensityPacking, PackingOptions, Problem,
};
use lpme::channels::{audit_channel, default_audit_grid, ChannelConfig, Mechanism, DEFAULT_ENUMERATION_CAP};
use lpme::domain::{RngStream, THEOREM_EPSILON_MAX};
use lpme::harness::{emit_outputs, read_csv, run_sweep, slope_from_rows, summarize, ExperimentSpec, ProblemKind};

/// Locally private multinomial and density estimation: Monte Carlo sweeps,
/// privacy audits and lower-bound calculators.
#[derive(Debug, Parser)]
#[command(name = "lpme", version)]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Global {
    /// Override the seed of the config (or of packing construction).
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads for sweeps (0 = one per core).
    #[arg(long, global = true, default_value_t = 0)]
    workers: usize,
    /// Override the number of trials per grid cell.
    #[arg(long, global = true)]
    trials: Option<usize>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run a multinomial sweep from a JSON config.
    Multinomial(SweepArgs),
    /// Run a density sweep from a JSON config.
    Density(SweepArgs),
    /// Audit a channel's worst-case log-likelihood ratio.
    Audit {
        #[arg(long)]
        mechanism: Mechanism,
        #[arg(long)]
        epsilon: f64,
        #[arg(long)]
        dims: usize,
        /// Accepted |max log-ratio − ε| for exact audits, excess over ε for grid audits.
        #[arg(long, default_value_t = 1e-9)]
        tolerance: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Rate envelopes, a certified packing and the information bound.
    Bounds {
        #[arg(long, value_enum)]
        problem: BoundsProblem,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        epsilon: f64,
        /// Multinomial dimension.
        #[arg(long)]
        d: Option<usize>,
        /// Packing weight for the multinomial bound (default min(4, d)).
        #[arg(long)]
        s: Option<usize>,
        /// Perturbation size δ for the multinomial bound.
        #[arg(long, default_value_t = 1.0)]
        delta: f64,
        /// Density smoothness.
        #[arg(long)]
        beta: Option<u32>,
        /// Number of bumps in the density packing.
        #[arg(long)]
        k: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Fit the log-log slope of one mechanism in a results.csv.
    Slope {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        mechanism: String,
        /// Budget to select; omit for non-private baselines.
        #[arg(long)]
        epsilon: Option<f64>,
        /// With --tolerance, turn the fit into a pass/fail check.
        #[arg(long, allow_hyphen_values = true)]
        expected: Option<f64>,
        #[arg(long, requires = "expected")]
        tolerance: Option<f64>,
    },
}

#[derive(Debug, Args)]
struct SweepArgs {
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum BoundsProblem {
    Multinomial,
    Density,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

/// Runs one command; Ok(pass) decides the exit code.
fn run(cli: Cli) -> Result<bool> {
    let g = cli.global;
    match cli.command {
        Command::Multinomial(a) => sweep(ProblemKind::Multinomial, &a, &g),
        Command::Density(a) => sweep(ProblemKind::Density, &a, &g),
        Command::Audit {
            mechanism,
            epsilon,
            dims,
            tolerance,
            out,
        } => {
            let cfg = ChannelConfig::new(mechanism, epsilon, dims)?;
            let report = audit_channel(&cfg, &default_audit_grid(&cfg), tolerance, DEFAULT_ENUMERATION_CAP)?;
            println!(
                "audit {mechanism} eps={epsilon} dims={dims}: max log-ratio {:.12} ({}) {}",
                report.max_log_ratio,
                report.method,
                verdict(report.pass)
            );
            write_json(out.as_deref(), &serde_json::to_value(&report)?)?;
            Ok(report.pass)
        }
        Command::Bounds {
            problem,
            n,
            epsilon,
            d,
            s,
            delta,
            beta,
            k,
            out,
        } => {
            let mut rng = RngStream::new(g.seed.unwrap_or(0), 0);
            let opts = PackingOptions::default();
            let info_valid = epsilon <= THEOREM_EPSILON_MAX;
            let value = match problem {
                BoundsProblem::Multinomial => {
                    let d = d.context("--d is required for multinomial bounds")?;
                    let s = s.unwrap_or(d.min(4));
                    let packing = build_weighted_packing(d, s, &mut rng, &opts)?;
                    let info = info_valid
                        .then(|| info_bound_multinomial(n, epsilon, delta, s, &packing))
                        .transpose()?;
                    // Fano testing-error lower bound 1 − (I + log 2)/log|V|
                    let testing = info
                        .map(|i| fano_bound(1.0, i, packing.certified.log_cardinality))
                        .transpose()
                        .ok()
                        .flatten();
                    json!({
                        "problem": "multinomial",
                        "rates": predict_rates(Problem::Multinomial { d }, n, epsilon),
                        "packing": packing.summary(),
                        "delta": delta,
                        "information_bound": info,
                        "fano_testing_error": testing,
                        "note": information_note(info_valid),
                    })
                }
                BoundsProblem::Density => {
                    let beta = beta.context("--beta is required for density bounds")?;
                    let k = k.context("--k is required for density bounds")?;
                    let bump = BumpFunction::new(beta)?;
                    let packing = DensityPacking::new(beta, build_sign_packing(k, &mut rng, &opts)?)?;
                    let info = info_valid
                        .then(|| info_bound_density(n, epsilon, k, beta, &packing.packing, bump.c_half))
                        .transpose()?;
                    let m = packing.packing.len();
                    let min_pair = (0..m)
                        .flat_map(|a| (a + 1..m).map(move |b| (a, b)))
                        .map(|(a, b)| packing.pair_distance_sq(a, b))
                        .fold(f64::INFINITY, f64::min);
                    // squared-L² risk ≥ (min pair distance / 4)·(Fano testing error)
                    let risk = info
                        .map(|i| fano_bound(min_pair / 4.0, i, packing.packing.certified.log_cardinality))
                        .transpose()
                        .ok()
                        .flatten();
                    json!({
                        "problem": "density",
                        "rates": predict_rates(Problem::Density { beta }, n, epsilon),
                        "packing": packing.packing.summary(),
                        "c_half": bump.c_half,
                        "min_pair_distance_sq": min_pair,
                        "information_bound": info,
                        "fano_risk_lower_bound": risk,
                        "note": information_note(info_valid),
                    })
                }
            };
            println!("{}", serde_json::to_string_pretty(&value)?);
            write_json(out.as_deref(), &value)?;
            Ok(true)
        }
        Command::Slope {
            input,
            mechanism,
            epsilon,
            expected,
            tolerance,
        } => {
            let rows = read_csv(&input)?;
            let fit = slope_from_rows(&rows, &mechanism, epsilon)?;
            let pass = match (expected, tolerance) {
                (Some(e), Some(t)) => (fit.slope - e).abs() <= t,
                _ => true,
            };
            println!(
                "{mechanism}{}: slope {:.4} ± {:.4}, r² {:.4}, {} points{}",
                epsilon.map_or_else(String::new, |e| format!(" eps={e}")),
                fit.slope,
                fit.stderr,
                fit.r2,
                fit.points,
                match (expected, tolerance) {
                    (Some(e), Some(t)) => format!(" (expected {e} ± {t}: {})", verdict(pass)),
                    _ => String::new(),
                }
            );
            Ok(pass)
        }
    }
}

fn information_note(valid: bool) -> &'static str {
    if valid {
        "information bound uses the measured packing covariance in place of unstated constants"
    } else {
        "epsilon exceeds 0.25, where the variational information constant is not valid; information bound omitted"
    }
}

fn verdict(pass: bool) -> &'static str {
    if pass {
        "PASS"
    } else {
        "FAIL"
    }
}

fn write_json(path: Option<&Path>, value: &serde_json::Value) -> Result<()> {
    if let Some(p) = path {
        if let Some(parent) = p.parent().filter(|p| !p.as_os_str().is_empty()) {
            std::fs::create_dir_all(parent).with_context(|| format!("creating {}", parent.display()))?;
        }
        std::fs::write(p, serde_json::to_string_pretty(value)? + "\n")
            .with_context(|| format!("writing {}", p.display()))?;
    }
    Ok(())
}

fn sweep(problem: ProblemKind, args: &SweepArgs, g: &Global) -> Result<bool> {
    let mut spec = ExperimentSpec::load(&args.config)?;
    if spec.problem != problem {
        bail!(
            "{} describes a {} experiment; use `lpme {}`",
            args.config.display(),
            spec.problem,
            spec.problem
        );
    }
    if let Some(seed) = g.seed {
        spec.seed = seed;
    }
    if let Some(trials) = g.trials {
        spec.trials = trials;
    }
    spec.validate()?;
    let rows = run_sweep(&spec, g.workers)?;
    let mut command = format!(
        "lpme {problem} --config {} --out {}",
        args.config.display(),
        args.out.display()
    );
    if let Some(seed) = g.seed {
        command.push_str(&format!(" --seed {seed}"));
    }
    if let Some(trials) = g.trials {
        command.push_str(&format!(" --trials {trials}"));
    }
    let summary = summarize(&spec, &rows, &command);
    emit_outputs(&args.out, &rows, &summary)?;
    for c in &summary.checks {
        println!("{}: {} — {}", verdict(c.pass), c.name, c.detail);
    }
    println!(
        "{} rows written to {}; {}/{} checks pass",
        rows.len(),
        args.out.display(),
        summary.checks.iter().filter(|c| c.pass).count(),
        summary.checks.len()
    );
    Ok(summary.all_pass)
}
