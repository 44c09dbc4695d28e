use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::spec::{ExperimentSpec, ProblemKind};
use super::strategy::{find_strategy, Strategy, TrialContext};
use super::truth::PreparedTruth;
use crate::domain::RngStream;
use crate::error::{Error, Result};

/// Aggregated result of one grid cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub mechanism: String,
    pub problem: ProblemKind,
    pub n: usize,
    pub dims: usize,
    /// `None` for non-private baselines.
    pub epsilon: Option<f64>,
    /// `None` for multinomial rows.
    pub beta: Option<u32>,
    pub trials: usize,
    pub mse_mean: f64,
    /// Sample standard deviation / √trials (0 for a single trial).
    pub mse_stderr: f64,
    /// Total wall-clock milliseconds over the cell's trials; 0 unless timing
    /// was requested.
    pub wall_ms: f64,
}

/// One (strategy, ε, n) cell of the sweep.
#[derive(Clone, Copy)]
struct Cell {
    strategy: &'static dyn Strategy,
    epsilon: Option<f64>,
    n: usize,
}

/// Stream id of a replication, a pure function of (strategy, ε, n, trial)
/// so results do not depend on scheduling.
pub fn stream_id(strategy: &str, epsilon: Option<f64>, n: usize, trial: usize) -> u64 {
    // FNV-1a over the name, then SplitMix64 finalisation of each field
    let mut h = strategy
        .bytes()
        .fold(0xcbf2_9ce4_8422_2325u64, |h, b| (h ^ b as u64).wrapping_mul(0x0100_0000_01b3));
    for field in [epsilon.map_or(u64::MAX, f64::to_bits), n as u64, trial as u64] {
        h = splitmix64(h ^ field);
    }
    h
}

fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Runs every (strategy, ε, n) cell of `spec` for `spec.trials` independent
/// replications on a pool of `workers` threads (0 = rayon default).
///
/// Output is identical for any worker count: each replication owns a stream
/// derived from [`stream_id`] and replications are aggregated in grid order.
/// When a strategy yields several candidate dimensions, the candidate with the
/// smallest mean error is reported.
pub fn run_sweep(spec: &ExperimentSpec, workers: usize) -> Result<Vec<ResultRow>> {
    spec.validate()?;
    let truth = PreparedTruth::new(&spec.truth)?;
    let beta = match spec.problem {
        ProblemKind::Multinomial => None,
        ProblemKind::Density => spec.beta,
    };
    let mut cells = Vec::new();
    for name in &spec.mechanisms {
        let strategy = find_strategy(name)?;
        let (epsilons, grid): (Vec<Option<f64>>, &[usize]) = if strategy.is_private() {
            (spec.epsilon_grid.iter().copied().map(Some).collect(), &spec.n_grid)
        } else {
            (vec![None], spec.classical_grid())
        };
        for epsilon in epsilons {
            for &n in grid {
                cells.push(Cell { strategy, epsilon, n });
            }
        }
    }

    let contexts: Vec<TrialContext<'_>> = cells
        .iter()
        .map(|c| TrialContext {
            n: c.n,
            epsilon: c.epsilon,
            beta,
            truth: &truth,
            truncation: &spec.truncation,
        })
        .collect();
    let dims: Vec<Vec<usize>> = cells
        .iter()
        .zip(&contexts)
        .map(|(c, ctx)| c.strategy.dims_for(ctx))
        .collect::<Result<_>>()?;

    let jobs: Vec<(usize, usize)> = (0..cells.len())
        .flat_map(|c| (0..spec.trials).map(move |t| (c, t)))
        .collect();
    let run = |&(c, t): &(usize, usize)| -> Result<(Vec<f64>, f64)> {
        let cell = &cells[c];
        let mut rng = RngStream::new(spec.seed, stream_id(cell.strategy.name(), cell.epsilon, cell.n, t));
        let start = Instant::now();
        let errors = cell.strategy.run_trial(&contexts[c], &dims[c], &mut rng)?;
        Ok((errors, start.elapsed().as_secs_f64() * 1e3))
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::InvalidExperiment(format!("cannot start worker pool: {e}")))?;
    let outcomes: Vec<(Vec<f64>, f64)> = pool.install(|| jobs.par_iter().map(run).collect::<Result<_>>())?;

    let rows = cells
        .iter()
        .enumerate()
        .map(|(c, cell)| {
            let trials = &outcomes[c * spec.trials..(c + 1) * spec.trials];
            let candidates: Vec<(usize, f64, f64)> = dims[c]
                .iter()
                .enumerate()
                .map(|(i, &k)| {
                    let (mean, stderr) = mean_stderr(trials.iter().map(|(e, _)| e[i]));
                    (k, mean, stderr)
                })
                .collect();
            let &(k, mean, stderr) = candidates
                .iter()
                .min_by(|a, b| a.1.total_cmp(&b.1))
                .expect("at least one candidate");
            let wall_ms = if spec.record_timing {
                trials.iter().map(|(_, ms)| ms).sum()
            } else {
                0.0
            };
            ResultRow {
                mechanism: cell.strategy.name().to_string(),
                problem: spec.problem,
                n: cell.n,
                dims: k,
                epsilon: cell.epsilon,
                beta,
                trials: spec.trials,
                mse_mean: mean,
                mse_stderr: stderr,
                wall_ms,
            }
        })
        .collect();
    Ok(rows)
}

fn mean_stderr(values: impl Iterator<Item = f64> + Clone) -> (f64, f64) {
    let n = values.clone().count() as f64;
    let mean = values.clone().sum::<f64>() / n;
    if n < 2.0 {
        return (mean, 0.0);
    }
    let var = values.map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}
