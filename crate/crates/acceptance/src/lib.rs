//! Shared plumbing for the acceptance binary: criterion bookkeeping and the
//! location of the experiment configs.

use std::path::PathBuf;
use std::time::{Duration, Instant};

use lpme::harness::{run_sweep, summarize, ExperimentSpec, ResultRow, Summary};

/// Accumulates the sub-checks of one numbered criterion.
#[derive(Debug)]
pub struct Criterion {
    pub number: u32,
    pub title: &'static str,
    pub lines: Vec<(bool, String)>,
    started: Instant,
}

impl Criterion {
    pub fn new(number: u32, title: &'static str) -> Self {
        Self {
            number,
            title,
            lines: Vec::new(),
            started: Instant::now(),
        }
    }

    pub fn check(&mut self, pass: bool, detail: impl Into<String>) {
        self.lines.push((pass, detail.into()));
    }

    /// Adds the runtime budget as a sub-check.
    pub fn within(&mut self, budget: Duration) {
        self.within_since(self.started, budget);
    }

    pub fn within_since(&mut self, start: Instant, budget: Duration) {
        let took = start.elapsed();
        self.check(
            took <= budget,
            format!("runtime {:.1} s (budget {} s)", took.as_secs_f64(), budget.as_secs()),
        );
    }

    pub fn pass(&self) -> bool {
        !self.lines.is_empty() && self.lines.iter().all(|(p, _)| *p)
    }

    /// Prints the criterion line followed by one indented line per sub-check.
    pub fn report(&self) -> bool {
        let pass = self.pass();
        println!(
            "criterion {}: {} — {}",
            self.number,
            if pass { "PASS" } else { "FAIL" },
            self.title
        );
        for (p, line) in &self.lines {
            println!("    [{}] {line}", if *p { "ok" } else { "FAIL" });
        }
        pass
    }
}

/// Path of a file under the workspace `configs/` directory.
pub fn config_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../configs").join(name)
}

/// A sweep together with its evaluated checks and runtime.
pub struct SweepRun {
    pub spec: ExperimentSpec,
    pub rows: Vec<ResultRow>,
    pub summary: Summary,
    pub elapsed: Duration,
}

/// Runs the sweep described by `configs/<name>` on every available core.
pub fn run_config(name: &str, problem: &str) -> lpme::Result<SweepRun> {
    let path = config_path(name);
    let spec = ExperimentSpec::load(&path)?;
    let start = Instant::now();
    let rows = run_sweep(&spec, 0)?;
    let elapsed = start.elapsed();
    let command = format!("lpme {problem} --config configs/{name} --out out/{}", name.trim_end_matches(".json"));
    let summary = summarize(&spec, &rows, &command);
    Ok(SweepRun {
        spec,
        rows,
        summary,
        elapsed,
    })
}

impl SweepRun {
    /// Copies the harness checks whose name starts with one of `prefixes`.
    pub fn checks_into(&self, c: &mut Criterion, prefixes: &[&str]) {
        for check in &self.summary.checks {
            if prefixes.iter().any(|p| check.name.starts_with(p)) {
                c.check(check.pass, format!("{}: {} [{}]", check.name, check.detail, check.command));
            }
        }
    }
}
