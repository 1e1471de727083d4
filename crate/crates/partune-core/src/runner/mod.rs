//! Execution of single target-algorithm runs under wall-clock and memory
//! limits, result interpretation, verification, and failure penalization.
//!
//! Target misbehaviour of every kind (crashes, limit violations, wrong
//! answers, garbage output) is mapped to a [`RunOutcome`] status and
//! penalized; only framework-internal failures (e.g. a missing wrapper
//! binary) are raised as errors.

mod pool;
mod process;
pub mod wire;

pub use pool::{CancelToken, JobId, WorkerPool};

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::paramspace::Configuration;
use crate::scenario::{ExpectedStatus, Scenario, TargetSpec};
use crate::synthetic;

/// Seconds of slack between the cutoff (SIGTERM) and the hard kill, letting
/// well-behaved wrappers self-report at the boundary.
pub const ENFORCEMENT_GRACE: f64 = 2.0;

/// Result status of one target-algorithm run.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RunStatus {
    Sat,
    Unsat,
    Success,
    Timeout,
    Crashed,
    Memout,
    WrongAnswer,
}

impl RunStatus {
    /// Whether the run counts as having solved its instance.
    pub fn solved(self) -> bool {
        matches!(self, RunStatus::Sat | RunStatus::Unsat | RunStatus::Success)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            RunStatus::Sat => "SAT",
            RunStatus::Unsat => "UNSAT",
            RunStatus::Success => "SUCCESS",
            RunStatus::Timeout => "TIMEOUT",
            RunStatus::Crashed => "CRASHED",
            RunStatus::Memout => "MEMOUT",
            RunStatus::WrongAnswer => "WRONG_ANSWER",
        }
    }
}

/// Outcome of one run: status, measured runtime, and whether the run was
/// terminated below the scenario cutoff (a right-censored observation).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunOutcome {
    pub status: RunStatus,
    pub runtime: f64,
    /// True iff the run timed out at a cutoff below the scenario's
    /// `kappa_max`; its cost is then only a lower bound.
    pub capped: bool,
}

impl RunOutcome {
    pub fn solved(&self) -> bool {
        self.status.solved()
    }
}

/// One requested target execution.
#[derive(Clone, Debug)]
pub struct RunSpec {
    pub config: Configuration,
    pub instance: String,
    pub seed: u64,
    /// Per-run cutoff, at most the scenario's `kappa_max`.
    pub cutoff: f64,
    pub memory_limit_mb: u64,
}

impl RunSpec {
    pub fn new(scenario: &Scenario, config: Configuration, instance: String, seed: u64) -> Self {
        RunSpec {
            config,
            instance,
            seed,
            cutoff: scenario.cutoff_seconds,
            memory_limit_mb: scenario.memory_limit_mb,
        }
    }

    pub fn with_cutoff(mut self, cutoff: f64) -> Self {
        self.cutoff = cutoff.min(self.cutoff);
        self
    }
}

/// Penalized cost of an outcome under PAR-k at cutoff `kappa_max`.
///
/// Solved runs cost their measured runtime. Timeouts at the full cutoff,
/// crashes, memouts, and wrong answers all cost `k * kappa_max`. A timeout
/// under a reduced cutoff costs its observed bound (a lower bound on the
/// true cost, consumed only by capping-aware comparisons).
pub fn penalized_cost(outcome: &RunOutcome, kappa_max: f64, k: u32) -> f64 {
    debug_assert!(k >= 1);
    if outcome.status.solved() {
        outcome.runtime
    } else if outcome.status == RunStatus::Timeout && outcome.capped {
        outcome.runtime
    } else {
        k as f64 * kappa_max
    }
}

/// Cross-checks a reported status against the instance's known solubility.
pub(crate) fn verify(outcome: RunOutcome, expected: ExpectedStatus) -> RunOutcome {
    let wrong = matches!(
        (outcome.status, expected),
        (RunStatus::Sat, ExpectedStatus::Unsat) | (RunStatus::Unsat, ExpectedStatus::Sat)
    );
    if wrong {
        RunOutcome {
            status: RunStatus::WrongAnswer,
            ..outcome
        }
    } else {
        outcome
    }
}

/// Executes one run and interprets its result.
///
/// Synthetic in-process targets are evaluated analytically behind the same
/// signature; command targets are spawned per the wrapper wire protocol with
/// wall-clock and memory supervision. A set `cancel` token aborts the run,
/// yielding a capped timeout at the elapsed time.
pub fn execute_run(scenario: &Scenario, spec: &RunSpec, cancel: &CancelToken) -> Result<RunOutcome> {
    let expected = scenario.expected_status(&spec.instance);
    let outcome = match &scenario.target {
        TargetSpec::Synthetic(surface) => synthetic::eval_surface(
            surface,
            &scenario.space,
            &spec.config,
            &spec.instance,
            spec.seed,
            spec.cutoff,
            scenario.cutoff_seconds,
        ),
        TargetSpec::Command(command) => {
            let argv = wire::build_command(command, &scenario.space, spec, &scenario.instance_info);
            process::run_supervised(
                &argv,
                &scenario.execdir,
                spec,
                scenario.cutoff_seconds,
                expected,
                scenario.log_dir.as_deref(),
            )?
        }
    };
    Ok(verify(outcome, expected))
}

/// Blocking convenience wrapper without cancellation.
pub fn execute_run_blocking(scenario: &Scenario, spec: &RunSpec) -> Result<RunOutcome> {
    execute_run(scenario, spec, &CancelToken::new())
}

/// Runs one spec per entry through a pool of `cores` workers and returns the
/// outcomes in input order.
pub fn execute_batch(
    scenario: &Arc<Scenario>,
    specs: Vec<RunSpec>,
    cores: usize,
) -> Result<Vec<RunOutcome>> {
    if cores <= 1 || specs.len() <= 1 || scenario.target.is_in_process() {
        let mut out = Vec::with_capacity(specs.len());
        for spec in &specs {
            out.push(execute_run_blocking(scenario, spec)?);
        }
        return Ok(out);
    }
    let pool = WorkerPool::new(cores);
    let mut ids = Vec::with_capacity(specs.len());
    for spec in specs {
        ids.push(pool.submit(Arc::clone(scenario), spec));
    }
    let mut slots: Vec<Option<RunOutcome>> = vec![None; ids.len()];
    for _ in 0..ids.len() {
        let (id, _, outcome) = pool.recv()?;
        let idx = ids.iter().position(|j| *j == id).expect("job id known");
        slots[idx] = Some(outcome?);
    }
    Ok(slots.into_iter().map(|s| s.expect("all jobs completed")).collect())
}
