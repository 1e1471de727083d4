//! PAR-k aggregation of run outcomes and competition-style ranking.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::runner::RunOutcome;

/// The run objective: penalized average runtime with penalty factor `par_k`
/// at cutoff `kappa_max`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CostMetric {
    pub par_k: u32,
    pub kappa_max: f64,
}

impl CostMetric {
    pub fn new(par_k: u32, kappa_max: f64) -> Self {
        assert!(par_k >= 1, "PAR-k needs k >= 1");
        assert!(kappa_max > 0.0, "cutoff must be positive");
        CostMetric { par_k, kappa_max }
    }

    /// Penalized cost of one outcome. Solved runs cost their runtime;
    /// timeouts at the full cutoff, crashes, memouts, and wrong answers cost
    /// `k * kappa_max`. A timeout below the full cutoff (a capped run) costs
    /// its observed bound and is only a lower bound on the true cost.
    pub fn cost(&self, outcome: &RunOutcome) -> f64 {
        crate::runner::penalized_cost(outcome, self.kappa_max, self.par_k)
    }

    pub fn penalty(&self) -> f64 {
        self.par_k as f64 * self.kappa_max
    }
}

/// PAR-k aggregate over a set of runs.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AggregateScore {
    pub mean_cost: f64,
    pub solved_count: usize,
    pub attempted_count: usize,
    /// True when capped (right-censored) runs contribute, making `mean_cost`
    /// a lower bound on the true score.
    pub lower_bound: bool,
}

/// Arithmetic mean of penalized costs, one outcome per instance. Multi-seed
/// runs must be pre-averaged per instance (see [`aggregate_by_instance`]).
pub fn aggregate(outcomes: &[RunOutcome], metric: CostMetric) -> Result<AggregateScore> {
    if outcomes.is_empty() {
        return Err(Error::InsufficientData("no outcomes to aggregate".into()));
    }
    let total: f64 = outcomes.iter().map(|o| metric.cost(o)).sum();
    Ok(AggregateScore {
        mean_cost: total / outcomes.len() as f64,
        solved_count: outcomes.iter().filter(|o| o.status.solved()).count(),
        attempted_count: outcomes.len(),
        lower_bound: outcomes.iter().any(|o| o.capped),
    })
}

/// Pre-averages multi-seed outcomes per instance, then aggregates the
/// per-instance means so every instance weighs equally.
pub fn aggregate_by_instance(
    outcomes: &[(String, RunOutcome)],
    metric: CostMetric,
) -> Result<AggregateScore> {
    if outcomes.is_empty() {
        return Err(Error::InsufficientData("no outcomes to aggregate".into()));
    }
    let mut per_instance: BTreeMap<&str, (f64, usize, bool)> = BTreeMap::new();
    for (id, o) in outcomes {
        let e = per_instance.entry(id.as_str()).or_insert((0.0, 0, false));
        e.0 += metric.cost(o);
        e.1 += 1;
        e.2 |= o.status.solved();
    }
    let n = per_instance.len();
    let mean_cost =
        per_instance.values().map(|(sum, c, _)| sum / *c as f64).sum::<f64>() / n as f64;
    Ok(AggregateScore {
        mean_cost,
        solved_count: per_instance.values().filter(|(_, _, s)| *s).count(),
        attempted_count: n,
        lower_bound: outcomes.iter().any(|(_, o)| o.capped),
    })
}

/// One row of a competition ranking.
#[derive(Clone, Debug, PartialEq)]
pub struct RankingEntry {
    pub label: String,
    pub solved_count: usize,
    /// Mean runtime over the instances this entry solved (infinite when it
    /// solved none).
    pub mean_runtime_solved: f64,
    pub par_k: f64,
}

/// Competition ranking: by instances solved (descending), ties broken by
/// mean runtime over the entry's solved instances (ascending), remaining
/// ties by label.
pub fn rank(
    entries: &[(String, Vec<RunOutcome>)],
    metric: CostMetric,
) -> Result<Vec<RankingEntry>> {
    if entries.is_empty() {
        return Err(Error::InsufficientData("no entries to rank".into()));
    }
    let n = entries[0].1.len();
    if entries.iter().any(|(_, o)| o.len() != n) {
        return Err(Error::Mismatch(
            "ranking entries cover different instance sets".into(),
        ));
    }
    let mut rows: Vec<RankingEntry> = entries
        .iter()
        .map(|(label, outcomes)| {
            let agg = aggregate(outcomes, metric)?;
            let solved: Vec<f64> = outcomes
                .iter()
                .filter(|o| o.status.solved())
                .map(|o| o.runtime)
                .collect();
            let mean_runtime_solved = if solved.is_empty() {
                f64::INFINITY
            } else {
                solved.iter().sum::<f64>() / solved.len() as f64
            };
            Ok(RankingEntry {
                label: label.clone(),
                solved_count: agg.solved_count,
                mean_runtime_solved,
                par_k: agg.mean_cost,
            })
        })
        .collect::<Result<_>>()?;
    rows.sort_by(|a, b| {
        b.solved_count
            .cmp(&a.solved_count)
            .then(a.mean_runtime_solved.total_cmp(&b.mean_runtime_solved))
            .then(a.label.cmp(&b.label))
    });
    Ok(rows)
}
