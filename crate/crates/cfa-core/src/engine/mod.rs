//! Traversal execution: ordering-based sweeps with fixpoint confirmation,
//! change-driven worklists, the single-pass optimization, and run counters.

use std::fmt;
use std::time::Duration;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cfg::{dfs_preorder, post_order, reverse_post_order, Cfg};
use crate::dsl::{Direction, DslError};

mod execute;
mod passes;
mod worklist;

pub use execute::{execute_analysis, fixed_plans, oracle_plans, AnalysisRun};
pub use passes::{run_passes, run_passes_observed};
pub use worklist::run_worklist;

/// Candidate traversal strategies. DFS is an evaluation-only baseline; the
/// selector never produces it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Strategy {
    Any,
    Inc,
    Dec,
    Po,
    Rpo,
    Wpo,
    Wrpo,
    Dfs,
}

impl Strategy {
    pub fn is_worklist(self) -> bool {
        matches!(self, Strategy::Wpo | Strategy::Wrpo)
    }

    pub const FIXED: [Strategy; 6] = [
        Strategy::Dfs,
        Strategy::Po,
        Strategy::Rpo,
        Strategy::Wpo,
        Strategy::Wrpo,
        Strategy::Any,
    ];
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Strategy::Any => "ANY",
            Strategy::Inc => "INC",
            Strategy::Dec => "DEC",
            Strategy::Po => "PO",
            Strategy::Rpo => "RPO",
            Strategy::Wpo => "WPO",
            Strategy::Wrpo => "WRPO",
            Strategy::Dfs => "DFS",
        };
        f.write_str(s)
    }
}

impl std::str::FromStr for Strategy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_uppercase().as_str() {
            "ANY" => Ok(Strategy::Any),
            "INC" => Ok(Strategy::Inc),
            "DEC" => Ok(Strategy::Dec),
            "PO" => Ok(Strategy::Po),
            "RPO" => Ok(Strategy::Rpo),
            "WPO" => Ok(Strategy::Wpo),
            "WRPO" => Ok(Strategy::Wrpo),
            "DFS" => Ok(Strategy::Dfs),
            other => Err(format!("unknown strategy `{other}`")),
        }
    }
}

/// How one traversal runs: the strategy, whether the fixpoint confirmation
/// sweep and per-node checks are elided, and the declared direction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExecutionPlan {
    pub strategy: Strategy,
    pub single_pass: bool,
    pub direction: Direction,
}

/// Deterministic run counters; wall time is measured but excluded from
/// equality so metric comparisons stay reproducible.
#[derive(Debug, Clone, Copy, Default, Serialize, Deserialize)]
pub struct RunMetrics {
    pub node_visits: u64,
    pub passes: u64,
    pub fixpoint_checks: u64,
    pub worklist_pushes: u64,
    pub wall: Duration,
}

impl PartialEq for RunMetrics {
    fn eq(&self, other: &Self) -> bool {
        self.counters() == other.counters()
    }
}

impl Eq for RunMetrics {}

impl RunMetrics {
    pub fn counters(&self) -> (u64, u64, u64, u64) {
        (
            self.node_visits,
            self.passes,
            self.fixpoint_checks,
            self.worklist_pushes,
        )
    }

    pub fn absorb(&mut self, other: &RunMetrics) {
        self.node_visits += other.node_visits;
        self.passes += other.passes;
        self.fixpoint_checks += other.fixpoint_checks;
        self.worklist_pushes += other.worklist_pushes;
        self.wall += other.wall;
    }
}

#[derive(Debug, Error)]
pub enum EngineError {
    #[error("traversal `{traversal}` did not converge within {limit} passes")]
    Diverged { traversal: String, limit: usize },
    #[error("strategy {0} is a worklist strategy and has no fixed ordering")]
    NoFixedOrdering(Strategy),
    #[error("strategy {0} is not a worklist strategy")]
    NotWorklist(Strategy),
    #[error("plan count {plans} does not match traverse statement count {invocations}")]
    PlanCount { plans: usize, invocations: usize },
    #[error(transparent)]
    Eval(#[from] DslError),
}

/// Default pass ceiling: shipped analyses converge in far fewer passes;
/// the ceiling catches non-monotone user analyses. `BCFA_MAX_PASSES`
/// overrides it.
pub fn default_max_passes(n: usize) -> usize {
    match std::env::var("BCFA_MAX_PASSES")
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
    {
        Some(limit) if limit > 0 => limit,
        _ => 10 * n.max(1),
    }
}

/// Node sequence for an ordering-based strategy.
pub fn make_ordering(g: &Cfg, s: Strategy) -> Result<Vec<usize>, EngineError> {
    match s {
        Strategy::Any | Strategy::Inc => Ok((0..g.len()).collect()),
        Strategy::Dec => Ok((0..g.len()).rev().collect()),
        Strategy::Po => Ok(post_order(g)),
        Strategy::Rpo => Ok(reverse_post_order(g)),
        Strategy::Dfs => Ok(dfs_preorder(g)),
        Strategy::Wpo | Strategy::Wrpo => Err(EngineError::NoFixedOrdering(s)),
    }
}

#[cfg(test)]
mod tests;
