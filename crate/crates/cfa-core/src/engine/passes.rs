//! Ordering-based execution: repeated sweeps of a fixed node order until a
//! full pass leaves every node converged, or exactly one sweep when the
//! plan carries the single-pass optimization.

use std::time::Instant;

use crate::cfg::Cfg;
use crate::dsl::{
    eval_fixpoint, eval_traversal_body, Direction, FixpointDecl, Session, TraversalDecl, Value,
};

use super::{make_ordering, EngineError, ExecutionPlan, RunMetrics, Strategy};

pub fn run_passes(
    g: &Cfg,
    t: &TraversalDecl,
    plan: &ExecutionPlan,
    fp: Option<&FixpointDecl>,
    session: &mut Session<'_>,
    max_passes: usize,
) -> Result<RunMetrics, EngineError> {
    run_passes_observed(g, t, plan, fp, session, max_passes, |_, _| {})
}

/// Like [`run_passes`] but invokes `observer(pass_index, outputs)` after
/// every completed pass, which the tests use to watch convergence.
pub fn run_passes_observed(
    g: &Cfg,
    t: &TraversalDecl,
    plan: &ExecutionPlan,
    fp: Option<&FixpointDecl>,
    session: &mut Session<'_>,
    max_passes: usize,
    mut observer: impl FnMut(usize, &crate::dsl::OutputMap),
) -> Result<RunMetrics, EngineError> {
    let start = Instant::now();
    let mut metrics = RunMetrics::default();

    // An iterative-direction traversal is one sweep over the node list in
    // id order, whatever strategy the plan names.
    let ordering = if plan.direction == Direction::Iterative {
        (0..g.len()).collect()
    } else {
        make_ordering(g, plan.strategy)?
    };
    let single = plan.single_pass || plan.direction == Direction::Iterative;

    if single {
        for &node in &ordering {
            let value = eval_traversal_body(t, node, session)?;
            metrics.node_visits += 1;
            if t.return_type.is_some() {
                session.store_output(&t.name, node, value);
            }
        }
        metrics.passes = 1;
        metrics.wall = start.elapsed();
        observe(&mut observer, 1, session, t);
        return Ok(metrics);
    }

    // First pass computes from scratch: nothing to compare against yet.
    for &node in &ordering {
        let value = eval_traversal_body(t, node, session)?;
        metrics.node_visits += 1;
        if t.return_type.is_some() {
            session.store_output(&t.name, node, value);
        }
    }
    metrics.passes = 1;
    observe(&mut observer, 1, session, t);

    loop {
        if metrics.passes as usize >= max_passes {
            return Err(EngineError::Diverged {
                traversal: t.name.clone(),
                limit: max_passes,
            });
        }
        let mut changed = false;
        for &node in &ordering {
            let previous = session
                .output_map(&t.name)
                .and_then(|m| m.get(&node))
                .cloned()
                .unwrap_or(Value::Null);
            let current = eval_traversal_body(t, node, session)?;
            metrics.node_visits += 1;
            metrics.fixpoint_checks += 1;
            let converged = eval_fixpoint(fp, &current, &previous, session)?;
            if t.return_type.is_some() {
                session.store_output(&t.name, node, current);
            }
            if !converged {
                changed = true;
            }
        }
        metrics.passes += 1;
        observe(&mut observer, metrics.passes, session, t);
        if !changed {
            break;
        }
    }
    metrics.wall = start.elapsed();
    Ok(metrics)
}

fn observe(
    observer: &mut impl FnMut(usize, &crate::dsl::OutputMap),
    pass: u64,
    session: &Session<'_>,
    t: &TraversalDecl,
) {
    let empty = crate::dsl::OutputMap::new();
    let map = session.output_map(&t.name).unwrap_or(&empty);
    observer(pass as usize, map);
}

/// True when the plan will be executed by [`run_passes`] rather than the
/// worklist runner.
pub fn is_pass_plan(plan: &ExecutionPlan) -> bool {
    plan.direction == Direction::Iterative || !matches!(plan.strategy, Strategy::Wpo | Strategy::Wrpo)
}
