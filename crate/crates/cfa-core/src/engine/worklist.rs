//! Change-driven worklist execution. The queue is seeded with a complete
//! ordering (PO for WPO, RPO for WRPO), deduplicated by membership, and a
//! node's dependents are re-enqueued only when its fixpoint check fails.

use std::collections::VecDeque;
use std::time::Instant;

use crate::cfg::Cfg;
use crate::dsl::{
    eval_fixpoint, eval_traversal_body, Direction, FixpointDecl, Session, TraversalDecl, Value,
};

use super::{EngineError, RunMetrics, Strategy};

pub fn run_worklist(
    g: &Cfg,
    t: &TraversalDecl,
    strategy: Strategy,
    direction: Direction,
    fp: Option<&FixpointDecl>,
    session: &mut Session<'_>,
    max_passes: usize,
) -> Result<RunMetrics, EngineError> {
    let start = Instant::now();
    let seed = match strategy {
        Strategy::Wpo => crate::cfg::post_order(g),
        Strategy::Wrpo => crate::cfg::reverse_post_order(g),
        other => return Err(EngineError::NotWorklist(other)),
    };
    let visit_ceiling = (max_passes as u64).saturating_mul(g.len() as u64);

    let mut queue: VecDeque<usize> = seed.into();
    let mut in_queue = vec![true; g.len()];
    let mut metrics = RunMetrics::default();

    while let Some(node) = queue.pop_front() {
        in_queue[node] = false;
        let previous = session
            .output_map(&t.name)
            .and_then(|m| m.get(&node))
            .cloned()
            .unwrap_or(Value::Null);
        let current = eval_traversal_body(t, node, session)?;
        metrics.node_visits += 1;
        metrics.fixpoint_checks += 1;
        if metrics.node_visits > visit_ceiling {
            return Err(EngineError::Diverged {
                traversal: t.name.clone(),
                limit: max_passes,
            });
        }
        let converged = eval_fixpoint(fp, &current, &previous, session)?;
        if t.return_type.is_some() {
            session.store_output(&t.name, node, current);
        }
        if !converged {
            let dependents = match direction {
                Direction::Forward => &g.node(node).succs,
                Direction::Backward => &g.node(node).preds,
                Direction::Iterative => continue,
            };
            for &d in dependents {
                if !in_queue[d] {
                    in_queue[d] = true;
                    queue.push_back(d);
                    metrics.worklist_pushes += 1;
                }
            }
        }
    }
    metrics.wall = start.elapsed();
    Ok(metrics)
}
