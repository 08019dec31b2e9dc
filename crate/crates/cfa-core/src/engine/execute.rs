//! Whole-analysis execution: the traverse statements run in program order
//! against one shared session, so later traversals read earlier outputs and
//! globals carry across invocations.

use std::collections::BTreeMap;
use std::time::Instant;

use crate::cfg::Cfg;
use crate::dsl::{Direction, OutputMap, Program, Session};

use super::passes::is_pass_plan;
use super::{default_max_passes, run_passes, run_worklist, EngineError, ExecutionPlan, RunMetrics, Strategy};

/// Result of running every traverse statement of a program on one graph.
#[derive(Debug, Clone, PartialEq)]
pub struct AnalysisRun {
    /// Final output map per traversal name.
    pub outputs: BTreeMap<String, OutputMap>,
    pub per_traversal: Vec<RunMetrics>,
    pub total: RunMetrics,
}

impl AnalysisRun {
    /// Outputs of the last traverse statement: the analysis result proper.
    pub fn final_outputs<'a>(&'a self, program: &Program) -> Option<&'a OutputMap> {
        let last = program.invocations.last()?;
        self.outputs.get(&last.traversal)
    }
}

pub fn execute_analysis(
    program: &Program,
    g: &Cfg,
    plans: &[ExecutionPlan],
    max_passes: Option<usize>,
) -> Result<AnalysisRun, EngineError> {
    if plans.len() != program.invocations.len() {
        return Err(EngineError::PlanCount {
            plans: plans.len(),
            invocations: program.invocations.len(),
        });
    }
    let limit = max_passes.unwrap_or_else(|| default_max_passes(g.len()));
    let mut session = Session::new(program, g);
    let mut per_traversal = Vec::with_capacity(plans.len());
    let mut total = RunMetrics::default();
    let start = Instant::now();

    for (inv, plan) in program.invocations.iter().zip(plans) {
        let decl = program
            .traversal(&inv.traversal)
            .expect("validated at parse time");
        let fp = inv
            .fixpoint
            .as_ref()
            .map(|name| program.fixpoint(name).expect("validated at parse time"));
        let metrics = if is_pass_plan(plan) {
            run_passes(g, decl, plan, fp, &mut session, limit)?
        } else {
            run_worklist(g, decl, plan.strategy, plan.direction, fp, &mut session, limit)?
        };
        total.absorb(&metrics);
        per_traversal.push(metrics);
    }
    total.wall = start.elapsed();
    Ok(AnalysisRun {
        outputs: session.outputs,
        per_traversal,
        total,
    })
}

/// Plans that force one fixed strategy on every traversal, run without the
/// single-pass optimization — the baseline configuration.
pub fn fixed_plans(program: &Program, strategy: Strategy) -> Vec<ExecutionPlan> {
    program
        .invocations
        .iter()
        .map(|inv| ExecutionPlan {
            strategy,
            single_pass: false,
            direction: inv.direction,
        })
        .collect()
}

/// Worklist-oracle plans: WRPO for forward, WPO for backward, and a single
/// id-order sweep for iterative traversals.
pub fn oracle_plans(program: &Program) -> Vec<ExecutionPlan> {
    program
        .invocations
        .iter()
        .map(|inv| match inv.direction {
            Direction::Forward => ExecutionPlan {
                strategy: Strategy::Wrpo,
                single_pass: false,
                direction: inv.direction,
            },
            Direction::Backward => ExecutionPlan {
                strategy: Strategy::Wpo,
                single_pass: false,
                direction: inv.direction,
            },
            Direction::Iterative => ExecutionPlan {
                strategy: Strategy::Any,
                single_pass: true,
                direction: inv.direction,
            },
        })
        .collect()
}
