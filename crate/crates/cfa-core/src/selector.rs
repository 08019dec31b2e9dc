//! Decision tree mapping (analysis properties, graph cyclicity) to an
//! execution plan. Eleven paths: P1/P2 sequential, P3/P4 branch-only,
//! P5-P8 loop-insensitive on cyclic graphs, P9/P10 loop-sensitive (the only
//! worklist outcomes), P11 for data-flow-insensitive traversals.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cfg::Cyclicity;
use crate::dsl::Direction;
use crate::engine::{ExecutionPlan, Strategy};
use crate::props::{AnalysisProperties, PropsReport};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[allow(clippy::upper_case_acronyms)]
pub enum DecisionPath {
    P1,
    P2,
    P3,
    P4,
    P5,
    P6,
    P7,
    P8,
    P9,
    P10,
    P11,
}

impl fmt::Display for DecisionPath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "P{}", *self as u8 + 1)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecisionOutcome {
    pub plan: ExecutionPlan,
    pub path: DecisionPath,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SelectError {
    #[error("unsupported combination: ITERATIVE direction with a data-flow-sensitive traversal")]
    IterativeSensitive,
}

/// Selects the strategy and the single-pass optimization for one traversal
/// on one graph.
pub fn select(props: &AnalysisProperties, cyclicity: Cyclicity) -> Result<DecisionOutcome, SelectError> {
    use DecisionPath as P;
    use Direction::{Backward, Forward, Iterative};
    use Strategy::*;

    if !props.data_flow_sensitive {
        return Ok(outcome(P::P11, Any, true, props.direction));
    }
    let dir = match props.direction {
        Iterative => return Err(SelectError::IterativeSensitive),
        d => d,
    };
    let (path, strategy, single_pass) = match cyclicity {
        Cyclicity::Sequential => match dir {
            Forward => (P::P1, Inc, true),
            Backward => (P::P2, Dec, true),
            Iterative => unreachable!(),
        },
        Cyclicity::BranchOnly => match dir {
            Forward => (P::P3, Rpo, true),
            Backward => (P::P4, Po, true),
            Iterative => unreachable!(),
        },
        // Loop sensitivity is only consulted once the graph has a loop.
        Cyclicity::LoopNoBranch | Cyclicity::LoopWithBranch if props.loop_sensitive => match dir {
            Forward => (P::P9, Wrpo, false),
            Backward => (P::P10, Wpo, false),
            Iterative => unreachable!(),
        },
        Cyclicity::LoopWithBranch => match dir {
            Forward => (P::P5, Rpo, true),
            Backward => (P::P6, Po, true),
            Iterative => unreachable!(),
        },
        Cyclicity::LoopNoBranch => match dir {
            Forward => (P::P7, Inc, true),
            Backward => (P::P8, Dec, true),
            Iterative => unreachable!(),
        },
    };
    Ok(outcome(path, strategy, single_pass, dir))
}

fn outcome(
    path: DecisionPath,
    strategy: Strategy,
    single_pass: bool,
    direction: Direction,
) -> DecisionOutcome {
    DecisionOutcome {
        plan: ExecutionPlan {
            strategy,
            single_pass,
            direction,
        },
        path,
    }
}

/// Per-invocation outcomes for a whole program on one graph.
pub fn select_program(
    report: &PropsReport,
    cyclicity: Cyclicity,
) -> Result<Vec<DecisionOutcome>, SelectError> {
    report
        .entries
        .iter()
        .map(|e| select(&e.props, cyclicity))
        .collect()
}

/// `explain` subcommand line format.
pub fn explain_line(
    traversal: &str,
    props: &AnalysisProperties,
    cyclicity: Cyclicity,
    outcome: &DecisionOutcome,
) -> String {
    format!(
        "traversal={} flw={} lp={} dir={} cyclicity={} path={} strategy={} single_pass={}",
        traversal,
        props.data_flow_sensitive as u8,
        props.loop_sensitive as u8,
        props.direction.short(),
        cyclicity,
        outcome.path,
        outcome.plan.strategy,
        outcome.plan.single_pass as u8
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn props(flw: bool, lp: bool, dir: Direction) -> AnalysisProperties {
        AnalysisProperties::new(flw, lp, dir)
    }

    #[test]
    fn exhaustive_table() {
        use Cyclicity::*;
        use DecisionPath as P;
        use Direction::*;
        use Strategy::*;
        // (flw, lp, dir, cyclicity) -> (path, strategy, single_pass)
        let expect = [
            (true, false, Forward, Sequential, P::P1, Inc, true),
            (true, false, Backward, Sequential, P::P2, Dec, true),
            (true, false, Forward, BranchOnly, P::P3, Rpo, true),
            (true, false, Backward, BranchOnly, P::P4, Po, true),
            (true, false, Forward, LoopWithBranch, P::P5, Rpo, true),
            (true, false, Backward, LoopWithBranch, P::P6, Po, true),
            (true, false, Forward, LoopNoBranch, P::P7, Inc, true),
            (true, false, Backward, LoopNoBranch, P::P8, Dec, true),
            (true, true, Forward, LoopNoBranch, P::P9, Wrpo, false),
            (true, true, Forward, LoopWithBranch, P::P9, Wrpo, false),
            (true, true, Backward, LoopNoBranch, P::P10, Wpo, false),
            (true, true, Backward, LoopWithBranch, P::P10, Wpo, false),
            // Loop sensitivity is ignored without a loop in the graph.
            (true, true, Forward, Sequential, P::P1, Inc, true),
            (true, true, Backward, BranchOnly, P::P4, Po, true),
        ];
        for (flw, lp, dir, cyc, path, strategy, single) in expect {
            let got = select(&props(flw, lp, dir), cyc).unwrap();
            assert_eq!(got.path, path, "{flw} {lp} {dir:?} {cyc:?}");
            assert_eq!(got.plan.strategy, strategy);
            assert_eq!(got.plan.single_pass, single);
        }
        // Insensitive traversals take P11 for every direction and class.
        for dir in [Forward, Backward, Iterative] {
            for cyc in Cyclicity::ALL {
                let got = select(&props(false, false, dir), cyc).unwrap();
                assert_eq!(got.path, P::P11);
                assert_eq!(got.plan.strategy, Any);
                assert!(got.plan.single_pass);
            }
        }
        // The one rejected combination.
        for cyc in Cyclicity::ALL {
            assert_eq!(
                select(&props(true, false, Iterative), cyc),
                Err(SelectError::IterativeSensitive)
            );
        }
    }

    #[test]
    fn totality_and_structure() {
        use Direction::*;
        let mut single_pass_paths = std::collections::BTreeSet::new();
        for flw in [false, true] {
            for lp in [false, true] {
                for dir in [Forward, Backward, Iterative] {
                    for cyc in Cyclicity::ALL {
                        match select(&props(flw, lp, dir), cyc) {
                            Ok(o) => {
                                assert_ne!(o.plan.strategy, Strategy::Dfs, "selector never picks DFS");
                                let worklist =
                                    matches!(o.plan.strategy, Strategy::Wpo | Strategy::Wrpo);
                                assert_eq!(worklist, !o.plan.single_pass);
                                let effective_lp = flw && lp;
                                if worklist {
                                    assert!(effective_lp && cyc.has_loop());
                                }
                                if effective_lp && cyc.has_loop() && flw {
                                    assert!(worklist);
                                }
                                if o.plan.single_pass {
                                    single_pass_paths.insert(o.path);
                                }
                            }
                            Err(SelectError::IterativeSensitive) => {
                                assert!(flw && dir == Iterative);
                            }
                        }
                    }
                }
            }
        }
        use DecisionPath as P;
        let expected: std::collections::BTreeSet<_> = [
            P::P1,
            P::P2,
            P::P3,
            P::P4,
            P::P5,
            P::P6,
            P::P7,
            P::P8,
            P::P11,
        ]
        .into_iter()
        .collect();
        assert_eq!(single_pass_paths, expected);
    }

    #[test]
    fn path_labels_render() {
        assert_eq!(DecisionPath::P1.to_string(), "P1");
        assert_eq!(DecisionPath::P11.to_string(), "P11");
    }
}
