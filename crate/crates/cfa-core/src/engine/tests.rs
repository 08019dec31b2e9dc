use super::*;
use crate::analyses::{self, PDOM_SOURCE};
use crate::cfg::{generate_random_cfg, min_size, parse_cfg, Cyclicity};
use crate::dsl::{parse_program, Value};
use crate::selector::select_program;

fn chain(n: usize) -> Cfg {
    generate_random_cfg(1, n, Cyclicity::Sequential).unwrap()
}

fn plan(strategy: Strategy, single_pass: bool, direction: Direction) -> ExecutionPlan {
    ExecutionPlan {
        strategy,
        single_pass,
        direction,
    }
}

#[test]
fn orderings_for_fixed_strategies() {
    let g = chain(3);
    assert_eq!(make_ordering(&g, Strategy::Dec).unwrap(), vec![2, 1, 0]);
    assert_eq!(make_ordering(&g, Strategy::Rpo).unwrap(), vec![0, 1, 2]);
    assert_eq!(make_ordering(&g, Strategy::Any).unwrap(), vec![0, 1, 2]);

    let diamond = parse_cfg(crate::cfg::tests::DIAMOND).unwrap();
    assert_eq!(
        make_ordering(&diamond, Strategy::Po).unwrap(),
        crate::cfg::post_order(&diamond)
    );
    assert!(matches!(
        make_ordering(&g, Strategy::Wpo),
        Err(EngineError::NoFixedOrdering(Strategy::Wpo))
    ));
}

fn pdom_plans_single(single: bool) -> Vec<ExecutionPlan> {
    vec![
        plan(Strategy::Any, true, Direction::Iterative),
        plan(Strategy::Po, single, Direction::Backward),
    ]
}

#[test]
fn demo_graph_single_pass_po_matches_expected_sets() {
    let p = parse_program(PDOM_SOURCE).unwrap();
    let g = analyses::demo_graph();
    let run = execute_analysis(&p, &g, &pdom_plans_single(true), None).unwrap();
    let dom = &run.outputs["domT"];
    assert_eq!(dom[&2], Value::set_of_ints([1, 2, 5, 6, 7]));
    assert_eq!(dom[&7], Value::set_of_ints([7]));
    // Optimized run: one visit per node, no fixpoint checks.
    let m = &run.per_traversal[1];
    assert_eq!(m.node_visits, 8);
    assert_eq!(m.fixpoint_checks, 0);
    assert_eq!(m.passes, 1);
}

#[test]
fn demo_graph_unoptimized_po_confirms_in_second_pass() {
    let p = parse_program(PDOM_SOURCE).unwrap();
    let g = analyses::demo_graph();
    let optimized = execute_analysis(&p, &g, &pdom_plans_single(true), None).unwrap();
    let unoptimized = execute_analysis(&p, &g, &pdom_plans_single(false), None).unwrap();
    assert_eq!(optimized.outputs, unoptimized.outputs);
    let m = &unoptimized.per_traversal[1];
    assert_eq!(m.node_visits, 16);
    assert_eq!(m.fixpoint_checks, 8);
    assert_eq!(m.passes, 2);
}

#[test]
fn iterative_init_visits_each_node_once() {
    let p = parse_program(PDOM_SOURCE).unwrap();
    let g = analyses::demo_graph();
    let run = execute_analysis(&p, &g, &pdom_plans_single(true), None).unwrap();
    let m = &run.per_traversal[0];
    assert_eq!(m.node_visits, g.len() as u64);
    assert_eq!(m.fixpoint_checks, 0);
}

#[test]
fn insensitive_body_under_wrpo_visits_once() {
    // A forward traversal that writes no output: the default fixpoint sees
    // null -> null and never re-enqueues anything.
    let src = "seen: Set<int>;\nt := traversal(n: Node) {\n add(seen, n.id);\n}\ntraverse(g, t, FORWARD);";
    let p = parse_program(src).unwrap();
    for class in Cyclicity::ALL {
        let g = generate_random_cfg(5, min_size(class) + 9, class).unwrap();
        let run = execute_analysis(
            &p,
            &g,
            &[plan(Strategy::Wrpo, false, Direction::Forward)],
            None,
        )
        .unwrap();
        assert_eq!(run.total.node_visits, g.len() as u64, "{class}");
        assert_eq!(run.total.worklist_pushes, 0, "{class}");
    }
}

#[test]
fn worklist_matches_pass_outputs_on_demo_graph() {
    let p = parse_program(PDOM_SOURCE).unwrap();
    let g = analyses::demo_graph();
    let sweeps = execute_analysis(&p, &g, &pdom_plans_single(true), None).unwrap();
    let worklist = execute_analysis(
        &p,
        &g,
        &[
            plan(Strategy::Any, true, Direction::Iterative),
            plan(Strategy::Wpo, false, Direction::Backward),
        ],
        None,
    )
    .unwrap();
    assert_eq!(sweeps.outputs, worklist.outputs);
}

#[test]
fn rd_on_diamond_wrpo_needs_no_repush() {
    let p = parse_program(analyses::RD_SOURCE).unwrap();
    let g = parse_cfg(crate::cfg::tests::DIAMOND).unwrap();
    let run = execute_analysis(
        &p,
        &g,
        &[
            plan(Strategy::Any, true, Direction::Iterative),
            plan(Strategy::Wrpo, false, Direction::Forward),
        ],
        None,
    )
    .unwrap();
    let m = &run.per_traversal[1];
    assert_eq!(m.node_visits, g.len() as u64);
    assert_eq!(m.worklist_pushes, 0);
}

#[test]
fn listing_outputs_on_two_node_chain() {
    let p = parse_program(PDOM_SOURCE).unwrap();
    let g = chain(2);
    let plans = select_program(&crate::props::extract_properties(&p), g.cyclicity)
        .unwrap()
        .into_iter()
        .map(|o| o.plan)
        .collect::<Vec<_>>();
    let run = execute_analysis(&p, &g, &plans, None).unwrap();
    let dom = &run.outputs["domT"];
    assert_eq!(dom[&0], Value::set_of_ints([0, 1]));
    assert_eq!(dom[&1], Value::set_of_ints([1]));
}

#[test]
fn empty_program_runs_with_zero_visits() {
    let p = parse_program("").unwrap();
    let g = chain(4);
    let run = execute_analysis(&p, &g, &[], None).unwrap();
    assert!(run.outputs.is_empty());
    assert_eq!(run.total.node_visits, 0);
}

#[test]
fn divergence_guard_aborts_non_monotone_body() {
    // Oscillates between {1} and {2} forever.
    let src = "t := traversal(n: Node): Set<int> {\n\
               Set<int> v;\n\
               if (output(n, t) == null) { v = {}; add(v, 1); return v; }\n\
               if (contains(output(n, t), 1)) { v = {}; add(v, 2); return v; }\n\
               v = {}; add(v, 1); return v;\n\
               }\ntraverse(g, t, FORWARD);";
    let p = parse_program(src).unwrap();
    let g = chain(3);
    let err = execute_analysis(
        &p,
        &g,
        &[plan(Strategy::Rpo, false, Direction::Forward)],
        Some(12),
    )
    .unwrap_err();
    assert!(matches!(err, EngineError::Diverged { limit: 12, .. }));

    let err = execute_analysis(
        &p,
        &g,
        &[plan(Strategy::Wrpo, false, Direction::Forward)],
        Some(12),
    )
    .unwrap_err();
    assert!(matches!(err, EngineError::Diverged { .. }));
}

#[test]
fn single_pass_soundness_for_selected_plans() {
    // For every shipped analysis and class where the selector turns the
    // optimization on, removing it must change only the counters.
    for asset in analyses::load_corpus() {
        let p = parse_program(asset.source).unwrap();
        let report = crate::props::extract_properties(&p);
        for class in Cyclicity::ALL {
            for seed in 0..12u64 {
                let g = generate_random_cfg(seed, min_size(class) + 10, class).unwrap();
                let outcomes = select_program(&report, g.cyclicity).unwrap();
                let optimized: Vec<ExecutionPlan> = outcomes.iter().map(|o| o.plan).collect();
                let relaxed: Vec<ExecutionPlan> = optimized
                    .iter()
                    .map(|pl| ExecutionPlan {
                        single_pass: false,
                        ..*pl
                    })
                    .collect();
                let fast = execute_analysis(&p, &g, &optimized, None).unwrap();
                let slow = execute_analysis(&p, &g, &relaxed, None).unwrap();
                assert_eq!(
                    fast.outputs, slow.outputs,
                    "{} seed {seed} class {class}",
                    asset.code
                );
            }
        }
    }
}

#[test]
fn metrics_deterministic_for_fixed_inputs() {
    let p = parse_program(analyses::LV_SOURCE).unwrap();
    let g = generate_random_cfg(11, 18, Cyclicity::LoopWithBranch).unwrap();
    let plans = fixed_plans(&p, Strategy::Wpo);
    let a = execute_analysis(&p, &g, &plans, None).unwrap();
    let b = execute_analysis(&p, &g, &plans, None).unwrap();
    assert_eq!(a.total, b.total);
    assert_eq!(a.per_traversal, b.per_traversal);
}
