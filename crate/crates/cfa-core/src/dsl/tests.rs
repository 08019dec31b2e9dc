use proptest::prelude::*;

use super::*;
use crate::analyses::{self, PDOM_SOURCE};
use crate::cfg::{generate_random_cfg, parse_cfg, Cyclicity};

#[test]
fn pdom_source_parses_into_expected_shape() {
    let p = parse_program(PDOM_SOURCE).unwrap();
    assert_eq!(p.globals.len(), 1);
    assert_eq!(p.globals[0].name, "allNodes");
    assert_eq!(
        p.globals[0].ty,
        DslType::Set(Box::new(DslType::Int))
    );
    let names: Vec<&str> = p.traversals.iter().map(|t| t.name.as_str()).collect();
    assert_eq!(names, ["initT", "domT"]);
    assert_eq!(p.traversals[0].return_type, None);
    assert_eq!(
        p.traversals[1].return_type,
        Some(DslType::Set(Box::new(DslType::Int)))
    );
    assert_eq!(p.fixpoints.len(), 1);
    assert_eq!(p.fixpoints[0].name, "fp");
    assert_eq!(p.fixpoints[0].params.len(), 2);
    assert_eq!(
        p.invocations,
        vec![
            TraverseStmt {
                graph: "g".into(),
                traversal: "initT".into(),
                direction: Direction::Iterative,
                fixpoint: None,
            },
            TraverseStmt {
                graph: "g".into(),
                traversal: "domT".into(),
                direction: Direction::Backward,
                fixpoint: Some("fp".into()),
            },
        ]
    );
}

#[test]
fn empty_program_parses() {
    let p = parse_program("").unwrap();
    assert!(p.globals.is_empty());
    assert!(p.traversals.is_empty());
    assert!(p.fixpoints.is_empty());
    assert!(p.invocations.is_empty());
}

#[test]
fn traverse_of_unknown_traversal_rejected() {
    let err = parse_program("traverse(g, missing, FORWARD);").unwrap_err();
    assert!(matches!(err, DslError::UnknownTraverseName(n) if n == "missing"));
}

#[test]
fn fixpoint_must_return_bool() {
    let src = "f := fixp(Set<int> a, Set<int> b): int { return 1; }";
    assert!(matches!(
        parse_program(src),
        Err(DslError::FixpointNotBool(_))
    ));
}

#[test]
fn fixpoint_arity_must_be_two() {
    let src = "f := fixp(Set<int> a): bool { return true; }";
    assert!(matches!(parse_program(src), Err(DslError::FixpointArity(_))));
}

#[test]
fn return_value_needs_declared_type() {
    let src = "t := traversal(n: Node) { return n.defs; }\ntraverse(g, t, ITERATIVE);";
    assert!(matches!(
        parse_program(src),
        Err(DslError::ReturnWithoutType(_))
    ));
}

#[test]
fn syntax_errors_carry_position() {
    let err = parse_program("t := traversal(n: Node): Set<int> {\n  dom = ;\n}").unwrap_err();
    match err {
        DslError::Syntax { line, col, .. } => {
            assert_eq!(line, 2);
            assert!(col > 0);
        }
        other => panic!("expected syntax error, got {other}"),
    }
}

fn demo_session<'g>(p: &Program, g: &'g crate::cfg::Cfg) -> Session<'g> {
    let mut session = Session::new(p, g);
    // initT over all nodes fills allNodes.
    let init = p.traversal("initT").unwrap();
    for id in 0..g.len() {
        eval_traversal_body(init, id, &mut session).unwrap();
    }
    session
}

#[test]
fn dom_body_intersects_successor_outputs() {
    let p = parse_program(PDOM_SOURCE).unwrap();
    let g = analyses::demo_graph();
    let mut session = demo_session(&p, &g);
    session.store_output("domT", 3, Value::set_of_ints([1, 3, 5, 6, 7]));
    session.store_output("domT", 4, Value::set_of_ints([1, 4, 5, 6, 7]));
    let dom = p.traversal("domT").unwrap();
    let out = eval_traversal_body(dom, 2, &mut session).unwrap();
    assert_eq!(out, Value::set_of_ints([1, 2, 5, 6, 7]));
}

#[test]
fn dom_body_at_exit_returns_own_id() {
    let p = parse_program(PDOM_SOURCE).unwrap();
    let g = analyses::demo_graph();
    let mut session = demo_session(&p, &g);
    let dom = p.traversal("domT").unwrap();
    let out = eval_traversal_body(dom, 7, &mut session).unwrap();
    assert_eq!(out, Value::set_of_ints([7]));
}

#[test]
fn init_body_returns_null_and_grows_global() {
    let p = parse_program(PDOM_SOURCE).unwrap();
    let g = analyses::demo_graph();
    let mut session = Session::new(&p, &g);
    let init = p.traversal("initT").unwrap();
    let out = eval_traversal_body(init, 3, &mut session).unwrap();
    assert_eq!(out, Value::Null);
    assert_eq!(
        session.globals.get("allNodes"),
        Some(&Value::set_of_ints([3]))
    );
}

#[test]
fn fixpoint_equality_cases() {
    let p = parse_program(PDOM_SOURCE).unwrap();
    let g = analyses::demo_graph();
    let mut session = Session::new(&p, &g);
    let fp = p.fixpoint("fp").unwrap();
    let a = Value::set_of_ints([1, 2]);
    let b = Value::set_of_ints([1]);
    assert!(eval_fixpoint(Some(fp), &a, &a.clone(), &mut session).unwrap());
    assert!(!eval_fixpoint(Some(fp), &b, &a, &mut session).unwrap());
    assert!(eval_fixpoint(None, &Value::Null, &Value::Null, &mut session).unwrap());
}

#[test]
fn mutating_null_collection_is_an_error() {
    let src = "t := traversal(n: Node): Set<int> {\nSet<int> v;\nv = null;\nadd(v, 1);\nreturn v;\n}\ntraverse(g, t, ITERATIVE);";
    let p = parse_program(src).unwrap();
    let g = analyses::demo_graph();
    let mut session = Session::new(&p, &g);
    let err = eval_traversal_body(p.traversal("t").unwrap(), 0, &mut session).unwrap_err();
    assert!(matches!(err, DslError::NullCollection("add")));
}

#[test]
fn merge_with_null_is_identity() {
    let src = "t := traversal(n: Node): Set<int> {\nSet<int> v;\nadd(v, 9);\nreturn intersection(v, output(n, t));\n}\ntraverse(g, t, ITERATIVE);";
    let p = parse_program(src).unwrap();
    let g = analyses::demo_graph();
    let mut session = Session::new(&p, &g);
    let out = eval_traversal_body(p.traversal("t").unwrap(), 0, &mut session).unwrap();
    assert_eq!(out, Value::set_of_ints([9]));
}

#[test]
fn normalize_hoists_nested_output_calls() {
    let src = "t := traversal(n: Node): Set<int> {\nSet<int> dom;\nforeach (s : n.succs)\ndom = intersection(dom, output(s, t));\nreturn dom;\n}\ntraverse(g, t, BACKWARD);";
    let p = parse_program(src).unwrap();
    let norm = normalize_three_address(&p.traversals[0]);
    // The foreach body becomes a block: tmp assignment, then the original
    // statement with the call argument replaced.
    let body = match &norm.body[1] {
        Stmt::Foreach { body, .. } => body,
        other => panic!("expected foreach, got {other:?}"),
    };
    match body.as_ref() {
        Stmt::Block(stmts) => {
            assert_eq!(stmts.len(), 2);
            match &stmts[0] {
                Stmt::Assign { name, value } => {
                    assert!(name.starts_with("tmp"));
                    assert!(value.as_output_call().is_some());
                }
                other => panic!("expected hoisted assignment, got {other:?}"),
            }
            match &stmts[1] {
                Stmt::Assign { value, .. } => {
                    let args = match value {
                        Expr::Call(f, args) if f == "intersection" => args,
                        other => panic!("expected intersection call, got {other:?}"),
                    };
                    assert!(matches!(&args[1], Expr::Ident(t) if t.starts_with("tmp")));
                }
                other => panic!("expected rewritten assignment, got {other:?}"),
            }
        }
        other => panic!("expected block, got {other:?}"),
    }
}

#[test]
fn normalize_no_output_calls_is_identity() {
    let src = "t := traversal(n: Node): Set<string> {\nreturn n.defs;\n}\ntraverse(g, t, ITERATIVE);";
    let p = parse_program(src).unwrap();
    let norm = normalize_three_address(&p.traversals[0]);
    assert_eq!(norm, p.traversals[0]);
}

#[test]
fn normalization_preserves_semantics_on_demo_graph() {
    use crate::engine::{execute_analysis, oracle_plans};
    let p = parse_program(PDOM_SOURCE).unwrap();
    let mut normalized = p.clone();
    normalized.traversals = p.traversals.iter().map(normalize_three_address).collect();
    for seed in 0..10u64 {
        for class in Cyclicity::ALL {
            let g = generate_random_cfg(seed, crate::cfg::min_size(class) + 8, class).unwrap();
            let plain = execute_analysis(&p, &g, &oracle_plans(&p), None).unwrap();
            let norm = execute_analysis(&normalized, &g, &oracle_plans(&normalized), None).unwrap();
            assert_eq!(plain.outputs, norm.outputs, "seed {seed} class {class}");
        }
    }
}

#[test]
fn print_parse_roundtrip_for_corpus() {
    for asset in analyses::load_corpus() {
        let p = parse_program(asset.source).unwrap();
        let printed = p.to_string();
        let reparsed = parse_program(&printed)
            .unwrap_or_else(|e| panic!("{}: reparse failed: {e}\n{printed}", asset.code));
        assert_eq!(p, reparsed, "{}", asset.code);
    }
}

#[test]
fn demo_graph_file_matches_embedded_text() {
    let g = parse_cfg(analyses::DEMO_GRAPH).unwrap();
    assert_eq!(g.len(), 8);
    assert_eq!(g.node(2).succs, vec![3, 4]);
    assert_eq!(g.node(1).succs, vec![2, 5]);
}

fn arb_set() -> impl proptest::strategy::Strategy<Value = Value> {
    proptest::collection::btree_set(0i64..20, 0..8)
        .prop_map(|s| Value::Set(s.into_iter().map(Value::Int).collect()))
}

proptest! {
    #[test]
    fn set_algebra_laws(a in arb_set(), b in arb_set(), fresh in 100i64..200) {
        use super::eval::{apply_mutation, merge};

        // union/intersection commutativity and idempotence.
        let u1 = merge("union", a.clone(), b.clone()).unwrap();
        let u2 = merge("union", b.clone(), a.clone()).unwrap();
        prop_assert_eq!(&u1, &u2);
        let i1 = merge("intersection", a.clone(), b.clone()).unwrap();
        let i2 = merge("intersection", b.clone(), a.clone()).unwrap();
        prop_assert_eq!(&i1, &i2);
        prop_assert_eq!(merge("union", a.clone(), a.clone()).unwrap(), a.clone());
        prop_assert_eq!(
            merge("intersection", a.clone(), a.clone()).unwrap(),
            a.clone()
        );

        // add then remove of a fresh element restores the set.
        let mut v = a.clone();
        apply_mutation("add", &mut v, Value::Int(fresh)).unwrap();
        apply_mutation("remove", &mut v, Value::Int(fresh)).unwrap();
        prop_assert_eq!(v, a);
    }
}
