use proptest::prelude::*;

use super::*;

pub(crate) const CHAIN2: &str = "graph chain2\nnode 0 entry\nnode 1 exit\nedge 0 1\n";

pub(crate) const DIAMOND: &str = "\
graph diamond
node 0 entry
node 1 normal def=a
node 2 normal use=a
node 3 exit
edge 0 1
edge 0 2
edge 1 3
edge 2 3
";

/// Eight-node demo graph: an if/else inside a bottom-test loop, then a
/// straight tail to the exit.
pub(crate) const LOOP_BRANCH_DEMO: &str = "\
graph loop_branch_demo loop branch
node 0 entry
node 1 normal def=a use=b
node 2 normal use=a
node 3 normal def=b
node 4 normal def=c use=a
node 5 normal use=c
node 6 normal def=a
node 7 exit
edge 0 2
edge 2 3
edge 2 4
edge 3 1
edge 4 1
edge 1 2
edge 1 5
edge 5 6
edge 6 7
";

fn chain(n: usize) -> Cfg {
    generate_random_cfg(1, n, Cyclicity::Sequential).unwrap()
}

#[test]
fn parse_two_node_chain_is_sequential() {
    let g = parse_cfg(CHAIN2).unwrap();
    assert_eq!(g.len(), 2);
    assert_eq!(g.cyclicity, Cyclicity::Sequential);
    assert_eq!(g.entry, 0);
    assert!(g.is_exit(1));
}

#[test]
fn parse_diamond_is_branch_only() {
    let g = parse_cfg(DIAMOND).unwrap();
    assert_eq!(g.cyclicity, Cyclicity::BranchOnly);
    assert_eq!(g.node(0).succs, vec![1, 2]);
}

#[test]
fn parse_demo_graph_is_loop_with_branch() {
    let g = parse_cfg(LOOP_BRANCH_DEMO).unwrap();
    assert_eq!(g.len(), 8);
    assert_eq!(g.cyclicity, Cyclicity::LoopWithBranch);
    assert_eq!(classify_cyclicity(&g), Cyclicity::LoopWithBranch);
}

#[test]
fn classify_straight_line() {
    assert_eq!(chain(5).cyclicity, Cyclicity::Sequential);
}

#[test]
fn classify_bare_while_loop() {
    // Header with a back edge into it and no other branching.
    let text = "\
graph bare_while
node 0 entry
node 1 normal use=a
node 2 normal def=a
node 3 exit
edge 0 1
edge 1 2
edge 1 3
edge 2 1
";
    let g = parse_cfg(text).unwrap();
    assert_eq!(g.cyclicity, Cyclicity::LoopNoBranch);
}

#[test]
fn classify_while_with_if_else() {
    let text = "\
graph while_if
node 0 entry
node 1 normal
node 2 normal use=a
node 3 normal def=a
node 4 normal def=a
node 5 exit
edge 0 1
edge 1 2
edge 1 5
edge 2 3
edge 2 4
edge 3 1
edge 4 1
";
    let g = parse_cfg(text).unwrap();
    assert_eq!(g.cyclicity, Cyclicity::LoopWithBranch);
}

#[test]
fn classify_nested_bottom_test_loops() {
    let text = "\
graph nested
node 0 entry
node 1 normal
node 2 normal
node 3 normal
node 4 normal
node 5 exit
edge 0 1
edge 1 2
edge 2 3
edge 3 2
edge 3 4
edge 4 1
edge 4 5
";
    let g = parse_cfg(text).unwrap();
    assert_eq!(g.cyclicity, Cyclicity::LoopNoBranch);
}

#[test]
fn classify_irreducible_is_loop_with_branch() {
    let text = "\
graph irr
node 0 entry
node 1 normal
node 2 normal
node 3 exit
edge 0 1
edge 0 2
edge 1 2
edge 2 1
edge 1 3
";
    let g = parse_cfg(text).unwrap();
    assert_eq!(g.cyclicity, Cyclicity::LoopWithBranch);
}

#[test]
fn post_order_chain() {
    let g = chain(3);
    assert_eq!(post_order(&g), vec![2, 1, 0]);
    assert_eq!(reverse_post_order(&g), vec![0, 1, 2]);
}

#[test]
fn post_order_diamond_lowest_id_first() {
    let g = parse_cfg(DIAMOND).unwrap();
    assert_eq!(post_order(&g), vec![3, 1, 2, 0]);
    assert_eq!(reverse_post_order(&g), vec![0, 2, 1, 3]);
}

#[test]
fn post_order_cycle_entry_last() {
    // 1 <-> 2 cycle; DFS from entry finishes the entry last.
    let text = "\
graph cyc
node 0 entry
node 1 normal
node 2 normal
node 3 exit
edge 0 1
edge 1 2
edge 2 1
edge 2 3
";
    let g = parse_cfg(text).unwrap();
    let po = post_order(&g);
    assert_eq!(po.len(), 4);
    assert_eq!(*po.last().unwrap(), 0);
    assert_eq!(po, vec![3, 2, 1, 0]);
}

#[test]
fn dfs_preorder_diamond() {
    let g = parse_cfg(DIAMOND).unwrap();
    assert_eq!(dfs_preorder(&g), vec![0, 1, 3, 2]);
}

#[test]
fn generator_deterministic() {
    for class in Cyclicity::ALL {
        let a = generate_random_cfg(7, 12, class).unwrap();
        let b = generate_random_cfg(7, 12, class).unwrap();
        assert_eq!(a, b);
    }
}

#[test]
fn generator_minimum_sizes() {
    let g = generate_random_cfg(1, 2, Cyclicity::Sequential).unwrap();
    assert_eq!(g.len(), 2);
    assert!(matches!(
        generate_random_cfg(1, 4, Cyclicity::LoopWithBranch),
        Err(CfgError::Infeasible { .. })
    ));
    assert!(matches!(
        generate_random_cfg(1, 2, Cyclicity::LoopNoBranch),
        Err(CfgError::Infeasible { .. })
    ));
    assert!(matches!(
        generate_random_cfg(1, 3, Cyclicity::BranchOnly),
        Err(CfgError::Infeasible { .. })
    ));
}

#[test]
fn generator_classes_match_classifier() {
    for class in Cyclicity::ALL {
        for seed in 0..250u64 {
            let size = min_size_for(class) + (seed as usize % 24);
            let g = generate_random_cfg(seed, size, class).unwrap();
            assert_eq!(classify_cyclicity(&g), class, "seed {seed} size {size}");
        }
    }
}

fn min_size_for(class: Cyclicity) -> usize {
    min_size(class)
}

#[test]
fn parse_errors() {
    let dangling = "graph g\nnode 0 entry\nnode 1 exit\nedge 0 1\nedge 0 5\n";
    assert!(matches!(parse_cfg(dangling), Err(CfgError::DanglingEdge(5))));

    let dup = "graph g\nnode 0 entry\nnode 0 exit\n";
    assert!(matches!(parse_cfg(dup), Err(CfgError::DuplicateId(0))));

    let unreachable = "\
graph g
node 0 entry
node 1 exit
node 2 normal
node 3 exit
edge 0 1
edge 2 3
";
    assert!(matches!(parse_cfg(unreachable), Err(CfgError::Unreachable(2))));

    let entry_preds = "graph g\nnode 0 entry\nnode 1 exit\nedge 0 1\nedge 0 0\n";
    assert!(matches!(parse_cfg(entry_preds), Err(CfgError::EntryWithPreds(0))));

    let syntax = "graph g\nnode x entry\n";
    match parse_cfg(syntax) {
        Err(CfgError::Syntax { line: 2, .. }) => {}
        other => panic!("expected syntax error, got {other:?}"),
    }
}

#[test]
fn declared_flags_validated_against_structure() {
    let lying = "graph g loop\nnode 0 entry\nnode 1 exit\nedge 0 1\n";
    assert!(matches!(parse_cfg(lying), Err(CfgError::FlagMismatch(_))));

    let missing_loop = "\
graph g branch
node 0 entry
node 1 normal
node 2 exit
edge 0 1
edge 1 1
edge 1 2
";
    assert!(matches!(parse_cfg(missing_loop), Err(CfgError::FlagMismatch(_))));
}

#[test]
fn sequential_requires_id_order() {
    let text = "\
graph g
node 0 entry
node 1 exit
node 2 normal
edge 0 2
edge 2 1
";
    assert!(matches!(
        parse_cfg(text),
        Err(CfgError::SequentialOrder(2, 1))
    ));
}

#[test]
fn demo_graph_comment_and_label_parsing() {
    let text = "# demo\ngraph g # trailing\nnode 0 entry label=\"start here\"\nnode 1 exit\nedge 0 1\n";
    let g = parse_cfg(text).unwrap();
    assert_eq!(g.node(0).stmt.label.as_deref(), Some("start here"));
}

proptest! {
    #[test]
    fn edge_symmetry_holds(seed in 0u64..500, class_idx in 0usize..4, size in 0usize..24) {
        let class = Cyclicity::ALL[class_idx];
        let size = min_size_for(class) + size;
        let g = generate_random_cfg(seed, size, class).unwrap();
        for nd in &g.nodes {
            for &s in &nd.succs {
                prop_assert!(g.node(s).preds.contains(&nd.id));
            }
            for &p in &nd.preds {
                prop_assert!(g.node(p).succs.contains(&nd.id));
            }
        }
    }

    #[test]
    fn rpo_is_reverse_of_po(seed in 0u64..200, class_idx in 0usize..4) {
        let class = Cyclicity::ALL[class_idx];
        let g = generate_random_cfg(seed, min_size_for(class) + 9, class).unwrap();
        let mut po = post_order(&g);
        po.reverse();
        prop_assert_eq!(po, reverse_post_order(&g));
    }

    #[test]
    fn rpo_topological_on_acyclic(seed in 0u64..300, branchy in proptest::bool::ANY) {
        let class = if branchy { Cyclicity::BranchOnly } else { Cyclicity::Sequential };
        let g = generate_random_cfg(seed, min_size_for(class) + 11, class).unwrap();
        let rpo = reverse_post_order(&g);
        let mut position = vec![0usize; g.len()];
        for (i, &v) in rpo.iter().enumerate() {
            position[v] = i;
        }
        for nd in &g.nodes {
            for &s in &nd.succs {
                prop_assert!(position[nd.id] < position[s]);
            }
        }
    }
}
