//! Structural cyclicity classification.
//!
//! Back edges are found by DFS from entry. A graph without back edges is
//! Sequential when every node has at most one predecessor and successor,
//! otherwise BranchOnly. For cyclic graphs the loop structure itself must
//! not count as branching: after removing back edges, a natural-loop header
//! is allowed one in-loop successor plus one out-of-loop successor (the
//! continue/exit split of the loop construct), while any other node with two
//! or more remaining successors marks the graph LoopWithBranch. Irreducible
//! back edges (target does not dominate source) classify LoopWithBranch.

use std::collections::{BTreeMap, BTreeSet};

use super::{Cyclicity, Node};

pub(super) fn classify_nodes(nodes: &[Node], entry: usize) -> Cyclicity {
    let back = back_edges(nodes, entry);
    if back.is_empty() {
        let branchy = nodes
            .iter()
            .any(|nd| nd.succs.len() > 1 || nd.preds.len() > 1);
        return if branchy {
            Cyclicity::BranchOnly
        } else {
            Cyclicity::Sequential
        };
    }

    let dom = dominators(nodes, entry);
    for &(src, dst) in &back {
        if !dom[src].contains(&dst) {
            return Cyclicity::LoopWithBranch;
        }
    }

    // Natural loop bodies, merged per header.
    let mut loops: BTreeMap<usize, BTreeSet<usize>> = BTreeMap::new();
    for &(src, header) in &back {
        let body = natural_loop(nodes, header, src);
        loops.entry(header).or_default().extend(body);
    }

    let is_back = |u: usize, v: usize| back.contains(&(u, v));
    for nd in nodes {
        let cut: Vec<usize> = nd
            .succs
            .iter()
            .copied()
            .filter(|&s| !is_back(nd.id, s))
            .collect();
        match loops.get(&nd.id) {
            Some(body) => {
                let inside = cut.iter().filter(|s| body.contains(s)).count();
                let outside = cut.len() - inside;
                if inside > 1 || outside > 1 {
                    return Cyclicity::LoopWithBranch;
                }
            }
            None => {
                if cut.len() > 1 {
                    return Cyclicity::LoopWithBranch;
                }
            }
        }
    }
    Cyclicity::LoopNoBranch
}

/// DFS back edges (edges into a node still on the DFS stack), exploring
/// successors in ascending id order.
pub(super) fn back_edges(nodes: &[Node], entry: usize) -> BTreeSet<(usize, usize)> {
    #[derive(Clone, Copy, PartialEq)]
    enum Color {
        White,
        Gray,
        Black,
    }
    let mut color = vec![Color::White; nodes.len()];
    let mut back = BTreeSet::new();
    // Explicit stack: (node, next successor index).
    let mut stack: Vec<(usize, usize)> = vec![(entry, 0)];
    color[entry] = Color::Gray;
    while let Some(&mut (v, ref mut idx)) = stack.last_mut() {
        let succs = sorted_succs(&nodes[v]);
        if *idx < succs.len() {
            let s = succs[*idx];
            *idx += 1;
            match color[s] {
                Color::White => {
                    color[s] = Color::Gray;
                    stack.push((s, 0));
                }
                Color::Gray => {
                    back.insert((v, s));
                }
                Color::Black => {}
            }
        } else {
            color[v] = Color::Black;
            stack.pop();
        }
    }
    back
}

fn sorted_succs(node: &Node) -> Vec<usize> {
    let mut s = node.succs.clone();
    s.sort_unstable();
    s
}

/// Dominator sets by the standard iterative intersection.
fn dominators(nodes: &[Node], entry: usize) -> Vec<BTreeSet<usize>> {
    let n = nodes.len();
    let all: BTreeSet<usize> = (0..n).collect();
    let mut dom: Vec<BTreeSet<usize>> = vec![all; n];
    dom[entry] = BTreeSet::from([entry]);
    let mut changed = true;
    while changed {
        changed = false;
        for nd in nodes {
            if nd.id == entry {
                continue;
            }
            let mut new: Option<BTreeSet<usize>> = None;
            for &p in &nd.preds {
                new = Some(match new {
                    None => dom[p].clone(),
                    Some(acc) => acc.intersection(&dom[p]).copied().collect(),
                });
            }
            let mut new = new.unwrap_or_default();
            new.insert(nd.id);
            if new != dom[nd.id] {
                dom[nd.id] = new;
                changed = true;
            }
        }
    }
    dom
}

/// Body of the natural loop of back edge `src -> header`: the header plus
/// every node that reaches `src` without passing through the header.
fn natural_loop(nodes: &[Node], header: usize, src: usize) -> BTreeSet<usize> {
    let mut body = BTreeSet::from([header, src]);
    let mut stack = vec![src];
    while let Some(v) = stack.pop() {
        if v == header {
            continue;
        }
        for &p in &nodes[v].preds {
            if body.insert(p) {
                stack.push(p);
            }
        }
    }
    body
}
