//! Traversal orderings. All DFS walks descend into successors in ascending
//! id order so orderings are reproducible.

use super::Cfg;

/// Nodes by DFS finishing time from entry. In acyclic graphs every node
/// appears after all of its successors.
pub fn post_order(g: &Cfg) -> Vec<usize> {
    let n = g.len();
    let mut visited = vec![false; n];
    let mut out = Vec::with_capacity(n);
    let mut stack: Vec<(usize, usize)> = vec![(g.entry, 0)];
    visited[g.entry] = true;
    while let Some(&mut (v, ref mut idx)) = stack.last_mut() {
        let succs = sorted_succs(g, v);
        if *idx < succs.len() {
            let s = succs[*idx];
            *idx += 1;
            if !visited[s] {
                visited[s] = true;
                stack.push((s, 0));
            }
        } else {
            out.push(v);
            stack.pop();
        }
    }
    out
}

/// Reverse of [`post_order`]. In acyclic graphs this is a topological order:
/// every node appears after all of its predecessors.
pub fn reverse_post_order(g: &Cfg) -> Vec<usize> {
    let mut po = post_order(g);
    po.reverse();
    po
}

/// DFS pre-order (discovery order) from entry.
pub fn dfs_preorder(g: &Cfg) -> Vec<usize> {
    let n = g.len();
    let mut visited = vec![false; n];
    let mut out = Vec::with_capacity(n);
    let mut stack: Vec<(usize, usize)> = vec![(g.entry, 0)];
    visited[g.entry] = true;
    out.push(g.entry);
    while let Some(&mut (v, ref mut idx)) = stack.last_mut() {
        let succs = sorted_succs(g, v);
        if *idx < succs.len() {
            let s = succs[*idx];
            *idx += 1;
            if !visited[s] {
                visited[s] = true;
                out.push(s);
                stack.push((s, 0));
            }
        } else {
            stack.pop();
        }
    }
    out
}

fn sorted_succs(g: &Cfg, v: usize) -> Vec<usize> {
    let mut s = g.nodes[v].succs.clone();
    s.sort_unstable();
    s
}
