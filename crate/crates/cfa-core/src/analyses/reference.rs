//! Brute-force reference solvers, written directly against the graph and
//! independent of the traversal engine: round-robin re-evaluation until
//! nothing changes, or the direct textbook equations where they exist.

use std::collections::{BTreeMap, BTreeSet};

use crate::cfg::Cfg;
use crate::dsl::{OutputMap, Value};

/// Ground-truth outputs for the final traversal of the named analysis.
pub fn reference_solution(code: &str, g: &Cfg) -> OutputMap {
    match code {
        "PDOM" => int_sets(post_dominators(g)),
        "DOM" => int_sets(dominators(g)),
        "RD" => str_sets(reaching_defs(g)),
        "LV" => str_sets(live_variables(g)),
        "AE" => str_sets(available_exprs(g)),
        "VBE" => str_sets(very_busy_exprs(g)),
        "UDV" => str_sets(
            g.nodes
                .iter()
                .map(|n| {
                    let mut s: BTreeSet<String> = n.stmt.defs.iter().cloned().collect();
                    s.extend(n.stmt.uses.iter().cloned());
                    (n.id, s)
                })
                .collect(),
        ),
        "COL" => str_sets(
            g.nodes
                .iter()
                .map(|n| (n.id, n.stmt.exprs.iter().cloned().collect()))
                .collect(),
        ),
        other => panic!("no reference solver for analysis {other}"),
    }
}

fn int_sets(map: BTreeMap<usize, BTreeSet<usize>>) -> OutputMap {
    map.into_iter()
        .map(|(n, s)| (n, Value::set_of_ints(s.into_iter().map(|i| i as i64))))
        .collect()
}

fn str_sets(map: BTreeMap<usize, BTreeSet<String>>) -> OutputMap {
    map.into_iter()
        .map(|(n, s)| (n, Value::set_of_strings(s)))
        .collect()
}

/// Iterative set intersection from the textbook definition.
fn dominators(g: &Cfg) -> BTreeMap<usize, BTreeSet<usize>> {
    let all: BTreeSet<usize> = (0..g.len()).collect();
    let mut dom: Vec<BTreeSet<usize>> = vec![all; g.len()];
    dom[g.entry] = BTreeSet::from([g.entry]);
    let mut changed = true;
    while changed {
        changed = false;
        for node in &g.nodes {
            if node.id == g.entry {
                continue;
            }
            let mut new: Option<BTreeSet<usize>> = None;
            for &p in &node.preds {
                new = Some(match new {
                    None => dom[p].clone(),
                    Some(acc) => acc.intersection(&dom[p]).copied().collect(),
                });
            }
            let mut new = new.unwrap_or_default();
            new.insert(node.id);
            if new != dom[node.id] {
                dom[node.id] = new;
                changed = true;
            }
        }
    }
    dom.into_iter().enumerate().collect()
}

fn post_dominators(g: &Cfg) -> BTreeMap<usize, BTreeSet<usize>> {
    let all: BTreeSet<usize> = (0..g.len()).collect();
    let mut pdom: Vec<BTreeSet<usize>> = vec![all; g.len()];
    for &e in &g.exits {
        pdom[e] = BTreeSet::from([e]);
    }
    let mut changed = true;
    while changed {
        changed = false;
        for node in &g.nodes {
            if g.is_exit(node.id) {
                continue;
            }
            let mut new: Option<BTreeSet<usize>> = None;
            for &s in &node.succs {
                new = Some(match new {
                    None => pdom[s].clone(),
                    Some(acc) => acc.intersection(&pdom[s]).copied().collect(),
                });
            }
            let mut new = new.unwrap_or_default();
            new.insert(node.id);
            if new != pdom[node.id] {
                pdom[node.id] = new;
                changed = true;
            }
        }
    }
    pdom.into_iter().enumerate().collect()
}

/// Round-robin until globally unchanged; definitions tracked per variable.
fn reaching_defs(g: &Cfg) -> BTreeMap<usize, BTreeSet<String>> {
    let mut out: Vec<BTreeSet<String>> = vec![BTreeSet::new(); g.len()];
    let mut changed = true;
    while changed {
        changed = false;
        for node in &g.nodes {
            let mut new: BTreeSet<String> = BTreeSet::new();
            for &p in &node.preds {
                new.extend(out[p].iter().cloned());
            }
            new.extend(node.stmt.defs.iter().cloned());
            if new != out[node.id] {
                out[node.id] = new;
                changed = true;
            }
        }
    }
    out.into_iter().enumerate().collect()
}

fn live_variables(g: &Cfg) -> BTreeMap<usize, BTreeSet<String>> {
    let mut live: Vec<BTreeSet<String>> = vec![BTreeSet::new(); g.len()];
    let mut changed = true;
    while changed {
        changed = false;
        for node in &g.nodes {
            let mut flow: BTreeSet<String> = BTreeSet::new();
            for &s in &node.succs {
                flow.extend(live[s].iter().cloned());
            }
            let mut new: BTreeSet<String> = flow
                .into_iter()
                .filter(|v| !node.stmt.defs.contains(v))
                .collect();
            new.extend(node.stmt.uses.iter().cloned());
            if new != live[node.id] {
                live[node.id] = new;
                changed = true;
            }
        }
    }
    live.into_iter().enumerate().collect()
}

fn expr_universe(g: &Cfg) -> BTreeSet<String> {
    g.nodes
        .iter()
        .flat_map(|n| n.stmt.exprs.iter().cloned())
        .collect()
}

fn available_exprs(g: &Cfg) -> BTreeMap<usize, BTreeSet<String>> {
    let universe = expr_universe(g);
    let mut avail: Vec<BTreeSet<String>> = vec![universe; g.len()];
    avail[g.entry] = BTreeSet::new();
    let mut changed = true;
    while changed {
        changed = false;
        for node in &g.nodes {
            let mut new: Option<BTreeSet<String>> = None;
            for &p in &node.preds {
                new = Some(match new {
                    None => avail[p].clone(),
                    Some(acc) => acc.intersection(&avail[p]).cloned().collect(),
                });
            }
            let flow = new.unwrap_or_default();
            let mut new: BTreeSet<String> = flow
                .into_iter()
                .filter(|e| !g.kills(node.id).contains(e))
                .collect();
            new.extend(node.stmt.exprs.iter().cloned());
            if new != avail[node.id] {
                avail[node.id] = new;
                changed = true;
            }
        }
    }
    avail.into_iter().enumerate().collect()
}

fn very_busy_exprs(g: &Cfg) -> BTreeMap<usize, BTreeSet<String>> {
    let universe = expr_universe(g);
    let mut busy: Vec<BTreeSet<String>> = vec![universe; g.len()];
    for &e in &g.exits {
        busy[e] = BTreeSet::new();
    }
    let mut changed = true;
    while changed {
        changed = false;
        for node in &g.nodes {
            let mut new: Option<BTreeSet<String>> = None;
            for &s in &node.succs {
                new = Some(match new {
                    None => busy[s].clone(),
                    Some(acc) => acc.intersection(&busy[s]).cloned().collect(),
                });
            }
            let flow = new.unwrap_or_default();
            let mut new: BTreeSet<String> = flow
                .into_iter()
                .filter(|e| !g.kills(node.id).contains(e))
                .collect();
            new.extend(node.stmt.exprs.iter().cloned());
            if new != busy[node.id] {
                busy[node.id] = new;
                changed = true;
            }
        }
    }
    busy.into_iter().enumerate().collect()
}
