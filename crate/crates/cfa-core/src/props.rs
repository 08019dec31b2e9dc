//! Static per-traversal properties: a must-alias environment for the node
//! binder, data-flow sensitivity (does the body read other nodes' outputs
//! of the same traversal), and loop sensitivity (do outputs strictly expand
//! or shrink across iterations, judged from the collection operations).

use std::collections::{BTreeMap, BTreeSet};
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::dsl::{normalize_three_address, Direction, Expr, Program, Stmt, TraversalDecl};

/// Names that must alias the traversal's node binder. Under-approximate by
/// construction: a name only enters when every assignment to it copies a
/// name already in the environment.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AliasEnv {
    pub names: BTreeSet<String>,
}

impl AliasEnv {
    pub fn contains(&self, name: &str) -> bool {
        self.names.contains(name)
    }
}

/// The (Flw, Lp, Dir) triple for one traversal invocation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnalysisProperties {
    pub data_flow_sensitive: bool,
    pub loop_sensitive: bool,
    pub direction: Direction,
}

impl AnalysisProperties {
    pub fn new(data_flow_sensitive: bool, loop_sensitive: bool, direction: Direction) -> Self {
        AnalysisProperties {
            data_flow_sensitive,
            // Loop sensitivity is defined only for data-flow sensitive
            // traversals.
            loop_sensitive: loop_sensitive && data_flow_sensitive,
            direction,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraversalProps {
    pub traversal: String,
    pub props: AnalysisProperties,
    pub static_micros: u64,
}

/// One entry per traverse statement, in program order.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct PropsReport {
    pub entries: Vec<TraversalProps>,
    pub total_micros: u64,
}

impl PropsReport {
    /// `props` subcommand line format.
    pub fn lines(&self) -> String {
        let mut out = String::new();
        for e in &self.entries {
            out.push_str(&format!(
                "{} flw={} lp={} dir={} static_us={}\n",
                e.traversal,
                e.props.data_flow_sensitive as u8,
                e.props.loop_sensitive as u8,
                e.props.direction.short(),
                e.static_micros
            ));
        }
        out
    }
}

enum Rhs {
    Bare(String),
    Other,
}

/// Must-alias environment of the node binder, for a normalized body.
pub fn compute_aliases(t: &TraversalDecl) -> AliasEnv {
    let mut assignments: BTreeMap<String, Vec<Rhs>> = BTreeMap::new();
    let mut binders: BTreeSet<String> = BTreeSet::new();
    collect_assignments(&t.body, &mut assignments, &mut binders);

    let mut names = BTreeSet::from([t.param.clone()]);
    // The visited node is also pre-bound as `node`, unless the body turns
    // that name into something else.
    let node_clean = !binders.contains("node")
        && assignments
            .get("node")
            .map_or(true, |rs| rs.iter().all(|r| matches!(r, Rhs::Bare(b) if b == &t.param)));
    if node_clean {
        names.insert("node".to_string());
    }

    let mut changed = true;
    while changed {
        changed = false;
        for (name, rhss) in &assignments {
            if names.contains(name) || binders.contains(name) {
                continue;
            }
            let all_alias = !rhss.is_empty()
                && rhss.iter().all(|r| match r {
                    Rhs::Bare(b) => names.contains(b),
                    Rhs::Other => false,
                });
            if all_alias {
                names.insert(name.clone());
                changed = true;
            }
        }
    }
    AliasEnv { names }
}

fn collect_assignments(
    body: &[Stmt],
    assignments: &mut BTreeMap<String, Vec<Rhs>>,
    binders: &mut BTreeSet<String>,
) {
    for s in body {
        match s {
            Stmt::Assign { name, value } => record(assignments, name, value),
            Stmt::Local {
                name,
                init: Some(value),
                ..
            } => record(assignments, name, value),
            Stmt::Local { .. } => {}
            Stmt::If {
                then_body,
                else_body,
                ..
            } => {
                collect_assignments(std::slice::from_ref(then_body), assignments, binders);
                if let Some(e) = else_body {
                    collect_assignments(std::slice::from_ref(e), assignments, binders);
                }
            }
            Stmt::Foreach { binder, body, .. } => {
                binders.insert(binder.clone());
                collect_assignments(std::slice::from_ref(body), assignments, binders);
            }
            Stmt::Block(stmts) => collect_assignments(stmts, assignments, binders),
            Stmt::Return(_) | Stmt::Expr(_) => {}
        }
    }
}

fn record(map: &mut BTreeMap<String, Vec<Rhs>>, name: &str, value: &Expr) {
    let rhs = match value {
        Expr::Ident(b) => Rhs::Bare(b.clone()),
        _ => Rhs::Other,
    };
    map.entry(name.to_string()).or_default().push(rhs);
}

/// True when the body reads `output(n', t)` for some `n'` not known to
/// alias the visited node. Never misses a genuinely sensitive traversal:
/// unknown receivers count as non-aliases.
pub fn detect_data_flow_sensitivity(t: &TraversalDecl, aliases: &AliasEnv) -> bool {
    let mut sensitive = false;
    crate::dsl::walk_body_exprs(&t.body, &mut |e: &Expr| {
        if let Expr::Call(f, args) = e {
            if f == "output" && args.len() == 2 {
                if let Expr::Ident(target) = &args[1] {
                    if target == &t.name {
                        let foreign = match &args[0] {
                            Expr::Ident(n) => !aliases.contains(n),
                            _ => true,
                        };
                        if foreign {
                            sensitive = true;
                        }
                    }
                }
            }
        }
    });
    sensitive
}

/// Two syntactic passes over a normalized body: collect output variables
/// related (V) and unrelated (V') to the visited node, then look for a
/// merge/update combination that can only expand (union + add/addAll) or
/// only shrink (intersection + remove/removeAll) the output per iteration.
pub fn detect_loop_sensitivity(t: &TraversalDecl, aliases: &AliasEnv) -> bool {
    let mut related: BTreeSet<String> = BTreeSet::new();
    let mut unrelated: BTreeSet<String> = BTreeSet::new();
    collect_output_vars(&t.body, t, aliases, &mut related, &mut unrelated);

    let mut expand = false;
    let mut shrink = false;
    let mut gen = false;
    let mut kill = false;
    crate::dsl::walk_body_exprs(&t.body, &mut |e: &Expr| {
        let (f, args) = match e {
            Expr::Call(f, args) => (f.as_str(), args),
            _ => return,
        };
        let ident = |i: usize| match args.get(i) {
            Some(Expr::Ident(n)) => Some(n.as_str()),
            _ => None,
        };
        match f {
            "union" | "intersection" => {
                if let (Some(c1), Some(c2)) = (ident(0), ident(1)) {
                    let mixed = (related.contains(c1) && unrelated.contains(c2))
                        || (unrelated.contains(c1) && related.contains(c2));
                    if mixed {
                        if f == "union" {
                            expand = true;
                        } else {
                            shrink = true;
                        }
                    }
                }
            }
            "add" | "addAll" => {
                if ident(0).is_some_and(|c1| related.contains(c1)) {
                    gen = true;
                }
            }
            "remove" | "removeAll" => {
                if ident(0).is_some_and(|c1| related.contains(c1)) {
                    kill = true;
                }
            }
            _ => {}
        }
    });
    (expand && gen) || (shrink && kill)
}

fn collect_output_vars(
    body: &[Stmt],
    t: &TraversalDecl,
    aliases: &AliasEnv,
    related: &mut BTreeSet<String>,
    unrelated: &mut BTreeSet<String>,
) {
    for s in body {
        match s {
            Stmt::Assign { name, value }
            | Stmt::Local {
                name,
                init: Some(value),
                ..
            } => {
                if let Some((node, target)) = value.as_output_call() {
                    if target == t.name {
                        if aliases.contains(node) {
                            related.insert(name.clone());
                        } else {
                            unrelated.insert(name.clone());
                        }
                    }
                }
            }
            Stmt::If {
                then_body,
                else_body,
                ..
            } => {
                collect_output_vars(std::slice::from_ref(then_body), t, aliases, related, unrelated);
                if let Some(e) = else_body {
                    collect_output_vars(std::slice::from_ref(e), t, aliases, related, unrelated);
                }
            }
            Stmt::Foreach { body, .. } => {
                collect_output_vars(std::slice::from_ref(body), t, aliases, related, unrelated)
            }
            Stmt::Block(stmts) => collect_output_vars(stmts, t, aliases, related, unrelated),
            _ => {}
        }
    }
}

/// Properties for every traverse statement, each timed individually.
pub fn extract_properties(program: &Program) -> PropsReport {
    let mut report = PropsReport::default();
    for inv in &program.invocations {
        let start = Instant::now();
        let decl = program
            .traversal(&inv.traversal)
            .expect("validated at parse time");
        let normalized = normalize_three_address(decl);
        let aliases = compute_aliases(&normalized);
        let flw = detect_data_flow_sensitivity(&normalized, &aliases);
        let lp = flw && detect_loop_sensitivity(&normalized, &aliases);
        let micros = start.elapsed().as_micros() as u64;
        report.entries.push(TraversalProps {
            traversal: inv.traversal.clone(),
            props: AnalysisProperties::new(flw, lp, inv.direction),
            static_micros: micros,
        });
        report.total_micros += micros;
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsl::parse_program;

    fn traversal_body(body: &str) -> TraversalDecl {
        let src = format!("t := traversal(n: Node): Set<int> {{\n{body}\n}}\ntraverse(g, t, FORWARD);");
        let p = parse_program(&src).unwrap();
        normalize_three_address(&p.traversals[0])
    }

    #[test]
    fn aliases_simple_copy() {
        let t = traversal_body("m = n; add(allNodes, m);");
        let a = compute_aliases(&t);
        assert!(a.contains("n"));
        assert!(a.contains("m"));
    }

    #[test]
    fn aliases_identity_when_no_copies() {
        let t = traversal_body("return n.defs;");
        let a = compute_aliases(&t);
        assert!(a.contains("n"));
        assert!(!a.contains("m"));
    }

    #[test]
    fn aliases_exclude_conditional_reassignment() {
        let t = traversal_body("m = n; if (true) m = other;");
        let a = compute_aliases(&t);
        assert!(a.contains("n"));
        assert!(!a.contains("m"));
    }

    #[test]
    fn aliases_transitive_chain() {
        let t = traversal_body("m = n; k = m;");
        let a = compute_aliases(&t);
        assert!(a.contains("k"));
    }

    #[test]
    fn own_output_read_is_not_sensitive() {
        let t = traversal_body("Set<int> v;\nif (output(n, t) != null) v = output(n, t);\nreturn v;");
        let a = compute_aliases(&t);
        assert!(!detect_data_flow_sensitivity(&t, &a));
    }

    #[test]
    fn foreign_output_read_is_sensitive() {
        let t = traversal_body("Set<int> v;\nforeach (s : n.succs)\n v = output(s, t);\nreturn v;");
        let a = compute_aliases(&t);
        assert!(detect_data_flow_sensitivity(&t, &a));
    }

    #[test]
    fn no_collection_ops_is_loop_insensitive() {
        let t = traversal_body("Set<int> v;\nforeach (s : n.succs)\n v = output(s, t);\nreturn v;");
        let a = compute_aliases(&t);
        assert!(!detect_loop_sensitivity(&t, &a));
    }

    #[test]
    fn empty_program_empty_report() {
        let p = parse_program("").unwrap();
        assert!(extract_properties(&p).entries.is_empty());
    }
}
