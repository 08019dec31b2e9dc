//! Control-flow-graph model: construction, validation, cyclicity
//! classification and traversal orderings.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

mod classify;
mod generate;
mod order;
mod parse;

pub use generate::{generate_random_cfg, min_size};
pub use order::{dfs_preorder, post_order, reverse_post_order};
pub use parse::{parse_cfg, render_cfg};

/// Statement category carried by every node.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum StmtKind {
    Entry,
    Exit,
    Normal,
}

/// Program statement attached to a CFG node. `defs`/`uses` hold variable
/// names, `exprs` holds opaque expression labels.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Stmt {
    pub kind: StmtKind,
    pub defs: BTreeSet<String>,
    pub uses: BTreeSet<String>,
    pub exprs: BTreeSet<String>,
    pub label: Option<String>,
}

impl Default for StmtKind {
    fn default() -> Self {
        StmtKind::Normal
    }
}

/// Graph node. `preds` and `succs` keep edge insertion order; ids are dense
/// and assigned in control-flow order by both the parser and the generator.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Node {
    pub id: usize,
    pub stmt: Stmt,
    pub preds: Vec<usize>,
    pub succs: Vec<usize>,
}

/// Structural class of a graph: no branching at all, branching but no
/// cycles, or cycles with/without branching apart from the loops themselves.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Cyclicity {
    Sequential,
    BranchOnly,
    LoopNoBranch,
    LoopWithBranch,
}

impl Cyclicity {
    pub fn has_loop(self) -> bool {
        matches!(self, Cyclicity::LoopNoBranch | Cyclicity::LoopWithBranch)
    }

    pub const ALL: [Cyclicity; 4] = [
        Cyclicity::Sequential,
        Cyclicity::BranchOnly,
        Cyclicity::LoopNoBranch,
        Cyclicity::LoopWithBranch,
    ];
}

impl fmt::Display for Cyclicity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Cyclicity::Sequential => "Sequential",
            Cyclicity::BranchOnly => "BranchOnly",
            Cyclicity::LoopNoBranch => "LoopNoBranch",
            Cyclicity::LoopWithBranch => "LoopWithBranch",
        };
        f.write_str(s)
    }
}

impl std::str::FromStr for Cyclicity {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "Sequential" | "sequential" | "seq" => Ok(Cyclicity::Sequential),
            "BranchOnly" | "branch" | "branch-only" => Ok(Cyclicity::BranchOnly),
            "LoopNoBranch" | "loop-no-branch" => Ok(Cyclicity::LoopNoBranch),
            "LoopWithBranch" | "loop-with-branch" => Ok(Cyclicity::LoopWithBranch),
            other => Err(format!("unknown cyclicity class `{other}`")),
        }
    }
}

/// Validated control-flow graph. Immutable after construction.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Cfg {
    pub name: String,
    pub nodes: Vec<Node>,
    pub entry: usize,
    pub exits: BTreeSet<usize>,
    pub cyclicity: Cyclicity,
    /// Per-node kill sets for the expression analyses: the labels whose free
    /// variables overlap the node's defs. Derived at construction.
    kills: Vec<BTreeSet<String>>,
}

impl Cfg {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn node(&self, id: usize) -> &Node {
        &self.nodes[id]
    }

    pub fn kills(&self, id: usize) -> &BTreeSet<String> {
        &self.kills[id]
    }

    pub fn is_exit(&self, id: usize) -> bool {
        self.exits.contains(&id)
    }

    /// Graph with all edges flipped; entry/exit swap roles. Only meaningful
    /// for single-exit graphs (used by the dominator duality checks).
    pub fn reversed(&self) -> Result<Cfg, CfgError> {
        if self.exits.len() != 1 {
            return Err(CfgError::Invalid(
                "cannot reverse a graph with multiple exits".into(),
            ));
        }
        let exit = *self.exits.iter().next().unwrap();
        let mut builder = CfgBuilder::new(format!("{}_rev", self.name));
        for node in &self.nodes {
            let kind = match node.stmt.kind {
                StmtKind::Entry => StmtKind::Exit,
                StmtKind::Exit => StmtKind::Entry,
                StmtKind::Normal => StmtKind::Normal,
            };
            let mut stmt = node.stmt.clone();
            stmt.kind = kind;
            builder.add_node(node.id, stmt)?;
        }
        for node in &self.nodes {
            for &s in &node.succs {
                builder.add_edge(s, node.id)?;
            }
        }
        let _ = exit;
        builder.build()
    }
}

/// Errors raised while constructing or parsing a graph.
#[derive(Debug, Error)]
pub enum CfgError {
    #[error("syntax error at line {line}, col {col}: {msg}")]
    Syntax { line: usize, col: usize, msg: String },
    #[error("duplicate node id {0}")]
    DuplicateId(usize),
    #[error("edge endpoint {0} does not name a node")]
    DanglingEdge(usize),
    #[error("duplicate edge {0} -> {1}")]
    DuplicateEdge(usize, usize),
    #[error("node ids must be dense 0..N-1; missing id {0}")]
    MissingId(usize),
    #[error("graph must declare exactly one entry node")]
    EntryCount,
    #[error("entry node {0} has predecessors")]
    EntryWithPreds(usize),
    #[error("exit node {0} has successors")]
    ExitWithSuccs(usize),
    #[error("node {0} has no successors but is not declared exit")]
    DeadEnd(usize),
    #[error("node {0} is unreachable from entry")]
    Unreachable(usize),
    #[error("graph has no exit node")]
    NoExit,
    #[error("entry/exit node {0} must carry no defs, uses or exprs")]
    NonEmptyBoundary(usize),
    #[error("declared flags are inconsistent with structure: {0}")]
    FlagMismatch(String),
    #[error("sequential graph has edge {0} -> {1} against id order")]
    SequentialOrder(usize, usize),
    #[error("requested size {size} too small for class {class}")]
    Infeasible { size: usize, class: Cyclicity },
    #[error("{0}")]
    Invalid(String),
}

/// Declared `graph` header flags from the file format.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct DeclaredFlags {
    pub loop_flag: bool,
    pub branch_flag: bool,
    pub present: bool,
}

impl DeclaredFlags {
    fn cyclicity(self) -> Cyclicity {
        match (self.loop_flag, self.branch_flag) {
            (true, true) => Cyclicity::LoopWithBranch,
            (true, false) => Cyclicity::LoopNoBranch,
            (false, true) => Cyclicity::BranchOnly,
            (false, false) => Cyclicity::Sequential,
        }
    }
}

/// Incremental graph assembly shared by the parser and the generator.
/// `build` runs the full validation pass.
#[derive(Debug)]
pub struct CfgBuilder {
    name: String,
    flags: DeclaredFlags,
    nodes: Vec<Option<Node>>,
    edges: Vec<(usize, usize)>,
}

impl CfgBuilder {
    pub fn new(name: impl Into<String>) -> Self {
        CfgBuilder {
            name: name.into(),
            flags: DeclaredFlags::default(),
            nodes: Vec::new(),
            edges: Vec::new(),
        }
    }

    pub fn declare_flags(&mut self, loop_flag: bool, branch_flag: bool) {
        self.flags = DeclaredFlags {
            loop_flag,
            branch_flag,
            present: true,
        };
    }

    pub fn add_node(&mut self, id: usize, stmt: Stmt) -> Result<(), CfgError> {
        if self.nodes.len() <= id {
            self.nodes.resize(id + 1, None);
        }
        if self.nodes[id].is_some() {
            return Err(CfgError::DuplicateId(id));
        }
        self.nodes[id] = Some(Node {
            id,
            stmt,
            preds: Vec::new(),
            succs: Vec::new(),
        });
        Ok(())
    }

    pub fn add_edge(&mut self, src: usize, dst: usize) -> Result<(), CfgError> {
        if self.edges.contains(&(src, dst)) {
            return Err(CfgError::DuplicateEdge(src, dst));
        }
        self.edges.push((src, dst));
        Ok(())
    }

    pub fn build(self) -> Result<Cfg, CfgError> {
        let CfgBuilder {
            name,
            flags,
            nodes,
            edges,
        } = self;

        let mut resolved = Vec::with_capacity(nodes.len());
        for (id, slot) in nodes.into_iter().enumerate() {
            resolved.push(slot.ok_or(CfgError::MissingId(id))?);
        }
        let n = resolved.len();
        for &(src, dst) in &edges {
            if src >= n {
                return Err(CfgError::DanglingEdge(src));
            }
            if dst >= n {
                return Err(CfgError::DanglingEdge(dst));
            }
        }
        for &(src, dst) in &edges {
            resolved[src].succs.push(dst);
            resolved[dst].preds.push(src);
        }

        let entries: Vec<usize> = resolved
            .iter()
            .filter(|nd| nd.stmt.kind == StmtKind::Entry)
            .map(|nd| nd.id)
            .collect();
        if entries.len() != 1 {
            return Err(CfgError::EntryCount);
        }
        let entry = entries[0];
        if !resolved[entry].preds.is_empty() {
            return Err(CfgError::EntryWithPreds(entry));
        }

        let exits: BTreeSet<usize> = resolved
            .iter()
            .filter(|nd| nd.stmt.kind == StmtKind::Exit)
            .map(|nd| nd.id)
            .collect();
        if exits.is_empty() {
            return Err(CfgError::NoExit);
        }
        for nd in &resolved {
            if exits.contains(&nd.id) {
                if !nd.succs.is_empty() {
                    return Err(CfgError::ExitWithSuccs(nd.id));
                }
            } else if nd.succs.is_empty() {
                return Err(CfgError::DeadEnd(nd.id));
            }
            if nd.stmt.kind != StmtKind::Normal
                && !(nd.stmt.defs.is_empty() && nd.stmt.uses.is_empty() && nd.stmt.exprs.is_empty())
            {
                return Err(CfgError::NonEmptyBoundary(nd.id));
            }
        }

        // Reachability from entry.
        let mut seen = vec![false; n];
        let mut stack = vec![entry];
        seen[entry] = true;
        while let Some(v) = stack.pop() {
            for &s in &resolved[v].succs {
                if !seen[s] {
                    seen[s] = true;
                    stack.push(s);
                }
            }
        }
        if let Some(dead) = seen.iter().position(|&r| !r) {
            return Err(CfgError::Unreachable(dead));
        }

        let structural = classify::classify_nodes(&resolved, entry);
        let cyclicity = if flags.present {
            let declared = flags.cyclicity();
            if declared.has_loop() != structural.has_loop() {
                return Err(CfgError::FlagMismatch(format!(
                    "declared {} but structural analysis says {}",
                    declared, structural
                )));
            }
            declared
        } else {
            structural
        };

        if cyclicity == Cyclicity::Sequential {
            for nd in &resolved {
                for &s in &nd.succs {
                    if s <= nd.id {
                        return Err(CfgError::SequentialOrder(nd.id, s));
                    }
                }
            }
        }

        let kills = derive_kills(&resolved);
        Ok(Cfg {
            name,
            nodes: resolved,
            entry,
            exits,
            cyclicity,
            kills,
        })
    }
}

/// Recompute the structural class of a validated graph. Pure; ignores any
/// declared flags the graph was built with.
pub fn classify_cyclicity(g: &Cfg) -> Cyclicity {
    classify::classify_nodes(&g.nodes, g.entry)
}

/// The expression labels killed at each node: label `e` is killed wherever a
/// def overlaps `e`'s free variables, and the free variables of `e` are the
/// uses recorded at the nodes mentioning `e`.
fn derive_kills(nodes: &[Node]) -> Vec<BTreeSet<String>> {
    use std::collections::BTreeMap;
    let mut free: BTreeMap<&str, BTreeSet<&str>> = BTreeMap::new();
    for nd in nodes {
        for e in &nd.stmt.exprs {
            let vars = free.entry(e).or_default();
            vars.extend(nd.stmt.uses.iter().map(|s| s.as_str()));
        }
    }
    nodes
        .iter()
        .map(|nd| {
            free.iter()
                .filter(|(_, vars)| vars.iter().any(|v| nd.stmt.defs.contains(*v)))
                .map(|(e, _)| e.to_string())
                .collect()
        })
        .collect()
}

#[cfg(test)]
pub(crate) mod tests;
