//! The analysis language: traversal and fixpoint declarations over graph
//! nodes, collection values, and `traverse` invocations.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

mod eval;
mod lex;
mod normalize;
mod parse;
mod print;
mod value;

pub use eval::{eval_fixpoint, eval_traversal_body, Session};
pub use normalize::normalize_three_address;
pub use parse::{parse_program, walk_exprs as walk_body_exprs};
pub use value::{value_eq, value_to_json, OutputMap, Value};

/// Traversal direction named in a `traverse` invocation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Direction {
    Forward,
    Backward,
    Iterative,
}

impl Direction {
    /// Short form used by the `props` and `explain` outputs.
    pub fn short(self) -> &'static str {
        match self {
            Direction::Forward => "FWD",
            Direction::Backward => "BWD",
            Direction::Iterative => "ITER",
        }
    }
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Direction::Forward => "FORWARD",
            Direction::Backward => "BACKWARD",
            Direction::Iterative => "ITERATIVE",
        };
        f.write_str(s)
    }
}

/// Declared value types. Only light static checking is performed; most type
/// errors surface at evaluation time.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DslType {
    Int,
    Bool,
    Str,
    Node,
    Set(Box<DslType>),
    Seq(Box<DslType>),
}

impl fmt::Display for DslType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DslType::Int => f.write_str("int"),
            DslType::Bool => f.write_str("bool"),
            DslType::Str => f.write_str("string"),
            DslType::Node => f.write_str("Node"),
            DslType::Set(e) => write!(f, "Set<{e}>"),
            DslType::Seq(e) => write!(f, "Seq<{e}>"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Program {
    pub globals: Vec<GlobalDecl>,
    pub traversals: Vec<TraversalDecl>,
    pub fixpoints: Vec<FixpointDecl>,
    pub invocations: Vec<TraverseStmt>,
}

impl Program {
    pub fn traversal(&self, name: &str) -> Option<&TraversalDecl> {
        self.traversals.iter().find(|t| t.name == name)
    }

    pub fn fixpoint(&self, name: &str) -> Option<&FixpointDecl> {
        self.fixpoints.iter().find(|f| f.name == name)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GlobalDecl {
    pub name: String,
    pub ty: DslType,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraversalDecl {
    pub name: String,
    pub param: String,
    pub return_type: Option<DslType>,
    pub body: Vec<Stmt>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FixpointDecl {
    pub name: String,
    pub params: Vec<(String, DslType)>,
    pub body: Vec<Stmt>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraverseStmt {
    pub graph: String,
    pub traversal: String,
    pub direction: Direction,
    pub fixpoint: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Stmt {
    Local {
        ty: DslType,
        name: String,
        init: Option<Expr>,
    },
    Assign {
        name: String,
        value: Expr,
    },
    If {
        cond: Expr,
        then_body: Box<Stmt>,
        else_body: Option<Box<Stmt>>,
    },
    Foreach {
        binder: String,
        items: Expr,
        body: Box<Stmt>,
    },
    Return(Option<Expr>),
    Expr(Expr),
    Block(Vec<Stmt>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Expr {
    Int(i64),
    Bool(bool),
    Str(String),
    Null,
    SetLit(Vec<Expr>),
    Ident(String),
    Field(Box<Expr>, String),
    Call(String, Vec<Expr>),
    Binary(BinOp, Box<Expr>, Box<Expr>),
    Not(Box<Expr>),
}

impl Expr {
    /// Matches `output(<ident>, <ident>)` and returns (node name, traversal).
    pub fn as_output_call(&self) -> Option<(&str, &str)> {
        if let Expr::Call(f, args) = self {
            if f == "output" && args.len() == 2 {
                if let (Expr::Ident(n), Expr::Ident(t)) = (&args[0], &args[1]) {
                    return Some((n, t));
                }
            }
        }
        None
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Eq,
    Ne,
    And,
    Or,
}

/// Parse- and run-time failures for analysis sources.
#[derive(Debug, Error)]
pub enum DslError {
    #[error("lexical error at {line}:{col}: {msg}")]
    Lex { line: usize, col: usize, msg: String },
    #[error("syntax error at {line}:{col}: {msg}")]
    Syntax { line: usize, col: usize, msg: String },
    #[error("duplicate name `{0}`")]
    DuplicateName(String),
    #[error("unknown name `{0}` in traverse")]
    UnknownTraverseName(String),
    #[error("fixpoint `{0}` must declare result type bool")]
    FixpointNotBool(String),
    #[error("fixpoint `{0}` must take exactly two parameters (current, previous)")]
    FixpointArity(String),
    #[error("traversal `{0}` returns a value but declares no return type")]
    ReturnWithoutType(String),
    #[error("output() refers to unknown traversal `{0}`")]
    UnknownOutputTraversal(String),

    #[error("unknown name `{0}`")]
    UnknownName(String),
    #[error("unknown field `.{0}`")]
    UnknownField(String),
    #[error("unknown function `{0}`")]
    UnknownFunction(String),
    #[error("{fun} expects {expected} arguments")]
    WrongArity { fun: String, expected: usize },
    #[error("type mismatch in {context}: expected {expected}, got {got}")]
    TypeMismatch {
        context: &'static str,
        expected: &'static str,
        got: String,
    },
    #[error("{0} applied to a null collection")]
    NullCollection(&'static str),
    #[error("fixpoint function returned a non-boolean value")]
    NonBooleanFixpoint,
    #[error("first operand of {0} must be a variable")]
    NotAssignable(&'static str),
}

#[cfg(test)]
mod tests;
