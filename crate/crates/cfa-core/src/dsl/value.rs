//! Runtime values. Sets are unordered with unique elements, sequences are
//! ordered with duplicates; `Null` is the absent-output sentinel.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

/// Per-traversal analysis output, keyed by node id. A missing entry is what
/// `output(n, t)` observes as `Null`.
pub type OutputMap = BTreeMap<usize, Value>;

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum Value {
    Null,
    Bool(bool),
    Int(i64),
    Str(String),
    NodeRef(usize),
    Set(BTreeSet<Value>),
    Seq(Vec<Value>),
    /// Binding for the predefined `exitNodeId`: equality against an int
    /// tests membership, which generalizes the single-exit case.
    ExitIds(BTreeSet<i64>),
}

impl Value {
    pub fn type_name(&self) -> &'static str {
        match self {
            Value::Null => "null",
            Value::Bool(_) => "bool",
            Value::Int(_) => "int",
            Value::Str(_) => "string",
            Value::NodeRef(_) => "Node",
            Value::Set(_) => "Set",
            Value::Seq(_) => "Seq",
            Value::ExitIds(_) => "exit-id",
        }
    }

    pub fn set_of_strings<I: IntoIterator<Item = S>, S: Into<String>>(items: I) -> Value {
        Value::Set(items.into_iter().map(|s| Value::Str(s.into())).collect())
    }

    pub fn set_of_ints<I: IntoIterator<Item = i64>>(items: I) -> Value {
        Value::Set(items.into_iter().map(Value::Int).collect())
    }
}

/// Structural equality, with the exit-id sentinel comparing by membership.
pub fn value_eq(a: &Value, b: &Value) -> bool {
    match (a, b) {
        (Value::Int(i), Value::ExitIds(s)) | (Value::ExitIds(s), Value::Int(i)) => s.contains(i),
        _ => a == b,
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Null => f.write_str("null"),
            Value::Bool(b) => write!(f, "{b}"),
            Value::Int(i) => write!(f, "{i}"),
            Value::Str(s) => write!(f, "\"{s}\""),
            Value::NodeRef(id) => write!(f, "node({id})"),
            Value::Set(items) => {
                f.write_str("{")?;
                for (i, v) in items.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{v}")?;
                }
                f.write_str("}")
            }
            Value::Seq(items) => {
                f.write_str("[")?;
                for (i, v) in items.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{v}")?;
                }
                f.write_str("]")
            }
            Value::ExitIds(ids) => write!(f, "exit-ids{ids:?}"),
        }
    }
}

/// JSON rendering with node ids and set elements in ascending order.
pub fn value_to_json(v: &Value) -> serde_json::Value {
    use serde_json::Value as J;
    match v {
        Value::Null => J::Null,
        Value::Bool(b) => J::Bool(*b),
        Value::Int(i) => J::from(*i),
        Value::Str(s) => J::from(s.as_str()),
        Value::NodeRef(id) => J::from(*id),
        Value::Set(items) => J::Array(items.iter().map(value_to_json).collect()),
        Value::Seq(items) => J::Array(items.iter().map(value_to_json).collect()),
        Value::ExitIds(ids) => J::Array(ids.iter().map(|i| J::from(*i)).collect()),
    }
}
