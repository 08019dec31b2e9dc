//! Tree-walking evaluator for traversal and fixpoint bodies.
//!
//! A [`Session`] holds the mutable state of one analysis run on one graph:
//! global variables and the per-traversal output maps. Bodies are evaluated
//! one node at a time; the engine owns ordering, fixpoint detection and the
//! writing of returned values into the output maps.
//!
//! Null handling follows the standard iterative-dataflow initialization:
//! merging with an absent neighbor output (`union`/`intersection` with
//! `Null`, or `addAll`/`removeAll` from `Null`) is the identity, while
//! mutating a `Null` collection in place is an error.

use std::collections::BTreeMap;

use crate::cfg::Cfg;

use super::value::{value_eq, OutputMap, Value};
use super::{BinOp, DslError, DslType, Expr, FixpointDecl, Program, Stmt, TraversalDecl};

/// Mutable evaluation state for one (program, graph) run.
#[derive(Debug)]
pub struct Session<'g> {
    pub graph: &'g Cfg,
    pub globals: BTreeMap<String, Value>,
    pub outputs: BTreeMap<String, OutputMap>,
}

impl<'g> Session<'g> {
    /// Fresh session; globals start at the neutral value for their type.
    pub fn new(program: &Program, graph: &'g Cfg) -> Self {
        let mut globals = BTreeMap::new();
        for g in &program.globals {
            globals.insert(g.name.clone(), default_value(&g.ty));
        }
        let outputs = program
            .traversals
            .iter()
            .map(|t| (t.name.clone(), OutputMap::new()))
            .collect();
        Session {
            graph,
            globals,
            outputs,
        }
    }

    pub fn output_map(&self, traversal: &str) -> Option<&OutputMap> {
        self.outputs.get(traversal)
    }

    pub fn store_output(&mut self, traversal: &str, node: usize, value: Value) {
        let map = self.outputs.entry(traversal.to_string()).or_default();
        if value == Value::Null {
            map.remove(&node);
        } else {
            map.insert(node, value);
        }
    }
}

fn default_value(ty: &DslType) -> Value {
    match ty {
        DslType::Int => Value::Int(0),
        DslType::Bool => Value::Bool(false),
        DslType::Str => Value::Str(String::new()),
        DslType::Node => Value::Null,
        DslType::Set(_) => Value::Set(Default::default()),
        DslType::Seq(_) => Value::Seq(Vec::new()),
    }
}

enum Flow {
    Normal,
    Return(Value),
}

/// Runs `t`'s body for the given node. Returns the `return`ed value, or
/// `Null` when the body falls through or the traversal declares no output.
pub fn eval_traversal_body(
    t: &TraversalDecl,
    node: usize,
    session: &mut Session<'_>,
) -> Result<Value, DslError> {
    let mut locals = BTreeMap::new();
    locals.insert(t.param.clone(), Value::NodeRef(node));
    // The visited node is also reachable under the conventional name.
    locals.entry("node".to_string()).or_insert(Value::NodeRef(node));
    let mut env = Env {
        session,
        locals,
    };
    match env.run_block(&t.body)? {
        Flow::Return(v) => Ok(v),
        Flow::Normal => Ok(Value::Null),
    }
}

/// Convergence test for one node: a user fixpoint function applied to
/// (current, previous), or structural equality when none is named.
pub fn eval_fixpoint(
    f: Option<&FixpointDecl>,
    current: &Value,
    previous: &Value,
    session: &mut Session<'_>,
) -> Result<bool, DslError> {
    match f {
        None => Ok(value_eq(current, previous)),
        Some(decl) => {
            let mut locals = BTreeMap::new();
            locals.insert(decl.params[0].0.clone(), current.clone());
            locals.insert(decl.params[1].0.clone(), previous.clone());
            let mut env = Env {
                session,
                locals,
            };
            match env.run_block(&decl.body)? {
                Flow::Return(Value::Bool(b)) => Ok(b),
                Flow::Return(_) | Flow::Normal => Err(DslError::NonBooleanFixpoint),
            }
        }
    }
}

struct Env<'a, 'g> {
    session: &'a mut Session<'g>,
    locals: BTreeMap<String, Value>,
}

impl Env<'_, '_> {
    fn run_block(&mut self, stmts: &[Stmt]) -> Result<Flow, DslError> {
        for s in stmts {
            if let Flow::Return(v) = self.run_stmt(s)? {
                return Ok(Flow::Return(v));
            }
        }
        Ok(Flow::Normal)
    }

    fn run_stmt(&mut self, stmt: &Stmt) -> Result<Flow, DslError> {
        match stmt {
            Stmt::Local { ty, name, init } => {
                let v = match init {
                    Some(e) => self.eval(e)?,
                    None => default_value(ty),
                };
                self.locals.insert(name.clone(), v);
                Ok(Flow::Normal)
            }
            Stmt::Assign { name, value } => {
                let v = self.eval(value)?;
                self.write_var(name, v);
                Ok(Flow::Normal)
            }
            Stmt::If {
                cond,
                then_body,
                else_body,
            } => {
                if self.eval_bool(cond)? {
                    self.run_stmt(then_body)
                } else if let Some(e) = else_body {
                    self.run_stmt(e)
                } else {
                    Ok(Flow::Normal)
                }
            }
            Stmt::Foreach {
                binder,
                items,
                body,
            } => {
                let collection = self.eval(items)?;
                let elems: Vec<Value> = match collection {
                    Value::Seq(items) => items,
                    Value::Set(items) => items.into_iter().collect(),
                    Value::Null => return Err(DslError::NullCollection("foreach")),
                    other => {
                        return Err(DslError::TypeMismatch {
                            context: "foreach",
                            expected: "Set or Seq",
                            got: other.type_name().into(),
                        })
                    }
                };
                let saved = self.locals.get(binder).cloned();
                for elem in elems {
                    self.locals.insert(binder.clone(), elem);
                    if let Flow::Return(v) = self.run_stmt(body)? {
                        self.restore(binder, saved);
                        return Ok(Flow::Return(v));
                    }
                }
                self.restore(binder, saved);
                Ok(Flow::Normal)
            }
            Stmt::Return(value) => {
                let v = match value {
                    Some(e) => self.eval(e)?,
                    None => Value::Null,
                };
                Ok(Flow::Return(v))
            }
            Stmt::Expr(e) => {
                self.eval(e)?;
                Ok(Flow::Normal)
            }
            Stmt::Block(stmts) => self.run_block(stmts),
        }
    }

    fn restore(&mut self, binder: &str, saved: Option<Value>) {
        match saved {
            Some(v) => {
                self.locals.insert(binder.to_string(), v);
            }
            None => {
                self.locals.remove(binder);
            }
        }
    }

    fn write_var(&mut self, name: &str, v: Value) {
        if self.locals.contains_key(name) {
            self.locals.insert(name.to_string(), v);
        } else if self.session.globals.contains_key(name) {
            self.session.globals.insert(name.to_string(), v);
        } else {
            self.locals.insert(name.to_string(), v);
        }
    }

    fn read_var(&self, name: &str) -> Result<Value, DslError> {
        if let Some(v) = self.locals.get(name) {
            return Ok(v.clone());
        }
        if let Some(v) = self.session.globals.get(name) {
            return Ok(v.clone());
        }
        match name {
            "exitNodeId" => Ok(Value::ExitIds(
                self.session.graph.exits.iter().map(|&e| e as i64).collect(),
            )),
            "entryNodeId" => Ok(Value::Int(self.session.graph.entry as i64)),
            _ => Err(DslError::UnknownName(name.to_string())),
        }
    }

    fn eval_bool(&mut self, e: &Expr) -> Result<bool, DslError> {
        match self.eval(e)? {
            Value::Bool(b) => Ok(b),
            other => Err(DslError::TypeMismatch {
                context: "condition",
                expected: "bool",
                got: other.type_name().into(),
            }),
        }
    }

    fn eval(&mut self, e: &Expr) -> Result<Value, DslError> {
        match e {
            Expr::Int(v) => Ok(Value::Int(*v)),
            Expr::Bool(b) => Ok(Value::Bool(*b)),
            Expr::Str(s) => Ok(Value::Str(s.clone())),
            Expr::Null => Ok(Value::Null),
            Expr::Ident(name) => self.read_var(name),
            Expr::SetLit(items) => {
                let mut set = std::collections::BTreeSet::new();
                for item in items {
                    set.insert(self.eval(item)?);
                }
                Ok(Value::Set(set))
            }
            Expr::Field(base, field) => {
                let v = self.eval(base)?;
                self.field(v, field)
            }
            Expr::Not(inner) => {
                let b = self.eval_bool(inner)?;
                Ok(Value::Bool(!b))
            }
            Expr::Binary(op, l, r) => match op {
                BinOp::Eq => {
                    let (a, b) = (self.eval(l)?, self.eval(r)?);
                    Ok(Value::Bool(value_eq(&a, &b)))
                }
                BinOp::Ne => {
                    let (a, b) = (self.eval(l)?, self.eval(r)?);
                    Ok(Value::Bool(!value_eq(&a, &b)))
                }
                BinOp::And => {
                    if !self.eval_bool(l)? {
                        return Ok(Value::Bool(false));
                    }
                    Ok(Value::Bool(self.eval_bool(r)?))
                }
                BinOp::Or => {
                    if self.eval_bool(l)? {
                        return Ok(Value::Bool(true));
                    }
                    Ok(Value::Bool(self.eval_bool(r)?))
                }
            },
            Expr::Call(name, args) => self.call(name, args),
        }
    }

    fn field(&self, v: Value, field: &str) -> Result<Value, DslError> {
        let id = match v {
            Value::NodeRef(id) => id,
            other => {
                return Err(DslError::TypeMismatch {
                    context: "field access",
                    expected: "Node",
                    got: other.type_name().into(),
                })
            }
        };
        let node = self.session.graph.node(id);
        match field {
            "id" => Ok(Value::Int(id as i64)),
            "succs" => Ok(Value::Seq(
                node.succs.iter().map(|&s| Value::NodeRef(s)).collect(),
            )),
            "preds" => Ok(Value::Seq(
                node.preds.iter().map(|&p| Value::NodeRef(p)).collect(),
            )),
            "defs" => Ok(Value::set_of_strings(node.stmt.defs.iter().cloned())),
            "uses" => Ok(Value::set_of_strings(node.stmt.uses.iter().cloned())),
            "exprs" => Ok(Value::set_of_strings(node.stmt.exprs.iter().cloned())),
            "kills" => Ok(Value::set_of_strings(
                self.session.graph.kills(id).iter().cloned(),
            )),
            "label" => Ok(node
                .stmt
                .label
                .clone()
                .map(Value::Str)
                .unwrap_or(Value::Null)),
            other => Err(DslError::UnknownField(other.to_string())),
        }
    }

    fn call(&mut self, name: &str, args: &[Expr]) -> Result<Value, DslError> {
        match name {
            "output" => {
                self.arity(name, args, 2)?;
                let node = match self.eval(&args[0])? {
                    Value::NodeRef(id) => id,
                    other => {
                        return Err(DslError::TypeMismatch {
                            context: "output()",
                            expected: "Node",
                            got: other.type_name().into(),
                        })
                    }
                };
                let traversal = match &args[1] {
                    Expr::Ident(t) => t,
                    _ => {
                        return Err(DslError::TypeMismatch {
                            context: "output()",
                            expected: "traversal name",
                            got: "expression".into(),
                        })
                    }
                };
                Ok(self
                    .session
                    .outputs
                    .get(traversal)
                    .and_then(|m| m.get(&node))
                    .cloned()
                    .unwrap_or(Value::Null))
            }
            "add" | "addAll" | "remove" | "removeAll" => self.mutate(name, args),
            "union" | "intersection" => {
                self.arity(name, args, 2)?;
                let a = self.eval(&args[0])?;
                let b = self.eval(&args[1])?;
                merge(name, a, b)
            }
            "equals" => {
                self.arity(name, args, 2)?;
                let a = self.eval(&args[0])?;
                let b = self.eval(&args[1])?;
                Ok(Value::Bool(value_eq(&a, &b)))
            }
            "contains" => {
                self.arity(name, args, 2)?;
                let c = self.eval(&args[0])?;
                let e = self.eval(&args[1])?;
                let found = match c {
                    Value::Set(items) => items.iter().any(|i| value_eq(i, &e)),
                    Value::Seq(items) => items.iter().any(|i| value_eq(i, &e)),
                    Value::Null => false,
                    other => {
                        return Err(DslError::TypeMismatch {
                            context: "contains",
                            expected: "Set or Seq",
                            got: other.type_name().into(),
                        })
                    }
                };
                Ok(Value::Bool(found))
            }
            other => Err(DslError::UnknownFunction(other.to_string())),
        }
    }

    /// In-place collection update; the first operand names a variable.
    fn mutate(&mut self, op: &str, args: &[Expr]) -> Result<Value, DslError> {
        self.arity(op, args, 2)?;
        let static_op: &'static str = match op {
            "add" => "add",
            "addAll" => "addAll",
            "remove" => "remove",
            "removeAll" => "removeAll",
            _ => unreachable!(),
        };
        let target = match &args[0] {
            Expr::Ident(n) => n.clone(),
            _ => return Err(DslError::NotAssignable(static_op)),
        };
        let rhs = self.eval(&args[1])?;
        let mut current = self.read_var(&target)?;
        if current == Value::Null {
            return Err(DslError::NullCollection(static_op));
        }
        apply_mutation(static_op, &mut current, rhs)?;
        self.write_var(&target, current);
        Ok(Value::Null)
    }

    fn arity(&self, name: &str, args: &[Expr], expected: usize) -> Result<(), DslError> {
        if args.len() != expected {
            Err(DslError::WrongArity {
                fun: name.to_string(),
                expected,
            })
        } else {
            Ok(())
        }
    }
}

pub(crate) fn apply_mutation(
    op: &'static str,
    target: &mut Value,
    rhs: Value,
) -> Result<(), DslError> {
    match (op, target) {
        ("add", Value::Set(items)) => {
            items.insert(rhs);
            Ok(())
        }
        ("add", Value::Seq(items)) => {
            items.push(rhs);
            Ok(())
        }
        ("remove", Value::Set(items)) => {
            items.retain(|i| !value_eq(i, &rhs));
            Ok(())
        }
        ("remove", Value::Seq(items)) => {
            items.retain(|i| !value_eq(i, &rhs));
            Ok(())
        }
        ("addAll", Value::Set(items)) => {
            for v in iter_collection(op, rhs)? {
                items.insert(v);
            }
            Ok(())
        }
        ("addAll", Value::Seq(items)) => {
            items.extend(iter_collection(op, rhs)?);
            Ok(())
        }
        ("removeAll", Value::Set(items)) => {
            let remove = iter_collection(op, rhs)?;
            items.retain(|i| !remove.iter().any(|r| value_eq(i, r)));
            Ok(())
        }
        ("removeAll", Value::Seq(items)) => {
            let remove = iter_collection(op, rhs)?;
            items.retain(|i| !remove.iter().any(|r| value_eq(i, r)));
            Ok(())
        }
        (_, other) => Err(DslError::TypeMismatch {
            context: "collection update",
            expected: "Set or Seq",
            got: other.type_name().into(),
        }),
    }
}

/// `addAll`/`removeAll` second operand: `Null` contributes nothing.
fn iter_collection(op: &'static str, v: Value) -> Result<Vec<Value>, DslError> {
    match v {
        Value::Set(items) => Ok(items.into_iter().collect()),
        Value::Seq(items) => Ok(items),
        Value::Null => Ok(Vec::new()),
        other => Err(DslError::TypeMismatch {
            context: if op == "addAll" { "addAll" } else { "removeAll" },
            expected: "Set, Seq or null",
            got: other.type_name().into(),
        }),
    }
}

/// `union`/`intersection`: pure, `Null` on either side is the identity.
pub(crate) fn merge(op: &str, a: Value, b: Value) -> Result<Value, DslError> {
    match (a, b) {
        (Value::Null, Value::Null) => Ok(Value::Null),
        (Value::Null, v) | (v, Value::Null) => Ok(v),
        (Value::Set(x), Value::Set(y)) => {
            if op == "union" {
                Ok(Value::Set(x.union(&y).cloned().collect()))
            } else {
                Ok(Value::Set(x.intersection(&y).cloned().collect()))
            }
        }
        (a, b) => Err(DslError::TypeMismatch {
            context: if op == "union" { "union" } else { "intersection" },
            expected: "Set operands",
            got: format!("{} and {}", a.type_name(), b.type_name()),
        }),
    }
}
