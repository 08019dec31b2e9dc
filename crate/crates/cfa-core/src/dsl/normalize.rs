//! Three-address normalization: `output(...)` calls nested inside other
//! call arguments are hoisted into fresh temporaries so the property
//! detectors only ever see `v = output(n', t')` assignments.

use std::collections::BTreeSet;

use super::parse::walk_exprs;
use super::{Expr, Stmt, TraversalDecl};

pub fn normalize_three_address(t: &TraversalDecl) -> TraversalDecl {
    let mut used = BTreeSet::new();
    walk_exprs(&t.body, &mut |e| {
        if let Expr::Ident(n) = e {
            used.insert(n.clone());
        }
        if let Expr::Call(n, _) = e {
            used.insert(n.clone());
        }
    });
    let mut fresh = TempNames { used, next: 0 };
    TraversalDecl {
        name: t.name.clone(),
        param: t.param.clone(),
        return_type: t.return_type.clone(),
        body: norm_stmts(&t.body, &mut fresh),
    }
}

struct TempNames {
    used: BTreeSet<String>,
    next: usize,
}

impl TempNames {
    fn fresh(&mut self) -> String {
        loop {
            let name = format!("tmp{}", self.next);
            self.next += 1;
            if self.used.insert(name.clone()) {
                return name;
            }
        }
    }
}

fn norm_stmts(stmts: &[Stmt], fresh: &mut TempNames) -> Vec<Stmt> {
    let mut out = Vec::with_capacity(stmts.len());
    for s in stmts {
        let mut pre = Vec::new();
        let rewritten = norm_stmt(s, &mut pre, fresh);
        out.extend(pre);
        out.push(rewritten);
    }
    out
}

/// Normalizes a statement used as a nested body (if/foreach arm): hoisted
/// temporaries stay inside the arm.
fn norm_nested(s: &Stmt, fresh: &mut TempNames) -> Stmt {
    let mut pre = Vec::new();
    let rewritten = norm_stmt(s, &mut pre, fresh);
    if pre.is_empty() {
        rewritten
    } else {
        pre.push(rewritten);
        Stmt::Block(pre)
    }
}

fn norm_stmt(s: &Stmt, pre: &mut Vec<Stmt>, fresh: &mut TempNames) -> Stmt {
    match s {
        Stmt::Local { ty, name, init } => Stmt::Local {
            ty: ty.clone(),
            name: name.clone(),
            init: init.as_ref().map(|e| norm_expr(e, pre, fresh)),
        },
        Stmt::Assign { name, value } => Stmt::Assign {
            name: name.clone(),
            value: norm_expr(value, pre, fresh),
        },
        Stmt::If {
            cond,
            then_body,
            else_body,
        } => Stmt::If {
            cond: norm_expr(cond, pre, fresh),
            then_body: Box::new(norm_nested(then_body, fresh)),
            else_body: else_body.as_ref().map(|e| Box::new(norm_nested(e, fresh))),
        },
        Stmt::Foreach {
            binder,
            items,
            body,
        } => Stmt::Foreach {
            binder: binder.clone(),
            items: norm_expr(items, pre, fresh),
            body: Box::new(norm_nested(body, fresh)),
        },
        Stmt::Return(value) => Stmt::Return(value.as_ref().map(|e| norm_expr(e, pre, fresh))),
        Stmt::Expr(e) => Stmt::Expr(norm_expr(e, pre, fresh)),
        Stmt::Block(stmts) => Stmt::Block(norm_stmts(stmts, fresh)),
    }
}

fn is_output_call(e: &Expr) -> bool {
    matches!(e, Expr::Call(f, _) if f == "output")
}

fn norm_expr(e: &Expr, pre: &mut Vec<Stmt>, fresh: &mut TempNames) -> Expr {
    match e {
        Expr::SetLit(items) => {
            Expr::SetLit(items.iter().map(|i| norm_expr(i, pre, fresh)).collect())
        }
        Expr::Field(base, field) => {
            Expr::Field(Box::new(norm_expr(base, pre, fresh)), field.clone())
        }
        Expr::Not(inner) => Expr::Not(Box::new(norm_expr(inner, pre, fresh))),
        Expr::Binary(op, l, r) => Expr::Binary(
            *op,
            Box::new(norm_expr(l, pre, fresh)),
            Box::new(norm_expr(r, pre, fresh)),
        ),
        Expr::Call(f, args) => {
            let args: Vec<Expr> = args.iter().map(|a| norm_expr(a, pre, fresh)).collect();
            if f == "output" {
                return Expr::Call(f.clone(), args);
            }
            let args = args
                .into_iter()
                .map(|a| {
                    if is_output_call(&a) {
                        let tmp = fresh.fresh();
                        pre.push(Stmt::Assign {
                            name: tmp.clone(),
                            value: a,
                        });
                        Expr::Ident(tmp)
                    } else {
                        a
                    }
                })
                .collect();
            Expr::Call(f.clone(), args)
        }
        other => other.clone(),
    }
}
