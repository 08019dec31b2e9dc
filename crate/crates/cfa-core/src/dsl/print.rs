//! Canonical source form. `parse(print(p))` reproduces the same AST.

use std::fmt;

use super::{BinOp, Expr, Program, Stmt};

impl fmt::Display for Program {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for g in &self.globals {
            writeln!(f, "{}: {};", g.name, g.ty)?;
        }
        for t in &self.traversals {
            write!(f, "{} := traversal({}: Node)", t.name, t.param)?;
            if let Some(ty) = &t.return_type {
                write!(f, ": {ty}")?;
            }
            writeln!(f, " {{")?;
            for s in &t.body {
                write_stmt(f, s, 1)?;
            }
            writeln!(f, "}}")?;
        }
        for fp in &self.fixpoints {
            let params: Vec<String> = fp
                .params
                .iter()
                .map(|(n, ty)| format!("{ty} {n}"))
                .collect();
            writeln!(f, "{} := fixp({}): bool {{", fp.name, params.join(", "))?;
            for s in &fp.body {
                write_stmt(f, s, 1)?;
            }
            writeln!(f, "}}")?;
        }
        for inv in &self.invocations {
            match &inv.fixpoint {
                Some(fp) => writeln!(
                    f,
                    "traverse({}, {}, {}, {});",
                    inv.graph, inv.traversal, inv.direction, fp
                )?,
                None => writeln!(
                    f,
                    "traverse({}, {}, {});",
                    inv.graph, inv.traversal, inv.direction
                )?,
            }
        }
        Ok(())
    }
}

fn indent(f: &mut fmt::Formatter<'_>, level: usize) -> fmt::Result {
    for _ in 0..level {
        f.write_str("    ")?;
    }
    Ok(())
}

fn write_stmt(f: &mut fmt::Formatter<'_>, s: &Stmt, level: usize) -> fmt::Result {
    match s {
        Stmt::Local { ty, name, init } => {
            indent(f, level)?;
            match init {
                Some(e) => writeln!(f, "{ty} {name} = {};", ExprFmt(e)),
                None => writeln!(f, "{ty} {name};"),
            }
        }
        Stmt::Assign { name, value } => {
            indent(f, level)?;
            writeln!(f, "{name} = {};", ExprFmt(value))
        }
        Stmt::If {
            cond,
            then_body,
            else_body,
        } => {
            indent(f, level)?;
            writeln!(f, "if ({})", ExprFmt(cond))?;
            write_stmt(f, then_body, level + 1)?;
            if let Some(e) = else_body {
                indent(f, level)?;
                writeln!(f, "else")?;
                write_stmt(f, e, level + 1)?;
            }
            Ok(())
        }
        Stmt::Foreach {
            binder,
            items,
            body,
        } => {
            indent(f, level)?;
            writeln!(f, "foreach ({binder} : {})", ExprFmt(items))?;
            write_stmt(f, body, level + 1)
        }
        Stmt::Return(value) => {
            indent(f, level)?;
            match value {
                Some(e) => writeln!(f, "return {};", ExprFmt(e)),
                None => writeln!(f, "return;"),
            }
        }
        Stmt::Expr(e) => {
            indent(f, level)?;
            writeln!(f, "{};", ExprFmt(e))
        }
        Stmt::Block(stmts) => {
            indent(f, level)?;
            writeln!(f, "{{")?;
            for s in stmts {
                write_stmt(f, s, level + 1)?;
            }
            indent(f, level)?;
            writeln!(f, "}}")
        }
    }
}

struct ExprFmt<'a>(&'a Expr);

impl fmt::Display for ExprFmt<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.0 {
            Expr::Int(v) => write!(f, "{v}"),
            Expr::Bool(b) => write!(f, "{b}"),
            Expr::Str(s) => write!(f, "\"{s}\""),
            Expr::Null => f.write_str("null"),
            Expr::Ident(n) => f.write_str(n),
            Expr::SetLit(items) => {
                f.write_str("{")?;
                for (i, e) in items.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{}", ExprFmt(e))?;
                }
                f.write_str("}")
            }
            Expr::Field(base, field) => write!(f, "{}.{field}", ExprFmt(base)),
            Expr::Call(name, args) => {
                write!(f, "{name}(")?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{}", ExprFmt(a))?;
                }
                f.write_str(")")
            }
            Expr::Binary(op, l, r) => {
                let op = match op {
                    BinOp::Eq => "==",
                    BinOp::Ne => "!=",
                    BinOp::And => "&&",
                    BinOp::Or => "||",
                };
                write!(f, "({} {op} {})", ExprFmt(l), ExprFmt(r))
            }
            Expr::Not(e) => write!(f, "!({})", ExprFmt(e)),
        }
    }
}
