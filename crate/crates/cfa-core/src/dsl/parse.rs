//! Recursive-descent parser. Statement terminators (`;`) are accepted but
//! not required, which keeps bodies with single-statement `foreach` arms
//! parseable exactly as analyses are usually written.

use super::lex::{lex, Spanned, Tok};
use super::{
    BinOp, Direction, DslError, DslType, Expr, FixpointDecl, GlobalDecl, Program, Stmt,
    TraversalDecl, TraverseStmt,
};

pub fn parse_program(src: &str) -> Result<Program, DslError> {
    let toks = lex(src)?;
    let mut p = Parser { toks, pos: 0 };
    let program = p.program()?;
    validate(&program)?;
    Ok(program)
}

fn validate(program: &Program) -> Result<(), DslError> {
    let mut names = std::collections::BTreeSet::new();
    for g in &program.globals {
        if !names.insert(g.name.clone()) {
            return Err(DslError::DuplicateName(g.name.clone()));
        }
    }
    for t in &program.traversals {
        if !names.insert(t.name.clone()) {
            return Err(DslError::DuplicateName(t.name.clone()));
        }
    }
    for f in &program.fixpoints {
        if !names.insert(f.name.clone()) {
            return Err(DslError::DuplicateName(f.name.clone()));
        }
        if f.params.len() != 2 {
            return Err(DslError::FixpointArity(f.name.clone()));
        }
    }
    for inv in &program.invocations {
        if program.traversal(&inv.traversal).is_none() {
            return Err(DslError::UnknownTraverseName(inv.traversal.clone()));
        }
        if let Some(fp) = &inv.fixpoint {
            if program.fixpoint(fp).is_none() {
                return Err(DslError::UnknownTraverseName(fp.clone()));
            }
        }
        if inv.graph != "g" {
            return Err(DslError::UnknownTraverseName(inv.graph.clone()));
        }
    }
    for t in &program.traversals {
        if t.return_type.is_none() && returns_value(&t.body) {
            return Err(DslError::ReturnWithoutType(t.name.clone()));
        }
        check_output_refs(&t.body, program)?;
    }
    for f in &program.fixpoints {
        check_output_refs(&f.body, program)?;
    }
    Ok(())
}

fn returns_value(body: &[Stmt]) -> bool {
    body.iter().any(|s| match s {
        Stmt::Return(Some(_)) => true,
        Stmt::Return(None) => false,
        Stmt::If {
            then_body,
            else_body,
            ..
        } => {
            returns_value(std::slice::from_ref(then_body))
                || else_body
                    .as_deref()
                    .is_some_and(|e| returns_value(std::slice::from_ref(e)))
        }
        Stmt::Foreach { body, .. } => returns_value(std::slice::from_ref(body)),
        Stmt::Block(stmts) => returns_value(stmts),
        _ => false,
    })
}

fn check_output_refs(body: &[Stmt], program: &Program) -> Result<(), DslError> {
    let mut err = None;
    walk_exprs(body, &mut |e| {
        if let Expr::Call(f, args) = e {
            if f == "output" && args.len() == 2 && err.is_none() {
                if let Expr::Ident(t) = &args[1] {
                    if program.traversal(t).is_none() {
                        err = Some(DslError::UnknownOutputTraversal(t.clone()));
                    }
                }
            }
        }
    });
    match err {
        Some(e) => Err(e),
        None => Ok(()),
    }
}

/// Applies `f` to every expression in the statement list, including nested
/// sub-expressions.
pub fn walk_exprs(body: &[Stmt], f: &mut impl FnMut(&Expr)) {
    fn expr(e: &Expr, f: &mut impl FnMut(&Expr)) {
        f(e);
        match e {
            Expr::SetLit(items) => items.iter().for_each(|i| expr(i, f)),
            Expr::Field(b, _) => expr(b, f),
            Expr::Call(_, args) => args.iter().for_each(|a| expr(a, f)),
            Expr::Binary(_, l, r) => {
                expr(l, f);
                expr(r, f);
            }
            Expr::Not(b) => expr(b, f),
            _ => {}
        }
    }
    fn stmt(s: &Stmt, f: &mut impl FnMut(&Expr)) {
        match s {
            Stmt::Local { init, .. } => {
                if let Some(e) = init {
                    expr(e, f);
                }
            }
            Stmt::Assign { value, .. } => expr(value, f),
            Stmt::If {
                cond,
                then_body,
                else_body,
            } => {
                expr(cond, f);
                stmt(then_body, f);
                if let Some(e) = else_body {
                    stmt(e, f);
                }
            }
            Stmt::Foreach { items, body, .. } => {
                expr(items, f);
                stmt(body, f);
            }
            Stmt::Return(Some(e)) => expr(e, f),
            Stmt::Return(None) => {}
            Stmt::Expr(e) => expr(e, f),
            Stmt::Block(stmts) => stmts.iter().for_each(|s| stmt(s, f)),
        }
    }
    body.iter().for_each(|s| stmt(s, f));
}

struct Parser {
    toks: Vec<Spanned>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|s| &s.tok)
    }

    fn peek2(&self) -> Option<&Tok> {
        self.toks.get(self.pos + 1).map(|s| &s.tok)
    }

    fn next(&mut self) -> Result<Spanned, DslError> {
        let t = self
            .toks
            .get(self.pos)
            .cloned()
            .ok_or_else(|| self.eof("unexpected end of input"))?;
        self.pos += 1;
        Ok(t)
    }

    fn eof(&self, msg: &str) -> DslError {
        let (line, col) = self
            .toks
            .last()
            .map(|t| (t.line, t.col))
            .unwrap_or((1, 1));
        DslError::Syntax {
            line,
            col,
            msg: msg.into(),
        }
    }

    fn error_here(&self, msg: String) -> DslError {
        match self.toks.get(self.pos) {
            Some(t) => DslError::Syntax {
                line: t.line,
                col: t.col,
                msg,
            },
            None => self.eof(&msg),
        }
    }

    fn expect(&mut self, want: Tok) -> Result<(), DslError> {
        match self.peek() {
            Some(t) if *t == want => {
                self.pos += 1;
                Ok(())
            }
            Some(t) => Err(self.error_here(format!(
                "expected {}, found {}",
                want.describe(),
                t.describe()
            ))),
            None => Err(self.eof(&format!("expected {}", want.describe()))),
        }
    }

    fn eat(&mut self, want: Tok) -> bool {
        if self.peek() == Some(&want) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn ident(&mut self) -> Result<String, DslError> {
        match self.next()? {
            Spanned {
                tok: Tok::Ident(s), ..
            } => Ok(s),
            t => Err(DslError::Syntax {
                line: t.line,
                col: t.col,
                msg: format!("expected identifier, found {}", t.tok.describe()),
            }),
        }
    }

    fn program(&mut self) -> Result<Program, DslError> {
        let mut program = Program {
            globals: Vec::new(),
            traversals: Vec::new(),
            fixpoints: Vec::new(),
            invocations: Vec::new(),
        };
        while let Some(tok) = self.peek() {
            match tok {
                Tok::Ident(id) if id == "traverse" => {
                    program.invocations.push(self.traverse_stmt()?);
                }
                Tok::Ident(_) => {
                    let name = self.ident()?;
                    match self.peek() {
                        Some(Tok::Colon) => {
                            self.expect(Tok::Colon)?;
                            let ty = self.ty()?;
                            self.eat(Tok::Semi);
                            program.globals.push(GlobalDecl { name, ty });
                        }
                        Some(Tok::ColonEq) => {
                            self.expect(Tok::ColonEq)?;
                            let kw = self.ident()?;
                            match kw.as_str() {
                                "traversal" => {
                                    program.traversals.push(self.traversal_decl(name)?)
                                }
                                "fixp" => program.fixpoints.push(self.fixpoint_decl(name)?),
                                other => {
                                    return Err(self.error_here(format!(
                                        "expected `traversal` or `fixp` after `:=`, found `{other}`"
                                    )))
                                }
                            }
                        }
                        _ => {
                            return Err(self
                                .error_here("expected `:` or `:=` in top-level declaration".into()))
                        }
                    }
                }
                other => {
                    return Err(self.error_here(format!(
                        "expected a declaration or traverse statement, found {}",
                        other.describe()
                    )))
                }
            }
        }
        Ok(program)
    }

    fn traverse_stmt(&mut self) -> Result<TraverseStmt, DslError> {
        self.ident()?; // `traverse`
        self.expect(Tok::LParen)?;
        let graph = self.ident()?;
        self.expect(Tok::Comma)?;
        let traversal = self.ident()?;
        self.expect(Tok::Comma)?;
        let dir = self.ident()?;
        let direction = match dir.as_str() {
            "FORWARD" => Direction::Forward,
            "BACKWARD" => Direction::Backward,
            "ITERATIVE" => Direction::Iterative,
            other => {
                return Err(self.error_here(format!(
                    "expected FORWARD, BACKWARD or ITERATIVE, found `{other}`"
                )))
            }
        };
        let fixpoint = if self.eat(Tok::Comma) {
            Some(self.ident()?)
        } else {
            None
        };
        self.expect(Tok::RParen)?;
        self.eat(Tok::Semi);
        Ok(TraverseStmt {
            graph,
            traversal,
            direction,
            fixpoint,
        })
    }

    fn traversal_decl(&mut self, name: String) -> Result<TraversalDecl, DslError> {
        self.expect(Tok::LParen)?;
        let (param, _ty) = self.param()?;
        self.expect(Tok::RParen)?;
        let return_type = if self.eat(Tok::Colon) {
            Some(self.ty()?)
        } else {
            None
        };
        let body = self.block_body()?;
        Ok(TraversalDecl {
            name,
            param,
            return_type,
            body,
        })
    }

    fn fixpoint_decl(&mut self, name: String) -> Result<FixpointDecl, DslError> {
        self.expect(Tok::LParen)?;
        let mut params = Vec::new();
        if self.peek() != Some(&Tok::RParen) {
            loop {
                params.push(self.param()?);
                if !self.eat(Tok::Comma) {
                    break;
                }
            }
        }
        self.expect(Tok::RParen)?;
        self.expect(Tok::Colon)?;
        let ret = self.ty()?;
        if ret != DslType::Bool {
            return Err(DslError::FixpointNotBool(name));
        }
        let body = self.block_body()?;
        Ok(FixpointDecl { name, params, body })
    }

    /// Accepts both `name: Type` and `Type name`.
    fn param(&mut self) -> Result<(String, DslType), DslError> {
        if self.starts_type() {
            let ty = self.ty()?;
            let name = self.ident()?;
            Ok((name, ty))
        } else {
            let name = self.ident()?;
            self.expect(Tok::Colon)?;
            let ty = self.ty()?;
            Ok((name, ty))
        }
    }

    fn starts_type(&self) -> bool {
        match self.peek() {
            Some(Tok::Ident(s)) => match s.as_str() {
                "Set" | "Seq" => true,
                "int" | "bool" | "string" | "Node" => {
                    // `int x` is a declaration; `int: ...` or a bare use is not.
                    matches!(self.peek2(), Some(Tok::Ident(_)))
                }
                _ => false,
            },
            _ => false,
        }
    }

    fn ty(&mut self) -> Result<DslType, DslError> {
        let name = self.ident()?;
        match name.as_str() {
            "int" => Ok(DslType::Int),
            "bool" => Ok(DslType::Bool),
            "string" => Ok(DslType::Str),
            "Node" => Ok(DslType::Node),
            "Set" | "Seq" => {
                self.expect(Tok::Lt)?;
                let elem = self.ty()?;
                self.expect(Tok::Gt)?;
                if name == "Set" {
                    Ok(DslType::Set(Box::new(elem)))
                } else {
                    Ok(DslType::Seq(Box::new(elem)))
                }
            }
            other => Err(self.error_here(format!("unknown type `{other}`"))),
        }
    }

    fn block_body(&mut self) -> Result<Vec<Stmt>, DslError> {
        self.expect(Tok::LBrace)?;
        let mut body = Vec::new();
        while self.peek() != Some(&Tok::RBrace) {
            if self.peek().is_none() {
                return Err(self.eof("unterminated block"));
            }
            body.push(self.stmt()?);
        }
        self.expect(Tok::RBrace)?;
        Ok(body)
    }

    fn stmt(&mut self) -> Result<Stmt, DslError> {
        match self.peek() {
            Some(Tok::LBrace) => Ok(Stmt::Block(self.block_body()?)),
            Some(Tok::Ident(id)) => match id.as_str() {
                "if" => self.if_stmt(),
                "foreach" => self.foreach_stmt(),
                "return" => {
                    self.ident()?;
                    let value = match self.peek() {
                        Some(Tok::Semi) | Some(Tok::RBrace) | None => None,
                        _ => Some(self.expr()?),
                    };
                    self.eat(Tok::Semi);
                    Ok(Stmt::Return(value))
                }
                _ if self.starts_type() => {
                    let ty = self.ty()?;
                    let name = self.ident()?;
                    let init = if self.eat(Tok::Assign) {
                        Some(self.expr()?)
                    } else {
                        None
                    };
                    self.eat(Tok::Semi);
                    Ok(Stmt::Local { ty, name, init })
                }
                _ => {
                    if matches!(self.peek2(), Some(Tok::Assign)) {
                        let name = self.ident()?;
                        self.expect(Tok::Assign)?;
                        let value = self.expr()?;
                        self.eat(Tok::Semi);
                        Ok(Stmt::Assign { name, value })
                    } else {
                        let e = self.expr()?;
                        self.eat(Tok::Semi);
                        Ok(Stmt::Expr(e))
                    }
                }
            },
            _ => {
                let e = self.expr()?;
                self.eat(Tok::Semi);
                Ok(Stmt::Expr(e))
            }
        }
    }

    fn if_stmt(&mut self) -> Result<Stmt, DslError> {
        self.ident()?; // `if`
        self.expect(Tok::LParen)?;
        let cond = self.expr()?;
        self.expect(Tok::RParen)?;
        let then_body = Box::new(self.stmt()?);
        let else_body = if matches!(self.peek(), Some(Tok::Ident(s)) if s == "else") {
            self.ident()?;
            Some(Box::new(self.stmt()?))
        } else {
            None
        };
        Ok(Stmt::If {
            cond,
            then_body,
            else_body,
        })
    }

    fn foreach_stmt(&mut self) -> Result<Stmt, DslError> {
        self.ident()?; // `foreach`
        self.expect(Tok::LParen)?;
        let binder = self.ident()?;
        self.expect(Tok::Colon)?;
        let items = self.expr()?;
        self.expect(Tok::RParen)?;
        let body = Box::new(self.stmt()?);
        Ok(Stmt::Foreach {
            binder,
            items,
            body,
        })
    }

    fn expr(&mut self) -> Result<Expr, DslError> {
        self.or_expr()
    }

    fn or_expr(&mut self) -> Result<Expr, DslError> {
        let mut lhs = self.and_expr()?;
        while self.eat(Tok::OrOr) {
            let rhs = self.and_expr()?;
            lhs = Expr::Binary(BinOp::Or, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn and_expr(&mut self) -> Result<Expr, DslError> {
        let mut lhs = self.eq_expr()?;
        while self.eat(Tok::AndAnd) {
            let rhs = self.eq_expr()?;
            lhs = Expr::Binary(BinOp::And, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn eq_expr(&mut self) -> Result<Expr, DslError> {
        let mut lhs = self.unary_expr()?;
        loop {
            let op = match self.peek() {
                Some(Tok::Eq) => BinOp::Eq,
                Some(Tok::Ne) => BinOp::Ne,
                _ => break,
            };
            self.pos += 1;
            let rhs = self.unary_expr()?;
            lhs = Expr::Binary(op, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn unary_expr(&mut self) -> Result<Expr, DslError> {
        if self.eat(Tok::Bang) {
            Ok(Expr::Not(Box::new(self.unary_expr()?)))
        } else {
            self.postfix_expr()
        }
    }

    fn postfix_expr(&mut self) -> Result<Expr, DslError> {
        let mut e = self.primary_expr()?;
        while self.eat(Tok::Dot) {
            let field = self.ident()?;
            e = Expr::Field(Box::new(e), field);
        }
        Ok(e)
    }

    fn primary_expr(&mut self) -> Result<Expr, DslError> {
        match self.peek() {
            Some(Tok::Int(_)) => {
                if let Tok::Int(v) = self.next()?.tok {
                    Ok(Expr::Int(v))
                } else {
                    unreachable!()
                }
            }
            Some(Tok::Str(_)) => {
                if let Tok::Str(s) = self.next()?.tok {
                    Ok(Expr::Str(s))
                } else {
                    unreachable!()
                }
            }
            Some(Tok::LBrace) => {
                self.expect(Tok::LBrace)?;
                let mut items = Vec::new();
                if self.peek() != Some(&Tok::RBrace) {
                    loop {
                        items.push(self.expr()?);
                        if !self.eat(Tok::Comma) {
                            break;
                        }
                    }
                }
                self.expect(Tok::RBrace)?;
                Ok(Expr::SetLit(items))
            }
            Some(Tok::LParen) => {
                self.expect(Tok::LParen)?;
                let e = self.expr()?;
                self.expect(Tok::RParen)?;
                Ok(e)
            }
            Some(Tok::Ident(_)) => {
                let name = self.ident()?;
                match name.as_str() {
                    "null" => Ok(Expr::Null),
                    "true" => Ok(Expr::Bool(true)),
                    "false" => Ok(Expr::Bool(false)),
                    _ => {
                        if self.peek() == Some(&Tok::LParen) {
                            self.expect(Tok::LParen)?;
                            let mut args = Vec::new();
                            if self.peek() != Some(&Tok::RParen) {
                                loop {
                                    args.push(self.expr()?);
                                    if !self.eat(Tok::Comma) {
                                        break;
                                    }
                                }
                            }
                            self.expect(Tok::RParen)?;
                            Ok(Expr::Call(name, args))
                        } else {
                            Ok(Expr::Ident(name))
                        }
                    }
                }
            }
            Some(other) => {
                let msg = format!("expected expression, found {}", other.describe());
                Err(self.error_here(msg))
            }
            None => Err(self.eof("expected expression")),
        }
    }
}
