//! Line-oriented CFG file format.
//!
//! ```text
//! graph <name> [loop] [branch]
//! node <id> <entry|exit|normal> [def=a,b] [use=c] [expr=e1] [label="..."]
//! edge <src-id> <dst-id>
//! ```
//!
//! `#` starts a comment. Declared flags fix the cyclicity after a
//! consistency check against the structural loop detection.

use super::{Cfg, CfgBuilder, CfgError, Cyclicity, Stmt, StmtKind};

/// Renders a graph back into the file format, with flags matching its
/// cyclicity. `parse_cfg(render_cfg(g))` reproduces the graph.
pub fn render_cfg(g: &Cfg) -> String {
    let flags = match g.cyclicity {
        Cyclicity::Sequential => "",
        Cyclicity::BranchOnly => " branch",
        Cyclicity::LoopNoBranch => " loop",
        Cyclicity::LoopWithBranch => " loop branch",
    };
    let mut out = format!("graph {}{}\n", g.name, flags);
    for node in &g.nodes {
        let kind = match node.stmt.kind {
            StmtKind::Entry => "entry",
            StmtKind::Exit => "exit",
            StmtKind::Normal => "normal",
        };
        out.push_str(&format!("node {} {}", node.id, kind));
        let join = |set: &std::collections::BTreeSet<String>| {
            set.iter().cloned().collect::<Vec<_>>().join(",")
        };
        if !node.stmt.defs.is_empty() {
            out.push_str(&format!(" def={}", join(&node.stmt.defs)));
        }
        if !node.stmt.uses.is_empty() {
            out.push_str(&format!(" use={}", join(&node.stmt.uses)));
        }
        if !node.stmt.exprs.is_empty() {
            out.push_str(&format!(" expr={}", join(&node.stmt.exprs)));
        }
        if let Some(label) = &node.stmt.label {
            out.push_str(&format!(" label=\"{label}\""));
        }
        out.push('\n');
    }
    for node in &g.nodes {
        for &s in &node.succs {
            out.push_str(&format!("edge {} {}\n", node.id, s));
        }
    }
    out
}

pub fn parse_cfg(text: &str) -> Result<Cfg, CfgError> {
    let mut builder: Option<CfgBuilder> = None;
    for (lineno, raw) in text.lines().enumerate() {
        let line = lineno + 1;
        let content = match raw.find('#') {
            Some(pos) => &raw[..pos],
            None => raw,
        };
        if content.trim().is_empty() {
            continue;
        }
        let mut fields = Tokens::new(content, line);
        let keyword = fields.next_word()?;
        match keyword.text {
            "graph" => {
                if builder.is_some() {
                    return Err(err(line, keyword.col, "duplicate graph header"));
                }
                let name = fields.next_word()?;
                let mut loop_flag = false;
                let mut branch_flag = false;
                let mut any = false;
                while let Some(flag) = fields.try_next_word() {
                    match flag.text {
                        "loop" => loop_flag = true,
                        "branch" => branch_flag = true,
                        other => {
                            return Err(err(line, flag.col, format!("unknown flag `{other}`")));
                        }
                    }
                    any = true;
                }
                let mut b = CfgBuilder::new(name.text);
                if any {
                    b.declare_flags(loop_flag, branch_flag);
                }
                builder = Some(b);
            }
            "node" => {
                let b = builder
                    .as_mut()
                    .ok_or_else(|| err(line, keyword.col, "node before graph header"))?;
                let id = fields.next_word()?.parse_usize()?;
                let kind_tok = fields.next_word()?;
                let kind = match kind_tok.text {
                    "entry" => StmtKind::Entry,
                    "exit" => StmtKind::Exit,
                    "normal" => StmtKind::Normal,
                    other => {
                        return Err(err(line, kind_tok.col, format!("unknown kind `{other}`")));
                    }
                };
                let mut stmt = Stmt {
                    kind,
                    ..Stmt::default()
                };
                while let Some(attr) = fields.try_next_word() {
                    let (key, value) = attr.split_attr()?;
                    match key {
                        "def" => stmt.defs.extend(split_names(value, line, attr.col)?),
                        "use" => stmt.uses.extend(split_names(value, line, attr.col)?),
                        "expr" => stmt.exprs.extend(split_names(value, line, attr.col)?),
                        "label" => {
                            let trimmed = value.trim_matches('"');
                            stmt.label = Some(trimmed.to_string());
                        }
                        other => {
                            return Err(err(
                                line,
                                attr.col,
                                format!("unknown node attribute `{other}`"),
                            ));
                        }
                    }
                }
                b.add_node(id, stmt)?;
            }
            "edge" => {
                let b = builder
                    .as_mut()
                    .ok_or_else(|| err(line, keyword.col, "edge before graph header"))?;
                let src = fields.next_word()?.parse_usize()?;
                let dst = fields.next_word()?.parse_usize()?;
                b.add_edge(src, dst)?;
            }
            other => {
                return Err(err(line, keyword.col, format!("unknown directive `{other}`")));
            }
        }
        if let Some(extra) = fields.try_next_word() {
            return Err(err(
                line,
                extra.col,
                format!("unexpected trailing token `{}`", extra.text),
            ));
        }
    }
    builder
        .ok_or_else(|| err(1, 1, "missing graph header"))?
        .build()
}

fn split_names(value: &str, line: usize, col: usize) -> Result<Vec<String>, CfgError> {
    value
        .split(',')
        .map(|v| {
            let v = v.trim();
            if v.is_empty() {
                Err(err(line, col, "empty name in attribute list"))
            } else {
                Ok(v.to_string())
            }
        })
        .collect()
}

fn err(line: usize, col: usize, msg: impl Into<String>) -> CfgError {
    CfgError::Syntax {
        line,
        col,
        msg: msg.into(),
    }
}

struct Word<'a> {
    text: &'a str,
    col: usize,
    line: usize,
}

impl<'a> Word<'a> {
    fn parse_usize(&self) -> Result<usize, CfgError> {
        self.text
            .parse()
            .map_err(|_| err(self.line, self.col, format!("expected node id, got `{}`", self.text)))
    }

    fn split_attr(&self) -> Result<(&'a str, &'a str), CfgError> {
        self.text
            .split_once('=')
            .ok_or_else(|| err(self.line, self.col, format!("expected key=value, got `{}`", self.text)))
    }
}

/// Whitespace tokenizer that keeps quoted label values intact and tracks
/// column positions for error messages.
struct Tokens<'a> {
    rest: &'a str,
    consumed: usize,
    line: usize,
}

impl<'a> Tokens<'a> {
    fn new(content: &'a str, line: usize) -> Self {
        Tokens {
            rest: content,
            consumed: 0,
            line,
        }
    }

    fn try_next_word(&mut self) -> Option<Word<'a>> {
        let trimmed = self.rest.trim_start();
        self.consumed += self.rest.len() - trimmed.len();
        self.rest = trimmed;
        if self.rest.is_empty() {
            return None;
        }
        let col = self.consumed + 1;
        let mut end = self.rest.len();
        let mut in_quotes = false;
        for (i, ch) in self.rest.char_indices() {
            match ch {
                '"' => in_quotes = !in_quotes,
                c if c.is_whitespace() && !in_quotes => {
                    end = i;
                    break;
                }
                _ => {}
            }
        }
        let (word, rest) = self.rest.split_at(end);
        self.rest = rest;
        self.consumed += end;
        Some(Word {
            text: word,
            col,
            line: self.line,
        })
    }

    fn next_word(&mut self) -> Result<Word<'a>, CfgError> {
        self.try_next_word()
            .ok_or_else(|| err(self.line, self.consumed + 1, "unexpected end of line"))
    }
}
