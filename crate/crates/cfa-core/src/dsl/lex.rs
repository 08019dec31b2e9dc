//! Hand-rolled lexer with line/column tracking. `//` comments run to end of
//! line.

use super::DslError;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Tok {
    Ident(String),
    Int(i64),
    Str(String),
    LParen,
    RParen,
    LBrace,
    RBrace,
    Lt,
    Gt,
    Comma,
    Semi,
    Colon,
    ColonEq,
    Dot,
    Assign,
    Eq,
    Ne,
    AndAnd,
    OrOr,
    Bang,
}

impl Tok {
    pub fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Int(i) => format!("`{i}`"),
            Tok::Str(_) => "string literal".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::LBrace => "`{`".into(),
            Tok::RBrace => "`}`".into(),
            Tok::Lt => "`<`".into(),
            Tok::Gt => "`>`".into(),
            Tok::Comma => "`,`".into(),
            Tok::Semi => "`;`".into(),
            Tok::Colon => "`:`".into(),
            Tok::ColonEq => "`:=`".into(),
            Tok::Dot => "`.`".into(),
            Tok::Assign => "`=`".into(),
            Tok::Eq => "`==`".into(),
            Tok::Ne => "`!=`".into(),
            Tok::AndAnd => "`&&`".into(),
            Tok::OrOr => "`||`".into(),
            Tok::Bang => "`!`".into(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Spanned {
    pub tok: Tok,
    pub line: usize,
    pub col: usize,
}

pub fn lex(src: &str) -> Result<Vec<Spanned>, DslError> {
    let mut out = Vec::new();
    let mut chars = src.char_indices().peekable();
    let mut line = 1usize;
    let mut col = 1usize;

    macro_rules! push {
        ($tok:expr, $c:expr) => {
            out.push(Spanned {
                tok: $tok,
                line,
                col: $c,
            })
        };
    }

    while let Some((_, c)) = chars.next() {
        let start_col = col;
        col += 1;
        match c {
            '\n' => {
                line += 1;
                col = 1;
            }
            c if c.is_whitespace() => {}
            '/' => match chars.peek() {
                Some((_, '/')) => {
                    while let Some((_, c)) = chars.next() {
                        col += 1;
                        if c == '\n' {
                            line += 1;
                            col = 1;
                            break;
                        }
                    }
                }
                _ => {
                    return Err(DslError::Lex {
                        line,
                        col: start_col,
                        msg: "unexpected `/`".into(),
                    })
                }
            },
            '(' => push!(Tok::LParen, start_col),
            ')' => push!(Tok::RParen, start_col),
            '{' => push!(Tok::LBrace, start_col),
            '}' => push!(Tok::RBrace, start_col),
            '<' => push!(Tok::Lt, start_col),
            '>' => push!(Tok::Gt, start_col),
            ',' => push!(Tok::Comma, start_col),
            ';' => push!(Tok::Semi, start_col),
            '.' => push!(Tok::Dot, start_col),
            ':' => {
                if matches!(chars.peek(), Some((_, '='))) {
                    chars.next();
                    col += 1;
                    push!(Tok::ColonEq, start_col);
                } else {
                    push!(Tok::Colon, start_col);
                }
            }
            '=' => {
                if matches!(chars.peek(), Some((_, '='))) {
                    chars.next();
                    col += 1;
                    push!(Tok::Eq, start_col);
                } else {
                    push!(Tok::Assign, start_col);
                }
            }
            '!' => {
                if matches!(chars.peek(), Some((_, '='))) {
                    chars.next();
                    col += 1;
                    push!(Tok::Ne, start_col);
                } else {
                    push!(Tok::Bang, start_col);
                }
            }
            '&' => {
                if matches!(chars.peek(), Some((_, '&'))) {
                    chars.next();
                    col += 1;
                    push!(Tok::AndAnd, start_col);
                } else {
                    return Err(DslError::Lex {
                        line,
                        col: start_col,
                        msg: "expected `&&`".into(),
                    });
                }
            }
            '|' => {
                if matches!(chars.peek(), Some((_, '|'))) {
                    chars.next();
                    col += 1;
                    push!(Tok::OrOr, start_col);
                } else {
                    return Err(DslError::Lex {
                        line,
                        col: start_col,
                        msg: "expected `||`".into(),
                    });
                }
            }
            '"' => {
                let mut s = String::new();
                let mut closed = false;
                while let Some((_, c)) = chars.next() {
                    col += 1;
                    if c == '"' {
                        closed = true;
                        break;
                    }
                    if c == '\n' {
                        break;
                    }
                    s.push(c);
                }
                if !closed {
                    return Err(DslError::Lex {
                        line,
                        col: start_col,
                        msg: "unterminated string literal".into(),
                    });
                }
                push!(Tok::Str(s), start_col);
            }
            c if c.is_ascii_digit() => {
                let mut n = String::from(c);
                while let Some((_, d)) = chars.peek() {
                    if d.is_ascii_digit() {
                        n.push(*d);
                        chars.next();
                        col += 1;
                    } else {
                        break;
                    }
                }
                let v = n.parse().map_err(|_| DslError::Lex {
                    line,
                    col: start_col,
                    msg: format!("integer literal `{n}` out of range"),
                })?;
                push!(Tok::Int(v), start_col);
            }
            c if c.is_alphabetic() || c == '_' => {
                let mut s = String::from(c);
                while let Some((_, d)) = chars.peek() {
                    if d.is_alphanumeric() || *d == '_' {
                        s.push(*d);
                        chars.next();
                        col += 1;
                    } else {
                        break;
                    }
                }
                push!(Tok::Ident(s), start_col);
            }
            other => {
                return Err(DslError::Lex {
                    line,
                    col: start_col,
                    msg: format!("unexpected character `{other}`"),
                })
            }
        }
    }
    Ok(out)
}
