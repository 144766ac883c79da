//! Reader and writer for the KB text format.
//!
//! ```text
//! % comment
//! Edge(a,b).
//! Path(X,Y) :- Edge(X,Y).
//! Path(X,Z) :- Edge(X,Y), Path(Y,Z).
//! ```
//!
//! Constants start lowercase (or with a digit), variables start uppercase
//! (or with `_`). Whitespace, including newlines inside a statement, is
//! ignored.

use crate::error::{Error, Result};

use super::atom::{is_variable, AtomPattern, GroundAtom, KnowledgeBase, Rule, Term};
use super::engine::{ProofSystem, DEFAULT_GUARD};

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    LParen,
    RParen,
    Comma,
    Dot,
    Turnstile,
}

#[derive(Debug, Clone)]
struct Spanned {
    tok: Tok,
    line: usize,
    col: usize,
}

fn lex(text: &str) -> Result<Vec<Spanned>> {
    let mut out = Vec::new();
    for (li, raw) in text.lines().enumerate() {
        let line = li + 1;
        let src = match raw.find('%') {
            Some(i) => &raw[..i],
            None => raw,
        };
        let chars: Vec<(usize, char)> = src.char_indices().collect();
        let mut i = 0;
        while i < chars.len() {
            let (byte, c) = chars[i];
            let col = src[..byte].chars().count() + 1;
            let single = match c {
                '(' => Some(Tok::LParen),
                ')' => Some(Tok::RParen),
                ',' => Some(Tok::Comma),
                '.' => Some(Tok::Dot),
                _ => None,
            };
            if let Some(tok) = single {
                out.push(Spanned { tok, line, col });
                i += 1;
            } else if c.is_whitespace() {
                i += 1;
            } else if c == ':' {
                if chars.get(i + 1).map(|&(_, d)| d) == Some('-') {
                    out.push(Spanned {
                        tok: Tok::Turnstile,
                        line,
                        col,
                    });
                    i += 2;
                } else {
                    return Err(Error::Syntax {
                        line,
                        col,
                        msg: "expected ':-'".into(),
                    });
                }
            } else if c.is_ascii_alphanumeric() || c == '_' {
                let start = byte;
                while i < chars.len() && (chars[i].1.is_ascii_alphanumeric() || chars[i].1 == '_') {
                    i += 1;
                }
                let end = chars.get(i).map_or(src.len(), |&(b, _)| b);
                out.push(Spanned {
                    tok: Tok::Ident(src[start..end].to_owned()),
                    line,
                    col,
                });
            } else {
                return Err(Error::Syntax {
                    line,
                    col,
                    msg: format!("unexpected character {c:?}"),
                });
            }
        }
    }
    Ok(out)
}

struct Parser {
    toks: Vec<Spanned>,
    pos: usize,
    eof: (usize, usize),
}

impl Parser {
    fn peek(&self) -> Option<&Spanned> {
        self.toks.get(self.pos)
    }

    fn err_here(&self, msg: impl Into<String>) -> Error {
        let (line, col) = self.peek().map_or(self.eof, |t| (t.line, t.col));
        Error::Syntax {
            line,
            col,
            msg: msg.into(),
        }
    }

    fn expect(&mut self, want: &Tok, what: &str) -> Result<()> {
        match self.peek() {
            Some(t) if &t.tok == want => {
                self.pos += 1;
                Ok(())
            }
            _ => Err(self.err_here(format!("expected {what}"))),
        }
    }

    fn ident(&mut self, what: &str) -> Result<String> {
        match self.peek() {
            Some(Spanned { tok: Tok::Ident(s), .. }) => {
                let s = s.clone();
                self.pos += 1;
                Ok(s)
            }
            _ => Err(self.err_here(format!("expected {what}"))),
        }
    }

    fn pattern(&mut self) -> Result<AtomPattern> {
        let predicate = self.ident("predicate name")?;
        let mut terms = Vec::new();
        if matches!(self.peek(), Some(t) if t.tok == Tok::LParen) {
            self.pos += 1;
            if !matches!(self.peek(), Some(t) if t.tok == Tok::RParen) {
                loop {
                    let name = self.ident("term")?;
                    terms.push(if is_variable(&name) {
                        Term::Var(name)
                    } else {
                        Term::Const(name)
                    });
                    match self.peek() {
                        Some(t) if t.tok == Tok::Comma => self.pos += 1,
                        _ => break,
                    }
                }
            }
            self.expect(&Tok::RParen, "')'")?;
        }
        Ok(AtomPattern::new(predicate, terms))
    }
}

/// Parses KB text into facts and rules. Duplicate facts are merged.
pub fn parse_kb(text: &str) -> Result<(KnowledgeBase, ProofSystem)> {
    parse_kb_with_guard(text, DEFAULT_GUARD)
}

/// [`parse_kb`] with a custom cap on the grounded universe.
pub fn parse_kb_with_guard(text: &str, guard: u128) -> Result<(KnowledgeBase, ProofSystem)> {
    let toks = lex(text)?;
    let eof = (text.lines().count().max(1), 1);
    let mut p = Parser { toks, pos: 0, eof };
    let mut kb = KnowledgeBase::new();
    let mut rules = Vec::new();
    while let Some(start) = p.peek().cloned() {
        let head = p.pattern()?;
        match p.peek().map(|t| t.tok.clone()) {
            Some(Tok::Dot) => {
                p.pos += 1;
                let mut args = Vec::with_capacity(head.terms.len());
                for t in &head.terms {
                    match t {
                        Term::Const(c) => args.push(c.clone()),
                        Term::Var(v) => {
                            return Err(Error::Syntax {
                                line: start.line,
                                col: start.col,
                                msg: format!("fact contains variable {v}"),
                            })
                        }
                    }
                }
                kb.insert(GroundAtom::new(head.predicate, args)?);
            }
            Some(Tok::Turnstile) => {
                p.pos += 1;
                let mut body = vec![p.pattern()?];
                while matches!(p.peek(), Some(t) if t.tok == Tok::Comma) {
                    p.pos += 1;
                    body.push(p.pattern()?);
                }
                p.expect(&Tok::Dot, "'.' after rule body")?;
                let rule = Rule::new(head, body).map_err(|e| match e {
                    Error::RangeRestriction { var, .. } => Error::RangeRestriction { line: start.line, var },
                    other => other,
                })?;
                rules.push(rule);
            }
            _ => return Err(p.err_here("expected '.' or ':-'")),
        }
    }
    let ps = ProofSystem::new(rules).with_guard(guard);
    ps.check_guard(&kb)?;
    Ok((kb, ps))
}

/// Canonical text: rules in input order, then facts in canonical order.
pub fn serialize_kb(kb: &KnowledgeBase, ps: &ProofSystem) -> String {
    let mut out = String::new();
    for r in ps.rules() {
        out.push_str(&r.to_string());
        out.push('\n');
    }
    out.push_str(&kb.to_canonical_string());
    out
}
