//! Concrete syntax.
//!
//! ```text
//! P ::= P | P          parallel (lowest precedence)
//!     | G + G          sum of guards
//!     | 0 | tau.P | a(x).P | a<b>.P
//!     | a.P | a^.P     CCS sugar: a(z).P with z fresh, a<a>.P
//!     | new a. P | (^a)P
//!     | !G | ( P )
//! ```
//! A prefix without continuation means `.0`. Prefixes, restriction and
//! replication bind tighter than `+` and `|`. `#` starts a comment.

use std::collections::BTreeSet;

use thiserror::Error;

use super::{alpha_canonical, Name, Process};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParseError {
    #[error("syntax error at {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("at {pos}: {what} is not a guard")]
    NotAGuard { pos: usize, what: String },
    #[error("name `{name}` is not in the declared pool")]
    OutsidePool { name: String },
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Zero,
    Tau,
    New,
    LParen,
    RParen,
    Lt,
    Gt,
    Dot,
    Bar,
    Plus,
    Bang,
    Caret,
}

fn lex(src: &str) -> Result<Vec<(usize, Tok)>, ParseError> {
    let mut out = Vec::new();
    let chars: Vec<(usize, char)> = src.char_indices().collect();
    let mut i = 0;
    while i < chars.len() {
        let (pos, c) = chars[i];
        match c {
            '#' => {
                while i < chars.len() && chars[i].1 != '\n' {
                    i += 1;
                }
                continue;
            }
            c if c.is_whitespace() => {}
            '(' => out.push((pos, Tok::LParen)),
            ')' => out.push((pos, Tok::RParen)),
            '<' => out.push((pos, Tok::Lt)),
            '>' => out.push((pos, Tok::Gt)),
            '.' => out.push((pos, Tok::Dot)),
            '|' => out.push((pos, Tok::Bar)),
            '+' => out.push((pos, Tok::Plus)),
            '!' => out.push((pos, Tok::Bang)),
            '^' => out.push((pos, Tok::Caret)),
            '0' => out.push((pos, Tok::Zero)),
            c if c.is_alphabetic() || c == '_' => {
                let start = i;
                while i < chars.len() && (chars[i].1.is_alphanumeric() || chars[i].1 == '_' || chars[i].1 == '\'') {
                    i += 1;
                }
                let word: String = chars[start..i].iter().map(|(_, c)| c).collect();
                let tok = match word.as_str() {
                    "tau" => Tok::Tau,
                    "new" => Tok::New,
                    _ => Tok::Ident(word),
                };
                out.push((pos, tok));
                continue;
            }
            other => return Err(ParseError::Syntax { pos, msg: format!("unexpected character `{other}`") }),
        }
        i += 1;
    }
    Ok(out)
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    at: usize,
    end: usize,
    fresh: u32,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.at).map(|(_, t)| t)
    }

    fn peek2(&self) -> Option<&Tok> {
        self.toks.get(self.at + 1).map(|(_, t)| t)
    }

    fn pos(&self) -> usize {
        self.toks.get(self.at).map_or(self.end, |(p, _)| *p)
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T, ParseError> {
        Err(ParseError::Syntax { pos: self.pos(), msg: msg.into() })
    }

    fn eat(&mut self, t: &Tok) -> bool {
        if self.peek() == Some(t) {
            self.at += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, t: Tok, what: &str) -> Result<(), ParseError> {
        if self.eat(&t) {
            Ok(())
        } else {
            self.err(format!("expected {what}"))
        }
    }

    fn ident(&mut self) -> Result<Name, ParseError> {
        match self.peek() {
            Some(Tok::Ident(s)) => {
                let n = Name::new(s);
                self.at += 1;
                Ok(n)
            }
            _ => self.err("expected a name"),
        }
    }

    fn par(&mut self) -> Result<Process, ParseError> {
        let mut p = self.sum()?;
        while self.eat(&Tok::Bar) {
            let q = self.sum()?;
            p = Process::par(p, q);
        }
        Ok(p)
    }

    fn sum(&mut self) -> Result<Process, ParseError> {
        let start = self.pos();
        let mut p = self.prefixed()?;
        while self.peek() == Some(&Tok::Plus) {
            let plus = self.pos();
            self.at += 1;
            let q_pos = self.pos();
            let q = self.prefixed()?;
            if !p.is_guard() {
                return Err(ParseError::NotAGuard { pos: start, what: describe(&p) });
            }
            if !q.is_guard() {
                return Err(ParseError::NotAGuard { pos: q_pos.max(plus), what: describe(&q) });
            }
            p = Process::sum(p, q);
        }
        Ok(p)
    }

    /// Continuation after a prefix: `.P` or nothing (meaning `0`).
    fn continuation(&mut self) -> Result<Process, ParseError> {
        if self.eat(&Tok::Dot) {
            self.prefixed()
        } else {
            Ok(Process::Nil)
        }
    }

    fn fresh_binder(&mut self) -> Name {
        // binders are renamed by canonicalization; any name distinct from
        // user names will do
        self.fresh += 1;
        Name::Bound(u32::MAX - self.fresh)
    }

    fn prefixed(&mut self) -> Result<Process, ParseError> {
        match self.peek().cloned() {
            Some(Tok::Zero) => {
                self.at += 1;
                Ok(Process::Nil)
            }
            Some(Tok::Tau) => {
                self.at += 1;
                Ok(Process::tau(self.continuation()?))
            }
            Some(Tok::Bang) => {
                self.at += 1;
                let pos = self.pos();
                let g = self.prefixed()?;
                if !g.is_guard() {
                    return Err(ParseError::NotAGuard { pos, what: describe(&g) });
                }
                Ok(Process::rep(g))
            }
            Some(Tok::New) => {
                self.at += 1;
                let x = self.ident()?;
                self.expect(Tok::Dot, "`.` after `new x`")?;
                Ok(Process::res(x, self.prefixed()?))
            }
            Some(Tok::LParen) => {
                if self.peek2() == Some(&Tok::Caret) {
                    self.at += 2;
                    let x = self.ident()?;
                    self.expect(Tok::RParen, "`)`")?;
                    let body = self.prefixed()?;
                    return Ok(Process::res(x, body));
                }
                self.at += 1;
                let p = self.par()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(p)
            }
            Some(Tok::Ident(_)) => {
                let a = self.ident()?;
                match self.peek() {
                    Some(Tok::LParen) => {
                        self.at += 1;
                        let x = self.ident()?;
                        self.expect(Tok::RParen, "`)` closing the input binder")?;
                        Ok(Process::inp(a, x, self.continuation()?))
                    }
                    Some(Tok::Lt) => {
                        self.at += 1;
                        let b = self.ident()?;
                        self.expect(Tok::Gt, "`>` closing the output object")?;
                        Ok(Process::out(a, b, self.continuation()?))
                    }
                    Some(Tok::Caret) => {
                        self.at += 1;
                        let cont = self.continuation()?;
                        Ok(Process::out(a.clone(), a, cont))
                    }
                    _ => {
                        let cont = self.continuation()?;
                        let z = self.fresh_binder();
                        Ok(Process::inp(a, z, cont))
                    }
                }
            }
            _ => self.err("expected a process"),
        }
    }
}

fn describe(p: &Process) -> String {
    match p {
        Process::Rep(_) => "a replication".into(),
        Process::Par(..) => "a parallel composition".into(),
        Process::Res(..) => "a restriction".into(),
        _ => "this term".into(),
    }
}

/// Parses and alpha-canonicalizes a process.
pub fn parse(text: &str) -> Result<Process, ParseError> {
    parse_inner(text, None)
}

/// Like [`parse`], additionally requiring every free name to be in `pool`.
pub fn parse_with_pool(text: &str, pool: &[Name]) -> Result<Process, ParseError> {
    parse_inner(text, Some(pool))
}

fn parse_inner(text: &str, pool: Option<&[Name]>) -> Result<Process, ParseError> {
    let toks = lex(text)?;
    let mut p = Parser { toks, at: 0, end: text.len(), fresh: 0 };
    let proc = p.par()?;
    if p.at != p.toks.len() {
        return p.err("trailing input");
    }
    let proc = alpha_canonical(&proc);
    if let Some(pool) = pool {
        let allowed: BTreeSet<&Name> = pool.iter().collect();
        if let Some(bad) = proc.free_names().iter().find(|n| !allowed.contains(n)) {
            return Err(ParseError::OutsidePool { name: bad.to_string() });
        }
    }
    Ok(proc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::names;

    #[test]
    fn reads_input_then_output() {
        let p = parse("a(x).x<b>.0").unwrap();
        let expected = alpha_canonical(&Process::inp("a", "x", Process::out("x", "b", Process::Nil)));
        assert_eq!(p, expected);
    }

    #[test]
    fn ccs_sugar() {
        let p = parse("a.c^ | c^").unwrap();
        let z = Name::Bound(0);
        let expected = Process::par(
            Process::In(Name::new("a"), z, Box::new(Process::out("c", "c", Process::Nil))),
            Process::out("c", "c", Process::Nil),
        );
        assert_eq!(p, expected);
    }

    #[test]
    fn sum_of_replication_rejected() {
        let e = parse("!(a(x).0)+0").unwrap_err();
        assert!(matches!(e, ParseError::NotAGuard { .. }), "{e}");
        assert!(parse("(a<b> | c<d>) + 0").is_err());
        assert!(parse("!(a<b> | c<d>)").is_err());
    }

    #[test]
    fn syntax_errors_carry_position() {
        match parse("a(x.0") {
            Err(ParseError::Syntax { pos, .. }) => assert_eq!(pos, 3),
            other => panic!("{other:?}"),
        }
        assert!(parse("a<b>.0 |").is_err());
        assert!(parse("a<b>.0 )").is_err());
    }

    #[test]
    fn restriction_forms_and_comments() {
        let p = parse("new a. a<b>.0  # comment").unwrap();
        let q = parse("(^a)a<b>.0").unwrap();
        assert_eq!(p, q);
    }

    #[test]
    fn pool_enforcement() {
        let pool = names(&["a", "b"]);
        assert!(parse_with_pool("a(x).x<b>.0", &pool).is_ok());
        assert_eq!(parse_with_pool("a<c>.0", &pool), Err(ParseError::OutsidePool { name: "c".into() }));
    }
}
