use std::fmt;

use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Label {
    A,
    B,
    /// Integer prefixes, always ≥ 1.
    N(u32),
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Label::A => write!(f, "a"),
            Label::B => write!(f, "b"),
            Label::N(n) => write!(f, "{n}"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OpKind {
    /// `P →a→a P′` gives `op(P) →a P′`.
    Op,
    /// `P →b→b P′` gives `op1(P) →a P′`.
    Op1,
    /// `P →a→b P′` gives `op2(P) →a P′`.
    Op2,
    /// `P →μ→b P′`, μ ∈ {a, b}, gives `op2m(P) →a P′`.
    Op2Mu,
    /// `P →n→n P′` gives `op3(P) →(n+1) P′`.
    Op3,
    /// `P →n→m P′` gives `op4(P) →(n+m) P′`.
    Op4,
    /// `P →n→m P′` with `n > m` gives `op5(P) →n P′`.
    Op5,
}

impl OpKind {
    pub const ALL: [OpKind; 7] =
        [OpKind::Op, OpKind::Op1, OpKind::Op2, OpKind::Op2Mu, OpKind::Op3, OpKind::Op4, OpKind::Op5];

    pub fn name(self) -> &'static str {
        match self {
            OpKind::Op => "op",
            OpKind::Op1 => "op1",
            OpKind::Op2 => "op2",
            OpKind::Op2Mu => "op2m",
            OpKind::Op3 => "op3",
            OpKind::Op4 => "op4",
            OpKind::Op5 => "op5",
        }
    }

    pub fn from_name(s: &str) -> Option<OpKind> {
        OpKind::ALL.into_iter().find(|k| k.name() == s)
    }

    /// The label of `op(P)` for a two-step premise `P →l1→l2`, if the rule fires.
    pub fn fire(self, l1: Label, l2: Label) -> Option<Label> {
        use Label::*;
        match (self, l1, l2) {
            (OpKind::Op, A, A) | (OpKind::Op1, B, B) | (OpKind::Op2, A, B) => Some(A),
            (OpKind::Op2Mu, A | B, B) => Some(A),
            (OpKind::Op3, N(n), N(m)) if n == m => Some(N(n + 1)),
            (OpKind::Op4, N(n), N(m)) => Some(N(n + m)),
            (OpKind::Op5, N(n), N(m)) if n > m => Some(N(n)),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum LProcess {
    Nil,
    Prefix(Label, Box<LProcess>),
    Op(OpKind, Box<LProcess>),
}

impl LProcess {
    pub fn prefix(l: Label, p: LProcess) -> LProcess {
        LProcess::Prefix(l, Box::new(p))
    }

    pub fn op(k: OpKind, p: LProcess) -> LProcess {
        LProcess::Op(k, Box::new(p))
    }

    pub fn size(&self) -> usize {
        match self {
            LProcess::Nil => 1,
            LProcess::Prefix(_, p) | LProcess::Op(_, p) => 1 + p.size(),
        }
    }

    pub fn as_op(&self, k: OpKind) -> Option<&LProcess> {
        match self {
            LProcess::Op(k2, p) if *k2 == k => Some(p),
            _ => None,
        }
    }
}

impl fmt::Display for LProcess {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LProcess::Nil => write!(f, "0"),
            LProcess::Prefix(l, p) => write!(f, "{l}.{p}"),
            LProcess::Op(k, p) => write!(f, "{}({p})", k.name()),
        }
    }
}

/// Every derivable transition, sorted and without duplicates.
pub fn lstep(p: &LProcess) -> Vec<(Label, LProcess)> {
    let mut out = match p {
        LProcess::Nil => Vec::new(),
        LProcess::Prefix(l, q) => vec![(*l, (**q).clone())],
        LProcess::Op(k, q) => {
            let mut v = Vec::new();
            for (l1, q1) in lstep(q) {
                for (l2, q2) in lstep(&q1) {
                    if let Some(l) = k.fire(l1, l2) {
                        v.push((l, q2));
                    }
                }
            }
            v
        }
    };
    out.sort();
    out.dedup();
    out
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("lookahead parse error at byte {pos}: {msg}")]
pub struct LParseError {
    pub pos: usize,
    pub msg: String,
}

/// Grammar: `0`, `a.P`, `b.P`, `3.P`, `op(P)`, `op1(P)` … `op5(P)`,
/// `op2m(P)`, parentheses. A bare prefix stands for `prefix.0`.
pub fn lparse(s: &str) -> Result<LProcess, LParseError> {
    let mut p = Parser { s: s.as_bytes(), pos: 0 };
    let t = p.term()?;
    p.ws();
    if p.pos != p.s.len() {
        return Err(p.err("trailing input"));
    }
    Ok(t)
}

struct Parser<'a> {
    s: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn err(&self, msg: &str) -> LParseError {
        LParseError { pos: self.pos, msg: msg.into() }
    }

    fn ws(&mut self) {
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn eat(&mut self, c: u8) -> bool {
        self.ws();
        if self.s.get(self.pos) == Some(&c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn word(&mut self) -> &str {
        self.ws();
        let start = self.pos;
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_alphanumeric() {
            self.pos += 1;
        }
        std::str::from_utf8(&self.s[start..self.pos]).expect("ascii")
    }

    fn term(&mut self) -> Result<LProcess, LParseError> {
        if self.eat(b'(') {
            let t = self.term()?;
            if !self.eat(b')') {
                return Err(self.err("expected `)`"));
            }
            return Ok(t);
        }
        let start = self.pos;
        let w = self.word().to_string();
        if w == "0" {
            return Ok(LProcess::Nil);
        }
        if let Some(k) = OpKind::from_name(&w) {
            if !self.eat(b'(') {
                return Err(self.err("expected `(` after operator"));
            }
            let t = self.term()?;
            if !self.eat(b')') {
                return Err(self.err("expected `)`"));
            }
            return Ok(LProcess::op(k, t));
        }
        let label = match w.as_str() {
            "a" => Label::A,
            "b" => Label::B,
            _ => match w.parse::<u32>() {
                Ok(n) if n >= 1 => Label::N(n),
                _ => {
                    self.pos = start;
                    return Err(self.err(&format!("unexpected `{w}`")));
                }
            },
        };
        if self.eat(b'.') {
            Ok(LProcess::prefix(label, self.term()?))
        } else {
            Ok(LProcess::prefix(label, LProcess::Nil))
        }
    }
}

/// All terms of size at most `max_size` built from `labels` and `ops`,
/// ordered by size and then structurally.
pub fn enumerate(max_size: usize, labels: &[Label], ops: &[OpKind]) -> Vec<LProcess> {
    let mut by_size: Vec<Vec<LProcess>> = vec![Vec::new(), vec![LProcess::Nil]];
    for s in 2..=max_size {
        let mut v = Vec::new();
        for q in &by_size[s - 1] {
            v.extend(labels.iter().map(|&l| LProcess::prefix(l, q.clone())));
            v.extend(ops.iter().map(|&k| LProcess::op(k, q.clone())));
        }
        v.sort();
        by_size.push(v);
    }
    by_size.into_iter().take(max_size + 1).flatten().collect()
}
