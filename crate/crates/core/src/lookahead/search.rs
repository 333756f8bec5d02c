//! Brute-force search for a relation that the naive "up to bisimilarity
//! and context" check accepts although it relates non-bisimilar terms.

use std::collections::HashMap;

use serde::Serialize;

use super::bisim::Canon;
use super::syntax::{enumerate, lstep, LProcess, Label, OpKind};
use crate::exec;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Ctor {
    Prefix(Label),
    Op(OpKind),
}

/// A single-hole context: constructors listed from the outside in.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Context(pub Vec<Ctor>);

impl Context {
    pub fn fill(&self, p: &LProcess) -> LProcess {
        self.0.iter().rev().fold(p.clone(), |t, c| match *c {
            Ctor::Prefix(l) => LProcess::prefix(l, t),
            Ctor::Op(k) => LProcess::op(k, t),
        })
    }

    pub fn render(&self) -> String {
        let mut s = String::new();
        let mut close = 0;
        for c in &self.0 {
            match c {
                Ctor::Prefix(l) => s.push_str(&format!("{l}.")),
                Ctor::Op(k) => {
                    s.push_str(k.name());
                    s.push('(');
                    close += 1;
                }
            }
        }
        s.push_str("[·]");
        s.push_str(&")".repeat(close));
        s
    }
}

/// Every context of depth at most `depth`, shortest first.
pub fn contexts(depth: usize, labels: &[Label], ops: &[OpKind]) -> Vec<Context> {
    let ctors: Vec<Ctor> = labels.iter().map(|&l| Ctor::Prefix(l)).chain(ops.iter().map(|&k| Ctor::Op(k))).collect();
    let mut out = vec![Context(Vec::new())];
    let mut layer = vec![Vec::new()];
    for _ in 0..depth {
        let mut next = Vec::new();
        for c in &layer {
            for k in &ctors {
                let mut v: Vec<Ctor> = c.clone();
                v.push(*k);
                next.push(v);
            }
        }
        out.extend(next.iter().cloned().map(Context));
        layer = next;
    }
    out
}

#[derive(Clone, Debug)]
pub struct SearchParams {
    pub max_size: usize,
    pub labels: Vec<Label>,
    pub term_ops: Vec<OpKind>,
    pub ctx_depth: usize,
    pub ctx_labels: Vec<Label>,
    pub ctx_ops: Vec<OpKind>,
    /// Candidate relations have 1 ..= this many pairs.
    pub max_pairs: usize,
}

impl Default for SearchParams {
    fn default() -> Self {
        SearchParams {
            max_size: 6,
            labels: vec![Label::A],
            term_ops: vec![OpKind::Op],
            ctx_depth: 2,
            ctx_labels: vec![Label::A, Label::B],
            ctx_ops: OpKind::ALL.to_vec(),
            max_pairs: 1,
        }
    }
}

impl SearchParams {
    pub fn without_op(mut self) -> Self {
        self.ctx_ops.retain(|&k| k != OpKind::Op);
        self
    }

    pub fn technique(&self) -> String {
        let ops: Vec<&str> = self.ctx_ops.iter().map(|k| k.name()).collect();
        let labels: Vec<String> = self.ctx_labels.iter().map(|l| l.to_string()).collect();
        format!(
            "R ⊆ b(~ C(R) ~), C = single-hole contexts of depth ≤ {} over prefixes {{{}}} and operators {{{}}}",
            self.ctx_depth,
            labels.join(", "),
            ops.join(", ")
        )
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct MatchedMove {
    pub from: (String, String),
    /// `left` or `right`.
    pub mover: String,
    pub label: String,
    pub to: (String, String),
    /// `bisimilar`, or the context and the pair of `R` it was applied to.
    pub reason: String,
}

#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct UnsoundnessWitness {
    pub relation: Vec<(String, String)>,
    pub technique: String,
    /// A pair of `R` that is not bisimilar.
    pub non_bisimilar: (String, String),
    pub moves: Vec<MatchedMove>,
}

#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct SearchReport {
    pub technique: String,
    pub max_size: usize,
    pub terms: usize,
    pub candidates: usize,
    pub witness: Option<UnsoundnessWitness>,
}

/// Runs the naive check on `rel`; on success returns how each move was matched.
pub fn naive_check(rel: &[(LProcess, LProcess)], ctxs: &[Context], canon: &mut Canon) -> Option<Vec<MatchedMove>> {
    let mut closure: HashMap<(u32, u32), String> = HashMap::new();
    for c in ctxs {
        for (p, q) in rel {
            let key = (canon.id(&c.fill(p)), canon.id(&c.fill(q)));
            closure.entry(key).or_insert_with(|| format!("{} on ({p}, {q})", c.render()));
        }
    }
    let reason = |x: &LProcess, y: &LProcess, canon: &mut Canon| -> Option<String> {
        let (cx, cy) = (canon.id(x), canon.id(y));
        if cx == cy {
            return Some("bisimilar".into());
        }
        closure.get(&(cx, cy)).cloned()
    };
    let mut moves = Vec::new();
    for (p, q) in rel {
        let (mp, mq) = (lstep(p), lstep(q));
        for (l, x) in &mp {
            let found = mq.iter().filter(|(l2, _)| l2 == l).find_map(|(_, y)| reason(x, y, canon).map(|r| (y, r)));
            let (y, r) = found?;
            moves.push(MatchedMove {
                from: (p.to_string(), q.to_string()),
                mover: "left".into(),
                label: l.to_string(),
                to: (x.to_string(), y.to_string()),
                reason: r,
            });
        }
        for (l, y) in &mq {
            let found = mp.iter().filter(|(l2, _)| l2 == l).find_map(|(_, x)| reason(x, y, canon).map(|r| (x, r)));
            let (x, r) = found?;
            moves.push(MatchedMove {
                from: (p.to_string(), q.to_string()),
                mover: "right".into(),
                label: l.to_string(),
                to: (x.to_string(), y.to_string()),
                reason: r,
            });
        }
    }
    Some(moves)
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            go(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, n, k, &mut Vec::new(), &mut out);
    out
}

/// Candidate relations are sets of ordered pairs of distinct terms, smaller
/// relations first, then in lexicographic order of term indices; only
/// relations with a non-bisimilar pair are tried.
pub fn search_unsoundness(params: &SearchParams) -> SearchReport {
    let terms = enumerate(params.max_size, &params.labels, &params.term_ops);
    let ctxs = contexts(params.ctx_depth, &params.ctx_labels, &params.ctx_ops);
    let mut canon = Canon::new();
    let pairs: Vec<(usize, usize)> =
        (0..terms.len()).flat_map(|i| (0..terms.len()).map(move |j| (i, j))).filter(|&(i, j)| i != j).collect();
    let bad: Vec<bool> = pairs.iter().map(|&(i, j)| !canon.bisimilar(&terms[i], &terms[j])).collect();
    let mut candidates = 0;
    let mut witness = None;
    for k in 1..=params.max_pairs {
        let combos: Vec<Vec<usize>> =
            combinations(pairs.len(), k).into_iter().filter(|c| c.iter().any(|&x| bad[x])).collect();
        candidates += combos.len();
        witness = exec::find_first(&combos, |c| {
            let rel: Vec<(LProcess, LProcess)> =
                c.iter().map(|&x| (terms[pairs[x].0].clone(), terms[pairs[x].1].clone())).collect();
            let mut canon = Canon::new();
            let moves = naive_check(&rel, &ctxs, &mut canon)?;
            let nb = c.iter().find(|&&x| bad[x]).map(|&x| pairs[x]).expect("filtered");
            Some(UnsoundnessWitness {
                relation: rel.iter().map(|(p, q)| (p.to_string(), q.to_string())).collect(),
                technique: params.technique(),
                non_bisimilar: (terms[nb.0].to_string(), terms[nb.1].to_string()),
                moves,
            })
        });
        if witness.is_some() {
            break;
        }
    }
    SearchReport { technique: params.technique(), max_size: params.max_size, terms: terms.len(), candidates, witness }
}
