//! The (weak) aliased communication property: an output followed by an input
//! of the same object must become a communication once a substitution
//! identifies the two subjects.

use std::collections::{BTreeSet, HashMap, VecDeque};

use serde::Serialize;

use crate::lts::{step, Action, ExplorationBudget, LtsError};
use crate::syntax::{apply_subst, normal_form, Name, Process, Substitution};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum AcpMode {
    Strong,
    Weak,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AcpViolation {
    pub output: Action,
    pub input: Action,
    pub sigma: String,
    /// The process `Pσ` that should reach `expected`.
    pub source: Process,
    pub expected: Process,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AcpReport {
    pub process: Process,
    pub mode: AcpMode,
    /// Output-then-input sequences found, as `μ1 ; μ2 -> P'`.
    pub instances: Vec<String>,
    /// Number of (sequence, σ) pairs checked.
    pub checks: usize,
    pub violations: Vec<AcpViolation>,
    pub truncated: bool,
}

impl AcpReport {
    pub fn holds(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Transition cache with bounded τ-closures.
pub(crate) struct Stepper<'a> {
    pool: &'a [Name],
    budget: ExplorationBudget,
    cache: HashMap<Process, Vec<(Action, Process)>>,
    closures: HashMap<Process, (Vec<Process>, bool)>,
    pub truncated: bool,
}

impl<'a> Stepper<'a> {
    pub fn new(pool: &'a [Name], budget: ExplorationBudget) -> Self {
        Stepper { pool, budget, cache: HashMap::new(), closures: HashMap::new(), truncated: false }
    }

    pub fn moves(&mut self, p: &Process) -> Result<Vec<(Action, Process)>, LtsError> {
        if let Some(m) = self.cache.get(p) {
            return Ok(m.clone());
        }
        let s = step(p, self.pool, &self.budget)?;
        self.truncated |= s.truncated;
        let m: Vec<(Action, Process)> = s.transitions.into_iter().map(|t| (t.action, t.target)).collect();
        self.cache.insert(p.clone(), m.clone());
        Ok(m)
    }

    /// States reachable by at most `depth` τ steps, `p` included, in normal form
    /// except `p` itself.
    pub fn tau_closure(&mut self, p: &Process) -> Result<Vec<Process>, LtsError> {
        if let Some((c, t)) = self.closures.get(p) {
            self.truncated |= *t;
            return Ok(c.clone());
        }
        let mut truncated = false;
        let mut seen = BTreeSet::from([p.clone()]);
        let mut queue = VecDeque::from([(p.clone(), 0)]);
        while let Some((q, d)) = queue.pop_front() {
            let moves = self.moves(&q)?;
            if d == self.budget.depth {
                truncated |= moves.iter().any(|(a, _)| a.is_tau());
                continue;
            }
            for (a, t) in moves {
                if !a.is_tau() {
                    continue;
                }
                // states are kept up to structural congruence, otherwise the
                // bracketings of unfolded replicas multiply
                let t = normal_form(&t);
                if seen.insert(t.clone()) {
                    queue.push_back((t, d + 1));
                }
            }
        }
        let c: Vec<Process> = seen.into_iter().collect();
        self.truncated |= truncated;
        self.closures.insert(p.clone(), (c.clone(), truncated));
        Ok(c)
    }

    /// `p ⇒μ⇒ p'` for visible `μ` accepted by `keep`.
    pub fn weak_visible(
        &mut self,
        p: &Process,
        keep: impl Fn(&Action) -> bool,
    ) -> Result<BTreeSet<(Action, Process)>, LtsError> {
        let mut out = BTreeSet::new();
        for q in self.tau_closure(p)? {
            for (a, t) in self.moves(&q)? {
                if a.is_visible() && keep(&a) {
                    for r in self.tau_closure(&normal_form(&t))? {
                        out.insert((a.clone(), r));
                    }
                }
            }
        }
        Ok(out)
    }
}

/// Maps `fns → pool`; they cover every `σ` up to what can affect `P`.
fn sigmas(fns: &BTreeSet<Name>, pool: &[Name]) -> Vec<Substitution> {
    let dom: Vec<&Name> = fns.iter().collect();
    let k = pool.len();
    let total = k.pow(dom.len() as u32);
    (0..total)
        .map(|mut code| {
            let mut s = Substitution::identity();
            for from in &dom {
                s.insert((*from).clone(), pool[code % k].clone());
                code /= k;
            }
            s
        })
        .collect()
}

fn prefixes(p: &Process) -> (bool, bool) {
    match p {
        Process::Nil => (false, false),
        Process::Out(_, _, q) => (true, prefixes(q).1),
        Process::In(_, _, q) => (prefixes(q).0, true),
        Process::Tau(q) | Process::Res(_, q) | Process::Rep(q) => prefixes(q),
        Process::Sum(a, b) | Process::Par(a, b) => {
            let (x, y) = (prefixes(a), prefixes(b));
            (x.0 || y.0, x.1 || y.1)
        }
    }
}

/// Checks every output-then-input sequence of `p` against every `σ` over the
/// pool identifying the two subjects.
pub fn check_acp(p: &Process, mode: AcpMode, pool: &[Name], budget: &ExplorationBudget) -> Result<AcpReport, LtsError> {
    let mut report = AcpReport {
        process: p.clone(),
        mode,
        instances: Vec::new(),
        checks: 0,
        violations: Vec::new(),
        truncated: false,
    };
    // every action stems from a prefix of the term, so without both an
    // output and an input prefix there is no sequence to check
    let (has_out, has_in) = prefixes(p);
    if !(has_out && has_in) {
        return Ok(report);
    }
    let mut st = Stepper::new(pool, *budget);
    let fns = p.free_names();
    let is_output = |a: &Action| matches!(a, Action::Out(..) | Action::BOut(..));
    let firsts: Vec<(Action, Process)> = match mode {
        AcpMode::Strong => st.moves(p)?.into_iter().filter(|(a, _)| is_output(a)).collect(),
        // the τ-closure after the output is left to the search for the input
        AcpMode::Weak => {
            let mut v = BTreeSet::new();
            for q in st.tau_closure(p)? {
                for (a, t) in st.moves(&q)? {
                    if is_output(&a) {
                        v.insert((a, normal_form(&t)));
                    }
                }
            }
            v.into_iter().collect()
        }
    };
    let mut sequences = BTreeSet::new();
    for (out, p1) in firsts {
        if out.bound_name().is_some_and(|b| fns.contains(b)) {
            continue;
        }
        let b = out.object().unwrap().clone();
        let is_input = |a: &Action| matches!(a, Action::In(_, x) if *x == b);
        let seconds: Vec<(Action, Process)> = match mode {
            AcpMode::Strong => st.moves(&p1)?.into_iter().filter(|(a, _)| is_input(a)).collect(),
            AcpMode::Weak => st.weak_visible(&p1, is_input)?.into_iter().collect(),
        };
        for (inp, p2) in seconds {
            sequences.insert((out.clone(), inp, normal_form(&p2)));
        }
    }

    report.instances = sequences.iter().map(|(o, i, t)| format!("{o} ; {i} -> {t}")).collect();
    if sequences.is_empty() {
        report.truncated = st.truncated;
        return Ok(report);
    }
    let mut reach: HashMap<Process, BTreeSet<Process>> = HashMap::new();
    for sigma in sigmas(&fns, pool) {
        let mut ps = None;
        for (out, inp, p2) in &sequences {
            let (a, c) = (out.subject().unwrap(), inp.subject().unwrap());
            if sigma.apply_name(a) != sigma.apply_name(c) {
                continue;
            }
            // an extruded name is fresh, so no σ may target it
            if out.bound_name().is_some_and(|b| fns.iter().any(|n| sigma.apply_name(n) == *b)) {
                continue;
            }
            let ps = ps.get_or_insert_with(|| apply_subst(p, &sigma)).clone();
            report.checks += 1;
            let target = match out {
                Action::BOut(_, b) => Process::res(b.clone(), p2.clone()),
                _ => p2.clone(),
            };
            let expected = apply_subst(&target, &sigma);
            if !reach.contains_key(&ps) {
                let succ: Vec<Process> = match mode {
                    AcpMode::Strong => st.moves(&ps)?.into_iter().filter(|(a, _)| a.is_tau()).map(|(_, t)| t).collect(),
                    AcpMode::Weak => st.tau_closure(&ps)?,
                };
                reach.insert(ps.clone(), succ.iter().map(normal_form).collect());
            }
            if !reach[&ps].contains(&normal_form(&expected)) {
                report.violations.push(AcpViolation {
                    output: out.clone(),
                    input: inp.clone(),
                    sigma: sigma.to_string(),
                    source: ps.clone(),
                    expected,
                });
            }
        }
    }
    report.truncated = st.truncated;
    Ok(report)
}
