use std::collections::{BTreeSet, HashMap};
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use super::{make_pool, step, Action, ExplorationBudget, LtsError};
use crate::exec;
use crate::syntax::{parse, Name, ParseError, Process};

/// Hard cap on explored states; hitting it marks the universe truncated.
pub const MAX_STATES: usize = 20_000;

/// A finite, frozen fragment of the LTS.
///
/// States are sorted by the canonical process order. Each state's outgoing
/// transitions are stored as `(action id, target)` pairs sorted by action.
#[derive(Debug)]
pub struct Universe {
    states: Vec<Process>,
    index: HashMap<Process, usize>,
    pool: Vec<Name>,
    budget: ExplorationBudget,
    actions: Vec<Action>,
    action_index: HashMap<Action, u32>,
    trans: Vec<Vec<(u32, u32)>>,
    /// Whether the state's transitions are all present.
    exact: Vec<bool>,
    seeds: Vec<usize>,
    fn_mask: Vec<u64>,
    bound_mask: Vec<u64>,
    truncated: bool,
    log: Vec<String>,
    weak: OnceLock<Weak>,
}

#[derive(Debug)]
struct Weak {
    /// `P ⇒ P'` (reflexive).
    tau_star: Vec<Vec<u32>>,
    /// `P ⇒α⇒ P'` for visible `α`, sorted.
    visible: Vec<Vec<(u32, u32)>>,
    /// `P →τ P'` or `P = P'`.
    tau_hat: Vec<Vec<u32>>,
}

impl Universe {
    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn states(&self) -> &[Process] {
        &self.states
    }

    pub fn state(&self, i: usize) -> &Process {
        &self.states[i]
    }

    pub fn index_of(&self, p: &Process) -> Option<usize> {
        self.index.get(p).copied()
    }

    pub fn pool(&self) -> &[Name] {
        &self.pool
    }

    pub fn budget(&self) -> &ExplorationBudget {
        &self.budget
    }

    pub fn seeds(&self) -> &[usize] {
        &self.seeds
    }

    pub fn seed_processes(&self) -> Vec<Process> {
        self.seeds.iter().map(|&i| self.states[i].clone()).collect()
    }

    pub fn is_truncated(&self) -> bool {
        self.truncated
    }

    pub fn is_exact(&self, i: usize) -> bool {
        self.exact[i]
    }

    /// Messages recorded while building or extending.
    pub fn log(&self) -> &[String] {
        &self.log
    }

    pub fn action(&self, id: u32) -> &Action {
        &self.actions[id as usize]
    }

    pub fn action_id(&self, a: &Action) -> Option<u32> {
        self.action_index.get(a).copied()
    }

    pub fn action_count(&self) -> usize {
        self.actions.len()
    }

    pub fn transitions(&self, i: usize) -> &[(u32, u32)] {
        &self.trans[i]
    }

    pub fn transition_count(&self) -> usize {
        self.trans.iter().map(Vec::len).sum()
    }

    /// True iff the action is a bound output whose object is free in state `j`.
    /// Such a move of one side is not required to be matched by `j`.
    pub fn bound_clash(&self, action: u32, j: usize) -> bool {
        self.bound_mask[action as usize] & self.fn_mask[j] != 0
    }

    fn weak(&self) -> &Weak {
        self.weak.get_or_init(|| self.compute_weak())
    }

    pub fn tau_star(&self, i: usize) -> &[u32] {
        &self.weak().tau_star[i]
    }

    pub fn tau_hat(&self, i: usize) -> &[u32] {
        &self.weak().tau_hat[i]
    }

    pub fn weak_visible(&self, i: usize) -> &[(u32, u32)] {
        &self.weak().visible[i]
    }

    /// Targets of `P ⇒̂μ` inside the universe.
    pub fn weak_targets(&self, i: usize, action: &Action) -> Vec<usize> {
        if action.is_tau() {
            return self.tau_star(i).iter().map(|&j| j as usize).collect();
        }
        let Some(id) = self.action_id(action) else { return vec![] };
        self.weak_visible(i).iter().filter(|(a, _)| *a == id).map(|&(_, j)| j as usize).collect()
    }

    fn compute_weak(&self) -> Weak {
        let n = self.len();
        let tau = self.action_id(&Action::Tau);
        let tau_succ =
            |i: usize| -> Vec<u32> { self.trans[i].iter().filter(|(a, _)| Some(*a) == tau).map(|&(_, j)| j).collect() };
        let tau_star: Vec<Vec<u32>> = exec::map_range(n, |i| {
            let mut seen = vec![false; n];
            let mut stack = vec![i as u32];
            seen[i] = true;
            while let Some(x) = stack.pop() {
                for y in tau_succ(x as usize) {
                    if !seen[y as usize] {
                        seen[y as usize] = true;
                        stack.push(y);
                    }
                }
            }
            (0..n as u32).filter(|&j| seen[j as usize]).collect()
        });
        let tau_hat: Vec<Vec<u32>> = (0..n)
            .map(|i| {
                let mut v = tau_succ(i);
                v.push(i as u32);
                v.sort_unstable();
                v.dedup();
                v
            })
            .collect();
        let visible = exec::map_range(n, |i| {
            let mut out = BTreeSet::new();
            for &m in &tau_star[i] {
                for &(a, k) in &self.trans[m as usize] {
                    if Some(a) == tau {
                        continue;
                    }
                    for &j in &tau_star[k as usize] {
                        out.insert((a, j));
                    }
                }
            }
            out.into_iter().collect()
        });
        Weak { tau_star, visible, tau_hat }
    }

    /// Re-explores from the seeds plus `extra` with the same pool and budget.
    pub fn extend(&self, extra: &[Process]) -> Result<Universe, LtsError> {
        let mut seeds = self.seed_processes();
        seeds.extend(extra.iter().cloned());
        let mut u = build(&seeds, self.pool.clone(), self.budget)?;
        let mut log = self.log.clone();
        log.push(format!("extended by {} process(es): {} -> {} states", extra.len(), self.len(), u.len()));
        log.append(&mut u.log);
        u.log = log;
        Ok(u)
    }

    pub fn to_doc(&self) -> UniverseDoc {
        let mut transitions = Vec::new();
        for (i, ts) in self.trans.iter().enumerate() {
            for &(a, j) in ts {
                transitions.push((i, self.actions[a as usize].clone(), j as usize));
            }
        }
        UniverseDoc {
            pool: self.pool.clone(),
            budget: self.budget,
            truncated: self.truncated,
            states: self.states.iter().map(|p| p.to_string()).collect(),
            exact: self.exact.clone(),
            seeds: self.seeds.clone(),
            transitions,
        }
    }

    pub fn from_doc(doc: &UniverseDoc) -> Result<Universe, ParseError> {
        let states = doc.states.iter().map(|s| parse(s)).collect::<Result<Vec<_>, _>>()?;
        let mut trans = vec![Vec::new(); states.len()];
        for (i, a, j) in &doc.transitions {
            trans[*i].push((a.clone(), *j));
        }
        Ok(assemble(
            states,
            trans,
            doc.exact.clone(),
            doc.seeds.clone(),
            doc.pool.clone(),
            doc.budget,
            doc.truncated,
            vec![],
        ))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_doc()).expect("universe serializes")
    }
}

/// Serializable form of a universe.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct UniverseDoc {
    pub pool: Vec<Name>,
    pub budget: ExplorationBudget,
    pub truncated: bool,
    pub states: Vec<String>,
    pub exact: Vec<bool>,
    pub seeds: Vec<usize>,
    pub transitions: Vec<(usize, Action, usize)>,
}

/// Everything reachable from `seeds` within `budget`; the pool is the free
/// names of the seeds plus `budget.fresh` fresh names.
pub fn reachable_universe(seeds: &[Process], budget: &ExplorationBudget) -> Result<Universe, LtsError> {
    let fns: BTreeSet<Name> = seeds.iter().flat_map(|p| p.free_names()).collect();
    build(seeds, make_pool(&fns, budget.fresh), *budget)
}

/// Like [`reachable_universe`] with an explicit pool.
pub fn reachable_universe_with_pool(
    seeds: &[Process],
    pool: &[Name],
    budget: &ExplorationBudget,
) -> Result<Universe, LtsError> {
    build(seeds, pool.to_vec(), *budget)
}

fn build(seeds: &[Process], pool: Vec<Name>, budget: ExplorationBudget) -> Result<Universe, LtsError> {
    let mut states: Vec<Process> = Vec::new();
    let mut index: HashMap<Process, usize> = HashMap::new();
    let mut seed_ids = Vec::new();
    for s in seeds {
        let id = *index.entry(s.clone()).or_insert_with(|| {
            states.push(s.clone());
            states.len() - 1
        });
        seed_ids.push(id);
    }
    let mut trans: Vec<Vec<(Action, usize)>> = vec![Vec::new(); states.len()];
    let mut exact = vec![false; states.len()];
    let mut truncated = false;
    let mut log = Vec::new();
    let mut frontier: Vec<usize> = (0..states.len()).collect();
    let mut depth = 0;
    while !frontier.is_empty() {
        let procs: Vec<&Process> = frontier.iter().map(|&i| &states[i]).collect();
        let steps = exec::map(&procs, |p| step(p, &pool, &budget));
        let mut next = Vec::new();
        for (&i, s) in frontier.iter().zip(steps) {
            let s = s?;
            if depth >= budget.depth || states.len() >= MAX_STATES {
                if !s.transitions.is_empty() {
                    truncated = true;
                }
                exact[i] = s.transitions.is_empty();
                continue;
            }
            exact[i] = !s.truncated;
            truncated |= s.truncated;
            for t in s.transitions {
                let j = match index.get(&t.target) {
                    Some(&j) => j,
                    None => {
                        states.push(t.target.clone());
                        trans.push(Vec::new());
                        exact.push(false);
                        index.insert(t.target, states.len() - 1);
                        next.push(states.len() - 1);
                        states.len() - 1
                    }
                };
                trans[i].push((t.action, j));
            }
        }
        if states.len() >= MAX_STATES {
            log.push(format!("state cap {MAX_STATES} reached"));
        }
        frontier = next;
        depth += 1;
    }
    Ok(assemble(states, trans, exact, seed_ids, pool, budget, truncated, log))
}

#[allow(clippy::too_many_arguments)]
fn assemble(
    states: Vec<Process>,
    trans: Vec<Vec<(Action, usize)>>,
    exact: Vec<bool>,
    seeds: Vec<usize>,
    pool: Vec<Name>,
    budget: ExplorationBudget,
    truncated: bool,
    log: Vec<String>,
) -> Universe {
    // sort states and renumber
    let mut order: Vec<usize> = (0..states.len()).collect();
    order.sort_by(|&a, &b| states[a].cmp(&states[b]));
    let mut rank = vec![0; states.len()];
    for (new, &old) in order.iter().enumerate() {
        rank[old] = new;
    }
    let mut actions: Vec<Action> = trans.iter().flatten().map(|(a, _)| a.clone()).collect();
    actions.sort();
    actions.dedup();
    let action_index: HashMap<Action, u32> = actions.iter().enumerate().map(|(i, a)| (a.clone(), i as u32)).collect();
    let pool_bit = |n: &Name| pool.iter().position(|m| m == n).map_or(0, |k| 1u64 << (k % 64));
    let bound_mask = actions.iter().map(|a| a.bound_name().map_or(0, pool_bit)).collect();
    let new_states: Vec<Process> = order.iter().map(|&o| states[o].clone()).collect();
    let new_trans: Vec<Vec<(u32, u32)>> = order
        .iter()
        .map(|&o| {
            let mut v: Vec<(u32, u32)> = trans[o].iter().map(|(a, j)| (action_index[a], rank[*j] as u32)).collect();
            v.sort_unstable();
            v.dedup();
            v
        })
        .collect();
    let fn_mask = new_states.iter().map(|p| p.free_names().iter().map(pool_bit).fold(0, |m, b| m | b)).collect();
    let index = new_states.iter().enumerate().map(|(i, p)| (p.clone(), i)).collect();
    Universe {
        index,
        exact: order.iter().map(|&o| exact[o]).collect(),
        seeds: seeds.iter().map(|&s| rank[s]).collect(),
        states: new_states,
        pool,
        budget,
        actions,
        action_index,
        trans: new_trans,
        fn_mask,
        bound_mask,
        truncated,
        log,
        weak: OnceLock::new(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse;

    fn uni(seeds: &[&str], budget: ExplorationBudget) -> Universe {
        let seeds: Vec<Process> = seeds.iter().map(|s| parse(s).unwrap()).collect();
        reachable_universe(&seeds, &budget).unwrap()
    }

    #[test]
    fn tau_depth_one() {
        let u = uni(&["tau.0"], ExplorationBudget { depth: 1, ..Default::default() });
        assert_eq!(u.len(), 2);
        assert!(!u.is_truncated());
    }

    #[test]
    fn replication_truncates() {
        let u = uni(&["!tau.0"], ExplorationBudget { depth: 3, unfold: 2, fresh: 1 });
        assert!(u.is_truncated());
    }

    #[test]
    fn weak_closure() {
        let u = uni(&["tau.a<b>.0"], ExplorationBudget::default());
        let s = u.index_of(&parse("tau.a<b>.0").unwrap()).unwrap();
        let z = u.index_of(&Process::Nil).unwrap();
        assert!(u.weak_targets(s, &Action::Out("a".into(), "b".into())).contains(&z));
        assert!(u.weak_targets(s, &Action::Tau).contains(&s));
    }

    #[test]
    fn json_round_trip() {
        let u = uni(&["a<b>.0 | a(x).x<b>.0"], ExplorationBudget::default());
        let doc = u.to_doc();
        let text = serde_json::to_string(&doc).unwrap();
        let back: UniverseDoc = serde_json::from_str(&text).unwrap();
        let v = Universe::from_doc(&back).unwrap();
        assert_eq!(v.to_doc(), doc);
        assert_eq!(v.states(), u.states());
    }

    #[test]
    fn endpoints_are_members() {
        let u = uni(&["new b. a<b>.b(x).0 | a(y).y<y>.0"], ExplorationBudget::default());
        for i in 0..u.len() {
            for &(_, j) in u.transitions(i) {
                assert!((j as usize) < u.len());
            }
        }
        assert!(u.states().windows(2).all(|w| w[0] < w[1]));
    }
}
