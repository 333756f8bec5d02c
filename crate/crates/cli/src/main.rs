//! `piupto`: batch front end for the equivalence and up-to checks.
//!
//! Exit codes: 0 when every check passed, 1 when a claim failed, 2 on
//! usage or parse errors.

use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use piupto::compat::{derived_law_suite, repro_damien, standard_statements, Group};
use piupto::lookahead::{self, AppendixLimits, OpKind, SearchParams};
use piupto::lts::{make_pool, reachable_universe_with_pool, step, ExplorationBudget, Universe};
use piupto::relation::{bisim_fun, expansion_fun, gfp_of, Kind, Mode, Suite};
use piupto::subcalc::{check_acp, derive, is_async, AcpMode, SumRule, TypeEnv};
use piupto::syntax::{parse, Name, Process};
use piupto::technique::{upto_check, Target, TechniqueSpec, UptoOptions};

#[derive(Parser, Debug)]
#[command(name = "piupto", version, about = "Bisimulation and up-to technique checks for the π-calculus")]
struct Cli {
    #[command(flatten)]
    cfg: RunConfig,
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Args, Debug, Clone)]
struct RunConfig {
    /// Print a JSON report instead of text.
    #[arg(long, global = true)]
    json: bool,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Transition steps explored from the seeds.
    #[arg(long, global = true, default_value_t = 6)]
    depth: usize,
    /// Fresh names added to the free names of the inputs.
    #[arg(long, global = true, default_value_t = 1)]
    fresh: usize,
    /// Random relations per sampled suite.
    #[arg(long, global = true, default_value_t = 512)]
    samples: usize,
}

impl RunConfig {
    fn budget(&self) -> ExplorationBudget {
        ExplorationBudget { depth: self.depth, fresh: self.fresh, ..ExplorationBudget::default() }
    }

    fn doc(&self) -> Value {
        json!({ "seed": self.seed, "depth": self.depth, "fresh": self.fresh, "samples": self.samples })
    }
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum EquivMode {
    Strong,
    Weak,
    Expansion,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum GroupArg {
    Contexts,
    Substitution,
    Weak,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Parse terms and print their canonical form.
    Parse {
        terms: Vec<String>,
        /// Use the lookahead grammar.
        #[arg(long)]
        lookahead: bool,
    },
    /// Transitions of a term, or its reachable universe.
    Lts {
        term: String,
        #[arg(long)]
        reachable: bool,
    },
    /// Decide bisimilarity of two terms on their reachable universe.
    Equiv {
        #[arg(long, value_enum, default_value = "strong")]
        mode: EquivMode,
        left: String,
        right: String,
    },
    /// Check that the pairs form a bisimulation up to a technique.
    Upto {
        /// Technique expression, e.g. `omega(union(F(bisim), refl, pcomp))`.
        technique: String,
        /// Alternating left and right terms of the relation.
        #[arg(required = true, num_args = 2..)]
        pairs: Vec<String>,
        #[arg(long)]
        weak: bool,
        #[arg(long)]
        barred: bool,
    },
    /// Evaluate the standard compatibility statements on a universe.
    Compat {
        #[arg(required = true)]
        seeds: Vec<String>,
        #[arg(long = "group", value_enum)]
        groups: Vec<GroupArg>,
    },
    /// Sample the algebraic laws about compatible functions.
    Laws {
        #[arg(required = true)]
        seeds: Vec<String>,
        #[arg(long, default_value_t = 8)]
        draws: usize,
    },
    /// Asynchrony and immediately-available-names typing.
    Typecheck {
        term: String,
        /// Comma-separated type environment.
        #[arg(long, default_value = "")]
        env: String,
        /// Restrict the sum rule to the empty environment.
        #[arg(long)]
        strict_sum: bool,
    },
    /// The aliased communication property of a term.
    Acp {
        term: String,
        #[arg(long)]
        weak: bool,
    },
    /// Replay the counterexample to compatibility of substitution.
    ReproDamien,
    /// Experiments on the lookahead language.
    Lookahead {
        #[command(subcommand)]
        cmd: LookaheadCmd,
    },
}

#[derive(Subcommand, Debug)]
enum LookaheadCmd {
    /// Transitions of a lookahead term.
    Step { term: String },
    /// Decide the compatibility claims attached to an operator.
    Claims {
        /// op, op1, op2, op2m, op3, op4, op5; all when omitted.
        #[arg(long)]
        op: Option<String>,
        #[arg(long, default_value_t = 5)]
        max_size: usize,
        #[arg(long, default_value_t = 3)]
        max_label: u32,
    },
    /// Search for a relation accepted by naive up-to-context reasoning
    /// although it is not contained in bisimilarity.
    Search {
        #[arg(long, default_value_t = 6)]
        max_size: usize,
        #[arg(long, default_value_t = 2)]
        ctx_depth: usize,
        /// Leave `op` out of the contexts.
        #[arg(long)]
        no_op: bool,
        #[arg(long, default_value_t = 1)]
        max_pairs: usize,
    },
}

/// What a command produced: a JSON result, a text rendering and whether
/// every check passed.
struct Outcome {
    result: Value,
    text: String,
    ok: bool,
}

struct UsageError(String);

impl<E: std::fmt::Display> From<E> for UsageError {
    fn from(e: E) -> Self {
        UsageError(e.to_string())
    }
}

fn term(s: &str) -> Result<Process, UsageError> {
    parse(s).map_err(|e| UsageError(format!("`{s}`: {e}")))
}

fn universe(seeds: &[Process], cfg: &RunConfig) -> Result<Arc<Universe>, UsageError> {
    let fns = seeds.iter().flat_map(|p| p.free_names()).collect();
    let pool = make_pool(&fns, cfg.fresh);
    Ok(Arc::new(reachable_universe_with_pool(seeds, &pool, &cfg.budget())?))
}

fn to_value<T: serde::Serialize>(t: &T) -> Value {
    serde_json::to_value(t).expect("reports serialize")
}

fn run(cmd: &Command, cfg: &RunConfig) -> Result<Outcome, UsageError> {
    match cmd {
        Command::Parse { terms, lookahead } => {
            let mut out = Vec::new();
            for s in terms {
                let printed = if *lookahead {
                    lookahead::lparse(s).map_err(|e| UsageError(format!("`{s}`: {e}")))?.to_string()
                } else {
                    term(s)?.to_string()
                };
                out.push(printed);
            }
            Ok(Outcome { text: out.join("\n"), result: json!(out), ok: true })
        }
        Command::Lts { term: s, reachable } => {
            let p = term(s)?;
            if *reachable {
                let u = universe(std::slice::from_ref(&p), cfg)?;
                let doc = u.to_doc();
                let text = format!(
                    "{} states, {} transitions{}",
                    u.len(),
                    u.transition_count(),
                    if u.is_truncated() { " (truncated)" } else { "" }
                );
                return Ok(Outcome { result: to_value(&doc), text, ok: true });
            }
            let pool = make_pool(&p.free_names(), cfg.fresh);
            let st = step(&p, &pool, &cfg.budget())?;
            let lines: Vec<String> =
                st.transitions.iter().map(|t| format!("{} --{}--> {}", t.source, t.action, t.target)).collect();
            let result =
                json!({ "pool": to_value(&pool), "transitions": to_value(&st.transitions), "truncated": st.truncated });
            Ok(Outcome { result, text: lines.join("\n"), ok: true })
        }
        Command::Equiv { mode, left, right } => {
            let (p, q) = (term(left)?, term(right)?);
            let u = universe(&[p.clone(), q.clone()], cfg)?;
            let n = u.len();
            let rel = match mode {
                EquivMode::Strong => gfp_of(n, |r| bisim_fun(&u, r, Kind::All, Mode::Strong, false)),
                EquivMode::Weak => gfp_of(n, |r| bisim_fun(&u, r, Kind::All, Mode::Weak, false)),
                EquivMode::Expansion => gfp_of(n, |r| expansion_fun(&u, r)),
            };
            let related = rel.contains(u.index_of(&p).expect("seed"), u.index_of(&q).expect("seed"));
            let verdict = if related { "EQUIVALENT" } else { "NOT EQUIVALENT" };
            let result = json!({
                "left": p.to_string(), "right": q.to_string(), "mode": format!("{mode:?}").to_lowercase(),
                "verdict": verdict, "states": n, "bounded": u.is_truncated(),
            });
            Ok(Outcome { result, text: verdict.into(), ok: related })
        }
        Command::Upto { technique, pairs, weak, barred } => {
            if pairs.len() % 2 != 0 {
                return Err(UsageError("pairs must come as left right left right …".into()));
            }
            let spec: TechniqueSpec = technique.parse()?;
            let rel: Vec<(Process, Process)> =
                pairs.chunks(2).map(|c| Ok((term(&c[0])?, term(&c[1])?))).collect::<Result<_, UsageError>>()?;
            let opts = UptoOptions {
                target: if *weak { Target::Weak } else { Target::Strong },
                barred: *barred,
                budget: cfg.budget(),
                ..UptoOptions::default()
            };
            let v = upto_check(&rel, &spec, &opts)?;
            let text = match &v.failure {
                None => format!("HOLDS: R progresses to b({})", v.technique),
                Some(f) => {
                    format!("FAILS: ({}, {}): {} --{}--> {} unanswered", f.left, f.right, f.mover, f.action, f.target)
                }
            };
            Ok(Outcome { ok: v.holds, result: to_value(&v), text })
        }
        Command::Compat { seeds, groups } => {
            let seeds: Vec<Process> = seeds.iter().map(|s| term(s)).collect::<Result<_, _>>()?;
            let u = universe(&seeds, cfg)?;
            let suite = Suite::new(&u, cfg.seed, cfg.samples);
            let groups: Vec<Group> = if groups.is_empty() {
                vec![Group::Contexts, Group::Substitution, Group::Weak]
            } else {
                groups
                    .iter()
                    .map(|g| match g {
                        GroupArg::Contexts => Group::Contexts,
                        GroupArg::Substitution => Group::Substitution,
                        GroupArg::Weak => Group::Weak,
                    })
                    .collect()
            };
            let mut rows = Vec::new();
            let mut lines = vec![format!("{} states, {:?} suite of {} relations", u.len(), suite.mode(), suite.len())];
            let mut ok = true;
            for st in standard_statements(&u, &groups, &suite)? {
                let v = st.evaluate(&suite)?;
                ok &= v.holds;
                lines.push(format!("{} {}", if v.holds { "ok  " } else { "FAIL" }, v.claim));
                let mut row = json!({
                    "claim": v.claim,
                    "verdict": if v.holds { "holds" } else { "fails" },
                    "samplingMode": to_value(&v.sampling_mode),
                    "universeHash": v.universe_hash,
                    "bounded": v.bounded,
                });
                if let Some(cx) = &v.counterexample {
                    row["counterexample"] = to_value(cx);
                }
                rows.push(row);
            }
            Ok(Outcome { result: Value::Array(rows), text: lines.join("\n"), ok })
        }
        Command::Laws { seeds, draws } => {
            let seeds: Vec<Process> = seeds.iter().map(|s| term(s)).collect::<Result<_, _>>()?;
            let u = universe(&seeds, cfg)?;
            let r = derived_law_suite(&u, cfg.seed, cfg.samples, *draws);
            let hard = r.hard_failures();
            let text = r
                .laws
                .iter()
                .map(|l| {
                    format!(
                        "{:<28} draws {:>3}  premise {:>3}  held {:>3}  failures {}",
                        l.law,
                        l.draws,
                        l.premise_satisfied,
                        l.conclusion_held,
                        l.failures.len()
                    )
                })
                .collect::<Vec<_>>()
                .join("\n");
            Ok(Outcome { result: to_value(&r), text, ok: hard == 0 })
        }
        Command::Typecheck { term: s, env, strict_sum } => {
            let p = term(s)?;
            let gamma: TypeEnv = env.split(',').map(str::trim).filter(|x| !x.is_empty()).map(Name::new).collect();
            let sum = if *strict_sum { SumRule::EmptyEnvOnly } else { SumRule::AnyEnv };
            let d = derive(&gamma, &p, sum);
            let asynchronous = is_async(&p);
            let text = format!("async: {asynchronous}\nian-typable: {}", d.is_some());
            let result = json!({ "term": p.to_string(), "async": asynchronous, "ianTypable": d.is_some(), "derivation": to_value(&d) });
            Ok(Outcome { result, text, ok: true })
        }
        Command::Acp { term: s, weak } => {
            let p = term(s)?;
            let pool = make_pool(&p.free_names(), cfg.fresh);
            let mode = if *weak { AcpMode::Weak } else { AcpMode::Strong };
            let r = check_acp(&p, mode, &pool, &cfg.budget())?;
            let mut lines = vec![format!("{} ({} checks)", if r.holds() { "HOLDS" } else { "VIOLATED" }, r.checks)];
            lines.extend(r.violations.iter().map(|v| {
                format!(
                    "  {} then {} under {}: {} has no τ-step to {}",
                    v.output, v.input, v.sigma, v.source, v.expected
                )
            }));
            Ok(Outcome { ok: r.holds(), result: to_value(&r), text: lines.join("\n") })
        }
        Command::ReproDamien => {
            let r = repro_damien();
            let mut lines: Vec<String> = r
                .steps
                .iter()
                .map(|s| {
                    format!(
                        "{} {:<6} {}{}",
                        if s.ok() { "ok  " } else { "FAIL" },
                        if s.observed { "holds" } else { "fails" },
                        s.statement,
                        if s.detail.is_empty() { String::new() } else { format!("  [{}]", s.detail) }
                    )
                })
                .collect();
            lines.push(format!(
                "{} {:<6} {}",
                if r.consequence.holds { "FAIL" } else { "ok  " },
                if r.consequence.holds { "holds" } else { "fails" },
                r.consequence.claim
            ));
            Ok(Outcome { ok: r.all_ok(), result: to_value(&r), text: lines.join("\n") })
        }
        Command::Lookahead { cmd } => lookahead_cmd(cmd),
    }
}

fn lookahead_cmd(cmd: &LookaheadCmd) -> Result<Outcome, UsageError> {
    match cmd {
        LookaheadCmd::Step { term: s } => {
            let p = lookahead::lparse(s)?;
            let moves: Vec<(String, String)> =
                lookahead::lstep(&p).iter().map(|(l, q)| (l.to_string(), q.to_string())).collect();
            let text = moves.iter().map(|(l, q)| format!("{p} --{l}--> {q}")).collect::<Vec<_>>().join("\n");
            Ok(Outcome { result: json!(moves), text, ok: true })
        }
        LookaheadCmd::Claims { op, max_size, max_label } => {
            let ops = match op {
                None => OpKind::ALL.to_vec(),
                Some(s) => vec![OpKind::from_name(s).ok_or_else(|| UsageError(format!("unknown operator `{s}`")))?],
            };
            let limits = AppendixLimits { max_size: *max_size, max_label: *max_label, ..AppendixLimits::default() };
            let mut reports = Vec::new();
            let mut ok = true;
            let mut lines = Vec::new();
            for op in ops {
                for r in lookahead::check_appendix_claims(op, &limits) {
                    // only predicted outcomes can fail the run
                    ok &= r.expected.is_none_or(|e| e == r.holds) && r.truncated_pairs == 0;
                    let status =
                        serde_json::to_value(r.status).expect("status").as_str().unwrap_or_default().to_string();
                    lines.push(format!("{:<16} {:<5} {}", status, if r.holds { "holds" } else { "fails" }, r.claim));
                    reports.push(r);
                }
            }
            Ok(Outcome { result: to_value(&reports), text: lines.join("\n"), ok })
        }
        LookaheadCmd::Search { max_size, ctx_depth, no_op, max_pairs } => {
            let mut params = SearchParams {
                max_size: *max_size,
                ctx_depth: *ctx_depth,
                max_pairs: *max_pairs,
                ..SearchParams::default()
            };
            if *no_op {
                params = params.without_op();
            }
            let r = lookahead::search_unsoundness(&params);
            let text = match &r.witness {
                Some(w) => {
                    let mut l = vec![format!("WITNESS R = {:?}", w.relation), format!("technique: {}", w.technique)];
                    l.extend(w.moves.iter().map(|m| {
                        let (from, to) = if m.mover == "left" { (&m.from.0, &m.to.0) } else { (&m.from.1, &m.to.1) };
                        format!("  {from} --{}--> {to} answered by ({}, {}): {}", m.label, m.to.0, m.to.1, m.reason)
                    }));
                    l.join("\n")
                }
                None => format!("no witness among {} candidates", r.candidates),
            };
            Ok(Outcome { result: to_value(&r), text, ok: true })
        }
    }
}

fn command_name(cmd: &Command) -> &'static str {
    match cmd {
        Command::Parse { .. } => "parse",
        Command::Lts { .. } => "lts",
        Command::Equiv { .. } => "equiv",
        Command::Upto { .. } => "upto",
        Command::Compat { .. } => "compat",
        Command::Laws { .. } => "laws",
        Command::Typecheck { .. } => "typecheck",
        Command::Acp { .. } => "acp",
        Command::ReproDamien => "repro-damien",
        Command::Lookahead { .. } => "lookahead",
    }
}

/// Prints a line, ignoring a closed stdout (e.g. output piped into `head`).
fn emit(s: &str) {
    use std::io::Write;
    let _ = writeln!(std::io::stdout(), "{s}");
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli.cmd, &cli.cfg) {
        Ok(o) => {
            if cli.cfg.json {
                let report = json!({
                    "command": command_name(&cli.cmd),
                    "config": cli.cfg.doc(),
                    "ok": o.ok,
                    "result": o.result,
                });
                emit(&serde_json::to_string_pretty(&report).expect("json"));
            } else if !o.text.is_empty() {
                emit(&o.text);
            }
            if o.ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(UsageError(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
