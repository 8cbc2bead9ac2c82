use std::collections::HashSet;

use super::rules::{ackermann_shape, apply_rule, Dir, Rule};
use super::{preprocess, AlbaResult, Error, Item, System, TraceEntry};
use crate::classify::{is_inductive, Certificate};
use crate::syntax::{child_orders, Eps, Formula, Inequality, Kind, Order, QuasiInequality, Sign, Signature, Sym};

pub const DEFAULT_MAX_DEPTH: usize = 24;
pub const DEFAULT_MAX_NODES: usize = 200_000;

/// Guard against runaway guided runs.
const MAX_GUIDED_STEPS: usize = 10_000;

#[derive(Clone, Debug)]
pub enum Strategy {
    /// Follow the shape witnessed by an inductive certificate.
    Guided(Certificate),
    /// Bounded iterative-deepening search over all rule applications.
    Exhaustive { max_depth: usize, max_nodes: usize },
}

impl Strategy {
    pub fn exhaustive() -> Strategy {
        Strategy::Exhaustive {
            max_depth: DEFAULT_MAX_DEPTH,
            max_nodes: DEFAULT_MAX_NODES,
        }
    }
}

/// Whether `f`, read with `sign`, contains an ε-critical variable occurrence.
fn has_critical(f: &Formula, sign: Sign, eps: &Eps, sig: &Signature) -> bool {
    if let Formula::Var(p) = f {
        return matches!((sign, eps.get(p)), (Sign::Pos, Some(Order::One)) | (Sign::Neg, Some(Order::Dual)));
    }
    f.children()
        .into_iter()
        .zip(child_orders(f, sig))
        .any(|(c, o)| has_critical(c, sign.apply(o), eps, sig))
}

fn critical_coords(args: &[Formula], orders: &[Order], sign: Sign, eps: &Eps, sig: &Signature) -> Vec<usize> {
    (0..args.len())
        .filter(|&k| has_critical(&args[k], sign.apply(orders[k]), eps, sig))
        .collect()
}

fn kind_of(f: &Formula, sig: &Signature) -> Option<(Kind, Vec<Order>)> {
    match f {
        Formula::Conn(name, _) => sig.get(name).map(|d| (d.kind, d.coords.clone())),
        _ => None,
    }
}

/// The rule the guided strategy applies to one item, if any. Items are read
/// with the left side negative and the right side positive.
fn guided_rule(ineq: &Inequality, eps: &Eps, sig: &Signature) -> Option<Rule> {
    let (lhs, rhs) = (&ineq.lhs, &ineq.rhs);
    if lhs.is_pure() && has_critical(rhs, Sign::Pos, eps, sig) {
        return match rhs {
            Formula::And(..) => Some(Rule::SplitRight),
            Formula::Or(a, b) => {
                if b.is_pure() && !has_critical(b, Sign::Pos, eps, sig) {
                    Some(Rule::ResidOr { moved: 1 })
                } else if a.is_pure() && !has_critical(a, Sign::Pos, eps, sig) {
                    Some(Rule::ResidOr { moved: 0 })
                } else {
                    None
                }
            }
            Formula::Imp(a, _) if a.is_pure() => Some(Rule::ResidImp),
            Formula::Conn(_, args) => {
                let (kind, orders) = kind_of(rhs, sig)?;
                match kind {
                    Kind::Additive if matches!(lhs, Formula::Nominal(_)) => {
                        let coords = critical_coords(args, &orders, Sign::Pos, eps, sig);
                        (!coords.is_empty()).then_some(Rule::ApproxNom { coords })
                    }
                    Kind::Multiplicative if args.len() == 1 => Some(Rule::AdjBox),
                    _ => None,
                }
            }
            _ => None,
        };
    }
    if rhs.is_pure() && has_critical(lhs, Sign::Neg, eps, sig) {
        return match lhs {
            Formula::Or(..) => Some(Rule::SplitLeft),
            Formula::And(a, b) => {
                if b.is_pure() && !has_critical(b, Sign::Neg, eps, sig) {
                    Some(Rule::ResidAnd { moved: 1 })
                } else if a.is_pure() && !has_critical(a, Sign::Neg, eps, sig) {
                    Some(Rule::ResidAnd { moved: 0 })
                } else {
                    None
                }
            }
            Formula::Imp(a, b) if matches!(rhs, Formula::Conominal(_)) => {
                let coords: Vec<usize> = [(0, a), (1, b)]
                    .into_iter()
                    .filter(|(_, x)| !x.is_pure())
                    .map(|(k, _)| k)
                    .collect();
                (!coords.is_empty()).then_some(Rule::ApproxImp { coords })
            }
            Formula::Conn(_, args) => {
                let (kind, orders) = kind_of(lhs, sig)?;
                match kind {
                    Kind::Multiplicative if matches!(rhs, Formula::Conominal(_)) => {
                        let coords = critical_coords(args, &orders, Sign::Neg, eps, sig);
                        (!coords.is_empty()).then_some(Rule::ApproxConom { coords })
                    }
                    Kind::Additive if args.len() == 1 => Some(Rule::AdjDia),
                    _ => None,
                }
            }
            _ => None,
        };
    }
    None
}

/// Next guided move on `sys`: the first item-level rule in item order, else
/// an Ackermann step on the earliest variable in the Ω-stratified order.
/// The returned index is meaningless for Ackermann.
pub fn guided_step(sys: &System, cert: &Certificate) -> Option<(Rule, usize)> {
    let sig = &*sys.sig;
    for (k, item) in sys.items.iter().enumerate() {
        if let Some(rule) = guided_rule(&item.ineq, &cert.eps, sig) {
            return Some((rule, k));
        }
    }
    let present = sys.vars();
    let order: Vec<Sym> = cert.stratified_vars().into_iter().filter(|p| present.contains(p)).collect();
    let preferred = |p: &Sym| match cert.eps.get(p) {
        Some(Order::Dual) => Dir::Left,
        _ => Dir::Right,
    };
    for other in [false, true] {
        for p in &order {
            let dir = match (preferred(p), other) {
                (d, false) => d,
                (Dir::Right, true) => Dir::Left,
                (Dir::Left, true) => Dir::Right,
            };
            if ackermann_shape(sys, p, dir).is_ok() {
                return Some((Rule::Ackermann { var: p.clone(), dir }, 0));
            }
        }
    }
    None
}

fn entry(rule: &Rule, target: Option<&Item>, out: &[System]) -> TraceEntry {
    TraceEntry {
        rule: rule.to_string(),
        target: target.map(|i| i.ineq.to_string()),
        system: out.iter().map(System::lines).collect(),
    }
}

fn discharge_entry(sys: &System) -> TraceEntry {
    TraceEntry {
        rule: Rule::Discharge.to_string(),
        target: Some(sys.to_string()),
        system: vec![],
    }
}

struct Outcome {
    done: Vec<System>,
    stuck: Vec<System>,
}

fn run_guided(sys: System, cert: &Certificate, trace: &mut Vec<TraceEntry>) -> Result<Outcome, Error> {
    let mut out = Outcome {
        done: vec![],
        stuck: vec![],
    };
    let mut todo = vec![sys];
    let mut steps = 0;
    while let Some(sys) = todo.pop() {
        if sys.is_tautological() {
            trace.push(discharge_entry(&sys));
            continue;
        }
        if sys.is_pure() {
            out.done.push(sys);
            continue;
        }
        steps += 1;
        if steps > MAX_GUIDED_STEPS {
            return Err(Error::Budget(steps));
        }
        match guided_step(&sys, cert) {
            Some((rule, target)) => {
                let next = apply_rule(&sys, &rule, target)?;
                let item = match rule {
                    Rule::Ackermann { .. } => None,
                    _ => sys.items.get(target),
                };
                trace.push(entry(&rule, item, &next));
                todo.extend(next.into_iter().rev());
            }
            None => out.stuck.push(sys),
        }
    }
    Ok(out)
}

/// Every move the exhaustive search may try on `sys`.
fn moves(sys: &System) -> Vec<(Rule, usize)> {
    let sig = &*sys.sig;
    let mut out = Vec::new();
    for p in sys.vars() {
        for dir in [Dir::Right, Dir::Left] {
            if ackermann_shape(sys, &p, dir).is_ok() {
                out.push((Rule::Ackermann { var: p.clone(), dir }, 0));
            }
        }
    }
    let impure = |args: &[Formula]| (0..args.len()).filter(|&k| !args[k].is_pure()).collect::<Vec<_>>();
    for (k, item) in sys.items.iter().enumerate() {
        let Inequality { lhs, rhs } = &item.ineq;
        if item.ineq.is_pure() {
            continue;
        }
        let mut push = |r: Rule| out.push((r, k));
        match rhs {
            Formula::And(..) => push(Rule::SplitRight),
            Formula::Or(..) => {
                push(Rule::ResidOr { moved: 0 });
                push(Rule::ResidOr { moved: 1 });
            }
            Formula::Imp(..) => push(Rule::ResidImp),
            Formula::Conn(_, args) => match kind_of(rhs, sig) {
                Some((Kind::Multiplicative, _)) if args.len() == 1 => push(Rule::AdjBox),
                Some((Kind::Additive, _)) if matches!(lhs, Formula::Nominal(_)) => {
                    let coords = impure(args);
                    if !coords.is_empty() {
                        push(Rule::ApproxNom { coords });
                    }
                }
                _ => {}
            },
            _ => {}
        }
        match lhs {
            Formula::Or(..) => push(Rule::SplitLeft),
            Formula::And(..) => {
                push(Rule::ResidAnd { moved: 0 });
                push(Rule::ResidAnd { moved: 1 });
            }
            Formula::Imp(a, b) if matches!(rhs, Formula::Conominal(_)) => {
                let coords = impure(&[(**a).clone(), (**b).clone()]);
                if !coords.is_empty() {
                    push(Rule::ApproxImp { coords });
                }
            }
            Formula::Conn(_, args) => match kind_of(lhs, sig) {
                Some((Kind::Additive, _)) if args.len() == 1 => push(Rule::AdjDia),
                Some((Kind::Multiplicative, _)) if matches!(rhs, Formula::Conominal(_)) => {
                    let coords = impure(args);
                    if !coords.is_empty() {
                        push(Rule::ApproxConom { coords });
                    }
                }
                _ => {}
            },
            _ => {}
        }
    }
    out
}

struct Search {
    nodes: usize,
    max_nodes: usize,
    failed: HashSet<(Vec<Item>, usize)>,
}

struct Solved {
    done: Vec<System>,
    trace: Vec<TraceEntry>,
}

fn dfs(sys: &System, depth: usize, ctx: &mut Search) -> Result<Option<Solved>, Error> {
    ctx.nodes += 1;
    if ctx.nodes > ctx.max_nodes {
        return Err(Error::Budget(ctx.nodes - 1));
    }
    if sys.is_tautological() {
        return Ok(Some(Solved {
            done: vec![],
            trace: vec![discharge_entry(sys)],
        }));
    }
    if sys.is_pure() {
        return Ok(Some(Solved {
            done: vec![sys.clone()],
            trace: vec![],
        }));
    }
    if depth == 0 {
        return Ok(None);
    }
    let key = (sys.items.clone(), depth);
    if ctx.failed.contains(&key) {
        return Ok(None);
    }
    'moves: for (rule, target) in moves(sys) {
        let Ok(branches) = apply_rule(sys, &rule, target) else {
            continue;
        };
        let item = match rule {
            Rule::Ackermann { .. } => None,
            _ => sys.items.get(target),
        };
        let mut solved = Solved {
            done: vec![],
            trace: vec![entry(&rule, item, &branches)],
        };
        for b in &branches {
            match dfs(b, depth - 1, ctx)? {
                Some(s) => {
                    solved.done.extend(s.done);
                    solved.trace.extend(s.trace);
                }
                None => continue 'moves,
            }
        }
        return Ok(Some(solved));
    }
    ctx.failed.insert(key);
    Ok(None)
}

fn run_exhaustive(sys: System, max_depth: usize, max_nodes: usize, trace: &mut Vec<TraceEntry>) -> Result<Outcome, Error> {
    let mut ctx = Search {
        nodes: 0,
        max_nodes,
        failed: HashSet::new(),
    };
    for depth in 1..=max_depth {
        ctx.failed.clear();
        if let Some(s) = dfs(&sys, depth, &mut ctx)? {
            trace.extend(s.trace);
            return Ok(Outcome {
                done: s.done,
                stuck: vec![],
            });
        }
    }
    Ok(Outcome {
        done: vec![],
        stuck: vec![sys],
    })
}

fn trivially_true(i: &Inequality) -> bool {
    i.lhs == i.rhs || i.lhs == Formula::Bot || i.rhs == Formula::Top
}

fn occurrences(q: &QuasiInequality, name: &str) -> usize {
    q.all().filter(|i| i.mentions(name)).count()
}

/// Drop trivially true antecedents and eliminate conominals and nominals
/// bound by a single antecedent against the consequent:
/// `t ≤ @m ⇒ s ≤ @m` becomes `s ≤ t` and `#i ≤ t ⇒ #i ≤ s` becomes `t ≤ s`.
/// Returns `None` when the result is trivially valid.
pub fn simplify_quasi(q: &QuasiInequality) -> Option<QuasiInequality> {
    let mut q = q.clone();
    q.antecedent.retain(|a| !trivially_true(a));
    loop {
        let mut changed = false;
        if let Formula::Conominal(m) = &q.consequent.rhs {
            let m = m.clone();
            let hit = q
                .antecedent
                .iter()
                .position(|a| a.rhs == Formula::Conominal(m.clone()) && !a.lhs.mentions(&m));
            if let Some(k) = hit {
                if occurrences(&q, &m) == 2 && !q.consequent.lhs.mentions(&m) {
                    let a = q.antecedent.remove(k);
                    q.consequent = Inequality::new(q.consequent.lhs.clone(), a.lhs);
                    changed = true;
                }
            }
        }
        if let Formula::Nominal(i) = &q.consequent.lhs {
            let i = i.clone();
            let hit = q
                .antecedent
                .iter()
                .position(|a| a.lhs == Formula::Nominal(i.clone()) && !a.rhs.mentions(&i));
            if let Some(k) = hit {
                if occurrences(&q, &i) == 2 && !q.consequent.rhs.mentions(&i) {
                    let a = q.antecedent.remove(k);
                    q.consequent = Inequality::new(a.rhs, q.consequent.rhs.clone());
                    changed = true;
                }
            }
        }
        if !changed {
            break;
        }
        q.antecedent.retain(|a| !trivially_true(a));
    }
    if trivially_true(&q.consequent) || q.antecedent.contains(&q.consequent) {
        return None;
    }
    Some(q)
}

/// Run on an already approximated system.
pub fn run_system(sys: System, strategy: &Strategy) -> Result<AlbaResult, Error> {
    let mut trace = Vec::new();
    let outcome = match strategy {
        Strategy::Guided(cert) => run_guided(sys, cert, &mut trace)?,
        Strategy::Exhaustive { max_depth, max_nodes } => run_exhaustive(sys, *max_depth, *max_nodes, &mut trace)?,
    };
    Ok(assemble(vec![outcome], trace))
}

fn assemble(outcomes: Vec<Outcome>, trace: Vec<TraceEntry>) -> AlbaResult {
    let mut done = Vec::new();
    let mut stuck = Vec::new();
    for o in outcomes {
        done.extend(o.done);
        stuck.extend(o.stuck);
    }
    if !stuck.is_empty() {
        let mut remaining: Vec<Sym> = Vec::new();
        for s in &stuck {
            for p in s.vars() {
                if !remaining.contains(&p) {
                    remaining.push(p);
                }
            }
        }
        remaining.sort();
        return AlbaResult::Failure { stuck, remaining, trace };
    }
    let safe = done.iter().all(|s| s.safe);
    let raw: Vec<QuasiInequality> = done.iter().map(System::to_quasi).collect();
    let mut pure: Vec<QuasiInequality> = Vec::new();
    for q in raw.iter().filter_map(simplify_quasi) {
        if !pure.contains(&q) {
            pure.push(q);
        }
    }
    AlbaResult::Success { pure, raw, trace, safe }
}

/// Preprocess, approximate and reduce `ineq`. The guided strategy requires
/// `ineq` to be inductive for its certificate.
pub fn run(ineq: &Inequality, strategy: &Strategy, sig: &Signature) -> Result<AlbaResult, Error> {
    if let Strategy::Guided(cert) = strategy {
        let verdict = is_inductive(ineq, &cert.eps, &cert.omega, sig)?;
        if !verdict.ok {
            let why = verdict
                .violations
                .first()
                .map(|v| v.reason.clone())
                .unwrap_or_else(|| "no violation recorded".into());
            return Err(Error::NotInductive(why));
        }
    }
    let parts = preprocess(ineq, sig);
    let mut trace = Vec::new();
    if parts.len() != 1 || parts[0] != *ineq {
        trace.push(TraceEntry {
            rule: "preprocess".into(),
            target: Some(ineq.to_string()),
            system: vec![parts.iter().map(|p| p.to_string()).collect()],
        });
    }
    let mut outcomes = Vec::new();
    for part in &parts {
        let sys = System::first_approximation(part, sig);
        trace.push(TraceEntry {
            rule: "first-approximation".into(),
            target: Some(part.to_string()),
            system: vec![sys.lines()],
        });
        outcomes.push(match strategy {
            Strategy::Guided(cert) => run_guided(sys, cert, &mut trace)?,
            Strategy::Exhaustive { max_depth, max_nodes } => run_exhaustive(sys, *max_depth, *max_nodes, &mut trace)?,
        });
    }
    Ok(assemble(outcomes, trace))
}
