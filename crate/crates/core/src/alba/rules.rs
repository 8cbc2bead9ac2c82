use std::fmt;

use serde::{Deserialize, Serialize};

use super::{Error, Item, Provenance, System};
use crate::syntax::{polarity, Formula, Inequality, Kind, Order, Polarity, Signature, Sym};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Dir {
    Right,
    Left,
}

/// Rewrite rules of the calculus. Each rule acts on one target inequality of a system.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "rule")]
pub enum Rule {
    /// `φ ≤ ψ ∧ χ` becomes `φ ≤ ψ` and `φ ≤ χ`.
    SplitRight,
    /// `φ ∨ ψ ≤ χ` becomes `φ ≤ χ` and `ψ ≤ χ`.
    SplitLeft,
    /// `φ_0 ∧ φ_1 ≤ χ` becomes `φ_k ≤ φ_moved → χ` for the other conjunct `φ_k`.
    ResidAnd { moved: usize },
    /// `φ ≤ ψ_0 ∨ ψ_1` becomes `φ − ψ_moved ≤ ψ_k`.
    ResidOr { moved: usize },
    /// `φ ≤ ψ → χ` becomes `φ ∧ ψ ≤ χ`.
    ResidImp,
    /// Adjunction for a unary additive connective on the left.
    AdjDia,
    /// Adjunction for a unary multiplicative connective on the right.
    AdjBox,
    /// Approximation of `#i ≤ k(..)` in the listed coordinates.
    ApproxNom { coords: Vec<usize> },
    /// Approximation of `l(..) ≤ @m` in the listed coordinates.
    ApproxConom { coords: Vec<usize> },
    /// Approximation of `φ → ψ ≤ @m` in the listed coordinates.
    ApproxImp { coords: Vec<usize> },
    /// Ackermann elimination of a variable (right or left).
    Ackermann { var: Sym, dir: Dir },
    /// A branch containing `#i0 ≤ t` and `t ≤ @m0` is valid and dropped.
    Discharge,
}

impl Rule {
    pub fn name(&self) -> &'static str {
        match self {
            Rule::SplitRight => "split-right",
            Rule::SplitLeft => "split-left",
            Rule::ResidAnd { .. } => "residuation-and",
            Rule::ResidOr { .. } => "residuation-or",
            Rule::ResidImp => "residuation-imp",
            Rule::AdjDia => "adjunction-additive",
            Rule::AdjBox => "adjunction-multiplicative",
            Rule::ApproxNom { .. } => "approximation-nominal",
            Rule::ApproxConom { .. } => "approximation-conominal",
            Rule::ApproxImp { .. } => "approximation-imp",
            Rule::Ackermann { dir: Dir::Right, .. } => "ackermann-right",
            Rule::Ackermann { dir: Dir::Left, .. } => "ackermann-left",
            Rule::Discharge => "discharge",
        }
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Rule::ResidAnd { moved } | Rule::ResidOr { moved } => write!(f, "{}[{}]", self.name(), moved),
            Rule::ApproxNom { coords } | Rule::ApproxConom { coords } | Rule::ApproxImp { coords } => {
                write!(f, "{}{:?}", self.name(), coords)
            }
            Rule::Ackermann { var, .. } => write!(f, "{}[{}]", self.name(), var),
            _ => f.write_str(self.name()),
        }
    }
}

fn not_applicable(rule: &Rule, why: impl Into<String>) -> Error {
    Error::NotApplicable {
        rule: rule.to_string(),
        reason: why.into(),
    }
}

/// Replace the target item by `replacement`, flagging the run unsafe if the
/// target was a side condition.
fn rewrite(sys: &System, target: usize, replacement: Vec<Item>) -> System {
    let mut out = sys.clone();
    if out.items[target].side.is_some() {
        out.safe = false;
    }
    out.items.splice(target..=target, replacement);
    out
}

fn main(lhs: Formula, rhs: Formula) -> Item {
    Item {
        ineq: Inequality::new(lhs, rhs),
        side: None,
    }
}

fn side(lhs: Formula, rhs: Formula, rule: &Rule, step: usize) -> Item {
    Item {
        ineq: Inequality::new(lhs, rhs),
        side: Some(Provenance {
            rule: rule.name().to_string(),
            step,
        }),
    }
}

fn pick(moved: usize, a: &Formula, b: &Formula) -> Option<(Formula, Formula)> {
    match moved {
        0 => Some((a.clone(), b.clone())),
        1 => Some((b.clone(), a.clone())),
        _ => None,
    }
}

fn unary<'a>(f: &'a Formula, sig: &Signature, kind: Kind) -> Option<(Sym, Order, &'a Formula)> {
    if let Formula::Conn(name, args) = f {
        let d = sig.get(name)?;
        if d.kind == kind && d.is_unary() && args.len() == 1 {
            return Some((name.clone(), d.coords[0], &args[0]));
        }
    }
    None
}

/// Apply `rule` to the `target`-th inequality. Returns one system per
/// meta-disjunct (approximation rules branch).
pub fn apply_rule(sys: &System, rule: &Rule, target: usize) -> Result<Vec<System>, Error> {
    let sig = &*sys.sig;
    if let Rule::Ackermann { var, dir } = rule {
        return ackermann(sys, var, *dir).map(|s| vec![s]);
    }
    if let Rule::Discharge = rule {
        return if sys.is_tautological() {
            Ok(vec![])
        } else {
            Err(not_applicable(rule, "no matching pair of inequalities"))
        };
    }
    let item = sys
        .items
        .get(target)
        .ok_or_else(|| not_applicable(rule, format!("no inequality at {}", target)))?;
    let (lhs, rhs) = (&item.ineq.lhs, &item.ineq.rhs);
    let step = sys.steps + 1;
    let mut out = match rule {
        Rule::SplitRight => match rhs {
            Formula::And(a, b) => vec![rewrite(
                sys,
                target,
                vec![main(lhs.clone(), (**a).clone()), main(lhs.clone(), (**b).clone())],
            )],
            _ => return Err(not_applicable(rule, "right side is not a conjunction")),
        },
        Rule::SplitLeft => match lhs {
            Formula::Or(a, b) => vec![rewrite(
                sys,
                target,
                vec![main((**a).clone(), rhs.clone()), main((**b).clone(), rhs.clone())],
            )],
            _ => return Err(not_applicable(rule, "left side is not a disjunction")),
        },
        Rule::ResidAnd { moved } => match lhs {
            Formula::And(a, b) => {
                let (mv, stay) = pick(*moved, a, b).ok_or_else(|| not_applicable(rule, "bad index"))?;
                vec![rewrite(sys, target, vec![main(stay, Formula::imp(mv, rhs.clone()))])]
            }
            _ => return Err(not_applicable(rule, "left side is not a conjunction")),
        },
        Rule::ResidOr { moved } => match rhs {
            Formula::Or(a, b) => {
                let (mv, stay) = pick(*moved, a, b).ok_or_else(|| not_applicable(rule, "bad index"))?;
                vec![rewrite(sys, target, vec![main(Formula::minus(lhs.clone(), mv), stay)])]
            }
            _ => return Err(not_applicable(rule, "right side is not a disjunction")),
        },
        Rule::ResidImp => match rhs {
            Formula::Imp(a, b) => vec![rewrite(
                sys,
                target,
                vec![main(Formula::and(lhs.clone(), (**a).clone()), (**b).clone())],
            )],
            _ => return Err(not_applicable(rule, "right side is not an implication")),
        },
        Rule::AdjDia => {
            let (name, eta, arg) =
                unary(lhs, sig, Kind::Additive).ok_or_else(|| not_applicable(rule, "left side is not unary additive"))?;
            let items = match eta {
                Order::One => vec![
                    side(Formula::conn(&name, vec![Formula::Bot]), rhs.clone(), rule, step),
                    main(arg.clone(), Formula::BlackBox(name.clone(), Box::new(rhs.clone()))),
                ],
                Order::Dual => vec![
                    side(Formula::conn(&name, vec![Formula::Top]), rhs.clone(), rule, step),
                    main(Formula::BlackLeft(name.clone(), Box::new(rhs.clone())), arg.clone()),
                ],
            };
            vec![rewrite(sys, target, items)]
        }
        Rule::AdjBox => {
            let (name, eta, arg) = unary(rhs, sig, Kind::Multiplicative)
                .ok_or_else(|| not_applicable(rule, "right side is not unary multiplicative"))?;
            let items = match eta {
                Order::One => vec![
                    side(lhs.clone(), Formula::conn(&name, vec![Formula::Top]), rule, step),
                    main(Formula::BlackDia(name.clone(), Box::new(lhs.clone())), arg.clone()),
                ],
                Order::Dual => vec![
                    side(lhs.clone(), Formula::conn(&name, vec![Formula::Bot]), rule, step),
                    main(arg.clone(), Formula::BlackRight(name.clone(), Box::new(lhs.clone()))),
                ],
            };
            vec![rewrite(sys, target, items)]
        }
        Rule::ApproxNom { coords } => {
            if !matches!(lhs, Formula::Nominal(_)) {
                return Err(not_applicable(rule, "left side is not a nominal"));
            }
            let Formula::Conn(name, args) = rhs else {
                return Err(not_applicable(rule, "right side is not a connective"));
            };
            let d = sig
                .get(name)
                .filter(|d| d.kind == Kind::Additive)
                .ok_or_else(|| not_applicable(rule, "right side is not additive"))?;
            let orders = d.coords.clone();
            approximate(sys, target, rule, coords, args, &orders, Order::One, |args| {
                (lhs.clone(), Formula::Conn(name.clone(), args))
            })?
        }
        Rule::ApproxConom { coords } => {
            if !matches!(rhs, Formula::Conominal(_)) {
                return Err(not_applicable(rule, "right side is not a conominal"));
            }
            let Formula::Conn(name, args) = lhs else {
                return Err(not_applicable(rule, "left side is not a connective"));
            };
            let d = sig
                .get(name)
                .filter(|d| d.kind == Kind::Multiplicative)
                .ok_or_else(|| not_applicable(rule, "left side is not multiplicative"))?;
            let orders = d.coords.clone();
            approximate(sys, target, rule, coords, args, &orders, Order::Dual, |args| {
                (Formula::Conn(name.clone(), args), rhs.clone())
            })?
        }
        Rule::ApproxImp { coords } => {
            if !matches!(rhs, Formula::Conominal(_)) {
                return Err(not_applicable(rule, "right side is not a conominal"));
            }
            let Formula::Imp(a, b) = lhs else {
                return Err(not_applicable(rule, "left side is not an implication"));
            };
            // → is meet-preserving in its second coordinate and join-reversing in its first,
            // so a conominal bound on it never has an empty-approximant disjunct.
            let args = vec![(**a).clone(), (**b).clone()];
            let mut s = sys.clone();
            let mut new_args = args.clone();
            let mut extra = Vec::new();
            for &c in coords {
                match c {
                    0 => {
                        let j = s.fresh_nominal();
                        extra.push(main(Formula::Nominal(j.clone()), args[0].clone()));
                        new_args[0] = Formula::Nominal(j);
                    }
                    1 => {
                        let n = s.fresh_conominal();
                        extra.push(main(args[1].clone(), Formula::Conominal(n.clone())));
                        new_args[1] = Formula::Conominal(n);
                    }
                    _ => return Err(not_applicable(rule, "coordinate out of range")),
                }
            }
            let [na, nb]: [Formula; 2] = new_args.try_into().expect("two arguments");
            extra.push(main(Formula::imp(na, nb), rhs.clone()));
            vec![rewrite(&s, target, extra)]
        }
        Rule::Ackermann { .. } | Rule::Discharge => unreachable!(),
    };
    for s in &mut out {
        s.steps = step;
    }
    Ok(out)
}

/// Shared body of the two branching approximation rules. `flip` is `One` when
/// positive coordinates receive nominals (`#i ≤ k(..)`), `Dual` when they receive
/// conominals (`l(..) ≤ @m`).
#[allow(clippy::too_many_arguments)]
fn approximate(
    sys: &System,
    target: usize,
    rule: &Rule,
    coords: &[usize],
    args: &[Formula],
    orders: &[Order],
    flip: Order,
    rebuild: impl Fn(Vec<Formula>) -> (Formula, Formula),
) -> Result<Vec<System>, Error> {
    if coords.is_empty() || coords.iter().any(|&c| c >= args.len()) {
        return Err(not_applicable(rule, "bad coordinate list"));
    }
    let mut sorted = coords.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    let step = sys.steps + 1;
    let mut out = Vec::new();
    for mask in 0u32..(1 << sorted.len()) {
        let mut s = sys.clone();
        let mut new_args = args.to_vec();
        let mut extra = Vec::new();
        for (bit, &c) in sorted.iter().enumerate() {
            let chosen = mask >> bit & 1 == 1;
            // Coordinate behaves like a join-preserving one when its type matches `flip`.
            let join_like = orders[c] == flip;
            match (chosen, join_like) {
                (true, true) => {
                    let j = s.fresh_nominal();
                    extra.push(main(Formula::Nominal(j.clone()), args[c].clone()));
                    new_args[c] = Formula::Nominal(j);
                }
                (true, false) => {
                    let n = s.fresh_conominal();
                    extra.push(main(args[c].clone(), Formula::Conominal(n.clone())));
                    new_args[c] = Formula::Conominal(n);
                }
                (false, true) => new_args[c] = Formula::Bot,
                (false, false) => new_args[c] = Formula::Top,
            }
        }
        let (l, r) = rebuild(new_args);
        if mask == 0 {
            extra.push(side(l, r, rule, step));
        } else {
            extra.push(main(l, r));
        }
        out.push(rewrite(&s, target, extra));
    }
    Ok(out)
}

/// Check the Ackermann shape for `p` and return the witnessing split.
pub fn ackermann_shape(sys: &System, p: &Sym, dir: Dir) -> Result<(Vec<usize>, Vec<Formula>), String> {
    let mut alphas = Vec::new();
    let mut idx = Vec::new();
    let sig = &*sys.sig;
    for (k, item) in sys.items.iter().enumerate() {
        let Inequality { lhs, rhs } = &item.ineq;
        let is_p = |f: &Formula| matches!(f, Formula::Var(q) if q == p);
        match dir {
            Dir::Right if is_p(rhs) && !lhs.contains_var(p) => {
                alphas.push(lhs.clone());
                idx.push(k);
                continue;
            }
            Dir::Left if is_p(lhs) && !rhs.contains_var(p) => {
                alphas.push(rhs.clone());
                idx.push(k);
                continue;
            }
            _ => {}
        }
        let pl = polarity(lhs, p, sig);
        let pr = polarity(rhs, p, sig);
        let ok = match dir {
            Dir::Right => {
                matches!(pl, Polarity::Positive | Polarity::Absent) && matches!(pr, Polarity::Negative | Polarity::Absent)
            }
            Dir::Left => {
                matches!(pl, Polarity::Negative | Polarity::Absent) && matches!(pr, Polarity::Positive | Polarity::Absent)
            }
        };
        if !ok {
            return Err(format!("`{}` blocks elimination of {}", item.ineq, p));
        }
    }
    Ok((idx, alphas))
}

pub fn ackermann(sys: &System, p: &Sym, dir: Dir) -> Result<System, Error> {
    let rule = Rule::Ackermann {
        var: p.clone(),
        dir,
    };
    if !sys.items.iter().any(|i| i.ineq.contains_var(p)) {
        return Err(not_applicable(&rule, format!("{} does not occur", p)));
    }
    let (idx, alphas) = ackermann_shape(sys, p, dir).map_err(|why| not_applicable(&rule, why))?;
    let value = match dir {
        Dir::Right => alphas.into_iter().reduce(Formula::or).unwrap_or(Formula::Bot),
        Dir::Left => alphas.into_iter().reduce(Formula::and).unwrap_or(Formula::Top),
    };
    let mut out = sys.clone();
    out.items = sys
        .items
        .iter()
        .enumerate()
        .filter(|(k, _)| !idx.contains(k))
        .map(|(_, item)| Item {
            ineq: Inequality::new(item.ineq.lhs.substitute_one(p, &value), item.ineq.rhs.substitute_one(p, &value)),
            side: item.side.clone(),
        })
        .collect();
    out.steps += 1;
    Ok(out)
}
