use crate::classify::{classes, NodeClass};
use crate::syntax::{child_orders, polarity, Base, Formula, Inequality, Kind, Label, Polarity, Sign, Signature};

/// Whether a skeleton node distributes over `+∨` / `−∧` children.
fn distributes(f: &Formula, sign: Sign, sig: &Signature) -> bool {
    match (sign, f) {
        (Sign::Pos, Formula::And(..)) | (Sign::Neg, Formula::Or(..)) => true,
        (Sign::Neg, Formula::Imp(..)) => sig.base == Base::Har,
        (s, Formula::Conn(name, _)) => match sig.get(name) {
            Some(d) => matches!((s, d.kind), (Sign::Pos, Kind::Additive) | (Sign::Neg, Kind::Multiplicative)),
            None => false,
        },
        _ => false,
    }
}

/// One distribution step at the first skeleton position where it applies.
fn distribute_once(f: &Formula, sign: Sign, sig: &Signature) -> Option<Formula> {
    let kids = f.children();
    let orders = child_orders(f, sig);
    if distributes(f, sign, sig) {
        for (k, (c, o)) in kids.iter().zip(&orders).enumerate() {
            let cs = sign.apply(*o);
            let parts = match (cs, c) {
                (Sign::Pos, Formula::Or(a, b)) | (Sign::Neg, Formula::And(a, b)) => Some((a, b)),
                _ => None,
            };
            if let Some((a, b)) = parts {
                let with = |x: &Formula| {
                    let mut v: Vec<Formula> = kids.iter().map(|c| (*c).clone()).collect();
                    v[k] = x.clone();
                    f.with_children(v)
                };
                return Some(match sign {
                    Sign::Pos => Formula::or(with(a), with(b)),
                    Sign::Neg => Formula::and(with(a), with(b)),
                });
            }
        }
    }
    if !classes(sign, &Label::of(f), sig).contains(&NodeClass::Sac) {
        return None;
    }
    for (k, (c, o)) in kids.iter().zip(&orders).enumerate() {
        if let Some(new) = distribute_once(c, sign.apply(*o), sig) {
            let mut v: Vec<Formula> = kids.iter().map(|c| (*c).clone()).collect();
            v[k] = new;
            return Some(f.with_children(v));
        }
    }
    None
}

/// Exhaustively distribute skeleton nodes over `+∨` and `−∧`.
pub fn distribute(f: &Formula, sign: Sign, sig: &Signature) -> Formula {
    let mut cur = f.clone();
    while let Some(next) = distribute_once(&cur, sign, sig) {
        cur = next;
    }
    cur
}

fn split(ineq: Inequality, out: &mut Vec<Inequality>) {
    match (ineq.lhs, ineq.rhs) {
        (Formula::Or(a, b), rhs) => {
            split(Inequality::new(*a, rhs.clone()), out);
            split(Inequality::new(*b, rhs), out);
        }
        (lhs, Formula::And(a, b)) => {
            split(Inequality::new(lhs.clone(), *a), out);
            split(Inequality::new(lhs, *b), out);
        }
        (lhs, rhs) => out.push(Inequality::new(lhs, rhs)),
    }
}

fn push_unique(out: &mut Vec<Inequality>, i: Inequality) {
    if !out.contains(&i) {
        out.push(i);
    }
}

/// Distribution and splitting only.
pub fn distribute_and_split(ineq: &Inequality, sig: &Signature) -> Vec<Inequality> {
    let d = Inequality::new(distribute(&ineq.lhs, Sign::Pos, sig), distribute(&ineq.rhs, Sign::Neg, sig));
    let mut parts = Vec::new();
    split(d, &mut parts);
    let mut out = Vec::new();
    for p in parts {
        push_unique(&mut out, p);
    }
    out
}

/// Monotone and antitone variable elimination: a variable occurring only
/// negatively on the left and positively on the right becomes `⊥`, and dually `⊤`.
pub fn eliminate_variables(ineq: &Inequality, sig: &Signature) -> Inequality {
    let mut cur = ineq.clone();
    loop {
        let mut changed = false;
        for p in cur.sorted_vars() {
            let l = polarity(&cur.lhs, &p, sig);
            let r = polarity(&cur.rhs, &p, sig);
            use Polarity::*;
            let value = match (l, r) {
                (Negative | Absent, Positive | Absent) => Formula::Bot,
                (Positive | Absent, Negative | Absent) => Formula::Top,
                _ => continue,
            };
            cur = Inequality::new(cur.lhs.substitute_one(&p, &value), cur.rhs.substitute_one(&p, &value));
            changed = true;
        }
        if !changed {
            return cur;
        }
    }
}

/// Distribution, splitting and variable elimination to a fixpoint.
pub fn preprocess(ineq: &Inequality, sig: &Signature) -> Vec<Inequality> {
    let mut todo = vec![ineq.clone()];
    let mut out = Vec::new();
    while let Some(i) = todo.pop() {
        let parts = distribute_and_split(&i, sig);
        if parts.len() == 1 && parts[0] == i {
            let e = eliminate_variables(&i, sig);
            if e == i {
                push_unique(&mut out, i);
            } else {
                todo.push(e);
            }
        } else {
            todo.extend(parts.into_iter().rev());
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_inequality;

    fn ineq(s: &str) -> Inequality {
        parse_inequality(s, &Signature::har(), false).unwrap()
    }

    fn show(v: &[Inequality]) -> Vec<String> {
        v.iter().map(|i| i.to_string()).collect()
    }

    #[test]
    fn distribution_then_split() {
        let sig = Signature::har();
        assert_eq!(
            show(&distribute_and_split(&ineq("dia (p \\/ q) <= r"), &sig)),
            vec!["dia p <= r", "dia q <= r"]
        );
        assert_eq!(
            show(&distribute_and_split(&ineq("p /\\ (q \\/ r) <= s"), &sig)),
            vec!["p /\\ q <= s", "p /\\ r <= s"]
        );
        // +∨ below a PIA node is not skeleton and stays.
        assert_eq!(
            show(&distribute_and_split(&ineq("box (p \\/ q) <= r"), &sig)),
            vec!["box (p \\/ q) <= r"]
        );
        // −∧ under −box on the right distributes.
        assert_eq!(
            show(&distribute_and_split(&ineq("r <= box (p /\\ q)"), &sig)),
            vec!["r <= box p", "r <= box q"]
        );
    }

    #[test]
    fn elimination_collapses_one_sided_variables() {
        let sig = Signature::har();
        assert_eq!(show(&preprocess(&ineq("dia (p \\/ q) <= r"), &sig)), vec!["dia top <= bot"]);
        assert_eq!(show(&preprocess(&ineq("box p <= p"), &sig)), vec!["box p <= p"]);
        assert_eq!(
            show(&preprocess(&ineq("box (p -> q) <= box p -> box q"), &sig)),
            vec!["box (p -> q) <= box p -> box q"]
        );
    }

    #[test]
    fn imp_distributes_on_the_right() {
        let sig = Signature::har();
        assert_eq!(
            show(&distribute_and_split(&ineq("s <= (p \\/ q) -> r"), &sig)),
            vec!["s <= p -> r", "s <= q -> r"]
        );
    }
}
