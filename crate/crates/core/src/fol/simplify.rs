use super::Fo;
use crate::syntax::Sym;

fn conjuncts(f: &Fo, out: &mut Vec<Fo>) {
    match f {
        Fo::And(a, b) => {
            conjuncts(a, out);
            conjuncts(b, out);
        }
        Fo::True => {}
        _ => out.push(f.clone()),
    }
}

fn disjuncts(f: &Fo, out: &mut Vec<Fo>) {
    match f {
        Fo::Or(a, b) => {
            disjuncts(a, out);
            disjuncts(b, out);
        }
        Fo::False => {}
        _ => out.push(f.clone()),
    }
}

fn binders(f: &Fo) -> Vec<Sym> {
    let mut out = Vec::new();
    fn go(f: &Fo, out: &mut Vec<Sym>) {
        match f {
            Fo::Forall(x, a) | Fo::Exists(x, a) => {
                out.push(x.clone());
                go(a, out);
            }
            Fo::Not(a) => go(a, out),
            Fo::And(a, b) | Fo::Or(a, b) | Fo::Imp(a, b) => {
                go(a, out);
                go(b, out);
            }
            _ => {}
        }
    }
    go(f, &mut out);
    out
}

/// A term `t ≠ x` with `x ≡ t` among `parts`, usable for substitution
/// without capture anywhere in `scope`.
fn defining_equation(x: &Sym, parts: &[Fo], scope: &[&Fo]) -> Option<(usize, Sym)> {
    parts.iter().enumerate().find_map(|(k, p)| {
        let t = match p {
            Fo::Eq(a, b) if a == x && b != x => b,
            Fo::Eq(a, b) if b == x && a != x => a,
            _ => return None,
        };
        if scope.iter().any(|f| binders(f).contains(t)) {
            return None;
        }
        Some((k, t.clone()))
    })
}

fn forall(x: &Sym, body: Fo) -> Fo {
    if !body.free_vars().contains(x) {
        return body;
    }
    match body {
        Fo::And(a, b) => Fo::and(forall(x, *a), forall(x, *b)),
        Fo::Imp(a, c) => {
            let mut ants = Vec::new();
            conjuncts(&a, &mut ants);
            if let Some((k, t)) = defining_equation(x, &ants, &[&a, &c]) {
                ants.remove(k);
                let rest = Fo::and_all(ants.iter().map(|p| p.subst(x, &t)));
                return Fo::imp(rest, c.subst(x, &t));
            }
            let (outer, inner): (Vec<Fo>, Vec<Fo>) = ants.into_iter().partition(|p| !p.free_vars().contains(x));
            let core = if inner.is_empty() {
                Fo::forall(x, *c)
            } else {
                Fo::forall(x, Fo::imp(Fo::and_all(inner), *c))
            };
            if outer.is_empty() {
                core
            } else {
                Fo::imp(Fo::and_all(outer), core)
            }
        }
        Fo::Not(a) if matches!(*a, Fo::Eq(..)) => {
            // ∀x. x ≠ t is false on a nonempty domain
            let Fo::Eq(l, r) = &*a else { unreachable!() };
            if (l == x) != (r == x) {
                Fo::False
            } else {
                Fo::forall(x, Fo::Not(a))
            }
        }
        other => Fo::forall(x, other),
    }
}

fn exists(x: &Sym, body: Fo) -> Fo {
    if !body.free_vars().contains(x) {
        return body;
    }
    match body {
        Fo::Or(a, b) => Fo::or(exists(x, *a), exists(x, *b)),
        Fo::Eq(l, r) if (&l == x) != (&r == x) => Fo::True,
        body => {
            let mut parts = Vec::new();
            conjuncts(&body, &mut parts);
            if let Some((k, t)) = defining_equation(x, &parts, &[&body]) {
                parts.remove(k);
                return Fo::and_all(parts.iter().map(|p| p.subst(x, &t)));
            }
            let (outer, inner): (Vec<Fo>, Vec<Fo>) = parts.into_iter().partition(|p| !p.free_vars().contains(x));
            let core = Fo::exists(x, Fo::and_all(inner));
            if outer.is_empty() {
                core
            } else {
                Fo::and(Fo::and_all(outer), core)
            }
        }
    }
}

fn and(a: Fo, b: Fo) -> Fo {
    match (a, b) {
        (Fo::True, x) | (x, Fo::True) => x,
        (Fo::False, _) | (_, Fo::False) => Fo::False,
        (a, b) => {
            let mut seen = Vec::new();
            conjuncts(&a, &mut seen);
            let mut extra = Vec::new();
            conjuncts(&b, &mut extra);
            for p in extra {
                if !seen.contains(&p) {
                    seen.push(p);
                }
            }
            Fo::and_all(seen)
        }
    }
}

fn or(a: Fo, b: Fo) -> Fo {
    match (a, b) {
        (Fo::False, x) | (x, Fo::False) => x,
        (Fo::True, _) | (_, Fo::True) => Fo::True,
        (Fo::Not(a), b) => imp(*a, b),
        (a, b) if a == b => a,
        (a, b) => {
            let mut parts = Vec::new();
            disjuncts(&a, &mut parts);
            disjuncts(&b, &mut parts);
            parts.into_iter().reduce(Fo::or).unwrap_or(Fo::False)
        }
    }
}

fn imp(a: Fo, b: Fo) -> Fo {
    match (a, b) {
        (Fo::True, x) => x,
        (Fo::False, _) | (_, Fo::True) => Fo::True,
        (a, Fo::False) => not(a),
        (a, b) if a == b => Fo::True,
        // Currying: a → (b → c) is a ∧ b → c.
        (a, Fo::Imp(b, c)) => imp(and(a, *b), *c),
        (a, b) => {
            let mut ants = Vec::new();
            conjuncts(&a, &mut ants);
            let mut cons = Vec::new();
            conjuncts(&b, &mut cons);
            cons.retain(|c| !ants.contains(c));
            if cons.is_empty() {
                Fo::True
            } else {
                Fo::imp(a, Fo::and_all(cons))
            }
        }
    }
}

fn not(a: Fo) -> Fo {
    match a {
        Fo::True => Fo::False,
        Fo::False => Fo::True,
        Fo::Not(x) => *x,
        x => Fo::not(x),
    }
}

fn step(f: &Fo) -> Fo {
    match f {
        Fo::Eq(a, b) if a == b => Fo::True,
        Fo::True | Fo::False | Fo::Eq(..) | Fo::R(..) | Fo::N(_) | Fo::P(..) => f.clone(),
        Fo::Not(a) => not(step(a)),
        Fo::And(a, b) => and(step(a), step(b)),
        Fo::Or(a, b) => or(step(a), step(b)),
        Fo::Imp(a, b) => imp(step(a), step(b)),
        Fo::Forall(x, a) => forall(x, step(a)),
        Fo::Exists(x, a) => exists(x, step(a)),
    }
}

/// Equality elimination, double negation, constant folding, currying and
/// miniscoping, repeated to a fixpoint. The result is logically equivalent
/// to the input.
pub fn simplify(f: &Fo) -> Fo {
    let mut cur = f.clone();
    loop {
        let next = step(&cur);
        if next == cur {
            return cur;
        }
        cur = next;
    }
}
