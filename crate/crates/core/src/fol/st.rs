use std::collections::BTreeSet;

use super::{Error, Fo};
use crate::syntax::{Formula, Inequality, QuasiInequality, Sym};

/// Anything with a standard translation at a world variable.
#[derive(Clone, Copy, Debug)]
pub enum Translatable<'a> {
    Formula(&'a Formula),
    Inequality(&'a Inequality),
    Quasi(&'a QuasiInequality),
}

/// Supplies bound-variable names that clash with nothing already in use.
struct Fresh {
    used: BTreeSet<Sym>,
    next: usize,
}

impl Fresh {
    fn new(used: impl IntoIterator<Item = Sym>) -> Fresh {
        Fresh {
            used: used.into_iter().collect(),
            next: 0,
        }
    }

    fn var(&mut self, prefix: &str) -> Sym {
        loop {
            let s = Sym::from(format!("{}{}", prefix, self.next));
            self.next += 1;
            if self.used.insert(s.clone()) {
                return s;
            }
        }
    }
}

fn atoms_of(f: &Formula) -> Vec<Sym> {
    let mut v = f.nominals();
    v.extend(f.conominals());
    v
}

fn go(f: &Formula, x: &Sym, fresh: &mut Fresh) -> Result<Fo, Error> {
    let bad = || Error::Untranslatable(f.to_string());
    Ok(match f {
        Formula::Top => Fo::Eq(x.clone(), x.clone()),
        Formula::Bot => Fo::not(Fo::Eq(x.clone(), x.clone())),
        Formula::Var(p) => Fo::P(p.clone(), x.clone()),
        Formula::Nominal(j) => Fo::Eq(j.clone(), x.clone()),
        Formula::Conominal(m) => Fo::not(Fo::Eq(x.clone(), m.clone())),
        Formula::And(a, b) => Fo::and(go(a, x, fresh)?, go(b, x, fresh)?),
        Formula::Or(a, b) => Fo::or(go(a, x, fresh)?, go(b, x, fresh)?),
        Formula::Imp(a, b) => Fo::imp(go(a, x, fresh)?, go(b, x, fresh)?),
        Formula::Minus(a, b) => Fo::and(go(a, x, fresh)?, Fo::not(go(b, x, fresh)?)),
        Formula::Conn(name, args) if args.len() == 1 => match &**name {
            "neg" => Fo::not(go(&args[0], x, fresh)?),
            "dia" => {
                let y = fresh.var("y");
                let body = go(&args[0], &y, fresh)?;
                Fo::or(Fo::not(Fo::N(x.clone())), Fo::exists(&y, Fo::and(Fo::R(x.clone(), y.clone()), body)))
            }
            "box" => {
                let y = fresh.var("y");
                let body = go(&args[0], &y, fresh)?;
                Fo::and(Fo::N(x.clone()), Fo::forall(&y, Fo::imp(Fo::R(x.clone(), y.clone()), body)))
            }
            _ => return Err(bad()),
        },
        Formula::BlackDia(name, a) if &**name == "box" => {
            let y = fresh.var("y");
            let body = go(a, &y, fresh)?;
            Fo::exists(&y, Fo::and(Fo::R(y.clone(), x.clone()), body))
        }
        Formula::BlackBox(name, a) if &**name == "dia" => {
            let y = fresh.var("y");
            let body = go(a, &y, fresh)?;
            Fo::forall(&y, Fo::imp(Fo::R(y.clone(), x.clone()), body))
        }
        Formula::BlackLeft(name, a) if &**name == "neg" => Fo::not(go(a, x, fresh)?),
        _ => return Err(bad()),
    })
}

/// `ST_x(φ)`.
pub fn st_formula(phi: &Formula, x: &Sym) -> Result<Fo, Error> {
    let mut fresh = Fresh::new(atoms_of(phi).into_iter().chain([x.clone()]));
    go(phi, x, &mut fresh)
}

/// `ST_x(φ ≤ ψ) = ST_x(φ) → ST_x(ψ)`.
pub fn st_inequality(ineq: &Inequality, x: &Sym) -> Result<Fo, Error> {
    let mut used = atoms_of(&ineq.lhs);
    used.extend(atoms_of(&ineq.rhs));
    used.push(x.clone());
    let mut fresh = Fresh::new(used);
    Ok(Fo::imp(go(&ineq.lhs, x, &mut fresh)?, go(&ineq.rhs, x, &mut fresh)?))
}

fn quasi_body(q: &QuasiInequality, x: &Sym, fresh: &mut Fresh) -> Result<Fo, Error> {
    let mut ants = Vec::new();
    for a in &q.antecedent {
        let xa = fresh.var("x");
        let body = Fo::imp(go(&a.lhs, &xa, fresh)?, go(&a.rhs, &xa, fresh)?);
        ants.push(Fo::forall(&xa, body));
    }
    let c = Fo::imp(go(&q.consequent.lhs, x, fresh)?, go(&q.consequent.rhs, x, fresh)?);
    Ok(if ants.is_empty() { c } else { Fo::imp(Fo::and_all(ants), c) })
}

fn quasi_fresh(q: &QuasiInequality, extra: &[Sym]) -> Fresh {
    let (n, c) = q.atoms();
    Fresh::new(n.into_iter().chain(c).chain(extra.iter().cloned()))
}

/// `∀x[(&_k ∀x_k ST(a_k)) → ST_x(c)]`: each antecedent inequality is read
/// globally, the consequent at `x`. Nominals and conominals stay free.
pub fn st_quasi(q: &QuasiInequality) -> Result<Fo, Error> {
    let mut fresh = quasi_fresh(q, &[]);
    let x = fresh.var("x");
    let body = quasi_body(q, &x, &mut fresh)?;
    Ok(Fo::forall(&x, body))
}

/// Universal closure of [`st_quasi`] over nominals then conominals, each in
/// first-use order.
pub fn st_quasi_closed(q: &QuasiInequality) -> Result<Fo, Error> {
    let (noms, conoms) = q.atoms();
    let body = st_quasi(q)?;
    let vars: Vec<Sym> = noms.into_iter().chain(conoms).collect();
    Ok(Fo::forall_all(&vars, body))
}

/// `ST_x(ξ)`. For a quasi-inequality the antecedents are universally
/// quantified individually and the consequent is read at `x`.
pub fn standard_translation(xi: Translatable<'_>, x: &Sym) -> Result<Fo, Error> {
    match xi {
        Translatable::Formula(f) => st_formula(f, x),
        Translatable::Inequality(i) => st_inequality(i, x),
        Translatable::Quasi(q) => {
            let mut fresh = quasi_fresh(q, std::slice::from_ref(x));
            quasi_body(q, x, &mut fresh)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{parse_formula, parse_quasi, Signature};

    fn f(s: &str) -> Formula {
        parse_formula(s, &Signature::har(), true).unwrap()
    }

    #[test]
    fn table_clauses() {
        let x = Sym::from("x");
        assert_eq!(st_formula(&f("box p"), &x).unwrap().to_string(), "N(x) & (![y0]: (R(x,y0) => P_p(y0)))");
        assert_eq!(st_formula(&f("#j"), &x).unwrap().to_string(), "j = x");
        assert_eq!(st_formula(&f("@m"), &x).unwrap().to_string(), "x != m");
        assert_eq!(
            st_formula(&f("bdia[box] #i"), &x).unwrap().to_string(),
            "?[y0]: (R(y0,x) & i = y0)"
        );
        assert_eq!(
            st_formula(&f("dia p"), &x).unwrap().to_string(),
            "~N(x) | (?[y0]: (R(x,y0) & P_p(y0)))"
        );
        assert_eq!(st_formula(&f("bot"), &x).unwrap().to_string(), "x != x");
    }

    #[test]
    fn binders_avoid_atoms() {
        let x = Sym::from("x");
        let t = st_formula(&f("box #y0"), &x).unwrap();
        assert_eq!(t.to_string(), "N(x) & (![y1]: (R(x,y1) => y0 = y1))");
    }

    #[test]
    fn quasi_translation_is_pure_and_closed() {
        let q = parse_quasi("#i0 <= box top => #i0 <= bdia[box] #i0", &Signature::har()).unwrap();
        let t = st_quasi_closed(&q).unwrap();
        assert!(t.is_sentence());
        assert_eq!(
            t.to_string(),
            "![i0,x0]: ((![x1]: (i0 = x1 => N(x1) & (![y2]: (R(x1,y2) => y2 = y2)))) => i0 = x0 => ?[y3]: (R(y3,x0) & i0 = y3))"
        );
    }

    #[test]
    fn unknown_connectives_are_rejected() {
        let mut sig = Signature::har();
        sig.declare(crate::syntax::ConnectiveDecl::new(
            "f",
            crate::syntax::Kind::Additive,
            vec![crate::syntax::Order::One],
        ))
        .unwrap();
        let g = parse_formula("f p", &sig, false).unwrap();
        assert!(matches!(st_formula(&g, &Sym::from("x")), Err(Error::Untranslatable(_))));
    }
}
