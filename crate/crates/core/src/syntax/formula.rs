use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::{Base, Error, Kind, Order, Signature, Sym};

/// Formulas of the base and expanded languages.
///
/// Black connectives carry the name of the connective they are adjoint to:
/// `BlackBox(f)` is ■_f, `BlackDia(g)` is ♦_g, `BlackLeft(f)` is ◀_f and
/// `BlackRight(g)` is ▶_g.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(tag = "node", content = "args")]
pub enum Formula {
    Top,
    Bot,
    Var(Sym),
    Nominal(Sym),
    Conominal(Sym),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Imp(Box<Formula>, Box<Formula>),
    Minus(Box<Formula>, Box<Formula>),
    Conn(Sym, Vec<Formula>),
    BlackBox(Sym, Box<Formula>),
    BlackDia(Sym, Box<Formula>),
    BlackLeft(Sym, Box<Formula>),
    BlackRight(Sym, Box<Formula>),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Inequality {
    pub lhs: Formula,
    pub rhs: Formula,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct QuasiInequality {
    pub antecedent: Vec<Inequality>,
    pub consequent: Inequality,
}

pub fn var(name: &str) -> Formula {
    Formula::Var(Sym::from(name))
}

pub fn nom(name: &str) -> Formula {
    Formula::Nominal(Sym::from(name))
}

pub fn conom(name: &str) -> Formula {
    Formula::Conominal(Sym::from(name))
}

impl Formula {
    pub fn and(a: Formula, b: Formula) -> Formula {
        Formula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Formula {
        Formula::Or(Box::new(a), Box::new(b))
    }

    pub fn imp(a: Formula, b: Formula) -> Formula {
        Formula::Imp(Box::new(a), Box::new(b))
    }

    pub fn minus(a: Formula, b: Formula) -> Formula {
        Formula::Minus(Box::new(a), Box::new(b))
    }

    pub fn conn(name: &str, args: Vec<Formula>) -> Formula {
        Formula::Conn(Sym::from(name), args)
    }

    pub fn boxed(a: Formula) -> Formula {
        Formula::conn("box", vec![a])
    }

    pub fn dia(a: Formula) -> Formula {
        Formula::conn("dia", vec![a])
    }

    pub fn neg(a: Formula) -> Formula {
        Formula::conn("neg", vec![a])
    }

    pub fn children(&self) -> Vec<&Formula> {
        match self {
            Formula::Top
            | Formula::Bot
            | Formula::Var(_)
            | Formula::Nominal(_)
            | Formula::Conominal(_) => vec![],
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Imp(a, b) | Formula::Minus(a, b) => {
                vec![a, b]
            }
            Formula::Conn(_, args) => args.iter().collect(),
            Formula::BlackBox(_, a)
            | Formula::BlackDia(_, a)
            | Formula::BlackLeft(_, a)
            | Formula::BlackRight(_, a) => vec![a],
        }
    }

    /// Rebuild this node with new children (same count as `children()`).
    pub fn with_children(&self, kids: Vec<Formula>) -> Formula {
        if let Formula::Conn(name, _) = self {
            return Formula::Conn(name.clone(), kids);
        }
        let mut it = kids.into_iter();
        let mut take = move || Box::new(it.next().expect("missing child"));
        match self {
            Formula::And(..) => {
                let a = take();
                Formula::And(a, take())
            }
            Formula::Or(..) => {
                let a = take();
                Formula::Or(a, take())
            }
            Formula::Imp(..) => {
                let a = take();
                Formula::Imp(a, take())
            }
            Formula::Minus(..) => {
                let a = take();
                Formula::Minus(a, take())
            }
            Formula::BlackBox(n, _) => Formula::BlackBox(n.clone(), take()),
            Formula::BlackDia(n, _) => Formula::BlackDia(n.clone(), take()),
            Formula::BlackLeft(n, _) => Formula::BlackLeft(n.clone(), take()),
            Formula::BlackRight(n, _) => Formula::BlackRight(n.clone(), take()),
            leaf => leaf.clone(),
        }
    }

    fn walk<'a>(&'a self, visit: &mut dyn FnMut(&'a Formula)) {
        visit(self);
        for c in self.children() {
            c.walk(visit);
        }
    }

    /// Proposition variables in order of first occurrence.
    pub fn vars(&self) -> Vec<Sym> {
        let mut out = Vec::new();
        self.walk(&mut |f| {
            if let Formula::Var(p) = f {
                if !out.contains(p) {
                    out.push(p.clone());
                }
            }
        });
        out
    }

    pub fn nominals(&self) -> Vec<Sym> {
        let mut out = Vec::new();
        self.walk(&mut |f| {
            if let Formula::Nominal(p) = f {
                if !out.contains(p) {
                    out.push(p.clone());
                }
            }
        });
        out
    }

    pub fn conominals(&self) -> Vec<Sym> {
        let mut out = Vec::new();
        self.walk(&mut |f| {
            if let Formula::Conominal(p) = f {
                if !out.contains(p) {
                    out.push(p.clone());
                }
            }
        });
        out
    }

    pub fn contains_var(&self, p: &str) -> bool {
        match self {
            Formula::Var(q) => &**q == p,
            _ => self.children().iter().any(|c| c.contains_var(p)),
        }
    }

    pub fn mentions(&self, name: &str) -> bool {
        match self {
            Formula::Var(q) | Formula::Nominal(q) | Formula::Conominal(q) => &**q == name,
            _ => self.children().iter().any(|c| c.mentions(name)),
        }
    }

    /// True iff no proposition variable occurs.
    pub fn is_pure(&self) -> bool {
        match self {
            Formula::Var(_) => false,
            _ => self.children().iter().all(|c| c.is_pure()),
        }
    }

    pub fn size(&self) -> usize {
        1 + self.children().iter().map(|c| c.size()).sum::<usize>()
    }

    pub fn depth(&self) -> usize {
        self.children().iter().map(|c| c.depth() + 1).max().unwrap_or(0)
    }

    /// Simultaneous replacement of variables.
    pub fn substitute(&self, binding: &BTreeMap<Sym, Formula>) -> Formula {
        match self {
            Formula::Var(p) => binding.get(p).cloned().unwrap_or_else(|| self.clone()),
            Formula::Top | Formula::Bot | Formula::Nominal(_) | Formula::Conominal(_) => self.clone(),
            _ => self.with_children(self.children().into_iter().map(|c| c.substitute(binding)).collect()),
        }
    }

    pub fn substitute_one(&self, p: &Sym, by: &Formula) -> Formula {
        let mut b = BTreeMap::new();
        b.insert(p.clone(), by.clone());
        self.substitute(&b)
    }

    /// Check arity, connective names and language restrictions.
    pub fn check(&self, sig: &Signature, expanded: bool) -> Result<(), Error> {
        let expanded_only = |what: &str| -> Result<(), Error> {
            if expanded {
                Ok(())
            } else {
                Err(Error::ExpandedOnly(what.to_string()))
            }
        };
        match self {
            Formula::Nominal(_) => expanded_only("nominal")?,
            Formula::Conominal(_) => expanded_only("conominal")?,
            Formula::Minus(..) => expanded_only("co-implication")?,
            Formula::Imp(..) => {
                if !expanded && sig.base == Base::Dlr {
                    return Err(Error::ExpandedOnly("implication (base is DLR)".into()));
                }
            }
            Formula::Conn(name, args) => {
                let d = sig
                    .get(name)
                    .ok_or_else(|| Error::UnknownConnective(name.to_string()))?;
                if d.arity != args.len() {
                    return Err(Error::Arity {
                        name: name.to_string(),
                        expected: d.arity,
                        found: args.len(),
                    });
                }
            }
            Formula::BlackBox(n, _) => {
                expanded_only("black connective")?;
                check_black(sig, n, Kind::Additive, Order::One, "bbox")?;
            }
            Formula::BlackLeft(n, _) => {
                expanded_only("black connective")?;
                check_black(sig, n, Kind::Additive, Order::Dual, "bleft")?;
            }
            Formula::BlackDia(n, _) => {
                expanded_only("black connective")?;
                check_black(sig, n, Kind::Multiplicative, Order::One, "bdia")?;
            }
            Formula::BlackRight(n, _) => {
                expanded_only("black connective")?;
                check_black(sig, n, Kind::Multiplicative, Order::Dual, "bright")?;
            }
            _ => {}
        }
        for c in self.children() {
            c.check(sig, expanded)?;
        }
        Ok(())
    }
}

fn check_black(sig: &Signature, name: &str, kind: Kind, order: Order, tag: &str) -> Result<(), Error> {
    let d = sig
        .get(name)
        .ok_or_else(|| Error::UnknownConnective(name.to_string()))?;
    if d.arity != 1 || d.kind != kind || d.coords[0] != order {
        return Err(Error::BadAdjoint {
            tag: tag.to_string(),
            name: name.to_string(),
        });
    }
    Ok(())
}

impl Inequality {
    pub fn new(lhs: Formula, rhs: Formula) -> Inequality {
        Inequality { lhs, rhs }
    }

    pub fn vars(&self) -> Vec<Sym> {
        let mut v = self.lhs.vars();
        for p in self.rhs.vars() {
            if !v.contains(&p) {
                v.push(p);
            }
        }
        v
    }

    pub fn sorted_vars(&self) -> Vec<Sym> {
        let set: BTreeSet<Sym> = self.vars().into_iter().collect();
        set.into_iter().collect()
    }

    pub fn is_pure(&self) -> bool {
        self.lhs.is_pure() && self.rhs.is_pure()
    }

    pub fn contains_var(&self, p: &str) -> bool {
        self.lhs.contains_var(p) || self.rhs.contains_var(p)
    }

    pub fn mentions(&self, name: &str) -> bool {
        self.lhs.mentions(name) || self.rhs.mentions(name)
    }

    pub fn substitute(&self, binding: &BTreeMap<Sym, Formula>) -> Inequality {
        Inequality::new(self.lhs.substitute(binding), self.rhs.substitute(binding))
    }

    pub fn check(&self, sig: &Signature, expanded: bool) -> Result<(), Error> {
        self.lhs.check(sig, expanded)?;
        self.rhs.check(sig, expanded)
    }

    /// Nominals then conominals, each in order of first occurrence.
    pub fn atoms(&self) -> (Vec<Sym>, Vec<Sym>) {
        let mut noms = self.lhs.nominals();
        for n in self.rhs.nominals() {
            if !noms.contains(&n) {
                noms.push(n);
            }
        }
        let mut conoms = self.lhs.conominals();
        for n in self.rhs.conominals() {
            if !conoms.contains(&n) {
                conoms.push(n);
            }
        }
        (noms, conoms)
    }
}

impl QuasiInequality {
    pub fn new(antecedent: Vec<Inequality>, consequent: Inequality) -> QuasiInequality {
        QuasiInequality {
            antecedent,
            consequent,
        }
    }

    pub fn all(&self) -> impl Iterator<Item = &Inequality> {
        self.antecedent.iter().chain(std::iter::once(&self.consequent))
    }

    pub fn is_pure(&self) -> bool {
        self.all().all(|i| i.is_pure())
    }

    pub fn vars(&self) -> Vec<Sym> {
        let mut out = Vec::new();
        for i in self.all() {
            for p in i.vars() {
                if !out.contains(&p) {
                    out.push(p);
                }
            }
        }
        out
    }

    /// Nominals and conominals in first-use order, consequent first.
    pub fn atoms(&self) -> (Vec<Sym>, Vec<Sym>) {
        let mut noms = Vec::new();
        let mut conoms = Vec::new();
        for i in std::iter::once(&self.consequent).chain(self.antecedent.iter()) {
            let (n, c) = i.atoms();
            for x in n {
                if !noms.contains(&x) {
                    noms.push(x);
                }
            }
            for x in c {
                if !conoms.contains(&x) {
                    conoms.push(x);
                }
            }
        }
        (noms, conoms)
    }

    pub fn check(&self, sig: &Signature, expanded: bool) -> Result<(), Error> {
        for i in self.all() {
            i.check(sig, expanded)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn substitution_examples() {
        let p = Sym::from("p");
        assert_eq!(
            Formula::boxed(var("p")).substitute_one(&p, &Formula::Top),
            Formula::boxed(Formula::Top)
        );
        let sub = Formula::BlackDia("box".into(), Box::new(nom("i")));
        assert_eq!(
            Formula::and(var("p"), var("q")).substitute_one(&p, &sub),
            Formula::and(sub.clone(), var("q"))
        );
        let pq = Formula::or(var("p"), var("q"));
        assert_eq!(var("p").substitute_one(&p, &pq), pq);
    }

    #[test]
    fn simultaneous_substitution() {
        let mut b = BTreeMap::new();
        b.insert(Sym::from("p"), var("q"));
        b.insert(Sym::from("q"), var("p"));
        let f = Formula::imp(var("p"), var("q"));
        assert_eq!(f.substitute(&b), Formula::imp(var("q"), var("p")));
    }

    #[test]
    fn purity_and_vars() {
        let f = Formula::and(nom("i"), Formula::boxed(var("p")));
        assert!(!f.is_pure());
        assert_eq!(f.vars(), vec![Sym::from("p")]);
        assert!(Formula::dia(conom("m")).is_pure());
    }

    #[test]
    fn language_checks() {
        let dlr = Signature::dlr();
        assert!(matches!(
            Formula::imp(var("p"), var("q")).check(&dlr, false),
            Err(Error::ExpandedOnly(_))
        ));
        assert!(Formula::imp(var("p"), var("q")).check(&Signature::har(), false).is_ok());
        assert!(matches!(nom("i").check(&dlr, false), Err(Error::ExpandedOnly(_))));
        assert!(matches!(
            Formula::conn("box", vec![]).check(&dlr, false),
            Err(Error::Arity { .. })
        ));
        let bad = Formula::BlackBox("box".into(), Box::new(Formula::Top));
        assert!(matches!(bad.check(&dlr, true), Err(Error::BadAdjoint { .. })));
        let good = Formula::BlackLeft("neg".into(), Box::new(Formula::Top));
        assert!(good.check(&dlr, true).is_ok());
    }
}
