//! First-order frame language: standard translation, finite evaluation,
//! simplification and bounded equivalence checking.

mod correspond;
mod eval;
mod library;
mod parse;
mod simplify;
mod st;

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::syntax::Sym;

pub use correspond::{correspondent, correspondent_with, Correspondence};
pub use eval::{eval_fo, fo_counterexample, fo_equivalent, fo_agree_on, FoEnv};
pub use library::{reference, reference_library, Reference};
pub use parse::parse_fo;
pub use simplify::simplify;
pub use st::{st_formula, st_inequality, st_quasi, st_quasi_closed, standard_translation, Translatable};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("parse error at {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("unbound symbol `{0}`")]
    Unbound(String),
    #[error("no first-order translation for `{0}`")]
    Untranslatable(String),
    #[error("reduction did not eliminate: {0}")]
    Failed(String),
    #[error("expected a sentence without predicate variables, found `{0}`")]
    NotSentence(String),
    #[error(transparent)]
    Alba(#[from] crate::alba::Error),
    #[error(transparent)]
    Classify(#[from] crate::classify::Error),
    #[error(transparent)]
    Semantics(#[from] crate::semantics::Error),
}

/// First-order formulas over `R` (binary), `N` (unary), one unary predicate
/// per proposition variable, and equality.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "node", content = "args")]
pub enum Fo {
    True,
    False,
    Eq(Sym, Sym),
    R(Sym, Sym),
    N(Sym),
    /// `P_p(x)` for proposition variable `p`.
    P(Sym, Sym),
    Not(Box<Fo>),
    And(Box<Fo>, Box<Fo>),
    Or(Box<Fo>, Box<Fo>),
    Imp(Box<Fo>, Box<Fo>),
    Forall(Sym, Box<Fo>),
    Exists(Sym, Box<Fo>),
}

impl Fo {
    #[allow(clippy::should_implement_trait)]
    pub fn not(a: Fo) -> Fo {
        Fo::Not(Box::new(a))
    }

    pub fn and(a: Fo, b: Fo) -> Fo {
        Fo::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Fo, b: Fo) -> Fo {
        Fo::Or(Box::new(a), Box::new(b))
    }

    pub fn imp(a: Fo, b: Fo) -> Fo {
        Fo::Imp(Box::new(a), Box::new(b))
    }

    pub fn forall(x: &Sym, a: Fo) -> Fo {
        Fo::Forall(x.clone(), Box::new(a))
    }

    pub fn exists(x: &Sym, a: Fo) -> Fo {
        Fo::Exists(x.clone(), Box::new(a))
    }

    pub fn and_all(parts: impl IntoIterator<Item = Fo>) -> Fo {
        parts.into_iter().reduce(Fo::and).unwrap_or(Fo::True)
    }

    pub fn forall_all(xs: &[Sym], body: Fo) -> Fo {
        xs.iter().rev().fold(body, |acc, x| Fo::forall(x, acc))
    }

    pub fn free_vars(&self) -> BTreeSet<Sym> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut Vec::new(), &mut out);
        out
    }

    fn collect_free(&self, bound: &mut Vec<Sym>, out: &mut BTreeSet<Sym>) {
        let mut add = |x: &Sym, bound: &Vec<Sym>| {
            if !bound.contains(x) {
                out.insert(x.clone());
            }
        };
        match self {
            Fo::True | Fo::False => {}
            Fo::Eq(a, b) | Fo::R(a, b) => {
                add(a, bound);
                add(b, bound);
            }
            Fo::N(a) | Fo::P(_, a) => add(a, bound),
            Fo::Not(a) => a.collect_free(bound, out),
            Fo::And(a, b) | Fo::Or(a, b) | Fo::Imp(a, b) => {
                a.collect_free(bound, out);
                b.collect_free(bound, out);
            }
            Fo::Forall(x, a) | Fo::Exists(x, a) => {
                bound.push(x.clone());
                a.collect_free(bound, out);
                bound.pop();
            }
        }
    }

    /// Names of predicate variables `P_p`.
    pub fn predicates(&self) -> BTreeSet<Sym> {
        let mut out = BTreeSet::new();
        self.visit(&mut |f| {
            if let Fo::P(p, _) = f {
                out.insert(p.clone());
            }
        });
        out
    }

    /// Every individual variable name, free or bound.
    pub fn names(&self) -> BTreeSet<Sym> {
        let mut out = BTreeSet::new();
        self.visit(&mut |f| match f {
            Fo::Eq(a, b) | Fo::R(a, b) => {
                out.insert(a.clone());
                out.insert(b.clone());
            }
            Fo::N(a) | Fo::P(_, a) => {
                out.insert(a.clone());
            }
            Fo::Forall(x, _) | Fo::Exists(x, _) => {
                out.insert(x.clone());
            }
            _ => {}
        });
        out
    }

    fn visit(&self, f: &mut impl FnMut(&Fo)) {
        f(self);
        match self {
            Fo::Not(a) | Fo::Forall(_, a) | Fo::Exists(_, a) => a.visit(f),
            Fo::And(a, b) | Fo::Or(a, b) | Fo::Imp(a, b) => {
                a.visit(f);
                b.visit(f);
            }
            _ => {}
        }
    }

    /// In the sublanguage without predicate variables.
    pub fn is_l0(&self) -> bool {
        self.predicates().is_empty()
    }

    pub fn is_sentence(&self) -> bool {
        self.free_vars().is_empty() && self.is_l0()
    }

    pub fn size(&self) -> usize {
        let mut n = 0;
        self.visit(&mut |_| n += 1);
        n
    }

    /// Replace free occurrences of `x` by `t`. Bound names are assumed
    /// distinct from `t` (translations use globally fresh binders).
    pub fn subst(&self, x: &Sym, t: &Sym) -> Fo {
        let s = |v: &Sym| if v == x { t.clone() } else { v.clone() };
        match self {
            Fo::True | Fo::False => self.clone(),
            Fo::Eq(a, b) => Fo::Eq(s(a), s(b)),
            Fo::R(a, b) => Fo::R(s(a), s(b)),
            Fo::N(a) => Fo::N(s(a)),
            Fo::P(p, a) => Fo::P(p.clone(), s(a)),
            Fo::Not(a) => Fo::not(a.subst(x, t)),
            Fo::And(a, b) => Fo::and(a.subst(x, t), b.subst(x, t)),
            Fo::Or(a, b) => Fo::or(a.subst(x, t), b.subst(x, t)),
            Fo::Imp(a, b) => Fo::imp(a.subst(x, t), b.subst(x, t)),
            Fo::Forall(y, _) | Fo::Exists(y, _) if y == x => self.clone(),
            Fo::Forall(y, a) => Fo::forall(y, a.subst(x, t)),
            Fo::Exists(y, a) => Fo::exists(y, a.subst(x, t)),
        }
    }
}

const PREC_IMP: u8 = 1;
const PREC_OR: u8 = 2;
const PREC_AND: u8 = 3;
const PREC_UNARY: u8 = 4;

fn write_fo(f: &Fo, ctx: u8, out: &mut String) {
    let binary = |op: &str, prec: u8, a: &Fo, b: &Fo, la: u8, lb: u8, out: &mut String| {
        if ctx > prec {
            out.push('(');
        }
        write_fo(a, la, out);
        out.push(' ');
        out.push_str(op);
        out.push(' ');
        write_fo(b, lb, out);
        if ctx > prec {
            out.push(')');
        }
    };
    match f {
        Fo::True => out.push_str("$true"),
        Fo::False => out.push_str("$false"),
        Fo::Eq(a, b) => out.push_str(&format!("{} = {}", a, b)),
        Fo::Not(a) if matches!(**a, Fo::Eq(..)) => {
            let Fo::Eq(x, y) = &**a else { unreachable!() };
            out.push_str(&format!("{} != {}", x, y));
        }
        Fo::R(a, b) => out.push_str(&format!("R({},{})", a, b)),
        Fo::N(a) => out.push_str(&format!("N({})", a)),
        Fo::P(p, a) => out.push_str(&format!("P_{}({})", p, a)),
        Fo::Not(a) => {
            out.push('~');
            write_fo(a, PREC_UNARY, out);
        }
        Fo::And(a, b) => binary("&", PREC_AND, a, b, PREC_AND, PREC_UNARY, out),
        Fo::Or(a, b) => binary("|", PREC_OR, a, b, PREC_OR, PREC_AND, out),
        Fo::Imp(a, b) => binary("=>", PREC_IMP, a, b, PREC_OR, PREC_IMP, out),
        Fo::Forall(..) | Fo::Exists(..) => {
            let (q, mut body) = match f {
                Fo::Forall(..) => ('!', f),
                _ => ('?', f),
            };
            let mut xs = Vec::new();
            loop {
                match (q, body) {
                    ('!', Fo::Forall(x, a)) | ('?', Fo::Exists(x, a)) => {
                        xs.push(x.to_string());
                        body = a;
                    }
                    _ => break,
                }
            }
            let paren = ctx > PREC_IMP;
            if paren {
                out.push('(');
            }
            out.push(q);
            out.push_str(&format!("[{}]: ", xs.join(",")));
            write_fo(body, PREC_UNARY, out);
            if paren {
                out.push(')');
            }
        }
    }
}

impl fmt::Display for Fo {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut s = String::new();
        write_fo(self, 0, &mut s);
        f.write_str(&s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(x: &str) -> Sym {
        Sym::from(x)
    }

    #[test]
    fn printing() {
        let f = Fo::forall(&s("x"), Fo::imp(Fo::N(s("x")), Fo::R(s("x"), s("x"))));
        assert_eq!(f.to_string(), "![x]: (N(x) => R(x,x))");
        let g = Fo::forall(&s("x"), Fo::forall(&s("y"), Fo::and(Fo::N(s("x")), Fo::not(Fo::Eq(s("x"), s("y"))))));
        assert_eq!(g.to_string(), "![x,y]: (N(x) & x != y)");
        assert_eq!(Fo::or(Fo::and(Fo::True, Fo::False), Fo::N(s("z"))).to_string(), "$true & $false | N(z)");
    }

    #[test]
    fn free_variables_and_substitution() {
        let f = Fo::exists(&s("y"), Fo::and(Fo::R(s("y"), s("x")), Fo::Eq(s("i"), s("y"))));
        let free: Vec<Sym> = f.free_vars().into_iter().collect();
        assert_eq!(free, vec![s("i"), s("x")]);
        let g = f.subst(&s("x"), &s("i"));
        assert_eq!(g.to_string(), "?[y]: (R(y,i) & i = y)");
        assert_eq!(f.subst(&s("y"), &s("z")), f);
    }
}
