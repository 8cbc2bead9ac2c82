use std::collections::BTreeMap;

use rayon::prelude::*;

use super::{Error, Fo};
use crate::semantics::{frames_up_to, Frame, Set};
use crate::syntax::Sym;

/// Interpretation of free individual variables and predicate variables.
#[derive(Clone, Debug, Default)]
pub struct FoEnv {
    pub individuals: BTreeMap<Sym, usize>,
    pub predicates: BTreeMap<Sym, Set>,
}

/// Slot-compiled formula: every variable occurrence is an index into one
/// assignment vector.
enum C {
    True,
    False,
    Eq(usize, usize),
    R(usize, usize),
    N(usize),
    P(Set, usize),
    Not(Box<C>),
    And(Box<C>, Box<C>),
    Or(Box<C>, Box<C>),
    Imp(Box<C>, Box<C>),
    All(usize, Box<C>),
    Ex(usize, Box<C>),
}

struct Compiler<'a> {
    scope: Vec<(Sym, usize)>,
    slots: usize,
    free: &'a BTreeMap<Sym, usize>,
    preds: &'a BTreeMap<Sym, Set>,
}

impl Compiler<'_> {
    fn slot(&self, x: &Sym) -> Result<usize, Error> {
        if let Some((_, s)) = self.scope.iter().rev().find(|(y, _)| y == x) {
            return Ok(*s);
        }
        self.free.get(x).copied().ok_or_else(|| Error::Unbound(x.to_string()))
    }

    fn compile(&mut self, f: &Fo) -> Result<C, Error> {
        Ok(match f {
            Fo::True => C::True,
            Fo::False => C::False,
            Fo::Eq(a, b) => C::Eq(self.slot(a)?, self.slot(b)?),
            Fo::R(a, b) => C::R(self.slot(a)?, self.slot(b)?),
            Fo::N(a) => C::N(self.slot(a)?),
            Fo::P(p, a) => {
                let set = *self.preds.get(p).ok_or_else(|| Error::Unbound(format!("P_{}", p)))?;
                C::P(set, self.slot(a)?)
            }
            Fo::Not(a) => C::Not(Box::new(self.compile(a)?)),
            Fo::And(a, b) => C::And(Box::new(self.compile(a)?), Box::new(self.compile(b)?)),
            Fo::Or(a, b) => C::Or(Box::new(self.compile(a)?), Box::new(self.compile(b)?)),
            Fo::Imp(a, b) => C::Imp(Box::new(self.compile(a)?), Box::new(self.compile(b)?)),
            Fo::Forall(x, a) | Fo::Exists(x, a) => {
                let s = self.slots;
                self.slots += 1;
                self.scope.push((x.clone(), s));
                let body = Box::new(self.compile(a)?);
                self.scope.pop();
                if matches!(f, Fo::Forall(..)) {
                    C::All(s, body)
                } else {
                    C::Ex(s, body)
                }
            }
        })
    }
}

struct Compiled {
    code: C,
    slots: usize,
}

fn compile(phi: &Fo, env: &FoEnv) -> Result<(Compiled, Vec<usize>), Error> {
    // Free variables occupy the first slots.
    let names: Vec<&Sym> = env.individuals.keys().collect();
    let free: BTreeMap<Sym, usize> = names.iter().enumerate().map(|(k, x)| ((*x).clone(), k)).collect();
    let init: Vec<usize> = names.iter().map(|x| env.individuals[*x]).collect();
    let mut c = Compiler {
        scope: vec![],
        slots: names.len(),
        free: &free,
        preds: &env.predicates,
    };
    let code = c.compile(phi)?;
    Ok((Compiled { code, slots: c.slots }, init))
}

fn run(c: &C, f: &Frame, a: &mut [usize]) -> bool {
    match c {
        C::True => true,
        C::False => false,
        C::Eq(x, y) => a[*x] == a[*y],
        C::R(x, y) => f.related(a[*x], a[*y]),
        C::N(x) => f.is_normal(a[*x]),
        C::P(s, x) => s >> a[*x] & 1 == 1,
        C::Not(p) => !run(p, f, a),
        C::And(p, q) => run(p, f, a) && run(q, f, a),
        C::Or(p, q) => run(p, f, a) || run(q, f, a),
        C::Imp(p, q) => !run(p, f, a) || run(q, f, a),
        C::All(s, p) => (0..f.n()).all(|w| {
            a[*s] = w;
            run(p, f, a)
        }),
        C::Ex(s, p) => (0..f.n()).any(|w| {
            a[*s] = w;
            run(p, f, a)
        }),
    }
}

impl Compiled {
    fn eval(&self, f: &Frame, init: &[usize]) -> bool {
        let mut a = vec![0; self.slots];
        a[..init.len()].copy_from_slice(init);
        run(&self.code, f, &mut a)
    }
}

/// Tarskian truth of `phi` on `f` under `env`.
pub fn eval_fo(f: &Frame, phi: &Fo, env: &FoEnv) -> Result<bool, Error> {
    if let Some((x, &w)) = env.individuals.iter().find(|(_, &w)| w >= f.n()) {
        return Err(Error::Unbound(format!("{} := {} outside the frame", x, w)));
    }
    let (c, init) = compile(phi, env)?;
    Ok(c.eval(f, &init))
}

fn sentence(phi: &Fo) -> Result<Compiled, Error> {
    if !phi.is_sentence() {
        return Err(Error::NotSentence(phi.to_string()));
    }
    Ok(compile(phi, &FoEnv::default())?.0)
}

/// First frame among `frames` on which the sentences disagree.
pub fn fo_agree_on(a: &Fo, b: &Fo, frames: &[Frame]) -> Result<Option<Frame>, Error> {
    let (ca, cb) = (sentence(a)?, sentence(b)?);
    Ok(frames
        .par_iter()
        .find_first(|f| ca.eval(f, &[]) != cb.eval(f, &[]))
        .cloned())
}

/// A frame with at most `max_n` worlds separating the two sentences.
pub fn fo_counterexample(a: &Fo, b: &Fo, max_n: usize) -> Result<Option<Frame>, Error> {
    fo_agree_on(a, b, &frames_up_to(max_n))
}

/// Agreement on every frame with at most `max_n` worlds. This is a bounded
/// check, not a decision procedure for first-order equivalence.
pub fn fo_equivalent(a: &Fo, b: &Fo, max_n: usize) -> Result<bool, Error> {
    Ok(fo_counterexample(a, b, max_n)?.is_none())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fol::parse_fo;

    fn fo(s: &str) -> Fo {
        parse_fo(s).unwrap()
    }

    #[test]
    fn small_examples() {
        let one = Frame::from_edges(1, &[0], &[(0, 0)]).unwrap();
        let env = FoEnv::default();
        assert!(eval_fo(&one, &fo("![x]: (N(x) => R(x,x))"), &env).unwrap());
        let half = Frame::from_edges(2, &[0], &[]).unwrap();
        assert!(!eval_fo(&half, &fo("![x]: N(x)"), &env).unwrap());
        let sym = Frame::from_edges(2, &[0, 1], &[(0, 1), (1, 0)]).unwrap();
        let trans = fo("![i,y,z]: (N(i) & N(y) & R(i,y) & R(y,z) => R(i,z))");
        assert!(!eval_fo(&sym, &trans, &env).unwrap());
    }

    #[test]
    fn free_symbols() {
        let f = Frame::from_edges(2, &[0], &[(0, 1)]).unwrap();
        let mut env = FoEnv::default();
        let phi = fo("R(x,y) & P_p(y)");
        assert!(matches!(eval_fo(&f, &phi, &env), Err(Error::Unbound(_))));
        env.individuals.insert(Sym::from("x"), 0);
        env.individuals.insert(Sym::from("y"), 1);
        env.predicates.insert(Sym::from("p"), 0b10);
        assert!(eval_fo(&f, &phi, &env).unwrap());
        env.predicates.insert(Sym::from("p"), 0b01);
        assert!(!eval_fo(&f, &phi, &env).unwrap());
    }

    #[test]
    fn shadowing_uses_the_innermost_binder() {
        let f = Frame::from_edges(2, &[0, 1], &[(0, 1)]).unwrap();
        let phi = fo("![x]: (?[x]: R(x,x) | N(x))");
        assert!(eval_fo(&f, &phi, &FoEnv::default()).unwrap());
    }

    #[test]
    fn bounded_equivalence() {
        let refl = fo("![x]: (N(x) => R(x,x))");
        assert!(fo_equivalent(&refl, &refl, 3).unwrap());
        assert!(!fo_equivalent(&fo("![x]: N(x)"), &refl, 2).unwrap());
        assert!(matches!(
            fo_equivalent(&fo("![x]: P_p(x)"), &refl, 1),
            Err(Error::NotSentence(_))
        ));
    }
}
