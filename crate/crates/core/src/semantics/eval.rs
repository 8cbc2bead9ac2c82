use std::collections::BTreeMap;

use super::frame::{full, Frame};
use super::{Error, Set};
use crate::syntax::{Formula, Inequality, QuasiInequality, Sym};

/// A frame together with a valuation of proposition variables.
#[derive(Clone, Debug)]
pub struct Model {
    pub frame: Frame,
    pub valuation: BTreeMap<Sym, Set>,
}

/// Interpretation of nominals and conominals as worlds: a nominal `j` denotes
/// `{w}`, a conominal `m` denotes `W ∖ {w}`.
#[derive(Clone, Debug, Default)]
pub struct AtomEnv {
    pub nominals: BTreeMap<Sym, usize>,
    pub conominals: BTreeMap<Sym, usize>,
}

#[derive(Clone, Debug)]
enum Node {
    Top,
    Bot,
    Var(usize),
    Nom(usize),
    Conom(usize),
    And(Box<Node>, Box<Node>),
    Or(Box<Node>, Box<Node>),
    Imp(Box<Node>, Box<Node>),
    Minus(Box<Node>, Box<Node>),
    Dia(Box<Node>),
    Box(Box<Node>),
    Neg(Box<Node>),
    BlackBox(Box<Node>),
    BlackDia(Box<Node>),
}

/// Symbol tables shared by the compiled formulas of one evaluation.
#[derive(Default, Debug)]
struct Names {
    vars: Vec<Sym>,
    noms: Vec<Sym>,
    conoms: Vec<Sym>,
}

fn slot(v: &mut Vec<Sym>, s: &Sym) -> usize {
    match v.iter().position(|x| x == s) {
        Some(i) => i,
        None => {
            v.push(s.clone());
            v.len() - 1
        }
    }
}

fn compile(f: &Formula, names: &mut Names) -> Result<Node, Error> {
    let b = |f: &Formula, names: &mut Names| compile(f, names).map(Box::new);
    Ok(match f {
        Formula::Top => Node::Top,
        Formula::Bot => Node::Bot,
        Formula::Var(p) => Node::Var(slot(&mut names.vars, p)),
        Formula::Nominal(i) => Node::Nom(slot(&mut names.noms, i)),
        Formula::Conominal(m) => Node::Conom(slot(&mut names.conoms, m)),
        Formula::And(x, y) => Node::And(b(x, names)?, b(y, names)?),
        Formula::Or(x, y) => Node::Or(b(x, names)?, b(y, names)?),
        Formula::Imp(x, y) => Node::Imp(b(x, names)?, b(y, names)?),
        Formula::Minus(x, y) => Node::Minus(b(x, names)?, b(y, names)?),
        Formula::Conn(name, args) if args.len() == 1 => {
            let a = b(&args[0], names)?;
            match &**name {
                "dia" => Node::Dia(a),
                "box" => Node::Box(a),
                "neg" => Node::Neg(a),
                _ => return Err(Error::Unsupported(name.to_string())),
            }
        }
        Formula::Conn(name, _) => return Err(Error::Unsupported(name.to_string())),
        Formula::BlackBox(n, a) if &**n == "dia" => Node::BlackBox(b(a, names)?),
        Formula::BlackDia(n, a) if &**n == "box" => Node::BlackDia(b(a, names)?),
        Formula::BlackLeft(n, a) if &**n == "neg" => Node::Neg(b(a, names)?),
        Formula::BlackBox(n, _) | Formula::BlackDia(n, _) | Formula::BlackLeft(n, _) | Formula::BlackRight(n, _) => {
            return Err(Error::Unsupported(format!("adjoint of `{}`", n)))
        }
    })
}

struct Ctx<'a> {
    frame: &'a Frame,
    all: Set,
    vals: &'a [Set],
    noms: &'a [usize],
    conoms: &'a [usize],
}

fn eval(n: &Node, c: &Ctx) -> Set {
    match n {
        Node::Top => c.all,
        Node::Bot => 0,
        Node::Var(i) => c.vals[*i],
        Node::Nom(i) => 1 << c.noms[*i],
        Node::Conom(i) => c.all & !(1 << c.conoms[*i]),
        Node::And(a, b) => eval(a, c) & eval(b, c),
        Node::Or(a, b) => eval(a, c) | eval(b, c),
        Node::Imp(a, b) => (c.all & !eval(a, c)) | eval(b, c),
        Node::Minus(a, b) => eval(a, c) & !eval(b, c),
        Node::Dia(a) => c.frame.dia(eval(a, c)),
        Node::Box(a) => c.frame.boxed(eval(a, c)),
        Node::Neg(a) => c.all & !eval(a, c),
        Node::BlackBox(a) => c.frame.black_box(eval(a, c)),
        Node::BlackDia(a) => c.frame.black_dia(eval(a, c)),
    }
}

fn lookup_all(names: &[Sym], table: &BTreeMap<Sym, usize>, n: usize) -> Result<Vec<usize>, Error> {
    names
        .iter()
        .map(|s| match table.get(s) {
            Some(&w) if w < n => Ok(w),
            Some(_) => Err(Error::InvalidFrame(format!("`{}` assigned to a missing world", s))),
            None => Err(Error::UnboundAtom(s.to_string())),
        })
        .collect()
}

/// Truth set of `phi` in the model.
pub fn extension(m: &Model, phi: &Formula, env: &AtomEnv) -> Result<Set, Error> {
    let mut names = Names::default();
    let node = compile(phi, &mut names)?;
    let all = m.frame.worlds();
    let vals: Result<Vec<Set>, Error> = names
        .vars
        .iter()
        .map(|p| match m.valuation.get(p) {
            Some(&s) if s & !all == 0 => Ok(s),
            Some(_) => Err(Error::InvalidFrame(format!("valuation of `{}` out of range", p))),
            None => Err(Error::UnboundAtom(p.to_string())),
        })
        .collect();
    let vals = vals?;
    let n = m.frame.n();
    let noms = lookup_all(&names.noms, &env.nominals, n)?;
    let conoms = lookup_all(&names.conoms, &env.conominals, n)?;
    let ctx = Ctx {
        frame: &m.frame,
        all,
        vals: &vals,
        noms: &noms,
        conoms: &conoms,
    };
    Ok(eval(&node, &ctx))
}

/// `M, w ⊩ phi`.
pub fn satisfies(m: &Model, w: usize, phi: &Formula, env: &AtomEnv) -> Result<bool, Error> {
    if w >= m.frame.n() {
        return Err(Error::InvalidFrame(format!("world {} out of range", w)));
    }
    Ok(extension(m, phi, env)? >> w & 1 == 1)
}

pub const VALUATION_BUDGET: usize = 24;

fn check_budget(n: usize, k: usize) -> Result<(), Error> {
    if n * k > VALUATION_BUDGET {
        return Err(Error::Budget(format!(
            "{} worlds x {} variables exceeds the valuation budget of {}",
            n, k, VALUATION_BUDGET
        )));
    }
    Ok(())
}

/// Validity of an inequality on a frame: inclusion of extensions under every valuation.
pub fn frame_valid(f: &Frame, ineq: &Inequality) -> Result<bool, Error> {
    let mut names = Names::default();
    let l = compile(&ineq.lhs, &mut names)?;
    let r = compile(&ineq.rhs, &mut names)?;
    if let Some(s) = names.noms.first().or(names.conoms.first()) {
        return Err(Error::UnboundAtom(s.to_string()));
    }
    let k = names.vars.len();
    let n = f.n();
    check_budget(n, k)?;
    let all = f.worlds();
    let mask = full(n) as u64;
    let mut vals = vec![0; k];
    for code in 0u64..(1u64 << (n * k)) {
        for (i, v) in vals.iter_mut().enumerate() {
            *v = ((code >> (i * n)) & mask) as Set;
        }
        let ctx = Ctx {
            frame: f,
            all,
            vals: &vals,
            noms: &[],
            conoms: &[],
        };
        if eval(&l, &ctx) & !eval(&r, &ctx) != 0 {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Atom assignment search with antecedent pruning.
struct QuasiEval {
    ante: Vec<(Node, Node, usize)>,
    cons: (Node, Node),
    n_atoms: usize,
    n_noms: usize,
}

impl QuasiEval {
    fn new(q: &QuasiInequality, names: &mut Names) -> Result<QuasiEval, Error> {
        let mut ante = Vec::new();
        let mut compiled = Vec::new();
        for i in &q.antecedent {
            compiled.push((compile(&i.lhs, names)?, compile(&i.rhs, names)?, i));
        }
        let cons = (compile(&q.consequent.lhs, names)?, compile(&q.consequent.rhs, names)?);
        let n_noms = names.noms.len();
        let n_atoms = n_noms + names.conoms.len();
        for (l, r, i) in compiled {
            // Level at which every atom of this inequality is assigned.
            let (noms, conoms) = i.atoms();
            let mut level = 0;
            for s in noms {
                level = level.max(names.noms.iter().position(|x| *x == s).unwrap() + 1);
            }
            for s in conoms {
                level = level.max(n_noms + names.conoms.iter().position(|x| *x == s).unwrap() + 1);
            }
            ante.push((l, r, level));
        }
        ante.sort_by_key(|a| a.2);
        Ok(QuasiEval {
            ante,
            cons,
            n_atoms,
            n_noms,
        })
    }

    fn holds(&self, frame: &Frame, vals: &[Set]) -> bool {
        let mut assign = vec![0usize; self.n_atoms];
        self.search(frame, vals, &mut assign, 0, 0)
    }

    fn search(&self, frame: &Frame, vals: &[Set], assign: &mut Vec<usize>, level: usize, mut next_ante: usize) -> bool {
        let (noms, conoms) = assign.split_at(self.n_noms);
        let ctx = Ctx {
            frame,
            all: frame.worlds(),
            vals,
            noms,
            conoms,
        };
        while next_ante < self.ante.len() && self.ante[next_ante].2 <= level {
            let (l, r, _) = &self.ante[next_ante];
            if eval(l, &ctx) & !eval(r, &ctx) != 0 {
                return true;
            }
            next_ante += 1;
        }
        if level == self.n_atoms {
            return eval(&self.cons.0, &ctx) & !eval(&self.cons.1, &ctx) == 0;
        }
        for w in 0..frame.n() {
            assign[level] = w;
            if !self.search(frame, vals, assign, level + 1, next_ante) {
                return false;
            }
        }
        true
    }
}

/// Validity of a pure quasi-inequality on a frame, with nominals ranging over
/// singletons and conominals over co-singletons.
pub fn eval_quasi(f: &Frame, q: &QuasiInequality) -> Result<bool, Error> {
    if let Some(p) = q.vars().first() {
        return Err(Error::NotPure(p.to_string()));
    }
    quasi_valid(f, q)
}

/// Like [`eval_quasi`] but also quantifies over valuations of any proposition variables.
pub fn quasi_valid(f: &Frame, q: &QuasiInequality) -> Result<bool, Error> {
    let mut names = Names::default();
    let qe = QuasiEval::new(q, &mut names)?;
    let n = f.n();
    let k = names.vars.len();
    check_budget(n, k)?;
    let mask = full(n) as u64;
    let mut vals = vec![0; k];
    for code in 0u64..(1u64 << (n * k)) {
        for (i, v) in vals.iter_mut().enumerate() {
            *v = ((code >> (i * n)) & mask) as Set;
        }
        if !qe.holds(f, &vals) {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::semantics::frame::enumerate_frames;
    use crate::syntax::{conom, nom, parse_inequality, parse_quasi, var, Signature};

    fn model_ab() -> Model {
        // W={a,b}, N={a}, S={(a,b)}, V(p)={b}, V(q)=∅
        let frame = Frame::from_edges(2, &[0], &[(0, 1)]).unwrap();
        let mut valuation = BTreeMap::new();
        valuation.insert(Sym::from("p"), 0b10);
        valuation.insert(Sym::from("q"), 0);
        Model { frame, valuation }
    }

    #[test]
    fn satisfaction_examples() {
        let m = model_ab();
        let env = AtomEnv::default();
        assert!(satisfies(&m, 0, &Formula::boxed(var("p")), &env).unwrap());
        assert!(!satisfies(&m, 1, &Formula::boxed(var("p")), &env).unwrap());
        assert!(satisfies(&m, 1, &Formula::dia(var("q")), &env).unwrap());
    }

    #[test]
    fn unbound_atoms_are_errors() {
        let m = model_ab();
        assert!(matches!(
            satisfies(&m, 0, &nom("i"), &AtomEnv::default()),
            Err(Error::UnboundAtom(_))
        ));
        assert!(matches!(
            satisfies(&m, 0, &var("r"), &AtomEnv::default()),
            Err(Error::UnboundAtom(_))
        ));
        let mut env = AtomEnv::default();
        env.conominals.insert("m".into(), 0);
        assert!(!satisfies(&m, 0, &conom("m"), &env).unwrap());
        assert!(satisfies(&m, 1, &conom("m"), &env).unwrap());
    }

    #[test]
    fn frame_validity_examples() {
        let sig = Signature::har();
        let regular = parse_inequality("box p /\\ box q <= box (p /\\ q)", &sig, false).unwrap();
        for f in enumerate_frames(2) {
            assert!(frame_valid(&f, &regular).unwrap());
        }
        let nec = parse_inequality("top <= box top", &sig, false).unwrap();
        let f = Frame::from_edges(1, &[], &[]).unwrap();
        assert!(!frame_valid(&f, &nec).unwrap());
        let t = parse_inequality("box p <= p", &sig, false).unwrap();
        let refl = Frame::from_edges(1, &[0], &[(0, 0)]).unwrap();
        assert!(frame_valid(&refl, &t).unwrap());
    }

    #[test]
    fn valuation_budget_guard() {
        let sig = Signature::har();
        let many = parse_inequality("p /\\ q /\\ r /\\ s /\\ t <= p", &sig, false).unwrap();
        let f = Frame::from_edges(5, &[], &[]).unwrap();
        assert!(matches!(frame_valid(&f, &many), Err(Error::Budget(_))));
    }

    #[test]
    fn quasi_examples() {
        let sig = Signature::har();
        let q = parse_quasi("#i <= box top => #i <= bdia[box] #i", &sig).unwrap();
        let refl = Frame::from_edges(1, &[0], &[(0, 0)]).unwrap();
        assert!(eval_quasi(&refl, &q).unwrap());
        let empty = Frame::from_edges(1, &[0], &[]).unwrap();
        assert!(!eval_quasi(&empty, &q).unwrap());
        let vacuous = parse_quasi("#i <= bot => #i <= @m", &sig).unwrap();
        for f in enumerate_frames(2) {
            assert!(eval_quasi(&f, &vacuous).unwrap());
        }
        let impure = parse_quasi("#i <= p => #i <= @m", &sig).unwrap();
        assert!(matches!(eval_quasi(&refl, &impure), Err(Error::NotPure(_))));
    }

    #[test]
    fn quasi_pruning_matches_brute_force() {
        let sig = Signature::har();
        let q = parse_quasi(
            "#i <= box top & box @n <= @m & #j <= dia #i => bdia[box] #j <= @n",
            &sig,
        )
        .unwrap();
        for f in enumerate_frames(2) {
            let mut brute = true;
            let n = f.n();
            for i in 0..n {
                for j in 0..n {
                    for mm in 0..n {
                        for nn in 0..n {
                            let mut env = AtomEnv::default();
                            env.nominals.insert("i".into(), i);
                            env.nominals.insert("j".into(), j);
                            env.conominals.insert("m".into(), mm);
                            env.conominals.insert("n".into(), nn);
                            let m = Model {
                                frame: f.clone(),
                                valuation: BTreeMap::new(),
                            };
                            let holds = |ineq: &Inequality| {
                                let l = extension(&m, &ineq.lhs, &env).unwrap();
                                let r = extension(&m, &ineq.rhs, &env).unwrap();
                                l & !r == 0
                            };
                            if q.antecedent.iter().all(holds) && !holds(&q.consequent) {
                                brute = false;
                            }
                        }
                    }
                }
            }
            assert_eq!(eval_quasi(&f, &q).unwrap(), brute, "{}", f);
        }
    }
}
