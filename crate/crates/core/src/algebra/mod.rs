//! Finite perfect regular algebras given by explicit operation tables:
//! complex algebras of frames, atom structures and the discrete duality.

mod duality;

use std::collections::{BTreeMap, HashMap};

use serde::Serialize;
use thiserror::Error;

use crate::semantics::{full, members, DistFrame, Frame, Poset, Set};
use crate::syntax::{ConnectiveDecl, Formula, Inequality, Kind, Order, QuasiInequality, Signature, Sym};

pub use duality::{
    algebra_iso, atom_structure, dist_atom_structure, dist_duality_roundtrip, dist_frame_iso, duality_roundtrip,
    frame_iso, Iso,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid algebra: {0}")]
    Invalid(String),
    #[error("operation requires a Boolean carrier")]
    NotBoolean,
    #[error("budget exceeded: {0}")]
    Budget(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("unbound symbol `{0}`")]
    Unbound(String),
    #[error("frames are not isomorphic")]
    NotIsomorphic,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Carrier {
    /// All subsets of `0..n`.
    Boolean,
    /// All up-sets of a finite poset.
    UpSets(Poset),
}

/// Extensional operation table. For arguments with element indices
/// `(a_0, .., a_{k-1})` the entry sits at `Σ a_c · E^c`, where `E` is the carrier size.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OpTable {
    pub decl: ConnectiveDecl,
    pub table: Vec<Set>,
}

#[derive(Clone, Debug)]
pub struct FiniteAlgebra {
    n: usize,
    carrier: Carrier,
    elements: Vec<Set>,
    index: HashMap<Set, usize>,
    ops: BTreeMap<Sym, OpTable>,
}

fn decl_of(name: &str) -> ConnectiveDecl {
    Signature::har().get(name).expect("built-in connective").clone()
}

impl FiniteAlgebra {
    fn with_carrier(n: usize, carrier: Carrier) -> FiniteAlgebra {
        let elements: Vec<Set> = match &carrier {
            Carrier::Boolean => (0..=full(n)).collect(),
            Carrier::UpSets(p) => p.up_sets(),
        };
        let index = elements.iter().enumerate().map(|(i, &e)| (e, i)).collect();
        FiniteAlgebra {
            n,
            carrier,
            elements,
            index,
            ops: BTreeMap::new(),
        }
    }

    /// Powerset of `0..n` with no operations yet.
    pub fn boolean(n: usize) -> FiniteAlgebra {
        FiniteAlgebra::with_carrier(n, Carrier::Boolean)
    }

    /// Up-set lattice of `order` with no operations yet.
    pub fn up_sets(order: &Poset) -> FiniteAlgebra {
        FiniteAlgebra::with_carrier(order.n(), Carrier::UpSets(order.clone()))
    }

    /// Add an operation computed pointwise by `op`. Results are checked to lie in the carrier.
    pub fn add_op(&mut self, decl: ConnectiveDecl, op: impl Fn(&[Set]) -> Set) -> Result<(), Error> {
        let k = decl.arity;
        let e = self.elements.len();
        let size = e.checked_pow(k as u32).filter(|&s| s <= 1 << 20).ok_or_else(|| {
            Error::Budget(format!("table for `{}` too large", decl.name))
        })?;
        let mut table = Vec::with_capacity(size);
        let mut args = vec![0; k];
        for code in 0..size {
            let mut c = code;
            for a in args.iter_mut() {
                *a = self.elements[c % e];
                c /= e;
            }
            let v = op(&args);
            if !self.index.contains_key(&v) {
                return Err(Error::Invalid(format!("`{}` leaves the carrier", decl.name)));
            }
            table.push(v);
        }
        self.ops.insert(decl.name.clone(), OpTable { decl, table });
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn carrier(&self) -> &Carrier {
        &self.carrier
    }

    pub fn elements(&self) -> &[Set] {
        &self.elements
    }

    pub fn is_boolean(&self) -> bool {
        matches!(self.carrier, Carrier::Boolean)
    }

    pub fn top(&self) -> Set {
        full(self.n)
    }

    pub fn op(&self, name: &str) -> Option<&OpTable> {
        self.ops.get(name)
    }

    pub fn ops(&self) -> impl Iterator<Item = &OpTable> {
        self.ops.values()
    }

    pub fn contains(&self, x: Set) -> bool {
        self.index.contains_key(&x)
    }

    pub fn apply(&self, name: &str, args: &[Set]) -> Result<Set, Error> {
        let t = self.ops.get(name).ok_or_else(|| Error::Unsupported(format!("no operation `{}`", name)))?;
        if args.len() != t.decl.arity {
            return Err(Error::Invalid(format!("`{}` applied to {} arguments", name, args.len())));
        }
        let e = self.elements.len();
        let mut code = 0;
        for a in args.iter().rev() {
            let i = *self.index.get(a).ok_or_else(|| Error::Invalid(format!("{:#b} is not an element", a)))?;
            code = code * e + i;
        }
        Ok(t.table[code])
    }

    pub fn leq(&self, a: Set, b: Set) -> bool {
        a & !b == 0
    }

    pub fn join_all(&self, xs: impl Iterator<Item = Set>) -> Set {
        xs.fold(0, |a, b| a | b)
    }

    pub fn meet_all(&self, xs: impl Iterator<Item = Set>) -> Set {
        xs.fold(self.top(), |a, b| a & b)
    }

    /// Completely join-irreducible elements.
    pub fn join_irreducibles(&self) -> Vec<Set> {
        self.elements
            .iter()
            .copied()
            .filter(|&j| {
                j != 0 && self.join_all(self.elements.iter().copied().filter(|&x| x != j && self.leq(x, j))) != j
            })
            .collect()
    }

    /// Completely meet-irreducible elements.
    pub fn meet_irreducibles(&self) -> Vec<Set> {
        let top = self.top();
        self.elements
            .iter()
            .copied()
            .filter(|&m| {
                m != top && self.meet_all(self.elements.iter().copied().filter(|&x| x != m && self.leq(m, x))) != m
            })
            .collect()
    }

    /// Relative pseudo-complement.
    pub fn imp(&self, a: Set, b: Set) -> Set {
        self.join_all(self.elements.iter().copied().filter(|&c| self.leq(c & a, b)))
    }

    /// Dual relative pseudo-complement.
    pub fn minus(&self, a: Set, b: Set) -> Set {
        self.meet_all(self.elements.iter().copied().filter(|&c| self.leq(a, b | c)))
    }

    /// Check that every operation preserves nonempty binary joins or meets in each
    /// coordinate, according to its kind and order-type.
    pub fn validate(&self) -> Result<(), Error> {
        for t in self.ops.values() {
            let k = t.decl.arity;
            let e = self.elements.len();
            let mut args = vec![0; k];
            for code in 0..e.pow(k as u32) {
                let mut c = code;
                for a in args.iter_mut() {
                    *a = self.elements[c % e];
                    c /= e;
                }
                for coord in 0..k {
                    for &y in &self.elements {
                        let x = args[coord];
                        let (combined, combine_out): (Set, fn(Set, Set) -> Set) =
                            match (t.decl.kind, t.decl.coords[coord]) {
                                (Kind::Additive, Order::One) => (x | y, |a, b| a | b),
                                (Kind::Additive, Order::Dual) => (x & y, |a, b| a | b),
                                (Kind::Multiplicative, Order::One) => (x & y, |a, b| a & b),
                                (Kind::Multiplicative, Order::Dual) => (x | y, |a, b| a & b),
                            };
                        let mut other = args.clone();
                        other[coord] = y;
                        let mut both = args.clone();
                        both[coord] = combined;
                        let lhs = self.apply(&t.decl.name, &both)?;
                        let rhs = combine_out(self.apply(&t.decl.name, &args)?, self.apply(&t.decl.name, &other)?);
                        if lhs != rhs {
                            return Err(Error::Invalid(format!(
                                "`{}` does not preserve nonempty {} in coordinate {}",
                                t.decl.name,
                                if matches!(t.decl.kind, Kind::Additive) { "joins" } else { "meets" },
                                coord
                            )));
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// Rename the base set: point `w` becomes `perm[w]`.
    pub fn relabel(&self, perm: &[usize]) -> FiniteAlgebra {
        let map = |s: Set| members(s).fold(0, |acc, w| acc | 1 << perm[w]);
        let mut inv = vec![0; perm.len()];
        for (w, &p) in perm.iter().enumerate() {
            inv[p] = w;
        }
        let unmap = move |s: Set| members(s).fold(0, |acc, w| acc | 1 << inv[w]);
        let carrier = match &self.carrier {
            Carrier::Boolean => Carrier::Boolean,
            Carrier::UpSets(p) => Carrier::UpSets(p.permute(perm)),
        };
        let mut out = FiniteAlgebra::with_carrier(self.n, carrier);
        for t in self.ops.values() {
            out.add_op(t.decl.clone(), |args| {
                let orig: Vec<Set> = args.iter().map(|&a| unmap(a)).collect();
                map(self.apply(&t.decl.name, &orig).expect("relabelled arguments are elements"))
            })
            .expect("relabelling preserves the carrier");
        }
        out
    }

    /// Normalization of a unary operation: the completely join-preserving
    /// (resp. meet-preserving) map agreeing with it on irreducibles.
    pub fn normalized(&self, name: &str, u: Set) -> Result<Set, Error> {
        let t = self.unary(name)?;
        let f = |x: Set| self.apply(name, &[x]).expect("element");
        Ok(match (t.kind, t.coords[0]) {
            (Kind::Additive, Order::One) => {
                self.join_all(self.join_irreducibles().into_iter().filter(|&j| self.leq(j, u)).map(f))
            }
            (Kind::Additive, Order::Dual) => {
                self.join_all(self.meet_irreducibles().into_iter().filter(|&m| self.leq(u, m)).map(f))
            }
            (Kind::Multiplicative, Order::One) => {
                self.meet_all(self.meet_irreducibles().into_iter().filter(|&m| self.leq(u, m)).map(f))
            }
            (Kind::Multiplicative, Order::Dual) => {
                self.meet_all(self.join_irreducibles().into_iter().filter(|&j| self.leq(j, u)).map(f))
            }
        })
    }

    fn unary(&self, name: &str) -> Result<&ConnectiveDecl, Error> {
        let t = self.ops.get(name).ok_or_else(|| Error::Unsupported(format!("no operation `{}`", name)))?;
        if t.decl.arity != 1 {
            return Err(Error::Unsupported(format!("`{}` is not unary", name)));
        }
        Ok(&t.decl)
    }

    /// The true adjoint of the normalization of `name`: ■ / ◀ for additive
    /// operations, ♦ / ▶ for multiplicative ones.
    pub fn adjoint(&self, name: &str, v: Set) -> Result<Set, Error> {
        let t = self.unary(name)?.clone();
        let mut out = Vec::new();
        for &u in &self.elements {
            let nu = self.normalized(name, u)?;
            let keep = match t.kind {
                Kind::Additive => self.leq(nu, v),
                Kind::Multiplicative => self.leq(v, nu),
            };
            if keep {
                out.push(u);
            }
        }
        let it = out.into_iter();
        Ok(match (t.kind, t.coords[0]) {
            (Kind::Additive, Order::One) | (Kind::Multiplicative, Order::Dual) => self.join_all(it),
            (Kind::Additive, Order::Dual) | (Kind::Multiplicative, Order::One) => self.meet_all(it),
        })
    }

    /// Evaluate under an assignment of variables to elements, nominals to
    /// join-irreducibles and conominals to meet-irreducibles.
    pub fn eval(&self, phi: &Formula, h: &BTreeMap<Sym, Set>) -> Result<Set, Error> {
        let get = |s: &Sym| h.get(s).copied().ok_or_else(|| Error::Unbound(s.to_string()));
        Ok(match phi {
            Formula::Top => self.top(),
            Formula::Bot => 0,
            Formula::Var(p) | Formula::Nominal(p) | Formula::Conominal(p) => get(p)?,
            Formula::And(a, b) => self.eval(a, h)? & self.eval(b, h)?,
            Formula::Or(a, b) => self.eval(a, h)? | self.eval(b, h)?,
            Formula::Imp(a, b) => self.imp(self.eval(a, h)?, self.eval(b, h)?),
            Formula::Minus(a, b) => self.minus(self.eval(a, h)?, self.eval(b, h)?),
            Formula::Conn(name, args) => {
                let vals: Result<Vec<Set>, Error> = args.iter().map(|a| self.eval(a, h)).collect();
                self.apply(name, &vals?)?
            }
            Formula::BlackBox(n, a) | Formula::BlackDia(n, a) | Formula::BlackLeft(n, a) | Formula::BlackRight(n, a) => {
                self.adjoint(n, self.eval(a, h)?)?
            }
        })
    }

    /// Validity of an inequality under every assignment of its variables.
    pub fn valid(&self, ineq: &Inequality) -> Result<bool, Error> {
        let vars = ineq.vars();
        let e = self.elements.len() as u64;
        let total = e.checked_pow(vars.len() as u32).filter(|&t| t <= 1 << 24).ok_or_else(|| {
            Error::Budget(format!("{} assignments", e.saturating_pow(vars.len() as u32)))
        })?;
        let mut h = BTreeMap::new();
        for code in 0..total {
            let mut c = code;
            for p in &vars {
                h.insert(p.clone(), self.elements[(c % e) as usize]);
                c /= e;
            }
            if !self.leq(self.eval(&ineq.lhs, &h)?, self.eval(&ineq.rhs, &h)?) {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Validity of a pure quasi-inequality, with nominals ranging over
    /// join-irreducibles and conominals over meet-irreducibles.
    pub fn quasi_valid(&self, q: &QuasiInequality) -> Result<bool, Error> {
        if let Some(p) = q.vars().first() {
            return Err(Error::Unsupported(format!("variable `{}` in quasi-inequality", p)));
        }
        let (noms, conoms) = q.atoms();
        let js = self.join_irreducibles();
        let ms = self.meet_irreducibles();
        let mut slots: Vec<(Sym, &[Set])> = noms.into_iter().map(|s| (s, js.as_slice())).collect();
        slots.extend(conoms.into_iter().map(|s| (s, ms.as_slice())));
        let mut h = BTreeMap::new();
        self.quasi_search(q, &slots, 0, &mut h)
    }

    fn quasi_search(
        &self,
        q: &QuasiInequality,
        slots: &[(Sym, &[Set])],
        k: usize,
        h: &mut BTreeMap<Sym, Set>,
    ) -> Result<bool, Error> {
        if k == slots.len() {
            for a in &q.antecedent {
                if !self.leq(self.eval(&a.lhs, h)?, self.eval(&a.rhs, h)?) {
                    return Ok(true);
                }
            }
            return Ok(self.leq(self.eval(&q.consequent.lhs, h)?, self.eval(&q.consequent.rhs, h)?));
        }
        for &x in slots[k].1 {
            h.insert(slots[k].0.clone(), x);
            if !self.quasi_search(q, slots, k + 1, h)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    pub fn dump(&self) -> AlgebraDump {
        AlgebraDump {
            carrier_size: self.elements.len(),
            base_size: self.n,
            elements: self.elements.clone(),
            ops: self
                .ops
                .values()
                .map(|t| OpDump {
                    name: t.decl.name.clone(),
                    kind: t.decl.kind,
                    coords: t.decl.coords.clone(),
                    table: t.table.clone(),
                })
                .collect(),
        }
    }
}

/// JSON form of an algebra: elements as bitmasks and op tables as arrays of bitmasks.
#[derive(Clone, Debug, Serialize)]
pub struct AlgebraDump {
    pub carrier_size: usize,
    pub base_size: usize,
    pub elements: Vec<Set>,
    pub ops: Vec<OpDump>,
}

#[derive(Clone, Debug, Serialize)]
pub struct OpDump {
    pub name: Sym,
    pub kind: Kind,
    pub coords: Vec<Order>,
    pub table: Vec<Set>,
}

/// Complex algebra `F^+` on the powerset, with `dia`, `box` and `neg`.
pub fn complex_algebra(f: &Frame) -> FiniteAlgebra {
    let mut a = FiniteAlgebra::boolean(f.n());
    let all = f.worlds();
    a.add_op(decl_of("dia"), |x| f.dia(x[0])).expect("dia is closed");
    a.add_op(decl_of("box"), |x| f.boxed(x[0])).expect("box is closed");
    a.add_op(decl_of("neg"), |x| all & !x[0]).expect("neg is closed");
    a
}

/// Complex algebra of a distributive frame on its up-sets, with `dia` and `box`.
pub fn dist_complex_algebra(f: &DistFrame) -> FiniteAlgebra {
    let mut a = FiniteAlgebra::up_sets(f.order());
    a.add_op(decl_of("dia"), |x| f.f(x[0])).expect("f is closed on up-sets");
    a.add_op(decl_of("box"), |x| f.g(x[0])).expect("g is closed on up-sets");
    a
}

/// Validity of an inequality in an algebra.
pub fn algebra_valid(a: &FiniteAlgebra, ineq: &Inequality) -> Result<bool, Error> {
    a.valid(ineq)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::semantics::{enumerate_dist_frames, enumerate_frames, enumerate_posets, frame_valid};
    use crate::syntax::{parse_inequality, parse_quasi};

    fn ab() -> Frame {
        Frame::from_edges(2, &[0], &[(0, 1)]).unwrap()
    }

    #[test]
    fn complex_algebra_examples() {
        let a = complex_algebra(&ab());
        assert_eq!(a.apply("dia", &[0b10]).unwrap(), 0b11);
        assert_eq!(a.apply("dia", &[0]).unwrap(), 0b10);
        let normal = Frame::from_edges(2, &[0, 1], &[(0, 1), (1, 1)]).unwrap();
        assert_eq!(complex_algebra(&normal).apply("dia", &[0]).unwrap(), 0);
    }

    #[test]
    fn complex_algebras_validate() {
        for f in enumerate_frames(2).chain(enumerate_frames(3)) {
            complex_algebra(&f).validate().unwrap();
        }
        for p in enumerate_posets(2) {
            for f in enumerate_dist_frames(&p) {
                dist_complex_algebra(&f).validate().unwrap();
            }
        }
    }

    #[test]
    fn validator_rejects_non_additive() {
        let mut a = FiniteAlgebra::boolean(2);
        // Sends exactly the top element to top: monotone but not additive.
        a.add_op(ConnectiveDecl::new("k", Kind::Additive, vec![Order::One]), |x| {
            if x[0] == 0b11 {
                0b11
            } else {
                0
            }
        })
        .unwrap();
        assert!(matches!(a.validate(), Err(Error::Invalid(_))));
    }

    #[test]
    fn irreducibles() {
        let a = complex_algebra(&ab());
        assert_eq!(a.join_irreducibles(), vec![0b01, 0b10]);
        assert_eq!(a.meet_irreducibles(), vec![0b01, 0b10]);
        // Three-element chain of up-sets over a < b: ∅ ⊂ {b} ⊂ {a,b}.
        let chain = FiniteAlgebra::up_sets(&Poset::new(vec![0b11, 0b10]).unwrap());
        assert_eq!(chain.join_irreducibles(), vec![0b10, 0b11]);
        assert_eq!(chain.meet_irreducibles(), vec![0b00, 0b10]);
    }

    #[test]
    fn algebra_and_frame_validity_agree() {
        let sig = Signature::har();
        let corpus = [
            "box (p -> q) <= box p -> box q",
            "box (p -> q) <= box (box p -> box q)",
            "box p <= p",
            "box p <= box box p",
            "neg box p <= box neg box p",
            "box p /\\ box q <= box (p /\\ q)",
            "box (p /\\ q) <= box p /\\ box q",
            "top <= box top",
        ];
        for text in corpus {
            let ineq = parse_inequality(text, &sig, false).unwrap();
            for f in enumerate_frames(1).chain(enumerate_frames(2)) {
                assert_eq!(
                    algebra_valid(&complex_algebra(&f), &ineq).unwrap(),
                    frame_valid(&f, &ineq).unwrap(),
                    "{} on {}",
                    text,
                    f
                );
            }
        }
    }

    #[test]
    fn adjoints_agree_with_relational_reading_under_side_conditions() {
        for f in enumerate_frames(2).chain(enumerate_frames(3)) {
            let a = complex_algebra(&f);
            let nc = f.worlds() & !f.normal();
            for &y in a.elements() {
                if nc & !y == 0 {
                    assert_eq!(a.adjoint("dia", y).unwrap(), f.black_box(y), "{}", f);
                } else {
                    assert_eq!(a.adjoint("dia", y).unwrap(), 0);
                }
                if y & !f.normal() == 0 {
                    assert_eq!(a.adjoint("box", y).unwrap(), f.black_dia(y), "{}", f);
                }
                assert_eq!(a.adjoint("neg", y).unwrap(), f.worlds() & !y);
            }
        }
    }

    #[test]
    fn adjunction_laws() {
        for f in enumerate_frames(2) {
            let a = complex_algebra(&f);
            for &u in a.elements() {
                for &v in a.elements() {
                    let dia = a.normalized("dia", u).unwrap();
                    assert_eq!(a.leq(dia, v), a.leq(u, a.adjoint("dia", v).unwrap()));
                    let bx = a.normalized("box", v).unwrap();
                    assert_eq!(a.leq(u, bx), a.leq(a.adjoint("box", u).unwrap(), v));
                    let ng = a.normalized("neg", u).unwrap();
                    assert_eq!(a.leq(ng, v), a.leq(a.adjoint("neg", v).unwrap(), u));
                }
            }
        }
    }

    #[test]
    fn quasi_validity_matches_frames() {
        let sig = Signature::har();
        let q = parse_quasi("#i <= box top => #i <= bdia[box] #i", &sig).unwrap();
        for f in enumerate_frames(2) {
            assert_eq!(
                complex_algebra(&f).quasi_valid(&q).unwrap(),
                crate::semantics::eval_quasi(&f, &q).unwrap()
            );
        }
    }

    #[test]
    fn dump_is_json() {
        let v = serde_json::to_value(complex_algebra(&ab()).dump()).unwrap();
        assert_eq!(v["carrier_size"], 4);
        assert_eq!(v["ops"][0]["name"], "box");
    }
}
