use std::collections::BTreeMap;

use super::eval::AtomEnv;
use super::frame::{full, members, MAX_WORLDS};
use super::{Error, Set};
use crate::syntax::{Formula, Inequality, Sym};

/// Finite partial order on `0..n`, stored as principal up-sets.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Poset {
    n: usize,
    up: Vec<Set>,
}

impl Poset {
    /// `up[w]` must list every `v` with `w ≤ v`, including `w` itself.
    pub fn new(up: Vec<Set>) -> Result<Poset, Error> {
        let n = up.len();
        if n == 0 || n > MAX_WORLDS {
            return Err(Error::InvalidFrame(format!("world count {} out of range", n)));
        }
        for w in 0..n {
            if up[w] >> w & 1 == 0 || up[w] & !full(n) != 0 {
                return Err(Error::InvalidFrame("order is not reflexive".into()));
            }
            for v in members(up[w]) {
                if v != w && up[v] >> w & 1 == 1 {
                    return Err(Error::InvalidFrame("order is not antisymmetric".into()));
                }
                if up[v] & !up[w] != 0 {
                    return Err(Error::InvalidFrame("order is not transitive".into()));
                }
            }
        }
        Ok(Poset { n, up })
    }

    pub fn discrete(n: usize) -> Poset {
        Poset::new((0..n).map(|w| 1 << w).collect()).expect("discrete order")
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn worlds(&self) -> Set {
        full(self.n)
    }

    pub fn leq(&self, a: usize, b: usize) -> bool {
        self.up[a] >> b & 1 == 1
    }

    pub fn up(&self, w: usize) -> Set {
        self.up[w]
    }

    pub fn down(&self, w: usize) -> Set {
        (0..self.n).filter(|&v| self.leq(v, w)).fold(0, |acc, v| acc | 1 << v)
    }

    pub fn up_closure(&self, x: Set) -> Set {
        members(x).fold(0, |acc, w| acc | self.up[w])
    }

    pub fn is_up_set(&self, x: Set) -> bool {
        self.up_closure(x) == x
    }

    pub fn is_down_set(&self, x: Set) -> bool {
        self.is_up_set(self.worlds() & !x)
    }

    /// All up-sets, in increasing bitmask order.
    pub fn up_sets(&self) -> Vec<Set> {
        (0..=self.worlds()).filter(|&x| self.is_up_set(x)).collect()
    }

    pub fn permute(&self, perm: &[usize]) -> Poset {
        let mut up = vec![0; self.n];
        for w in 0..self.n {
            up[perm[w]] = members(self.up[w]).fold(0, |acc, v| acc | 1 << perm[v]);
        }
        Poset { n: self.n, up }
    }
}

/// All labeled partial orders on `n ≤ 4` points.
pub fn enumerate_posets(n: usize) -> Vec<Poset> {
    assert!((1..=4).contains(&n), "poset enumeration supports 1..=4 points");
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|a| (0..n).filter(move |&b| b != a).map(move |b| (a, b))).collect();
    let mut out = Vec::new();
    for code in 0u32..(1 << pairs.len()) {
        let mut up: Vec<Set> = (0..n).map(|w| 1 << w).collect();
        for (k, &(a, b)) in pairs.iter().enumerate() {
            if code >> k & 1 == 1 {
                up[a] |= 1 << b;
            }
        }
        if let Ok(p) = Poset::new(up) {
            out.push(p);
        }
    }
    out
}

/// Distributive Kripke frame with impossible worlds: an order, an additive
/// modality interpreted by `(N_f, S_f)` and a multiplicative one by `(N_g, S_g)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct DistFrame {
    order: Poset,
    nf: Set,
    sf: Vec<Set>,
    ng: Set,
    sg: Vec<Set>,
}

fn pre_image(rel: &[Set], x: Set) -> Set {
    rel.iter()
        .enumerate()
        .filter(|(_, s)| *s & x != 0)
        .fold(0, |acc, (w, _)| acc | 1 << w)
}

impl DistFrame {
    pub fn new(order: Poset, nf: Set, sf: Vec<Set>, ng: Set, sg: Vec<Set>) -> Result<DistFrame, Error> {
        let n = order.n();
        let bad = |m: &str| Err(Error::InvalidFrame(m.to_string()));
        if sf.len() != n || sg.len() != n {
            return bad("relation has the wrong number of rows");
        }
        if !order.is_down_set(nf & full(n)) || nf & !full(n) != 0 {
            return bad("N_f must be a down-set");
        }
        if !order.is_up_set(ng) || ng & !full(n) != 0 {
            return bad("N_g must be an up-set");
        }
        for w in 0..n {
            if sf[w] & !full(n) != 0 || sg[w] & !full(n) != 0 {
                return bad("relation out of range");
            }
            if sf[w] != 0 && nf >> w & 1 == 0 {
                return bad("S_f source outside N_f");
            }
            if sg[w] != 0 && ng >> w & 1 == 0 {
                return bad("S_g source outside N_g");
            }
        }
        for x in 0..n {
            // x ∈ N_f, x ≥ y, y S_f z, z ≥ u  ⇒  x S_f u
            if nf >> x & 1 == 1 {
                let reach = members(order.down(x)).fold(0, |acc, y| acc | sf[y]);
                let closed = members(reach).fold(0, |acc, z| acc | order.down(z));
                if closed & !sf[x] != 0 {
                    return bad("S_f is not compatible with the order");
                }
            }
            // x ∈ N_g, x ≤ y, y S_g z, z ≤ u  ⇒  x S_g u
            if ng >> x & 1 == 1 {
                let reach = members(order.up(x)).fold(0, |acc, y| acc | sg[y]);
                if order.up_closure(reach) & !sg[x] != 0 {
                    return bad("S_g is not compatible with the order");
                }
            }
        }
        Ok(DistFrame { order, nf, sf, ng, sg })
    }

    pub fn order(&self) -> &Poset {
        &self.order
    }

    pub fn n(&self) -> usize {
        self.order.n()
    }

    pub fn nf(&self) -> Set {
        self.nf
    }

    pub fn ng(&self) -> Set {
        self.ng
    }

    pub fn sf(&self, w: usize) -> Set {
        self.sf[w]
    }

    pub fn sg(&self, w: usize) -> Set {
        self.sg[w]
    }

    /// N_f^c ∪ S_f⁻¹[X].
    pub fn f(&self, x: Set) -> Set {
        (self.order.worlds() & !self.nf) | pre_image(&self.sf, x)
    }

    /// N_g ∩ (S_g⁻¹[X^c])^c.
    pub fn g(&self, x: Set) -> Set {
        self.ng & !pre_image(&self.sg, self.order.worlds() & !x)
    }

    /// Heyting implication on up-sets.
    pub fn imp(&self, a: Set, b: Set) -> Set {
        (0..self.n())
            .filter(|&w| self.order.up(w) & a & !b == 0)
            .fold(0, |acc, w| acc | 1 << w)
    }

    /// Co-Heyting difference on up-sets.
    pub fn minus(&self, a: Set, b: Set) -> Set {
        self.order.up_closure(a & !b)
    }

    pub fn permute(&self, perm: &[usize]) -> DistFrame {
        let map = |s: Set| members(s).fold(0, |acc, w| acc | 1 << perm[w]);
        let mut sf = vec![0; self.n()];
        let mut sg = vec![0; self.n()];
        for w in 0..self.n() {
            sf[perm[w]] = map(self.sf[w]);
            sg[perm[w]] = map(self.sg[w]);
        }
        DistFrame {
            order: self.order.permute(perm),
            nf: map(self.nf),
            sf,
            ng: map(self.ng),
            sg,
        }
    }
}

/// All order-compatible `(N_f, S_f)` and `(N_g, S_g)` components on a poset.
fn components(order: &Poset) -> (Vec<(Set, Vec<Set>)>, Vec<(Set, Vec<Set>)>) {
    let n = order.n();
    let empty = vec![0; n];
    let mut fs = Vec::new();
    let mut gs = Vec::new();
    for normal in 0..=full(n) {
        let k = normal.count_ones() as usize;
        let srcs: Vec<usize> = members(normal).collect();
        for bits in 0u64..(1u64 << (n * k)) {
            let mut rel = vec![0; n];
            for (i, &w) in srcs.iter().enumerate() {
                rel[w] = ((bits >> (i * n)) & full(n) as u64) as Set;
            }
            if order.is_down_set(normal)
                && DistFrame::new(order.clone(), normal, rel.clone(), 0, empty.clone()).is_ok()
            {
                fs.push((normal, rel.clone()));
            }
            if order.is_up_set(normal) && DistFrame::new(order.clone(), 0, empty.clone(), normal, rel.clone()).is_ok() {
                gs.push((normal, rel));
            }
        }
    }
    (fs, gs)
}

/// Every distributive frame over `order`.
pub fn enumerate_dist_frames(order: &Poset) -> impl Iterator<Item = DistFrame> {
    assert!(order.n() <= 3, "distributive frame enumeration supports up to 3 points");
    let (fs, gs) = components(order);
    let order = order.clone();
    fs.into_iter().flat_map(move |(nf, sf)| {
        let order = order.clone();
        gs.clone().into_iter().map(move |(ng, sg)| DistFrame {
            order: order.clone(),
            nf,
            sf: sf.clone(),
            ng,
            sg,
        })
    })
}

#[derive(Clone, Debug)]
pub struct DistModel {
    pub frame: DistFrame,
    pub valuation: BTreeMap<Sym, Set>,
}

struct Ctx<'a> {
    frame: &'a DistFrame,
    vals: &'a BTreeMap<Sym, Set>,
    env: &'a AtomEnv,
}

fn atom(table: &BTreeMap<Sym, usize>, s: &Sym, n: usize) -> Result<usize, Error> {
    match table.get(s) {
        Some(&w) if w < n => Ok(w),
        Some(_) => Err(Error::InvalidFrame(format!("`{}` assigned to a missing world", s))),
        None => Err(Error::UnboundAtom(s.to_string())),
    }
}

fn eval(phi: &Formula, c: &Ctx) -> Result<Set, Error> {
    let fr = c.frame;
    let all = fr.order.worlds();
    Ok(match phi {
        Formula::Top => all,
        Formula::Bot => 0,
        Formula::Var(p) => *c.vals.get(p).ok_or_else(|| Error::UnboundAtom(p.to_string()))?,
        Formula::Nominal(i) => fr.order.up(atom(&c.env.nominals, i, fr.n())?),
        Formula::Conominal(m) => all & !fr.order.down(atom(&c.env.conominals, m, fr.n())?),
        Formula::And(a, b) => eval(a, c)? & eval(b, c)?,
        Formula::Or(a, b) => eval(a, c)? | eval(b, c)?,
        Formula::Imp(a, b) => fr.imp(eval(a, c)?, eval(b, c)?),
        Formula::Minus(a, b) => fr.minus(eval(a, c)?, eval(b, c)?),
        Formula::Conn(name, args) if args.len() == 1 && &**name == "dia" => fr.f(eval(&args[0], c)?),
        Formula::Conn(name, args) if args.len() == 1 && &**name == "box" => fr.g(eval(&args[0], c)?),
        Formula::Conn(name, _) => return Err(Error::Unsupported(name.to_string())),
        Formula::BlackBox(n, _) | Formula::BlackDia(n, _) | Formula::BlackLeft(n, _) | Formula::BlackRight(n, _) => {
            return Err(Error::Unsupported(format!("adjoint of `{}`", n)))
        }
    })
}

/// Truth set of `phi`; valuations must be up-sets.
pub fn dist_extension(m: &DistModel, phi: &Formula, env: &AtomEnv) -> Result<Set, Error> {
    for (p, &x) in &m.valuation {
        if x & !m.frame.order.worlds() != 0 || !m.frame.order.is_up_set(x) {
            return Err(Error::NotUpSet(p.to_string()));
        }
    }
    eval(
        phi,
        &Ctx {
            frame: &m.frame,
            vals: &m.valuation,
            env,
        },
    )
}

pub fn dist_satisfies(m: &DistModel, w: usize, phi: &Formula, env: &AtomEnv) -> Result<bool, Error> {
    if w >= m.frame.n() {
        return Err(Error::InvalidFrame(format!("world {} out of range", w)));
    }
    Ok(dist_extension(m, phi, env)? >> w & 1 == 1)
}

/// Validity under every up-set valuation.
pub fn dist_frame_valid(f: &DistFrame, ineq: &Inequality) -> Result<bool, Error> {
    let vars = ineq.vars();
    if vars.len() * f.n() > super::VALUATION_BUDGET {
        return Err(Error::Budget(format!(
            "{} worlds x {} variables exceeds the valuation budget",
            f.n(),
            vars.len()
        )));
    }
    let ups = f.order.up_sets();
    let env = AtomEnv::default();
    let mut idx = vec![0usize; vars.len()];
    loop {
        let valuation: BTreeMap<Sym, Set> = vars.iter().cloned().zip(idx.iter().map(|&i| ups[i])).collect();
        let c = Ctx {
            frame: f,
            vals: &valuation,
            env: &env,
        };
        if eval(&ineq.lhs, &c)? & !eval(&ineq.rhs, &c)? != 0 {
            return Ok(false);
        }
        let mut k = 0;
        loop {
            if k == idx.len() {
                return Ok(true);
            }
            idx[k] += 1;
            if idx[k] < ups.len() {
                break;
            }
            idx[k] = 0;
            k += 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::semantics::{enumerate_frames, extension, frame_valid, Frame, Model};
    use crate::syntax::{parse_formula, parse_inequality, var, Signature};
    use proptest::prelude::*;

    fn two_chain() -> Poset {
        // a=0 < b=1
        Poset::new(vec![0b11, 0b10]).unwrap()
    }

    #[test]
    fn poset_counts() {
        assert_eq!(enumerate_posets(1).len(), 1);
        assert_eq!(enumerate_posets(2).len(), 3);
        assert_eq!(enumerate_posets(3).len(), 19);
    }

    #[test]
    fn chain_box_example() {
        let f = DistFrame::new(two_chain(), 0, vec![0, 0], 0b10, vec![0, 0b10]).unwrap();
        assert_eq!(f.g(0b10), 0b10);
        for x in two_chain().up_sets() {
            assert_eq!(f.g(f.order().worlds()) , f.ng());
            assert!(f.order().is_up_set(f.g(x)));
        }
    }

    #[test]
    fn rejects_incompatible_relations() {
        // a < b, S_g = {(b, a)}: a ≤ b S_g a forces a S_g a, but a ∉ N_g.
        assert!(DistFrame::new(two_chain(), 0, vec![0, 0], 0b10, vec![0, 0b01]).is_err());
        assert!(DistFrame::new(two_chain(), 0b10, vec![0, 0], 0, vec![0, 0]).is_err());
    }

    #[test]
    fn discrete_order_matches_classical_clauses() {
        let sig = Signature::har();
        let phis = ["box p -> dia (p /\\ q)", "dia box p \\/ q", "box (p -> q) /\\ dia top"];
        for fr in enumerate_frames(2) {
            let sf: Vec<Set> = (0..2).map(|w| fr.succ(w)).collect();
            let d = DistFrame::new(Poset::discrete(2), fr.normal(), sf.clone(), fr.normal(), sf).unwrap();
            for text in phis {
                let phi = parse_formula(text, &sig, false).unwrap();
                for vp in 0..4 {
                    for vq in 0..4 {
                        let valuation: BTreeMap<Sym, Set> = [("p".into(), vp), ("q".into(), vq)].into();
                        let classical = extension(
                            &Model {
                                frame: fr.clone(),
                                valuation: valuation.clone(),
                            },
                            &phi,
                            &AtomEnv::default(),
                        )
                        .unwrap();
                        let dm = DistModel {
                            frame: d.clone(),
                            valuation,
                        };
                        assert_eq!(dist_extension(&dm, &phi, &AtomEnv::default()).unwrap(), classical);
                    }
                }
            }
            let ineq = parse_inequality("box p <= p", &sig, false).unwrap();
            let d2 = DistFrame::new(
                Poset::discrete(2),
                fr.normal(),
                (0..2).map(|w| fr.succ(w)).collect(),
                fr.normal(),
                (0..2).map(|w| fr.succ(w)).collect(),
            )
            .unwrap();
            assert_eq!(dist_frame_valid(&d2, &ineq).unwrap(), frame_valid(&fr, &ineq).unwrap());
        }
    }

    #[test]
    fn rejects_non_up_set_valuation() {
        let f = DistFrame::new(two_chain(), 0, vec![0, 0], 0, vec![0, 0]).unwrap();
        let m = DistModel {
            frame: f,
            valuation: [("p".into(), 0b01)].into(),
        };
        assert!(matches!(
            dist_satisfies(&m, 0, &var("p"), &AtomEnv::default()),
            Err(Error::NotUpSet(_))
        ));
    }

    #[test]
    fn enumeration_yields_valid_frames() {
        for p in enumerate_posets(2) {
            for f in enumerate_dist_frames(&p) {
                let sf = (0..2).map(|w| f.sf(w)).collect();
                let sg = (0..2).map(|w| f.sg(w)).collect();
                assert!(DistFrame::new(p.clone(), f.nf(), sf, f.ng(), sg).is_ok());
            }
        }
        let discrete: usize = enumerate_dist_frames(&Poset::discrete(1)).count();
        assert_eq!(discrete, 9);
        let _ = Frame::from_edges(1, &[], &[]).unwrap();
    }

    fn formula_strategy() -> impl Strategy<Value = Formula> {
        let leaf = prop_oneof![
            Just(Formula::Top),
            Just(Formula::Bot),
            Just(var("p")),
            Just(var("q")),
        ];
        leaf.prop_recursive(4, 24, 2, |inner| {
            prop_oneof![
                (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::and(a, b)),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::or(a, b)),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::imp(a, b)),
                inner.clone().prop_map(Formula::boxed),
                inner.prop_map(Formula::dia),
            ]
        })
    }

    proptest! {
        #[test]
        fn persistence(phi in formula_strategy(), poset_idx in 0usize..19, pick in any::<u64>(), vp in 0usize..8, vq in 0usize..8) {
            let order = enumerate_posets(3)[poset_idx].clone();
            let frames: Vec<DistFrame> = enumerate_dist_frames(&order).step_by(997).collect();
            let frame = frames[(pick % frames.len() as u64) as usize].clone();
            let ups = order.up_sets();
            let valuation: BTreeMap<Sym, Set> =
                [("p".into(), ups[vp % ups.len()]), ("q".into(), ups[vq % ups.len()])].into();
            let m = DistModel { frame, valuation };
            let x = dist_extension(&m, &phi, &AtomEnv::default()).unwrap();
            prop_assert!(order.is_up_set(x));
        }
    }
}
