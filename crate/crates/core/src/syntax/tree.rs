use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::{Error, Formula, Order, Signature, Sym};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Sign {
    #[serde(rename = "+")]
    Pos,
    #[serde(rename = "-")]
    Neg,
}

impl Sign {
    pub fn flip(self) -> Sign {
        match self {
            Sign::Pos => Sign::Neg,
            Sign::Neg => Sign::Pos,
        }
    }

    pub fn apply(self, o: Order) -> Sign {
        match o {
            Order::One => self,
            Order::Dual => self.flip(),
        }
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sign::Pos => "+",
            Sign::Neg => "-",
        })
    }
}

/// Order-type over proposition variables.
pub type Eps = BTreeMap<Sym, Order>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Polarity {
    Positive,
    Negative,
    Both,
    Absent,
}

/// Node label of a signed generation tree.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Label {
    Top,
    Bot,
    Var(Sym),
    Nominal(Sym),
    Conominal(Sym),
    And,
    Or,
    Imp,
    Minus,
    Conn(Sym),
    BlackBox(Sym),
    BlackDia(Sym),
    BlackLeft(Sym),
    BlackRight(Sym),
}

impl Label {
    pub fn of(f: &Formula) -> Label {
        match f {
            Formula::Top => Label::Top,
            Formula::Bot => Label::Bot,
            Formula::Var(p) => Label::Var(p.clone()),
            Formula::Nominal(p) => Label::Nominal(p.clone()),
            Formula::Conominal(p) => Label::Conominal(p.clone()),
            Formula::And(..) => Label::And,
            Formula::Or(..) => Label::Or,
            Formula::Imp(..) => Label::Imp,
            Formula::Minus(..) => Label::Minus,
            Formula::Conn(n, _) => Label::Conn(n.clone()),
            Formula::BlackBox(n, _) => Label::BlackBox(n.clone()),
            Formula::BlackDia(n, _) => Label::BlackDia(n.clone()),
            Formula::BlackLeft(n, _) => Label::BlackLeft(n.clone()),
            Formula::BlackRight(n, _) => Label::BlackRight(n.clone()),
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Label::Top => f.write_str("top"),
            Label::Bot => f.write_str("bot"),
            Label::Var(p) => f.write_str(p),
            Label::Nominal(p) => write!(f, "#{}", p),
            Label::Conominal(p) => write!(f, "@{}", p),
            Label::And => f.write_str("/\\"),
            Label::Or => f.write_str("\\/"),
            Label::Imp => f.write_str("->"),
            Label::Minus => f.write_str("-"),
            Label::Conn(n) => f.write_str(n),
            Label::BlackBox(n) => write!(f, "bbox[{}]", n),
            Label::BlackDia(n) => write!(f, "bdia[{}]", n),
            Label::BlackLeft(n) => write!(f, "bleft[{}]", n),
            Label::BlackRight(n) => write!(f, "bright[{}]", n),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SignedNode {
    pub sign: Sign,
    pub label: Label,
    pub children: Vec<SignedNode>,
}

/// Order-types of the children of `f`'s root; unknown connectives default to 1.
pub fn child_orders(f: &Formula, sig: &Signature) -> Vec<Order> {
    match f {
        Formula::And(..) | Formula::Or(..) => vec![Order::One, Order::One],
        Formula::Imp(..) => vec![Order::Dual, Order::One],
        Formula::Minus(..) => vec![Order::One, Order::Dual],
        Formula::Conn(n, args) => match sig.get(n) {
            Some(d) if d.arity == args.len() => d.coords.clone(),
            _ => vec![Order::One; args.len()],
        },
        Formula::BlackBox(..) | Formula::BlackDia(..) => vec![Order::One],
        Formula::BlackLeft(..) | Formula::BlackRight(..) => vec![Order::Dual],
        _ => vec![],
    }
}

pub fn signed_tree(f: &Formula, sign: Sign, sig: &Signature) -> SignedNode {
    let orders = child_orders(f, sig);
    let children = f
        .children()
        .into_iter()
        .zip(orders)
        .map(|(c, o)| signed_tree(c, sign.apply(o), sig))
        .collect();
    SignedNode {
        sign,
        label: Label::of(f),
        children,
    }
}

impl SignedNode {
    pub fn flipped(&self) -> SignedNode {
        SignedNode {
            sign: self.sign.flip(),
            label: self.label.clone(),
            children: self.children.iter().map(|c| c.flipped()).collect(),
        }
    }

    /// Leaves in left-to-right order with their root-to-leaf child paths.
    pub fn leaves(&self) -> Vec<(Vec<usize>, &SignedNode)> {
        let mut out = Vec::new();
        let mut path = Vec::new();
        self.collect_leaves(&mut path, &mut out);
        out
    }

    fn collect_leaves<'a>(&'a self, path: &mut Vec<usize>, out: &mut Vec<(Vec<usize>, &'a SignedNode)>) {
        if self.children.is_empty() {
            out.push((path.clone(), self));
            return;
        }
        for (i, c) in self.children.iter().enumerate() {
            path.push(i);
            c.collect_leaves(path, out);
            path.pop();
        }
    }

    pub fn at(&self, path: &[usize]) -> &SignedNode {
        path.iter().fold(self, |n, &i| &n.children[i])
    }

    /// Variable leaves that are ε-critical: +p with ε_p = 1 or −p with ε_p = ∂.
    pub fn has_critical_leaf(&self, eps: &Eps) -> Result<bool, Error> {
        for (_, leaf) in self.leaves() {
            if let Label::Var(p) = &leaf.label {
                if is_critical(leaf.sign, p, eps)? {
                    return Ok(true);
                }
            }
        }
        Ok(false)
    }

    pub fn vars(&self) -> Vec<Sym> {
        let mut out = Vec::new();
        for (_, leaf) in self.leaves() {
            if let Label::Var(p) = &leaf.label {
                if !out.contains(p) {
                    out.push(p.clone());
                }
            }
        }
        out
    }
}

pub fn is_critical(sign: Sign, p: &Sym, eps: &Eps) -> Result<bool, Error> {
    let o = eps.get(p).ok_or_else(|| Error::MissingOrderType(p.to_string()))?;
    Ok(matches!((sign, o), (Sign::Pos, Order::One) | (Sign::Neg, Order::Dual)))
}

pub fn polarity(f: &Formula, p: &str, sig: &Signature) -> Polarity {
    let (mut pos, mut neg) = (false, false);
    fn go(f: &Formula, sign: Sign, p: &str, sig: &Signature, pos: &mut bool, neg: &mut bool) {
        if let Formula::Var(q) = f {
            if &**q == p {
                match sign {
                    Sign::Pos => *pos = true,
                    Sign::Neg => *neg = true,
                }
            }
            return;
        }
        for (c, o) in f.children().into_iter().zip(child_orders(f, sig)) {
            go(c, sign.apply(o), p, sig, pos, neg);
        }
    }
    go(f, Sign::Pos, p, sig, &mut pos, &mut neg);
    match (pos, neg) {
        (true, true) => Polarity::Both,
        (true, false) => Polarity::Positive,
        (false, true) => Polarity::Negative,
        (false, false) => Polarity::Absent,
    }
}

/// A critical branch: the leaf variable, the child-index path from the root,
/// and the (sign, label) pairs from the leaf up to the root.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Branch {
    pub var: Sym,
    pub path: Vec<usize>,
    pub nodes: Vec<(Sign, Label)>,
}

pub fn critical_branches(t: &SignedNode, eps: &Eps) -> Result<Vec<Branch>, Error> {
    let mut out = Vec::new();
    for (path, leaf) in t.leaves() {
        let Label::Var(p) = &leaf.label else { continue };
        if !is_critical(leaf.sign, p, eps)? {
            continue;
        }
        let mut nodes = Vec::with_capacity(path.len() + 1);
        let mut cur = t;
        nodes.push((cur.sign, cur.label.clone()));
        for &i in &path {
            cur = &cur.children[i];
            nodes.push((cur.sign, cur.label.clone()));
        }
        nodes.reverse();
        out.push(Branch {
            var: p.clone(),
            path,
            nodes,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{var, ConnectiveDecl, Kind};

    fn sig_k() -> Signature {
        let mut s = Signature::har();
        s.declare(ConnectiveDecl::new("k", Kind::Additive, vec![Order::Dual, Order::One]))
            .unwrap();
        s
    }

    fn signs(t: &SignedNode) -> Vec<(Sign, String)> {
        let mut out = vec![(t.sign, t.label.to_string())];
        for c in &t.children {
            out.extend(signs(c));
        }
        out
    }

    #[test]
    fn polarity_examples() {
        let s = sig_k();
        assert_eq!(polarity(&Formula::boxed(var("p")), "p", &s), Polarity::Positive);
        assert_eq!(polarity(&Formula::imp(var("p"), var("q")), "p", &s), Polarity::Negative);
        let kpp = Formula::conn("k", vec![var("p"), var("p")]);
        assert_eq!(polarity(&kpp, "p", &s), Polarity::Both);
        assert_eq!(polarity(&kpp, "q", &s), Polarity::Absent);
    }

    #[test]
    fn signed_tree_examples() {
        let s = sig_k();
        let t = signed_tree(&Formula::boxed(var("p")), Sign::Pos, &s);
        assert_eq!(signs(&t), vec![(Sign::Pos, "box".into()), (Sign::Pos, "p".into())]);
        let t = signed_tree(&Formula::imp(Formula::boxed(var("p")), var("q")), Sign::Neg, &s);
        assert_eq!(
            signs(&t),
            vec![
                (Sign::Neg, "->".into()),
                (Sign::Pos, "box".into()),
                (Sign::Pos, "p".into()),
                (Sign::Neg, "q".into())
            ]
        );
        let t = signed_tree(&Formula::conn("k", vec![var("p"), var("q")]), Sign::Pos, &s);
        assert_eq!(
            signs(&t),
            vec![(Sign::Pos, "k".into()), (Sign::Neg, "p".into()), (Sign::Pos, "q".into())]
        );
    }

    #[test]
    fn critical_branch_examples() {
        let s = sig_k();
        let t = signed_tree(&Formula::boxed(var("p")), Sign::Pos, &s);
        let mut eps = Eps::new();
        eps.insert("p".into(), Order::One);
        let bs = critical_branches(&t, &eps).unwrap();
        assert_eq!(bs.len(), 1);
        assert_eq!(
            bs[0].nodes,
            vec![(Sign::Pos, Label::Var("p".into())), (Sign::Pos, Label::Conn("box".into()))]
        );
        eps.insert("p".into(), Order::Dual);
        assert!(critical_branches(&t, &eps).unwrap().is_empty());
    }

    #[test]
    fn critical_branches_of_negated_box_imp() {
        // −box(p→q): −box, −→, +p, −q; with ε=(1,∂) both leaves are critical.
        let s = sig_k();
        let f = Formula::boxed(Formula::imp(var("p"), var("q")));
        let t = signed_tree(&f, Sign::Neg, &s);
        let mut eps = Eps::new();
        eps.insert("p".into(), Order::One);
        eps.insert("q".into(), Order::Dual);
        let bs = critical_branches(&t, &eps).unwrap();
        let leaves: Vec<_> = bs.iter().map(|b| (b.var.to_string(), b.nodes[0].0)).collect();
        assert_eq!(leaves, vec![("p".to_string(), Sign::Pos), ("q".to_string(), Sign::Neg)]);
        assert_eq!(bs[0].path, vec![0, 0]);
        assert_eq!(bs[1].path, vec![0, 1]);
    }

    #[test]
    fn missing_order_type_is_an_error() {
        let s = sig_k();
        let t = signed_tree(&var("p"), Sign::Pos, &s);
        assert!(matches!(
            critical_branches(&t, &Eps::new()),
            Err(Error::MissingOrderType(_))
        ));
    }
}
