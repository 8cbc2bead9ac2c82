//! Node classification and recognition of Sahlqvist and inductive inequalities.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::syntax::{
    critical_branches, is_critical, signed_tree, Base, Branch, Eps, Inequality, Kind, Label, Order, Sign, SignedNode,
    Signature, Sym,
};

/// Largest number of variables for which certificates are searched.
pub const MAX_SEARCH_VARS: usize = 16;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error(transparent)]
    Syntax(#[from] crate::syntax::Error),
    #[error("certificate search supports at most {MAX_SEARCH_VARS} variables, found {0}")]
    Budget(usize),
    #[error("dependency order is not a strict partial order: {0}")]
    BadOmega(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum NodeClass {
    Sac,
    Smp,
    Srr,
    VariableLeaf,
    ConstantLeaf,
}

impl fmt::Display for NodeClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            NodeClass::Sac => "SAC",
            NodeClass::Smp => "SMP",
            NodeClass::Srr => "SRR",
            NodeClass::VariableLeaf => "leaf",
            NodeClass::ConstantLeaf => "constant",
        })
    }
}

/// Admissible classes of a signed node. Expanded-language nodes get none.
pub fn classes(sign: Sign, label: &Label, sig: &Signature) -> Vec<NodeClass> {
    use NodeClass::*;
    use Sign::*;
    match (sign, label) {
        (_, Label::Var(_)) => vec![VariableLeaf],
        (_, Label::Top | Label::Bot) => vec![ConstantLeaf],
        (Pos, Label::And) | (Neg, Label::Or) => vec![Sac, Smp],
        (Pos, Label::Or) | (Neg, Label::And) => vec![Sac, Srr],
        (Neg, Label::Imp) => vec![Sac],
        (Pos, Label::Imp) if sig.base == Base::Har => vec![Srr],
        (_, Label::Conn(name)) => match sig.get(name) {
            Some(d) => {
                let positive_kind = match sign {
                    Pos => Kind::Additive,
                    Neg => Kind::Multiplicative,
                };
                if d.kind == positive_kind {
                    vec![Sac]
                } else if d.is_unary() {
                    vec![Smp]
                } else {
                    vec![]
                }
            }
            None => vec![],
        },
        _ => vec![],
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum CertKind {
    Sahlqvist,
    Inductive,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Certificate {
    pub kind: CertKind,
    pub eps: Eps,
    /// Pairs `(p_j, p_i)` meaning `p_j <_Ω p_i`, transitively closed.
    pub omega: Vec<(Sym, Sym)>,
}

impl Certificate {
    /// Variables in an order compatible with Ω, ties broken by name.
    pub fn stratified_vars(&self) -> Vec<Sym> {
        let mut vars: Vec<Sym> = self.eps.keys().cloned().collect();
        vars.sort_by_key(|p| (self.omega.iter().filter(|(_, hi)| hi == p).count(), p.clone()));
        vars
    }
}

/// Which side tree a branch lives in: `+lhs` or `-rhs`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Side {
    Lhs,
    Rhs,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub side: Side,
    pub branch: Branch,
    pub reason: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verdict {
    pub ok: bool,
    pub violations: Vec<Violation>,
}

/// Split of a critical branch: `nodes[1..split]` is the PIA part `P1`,
/// `nodes[split..]` the skeleton part `P2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BranchShape {
    pub split: usize,
}

/// Shortest admissible `P1`: it must reach the last non-SAC node.
pub fn branch_shape(branch: &Branch, sig: &Signature) -> BranchShape {
    let last_non_sac = (1..branch.nodes.len())
        .rev()
        .find(|&i| !classes(branch.nodes[i].0, &branch.nodes[i].1, sig).contains(&NodeClass::Sac));
    BranchShape {
        split: last_non_sac.map_or(1, |i| i + 1),
    }
}

fn trees(ineq: &Inequality, sig: &Signature) -> [(Side, SignedNode); 2] {
    [
        (Side::Lhs, signed_tree(&ineq.lhs, Sign::Pos, sig)),
        (Side::Rhs, signed_tree(&ineq.rhs, Sign::Neg, sig)),
    ]
}

fn check_eps(ineq: &Inequality, eps: &Eps) -> Result<(), Error> {
    for p in ineq.vars() {
        if !eps.contains_key(&p) {
            return Err(crate::syntax::Error::MissingOrderType(p.to_string()).into());
        }
    }
    Ok(())
}

pub fn is_sahlqvist(ineq: &Inequality, eps: &Eps, sig: &Signature) -> Result<Verdict, Error> {
    check_eps(ineq, eps)?;
    let mut violations = Vec::new();
    for (side, t) in trees(ineq, sig) {
        for b in critical_branches(&t, eps)? {
            let shape = branch_shape(&b, sig);
            let bad = (1..shape.split).find(|&i| !classes(b.nodes[i].0, &b.nodes[i].1, sig).contains(&NodeClass::Smp));
            if let Some(i) = bad {
                let (s, l) = &b.nodes[i];
                violations.push(Violation {
                    side,
                    reason: format!("node {}{} is neither SAC above nor SMP below", s, l),
                    branch: b,
                });
            }
        }
    }
    Ok(Verdict {
        ok: violations.is_empty(),
        violations,
    })
}

/// Goodness of every critical branch plus the ε^∂-uniformity of SRR side
/// subtrees; returns the dependency constraints `(p_j, p_i)` those side subtrees force.
pub fn inductive_constraints(
    ineq: &Inequality,
    eps: &Eps,
    sig: &Signature,
) -> Result<(Vec<Violation>, BTreeSet<(Sym, Sym)>), Error> {
    check_eps(ineq, eps)?;
    let mut violations = Vec::new();
    let mut forced = BTreeSet::new();
    for (side, t) in trees(ineq, sig) {
        for b in critical_branches(&t, eps)? {
            let shape = branch_shape(&b, sig);
            let depth = b.path.len();
            let mut reason = None;
            for i in 1..shape.split {
                let (s, l) = &b.nodes[i];
                let cls = classes(*s, l, sig);
                if cls.contains(&NodeClass::Smp) && !cls.contains(&NodeClass::Srr) {
                    continue;
                }
                if !cls.contains(&NodeClass::Srr) {
                    reason = Some(format!("node {}{} is neither SAC above nor PIA below", s, l));
                    break;
                }
                // nodes[i] sits at depth - i; its child on the branch is path[depth - i].
                let node = t.at(&b.path[..depth - i]);
                let through = b.path[depth - i];
                if *l == Label::Imp && through == 0 {
                    reason = Some("critical branch passes through the antecedent of +->".into());
                    break;
                }
                let other = &node.children[1 - through];
                if other.has_critical_leaf(eps)? {
                    reason = Some(format!("side subtree of {}{} contains a critical occurrence", s, l));
                    break;
                }
                for q in other.vars() {
                    forced.insert((q, b.var.clone()));
                }
            }
            if let Some(reason) = reason {
                violations.push(Violation { side, branch: b, reason });
            }
        }
    }
    Ok((violations, forced))
}

fn check_omega(omega: &[(Sym, Sym)]) -> Result<(), Error> {
    let set: BTreeSet<&(Sym, Sym)> = omega.iter().collect();
    for (a, b) in omega {
        if a == b {
            return Err(Error::BadOmega(format!("{} < {}", a, b)));
        }
        for (c, d) in omega {
            if b == c && !set.contains(&(a.clone(), d.clone())) {
                return Err(Error::BadOmega(format!("missing {} < {}", a, d)));
            }
        }
    }
    Ok(())
}

pub fn is_inductive(ineq: &Inequality, eps: &Eps, omega: &[(Sym, Sym)], sig: &Signature) -> Result<Verdict, Error> {
    check_omega(omega)?;
    let (mut violations, forced) = inductive_constraints(ineq, eps, sig)?;
    let omega: BTreeSet<&(Sym, Sym)> = omega.iter().collect();
    if violations.is_empty() {
        // Report each unmet dependency against the first branch of the dependent variable.
        for (side, t) in trees(ineq, sig) {
            for b in critical_branches(&t, eps)? {
                for (lo, hi) in &forced {
                    if *hi == b.var && !omega.contains(&(lo.clone(), hi.clone())) {
                        if violations.iter().any(|v: &Violation| v.reason.ends_with(&format!("{} < {}", lo, hi))) {
                            continue;
                        }
                        violations.push(Violation {
                            side,
                            branch: b.clone(),
                            reason: format!("dependency order lacks {} < {}", lo, hi),
                        });
                    }
                }
            }
        }
    }
    Ok(Verdict {
        ok: violations.is_empty(),
        violations,
    })
}

/// Every leaf variable of the tree is ε-critical.
pub fn is_eps_uniform(tree: &SignedNode, eps: &Eps) -> Result<bool, Error> {
    for (_, leaf) in tree.leaves() {
        if let Label::Var(p) = &leaf.label {
            if !is_critical(leaf.sign, p, eps)? {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Smallest transitive relation containing `pairs`.
pub fn transitive_closure(pairs: &BTreeSet<(Sym, Sym)>) -> BTreeSet<(Sym, Sym)> {
    let mut out = pairs.clone();
    loop {
        let mut added = Vec::new();
        for (a, b) in &out {
            for (c, d) in &out {
                if b == c && !out.contains(&(a.clone(), d.clone())) {
                    added.push((a.clone(), d.clone()));
                }
            }
        }
        if added.is_empty() {
            return out;
        }
        out.extend(added);
    }
}

fn nth_eps(vars: &[Sym], code: u32) -> Eps {
    // The first variable is the most significant digit, with 1 < ∂.
    let k = vars.len();
    vars.iter()
        .enumerate()
        .map(|(i, p)| {
            let o = if code >> (k - 1 - i) & 1 == 1 { Order::Dual } else { Order::One };
            (p.clone(), o)
        })
        .collect()
}

/// Search for a certificate: Sahlqvist over all ε first, then inductive with
/// Ω the transitive closure of the forced constraints.
pub fn find_certificate(ineq: &Inequality, sig: &Signature) -> Result<Option<Certificate>, Error> {
    let vars = ineq.sorted_vars();
    if vars.len() > MAX_SEARCH_VARS {
        return Err(Error::Budget(vars.len()));
    }
    let count = 1u32 << vars.len();
    for code in 0..count {
        let eps = nth_eps(&vars, code);
        if is_sahlqvist(ineq, &eps, sig)?.ok {
            return Ok(Some(Certificate {
                kind: CertKind::Sahlqvist,
                eps,
                omega: vec![],
            }));
        }
    }
    for code in 0..count {
        let eps = nth_eps(&vars, code);
        let (violations, forced) = inductive_constraints(ineq, &eps, sig)?;
        if !violations.is_empty() {
            continue;
        }
        let closure = transitive_closure(&forced);
        if closure.iter().any(|(a, b)| a == b) {
            continue;
        }
        let omega: Vec<(Sym, Sym)> = closure.into_iter().collect();
        debug_assert!(is_inductive(ineq, &eps, &omega, sig)?.ok);
        return Ok(Some(Certificate {
            kind: CertKind::Inductive,
            eps,
            omega,
        }));
    }
    Ok(None)
}

/// JSON report of a certificate search.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CertificateJson {
    pub kind: Option<CertKind>,
    pub eps: BTreeMap<Sym, Order>,
    pub omega: Vec<[Sym; 2]>,
    pub violations: Vec<Violation>,
}

impl CertificateJson {
    pub fn found(c: &Certificate) -> CertificateJson {
        CertificateJson {
            kind: Some(c.kind),
            eps: c.eps.clone(),
            omega: c.omega.iter().map(|(a, b)| [a.clone(), b.clone()]).collect(),
            violations: vec![],
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{parse_eps, parse_inequality, ConnectiveDecl};

    fn ineq(s: &str) -> Inequality {
        parse_inequality(s, &Signature::har(), false).unwrap()
    }

    fn eps(s: &str) -> Eps {
        parse_eps(s).unwrap()
    }

    fn om(pairs: &[(&str, &str)]) -> Vec<(Sym, Sym)> {
        pairs.iter().map(|(a, b)| (Sym::from(*a), Sym::from(*b))).collect()
    }

    #[test]
    fn node_table() {
        let sig = Signature::har();
        let c = |s, l: Label| classes(s, &l, &sig);
        assert_eq!(c(Sign::Pos, Label::And), vec![NodeClass::Sac, NodeClass::Smp]);
        assert_eq!(c(Sign::Neg, Label::Or), vec![NodeClass::Sac, NodeClass::Smp]);
        assert_eq!(c(Sign::Pos, Label::Or), vec![NodeClass::Sac, NodeClass::Srr]);
        assert_eq!(c(Sign::Neg, Label::Imp), vec![NodeClass::Sac]);
        assert_eq!(c(Sign::Pos, Label::Imp), vec![NodeClass::Srr]);
        assert_eq!(c(Sign::Pos, Label::Conn("box".into())), vec![NodeClass::Smp]);
        assert_eq!(c(Sign::Neg, Label::Conn("box".into())), vec![NodeClass::Sac]);
        assert_eq!(c(Sign::Pos, Label::Conn("dia".into())), vec![NodeClass::Sac]);
        assert_eq!(c(Sign::Neg, Label::Conn("dia".into())), vec![NodeClass::Smp]);
        assert_eq!(c(Sign::Pos, Label::Nominal("i".into())), vec![]);
        let dlr = Signature::dlr();
        assert!(classes(Sign::Pos, &Label::Imp, &dlr).is_empty());
        let mut s = Signature::har();
        s.declare(ConnectiveDecl::new("l", Kind::Multiplicative, vec![Order::One, Order::One]))
            .unwrap();
        assert!(classes(Sign::Pos, &Label::Conn("l".into()), &s).is_empty());
        assert_eq!(classes(Sign::Neg, &Label::Conn("l".into()), &s), vec![NodeClass::Sac]);
    }

    #[test]
    fn sahlqvist_examples() {
        let sig = Signature::har();
        assert!(is_sahlqvist(&ineq("box p <= p"), &eps("p=1"), &sig).unwrap().ok);
        assert!(is_sahlqvist(&ineq("neg box p <= box neg box p"), &eps("p=d"), &sig).unwrap().ok);
        let one = ineq("box (p -> q) <= box (box p -> box q)");
        let v = is_sahlqvist(&one, &eps("p=1,q=1"), &sig).unwrap();
        assert!(!v.ok);
        assert!(!v.violations.is_empty());
        assert!(is_sahlqvist(&one, &eps("p=1,q=d"), &sig).unwrap().ok);
    }

    #[test]
    fn inductive_examples() {
        let sig = Signature::har();
        let k = ineq("box (p -> q) <= box p -> box q");
        assert!(is_inductive(&k, &eps("p=1,q=1"), &om(&[("p", "q")]), &sig).unwrap().ok);
        assert!(!is_inductive(&k, &eps("p=1,q=1"), &[], &sig).unwrap().ok);
        assert!(is_inductive(&ineq("box p <= p"), &eps("p=1"), &[], &sig).unwrap().ok);
        assert!(matches!(
            is_inductive(&k, &eps("p=1,q=1"), &om(&[("p", "p")]), &sig),
            Err(Error::BadOmega(_))
        ));
    }

    #[test]
    fn certificate_examples() {
        let sig = Signature::har();
        let c = find_certificate(&ineq("box p <= box box p"), &sig).unwrap().unwrap();
        assert_eq!(c.kind, CertKind::Sahlqvist);
        assert_eq!(c.eps, eps("p=1"));
        let c = find_certificate(&ineq("box (p -> q) <= box (box p -> box q)"), &sig)
            .unwrap()
            .unwrap();
        assert_eq!(c.kind, CertKind::Sahlqvist);
        assert_eq!(c.eps, eps("p=1,q=d"));
    }

    #[test]
    fn inductive_only_certificate() {
        let sig = Signature::har();
        // The +-> on q's branch forces p < q and keeps every ε from being Sahlqvist.
        let i = ineq("p /\\ box (p -> q) <= dia box q");
        let c = find_certificate(&i, &sig).unwrap().unwrap();
        assert_eq!(c.kind, CertKind::Inductive);
        assert_eq!(c.eps, eps("p=1,q=1"));
        assert_eq!(c.omega, om(&[("p", "q")]));
        assert!(is_inductive(&i, &c.eps, &c.omega, &sig).unwrap().ok);
    }

    #[test]
    fn dia_below_box_exhaustive() {
        // Independent check: the certificate agrees with a scan over all four ε.
        let sig = Signature::har();
        let i = ineq("dia p <= box p");
        let any = ["p=1", "p=d"].iter().any(|e| is_sahlqvist(&i, &eps(e), &sig).unwrap().ok);
        assert_eq!(find_certificate(&i, &sig).unwrap().is_some(), any);
    }

    #[test]
    fn uniformity() {
        let sig = Signature::har();
        let t = signed_tree(&ineq("dia p <= p").lhs, Sign::Pos, &sig);
        assert!(is_eps_uniform(&t, &eps("p=1")).unwrap());
        let t = signed_tree(&ineq("p /\\ q <= p").lhs, Sign::Pos, &sig);
        assert!(!is_eps_uniform(&t, &eps("p=1,q=d")).unwrap());
        let t = signed_tree(&ineq("box p <= p").lhs, Sign::Neg, &sig);
        assert!(is_eps_uniform(&t, &eps("p=d")).unwrap());
    }

    #[test]
    fn missing_order_type_is_an_error() {
        let sig = Signature::har();
        assert!(is_sahlqvist(&ineq("box p <= q"), &eps("p=1"), &sig).is_err());
    }

    #[test]
    fn budget_guard() {
        let sig = Signature::har();
        let names: Vec<String> = (0..17).map(|i| format!("p{}", i)).collect();
        let text = format!("{} <= top", names.join(" /\\ "));
        assert!(matches!(find_certificate(&ineq(&text), &sig), Err(Error::Budget(17))));
    }
}
