//! Formulas, inequalities and quasi-inequalities over a regular signature,
//! with the parser, printer and signed generation trees.

mod formula;
mod parse;
mod print;
mod signature;
mod tree;

use std::sync::Arc;

use thiserror::Error;

pub use formula::{conom, nom, var, Formula, Inequality, QuasiInequality};
pub use parse::{parse, parse_formula, parse_inequality, parse_quasi, Parsed};
pub use signature::{Base, ConnectiveDecl, Kind, Order, Signature, BUILTINS};
pub use tree::{
    child_orders, critical_branches, is_critical, polarity, signed_tree, Branch, Eps, Label, Polarity, Sign,
    SignedNode,
};

/// Interned identifier.
pub type Sym = Arc<str>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("syntax error at offset {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("unknown connective `{0}`")]
    UnknownConnective(String),
    #[error("connective `{name}` expects {expected} argument(s), found {found}")]
    Arity { name: String, expected: usize, found: usize },
    #[error("{0} is only allowed in the expanded language")]
    ExpandedOnly(String),
    #[error("`{tag}[{name}]` does not name a matching unary connective")]
    BadAdjoint { tag: String, name: String },
    #[error("signature line {line}: {msg}")]
    Signature { line: usize, msg: String },
    #[error("variable `{0}` has no order-type")]
    MissingOrderType(String),
}

/// Parse an order-type given as `p=1,q=d`.
pub fn parse_eps(text: &str) -> Result<Eps, Error> {
    let mut eps = Eps::new();
    for part in text.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let (name, o) = part.split_once('=').ok_or_else(|| Error::Parse {
            pos: 0,
            msg: format!("expected `var=1|d`, found `{}`", part),
        })?;
        let mut cs = o.trim().chars();
        let order = match (cs.next(), cs.next()) {
            (Some(c), None) => Order::from_char(c),
            _ => None,
        }
        .ok_or_else(|| Error::Parse {
            pos: 0,
            msg: format!("bad order-type `{}`", o),
        })?;
        eps.insert(Sym::from(name.trim()), order);
    }
    Ok(eps)
}

pub fn eps_to_string(eps: &Eps) -> String {
    eps.iter()
        .map(|(p, o)| format!("{}={}", p, o))
        .collect::<Vec<_>>()
        .join(",")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eps_round_trip() {
        let eps = parse_eps("p=1, q=d").unwrap();
        assert_eq!(eps.get("q"), Some(&Order::Dual));
        assert_eq!(eps_to_string(&eps), "p=1,q=d");
        assert!(parse_eps("p=2").is_err());
    }

    #[test]
    fn json_uses_node_tags() {
        let f = Formula::boxed(var("p"));
        let v = serde_json::to_value(&f).unwrap();
        assert_eq!(v["node"], "Conn");
        assert_eq!(v["args"][1][0]["node"], "Var");
        let back: Formula = serde_json::from_value(v).unwrap();
        assert_eq!(back, f);
    }
}
