use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::{Error, Sym};

/// Whether a connective preserves nonempty joins or nonempty meets.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Kind {
    Additive,
    Multiplicative,
}

/// Order-type of a coordinate or variable: `One` is monotone, `Dual` antitone.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Order {
    #[serde(rename = "1")]
    One,
    #[serde(rename = "d")]
    Dual,
}

impl Order {
    pub fn flip(self) -> Order {
        match self {
            Order::One => Order::Dual,
            Order::Dual => Order::One,
        }
    }

    pub fn as_char(self) -> char {
        match self {
            Order::One => '1',
            Order::Dual => 'd',
        }
    }

    pub fn from_char(c: char) -> Option<Order> {
        match c {
            '1' => Some(Order::One),
            'd' | '∂' => Some(Order::Dual),
            _ => None,
        }
    }
}

impl fmt::Display for Order {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.as_char())
    }
}

/// Whether implication is a primitive of the base language.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Base {
    Dlr,
    Har,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConnectiveDecl {
    pub name: Sym,
    pub arity: usize,
    pub kind: Kind,
    pub coords: Vec<Order>,
}

impl ConnectiveDecl {
    pub fn new(name: &str, kind: Kind, coords: Vec<Order>) -> ConnectiveDecl {
        ConnectiveDecl {
            name: Sym::from(name),
            arity: coords.len(),
            kind,
            coords,
        }
    }

    pub fn is_unary(&self) -> bool {
        self.arity == 1
    }

    /// Indices of 1-typed coordinates.
    pub fn positive_coords(&self) -> Vec<usize> {
        (0..self.arity).filter(|&i| self.coords[i] == Order::One).collect()
    }

    /// Indices of ∂-typed coordinates.
    pub fn negative_coords(&self) -> Vec<usize> {
        (0..self.arity).filter(|&i| self.coords[i] == Order::Dual).collect()
    }
}

/// A regular signature: the declared connectives plus the base (DLR or HAR).
///
/// `dia`, `box` and `neg` are always present.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Signature {
    pub base: Base,
    decls: BTreeMap<Sym, ConnectiveDecl>,
}

pub const BUILTINS: [&str; 3] = ["dia", "box", "neg"];

impl Signature {
    pub fn new(base: Base) -> Signature {
        let mut decls = BTreeMap::new();
        for d in [
            ConnectiveDecl::new("dia", Kind::Additive, vec![Order::One]),
            ConnectiveDecl::new("box", Kind::Multiplicative, vec![Order::One]),
            ConnectiveDecl::new("neg", Kind::Additive, vec![Order::Dual]),
        ] {
            decls.insert(d.name.clone(), d);
        }
        Signature { base, decls }
    }

    pub fn har() -> Signature {
        Signature::new(Base::Har)
    }

    pub fn dlr() -> Signature {
        Signature::new(Base::Dlr)
    }

    pub fn declare(&mut self, decl: ConnectiveDecl) -> Result<(), Error> {
        if decl.coords.len() != decl.arity {
            return Err(Error::Signature {
                line: 0,
                msg: format!("`{}`: coordinate types do not match arity", decl.name),
            });
        }
        if !is_identifier(&decl.name) || is_keyword(&decl.name) {
            return Err(Error::Signature {
                line: 0,
                msg: format!("`{}` is not a valid connective name", decl.name),
            });
        }
        if self.decls.contains_key(&decl.name) {
            return Err(Error::Signature {
                line: 0,
                msg: format!("duplicate connective `{}`", decl.name),
            });
        }
        self.decls.insert(decl.name.clone(), decl);
        Ok(())
    }

    pub fn get(&self, name: &str) -> Option<&ConnectiveDecl> {
        self.decls.get(name)
    }

    pub fn connectives(&self) -> impl Iterator<Item = &ConnectiveDecl> {
        self.decls.values()
    }

    /// Parse the line-oriented signature format.
    ///
    /// Each line is `name arity kind coordtypes`, e.g. `k 2 additive d1`;
    /// an optional `base dlr|har` line selects the base. `#` starts a comment.
    pub fn from_text(text: &str) -> Result<Signature, Error> {
        let mut sig = Signature::new(Base::Dlr);
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let bad = |msg: String| Error::Signature {
                line: lineno + 1,
                msg,
            };
            let fields: Vec<&str> = line.split_whitespace().collect();
            if fields[0] == "base" {
                sig.base = match fields.get(1).copied() {
                    Some("dlr") | Some("DLR") => Base::Dlr,
                    Some("har") | Some("HAR") => Base::Har,
                    other => return Err(bad(format!("unknown base {:?}", other))),
                };
                continue;
            }
            if fields.len() < 3 || fields.len() > 4 {
                return Err(bad("expected `name arity kind coordtypes`".into()));
            }
            let arity: usize = fields[1]
                .parse()
                .map_err(|_| bad(format!("bad arity `{}`", fields[1])))?;
            let kind = match fields[2].to_ascii_lowercase().as_str() {
                "additive" | "add" => Kind::Additive,
                "multiplicative" | "mult" => Kind::Multiplicative,
                other => return Err(bad(format!("unknown kind `{}`", other))),
            };
            let coord_text = fields.get(3).copied().unwrap_or("");
            let coord_text = if coord_text == "-" { "" } else { coord_text };
            let coords: Option<Vec<Order>> = coord_text.chars().map(Order::from_char).collect();
            let coords = coords.ok_or_else(|| bad(format!("bad coordinate types `{}`", coord_text)))?;
            if coords.len() != arity {
                return Err(bad(format!(
                    "{} coordinate types given for arity {}",
                    coords.len(),
                    arity
                )));
            }
            sig.declare(ConnectiveDecl::new(fields[0], kind, coords))
                .map_err(|e| match e {
                    Error::Signature { msg, .. } => bad(msg),
                    other => other,
                })?;
        }
        Ok(sig)
    }

    pub fn to_text(&self) -> String {
        let mut out = format!(
            "base {}\n",
            match self.base {
                Base::Dlr => "dlr",
                Base::Har => "har",
            }
        );
        for d in self.decls.values() {
            if BUILTINS.contains(&&*d.name) {
                continue;
            }
            let coords: String = d.coords.iter().map(|o| o.as_char()).collect();
            let kind = match d.kind {
                Kind::Additive => "additive",
                Kind::Multiplicative => "multiplicative",
            };
            let coords = if coords.is_empty() { "-".to_string() } else { coords };
            out.push_str(&format!("{} {} {} {}\n", d.name, d.arity, kind, coords));
        }
        out
    }
}

pub(crate) fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '\'')
}

pub(crate) fn is_keyword(s: &str) -> bool {
    matches!(s, "top" | "bot" | "bbox" | "bdia" | "bleft" | "bright")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtins_present() {
        let sig = Signature::dlr();
        let dia = sig.get("dia").unwrap();
        assert_eq!(dia.kind, Kind::Additive);
        assert_eq!(dia.coords, vec![Order::One]);
        assert_eq!(sig.get("box").unwrap().kind, Kind::Multiplicative);
        assert_eq!(sig.get("neg").unwrap().coords, vec![Order::Dual]);
    }

    #[test]
    fn parses_signature_file() {
        let sig = Signature::from_text("base har\n# comment\nk 2 additive d1\nl 1 multiplicative 1\nc 0 additive -\n").unwrap();
        assert_eq!(sig.base, Base::Har);
        let k = sig.get("k").unwrap();
        assert_eq!(k.coords, vec![Order::Dual, Order::One]);
        assert_eq!(k.negative_coords(), vec![0]);
        assert_eq!(k.positive_coords(), vec![1]);
        assert_eq!(sig.get("c").unwrap().arity, 0);
        let again = Signature::from_text(&sig.to_text()).unwrap();
        assert_eq!(again, sig);
    }

    #[test]
    fn rejects_bad_lines() {
        assert!(matches!(
            Signature::from_text("k 2 additive 1"),
            Err(Error::Signature { line: 1, .. })
        ));
        assert!(Signature::from_text("box 1 additive 1").is_err());
        assert!(Signature::from_text("k 1 weird 1").is_err());
        assert!(Signature::from_text("top 1 additive 1").is_err());
    }
}
