use super::{Error, Fo};
use crate::syntax::Sym;

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Id(String),
    True,
    False,
    LParen,
    RParen,
    LBrack,
    RBrack,
    Comma,
    Colon,
    Dot,
    Not,
    And,
    Or,
    Imp,
    Iff,
    Eq,
    Neq,
    All,
    Ex,
}

fn lex(text: &str) -> Result<Vec<(usize, Tok)>, Error> {
    let mut out = Vec::new();
    let cs: Vec<(usize, char)> = text.char_indices().collect();
    let mut k = 0;
    let err = |pos: usize, msg: String| Error::Parse { pos, msg };
    while k < cs.len() {
        let (pos, c) = cs[k];
        let rest = &text[pos..];
        let (tok, len) = if c.is_whitespace() {
            k += 1;
            continue;
        } else if rest.starts_with("<=>") {
            (Tok::Iff, 3)
        } else if rest.starts_with("=>") {
            (Tok::Imp, 2)
        } else if rest.starts_with("!=") {
            (Tok::Neq, 2)
        } else if rest.starts_with("$true") {
            (Tok::True, 5)
        } else if rest.starts_with("$false") {
            (Tok::False, 6)
        } else if c.is_alphabetic() || c == '_' {
            let mut end = k;
            while end < cs.len() && (cs[end].1.is_alphanumeric() || cs[end].1 == '_') && !"∀∃¬∧∨→↔≡≢⊤⊥".contains(cs[end].1) {
                end += 1;
            }
            let id: String = cs[k..end].iter().map(|(_, c)| *c).collect();
            out.push((pos, Tok::Id(id)));
            k = end;
            continue;
        } else {
            let t = match c {
                '(' => Tok::LParen,
                ')' => Tok::RParen,
                '[' => Tok::LBrack,
                ']' => Tok::RBrack,
                ',' => Tok::Comma,
                ':' => Tok::Colon,
                '.' => Tok::Dot,
                '~' | '¬' => Tok::Not,
                '&' | '∧' => Tok::And,
                '|' | '∨' => Tok::Or,
                '→' => Tok::Imp,
                '↔' => Tok::Iff,
                '=' | '≡' => Tok::Eq,
                '≢' => Tok::Neq,
                '!' | '∀' => Tok::All,
                '?' | '∃' => Tok::Ex,
                '⊤' => Tok::True,
                '⊥' => Tok::False,
                _ => return Err(err(pos, format!("unexpected character `{}`", c))),
            };
            (t, 1)
        };
        out.push((pos, tok));
        k += len;
    }
    Ok(out)
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    at: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.at).map(|(_, t)| t)
    }

    fn pos(&self) -> usize {
        self.toks.get(self.at).map(|(p, _)| *p).unwrap_or(self.end)
    }

    fn err(&self, msg: impl Into<String>) -> Error {
        Error::Parse {
            pos: self.pos(),
            msg: msg.into(),
        }
    }

    fn eat(&mut self, t: &Tok) -> bool {
        if self.peek() == Some(t) {
            self.at += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, t: Tok) -> Result<(), Error> {
        if self.eat(&t) {
            Ok(())
        } else {
            Err(self.err(format!("expected {:?}", t)))
        }
    }

    fn ident(&mut self) -> Result<Sym, Error> {
        match self.peek().cloned() {
            Some(Tok::Id(s)) => {
                self.at += 1;
                Ok(Sym::from(s))
            }
            _ => Err(self.err("expected an identifier")),
        }
    }

    fn formula(&mut self) -> Result<Fo, Error> {
        let lhs = self.disjunction()?;
        if self.eat(&Tok::Imp) {
            let rhs = self.formula()?;
            return Ok(Fo::imp(lhs, rhs));
        }
        if self.eat(&Tok::Iff) {
            let rhs = self.formula()?;
            return Ok(Fo::and(Fo::imp(lhs.clone(), rhs.clone()), Fo::imp(rhs, lhs)));
        }
        Ok(lhs)
    }

    fn disjunction(&mut self) -> Result<Fo, Error> {
        let mut acc = self.conjunction()?;
        while self.eat(&Tok::Or) {
            acc = Fo::or(acc, self.conjunction()?);
        }
        Ok(acc)
    }

    fn conjunction(&mut self) -> Result<Fo, Error> {
        let mut acc = self.unary()?;
        while self.eat(&Tok::And) {
            acc = Fo::and(acc, self.unary()?);
        }
        Ok(acc)
    }

    fn binders(&mut self) -> Result<Vec<Sym>, Error> {
        let mut xs = Vec::new();
        if self.eat(&Tok::LBrack) {
            xs.push(self.ident()?);
            while self.eat(&Tok::Comma) {
                xs.push(self.ident()?);
            }
            self.expect(Tok::RBrack)?;
            self.expect(Tok::Colon)?;
        } else {
            xs.push(self.ident()?);
            if !self.eat(&Tok::Dot) {
                self.eat(&Tok::Colon);
            }
        }
        Ok(xs)
    }

    fn unary(&mut self) -> Result<Fo, Error> {
        match self.peek() {
            Some(Tok::Not) => {
                self.at += 1;
                Ok(Fo::not(self.unary()?))
            }
            Some(Tok::All) | Some(Tok::Ex) => {
                let all = self.peek() == Some(&Tok::All);
                self.at += 1;
                let xs = self.binders()?;
                let body = self.unary()?;
                Ok(xs.iter().rev().fold(body, |acc, x| {
                    if all {
                        Fo::forall(x, acc)
                    } else {
                        Fo::exists(x, acc)
                    }
                }))
            }
            Some(Tok::LParen) => {
                self.at += 1;
                let f = self.formula()?;
                self.expect(Tok::RParen)?;
                Ok(f)
            }
            Some(Tok::True) => {
                self.at += 1;
                Ok(Fo::True)
            }
            Some(Tok::False) => {
                self.at += 1;
                Ok(Fo::False)
            }
            Some(Tok::Id(_)) => self.atom(),
            _ => Err(self.err("expected a formula")),
        }
    }

    fn atom(&mut self) -> Result<Fo, Error> {
        let name = self.ident()?;
        if self.eat(&Tok::LParen) {
            let a = self.ident()?;
            let out = if &*name == "R" {
                self.expect(Tok::Comma)?;
                Fo::R(a, self.ident()?)
            } else if &*name == "N" {
                Fo::N(a)
            } else if let Some(p) = name.strip_prefix("P_") {
                Fo::P(Sym::from(p), a)
            } else {
                return Err(self.err(format!("unknown predicate `{}`", name)));
            };
            self.expect(Tok::RParen)?;
            return Ok(out);
        }
        if self.eat(&Tok::Eq) {
            return Ok(Fo::Eq(name, self.ident()?));
        }
        if self.eat(&Tok::Neq) {
            return Ok(Fo::not(Fo::Eq(name, self.ident()?)));
        }
        Err(self.err("expected `(`, `=` or `!=` after identifier"))
    }
}

/// Parse the ASCII syntax produced by `Display` (`![x,y]: φ`, `?[x]: φ`,
/// `~`, `&`, `|`, `=>`, `<=>`, `=`, `!=`, `R(x,y)`, `N(x)`, `P_p(x)`,
/// `$true`, `$false`). The Unicode connectives `∀ ∃ ¬ ∧ ∨ → ↔ ≡ ≢ ⊤ ⊥` are
/// accepted as well, with `∀x.φ` or `∀x φ` for single binders.
pub fn parse_fo(text: &str) -> Result<Fo, Error> {
    let mut p = Parser {
        toks: lex(text)?,
        at: 0,
        end: text.len(),
    };
    let f = p.formula()?;
    if p.at != p.toks.len() {
        return Err(p.err("trailing input"));
    }
    Ok(f)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roundtrip() {
        for s in [
            "![x]: (N(x) => R(x,x))",
            "![x,y,z]: (N(x) & N(y) & R(x,y) & R(x,z) => R(y,z))",
            "(?[y]: (R(y,i) & i = y)) | ~P_p(x)",
            "N(x) => ![y]: R(x,y)",
            "$true & (x != y => $false)",
        ] {
            let f = parse_fo(s).unwrap();
            assert_eq!(f.to_string(), s);
            assert_eq!(parse_fo(&f.to_string()).unwrap(), f);
        }
    }

    #[test]
    fn unicode_input() {
        let f = parse_fo("∀x.(N(x) → R(x,x))").unwrap();
        assert_eq!(f.to_string(), "![x]: (N(x) => R(x,x))");
        let g = parse_fo("∀x N(x) ∧ ∃y ¬(y ≡ y)").unwrap();
        assert_eq!(g.to_string(), "(![x]: N(x)) & (?[y]: y != y)");
    }

    #[test]
    fn errors() {
        assert!(parse_fo("Q(x)").is_err());
        assert!(parse_fo("N(x) &").is_err());
        assert!(parse_fo("N(x) N(y)").is_err());
    }
}
