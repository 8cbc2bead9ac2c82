use super::signature::is_keyword;
use super::{Error, Formula, Inequality, QuasiInequality, Signature, Sym};

/// Result of parsing a piece of text.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Parsed {
    Formula(Formula),
    Inequality(Inequality),
    Quasi(QuasiInequality),
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Nominal(String),
    Conominal(String),
    Black(BlackKind, String),
    LParen,
    RParen,
    Comma,
    Or,
    And,
    Arrow,
    Minus,
    Leq,
    Amp,
    Implies,
    Tilde,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum BlackKind {
    Box,
    Dia,
    Left,
    Right,
}

fn lex(text: &str) -> Result<Vec<(usize, Tok)>, Error> {
    let chars: Vec<(usize, char)> = text.char_indices().collect();
    let mut out = Vec::new();
    let mut i = 0;
    let err = |pos: usize, msg: &str| Error::Parse {
        pos,
        msg: msg.to_string(),
    };
    let ident_char = |c: char| c.is_ascii_alphanumeric() || c == '_' || c == '\'';
    while i < chars.len() {
        let (pos, c) = chars[i];
        let next = chars.get(i + 1).map(|&(_, c)| c);
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        let two = |a: char, b: char| c == a && next == Some(b);
        let tok = if two('\\', '/') {
            i += 2;
            Tok::Or
        } else if two('/', '\\') {
            i += 2;
            Tok::And
        } else if two('-', '>') {
            i += 2;
            Tok::Arrow
        } else if two('<', '=') {
            i += 2;
            Tok::Leq
        } else if two('=', '>') {
            i += 2;
            Tok::Implies
        } else if c == '-' {
            i += 1;
            Tok::Minus
        } else if c == '(' {
            i += 1;
            Tok::LParen
        } else if c == ')' {
            i += 1;
            Tok::RParen
        } else if c == ',' {
            i += 1;
            Tok::Comma
        } else if c == '&' {
            i += 1;
            Tok::Amp
        } else if c == '~' {
            i += 1;
            Tok::Tilde
        } else if c == '#' || c == '@' {
            let start = i + 1;
            let mut j = start;
            while j < chars.len() && ident_char(chars[j].1) {
                j += 1;
            }
            if j == start || !(chars[start].1.is_ascii_alphabetic() || chars[start].1 == '_') {
                return Err(err(pos, "expected identifier after `#`/`@`"));
            }
            let name: String = chars[start..j].iter().map(|&(_, c)| c).collect();
            i = j;
            if c == '#' {
                Tok::Nominal(name)
            } else {
                Tok::Conominal(name)
            }
        } else if c.is_ascii_alphabetic() || c == '_' {
            let mut j = i;
            while j < chars.len() && ident_char(chars[j].1) {
                j += 1;
            }
            let name: String = chars[i..j].iter().map(|&(_, c)| c).collect();
            i = j;
            let black = match name.as_str() {
                "bbox" => Some(BlackKind::Box),
                "bdia" => Some(BlackKind::Dia),
                "bleft" => Some(BlackKind::Left),
                "bright" => Some(BlackKind::Right),
                _ => None,
            };
            match black {
                Some(kind) => {
                    if chars.get(i).map(|&(_, c)| c) != Some('[') {
                        return Err(err(pos, "expected `[` after black connective"));
                    }
                    let start = i + 1;
                    let mut j = start;
                    while j < chars.len() && ident_char(chars[j].1) {
                        j += 1;
                    }
                    if j == start || chars.get(j).map(|&(_, c)| c) != Some(']') {
                        return Err(err(pos, "expected `[name]` after black connective"));
                    }
                    let target: String = chars[start..j].iter().map(|&(_, c)| c).collect();
                    i = j + 1;
                    Tok::Black(kind, target)
                }
                None => Tok::Ident(name),
            }
        } else {
            return Err(err(pos, &format!("unexpected character `{}`", c)));
        };
        out.push((pos, tok));
    }
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    end: usize,
    sig: &'a Signature,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(_, t)| t)
    }

    fn offset(&self) -> usize {
        self.toks.get(self.pos).map(|(p, _)| *p).unwrap_or(self.end)
    }

    fn error(&self, msg: &str) -> Error {
        Error::Parse {
            pos: self.offset(),
            msg: msg.to_string(),
        }
    }

    fn eat(&mut self, t: &Tok) -> bool {
        if self.peek() == Some(t) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, t: &Tok, what: &str) -> Result<(), Error> {
        if self.eat(t) {
            Ok(())
        } else {
            Err(self.error(&format!("expected {}", what)))
        }
    }

    fn form(&mut self) -> Result<Formula, Error> {
        let lhs = self.disj()?;
        if self.eat(&Tok::Arrow) {
            let rhs = self.form()?;
            return Ok(Formula::imp(lhs, rhs));
        }
        Ok(lhs)
    }

    fn disj(&mut self) -> Result<Formula, Error> {
        let mut acc = self.conj()?;
        while self.eat(&Tok::Or) {
            acc = Formula::or(acc, self.conj()?);
        }
        Ok(acc)
    }

    fn conj(&mut self) -> Result<Formula, Error> {
        let mut acc = self.diff()?;
        while self.eat(&Tok::And) {
            acc = Formula::and(acc, self.diff()?);
        }
        Ok(acc)
    }

    fn diff(&mut self) -> Result<Formula, Error> {
        let mut acc = self.unary()?;
        while self.eat(&Tok::Minus) {
            acc = Formula::minus(acc, self.unary()?);
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<Formula, Error> {
        let start = self.offset();
        match self.peek().cloned() {
            Some(Tok::Tilde) => {
                self.pos += 1;
                Ok(Formula::neg(self.unary()?))
            }
            Some(Tok::Black(kind, name)) => {
                self.pos += 1;
                let arg = Box::new(self.unary()?);
                let name = Sym::from(name.as_str());
                Ok(match kind {
                    BlackKind::Box => Formula::BlackBox(name, arg),
                    BlackKind::Dia => Formula::BlackDia(name, arg),
                    BlackKind::Left => Formula::BlackLeft(name, arg),
                    BlackKind::Right => Formula::BlackRight(name, arg),
                })
            }
            Some(Tok::Ident(name)) if !is_keyword(&name) => {
                let Some(decl) = self.sig.get(&name) else {
                    return self.atom();
                };
                self.pos += 1;
                if self.peek() == Some(&Tok::LParen) && decl.arity != 1 {
                    self.pos += 1;
                    let mut args = Vec::new();
                    if !self.eat(&Tok::RParen) {
                        loop {
                            args.push(self.form()?);
                            if self.eat(&Tok::RParen) {
                                break;
                            }
                            self.expect(&Tok::Comma, "`,` or `)`")?;
                        }
                    }
                    if args.len() != decl.arity {
                        return Err(Error::Arity {
                            name: name.clone(),
                            expected: decl.arity,
                            found: args.len(),
                        });
                    }
                    return Ok(Formula::conn(&name, args));
                }
                if decl.arity != 1 {
                    return Err(Error::Parse {
                        pos: start,
                        msg: format!("connective `{}` of arity {} needs an argument list", name, decl.arity),
                    });
                }
                Ok(Formula::conn(&name, vec![self.unary()?]))
            }
            _ => self.atom(),
        }
    }

    fn atom(&mut self) -> Result<Formula, Error> {
        let start = self.offset();
        match self.peek().cloned() {
            Some(Tok::Ident(name)) => {
                self.pos += 1;
                match name.as_str() {
                    "top" => Ok(Formula::Top),
                    "bot" => Ok(Formula::Bot),
                    _ => {
                        if self.peek() == Some(&Tok::LParen) {
                            return Err(Error::UnknownConnective(name));
                        }
                        Ok(Formula::Var(Sym::from(name.as_str())))
                    }
                }
            }
            Some(Tok::Nominal(n)) => {
                self.pos += 1;
                Ok(Formula::Nominal(Sym::from(n.as_str())))
            }
            Some(Tok::Conominal(n)) => {
                self.pos += 1;
                Ok(Formula::Conominal(Sym::from(n.as_str())))
            }
            Some(Tok::LParen) => {
                self.pos += 1;
                let f = self.form()?;
                self.expect(&Tok::RParen, "`)`")?;
                Ok(f)
            }
            Some(_) => Err(Error::Parse {
                pos: start,
                msg: "expected a formula".into(),
            }),
            None => Err(Error::Parse {
                pos: start,
                msg: "unexpected end of input".into(),
            }),
        }
    }

    fn ineq(&mut self) -> Result<Inequality, Error> {
        let lhs = self.form()?;
        self.expect(&Tok::Leq, "`<=`")?;
        let rhs = self.form()?;
        Ok(Inequality::new(lhs, rhs))
    }

    fn top(&mut self) -> Result<Parsed, Error> {
        let first = self.form()?;
        if !self.eat(&Tok::Leq) {
            return Ok(Parsed::Formula(first));
        }
        let rhs = self.form()?;
        let mut ineqs = vec![Inequality::new(first, rhs)];
        let mut quasi = false;
        loop {
            if self.eat(&Tok::Amp) {
                ineqs.push(self.ineq()?);
            } else if self.eat(&Tok::Implies) {
                let consequent = self.ineq()?;
                quasi = true;
                ineqs.push(consequent);
                break;
            } else {
                break;
            }
        }
        if quasi {
            let consequent = ineqs.pop().expect("consequent");
            Ok(Parsed::Quasi(QuasiInequality::new(ineqs, consequent)))
        } else if ineqs.len() == 1 {
            Ok(Parsed::Inequality(ineqs.pop().expect("inequality")))
        } else {
            Err(self.error("expected `=>` after conjunction of inequalities"))
        }
    }
}

/// Parse a formula, an inequality `a <= b`, or a quasi-inequality
/// `a <= b & c <= d => e <= f`.
pub fn parse(text: &str, sig: &Signature, expanded: bool) -> Result<Parsed, Error> {
    let toks = lex(text)?;
    let mut p = Parser {
        toks,
        pos: 0,
        end: text.len(),
        sig,
    };
    let out = p.top()?;
    if p.pos != p.toks.len() {
        return Err(p.error("unexpected trailing input"));
    }
    match &out {
        Parsed::Formula(f) => f.check(sig, expanded)?,
        Parsed::Inequality(i) => i.check(sig, expanded)?,
        Parsed::Quasi(q) => q.check(sig, expanded)?,
    }
    Ok(out)
}

pub fn parse_formula(text: &str, sig: &Signature, expanded: bool) -> Result<Formula, Error> {
    match parse(text, sig, expanded)? {
        Parsed::Formula(f) => Ok(f),
        _ => Err(Error::Parse {
            pos: 0,
            msg: "expected a formula, found an inequality".into(),
        }),
    }
}

pub fn parse_inequality(text: &str, sig: &Signature, expanded: bool) -> Result<Inequality, Error> {
    match parse(text, sig, expanded)? {
        Parsed::Inequality(i) => Ok(i),
        Parsed::Formula(_) => Err(Error::Parse {
            pos: text.len(),
            msg: "expected `<=`".into(),
        }),
        Parsed::Quasi(_) => Err(Error::Parse {
            pos: 0,
            msg: "expected an inequality, found a quasi-inequality".into(),
        }),
    }
}

pub fn parse_quasi(text: &str, sig: &Signature) -> Result<QuasiInequality, Error> {
    match parse(text, sig, true)? {
        Parsed::Quasi(q) => Ok(q),
        Parsed::Inequality(i) => Ok(QuasiInequality::new(vec![], i)),
        Parsed::Formula(_) => Err(Error::Parse {
            pos: text.len(),
            msg: "expected `<=`".into(),
        }),
    }
}
