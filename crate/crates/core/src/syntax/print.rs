use std::fmt;

use super::{Formula, Inequality, QuasiInequality};

const IMP: u8 = 1;
const OR: u8 = 2;
const AND: u8 = 3;
const MINUS: u8 = 4;
const PREFIX: u8 = 5;

fn write_formula(f: &Formula, ctx: u8, out: &mut String) {
    let binary = |op: &str, prec: u8, a: &Formula, b: &Formula, la: u8, lb: u8, out: &mut String| {
        let paren = ctx > prec;
        if paren {
            out.push('(');
        }
        write_formula(a, la, out);
        out.push(' ');
        out.push_str(op);
        out.push(' ');
        write_formula(b, lb, out);
        if paren {
            out.push(')');
        }
    };
    match f {
        Formula::Top => out.push_str("top"),
        Formula::Bot => out.push_str("bot"),
        Formula::Var(p) => out.push_str(p),
        Formula::Nominal(i) => {
            out.push('#');
            out.push_str(i);
        }
        Formula::Conominal(m) => {
            out.push('@');
            out.push_str(m);
        }
        Formula::Imp(a, b) => binary("->", IMP, a, b, OR, IMP, out),
        Formula::Or(a, b) => binary("\\/", OR, a, b, OR, AND, out),
        Formula::And(a, b) => binary("/\\", AND, a, b, AND, MINUS, out),
        Formula::Minus(a, b) => binary("-", MINUS, a, b, MINUS, PREFIX, out),
        Formula::Conn(name, args) if args.len() == 1 => {
            out.push_str(name);
            out.push(' ');
            write_formula(&args[0], PREFIX, out);
        }
        Formula::Conn(name, args) => {
            out.push_str(name);
            out.push('(');
            for (i, a) in args.iter().enumerate() {
                if i > 0 {
                    out.push_str(", ");
                }
                write_formula(a, 0, out);
            }
            out.push(')');
        }
        Formula::BlackBox(n, a) | Formula::BlackDia(n, a) | Formula::BlackLeft(n, a) | Formula::BlackRight(n, a) => {
            let tag = match f {
                Formula::BlackBox(..) => "bbox",
                Formula::BlackDia(..) => "bdia",
                Formula::BlackLeft(..) => "bleft",
                _ => "bright",
            };
            out.push_str(tag);
            out.push('[');
            out.push_str(n);
            out.push_str("] ");
            write_formula(a, PREFIX, out);
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut s = String::new();
        write_formula(self, 0, &mut s);
        f.write_str(&s)
    }
}

impl fmt::Display for Inequality {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} <= {}", self.lhs, self.rhs)
    }
}

impl fmt::Display for QuasiInequality {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, a) in self.antecedent.iter().enumerate() {
            if i > 0 {
                f.write_str(" & ")?;
            }
            write!(f, "{}", a)?;
        }
        if !self.antecedent.is_empty() {
            f.write_str(" => ")?;
        }
        write!(f, "{}", self.consequent)
    }
}

#[cfg(test)]
mod tests {
    use crate::syntax::{parse, var, Formula, Parsed, Signature};

    #[test]
    fn minimal_parentheses() {
        let f = Formula::and(Formula::or(var("p"), var("q")), var("r"));
        assert_eq!(f.to_string(), "(p \\/ q) /\\ r");
        let g = Formula::imp(Formula::imp(var("p"), var("q")), var("r"));
        assert_eq!(g.to_string(), "(p -> q) -> r");
        let h = Formula::boxed(Formula::and(var("p"), var("q")));
        assert_eq!(h.to_string(), "box (p /\\ q)");
    }

    #[test]
    fn printed_quasi_reparses() {
        let sig = Signature::har();
        let text = "#i0 <= box top & bdia[box] #i0 <= @m0 => #i0 <= @m0";
        let q = parse(text, &sig, true).unwrap();
        let Parsed::Quasi(q) = q else { panic!() };
        assert_eq!(q.to_string(), text);
    }
}
