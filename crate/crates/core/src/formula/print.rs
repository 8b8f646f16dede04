use std::fmt::{self, Write};

use super::{Atom, Formula, LinearTerm};

impl fmt::Display for LinearTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = self
            .coeffs()
            .iter()
            .map(|(v, c)| {
                if c.is_one() {
                    v.to_string()
                } else {
                    format!("(* {c} {v})")
                }
            })
            .collect();
        if !self.constant_part().is_zero() {
            parts.push(self.constant_part().to_string());
        }
        match parts.len() {
            0 => f.write_str("0"),
            1 => f.write_str(&parts[0]),
            _ => write!(f, "(+ {})", parts.join(" ")),
        }
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({} {} 0)", self.rel().symbol(), self.term())
    }
}

fn write_vars(out: &mut String, vars: &[super::Var]) {
    out.push('(');
    for (i, v) in vars.iter().enumerate() {
        if i > 0 {
            out.push(' ');
        }
        out.push_str(v.name());
    }
    out.push(')');
}

fn write_formula(out: &mut String, f: &Formula) {
    match f {
        Formula::True => out.push_str("true"),
        Formula::False => out.push_str("false"),
        Formula::Atom(a) => {
            let _ = write!(out, "{a}");
        }
        Formula::Not(g) => {
            out.push_str("(not ");
            write_formula(out, g);
            out.push(')');
        }
        Formula::And(cs) | Formula::Or(cs) => {
            out.push_str(if matches!(f, Formula::And(_)) { "(and" } else { "(or" });
            for c in cs {
                out.push(' ');
                write_formula(out, c);
            }
            out.push(')');
        }
        Formula::Exists(vs, g) | Formula::Forall(vs, g) => {
            out.push_str(if matches!(f, Formula::Exists(..)) {
                "(exists "
            } else {
                "(forall "
            });
            write_vars(out, vs);
            out.push(' ');
            write_formula(out, g);
            out.push(')');
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut out = String::new();
        write_formula(&mut out, self);
        f.write_str(&out)
    }
}

impl fmt::Debug for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::{Rational, Var};

    #[test]
    fn layout() {
        let y = Var::new("y");
        let a = Atom::ge(LinearTerm::from_parts(
            Rational::from_integer((-3).into()),
            [(y, Rational::one())],
        ));
        assert_eq!(a.to_string(), "(>= (+ y -3) 0)");
        assert_eq!(Formula::True.to_string(), "true");
        let x = Var::new("x");
        let ex = Formula::exists(vec![x.clone()], Formula::atom(Atom::ge(LinearTerm::var(x))));
        assert_eq!(ex.to_string(), "(exists (x) (>= x 0))");
    }

    #[test]
    fn fractional_coefficients() {
        let t = LinearTerm::from_parts(
            Rational::new(1.into(), 2.into()),
            [(Var::new("x"), Rational::new((-3).into(), 4.into()))],
        );
        assert_eq!(t.to_string(), "(+ (* -3/4 x) 1/2)");
    }
}
