//! S-expression reader for `.qel` formula files.
//!
//! ```text
//! formula := "true" | "false" | atom
//!          | "(" "and" formula+ ")" | "(" "or" formula+ ")" | "(" "not" formula ")"
//!          | "(" "=>" formula formula ")"
//!          | "(" ("exists"|"forall") "(" var+ ")" formula ")"
//! atom    := "(" (">="|">"|"<="|"<"|"=") term term ")"
//! term    := var | rational | "(" "+" term+ ")" | "(" "-" term term? ")" | "(" "*" rational term ")"
//! ```
//!
//! A file may start with `(declare-vars v ...)`; every free variable must then be declared.
//! `#` starts a comment running to the end of the line.

use std::collections::HashSet;
use std::fmt;

use thiserror::Error;

use super::term::parse_rational;
use super::{Atom, Formula, LinearTerm, Relation, Var};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParseErrorKind {
    Syntax,
    UnboundSymbol,
    Nonlinear,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{line}:{column}: {message}")]
pub struct ParseError {
    pub kind: ParseErrorKind,
    pub line: usize,
    pub column: usize,
    pub message: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Pos {
    line: usize,
    column: usize,
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.column)
    }
}

#[derive(Debug)]
enum Sexp {
    Symbol(String, Pos),
    List(Vec<Sexp>, Pos),
}

impl Sexp {
    fn pos(&self) -> Pos {
        match self {
            Sexp::Symbol(_, p) | Sexp::List(_, p) => *p,
        }
    }
}

const KEYWORDS: &[&str] = &[
    "and",
    "or",
    "not",
    "=>",
    "exists",
    "forall",
    "true",
    "false",
    "declare-vars",
];

fn error(kind: ParseErrorKind, pos: Pos, message: impl Into<String>) -> ParseError {
    ParseError {
        kind,
        line: pos.line,
        column: pos.column,
        message: message.into(),
    }
}

fn syntax(pos: Pos, message: impl Into<String>) -> ParseError {
    error(ParseErrorKind::Syntax, pos, message)
}

fn read_all(text: &str) -> Result<(Vec<Sexp>, Pos), ParseError> {
    let mut stack: Vec<(Vec<Sexp>, Pos)> = vec![(Vec::new(), Pos { line: 1, column: 1 })];
    let mut chars = text.chars().peekable();
    let (mut line, mut column) = (1, 1);
    while let Some(&c) = chars.peek() {
        let pos = Pos { line, column };
        match c {
            '\n' => {
                chars.next();
                line += 1;
                column = 1;
            }
            c if c.is_whitespace() => {
                chars.next();
                column += 1;
            }
            '#' => {
                while chars.peek().is_some_and(|&c| c != '\n') {
                    chars.next();
                }
            }
            '(' => {
                chars.next();
                column += 1;
                stack.push((Vec::new(), pos));
            }
            ')' => {
                chars.next();
                column += 1;
                if stack.len() == 1 {
                    return Err(syntax(pos, "unexpected `)`"));
                }
                let (items, open) = stack.pop().unwrap();
                stack.last_mut().unwrap().0.push(Sexp::List(items, open));
            }
            _ => {
                let mut sym = String::new();
                while let Some(&c) = chars.peek() {
                    if c.is_whitespace() || c == '(' || c == ')' || c == '#' {
                        break;
                    }
                    sym.push(c);
                    chars.next();
                    column += 1;
                }
                stack.last_mut().unwrap().0.push(Sexp::Symbol(sym, pos));
            }
        }
    }
    if stack.len() > 1 {
        let (_, open) = stack.pop().unwrap();
        return Err(syntax(open, "unclosed `(`"));
    }
    Ok((stack.pop().unwrap().0, Pos { line, column }))
}

struct Reader {
    declared: Option<HashSet<Var>>,
    bound: Vec<Var>,
}

impl Reader {
    fn variable(&self, name: &str, pos: Pos) -> Result<Var, ParseError> {
        if KEYWORDS.contains(&name) || !Var::is_valid_name(name) {
            return Err(syntax(pos, format!("`{name}` is not a variable name")));
        }
        let v = Var::new(name);
        if let Some(declared) = &self.declared {
            if !declared.contains(&v) && !self.bound.contains(&v) {
                return Err(error(
                    ParseErrorKind::UnboundSymbol,
                    pos,
                    format!("variable `{name}` is not declared"),
                ));
            }
        }
        Ok(v)
    }

    fn formula(&mut self, s: &Sexp) -> Result<Formula, ParseError> {
        let (items, pos) = match s {
            Sexp::Symbol(sym, pos) => {
                return match sym.as_str() {
                    "true" => Ok(Formula::True),
                    "false" => Ok(Formula::False),
                    _ => Err(syntax(*pos, format!("expected a formula, found `{sym}`"))),
                }
            }
            Sexp::List(items, pos) => (items, *pos),
        };
        let head = match items.first() {
            Some(Sexp::Symbol(h, _)) => h.as_str(),
            _ => return Err(syntax(pos, "expected an operator")),
        };
        let args = &items[1..];
        match head {
            "and" | "or" => {
                if args.is_empty() {
                    return Err(syntax(pos, format!("`{head}` needs at least one operand")));
                }
                let cs = args.iter().map(|a| self.formula(a)).collect::<Result<Vec<_>, _>>()?;
                Ok(if head == "and" {
                    Formula::and(cs)
                } else {
                    Formula::or(cs)
                })
            }
            "not" => {
                let [a] = args else {
                    return Err(syntax(pos, "`not` takes one operand"));
                };
                Ok(Formula::not(self.formula(a)?))
            }
            "=>" => {
                let [a, b] = args else {
                    return Err(syntax(pos, "`=>` takes two operands"));
                };
                Ok(Formula::implies(self.formula(a)?, self.formula(b)?))
            }
            "exists" | "forall" => {
                let [Sexp::List(vs, vpos), body] = args else {
                    return Err(syntax(pos, format!("expected `({head} (vars...) formula)`")));
                };
                if vs.is_empty() {
                    return Err(syntax(*vpos, "quantifier binds no variables"));
                }
                let mut vars = Vec::with_capacity(vs.len());
                for v in vs {
                    match v {
                        Sexp::Symbol(name, p) => {
                            if KEYWORDS.contains(&name.as_str()) || !Var::is_valid_name(name) {
                                return Err(syntax(*p, format!("`{name}` is not a variable name")));
                            }
                            vars.push(Var::new(name));
                        }
                        Sexp::List(_, p) => return Err(syntax(*p, "expected a variable")),
                    }
                }
                let depth = self.bound.len();
                self.bound.extend(vars.iter().cloned());
                let body = self.formula(body);
                self.bound.truncate(depth);
                let body = body?;
                Ok(if head == "exists" {
                    Formula::exists(vars, body)
                } else {
                    Formula::forall(vars, body)
                })
            }
            ">=" | ">" | "<=" | "<" | "=" => {
                let [a, b] = args else {
                    return Err(syntax(pos, format!("`{head}` takes two terms")));
                };
                let (a, b) = (self.term(a)?, self.term(b)?);
                let atom = match head {
                    ">=" => Atom::new(a - b, Relation::Ge),
                    ">" => Atom::new(a - b, Relation::Gt),
                    "<=" => Atom::new(b - a, Relation::Ge),
                    "<" => Atom::new(b - a, Relation::Gt),
                    _ => Atom::new(a - b, Relation::Eq),
                };
                Ok(Formula::atom(atom))
            }
            other => Err(syntax(pos, format!("unknown operator `{other}`"))),
        }
    }

    fn term(&self, s: &Sexp) -> Result<LinearTerm, ParseError> {
        let (items, pos) = match s {
            Sexp::Symbol(sym, pos) => {
                if let Some(r) = parse_rational(sym) {
                    return Ok(LinearTerm::constant(r));
                }
                return Ok(LinearTerm::var(self.variable(sym, *pos)?));
            }
            Sexp::List(items, pos) => (items, *pos),
        };
        let head = match items.first() {
            Some(Sexp::Symbol(h, _)) => h.as_str(),
            _ => return Err(syntax(pos, "expected a term operator")),
        };
        let args = &items[1..];
        match head {
            "+" => {
                if args.is_empty() {
                    return Err(syntax(pos, "`+` needs at least one operand"));
                }
                args.iter()
                    .try_fold(LinearTerm::zero(), |acc, a| Ok(acc + self.term(a)?))
            }
            "-" => match args {
                [a] => Ok(-self.term(a)?),
                [a, b] => Ok(self.term(a)? - self.term(b)?),
                _ => Err(syntax(pos, "`-` takes one or two operands")),
            },
            "*" => {
                let [a, b] = args else {
                    return Err(syntax(pos, "`*` takes two operands"));
                };
                let (a, b) = (self.term(a)?, self.term(b)?);
                if a.is_ground() {
                    Ok(b.scale(a.constant_part()))
                } else if b.is_ground() {
                    Ok(a.scale(b.constant_part()))
                } else {
                    Err(error(ParseErrorKind::Nonlinear, pos, "nonlinear product of variables"))
                }
            }
            other => Err(syntax(pos, format!("unknown term operator `{other}`"))),
        }
    }
}

/// Reads one formula, normalized.
pub fn parse(text: &str) -> Result<Formula, ParseError> {
    let (items, end) = read_all(text)?;
    let mut reader = Reader {
        declared: None,
        bound: Vec::new(),
    };
    let mut rest = &items[..];
    if let Some(Sexp::List(header, _)) = rest.first() {
        if let Some(Sexp::Symbol(h, _)) = header.first() {
            if h == "declare-vars" {
                let mut declared = HashSet::new();
                for v in &header[1..] {
                    match v {
                        Sexp::Symbol(name, p) => {
                            if KEYWORDS.contains(&name.as_str()) || !Var::is_valid_name(name) {
                                return Err(syntax(*p, format!("`{name}` is not a variable name")));
                            }
                            declared.insert(Var::new(name));
                        }
                        Sexp::List(_, p) => return Err(syntax(*p, "expected a variable")),
                    }
                }
                reader.declared = Some(declared);
                rest = &rest[1..];
            }
        }
    }
    match rest {
        [] => Err(syntax(end, "expected a formula")),
        [f] => reader.formula(f),
        [_, extra, ..] => Err(syntax(extra.pos(), "trailing input after formula")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::Rational;

    fn q(n: i64) -> Rational {
        Rational::from_integer(n.into())
    }

    #[test]
    fn intro_example() {
        let f = parse("(forall (x) (=> (>= x y) (>= x 3)))").unwrap();
        let x = Var::new("x");
        let y = Var::new("y");
        let x_ge_y = Atom::ge(LinearTerm::var(x.clone()) - LinearTerm::var(y));
        let x_ge_3 = Atom::ge(LinearTerm::from_parts(q(-3), [(x.clone(), q(1))]));
        let expected = Formula::Forall(
            vec![x],
            Box::new(Formula::Or(vec![
                Formula::Not(Box::new(Formula::Atom(x_ge_y))),
                Formula::Atom(x_ge_3),
            ])),
        );
        assert_eq!(f, expected);
    }

    #[test]
    fn empty_and_is_an_error() {
        let e = parse("(and)").unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::Syntax);
        assert_eq!((e.line, e.column), (1, 1));
    }

    #[test]
    fn direct_atom() {
        let f = parse("(>= (+ (* 2 x) (* -3 y) 1) 0)").unwrap();
        let t = LinearTerm::from_parts(q(1), [(Var::new("x"), q(2)), (Var::new("y"), q(-3))]);
        assert_eq!(f, Formula::Atom(Atom::ge(t)));
    }

    #[test]
    fn nonlinear_rejected() {
        let e = parse("(>= (* x y) 0)").unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::Nonlinear);
    }

    #[test]
    fn comments_and_positions() {
        let e = parse("# header\n  (>= x\n  )").unwrap_err();
        assert_eq!((e.line, e.column), (2, 3));
        assert!(parse("# c\n(> x 1/2) # trailing").is_ok());
    }

    #[test]
    fn declared_variables() {
        assert!(parse("(declare-vars y) (exists (x) (>= x y))").is_ok());
        let e = parse("(declare-vars y) (>= x y)").unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::UnboundSymbol);
        assert_eq!((e.line, e.column), (1, 22));
    }

    #[test]
    fn less_than_negates() {
        assert_eq!(parse("(< x 1)").unwrap(), parse("(> (- 1 x) 0)").unwrap());
        assert_eq!(parse("(<= x 1)").unwrap(), parse("(>= (+ (* -1 x) 1) 0)").unwrap());
    }

    #[test]
    fn malformed() {
        for bad in [
            "",
            "(",
            ")",
            "x",
            "(>= x)",
            "(not)",
            "(exists () true)",
            "(foo x)",
            "true false",
            "(>= 1.5 x)",
            "(>= and 0)",
        ] {
            assert!(parse(bad).is_err(), "{bad:?} should fail");
        }
    }

    #[test]
    fn ground_atoms_fold() {
        assert_eq!(parse("(>= 1 0)").unwrap(), Formula::True);
        assert_eq!(parse("(and (> 0 0) (>= x 0))").unwrap(), Formula::False);
    }
}
