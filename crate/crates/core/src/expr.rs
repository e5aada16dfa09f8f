//! Expression language for surface maps, normals and metric components.
//!
//! Grammar (whitespace insensitive):
//!
//! ```text
//! expr  := term (('+' | '-') term)*
//! term  := unary (('*' | '/') unary)*
//! unary := ('-' | '+') unary | power
//! power := atom ('^' unary)?          right associative
//! atom  := number | name | name '(' expr ')' | '(' expr ')'
//! ```
//!
//! Exponents must be constant (no variables) and evaluate to an integer once
//! parameters are bound. Functions: sin cos tan exp log sqrt. Constants: pi e.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::jet::{Axis, Jet2, Scalar};

/// Parameter bindings, ordered for deterministic output.
pub type Bindings = BTreeMap<String, f64>;

/// Default cap on the order accepted by [`evaluate_jet`].
pub const DEFAULT_MAX_ORDER: usize = 6;

pub const SURFACE_VARS: &[&str] = &["u", "v"];
pub const AMBIENT_VARS: &[&str] = &["x1", "x2", "x3"];

const NON_SMOOTH: &[&str] = &[
    "abs", "sign", "sgn", "floor", "ceil", "round", "trunc", "frac", "min", "max", "heaviside",
    "step", "mod",
];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Func {
    Sin,
    Cos,
    Tan,
    Exp,
    Log,
    Sqrt,
}

impl Func {
    fn from_name(name: &str) -> Option<Func> {
        Some(match name {
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "tan" => Func::Tan,
            "exp" => Func::Exp,
            "log" | "ln" => Func::Log,
            "sqrt" => Func::Sqrt,
            _ => return None,
        })
    }

    pub fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Tan => "tan",
            Func::Exp => "exp",
            Func::Log => "log",
            Func::Sqrt => "sqrt",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
}

/// Expression tree. Variables are positional (`u, v` or `x1, x2, x3`).
#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Num(f64),
    Var(usize),
    Param(String),
    Neg(Box<Expr>),
    Bin(BinOp, Box<Expr>, Box<Expr>),
    /// Power with a constant exponent expression, resolved at binding time.
    Pow(Box<Expr>, Box<Expr>),
    /// Integer power after binding.
    PowI(Box<Expr>, i32),
    Call(Func, Box<Expr>),
}

#[derive(Clone, Debug, PartialEq, Error)]
pub enum ParseErrorKind {
    #[error("unexpected character '{0}'")]
    UnexpectedChar(char),
    #[error("unexpected {0}")]
    UnexpectedToken(String),
    #[error("unexpected end of expression")]
    UnexpectedEnd,
    #[error("unknown identifier '{0}'")]
    UnknownIdentifier(String),
    #[error("unknown function '{0}'")]
    UnknownFunction(String),
    #[error("non-smooth function '{0}' is not admitted")]
    NonSmooth(String),
    #[error("exponent must not depend on variables")]
    VariableExponent,
    #[error("malformed number '{0}'")]
    BadNumber(String),
    #[error("{0}")]
    Document(String),
}

/// Parse failure with a 1-based line/column position.
#[derive(Clone, Debug, PartialEq, Error)]
#[error("{kind} at line {line}, column {column}")]
pub struct ParseError {
    pub kind: ParseErrorKind,
    pub offset: usize,
    pub line: usize,
    pub column: usize,
}

impl ParseError {
    pub fn at(kind: ParseErrorKind, text: &str, offset: usize) -> Self {
        let (line, column) = line_col(text, offset);
        Self { kind, offset, line, column }
    }
}

/// 1-based line and column (in characters) of a byte offset.
pub fn line_col(text: &str, offset: usize) -> (usize, usize) {
    let offset = offset.min(text.len());
    let before = &text[..offset];
    let line = before.matches('\n').count() + 1;
    let start = before.rfind('\n').map(|i| i + 1).unwrap_or(0);
    (line, before[start..].chars().count() + 1)
}

#[derive(Clone, Debug, PartialEq, Error)]
pub enum EvalError {
    #[error("domain error: {func} of {arg}")]
    Domain { func: &'static str, arg: f64 },
    #[error("parameter '{0}' is not bound")]
    UnboundParameter(String),
    #[error("exponent {0} is not an integer")]
    NonIntegerExponent(f64),
    #[error("jet order {requested} exceeds the configured maximum {max}")]
    OrderTooHigh { requested: usize, max: usize },
    #[error("expression expects {expected} variables, got {got}")]
    Arity { expected: usize, got: usize },
}

/// Names an expression may refer to.
#[derive(Clone, Debug)]
pub struct Vocabulary<'a> {
    pub vars: &'a [&'a str],
    pub params: BTreeSet<String>,
}

impl<'a> Vocabulary<'a> {
    pub fn new(vars: &'a [&'a str], params: impl IntoIterator<Item = String>) -> Self {
        Self { vars, params: params.into_iter().collect() }
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Op(char),
    LParen,
    RParen,
    End,
}

fn describe(t: &Tok) -> String {
    match t {
        Tok::Num(x) => format!("number {x}"),
        Tok::Ident(s) => format!("identifier '{s}'"),
        Tok::Op(c) => format!("'{c}'"),
        Tok::LParen => "'('".into(),
        Tok::RParen => "')'".into(),
        Tok::End => "end of expression".into(),
    }
}

fn lex(text: &str) -> Result<Vec<(Tok, usize)>, ParseError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = text[i..].chars().next().unwrap();
        if c.is_whitespace() {
            i += c.len_utf8();
            continue;
        }
        let start = i;
        if c.is_ascii_digit() || (c == '.' && bytes.get(i + 1).is_some_and(|b| b.is_ascii_digit())) {
            while i < bytes.len() && (bytes[i].is_ascii_digit() || bytes[i] == b'.') {
                i += 1;
            }
            // exponent only when digits follow, so "2e" stays 2 followed by e
            if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
                let mut j = i + 1;
                if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
                    j += 1;
                }
                if j < bytes.len() && bytes[j].is_ascii_digit() {
                    while j < bytes.len() && bytes[j].is_ascii_digit() {
                        j += 1;
                    }
                    i = j;
                }
            }
            let lit = &text[start..i];
            let x: f64 = lit.parse().map_err(|_| {
                ParseError::at(ParseErrorKind::BadNumber(lit.to_string()), text, start)
            })?;
            out.push((Tok::Num(x), start));
        } else if c.is_ascii_alphabetic() || c == '_' {
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            out.push((Tok::Ident(text[start..i].to_string()), start));
        } else {
            let tok = match c {
                '+' | '-' | '*' | '/' | '^' => Tok::Op(c),
                '(' => Tok::LParen,
                ')' => Tok::RParen,
                _ => return Err(ParseError::at(ParseErrorKind::UnexpectedChar(c), text, start)),
            };
            out.push((tok, start));
            i += c.len_utf8();
        }
    }
    out.push((Tok::End, text.len()));
    Ok(out)
}

struct Parser<'t, 'v> {
    text: &'t str,
    toks: Vec<(Tok, usize)>,
    pos: usize,
    vocab: &'v Vocabulary<'v>,
}

impl Parser<'_, '_> {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn offset(&self) -> usize {
        self.toks[self.pos].1
    }

    fn bump(&mut self) -> (Tok, usize) {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn err(&self, kind: ParseErrorKind, offset: usize) -> ParseError {
        ParseError::at(kind, self.text, offset)
    }

    fn unexpected(&self) -> ParseError {
        let kind = match self.peek() {
            Tok::End => ParseErrorKind::UnexpectedEnd,
            t => ParseErrorKind::UnexpectedToken(describe(t)),
        };
        self.err(kind, self.offset())
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.term()?;
        while let Tok::Op(c @ ('+' | '-')) = *self.peek() {
            self.bump();
            let rhs = self.term()?;
            let op = if c == '+' { BinOp::Add } else { BinOp::Sub };
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.unary()?;
        while let Tok::Op(c @ ('*' | '/')) = *self.peek() {
            self.bump();
            let rhs = self.unary()?;
            let op = if c == '*' { BinOp::Mul } else { BinOp::Div };
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        match *self.peek() {
            Tok::Op('-') => {
                self.bump();
                Ok(Expr::Neg(Box::new(self.unary()?)))
            }
            Tok::Op('+') => {
                self.bump();
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<Expr, ParseError> {
        let base = self.atom()?;
        if *self.peek() == Tok::Op('^') {
            self.bump();
            let at = self.offset();
            let exp = self.unary()?;
            if exp.mentions_variables() {
                return Err(self.err(ParseErrorKind::VariableExponent, at));
            }
            return Ok(Expr::Pow(Box::new(base), Box::new(exp)));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr, ParseError> {
        let (tok, at) = self.bump();
        match tok {
            Tok::Num(x) => Ok(Expr::Num(x)),
            Tok::LParen => {
                let e = self.expr()?;
                if *self.peek() != Tok::RParen {
                    return Err(self.unexpected());
                }
                self.bump();
                Ok(e)
            }
            Tok::Ident(name) => {
                if *self.peek() == Tok::LParen {
                    let func = match Func::from_name(&name) {
                        Some(f) => f,
                        None if NON_SMOOTH.contains(&name.as_str()) => {
                            return Err(self.err(ParseErrorKind::NonSmooth(name), at));
                        }
                        None => return Err(self.err(ParseErrorKind::UnknownFunction(name), at)),
                    };
                    self.bump();
                    let arg = self.expr()?;
                    if *self.peek() != Tok::RParen {
                        return Err(self.unexpected());
                    }
                    self.bump();
                    return Ok(Expr::Call(func, Box::new(arg)));
                }
                if let Some(k) = self.vocab.vars.iter().position(|v| *v == name) {
                    return Ok(Expr::Var(k));
                }
                if self.vocab.params.contains(&name) {
                    return Ok(Expr::Param(name));
                }
                match name.as_str() {
                    "pi" => Ok(Expr::Num(std::f64::consts::PI)),
                    "e" => Ok(Expr::Num(std::f64::consts::E)),
                    _ if NON_SMOOTH.contains(&name.as_str()) => {
                        Err(self.err(ParseErrorKind::NonSmooth(name), at))
                    }
                    _ => Err(self.err(ParseErrorKind::UnknownIdentifier(name), at)),
                }
            }
            Tok::End => Err(self.err(ParseErrorKind::UnexpectedEnd, at)),
            t => Err(self.err(ParseErrorKind::UnexpectedToken(describe(&t)), at)),
        }
    }
}

/// Names reserved for built-in constants; parameters may not shadow them.
pub fn is_reserved(name: &str) -> bool {
    matches!(name, "pi" | "e")
        || Func::from_name(name).is_some()
        || NON_SMOOTH.contains(&name)
        || SURFACE_VARS.contains(&name)
        || AMBIENT_VARS.contains(&name)
}

impl Expr {
    /// Parse `text` against the given vocabulary.
    pub fn parse(text: &str, vocab: &Vocabulary<'_>) -> Result<Expr, ParseError> {
        let toks = lex(text)?;
        let mut p = Parser { text, toks, pos: 0, vocab };
        let e = p.expr()?;
        if *p.peek() != Tok::End {
            return Err(p.unexpected());
        }
        Ok(e)
    }

    /// Parse an expression in `u, v` with no parameters.
    pub fn parse_surface(text: &str) -> Result<Expr, ParseError> {
        Expr::parse(text, &Vocabulary::new(SURFACE_VARS, []))
    }

    fn mentions_variables(&self) -> bool {
        match self {
            Expr::Var(_) => true,
            Expr::Num(_) | Expr::Param(_) => false,
            Expr::Neg(a) | Expr::Call(_, a) | Expr::PowI(a, _) => a.mentions_variables(),
            Expr::Bin(_, a, b) | Expr::Pow(a, b) => a.mentions_variables() || b.mentions_variables(),
        }
    }

    /// Parameters referenced anywhere in the tree.
    pub fn parameters(&self, out: &mut BTreeSet<String>) {
        match self {
            Expr::Param(p) => {
                out.insert(p.clone());
            }
            Expr::Num(_) | Expr::Var(_) => {}
            Expr::Neg(a) | Expr::Call(_, a) | Expr::PowI(a, _) => a.parameters(out),
            Expr::Bin(_, a, b) | Expr::Pow(a, b) => {
                a.parameters(out);
                b.parameters(out);
            }
        }
    }

    /// Replace parameters by their values and resolve exponents to integers.
    pub fn bind(&self, params: &Bindings) -> Result<Expr, EvalError> {
        Ok(match self {
            Expr::Num(x) => Expr::Num(*x),
            Expr::Var(k) => Expr::Var(*k),
            Expr::Param(p) => Expr::Num(
                *params.get(p).ok_or_else(|| EvalError::UnboundParameter(p.clone()))?,
            ),
            Expr::Neg(a) => Expr::Neg(Box::new(a.bind(params)?)),
            Expr::Call(f, a) => Expr::Call(*f, Box::new(a.bind(params)?)),
            Expr::PowI(a, n) => Expr::PowI(Box::new(a.bind(params)?), *n),
            Expr::Bin(op, a, b) => Expr::Bin(*op, Box::new(a.bind(params)?), Box::new(b.bind(params)?)),
            Expr::Pow(a, b) => {
                let x: f64 = b.bind(params)?.eval(&[0.0], &Bindings::new())?;
                let n = x.round();
                if (x - n).abs() > 1e-12 || n.abs() > i32::MAX as f64 {
                    return Err(EvalError::NonIntegerExponent(x));
                }
                Expr::PowI(Box::new(a.bind(params)?), n as i32)
            }
        })
    }

    /// Replace each variable `k` by `subs[k]`.
    pub fn substitute(&self, subs: &[Expr]) -> Expr {
        match self {
            Expr::Var(k) => subs[*k].clone(),
            Expr::Num(_) | Expr::Param(_) => self.clone(),
            Expr::Neg(a) => Expr::Neg(Box::new(a.substitute(subs))),
            Expr::Call(f, a) => Expr::Call(*f, Box::new(a.substitute(subs))),
            Expr::PowI(a, n) => Expr::PowI(Box::new(a.substitute(subs)), *n),
            Expr::Bin(op, a, b) => Expr::Bin(*op, Box::new(a.substitute(subs)), Box::new(b.substitute(subs))),
            Expr::Pow(a, b) => Expr::Pow(Box::new(a.substitute(subs)), b.clone()),
        }
    }

    /// Evaluate over any scalar type. `vars` supplies the variables and the
    /// shape for constants, so it must be non-empty.
    pub fn eval<T: Scalar>(&self, vars: &[T], params: &Bindings) -> Result<T, EvalError> {
        let proto = &vars[0];
        Ok(match self {
            Expr::Num(x) => proto.lift(*x),
            Expr::Var(k) => vars
                .get(*k)
                .cloned()
                .ok_or(EvalError::Arity { expected: *k + 1, got: vars.len() })?,
            Expr::Param(p) => {
                proto.lift(*params.get(p).ok_or_else(|| EvalError::UnboundParameter(p.clone()))?)
            }
            Expr::Neg(a) => -a.eval(vars, params)?,
            Expr::Bin(op, a, b) => {
                let x = a.eval(vars, params)?;
                let y = b.eval(vars, params)?;
                match op {
                    BinOp::Add => x + y,
                    BinOp::Sub => x - y,
                    BinOp::Mul => x * y,
                    BinOp::Div => {
                        if y.value() == 0.0 {
                            return Err(EvalError::Domain { func: "division", arg: 0.0 });
                        }
                        x / y
                    }
                }
            }
            Expr::Pow(a, b) => {
                let x: f64 = b.eval(&[0.0], params)?;
                let n = x.round();
                if (x - n).abs() > 1e-12 {
                    return Err(EvalError::NonIntegerExponent(x));
                }
                pow_checked(a.eval(vars, params)?, n as i32)?
            }
            Expr::PowI(a, n) => pow_checked(a.eval(vars, params)?, *n)?,
            Expr::Call(f, a) => {
                let x = a.eval(vars, params)?;
                let arg = x.value();
                match f {
                    Func::Sin => x.sin(),
                    Func::Cos => x.cos(),
                    Func::Exp => x.exp(),
                    Func::Tan => {
                        if arg.cos() == 0.0 {
                            return Err(EvalError::Domain { func: "tan", arg });
                        }
                        x.tan()
                    }
                    Func::Log => {
                        if arg <= 0.0 || !arg.is_finite() {
                            return Err(EvalError::Domain { func: "log", arg });
                        }
                        x.ln()
                    }
                    Func::Sqrt => {
                        let bad = if x.carries_derivatives() { arg <= 0.0 } else { arg < 0.0 };
                        if bad || !arg.is_finite() {
                            return Err(EvalError::Domain { func: "sqrt", arg });
                        }
                        x.sqrt()
                    }
                }
            }
        })
    }
}

fn pow_checked<T: Scalar>(x: T, n: i32) -> Result<T, EvalError> {
    if n < 0 && x.value() == 0.0 {
        return Err(EvalError::Domain { func: "negative power", arg: 0.0 });
    }
    Ok(x.powi(n))
}

/// Taylor jet of a surface expression at `base`, capped at `max_order`.
pub fn evaluate_jet(
    e: &Expr,
    base: [f64; 2],
    order: usize,
    params: &Bindings,
    max_order: usize,
) -> Result<Jet2, EvalError> {
    if order > max_order {
        return Err(EvalError::OrderTooHigh { requested: order, max: max_order });
    }
    let u = Jet2::variable(base, order, Axis::U);
    let v = Jet2::variable(base, order, Axis::V);
    e.eval(&[u, v], params)
}

fn prec(e: &Expr) -> u8 {
    match e {
        Expr::Bin(BinOp::Add | BinOp::Sub, ..) => 1,
        Expr::Bin(BinOp::Mul | BinOp::Div, ..) => 2,
        Expr::Neg(_) => 3,
        Expr::Pow(..) | Expr::PowI(..) => 4,
        Expr::Num(x) if *x < 0.0 => 3,
        _ => 5,
    }
}

struct Named<'a> {
    e: &'a Expr,
    vars: &'a [&'a str],
}

impl fmt::Display for Named<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let vars = self.vars;
        let sub = |e: &Expr, min: u8, f: &mut fmt::Formatter<'_>| -> fmt::Result {
            let inner = Named { e, vars };
            if prec(e) < min {
                write!(f, "({inner})")
            } else {
                write!(f, "{inner}")
            }
        };
        match self.e {
            Expr::Num(x) => write!(f, "{x:?}"),
            Expr::Var(k) => write!(f, "{}", self.vars.get(*k).copied().unwrap_or("?")),
            Expr::Param(p) => write!(f, "{p}"),
            Expr::Neg(a) => {
                write!(f, "-")?;
                sub(a, 4, f)
            }
            Expr::Bin(op, a, b) => {
                let (sym, p) = match op {
                    BinOp::Add => ("+", 1),
                    BinOp::Sub => ("-", 1),
                    BinOp::Mul => ("*", 2),
                    BinOp::Div => ("/", 2),
                };
                sub(a, p, f)?;
                write!(f, " {sym} ")?;
                sub(b, p + 1, f)
            }
            Expr::Pow(a, b) => {
                sub(a, 5, f)?;
                write!(f, "^")?;
                sub(b, 5, f)
            }
            Expr::PowI(a, n) => {
                sub(a, 5, f)?;
                if *n < 0 {
                    write!(f, "^({n})")
                } else {
                    write!(f, "^{n}")
                }
            }
            Expr::Call(func, a) => {
                write!(f, "{}(", func.name())?;
                write!(f, "{}", Named { e: a, vars: self.vars })?;
                write!(f, ")")
            }
        }
    }
}

impl Expr {
    /// Render with the given variable names; the output parses back to an
    /// equivalent tree.
    pub fn render(&self, vars: &[&str]) -> String {
        Named { e: self, vars }.to_string()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn vocab(params: &[&str]) -> Vocabulary<'static> {
        Vocabulary::new(SURFACE_VARS, params.iter().map(|s| s.to_string()))
    }

    fn ev(text: &str, u: f64, v: f64) -> f64 {
        Expr::parse_surface(text).unwrap().eval(&[u, v], &Bindings::new()).unwrap()
    }

    #[test]
    fn precedence_and_associativity() {
        assert_relative_eq!(ev("1 + 2*3", 0.0, 0.0), 7.0);
        assert_relative_eq!(ev("2^3^2", 0.0, 0.0), 512.0);
        assert_relative_eq!(ev("-2^2", 0.0, 0.0), -4.0);
        assert_relative_eq!(ev("2^-1", 0.0, 0.0), 0.5);
        assert_relative_eq!(ev("8/2/2", 0.0, 0.0), 2.0);
        assert_relative_eq!(ev("u - v - 1", 3.0, 1.0), 1.0);
        assert_relative_eq!(ev("2*pi", 0.0, 0.0), 2.0 * std::f64::consts::PI);
        assert_relative_eq!(ev("1.5e2 + .5", 0.0, 0.0), 150.5);
        assert_relative_eq!(ev("2*e", 0.0, 0.0), 2.0 * std::f64::consts::E);
    }

    #[test]
    fn cone_map_parses() {
        let v = vocab(&[]);
        for text in ["v*cos(u)", "v*sin(u)", "v^2+v"] {
            assert!(Expr::parse(text, &v).is_ok(), "{text}");
        }
        assert_relative_eq!(ev("v*cos(u)", 0.0, 2.0), 2.0);
    }

    #[test]
    fn rejects_non_smooth_and_unknown() {
        let err = Expr::parse_surface("abs(u)").unwrap_err();
        assert_eq!(err.kind, ParseErrorKind::NonSmooth("abs".into()));
        assert_eq!((err.line, err.column), (1, 1));
        let err = Expr::parse_surface("u + w").unwrap_err();
        assert_eq!(err.kind, ParseErrorKind::UnknownIdentifier("w".into()));
        assert_eq!(err.column, 5);
        assert!(matches!(
            Expr::parse_surface("foo(u)").unwrap_err().kind,
            ParseErrorKind::UnknownFunction(_)
        ));
        assert!(matches!(Expr::parse_surface("u^v").unwrap_err().kind, ParseErrorKind::VariableExponent));
        assert!(matches!(Expr::parse_surface("(u").unwrap_err().kind, ParseErrorKind::UnexpectedEnd));
        assert!(matches!(Expr::parse_surface("u $ v").unwrap_err().kind, ParseErrorKind::UnexpectedChar('$')));
        assert!(matches!(Expr::parse_surface("u v").unwrap_err().kind, ParseErrorKind::UnexpectedToken(_)));
    }

    #[test]
    fn parameters_are_late_bound() {
        let e = Expr::parse("a*u^k", &vocab(&["a", "k"])).unwrap();
        let mut p = Bindings::new();
        assert!(matches!(e.eval(&[2.0, 0.0], &p), Err(EvalError::UnboundParameter(_))));
        p.insert("a".into(), 3.0);
        p.insert("k".into(), 3.0);
        assert_relative_eq!(e.eval(&[2.0, 0.0], &p).unwrap(), 24.0);
        let bound = e.bind(&p).unwrap();
        assert_relative_eq!(bound.eval(&[2.0, 0.0], &Bindings::new()).unwrap(), 24.0);
        p.insert("k".into(), 2.5);
        assert!(matches!(e.bind(&p), Err(EvalError::NonIntegerExponent(_))));
    }

    #[test]
    fn domain_errors_on_jets() {
        let e = Expr::parse_surface("sqrt(u)").unwrap();
        assert!(matches!(
            evaluate_jet(&e, [0.0, 0.0], 2, &Bindings::new(), DEFAULT_MAX_ORDER),
            Err(EvalError::Domain { func: "sqrt", .. })
        ));
        assert_relative_eq!(e.eval(&[0.0, 0.0], &Bindings::new()).unwrap(), 0.0);
        let e = Expr::parse_surface("log(u - 1)").unwrap();
        assert!(evaluate_jet(&e, [0.5, 0.0], 2, &Bindings::new(), 6).is_err());
        let e = Expr::parse_surface("1/u").unwrap();
        assert!(evaluate_jet(&e, [0.0, 0.0], 2, &Bindings::new(), 6).is_err());
    }

    #[test]
    fn order_cap() {
        let e = Expr::parse_surface("u").unwrap();
        assert!(matches!(
            evaluate_jet(&e, [0.0, 0.0], 7, &Bindings::new(), DEFAULT_MAX_ORDER),
            Err(EvalError::OrderTooHigh { requested: 7, max: 6 })
        ));
    }

    #[test]
    fn jet_evaluation_examples() {
        let p = Bindings::new();
        let j = evaluate_jet(&Expr::parse_surface("v^3").unwrap(), [0.0, 0.0], 4, &p, 6).unwrap();
        assert_eq!(j.coeff(0, 3), 1.0);
        assert_eq!(j.coeffs().iter().filter(|c| **c != 0.0).count(), 1);
        let j = evaluate_jet(&Expr::parse_surface("sqrt(1+u)").unwrap(), [0.0, 0.0], 2, &p, 6).unwrap();
        assert_relative_eq!(j.coeff(0, 0), 1.0);
        assert_relative_eq!(j.coeff(1, 0), 0.5);
        assert_relative_eq!(j.coeff(2, 0), -0.125);
    }

    #[test]
    fn render_round_trips() {
        let vocab = vocab(&["a"]);
        for text in ["-(u - v)^2 / (1 + a*u)", "u - (v - 1)", "2^(-1)*sin(u*v)^3", "-u^2", "(-u)^2"] {
            let e = Expr::parse(text, &vocab).unwrap();
            let again = Expr::parse(&e.render(SURFACE_VARS), &vocab).unwrap();
            assert_eq!(e, again, "{text} -> {}", e.render(SURFACE_VARS));
        }
        let bound = Expr::parse("a*u", &vocab).unwrap().bind(&[("a".to_string(), -1.5)].into()).unwrap();
        assert_relative_eq!(
            Expr::parse_surface(&bound.render(SURFACE_VARS)).unwrap().eval(&[2.0, 0.0], &Bindings::new()).unwrap(),
            -3.0
        );
    }

    #[test]
    fn substitution_composes_maps() {
        let e = Expr::parse_surface("u*v^2").unwrap();
        let s = e.substitute(&[Expr::parse_surface("u + v").unwrap(), Expr::parse_surface("2*u").unwrap()]);
        assert_relative_eq!(s.eval(&[1.0, 2.0], &Bindings::new()).unwrap(), 3.0 * 4.0);
    }

    #[test]
    fn error_positions_span_lines() {
        assert_eq!(line_col("ab\ncd", 4), (2, 2));
        assert_eq!(line_col("ab", 0), (1, 1));
    }
}
