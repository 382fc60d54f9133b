//! Coordinate expression language.
//!
//! Grammar (see `docs/expression-grammar.md`):
//!
//! ```text
//! expr     := term (("+" | "-") term)*
//! term     := unary (("*" | "/") unary)*
//! unary    := "-" unary | power
//! power    := atom ("^" exponent)?
//! exponent := "-" exponent | atom ("^" exponent)?
//! atom     := number | identifier | function "(" expr ")" | "(" expr ")"
//! ```
//!
//! Exponents must not mention coordinates. Identifiers resolve to chart
//! coordinates first, then to the named constants `pi`, `sqrt5`, `phi`,
//! `phibar`.

use alloc::boxed::Box;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::error::{DomainKind, Error, ParseError, Result};
use crate::scalar::Scalar;

pub const SQRT5: f64 = 2.236_067_977_499_79;
/// Golden mean `(1 + √5)/2`.
pub const PHI: f64 = 1.618_033_988_749_895;
/// Conjugate root `1 − φ`.
pub const PHIBAR: f64 = 1.0 - PHI;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Constant {
    Pi,
    Sqrt5,
    Phi,
    PhiBar,
}

impl Constant {
    pub fn value(self) -> f64 {
        match self {
            Constant::Pi => core::f64::consts::PI,
            Constant::Sqrt5 => SQRT5,
            Constant::Phi => PHI,
            Constant::PhiBar => PHIBAR,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Constant::Pi => "pi",
            Constant::Sqrt5 => "sqrt5",
            Constant::Phi => "phi",
            Constant::PhiBar => "phibar",
        }
    }

    fn lookup(name: &str) -> Option<Self> {
        Some(match name {
            "pi" => Constant::Pi,
            "sqrt5" => Constant::Sqrt5,
            "phi" => Constant::Phi,
            "phibar" => Constant::PhiBar,
            _ => return None,
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Func {
    Sin,
    Cos,
    Tan,
    Exp,
    Log,
    Sqrt,
    Abs,
}

impl Func {
    pub fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Tan => "tan",
            Func::Exp => "exp",
            Func::Log => "log",
            Func::Sqrt => "sqrt",
            Func::Abs => "abs",
        }
    }

    fn lookup(name: &str) -> Option<Self> {
        Some(match name {
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "tan" => Func::Tan,
            "exp" => Func::Exp,
            "log" => Func::Log,
            "sqrt" => Func::Sqrt,
            "abs" => Func::Abs,
            _ => return None,
        })
    }
}

/// Expression tree. Variables are indices into the chart's coordinate list.
#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Lit(f64),
    Var(usize),
    Const(Constant),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    /// Base raised to a coordinate-free exponent.
    Pow(Box<Expr>, Box<Expr>),
    Call(Func, Box<Expr>),
}

impl Expr {
    /// Literal that prints and re-parses to the same tree (negative values
    /// become `Neg(Lit)`).
    pub fn lit(x: f64) -> Expr {
        if x.is_sign_negative() && x != 0.0 {
            Expr::Neg(Box::new(Expr::Lit(-x)))
        } else {
            Expr::Lit(if x == 0.0 { 0.0 } else { x })
        }
    }

    pub fn var(i: usize) -> Expr {
        Expr::Var(i)
    }

    pub fn constant(c: Constant) -> Expr {
        Expr::Const(c)
    }

    pub fn call(f: Func, arg: Expr) -> Expr {
        Expr::Call(f, Box::new(arg))
    }

    pub fn pow(base: Expr, exponent: f64) -> Expr {
        Expr::Pow(Box::new(base), Box::new(Expr::lit(exponent)))
    }

    /// Literal value if the node is a (possibly negated) literal.
    pub fn as_literal(&self) -> Option<f64> {
        match self {
            Expr::Lit(x) => Some(*x),
            Expr::Neg(inner) => match **inner {
                Expr::Lit(x) => Some(-x),
                _ => None,
            },
            _ => None,
        }
    }

    pub fn mentions_variables(&self) -> bool {
        match self {
            Expr::Var(_) => true,
            Expr::Lit(_) | Expr::Const(_) => false,
            Expr::Neg(a) | Expr::Call(_, a) => a.mentions_variables(),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) | Expr::Pow(a, b) => {
                a.mentions_variables() || b.mentions_variables()
            }
        }
    }

    /// Largest variable index used, if any.
    pub fn max_variable(&self) -> Option<usize> {
        match self {
            Expr::Var(i) => Some(*i),
            Expr::Lit(_) | Expr::Const(_) => None,
            Expr::Neg(a) | Expr::Call(_, a) => a.max_variable(),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) | Expr::Pow(a, b) => {
                match (a.max_variable(), b.max_variable()) {
                    (Some(x), Some(y)) => Some(x.max(y)),
                    (x, y) => x.or(y),
                }
            }
        }
    }

    /// Printable form using the given coordinate names.
    pub fn display<'a>(&'a self, coords: &'a [String]) -> ExprDisplay<'a> {
        ExprDisplay { expr: self, coords: Some(coords) }
    }

    /// Printable form naming coordinates `$0, $1, ...`.
    pub fn display_indexed(&self) -> ExprDisplay<'_> {
        ExprDisplay { expr: self, coords: None }
    }

    /// Evaluates at `env` (one scalar per chart coordinate).
    pub fn evaluate<S: Scalar>(&self, env: &[S]) -> Result<S> {
        let v = self.eval_node(env)?;
        if !v.value().is_finite() {
            return Err(self.domain(DomainKind::NonFinite));
        }
        Ok(v)
    }

    fn domain(&self, kind: DomainKind) -> Error {
        Error::Domain { kind, subexpr: self.clone() }
    }

    fn eval_node<S: Scalar>(&self, env: &[S]) -> Result<S> {
        Ok(match self {
            Expr::Lit(x) => S::from_f64(*x),
            Expr::Var(i) => *env.get(*i).ok_or(Error::DimensionMismatch {
                expected: i + 1,
                found: env.len(),
            })?,
            Expr::Const(c) => S::from_f64(c.value()),
            Expr::Neg(a) => -a.eval_node(env)?,
            Expr::Add(a, b) => a.eval_node(env)? + b.eval_node(env)?,
            Expr::Sub(a, b) => a.eval_node(env)? - b.eval_node(env)?,
            Expr::Mul(a, b) => a.eval_node(env)? * b.eval_node(env)?,
            Expr::Div(a, b) => {
                let num = a.eval_node(env)?;
                let den = b.eval_node(env)?;
                if den.value() == 0.0 {
                    return Err(self.domain(DomainKind::DivisionByZero));
                }
                num / den
            }
            Expr::Pow(a, b) => {
                let base = a.eval_node(env)?;
                let e: f64 = b.eval_node::<f64>(&[])?;
                let bv = base.value();
                if libm::trunc(e) == e && libm::fabs(e) <= i32::MAX as f64 {
                    if e < 0.0 && bv == 0.0 {
                        return Err(self.domain(DomainKind::DivisionByZero));
                    }
                    base.powi(e as i32)
                } else {
                    if bv < 0.0 {
                        return Err(self.domain(DomainKind::NegativeBase));
                    }
                    if bv == 0.0 && e < 0.0 {
                        return Err(self.domain(DomainKind::DivisionByZero));
                    }
                    base.powf(e)
                }
            }
            Expr::Call(f, a) => {
                let x = a.eval_node(env)?;
                match f {
                    Func::Sin => x.sin(),
                    Func::Cos => x.cos(),
                    Func::Tan => x.tan(),
                    Func::Exp => x.exp(),
                    Func::Log => {
                        if x.value() <= 0.0 {
                            return Err(self.domain(DomainKind::LogNonPositive));
                        }
                        x.ln()
                    }
                    Func::Sqrt => {
                        if x.value() < 0.0 {
                            return Err(self.domain(DomainKind::SqrtNegative));
                        }
                        x.sqrt()
                    }
                    Func::Abs => x.abs(),
                }
            }
        })
    }
}

macro_rules! expr_binop {
    ($trait:ident, $method:ident, $variant:ident) => {
        impl core::ops::$trait for Expr {
            type Output = Expr;
            fn $method(self, rhs: Expr) -> Expr {
                Expr::$variant(Box::new(self), Box::new(rhs))
            }
        }
    };
}

expr_binop!(Add, add, Add);
expr_binop!(Sub, sub, Sub);
expr_binop!(Mul, mul, Mul);
expr_binop!(Div, div, Div);

impl core::ops::Neg for Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        Expr::Neg(Box::new(self))
    }
}

pub struct ExprDisplay<'a> {
    expr: &'a Expr,
    coords: Option<&'a [String]>,
}

impl ExprDisplay<'_> {
    fn sub<'b>(&'b self, e: &'b Expr) -> ExprDisplay<'b> {
        ExprDisplay { expr: e, coords: self.coords }
    }
}

impl fmt::Display for ExprDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.expr {
            Expr::Lit(x) => write!(f, "{x}"),
            Expr::Var(i) => match self.coords.and_then(|c| c.get(*i)) {
                Some(name) => f.write_str(name),
                None => write!(f, "${i}"),
            },
            Expr::Const(c) => f.write_str(c.name()),
            Expr::Neg(a) => write!(f, "(-{})", self.sub(a)),
            Expr::Add(a, b) => write!(f, "({} + {})", self.sub(a), self.sub(b)),
            Expr::Sub(a, b) => write!(f, "({} - {})", self.sub(a), self.sub(b)),
            Expr::Mul(a, b) => write!(f, "({} * {})", self.sub(a), self.sub(b)),
            Expr::Div(a, b) => write!(f, "({} / {})", self.sub(a), self.sub(b)),
            Expr::Pow(a, b) => write!(f, "({} ^ {})", self.sub(a), self.sub(b)),
            Expr::Call(func, a) => write!(f, "{}({})", func.name(), self.sub(a)),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    Comma,
    End,
}

const EXPECT_OPERAND: &[&str] = &["number", "identifier", "'('", "'-'"];

fn tokenize(text: &str) -> core::result::Result<Vec<(Tok, usize)>, ParseError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        let start = i;
        let tok = match c {
            b' ' | b'\t' | b'\n' | b'\r' => {
                i += 1;
                continue;
            }
            b'+' => Tok::Plus,
            b'-' => Tok::Minus,
            b'*' => Tok::Star,
            b'/' => Tok::Slash,
            b'^' => Tok::Caret,
            b'(' => Tok::LParen,
            b')' => Tok::RParen,
            b',' => Tok::Comma,
            b'0'..=b'9' | b'.' => {
                while i < bytes.len() && (bytes[i].is_ascii_digit() || bytes[i] == b'.') {
                    i += 1;
                }
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
                let value = text[start..i]
                    .parse::<f64>()
                    .map_err(|_| ParseError::Syntax { position: start, expected: EXPECT_OPERAND.to_vec() })?;
                out.push((Tok::Num(value), start));
                continue;
            }
            c if c.is_ascii_alphabetic() || c == b'_' => {
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                out.push((Tok::Ident(String::from(&text[start..i])), start));
                continue;
            }
            _ => {
                return Err(ParseError::Syntax { position: start, expected: EXPECT_OPERAND.to_vec() });
            }
        };
        out.push((tok, start));
        i += 1;
    }
    out.push((Tok::End, text.len()));
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    coords: &'a [&'a str],
}

impl Parser<'_> {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn offset(&self) -> usize {
        self.toks[self.pos].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].0.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn syntax(&self, expected: &[&'static str]) -> ParseError {
        ParseError::Syntax { position: self.offset(), expected: expected.to_vec() }
    }

    fn expr(&mut self) -> core::result::Result<Expr, ParseError> {
        let mut lhs = self.term()?;
        loop {
            match self.peek() {
                Tok::Plus => {
                    self.bump();
                    lhs = lhs + self.term()?;
                }
                Tok::Minus => {
                    self.bump();
                    lhs = lhs - self.term()?;
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> core::result::Result<Expr, ParseError> {
        let mut lhs = self.unary()?;
        loop {
            match self.peek() {
                Tok::Star => {
                    self.bump();
                    lhs = lhs * self.unary()?;
                }
                Tok::Slash => {
                    self.bump();
                    lhs = lhs / self.unary()?;
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn unary(&mut self) -> core::result::Result<Expr, ParseError> {
        if *self.peek() == Tok::Minus {
            self.bump();
            return Ok(-self.unary()?);
        }
        self.power()
    }

    fn power(&mut self) -> core::result::Result<Expr, ParseError> {
        let base = self.atom()?;
        if *self.peek() == Tok::Caret {
            self.bump();
            let at = self.offset();
            let exponent = self.exponent()?;
            if exponent.mentions_variables() {
                return Err(ParseError::NonConstantExponent { position: at });
            }
            return Ok(Expr::Pow(Box::new(base), Box::new(exponent)));
        }
        Ok(base)
    }

    fn exponent(&mut self) -> core::result::Result<Expr, ParseError> {
        if *self.peek() == Tok::Minus {
            self.bump();
            return Ok(-self.exponent()?);
        }
        self.power()
    }

    fn atom(&mut self) -> core::result::Result<Expr, ParseError> {
        let at = self.offset();
        match self.peek().clone() {
            Tok::Num(x) => {
                self.bump();
                Ok(Expr::Lit(x))
            }
            Tok::LParen => {
                self.bump();
                let inner = self.expr()?;
                if *self.peek() != Tok::RParen {
                    return Err(self.syntax(&["operator", "')'"]));
                }
                self.bump();
                Ok(inner)
            }
            Tok::Ident(name) => {
                self.bump();
                if let Some(i) = self.coords.iter().position(|c| *c == name) {
                    return Ok(Expr::Var(i));
                }
                if let Some(c) = Constant::lookup(&name) {
                    return Ok(Expr::Const(c));
                }
                if let Some(func) = Func::lookup(&name) {
                    if *self.peek() != Tok::LParen {
                        return Err(self.syntax(&["'('"]));
                    }
                    self.bump();
                    let mut args = Vec::new();
                    if *self.peek() != Tok::RParen {
                        args.push(self.expr()?);
                        while *self.peek() == Tok::Comma {
                            self.bump();
                            args.push(self.expr()?);
                        }
                    }
                    if *self.peek() != Tok::RParen {
                        return Err(self.syntax(&["operator", "','", "')'"]));
                    }
                    self.bump();
                    if args.len() != 1 {
                        return Err(ParseError::Arity { function: func.name(), found: args.len() });
                    }
                    return Ok(Expr::call(func, args.pop().unwrap()));
                }
                Err(ParseError::UnknownIdentifier { name, position: at })
            }
            _ => Err(self.syntax(EXPECT_OPERAND)),
        }
    }
}

/// Parses `text` with `coords` as the admissible variable names.
pub fn parse<S: AsRef<str>>(text: &str, coords: &[S]) -> core::result::Result<Expr, ParseError> {
    if text.trim().is_empty() {
        return Err(ParseError::Empty);
    }
    let names: Vec<&str> = coords.iter().map(|c| c.as_ref()).collect();
    let mut p = Parser { toks: tokenize(text)?, pos: 0, coords: &names };
    let e = p.expr()?;
    if *p.peek() != Tok::End {
        return Err(p.syntax(&["operator", "end of input"]));
    }
    Ok(e)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Dual;
    use alloc::string::ToString;
    use alloc::vec;

    fn xy() -> Vec<String> {
        vec!["x".to_string(), "y".to_string()]
    }

    #[test]
    fn parse_precedence() {
        let e = parse("1 + x^2", &xy()).unwrap();
        assert_eq!(e, Expr::Lit(1.0) + Expr::Pow(Box::new(Expr::Var(0)), Box::new(Expr::Lit(2.0))));
        assert_eq!(parse("-x", &["x"]).unwrap(), -Expr::Var(0));
        // ^ binds tighter than unary minus
        assert_eq!(parse("-x^2", &["x"]).unwrap(), -Expr::pow(Expr::Var(0), 2.0));
        // left associativity
        assert_eq!(parse("x - y - 1", &xy()).unwrap(), (Expr::Var(0) - Expr::Var(1)) - Expr::Lit(1.0));
        assert_eq!(parse("x / y * 2", &xy()).unwrap(), (Expr::Var(0) / Expr::Var(1)) * Expr::Lit(2.0));
        // ^ is right associative
        let e = parse("x^2^3", &["x"]).unwrap();
        assert_eq!(e, Expr::Pow(Box::new(Expr::Var(0)), Box::new(Expr::pow(Expr::Lit(2.0), 3.0))));
    }

    #[test]
    fn syntax_error_offset() {
        match parse("x +* y", &xy()) {
            Err(ParseError::Syntax { position, expected }) => {
                assert_eq!(position, 3);
                assert!(expected.contains(&"number"));
            }
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(parse("(x", &xy()), Err(ParseError::Syntax { position: 2, .. })));
        assert!(matches!(parse("x y", &xy()), Err(ParseError::Syntax { position: 2, .. })));
        assert!(matches!(parse("   ", &xy()), Err(ParseError::Empty)));
    }

    #[test]
    fn identifier_errors() {
        assert!(matches!(parse("1 + z", &xy()), Err(ParseError::UnknownIdentifier { ref name, position: 4 }) if name == "z"));
        assert!(matches!(parse("sin(x, y)", &xy()), Err(ParseError::Arity { function: "sin", found: 2 })));
        assert!(matches!(parse("cos()", &xy()), Err(ParseError::Arity { function: "cos", found: 0 })));
        assert!(matches!(parse("x^y", &xy()), Err(ParseError::NonConstantExponent { position: 2 })));
        assert!(parse("x^(1/2)", &xy()).is_ok());
        assert!(parse("x^-1", &xy()).is_ok());
    }

    #[test]
    fn evaluate_values() {
        let e = parse("x^2 + sin(y)", &xy()).unwrap();
        assert_eq!(e.evaluate(&[2.0, 0.0]).unwrap(), 4.0);
        let g = parse("phi^2 - phi - 1", &xy()).unwrap();
        assert!(g.evaluate(&[0.3, -0.7]).unwrap().abs() < 1e-15);
        let d = parse("x^2", &["x"]).unwrap().evaluate(&[Dual::variable(3.0)]).unwrap();
        assert_eq!((d.re, d.eps), (9.0, 6.0));
        assert_eq!(PHIBAR, 1.0 - PHI);
        assert!((PHI * PHI - PHI - 1.0).abs() < 1e-15);
    }

    #[test]
    fn domain_errors_name_the_subexpression() {
        let e = parse("1 + log(x - 1)", &["x"]).unwrap();
        match e.evaluate(&[0.5]) {
            Err(Error::Domain { kind: DomainKind::LogNonPositive, subexpr }) => {
                assert_eq!(subexpr.display(&["x".to_string()]).to_string(), "log((x - 1))");
            }
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(
            parse("sqrt(x)", &["x"]).unwrap().evaluate(&[-1.0]),
            Err(Error::Domain { kind: DomainKind::SqrtNegative, .. })
        ));
        assert!(matches!(
            parse("1/x", &["x"]).unwrap().evaluate(&[0.0]),
            Err(Error::Domain { kind: DomainKind::DivisionByZero, .. })
        ));
        assert!(matches!(
            parse("x^0.5", &["x"]).unwrap().evaluate(&[-2.0]),
            Err(Error::Domain { kind: DomainKind::NegativeBase, .. })
        ));
    }

    #[test]
    fn printing_reparses_identically() {
        let names = xy();
        for text in ["1 + x^2", "-x", "sin(x)*cos(y)/(2 - phi)", "x^-1.5 - sqrt5*phibar + pi", "-(-x)^2^3", "1.5e-7 * abs(y)"] {
            let e = parse(text, &names).unwrap();
            let printed = e.display(&names).to_string();
            assert_eq!(parse(&printed, &names).unwrap(), e, "{text} -> {printed}");
        }
        let built = Expr::lit(-2.5) * Expr::var(1);
        let printed = built.display(&names).to_string();
        assert_eq!(parse(&printed, &names).unwrap(), built);
    }
}
