//! A small expression language for smooth test functions.
//!
//! Grammar (usual precedence, `^` binds tightest and takes an integer):
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := unary (('*' | '/') unary)*
//! unary  := '-' unary | power
//! power  := atom ('^' integer)?
//! atom   := number | name | name '(' expr ')' | '(' expr ')'
//! ```
//!
//! Function names are `sin`, `cos`, `exp`. Division is only allowed by
//! expressions that reduce to a non-zero rational constant.

use std::fmt;

use num_traits::{One, Signed, Zero};
use thiserror::Error;

use super::jet::{Jet, JetError};
use super::poly::{Poly, VarSpace};
use crate::scalar::{format_rational, parse_rational, Rational, Scalar};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ExprError {
    #[error("unexpected character {0:?} at offset {1}")]
    UnexpectedChar(char, usize),
    #[error("unexpected end of input")]
    UnexpectedEnd,
    #[error("unexpected token {0:?}")]
    UnexpectedToken(String),
    #[error("unknown variable {0:?}")]
    UnknownVariable(String),
    #[error("unknown function {0:?}")]
    UnknownFunction(String),
    #[error("division by a non-constant or zero expression")]
    BadDivision,
    #[error("invalid number {0:?}")]
    BadNumber(String),
}

#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Const(Rational),
    Var(usize),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Neg(Box<Expr>),
    Pow(Box<Expr>, u32),
    Sin(Box<Expr>),
    Cos(Box<Expr>),
    Exp(Box<Expr>),
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(String),
    Name(String),
    Sym(char),
}

fn tokenize(s: &str) -> Result<Vec<Tok>, ExprError> {
    let chars: Vec<char> = s.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() || c == '.' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                i += 1;
            }
            out.push(Tok::Num(chars[start..i].iter().collect()));
        } else if c.is_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            out.push(Tok::Name(chars[start..i].iter().collect()));
        } else if "+-*/^()".contains(c) {
            out.push(Tok::Sym(c));
            i += 1;
        } else {
            return Err(ExprError::UnexpectedChar(c, i));
        }
    }
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<Tok>,
    pos: usize,
    vars: &'a [String],
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos)
    }

    fn next(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).cloned();
        self.pos += 1;
        t
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(&Tok::Sym(c)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<Expr, ExprError> {
        let mut lhs = self.term()?;
        loop {
            if self.eat('+') {
                lhs = Expr::Add(Box::new(lhs), Box::new(self.term()?));
            } else if self.eat('-') {
                lhs = Expr::Sub(Box::new(lhs), Box::new(self.term()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn term(&mut self) -> Result<Expr, ExprError> {
        let mut lhs = self.unary()?;
        loop {
            if self.eat('*') {
                lhs = Expr::Mul(Box::new(lhs), Box::new(self.unary()?));
            } else if self.eat('/') {
                let rhs = self.unary()?;
                let d = rhs.as_constant().ok_or(ExprError::BadDivision)?;
                if d.is_zero() {
                    return Err(ExprError::BadDivision);
                }
                lhs = match lhs {
                    Expr::Const(n) => Expr::Const(n / d),
                    other => Expr::Mul(Box::new(Expr::Const(d.recip())), Box::new(other)),
                };
            } else {
                return Ok(lhs);
            }
        }
    }

    fn unary(&mut self) -> Result<Expr, ExprError> {
        if self.eat('-') {
            let inner = self.unary()?;
            return Ok(match inner {
                Expr::Const(c) => Expr::Const(-c),
                e => Expr::Neg(Box::new(e)),
            });
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, ExprError> {
        let base = self.atom()?;
        if self.eat('^') {
            match self.next() {
                Some(Tok::Num(n)) => {
                    let e: u32 = n.parse().map_err(|_| ExprError::BadNumber(n))?;
                    return Ok(Expr::Pow(Box::new(base), e));
                }
                Some(t) => return Err(ExprError::UnexpectedToken(format!("{:?}", t))),
                None => return Err(ExprError::UnexpectedEnd),
            }
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr, ExprError> {
        match self.next() {
            Some(Tok::Num(n)) => parse_rational(&n).map(Expr::Const).ok_or(ExprError::BadNumber(n)),
            Some(Tok::Name(name)) => {
                if self.eat('(') {
                    let arg = self.expr()?;
                    if !self.eat(')') {
                        return Err(ExprError::UnexpectedEnd);
                    }
                    match name.as_str() {
                        "sin" => Ok(Expr::Sin(Box::new(arg))),
                        "cos" => Ok(Expr::Cos(Box::new(arg))),
                        "exp" => Ok(Expr::Exp(Box::new(arg))),
                        _ => Err(ExprError::UnknownFunction(name)),
                    }
                } else {
                    self.vars
                        .iter()
                        .position(|v| *v == name)
                        .map(Expr::Var)
                        .ok_or(ExprError::UnknownVariable(name))
                }
            }
            Some(Tok::Sym('(')) => {
                let e = self.expr()?;
                if !self.eat(')') {
                    return Err(ExprError::UnexpectedEnd);
                }
                Ok(e)
            }
            Some(t) => Err(ExprError::UnexpectedToken(format!("{:?}", t))),
            None => Err(ExprError::UnexpectedEnd),
        }
    }
}

impl Expr {
    pub fn parse(src: &str, vars: &[String]) -> Result<Expr, ExprError> {
        let mut p = Parser { toks: tokenize(src)?, pos: 0, vars };
        let e = p.expr()?;
        if let Some(t) = p.peek() {
            return Err(ExprError::UnexpectedToken(format!("{:?}", t)));
        }
        Ok(e)
    }

    pub fn constant(c: Rational) -> Expr {
        Expr::Const(c)
    }

    /// The value when the expression contains no variables and no
    /// transcendental functions.
    pub fn as_constant(&self) -> Option<Rational> {
        let p = self.to_poly()?;
        if p.is_constant() {
            Some(p.constant_term())
        } else {
            None
        }
    }

    /// Exact polynomial form, if the expression is polynomial.
    pub fn to_poly(&self) -> Option<Poly<Rational>> {
        Some(match self {
            Expr::Const(c) => Poly::constant(c.clone()),
            Expr::Var(i) => Poly::var(*i),
            Expr::Add(a, b) => a.to_poly()? + b.to_poly()?,
            Expr::Sub(a, b) => a.to_poly()? - b.to_poly()?,
            Expr::Mul(a, b) => a.to_poly()? * b.to_poly()?,
            Expr::Neg(a) => -a.to_poly()?,
            Expr::Pow(a, e) => a.to_poly()?.pow(*e),
            Expr::Sin(_) | Expr::Cos(_) | Expr::Exp(_) => return None,
        })
    }

    pub fn from_poly(p: &Poly<Rational>) -> Expr {
        let mut acc: Option<Expr> = None;
        for (m, c) in p.terms() {
            let mut t = Expr::Const(c.clone());
            for (i, &e) in m.exponents().iter().enumerate() {
                if e > 0 {
                    let v = if e == 1 { Expr::Var(i) } else { Expr::Pow(Box::new(Expr::Var(i)), e) };
                    t = Expr::Mul(Box::new(t), Box::new(v));
                }
            }
            acc = Some(match acc {
                None => t,
                Some(a) => Expr::Add(Box::new(a), Box::new(t)),
            });
        }
        acc.unwrap_or(Expr::Const(Rational::zero()))
    }

    pub fn is_polynomial(&self) -> bool {
        self.to_poly().is_some()
    }

    /// Renames variable `i` to `map[i]`.
    pub fn remap_vars(&self, map: &[usize]) -> Expr {
        let r = |e: &Expr| Box::new(e.remap_vars(map));
        match self {
            Expr::Const(c) => Expr::Const(c.clone()),
            Expr::Var(i) => Expr::Var(map[*i]),
            Expr::Add(a, b) => Expr::Add(r(a), r(b)),
            Expr::Sub(a, b) => Expr::Sub(r(a), r(b)),
            Expr::Mul(a, b) => Expr::Mul(r(a), r(b)),
            Expr::Neg(a) => Expr::Neg(r(a)),
            Expr::Pow(a, e) => Expr::Pow(r(a), *e),
            Expr::Sin(a) => Expr::Sin(r(a)),
            Expr::Cos(a) => Expr::Cos(r(a)),
            Expr::Exp(a) => Expr::Exp(r(a)),
        }
    }

    pub fn max_var(&self) -> Option<usize> {
        match self {
            Expr::Const(_) => None,
            Expr::Var(i) => Some(*i),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) => a.max_var().max(b.max_var()),
            Expr::Neg(a) | Expr::Pow(a, _) | Expr::Sin(a) | Expr::Cos(a) | Expr::Exp(a) => a.max_var(),
        }
    }

    /// Pointwise value; `None` when a transcendental value is not
    /// representable in `S`.
    pub fn eval<S: Scalar>(&self, point: &[S]) -> Option<S> {
        Some(match self {
            Expr::Const(c) => S::from_rational(c),
            Expr::Var(i) => point[*i].clone(),
            Expr::Add(a, b) => a.eval(point)? + b.eval(point)?,
            Expr::Sub(a, b) => a.eval(point)? - b.eval(point)?,
            Expr::Mul(a, b) => a.eval(point)? * b.eval(point)?,
            Expr::Neg(a) => -a.eval(point)?,
            Expr::Pow(a, e) => a.eval(point)?.pow(*e),
            Expr::Sin(a) => a.eval(point)?.try_sin()?,
            Expr::Cos(a) => a.eval(point)?.try_cos()?,
            Expr::Exp(a) => a.eval(point)?.try_exp()?,
        })
    }

    /// Truncated Taylor expansion at `center` up to total order `order`.
    pub fn jet<S: Scalar>(&self, center: &[S], order: u32) -> Result<Jet<S>, JetError> {
        let c = || center.to_vec();
        Ok(match self {
            Expr::Const(q) => Jet::constant(c(), order, S::from_rational(q)),
            Expr::Var(i) => Jet::variable(c(), order, *i),
            Expr::Add(a, b) => a.jet(center, order)?.add(&b.jet(center, order)?),
            Expr::Sub(a, b) => a.jet(center, order)?.sub(&b.jet(center, order)?),
            Expr::Mul(a, b) => a.jet(center, order)?.mul(&b.jet(center, order)?),
            Expr::Neg(a) => a.jet(center, order)?.neg(),
            Expr::Pow(a, e) => a.jet(center, order)?.powi(*e),
            Expr::Sin(a) => a.jet(center, order)?.sin()?,
            Expr::Cos(a) => a.jet(center, order)?.cos()?,
            Expr::Exp(a) => a.jet(center, order)?.exp()?,
        })
    }

    pub fn display<'a>(&'a self, space: &'a VarSpace) -> ExprDisplay<'a> {
        ExprDisplay { expr: self, names: &space.names }
    }

    fn prec(&self) -> u8 {
        match self {
            Expr::Add(..) | Expr::Sub(..) => 1,
            Expr::Mul(..) => 2,
            Expr::Neg(..) => 3,
            Expr::Const(c) if c.is_negative() || !c.is_integer() => 2,
            Expr::Pow(..) => 4,
            _ => 5,
        }
    }

    fn write(&self, f: &mut fmt::Formatter<'_>, names: &[String]) -> fmt::Result {
        let wrap = |e: &Expr, min: u8, f: &mut fmt::Formatter<'_>| -> fmt::Result {
            if e.prec() < min {
                f.write_str("(")?;
                e.write(f, names)?;
                f.write_str(")")
            } else {
                e.write(f, names)
            }
        };
        match self {
            Expr::Const(c) => {
                if c.is_one() {
                    f.write_str("1")
                } else {
                    f.write_str(&format_rational(c))
                }
            }
            Expr::Var(i) => f.write_str(&names[*i]),
            Expr::Add(a, b) => {
                wrap(a, 1, f)?;
                f.write_str(" + ")?;
                wrap(b, 2, f)
            }
            Expr::Sub(a, b) => {
                wrap(a, 1, f)?;
                f.write_str(" - ")?;
                wrap(b, 2, f)
            }
            Expr::Mul(a, b) => {
                wrap(a, 2, f)?;
                f.write_str("*")?;
                wrap(b, 3, f)
            }
            Expr::Neg(a) => {
                f.write_str("-")?;
                wrap(a, 4, f)
            }
            Expr::Pow(a, e) => {
                wrap(a, 5, f)?;
                write!(f, "^{}", e)
            }
            Expr::Sin(a) | Expr::Cos(a) | Expr::Exp(a) => {
                let name = match self {
                    Expr::Sin(_) => "sin",
                    Expr::Cos(_) => "cos",
                    _ => "exp",
                };
                write!(f, "{}(", name)?;
                a.write(f, names)?;
                f.write_str(")")
            }
        }
    }
}

pub struct ExprDisplay<'a> {
    expr: &'a Expr,
    names: &'a [String],
}

impl fmt::Display for ExprDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.expr.write(f, self.names)
    }
}

/// Parses a polynomial in canonical or free form.
pub fn parse_poly(src: &str, space: &VarSpace) -> Result<Poly<Rational>, ExprError> {
    let e = Expr::parse(src, &space.names)?;
    e.to_poly().ok_or_else(|| ExprError::UnexpectedToken("non-polynomial function".into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{int, rat};
    use crate::symcalc::poly::Monomial;

    fn names() -> Vec<String> {
        vec!["x1".into(), "x2".into()]
    }

    #[test]
    fn parses_rational_constants_and_powers() {
        let e = Expr::parse("(1/6)*x1^3 - 2*x2", &names()).unwrap();
        let p = e.to_poly().unwrap();
        assert_eq!(p.coeff(&Monomial::var_pow(0, 3)), rat(1, 6));
        assert_eq!(p.coeff(&Monomial::var(1)), int(-2));
        let e = Expr::parse("x1^3/6", &names()).unwrap();
        assert_eq!(e.to_poly().unwrap(), Poly::term(Monomial::var_pow(0, 3), rat(1, 6)));
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(Expr::parse("x3", &names()), Err(ExprError::UnknownVariable(_))));
        assert!(matches!(Expr::parse("tan(x1)", &names()), Err(ExprError::UnknownFunction(_))));
        assert!(matches!(Expr::parse("1/x1", &names()), Err(ExprError::BadDivision)));
        assert!(Expr::parse("x1 +", &names()).is_err());
        assert!(Expr::parse("x1 $ 2", &names()).is_err());
    }

    #[test]
    fn eval_transcendental() {
        let e = Expr::parse("exp(x1)*sin(x2)", &names()).unwrap();
        let v = e.eval(&[0.5f64, 0.25]).unwrap();
        assert!((v - 0.5f64.exp() * 0.25f64.sin()).abs() < 1e-15);
        assert_eq!(e.eval(&[int(1), int(0)]), None);
        assert_eq!(e.eval(&[int(0), int(0)]), Some(int(0)));
    }

    #[test]
    fn polynomial_jet_is_exact() {
        let e = Expr::parse("x1^2", &names()).unwrap();
        let j = e.jet(&[int(0), int(0)], 3).unwrap();
        assert_eq!(j.poly(), &Poly::term(Monomial::var_pow(0, 2), int(1)));
    }

    #[test]
    fn display_round_trip() {
        let e = Expr::parse("-(x1 + 2)^2*exp(-x2/3) + cos(x1*x2)", &names()).unwrap();
        let space = VarSpace::unweighted(&["x1", "x2"]);
        let txt = e.display(&space).to_string();
        let back = Expr::parse(&txt, &names()).unwrap();
        let pt = [0.3f64, -0.7];
        assert!((e.eval(&pt).unwrap() - back.eval(&pt).unwrap()).abs() < 1e-14);
    }
}
