//! A small radial expression language for weights and symbols.
//!
//! Expressions have a single free variable `r` and are built from decimal
//! constants, `+ - * /`, rational powers and `exp(..)`:
//!
//! ```text
//! expr   := term (("+"|"-") term)*
//! term   := factor (("*"|"/") factor)*
//! factor := base ("^" rational)?
//! base   := number | "r" | "exp" "(" expr ")" | "(" expr ")"
//! ```
//!
//! A number in base position may carry a leading `-` (so that folded negative
//! constants print and re-parse to the same tree). Exponents are either a bare
//! literal (`r^4`, `r^1.5`) or a parenthesized signed fraction (`r^(-3/2)`).
//!
//! Evaluation comes in two flavours: plain `f64` and a signed log-domain form
//! in which `exp` nodes never materialize their argument's exponential, so
//! weights like `exp(exp(r))` stay representable far past `f64` overflow.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::numeric::{ln_add_signed, SignedLog};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ExprError {
    #[error("syntax error at byte {position}: expected {expected}")]
    Syntax { position: usize, expected: String },
    #[error("unknown identifier `{0}` (the only variable is `r`)")]
    UnknownIdentifier(String),
    #[error("expression is not positive at r = {r}")]
    NonPositiveValue { r: f64 },
}

/// Exact rational number with a positive denominator, always in lowest terms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Rational {
    num: i64,
    den: i64,
}

fn gcd(mut a: i64, mut b: i64) -> i64 {
    a = a.abs();
    b = b.abs();
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

impl Rational {
    pub const ZERO: Rational = Rational { num: 0, den: 1 };
    pub const ONE: Rational = Rational { num: 1, den: 1 };

    /// Panics on a zero denominator.
    pub fn new(num: i64, den: i64) -> Self {
        assert!(den != 0, "zero denominator");
        let g = gcd(num, den).max(1);
        let s = if den < 0 { -1 } else { 1 };
        Rational {
            num: s * num / g,
            den: s * den / g,
        }
    }

    pub fn integer(n: i64) -> Self {
        Rational { num: n, den: 1 }
    }

    pub fn numer(&self) -> i64 {
        self.num
    }

    pub fn denom(&self) -> i64 {
        self.den
    }

    pub fn is_integer(&self) -> bool {
        self.den == 1
    }

    pub fn to_f64(&self) -> f64 {
        self.num as f64 / self.den as f64
    }

    pub fn checked_sub(self, other: Rational) -> Option<Rational> {
        let num = self
            .num
            .checked_mul(other.den)?
            .checked_sub(other.num.checked_mul(self.den)?)?;
        Some(Rational::new(num, self.den.checked_mul(other.den)?))
    }

    pub fn checked_mul(self, other: Rational) -> Option<Rational> {
        let g1 = gcd(self.num, other.den).max(1);
        let g2 = gcd(other.num, self.den).max(1);
        let num = (self.num / g1).checked_mul(other.num / g2)?;
        let den = (self.den / g2).checked_mul(other.den / g1)?;
        Some(Rational::new(num, den))
    }

    pub fn checked_add(self, other: Rational) -> Option<Rational> {
        self.checked_sub(Rational::new(-other.num, other.den))
    }

    pub fn checked_div(self, other: Rational) -> Option<Rational> {
        if other.num == 0 {
            return None;
        }
        self.checked_mul(Rational::new(other.den, other.num))
    }

    /// Parses an exact decimal literal such as `2`, `0.25` or `1.5`.
    /// Exact value of a plain decimal literal such as `2.75`.
    pub fn from_decimal(text: &str) -> Option<Rational> {
        if let Some(rest) = text.strip_prefix('-') {
            let r = Rational::from_decimal(rest)?;
            return Some(Rational::new(-r.num, r.den));
        }
        let (int_part, frac_part) = match text.split_once('.') {
            Some((a, b)) => (a, b),
            None => (text, ""),
        };
        if frac_part.len() > 15 {
            return None;
        }
        let digits = format!("{int_part}{frac_part}");
        let num: i64 = if digits.is_empty() { 0 } else { digits.parse().ok()? };
        let den = 10i64.checked_pow(frac_part.len() as u32)?;
        Some(Rational::new(num, den))
    }

    /// Exact rational for a float with a short decimal expansion.
    pub fn from_f64(x: f64) -> Option<Rational> {
        if !x.is_finite() {
            return None;
        }
        Rational::from_decimal(&x.to_string())
    }
}

impl PartialOrd for Rational {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Rational {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        (self.num as i128 * other.den as i128).cmp(&(other.num as i128 * self.den as i128))
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den == 1 {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/{}", self.num, self.den)
        }
    }
}

/// Expression tree over the single variable `r`.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Const(f64),
    Var,
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, Rational),
    Exp(Box<Expr>),
}

impl Expr {
    pub fn add(a: Expr, b: Expr) -> Expr {
        Expr::Add(Box::new(a), Box::new(b))
    }
    pub fn sub(a: Expr, b: Expr) -> Expr {
        Expr::Sub(Box::new(a), Box::new(b))
    }
    pub fn mul(a: Expr, b: Expr) -> Expr {
        Expr::Mul(Box::new(a), Box::new(b))
    }
    pub fn div(a: Expr, b: Expr) -> Expr {
        Expr::Div(Box::new(a), Box::new(b))
    }
    pub fn pow(a: Expr, q: Rational) -> Expr {
        Expr::Pow(Box::new(a), q)
    }
    pub fn exp(a: Expr) -> Expr {
        Expr::Exp(Box::new(a))
    }

    fn as_const(&self) -> Option<f64> {
        match self {
            Expr::Const(c) => Some(*c),
            _ => None,
        }
    }

    /// Plain floating-point evaluation; may overflow to infinity.
    pub fn eval(&self, r: f64) -> f64 {
        match self {
            Expr::Const(c) => *c,
            Expr::Var => r,
            Expr::Add(a, b) => a.eval(r) + b.eval(r),
            Expr::Sub(a, b) => a.eval(r) - b.eval(r),
            Expr::Mul(a, b) => a.eval(r) * b.eval(r),
            Expr::Div(a, b) => a.eval(r) / b.eval(r),
            Expr::Pow(a, q) => pow_rational(a.eval(r), *q),
            Expr::Exp(a) => a.eval(r).exp(),
        }
    }

    /// Signed log-domain evaluation: `(sign, ln|value|)`.
    pub fn eval_signed_log(&self, r: f64) -> SignedLog {
        match self {
            Expr::Const(c) => SignedLog::from_f64(*c),
            Expr::Var => SignedLog::from_f64(r),
            Expr::Add(a, b) => ln_add_signed(a.eval_signed_log(r), b.eval_signed_log(r)),
            Expr::Sub(a, b) => ln_add_signed(a.eval_signed_log(r), b.eval_signed_log(r).neg()),
            Expr::Mul(a, b) => a.eval_signed_log(r).mul(b.eval_signed_log(r)),
            Expr::Div(a, b) => a.eval_signed_log(r).div(b.eval_signed_log(r)),
            Expr::Pow(a, q) => a.eval_signed_log(r).pow_rational(*q),
            // ln(e^x) = x: the argument's value is the log of the result.
            Expr::Exp(a) => SignedLog::positive(a.eval_signed_log(r).to_f64()),
        }
    }

    /// Natural log of the expression value at `r`.
    pub fn eval_log(&self, r: f64) -> Result<f64, ExprError> {
        let v = self.eval_signed_log(r);
        if v.sign > 0 && !v.ln.is_nan() {
            Ok(v.ln)
        } else {
            Err(ExprError::NonPositiveValue { r })
        }
    }

    /// Symbolic derivative with respect to `r`, simplified.
    pub fn differentiate(&self) -> Expr {
        let d = match self {
            Expr::Const(_) => Expr::Const(0.0),
            Expr::Var => Expr::Const(1.0),
            Expr::Add(a, b) => Expr::add(a.differentiate(), b.differentiate()),
            Expr::Sub(a, b) => Expr::sub(a.differentiate(), b.differentiate()),
            Expr::Mul(a, b) => Expr::add(
                Expr::mul(a.differentiate(), (**b).clone()),
                Expr::mul((**a).clone(), b.differentiate()),
            ),
            Expr::Div(a, b) => Expr::div(
                Expr::sub(
                    Expr::mul(a.differentiate(), (**b).clone()),
                    Expr::mul((**a).clone(), b.differentiate()),
                ),
                Expr::pow((**b).clone(), Rational::integer(2)),
            ),
            Expr::Pow(a, q) => {
                let lowered = q
                    .checked_sub(Rational::ONE)
                    .expect("exponent overflow while differentiating");
                Expr::mul(
                    Expr::mul(Expr::Const(q.to_f64()), Expr::pow((**a).clone(), lowered)),
                    a.differentiate(),
                )
            }
            Expr::Exp(a) => Expr::mul(a.differentiate(), self.clone()),
        };
        d.simplify()
    }

    /// One bottom-up pass of constant folding and identity elimination.
    pub fn simplify(&self) -> Expr {
        match self {
            Expr::Const(_) | Expr::Var => self.clone(),
            Expr::Add(a, b) => {
                let (a, b) = (a.simplify(), b.simplify());
                match (a.as_const(), b.as_const()) {
                    (Some(x), Some(y)) => Expr::Const(x + y),
                    (Some(x), _) if x == 0.0 => b,
                    (_, Some(y)) if y == 0.0 => a,
                    _ => Expr::add(a, b),
                }
            }
            Expr::Sub(a, b) => {
                let (a, b) = (a.simplify(), b.simplify());
                match (a.as_const(), b.as_const()) {
                    (Some(x), Some(y)) => Expr::Const(x - y),
                    (_, Some(y)) if y == 0.0 => a,
                    _ => Expr::sub(a, b),
                }
            }
            Expr::Mul(a, b) => {
                let (a, b) = (a.simplify(), b.simplify());
                match (a.as_const(), b.as_const()) {
                    (Some(x), Some(y)) => Expr::Const(x * y),
                    (Some(x), _) | (_, Some(x)) if x == 0.0 => Expr::Const(0.0),
                    (Some(x), _) if x == 1.0 => b,
                    (_, Some(y)) if y == 1.0 => a,
                    // keep constants on the left and merge c1 * (c2 * x)
                    (None, Some(y)) => merge_scalar(y, a),
                    (Some(x), None) => merge_scalar(x, b),
                    _ => Expr::mul(a, b),
                }
            }
            Expr::Div(a, b) => {
                let (a, b) = (a.simplify(), b.simplify());
                match (a.as_const(), b.as_const()) {
                    (Some(x), Some(y)) if y != 0.0 => Expr::Const(x / y),
                    (Some(x), _) if x == 0.0 => Expr::Const(0.0),
                    (_, Some(y)) if y == 1.0 => a,
                    _ => Expr::div(a, b),
                }
            }
            Expr::Pow(a, q) => {
                let a = a.simplify();
                if *q == Rational::ZERO {
                    return Expr::Const(1.0);
                }
                if *q == Rational::ONE {
                    return a;
                }
                if let Some(x) = a.as_const() {
                    let v = pow_rational(x, *q);
                    if v.is_finite() {
                        return Expr::Const(v);
                    }
                }
                Expr::pow(a, *q)
            }
            Expr::Exp(a) => {
                let a = a.simplify();
                if let Some(x) = a.as_const() {
                    let v = x.exp();
                    if v.is_finite() && x == 0.0 {
                        return Expr::Const(1.0);
                    }
                }
                Expr::exp(a)
            }
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            Expr::Add(..) | Expr::Sub(..) => 1,
            Expr::Mul(..) | Expr::Div(..) => 2,
            Expr::Pow(..) => 3,
            Expr::Const(c) if *c < 0.0 => 3,
            _ => 4,
        }
    }
}

fn merge_scalar(c: f64, e: Expr) -> Expr {
    if let Expr::Mul(x, y) = &e {
        if let Some(k) = x.as_const() {
            let merged = c * k;
            if merged == 1.0 {
                return (**y).clone();
            }
            return Expr::mul(Expr::Const(merged), (**y).clone());
        }
    }
    Expr::mul(Expr::Const(c), e)
}

pub(crate) fn pow_rational(x: f64, q: Rational) -> f64 {
    if q.is_integer() && q.numer().unsigned_abs() <= i32::MAX as u64 {
        return x.powi(q.numer() as i32);
    }
    if x < 0.0 && q.denom() % 2 == 1 {
        let m = (-x).powf(q.to_f64());
        return if q.numer() % 2 == 0 { m } else { -m };
    }
    x.powf(q.to_f64())
}

fn fmt_child(f: &mut fmt::Formatter<'_>, e: &Expr, min_prec: u8) -> fmt::Result {
    if e.precedence() < min_prec {
        write!(f, "({e})")
    } else {
        write!(f, "{e}")
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Const(c) => write!(f, "{c}"),
            Expr::Var => write!(f, "r"),
            Expr::Add(a, b) => {
                fmt_child(f, a, 1)?;
                write!(f, " + ")?;
                fmt_child(f, b, 2)
            }
            Expr::Sub(a, b) => {
                fmt_child(f, a, 1)?;
                write!(f, " - ")?;
                fmt_child(f, b, 2)
            }
            Expr::Mul(a, b) => {
                fmt_child(f, a, 2)?;
                write!(f, "*")?;
                fmt_child(f, b, 3)
            }
            Expr::Div(a, b) => {
                fmt_child(f, a, 2)?;
                write!(f, "/")?;
                fmt_child(f, b, 3)
            }
            Expr::Pow(a, q) => {
                // a negative constant base already reads as `-2^3` = Pow(Const(-2), 3)
                let bare = matches!(**a, Expr::Const(_) | Expr::Var | Expr::Exp(_));
                if bare {
                    write!(f, "{a}")?;
                } else {
                    write!(f, "({a})")?;
                }
                if q.is_integer() && q.numer() >= 0 {
                    write!(f, "^{q}")
                } else {
                    write!(f, "^({q})")
                }
            }
            Expr::Exp(a) => write!(f, "exp({a})"),
        }
    }
}

impl std::str::FromStr for Expr {
    type Err = ExprError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse(s)
    }
}

/// Parses an expression in the radial weight language.
pub fn parse(text: &str) -> Result<Expr, ExprError> {
    let mut p = Parser {
        src: text.as_bytes(),
        pos: 0,
    };
    p.skip_ws();
    if p.pos >= p.src.len() {
        return Err(p.error("an expression"));
    }
    let e = p.expr()?;
    p.skip_ws();
    if p.pos < p.src.len() {
        return Err(p.error("an operator or end of input"));
    }
    Ok(e)
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn error(&self, expected: &str) -> ExprError {
        ExprError::Syntax {
            position: self.pos,
            expected: expected.to_string(),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: u8) -> Result<(), ExprError> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.error(&format!("`{}`", c as char)))
        }
    }

    fn expr(&mut self) -> Result<Expr, ExprError> {
        let mut lhs = self.term()?;
        loop {
            if self.eat(b'+') {
                lhs = Expr::add(lhs, self.term()?);
            } else if self.eat(b'-') {
                lhs = Expr::sub(lhs, self.term()?);
            } else {
                return Ok(lhs);
            }
        }
    }

    fn term(&mut self) -> Result<Expr, ExprError> {
        let mut lhs = self.factor()?;
        loop {
            if self.eat(b'*') {
                lhs = Expr::mul(lhs, self.factor()?);
            } else if self.eat(b'/') {
                lhs = Expr::div(lhs, self.factor()?);
            } else {
                return Ok(lhs);
            }
        }
    }

    fn factor(&mut self) -> Result<Expr, ExprError> {
        let base = self.base()?;
        if self.eat(b'^') {
            let q = self.rational()?;
            Ok(Expr::pow(base, q))
        } else {
            Ok(base)
        }
    }

    fn number_text(&mut self) -> Option<String> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len()
            && (self.src[self.pos].is_ascii_digit() || self.src[self.pos] == b'.')
        {
            self.pos += 1;
        }
        if self.pos == start {
            return None;
        }
        std::str::from_utf8(&self.src[start..self.pos])
            .ok()
            .map(str::to_string)
    }

    fn number(&mut self) -> Result<f64, ExprError> {
        let start = self.pos;
        let Some(mut s) = self.number_text() else {
            return Err(self.error("a number"));
        };
        // optional exponent part, e.g. 1e300 or 2.5E-3
        if matches!(self.src.get(self.pos), Some(b'e') | Some(b'E'))
            && !self.src[self.pos..].starts_with(b"exp")
        {
            let save = self.pos;
            self.pos += 1;
            let mut exp = String::from("e");
            if let Some(&c) = self.src.get(self.pos) {
                if c == b'-' || c == b'+' {
                    exp.push(c as char);
                    self.pos += 1;
                }
            }
            let ds = self.pos;
            while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
                self.pos += 1;
            }
            if self.pos == ds {
                self.pos = save;
            } else {
                exp.push_str(std::str::from_utf8(&self.src[ds..self.pos]).unwrap_or("0"));
                s.push_str(&exp);
            }
        }
        s.parse::<f64>().map_err(|_| ExprError::Syntax {
            position: start,
            expected: "a decimal literal".into(),
        })
    }

    fn base(&mut self) -> Result<Expr, ExprError> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect(b')')?;
                Ok(e)
            }
            Some(b'-') => {
                self.pos += 1;
                if self.src.get(self.pos).is_some_and(|c| c.is_ascii_digit() || *c == b'.') {
                    Ok(Expr::Const(-self.number()?))
                } else {
                    Err(self.error("a number after `-`"))
                }
            }
            Some(c) if c.is_ascii_digit() || c == b'.' => Ok(Expr::Const(self.number()?)),
            Some(c) if c.is_ascii_alphabetic() || c == b'_' => {
                let start = self.pos;
                while self.pos < self.src.len()
                    && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_')
                {
                    self.pos += 1;
                }
                let ident = std::str::from_utf8(&self.src[start..self.pos]).unwrap_or("");
                match ident {
                    "r" => Ok(Expr::Var),
                    "exp" => {
                        self.expect(b'(')?;
                        let e = self.expr()?;
                        self.expect(b')')?;
                        Ok(Expr::exp(e))
                    }
                    other => Err(ExprError::UnknownIdentifier(other.to_string())),
                }
            }
            _ => Err(self.error("a number, `r`, `exp(` or `(`")),
        }
    }

    fn rational(&mut self) -> Result<Rational, ExprError> {
        let paren = self.eat(b'(');
        let negative = paren && self.eat(b'-');
        let num = self.rational_literal()?;
        let mut value = num;
        if paren && self.eat(b'/') {
            let den = self.rational_literal()?;
            value = value
                .checked_div(den)
                .ok_or_else(|| self.error("a nonzero denominator"))?;
        }
        if paren {
            self.expect(b')')?;
        }
        if negative {
            value = Rational::new(-value.numer(), value.denom());
        }
        Ok(value)
    }

    fn rational_literal(&mut self) -> Result<Rational, ExprError> {
        let pos = self.pos;
        let Some(text) = self.number_text() else {
            return Err(self.error("a rational exponent"));
        };
        Rational::from_decimal(&text).ok_or(ExprError::Syntax {
            position: pos,
            expected: "an exact decimal exponent".into(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> Expr {
        parse(s).unwrap()
    }

    #[test]
    fn parses_power_and_nesting() {
        assert_eq!(p("r^4"), Expr::pow(Expr::Var, Rational::integer(4)));
        assert_eq!(p("exp(exp(r))"), Expr::exp(Expr::exp(Expr::Var)));
        assert_eq!(
            p("r^(-3/2)"),
            Expr::pow(Expr::Var, Rational::new(-3, 2))
        );
        assert_eq!(p("r^1.5"), Expr::pow(Expr::Var, Rational::new(3, 2)));
    }

    #[test]
    fn precedence_and_associativity() {
        let e = p("1 - r - 2 * r ^ 2 / 4");
        assert_eq!(e.eval(2.0), 1.0 - 2.0 - 2.0 * 4.0 / 4.0);
        assert_eq!(p(" ( r + 1 ) * 3 ").eval(1.0), 6.0);
    }

    #[test]
    fn unknown_identifier_and_syntax_errors() {
        assert_eq!(parse("x^2"), Err(ExprError::UnknownIdentifier("x".into())));
        assert!(matches!(parse("r +"), Err(ExprError::Syntax { .. })));
        assert!(matches!(parse(""), Err(ExprError::Syntax { .. })));
        assert!(matches!(parse("r^r"), Err(ExprError::Syntax { .. })));
        assert!(matches!(parse("exp r"), Err(ExprError::Syntax { .. })));
        assert!(matches!(parse("(r"), Err(ExprError::Syntax { position: 2, .. })));
        assert!(matches!(parse("r) "), Err(ExprError::Syntax { .. })));
    }

    #[test]
    fn derivatives_of_the_documented_examples() {
        assert_eq!(
            p("r^4").differentiate(),
            Expr::mul(Expr::Const(4.0), Expr::pow(Expr::Var, Rational::integer(3)))
        );
        assert_eq!(
            p("exp(2*r)").differentiate(),
            Expr::mul(Expr::Const(2.0), p("exp(2*r)"))
        );
        assert_eq!(
            p("exp(exp(r))").differentiate(),
            Expr::mul(p("exp(r)"), p("exp(exp(r))"))
        );
        let second = p("exp(r)+r^2").differentiate().differentiate();
        for r in [0.5f64, 1.0, 3.0] {
            let want = r.exp() + 2.0;
            assert!((second.eval(r) - want).abs() < 1e-12 * want);
        }
    }

    #[test]
    fn eval_log_never_materializes_exponentials() {
        let e = p("exp(exp(r))");
        let v = e.eval_log(3.0).unwrap();
        assert!((v - 3f64.exp()).abs() < 1e-12 * 3f64.exp());
        // e^{e^8} overflows f64; its log does not
        let big = e.eval_log(8.0).unwrap();
        assert!((big - 8f64.exp()).abs() < 1e-12 * big);
        assert!((p("r^4").eval_log(2.0).unwrap() - 16f64.ln()).abs() < 1e-15);
        assert_eq!(
            p("r - 5").eval_log(2.0),
            Err(ExprError::NonPositiveValue { r: 2.0 })
        );
    }

    #[test]
    fn printing_round_trips_negative_constants() {
        for e in [
            Expr::sub(Expr::Var, Expr::Const(-5.0)),
            Expr::pow(Expr::Const(-2.0), Rational::integer(3)),
            Expr::mul(Expr::Var, Expr::Const(-0.25)),
            Expr::pow(Expr::pow(Expr::Var, Rational::new(1, 3)), Rational::new(-2, 1)),
        ] {
            assert_eq!(parse(&e.to_string()).unwrap(), e, "{e}");
        }
    }

    #[test]
    fn rational_arithmetic_is_exact() {
        let beta = Rational::integer(4);
        let p = Rational::integer(2);
        let t = beta
            .checked_mul(p.checked_sub(Rational::ONE).unwrap())
            .unwrap()
            .checked_add(Rational::integer(2))
            .unwrap()
            .checked_div(p)
            .unwrap();
        assert_eq!(t, Rational::integer(3));
        assert_eq!(Rational::new(6, -4), Rational::new(-3, 2));
        assert!(Rational::new(5, 2) < Rational::integer(3));
    }
}
