//! Exact scalar coefficients: ratios of reduced polynomials over ℚ.

use super::poly::{fmt_rational, sqrt_symbol, square_rule, PowerProduct, Poly, Symbol, SQRT2};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

/// `num / den` with `den ≠ 0`.
///
/// The denominator is normalized to have leading coefficient one. Monomial
/// denominators are rationalized with respect to square-root symbols, and any
/// common monomial factor is cancelled. Equality is decided by
/// cross-multiplication, so it is exact even when two representations differ.
#[derive(Clone)]
pub struct Coeff {
    num: Poly,
    den: Poly,
}

impl Coeff {
    pub fn zero() -> Self {
        Coeff { num: Poly::zero(), den: Poly::one() }
    }

    pub fn one() -> Self {
        Coeff::from_poly(Poly::one())
    }

    pub fn int(n: i64) -> Self {
        Coeff::from_poly(Poly::integer(n))
    }

    pub fn rational(n: i64, d: i64) -> Self {
        assert!(d != 0, "zero denominator");
        Coeff::from_rational(BigRational::new(BigInt::from(n), BigInt::from(d)))
    }

    pub fn from_rational(q: BigRational) -> Self {
        Coeff::from_poly(Poly::constant(q))
    }

    pub fn from_poly(p: Poly) -> Self {
        Coeff { num: p, den: Poly::one() }
    }

    pub fn sym(name: &str) -> Self {
        Coeff::from_poly(Poly::symbol(Symbol::new(name)))
    }

    pub fn sqrt2() -> Self {
        Coeff::sym(SQRT2)
    }

    /// `sqrt(name)` as a reduced square-root symbol.
    pub fn sqrt_of(name: &str) -> Self {
        Coeff::from_poly(Poly::symbol(sqrt_symbol(&Symbol::new(name))))
    }

    pub fn new(num: Poly, den: Poly) -> Result<Self, CoeffError> {
        if den.is_zero() {
            return Err(CoeffError::DivisionByZero);
        }
        Ok(Coeff { num, den }.normalized())
    }

    pub fn numer(&self) -> &Poly {
        &self.num
    }

    pub fn denom(&self) -> &Poly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.num == self.den
    }

    pub fn as_rational(&self) -> Option<BigRational> {
        Some(self.num.as_constant()? / self.den.as_constant()?)
    }

    pub fn symbols(&self) -> Vec<Symbol> {
        let mut s = self.num.symbols();
        s.extend(self.den.symbols());
        s.sort();
        s.dedup();
        s
    }

    pub fn scale(&self, q: &BigRational) -> Coeff {
        if q.is_zero() {
            return Coeff::zero();
        }
        Coeff { num: self.num.scale(q), den: self.den.clone() }
    }

    pub fn inv(&self) -> Result<Coeff, CoeffError> {
        Coeff::new(self.den.clone(), self.num.clone())
    }

    pub fn checked_div(&self, other: &Coeff) -> Result<Coeff, CoeffError> {
        if other.is_zero() {
            return Err(CoeffError::DivisionByZero);
        }
        Coeff::new(&self.num * &other.den, &self.den * &other.num)
    }

    pub fn powi(&self, n: i32) -> Result<Coeff, CoeffError> {
        let base = if n < 0 { self.inv()? } else { self.clone() };
        let mut acc = Coeff::one();
        for _ in 0..n.unsigned_abs() {
            acc = &acc * &base;
        }
        Ok(acc)
    }

    /// Substitutes `sym → value` everywhere.
    pub fn substitute(&self, sym: &Symbol, value: &Coeff) -> Result<Coeff, CoeffError> {
        let n = subst_poly(&self.num, sym, value)?;
        let d = subst_poly(&self.den, sym, value)?;
        n.checked_div(&d)
    }

    pub fn eval(&self, values: &dyn Fn(&Symbol) -> Option<f64>) -> Result<f64, Symbol> {
        Ok(self.num.eval(values)? / self.den.eval(values)?)
    }

    fn normalized(mut self) -> Coeff {
        if self.num.is_zero() {
            return Coeff::zero();
        }
        if let Some(c) = self.den.as_constant() {
            let inv = c.recip();
            return Coeff { num: self.num.scale(&inv), den: Poly::one() };
        }
        // Strip common monomial content.
        let g = self.num.monomial_content().gcd(&self.den.monomial_content());
        if !g.is_one() {
            self.num = self.num.div_pp(&g);
            self.den = self.den.div_pp(&g);
        }
        if let Some((pp, _)) = self.den.as_monomial() {
            // Rationalize square-root symbols out of a monomial denominator.
            let roots: Vec<Symbol> = pp
                .factors()
                .iter()
                .filter(|(s, _)| square_rule(s).map(|r| r.as_monomial().is_some()).unwrap_or(false))
                .map(|(s, _)| s.clone())
                .collect();
            if !roots.is_empty() {
                for s in roots {
                    let m = PowerProduct::var(s);
                    self.num = self.num.mul_pp(&m);
                    self.den = self.den.mul_pp(&m);
                }
                return self.normalized();
            }
        } else if let Some(q) = self.num.div_exact(&self.den) {
            return Coeff { num: q, den: Poly::one() };
        }
        let lc = self.den.leading().map(|(_, c)| c.clone()).unwrap_or_else(BigRational::one);
        if !lc.is_one() {
            let inv = lc.recip();
            self.num = self.num.scale(&inv);
            self.den = self.den.scale(&inv);
        }
        if let Some(c) = self.den.as_constant() {
            self.num = self.num.scale(&c.recip());
            self.den = Poly::one();
        }
        self
    }
}

fn subst_poly(p: &Poly, sym: &Symbol, value: &Coeff) -> Result<Coeff, CoeffError> {
    let mut acc = Coeff::zero();
    for (pp, c) in p.terms() {
        let mut t = Coeff::from_rational(c.clone());
        for (s, e) in pp.factors() {
            let base = if s == sym { value.clone() } else { Coeff::from_poly(Poly::symbol(s.clone())) };
            t = &t * &base.powi(*e as i32)?;
        }
        acc = &acc + &t;
    }
    Ok(acc)
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CoeffError {
    #[error("division by zero coefficient")]
    DivisionByZero,
    #[error("cannot parse coefficient `{input}`: {reason}")]
    Parse { input: String, reason: String },
}

impl PartialEq for Coeff {
    fn eq(&self, other: &Coeff) -> bool {
        if self.den == other.den {
            return self.num == other.num;
        }
        (&self.num * &other.den) == (&other.num * &self.den)
    }
}

impl Eq for Coeff {}

impl Default for Coeff {
    fn default() -> Self {
        Coeff::zero()
    }
}

impl<'a> Add<&'a Coeff> for &'a Coeff {
    type Output = Coeff;
    fn add(self, rhs: &'a Coeff) -> Coeff {
        if rhs.is_zero() {
            return self.clone();
        }
        if self.is_zero() {
            return rhs.clone();
        }
        if self.den == rhs.den {
            return Coeff { num: &self.num + &rhs.num, den: self.den.clone() }.normalized();
        }
        let num = &(&self.num * &rhs.den) + &(&rhs.num * &self.den);
        Coeff { num, den: &self.den * &rhs.den }.normalized()
    }
}

impl<'a> Sub<&'a Coeff> for &'a Coeff {
    type Output = Coeff;
    fn sub(self, rhs: &'a Coeff) -> Coeff {
        self + &(-rhs)
    }
}

impl<'a> Mul<&'a Coeff> for &'a Coeff {
    type Output = Coeff;
    fn mul(self, rhs: &'a Coeff) -> Coeff {
        if self.is_zero() || rhs.is_zero() {
            return Coeff::zero();
        }
        if self.den.as_constant().is_some() && rhs.den.as_constant().is_some() {
            return Coeff { num: &self.num * &rhs.num, den: Poly::one() };
        }
        Coeff { num: &self.num * &rhs.num, den: &self.den * &rhs.den }.normalized()
    }
}

impl<'a> Div<&'a Coeff> for &'a Coeff {
    type Output = Coeff;
    fn div(self, rhs: &'a Coeff) -> Coeff {
        self.checked_div(rhs).expect("division by zero coefficient")
    }
}

impl Neg for &Coeff {
    type Output = Coeff;
    fn neg(self) -> Coeff {
        Coeff { num: -&self.num, den: self.den.clone() }
    }
}

impl From<i64> for Coeff {
    fn from(n: i64) -> Self {
        Coeff::int(n)
    }
}

impl fmt::Display for Coeff {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let wrap = |p: &Poly| {
            let s = p.to_string();
            if p.len() > 1 {
                format!("({s})")
            } else {
                s
            }
        };
        // A denominator needs parentheses as soon as it is more than one symbol power.
        let wrap_den = |p: &Poly| {
            let s = p.to_string();
            if s.contains(['*', '/', '+', '-', ' ']) {
                format!("({s})")
            } else {
                s
            }
        };
        if let Some(c) = self.den.as_constant() {
            debug_assert!(c.is_one());
            return write!(f, "{}", self.num);
        }
        // Fold a pure rational numerator into "c/den" for readability.
        if let Some(c) = self.num.as_constant() {
            let sign = if c.is_negative() { "-" } else { "" };
            return write!(f, "{sign}{}/{}", fmt_rational(&c.abs()), wrap_den(&self.den));
        }
        write!(f, "{}/{}", wrap(&self.num), wrap_den(&self.den))
    }
}

impl fmt::Debug for Coeff {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// Parses expressions such as `3*alpha^2/2 - sqrt(eps)*h^-2 + 0.25`.
///
/// Grammar: numbers (integer, decimal, or `a/b` via division), identifiers,
/// `+ - * /`, `^` with an integer exponent, parentheses, and `sqrt(x)` where
/// `x` is a non-negative rational constant that is a perfect square times 2,
/// a perfect square, or a bare identifier.
pub fn parse_coeff(input: &str) -> Result<Coeff, CoeffError> {
    let mut p = Parser { src: input, chars: input.char_indices().peekable() };
    let c = p.expr()?;
    p.skip_ws();
    if let Some((i, ch)) = p.chars.peek().copied() {
        return Err(p.err(&format!("unexpected `{ch}` at offset {i}")));
    }
    Ok(c)
}

struct Parser<'a> {
    src: &'a str,
    chars: std::iter::Peekable<std::str::CharIndices<'a>>,
}

impl Parser<'_> {
    fn err(&self, reason: &str) -> CoeffError {
        CoeffError::Parse { input: self.src.to_string(), reason: reason.to_string() }
    }

    fn skip_ws(&mut self) {
        while matches!(self.chars.peek(), Some((_, c)) if c.is_whitespace()) {
            self.chars.next();
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.chars.peek().map(|(_, c)| *c)
    }

    fn expr(&mut self) -> Result<Coeff, CoeffError> {
        let mut acc = self.term()?;
        loop {
            match self.peek() {
                Some('+') => {
                    self.chars.next();
                    acc = &acc + &self.term()?;
                }
                Some('-') => {
                    self.chars.next();
                    acc = &acc - &self.term()?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<Coeff, CoeffError> {
        let mut acc = self.unary()?;
        loop {
            match self.peek() {
                Some('*') => {
                    self.chars.next();
                    acc = &acc * &self.unary()?;
                }
                Some('/') => {
                    self.chars.next();
                    let d = self.unary()?;
                    acc = acc.checked_div(&d).map_err(|e| self.err(&e.to_string()))?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn unary(&mut self) -> Result<Coeff, CoeffError> {
        if self.peek() == Some('-') {
            self.chars.next();
            return Ok(-&self.unary()?);
        }
        if self.peek() == Some('+') {
            self.chars.next();
        }
        self.power()
    }

    fn power(&mut self) -> Result<Coeff, CoeffError> {
        let base = self.atom()?;
        if self.peek() == Some('^') {
            self.chars.next();
            let e = self.unary()?;
            let n = e
                .as_rational()
                .filter(|q| q.is_integer())
                .and_then(|q| i32::try_from(q.to_integer()).ok())
                .ok_or_else(|| self.err("exponent must be an integer"))?;
            return base.powi(n).map_err(|e| self.err(&e.to_string()));
        }
        Ok(base)
    }

    fn take_while(&mut self, pred: impl Fn(char) -> bool) -> String {
        self.skip_ws();
        let mut s = String::new();
        while let Some((_, c)) = self.chars.peek() {
            if pred(*c) {
                s.push(*c);
                self.chars.next();
            } else {
                break;
            }
        }
        s
    }

    fn atom(&mut self) -> Result<Coeff, CoeffError> {
        match self.peek() {
            Some('(') => {
                self.chars.next();
                let e = self.expr()?;
                if self.peek() != Some(')') {
                    return Err(self.err("missing `)`"));
                }
                self.chars.next();
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() || c == '.' => {
                let lit = self.take_while(|c| c.is_ascii_digit() || c == '.');
                parse_decimal(&lit).ok_or_else(|| self.err(&format!("bad number `{lit}`")))
            }
            Some(c) if c.is_alphabetic() || c == '_' => {
                let id = self.take_while(|c| c.is_alphanumeric() || c == '_');
                if id == "sqrt" {
                    if self.peek() != Some('(') {
                        return Err(self.err("sqrt needs parentheses"));
                    }
                    self.chars.next();
                    let inner = self.expr()?;
                    if self.peek() != Some(')') {
                        return Err(self.err("missing `)` after sqrt"));
                    }
                    self.chars.next();
                    return sqrt_coeff(&inner).ok_or_else(|| {
                        self.err(&format!("sqrt({inner}) is not supported: use a perfect square, 2, or a symbol"))
                    });
                }
                if let Some(base) = id.strip_prefix("sqrt_") {
                    return Ok(Coeff::sqrt_of(base));
                }
                Ok(Coeff::sym(&id))
            }
            Some(c) => Err(self.err(&format!("unexpected `{c}`"))),
            None => Err(self.err("unexpected end of input")),
        }
    }
}

fn parse_decimal(lit: &str) -> Option<Coeff> {
    let (int, frac) = match lit.split_once('.') {
        Some((a, b)) => (a, b),
        None => (lit, ""),
    };
    if int.is_empty() && frac.is_empty() {
        return None;
    }
    let digits = format!("{int}{frac}");
    let n: BigInt = digits.parse().ok()?;
    let d = num_traits::pow(BigInt::from(10), frac.len());
    Some(Coeff::from_rational(BigRational::new(n, d)))
}

/// Square root of a rational constant `q²·m` with `m ∈ {1, 2}`, or of a
/// single symbol.
pub fn sqrt_coeff(c: &Coeff) -> Option<Coeff> {
    if let Some(q) = c.as_rational() {
        if q.is_negative() {
            return None;
        }
        let (n, d) = (q.numer().clone(), q.denom().clone());
        for (mult, root) in [(1u32, None), (2u32, Some(Coeff::sqrt2()))] {
            let mult = BigInt::from(mult);
            // q = (a/b)² · mult  ⇔  n·d/mult is a perfect square
            let nd = &n * &d;
            if &nd % &mult != BigInt::zero() {
                continue;
            }
            let inner: BigInt = &nd / &mult;
            let r = inner.sqrt();
            if &r * &r == inner {
                let base = Coeff::from_rational(BigRational::new(r, d.clone()));
                return Some(match root {
                    Some(s) => &base * &s,
                    None => base,
                });
            }
        }
        return None;
    }
    if c.denom().as_constant().is_some() {
        if let Some((pp, k)) = c.numer().as_monomial() {
            if k.is_one() && pp.factors().len() == 1 && pp.factors()[0].1 == 1 {
                return Some(Coeff::from_poly(Poly::symbol(sqrt_symbol(&pp.factors()[0].0))));
            }
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> Coeff {
        parse_coeff(s).unwrap()
    }

    #[test]
    fn difference_of_equal_values_is_literal_zero() {
        let a = p("x/(x+y) + y/(x+y)");
        assert!((&a - &Coeff::one()).is_zero());
        assert_eq!(p("1/sqrt(2)"), &Coeff::sqrt2() / &Coeff::int(2));
    }

    #[test]
    fn display_round_trips() {
        for text in ["e1/(ra^3*rb^3)", "-3/(a*b^2)", "(a - b)/(2*c)", "(1 + x)/(y + 1)", "sqrt_eps*alpha/(h^2*beta)"] {
            let c = p(text);
            assert_eq!(p(&c.to_string()), c, "{text} -> {c}");
        }
    }

    #[test]
    fn sqrt_rules() {
        let s = Coeff::sqrt_of("eps");
        assert_eq!(&s * &s, Coeff::sym("eps"));
        assert_eq!(p("sqrt(8)"), &Coeff::int(2) * &Coeff::sqrt2());
        assert_eq!(p("2^(-3)") , Coeff::rational(1, 8));
        assert_eq!(p("sqrt(9/4)"), Coeff::rational(3, 2));
    }

    #[test]
    fn monomial_denominators_are_rationalized() {
        let c = p("3/(2*sqrt(2)*a)");
        assert!(c.denom().as_monomial().is_some());
        assert!(!c.denom().symbols().iter().any(|s| s.name() == SQRT2));
        assert_eq!(&c * &p("2*sqrt(2)*a"), Coeff::int(3));
    }

    #[test]
    fn decimals_are_exact() {
        assert_eq!(p("0.25"), Coeff::rational(1, 4));
        assert_eq!(p("-1.5*e"), &Coeff::rational(-3, 2) * &Coeff::sym("e"));
    }

    #[test]
    fn non_monomial_denominators_compare_exactly() {
        let a = p("1/(a+b)");
        let b = p("2/(2*a+2*b)");
        assert_eq!(a, b);
        assert_ne!(a, p("1/(a-b)"));
    }

    #[test]
    fn substitution() {
        let c = p("alpha^2*eps/4");
        let s = c.substitute(&Symbol::new("alpha"), &p("sqrt(eps)/3")).unwrap();
        assert_eq!(s, p("eps^2/36"));
    }
}
