//! Sparse multivariate polynomials over ℚ in named parameters.
//!
//! Symbols may carry a square reduction rule `s² → replacement`, used for
//! square-root base symbols such as `sqrt2` (`sqrt2² → 2`). Every polynomial
//! built through the public operations is kept reduced: no symbol with a rule
//! appears with exponent ≥ 2.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::{Arc, OnceLock, RwLock};

/// Name of the built-in square root of two.
pub const SQRT2: &str = "sqrt2";

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Symbol(Arc<str>);

impl Symbol {
    pub fn new(name: &str) -> Self {
        Symbol(Arc::from(name))
    }

    pub fn name(&self) -> &str {
        &self.0
    }
}

impl fmt::Debug for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

fn rules() -> &'static RwLock<HashMap<Symbol, Poly>> {
    static RULES: OnceLock<RwLock<HashMap<Symbol, Poly>>> = OnceLock::new();
    RULES.get_or_init(|| {
        let mut m = HashMap::new();
        m.insert(Symbol::new(SQRT2), Poly::integer(2));
        RwLock::new(m)
    })
}

/// Registers `sym² → square`. Re-declaring the same rule is a no-op; a
/// conflicting redeclaration is rejected.
pub fn declare_square_rule(sym: &Symbol, square: Poly) -> Result<(), String> {
    let mut guard = rules().write().expect("rule registry poisoned");
    match guard.get(sym) {
        Some(existing) if *existing == square => Ok(()),
        Some(existing) => Err(format!(
            "symbol {sym} already has square rule {existing}, cannot redefine as {square}"
        )),
        None => {
            guard.insert(sym.clone(), square);
            Ok(())
        }
    }
}

pub fn square_rule(sym: &Symbol) -> Option<Poly> {
    rules().read().expect("rule registry poisoned").get(sym).cloned()
}

/// Symbol standing for `sqrt(base)`, with its rule registered.
pub fn sqrt_symbol(base: &Symbol) -> Symbol {
    let s = Symbol::new(&format!("sqrt_{}", base.name()));
    // The rule for a derived name is always the same polynomial.
    let _ = declare_square_rule(&s, Poly::symbol(base.clone()));
    s
}

/// Product of symbol powers with positive exponents, sorted by symbol.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct PowerProduct(Vec<(Symbol, u32)>);

impl PowerProduct {
    pub fn one() -> Self {
        PowerProduct(Vec::new())
    }

    pub fn var(s: Symbol) -> Self {
        PowerProduct(vec![(s, 1)])
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|(_, e)| e).sum()
    }

    pub fn factors(&self) -> &[(Symbol, u32)] {
        &self.0
    }

    pub fn exponent(&self, s: &Symbol) -> u32 {
        self.0
            .iter()
            .find(|(t, _)| t == s)
            .map(|(_, e)| *e)
            .unwrap_or(0)
    }

    pub fn mul(&self, other: &PowerProduct) -> PowerProduct {
        let mut out: Vec<(Symbol, u32)> = Vec::with_capacity(self.0.len() + other.0.len());
        let (mut i, mut j) = (0, 0);
        while i < self.0.len() || j < other.0.len() {
            match (self.0.get(i), other.0.get(j)) {
                (Some(a), Some(b)) => match a.0.cmp(&b.0) {
                    Ordering::Less => {
                        out.push(a.clone());
                        i += 1;
                    }
                    Ordering::Greater => {
                        out.push(b.clone());
                        j += 1;
                    }
                    Ordering::Equal => {
                        out.push((a.0.clone(), a.1 + b.1));
                        i += 1;
                        j += 1;
                    }
                },
                (Some(a), None) => {
                    out.push(a.clone());
                    i += 1;
                }
                (None, Some(b)) => {
                    out.push(b.clone());
                    j += 1;
                }
                (None, None) => unreachable!(),
            }
        }
        PowerProduct(out)
    }

    /// `self / other` if `other` divides `self`.
    pub fn div(&self, other: &PowerProduct) -> Option<PowerProduct> {
        let mut out = Vec::new();
        for (s, e) in &self.0 {
            let d = other.exponent(s);
            if d > *e {
                return None;
            }
            if d < *e {
                out.push((s.clone(), e - d));
            }
        }
        if other.0.iter().any(|(s, _)| self.exponent(s) == 0) {
            return None;
        }
        Some(PowerProduct(out))
    }

    pub fn gcd(&self, other: &PowerProduct) -> PowerProduct {
        let mut out = Vec::new();
        for (s, e) in &self.0 {
            let d = other.exponent(s).min(*e);
            if d > 0 {
                out.push((s.clone(), d));
            }
        }
        PowerProduct(out)
    }
}

/// Graded lexicographic order.
impl Ord for PowerProduct {
    fn cmp(&self, other: &Self) -> Ordering {
        match self.degree().cmp(&other.degree()) {
            Ordering::Equal => {}
            o => return o,
        }
        let (mut i, mut j) = (0, 0);
        loop {
            match (self.0.get(i), other.0.get(j)) {
                (None, None) => return Ordering::Equal,
                (Some(_), None) => return Ordering::Greater,
                (None, Some(_)) => return Ordering::Less,
                (Some(a), Some(b)) => match a.0.cmp(&b.0) {
                    // `self` has the smaller symbol with positive exponent
                    Ordering::Less => return Ordering::Greater,
                    Ordering::Greater => return Ordering::Less,
                    Ordering::Equal => match a.1.cmp(&b.1) {
                        Ordering::Equal => {
                            i += 1;
                            j += 1;
                        }
                        o => return o,
                    },
                },
            }
        }
    }
}

impl PartialOrd for PowerProduct {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for PowerProduct {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for PowerProduct {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("1");
        }
        for (k, (s, e)) in self.0.iter().enumerate() {
            if k > 0 {
                f.write_str("*")?;
            }
            if *e == 1 {
                write!(f, "{s}")?;
            } else {
                write!(f, "{s}^{e}")?;
            }
        }
        Ok(())
    }
}

#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Poly {
    terms: BTreeMap<PowerProduct, BigRational>,
}

impl Poly {
    pub fn zero() -> Self {
        Poly::default()
    }

    pub fn one() -> Self {
        Poly::constant(BigRational::one())
    }

    pub fn integer(n: i64) -> Self {
        Poly::constant(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn constant(c: BigRational) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(PowerProduct::one(), c);
        }
        Poly { terms }
    }

    pub fn symbol(s: Symbol) -> Self {
        Poly::term(PowerProduct::var(s), BigRational::one())
    }

    pub fn term(pp: PowerProduct, c: BigRational) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(pp, c);
        }
        Poly { terms }.reduced()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&PowerProduct, &BigRational)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn as_constant(&self) -> Option<BigRational> {
        match self.terms.len() {
            0 => Some(BigRational::zero()),
            1 => {
                let (pp, c) = self.terms.iter().next().unwrap();
                pp.is_one().then(|| c.clone())
            }
            _ => None,
        }
    }

    pub fn as_monomial(&self) -> Option<(&PowerProduct, &BigRational)> {
        if self.terms.len() == 1 {
            self.terms.iter().next()
        } else {
            None
        }
    }

    pub fn leading(&self) -> Option<(&PowerProduct, &BigRational)> {
        self.terms.iter().next_back()
    }

    pub fn symbols(&self) -> Vec<Symbol> {
        let mut out: Vec<Symbol> = self
            .terms
            .keys()
            .flat_map(|pp| pp.0.iter().map(|(s, _)| s.clone()))
            .collect();
        out.sort();
        out.dedup();
        out
    }

    /// GCD of all power products (the monomial content).
    pub fn monomial_content(&self) -> PowerProduct {
        let mut it = self.terms.keys();
        let Some(first) = it.next() else {
            return PowerProduct::one();
        };
        it.fold(first.clone(), |g, pp| g.gcd(pp))
    }

    pub fn scale(&self, c: &BigRational) -> Poly {
        if c.is_zero() {
            return Poly::zero();
        }
        Poly {
            terms: self.terms.iter().map(|(k, v)| (k.clone(), v * c)).collect(),
        }
    }

    pub fn mul_pp(&self, pp: &PowerProduct) -> Poly {
        Poly {
            terms: self.terms.iter().map(|(k, v)| (k.mul(pp), v.clone())).collect(),
        }
        .reduced()
    }

    /// Divides every power product by `pp`; caller guarantees divisibility.
    pub fn div_pp(&self, pp: &PowerProduct) -> Poly {
        Poly {
            terms: self
                .terms
                .iter()
                .map(|(k, v)| (k.div(pp).expect("power product not divisible"), v.clone()))
                .collect(),
        }
    }

    pub fn pow(&self, n: u32) -> Poly {
        let mut acc = Poly::one();
        for _ in 0..n {
            acc = &acc * self;
        }
        acc
    }

    fn add_term(terms: &mut BTreeMap<PowerProduct, BigRational>, pp: PowerProduct, c: BigRational) {
        if c.is_zero() {
            return;
        }
        match terms.get_mut(&pp) {
            Some(v) => {
                *v += c;
                if v.is_zero() {
                    terms.remove(&pp);
                }
            }
            None => {
                terms.insert(pp, c);
            }
        }
    }

    /// Applies the square reduction rules to a fixpoint.
    pub fn reduced(self) -> Poly {
        let guard = rules().read().expect("rule registry poisoned");
        let needs = |pp: &PowerProduct| pp.0.iter().any(|(s, e)| *e >= 2 && guard.contains_key(s));
        if !self.terms.keys().any(needs) {
            return self;
        }
        let mut current = self;
        loop {
            let mut out = BTreeMap::new();
            let mut changed = false;
            for (pp, c) in current.terms {
                if !needs(&pp) {
                    Poly::add_term(&mut out, pp, c);
                    continue;
                }
                changed = true;
                let mut kept = Vec::new();
                let mut factor = Poly::one();
                for (s, e) in pp.0 {
                    match guard.get(&s) {
                        Some(rep) if e >= 2 => {
                            if e % 2 == 1 {
                                kept.push((s.clone(), 1));
                            }
                            for _ in 0..e / 2 {
                                factor = factor.mul_raw(rep);
                            }
                        }
                        _ => kept.push((s, e)),
                    }
                }
                let base = PowerProduct(kept);
                for (fpp, fc) in factor.terms {
                    Poly::add_term(&mut out, fpp.mul(&base), fc * &c);
                }
            }
            current = Poly { terms: out };
            if !changed || !current.terms.keys().any(needs) {
                return current;
            }
        }
    }

    fn mul_raw(&self, other: &Poly) -> Poly {
        let mut out = BTreeMap::new();
        for (a, ca) in &self.terms {
            for (b, cb) in &other.terms {
                Poly::add_term(&mut out, a.mul(b), ca * cb);
            }
        }
        Poly { terms: out }
    }

    /// Exact quotient `self / d`, or `None` when `d` does not divide `self`.
    pub fn div_exact(&self, d: &Poly) -> Option<Poly> {
        let (lpp, lc) = d.leading()?;
        let (lpp, lc) = (lpp.clone(), lc.clone());
        let mut rem = self.clone();
        let mut quot = Poly::zero();
        // Reduction rules break the monomial-order guarantees of plain
        // division, so bound the iteration count.
        let mut budget = 64 * (self.len() + 1) * (d.len() + 1);
        while let Some((rpp, rc)) = rem.leading() {
            if budget == 0 {
                return None;
            }
            budget -= 1;
            let q_pp = rpp.div(&lpp)?;
            let q_c = rc / &lc;
            let t = Poly {
                terms: BTreeMap::from([(q_pp, q_c)]),
            };
            rem = &rem - &(&t * d);
            quot = &quot + &t;
        }
        Some(quot)
    }

    /// Evaluates with the given symbol values. Symbols with a square rule
    /// and no explicit value evaluate to the square root of their rule.
    pub fn eval(&self, values: &dyn Fn(&Symbol) -> Option<f64>) -> Result<f64, Symbol> {
        let mut total = 0.0;
        for (pp, c) in &self.terms {
            let mut t = rational_to_f64(c);
            for (s, e) in &pp.0 {
                let x = symbol_value(s, values)?;
                t *= x.powi(*e as i32);
            }
            total += t;
        }
        Ok(total)
    }
}

pub(crate) fn symbol_value(s: &Symbol, values: &dyn Fn(&Symbol) -> Option<f64>) -> Result<f64, Symbol> {
    if let Some(x) = values(s) {
        return Ok(x);
    }
    match square_rule(s) {
        Some(rep) => Ok(rep.eval(values)?.sqrt()),
        None => Err(s.clone()),
    }
}

pub fn rational_to_f64(c: &BigRational) -> f64 {
    match (c.numer().to_f64(), c.denom().to_f64()) {
        (Some(n), Some(d)) if n.is_finite() && d.is_finite() => n / d,
        _ => {
            // Scale down huge numerators and denominators together.
            let shift = c.numer().bits().max(c.denom().bits()).saturating_sub(1000) as usize;
            let n = (c.numer() >> shift).to_f64().unwrap_or(f64::NAN);
            let d = (c.denom() >> shift).to_f64().unwrap_or(f64::NAN);
            n / d
        }
    }
}

impl<'a> Add<&'a Poly> for &'a Poly {
    type Output = Poly;
    fn add(self, rhs: &'a Poly) -> Poly {
        let mut terms = self.terms.clone();
        for (k, v) in &rhs.terms {
            Poly::add_term(&mut terms, k.clone(), v.clone());
        }
        Poly { terms }
    }
}

impl<'a> Sub<&'a Poly> for &'a Poly {
    type Output = Poly;
    fn sub(self, rhs: &'a Poly) -> Poly {
        let mut terms = self.terms.clone();
        for (k, v) in &rhs.terms {
            Poly::add_term(&mut terms, k.clone(), -v.clone());
        }
        Poly { terms }
    }
}

impl<'a> Mul<&'a Poly> for &'a Poly {
    type Output = Poly;
    fn mul(self, rhs: &'a Poly) -> Poly {
        self.mul_raw(rhs).reduced()
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly {
            terms: self.terms.iter().map(|(k, v)| (k.clone(), -v.clone())).collect(),
        }
    }
}

pub(crate) fn fmt_rational(c: &BigRational) -> String {
    if c.is_integer() {
        c.numer().to_string()
    } else {
        format!("{}/{}", c.numer(), c.denom())
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (k, (pp, c)) in self.terms.iter().rev().enumerate() {
            let neg = c.is_negative();
            let mag = c.abs();
            if k == 0 {
                if neg {
                    f.write_str("-")?;
                }
            } else {
                f.write_str(if neg { " - " } else { " + " })?;
            }
            if pp.is_one() {
                f.write_str(&fmt_rational(&mag))?;
            } else if mag.is_one() {
                write!(f, "{pp}")?;
            } else {
                write!(f, "{}*{pp}", fmt_rational(&mag))?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sym(s: &str) -> Poly {
        Poly::symbol(Symbol::new(s))
    }

    #[test]
    fn sqrt2_reduces() {
        let s = sym(SQRT2);
        assert_eq!(&s * &s, Poly::integer(2));
        let cube = s.pow(3);
        assert_eq!(cube, &Poly::integer(2) * &s);
    }

    #[test]
    fn exact_division() {
        let x = sym("x");
        let y = sym("y");
        let a = &(&x + &y) * &(&x - &y);
        let q = a.div_exact(&(&x + &y)).unwrap();
        assert_eq!(q, &x - &y);
        assert!(x.div_exact(&(&x + &y)).is_none());
    }

    #[test]
    fn grlex_is_multiplicative() {
        let a = PowerProduct::var(Symbol::new("a"));
        let b = PowerProduct::var(Symbol::new("b"));
        assert!(a > b);
        assert!(a.mul(&a) > a.mul(&b));
        assert!(b.mul(&b) > a);
    }
}
