//! Polynomial densities on the circle and polynomials in their integrals.

use super::coeff::Coeff;
use super::normalize::integrate_monomial;
use num_rational::BigRational;
use num_traits::One;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt;

/// Field variables. `Qx` stands for `q_x`: its derivative order counts
/// derivatives beyond the first, so `Local { var: Qx, d: 1 }` is `q_xx`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Var {
    U,
    V,
    Qx,
    P,
    R,
    W,
}

impl Var {
    pub const ALL: [Var; 6] = [Var::U, Var::V, Var::Qx, Var::P, Var::R, Var::W];

    pub fn name(self) -> &'static str {
        match self {
            Var::U => "u",
            Var::V => "v",
            Var::Qx => "q",
            Var::P => "p",
            Var::R => "r",
            Var::W => "w",
        }
    }

    /// Derivative order of the stored base field (`q_x` is one derivative of `q`).
    pub fn base_order(self) -> u32 {
        match self {
            Var::Qx => 1,
            _ => 0,
        }
    }

    pub fn from_name(s: &str) -> Option<Var> {
        Var::ALL.into_iter().find(|v| v.name() == s).or(match s {
            "q_x" | "qx" => Some(Var::Qx),
            _ => None,
        })
    }

    fn symbol(self, d: u32) -> String {
        let total = d + self.base_order();
        if total == 0 {
            self.name().to_string()
        } else {
            format!("{}_{}", self.name(), "x".repeat(total as usize))
        }
    }
}

/// A single factor of a monomial.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Factor {
    /// `∂ˣᵈ` of the base field of `var`.
    Local { var: Var, d: u32 },
    /// Zero-mean antiderivative of a product of derivatives of one variable.
    /// `inner` holds the sorted derivative orders of that product.
    Anti { var: Var, inner: Vec<u32> },
}

impl Factor {
    pub fn local(var: Var, d: u32) -> Factor {
        Factor::Local { var, d }
    }

    pub fn anti(var: Var, mut inner: Vec<u32>) -> Result<Factor, AlgebraError> {
        if inner.is_empty() {
            return Err(AlgebraError::EmptyAntiderivative);
        }
        inner.sort_unstable();
        Ok(Factor::Anti { var, inner })
    }

    pub fn var(&self) -> Var {
        match self {
            Factor::Local { var, .. } | Factor::Anti { var, .. } => *var,
        }
    }

    pub fn is_anti(&self) -> bool {
        matches!(self, Factor::Anti { .. })
    }

    /// Local factors making up an antiderivative's integrand.
    pub fn inner_factors(&self) -> Vec<Factor> {
        match self {
            Factor::Anti { var, inner } => inner.iter().map(|&d| Factor::local(*var, d)).collect(),
            Factor::Local { .. } => vec![self.clone()],
        }
    }
}

impl fmt::Display for Factor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Factor::Local { var, d } => write!(f, "{}", var.symbol(*d)),
            Factor::Anti { var, inner } => {
                let locals: Vec<Factor> = inner.iter().map(|&d| Factor::local(*var, d)).collect();
                write!(f, "D^-1({})", fmt_factors(&locals))
            }
        }
    }
}

/// A sorted list of factors. The empty list is the constant 1.
pub type Monomial = Vec<Factor>;

pub(crate) fn fmt_factors(fs: &[Factor]) -> String {
    if fs.is_empty() {
        return "1".into();
    }
    let mut out = Vec::new();
    let mut i = 0;
    while i < fs.len() {
        let mut j = i;
        while j < fs.len() && fs[j] == fs[i] {
            j += 1;
        }
        let n = j - i;
        out.push(if n == 1 { fs[i].to_string() } else { format!("{}^{n}", fs[i]) });
        i = j;
    }
    out.join("*")
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum AlgebraError {
    #[error("antiderivative of an empty product")]
    EmptyAntiderivative,
    #[error("antiderivative of a mixed product `{0}`")]
    MixedAntiderivative(String),
    #[error("variation of `{0}` needs nested antiderivatives")]
    NestingDepth(String),
    #[error("mixed nonlocal factor in `{0}`")]
    MixedNonlocal(String),
    #[error("antiderivative factor in graded monomial `{0}`")]
    Ungraded(String),
    #[error("more than one non-invariant atom in product `{0}`")]
    NonInvariantProduct(String),
    #[error("non-constant Poisson tensor entry")]
    NonConstantTensor,
    #[error("variable {0:?} not in the Poisson structure")]
    UnknownVariable(Var),
    #[error(transparent)]
    Coeff(#[from] super::coeff::CoeffError),
    #[error("{0}")]
    Other(String),
}

/// Applies `∂⁻¹ w^(d) = w^(d-1)` for single-factor integrands and sorts.
pub fn settle(mut fs: Vec<Factor>) -> Monomial {
    for f in fs.iter_mut() {
        if let Factor::Anti { var, inner } = f {
            if inner.len() == 1 && inner[0] >= 1 {
                *f = Factor::local(*var, inner[0] - 1);
            }
        }
    }
    fs.sort();
    fs
}

/// `true` for a single factor: derivatives and antiderivatives integrate to
/// zero, and base fields do by the zero-mean convention.
pub fn is_zero_mean_atom(m: &[Factor]) -> bool {
    m.len() == 1
}

/// Product of monomials.
pub fn mul_monomials(a: &[Factor], b: &[Factor]) -> Monomial {
    let mut v = a.to_vec();
    v.extend_from_slice(b);
    settle(v)
}

/// Sorted multiset of atoms; the empty key is the constant 1.
pub type AtomProduct = Vec<Monomial>;

fn merge_atoms(a: &[Monomial], b: &[Monomial]) -> AtomProduct {
    let mut v = a.to_vec();
    v.extend_from_slice(b);
    v.sort();
    v
}

/// Polynomial in circle-integral atoms. Each atom is a canonical monomial
/// and stands for its integral over the unit circle.
#[derive(Clone, Default, PartialEq, Eq)]
pub struct Observable {
    terms: BTreeMap<AtomProduct, Coeff>,
}

impl Observable {
    pub fn zero() -> Self {
        Observable::default()
    }

    pub fn constant(c: Coeff) -> Self {
        let mut o = Observable::zero();
        o.add_term(Vec::new(), c);
        o
    }

    /// `∮ m` for a single monomial.
    pub fn integral_of(m: &[Factor]) -> Self {
        Observable::from_rational_terms(integrate_monomial(m))
    }

    pub(crate) fn from_rational_terms(t: Vec<(AtomProduct, BigRational)>) -> Self {
        let mut o = Observable::zero();
        for (k, c) in t {
            o.add_term(k, Coeff::from_rational(c));
        }
        o
    }

    pub fn add_term(&mut self, key: AtomProduct, c: Coeff) {
        if c.is_zero() {
            return;
        }
        if key.iter().any(|a| is_zero_mean_atom(a)) {
            return;
        }
        let e = self.terms.entry(key.clone()).or_insert_with(Coeff::zero);
        *e = &*e + &c;
        if e.is_zero() {
            self.terms.remove(&key);
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&AtomProduct, &Coeff)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, key: &[Monomial]) -> Coeff {
        self.terms.get(key).cloned().unwrap_or_else(Coeff::zero)
    }

    /// Coefficient of a single atom `∮ m` (m need not be canonical).
    pub fn coefficient_of_integral(&self, m: &[Factor]) -> Option<Coeff> {
        let probe = Observable::integral_of(m);
        let (key, c) = probe.terms.iter().next()?;
        if probe.len() != 1 || key.len() != 1 {
            return None;
        }
        Some(&self.coefficient(key) / c)
    }

    pub fn scale(&self, c: &Coeff) -> Observable {
        let mut o = Observable::zero();
        for (k, v) in &self.terms {
            o.add_term(k.clone(), v * c);
        }
        o
    }

    pub fn map_coeffs(&self, f: impl Fn(&Coeff) -> Result<Coeff, AlgebraError>) -> Result<Observable, AlgebraError> {
        let mut o = Observable::zero();
        for (k, v) in &self.terms {
            o.add_term(k.clone(), f(v)?);
        }
        Ok(o)
    }

    pub fn add(&self, other: &Observable) -> Observable {
        let mut o = self.clone();
        for (k, v) in &other.terms {
            o.add_term(k.clone(), v.clone());
        }
        o
    }

    pub fn sub(&self, other: &Observable) -> Observable {
        self.add(&other.scale(&Coeff::int(-1)))
    }

    pub fn mul(&self, other: &Observable) -> Observable {
        let mut o = Observable::zero();
        for (ka, va) in &self.terms {
            for (kb, vb) in &other.terms {
                o.add_term(merge_atoms(ka, kb), va * vb);
            }
        }
        o
    }

    /// Variables appearing anywhere.
    pub fn vars(&self) -> Vec<Var> {
        let mut v: Vec<Var> = self.terms.keys().flatten().flatten().map(|f| f.var()).collect();
        v.sort();
        v.dedup();
        v
    }

    /// The density whose integral this is. Atom products keep their largest
    /// atom as the local part.
    pub fn to_density(&self) -> Density {
        let mut d = Density::zero();
        for (k, c) in &self.terms {
            let mut atoms = k.clone();
            let factors = atoms.pop().unwrap_or_default();
            d.add_term(Term { atoms, factors }, c.clone());
        }
        d
    }
}

impl fmt::Display for Observable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(k, c)| {
                let key = if k.is_empty() {
                    "1".to_string()
                } else {
                    k.iter().map(|a| format!("<{}>", fmt_factors(a))).collect::<Vec<_>>().join("*")
                };
                format!("({c})*{key}")
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

impl fmt::Debug for Observable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// One density monomial: a product of atoms (scalars) and field factors.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Term {
    pub atoms: AtomProduct,
    pub factors: Monomial,
}

impl Term {
    pub fn local(factors: Vec<Factor>) -> Term {
        Term { atoms: Vec::new(), factors: settle(factors) }
    }

    fn mul(&self, other: &Term) -> Term {
        Term { atoms: merge_atoms(&self.atoms, &other.atoms), factors: mul_monomials(&self.factors, &other.factors) }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for a in &self.atoms {
            write!(f, "<{}>*", fmt_factors(a))?;
        }
        write!(f, "{}", fmt_factors(&self.factors))
    }
}

/// A density: a finite sum of coefficient times term, as a pointwise function.
#[derive(Clone, Default, PartialEq, Eq)]
pub struct Density {
    terms: BTreeMap<Term, Coeff>,
}

impl Density {
    pub fn zero() -> Self {
        Density::default()
    }

    pub fn monomial(c: Coeff, factors: Vec<Factor>) -> Self {
        let mut d = Density::zero();
        d.add_term(Term::local(factors), c);
        d
    }

    pub fn constant(c: Coeff) -> Self {
        Density::monomial(c, Vec::new())
    }

    pub fn add_term(&mut self, mut t: Term, c: Coeff) {
        if c.is_zero() || t.atoms.iter().any(|a| is_zero_mean_atom(a)) {
            return;
        }
        t.factors = settle(t.factors);
        let e = self.terms.entry(t.clone()).or_insert_with(Coeff::zero);
        *e = &*e + &c;
        if e.is_zero() {
            self.terms.remove(&t);
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Term, &Coeff)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, t: &Term) -> Coeff {
        self.terms.get(t).cloned().unwrap_or_else(Coeff::zero)
    }

    pub fn scale(&self, c: &Coeff) -> Density {
        let mut d = Density::zero();
        for (t, v) in &self.terms {
            d.add_term(t.clone(), v * c);
        }
        d
    }

    pub fn add(&self, other: &Density) -> Density {
        let mut d = self.clone();
        for (t, v) in &other.terms {
            d.add_term(t.clone(), v.clone());
        }
        d
    }

    pub fn sub(&self, other: &Density) -> Density {
        self.add(&other.scale(&Coeff::int(-1)))
    }

    pub fn mul(&self, other: &Density) -> Density {
        let mut d = Density::zero();
        for (ta, va) in &self.terms {
            for (tb, vb) in &other.terms {
                d.add_term(ta.mul(tb), va * vb);
            }
        }
        d
    }

    /// Multiplies every term by an observable (a scalar on the circle).
    pub fn mul_observable(&self, o: &Observable) -> Density {
        let mut d = Density::zero();
        for (t, v) in &self.terms {
            for (k, c) in o.terms() {
                d.add_term(Term { atoms: merge_atoms(&t.atoms, k), factors: t.factors.clone() }, v * c);
            }
        }
        d
    }

    /// Total x-derivative. `∂ D⁻¹(M) = M − ∮M`.
    pub fn dx(&self) -> Density {
        let mut out = Density::zero();
        for (t, c) in &self.terms {
            for (i, f) in t.factors.iter().enumerate() {
                let mut rest = t.factors.clone();
                rest.remove(i);
                match f {
                    Factor::Local { var, d } => {
                        rest.push(Factor::local(*var, d + 1));
                        out.add_term(Term { atoms: t.atoms.clone(), factors: rest }, c.clone());
                    }
                    Factor::Anti { .. } => {
                        let inner = f.inner_factors();
                        let mean: Vec<(AtomProduct, BigRational)> = integrate_monomial(&inner);
                        let mut with_inner = rest.clone();
                        with_inner.extend(inner);
                        out.add_term(Term { atoms: t.atoms.clone(), factors: with_inner }, c.clone());
                        for (k, q) in mean {
                            let atoms = merge_atoms(&t.atoms, &k);
                            out.add_term(Term { atoms, factors: rest.clone() }, -&c.scale(&q));
                        }
                    }
                }
            }
        }
        out
    }

    pub fn dx_n(&self, n: u32) -> Density {
        (0..n).fold(self.clone(), |d, _| d.dx())
    }

    /// `∮` of the density as a canonical observable.
    pub fn integrate(&self) -> Observable {
        let mut o = Observable::zero();
        for (t, c) in &self.terms {
            let base = if t.factors.is_empty() {
                vec![(Vec::new(), BigRational::one())]
            } else {
                integrate_monomial(&t.factors)
            };
            for (k, q) in base {
                o.add_term(merge_atoms(&t.atoms, &k), c.scale(&q));
            }
        }
        o
    }

    /// Canonical representative modulo total derivatives.
    pub fn normalize(&self) -> Density {
        self.integrate().to_density()
    }

    pub fn map_coeffs(&self, f: impl Fn(&Coeff) -> Result<Coeff, AlgebraError>) -> Result<Density, AlgebraError> {
        let mut d = Density::zero();
        for (t, v) in &self.terms {
            d.add_term(t.clone(), f(v)?);
        }
        Ok(d)
    }

    pub fn vars(&self) -> Vec<Var> {
        let mut v: Vec<Var> = self
            .terms
            .keys()
            .flat_map(|t| t.factors.iter().chain(t.atoms.iter().flatten()))
            .map(|f| f.var())
            .collect();
        v.sort();
        v.dedup();
        v
    }

    /// Substitutes each variable by a density in other variables. Only
    /// local factors are supported; derivatives are applied to the image.
    pub fn substitute(&self, map: &dyn Fn(Var) -> Option<Density>) -> Result<Density, AlgebraError> {
        let mut out = Density::zero();
        for (t, c) in &self.terms {
            if !t.atoms.is_empty() {
                return Err(AlgebraError::Other("substitution into atom products".into()));
            }
            let mut acc = Density::constant(c.clone());
            for f in &t.factors {
                let img = match f {
                    Factor::Local { var, d } => match map(*var) {
                        Some(base) => base.dx_n(*d),
                        None => Density::monomial(Coeff::one(), vec![f.clone()]),
                    },
                    Factor::Anti { .. } => {
                        return Err(AlgebraError::Other(format!("substitution into antiderivative `{f}`")))
                    }
                };
                acc = acc.mul(&img);
            }
            out = out.add(&acc);
        }
        Ok(out)
    }
}

impl fmt::Display for Density {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self.terms.iter().map(|(t, c)| format!("({c})*{t}")).collect();
        write!(f, "{}", parts.join(" + "))
    }
}

impl fmt::Debug for Density {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// Shorthand for a local factor.
pub fn loc(var: Var, d: u32) -> Factor {
    Factor::local(var, d)
}

/// Shorthand for `D⁻¹` of a product of derivatives of one variable.
pub fn anti(var: Var, inner: &[u32]) -> Factor {
    Factor::anti(var, inner.to_vec()).expect("nonempty antiderivative")
}
