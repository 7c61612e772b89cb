//! Concrete graded Hamiltonians and their passage to Riemann invariants
//! `u = (q_x+p)/√2`, `v = (q_x−p)/√2`.

use crate::algebra::coeff::sqrt_coeff;
use crate::algebra::density::{AlgebraError, Density, Factor, Observable, Var};
use crate::algebra::{parse_coeff, Coeff, CoeffError};
use crate::normalform::{normal_form_mechanical, normal_form_order1, normal_form_order2, GradedHamiltonian, NormalFormResult};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::collections::{BTreeMap, HashMap};

#[derive(Debug, thiserror::Error)]
pub enum ModelError {
    #[error("a*b must be positive (elliptic fixed point), got a = {a}, b = {b}")]
    NotElliptic { a: String, b: String },
    #[error("cannot take the square root of {0}")]
    NoSquareRoot(String),
    #[error("nonlinearity degree p = {0} is out of range")]
    Degree(i64),
    #[error("model file: {0}")]
    File(String),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Coeff(#[from] CoeffError),
}

fn term(c: Coeff, fs: &[(Var, u32)]) -> Density {
    Density::monomial(c, fs.iter().map(|&(v, d)| Factor::local(v, d)).collect())
}

fn sum(parts: impl IntoIterator<Item = Density>) -> Density {
    parts.into_iter().fold(Density::zero(), |a, b| a.add(&b))
}

fn q(n: i64, d: i64) -> Coeff {
    Coeff::rational(n, d)
}

/// `(q_x, p) → ((u+v)/√2, (u−v)/√2)`.
pub fn riemann_substitute(d: &Density) -> Result<Density, AlgebraError> {
    let s = &Coeff::sqrt2() / &Coeff::int(2);
    let u = term(s.clone(), &[(Var::U, 0)]);
    let v = term(s, &[(Var::V, 0)]);
    let plus = u.add(&v);
    let minus = u.sub(&v);
    d.substitute(&|var| match var {
        Var::Qx => Some(plus.clone()),
        Var::P => Some(minus.clone()),
        _ => None,
    })
}

fn sqrt_or_err(c: &Coeff) -> Result<Coeff, ModelError> {
    sqrt_coeff(c).ok_or_else(|| ModelError::NoSquareRoot(c.to_string()))
}

/// `c^{k/2}`.
fn half_power(c: &Coeff, k: i64) -> Result<Coeff, ModelError> {
    let whole = c.powi((k.div_euclid(2)) as i32)?;
    if k.rem_euclid(2) == 0 {
        Ok(whole)
    } else {
        Ok(&whole * &sqrt_or_err(c)?)
    }
}

/// Generic family with `H₀ = ∮(a p² + b q_x²)/2 + c∮q_x p`.
#[derive(Clone, Debug)]
pub struct GenericModel {
    pub sigma: i8,
    /// `√|a|` and `√|b|`.
    pub root_a: Coeff,
    pub root_b: Coeff,
    pub c: Coeff,
    pub d1: Coeff,
    pub e: [Coeff; 7],
    pub f: [Coeff; 3],
    pub g: [Coeff; 14],
}

fn symbols<const N: usize>(prefix: &str) -> [Coeff; N] {
    std::array::from_fn(|i| Coeff::sym(&format!("{prefix}{}", i + 1)))
}

impl GenericModel {
    /// Every constant symbolic, with `|a| = ra²`, `|b| = rb²`.
    pub fn symbolic(sigma: i8) -> Self {
        GenericModel {
            sigma,
            root_a: Coeff::sym("ra"),
            root_b: Coeff::sym("rb"),
            c: Coeff::sym("c"),
            d1: Coeff::sym("d1"),
            e: symbols("e"),
            f: symbols("f"),
            g: symbols("g"),
        }
    }

    /// From `a`, `b`. Rational values must satisfy `ab > 0` and have an exact
    /// root of `|a|`, `|b|`; a lone symbol is read as a positive constant.
    pub fn from_ab(a: &Coeff, b: &Coeff) -> Result<Self, ModelError> {
        let sign = |x: &Coeff| x.as_rational().map(|r| if r.is_negative() { -1i8 } else if r.is_zero() { 0 } else { 1 });
        let sigma = match (sign(a), sign(b)) {
            (Some(x), Some(y)) if x == y && x != 0 => x,
            (None, None) => 1,
            (Some(x), None) | (None, Some(x)) if x == 1 => 1,
            _ => return Err(ModelError::NotElliptic { a: a.to_string(), b: b.to_string() }),
        };
        let s = Coeff::int(sigma as i64);
        let mut m = GenericModel::symbolic(sigma);
        m.root_a = sqrt_or_err(&(a * &s))?;
        m.root_b = sqrt_or_err(&(b * &s))?;
        m.c = Coeff::zero();
        m.d1 = Coeff::zero();
        m.e = std::array::from_fn(|_| Coeff::zero());
        m.f = std::array::from_fn(|_| Coeff::zero());
        m.g = std::array::from_fn(|_| Coeff::zero());
        Ok(m)
    }

    pub fn a(&self) -> Coeff {
        &(&self.root_a * &self.root_a) * &Coeff::int(self.sigma as i64)
    }

    pub fn b(&self) -> Coeff {
        &(&self.root_b * &self.root_b) * &Coeff::int(self.sigma as i64)
    }

    /// `H₀ … H₄` as densities in `(q_x, p)`.
    pub fn densities(&self) -> [Density; 5] {
        use Var::{Qx as Q, P};
        let e = &self.e;
        let f = &self.f;
        let g = &self.g;
        let h0 = sum([
            term(&self.a() * &q(1, 2), &[(P, 0), (P, 0)]),
            term(&self.b() * &q(1, 2), &[(Q, 0), (Q, 0)]),
            term(self.c.clone(), &[(Q, 0), (P, 0)]),
        ]);
        let h1 = term(self.d1.clone(), &[(Q, 0), (P, 1)]);
        let h2 = sum([
            term(e[0].clone(), &[(Q, 0); 3]),
            term(e[1].clone(), &[(P, 0); 3]),
            term(e[2].clone(), &[(Q, 0), (Q, 0), (P, 0)]),
            term(e[3].clone(), &[(Q, 0), (P, 0), (P, 0)]),
            term(e[4].clone(), &[(Q, 1), (Q, 1)]),
            term(e[5].clone(), &[(P, 1), (P, 1)]),
            term(e[6].clone(), &[(Q, 1), (P, 1)]),
        ]);
        let h3 = sum([
            term(f[0].clone(), &[(Q, 0), (Q, 0), (P, 1)]),
            term(f[1].clone(), &[(Q, 1), (P, 0), (P, 0)]),
            term(f[2].clone(), &[(Q, 1), (P, 2)]),
        ]);
        let h4 = sum([
            term(g[0].clone(), &[(Q, 0); 4]),
            term(g[1].clone(), &[(P, 0); 4]),
            term(g[2].clone(), &[(Q, 0), (Q, 0), (P, 0), (P, 0)]),
            term(g[3].clone(), &[(Q, 0), (Q, 0), (Q, 0), (P, 0)]),
            term(g[4].clone(), &[(Q, 0), (P, 0), (P, 0), (P, 0)]),
            term(g[5].clone(), &[(Q, 1), (Q, 1), (Q, 0)]),
            term(g[6].clone(), &[(Q, 1), (Q, 1), (P, 0)]),
            term(g[7].clone(), &[(P, 1), (P, 1), (Q, 0)]),
            term(g[8].clone(), &[(P, 1), (P, 1), (P, 0)]),
            term(g[9].clone(), &[(Q, 2), (P, 0), (P, 0)]),
            term(g[10].clone(), &[(Q, 0), (Q, 0), (P, 2)]),
            term(g[11].clone(), &[(Q, 2), (Q, 2)]),
            term(g[12].clone(), &[(P, 2), (P, 2)]),
            term(g[13].clone(), &[(Q, 3), (P, 1)]),
        ]);
        [h0, h1, h2, h3, h4]
    }

    /// Rescales `q_x → q_x/√|b|`, `p → p/√|a|`, multiplies by `σ` (time
    /// reversal when `a, b < 0`), drops `c·I`, then passes to `(u, v)`.
    pub fn to_uv(&self) -> Result<GradedHamiltonian, ModelError> {
        let ib = self.root_b.inv()?;
        let ia = self.root_a.inv()?;
        let sigma = Coeff::int(self.sigma as i64);
        let scale = |d: &Density| -> Result<Density, AlgebraError> {
            let qx = term(ib.clone(), &[(Var::Qx, 0)]);
            let p = term(ia.clone(), &[(Var::P, 0)]);
            Ok(d.substitute(&|v| match v {
                Var::Qx => Some(qx.clone()),
                Var::P => Some(p.clone()),
                _ => None,
            })?
            .scale(&sigma))
        };
        let [h0, rest @ ..] = self.densities();
        let h0 = scale(&h0)?;
        let ci = &(&(&self.c * &sigma) * &ia) * &ib;
        let h0 = h0.sub(&term(ci, &[(Var::Qx, 0), (Var::P, 0)]));
        let mut orders = BTreeMap::new();
        orders.insert(0, riemann_substitute(&h0)?.integrate());
        for (j, h) in rest.iter().enumerate() {
            orders.insert(j as u32 + 1, riemann_substitute(&scale(h)?)?.integrate());
        }
        Ok(GradedHamiltonian::new(orders, 1)?)
    }
}

/// `ℋ = p²/2 + 𝒰`, with `H₂ = ∮[α₁q_x³ + α₂q_xx²]`,
/// `H₄ = ∮[β₁q_x⁴ + β₂q_xx²q_x + β₃q_xxx²]`.
#[derive(Clone, Debug)]
pub struct MechanicalModel {
    pub alpha1: Coeff,
    pub alpha2: Coeff,
    pub beta1: Coeff,
    pub beta2: Coeff,
    pub beta3: Coeff,
}

impl MechanicalModel {
    pub fn symbolic() -> Self {
        MechanicalModel {
            alpha1: Coeff::sym("alpha1"),
            alpha2: Coeff::sym("alpha2"),
            beta1: Coeff::sym("beta1"),
            beta2: Coeff::sym("beta2"),
            beta3: Coeff::sym("beta3"),
        }
    }

    pub fn densities(&self) -> (Density, Density) {
        use Var::Qx as Q;
        let h2 = sum([term(self.alpha1.clone(), &[(Q, 0); 3]), term(self.alpha2.clone(), &[(Q, 1), (Q, 1)])]);
        let h4 = sum([
            term(self.beta1.clone(), &[(Q, 0); 4]),
            term(self.beta2.clone(), &[(Q, 1), (Q, 1), (Q, 0)]),
            term(self.beta3.clone(), &[(Q, 2), (Q, 2)]),
        ]);
        (h2, h4)
    }

    /// `(H₂, H₄)` in `(u, v)`.
    pub fn to_uv(&self) -> Result<(Observable, Observable), ModelError> {
        let (h2, h4) = self.densities();
        Ok((riemann_substitute(&h2)?.integrate(), riemann_substitute(&h4)?.integrate()))
    }

    pub fn graded(&self) -> Result<GradedHamiltonian, ModelError> {
        let (h2, h4) = self.to_uv()?;
        Ok(GradedHamiltonian::from_orders(h2, h4, 2)?)
    }

    pub fn normal_form(&self) -> Result<NormalFormResult, ModelError> {
        let (h2, h4) = self.to_uv()?;
        Ok(normal_form_mechanical(&h2, &h4)?)
    }
}

/// Coefficient of `∂^{2n}` in `Δ_h = Σ_n 2h^{2n−2}/(2n)! ∂^{2n}`.
pub fn laplacian_coefficient(h: &Coeff, n: u32) -> Result<Coeff, CoeffError> {
    let mut fact = BigInt::one();
    for k in 1..=(2 * n) {
        fact *= BigInt::from(k);
    }
    let c = BigRational::new(BigInt::from(2), fact);
    Ok(h.powi(2 * n as i32 - 2)?.scale(&c))
}

/// `−½∮ S Δ_h S` through `h^{2(n_max−1)}`, as a density in `q_x = S_x`.
fn laplacian_energy(h: &Coeff, n_max: u32) -> Result<Density, CoeffError> {
    let mut d = Density::zero();
    for n in 1..=n_max {
        // ∮ S ∂^{2n} S = (−1)ⁿ ∮ (∂ⁿS)²
        let sign = if n % 2 == 0 { -1 } else { 1 };
        let c = laplacian_coefficient(h, n)?.scale(&BigRational::new(BigInt::from(sign), BigInt::from(2)));
        d = d.add(&term(c, &[(Var::Qx, n - 1), (Var::Qx, n - 1)]));
    }
    Ok(d)
}

/// FPU chain with `φ(z) = z²/2 + αz³/3 + βz⁴/4` in the continuum limit
/// `H = ∮[ε⁻¹φ(√ε R) − ½SΔ_hS]`, `R` the momentum and `S` the coordinate.
#[derive(Clone, Debug)]
pub struct FpuModel {
    pub alpha: Coeff,
    pub beta: Coeff,
    pub eps: Coeff,
    pub h: Coeff,
}

/// The two graded parts of the FPU continuum Hamiltonian in `(S_x, R)`,
/// written with `Var::Qx` for `S_x` and `Var::P` for `R`.
#[derive(Clone, Debug)]
pub struct FpuExpansion {
    pub grade2: Density,
    pub grade4: Density,
}

impl FpuModel {
    pub fn symbolic() -> Self {
        FpuModel { alpha: Coeff::sym("alpha"), beta: Coeff::sym("beta"), eps: Coeff::sym("eps"), h: Coeff::sym("h") }
    }

    /// Expansion with `λ ∼ √ε ∼ h²`.
    pub fn expansion(&self) -> Result<FpuExpansion, ModelError> {
        let r = Var::P;
        let root = sqrt_or_err(&self.eps)?;
        let lap = laplacian_energy(&self.h, 3)?;
        let lap_part = |n: u32| -> Density {
            let mut d = Density::zero();
            for (t, c) in lap.terms() {
                if let [Factor::Local { d: k, .. }, _] = t.factors.as_slice() {
                    if *k == n {
                        d.add_term(t.clone(), c.clone());
                    }
                }
            }
            d
        };
        let grade2 = term(&(&self.alpha * &root) * &q(1, 3), &[(r, 0); 3]).add(&lap_part(1));
        let grade4 = term(&(&self.beta * &self.eps) * &q(1, 4), &[(r, 0); 4]).add(&lap_part(2));
        Ok(FpuExpansion { grade2, grade4 })
    }

    /// Mechanical coefficients read off the expansion with `q_x ↔ R` as the
    /// nonlinear field: `α₁ = α√ε/3`, `α₂ = −h²/24`, `β₁ = βε/4`, `β₂ = 0`,
    /// `β₃ = h⁴/720`. The exchange `R ↔ S_x` maps `(u, v) → (u, −v)`.
    pub fn mechanical_coefficients(&self) -> Result<MechanicalModel, ModelError> {
        let root = sqrt_or_err(&self.eps)?;
        let h2 = self.h.powi(2)?;
        Ok(MechanicalModel {
            alpha1: &(&self.alpha * &root) * &q(1, 3),
            alpha2: &h2 * &q(-1, 24),
            beta1: &(&self.beta * &self.eps) * &q(1, 4),
            beta2: Coeff::zero(),
            beta3: &(&h2 * &h2) * &q(1, 720),
        })
    }

    /// The substitutions `α₁ = α√ε/(6√2)`, `α₂ = −h²/48`, `β₁ = βε/4` as
    /// an alternative to the Taylor match, with `β₂, β₃` from the expansion.
    pub fn alternate_substitutions(&self) -> Result<MechanicalModel, ModelError> {
        let root = sqrt_or_err(&self.eps)?;
        let derived = self.mechanical_coefficients()?;
        Ok(MechanicalModel {
            alpha1: &(&self.alpha * &root) / &(&Coeff::int(6) * &Coeff::sqrt2()),
            alpha2: &self.h.powi(2)? * &q(-1, 48),
            beta1: derived.beta1,
            beta2: derived.beta2,
            beta3: derived.beta3,
        })
    }

    pub fn to_uv(&self) -> Result<(Observable, Observable), ModelError> {
        let e = self.expansion()?;
        Ok((riemann_substitute(&e.grade2)?.integrate(), riemann_substitute(&e.grade4)?.integrate()))
    }

    pub fn graded(&self) -> Result<GradedHamiltonian, ModelError> {
        let (h2, h4) = self.to_uv()?;
        Ok(GradedHamiltonian::from_orders(h2, h4, 2)?)
    }

    pub fn normal_form(&self) -> Result<NormalFormResult, ModelError> {
        let (h2, h4) = self.to_uv()?;
        Ok(normal_form_mechanical(&h2, &h4)?)
    }
}

/// `φ(z) = z²/2 + γz^p/p`, first order of the continuum limit.
#[derive(Clone, Debug)]
pub struct GeneralizedFpuModel {
    pub p: i64,
    pub gamma: Coeff,
    pub eps: Coeff,
    pub h: Coeff,
}

impl GeneralizedFpuModel {
    pub fn new(p: i64, gamma: Coeff, eps: Coeff, h: Coeff) -> Result<Self, ModelError> {
        if p < 3 {
            return Err(ModelError::Degree(p));
        }
        Ok(GeneralizedFpuModel { p, gamma, eps, h })
    }

    pub fn symbolic(p: i64) -> Result<Self, ModelError> {
        GeneralizedFpuModel::new(p, Coeff::sym("gamma"), Coeff::sym("eps"), Coeff::sym("h"))
    }

    /// `γε^{(p−2)/2}/p`.
    pub fn nonlinear_coefficient(&self) -> Result<Coeff, ModelError> {
        Ok(&(&self.gamma * &half_power(&self.eps, self.p - 2)?) * &q(1, self.p))
    }

    /// `H₁ = ∮[γε^{(p−2)/2}R^p/p − (h²/24)S_xx²]` in `(u, v)`.
    pub fn h1(&self) -> Result<Observable, ModelError> {
        let nl = term(self.nonlinear_coefficient()?, &vec![(Var::P, 0); self.p as usize]);
        let lap = laplacian_energy(&self.h, 2)?;
        let disp = lap.sub(&term(q(1, 2), &[(Var::Qx, 0), (Var::Qx, 0)]));
        Ok(riemann_substitute(&nl.add(&disp))?.integrate())
    }
}

fn binomial(n: i64, k: i64) -> i64 {
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

impl GeneralizedFpuModel {
    /// Closed-form first-order normal form:
    /// `c∮(u^p + (−v)^p) − (h²/48)∮(u_x² + v_x²) + c Σ_{j=2}^{p−2} (−1)^j C(p,j) ∮u^{p−j} ∮v^j`
    /// with `c = γε^{(p−2)/2}/(2^{p/2}p)`.
    pub fn z1_closed_form(&self) -> Result<Observable, ModelError> {
        let p = self.p;
        let c = &self.nonlinear_coefficient()? / &half_power(&Coeff::int(2), p)?;
        let power = |v: Var, k: i64| Observable::integral_of(&vec![Factor::local(v, 0); k as usize]);
        let sign = if p % 2 == 0 { Coeff::one() } else { Coeff::int(-1) };
        let h2 = &self.h.powi(2)? * &q(-1, 48);
        let mut z = power(Var::U, p)
            .scale(&c)
            .add(&power(Var::V, p).scale(&(&c * &sign)))
            .add(&Observable::integral_of(&[Factor::local(Var::U, 1), Factor::local(Var::U, 1)]).scale(&h2))
            .add(&Observable::integral_of(&[Factor::local(Var::V, 1), Factor::local(Var::V, 1)]).scale(&h2));
        for j in 2..=p - 2 {
            let b = Coeff::int(if j % 2 == 0 { 1 } else { -1 } * binomial(p, j));
            z = z.add(&power(Var::U, p - j).mul(&power(Var::V, j)).scale(&(&c * &b)));
        }
        Ok(z)
    }
}

/// Water-wave Hamiltonian in Riemann variables (space variable written `x`).
pub fn water_waves() -> Result<GradedHamiltonian, ModelError> {
    use Var::{U, V};
    let h1 = sum([
        term(q(-1, 12), &[(U, 1), (U, 1)]),
        term(q(-1, 12), &[(V, 1), (V, 1)]),
        term(q(1, 4), &[(U, 0); 3]),
        term(q(1, 4), &[(V, 0); 3]),
        term(q(1, 6), &[(U, 1), (V, 1)]),
        term(q(-1, 4), &[(U, 0), (U, 0), (V, 0)]),
        term(q(-1, 4), &[(U, 0), (V, 0), (V, 0)]),
    ]);
    let h2 = sum([
        term(q(1, 30), &[(U, 2), (U, 2)]),
        term(q(1, 30), &[(V, 2), (V, 2)]),
        term(q(-1, 4), &[(U, 0), (U, 1), (U, 1)]),
        term(q(-1, 4), &[(V, 0), (V, 1), (V, 1)]),
        term(q(-1, 15), &[(U, 2), (V, 2)]),
        term(q(-1, 4), &[(U, 0), (V, 1), (V, 1)]),
        term(q(1, 2), &[(U, 0), (U, 1), (V, 1)]),
        term(q(-1, 4), &[(V, 0), (U, 1), (U, 1)]),
        term(q(1, 2), &[(V, 0), (U, 1), (V, 1)]),
    ]);
    Ok(GradedHamiltonian::from_orders(h1.integrate(), h2.integrate(), 2)?)
}

/// A model read from a TOML file with one of the sections `[generic]`,
/// `[mechanical]`, `[fpu]`, `[waterwaves]`.
#[derive(Clone, Debug)]
pub enum Model {
    Generic(GenericModel),
    Mechanical(MechanicalModel),
    Fpu(FpuModel),
    GeneralizedFpu(GeneralizedFpuModel),
    WaterWaves,
}

fn value_text(v: &toml::Value) -> Result<String, ModelError> {
    match v {
        toml::Value::String(s) => Ok(s.clone()),
        toml::Value::Integer(i) => Ok(i.to_string()),
        toml::Value::Float(f) => Ok(f.to_string()),
        other => Err(ModelError::File(format!("unsupported value {other}"))),
    }
}

struct Section(HashMap<String, toml::Value>);

impl Section {
    fn coeff(&self, key: &str, default: &str) -> Result<Coeff, ModelError> {
        match self.0.get(key) {
            Some(v) => Ok(parse_coeff(&value_text(v)?)?),
            None => Ok(parse_coeff(default)?),
        }
    }

    fn has(&self, key: &str) -> bool {
        self.0.contains_key(key)
    }

    fn int(&self, key: &str) -> Result<Option<i64>, ModelError> {
        match self.0.get(key) {
            None => Ok(None),
            Some(toml::Value::Integer(i)) => Ok(Some(*i)),
            Some(other) => Err(ModelError::File(format!("`{key}` must be an integer, got {other}"))),
        }
    }
}

impl Model {
    pub fn from_toml_str(text: &str) -> Result<Model, ModelError> {
        let table: toml::Table = text.parse().map_err(|e: toml::de::Error| ModelError::File(e.to_string()))?;
        let names: Vec<&String> = table.keys().filter(|k| ["generic", "mechanical", "fpu", "waterwaves"].contains(&k.as_str())).collect();
        if names.len() != 1 {
            return Err(ModelError::File("expected exactly one of [generic], [mechanical], [fpu], [waterwaves]".into()));
        }
        let name = names[0].clone();
        let sec = match &table[&name] {
            toml::Value::Table(t) => Section(t.clone().into_iter().collect()),
            _ => return Err(ModelError::File(format!("[{name}] must be a table"))),
        };
        match name.as_str() {
            "generic" => {
                let mut m = if sec.has("sqrt_abs_a") || sec.has("sqrt_abs_b") {
                    let sigma = sec.int("sigma")?.unwrap_or(1);
                    if sigma != 1 && sigma != -1 {
                        return Err(ModelError::File("sigma must be 1 or -1".into()));
                    }
                    let mut m = GenericModel::from_ab(&Coeff::one(), &Coeff::one())?;
                    m.sigma = sigma as i8;
                    m.root_a = sec.coeff("sqrt_abs_a", "1")?;
                    m.root_b = sec.coeff("sqrt_abs_b", "1")?;
                    m
                } else {
                    GenericModel::from_ab(&sec.coeff("a", "1")?, &sec.coeff("b", "1")?)?
                };
                m.c = sec.coeff("c", "0")?;
                m.d1 = sec.coeff("d1", "0")?;
                for (i, e) in m.e.iter_mut().enumerate() {
                    *e = sec.coeff(&format!("e{}", i + 1), "0")?;
                }
                for (i, f) in m.f.iter_mut().enumerate() {
                    *f = sec.coeff(&format!("f{}", i + 1), "0")?;
                }
                for (i, g) in m.g.iter_mut().enumerate() {
                    *g = sec.coeff(&format!("g{}", i + 1), "0")?;
                }
                Ok(Model::Generic(m))
            }
            "mechanical" => Ok(Model::Mechanical(MechanicalModel {
                alpha1: sec.coeff("alpha1", "0")?,
                alpha2: sec.coeff("alpha2", "0")?,
                beta1: sec.coeff("beta1", "0")?,
                beta2: sec.coeff("beta2", "0")?,
                beta3: sec.coeff("beta3", "0")?,
            })),
            "fpu" => {
                let eps = sec.coeff("eps", "eps")?;
                let h = sec.coeff("h", "h")?;
                match sec.int("p")? {
                    Some(p) if p != 3 && p != 4 || sec.has("gamma") => {
                        Ok(Model::GeneralizedFpu(GeneralizedFpuModel::new(p, sec.coeff("gamma", "1")?, eps, h)?))
                    }
                    _ => Ok(Model::Fpu(FpuModel { alpha: sec.coeff("alpha", "0")?, beta: sec.coeff("beta", "0")?, eps, h })),
                }
            }
            _ => Ok(Model::WaterWaves),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Model::Generic(_) => "generic",
            Model::Mechanical(_) => "mechanical",
            Model::Fpu(_) => "fpu",
            Model::GeneralizedFpu(_) => "generalized-fpu",
            Model::WaterWaves => "waterwaves",
        }
    }

    /// Orders of the reported normal form: `(1, 2)` for one-step gradings,
    /// `(2, 4)` for mechanical-type ones.
    pub fn reported_orders(&self) -> (u32, u32) {
        match self {
            Model::Mechanical(_) | Model::Fpu(_) => (2, 4),
            _ => (1, 2),
        }
    }

    pub fn normal_form(&self) -> Result<NormalFormResult, ModelError> {
        match self {
            Model::Generic(m) => Ok(normal_form_order2(&m.to_uv()?)?),
            Model::Mechanical(m) => m.normal_form(),
            Model::Fpu(m) => m.normal_form(),
            Model::GeneralizedFpu(m) => Ok(normal_form_order1(&m.h1()?)?),
            Model::WaterWaves => Ok(normal_form_order2(&water_waves()?)?),
        }
    }
}
