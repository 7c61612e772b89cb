//! Averaging along the translation flow of `K₀ = ∮(u²+v²)/2` and the
//! order-two normal form built from it.
//!
//! Under the Gardner structure `K₀` moves `u` as `u(x+t)` and `v` as
//! `v(x−t)`, so a mixed integral `∮ f(u)·g(v)` averages to `∮f · ∮g`.

use crate::algebra::density::{fmt_factors, AlgebraError, Density, Factor, Monomial, Observable, Term, Var};
use crate::algebra::{homogeneous_grade, poisson_bracket, Coeff, PoissonStructure};
use num_bigint::BigInt;
use num_rational::BigRational;
use std::collections::BTreeMap;

/// `H = Σ λʲ H_j` over `(u, v)` with the Gardner bracket.
#[derive(Clone, Debug)]
pub struct GradedHamiltonian {
    pub orders: BTreeMap<u32, Observable>,
    /// Grade increase per order: 1 in the generic grading, 2 for mechanical-type
    /// Hamiltonians where only even grades occur.
    pub grade_step: i32,
    pub lambda: String,
}

impl GradedHamiltonian {
    /// Checks `H₀ = K₀`, that only `u, v` occur and that each `H_j` has grade
    /// `j·grade_step`.
    pub fn new(orders: BTreeMap<u32, Observable>, grade_step: i32) -> Result<Self, AlgebraError> {
        let k0 = k0();
        match orders.get(&0) {
            Some(h0) if *h0 == k0 => {}
            _ => return Err(AlgebraError::Other("H0 must equal (1/2)<u^2 + v^2>".into())),
        }
        for (j, h) in &orders {
            if let Some(v) = h.vars().into_iter().find(|v| !matches!(v, Var::U | Var::V)) {
                return Err(AlgebraError::UnknownVariable(v));
            }
            if let Some(g) = homogeneous_grade(h)? {
                if g != *j as i32 * grade_step {
                    return Err(AlgebraError::Other(format!("H{j} has grade {g}, expected {}", *j as i32 * grade_step)));
                }
            }
        }
        Ok(GradedHamiltonian { orders, grade_step, lambda: "lambda".into() })
    }

    /// From `H₁, H₂` with `H₀ = K₀`.
    pub fn from_orders(h1: Observable, h2: Observable, grade_step: i32) -> Result<Self, AlgebraError> {
        let orders = BTreeMap::from([(0, k0()), (1, h1), (2, h2)]);
        GradedHamiltonian::new(orders, grade_step)
    }

    pub fn order(&self, j: u32) -> Observable {
        self.orders.get(&j).cloned().unwrap_or_default()
    }
}

#[derive(Clone, Debug, Default)]
pub struct NormalFormResult {
    pub z: BTreeMap<u32, Observable>,
    pub g: BTreeMap<u32, Observable>,
    /// Homological residuals `L_{K₀}G_j − (S_j − Z_j)`.
    pub residuals: BTreeMap<u32, Observable>,
    /// `{K₀, Z_j}`.
    pub invariance: BTreeMap<u32, Observable>,
}

impl NormalFormResult {
    pub fn z(&self, j: u32) -> Observable {
        self.z.get(&j).cloned().unwrap_or_default()
    }

    pub fn g(&self, j: u32) -> Observable {
        self.g.get(&j).cloned().unwrap_or_default()
    }

    /// All residual and invariance checks vanish.
    pub fn verified(&self) -> bool {
        self.residuals.values().chain(self.invariance.values()).all(Observable::is_zero)
    }
}

/// `K₀ = ∮(u²+v²)/2`.
pub fn k0() -> Observable {
    let half = Coeff::rational(1, 2);
    let mut o = Observable::zero();
    for v in [Var::U, Var::V] {
        o = o.add(&Observable::integral_of(&[Factor::local(v, 0), Factor::local(v, 0)]).scale(&half));
    }
    o
}

/// Splits a monomial into its `u` and `v` factors.
pub fn split_left_right(m: &[Factor]) -> Result<(Monomial, Monomial), AlgebraError> {
    let mut left = Vec::new();
    let mut right = Vec::new();
    for f in m {
        match f.var() {
            Var::U => left.push(f.clone()),
            Var::V => right.push(f.clone()),
            other => return Err(AlgebraError::UnknownVariable(other)),
        }
    }
    Ok((left, right))
}

fn is_mixed(m: &[Factor]) -> Result<bool, AlgebraError> {
    let (l, r) = split_left_right(m)?;
    Ok(!l.is_empty() && !r.is_empty())
}

/// Position of the only non-invariant atom of a product, if any.
fn mixed_atom(key: &[Monomial]) -> Result<Option<usize>, AlgebraError> {
    let mut found = None;
    for (i, a) in key.iter().enumerate() {
        if is_mixed(a)? {
            if found.is_some() {
                let shown: Vec<String> = key.iter().map(|a| fmt_factors(a)).collect();
                return Err(AlgebraError::NonInvariantProduct(shown.join(" * ")));
            }
            found = Some(i);
        }
    }
    Ok(found)
}

/// Time average along the flow of `K₀`.
pub fn average0(f: &Observable) -> Result<Observable, AlgebraError> {
    let mut out = Observable::zero();
    for (key, c) in f.terms() {
        match mixed_atom(key)? {
            None => out.add_term(key.clone(), c.clone()),
            Some(i) => {
                let (l, r) = split_left_right(&key[i])?;
                let mut rest = key.clone();
                rest.remove(i);
                let avg = Observable::integral_of(&l).mul(&Observable::integral_of(&r));
                out = out.add(&product_of(&rest).mul(&avg).scale(c));
            }
        }
    }
    Ok(out)
}

fn product_of(atoms: &[Monomial]) -> Observable {
    let mut o = Observable::constant(Coeff::one());
    for a in atoms {
        o = o.mul(&Observable::integral_of(a));
    }
    o
}

fn half() -> Coeff {
    Coeff::from_rational(BigRational::new(BigInt::from(1), BigInt::from(2)))
}

/// `∂⁻¹` of a single-variable local monomial.
fn antiderivative_of(m: &[Factor]) -> Result<Option<Factor>, AlgebraError> {
    if m.iter().any(Factor::is_anti) {
        return Ok(None);
    }
    let orders = m
        .iter()
        .map(|f| match f {
            Factor::Local { d, .. } => *d,
            Factor::Anti { .. } => unreachable!(),
        })
        .collect();
    Factor::anti(m[0].var(), orders).map(Some)
}

/// `½∮ g·∂⁻¹f` with `f` the `u`-part and `g` the `v`-part, whose `K₀`-derivative
/// is `∮fg − ∮f∮g`.
fn generator_of(f: &[Factor], g: &[Factor]) -> Result<Density, AlgebraError> {
    if let Some(a) = antiderivative_of(f)? {
        let mut fs = g.to_vec();
        fs.push(a);
        return Ok(Density::monomial(half(), fs));
    }
    if let Some(a) = antiderivative_of(g)? {
        // ∮ g·∂⁻¹f = −∮ ∂⁻¹g·f
        let mut fs = f.to_vec();
        fs.push(a);
        return Ok(Density::monomial(half().scale(&BigRational::from_integer((-1).into())), fs));
    }
    let mut all = f.to_vec();
    all.extend_from_slice(g);
    Err(AlgebraError::NestingDepth(fmt_factors(&all)))
}

/// Solves `L_{K₀}G = S − Z` with `Z = ⟨S⟩₀` and `⟨G⟩₀ = 0`.
pub fn solve_homological(s: &Observable) -> Result<(Observable, Observable), AlgebraError> {
    let z = average0(s)?;
    let mut g = Density::zero();
    for (key, c) in s.terms() {
        let Some(i) = mixed_atom(key)? else { continue };
        let (l, r) = split_left_right(&key[i])?;
        let mut rest = key.clone();
        rest.remove(i);
        for (t, v) in generator_of(&l, &r)?.terms() {
            let mut atoms = rest.clone();
            atoms.extend(t.atoms.iter().cloned());
            atoms.sort();
            g.add_term(Term { atoms, factors: t.factors.clone() }, v * c);
        }
    }
    Ok((z, g.integrate()))
}

/// `L_{K₀}F = {F, K₀}`, the time derivative along `u(x+t)`, `v(x−t)`. Computed
/// factor by factor, so antiderivatives never need a variational derivative.
pub fn lie_k0(f: &Observable) -> Result<Observable, AlgebraError> {
    let mut out = Density::zero();
    for (key, c) in f.terms() {
        for (i, atom) in key.iter().enumerate() {
            let mut others = key.clone();
            others.remove(i);
            for (k, fac) in atom.iter().enumerate() {
                let sign = match fac.var() {
                    Var::U => 1,
                    Var::V => -1,
                    other => return Err(AlgebraError::UnknownVariable(other)),
                };
                let mut rest = atom.clone();
                rest.remove(k);
                let piece = Density::monomial(Coeff::int(sign), vec![fac.clone()]).dx().mul(&Density::monomial(c.clone(), rest));
                for (t, v) in piece.terms() {
                    let mut atoms = others.clone();
                    atoms.extend(t.atoms.iter().cloned());
                    atoms.sort();
                    out.add_term(Term { atoms, factors: t.factors.clone() }, v.clone());
                }
            }
        }
    }
    Ok(out.integrate())
}

/// The Gardner automorphism `v ↦ −v`, which fixes `K₀`.
pub fn reflect_v(f: &Observable) -> Observable {
    let mut out = Observable::zero();
    for (key, c) in f.terms() {
        let odd = key.iter().flatten().filter(|fac| fac.var() == Var::V).map(|fac| fac.inner_factors().len()).sum::<usize>() % 2 == 1;
        out.add_term(key.clone(), if odd { -c } else { c.clone() });
    }
    out
}

/// `S₂ = H₂ + ½{H₁, G₁} + ½{Z₁, G₁}`.
pub fn second_order_source(h1: &Observable, h2: &Observable, z1: &Observable, g1: &Observable) -> Result<Observable, AlgebraError> {
    let j = PoissonStructure::gardner();
    let a = poisson_bracket(h1, g1, &j)?;
    let b = poisson_bracket(z1, g1, &j)?;
    Ok(h2.add(&a.add(&b).scale(&half())))
}

fn record(res: &mut NormalFormResult, j: u32, s: &Observable, z: Observable, g: Observable) -> Result<(), AlgebraError> {
    let residual = lie_k0(&g)?.sub(&s.sub(&z));
    let inv = poisson_bracket(&k0(), &z, &PoissonStructure::gardner())?;
    res.residuals.insert(j, residual);
    res.invariance.insert(j, inv);
    res.z.insert(j, z);
    res.g.insert(j, g);
    Ok(())
}

/// First averaging step only, for Hamiltonians without a usable second order.
pub fn normal_form_order1(h1: &Observable) -> Result<NormalFormResult, AlgebraError> {
    let mut res = NormalFormResult::default();
    let (z1, g1) = solve_homological(h1)?;
    record(&mut res, 1, h1, z1, g1)?;
    Ok(res)
}

/// Normal form through order two.
pub fn normal_form_order2(h: &GradedHamiltonian) -> Result<NormalFormResult, AlgebraError> {
    let h1 = h.order(1);
    let h2 = h.order(2);
    let mut res = NormalFormResult::default();
    let (z1, g1) = solve_homological(&h1)?;
    record(&mut res, 1, &h1, z1.clone(), g1.clone())?;
    let s2 = second_order_source(&h1, &h2, &z1, &g1)?;
    let (z2, g2) = solve_homological(&s2)?;
    record(&mut res, 2, &s2, z2, g2)?;
    Ok(res)
}

/// Mechanical case: `H₂, H₄` play the roles of `H₁, H₂`; the result is keyed
/// by the original orders 2 and 4.
pub fn normal_form_mechanical(h2: &Observable, h4: &Observable) -> Result<NormalFormResult, AlgebraError> {
    let h = GradedHamiltonian::from_orders(h2.clone(), h4.clone(), 2)?;
    let r = normal_form_order2(&h)?;
    let relabel = |m: BTreeMap<u32, Observable>| m.into_iter().map(|(j, o)| (2 * j, o)).collect();
    Ok(NormalFormResult {
        z: relabel(r.z),
        g: relabel(r.g),
        residuals: relabel(r.residuals),
        invariance: relabel(r.invariance),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::density::{anti, loc};
    use Var::{U, V};

    fn int(c: Coeff, fs: &[Factor]) -> Observable {
        Observable::integral_of(fs).scale(&c)
    }

    #[test]
    fn split_examples() {
        let (l, r) = split_left_right(&[loc(U, 0), loc(U, 1), loc(V, 2)]).unwrap();
        assert_eq!(l, vec![loc(U, 0), loc(U, 1)]);
        assert_eq!(r, vec![loc(V, 2)]);
        assert!(split_left_right(&[loc(Var::P, 0)]).is_err());
    }

    #[test]
    fn average_examples() {
        // ⟨u²v⟩ = ∮u²·∮v = 0, ⟨u²v²⟩ = ∮u²∮v², pure terms are kept.
        let f = int(Coeff::one(), &[loc(U, 0), loc(U, 0), loc(V, 0)])
            .add(&int(Coeff::int(3), &[loc(U, 0), loc(U, 0), loc(V, 0), loc(V, 0)]))
            .add(&int(Coeff::int(5), &[loc(U, 0), loc(U, 0), loc(U, 0)]));
        let want = Observable::integral_of(&[loc(U, 0), loc(U, 0)])
            .mul(&Observable::integral_of(&[loc(V, 0), loc(V, 0)]))
            .scale(&Coeff::int(3))
            .add(&int(Coeff::int(5), &[loc(U, 0), loc(U, 0), loc(U, 0)]));
        assert_eq!(average0(&f).unwrap(), want);
    }

    #[test]
    fn non_invariant_product_is_rejected() {
        let m = Observable::integral_of(&[loc(U, 0), loc(V, 0), loc(V, 0)]);
        assert!(matches!(average0(&m.mul(&m)), Err(AlgebraError::NonInvariantProduct(_))));
    }

    #[test]
    fn homological_solution() {
        // S = ∮uv: Z = 0, G = ½∮v∂⁻¹u.
        let s = int(Coeff::one(), &[loc(U, 0), loc(V, 0)]);
        let (z, g) = solve_homological(&s).unwrap();
        assert!(z.is_zero());
        assert_eq!(g, int(Coeff::rational(1, 2), &[loc(V, 0), anti(U, &[0])]));
        assert!(lie_k0(&g).unwrap().sub(&s).is_zero());
    }

    #[test]
    fn lie_k0_agrees_with_bracket() {
        let f = int(Coeff::one(), &[loc(U, 0), loc(U, 1), loc(V, 0)])
            .add(&int(Coeff::int(2), &[loc(V, 0), anti(U, &[0, 0])]))
            .add(&int(Coeff::int(-1), &[loc(U, 2), loc(V, 1)]));
        let br = poisson_bracket(&f, &k0(), &PoissonStructure::gardner()).unwrap();
        assert!(lie_k0(&f).unwrap().sub(&br).is_zero());
    }

    #[test]
    fn zero_model() {
        let h = GradedHamiltonian::from_orders(Observable::zero(), Observable::zero(), 1).unwrap();
        let r = normal_form_order2(&h).unwrap();
        assert!(r.z(1).is_zero() && r.z(2).is_zero() && r.g(1).is_zero() && r.g(2).is_zero());
        assert!(r.verified());
    }

    #[test]
    fn mixed_cubic_is_removed_at_first_order() {
        let h1 = int(Coeff::one(), &[loc(U, 0), loc(U, 0), loc(U, 0)])
            .add(&int(Coeff::int(3), &[loc(U, 0), loc(U, 0), loc(V, 0)]))
            .add(&int(Coeff::one(), &[loc(U, 1), loc(V, 1)]));
        let h = GradedHamiltonian::from_orders(h1, Observable::zero(), 2).unwrap();
        let r = normal_form_order2(&h).unwrap();
        assert_eq!(r.z(1), int(Coeff::one(), &[loc(U, 0), loc(U, 0), loc(U, 0)]));
        assert!(r.verified());
        for (key, _) in r.z(2).terms() {
            assert!(key.iter().all(|a| !is_mixed(a).unwrap()), "mixed term in Z2");
        }
    }

    #[test]
    fn grade_is_checked() {
        let wrong = int(Coeff::one(), &[loc(U, 0), loc(U, 0), loc(U, 0), loc(U, 0)]);
        assert!(GradedHamiltonian::from_orders(wrong, Observable::zero(), 1).is_err());
        let mut orders = BTreeMap::new();
        orders.insert(0, Observable::zero());
        assert!(GradedHamiltonian::new(orders, 1).is_err());
    }
}
