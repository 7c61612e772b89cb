//! Integrals `I₀, I₁, I₃`, the flows `κ₃, κ₅`, and membership of a
//! single-variable normal form in their span.

use super::KdvError;
use crate::algebra::density::{Density, Factor, Observable, Var};
use crate::algebra::{AlgebraError, Coeff, PoissonStructure, Symbol};

fn mono(c: Coeff, w: Var, orders: &[u32]) -> Density {
    Density::monomial(c, orders.iter().map(|&d| Factor::local(w, d)).collect())
}

/// `∮ w²`.
pub fn i0(w: Var) -> Observable {
    mono(Coeff::one(), w, &[0, 0]).integrate()
}

/// `∮ (γw³/3 + w w_xx)`.
pub fn i1(gamma: &Coeff, w: Var) -> Observable {
    mono(gamma * &Coeff::rational(1, 3), w, &[0, 0, 0]).add(&mono(Coeff::one(), w, &[0, 2])).integrate()
}

/// `∮ (5γ²w⁴/36 + 5γw²w_xx/6 + w_xx²)`.
pub fn i3(gamma: &Coeff, w: Var) -> Observable {
    let g2 = gamma * gamma;
    mono(&g2 * &Coeff::rational(5, 36), w, &[0, 0, 0, 0])
        .add(&mono(gamma * &Coeff::rational(5, 6), w, &[0, 0, 2]))
        .add(&mono(Coeff::one(), w, &[2, 2]))
        .integrate()
}

/// `J·δH` for the component `var` of `j`.
pub fn vector_field(h: &Observable, j: &PoissonStructure, var: Var) -> Result<Density, AlgebraError> {
    let i = j.vars().iter().position(|&v| v == var).ok_or(AlgebraError::UnknownVariable(var))?;
    j.vector_field(h, i)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HierarchyOrder {
    Kappa3,
    Kappa5,
}

/// A flow of the hierarchy with its free parameter `γ`.
#[derive(Clone, Debug)]
pub struct HierarchyField {
    pub gamma: Coeff,
    pub order: HierarchyOrder,
}

impl HierarchyField {
    pub fn density(&self, w: Var) -> Density {
        match self.order {
            HierarchyOrder::Kappa3 => kappa3(&self.gamma, w),
            HierarchyOrder::Kappa5 => kappa5(&self.gamma, w),
        }
    }

    /// The generating integral, `½I₁` or `½I₃`.
    pub fn hamiltonian(&self, w: Var) -> Observable {
        let half = Coeff::rational(1, 2);
        match self.order {
            HierarchyOrder::Kappa3 => i1(&self.gamma, w).scale(&half),
            HierarchyOrder::Kappa5 => i3(&self.gamma, w).scale(&half),
        }
    }
}

/// `κ₃ = γww_x + w_xxx`.
pub fn kappa3(gamma: &Coeff, w: Var) -> Density {
    mono(gamma.clone(), w, &[0, 1]).add(&mono(Coeff::one(), w, &[3]))
}

/// `κ₅ = ∂_x δ(½I₃)/δw = (5/6)γ²w²w_x + (10/3)γw_xw_xx + (5/3)γww_xxx + w_xxxxx`.
pub fn kappa5(gamma: &Coeff, w: Var) -> Density {
    kappa5_with(gamma, w, Coeff::rational(5, 3))
}

/// `κ₅` with `(10/3)γww_xxx`, which is not the flow of any multiple of `I₃`.
pub fn kappa5_doubled(gamma: &Coeff, w: Var) -> Density {
    kappa5_with(gamma, w, Coeff::rational(10, 3))
}

fn kappa5_with(gamma: &Coeff, w: Var, c_www: Coeff) -> Density {
    let g2 = gamma * gamma;
    mono(&g2 * &Coeff::rational(5, 6), w, &[0, 0, 1])
        .add(&mono(gamma * &Coeff::rational(10, 3), w, &[1, 2]))
        .add(&mono(gamma * &c_www, w, &[0, 3]))
        .add(&mono(Coeff::one(), w, &[5]))
}

/// Outcome of matching `Z₂ ∝ I₁(γ)` and `Z₄ ∈ span{I₃(γ), I₁(γ), I₀}`.
#[derive(Clone, Debug)]
pub struct MatchReport {
    pub gamma: Coeff,
    /// `Z₂ = a₁I₁(γ) + a₀I₀`.
    pub a1: Coeff,
    pub a0: Coeff,
    /// `Z₄ ≈ c₃I₃(γ) + c₁I₁(γ) + c₀I₀`.
    pub c3: Coeff,
    pub c1: Coeff,
    pub c0: Coeff,
    /// `Z₄ − c₃I₃ − c₁I₁ − c₀I₀` over single-variable terms.
    pub residual: Observable,
    /// Products of integrals in `Z₄`, excluded from the match.
    pub mean_field: Observable,
}

impl MatchReport {
    pub fn is_member(&self) -> bool {
        self.residual.is_zero()
    }

    /// The residual after substituting a parameter value.
    pub fn residual_at(&self, sym: &str, value: &Coeff) -> Result<Observable, AlgebraError> {
        let s = Symbol::new(sym);
        self.residual.map_coeffs(|c| Ok(c.substitute(&s, value)?))
    }
}

/// Single-atom terms of `f` built from `w` alone, and all atom products.
fn split_terms(f: &Observable, w: Var) -> (Observable, Observable) {
    let mut single = Observable::zero();
    let mut products = Observable::zero();
    for (key, c) in f.terms() {
        match key.as_slice() {
            [atom] if atom.iter().all(|x| x.var() == w) => single.add_term(key.clone(), c.clone()),
            [_] | [] => {}
            _ => products.add_term(key.clone(), c.clone()),
        }
    }
    (single, products)
}

fn coef(f: &Observable, w: Var, orders: &[u32]) -> Coeff {
    let m: Vec<Factor> = orders.iter().map(|&d| Factor::local(w, d)).collect();
    f.coefficient_of_integral(&m).unwrap_or_else(Coeff::zero)
}

/// Determines `γ = −3·[w³]/[w_x²]` from `Z₂` and projects `Z₄` on the hierarchy.
pub fn hierarchy_match(z2: &Observable, z4: &Observable, w: Var) -> Result<MatchReport, KdvError> {
    let (z2w, _) = split_terms(z2, w);
    let cx = coef(&z2w, w, &[1, 1]);
    if cx.is_zero() {
        return Err(KdvError::NotKdv("Z2 has no w_x^2 term".into()));
    }
    let gamma = &(&coef(&z2w, w, &[0, 0, 0]) * &Coeff::int(-3)) / &cx;
    let a1 = -&cx;
    let a0 = coef(&z2w, w, &[0, 0]);
    let rest2 = z2w.sub(&i1(&gamma, w).scale(&a1)).sub(&i0(w).scale(&a0));
    if !rest2.is_zero() {
        return Err(KdvError::NotKdv(format!("Z2 - a1*I1 - a0*I0 = {rest2}")));
    }
    let (z4w, mean_field) = split_terms(z4, w);
    let c3 = coef(&z4w, w, &[2, 2]);
    let c1 = -&coef(&z4w, w, &[1, 1]);
    let c0 = coef(&z4w, w, &[0, 0]);
    let residual = z4w.sub(&i3(&gamma, w).scale(&c3)).sub(&i1(&gamma, w).scale(&c1)).sub(&i0(w).scale(&c0));
    Ok(MatchReport { gamma, a1, a0, c3, c1, c0, residual, mean_field })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{parse_coeff, poisson_bracket};
    use Var::U;

    #[test]
    fn integrals_commute() {
        let g = Coeff::sym("gamma");
        let j = PoissonStructure::gardner_single(U);
        let all = [i0(U), i1(&g, U), i3(&g, U)];
        for a in &all {
            for b in &all {
                assert!(poisson_bracket(a, b, &j).unwrap().is_zero());
            }
        }
    }

    #[test]
    fn kappa_fields_are_hamiltonian() {
        let g = Coeff::sym("gamma");
        let j = PoissonStructure::gardner_single(U);
        let k3 = vector_field(&i1(&g, U).scale(&Coeff::rational(1, 2)), &j, U).unwrap();
        assert_eq!(k3, kappa3(&g, U));
        let k5 = vector_field(&i3(&g, U).scale(&Coeff::rational(1, 2)), &j, U).unwrap();
        assert_eq!(k5, kappa5(&g, U));
        assert_ne!(k5, kappa5_doubled(&g, U));
        let tr = vector_field(&i0(U).scale(&Coeff::rational(1, 2)), &j, U).unwrap();
        assert_eq!(tr, mono(Coeff::one(), U, &[1]));
    }

    #[test]
    fn literal_member() {
        let g = parse_coeff("7/3").unwrap();
        let z2 = i1(&g, U).scale(&Coeff::int(2)).add(&i0(U));
        let r = hierarchy_match(&z2, &i3(&g, U), U).unwrap();
        assert_eq!(r.gamma, g);
        assert!(r.is_member());
        assert!(r.c3.is_one());
        let bad = i3(&g, U).add(&mono(Coeff::one(), U, &[0, 1, 1]).integrate());
        assert!(!hierarchy_match(&z2, &bad, U).unwrap().is_member());
    }

    #[test]
    fn total_derivatives_do_not_matter() {
        let g = Coeff::sym("gamma");
        let z2 = i1(&g, U).add(&mono(Coeff::sym("k"), U, &[0, 0, 1]).integrate());
        let z4 = i3(&g, U).add(&mono(Coeff::int(3), U, &[0, 0, 0, 1]).integrate());
        assert!(hierarchy_match(&z2, &z4, U).unwrap().is_member());
    }

    #[test]
    fn no_dispersion_rejected() {
        let z2 = mono(Coeff::one(), U, &[0, 0, 0]).integrate();
        assert!(matches!(hierarchy_match(&z2, &z2, U), Err(KdvError::NotKdv(_))));
    }
}
