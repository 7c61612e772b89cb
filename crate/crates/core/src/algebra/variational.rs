//! Euler operator on observables.

use super::coeff::Coeff;
use super::density::{settle, AlgebraError, Density, Factor, Observable, Term, Var};

/// `δ(∮m)/δ(var)`, with antiderivative factors handled through
/// `∮ f·D⁻¹(g) = −∮ D⁻¹(f)·g`.
fn euler_monomial(m: &[Factor], var: Var) -> Result<Density, AlgebraError> {
    let mut out = Density::zero();
    for (i, f) in m.iter().enumerate() {
        if f.var() != var {
            continue;
        }
        let mut rest = m.to_vec();
        rest.remove(i);
        match f {
            Factor::Local { d, .. } => {
                let sign = if d % 2 == 0 { 1 } else { -1 };
                let piece = Density::monomial(Coeff::int(sign), rest).dx_n(*d);
                out = out.add(&piece);
            }
            Factor::Anti { .. } => {
                if rest.is_empty() {
                    continue;
                }
                // ∮ rest·D⁻¹(M) = −∮ D⁻¹(rest)·M, then vary M.
                if rest.iter().any(|g| g.is_anti()) || rest.iter().any(|g| g.var() != rest[0].var()) {
                    return Err(AlgebraError::NestingDepth(super::density::fmt_factors(m)));
                }
                let orders: Vec<u32> = rest
                    .iter()
                    .map(|g| match g {
                        Factor::Local { d, .. } => *d,
                        Factor::Anti { .. } => unreachable!(),
                    })
                    .collect();
                let a = Factor::anti(rest[0].var(), orders)?;
                let inner = f.inner_factors();
                for (k, g) in inner.iter().enumerate() {
                    let Factor::Local { d, .. } = g else { unreachable!() };
                    let mut others = inner.clone();
                    others.remove(k);
                    others.push(a.clone());
                    let sign = if d % 2 == 0 { -1 } else { 1 };
                    let piece = Density::monomial(Coeff::int(sign), settle(others)).dx_n(*d);
                    out = out.add(&piece);
                }
            }
        }
    }
    if var.base_order() == 1 {
        // δ/δq = −∂ δ/δq_x
        out = out.dx().scale(&Coeff::int(-1));
    }
    Ok(out)
}

/// Variational derivative of an observable. For `Var::Qx` this is `δ/δq`.
pub fn variational_derivative_obs(f: &Observable, var: Var) -> Result<Density, AlgebraError> {
    let mut out = Density::zero();
    for (key, c) in f.terms() {
        for i in 0..key.len() {
            let mut others = key.clone();
            let atom = others.remove(i);
            let e = euler_monomial(&atom, var)?;
            let mut scaled = Density::zero();
            for (t, v) in e.terms() {
                let mut atoms = t.atoms.clone();
                atoms.extend(others.iter().cloned());
                atoms.sort();
                scaled.add_term(Term { atoms, factors: t.factors.clone() }, v * c);
            }
            out = out.add(&scaled);
        }
    }
    Ok(out)
}

/// Variational derivative of `∮ d`.
pub fn variational_derivative(d: &Density, var: Var) -> Result<Density, AlgebraError> {
    variational_derivative_obs(&d.integrate(), var)
}
