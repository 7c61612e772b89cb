//! Grading of monomials: weight 2 per field factor plus 1 per extra derivative, minus 4.

use super::density::{fmt_factors, AlgebraError, Density, Factor, Monomial, Observable};

fn weight(m: &[Factor]) -> Result<i32, AlgebraError> {
    m.iter()
        .map(|f| match f {
            Factor::Local { d, .. } => Ok(2 + *d as i32),
            Factor::Anti { .. } => Err(AlgebraError::Ungraded(fmt_factors(m))),
        })
        .sum()
}

pub fn grade(m: &[Factor]) -> Result<i32, AlgebraError> {
    Ok(weight(m)? - 4)
}

/// Grade of a product of atoms, read as the density of the product.
pub fn grade_product(atoms: &[Monomial]) -> Result<i32, AlgebraError> {
    let mut w = 0;
    for a in atoms {
        w += weight(a)?;
    }
    Ok(w - 4)
}

/// The common grade of all terms, or `None` when empty. Errors on mixed grades.
pub fn homogeneous_grade(o: &Observable) -> Result<Option<i32>, AlgebraError> {
    let mut g = None;
    for (k, _) in o.terms() {
        let gk = grade_product(k)?;
        match g {
            None => g = Some(gk),
            Some(x) if x != gk => return Err(AlgebraError::Other(format!("mixed grades {x} and {gk}"))),
            _ => {}
        }
    }
    Ok(g)
}

pub fn density_grade(d: &Density) -> Result<Option<i32>, AlgebraError> {
    homogeneous_grade(&d.integrate())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::density::{anti, loc, Var::*};

    #[test]
    fn grades() {
        assert_eq!(grade(&[loc(Qx, 0), loc(P, 0)]).unwrap(), 0);
        assert_eq!(grade(&vec![loc(Qx, 0); 3]).unwrap(), 2);
        assert_eq!(grade(&[loc(Qx, 3), loc(P, 1)]).unwrap(), 4);
        assert!(grade(&[loc(U, 0), anti(V, &[0])]).is_err());
    }
}
