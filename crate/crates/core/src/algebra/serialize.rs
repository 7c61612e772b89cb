//! JSON form of densities and observables: a term list of coefficient strings
//! with factor lists.

use super::coeff::{parse_coeff, CoeffError};
use super::density::{settle, Density, Factor, Monomial, Observable, Term};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TermJson {
    pub coefficient: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub atoms: Vec<Vec<Factor>>,
    #[serde(default)]
    pub factors: Vec<Factor>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExprJson {
    pub text: String,
    pub terms: Vec<TermJson>,
}

#[derive(Debug, thiserror::Error)]
pub enum SerializeError {
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Coeff(#[from] CoeffError),
}

pub fn density_json(d: &Density) -> ExprJson {
    let terms = d
        .terms()
        .map(|(t, c)| TermJson { coefficient: c.to_string(), atoms: t.atoms.clone(), factors: t.factors.clone() })
        .collect();
    ExprJson { text: d.to_string(), terms }
}

pub fn observable_json(o: &Observable) -> ExprJson {
    let terms = o
        .terms()
        .map(|(k, c)| TermJson { coefficient: c.to_string(), atoms: k.clone(), factors: Vec::new() })
        .collect();
    ExprJson { text: o.to_string(), terms }
}

pub fn density_from_json(e: &ExprJson) -> Result<Density, SerializeError> {
    let mut d = Density::zero();
    for t in &e.terms {
        let mut atoms: Vec<Monomial> = t.atoms.iter().cloned().map(settle).collect();
        atoms.sort();
        d.add_term(Term { atoms, factors: t.factors.clone() }, parse_coeff(&t.coefficient)?);
    }
    Ok(d)
}

/// Rebuilds an observable. Atoms are re-canonicalized, so hand-written
/// input need not be in canonical form.
pub fn observable_from_json(e: &ExprJson) -> Result<Observable, SerializeError> {
    let mut o = Observable::zero();
    for t in &e.terms {
        let c = parse_coeff(&t.coefficient)?;
        let mut acc = Observable::constant(c);
        for a in &t.atoms {
            acc = acc.mul(&Observable::integral_of(a));
        }
        if !t.factors.is_empty() {
            acc = acc.mul(&Observable::integral_of(&t.factors));
        }
        o = o.add(&acc);
    }
    Ok(o)
}

pub fn to_string_pretty(e: &ExprJson) -> String {
    serde_json::to_string_pretty(e).expect("serializable")
}

pub fn from_str(s: &str) -> Result<ExprJson, SerializeError> {
    Ok(serde_json::from_str(s)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::density::{anti, loc, Var::*};
    use crate::algebra::Coeff;

    #[test]
    fn roundtrip() {
        let d = Density::monomial(Coeff::sqrt_of("eps").scale(&num_rational::BigRational::new(3.into(), 7.into())), vec![loc(U, 2), anti(V, &[0, 1])])
            .add(&Density::monomial(crate::algebra::parse_coeff("a/(a+b)").unwrap(), vec![loc(Qx, 0), loc(P, 1)]));
        let j = density_json(&d);
        let back = density_from_json(&from_str(&to_string_pretty(&j)).unwrap()).unwrap();
        assert_eq!(back, d);
        let o = d.integrate().mul(&Density::monomial(Coeff::int(2), vec![loc(V, 0), loc(V, 0)]).integrate());
        let back = observable_from_json(&observable_json(&o)).unwrap();
        assert_eq!(back, o);
    }
}
