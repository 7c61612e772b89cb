//! The three coefficient statements that do not hold for the computed normal
//! forms, asserted as stated. Ignored by default; `cargo test -- --ignored`
//! shows the failures. The acceptance report covers the analysed values.

use wavenf_core::algebra::{loc, parse_coeff, Coeff, Factor, Observable, Var};
use wavenf_core::kdv::hierarchy_match;
use wavenf_core::models::{FpuModel, MechanicalModel};

use Var::{U, V};

fn c(s: &str) -> Coeff {
    parse_coeff(s).unwrap()
}

fn both(coef: &Coeff, orders: &[u32]) -> Observable {
    let m = |v: Var| -> Vec<Factor> { orders.iter().map(|&d| loc(v, d)).collect() };
    Observable::integral_of(&m(U)).scale(coef).add(&Observable::integral_of(&m(V)).scale(coef))
}

fn mean_sq(v: Var) -> Observable {
    Observable::integral_of(&[loc(v, 0), loc(v, 0)])
}

#[test]
#[ignore = "alpha-quadratic Z4 coefficients come out at half the stated values"]
fn mechanical_z4_as_stated() {
    let s = |n: &str| Coeff::sym(n);
    let (a1, a2, b1, b2, b3) = (s("alpha1"), s("alpha2"), s("beta1"), s("beta2"), s("beta3"));
    let r8 = &Coeff::int(2) * &Coeff::sqrt2();
    let z4 = both(&(&(&b1 * &c("1/4")) - &(&(&a1 * &a1) * &c("9/16"))), &[0, 0, 0, 0])
        .add(&both(&(&(&b2 / &r8) - &(&(&(&a1 * &a2) * &Coeff::int(3)) / &Coeff::sqrt2())), &[0, 1, 1]))
        .add(&both(&(&(&b3 - &(&a2 * &a2)) * &c("1/2")), &[2, 2]))
        .add(&mean_sq(U).mul(&mean_sq(V)).scale(&(&(&b1 * &c("3/2")) - &(&(&a1 * &a1) * &c("9/2")))))
        .add(&mean_sq(U).mul(&mean_sq(U)).add(&mean_sq(V).mul(&mean_sq(V))).scale(&(&(&a1 * &a1) * &c("9/16"))));
    let nf = MechanicalModel::symbolic().normal_form().unwrap();
    assert_eq!(nf.z(4), z4);
}

#[test]
#[ignore = "the substituted mean-field coefficient has -alpha^2 eps/32"]
fn fpu_mean_field_by_substitution() {
    let nf = FpuModel::symbolic().alternate_substitutions().unwrap().normal_form().unwrap();
    let prod = mean_sq(U).mul(&mean_sq(V));
    let key = prod.terms().next().unwrap().0.clone();
    let (a, b, e) = (Coeff::sym("alpha"), Coeff::sym("beta"), Coeff::sym("eps"));
    let want = &(&(&b * &c("3/8")) - &(&(&a * &a) * &c("1/4"))) * &e;
    assert_eq!(nf.z(4).coefficient(&key), want);
}

#[test]
#[ignore = "the residual never vanishes: the u u_x^2 coefficient is twice the I3 share"]
fn hierarchy_iff_five_sixths() {
    let nf = FpuModel::symbolic().normal_form().unwrap();
    let r = hierarchy_match(&nf.z(2), &nf.z(4), U).unwrap();
    let a = Coeff::sym("alpha");
    let at = |beta: Coeff| r.residual_at("beta", &beta).unwrap();
    assert!(at(&(&a * &a) * &c("5/6")).is_zero());
    assert!(!at(Coeff::zero()).is_zero());
}
