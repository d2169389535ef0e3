use std::sync::Arc;

use laxkit_core::atom::{name, Atom, UnknownSig};
use laxkit_core::jet::{dt, dx, dx_iter, partial_jet, EvolutionEquation};
use laxkit_core::normal::normalize;
use laxkit_core::parse::{parse_expr, ParseContext};
use laxkit_core::{Error, NormalForm};

fn nf_in(dep: &str, src: &str) -> NormalForm {
    let ctx = ParseContext::new(dep);
    normalize(&parse_expr(src, &ctx).expect(src)).expect(src)
}

fn nf(src: &str) -> NormalForm {
    nf_in("u", src)
}

fn kdv() -> EvolutionEquation {
    EvolutionEquation::parse("u_t = u*u_1 + u_3").unwrap()
}

#[test]
fn total_x_derivative_prolongs_jets() {
    assert_eq!(dx(&nf("u_2")).unwrap(), nf("u_3"));
    assert_eq!(dx(&nf("u*u_1")).unwrap(), nf("u_1^2 + u*u_2"));
    assert_eq!(dx(&nf("x*t")).unwrap(), nf("t"));
    assert_eq!(dx(&nf("lambda")).unwrap(), NormalForm::zero());
    assert_eq!(dx(&nf("v_1*u")).unwrap(), nf("v_2*u + v_1*u_1"));
}

#[test]
fn total_x_derivative_obeys_the_quotient_and_chain_rules() {
    // d/dx (u_1 / u_2) = 1 - u_1 u_3 / u_2^2
    let r = dx(&nf("u_1/u_2")).unwrap();
    assert!(r.sub(&nf("1 - u_1*u_3/u_2^2")).is_zero());
    // d/dx exp(2 w) = 2 w_1 exp(2 w)
    let e = nf_in("w", "exp(2*w)");
    let de = dx(&e).unwrap();
    assert!(de.sub(&nf_in("w", "2*w_1*exp(2*w)")).is_zero());
}

#[test]
fn iterated_x_derivative_matches_manual_expansion() {
    let f = nf("u*u_1");
    let d2 = dx_iter(&f, 2).unwrap();
    assert!(d2.sub(&nf("3*u_1*u_2 + u*u_3")).is_zero());
}

#[test]
fn equation_parsing_validates_structure() {
    let eq = kdv();
    assert_eq!(&**eq.dep(), "u");
    assert_eq!(eq.order(), 3);

    assert!(matches!(
        EvolutionEquation::parse("u_t = v_1 + u_2"),
        Err(Error::Syntax { .. }) | Err(Error::UnknownSymbol(_))
    ));
    assert!(matches!(
        EvolutionEquation::parse("u_t = 5"),
        Err(Error::InvalidEquation(_))
    ));
    assert!(matches!(
        EvolutionEquation::parse("u_3 = u_1"),
        Err(Error::InvalidEquation(_))
    ));
    assert!(matches!(
        EvolutionEquation::parse("v_t = v_2"),
        Err(Error::InvalidEquation(_))
    ));
}

#[test]
fn linearization_applies_the_formal_jacobian() {
    let eq = kdv();
    let g = eq.linearized_rhs().unwrap();
    assert!(g.sub(&nf("u_1*v + u*v_1 + v_3")).is_zero());

    let mkdv = EvolutionEquation::parse("u_t = u_3 - (1/6)*u^2*u_1").unwrap();
    let g = mkdv.linearized_rhs().unwrap();
    assert!(g
        .sub(&nf("v_3 - (1/3)*u*u_1*v - (1/6)*u^2*v_1"))
        .is_zero());
}

#[test]
fn linear_equations_linearize_to_themselves() {
    let heat = EvolutionEquation::parse("u_t = u_2").unwrap();
    assert!(heat.is_linear().unwrap());
    assert_eq!(heat.linearized_rhs().unwrap(), nf("v_2"));

    let airy = EvolutionEquation::parse("u_t = u_3 + c1*u_1").unwrap();
    assert!(airy.is_linear().unwrap());

    assert!(!kdv().is_linear().unwrap());
}

#[test]
fn partial_jet_derivatives_are_projections() {
    let f = nf("u*u_1 + u_3");
    assert_eq!(partial_jet(&f, "u", 0).unwrap(), nf("u_1"));
    assert_eq!(partial_jet(&f, "u", 1).unwrap(), nf("u"));
    assert_eq!(partial_jet(&f, "u", 3).unwrap(), NormalForm::one());
    assert_eq!(partial_jet(&f, "u", 2).unwrap(), NormalForm::zero());
}

#[test]
fn reduced_time_derivative_uses_prolongations() {
    let eq = kdv();
    // u flows to f itself.
    assert_eq!(dt(&nf("u"), &eq).unwrap(), nf("u*u_1 + u_3"));
    // u_1 flows to D_x f.
    let want = dx(eq.rhs()).unwrap();
    assert_eq!(dt(&nf("u_1"), &eq).unwrap(), want);
    // v flows to the linearized right-hand side.
    assert_eq!(dt(&nf("v"), &eq).unwrap(), eq.linearized_rhs().unwrap());
    // x and t behave as coordinates.
    assert_eq!(dt(&nf("t*u"), &eq).unwrap().sub(&nf("u + t*(u*u_1 + u_3)")).is_zero(), true);
}

#[test]
fn time_and_space_derivatives_commute() {
    let eq = kdv();
    for src in ["u*v_1", "u_1*v - u*v_2", "exp(u)*v_1", "u_2/u_1 * v"] {
        let f = nf(src);
        let a = dx(&dt(&f, &eq).unwrap()).unwrap();
        let b = dt(&dx(&f).unwrap(), &eq).unwrap();
        assert!(a.sub(&b).is_zero(), "commutator failed on `{src}`");
    }
}

#[test]
fn unknown_coefficients_expand_into_formal_partials() {
    let sig = Arc::new(UnknownSig {
        name: name("a0"),
        dep: name("u"),
        has_x: true,
        has_t: true,
        max_jet: Some(1),
    });
    let ctx = ParseContext::new("u").with_unknown(sig.clone());
    let a0 = normalize(&parse_expr("a0", &ctx).unwrap()).unwrap();

    let dxa = dx(&a0).unwrap();
    let want_dx = normalize(
        &parse_expr("D[a0, x] + u_1*D[a0, u] + u_2*D[a0, u_1]", &ctx).unwrap(),
    )
    .unwrap();
    assert_eq!(dxa, want_dx);

    let eq = kdv();
    let dta = dt(&a0, &eq).unwrap();
    let want_dt = normalize(
        &parse_expr(
            "D[a0, t] + (u*u_1 + u_3)*D[a0, u] + (u_1^2 + u*u_2 + u_4)*D[a0, u_1]",
            &ctx,
        )
        .unwrap(),
    )
    .unwrap();
    assert_eq!(dta, want_dt);

    // Mixed second-order formal partials commute by construction.
    let dxdt = dx(&dta).unwrap();
    let dtdx = dt(&dxa, &eq).unwrap();
    assert!(dxdt.sub(&dtdx).is_zero());
}

#[test]
fn foreign_jets_are_rejected_by_the_reduced_derivative() {
    let eq = kdv();
    let w1 = NormalForm::atom(Atom::jet("w", 1));
    assert!(matches!(
        dt(&w1, &eq),
        Err(Error::ForeignJet { .. })
    ));
}
