use std::sync::Arc;

use laxkit_core::atom::{name, Atom, Dir, UnknownSig};
use laxkit_core::normal::normalize;
use laxkit_core::parse::{parse_expr, parse_expr_full, ParseContext};
use laxkit_core::render::text;
use laxkit_core::{Error, Expr};

fn ctx() -> ParseContext {
    ParseContext::new("u")
}

fn coeff_sig(n: &str, max_jet: u32) -> Arc<UnknownSig> {
    Arc::new(UnknownSig {
        name: name(n),
        dep: name("u"),
        has_x: true,
        has_t: true,
        max_jet: Some(max_jet),
    })
}

#[test]
fn jet_spellings_agree() {
    let a = parse_expr("u_xx", &ctx()).unwrap();
    let b = parse_expr("u_2", &ctx()).unwrap();
    let c = parse_expr("u[2]", &ctx()).unwrap();
    assert_eq!(a, b);
    assert_eq!(b, c);
    assert_eq!(parse_expr("u", &ctx()).unwrap(), Expr::jet("u", 0));
    assert_eq!(parse_expr("u_x", &ctx()).unwrap(), Expr::jet("u", 1));
    assert_eq!(parse_expr("v_xxx", &ctx()).unwrap(), Expr::jet("v", 3));
}

#[test]
fn default_parameters_are_recognized() {
    for p in ["lambda", "c1", "c2", "gamma", "mu"] {
        let e = parse_expr(p, &ctx()).unwrap();
        assert_eq!(e, Expr::Atom(Atom::Param(name(p))));
    }
    assert!(matches!(
        parse_expr("kappa", &ctx()),
        Err(Error::UnknownSymbol(s)) if s == "kappa"
    ));
    let e = parse_expr("kappa", &ctx().with_parameter("kappa")).unwrap();
    assert_eq!(e, Expr::Atom(Atom::Param(name("kappa"))));
}

#[test]
fn time_derivative_suffix_is_rejected_inside_expressions() {
    assert!(parse_expr("u_t", &ctx()).is_err());
    assert!(parse_expr("u_1 + v_t", &ctx()).is_err());
}

#[test]
fn v_jets_can_be_disallowed() {
    let c = ctx().without_v();
    assert!(parse_expr("v_1", &c).is_err());
    assert!(parse_expr("u_1", &c).is_ok());
}

#[test]
fn solvable_constants_are_collected_in_first_occurrence_order() {
    let c = ctx().with_solvables();
    let (_, names) = parse_expr_full("?b*u_1 + ?a*u + ?b", &c).unwrap();
    let got: Vec<&str> = names.iter().map(|n| &**n).collect();
    assert_eq!(got, ["?b", "?a"]);
    // Without the flag the same text is a syntax error.
    assert!(parse_expr("?b*u_1", &ctx()).is_err());
}

#[test]
fn formal_partials_parse_and_render() {
    let c = ctx().with_unknown(coeff_sig("a31", 3));
    let e = parse_expr("D[a31, u_2, x]", &c).unwrap();
    match &e {
        Expr::Atom(Atom::Unknown(u)) => {
            assert_eq!(&*u.sig.name, "a31");
            let dirs: Vec<(Dir, u32)> = u.partials.iter().collect();
            assert_eq!(dirs, vec![(Dir::X, 1), (Dir::Jet(2), 1)]);
        }
        other => panic!("expected a differentiated unknown, got {other:?}"),
    }
    let printed = text(&e);
    let back = parse_expr(&printed, &c).unwrap();
    assert_eq!(e, back);
    // Repeated directions accumulate multiplicity.
    let e2 = parse_expr("D[a31, u_2, u_2]", &c).unwrap();
    let p2 = text(&e2);
    assert_eq!(parse_expr(&p2, &c).unwrap(), e2);
}

#[test]
fn plain_unknowns_parse_by_name() {
    let c = ctx().with_unknown(coeff_sig("a0", 2));
    let e = parse_expr("a0*v_1 + u_1", &c).unwrap();
    assert!(normalize(&e).is_ok());
    assert!(parse_expr("a1", &c).is_err());
}

#[test]
fn syntax_errors_carry_positions() {
    match parse_expr("u_1 + ", &ctx()) {
        Err(Error::Syntax { line, col, .. }) => {
            assert_eq!(line, 1);
            assert!(col >= 5, "error should point at or after the dangling `+`");
        }
        other => panic!("expected syntax error, got {other:?}"),
    }
    assert!(parse_expr("u_1 u_2", &ctx()).is_err(), "implicit products are rejected");
    assert!(parse_expr("(u_1", &ctx()).is_err());
    assert!(parse_expr("u_", &ctx()).is_err());
    assert!(parse_expr("u^u", &ctx()).is_err(), "exponents must be integers");
}

#[test]
fn exponent_spellings() {
    let c = ctx();
    assert_eq!(
        parse_expr("u^-2", &c).unwrap(),
        parse_expr("u^(-2)", &c).unwrap()
    );
    let a = normalize(&parse_expr("u^-2 * u^3", &c).unwrap()).unwrap();
    let b = normalize(&parse_expr("u", &c).unwrap()).unwrap();
    assert_eq!(a, b);
}

#[test]
fn exp_requires_polynomial_argument() {
    assert!(parse_expr("exp(u + 2*t)", &ctx()).is_ok());
    assert!(matches!(
        parse_expr("exp(1/u)", &ctx()),
        Err(Error::BadExponentialArgument)
    ));
    assert!(matches!(
        parse_expr("exp(exp(u))", &ctx()),
        Err(Error::BadExponentialArgument)
    ));
    // exp(0) folds to 1.
    assert_eq!(parse_expr("exp(u - u)", &ctx()).unwrap(), Expr::one());
}

#[test]
fn unary_minus_chains() {
    let a = normalize(&parse_expr("--u", &ctx()).unwrap()).unwrap();
    let b = normalize(&parse_expr("u", &ctx()).unwrap()).unwrap();
    assert_eq!(a, b);
    let c = normalize(&parse_expr("2 - -u", &ctx()).unwrap()).unwrap();
    let d = normalize(&parse_expr("2 + u", &ctx()).unwrap()).unwrap();
    assert_eq!(c, d);
}
