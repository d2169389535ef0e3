use laxkit_core::jet::EvolutionEquation;
use laxkit_core::normal::{normalize, NormalForm};
use laxkit_core::parse::{parse_expr, ParseContext};
use laxkit_core::search::{search, RationalTemplate, SearchConfig};

fn nf(src: &str) -> NormalForm {
    let ctx = ParseContext::new("u");
    normalize(&parse_expr(src, &ctx).unwrap()).unwrap()
}

fn basis(srcs: &[&str]) -> Vec<NormalForm> {
    srcs.iter().map(|s| nf(s)).collect()
}

#[test]
fn probe_kdv_p3_per_order() {
    let kdv = EvolutionEquation::parse("u_t = u*u_1 + u_3").unwrap();
    let templates = vec![
        // a0: covers (2/3)u*u_2/u_1 + lambda*u_2/u_1 - u_1, plus a decoy
        RationalTemplate::rational(
            basis(&["u*u_2", "lambda*u_2", "u_1^2", "u_2"]),
            basis(&["u_1"]),
        ),
        // a1: covers -(2/3)u - lambda, plus decoys
        RationalTemplate::polynomial(basis(&["u", "lambda", "1", "u_1"])),
        // a2: covers u_2/u_1, plus a decoy
        RationalTemplate::rational(basis(&["u_2", "u_1"]), basis(&["u_1"])),
    ];
    let cfg = SearchConfig {
        case_budget: 1 << 20,
        ..SearchConfig::per_order(kdv, 3, 2, templates)
    };
    let t = std::time::Instant::now();
    let out = search(&cfg).unwrap();
    println!("kdv p=3 per-order ({} ms):", t.elapsed().as_millis());
    print!("{}", out.text());
}

#[test]
fn probe_kdv_p2() {
    let kdv = EvolutionEquation::parse("u_t = u*u_1 + u_3").unwrap();
    let b = basis(&[
        "1", "u", "u_1", "u_2", "u^2", "u*u_1", "u*u_2", "u_1^2", "u_1*u_2", "u_2^2",
    ]);
    let cfg = SearchConfig {
        case_budget: 1 << 20,
        ..SearchConfig::new(kdv, 2, 2, 2, RationalTemplate::polynomial(b))
    };
    let t = std::time::Instant::now();
    let out = search(&cfg).unwrap();
    println!("kdv p=2 ({} ms):", t.elapsed().as_millis());
    print!("{}", out.text());
}
