use laxkit_core::corpus;
use laxkit_core::manifold::parse_manifold_block;
use laxkit_core::verify::{CheckRegistry, Status};

#[test]
fn catalogue_builds_with_consistent_metadata() {
    let entries = corpus::entries().unwrap();
    let ids: Vec<&str> = entries.iter().map(|e| e.id).collect();
    assert_eq!(ids, ["kdv", "mkdv", "sto", "heat"]);
    let counts: Vec<usize> = entries.iter().map(|e| e.manifolds.len()).collect();
    assert_eq!(counts, [2, 2, 10, 1]);

    let sto = corpus::entry("sto").unwrap();
    assert_eq!(&**sto.equation.dep(), "w");
    assert_eq!(sto.equation.order(), 3);
    let original = sto.original.expect("original conservative form is stored");
    assert_eq!(&**original.dep(), "u");
    assert_eq!(original.order(), 3);

    // Every manifold id resolves through the lookup path.
    for e in &entries {
        for m in &e.manifolds {
            let (_, found) = corpus::find_manifold(m.id).unwrap();
            assert_eq!(found.label, m.label);
        }
    }
    assert!(corpus::entry("kp").is_err());
    assert!(corpus::find_manifold("kdv/p9").is_err());
}

#[test]
fn every_catalogue_manifold_verifies_under_all_checks() {
    let registry = CheckRegistry::standard();
    let entries = corpus::entries().unwrap();
    let mut failures = Vec::new();
    for e in &entries {
        for m in &e.manifolds {
            let reports = corpus::run_manifold(&registry, e, m).unwrap();
            assert_eq!(reports.len(), 3);
            for r in &reports {
                eprintln!(
                    "{:12} {:20} {:10} {} ms",
                    m.id, r.check, r.status.to_string(), r.elapsed_ms
                );
                if r.status != m.expected {
                    failures.push(format!(
                        "{} failed {}: residual {:?} witness {:?}",
                        m.id, r.check, r.residual, r.witness
                    ));
                }
                assert!(
                    r.elapsed_ms < 10_000,
                    "{} {} took {} ms",
                    m.id,
                    r.check,
                    r.elapsed_ms
                );
            }
        }
    }
    assert!(failures.is_empty(), "{}", failures.join("\n"));
}

#[test]
fn only_the_seventh_third_order_manifold_is_parameter_free() {
    let entries = corpus::entries().unwrap();
    for e in &entries {
        for m in &e.manifolds {
            let params = m.manifold.parameters();
            if m.id == "sto/H3_7" {
                assert!(params.is_empty(), "H_7^3 must carry no parameter");
            } else {
                assert!(
                    !params.is_empty(),
                    "{} unexpectedly parameter-free",
                    m.id
                );
                assert!(params.iter().any(|n| &**n == "lambda" || &**n == "mu"));
            }
        }
    }
}

#[test]
fn exports_reparse_to_the_same_manifold() {
    let entries = corpus::entries().unwrap();
    for e in &entries {
        for m in &e.manifolds {
            let block = corpus::export(m.id).unwrap();
            let (eq2, m2) = parse_manifold_block(&block).unwrap();
            assert_eq!(eq2, e.equation, "{} equation round-trip", m.id);
            assert_eq!(m2, m.manifold, "{} manifold round-trip", m.id);
        }
    }
}

#[test]
fn manifolds_refute_on_the_wrong_equation() {
    let registry = CheckRegistry::standard();
    let kdv = corpus::entry("kdv").unwrap();
    let mkdv = corpus::entry("mkdv").unwrap();

    let check = registry.get("invariant-manifold").unwrap();
    let r = check
        .run("kdv/p3 vs mkdv", &kdv.manifolds[0].manifold, &mkdv.equation)
        .unwrap();
    assert_eq!(r.status, Status::Refuted);
    assert!(r.residual.is_some());
    assert!(r.witness.is_some());

    let r = check
        .run("mkdv/H4_1 vs kdv", &mkdv.manifolds[0].manifold, &kdv.equation)
        .unwrap();
    assert_eq!(r.status, Status::Refuted);
    assert!(r.residual.is_some());
    assert!(r.witness.is_some());
}

#[test]
fn catalogue_listing_summarizes_entries() {
    let lines = corpus::list().unwrap();
    assert_eq!(lines.len(), 4);
    assert!(lines[0].contains("kdv") && lines[0].contains("n=3"));
    assert!(lines[2].contains("manifolds=10"));
}
