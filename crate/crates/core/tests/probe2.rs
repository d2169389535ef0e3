use laxkit_core::atom::{name, Atom};
use laxkit_core::jet::{dx, EvolutionEquation};
use laxkit_core::manifold::LinearManifold;
use laxkit_core::normal::{normalize, NormalForm};
use laxkit_core::parse::{parse_expr, ParseContext};

fn nf(src: &str) -> NormalForm {
    let ctx = ParseContext::new("u");
    normalize(&parse_expr(src, &ctx).unwrap()).unwrap()
}

fn solvable(n: &str) -> NormalForm {
    NormalForm::atom(Atom::Param(name(&format!("?{n}"))))
}

#[test]
fn probe_table_stages() {
    let kdv = EvolutionEquation::parse("u_t = u*u_1 + u_3").unwrap();
    let basis = [
        "1", "u", "u_1", "u_2", "u^2", "u*u_1", "u*u_2", "u_1^2", "u_1*u_2", "u_2^2",
    ];
    let mut coeffs = Vec::new();
    for j in 0..2 {
        let mut num = NormalForm::zero();
        for (i, b) in basis.iter().enumerate() {
            num = num.add(&solvable(&format!("n{j}b{i}")).mul(&nf(b)));
        }
        coeffs.push(num);
    }
    let m = LinearManifold::new(&name("u"), coeffs).unwrap();

    let t = std::time::Instant::now();
    let table = m.reduced_flow_table(&kdv, m.p()).unwrap();
    println!(
        "table ({} entries) in {} ms; sizes: {:?}",
        table.len(),
        t.elapsed().as_millis(),
        table
            .iter()
            .map(|e| e.numerator().terms().count())
            .collect::<Vec<_>>()
    );

    // Time one raw dx on the last entry.
    let t = std::time::Instant::now();
    let d = dx(table.last().unwrap()).unwrap();
    println!(
        "dx(last) in {} ms, {} terms",
        t.elapsed().as_millis(),
        d.numerator().terms().count()
    );

    let t = std::time::Instant::now();
    let r = m.residual(&kdv).unwrap();
    println!(
        "residual in {} ms, {} terms",
        t.elapsed().as_millis(),
        r.numerator().terms().count()
    );
}
