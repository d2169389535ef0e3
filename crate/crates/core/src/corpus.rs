//! Built-in catalogue of classified invariant manifolds: two for the KdV
//! equation, two for the modified KdV equation, ten for the potential
//! Sharma-Tasso-Olver equation, and the constant-coefficient heat family.
//! Every entry is expected to verify to an exact zero residual.

use crate::error::{Error, Result};
use crate::jet::EvolutionEquation;
use crate::manifold::{render_manifold_block, LinearManifold};
use crate::normal::normalize;
use crate::parse::{parse_expr, ParseContext};
use crate::verify::{CheckRegistry, Status, VerificationReport};

#[derive(Clone, Debug)]
pub struct CorpusManifold {
    /// Stable identifier, e.g. `kdv/p3` or `sto/H3_7`.
    pub id: &'static str,
    /// Display label in the literature's naming, e.g. `H_7^3`.
    pub label: &'static str,
    pub expected: Status,
    pub expected_p: u32,
    pub expected_s: u32,
    pub manifold: LinearManifold,
}

#[derive(Clone, Debug)]
pub struct CorpusEntry {
    pub id: &'static str,
    pub title: &'static str,
    pub equation: EvolutionEquation,
    /// The pre-substitution form of the equation, when the manifolds attach
    /// to a transformed variable (the Sharma-Tasso-Olver entry stores its
    /// original conservative form here).
    pub original: Option<EvolutionEquation>,
    pub notes: &'static [&'static str],
    pub manifolds: Vec<CorpusManifold>,
}

struct ManifoldSpec {
    id: &'static str,
    label: &'static str,
    p: u32,
    s: u32,
    /// Coefficient sources ordered `a0, a1, ..., a_{p-1}`.
    coeffs: &'static [&'static str],
}

struct EntrySpec {
    id: &'static str,
    title: &'static str,
    dep: &'static str,
    equation: &'static str,
    original: Option<&'static str>,
    notes: &'static [&'static str],
    manifolds: &'static [ManifoldSpec],
}

const KDV: EntrySpec = EntrySpec {
    id: "kdv",
    title: "Korteweg-de Vries equation",
    dep: "u",
    equation: "u_t = u*u_1 + u_3",
    original: None,
    notes: &[
        "Orders p = 3 and p = 4 admit invariant manifolds; p = 2 and 5 <= p <= 7 do not.",
    ],
    manifolds: &[
        ManifoldSpec {
            id: "kdv/p3",
            label: "p = 3 manifold",
            p: 3,
            s: 2,
            coeffs: &[
                "(2/3)*u*u_2/u_1 + lambda*u_2/u_1 - u_1",
                "-(2*u/3 + lambda)",
                "u_2/u_1",
            ],
        },
        ManifoldSpec {
            id: "kdv/p4",
            label: "p = 4 manifold",
            p: 4,
            s: 3,
            coeffs: &[
                "u_1*u_3/u_2 - (4/3)*u_2",
                "-((5/3)*u_1 + (u_3/u_2)*(lambda - 2*u/3))",
                "lambda - 2*u/3",
                "u_3/u_2",
            ],
        },
    ],
};

const MKDV: EntrySpec = EntrySpec {
    id: "mkdv",
    title: "modified Korteweg-de Vries equation",
    dep: "u",
    equation: "u_t = u_3 - (1/6)*u^2*u_1",
    original: None,
    notes: &[
        "The substitution u = -w^2/6 + w_1 carries solutions of this flow into the KdV flow u_t = u*u_1 + u_3 (recorded as provenance; no computation uses it).",
        "Both manifolds have order p = 4; for 5 <= p <= 7 none exist.",
    ],
    manifolds: &[
        ManifoldSpec {
            id: "mkdv/H4_1",
            label: "H_1^4",
            p: 4,
            s: 3,
            coeffs: &[
                "(9*lambda*u_2*u^2 - 27*lambda*u_3*u + 27*lambda*u_1*u_2 + u_2*u^4 - 3*u_1^2*u^3 - 3*u_3*u^3 + 15*u_1*u_2*u^2 - 36*u_2^2*u + 27*u_1*u_3*u - 27*u_1^2*u_2)/(27*(u*u_1 - 3*u_2))",
                "-((9*lambda*u_1*u^2 + 27*lambda*u_1^2 - 81*lambda*u_3 + u_1*u^4 + 3*u_1^2*u^2 - 9*u_3*u^2)/(27*(u*u_1 - 3*u_2)) - (5/9)*u*u_1)",
                "lambda + u^2/9 + (3*u_3*u - u_2*u^2 - 3*u_1*u_2)/(3*(u*u_1 - 3*u_2))",
                "(u_1*u^2 + 3*u_1^2 - 9*u_3)/(3*(u*u_1 - 3*u_2))",
            ],
        },
        ManifoldSpec {
            id: "mkdv/H4_2",
            label: "H_2^4",
            p: 4,
            s: 3,
            coeffs: &[
                "-(9*lambda*u_2*u^2 + 27*lambda*u_3*u - 27*lambda*u_1*u_2 + u_2*u^4 - 3*u_1^2*u^3 + 3*u_3*u^3 - 15*u_1*u_2*u^2 - 36*u_2^2*u + 27*u_1*u_3*u - 27*u_1^2*u_2)/(27*(u*u_1 + 3*u_2))",
                "(9*lambda*u_1*u^2 - 27*lambda*u_1^2 - 81*lambda*u_3 + u_1*u^4 - 3*u_1^2*u^2 - 9*u_3*u^2)/(27*(u*u_1 + 3*u_2)) + (5/9)*u*u_1",
                "lambda + u^2/9 + (u_2*u^2 + 3*u_3*u - 3*u_1*u_2)/(3*(u*u_1 + 3*u_2))",
                "-(u_1*u^2 - 3*u_1^2 - 9*u_3)/(3*(u*u_1 + 3*u_2))",
            ],
        },
    ],
};

const STO: EntrySpec = EntrySpec {
    id: "sto",
    title: "Sharma-Tasso-Olver equation (potential form)",
    dep: "w",
    equation: "w_t = -(w_1^3 + 3*w_1*w_2 + w_3)",
    original: Some("u_t = -gamma*(3*u^2*u_1 + 3*u_1^2 + 3*u*u_2 + u_3)"),
    notes: &[
        "The original conservative form (stored alongside) becomes the potential form under u = w_1 after rescaling t by gamma and integrating once with zero constant; all manifolds attach to the potential form.",
        "Delta in the H_5^3 denominators is exp(w)*(w_1^2 + w_2) + lambda, with the same constant lambda in its numerators.",
        "H_7^3 carries no parameter: its pair is compatible but has no spectral constant.",
    ],
    manifolds: &[
        ManifoldSpec {
            id: "sto/H2_1",
            label: "H_1^2",
            p: 2,
            s: 3,
            coeffs: &[
                "(w_2*(w_1^2 - 2*lambda*w_1 - w_2) + w_3*(w_1 - lambda))/(w_1^2 + w_2)",
                "lambda - w_1 + (2*w_1*w_2 + w_3)/(w_1^2 + w_2)",
            ],
        },
        ManifoldSpec {
            id: "sto/H2_2",
            label: "H_2^2",
            p: 2,
            s: 3,
            coeffs: &[
                "-(w_2*(w_1^2 - w_2 + lambda) + w_1*w_3)/(w_1*(lambda - w_1) - w_2 + lambda)",
                "-(w_1 + (w_2*(2*w_1 - lambda) + w_3)/(w_1*(lambda - w_1) - w_2 + lambda))",
            ],
        },
        ManifoldSpec {
            id: "sto/H2_3",
            label: "H_3^2",
            p: 2,
            s: 3,
            coeffs: &[
                "-lambda*(w_2^2 - w_1^2*w_2 - w_1*w_3)/(lambda*w_1^2 + w_2*(lambda - exp(w)))",
                "-(lambda*w_1^3 - lambda*w_1*w_2 - lambda*w_3 + exp(w)*w_3)/(lambda*w_1^2 + w_2*(lambda - exp(w)))",
            ],
        },
        ManifoldSpec {
            id: "sto/H3_1",
            label: "H_1^3",
            p: 3,
            s: 3,
            coeffs: &[
                "(lambda*(w_1^2 - w_2)*w_2 + lambda*w_1*w_3)/(w_2 + w_1^2 - lambda*w_1)",
                "(lambda*w_1^3 + w_1*(lambda*w_2 + 2*w_3) - w_1^4 - 3*w_2^2)/(w_2 + w_1^2 - lambda*w_1)",
                "(2*w_1^2*(lambda - w_1) - lambda*w_2 + w_3)/(w_2 + w_1^2 - lambda*w_1)",
            ],
        },
        ManifoldSpec {
            id: "sto/H3_2",
            label: "H_2^3",
            p: 3,
            s: 3,
            coeffs: &[
                "0",
                "-(2*lambda*w_1^3 + lambda^2*(w_1^2 - w_2) - w_3*(2*w_1 + lambda) + w_1^4 + 3*w_2^2)/(w_1*(w_1 + lambda) + w_2)",
                "-(w_1*(w_1 + lambda)*(2*w_1 + lambda) - w_3)/(w_1*(w_1 + lambda) + w_2)",
            ],
        },
        ManifoldSpec {
            id: "sto/H3_3",
            label: "H_3^3",
            p: 3,
            s: 3,
            coeffs: &[
                "lambda*(2*w_1*w_2 + w_3)/(w_1^2 + w_2)",
                "-(lambda*w_1^2 + w_2*(3*w_2 + lambda) + w_1^4 - 2*w_3*w_1)/(w_1^2 + w_2)",
                "-(2*w_1^3 - w_3)/(w_1^2 + w_2)",
            ],
        },
        ManifoldSpec {
            id: "sto/H3_4",
            label: "H_4^3",
            p: 3,
            s: 3,
            coeffs: &[
                "0",
                "(4*lambda*w_2 + 2*lambda*w_1^2 - w_1^4 + 2*w_3*w_1 - 3*w_2^2 - lambda^2)/(w_2 + w_1^2 - lambda)",
                "(2*lambda*w_1 - 2*w_1^3 + w_3)/(w_2 + w_1^2 - lambda)",
            ],
        },
        ManifoldSpec {
            id: "sto/H3_5",
            label: "H_5^3",
            p: 3,
            s: 3,
            coeffs: &[
                "-lambda*(w_1^3 + 3*w_2*w_1 + w_3)/(exp(w)*(w_1^2 + w_2) + lambda)",
                "-(3*lambda*(w_1^2 + w_2) + exp(w)*(w_1^4 - 2*w_3*w_1 + 3*w_2^2))/(exp(w)*(w_1^2 + w_2) + lambda)",
                "-(3*lambda*w_1 + exp(w)*(2*w_1^3 - w_3))/(exp(w)*(w_1^2 + w_2) + lambda)",
            ],
        },
        ManifoldSpec {
            id: "sto/H3_6",
            label: "H_6^3",
            p: 3,
            s: 3,
            coeffs: &[
                "0",
                "-(w_3*w_1*(lambda*exp(w) - 2) - w_2^2*(2*lambda*exp(w) - 3) + w_1^4)/(w_1^2 - w_2*(lambda*exp(w) - 1))",
                "-(w_3*(lambda*exp(w) - 1) - lambda*exp(w)*w_2*w_1 + 2*w_1^3)/(w_1^2 - w_2*(lambda*exp(w) - 1))",
            ],
        },
        ManifoldSpec {
            id: "sto/H3_7",
            label: "H_7^3",
            p: 3,
            s: 3,
            coeffs: &[
                "0",
                "-(w_1^4 - 2*w_3*w_1 + 3*w_2^2)/(w_1^2 + w_2)",
                "-(2*w_1^3 - w_3)/(w_1^2 + w_2)",
            ],
        },
    ],
};

const HEAT: EntrySpec = EntrySpec {
    id: "heat",
    title: "heat equation",
    dep: "u",
    equation: "u_t = u_2",
    original: None,
    notes: &[
        "The flow is linear, so the linearized equation is the flow itself; every constant pair (mu, lambda) gives an invariant manifold v_2 = mu*v_1 + lambda*v.",
    ],
    manifolds: &[ManifoldSpec {
        id: "heat/p2",
        label: "constant-coefficient family",
        p: 2,
        s: 0,
        coeffs: &["lambda", "mu"],
    }],
};

const SPECS: [&EntrySpec; 4] = [&KDV, &MKDV, &STO, &HEAT];

fn build_entry(spec: &EntrySpec) -> Result<CorpusEntry> {
    let equation = EvolutionEquation::parse(spec.equation)?;
    let original = spec
        .original
        .map(EvolutionEquation::parse)
        .transpose()?;
    let ctx = ParseContext::new(spec.dep).without_v();
    let mut manifolds = Vec::with_capacity(spec.manifolds.len());
    for m in spec.manifolds {
        let coeffs = m
            .coeffs
            .iter()
            .map(|src| normalize(&parse_expr(src, &ctx)?))
            .collect::<Result<Vec<_>>>()?;
        let manifold = LinearManifold::new(spec.dep, coeffs)?;
        if manifold.p() != m.p || manifold.s() != m.s {
            return Err(Error::InvalidManifold(format!(
                "catalogue metadata for {} disagrees with the coefficients: p={} s={} vs recorded p={} s={}",
                m.id,
                manifold.p(),
                manifold.s(),
                m.p,
                m.s
            )));
        }
        manifolds.push(CorpusManifold {
            id: m.id,
            label: m.label,
            expected: Status::Verified,
            expected_p: m.p,
            expected_s: m.s,
            manifold,
        });
    }
    Ok(CorpusEntry {
        id: spec.id,
        title: spec.title,
        equation,
        original,
        notes: spec.notes,
        manifolds,
    })
}

/// All catalogue entries, constructed and validated.
pub fn entries() -> Result<Vec<CorpusEntry>> {
    SPECS.iter().map(|s| build_entry(s)).collect()
}

/// One entry by id (`kdv`, `mkdv`, `sto`, `heat`).
pub fn entry(id: &str) -> Result<CorpusEntry> {
    let spec = SPECS
        .iter()
        .find(|s| s.id == id)
        .ok_or_else(|| Error::UnknownCorpusEntry(id.to_string()))?;
    build_entry(spec)
}

/// Locate a manifold by its full id (`kdv/p3`, `sto/H3_7`, ...), returning
/// it with its base equation.
pub fn find_manifold(id: &str) -> Result<(CorpusEntry, CorpusManifold)> {
    let entry_id = id.split('/').next().unwrap_or(id);
    let entry = entry(entry_id)?;
    let m = entry
        .manifolds
        .iter()
        .find(|m| m.id == id)
        .cloned()
        .ok_or_else(|| Error::UnknownCorpusEntry(id.to_string()))?;
    Ok((entry, m))
}

/// Run the full registry on one catalogue manifold.
pub fn run_manifold(
    registry: &CheckRegistry,
    entry: &CorpusEntry,
    m: &CorpusManifold,
) -> Result<Vec<VerificationReport>> {
    registry.run_all(m.id, &m.manifold, &entry.equation)
}

/// Export a manifold in the block format (re-parsable).
pub fn export(id: &str) -> Result<String> {
    let (entry, m) = find_manifold(id)?;
    Ok(render_manifold_block(&entry.equation, &m.manifold))
}

/// One-line summaries: id, title, order of the equation, manifold count.
pub fn list() -> Result<Vec<String>> {
    Ok(entries()?
        .iter()
        .map(|e| {
            format!(
                "{:6} n={} manifolds={:2}  {}",
                e.id,
                e.equation.order(),
                e.manifolds.len(),
                e.title
            )
        })
        .collect())
}
