//! Overdetermined systems for unknown manifold coefficients.
//!
//! A manifold ansatz `v_p = Σ α_j v_j` with opaque coefficient functions
//! `α_j(x, t, u, …, u_s)` has an invariance residual that is linear in the
//! `v` jets, and polynomial in the jets `u_k` with `k > s` that the
//! coefficients cannot depend on. Splitting the residual by those monomials
//! turns "the residual vanishes identically" into a finite system of
//! equations in the `α_j` and their formal partials, each tagged with the
//! monomial it came from.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::sync::Arc;

use num::BigRational;
use serde_json::json;

use crate::atom::{name, Atom, Dir, Name, Partials, UnknownAtom, UnknownSig};
use crate::error::{Error, Result};
use crate::jet::{partial_atom, EvolutionEquation, LINEARIZED_DEP};
use crate::manifold::LinearManifold;
use crate::normal::NormalForm;
use crate::poly::{Monomial, Poly};
use crate::render;

/// Ansatz for a manifold of order `p` whose coefficients are opaque
/// functions of `x`, `t`, and the jets `u_0 … u_s`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SymbolicManifoldSpec {
    p: u32,
    s: u32,
    prefix: String,
}

impl SymbolicManifoldSpec {
    /// Coefficients named `a0 … a{p-1}`.
    pub fn new(p: u32, s: u32) -> Result<Self> {
        Self::with_prefix(p, s, "a")
    }

    pub fn with_prefix(p: u32, s: u32, prefix: &str) -> Result<Self> {
        if p == 0 {
            return Err(Error::OrderTooLow { p, min: 1 });
        }
        if prefix.is_empty() || !prefix.chars().all(|c| c.is_ascii_alphabetic()) {
            return Err(Error::InvalidManifold(format!(
                "coefficient prefix `{prefix}` must be alphabetic"
            )));
        }
        Ok(SymbolicManifoldSpec {
            p,
            s,
            prefix: prefix.to_string(),
        })
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn s(&self) -> u32 {
        self.s
    }

    pub fn coefficient_name(&self, j: u32) -> String {
        format!("{}{}", self.prefix, j)
    }

    /// Declared signature of the j-th coefficient for the given equation.
    pub fn signature(&self, eq: &EvolutionEquation, j: u32) -> UnknownSig {
        UnknownSig {
            name: name(&self.coefficient_name(j)),
            dep: eq.dep().clone(),
            has_x: true,
            has_t: true,
            max_jet: Some(self.s),
        }
    }

    /// The manifold with the coefficients left opaque.
    pub fn manifold(&self, eq: &EvolutionEquation) -> Result<LinearManifold> {
        let coeffs = (0..self.p)
            .map(|j| {
                NormalForm::atom(Atom::Unknown(UnknownAtom {
                    sig: Arc::new(self.signature(eq, j)),
                    partials: Partials::none(),
                }))
            })
            .collect();
        LinearManifold::new(eq.dep(), coeffs)
    }
}

/// One equation of the split system: the coefficient of `key · v_{v_order}`
/// in the residual numerator, required to vanish.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct DeterminingEquation {
    pub v_order: u32,
    /// Monomial in the jets the coefficients cannot depend on (the unit
    /// monomial for the jet-free layer).
    pub key: Monomial,
    pub lhs: NormalForm,
}

impl DeterminingEquation {
    /// The full monomial this equation is the coefficient of.
    pub fn display_monomial(&self) -> Monomial {
        self.key
            .mul(&Monomial::atom(Atom::jet(LINEARIZED_DEP, self.v_order)))
    }

    /// Canonical one-line rendering: `[monomial]  lhs = 0`.
    pub fn line(&self) -> String {
        let mono = Poly::monomial(
            self.display_monomial(),
            BigRational::from_integer(1.into()),
        );
        format!(
            "[{}]  {} = 0",
            render::poly_text(&mono),
            render::nf_text(&self.lhs)
        )
    }
}

/// The residual of a symbolic ansatz split into one equation per
/// (v-jet, high-jet monomial) pair.
#[derive(Clone, Debug)]
pub struct DeterminingSystem {
    dep: Name,
    p: u32,
    s: u32,
    residual: NormalForm,
    equations: Vec<DeterminingEquation>,
}

/// Generate the system for an equation and ansatz: reduce the invariance
/// residual with opaque coefficients, then split it by the `v` jets and the
/// high `u` jets.
pub fn generate(
    eq: &EvolutionEquation,
    spec: &SymbolicManifoldSpec,
) -> Result<DeterminingSystem> {
    let m = spec.manifold(eq)?;
    let residual = m.residual(eq)?;
    DeterminingSystem::from_residual(eq, spec.p(), spec.s(), residual)
}

/// Product of jets of `dep` at the given orders (duplicates raise powers).
pub fn jet_key(dep: &str, orders: &[u32]) -> Monomial {
    Monomial::from_pairs(orders.iter().map(|&k| (Atom::jet(dep, k), 1)).collect())
}

/// Split an expression polynomially by the jets `u_k` of `dep` with
/// `k > s`: returns (monomial in those jets, coefficient) pairs, highest
/// monomial first. The expression must be polynomial in the split jets.
pub fn split_over_jets(
    nf: &NormalForm,
    dep: &str,
    s: u32,
) -> Result<Vec<(Monomial, NormalForm)>> {
    let by_key = nf.collect_numerator(&|a: &Atom| {
        matches!(a, Atom::Jet(d, k) if **d == *dep && *k > s)
    })?;
    let mut out: Vec<(Monomial, NormalForm)> = by_key
        .into_iter()
        .map(|(key, coeff)| (key, NormalForm::from_poly(coeff)))
        .collect();
    out.sort_by(|a, b| b.0.cmp(&a.0));
    Ok(out)
}

impl DeterminingSystem {
    /// Split an already-computed residual. `s` is the splitting bound: jets
    /// `u_k` with `k > s` become monomial keys. Exposing this separately
    /// from [`generate`] lets staged pipelines substitute a partial solution
    /// into the residual and re-split, possibly with a different bound.
    pub fn from_residual(
        eq: &EvolutionEquation,
        p: u32,
        s: u32,
        residual: NormalForm,
    ) -> Result<Self> {
        let dep = eq.dep().clone();
        // Layer 1: the residual must be linear homogeneous in the v jets.
        let by_v = residual.collect_numerator(&|a: &Atom| {
            matches!(a, Atom::Jet(d, _) if &**d == LINEARIZED_DEP)
        })?;
        let mut equations = Vec::new();
        for (v_mono, coeff) in by_v {
            let v_order = match v_mono.pairs() {
                [(Atom::Jet(_, k), 1)] => *k,
                _ => {
                    return Err(Error::NonlinearResidual {
                        monomial: render::poly_text(&Poly::monomial(
                            v_mono.clone(),
                            BigRational::from_integer(1.into()),
                        )),
                    })
                }
            };
            // Layer 2: split the v-coefficient by the high jets.
            for (key, lhs) in split_over_jets(&NormalForm::from_poly(coeff), &dep, s)? {
                equations.push(DeterminingEquation { v_order, key, lhs });
            }
        }
        equations.sort_by(|a, b| {
            b.v_order
                .cmp(&a.v_order)
                .then_with(|| b.key.cmp(&a.key))
        });
        Ok(DeterminingSystem {
            dep,
            p,
            s,
            residual,
            equations,
        })
    }

    pub fn dep(&self) -> &Name {
        &self.dep
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    /// The splitting bound: jets above this order were split into keys.
    pub fn s(&self) -> u32 {
        self.s
    }

    pub fn residual(&self) -> &NormalForm {
        &self.residual
    }

    pub fn equations(&self) -> &[DeterminingEquation] {
        &self.equations
    }

    pub fn len(&self) -> usize {
        self.equations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.equations.is_empty()
    }

    pub fn find(&self, v_order: u32, key: &Monomial) -> Option<&DeterminingEquation> {
        self.equations
            .iter()
            .find(|e| e.v_order == v_order && e.key == *key)
    }

    /// Names of the opaque coefficient functions occurring in the system.
    pub fn unknowns(&self) -> BTreeSet<Name> {
        let mut names = BTreeSet::new();
        self.residual.walk_atoms(&mut |a| {
            if let Atom::Unknown(u) = a {
                names.insert(u.sig.name.clone());
            }
        });
        names
    }

    /// Rebuild the residual numerator from the equations: the sum of
    /// `lhs · key · v_{v_order}` over the system. Equals the residual's
    /// numerator exactly when the split lost nothing.
    pub fn reconstruct_numerator(&self) -> Poly {
        let mut sum = Poly::zero();
        for e in &self.equations {
            let mono = Poly::monomial(e.display_monomial(), BigRational::from_integer(1.into()));
            sum = sum.add(&e.lhs.numerator().mul(&mono));
        }
        sum
    }

    /// Apply an assignment to every equation; an all-zero result certifies
    /// the assignment as a solution of the system.
    pub fn substitute_solution(&self, assignment: &Assignment) -> Result<Vec<NormalForm>> {
        self.equations
            .iter()
            .map(|e| apply_assignment(&e.lhs, assignment))
            .collect()
    }

    /// Apply an assignment to the unsplit residual (staged pipelines
    /// re-split the result via [`DeterminingSystem::from_residual`]).
    pub fn substituted_residual(&self, assignment: &Assignment) -> Result<NormalForm> {
        apply_assignment(&self.residual, assignment)
    }

    pub fn text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "determining system: order {}, split above jet order {}, {} equations",
            self.p,
            self.s,
            self.equations.len()
        );
        for e in &self.equations {
            let _ = writeln!(out, "{}", e.line());
        }
        out
    }

    pub fn latex(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "\\begin{{align}}");
        for (i, e) in self.equations.iter().enumerate() {
            let sep = if i + 1 == self.equations.len() { "" } else { " \\\\" };
            let _ = writeln!(out, "{} &= 0{}", render::nf_latex(&e.lhs), sep);
        }
        let _ = writeln!(out, "\\end{{align}}");
        out
    }

    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "dependent": self.dep.to_string(),
            "order": self.p,
            "split_bound": self.s,
            "equations": self.equations.iter().map(|e| {
                let mono = Poly::monomial(
                    e.display_monomial(),
                    BigRational::from_integer(1.into()),
                );
                json!({
                    "v_order": e.v_order,
                    "key": render::poly_text(&Poly::monomial(
                        e.key.clone(),
                        BigRational::from_integer(1.into()),
                    )),
                    "monomial": render::poly_text(&mono),
                    "lhs": render::nf_text(&e.lhs),
                })
            }).collect::<Vec<_>>(),
        })
    }
}

/// A map from coefficient names to replacement expressions. Replacements
/// may themselves contain new opaque coefficients (staged ansätze).
#[derive(Clone, Debug, Default)]
pub struct Assignment(BTreeMap<Name, NormalForm>);

impl Assignment {
    pub fn new() -> Self {
        Assignment(BTreeMap::new())
    }

    pub fn set(&mut self, coefficient: &str, value: NormalForm) -> &mut Self {
        self.0.insert(name(coefficient), value);
        self
    }

    pub fn get(&self, coefficient: &str) -> Option<&NormalForm> {
        self.0.get(coefficient)
    }
}

fn direction_atom(sig: &UnknownSig, dir: Dir) -> Atom {
    match dir {
        Dir::X => Atom::X,
        Dir::T => Atom::T,
        Dir::Jet(k) => Atom::Jet(sig.dep.clone(), k),
    }
}

/// Replace every opaque coefficient in the expression by its assigned
/// value, resolving formal partials by differentiating the value. Every
/// coefficient occurring in the expression must be assigned; the
/// replacement is simultaneous (assigned values are not rewritten again).
pub fn apply_assignment(nf: &NormalForm, assignment: &Assignment) -> Result<NormalForm> {
    let mut atoms: BTreeSet<UnknownAtom> = BTreeSet::new();
    nf.walk_atoms(&mut |a| {
        if let Atom::Unknown(u) = a {
            atoms.insert(u.clone());
        }
    });
    let mut images: BTreeMap<UnknownAtom, NormalForm> = BTreeMap::new();
    for u in atoms {
        let base = assignment
            .0
            .get(&u.sig.name)
            .ok_or_else(|| Error::IncompleteAssignment(u.sig.name.to_string()))?;
        let mut image = base.clone();
        for (dir, mult) in u.partials.iter() {
            for _ in 0..mult {
                image = partial_atom(&image, &direction_atom(&u.sig, dir))?;
            }
        }
        images.insert(u, image);
    }
    nf.substitute_with(&|a: &Atom| match a {
        Atom::Unknown(u) => images.get(u).cloned(),
        _ => None,
    })
}
