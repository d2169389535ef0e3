//! Yes/no certificates for manifolds: invariance of the manifold under the
//! linearized flow, the conditional-symmetry formulation of the same fact,
//! and cross-derivative compatibility of the resulting linear pair. Checks
//! are registered behind a common trait so callers can run one by name or
//! all of them uniformly.

use std::collections::BTreeSet;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::atom::Name;
use crate::error::{Error, Result};
use crate::jet::{dt_with_v_images, EvolutionEquation};
use crate::manifold::LinearManifold;
use crate::normal::NormalForm;
use crate::poly::Poly;
use crate::render::{nf_text, poly_text};

#[derive(Serialize, Deserialize, Clone, Copy, PartialEq, Eq, Debug)]
pub enum Status {
    Verified,
    Refuted,
    Inapplicable,
}

impl std::fmt::Display for Status {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Status::Verified => "Verified",
            Status::Refuted => "Refuted",
            Status::Inapplicable => "Inapplicable",
        })
    }
}

/// Outcome of one check on one manifold. `residual` is the canonical text
/// of the nonzero normal form when the check is refuted; `witness` is a
/// monomial that carries a nonzero coefficient in it.
#[derive(Serialize, Deserialize, Clone, Debug)]
pub struct VerificationReport {
    pub subject: String,
    pub check: String,
    pub status: Status,
    pub residual: Option<String>,
    pub witness: Option<String>,
    pub parameters: Vec<String>,
    /// True when no parameter occurs in the coefficients: the manifold
    /// verifies, if it does, without a spectral parameter.
    pub parameter_free: bool,
    pub details: Vec<String>,
    pub elapsed_ms: u128,
}

impl VerificationReport {
    fn build(
        subject: &str,
        check: &str,
        residual: NormalForm,
        details: Vec<String>,
        m: &LinearManifold,
        start: Instant,
    ) -> Self {
        let status = if residual.is_zero() {
            Status::Verified
        } else {
            Status::Refuted
        };
        let witness = residual
            .numerator()
            .leading()
            .map(|(mon, _)| poly_text(&Poly::monomial(mon.clone(), num::BigRational::from_integer(1.into()))));
        let params = m.parameters();
        VerificationReport {
            subject: subject.to_string(),
            check: check.to_string(),
            status,
            residual: (!residual.is_zero()).then(|| nf_text(&residual)),
            witness: (!residual.is_zero()).then_some(witness).flatten(),
            parameters: params.iter().map(|n| n.to_string()).collect(),
            parameter_free: params.is_empty(),
            details,
            elapsed_ms: start.elapsed().as_millis(),
        }
    }

    pub fn passed(&self) -> bool {
        self.status == Status::Verified
    }
}

/// Parameter atoms occurring in the manifold's coefficients. An empty set
/// marks a manifold that cannot produce a true spectral pair.
pub fn parameter_presence(m: &LinearManifold) -> BTreeSet<Name> {
    m.parameters()
}

pub trait Check: Sync {
    fn name(&self) -> &'static str;
    fn describe(&self) -> &'static str;
    fn run(
        &self,
        subject: &str,
        m: &LinearManifold,
        eq: &EvolutionEquation,
    ) -> Result<VerificationReport>;
}

/// Direct invariance: the reduced total t-derivative of `H` vanishes.
pub struct InvariantManifoldCheck;

impl Check for InvariantManifoldCheck {
    fn name(&self) -> &'static str {
        "invariant-manifold"
    }

    fn describe(&self) -> &'static str {
        "reduced t-derivative of the manifold vanishes on the joint flow"
    }

    fn run(
        &self,
        subject: &str,
        m: &LinearManifold,
        eq: &EvolutionEquation,
    ) -> Result<VerificationReport> {
        let start = Instant::now();
        let r = m.residual(eq)?;
        Ok(VerificationReport::build(
            subject,
            self.name(),
            r,
            Vec::new(),
            m,
            start,
        ))
    }
}

/// Conditional-symmetry formulation: the evolutionary field with
/// characteristic `H` in the direction of the linearized variable leaves
/// both equations of the joint system invariant on their solution set. The
/// first condition holds structurally (the base equation contains no jets
/// of the linearized variable, so the field's prolongation cannot touch
/// it); the second is the invariance residual.
pub struct ConditionalSymmetryCheck;

impl Check for ConditionalSymmetryCheck {
    fn name(&self) -> &'static str {
        "gcs"
    }

    fn describe(&self) -> &'static str {
        "manifold is the characteristic of a conditional symmetry of the joint system"
    }

    fn run(
        &self,
        subject: &str,
        m: &LinearManifold,
        eq: &EvolutionEquation,
    ) -> Result<VerificationReport> {
        let start = Instant::now();
        // Structural first condition: the base flow is free of the
        // linearized variable, so prolonging the characteristic field
        // annihilates it identically.
        let touches_v = eq
            .rhs()
            .contains_atom_where(&mut |a| a.is_v_jet());
        let mut details = vec![if touches_v {
            "first condition: base equation unexpectedly involves the linearized variable".to_string()
        } else {
            "first condition: identically zero (base flow is free of the linearized variable)"
                .to_string()
        }];
        if touches_v {
            return Err(Error::InvalidEquation(
                "base equation involves the linearized variable".into(),
            ));
        }
        let r = m.residual(eq)?;
        details.push(match r.is_zero() {
            true => "second condition: invariance residual is identically zero".to_string(),
            false => "second condition: invariance residual is nonzero".to_string(),
        });
        Ok(VerificationReport::build(
            subject,
            self.name(),
            r,
            details,
            m,
            start,
        ))
    }
}

/// Compatibility of the pair: the t-derivative of the solved top jet
/// computed through the manifold (route A) agrees with the one computed
/// through the linearized flow (route B); both are reduced modulo the
/// manifold before comparison.
pub struct LaxPairCheck;

impl Check for LaxPairCheck {
    fn name(&self) -> &'static str {
        "lax-pair"
    }

    fn describe(&self) -> &'static str {
        "cross-derivative compatibility of the manifold with the linearized flow"
    }

    fn run(
        &self,
        subject: &str,
        m: &LinearManifold,
        eq: &EvolutionEquation,
    ) -> Result<VerificationReport> {
        let start = Instant::now();
        let table = m.reduced_flow_table(eq, m.p())?;
        // Route A: differentiate the solved form in t (with reduced flow
        // images for the surviving low-order v jets), then reduce.
        let route_a = m.reduce_v(&dt_with_v_images(&m.solve_top(), eq, &table)?)?;
        // Route B: the top jet flows to the p-th x-prolongation of the
        // linearized right-hand side, reduced after each step.
        let route_b = table[m.p() as usize].clone();
        let difference = route_a.sub(&route_b);
        let mut details = vec![if difference.is_zero() {
            "routes through the manifold and through the flow agree exactly".to_string()
        } else {
            "routes through the manifold and through the flow disagree".to_string()
        }];
        if m.parameters().is_empty() {
            details.push(
                "no spectral parameter in the coefficients; compatibility holds but the pair is not a true spectral pair"
                    .to_string(),
            );
        }
        Ok(VerificationReport::build(
            subject,
            self.name(),
            difference,
            details,
            m,
            start,
        ))
    }
}

/// The standard checks, runnable by name or all together.
pub struct CheckRegistry {
    checks: Vec<Box<dyn Check>>,
}

impl CheckRegistry {
    pub fn standard() -> Self {
        CheckRegistry {
            checks: vec![
                Box::new(InvariantManifoldCheck),
                Box::new(ConditionalSymmetryCheck),
                Box::new(LaxPairCheck),
            ],
        }
    }

    pub fn get(&self, name: &str) -> Result<&dyn Check> {
        self.checks
            .iter()
            .map(|c| c.as_ref())
            .find(|c| c.name() == name)
            .ok_or_else(|| Error::UnknownCheck(name.to_string()))
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.checks.iter().map(|c| c.name()).collect()
    }

    pub fn iter(&self) -> impl Iterator<Item = &dyn Check> {
        self.checks.iter().map(|c| c.as_ref())
    }

    /// Run every registered check; reports come back in registry order.
    pub fn run_all(
        &self,
        subject: &str,
        m: &LinearManifold,
        eq: &EvolutionEquation,
    ) -> Result<Vec<VerificationReport>> {
        self.checks
            .iter()
            .map(|c| c.run(subject, m, eq))
            .collect()
    }
}
