//! Linear manifolds `v_p = sum_j alpha_j v_j` in the jets of the linearized
//! variable, rewriting modulo the manifold, and the invariance residual.

use crate::atom::{name, Atom, Name};
use crate::error::{Error, Result};
use crate::jet::{dt_with_v_images, dx, partial_jet, EvolutionEquation, LINEARIZED_DEP};
use crate::normal::{normalize, NormalForm};
use crate::parse::{parse_expr, ParseContext};
use crate::render::nf_text;

/// `H = v_p - sum_{j<p} alpha_j v_j`, stored through the coefficients
/// `alpha_0 .. alpha_{p-1}` (which depend on x, t, parameters, and jets of
/// the base equation's dependent variable only).
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct LinearManifold {
    dep: Name,
    coeffs: Vec<NormalForm>,
    s: u32,
}

impl LinearManifold {
    pub fn new(dep: &str, coeffs: Vec<NormalForm>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::InvalidManifold(
                "a linear manifold needs order at least 1".into(),
            ));
        }
        let mut s = 0u32;
        for (j, c) in coeffs.iter().enumerate() {
            let mut bad_v = false;
            let mut foreign: Option<String> = None;
            c.walk_atoms(&mut |a| match a {
                Atom::Jet(d, k) => {
                    if &**d == LINEARIZED_DEP {
                        bad_v = true;
                    } else if &**d != dep {
                        if foreign.is_none() {
                            foreign = Some(d.to_string());
                        }
                    } else {
                        s = s.max(*k);
                    }
                }
                Atom::Unknown(u) => {
                    if &*u.sig.dep != dep {
                        if foreign.is_none() {
                            foreign = Some(u.sig.dep.to_string());
                        }
                    } else if let Some(m) = u.sig.max_jet {
                        s = s.max(m);
                    }
                }
                _ => {}
            });
            if bad_v {
                return Err(Error::InvalidManifold(format!(
                    "coefficient a{j} contains a jet of `{LINEARIZED_DEP}`"
                )));
            }
            if let Some(found) = foreign {
                return Err(Error::ForeignJet {
                    expected: dep.to_string(),
                    found,
                });
            }
        }
        Ok(LinearManifold {
            dep: name(dep),
            coeffs,
            s,
        })
    }

    /// Order p: the manifold solves for `v_p`.
    pub fn p(&self) -> u32 {
        self.coeffs.len() as u32
    }

    /// Highest jet order of the base variable appearing in any coefficient
    /// (recomputed at construction, 0 when none appears).
    pub fn s(&self) -> u32 {
        self.s
    }

    pub fn dep(&self) -> &Name {
        &self.dep
    }

    pub fn coeffs(&self) -> &[NormalForm] {
        &self.coeffs
    }

    pub fn coeff(&self, j: u32) -> &NormalForm {
        &self.coeffs[j as usize]
    }

    /// The solved form `sum_j alpha_j v_j` that replaces `v_p`.
    pub fn solve_top(&self) -> NormalForm {
        let mut out = NormalForm::zero();
        for (j, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            let vj = NormalForm::atom(Atom::jet(LINEARIZED_DEP, j as u32));
            out = out.add(&a.mul(&vj));
        }
        out
    }

    /// Eliminate every `v_k` with `k >= p`, highest first: `v_q` is replaced
    /// by the (q-p)-th total x-derivative of the solved form, re-normalizing
    /// after each elimination until only `v_0 .. v_{p-1}` remain.
    pub fn reduce_v(&self, e: &NormalForm) -> Result<NormalForm> {
        let p = self.p();
        let mut cur = e.clone();
        let limit = match cur.max_jet_order(LINEARIZED_DEP) {
            Some(q) if q >= p => q - p + 1,
            _ => return Ok(cur),
        };
        let top = self.solve_top();
        let mut steps = 0u32;
        loop {
            let q = match cur.max_jet_order(LINEARIZED_DEP) {
                Some(q) if q >= p => q,
                _ => break,
            };
            if steps >= limit {
                return Err(Error::ReductionDepthExceeded { limit });
            }
            steps += 1;
            let mut replacement = top.clone();
            for _ in 0..(q - p) {
                replacement = dx(&replacement)?;
            }
            let target = Atom::jet(LINEARIZED_DEP, q);
            cur = cur.substitute(&target, &replacement)?;
        }
        assert!(
            cur.max_jet_order(LINEARIZED_DEP).is_none_or(|q| q < p),
            "reduction left a high jet of the linearized variable"
        );
        Ok(cur)
    }

    /// Parameter atoms occurring in any coefficient (solvable placeholders
    /// excluded). An empty set means the manifold carries no spectral
    /// parameter.
    pub fn parameters(&self) -> std::collections::BTreeSet<Name> {
        let mut out = std::collections::BTreeSet::new();
        for c in &self.coeffs {
            c.walk_atoms(&mut |a| {
                if let Atom::Param(n) = a {
                    if !n.starts_with('?') {
                        out.insert(n.clone());
                    }
                }
            });
        }
        out
    }

    /// Invariance residual: the reduced total t-derivative of `H`, which
    /// vanishes identically precisely when the manifold is invariant under
    /// the linearized flow.
    pub fn residual(&self, eq: &EvolutionEquation) -> Result<NormalForm> {
        if **eq.dep() != *self.dep {
            return Err(Error::ForeignJet {
                expected: eq.dep().to_string(),
                found: self.dep.to_string(),
            });
        }
        let table = self.reduced_flow_table(eq, self.p())?;
        let h = NormalForm::atom(Atom::jet(LINEARIZED_DEP, self.p())).sub(&self.solve_top());
        let r = dt_with_v_images(&h, eq, &table)?;
        // The images are already reduced and the coefficients carry no `v`
        // jets, so this is a cheap assertion pass, not a second elimination.
        self.reduce_v(&r)
    }

    /// Flow images `D_t(v_k)` for `k = 0 .. limit`, each reduced modulo the
    /// manifold: entry 0 is the reduced linearized right-hand side and each
    /// further entry is the reduced x-derivative of the previous one.
    /// Interleaving the reduction is sound because the total x-derivative
    /// maps the ideal generated by the constraint and its prolongations into
    /// itself, and it keeps intermediate expressions small where the raw
    /// prolongation chain grows explosively.
    pub fn reduced_flow_table(
        &self,
        eq: &EvolutionEquation,
        limit: u32,
    ) -> Result<Vec<NormalForm>> {
        let mut table = Vec::with_capacity(limit as usize + 1);
        table.push(self.reduce_v(&eq.linearized_rhs()?)?);
        for k in 1..=limit as usize {
            table.push(self.reduce_v(&dx(&table[k - 1])?)?);
        }
        Ok(table)
    }
}

/// A general manifold `H(x, t, u-jets; v, v_1, ..., v_p) = 0`, solvable for
/// the top jet of the linearized variable.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct GeneralManifold {
    h: NormalForm,
    p: u32,
}

impl GeneralManifold {
    pub fn new(h: NormalForm) -> Result<Self> {
        let p = h.max_jet_order(LINEARIZED_DEP).ok_or_else(|| {
            Error::InvalidManifold("no jet of the linearized variable appears".into())
        })?;
        let top = partial_jet(&h, LINEARIZED_DEP, p)?;
        if top.is_zero() {
            return Err(Error::InvalidManifold(
                "not solvable for the top linearized jet".into(),
            ));
        }
        Ok(GeneralManifold { h, p })
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn h(&self) -> &NormalForm {
        &self.h
    }

    /// Extract the linear form when `H` is linear homogeneous in the jets of
    /// the linearized variable; rewriting modulo a manifold is only defined
    /// for that shape.
    pub fn as_linear(&self, dep: &str) -> Result<LinearManifold> {
        let mut partials = Vec::with_capacity(self.p as usize + 1);
        let mut affine = self.h.clone();
        for j in 0..=self.p {
            let dj = partial_jet(&self.h, LINEARIZED_DEP, j)?;
            if dj.contains_atom_where(&mut |a| a.is_v_jet()) {
                return Err(Error::InvalidManifold(
                    "not linear in the jets of the linearized variable".into(),
                ));
            }
            let vj = NormalForm::atom(Atom::jet(LINEARIZED_DEP, j));
            affine = affine.sub(&dj.mul(&vj));
            partials.push(dj);
        }
        if !affine.is_zero() {
            return Err(Error::InvalidManifold(
                "not homogeneous in the jets of the linearized variable".into(),
            ));
        }
        let top = partials.pop().unwrap();
        let coeffs = partials
            .into_iter()
            .map(|dj| dj.neg().div(&top))
            .collect::<Result<Vec<_>>>()?;
        LinearManifold::new(dep, coeffs)
    }
}

/// Parse a manifold block:
///
/// ```text
/// equation: w_t = -(w_1^3 + 3*w_1*w_2 + w_3)
/// order: 3
/// parameters: lambda
/// a2 = -(2*w_1^3 - w_3)/(w_1^2 + w_2)
/// a1 = ...
/// a0 = ...
/// ```
///
/// Blank lines and `#` comments are ignored; coefficient lines may appear in
/// any order but must cover `a0 .. a<p-1>` exactly once each.
pub fn parse_manifold_block(src: &str) -> Result<(EvolutionEquation, LinearManifold)> {
    let mut equation_src: Option<String> = None;
    let mut order: Option<u32> = None;
    let mut params: Vec<String> = Vec::new();
    let mut coeff_lines: Vec<(u32, String)> = Vec::new();

    for raw in src.lines() {
        let line = match raw.find('#') {
            Some(i) => &raw[..i],
            None => raw,
        }
        .trim();
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix("equation:") {
            equation_src = Some(rest.trim().to_string());
        } else if let Some(rest) = line.strip_prefix("order:") {
            let p: u32 = rest.trim().parse().map_err(|_| {
                Error::InvalidManifold(format!("bad order `{}`", rest.trim()))
            })?;
            order = Some(p);
        } else if let Some(rest) = line.strip_prefix("parameters:") {
            for p in rest.split(',') {
                let p = p.trim();
                if !p.is_empty() {
                    params.push(p.to_string());
                }
            }
        } else if let Some((lhs, rhs)) = line.split_once('=') {
            let lhs = lhs.trim();
            let j = lhs
                .strip_prefix('a')
                .and_then(|d| d.parse::<u32>().ok())
                .ok_or_else(|| {
                    Error::InvalidManifold(format!("expected `a<j> = ...`, got `{lhs}`"))
                })?;
            coeff_lines.push((j, rhs.trim().to_string()));
        } else {
            return Err(Error::InvalidManifold(format!(
                "unrecognized line `{line}`"
            )));
        }
    }

    let extra: Vec<&str> = params.iter().map(|s| s.as_str()).collect();
    let eq_src = equation_src
        .ok_or_else(|| Error::InvalidManifold("missing `equation:` line".into()))?;
    let eq = EvolutionEquation::parse_with_params(&eq_src, &extra)?;
    let p = order.ok_or_else(|| Error::InvalidManifold("missing `order:` line".into()))?;
    if p == 0 {
        return Err(Error::InvalidManifold("order must be positive".into()));
    }

    let mut ctx = ParseContext::new(eq.dep()).without_v();
    for e in &extra {
        ctx = ctx.with_parameter(e);
    }
    let mut coeffs: Vec<Option<NormalForm>> = vec![None; p as usize];
    for (j, src) in &coeff_lines {
        if *j >= p {
            return Err(Error::InvalidManifold(format!(
                "coefficient a{j} is out of range for order {p}"
            )));
        }
        let slot = &mut coeffs[*j as usize];
        if slot.is_some() {
            return Err(Error::InvalidManifold(format!("duplicate coefficient a{j}")));
        }
        *slot = Some(normalize(&parse_expr(src, &ctx)?)?);
    }
    let coeffs = coeffs
        .into_iter()
        .enumerate()
        .map(|(j, c)| c.ok_or_else(|| Error::InvalidManifold(format!("missing coefficient a{j}"))))
        .collect::<Result<Vec<_>>>()?;
    let m = LinearManifold::new(eq.dep(), coeffs)?;
    Ok((eq, m))
}

/// Render an equation-plus-manifold pair in the block format accepted by
/// [`parse_manifold_block`].
pub fn render_manifold_block(eq: &EvolutionEquation, m: &LinearManifold) -> String {
    let mut out = String::new();
    out.push_str(&format!("equation: {}_t = {}\n", eq.dep(), nf_text(eq.rhs())));
    out.push_str(&format!("order: {}\n", m.p()));
    let params = m.parameters();
    if !params.is_empty() {
        let list: Vec<&str> = params.iter().map(|n| &**n).collect();
        out.push_str(&format!("parameters: {}\n", list.join(", ")));
    }
    for j in (0..m.p()).rev() {
        out.push_str(&format!("a{j} = {}\n", nf_text(m.coeff(j))));
    }
    out
}
