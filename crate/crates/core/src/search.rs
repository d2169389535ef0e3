//! Order-bounded search for linear invariant manifolds: the p ≤ 2n+1
//! gate, structural obstruction scanning, the isolated top quadratic term,
//! and a best-effort template solver.
//!
//! The solver is template-driven: each coefficient is a ratio of linear
//! combinations of user-chosen basis expressions with undetermined
//! constants. The invariance residual then splits (by every jet, parameter,
//! and exponential) into polynomial constraints on the constants alone,
//! which are solved by exact linear elimination plus zero-first case
//! splitting on pivot constants under a branch budget. Every reported
//! manifold is re-verified symbolically; nothing is trusted from the case
//! analysis itself.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use num::{BigRational, One, Zero};
use serde_json::json;

use crate::atom::{name, Atom};
use crate::determining::{generate, jet_key, SymbolicManifoldSpec};
use crate::error::{Error, Result};
use crate::jet::EvolutionEquation;
use crate::manifold::LinearManifold;
use crate::normal::NormalForm;
use crate::poly::{Monomial, Poly};
use crate::render;

/// Ratio of linear combinations of basis expressions. An empty denominator
/// basis means denominator 1.
#[derive(Clone, Debug)]
pub struct RationalTemplate {
    pub numerator_basis: Vec<NormalForm>,
    pub denominator_basis: Vec<NormalForm>,
}

impl RationalTemplate {
    pub fn polynomial(numerator_basis: Vec<NormalForm>) -> Self {
        RationalTemplate {
            numerator_basis,
            denominator_basis: Vec::new(),
        }
    }

    pub fn rational(
        numerator_basis: Vec<NormalForm>,
        denominator_basis: Vec<NormalForm>,
    ) -> Self {
        RationalTemplate {
            numerator_basis,
            denominator_basis,
        }
    }
}

/// Template assignment across the coefficients a_0, ..., a_{p-1}.
#[derive(Clone, Debug)]
pub enum Templates {
    /// The same template for every coefficient.
    Uniform(RationalTemplate),
    /// One template per coefficient, indexed by j (length must equal p).
    PerOrder(Vec<RationalTemplate>),
}

impl Templates {
    fn for_order(&self, j: u32, p: u32) -> Result<&RationalTemplate> {
        match self {
            Templates::Uniform(t) => Ok(t),
            Templates::PerOrder(ts) => {
                if ts.len() != p as usize {
                    return Err(Error::InvalidManifold(format!(
                        "{} templates supplied for order {p}",
                        ts.len()
                    )));
                }
                Ok(&ts[j as usize])
            }
        }
    }
}

#[derive(Clone, Debug)]
pub struct SearchConfig {
    pub eq: EvolutionEquation,
    /// Inclusive order range to search.
    pub p_min: u32,
    pub p_max: u32,
    /// Highest jet order the coefficients may depend on.
    pub s: u32,
    /// Coefficient templates.
    pub templates: Templates,
    /// Maximum number of case branches explored per order.
    pub case_budget: u32,
}

impl SearchConfig {
    pub fn new(
        eq: EvolutionEquation,
        p_min: u32,
        p_max: u32,
        s: u32,
        template: RationalTemplate,
    ) -> Self {
        SearchConfig {
            eq,
            p_min,
            p_max,
            s,
            templates: Templates::Uniform(template),
            case_budget: 64,
        }
    }

    pub fn per_order(
        eq: EvolutionEquation,
        p: u32,
        s: u32,
        templates: Vec<RationalTemplate>,
    ) -> Self {
        SearchConfig {
            eq,
            p_min: p,
            p_max: p,
            s,
            templates: Templates::PerOrder(templates),
            case_budget: 64,
        }
    }
}

#[derive(Clone, Debug)]
pub struct ExportedConstraint {
    /// The residual monomial the constraint is the coefficient of.
    pub origin: String,
    pub constraint: String,
}

#[derive(Clone, Debug)]
pub struct ConstraintExport {
    pub constraints: Vec<ExportedConstraint>,
    pub note: Option<String>,
}

/// Result of the search at one order.
#[derive(Clone, Debug)]
pub enum Outcome {
    /// A residual coefficient free of every undetermined quantity is
    /// nonzero: no manifold of the requested shape exists.
    Inconsistent {
        monomial: String,
        coefficient: String,
    },
    /// Re-verified manifolds (surviving free constants appear as fresh
    /// parameters).
    Solved(Vec<LinearManifold>),
    /// The case analysis could not finish; the open polynomial constraints
    /// are exported for external treatment.
    ConstraintsRemain(ConstraintExport),
}

#[derive(Clone, Debug)]
pub struct SearchOutcome {
    pub per_order: Vec<(u32, Outcome)>,
    pub notes: Vec<String>,
}

impl SearchOutcome {
    pub fn text(&self) -> String {
        let mut out = String::new();
        for n in &self.notes {
            let _ = writeln!(out, "note: {n}");
        }
        for (p, o) in &self.per_order {
            match o {
                Outcome::Inconsistent {
                    monomial,
                    coefficient,
                } => {
                    let _ = writeln!(
                        out,
                        "p = {p}: inconsistent — coefficient of {monomial} is {coefficient}"
                    );
                }
                Outcome::Solved(ms) => {
                    let _ = writeln!(out, "p = {p}: {} manifold(s) found", ms.len());
                    for m in ms {
                        for (j, c) in m.coeffs().iter().enumerate().rev() {
                            let _ =
                                writeln!(out, "    a{j} = {}", render::nf_text(c));
                        }
                    }
                }
                Outcome::ConstraintsRemain(e) => {
                    let _ = writeln!(
                        out,
                        "p = {p}: {} constraint(s) remain{}",
                        e.constraints.len(),
                        e.note.as_deref().map(|n| format!(" ({n})")).unwrap_or_default()
                    );
                    for c in &e.constraints {
                        let _ = writeln!(out, "    [{}]  {} = 0", c.origin, c.constraint);
                    }
                }
            }
        }
        out
    }

    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "notes": self.notes,
            "orders": self.per_order.iter().map(|(p, o)| match o {
                Outcome::Inconsistent { monomial, coefficient } => json!({
                    "p": p,
                    "outcome": "inconsistent",
                    "witness_monomial": monomial,
                    "witness_coefficient": coefficient,
                }),
                Outcome::Solved(ms) => json!({
                    "p": p,
                    "outcome": "solved",
                    "manifolds": ms.iter().map(|m| {
                        m.coeffs().iter().map(render::nf_text).collect::<Vec<_>>()
                    }).collect::<Vec<_>>(),
                }),
                Outcome::ConstraintsRemain(e) => json!({
                    "p": p,
                    "outcome": "constraints-remain",
                    "note": e.note,
                    "constraints": e.constraints.iter().map(|c| json!({
                        "origin": c.origin,
                        "constraint": c.constraint,
                    })).collect::<Vec<_>>(),
                }),
            }).collect::<Vec<_>>(),
        })
    }
}

/// Scan the symbolic determining system for a structural contradiction: an
/// equation whose left side contains no undetermined coefficient at all yet
/// is not zero. Among all such equations the one with the highest jet key
/// (then highest differentiation order of the linearized variable) is
/// returned, so the witness is the top-order term of the prolonged flow.
pub fn obstruction_scan(
    eq: &EvolutionEquation,
    p: u32,
    s: u32,
) -> Result<Option<(Monomial, NormalForm)>> {
    let spec = SymbolicManifoldSpec::new(p, s)?;
    let sys = generate(eq, &spec)?;
    let mut best: Option<&crate::determining::DeterminingEquation> = None;
    for e in sys.equations() {
        if e.lhs.is_zero() {
            continue;
        }
        let mut has_unknown = false;
        e.lhs.walk_atoms(&mut |a| {
            if matches!(a, Atom::Unknown(_)) {
                has_unknown = true;
            }
        });
        if has_unknown {
            continue;
        }
        if best.is_none_or(|b| (&e.key, e.v_order) > (&b.key, b.v_order)) {
            best = Some(e);
        }
    }
    Ok(best.map(|e| (e.display_monomial(), e.lhs.clone())))
}

/// The part of an expression free of undetermined coefficient functions
/// (requires a trivial denominator).
pub fn unknown_free_part(nf: &NormalForm) -> NormalForm {
    assert!(
        nf.has_trivial_denominator(),
        "unknown_free_part expects a polynomial expression"
    );
    let mut kept = Poly::zero();
    for (m, c) in nf.numerator().terms() {
        let mut has_unknown = false;
        for (a, _) in m.pairs() {
            if matches!(a, Atom::Unknown(_)) {
                has_unknown = true;
            }
        }
        if !has_unknown {
            kept.add_term(m.clone(), c.clone());
        }
    }
    NormalForm::from_poly(kept)
}

/// The coefficient of `v_{p-1} · u_{2n+1}` in the reduced symbolic
/// residual — the isolated quadratic obstruction that rules out orders
/// beyond the bound. Requires `p ≥ 2n+2`, the regime where that term is
/// isolated; the exact extracted coefficient is returned for comparison.
pub fn top_quadratic_term(eq: &EvolutionEquation, p: u32) -> Result<NormalForm> {
    let n = eq.order();
    let min = 2 * n + 2;
    if p < min {
        return Err(Error::OrderTooLow { p, min });
    }
    let spec = SymbolicManifoldSpec::new(p, n)?;
    let sys = generate(eq, &spec)?;
    let key = jet_key(eq.dep(), &[2 * n + 1]);
    Ok(sys
        .find(p - 1, &key)
        .map(|e| e.lhs.clone())
        .unwrap_or_else(NormalForm::zero))
}

/// Run the order-bounded search. Requests with `p > 2n+1` while `s ≤ n`
/// are rejected before any computation; with `s > n` the bound does not
/// apply and a note records that the gate was bypassed.
pub fn search(cfg: &SearchConfig) -> Result<SearchOutcome> {
    let n = cfg.eq.order();
    let bound = 2 * n + 1;
    let mut notes = Vec::new();
    if cfg.p_min > cfg.p_max {
        return Err(Error::InvalidManifold(format!(
            "empty order range {}..{}",
            cfg.p_min, cfg.p_max
        )));
    }
    if cfg.s <= n {
        if cfg.p_max > bound {
            return Err(Error::OrderBoundExceeded {
                p: cfg.p_max,
                bound,
            });
        }
    } else {
        notes.push(format!(
            "coefficient jet order {} exceeds the equation order {}; the p <= {} bound is not enforced",
            cfg.s, n, bound
        ));
    }
    let mut per_order = Vec::new();
    for p in cfg.p_min..=cfg.p_max {
        // Structural stage: a contradiction independent of any ansatz.
        if let Some((mono, coeff)) = obstruction_scan(&cfg.eq, p, cfg.s)? {
            per_order.push((
                p,
                Outcome::Inconsistent {
                    monomial: render::poly_text(&Poly::monomial(
                        mono,
                        BigRational::one(),
                    )),
                    coefficient: render::nf_text(&coeff),
                },
            ));
            continue;
        }
        let (outcome, mut stage_notes) = ansatz_stage(cfg, p)?;
        notes.append(&mut stage_notes);
        per_order.push((p, outcome));
    }
    Ok(SearchOutcome { per_order, notes })
}

fn solvable_atom(nm: &str) -> Atom {
    Atom::Param(name(&format!("?{nm}")))
}

fn is_solvable(a: &Atom) -> bool {
    matches!(a, Atom::Param(n) if n.starts_with('?'))
}

/// Instantiated template: coefficient normal forms containing the
/// undetermined constants, plus the constants in declaration order.
struct Instantiation {
    coeffs: Vec<NormalForm>,
    constants: Vec<Atom>,
}

fn instantiate(templates: &Templates, p: u32) -> Result<Instantiation> {
    let mut constants = Vec::new();
    let mut coeffs = Vec::new();
    for j in 0..p {
        let template = templates.for_order(j, p)?;
        let mut num = NormalForm::zero();
        for (i, b) in template.numerator_basis.iter().enumerate() {
            let c = solvable_atom(&format!("n{j}b{i}"));
            constants.push(c.clone());
            num = num.add(&NormalForm::atom(c).mul(b));
        }
        let coeff = if template.denominator_basis.is_empty() {
            num
        } else {
            let mut den = NormalForm::zero();
            for (i, b) in template.denominator_basis.iter().enumerate() {
                let c = solvable_atom(&format!("d{j}b{i}"));
                constants.push(c.clone());
                den = den.add(&NormalForm::atom(c).mul(b));
            }
            // The symbolic denominator is a nonzero polynomial in the
            // constants, so the quotient is well-formed here; branches that
            // drive it to zero are discarded at re-verification.
            num.div(&den).expect("symbolic template denominator")
        };
        coeffs.push(coeff);
    }
    Ok(Instantiation { coeffs, constants })
}

/// One polynomial constraint on the undetermined constants, with the
/// residual monomial it came from.
#[derive(Clone, Debug)]
struct Constraint {
    poly: Poly,
    origin: Monomial,
}

/// Split the residual numerator by everything that is not an undetermined
/// constant. Each group's coefficient is a polynomial in the constants that
/// must vanish identically. Constraints are made monic and deduplicated.
fn constraint_split(residual: &NormalForm) -> Result<Vec<Constraint>> {
    // Constants inside exponential arguments would make the grouping
    // non-polynomial.
    let mut trapped = false;
    for (m, _) in residual.numerator().terms() {
        if let Some(arg) = m.exp_part() {
            arg.walk_atoms(&mut |a| {
                if is_solvable(a) {
                    trapped = true;
                }
            });
        }
    }
    if trapped {
        return Err(Error::NotPolynomialInSelectors(
            "undetermined constant inside an exponential argument".into(),
        ));
    }
    let mut groups: BTreeMap<Monomial, Poly> = BTreeMap::new();
    for (m, c) in residual.numerator().terms() {
        let (sol, rest): (Vec<_>, Vec<_>) = m
            .pairs()
            .iter()
            .cloned()
            .partition(|(a, _)| is_solvable(a));
        groups
            .entry(Monomial::from_pairs(rest))
            .or_insert_with(Poly::zero)
            .add_term(Monomial::from_pairs(sol), c.clone());
    }
    let mut seen: BTreeSet<Poly> = BTreeSet::new();
    let mut out = Vec::new();
    for (origin, poly) in groups.into_iter().rev() {
        if poly.is_zero() {
            continue;
        }
        let monic = match poly.leading() {
            Some((_, c)) => poly.scale(&c.recip()),
            None => poly,
        };
        if seen.insert(monic.clone()) {
            out.push(Constraint {
                poly: monic,
                origin,
            });
        }
    }
    Ok(out)
}

fn poly_constant(p: &Poly) -> Option<BigRational> {
    if p.is_zero() {
        return Some(BigRational::zero());
    }
    if p.terms().all(|(m, _)| m.is_unit()) {
        return p.terms().next().map(|(_, c)| c.clone());
    }
    None
}

fn monicize(p: Poly) -> Poly {
    match p.leading() {
        Some((_, c)) => {
            let r = c.recip();
            p.scale(&r)
        }
        None => p,
    }
}

/// A variable is in solved form within a constraint when its only
/// occurrence is the lone degree-one monomial, so the constraint can be
/// rewritten as `var = -(rest)/k` with a polynomial right side.
fn solved_form(p: &Poly, var: &Atom) -> Option<Poly> {
    let var_mono = Monomial::atom(var.clone());
    let mut coef = BigRational::zero();
    let mut rest = Poly::zero();
    for (m, c) in p.terms() {
        if *m == var_mono {
            coef = c.clone();
        } else if m.power_of(var) > 0 {
            return None;
        } else {
            rest.add_term(m.clone(), c.clone());
        }
    }
    if coef.is_zero() {
        return None;
    }
    Some(rest.scale(&(-coef.recip())))
}

fn substitute_constant(p: &Poly, var: &Atom, value: &Poly) -> Poly {
    let mut out = Poly::zero();
    for (m, c) in p.terms() {
        let k = m.power_of(var);
        if k == 0 {
            out.add_term(m.clone(), c.clone());
        } else {
            let rest = Monomial::from_pairs(
                m.pairs()
                    .iter()
                    .filter(|(a, _)| a != var)
                    .cloned()
                    .collect(),
            );
            out = out.add(&value.pow(k).mul_term(&rest, c));
        }
    }
    out
}

/// One node of the case tree.
#[derive(Clone)]
struct BranchState {
    constraints: Vec<Constraint>,
    /// Constants eliminated so far, with their values over the survivors.
    assigned: BTreeMap<Atom, Poly>,
    /// Constants assumed nonzero on this branch.
    nonzero: BTreeSet<Atom>,
}

/// Outcome of exploring the case tree.
struct CaseAnalysis {
    /// Complete assignments (every constraint satisfied): constant values
    /// over the surviving free constants, plus the nonzero assumptions in
    /// force on that branch.
    solutions: Vec<(BTreeMap<Atom, Poly>, BTreeSet<Atom>)>,
    /// First dead-end witness (constraint reduced to a nonzero constant).
    dead_witness: Option<Constraint>,
    /// Constraint sets left open (budget or no usable pivot).
    stuck: Vec<(Vec<Constraint>, String)>,
    branches_used: u32,
    budget_exceeded: bool,
}

struct CaseSolver<'a> {
    order: &'a [Atom],
    budget: u32,
    analysis: CaseAnalysis,
}

impl<'a> CaseSolver<'a> {
    fn run(order: &'a [Atom], constraints: Vec<Constraint>, budget: u32) -> CaseAnalysis {
        let mut s = CaseSolver {
            order,
            budget,
            analysis: CaseAnalysis {
                solutions: Vec::new(),
                dead_witness: None,
                stuck: Vec::new(),
                branches_used: 1,
                budget_exceeded: false,
            },
        };
        s.explore(BranchState {
            constraints,
            assigned: BTreeMap::new(),
            nonzero: BTreeSet::new(),
        });
        s.analysis
    }

    /// Substitute `var := value` into every constraint and every recorded
    /// assignment. Returns false when the branch dies (the value is zero
    /// for a constant already assumed nonzero).
    fn assign(
        state: &mut BranchState,
        var: &Atom,
        value: &Poly,
    ) -> bool {
        if value.is_zero() && state.nonzero.contains(var) {
            return false;
        }
        for c in state.constraints.iter_mut() {
            c.poly = substitute_constant(&c.poly, var, value);
        }
        for v in state.assigned.values_mut() {
            *v = substitute_constant(v, var, value);
        }
        state.assigned.insert(var.clone(), value.clone());
        true
    }

    fn explore(&mut self, mut state: BranchState) {
        // Saturate: normalize constraints, then eliminate every constant
        // that appears in solved form, repeating until a fixed point.
        loop {
            // Monic + dedup + drop zeros.
            let mut seen: BTreeSet<Poly> = BTreeSet::new();
            let mut kept = Vec::new();
            for c in std::mem::take(&mut state.constraints) {
                if c.poly.is_zero() {
                    continue;
                }
                let monic = monicize(c.poly);
                if seen.insert(monic.clone()) {
                    kept.push(Constraint {
                        poly: monic,
                        origin: c.origin,
                    });
                }
            }
            state.constraints = kept;
            if let Some(dead) = state
                .constraints
                .iter()
                .find(|c| matches!(poly_constant(&c.poly), Some(k) if !k.is_zero()))
            {
                if self.analysis.dead_witness.is_none() {
                    self.analysis.dead_witness = Some(dead.clone());
                }
                return;
            }
            // First (constraint, constant) pair in declaration order whose
            // constraint has the constant in solved form.
            let mut step: Option<(Atom, Poly)> = None;
            'scan: for v in self.order {
                for c in &state.constraints {
                    if let Some(value) = solved_form(&c.poly, v) {
                        step = Some((v.clone(), value));
                        break 'scan;
                    }
                }
            }
            let Some((var, value)) = step else {
                break;
            };
            if !Self::assign(&mut state, &var, &value) {
                return;
            }
        }
        if state.constraints.is_empty() {
            self.analysis
                .solutions
                .push((state.assigned, state.nonzero));
            return;
        }

        // Pick a pivot: the first constant in declaration order that
        // divides some whole constraint, so the nonzero case strictly
        // shrinks it. Constants already assumed nonzero are handled
        // without a case split.
        let mut pivot: Option<(Atom, bool)> = None;
        for v in self.order {
            if state.assigned.contains_key(v) {
                continue;
            }
            let vp = Poly::monomial(Monomial::atom(v.clone()), BigRational::one());
            if state
                .constraints
                .iter()
                .any(|c| c.poly.div_exact(&vp).is_some())
            {
                pivot = Some((v.clone(), state.nonzero.contains(v)));
                break;
            }
        }
        let Some((pivot, known_nonzero)) = pivot else {
            self.analysis.stuck.push((
                state.constraints,
                "no pivot constant factors any remaining constraint".into(),
            ));
            return;
        };

        let cases: &[bool] = if known_nonzero {
            &[false]
        } else {
            // Zero case first.
            &[true, false]
        };
        for &zero_case in cases {
            if self.analysis.branches_used >= self.budget {
                self.analysis.budget_exceeded = true;
                self.analysis.stuck.push((
                    state.constraints.clone(),
                    format!("case budget of {} branches exhausted", self.budget),
                ));
                return;
            }
            self.analysis.branches_used += 1;
            let mut sub = state.clone();
            if zero_case {
                if !Self::assign(&mut sub, &pivot, &Poly::zero()) {
                    continue;
                }
            } else {
                sub.nonzero.insert(pivot.clone());
                let vp = Poly::monomial(Monomial::atom(pivot.clone()), BigRational::one());
                for c in sub.constraints.iter_mut() {
                    while let Some(q) = c.poly.div_exact(&vp) {
                        if q.is_zero() {
                            break;
                        }
                        c.poly = q;
                    }
                }
            }
            self.explore(sub);
        }
    }
}

/// Strip the solvable marker to obtain the parameter name a surviving free
/// constant is reported under.
fn free_parameter(a: &Atom) -> Atom {
    match a {
        Atom::Param(n) if n.starts_with('?') => Atom::Param(name(&n[1..])),
        other => other.clone(),
    }
}

fn ansatz_stage(cfg: &SearchConfig, p: u32) -> Result<(Outcome, Vec<String>)> {
    let inst = instantiate(&cfg.templates, p)?;
    let m = LinearManifold::new(cfg.eq.dep(), inst.coeffs.clone())?;
    if m.s() > cfg.s {
        return Err(Error::InvalidManifold(format!(
            "template basis uses jet order {} but the search allows at most {}",
            m.s(),
            cfg.s
        )));
    }
    let residual = m.residual(&cfg.eq)?;
    let constraints = constraint_split(&residual)?;
    let analysis = CaseSolver::run(&inst.constants, constraints, cfg.case_budget);

    let mut notes = Vec::new();
    if analysis.budget_exceeded {
        notes.push(format!(
            "p = {p}: {}",
            Error::CaseBudgetExceeded {
                budget: cfg.case_budget
            }
        ));
    }
    // Materialize every distinct solution branch, deduplicate the
    // coefficient vectors, then re-verify the distinct candidates.
    let distinct: BTreeSet<&BTreeMap<Atom, Poly>> =
        analysis.solutions.iter().map(|(s, _)| s).collect();
    let mut candidates: Vec<Vec<NormalForm>> = Vec::new();
    for solution in distinct {
        if let Some(coeffs) = materialize_coeffs(&inst, solution)? {
            if !candidates.contains(&coeffs) {
                candidates.push(coeffs);
            }
        }
    }
    let mut manifolds: Vec<LinearManifold> = Vec::new();
    for coeffs in candidates {
        if let Some(m) = verified_manifold(cfg, coeffs)? {
            manifolds.push(m);
        }
    }

    if !manifolds.is_empty() {
        return Ok((Outcome::Solved(manifolds), notes));
    }
    if let (Some(w), true) = (&analysis.dead_witness, analysis.stuck.is_empty()) {
        return Ok((
            Outcome::Inconsistent {
                monomial: render::poly_text(&Poly::monomial(
                    w.origin.clone(),
                    BigRational::one(),
                )),
                coefficient: render::poly_text(&w.poly),
            },
            notes,
        ));
    }
    let mut exported = Vec::new();
    let mut note = None;
    if let Some((stuck, why)) = analysis.stuck.first() {
        note = Some(why.clone());
        for c in stuck {
            exported.push(ExportedConstraint {
                origin: render::poly_text(&Poly::monomial(
                    c.origin.clone(),
                    BigRational::one(),
                )),
                constraint: render::poly_text(&c.poly),
            });
        }
    } else if let Some(w) = &analysis.dead_witness {
        // Some branches died and none stuck, yet no solutions either.
        return Ok((
            Outcome::Inconsistent {
                monomial: render::poly_text(&Poly::monomial(
                    w.origin.clone(),
                    BigRational::one(),
                )),
                coefficient: render::poly_text(&w.poly),
            },
            notes,
        ));
    }
    Ok((
        Outcome::ConstraintsRemain(ConstraintExport {
            constraints: exported,
            note,
        }),
        notes,
    ))
}

/// Substitute a case-analysis solution into the instantiated coefficients,
/// renaming surviving free constants to fresh parameters. A branch that
/// degenerates (zero denominator) yields None.
fn materialize_coeffs(
    inst: &Instantiation,
    solution: &BTreeMap<Atom, Poly>,
) -> Result<Option<Vec<NormalForm>>> {
    // Full image for every constant: its solved value (with frees renamed)
    // or its renamed free self.
    let mut images: BTreeMap<Atom, NormalForm> = BTreeMap::new();
    for c in &inst.constants {
        let img = match solution.get(c) {
            Some(v) => {
                let mut nf = NormalForm::from_poly(v.clone());
                // Rename frees inside the value.
                let mut frees: BTreeSet<Atom> = BTreeSet::new();
                nf.walk_atoms(&mut |a| {
                    if is_solvable(a) {
                        frees.insert(a.clone());
                    }
                });
                for f in frees {
                    nf = nf.substitute(&f, &NormalForm::atom(free_parameter(&f)))?;
                }
                nf
            }
            None => NormalForm::atom(free_parameter(c)),
        };
        images.insert(c.clone(), img);
    }
    let mut coeffs = Vec::new();
    for c in &inst.coeffs {
        let substituted = c.substitute_with(&|a: &Atom| {
            if is_solvable(a) {
                images.get(a).cloned()
            } else {
                None
            }
        });
        match substituted {
            Ok(nf) => coeffs.push(nf),
            Err(Error::DivisionByZero) => return Ok(None),
            Err(e) => return Err(e),
        }
    }
    Ok(Some(coeffs))
}

/// Soundness gate: build the manifold and keep it only when its invariance
/// residual is exactly zero. Nothing from the case analysis is trusted.
fn verified_manifold(
    cfg: &SearchConfig,
    coeffs: Vec<NormalForm>,
) -> Result<Option<LinearManifold>> {
    let m = match LinearManifold::new(cfg.eq.dep(), coeffs) {
        Ok(m) => m,
        Err(_) => return Ok(None),
    };
    match m.residual(&cfg.eq) {
        Ok(r) if r.is_zero() => Ok(Some(m)),
        Ok(_) => Ok(None),
        Err(Error::DivisionByZero) => Ok(None),
        Err(e) => Err(e),
    }
}
