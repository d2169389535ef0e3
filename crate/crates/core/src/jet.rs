//! Evolution equations and total derivatives on the jet space.
//!
//! Coordinates are `x`, `t`, the jets `u_k` of the dependent variable, and
//! the jets `v_k` of the linearized variable. The total x-derivative
//! prolongs every jet; the total t-derivative is reduced to the joint
//! solution manifold of `u_t = f` and `v_t = (linearization of f)`, so
//! `u_k` flows to the k-th prolongation of `f` and `v_k` to the k-th
//! prolongation of the linearized right-hand side.

use num::BigRational;

use crate::atom::{name, Atom, Dir, Name, UnknownAtom};
use crate::error::{Error, Result};
use crate::normal::{derive, normalize, NormalForm};
use crate::parse::ParseContext;

pub const LINEARIZED_DEP: &str = "v";

/// A scalar evolution equation `dep_t = rhs(x, t, dep, dep_1, ..., dep_n)`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct EvolutionEquation {
    dep: Name,
    rhs: NormalForm,
    order: u32,
}

impl EvolutionEquation {
    pub fn new(dep: &str, rhs: NormalForm) -> Result<Self> {
        if dep == "v" || dep == "x" || dep == "t" {
            return Err(Error::InvalidEquation(format!(
                "`{dep}` cannot be used as the dependent variable"
            )));
        }
        let mut foreign: Option<String> = None;
        let mut has_unknown = false;
        let mut has_solvable = false;
        rhs.walk_atoms(&mut |a| match a {
            Atom::Jet(d, _) if &**d != dep => {
                if foreign.is_none() {
                    foreign = Some(d.to_string());
                }
            }
            Atom::Unknown(_) => has_unknown = true,
            Atom::Param(p) if p.starts_with('?') => has_solvable = true,
            _ => {}
        });
        if let Some(found) = foreign {
            return Err(Error::ForeignJet {
                expected: dep.to_string(),
                found,
            });
        }
        if has_unknown || has_solvable {
            return Err(Error::InvalidEquation(
                "right-hand side must not contain unknown coefficients".into(),
            ));
        }
        let order = match rhs.max_jet_order(dep) {
            Some(n) if n >= 1 => n,
            _ => {
                return Err(Error::InvalidEquation(format!(
                    "right-hand side contains no spatial derivative of `{dep}`"
                )))
            }
        };
        Ok(EvolutionEquation {
            dep: name(dep),
            rhs,
            order,
        })
    }

    /// Parse `dep_t = rhs`, e.g. `u_t = u*u_1 + u_3`.
    pub fn parse(src: &str) -> Result<Self> {
        Self::parse_with_params(src, &[])
    }

    pub fn parse_with_params(src: &str, extra_params: &[&str]) -> Result<Self> {
        let (lhs, rhs_src) = src.split_once('=').ok_or_else(|| Error::InvalidEquation(
            "expected `dep_t = expression`".into(),
        ))?;
        let lhs = lhs.trim();
        let dep = lhs.strip_suffix("_t").filter(|d| {
            !d.is_empty()
                && d.chars().next().is_some_and(|c| c.is_ascii_alphabetic())
                && d.chars().all(|c| c.is_ascii_alphanumeric())
        });
        let dep = dep.ok_or_else(|| Error::InvalidEquation(format!(
            "left-hand side must be a time derivative like `u_t`, got `{lhs}`"
        )))?;
        let mut ctx = ParseContext::new(dep).without_v();
        for p in extra_params {
            ctx = ctx.with_parameter(p);
        }
        let rhs = normalize(&crate::parse::parse_expr(rhs_src, &ctx)?)?;
        Self::new(dep, rhs)
    }

    pub fn dep(&self) -> &Name {
        &self.dep
    }

    pub fn rhs(&self) -> &NormalForm {
        &self.rhs
    }

    /// Order of the highest spatial derivative on the right-hand side.
    pub fn order(&self) -> u32 {
        self.order
    }

    /// Right-hand side of the linearized equation
    /// `v_t = sum_i (d rhs / d dep_i) v_i`.
    pub fn linearized_rhs(&self) -> Result<NormalForm> {
        let mut g = NormalForm::zero();
        for i in 0..=self.order {
            let df = partial_jet(&self.rhs, &self.dep, i)?;
            if df.is_zero() {
                continue;
            }
            g = g.add(&df.mul(&NormalForm::atom(Atom::jet(LINEARIZED_DEP, i))));
        }
        Ok(g)
    }

    /// Whether the right-hand side is linear in the jets (so the
    /// linearization is the equation itself with jets renamed).
    pub fn is_linear(&self) -> Result<bool> {
        let renamed = self.rhs.substitute_with(&|a| match a {
            Atom::Jet(d, k) if **d == *self.dep => {
                Some(NormalForm::atom(Atom::jet(LINEARIZED_DEP, *k)))
            }
            _ => None,
        })?;
        Ok(renamed == self.linearized_rhs()?)
    }
}

/// Partial derivative with respect to the jet `dep_k`, treating all other
/// coordinates as constant.
pub fn partial_jet(nf: &NormalForm, dep: &str, k: u32) -> Result<NormalForm> {
    partial_atom(nf, &Atom::jet(dep, k))
}

/// Partial derivative with respect to a single atom (jet, x, t, or
/// parameter), treating every other atom as independent. Exponentials chain
/// through their arguments, and unknown coefficient functions whose
/// declared arguments include the target contribute their formal partial.
pub fn partial_atom(nf: &NormalForm, target: &Atom) -> Result<NormalForm> {
    derive(nf, &|a: &Atom| {
        if a == target {
            return Ok(NormalForm::one());
        }
        if let Atom::Unknown(u) = a {
            let dir = match target {
                Atom::X if u.sig.has_x => Some(Dir::X),
                Atom::T if u.sig.has_t => Some(Dir::T),
                Atom::Jet(d, k) if **d == *u.sig.dep && u.sig.depends_on_jet(*k) => {
                    Some(Dir::Jet(*k))
                }
                _ => None,
            };
            if let Some(dir) = dir {
                return Ok(NormalForm::atom(Atom::Unknown(UnknownAtom {
                    sig: u.sig.clone(),
                    partials: u.partials.with(dir),
                })));
            }
        }
        Ok(NormalForm::zero())
    })
}

fn dx_unknown(u: &UnknownAtom) -> NormalForm {
    let mut out = if u.sig.has_x {
        NormalForm::atom(Atom::Unknown(UnknownAtom {
            sig: u.sig.clone(),
            partials: u.partials.with(Dir::X),
        }))
    } else {
        NormalForm::zero()
    };
    if let Some(s) = u.sig.max_jet {
        for k in 0..=s {
            let jet_next = NormalForm::atom(Atom::Jet(u.sig.dep.clone(), k + 1));
            let dk = NormalForm::atom(Atom::Unknown(UnknownAtom {
                sig: u.sig.clone(),
                partials: u.partials.with(Dir::Jet(k)),
            }));
            out = out.add(&jet_next.mul(&dk));
        }
    }
    out
}

/// Total x-derivative: `x -> 1`, every jet prolongs one order, unknown
/// coefficient functions expand by the chain rule into formal partials.
pub fn dx(nf: &NormalForm) -> Result<NormalForm> {
    derive(nf, &|a: &Atom| {
        Ok(match a {
            Atom::X => NormalForm::one(),
            Atom::T | Atom::Param(_) => NormalForm::zero(),
            Atom::Jet(d, k) => NormalForm::atom(Atom::Jet(d.clone(), k + 1)),
            Atom::Unknown(u) => dx_unknown(u),
            Atom::Exp(_) => unreachable!("exponentials are handled centrally"),
        })
    })
}

/// k-fold total x-derivative.
pub fn dx_iter(nf: &NormalForm, k: u32) -> Result<NormalForm> {
    let mut out = nf.clone();
    for _ in 0..k {
        out = dx(&out)?;
    }
    Ok(out)
}

/// Total t-derivative reduced to the joint solution manifold.
///
/// Jets of the equation's dependent variable flow to prolongations of the
/// right-hand side; jets of `v` flow to prolongations of the linearized
/// right-hand side; unknown coefficient functions expand into formal
/// partials (their jet dependence flows through the equation as well).
pub fn dt(nf: &NormalForm, eq: &EvolutionEquation) -> Result<NormalForm> {
    dt_impl(nf, eq, None)
}

/// Total t-derivative like [`dt`], but with the flow images of the `v` jets
/// supplied by the caller: `v_k` flows to `images[k]`. The slice must cover
/// every `v` jet occurring in the expression. This lets a caller substitute
/// images that are already reduced modulo a constraint, keeping intermediate
/// expressions small instead of prolonging the raw linearized flow.
pub fn dt_with_v_images(
    nf: &NormalForm,
    eq: &EvolutionEquation,
    images: &[NormalForm],
) -> Result<NormalForm> {
    dt_impl(nf, eq, Some(images))
}

fn dt_impl(
    nf: &NormalForm,
    eq: &EvolutionEquation,
    v_images: Option<&[NormalForm]>,
) -> Result<NormalForm> {
    // Find how many prolongations are needed.
    let mut max_u: Option<u32> = nf.max_jet_order(&eq.dep);
    let max_v = nf.max_jet_order(LINEARIZED_DEP);
    nf.walk_atoms(&mut |a| {
        if let Atom::Unknown(u) = a {
            if *u.sig.dep == *eq.dep {
                if let Some(s) = u.sig.max_jet {
                    max_u = Some(max_u.map_or(s, |m| m.max(s)));
                }
            }
        }
    });

    let mut f_prol: Vec<NormalForm> = vec![eq.rhs.clone()];
    if let Some(mu) = max_u {
        for _ in 0..mu {
            f_prol.push(dx(f_prol.last().unwrap())?);
        }
    }
    let mut g_prol: Vec<NormalForm> = Vec::new();
    if let Some(mv) = max_v {
        match v_images {
            Some(images) => {
                assert!(
                    images.len() > mv as usize,
                    "supplied v-flow images cover orders 0..{}, expression needs {}",
                    images.len(),
                    mv
                );
            }
            None => {
                g_prol.push(eq.linearized_rhs()?);
                for _ in 0..mv {
                    g_prol.push(dx(g_prol.last().unwrap())?);
                }
            }
        }
    }

    derive(nf, &|a: &Atom| {
        Ok(match a {
            Atom::T => NormalForm::one(),
            Atom::X | Atom::Param(_) => NormalForm::zero(),
            Atom::Jet(d, k) if **d == *eq.dep => f_prol[*k as usize].clone(),
            Atom::Jet(d, k) if &**d == LINEARIZED_DEP => match v_images {
                Some(images) => images[*k as usize].clone(),
                None => g_prol[*k as usize].clone(),
            },
            Atom::Jet(d, _) => {
                return Err(Error::ForeignJet {
                    expected: eq.dep.to_string(),
                    found: d.to_string(),
                })
            }
            Atom::Unknown(u) => {
                if *u.sig.dep != *eq.dep {
                    return Err(Error::ForeignJet {
                        expected: eq.dep.to_string(),
                        found: u.sig.dep.to_string(),
                    });
                }
                let mut out = if u.sig.has_t {
                    NormalForm::atom(Atom::Unknown(UnknownAtom {
                        sig: u.sig.clone(),
                        partials: u.partials.with(Dir::T),
                    }))
                } else {
                    NormalForm::zero()
                };
                if let Some(s) = u.sig.max_jet {
                    for k in 0..=s {
                        let dk = NormalForm::atom(Atom::Unknown(UnknownAtom {
                            sig: u.sig.clone(),
                            partials: u.partials.with(Dir::Jet(k)),
                        }));
                        out = out.add(&f_prol[k as usize].mul(&dk));
                    }
                }
                out
            }
            Atom::Exp(_) => unreachable!("exponentials are handled centrally"),
        })
    })
}

/// Scale a normal form by an integer (convenience for tests and checks).
pub fn scale_int(nf: &NormalForm, k: i64) -> NormalForm {
    nf.scale(&BigRational::from_integer(k.into()))
}
