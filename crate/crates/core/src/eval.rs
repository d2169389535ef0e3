//! Numeric spot-checking: evaluate a normal form at pseudo-random rational
//! points. Advisory only — the symbolic zero test is the authority; this is
//! an independent cross-check cheap enough to run everywhere.
//!
//! Points assign small rationals (numerators in [-10, 10], denominators in
//! [1, 4]) to every coordinate, jet, and parameter. Exponentials are
//! evaluated by an exact rational Taylor sum with error below 1e-75, so a
//! residual that is identically zero evaluates far below the 1e-20
//! acceptance tolerance, while a generic nonzero expression does not.

use std::collections::BTreeMap;

use num::{BigInt, BigRational, One, Signed, Zero};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::atom::Atom;
use crate::error::{Error, Result};
use crate::normal::NormalForm;
use crate::poly::Poly;

const MAX_REDRAWS: u32 = 100;

fn tolerance() -> BigRational {
    BigRational::new(BigInt::one(), BigInt::from(10u8).pow(20))
}

fn degenerate_cutoff() -> BigRational {
    BigRational::new(BigInt::one(), BigInt::from(10u8).pow(10))
}

/// exp(q) as a rational approximation with absolute error below 1e-75.
fn exp_approx(q: &BigRational) -> BigRational {
    let mut sum = BigRational::one();
    let mut term = BigRational::one();
    let bound = BigRational::new(BigInt::one(), BigInt::from(10u8).pow(75));
    let abs_q = q.abs();
    let mut k: u64 = 0;
    loop {
        k += 1;
        term = &term * q / BigRational::from_integer(BigInt::from(k));
        sum += &term;
        // Once k exceeds 2|q| the terms at least halve each step, so the
        // tail is bounded by twice the current term.
        if term.abs() * BigRational::from_integer(2.into()) < bound
            && BigRational::from_integer(BigInt::from(k)) > &abs_q * BigRational::from_integer(2.into())
        {
            return sum;
        }
    }
}

struct Point {
    values: BTreeMap<Atom, BigRational>,
}

fn eval_atom_in(values: &BTreeMap<Atom, BigRational>, a: &Atom) -> Result<BigRational> {
    if let Some(v) = values.get(a) {
        return Ok(v.clone());
    }
    match a {
        Atom::Unknown(u) => Err(Error::IncompleteAssignment(u.sig.name.to_string())),
        _ => unreachable!("every base atom was assigned when the point was drawn"),
    }
}

fn eval_poly_in(values: &BTreeMap<Atom, BigRational>, p: &Poly) -> Result<BigRational> {
    let mut out = BigRational::zero();
    for (m, c) in p.terms() {
        let mut term = c.clone();
        for (a, k) in m.pairs() {
            let v = eval_atom_in(values, a)?;
            for _ in 0..*k {
                term *= &v;
            }
        }
        out += term;
    }
    Ok(out)
}

impl Point {
    fn eval_poly(&self, p: &Poly) -> Result<BigRational> {
        eval_poly_in(&self.values, p)
    }

    fn eval_atom(&self, a: &Atom) -> Result<BigRational> {
        eval_atom_in(&self.values, a)
    }

    fn eval_nf(&self, nf: &NormalForm) -> Result<Option<BigRational>> {
        let mut den = BigRational::one();
        for (a, k) in nf.denominator_monomial().pairs() {
            let v = self.eval_atom(a)?;
            for _ in 0..*k {
                den *= &v;
            }
        }
        for (f, e) in nf.denominator_factors().iter() {
            let v = self.eval_poly(f)?;
            for _ in 0..e {
                den *= &v;
            }
        }
        if den.abs() < degenerate_cutoff() {
            return Ok(None); // too close to the singular locus; redraw
        }
        let num = self.eval_poly(nf.numerator())?;
        Ok(Some(num / den))
    }
}

fn draw_point(nf: &NormalForm, rng: &mut ChaCha8Rng) -> Result<Option<Point>> {
    let mut values: BTreeMap<Atom, BigRational> = BTreeMap::new();
    let mut unknown: Option<String> = None;
    let mut exps: Vec<Atom> = Vec::new();
    nf.walk_atoms(&mut |a| match a {
        Atom::Exp(_) => {
            if !exps.contains(a) {
                exps.push(a.clone());
            }
        }
        Atom::Unknown(u) => {
            if unknown.is_none() {
                unknown = Some(u.sig.name.to_string());
            }
        }
        other => {
            values.entry(other.clone()).or_insert_with(|| {
                let numer = rng.random_range(-10i64..=10);
                let denom = rng.random_range(1i64..=4);
                BigRational::new(numer.into(), denom.into())
            });
        }
    });
    if let Some(n) = unknown {
        return Err(Error::IncompleteAssignment(n));
    }
    // Exponential arguments are polynomials in atoms assigned above.
    for a in exps {
        let Atom::Exp(arg) = &a else { unreachable!() };
        let q = eval_poly_in(&values, arg)?;
        // Guard against astronomically large exponentials.
        if q.abs() > BigRational::from_integer(100.into()) {
            return Ok(None);
        }
        values.insert(a.clone(), exp_approx(&q));
    }
    Ok(Some(Point { values }))
}

/// Evaluate at `trials` random points; true iff every evaluation lands
/// below the tolerance. Points whose denominators (or exponential
/// arguments) degenerate are redrawn, up to 100 times per trial.
pub fn numeric_spotcheck(nf: &NormalForm, trials: u32, seed: u64) -> Result<bool> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let tol = tolerance();
    for _ in 0..trials.max(1) {
        let mut attempts = 0u32;
        let value = loop {
            if attempts >= MAX_REDRAWS {
                return Err(Error::DegeneratePoint { attempts });
            }
            attempts += 1;
            let Some(point) = draw_point(nf, &mut rng)? else {
                continue;
            };
            match point.eval_nf(nf)? {
                Some(v) => break v,
                None => continue,
            }
        };
        if value.abs() > tol {
            return Ok(false);
        }
    }
    Ok(true)
}
