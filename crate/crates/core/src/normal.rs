//! Rational normal form: an expanded polynomial numerator over a factored
//! denominator (power product of a monomial and canonical polynomial
//! factors). Equality of expressions is decided by subtracting normal forms
//! and testing the numerator for zero; cancellation is best-effort (monomial
//! content plus trial exact division by the known denominator factors) and
//! never affects the soundness of the zero test.

use std::collections::BTreeMap;

use num::{BigRational, One, Zero};

use crate::atom::Atom;
use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::poly::{cmp_exp_args, Monomial, Poly};

/// Sorted multiset of canonical denominator factors with positive integer
/// exponents. Each factor polynomial is non-constant, has positive monic
/// leading coefficient, an exponential-free leading term, and no monomial
/// content.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Default)]
pub struct Factors(Vec<(Poly, u32)>);

impl Factors {
    pub fn none() -> Self {
        Factors(Vec::new())
    }

    pub fn is_trivial(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Poly, u32)> {
        self.0.iter().map(|(p, e)| (p, *e))
    }

    fn insert(&mut self, p: Poly, e: u32) {
        if e == 0 {
            return;
        }
        match self.0.binary_search_by(|(q, _)| q.cmp(&p)) {
            Ok(i) => self.0[i].1 += e,
            Err(i) => self.0.insert(i, (p, e)),
        }
    }

    fn union_max(&self, other: &Factors) -> Factors {
        let mut out = self.clone();
        for (p, e) in &other.0 {
            match out.0.binary_search_by(|(q, _)| q.cmp(p)) {
                Ok(i) => out.0[i].1 = out.0[i].1.max(*e),
                Err(i) => out.0.insert(i, (p.clone(), *e)),
            }
        }
        out
    }

    fn exponent_of(&self, p: &Poly) -> u32 {
        self.0
            .binary_search_by(|(q, _)| q.cmp(p))
            .map(|i| self.0[i].1)
            .unwrap_or(0)
    }

    /// Expand the factor product into a single polynomial.
    fn expand(&self) -> Poly {
        let mut out = Poly::one();
        for (p, e) in &self.0 {
            out = out.mul(&p.pow(*e));
        }
        out
    }
}

/// A rational expression in normal form: `num / (den_mono * den_factors)`.
/// The denominator monomial is exponential-free with implicit coefficient 1;
/// all scalar and exponential units live in the numerator.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct NormalForm {
    num: Poly,
    den_mono: Monomial,
    den: Factors,
}

impl NormalForm {
    pub fn zero() -> Self {
        NormalForm::from_poly(Poly::zero())
    }

    pub fn one() -> Self {
        NormalForm::from_poly(Poly::one())
    }

    pub fn constant(c: BigRational) -> Self {
        NormalForm::from_poly(Poly::constant(c))
    }

    pub fn int(n: i64) -> Self {
        NormalForm::constant(BigRational::from_integer(n.into()))
    }

    pub fn from_poly(num: Poly) -> Self {
        NormalForm {
            num,
            den_mono: Monomial::unit(),
            den: Factors::none(),
        }
    }

    pub fn atom(a: Atom) -> Self {
        NormalForm::from_poly(Poly::atom(a))
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn numerator(&self) -> &Poly {
        &self.num
    }

    pub fn denominator_monomial(&self) -> &Monomial {
        &self.den_mono
    }

    pub fn denominator_factors(&self) -> &Factors {
        &self.den
    }

    pub fn has_trivial_denominator(&self) -> bool {
        self.den_mono.is_unit() && self.den.is_trivial()
    }

    /// `Some(c)` when the value is the constant rational c.
    pub fn as_constant(&self) -> Option<BigRational> {
        if self.has_trivial_denominator() {
            self.num.as_constant()
        } else {
            None
        }
    }

    fn cancel(mut self) -> Self {
        if self.num.is_zero() {
            return NormalForm::zero();
        }
        // Monomial content against the denominator monomial.
        if !self.den_mono.is_unit() {
            let g = self.num.monomial_content().gcd(&self.den_mono);
            if !g.is_unit() {
                self.num = Poly::from_terms(
                    self.num
                        .terms()
                        .map(|(m, c)| (g.div_into(m), c.clone()))
                        .collect::<Vec<_>>(),
                );
                self.den_mono = g.div_into(&self.den_mono);
            }
        }
        // Trial exact division by the denominator factors. Division by
        // factors carrying exponentials may leave exponential units in the
        // quotient; those re-canonicalize when the numerator is next used
        // as a factor, so plain quotients are fine here.
        let mut new_factors = Factors::none();
        for (f, mut e) in self.den.0.clone() {
            while e > 0 {
                match self.num.div_exact(&f) {
                    Some(q) => {
                        self.num = q;
                        e -= 1;
                    }
                    None => break,
                }
            }
            new_factors.insert(f, e);
        }
        self.den = new_factors;
        if self.num.is_zero() {
            return NormalForm::zero();
        }
        self
    }

    pub fn add(&self, other: &NormalForm) -> NormalForm {
        if self.is_zero() {
            return other.clone();
        }
        if other.is_zero() {
            return self.clone();
        }
        // Least common denominator.
        let lcd_mono = {
            let mut pairs: Vec<(Atom, u32)> = Vec::new();
            for (a, k) in self.den_mono.pairs() {
                pairs.push((a.clone(), (*k).max(other.den_mono.power_of(a))));
            }
            for (a, k) in other.den_mono.pairs() {
                if self.den_mono.power_of(a) == 0 {
                    pairs.push((a.clone(), *k));
                }
            }
            Monomial::from_pairs(pairs)
        };
        let lcd = self.den.union_max(&other.den);
        let comp = |nf: &NormalForm| -> Poly {
            let mut p = Poly::monomial(nf.den_mono.div_into(&lcd_mono), BigRational::one());
            for (f, e) in lcd.iter() {
                let have = nf.den.exponent_of(f);
                if e > have {
                    p = p.mul(&f.pow(e - have));
                }
            }
            p
        };
        let num = self
            .num
            .mul(&comp(self))
            .add(&other.num.mul(&comp(other)));
        NormalForm {
            num,
            den_mono: lcd_mono,
            den: lcd,
        }
        .cancel()
    }

    pub fn neg(&self) -> NormalForm {
        NormalForm {
            num: self.num.neg(),
            den_mono: self.den_mono.clone(),
            den: self.den.clone(),
        }
    }

    pub fn sub(&self, other: &NormalForm) -> NormalForm {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &NormalForm) -> NormalForm {
        if self.is_zero() || other.is_zero() {
            return NormalForm::zero();
        }
        let mut den = self.den.clone();
        for (f, e) in other.den.iter() {
            den.insert(f.clone(), e);
        }
        NormalForm {
            num: self.num.mul(&other.num),
            den_mono: self.den_mono.mul(&other.den_mono),
            den,
        }
        .cancel()
    }

    pub fn scale(&self, k: &BigRational) -> NormalForm {
        if k.is_zero() {
            return NormalForm::zero();
        }
        NormalForm {
            num: self.num.scale(k),
            den_mono: self.den_mono.clone(),
            den: self.den.clone(),
        }
    }

    /// Multiplicative inverse. The former denominator expands into the new
    /// numerator; the former numerator is split into unit parts (scalar,
    /// exponential, monomial content) and a canonical polynomial factor.
    pub fn inv(&self) -> Result<NormalForm> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let mut new_num = Poly::monomial(self.den_mono.clone(), BigRational::one());
        new_num = new_num.mul(&self.den.expand());

        let (content, reduced) = self.num.extract_content();
        let (unit_coef, unit_exp, canon) = canonical_factor(&reduced);
        // 1 / (content * unit_coef * exp(unit_exp) * canon)
        new_num = new_num.scale(&unit_coef.recip());
        if !unit_exp.is_zero() {
            new_num = new_num.mul_exp(&unit_exp.neg());
        }
        let mut den = Factors::none();
        if canon.as_constant().is_none() {
            den.insert(canon, 1);
        }
        // Exponential factors cannot sit in the denominator monomial: invert
        // them into the numerator.
        let mut mono_pairs: Vec<(Atom, u32)> = Vec::new();
        for (a, k) in content.pairs() {
            match a {
                Atom::Exp(p) => {
                    let arg = p.scale(&BigRational::from_integer((*k).into()));
                    new_num = new_num.mul_exp(&arg.neg());
                }
                other => mono_pairs.push((other.clone(), *k)),
            }
        }
        Ok(NormalForm {
            num: new_num,
            den_mono: Monomial::from_pairs(mono_pairs),
            den,
        }
        .cancel())
    }

    pub fn div(&self, other: &NormalForm) -> Result<NormalForm> {
        Ok(self.mul(&other.inv()?))
    }

    pub fn pow(&self, k: i32) -> Result<NormalForm> {
        if k == 0 {
            return Ok(NormalForm::one());
        }
        let base = if k < 0 { self.inv()? } else { self.clone() };
        let mut out = NormalForm::one();
        for _ in 0..k.unsigned_abs() {
            out = out.mul(&base);
        }
        Ok(out)
    }

    /// Substitute atoms by values: wherever `f` returns a value, the atom is
    /// replaced (in the numerator, the denominator, and inside exponential
    /// arguments). Returns an error if a substituted denominator vanishes.
    pub fn substitute_with(
        &self,
        f: &impl Fn(&Atom) -> Option<NormalForm>,
    ) -> Result<NormalForm> {
        let num = poly_substitute(&self.num, f)?;
        let mut den = poly_substitute(
            &Poly::monomial(self.den_mono.clone(), BigRational::one()),
            f,
        )?;
        for (fac, e) in self.den.iter() {
            let sub = poly_substitute(fac, f)?;
            den = den.mul(&sub.pow(e as i32)?);
        }
        num.div(&den)
    }

    pub fn substitute(&self, target: &Atom, value: &NormalForm) -> Result<NormalForm> {
        self.substitute_with(&|a| (a == target).then(|| value.clone()))
    }

    /// Collect the numerator by the monomials in the selector atoms. Errors
    /// if a selector occurs in the denominator or inside an exponential
    /// argument (the expression would not be polynomial in it).
    pub fn collect_numerator(
        &self,
        is_selector: &impl Fn(&Atom) -> bool,
    ) -> Result<BTreeMap<Monomial, Poly>> {
        let mut offender: Option<Atom> = None;
        let mut check = |a: &Atom| {
            if offender.is_none() && is_selector(a) {
                offender = Some(a.clone());
            }
        };
        for (a, _) in self.den_mono.pairs() {
            check(a);
        }
        for (fac, _) in self.den.iter() {
            fac.walk_atoms(&mut check);
        }
        // Selectors inside exponential arguments of the numerator.
        for (m, _) in self.num.terms() {
            if let Some(p) = m.exp_part() {
                p.walk_atoms(&mut check);
            }
        }
        if let Some(a) = offender {
            return Err(Error::NotPolynomialInSelectors(format!("{a:?}")));
        }
        let mut out: BTreeMap<Monomial, Poly> = BTreeMap::new();
        for (m, c) in self.num.terms() {
            let (sel, rest): (Vec<_>, Vec<_>) = m
                .pairs()
                .iter()
                .cloned()
                .partition(|(a, _)| is_selector(a));
            let key = Monomial::from_pairs(sel);
            out.entry(key)
                .or_insert_with(Poly::zero)
                .add_term(Monomial::from_pairs(rest), c.clone());
        }
        out.retain(|_, p| !p.is_zero());
        Ok(out)
    }

    /// Reconstruct an expression tree in canonical shape.
    pub fn to_expr(&self) -> Expr {
        let num = poly_to_expr(&self.num);
        if self.has_trivial_denominator() {
            return num;
        }
        let mut parts = Vec::new();
        if num != Expr::one() {
            parts.push(num);
        }
        for (a, k) in self.den_mono.pairs() {
            parts.push(Expr::Atom(a.clone()).pow(-(*k as i32)));
        }
        for (f, e) in self.den.iter() {
            parts.push(poly_to_expr(f).pow(-(e as i32)));
        }
        match parts.len() {
            0 => Expr::one(),
            1 => parts.pop().unwrap(),
            _ => Expr::Product(parts),
        }
    }

    /// Walk every atom in the normal form, including denominator factors and
    /// exponential arguments.
    pub fn walk_atoms(&self, f: &mut impl FnMut(&Atom)) {
        self.num.walk_atoms(f);
        for (a, _) in self.den_mono.pairs() {
            f(a);
        }
        for (fac, _) in self.den.iter() {
            fac.walk_atoms(f);
        }
    }

    pub fn max_jet_order(&self, dep: &str) -> Option<u32> {
        let mut best: Option<u32> = None;
        self.walk_atoms(&mut |a| {
            if let Atom::Jet(n, k) = a {
                if &**n == dep {
                    best = Some(best.map_or(*k, |b| b.max(*k)));
                }
            }
        });
        best
    }

    pub fn contains_atom_where(&self, pred: &mut impl FnMut(&Atom) -> bool) -> bool {
        let mut found = false;
        self.walk_atoms(&mut |a| {
            if pred(a) {
                found = true;
            }
        });
        found
    }
}

/// Split a polynomial into unit parts and a canonical factor: returns
/// (scalar, exponential argument, canonical polynomial) with
/// `p = scalar * exp(arg) * canonical`. The extracted argument is the
/// maximal exponential argument over the monomials (zero for
/// exponential-free ones) under the translation-invariant order, so two
/// inputs differing by an exponential unit canonicalize identically; the
/// scalar makes the result monic. The input must be content-free and
/// nonzero for full canonicality; constants pass through.
fn canonical_factor(p: &Poly) -> (BigRational, Poly, Poly) {
    if p.is_zero() {
        return (BigRational::one(), Poly::zero(), Poly::zero());
    }
    let zero = Poly::zero();
    let mut arg: Option<&Poly> = None;
    for (m, _) in p.terms() {
        let a = match m.exp_part() {
            Some(a) => &**a,
            None => &zero,
        };
        if arg.is_none_or(|best| cmp_exp_args(a, best) == std::cmp::Ordering::Greater) {
            arg = Some(a);
        }
    }
    let arg = arg.cloned().unwrap_or_else(Poly::zero);
    let mut canon = p.clone();
    if !arg.is_zero() {
        canon = canon.mul_exp(&arg.neg());
    }
    let scalar = canon
        .leading()
        .map(|(_, c)| c.clone())
        .unwrap_or_else(BigRational::one);
    canon = canon.scale(&scalar.recip());
    (scalar, arg, canon)
}

/// Substitute atoms in a polynomial, producing a normal form.
fn poly_substitute(
    p: &Poly,
    f: &impl Fn(&Atom) -> Option<NormalForm>,
) -> Result<NormalForm> {
    // Monomials untouched by the substitution pass through unchanged, and
    // substituted pieces without denominators accumulate in place; only
    // genuinely rational pieces pay for rational addition.
    let touches_arg = |arg: &Poly| {
        let mut hit = false;
        arg.walk_atoms(&mut |b| {
            if !hit && f(b).is_some() {
                hit = true;
            }
        });
        hit
    };
    let mut plain = Poly::zero();
    let mut rational = NormalForm::zero();
    for (m, c) in p.terms() {
        let touched = m.pairs().iter().any(|(a, _)| match a {
            Atom::Exp(arg) => touches_arg(arg),
            other => f(other).is_some(),
        });
        if !touched {
            plain.add_term(m.clone(), c.clone());
            continue;
        }
        let mut term = NormalForm::constant(c.clone());
        for (a, k) in m.pairs() {
            let factor = match a {
                Atom::Exp(arg) => {
                    // Substitute inside the exponential argument first.
                    let sub = poly_substitute(arg, f)?;
                    let scaled = sub.scale(&BigRational::from_integer((*k).into()));
                    exp_of(&scaled)?
                }
                other => match f(other) {
                    Some(v) => v.pow(*k as i32)?,
                    None => NormalForm::from_poly(Poly::monomial(
                        Monomial::from_pairs(vec![(other.clone(), *k)]),
                        BigRational::one(),
                    )),
                },
            };
            term = term.mul(&factor);
        }
        if term.has_trivial_denominator() {
            for (tm, tc) in term.numerator().terms() {
                plain.add_term(tm.clone(), tc.clone());
            }
        } else {
            rational = rational.add(&term);
        }
    }
    if rational.is_zero() {
        return Ok(NormalForm::from_poly(plain));
    }
    Ok(NormalForm::from_poly(plain).add(&rational))
}

/// Exponential of a normalized value. The argument must be a polynomial
/// (trivial denominator) free of exponentials.
pub fn exp_of(arg: &NormalForm) -> Result<NormalForm> {
    if !arg.has_trivial_denominator() {
        return Err(Error::BadExponentialArgument);
    }
    let p = arg.numerator().clone();
    if p.has_exp() {
        return Err(Error::BadExponentialArgument);
    }
    Ok(NormalForm::from_poly(Poly::monomial(
        Monomial::exp(p),
        BigRational::one(),
    )))
}

/// Expression tree -> normal form.
pub fn normalize(e: &Expr) -> Result<NormalForm> {
    match e {
        Expr::Num(q) => Ok(NormalForm::constant(q.clone())),
        Expr::Atom(Atom::Exp(p)) => exp_of(&NormalForm::from_poly((**p).clone())),
        Expr::Atom(a) => Ok(NormalForm::atom(a.clone())),
        Expr::Sum(xs) => {
            let mut out = NormalForm::zero();
            for x in xs {
                out = out.add(&normalize(x)?);
            }
            Ok(out)
        }
        Expr::Product(xs) => {
            let mut out = NormalForm::one();
            for x in xs {
                out = out.mul(&normalize(x)?);
            }
            Ok(out)
        }
        // Distribute powers over explicit products before inverting, so a
        // denominator written in factored form keeps its factors separate
        // (cancellation works by trial division against individual factors).
        Expr::Pow(b, k) => match &**b {
            Expr::Product(xs) if *k < 0 => {
                let mut out = NormalForm::one();
                for x in xs {
                    out = out.mul(&normalize(x)?.pow(*k)?);
                }
                Ok(out)
            }
            _ => normalize(b)?.pow(*k),
        },
    }
}

/// Polynomial -> expression tree, terms in descending monomial order,
/// atoms within a term in descending significance.
pub fn poly_to_expr(p: &Poly) -> Expr {
    if p.is_zero() {
        return Expr::zero();
    }
    let mut terms: Vec<Expr> = Vec::new();
    let all: Vec<_> = p.terms().collect();
    for (m, c) in all.into_iter().rev() {
        let mut parts: Vec<Expr> = Vec::new();
        if !c.is_one() || m.is_unit() {
            parts.push(Expr::Num(c.clone()));
        }
        for (a, k) in m.pairs().iter().rev() {
            parts.push(Expr::Atom(a.clone()).pow(*k as i32));
        }
        terms.push(match parts.len() {
            1 => parts.pop().unwrap(),
            _ => Expr::Product(parts),
        });
    }
    match terms.len() {
        1 => terms.pop().unwrap(),
        _ => Expr::Sum(terms),
    }
}

/// Derivative of a normal form under a derivation defined on atoms.
/// The derivation handles every atom except exponentials, whose chain rule
/// is applied centrally here. Quotient rule preserves the denominator
/// factorization.
pub fn derive(
    nf: &NormalForm,
    d: &impl Fn(&Atom) -> Result<NormalForm>,
) -> Result<NormalForm> {
    let num_part = derive_poly(nf.numerator(), d)?;
    if nf.has_trivial_denominator() {
        return Ok(num_part);
    }
    // nf' = N'/D - nf * (sum e_i f_i'/f_i + sum k a'/a)
    let den_nf = NormalForm {
        num: Poly::one(),
        den_mono: nf.denominator_monomial().clone(),
        den: nf.denominator_factors().clone(),
    };
    let mut out = num_part.mul(&den_nf);
    let mut log_deriv = NormalForm::zero();
    for (a, k) in nf.denominator_monomial().pairs() {
        let da = derive_atom(a, d)?;
        let ratio = da.div(&NormalForm::atom(a.clone()))?;
        log_deriv = log_deriv.add(&ratio.scale(&BigRational::from_integer((*k).into())));
    }
    for (f, e) in nf.denominator_factors().iter() {
        let df = derive_poly(f, d)?;
        let ratio = df.div(&NormalForm::from_poly(f.clone()))?;
        log_deriv = log_deriv.add(&ratio.scale(&BigRational::from_integer(e.into())));
    }
    out = out.sub(&nf.mul(&log_deriv));
    Ok(out)
}

fn derive_atom(
    a: &Atom,
    d: &impl Fn(&Atom) -> Result<NormalForm>,
) -> Result<NormalForm> {
    match a {
        Atom::Exp(arg) => {
            let darg = derive_poly(arg, d)?;
            let e = NormalForm::from_poly(Poly::monomial(
                Monomial::exp((**arg).clone()),
                BigRational::one(),
            ));
            Ok(e.mul(&darg))
        }
        other => d(other),
    }
}

/// Derivative of a polynomial under a derivation defined on atoms.
///
/// Polynomial pieces are accumulated term-by-term in a single polynomial
/// (one normalization at the end); only pieces with genuine denominators go
/// through rational addition.
pub fn derive_poly(
    p: &Poly,
    d: &impl Fn(&Atom) -> Result<NormalForm>,
) -> Result<NormalForm> {
    let mut poly_acc = Poly::zero();
    let mut rational_acc = NormalForm::zero();
    for (m, c) in p.terms() {
        let pairs = m.pairs();
        for (i, (a, k)) in pairs.iter().enumerate() {
            let da = derive_atom(a, d)?;
            if da.is_zero() {
                continue;
            }
            // c * k * a^(k-1) * da * rest
            let mut rest: Vec<(Atom, u32)> = Vec::new();
            for (j, (b, kb)) in pairs.iter().enumerate() {
                let kk = if i == j { *kb - 1 } else { *kb };
                if kk > 0 {
                    rest.push((b.clone(), kk));
                }
            }
            let coef = c * BigRational::from_integer((*k).into());
            let rest_mono = Monomial::from_pairs(rest);
            if da.has_trivial_denominator() {
                for (dm, dc) in da.numerator().terms() {
                    poly_acc.add_term(dm.mul(&rest_mono), dc * &coef);
                }
            } else {
                let base = NormalForm::from_poly(Poly::monomial(rest_mono, coef));
                rational_acc = rational_acc.add(&base.mul(&da));
            }
        }
    }
    if rational_acc.is_zero() {
        return Ok(NormalForm::from_poly(poly_acc));
    }
    Ok(NormalForm::from_poly(poly_acc).add(&rational_acc))
}
