//! Exact multivariate polynomials over the rationals, with atoms as
//! indeterminates. Monomials are graded-lexicographically ordered; a monomial
//! carries at most one exponential factor, and exponential factors multiply
//! by adding their (polynomial) arguments.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::sync::Arc;

use num::{BigRational, One, Signed, Zero};

use crate::atom::Atom;

/// A power product of atoms, sorted ascending by atom. Invariants: powers are
/// nonzero; at most one `Atom::Exp` appears and its power is exactly 1 (an
/// exponential raised to k is stored as the exponential of k times its
/// argument, and a zero argument collapses to no factor at all).
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Monomial(Vec<(Atom, u32)>);

impl Monomial {
    pub fn unit() -> Self {
        Monomial(Vec::new())
    }

    pub fn atom(a: Atom) -> Self {
        Monomial::from_pairs(vec![(a, 1)])
    }

    pub fn exp(arg: Poly) -> Self {
        if arg.is_zero() {
            Monomial::unit()
        } else {
            Monomial(vec![(Atom::Exp(Arc::new(arg)), 1)])
        }
    }

    /// Build from arbitrary (atom, power) pairs: duplicates merge by adding
    /// powers, exponential factors merge by adding scaled arguments.
    pub fn from_pairs(pairs: Vec<(Atom, u32)>) -> Self {
        let mut exp_arg = Poly::zero();
        let mut plain: BTreeMap<Atom, u32> = BTreeMap::new();
        for (a, k) in pairs {
            if k == 0 {
                continue;
            }
            match a {
                Atom::Exp(p) => {
                    let scaled = p.scale(&BigRational::from_integer(k.into()));
                    exp_arg = exp_arg.add(&scaled);
                }
                other => *plain.entry(other).or_insert(0) += k,
            }
        }
        let mut v: Vec<(Atom, u32)> = plain.into_iter().filter(|&(_, k)| k > 0).collect();
        if !exp_arg.is_zero() {
            v.push((Atom::Exp(Arc::new(exp_arg)), 1));
        }
        v.sort_by(|a, b| a.0.cmp(&b.0));
        Monomial(v)
    }

    pub fn pairs(&self) -> &[(Atom, u32)] {
        &self.0
    }

    pub fn is_unit(&self) -> bool {
        self.0.is_empty()
    }

    pub fn total_degree(&self) -> u32 {
        self.0.iter().map(|&(_, k)| k).sum()
    }

    pub fn exp_part(&self) -> Option<&Arc<Poly>> {
        self.0.iter().find_map(|(a, _)| match a {
            Atom::Exp(p) => Some(p),
            _ => None,
        })
    }

    pub fn is_exp_free(&self) -> bool {
        self.exp_part().is_none()
    }

    pub fn power_of(&self, atom: &Atom) -> u32 {
        self.0
            .iter()
            .find_map(|(a, k)| if a == atom { Some(*k) } else { None })
            .unwrap_or(0)
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let mut pairs = self.0.clone();
        pairs.extend(other.0.iter().cloned());
        Monomial::from_pairs(pairs)
    }

    pub fn pow(&self, k: u32) -> Monomial {
        if k == 0 {
            return Monomial::unit();
        }
        Monomial::from_pairs(self.0.iter().map(|(a, p)| (a.clone(), p * k)).collect())
    }

    /// Whether `self` divides `other`. `self` must be exponential-free for a
    /// positive answer; the quotient keeps `other`'s exponential part intact.
    pub fn divides(&self, other: &Monomial) -> bool {
        self.is_exp_free() && self.0.iter().all(|(a, k)| other.power_of(a) >= *k)
    }

    /// Quotient `other / self`; caller guarantees `self.divides(other)`.
    pub fn div_into(&self, other: &Monomial) -> Monomial {
        let pairs = other
            .0
            .iter()
            .map(|(a, k)| (a.clone(), k - self.power_of(a)))
            .filter(|&(_, k)| k > 0)
            .collect();
        Monomial(pairs)
    }

    /// Greatest common power product over the non-exponential atoms.
    pub fn gcd(&self, other: &Monomial) -> Monomial {
        let pairs = self
            .0
            .iter()
            .filter(|(a, _)| !a.is_exp())
            .map(|(a, k)| (a.clone(), (*k).min(other.power_of(a))))
            .filter(|&(_, k)| k > 0)
            .collect();
        Monomial(pairs)
    }

    /// The non-exponential part of this monomial.
    pub fn without_exp(&self) -> Monomial {
        Monomial(self.0.iter().filter(|(a, _)| !a.is_exp()).cloned().collect())
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Monomial {
    /// Graded lexicographic: total degree first, ties broken by walking the
    /// atoms from most significant (largest) downwards.
    fn cmp(&self, other: &Self) -> Ordering {
        self.total_degree()
            .cmp(&other.total_degree())
            .then_with(|| {
                let mut ia = self.0.iter().rev();
                let mut ib = other.0.iter().rev();
                loop {
                    match (ia.next(), ib.next()) {
                        (None, None) => return Ordering::Equal,
                        (None, Some(_)) => return Ordering::Less,
                        (Some(_), None) => return Ordering::Greater,
                        (Some((aa, ka)), Some((ab, kb))) => {
                            match aa.cmp(ab) {
                                // The monomial holding the larger atom at this
                                // position has positive power on a more
                                // significant indeterminate.
                                Ordering::Greater => return Ordering::Greater,
                                Ordering::Less => return Ordering::Less,
                                Ordering::Equal => match ka.cmp(kb) {
                                    Ordering::Equal => continue,
                                    ord => return ord,
                                },
                            }
                        }
                    }
                }
            })
    }
}

/// Polynomial: finite map monomial -> nonzero rational coefficient.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Default)]
pub struct Poly(BTreeMap<Monomial, BigRational>);

/// Order exponential arguments compatibly with addition: `a` exceeds `b`
/// iff `a - b` has a positive leading coefficient. Unlike the structural
/// polynomial order this is translation-invariant, which makes choices
/// based on it independent of a global exponential shift.
pub fn cmp_exp_args(a: &Poly, b: &Poly) -> Ordering {
    let d = a.sub(b);
    match d.leading() {
        None => Ordering::Equal,
        Some((_, c)) => {
            if c > &BigRational::from_integer(0.into()) {
                Ordering::Greater
            } else {
                Ordering::Less
            }
        }
    }
}

impl Poly {
    pub fn zero() -> Self {
        Poly(BTreeMap::new())
    }

    pub fn one() -> Self {
        Poly::constant(BigRational::one())
    }

    pub fn constant(c: BigRational) -> Self {
        let mut m = BTreeMap::new();
        if !c.is_zero() {
            m.insert(Monomial::unit(), c);
        }
        Poly(m)
    }

    pub fn monomial(m: Monomial, c: BigRational) -> Self {
        let mut map = BTreeMap::new();
        if !c.is_zero() {
            map.insert(m, c);
        }
        Poly(map)
    }

    pub fn atom(a: Atom) -> Self {
        Poly::monomial(Monomial::atom(a), BigRational::one())
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (Monomial, BigRational)>) -> Self {
        let mut p = Poly::zero();
        for (m, c) in terms {
            p.add_term(m, c);
        }
        p
    }

    pub fn add_term(&mut self, m: Monomial, c: BigRational) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.0.entry(m) {
            Entry::Vacant(e) => {
                e.insert(c);
            }
            Entry::Occupied(mut e) => {
                let sum = e.get() + &c;
                if sum.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = sum;
                }
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn term_count(&self) -> usize {
        self.0.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &BigRational)> {
        self.0.iter()
    }

    /// Leading (largest) term in the graded-lex order.
    pub fn leading(&self) -> Option<(&Monomial, &BigRational)> {
        self.0.iter().next_back()
    }

    /// `Some(c)` if the polynomial is the constant c (including zero).
    pub fn as_constant(&self) -> Option<BigRational> {
        match self.0.len() {
            0 => Some(BigRational::zero()),
            1 => {
                let (m, c) = self.0.iter().next().unwrap();
                m.is_unit().then(|| c.clone())
            }
            _ => None,
        }
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let mut out = self.clone();
        for (m, c) in &other.0 {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Poly {
        Poly(self.0.iter().map(|(m, c)| (m.clone(), -c.clone())).collect())
    }

    pub fn scale(&self, k: &BigRational) -> Poly {
        if k.is_zero() {
            return Poly::zero();
        }
        Poly(self.0.iter().map(|(m, c)| (m.clone(), c * k)).collect())
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        let mut out = Poly::zero();
        for (ma, ca) in &self.0 {
            for (mb, cb) in &other.0 {
                out.add_term(ma.mul(mb), ca * cb);
            }
        }
        out
    }

    pub fn mul_term(&self, m: &Monomial, c: &BigRational) -> Poly {
        let mut out = Poly::zero();
        for (mm, cc) in &self.0 {
            out.add_term(mm.mul(m), cc * c);
        }
        out
    }

    pub fn pow(&self, k: u32) -> Poly {
        let mut out = Poly::one();
        for _ in 0..k {
            out = out.mul(self);
        }
        out
    }

    /// True if any monomial carries an exponential factor.
    pub fn has_exp(&self) -> bool {
        self.0.keys().any(|m| !m.is_exp_free())
    }

    /// Exact division: `Some(q)` with `self = q * divisor`, or `None` if the
    /// division fails. Exponential-free divisors use ordinary long division
    /// (exponential factors in the dividend ride along as opaque atoms);
    /// divisors carrying exponentials go through the unit-aware path.
    pub fn div_exact(&self, divisor: &Poly) -> Option<Poly> {
        if divisor.is_zero() {
            return None;
        }
        if divisor.has_exp() {
            return self.div_exact_units(divisor);
        }
        let (dm, dc) = divisor.leading().unwrap();
        let mut rem = self.clone();
        let mut quot = Poly::zero();
        while !rem.is_zero() {
            let (rm, rc) = rem.leading().unwrap();
            if !dm.divides(rm) {
                return None;
            }
            let qm = dm.div_into(rm);
            let qc = rc / dc;
            quot.add_term(qm.clone(), qc.clone());
            rem = rem.sub(&divisor.mul_term(&qm, &qc));
        }
        Some(quot)
    }

    /// Group the terms by exponential argument: a map from each distinct
    /// argument (zero for exponential-free terms) to the exponential-free
    /// polynomial multiplying `exp` of that argument.
    fn split_by_exp(&self) -> BTreeMap<Poly, Poly> {
        let mut parts: BTreeMap<Poly, Poly> = BTreeMap::new();
        for (m, c) in &self.0 {
            let arg = match m.exp_part() {
                Some(a) => (**a).clone(),
                None => Poly::zero(),
            };
            parts
                .entry(arg)
                .or_insert_with(Poly::zero)
                .add_term(m.without_exp(), c.clone());
        }
        parts
    }

    /// Exact division by a divisor carrying exponential factors. Since
    /// exponential monomials are invertible, the quotient may pick up
    /// exponentials of differences of arguments. Components are peeled off
    /// by maximal argument (under the translation-invariant argument
    /// order): the top component of the dividend must be divisible by the
    /// top component of the divisor, and each peel strictly lowers the
    /// maximal argument. A lower bound on admissible quotient arguments and
    /// a step cap make failure (non-divisibility) terminate quickly.
    fn div_exact_units(&self, divisor: &Poly) -> Option<Poly> {
        if self.is_zero() {
            return Some(Poly::zero());
        }
        let dparts = divisor.split_by_exp();
        let (bmax, ftop) = dparts
            .iter()
            .max_by(|x, y| cmp_exp_args(x.0, y.0))
            .expect("nonzero divisor has components");
        let bmin = dparts
            .keys()
            .min_by(|x, y| cmp_exp_args(x, y))
            .expect("nonzero divisor has components");
        let amin = self
            .split_by_exp()
            .keys()
            .min_by(|x, y| cmp_exp_args(x, y))
            .cloned()
            .expect("nonzero dividend has components");
        // In an exact quotient every argument c satisfies
        // c + min-arg(divisor) >= min-arg(dividend).
        let cmin = amin.sub(bmin);
        let cap = self.0.len() + 16;
        let mut rem = self.clone();
        let mut quot = Poly::zero();
        let mut steps = 0usize;
        while !rem.is_zero() {
            steps += 1;
            if steps > cap {
                return None;
            }
            let rparts = rem.split_by_exp();
            let (amax, rtop) = rparts
                .iter()
                .max_by(|x, y| cmp_exp_args(x.0, y.0))
                .expect("nonzero remainder has components");
            let c = amax.sub(bmax);
            if cmp_exp_args(&c, &cmin) == Ordering::Less {
                return None;
            }
            let qc = rtop.div_exact(ftop)?;
            let qterm = qc.mul_exp(&c);
            quot = quot.add(&qterm);
            rem = rem.sub(&qterm.mul(divisor));
        }
        Some(quot)
    }

    /// Greatest monomial dividing every term (exponential parts excluded).
    pub fn monomial_content(&self) -> Monomial {
        let mut it = self.0.keys();
        let Some(first) = it.next() else {
            return Monomial::unit();
        };
        let mut g = first.without_exp();
        for m in it {
            if g.is_unit() {
                break;
            }
            g = g.gcd(m);
        }
        g
    }

    /// Divide out the monomial content; returns (content, reduced polynomial).
    pub fn extract_content(&self) -> (Monomial, Poly) {
        let g = self.monomial_content();
        if g.is_unit() {
            return (g, self.clone());
        }
        let reduced = Poly(
            self.0
                .iter()
                .map(|(m, c)| (g.div_into(m), c.clone()))
                .collect(),
        );
        (g, reduced)
    }

    /// Multiply the polynomial by `exp(arg)`: every term's exponential
    /// argument shifts up by `arg`.
    pub fn mul_exp(&self, arg: &Poly) -> Poly {
        if arg.is_zero() {
            return self.clone();
        }
        let e = Monomial::exp(arg.clone());
        let mut out = Poly::zero();
        for (m, c) in &self.0 {
            out.add_term(m.mul(&e), c.clone());
        }
        out
    }

    /// Apply `f` to every atom (including atoms inside exponential
    /// arguments); used for occurrence scans.
    pub fn walk_atoms(&self, f: &mut impl FnMut(&Atom)) {
        for m in self.0.keys() {
            for (a, _) in m.pairs() {
                f(a);
                if let Atom::Exp(p) = a {
                    p.walk_atoms(f);
                }
            }
        }
    }

    /// Largest jet order of `dep` occurring in the polynomial, if any.
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

    /// Canonical sign: the leading coefficient is positive.
    pub fn leading_coefficient_positive(&self) -> bool {
        self.leading().is_none_or(|(_, c)| c.is_positive())
    }
}
