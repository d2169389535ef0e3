//! Indivisible symbols: parameters, independent variables, jet variables,
//! unknown coefficient functions (with formal partial derivatives), and
//! exponentials of polynomials.

use std::cmp::Ordering;
use std::fmt;
use std::sync::Arc;

use crate::poly::Poly;

/// Cheap-to-clone symbol name.
pub type Name = Arc<str>;

pub fn name(s: &str) -> Name {
    Arc::from(s)
}

/// A direction for a formal partial derivative of an unknown coefficient
/// function: with respect to x, t, or a jet variable of the function's
/// dependent variable.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Dir {
    X,
    T,
    Jet(u32),
}

impl fmt::Display for Dir {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Dir::X => write!(f, "x"),
            Dir::T => write!(f, "t"),
            Dir::Jet(k) => write!(f, "jet {k}"),
        }
    }
}

/// Declared signature of an unknown coefficient function: its name and the
/// arguments it may depend on, e.g. alpha_1(x, t, u, ..., u_s).
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct UnknownSig {
    pub name: Name,
    /// Dependent variable whose jets appear among the arguments.
    pub dep: Name,
    pub has_x: bool,
    pub has_t: bool,
    /// Highest jet order among the arguments; `None` if no jets at all.
    pub max_jet: Option<u32>,
}

impl UnknownSig {
    pub fn depends_on_jet(&self, k: u32) -> bool {
        self.max_jet.is_some_and(|m| k <= m)
    }
}

/// Sorted multiset of formal partial-derivative directions.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Default)]
pub struct Partials(Vec<(Dir, u32)>);

impl Partials {
    pub fn none() -> Self {
        Partials(Vec::new())
    }

    pub fn single(dir: Dir) -> Self {
        Partials(vec![(dir, 1)])
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn order(&self) -> u32 {
        self.0.iter().map(|&(_, m)| m).sum()
    }

    pub fn with(&self, dir: Dir) -> Self {
        let mut v = self.0.clone();
        match v.binary_search_by_key(&dir, |&(d, _)| d) {
            Ok(i) => v[i].1 += 1,
            Err(i) => v.insert(i, (dir, 1)),
        }
        Partials(v)
    }

    pub fn iter(&self) -> impl Iterator<Item = (Dir, u32)> + '_ {
        self.0.iter().copied()
    }
}

/// An unknown coefficient function, possibly under formal partial derivatives.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct UnknownAtom {
    pub sig: Arc<UnknownSig>,
    pub partials: Partials,
}

/// An indivisible multiplicative symbol.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub enum Atom {
    /// A constant parameter living in the coefficient field.
    Param(Name),
    X,
    T,
    /// Jet variable: dependent-variable name and derivative order
    /// (`Jet("u", 0)` is u itself, `Jet("u", 2)` is u_xx).
    Jet(Name, u32),
    Unknown(UnknownAtom),
    /// exp of an exponential-free polynomial.
    Exp(Arc<Poly>),
}

impl Atom {
    pub fn param(s: &str) -> Self {
        Atom::Param(name(s))
    }

    pub fn jet(dep: &str, order: u32) -> Self {
        Atom::Jet(name(dep), order)
    }

    pub fn is_v_jet(&self) -> bool {
        matches!(self, Atom::Jet(n, _) if &**n == "v")
    }

    pub fn is_exp(&self) -> bool {
        matches!(self, Atom::Exp(_))
    }

    /// Rank used by the canonical atom order: parameters < x < t
    /// < non-v jets < v jets < unknowns < differentiated unknowns < exp.
    fn rank(&self) -> u8 {
        match self {
            Atom::Param(_) => 0,
            Atom::X => 1,
            Atom::T => 2,
            Atom::Jet(..) if !self.is_v_jet() => 3,
            Atom::Jet(..) => 4,
            Atom::Unknown(u) if u.partials.is_empty() => 5,
            Atom::Unknown(_) => 6,
            Atom::Exp(_) => 7,
        }
    }
}

impl PartialOrd for Atom {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Name comparison with a pointer fast path: shared `Arc`s are equal
/// without walking the string.
fn name_cmp(a: &Name, b: &Name) -> Ordering {
    if Arc::ptr_eq(a, b) {
        Ordering::Equal
    } else {
        a.cmp(b)
    }
}

impl Ord for Atom {
    fn cmp(&self, other: &Self) -> Ordering {
        self.rank().cmp(&other.rank()).then_with(|| match (self, other) {
            (Atom::Param(a), Atom::Param(b)) => name_cmp(a, b),
            (Atom::X, Atom::X) | (Atom::T, Atom::T) => Ordering::Equal,
            (Atom::Jet(an, ak), Atom::Jet(bn, bk)) => name_cmp(an, bn).then(ak.cmp(bk)),
            (Atom::Unknown(a), Atom::Unknown(b)) => a.cmp(b),
            (Atom::Exp(a), Atom::Exp(b)) => {
                if Arc::ptr_eq(a, b) {
                    Ordering::Equal
                } else {
                    a.cmp(b)
                }
            }
            _ => unreachable!("equal ranks imply equal variants"),
        })
    }
}
