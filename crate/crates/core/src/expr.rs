//! User-facing expression trees. An `Expr` is a syntactic object; all
//! algebraic questions (equality, zero testing, collection) go through its
//! rational normal form (`crate::normal::NormalForm`).

use std::ops::{Add, Mul, Neg, Sub};

use num::{BigInt, BigRational, One, Zero};

use crate::atom::Atom;

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Expr {
    Num(BigRational),
    Atom(Atom),
    Sum(Vec<Expr>),
    Product(Vec<Expr>),
    Pow(Box<Expr>, i32),
}

impl Expr {
    pub fn zero() -> Self {
        Expr::Num(BigRational::zero())
    }

    pub fn one() -> Self {
        Expr::Num(BigRational::one())
    }

    pub fn int(n: i64) -> Self {
        Expr::Num(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn rational(num: i64, den: i64) -> Self {
        Expr::Num(BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    pub fn atom(a: Atom) -> Self {
        Expr::Atom(a)
    }

    pub fn param(name: &str) -> Self {
        Expr::Atom(Atom::param(name))
    }

    pub fn x() -> Self {
        Expr::Atom(Atom::X)
    }

    pub fn t() -> Self {
        Expr::Atom(Atom::T)
    }

    pub fn jet(dep: &str, order: u32) -> Self {
        Expr::Atom(Atom::jet(dep, order))
    }

    pub fn pow(self, exponent: i32) -> Self {
        match exponent {
            0 => Expr::one(),
            1 => self,
            _ => Expr::Pow(Box::new(self), exponent),
        }
    }

    pub fn is_zero_literal(&self) -> bool {
        matches!(self, Expr::Num(q) if q.is_zero())
    }

    /// All atoms appearing anywhere in the tree (including inside exp
    /// arguments), in depth-first order, possibly with repeats.
    pub fn atoms(&self) -> Vec<Atom> {
        let mut out = Vec::new();
        self.walk_atoms(&mut |a| out.push(a.clone()));
        out
    }

    pub fn walk_atoms(&self, f: &mut impl FnMut(&Atom)) {
        match self {
            Expr::Num(_) => {}
            Expr::Atom(a) => {
                f(a);
                if let Atom::Exp(p) = a {
                    for (m, _) in p.terms() {
                        for (inner, _) in m.pairs() {
                            f(inner);
                        }
                    }
                }
            }
            Expr::Sum(xs) | Expr::Product(xs) => {
                for x in xs {
                    x.walk_atoms(f);
                }
            }
            Expr::Pow(b, _) => b.walk_atoms(f),
        }
    }
}

impl Add for Expr {
    type Output = Expr;
    fn add(self, rhs: Expr) -> Expr {
        match (self, rhs) {
            (Expr::Sum(mut a), Expr::Sum(b)) => {
                a.extend(b);
                Expr::Sum(a)
            }
            (Expr::Sum(mut a), b) => {
                a.push(b);
                Expr::Sum(a)
            }
            (a, Expr::Sum(mut b)) => {
                b.insert(0, a);
                Expr::Sum(b)
            }
            (a, b) => Expr::Sum(vec![a, b]),
        }
    }
}

impl Sub for Expr {
    type Output = Expr;
    fn sub(self, rhs: Expr) -> Expr {
        self + (-rhs)
    }
}

impl Mul for Expr {
    type Output = Expr;
    fn mul(self, rhs: Expr) -> Expr {
        match (self, rhs) {
            (Expr::Product(mut a), Expr::Product(b)) => {
                a.extend(b);
                Expr::Product(a)
            }
            (Expr::Product(mut a), b) => {
                a.push(b);
                Expr::Product(a)
            }
            (a, Expr::Product(mut b)) => {
                b.insert(0, a);
                Expr::Product(b)
            }
            (a, b) => Expr::Product(vec![a, b]),
        }
    }
}

impl Neg for Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        Expr::int(-1) * self
    }
}
