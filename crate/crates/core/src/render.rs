//! Canonical text and LaTeX rendering.
//!
//! The text form uses digit-style jets (`u_2`), explicit `*`, and `^` with
//! integer exponents, so everything printed here re-parses to an equal
//! normal form.

use num::{BigRational, Signed};

use crate::atom::{Atom, Dir, UnknownAtom};
use crate::expr::Expr;
use crate::normal::{poly_to_expr, NormalForm};
use crate::poly::Poly;

pub fn text(e: &Expr) -> String {
    render(e, Mode::Text)
}

pub fn latex(e: &Expr) -> String {
    render(e, Mode::Latex)
}

pub fn poly_text(p: &Poly) -> String {
    text(&poly_to_expr(p))
}

pub fn nf_text(nf: &NormalForm) -> String {
    text(&nf.to_expr())
}

pub fn nf_latex(nf: &NormalForm) -> String {
    latex(&nf.to_expr())
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Mode {
    Text,
    Latex,
}

fn render(e: &Expr, m: Mode) -> String {
    match e {
        Expr::Num(q) => num_string(q, m),
        Expr::Atom(a) => atom_string(a, m),
        Expr::Sum(ts) => {
            let mut out = String::new();
            for (i, t) in ts.iter().enumerate() {
                let s = render(t, m);
                if i == 0 {
                    out.push_str(&s);
                } else if let Some(rest) = s.strip_prefix('-') {
                    out.push_str(" - ");
                    out.push_str(rest);
                } else {
                    out.push_str(" + ");
                    out.push_str(&s);
                }
            }
            out
        }
        Expr::Product(fs) => {
            let sep = match m {
                Mode::Text => "*",
                Mode::Latex => "\\,",
            };
            let mut out = String::new();
            for (i, f) in fs.iter().enumerate() {
                let needs_parens = matches!(f, Expr::Sum(_))
                    || (i > 0 && matches!(f, Expr::Num(q) if q.is_negative() || !q.is_integer()));
                let s = render(f, m);
                if i > 0 {
                    out.push_str(sep);
                }
                if needs_parens {
                    out.push_str(&parens(&s, m));
                } else {
                    out.push_str(&s);
                }
            }
            out
        }
        Expr::Pow(b, k) => {
            let base = render(b, m);
            let atomic = matches!(
                **b,
                Expr::Atom(_) | Expr::Num(_)
            ) && !base.starts_with('-')
                && !base.contains('/');
            let base = if atomic { base } else { parens(&base, m) };
            match m {
                Mode::Text => format!("{base}^{k}"),
                Mode::Latex => format!("{{{base}}}^{{{k}}}"),
            }
        }
    }
}

fn parens(s: &str, m: Mode) -> String {
    match m {
        Mode::Text => format!("({s})"),
        Mode::Latex => format!("\\left({s}\\right)"),
    }
}

fn num_string(q: &BigRational, m: Mode) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        match m {
            Mode::Text => format!("{}/{}", q.numer(), q.denom()),
            Mode::Latex => {
                if q.is_negative() {
                    format!("-\\frac{{{}}}{{{}}}", -q.numer(), q.denom())
                } else {
                    format!("\\frac{{{}}}{{{}}}", q.numer(), q.denom())
                }
            }
        }
    }
}

fn ident_latex(name: &str) -> String {
    match name {
        "lambda" => return "\\lambda".into(),
        "gamma" => return "\\gamma".into(),
        "mu" => return "\\mu".into(),
        _ => {}
    }
    let trimmed = name.trim_start_matches('?');
    let split = trimmed.find(|c: char| c.is_ascii_digit());
    match split {
        Some(i) if i > 0 => format!("{}_{{{}}}", &trimmed[..i], &trimmed[i..]),
        _ => trimmed.to_string(),
    }
}

fn atom_string(a: &Atom, m: Mode) -> String {
    match a {
        Atom::Param(n) => match m {
            Mode::Text => n.to_string(),
            Mode::Latex => ident_latex(n),
        },
        Atom::X => "x".into(),
        Atom::T => "t".into(),
        Atom::Jet(dep, k) => jet_string(dep, *k, m),
        Atom::Unknown(u) => unknown_string(u, m),
        Atom::Exp(arg) => {
            let inner = render(&poly_to_expr(arg), m);
            match m {
                Mode::Text => format!("exp({inner})"),
                Mode::Latex => format!("e^{{{inner}}}"),
            }
        }
    }
}

fn jet_string(dep: &str, k: u32, m: Mode) -> String {
    match (m, k) {
        (_, 0) => dep.to_string(),
        (Mode::Text, _) => format!("{dep}_{k}"),
        (Mode::Latex, _) => format!("{dep}_{{{k}}}"),
    }
}

fn unknown_string(u: &UnknownAtom, m: Mode) -> String {
    let base = match m {
        Mode::Text => u.sig.name.to_string(),
        Mode::Latex => ident_latex(&u.sig.name),
    };
    if u.partials.is_empty() {
        return base;
    }
    match m {
        Mode::Text => {
            let mut out = format!("D[{}", u.sig.name);
            for (dir, mult) in u.partials.iter() {
                for _ in 0..mult {
                    out.push_str(", ");
                    out.push_str(&dir_text(&u.sig.dep, dir));
                }
            }
            out.push(']');
            out
        }
        Mode::Latex => {
            let mut subs = String::new();
            for (dir, mult) in u.partials.iter() {
                for _ in 0..mult {
                    if !subs.is_empty() {
                        subs.push(' ');
                    }
                    subs.push_str(&dir_latex(&u.sig.dep, dir));
                }
            }
            format!("\\partial_{{{subs}}}{base}")
        }
    }
}

fn dir_text(dep: &str, dir: Dir) -> String {
    match dir {
        Dir::X => "x".into(),
        Dir::T => "t".into(),
        Dir::Jet(k) => jet_string(dep, k, Mode::Text),
    }
}

fn dir_latex(dep: &str, dir: Dir) -> String {
    match dir {
        Dir::X => "x".into(),
        Dir::T => "t".into(),
        Dir::Jet(k) => jet_string(dep, k, Mode::Latex),
    }
}
