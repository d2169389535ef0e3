//! Text grammar for expressions.
//!
//! Identifiers are `[A-Za-z][A-Za-z0-9]*`. Jets of the dependent variable
//! (and of `v` where permitted) are written `u`, `u_xx`, `u_2`, or `u[2]`;
//! multiplication is explicit (`*`); `^` takes integer exponents with an
//! optional minus sign; `exp(...)` is the exponential; `?name` introduces a
//! solvable constant; `D[name, u_2, x, ...]` is a formal partial derivative
//! of a declared unknown coefficient function.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use num::{BigInt, BigRational};

use crate::atom::{name, Atom, Dir, Name, Partials, UnknownAtom, UnknownSig};
use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::normal::normalize;

pub const DEFAULT_PARAMETERS: [&str; 5] = ["lambda", "c1", "c2", "gamma", "mu"];

#[derive(Clone, Debug)]
pub struct ParseContext {
    /// Dependent variable whose jets may appear (`u`, `w`, ...).
    pub dep: Name,
    pub params: BTreeSet<Name>,
    pub unknowns: BTreeMap<Name, Arc<UnknownSig>>,
    /// Whether jets of `v` (the linearized variable) may appear.
    pub allow_v: bool,
    /// Whether `?name` solvable constants may appear.
    pub allow_solvables: bool,
}

impl ParseContext {
    pub fn new(dep: &str) -> Self {
        ParseContext {
            dep: name(dep),
            params: DEFAULT_PARAMETERS.iter().map(|s| name(s)).collect(),
            unknowns: BTreeMap::new(),
            allow_v: true,
            allow_solvables: false,
        }
    }

    pub fn with_parameter(mut self, p: &str) -> Self {
        self.params.insert(name(p));
        self
    }

    pub fn with_unknown(mut self, sig: Arc<UnknownSig>) -> Self {
        self.unknowns.insert(sig.name.clone(), sig);
        self
    }

    pub fn with_solvables(mut self) -> Self {
        self.allow_solvables = true;
        self
    }

    pub fn without_v(mut self) -> Self {
        self.allow_v = false;
        self
    }
}

/// Parse an expression. Solvable constants encountered are returned in
/// first-occurrence order.
pub fn parse_expr_full(src: &str, ctx: &ParseContext) -> Result<(Expr, Vec<Name>)> {
    let tokens = lex(src)?;
    let mut p = Parser {
        tokens,
        pos: 0,
        ctx,
        solvables: Vec::new(),
    };
    let e = p.expression()?;
    p.expect_end()?;
    Ok((e, p.solvables))
}

pub fn parse_expr(src: &str, ctx: &ParseContext) -> Result<Expr> {
    Ok(parse_expr_full(src, ctx)?.0)
}

#[derive(Clone, PartialEq, Eq, Debug)]
enum Suffix {
    Xs(u32),
    Digits(u32),
    T,
}

#[derive(Clone, PartialEq, Eq, Debug)]
enum Tok {
    Num(BigInt),
    Ident { base: String, suffix: Option<Suffix> },
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    LBracket,
    RBracket,
    Comma,
    Question,
}

#[derive(Clone, Debug)]
struct Spanned {
    tok: Tok,
    line: usize,
    col: usize,
}

fn syntax(line: usize, col: usize, msg: impl Into<String>) -> Error {
    Error::Syntax {
        line,
        col,
        msg: msg.into(),
    }
}

fn lex(src: &str) -> Result<Vec<Spanned>> {
    let mut out = Vec::new();
    let mut line = 1usize;
    let mut col = 1usize;
    let mut it = src.chars().peekable();
    while let Some(&c) = it.peek() {
        let (tl, tc) = (line, col);
        let mut bump = |it: &mut std::iter::Peekable<std::str::Chars>| {
            let c = it.next().unwrap();
            if c == '\n' {
                line += 1;
                col = 1;
            } else {
                col += 1;
            }
            c
        };
        if c.is_whitespace() {
            bump(&mut it);
            continue;
        }
        if c.is_ascii_digit() {
            let mut s = String::new();
            while let Some(&d) = it.peek() {
                if d.is_ascii_digit() {
                    s.push(bump(&mut it));
                } else {
                    break;
                }
            }
            let n = s
                .parse::<BigInt>()
                .map_err(|_| syntax(tl, tc, "invalid integer literal"))?;
            out.push(Spanned { tok: Tok::Num(n), line: tl, col: tc });
            continue;
        }
        if c.is_ascii_alphabetic() {
            let mut base = String::new();
            while let Some(&d) = it.peek() {
                if d.is_ascii_alphanumeric() {
                    base.push(bump(&mut it));
                } else {
                    break;
                }
            }
            let mut suffix = None;
            if it.peek() == Some(&'_') {
                bump(&mut it); // consume '_'
                match it.peek() {
                    Some(&d) if d.is_ascii_digit() => {
                        let mut s = String::new();
                        while let Some(&e) = it.peek() {
                            if e.is_ascii_digit() {
                                s.push(bump(&mut it));
                            } else {
                                break;
                            }
                        }
                        let k: u32 = s
                            .parse()
                            .map_err(|_| syntax(tl, tc, "jet order too large"))?;
                        suffix = Some(Suffix::Digits(k));
                    }
                    Some(&'x') => {
                        let mut k = 0u32;
                        while it.peek() == Some(&'x') {
                            bump(&mut it);
                            k += 1;
                        }
                        if it.peek().is_some_and(|d| d.is_ascii_alphanumeric()) {
                            return Err(syntax(tl, tc, "malformed derivative suffix"));
                        }
                        suffix = Some(Suffix::Xs(k));
                    }
                    Some(&'t') => {
                        bump(&mut it);
                        if it.peek().is_some_and(|d| d.is_ascii_alphanumeric()) {
                            return Err(syntax(tl, tc, "malformed derivative suffix"));
                        }
                        suffix = Some(Suffix::T);
                    }
                    _ => return Err(syntax(tl, tc, "expected derivative suffix after `_`")),
                }
            }
            out.push(Spanned {
                tok: Tok::Ident { base, suffix },
                line: tl,
                col: tc,
            });
            continue;
        }
        let tok = match c {
            '+' => Tok::Plus,
            '-' => Tok::Minus,
            '*' => Tok::Star,
            '/' => Tok::Slash,
            '^' => Tok::Caret,
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            '[' => Tok::LBracket,
            ']' => Tok::RBracket,
            ',' => Tok::Comma,
            '?' => Tok::Question,
            other => return Err(syntax(tl, tc, format!("unexpected character `{other}`"))),
        };
        bump(&mut it);
        out.push(Spanned { tok, line: tl, col: tc });
    }
    Ok(out)
}

struct Parser<'a> {
    tokens: Vec<Spanned>,
    pos: usize,
    ctx: &'a ParseContext,
    solvables: Vec<Name>,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&Tok> {
        self.tokens.get(self.pos).map(|s| &s.tok)
    }

    fn here(&self) -> (usize, usize) {
        self.tokens
            .get(self.pos.min(self.tokens.len().saturating_sub(1)))
            .map(|s| (s.line, s.col))
            .unwrap_or((1, 1))
    }

    fn next(&mut self) -> Option<Tok> {
        let t = self.tokens.get(self.pos).map(|s| s.tok.clone());
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn eat(&mut self, t: &Tok) -> bool {
        if self.peek() == Some(t) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, t: Tok, what: &str) -> Result<()> {
        if self.eat(&t) {
            Ok(())
        } else {
            let (l, c) = self.here();
            Err(syntax(l, c, format!("expected {what}")))
        }
    }

    fn expect_end(&self) -> Result<()> {
        if self.pos == self.tokens.len() {
            Ok(())
        } else {
            let (l, c) = self.here();
            Err(syntax(l, c, "unexpected trailing input"))
        }
    }

    fn expression(&mut self) -> Result<Expr> {
        let mut terms = Vec::new();
        let mut negate = false;
        // Optional leading sign.
        loop {
            if self.eat(&Tok::Minus) {
                negate = !negate;
            } else if self.eat(&Tok::Plus) {
            } else {
                break;
            }
        }
        let first = self.term()?;
        terms.push(if negate { -first } else { first });
        loop {
            if self.eat(&Tok::Plus) {
                terms.push(self.term()?);
            } else if self.eat(&Tok::Minus) {
                terms.push(-self.term()?);
            } else {
                break;
            }
        }
        Ok(if terms.len() == 1 {
            terms.pop().unwrap()
        } else {
            Expr::Sum(terms)
        })
    }

    fn term(&mut self) -> Result<Expr> {
        let mut acc = self.signed_power()?;
        loop {
            if self.eat(&Tok::Star) {
                acc = acc * self.signed_power()?;
            } else if self.eat(&Tok::Slash) {
                acc = acc * self.signed_power()?.pow(-1);
            } else {
                break;
            }
        }
        Ok(acc)
    }

    fn signed_power(&mut self) -> Result<Expr> {
        let mut negate = false;
        loop {
            if self.eat(&Tok::Minus) {
                negate = !negate;
            } else if self.eat(&Tok::Plus) {
            } else {
                break;
            }
        }
        let p = self.power()?;
        Ok(if negate { -p } else { p })
    }

    fn power(&mut self) -> Result<Expr> {
        let base = self.primary()?;
        if self.eat(&Tok::Caret) {
            let k = self.exponent()?;
            Ok(base.pow(k))
        } else {
            Ok(base)
        }
    }

    fn exponent(&mut self) -> Result<i32> {
        let (l, c) = self.here();
        let parenthesized = self.eat(&Tok::LParen);
        let negative = self.eat(&Tok::Minus);
        let k = match self.next() {
            Some(Tok::Num(n)) => i32::try_from(&n)
                .map_err(|_| syntax(l, c, "exponent out of range"))?,
            _ => return Err(syntax(l, c, "expected integer exponent")),
        };
        if parenthesized {
            self.expect(Tok::RParen, "`)` after exponent")?;
        }
        Ok(if negative { -k } else { k })
    }

    fn primary(&mut self) -> Result<Expr> {
        let (l, c) = self.here();
        match self.next() {
            Some(Tok::Num(n)) => Ok(Expr::Num(BigRational::from_integer(n))),
            Some(Tok::LParen) => {
                let e = self.expression()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(e)
            }
            Some(Tok::Question) => {
                if !self.ctx.allow_solvables {
                    return Err(syntax(l, c, "solvable constants are not permitted here"));
                }
                match self.next() {
                    Some(Tok::Ident { base, suffix: None }) => {
                        let n: Name = name(&format!("?{base}"));
                        if !self.solvables.contains(&n) {
                            self.solvables.push(n.clone());
                        }
                        Ok(Expr::Atom(Atom::Param(n)))
                    }
                    _ => Err(syntax(l, c, "expected name after `?`")),
                }
            }
            Some(Tok::Ident { base, suffix }) => self.ident(base, suffix, l, c),
            _ => Err(syntax(l, c, "expected an expression")),
        }
    }

    fn jet_order_suffix(&self, base: &str, suffix: Suffix, l: usize, c: usize) -> Result<u32> {
        match suffix {
            Suffix::Xs(k) => Ok(k),
            Suffix::Digits(k) => Ok(k),
            Suffix::T => Err(syntax(
                l,
                c,
                format!("`{base}_t` may only appear as an equation left-hand side"),
            )),
        }
    }

    fn is_jet_base(&self, base: &str) -> bool {
        base == &*self.ctx.dep || (self.ctx.allow_v && base == "v")
    }

    fn ident(&mut self, base: String, suffix: Option<Suffix>, l: usize, c: usize) -> Result<Expr> {
        if let Some(sfx) = suffix {
            if self.is_jet_base(&base) {
                let k = self.jet_order_suffix(&base, sfx, l, c)?;
                return Ok(Expr::jet(&base, k));
            }
            if matches!(sfx, Suffix::T) {
                return Err(syntax(
                    l,
                    c,
                    format!("`{base}_t` may only appear as an equation left-hand side"),
                ));
            }
            return Err(Error::UnknownSymbol(base));
        }
        // exp(...)
        if base == "exp" && self.peek() == Some(&Tok::LParen) {
            self.next();
            let arg = self.expression()?;
            self.expect(Tok::RParen, "`)` after exp argument")?;
            let nf = normalize(&arg)?;
            if !nf.has_trivial_denominator() || nf.numerator().has_exp() {
                return Err(Error::BadExponentialArgument);
            }
            if nf.is_zero() {
                return Ok(Expr::one());
            }
            return Ok(Expr::Atom(Atom::Exp(Arc::new(nf.numerator().clone()))));
        }
        // D[name, dirs...]
        if base == "D" && self.peek() == Some(&Tok::LBracket) {
            return self.formal_partial(l, c);
        }
        if base == "x" {
            return Ok(Expr::x());
        }
        if base == "t" {
            return Ok(Expr::t());
        }
        if self.is_jet_base(&base) {
            if self.eat(&Tok::LBracket) {
                let (l2, c2) = self.here();
                let k = match self.next() {
                    Some(Tok::Num(n)) => u32::try_from(&n)
                        .map_err(|_| syntax(l2, c2, "jet order out of range"))?,
                    _ => return Err(syntax(l2, c2, "expected jet order")),
                };
                self.expect(Tok::RBracket, "`]` after jet order")?;
                return Ok(Expr::jet(&base, k));
            }
            return Ok(Expr::jet(&base, 0));
        }
        let n = name(&base);
        if self.ctx.params.contains(&n) {
            return Ok(Expr::Atom(Atom::Param(n)));
        }
        if let Some(sig) = self.ctx.unknowns.get(&n) {
            return Ok(Expr::Atom(Atom::Unknown(UnknownAtom {
                sig: sig.clone(),
                partials: Partials::none(),
            })));
        }
        Err(Error::UnknownSymbol(base))
    }

    fn formal_partial(&mut self, l: usize, c: usize) -> Result<Expr> {
        self.expect(Tok::LBracket, "`[` after D")?;
        let (ln, cn) = self.here();
        let fname = match self.next() {
            Some(Tok::Ident { base, suffix: None }) => base,
            _ => return Err(syntax(ln, cn, "expected unknown-function name in D[...]")),
        };
        let sig = self
            .ctx
            .unknowns
            .get(&name(&fname))
            .cloned()
            .ok_or(Error::UnknownSymbol(fname))?;
        let mut partials = Partials::none();
        while self.eat(&Tok::Comma) {
            let (ld, cd) = self.here();
            match self.next() {
                Some(Tok::Ident { base, suffix }) => {
                    let dir = if base == "x" && suffix.is_none() {
                        Dir::X
                    } else if base == "t" && suffix.is_none() {
                        Dir::T
                    } else if base == &*sig.dep {
                        match suffix {
                            None => Dir::Jet(0),
                            Some(s) => Dir::Jet(self.jet_order_suffix(&base, s, ld, cd)?),
                        }
                    } else {
                        return Err(syntax(ld, cd, "expected x, t, or a jet direction"));
                    };
                    partials = partials.with(dir);
                }
                _ => return Err(syntax(ld, cd, "expected a derivative direction")),
            }
        }
        self.expect(Tok::RBracket, "`]` closing D[...]")?;
        if partials.is_empty() {
            return Err(syntax(l, c, "D[...] needs at least one direction"));
        }
        Ok(Expr::Atom(Atom::Unknown(UnknownAtom { sig, partials })))
    }
}
