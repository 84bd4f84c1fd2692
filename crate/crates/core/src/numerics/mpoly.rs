//! Exact integer polynomials in the symbols `a`, `b`, `k`, `R`.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use super::bigreal::{BigReal, Precision};

pub const VAR_NAMES: [&str; 4] = ["a", "b", "k", "R"];

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Var {
    A = 0,
    B = 1,
    K = 2,
    R = 3,
}

type Exps = [u32; 4];

#[derive(Clone, Default, PartialEq, Eq)]
pub struct MPoly {
    terms: BTreeMap<Exps, i128>,
}

impl MPoly {
    pub fn zero() -> Self {
        MPoly::default()
    }

    pub fn constant(c: i128) -> Self {
        let mut p = MPoly::zero();
        if c != 0 {
            p.terms.insert([0; 4], c);
        }
        p
    }

    pub fn var(v: Var) -> Self {
        let mut e = [0; 4];
        e[v as usize] = 1;
        MPoly { terms: BTreeMap::from([(e, 1)]) }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Exps, &i128)> {
        self.terms.iter()
    }

    pub fn scale(&self, c: i128) -> Self {
        if c == 0 {
            return MPoly::zero();
        }
        MPoly { terms: self.terms.iter().map(|(e, v)| (*e, v * c)).collect() }
    }

    fn add_term(&mut self, e: Exps, c: i128) {
        let slot = self.terms.entry(e).or_insert(0);
        *slot += c;
        if *slot == 0 {
            self.terms.remove(&e);
        }
    }

    /// Highest power of `v`.
    pub fn degree_in(&self, v: Var) -> u32 {
        self.terms.keys().map(|e| e[v as usize]).max().unwrap_or(0)
    }

    /// Largest power of `v` dividing every term.
    pub fn min_power(&self, v: Var) -> u32 {
        self.terms.keys().map(|e| e[v as usize]).min().unwrap_or(0)
    }

    /// Divides by `v^p`; `p` must not exceed [`MPoly::min_power`].
    pub fn divide_power(&self, v: Var, p: u32) -> Self {
        assert!(p <= self.min_power(v), "monomial division leaves a remainder");
        MPoly {
            terms: self
                .terms
                .iter()
                .map(|(e, c)| {
                    let mut e = *e;
                    e[v as usize] -= p;
                    (e, *c)
                })
                .collect(),
        }
    }

    fn content(&self) -> i128 {
        fn gcd(a: i128, b: i128) -> i128 {
            if b == 0 {
                a.abs()
            } else {
                gcd(b, a % b)
            }
        }
        self.terms.values().fold(0, |g, c| gcd(g, *c))
    }

    /// Canonical representative up to a nonzero constant and monomial factor:
    /// monomial factors removed, content divided out, and the leading term
    /// (in lexicographic exponent order) positive.
    pub fn normalized(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let mut p = self.clone();
        for v in [Var::A, Var::B, Var::K, Var::R] {
            p = p.divide_power(v, p.min_power(v));
        }
        let g = p.content();
        let sign = p.terms.values().next_back().map_or(1, |c| c.signum());
        MPoly { terms: p.terms.into_iter().map(|(e, c)| (e, c / g * sign)).collect() }
    }

    /// Substitutes numbers for `b` and `k`, leaving a polynomial in `(a, R)`.
    pub fn substitute_bk(&self, b: &BigReal, k: i64) -> BiPoly {
        let prec = b.prec();
        let mut out: BTreeMap<(u32, u32), BigReal> = BTreeMap::new();
        for (e, c) in &self.terms {
            let v = big_i128(*c, prec)
                * b.powi(e[1] as i32)
                * BigReal::from_i64(k, prec).powi(e[2] as i32);
            let slot = out.entry((e[0], e[3])).or_insert_with(|| BigReal::zero(prec));
            *slot += &v;
        }
        BiPoly { terms: out.into_iter().filter(|(_, c)| !c.is_zero()).collect(), prec }
    }

    /// Value at numeric `(a, b, k, R)`.
    pub fn eval(&self, vals: [&BigReal; 4]) -> BigReal {
        let prec = vals[0].prec();
        let mut acc = BigReal::zero(prec);
        for (e, c) in &self.terms {
            let mut t = big_i128(*c, prec);
            for (i, v) in vals.iter().enumerate() {
                if e[i] > 0 {
                    t = t * v.powi(e[i] as i32);
                }
            }
            acc += &t;
        }
        acc
    }

    /// Determinant by cofactor expansion along the first column; cheap for
    /// the sparse banded matrices used here.
    pub fn determinant(m: &[Vec<MPoly>]) -> MPoly {
        let n = m.len();
        if n == 0 {
            return MPoly::constant(1);
        }
        if n == 1 {
            return m[0][0].clone();
        }
        let mut acc = MPoly::zero();
        for i in 0..n {
            if m[i][0].is_zero() {
                continue;
            }
            let minor: Vec<Vec<MPoly>> = m
                .iter()
                .enumerate()
                .filter(|(r, _)| *r != i)
                .map(|(_, row)| row[1..].to_vec())
                .collect();
            let term = &m[i][0] * &MPoly::determinant(&minor);
            acc = if i % 2 == 0 { &acc + &term } else { &acc - &term };
        }
        acc
    }
}

impl std::str::FromStr for MPoly {
    type Err = crate::error::Error;

    /// Parses integer-coefficient expressions in `a`, `b`, `k`, `R` with
    /// `+ - * ^`, parentheses and implicit multiplication, e.g.
    /// `a (a^2 - 4 b (2k - 1))`.
    fn from_str(s: &str) -> crate::error::Result<Self> {
        let tokens = tokenize(s)?;
        let mut p = Parser { tokens, pos: 0 };
        let e = p.expr()?;
        if p.pos != p.tokens.len() {
            return Err(parse_err(s, "trailing input"));
        }
        Ok(e)
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(i128),
    Var(Var),
    Op(char),
}

fn parse_err(s: &str, why: &str) -> crate::error::Error {
    crate::error::Error::Parse(format!("polynomial `{s}`: {why}"))
}

fn tokenize(s: &str) -> crate::error::Result<Vec<Tok>> {
    let mut out = Vec::new();
    let mut chars = s.chars().peekable();
    while let Some(&c) = chars.peek() {
        match c {
            ' ' | '\t' => {
                chars.next();
            }
            '0'..='9' => {
                let mut v: i128 = 0;
                while let Some(d) = chars.peek().and_then(|c| c.to_digit(10)) {
                    v = v
                        .checked_mul(10)
                        .and_then(|v| v.checked_add(i128::from(d)))
                        .ok_or_else(|| parse_err(s, "integer overflow"))?;
                    chars.next();
                }
                out.push(Tok::Num(v));
            }
            'a' | 'b' | 'k' | 'R' => {
                chars.next();
                out.push(Tok::Var(match c {
                    'a' => Var::A,
                    'b' => Var::B,
                    'k' => Var::K,
                    _ => Var::R,
                }));
            }
            '+' | '-' | '*' | '^' | '(' | ')' => {
                chars.next();
                out.push(Tok::Op(c));
            }
            _ => return Err(parse_err(s, &format!("unexpected `{c}`"))),
        }
    }
    Ok(out)
}

struct Parser {
    tokens: Vec<Tok>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.tokens.get(self.pos)
    }

    fn err(&self, why: &str) -> crate::error::Error {
        crate::error::Error::Parse(format!("polynomial: {why} at token {}", self.pos))
    }

    fn expr(&mut self) -> crate::error::Result<MPoly> {
        let mut acc = self.term()?;
        while let Some(Tok::Op(c @ ('+' | '-'))) = self.peek().cloned() {
            self.pos += 1;
            let t = self.term()?;
            acc = if c == '+' { &acc + &t } else { &acc - &t };
        }
        Ok(acc)
    }

    fn term(&mut self) -> crate::error::Result<MPoly> {
        let mut acc = self.unary()?;
        loop {
            match self.peek() {
                Some(Tok::Op('*')) => {
                    self.pos += 1;
                    acc = &acc * &self.unary()?;
                }
                Some(Tok::Num(_) | Tok::Var(_) | Tok::Op('(')) => acc = &acc * &self.power()?,
                _ => return Ok(acc),
            }
        }
    }

    fn unary(&mut self) -> crate::error::Result<MPoly> {
        if self.peek() == Some(&Tok::Op('-')) {
            self.pos += 1;
            return Ok(-&self.unary()?);
        }
        self.power()
    }

    fn power(&mut self) -> crate::error::Result<MPoly> {
        let base = self.atom()?;
        if self.peek() != Some(&Tok::Op('^')) {
            return Ok(base);
        }
        self.pos += 1;
        let Some(Tok::Num(e)) = self.peek().cloned() else {
            return Err(self.err("exponent must be an integer"));
        };
        self.pos += 1;
        let mut out = MPoly::constant(1);
        for _ in 0..e {
            out = &out * &base;
        }
        Ok(out)
    }

    fn atom(&mut self) -> crate::error::Result<MPoly> {
        let tok = self.peek().cloned().ok_or_else(|| self.err("unexpected end"))?;
        self.pos += 1;
        match tok {
            Tok::Num(v) => Ok(MPoly::constant(v)),
            Tok::Var(v) => Ok(MPoly::var(v)),
            Tok::Op('(') => {
                let e = self.expr()?;
                if self.peek() != Some(&Tok::Op(')')) {
                    return Err(self.err("missing `)`"));
                }
                self.pos += 1;
                Ok(e)
            }
            _ => Err(self.err("unexpected operator")),
        }
    }
}

fn big_i128(c: i128, prec: Precision) -> BigReal {
    BigReal::parse(&c.to_string(), prec).expect("integer literal")
}

impl Add for &MPoly {
    type Output = MPoly;
    fn add(self, rhs: &MPoly) -> MPoly {
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(*e, *c);
        }
        out
    }
}

impl Sub for &MPoly {
    type Output = MPoly;
    fn sub(self, rhs: &MPoly) -> MPoly {
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(*e, -*c);
        }
        out
    }
}

impl Neg for &MPoly {
    type Output = MPoly;
    fn neg(self) -> MPoly {
        self.scale(-1)
    }
}

impl Mul for &MPoly {
    type Output = MPoly;
    fn mul(self, rhs: &MPoly) -> MPoly {
        let mut out = MPoly::zero();
        for (e1, c1) in &self.terms {
            for (e2, c2) in &rhs.terms {
                let e = [e1[0] + e2[0], e1[1] + e2[1], e1[2] + e2[2], e1[3] + e2[3]];
                out.add_term(e, c1 * c2);
            }
        }
        out
    }
}

macro_rules! owned_ops {
    ($($trait:ident $method:ident),*) => {$(
        impl $trait<MPoly> for MPoly {
            type Output = MPoly;
            fn $method(self, rhs: MPoly) -> MPoly {
                (&self).$method(&rhs)
            }
        }
        impl $trait<&MPoly> for MPoly {
            type Output = MPoly;
            fn $method(self, rhs: &MPoly) -> MPoly {
                (&self).$method(rhs)
            }
        }
    )*};
}

owned_ops!(Add add, Sub sub, Mul mul);

impl From<i128> for MPoly {
    fn from(c: i128) -> Self {
        MPoly::constant(c)
    }
}

impl fmt::Display for MPoly {
    /// Terms by descending degree in `a`, e.g. `a^4 - 20 a^2 b k + 36 b^2 k^2 - 36 b^2`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let mut first = true;
        for (e, c) in self.terms.iter().rev() {
            let (sign, mag) = if *c < 0 { ("-", -c) } else { ("+", *c) };
            if first {
                if sign == "-" {
                    f.write_str("-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            first = false;
            let mut parts = Vec::new();
            for (i, p) in e.iter().enumerate() {
                match p {
                    0 => {}
                    1 => parts.push(VAR_NAMES[i].to_string()),
                    _ => parts.push(format!("{}^{}", VAR_NAMES[i], p)),
                }
            }
            if mag != 1 || parts.is_empty() {
                parts.insert(0, mag.to_string());
            }
            f.write_str(&parts.join(" "))?;
        }
        Ok(())
    }
}

impl fmt::Debug for MPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Numeric polynomial in `(a, R)`.
#[derive(Clone, Debug)]
pub struct BiPoly {
    terms: Vec<((u32, u32), BigReal)>,
    prec: Precision,
}

impl BiPoly {
    pub fn eval(&self, a: &BigReal, r: &BigReal) -> BigReal {
        let mut acc = BigReal::zero(self.prec);
        for ((i, j), c) in &self.terms {
            acc += &(c * &a.powi(*i as i32) * r.powi(*j as i32));
        }
        acc
    }

    /// Value and gradient `(∂/∂a, ∂/∂R)`.
    pub fn eval_grad(&self, a: &BigReal, r: &BigReal) -> (BigReal, BigReal, BigReal) {
        let mut v = BigReal::zero(self.prec);
        let mut da = BigReal::zero(self.prec);
        let mut dr = BigReal::zero(self.prec);
        for ((i, j), c) in &self.terms {
            let (i, j) = (*i as i32, *j as i32);
            v += &(c * &a.powi(i) * r.powi(j));
            if i > 0 {
                da += &(c.mul_i64(i64::from(i)) * a.powi(i - 1) * r.powi(j));
            }
            if j > 0 {
                dr += &(c.mul_i64(i64::from(j)) * a.powi(i) * r.powi(j - 1));
            }
        }
        (v, da, dr)
    }

    pub fn eval_f64(&self, a: f64, r: f64) -> (f64, f64, f64) {
        let mut v = 0.0;
        let mut da = 0.0;
        let mut dr = 0.0;
        for ((i, j), c) in &self.terms {
            let c = c.to_f64();
            let (i, j) = (*i as i32, *j as i32);
            v += c * a.powi(i) * r.powi(j);
            if i > 0 {
                da += c * f64::from(i) * a.powi(i - 1) * r.powi(j);
            }
            if j > 0 {
                dr += c * f64::from(j) * a.powi(i) * r.powi(j - 1);
            }
        }
        (v, da, dr)
    }

    pub fn eval_abs_f64(&self, a: f64, r: f64) -> f64 {
        self.terms
            .iter()
            .map(|((i, j), c)| c.to_f64().abs() * a.abs().powi(*i as i32) * r.abs().powi(*j as i32))
            .sum()
    }

    /// Scale for judging residuals: `Σ |c| |a|^i |R|^j`.
    pub fn eval_abs(&self, a: &BigReal, r: &BigReal) -> BigReal {
        let mut acc = BigReal::zero(self.prec);
        for ((i, j), c) in &self.terms {
            acc += &(c.abs() * a.abs().powi(*i as i32) * r.abs().powi(*j as i32));
        }
        acc
    }
}
