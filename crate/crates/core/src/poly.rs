//! Exact multivariate polynomials over the rationals in named chart coordinates.
//!
//! A [`Poly`] is kept in canonical form at all times: a sparse map from
//! exponent vectors to nonzero rationals. Equality of two polynomials is
//! therefore structural equality, and `is_zero` is emptiness of the map.

use std::cell::Cell;
use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Rational coefficient type.
pub type Rational = BigRational;

/// A coordinate chart: an ordered list of distinct coordinate names.
///
/// `dim == 0` is allowed and models a point (Lie bialgebras).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Chart {
    names: Vec<String>,
}

impl Chart {
    pub fn new<S: Into<String>>(names: impl IntoIterator<Item = S>) -> Result<Arc<Chart>> {
        let names: Vec<String> = names.into_iter().map(Into::into).collect();
        for (i, n) in names.iter().enumerate() {
            if !is_identifier(n) {
                return Err(Error::Parse {
                    message: format!("invalid coordinate name `{n}`"),
                    offset: 0,
                });
            }
            if names[..i].contains(n) {
                return Err(Error::DuplicateCoordinate(n.clone()));
            }
        }
        Ok(Arc::new(Chart { names }))
    }

    /// The chart of a point.
    pub fn point() -> Arc<Chart> {
        Arc::new(Chart { names: Vec::new() })
    }

    pub fn dim(&self) -> usize {
        self.names.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, i: usize) -> &str {
        &self.names[i]
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    /// Chart obtained by appending further coordinates after these ones.
    pub fn extended<S: Into<String>>(
        &self,
        extra: impl IntoIterator<Item = S>,
    ) -> Result<Arc<Chart>> {
        Chart::new(
            self.names
                .iter()
                .cloned()
                .chain(extra.into_iter().map(Into::into)),
        )
    }
}

fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_alphanumeric() || c == '_' || c == '\'')
}

/// Bounds on polynomial growth.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Limits {
    /// Maximal total degree of any monomial.
    pub max_degree: u32,
    /// Maximal bit length of numerators and denominators.
    pub max_coeff_bits: u64,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            max_degree: 24,
            max_coeff_bits: 4096,
        }
    }
}

/// Panic payload raised when a guarded computation exceeds its [`Limits`].
///
/// Only raised inside [`with_limits`]; callers that install a guard are
/// expected to catch it with `std::panic::catch_unwind`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ResourceExceeded {
    pub what: String,
}

thread_local! {
    static GUARD: Cell<Option<Limits>> = const { Cell::new(None) };
}

/// Run `f` with polynomial growth guarded by `limits` on this thread.
///
/// Exceeding the bound unwinds with a [`ResourceExceeded`] payload.
pub fn with_limits<T>(limits: Limits, f: impl FnOnce() -> T) -> T {
    struct Reset(Option<Limits>);
    impl Drop for Reset {
        fn drop(&mut self) {
            GUARD.with(|g| g.set(self.0));
        }
    }
    let prev = GUARD.with(|g| g.replace(Some(limits)));
    let _reset = Reset(prev);
    f()
}

fn guard_degree(deg: u32) {
    if let Some(lim) = GUARD.with(|g| g.get()) {
        if deg > lim.max_degree {
            std::panic::panic_any(ResourceExceeded {
                what: format!("monomial degree {deg} exceeds bound {}", lim.max_degree),
            });
        }
    }
}

/// Exponent vector, ordered graded-lexicographically.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Monomial(Vec<u32>);

impl Monomial {
    pub fn one(nvars: usize) -> Self {
        Monomial(vec![0; nvars])
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    fn mul(&self, other: &Monomial) -> Monomial {
        let exps: Vec<u32> = self
            .0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| a.checked_add(*b).expect("exponent overflow"))
            .collect();
        let m = Monomial(exps);
        guard_degree(m.degree());
        m
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Multivariate polynomial with exact rational coefficients.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Poly {
    nvars: usize,
    terms: BTreeMap<Monomial, Rational>,
}

impl Poly {
    pub fn zero(nvars: usize) -> Self {
        Poly {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(nvars: usize) -> Self {
        Self::constant(nvars, Rational::one())
    }

    pub fn constant(nvars: usize, c: Rational) -> Self {
        let mut p = Poly::zero(nvars);
        if !c.is_zero() {
            p.terms.insert(Monomial::one(nvars), c);
        }
        p
    }

    pub fn integer(nvars: usize, c: i64) -> Self {
        Self::constant(nvars, Rational::from_integer(BigInt::from(c)))
    }

    pub fn ratio(nvars: usize, num: i64, den: i64) -> Self {
        Self::constant(nvars, Rational::new(BigInt::from(num), BigInt::from(den)))
    }

    /// The coordinate function `x_i`.
    pub fn var(nvars: usize, i: usize) -> Self {
        assert!(
            i < nvars,
            "variable index {i} out of range for {nvars} variables"
        );
        let mut e = vec![0; nvars];
        e[i] = 1;
        let mut p = Poly::zero(nvars);
        p.terms.insert(Monomial(e), Rational::one());
        p
    }

    pub fn monomial(coeff: Rational, exps: Vec<u32>) -> Self {
        let nvars = exps.len();
        let mut p = Poly::zero(nvars);
        if !coeff.is_zero() {
            let m = Monomial(exps);
            guard_degree(m.degree());
            p.terms.insert(m, coeff);
        }
        p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Total degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().map(Monomial::degree).max()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Rational)> {
        self.terms.iter()
    }

    /// The constant value if this polynomial has no variable terms.
    pub fn as_constant(&self) -> Option<Rational> {
        match self.terms.len() {
            0 => Some(Rational::zero()),
            1 => {
                let (m, c) = self.terms.iter().next().unwrap();
                (m.degree() == 0).then(|| c.clone())
            }
            _ => None,
        }
    }

    pub fn scale(&self, c: &Rational) -> Poly {
        if c.is_zero() {
            return Poly::zero(self.nvars);
        }
        Poly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(m, v)| (m.clone(), v * c)).collect(),
        }
    }

    pub fn scale_int(&self, c: i64) -> Poly {
        self.scale(&Rational::from_integer(BigInt::from(c)))
    }

    fn add_term(&mut self, m: Monomial, c: Rational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    /// Formal partial derivative with respect to coordinate `i`.
    pub fn partial(&self, i: usize) -> Poly {
        assert!(i < self.nvars, "coordinate index {i} out of range");
        let mut out = Poly::zero(self.nvars);
        for (m, c) in &self.terms {
            let e = m.0[i];
            if e == 0 {
                continue;
            }
            let mut exps = m.0.clone();
            exps[i] -= 1;
            out.terms
                .insert(Monomial(exps), c * Rational::from_integer(BigInt::from(e)));
        }
        out
    }

    /// Checked variant of [`Poly::partial`].
    pub fn try_partial(&self, i: usize) -> Result<Poly> {
        if i >= self.nvars {
            return Err(Error::IndexOutOfRange {
                index: i,
                bound: self.nvars,
            });
        }
        Ok(self.partial(i))
    }

    pub fn pow(&self, n: u32) -> Poly {
        let mut acc = Poly::one(self.nvars);
        for _ in 0..n {
            acc = &acc * self;
        }
        acc
    }

    /// Re-express in a chart with `nvars` variables whose first
    /// `self.nvars()` coordinates are this chart's, starting at `offset`.
    pub fn embed(&self, nvars: usize, offset: usize) -> Poly {
        assert!(offset + self.nvars <= nvars);
        let mut out = Poly::zero(nvars);
        for (m, c) in &self.terms {
            let mut e = vec![0; nvars];
            e[offset..offset + self.nvars].copy_from_slice(&m.0);
            out.terms.insert(Monomial(e), c.clone());
        }
        out
    }

    /// Inverse of [`Poly::embed`]: `None` if a variable outside the window occurs.
    pub fn restrict(&self, nvars: usize, offset: usize) -> Option<Poly> {
        let mut out = Poly::zero(nvars);
        for (m, c) in &self.terms {
            let outside =
                m.0.iter()
                    .enumerate()
                    .any(|(i, e)| *e != 0 && (i < offset || i >= offset + nvars));
            if outside {
                return None;
            }
            out.terms
                .insert(Monomial(m.0[offset..offset + nvars].to_vec()), c.clone());
        }
        Some(out)
    }

    /// Largest numerator/denominator bit length among the coefficients.
    pub fn coeff_bits(&self) -> u64 {
        self.terms
            .values()
            .map(|c| c.numer().bits().max(c.denom().bits()))
            .max()
            .unwrap_or(0)
    }

    pub fn check_limits(&self, limits: &Limits) -> Result<()> {
        if let Some(d) = self.degree() {
            if d > limits.max_degree {
                return Err(Error::ExponentBound {
                    degree: d,
                    bound: limits.max_degree,
                });
            }
        }
        let bits = self.coeff_bits();
        if bits > limits.max_coeff_bits {
            return Err(Error::CoefficientBound {
                bits,
                bound: limits.max_coeff_bits,
            });
        }
        Ok(())
    }

    /// Deterministic rendering in decreasing graded-lex order.
    pub fn render(&self, names: &[String]) -> String {
        if self.terms.is_empty() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (k, (m, c)) in self.terms.iter().rev().enumerate() {
            let neg = c.is_negative();
            let abs = c.abs();
            if k == 0 {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            let mut factors: Vec<String> = Vec::new();
            for (i, e) in m.0.iter().enumerate() {
                let name = names.get(i).cloned().unwrap_or_else(|| format!("x{i}"));
                match e {
                    0 => {}
                    1 => factors.push(name),
                    _ => factors.push(format!("{name}^{e}")),
                }
            }
            let coeff = if abs.is_integer() {
                abs.numer().to_string()
            } else {
                format!("{}/{}", abs.numer(), abs.denom())
            };
            if factors.is_empty() {
                out.push_str(&coeff);
            } else {
                if !abs.is_one() {
                    out.push_str(&coeff);
                    out.push('*');
                }
                out.push_str(&factors.join("*"));
            }
        }
        out
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Poly({})", self.render(&[]))
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render(&[]))
    }
}

impl<'a> Add<&'a Poly> for &'a Poly {
    type Output = Poly;
    fn add(self, rhs: &'a Poly) -> Poly {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl<'a> Sub<&'a Poly> for &'a Poly {
    type Output = Poly;
    fn sub(self, rhs: &'a Poly) -> Poly {
        let mut out = self.clone();
        out -= rhs;
        out
    }
}

impl<'a> Mul<&'a Poly> for &'a Poly {
    type Output = Poly;
    fn mul(self, rhs: &'a Poly) -> Poly {
        assert_eq!(
            self.nvars, rhs.nvars,
            "polynomials live on different charts"
        );
        let mut out = Poly::zero(self.nvars);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                out.add_term(ma.mul(mb), ca * cb);
            }
        }
        out
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }
}

impl Neg for Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        -&self
    }
}

impl AddAssign<&Poly> for Poly {
    fn add_assign(&mut self, rhs: &Poly) {
        assert_eq!(
            self.nvars, rhs.nvars,
            "polynomials live on different charts"
        );
        for (m, c) in &rhs.terms {
            self.add_term(m.clone(), c.clone());
        }
    }
}

impl SubAssign<&Poly> for Poly {
    fn sub_assign(&mut self, rhs: &Poly) {
        assert_eq!(
            self.nvars, rhs.nvars,
            "polynomials live on different charts"
        );
        for (m, c) in &rhs.terms {
            self.add_term(m.clone(), -c.clone());
        }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $method:ident) => {
        impl $tr<Poly> for Poly {
            type Output = Poly;
            fn $method(self, rhs: Poly) -> Poly {
                (&self).$method(&rhs)
            }
        }
        impl<'a> $tr<&'a Poly> for Poly {
            type Output = Poly;
            fn $method(self, rhs: &'a Poly) -> Poly {
                (&self).$method(rhs)
            }
        }
        impl<'a> $tr<Poly> for &'a Poly {
            type Output = Poly;
            fn $method(self, rhs: Poly) -> Poly {
                self.$method(&rhs)
            }
        }
    };
}

forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

// ---------------------------------------------------------------------------
// Expression trees and parsing
// ---------------------------------------------------------------------------

/// Raw (uncanonicalized) polynomial expression.
#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Int(BigInt),
    Var(String, usize),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>, usize),
    Neg(Box<Expr>),
    Pow(Box<Expr>, u32),
}

/// Reduce an expression tree to canonical form.
pub fn canonicalize(e: &Expr, chart: &Chart, limits: &Limits) -> Result<Poly> {
    let n = chart.dim();
    let p = match e {
        Expr::Int(i) => Poly::constant(n, Rational::from_integer(i.clone())),
        Expr::Var(name, _) => match chart.index_of(name) {
            Some(i) => Poly::var(n, i),
            None => return Err(Error::UnknownVariable(name.clone())),
        },
        Expr::Add(a, b) => canonicalize(a, chart, limits)? + canonicalize(b, chart, limits)?,
        Expr::Sub(a, b) => canonicalize(a, chart, limits)? - canonicalize(b, chart, limits)?,
        Expr::Mul(a, b) => {
            let pa = canonicalize(a, chart, limits)?;
            let pb = canonicalize(b, chart, limits)?;
            let bound = pa.degree().unwrap_or(0) + pb.degree().unwrap_or(0);
            if bound > limits.max_degree && !pa.is_zero() && !pb.is_zero() {
                return Err(Error::ExponentBound {
                    degree: bound,
                    bound: limits.max_degree,
                });
            }
            pa * pb
        }
        Expr::Div(a, b, offset) => {
            let pa = canonicalize(a, chart, limits)?;
            let pb = canonicalize(b, chart, limits)?;
            match pb.as_constant() {
                Some(c) if c.is_zero() => {
                    return Err(Error::Parse {
                        message: "division by zero".into(),
                        offset: *offset,
                    })
                }
                Some(c) => pa.scale(&c.recip()),
                None => {
                    return Err(Error::Parse {
                        message: "division by a non-constant polynomial".into(),
                        offset: *offset,
                    })
                }
            }
        }
        Expr::Neg(a) => -canonicalize(a, chart, limits)?,
        Expr::Pow(a, k) => {
            let pa = canonicalize(a, chart, limits)?;
            let d = pa.degree().unwrap_or(0) as u64 * *k as u64;
            if d > limits.max_degree as u64 {
                return Err(Error::ExponentBound {
                    degree: d.min(u32::MAX as u64) as u32,
                    bound: limits.max_degree,
                });
            }
            pa.pow(*k)
        }
    };
    p.check_limits(limits)?;
    Ok(p)
}

/// Parse a polynomial string (`integers`, `a/b`, variables, `+ - * ^`, parentheses).
pub fn parse_expr(src: &str) -> Result<Expr> {
    let tokens = tokenize(src)?;
    let mut p = Parser {
        tokens,
        pos: 0,
        len: src.len(),
    };
    let e = p.expr()?;
    if let Some((tok, off)) = p.tokens.get(p.pos) {
        return Err(Error::Parse {
            message: format!("unexpected `{tok}`"),
            offset: *off,
        });
    }
    Ok(e)
}

/// Parse and canonicalize in one step.
pub fn parse_poly(src: &str, chart: &Chart, limits: &Limits) -> Result<Poly> {
    canonicalize(&parse_expr(src)?, chart, limits)
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(BigInt),
    Ident(String),
    Sym(char),
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Num(n) => write!(f, "{n}"),
            Tok::Ident(s) => f.write_str(s),
            Tok::Sym(c) => write!(f, "{c}"),
        }
    }
}

fn tokenize(src: &str) -> Result<Vec<(Tok, usize)>> {
    let mut out = Vec::new();
    let chars: Vec<(usize, char)> = src.char_indices().collect();
    let mut i = 0;
    while i < chars.len() {
        let (off, c) = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].1.is_ascii_digit() {
                i += 1;
            }
            let s: String = chars[start..i].iter().map(|(_, c)| *c).collect();
            out.push((Tok::Num(s.parse().expect("digits")), off));
        } else if c.is_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len()
                && (chars[i].1.is_alphanumeric() || chars[i].1 == '_' || chars[i].1 == '\'')
            {
                i += 1;
            }
            let s: String = chars[start..i].iter().map(|(_, c)| *c).collect();
            out.push((Tok::Ident(s), off));
        } else if "+-*/^()".contains(c) {
            out.push((Tok::Sym(c), off));
            i += 1;
        } else {
            return Err(Error::Parse {
                message: format!("unexpected character `{c}`"),
                offset: off,
            });
        }
    }
    Ok(out)
}

struct Parser {
    tokens: Vec<(Tok, usize)>,
    pos: usize,
    len: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.tokens.get(self.pos).map(|(t, _)| t)
    }

    fn offset(&self) -> usize {
        self.tokens
            .get(self.pos)
            .map(|(_, o)| *o)
            .unwrap_or(self.len)
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(&Tok::Sym(c)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        loop {
            if self.eat('+') {
                lhs = Expr::Add(Box::new(lhs), Box::new(self.term()?));
            } else if self.eat('-') {
                lhs = Expr::Sub(Box::new(lhs), Box::new(self.term()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.unary()?;
        loop {
            if self.eat('*') {
                lhs = Expr::Mul(Box::new(lhs), Box::new(self.unary()?));
            } else if self.peek() == Some(&Tok::Sym('/')) {
                let off = self.offset();
                self.pos += 1;
                lhs = Expr::Div(Box::new(lhs), Box::new(self.unary()?), off);
            } else {
                return Ok(lhs);
            }
        }
    }

    fn unary(&mut self) -> Result<Expr> {
        if self.eat('-') {
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        if self.eat('+') {
            return self.unary();
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr> {
        let base = self.atom()?;
        if self.eat('^') {
            let off = self.offset();
            match self.tokens.get(self.pos).cloned() {
                Some((Tok::Num(n), _)) => {
                    self.pos += 1;
                    let k = n.to_u32().ok_or(Error::Parse {
                        message: format!("exponent {n} too large"),
                        offset: off,
                    })?;
                    Ok(Expr::Pow(Box::new(base), k))
                }
                _ => Err(Error::Parse {
                    message: "expected a nonnegative integer exponent".into(),
                    offset: off,
                }),
            }
        } else {
            Ok(base)
        }
    }

    fn atom(&mut self) -> Result<Expr> {
        let off = self.offset();
        match self.tokens.get(self.pos).cloned() {
            Some((Tok::Num(n), _)) => {
                self.pos += 1;
                Ok(Expr::Int(n))
            }
            Some((Tok::Ident(s), o)) => {
                self.pos += 1;
                Ok(Expr::Var(s, o))
            }
            Some((Tok::Sym('('), _)) => {
                self.pos += 1;
                let e = self.expr()?;
                if !self.eat(')') {
                    return Err(Error::Parse {
                        message: "expected `)`".into(),
                        offset: self.offset(),
                    });
                }
                Ok(e)
            }
            Some((t, _)) => Err(Error::Parse {
                message: format!("unexpected `{t}`"),
                offset: off,
            }),
            None => Err(Error::Parse {
                message: "unexpected end of input".into(),
                offset: off,
            }),
        }
    }
}
