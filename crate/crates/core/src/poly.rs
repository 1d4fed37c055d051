//! Exact sparse polynomials over the integers in the two variables `n` and `t`.
//!
//! Every bracket in this crate is a polynomial in the color count `n`; the
//! total face color polynomial additionally carries the homological grading
//! variable `t`. Coefficients are arbitrary precision.

use std::collections::BTreeMap;
use std::fmt;
use std::iter::Sum;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Pow, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Exponent pair `(deg_n, deg_t)`.
pub type Exponents = (u32, u32);

#[derive(Clone, Default, PartialEq, Eq, Hash, Debug)]
pub struct IntPoly {
    // invariant: no zero coefficient is ever stored
    terms: BTreeMap<Exponents, BigInt>,
}

impl IntPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::constant(1)
    }

    pub fn constant(c: impl Into<BigInt>) -> Self {
        Self::monomial(c, 0, 0)
    }

    /// The variable `n`.
    pub fn n() -> Self {
        Self::monomial(1, 1, 0)
    }

    /// The variable `t`.
    pub fn t() -> Self {
        Self::monomial(1, 0, 1)
    }

    pub fn monomial(c: impl Into<BigInt>, deg_n: u32, deg_t: u32) -> Self {
        let c = c.into();
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert((deg_n, deg_t), c);
        }
        Self { terms }
    }

    /// Univariate polynomial in `n` from dense coefficients, lowest degree first.
    pub fn from_n_coeffs<C: Into<BigInt> + Clone>(coeffs: &[C]) -> Self {
        let mut p = Self::zero();
        for (k, c) in coeffs.iter().enumerate() {
            p.add_term((k as u32, 0), c.clone().into());
        }
        p
    }

    /// Builds a polynomial from arbitrary `(exponents, coefficient)` pairs,
    /// combining repeats.
    pub fn from_terms<I, C>(terms: I) -> Self
    where
        I: IntoIterator<Item = (Exponents, C)>,
        C: Into<BigInt>,
    {
        let mut p = Self::zero();
        for (e, c) in terms {
            p.add_term(e, c.into());
        }
        p
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

    pub fn coeff(&self, deg_n: u32, deg_t: u32) -> BigInt {
        self.terms.get(&(deg_n, deg_t)).cloned().unwrap_or_else(BigInt::zero)
    }

    /// Terms in canonical order: `(deg_n, deg_t)` descending.
    pub fn terms(&self) -> impl Iterator<Item = (Exponents, &BigInt)> + '_ {
        self.terms.iter().rev().map(|(e, c)| (*e, c))
    }

    pub fn degree_n(&self) -> Option<u32> {
        self.terms.keys().map(|e| e.0).max()
    }

    pub fn degree_t(&self) -> Option<u32> {
        self.terms.keys().map(|e| e.1).max()
    }

    /// True when no term involves `t`.
    pub fn is_univariate_n(&self) -> bool {
        self.terms.keys().all(|e| e.1 == 0)
    }

    fn add_term(&mut self, e: Exponents, c: BigInt) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&e) {
            Some(existing) => {
                *existing += c;
                if existing.is_zero() {
                    self.terms.remove(&e);
                }
            }
            None => {
                self.terms.insert(e, c);
            }
        }
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut acc = Self::one();
        for _ in 0..k {
            acc = &acc * self;
        }
        acc
    }

    /// Exact evaluation at integer points.
    pub fn eval(&self, n_val: i64, t_val: i64) -> BigInt {
        self.eval_big(&BigInt::from(n_val), &BigInt::from(t_val))
    }

    pub fn eval_big(&self, n_val: &BigInt, t_val: &BigInt) -> BigInt {
        let mut total = BigInt::zero();
        for (&(dn, dt), c) in &self.terms {
            let term: BigInt = c * Pow::pow(n_val, dn) * Pow::pow(t_val, dt);
            total += term;
        }
        total
    }

    /// Substitutes `t = t_val`, leaving a polynomial in `n`.
    pub fn at_t(&self, t_val: i64) -> Self {
        let t_val = BigInt::from(t_val);
        let mut p = Self::zero();
        for (&(dn, dt), c) in &self.terms {
            p.add_term((dn, 0), c * Pow::pow(&t_val, dt));
        }
        p
    }

    /// Coefficient of `t^i` as a polynomial in `n`.
    pub fn t_coefficient(&self, i: u32) -> Self {
        let mut p = Self::zero();
        for (&(dn, dt), c) in &self.terms {
            if dt == i {
                p.add_term((dn, 0), c.clone());
            }
        }
        p
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(JsonPoly::from(self)).expect("polynomial json")
    }

    pub fn from_json(v: &serde_json::Value) -> Result<Self, ParsePolyError> {
        let jp: JsonPoly = serde_json::from_value(v.clone()).map_err(|e| ParsePolyError::Json(e.to_string()))?;
        let mut p = Self::zero();
        for term in jp.terms {
            let c: BigInt = term
                .coeff
                .parse()
                .map_err(|_| ParsePolyError::Json(format!("bad coefficient {:?}", term.coeff)))?;
            p.add_term((term.n, term.t), c);
        }
        Ok(p)
    }
}

#[derive(Serialize, Deserialize)]
struct JsonTerm {
    coeff: String,
    n: u32,
    t: u32,
}

#[derive(Serialize, Deserialize)]
struct JsonPoly {
    terms: Vec<JsonTerm>,
}

impl From<&IntPoly> for JsonPoly {
    fn from(p: &IntPoly) -> Self {
        JsonPoly {
            terms: p
                .terms()
                .map(|((n, t), c)| JsonTerm {
                    coeff: c.to_string(),
                    n,
                    t,
                })
                .collect(),
        }
    }
}

impl From<i64> for IntPoly {
    fn from(c: i64) -> Self {
        Self::constant(c)
    }
}

impl<'a> Add<&'a IntPoly> for &IntPoly {
    type Output = IntPoly;
    fn add(self, rhs: &'a IntPoly) -> IntPoly {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl Add for IntPoly {
    type Output = IntPoly;
    fn add(mut self, rhs: IntPoly) -> IntPoly {
        self += &rhs;
        self
    }
}

impl<'a> AddAssign<&'a IntPoly> for IntPoly {
    fn add_assign(&mut self, rhs: &'a IntPoly) {
        for (&e, c) in &rhs.terms {
            self.add_term(e, c.clone());
        }
    }
}

impl AddAssign for IntPoly {
    fn add_assign(&mut self, rhs: IntPoly) {
        for (e, c) in rhs.terms {
            self.add_term(e, c);
        }
    }
}

impl Neg for IntPoly {
    type Output = IntPoly;
    fn neg(mut self) -> IntPoly {
        for c in self.terms.values_mut() {
            *c = -std::mem::take(c);
        }
        self
    }
}

impl Neg for &IntPoly {
    type Output = IntPoly;
    fn neg(self) -> IntPoly {
        -self.clone()
    }
}

impl<'a> Sub<&'a IntPoly> for &IntPoly {
    type Output = IntPoly;
    fn sub(self, rhs: &'a IntPoly) -> IntPoly {
        let mut out = self.clone();
        for (&e, c) in &rhs.terms {
            out.add_term(e, -c);
        }
        out
    }
}

impl Sub for IntPoly {
    type Output = IntPoly;
    fn sub(self, rhs: IntPoly) -> IntPoly {
        &self - &rhs
    }
}

impl<'a> Mul<&'a IntPoly> for &IntPoly {
    type Output = IntPoly;
    fn mul(self, rhs: &'a IntPoly) -> IntPoly {
        let mut out = IntPoly::zero();
        for (&(an, at), ac) in &self.terms {
            for (&(bn, bt), bc) in &rhs.terms {
                out.add_term((an + bn, at + bt), ac * bc);
            }
        }
        out
    }
}

impl Mul for IntPoly {
    type Output = IntPoly;
    fn mul(self, rhs: IntPoly) -> IntPoly {
        &self * &rhs
    }
}

impl Sum for IntPoly {
    fn sum<I: Iterator<Item = IntPoly>>(iter: I) -> Self {
        let mut acc = IntPoly::zero();
        for p in iter {
            acc += p;
        }
        acc
    }
}

fn write_monomial(f: &mut fmt::Formatter<'_>, var: char, deg: u32) -> fmt::Result {
    match deg {
        0 => Ok(()),
        1 => write!(f, "{var}"),
        d => write!(f, "{var}^{d}"),
    }
}

/// Expanded form, terms sorted by `(deg_n, deg_t)` descending, e.g.
/// `n^4 - 6n^3 + 11n^2 - 6n`.
impl fmt::Display for IntPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (i, ((dn, dt), c)) in self.terms().enumerate() {
            let negative = c.is_negative();
            match (i, negative) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            let mag = c.abs();
            if !mag.is_one() || (dn == 0 && dt == 0) {
                write!(f, "{mag}")?;
            }
            write_monomial(f, 'n', dn)?;
            write_monomial(f, 't', dt)?;
        }
        Ok(())
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParsePolyError {
    #[error("unexpected character {ch:?} at offset {pos}")]
    UnexpectedChar { pos: usize, ch: char },
    #[error("unexpected end of input")]
    UnexpectedEnd,
    #[error("expected {expected} at offset {pos}")]
    Expected { pos: usize, expected: &'static str },
    #[error("exponent too large at offset {pos}")]
    ExponentOverflow { pos: usize },
    #[error("invalid polynomial json: {0}")]
    Json(String),
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Int(BigInt),
    Var(char),
    Plus,
    Minus,
    Star,
    Caret,
    LParen,
    RParen,
}

fn tokenize(s: &str) -> Result<Vec<(usize, Tok)>, ParsePolyError> {
    let mut out = Vec::new();
    let chars: Vec<(usize, char)> = s.char_indices().collect();
    let mut i = 0;
    while i < chars.len() {
        let (pos, ch) = chars[i];
        match ch {
            c if c.is_whitespace() => {
                i += 1;
                continue;
            }
            '0'..='9' => {
                let start = i;
                while i < chars.len() && chars[i].1.is_ascii_digit() {
                    i += 1;
                }
                let digits: String = chars[start..i].iter().map(|&(_, c)| c).collect();
                out.push((pos, Tok::Int(digits.parse().expect("ascii digits"))));
                continue;
            }
            'n' | 't' => out.push((pos, Tok::Var(ch))),
            '+' => out.push((pos, Tok::Plus)),
            '-' => out.push((pos, Tok::Minus)),
            '*' => out.push((pos, Tok::Star)),
            '^' => out.push((pos, Tok::Caret)),
            '(' => out.push((pos, Tok::LParen)),
            ')' => out.push((pos, Tok::RParen)),
            _ => return Err(ParsePolyError::UnexpectedChar { pos, ch }),
        }
        i += 1;
    }
    Ok(out)
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    at: usize,
    len: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.at).map(|(_, t)| t)
    }

    fn pos(&self) -> usize {
        self.toks.get(self.at).map(|(p, _)| *p).unwrap_or(self.len)
    }

    fn expr(&mut self) -> Result<IntPoly, ParsePolyError> {
        let mut acc = match self.peek() {
            Some(Tok::Minus) => {
                self.at += 1;
                -self.term()?
            }
            Some(Tok::Plus) => {
                self.at += 1;
                self.term()?
            }
            _ => self.term()?,
        };
        loop {
            match self.peek() {
                Some(Tok::Plus) => {
                    self.at += 1;
                    acc += self.term()?;
                }
                Some(Tok::Minus) => {
                    self.at += 1;
                    acc = acc - self.term()?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<IntPoly, ParsePolyError> {
        let mut acc = self.factor()?;
        loop {
            match self.peek() {
                Some(Tok::Star) => {
                    self.at += 1;
                    acc = acc * self.factor()?;
                }
                // implicit multiplication: "2n", "n(n-1)", "(n-1)(n-2)"
                Some(Tok::Int(_)) | Some(Tok::Var(_)) | Some(Tok::LParen) => {
                    acc = acc * self.factor()?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn factor(&mut self) -> Result<IntPoly, ParsePolyError> {
        let base = self.primary()?;
        if let Some(Tok::Caret) = self.peek() {
            self.at += 1;
            let pos = self.pos();
            match self.toks.get(self.at).cloned() {
                Some((_, Tok::Int(k))) => {
                    self.at += 1;
                    let k = k
                        .to_u32()
                        .filter(|&k| k <= 4096)
                        .ok_or(ParsePolyError::ExponentOverflow { pos })?;
                    Ok(base.pow(k))
                }
                Some(_) => Err(ParsePolyError::Expected {
                    pos,
                    expected: "exponent",
                }),
                None => Err(ParsePolyError::UnexpectedEnd),
            }
        } else {
            Ok(base)
        }
    }

    fn primary(&mut self) -> Result<IntPoly, ParsePolyError> {
        let pos = self.pos();
        match self.toks.get(self.at).cloned() {
            Some((_, Tok::Int(c))) => {
                self.at += 1;
                Ok(IntPoly::constant(c))
            }
            Some((_, Tok::Var('n'))) => {
                self.at += 1;
                Ok(IntPoly::n())
            }
            Some((_, Tok::Var(_))) => {
                self.at += 1;
                Ok(IntPoly::t())
            }
            Some((_, Tok::LParen)) => {
                self.at += 1;
                let inner = self.expr()?;
                match self.peek() {
                    Some(Tok::RParen) => {
                        self.at += 1;
                        Ok(inner)
                    }
                    Some(_) => Err(ParsePolyError::Expected {
                        pos: self.pos(),
                        expected: "')'",
                    }),
                    None => Err(ParsePolyError::UnexpectedEnd),
                }
            }
            Some(_) => Err(ParsePolyError::Expected {
                pos,
                expected: "number, variable or '('",
            }),
            None => Err(ParsePolyError::UnexpectedEnd),
        }
    }
}

/// Parses expressions such as `n(n-1)^2`, `(n-4)(n-3)n(40+2n)` or the
/// expanded rendering produced by `Display`.
impl FromStr for IntPoly {
    type Err = ParsePolyError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let toks = tokenize(s)?;
        let mut p = Parser {
            toks,
            at: 0,
            len: s.len(),
        };
        let out = p.expr()?;
        if p.at != p.toks.len() {
            return Err(ParsePolyError::Expected {
                pos: p.pos(),
                expected: "operator or end of input",
            });
        }
        Ok(out)
    }
}
