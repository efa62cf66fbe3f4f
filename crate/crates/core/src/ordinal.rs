//! Ordinals below epsilon-zero in Cantor normal form.
//!
//! An [`Ordinal`] is a finite list of terms `ω^e·c` with strictly decreasing
//! exponents and positive coefficients. Values are immutable and cheap to
//! clone; every operation returns a fresh value.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

/// One Cantor normal form term `ω^exponent · coefficient`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Term {
    pub exponent: Ordinal,
    pub coefficient: BigUint,
}

/// An ordinal below ε₀. Structural equality coincides with ordinal equality.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Ordinal(Arc<Vec<Term>>);

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("ordinal syntax error at byte {position}: {message}")]
pub struct ParseOrdinalError {
    pub position: usize,
    pub message: String,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OrdinalError {
    #[error("unsupported tower base {0}; only 2 and w are supported")]
    UnsupportedBase(Ordinal),
    #[error("exponent {0} is too large to materialize a coefficient 2^n")]
    CoefficientOverflow(BigUint),
}

/// Bases accepted by [`beta_tower`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TowerBase {
    Two,
    Omega,
}

impl TowerBase {
    pub fn from_ordinal(base: &Ordinal) -> Result<Self, OrdinalError> {
        if *base == Ordinal::from(2u64) {
            Ok(TowerBase::Two)
        } else if *base == Ordinal::omega() {
            Ok(TowerBase::Omega)
        } else {
            Err(OrdinalError::UnsupportedBase(base.clone()))
        }
    }
}

impl Ordinal {
    fn from_terms(terms: Vec<Term>) -> Self {
        debug_assert!(terms.windows(2).all(|w| w[0].exponent > w[1].exponent));
        debug_assert!(terms.iter().all(|t| !t.coefficient.is_zero()));
        Ordinal(Arc::new(terms))
    }

    pub fn zero() -> Self {
        Ordinal(Arc::new(Vec::new()))
    }

    pub fn one() -> Self {
        Self::from(1u64)
    }

    pub fn omega() -> Self {
        omega_pow(&Ordinal::one())
    }

    /// The single term `ω^exponent · coefficient` (zero when the coefficient is zero).
    pub fn monomial(exponent: Ordinal, coefficient: BigUint) -> Self {
        if coefficient.is_zero() {
            return Self::zero();
        }
        Self::from_terms(vec![Term {
            exponent,
            coefficient,
        }])
    }

    /// Builds an ordinal from arbitrary `(exponent, coefficient)` pairs by ordinal
    /// summation in the given order.
    pub fn sum_of<I>(terms: I) -> Self
    where
        I: IntoIterator<Item = (Ordinal, u64)>,
    {
        terms.into_iter().fold(Self::zero(), |acc, (e, c)| {
            ord_add(&acc, &Self::monomial(e, BigUint::from(c)))
        })
    }

    pub fn terms(&self) -> &[Term] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|t| t.exponent.is_zero())
    }

    /// Exact value when finite and representable.
    pub fn to_u64(&self) -> Option<u64> {
        match self.0.as_slice() {
            [] => Some(0),
            [t] if t.exponent.is_zero() => t.coefficient.to_u64(),
            _ => None,
        }
    }

    /// True for 0 and limit ordinals.
    pub fn is_limit_or_zero(&self) -> bool {
        self.0.last().map_or(true, |t| !t.exponent.is_zero())
    }

    /// Leading exponent; zero for the ordinal zero.
    pub fn leading_exponent(&self) -> Ordinal {
        self.0
            .first()
            .map(|t| t.exponent.clone())
            .unwrap_or_else(Ordinal::zero)
    }

    /// Splits `self = limit + n` with `limit` zero or a limit ordinal.
    pub fn split_finite(&self) -> (Ordinal, BigUint) {
        match self.0.last() {
            Some(t) if t.exponent.is_zero() => {
                let head = self.0[..self.0.len() - 1].to_vec();
                (Ordinal::from_terms(head), t.coefficient.clone())
            }
            _ => (self.clone(), BigUint::zero()),
        }
    }

    /// Coefficient of `ω^exponent` (zero when absent).
    pub fn coefficient_of(&self, exponent: &Ordinal) -> BigUint {
        self.0
            .iter()
            .find(|t| &t.exponent == exponent)
            .map(|t| t.coefficient.clone())
            .unwrap_or_default()
    }

    pub fn successor(&self) -> Ordinal {
        ord_add(self, &Ordinal::one())
    }

    /// Left multiplication by ω: `Σ ω^e·c ↦ Σ ω^(1+e)·c`.
    pub fn omega_times(&self) -> Ordinal {
        let one = Ordinal::one();
        Ordinal::from_terms(
            self.0
                .iter()
                .map(|t| Term {
                    exponent: ord_add(&one, &t.exponent),
                    coefficient: t.coefficient.clone(),
                })
                .collect(),
        )
    }

    /// Coefficient of `ω^e` for a natural exponent, as a machine word when it fits.
    pub fn finite_coefficient(&self, e: u64) -> Option<u64> {
        let c = self.coefficient_of(&Ordinal::from(e));
        if c.is_zero() {
            Some(0)
        } else {
            c.to_u64()
        }
    }

    /// Nesting depth of exponents: 0 for naturals, 1 for `ω·a+b`, ...
    pub fn depth(&self) -> usize {
        self.0
            .iter()
            .map(|t| {
                if t.exponent.is_zero() {
                    0
                } else {
                    1 + t.exponent.depth()
                }
            })
            .max()
            .unwrap_or(0)
    }
}

impl From<u64> for Ordinal {
    fn from(n: u64) -> Self {
        Ordinal::monomial(Ordinal::zero(), BigUint::from(n))
    }
}

impl From<BigUint> for Ordinal {
    fn from(n: BigUint) -> Self {
        Ordinal::monomial(Ordinal::zero(), n)
    }
}

impl Ord for Ordinal {
    fn cmp(&self, other: &Self) -> Ordering {
        cmp(self, other)
    }
}

impl PartialOrd for Ordinal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Lexicographic comparison of the term lists.
pub fn cmp(a: &Ordinal, b: &Ordinal) -> Ordering {
    if Arc::ptr_eq(&a.0, &b.0) {
        return Ordering::Equal;
    }
    for (x, y) in a.0.iter().zip(b.0.iter()) {
        match cmp(&x.exponent, &y.exponent) {
            Ordering::Equal => {}
            ord => return ord,
        }
        match x.coefficient.cmp(&y.coefficient) {
            Ordering::Equal => {}
            ord => return ord,
        }
    }
    a.0.len().cmp(&b.0.len())
}

/// Ordinal (non-commutative) sum `a + b`.
pub fn ord_add(a: &Ordinal, b: &Ordinal) -> Ordinal {
    let Some(lead) = b.0.first() else {
        return a.clone();
    };
    let mut terms: Vec<Term> = a
        .0
        .iter()
        .take_while(|t| t.exponent >= lead.exponent)
        .cloned()
        .collect();
    let mut rest = b.0.iter();
    match terms.last_mut() {
        Some(last) if last.exponent == lead.exponent => {
            last.coefficient += &lead.coefficient;
            rest.next();
        }
        _ => {}
    }
    terms.extend(rest.cloned());
    Ordinal::from_terms(terms)
}

/// Natural (Hessenberg) sum: merge the term lists, adding equal exponents.
pub fn nat_add(a: &Ordinal, b: &Ordinal) -> Ordinal {
    let mut terms = Vec::with_capacity(a.0.len() + b.0.len());
    let (mut i, mut j) = (0, 0);
    while i < a.0.len() && j < b.0.len() {
        match a.0[i].exponent.cmp(&b.0[j].exponent) {
            Ordering::Greater => {
                terms.push(a.0[i].clone());
                i += 1;
            }
            Ordering::Less => {
                terms.push(b.0[j].clone());
                j += 1;
            }
            Ordering::Equal => {
                terms.push(Term {
                    exponent: a.0[i].exponent.clone(),
                    coefficient: &a.0[i].coefficient + &b.0[j].coefficient,
                });
                i += 1;
                j += 1;
            }
        }
    }
    terms.extend_from_slice(&a.0[i..]);
    terms.extend_from_slice(&b.0[j..]);
    Ordinal::from_terms(terms)
}

/// The unique `r` with `b + r = a`, or `None` when `b > a`.
pub fn left_subtract(a: &Ordinal, b: &Ordinal) -> Option<Ordinal> {
    if b > a {
        return None;
    }
    let i = a
        .0
        .iter()
        .zip(b.0.iter())
        .take_while(|(x, y)| x == y)
        .count();
    let (Some(x), Some(y)) = (a.0.get(i), b.0.get(i)) else {
        return Some(Ordinal::from_terms(a.0[i..].to_vec()));
    };
    let mut rest = a.0[i..].to_vec();
    if x.exponent == y.exponent {
        // same exponent, so a's coefficient is the larger one
        rest[0].coefficient = &x.coefficient - &y.coefficient;
    }
    Some(Ordinal::from_terms(rest))
}

pub fn omega_pow(e: &Ordinal) -> Ordinal {
    Ordinal::monomial(e.clone(), BigUint::one())
}

/// `2^a` via `2^(ω·β + n) = ω^β · 2^n`.
pub fn two_pow(a: &Ordinal) -> Ordinal {
    try_two_pow(a).expect("2^n coefficient exceeds addressable size")
}

pub fn try_two_pow(a: &Ordinal) -> Result<Ordinal, OrdinalError> {
    let (infinite, n) = a.split_finite();
    // ω·β = infinite part, so each exponent e ≥ 1 of it is 1 + (exponent of β)
    let beta = Ordinal::from_terms(
        infinite
            .0
            .iter()
            .map(|t| {
                let exponent = match t.exponent.to_u64() {
                    Some(k) => Ordinal::from(k - 1),
                    None => t.exponent.clone(),
                };
                Term {
                    exponent,
                    coefficient: t.coefficient.clone(),
                }
            })
            .collect(),
    );
    let shift = n
        .to_usize()
        .filter(|&s| s < (1 << 26))
        .ok_or_else(|| OrdinalError::CoefficientOverflow(n.clone()))?;
    Ok(Ordinal::monomial(beta, BigUint::one() << shift))
}

/// Base-2 natural sum `Σ 2^e` over a multiset of exponents, by binary carrying.
pub fn nat_sum_two_pows<'a, I>(exps: I) -> Ordinal
where
    I: IntoIterator<Item = &'a Ordinal>,
{
    let mut counts: BTreeMap<Ordinal, BigUint> = BTreeMap::new();
    for e in exps {
        *counts.entry(e.clone()).or_default() += 1u32;
    }
    let two = BigUint::from(2u32);
    // carries only move upward, so one ascending sweep settles every key
    let mut cursor: Option<Ordinal> = None;
    loop {
        let next = match &cursor {
            None => counts.keys().next().cloned(),
            Some(c) => counts
                .range((std::ops::Bound::Excluded(c.clone()), std::ops::Bound::Unbounded))
                .next()
                .map(|(k, _)| k.clone()),
        };
        let Some(key) = next else { break };
        let count = counts[&key].clone();
        if count >= two {
            let carry = &count / &two;
            let keep = &count % &two;
            *counts.entry(key.successor()).or_default() += carry;
            if keep.is_zero() {
                counts.remove(&key);
            } else {
                counts.insert(key.clone(), keep);
            }
        }
        cursor = Some(key);
    }
    counts
        .keys()
        .rev()
        .fold(Ordinal::zero(), |acc, e| ord_add(&acc, &two_pow(e)))
}

/// `β₀(a) = a`, `βₖ₊₁(a) = base^(βₖ(a))` for base 2 or ω.
pub fn beta_tower(base: &Ordinal, k: usize, a: &Ordinal) -> Result<Ordinal, OrdinalError> {
    let base = TowerBase::from_ordinal(base)?;
    let mut value = a.clone();
    for _ in 0..k {
        value = match base {
            TowerBase::Two => try_two_pow(&value)?,
            TowerBase::Omega => omega_pow(&value),
        };
    }
    Ok(value)
}

pub fn parse_ordinal(text: &str) -> Result<Ordinal, ParseOrdinalError> {
    let mut parser = Parser {
        src: text.as_bytes(),
        pos: 0,
    };
    let value = parser.ordinal()?;
    parser.skip_ws();
    if parser.pos != parser.src.len() {
        return Err(parser.error("unexpected trailing input"));
    }
    Ok(value)
}

pub fn print_ordinal(a: &Ordinal) -> String {
    a.to_string()
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn error(&self, message: &str) -> ParseOrdinalError {
        ParseOrdinalError {
            position: self.pos,
            message: message.to_string(),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn ordinal(&mut self) -> Result<Ordinal, ParseOrdinalError> {
        if self.peek() == Some(b'0') {
            self.pos += 1;
            return Ok(Ordinal::zero());
        }
        let mut acc = self.term()?;
        while self.eat(b'+') {
            let t = self.term()?;
            acc = ord_add(&acc, &t);
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<Ordinal, ParseOrdinalError> {
        match self.peek() {
            Some(b'w') => {
                self.pos += 1;
                let exponent = if self.eat(b'^') {
                    if self.eat(b'(') {
                        let e = self.ordinal()?;
                        if !self.eat(b')') {
                            return Err(self.error("expected ')'"));
                        }
                        e
                    } else {
                        Ordinal::from(self.nat()?)
                    }
                } else {
                    Ordinal::one()
                };
                let coefficient = if self.eat(b'*') {
                    self.nat()?
                } else {
                    BigUint::one()
                };
                Ok(Ordinal::monomial(exponent, coefficient))
            }
            Some(b'1'..=b'9') => Ok(Ordinal::from(self.nat()?)),
            Some(_) => Err(self.error("expected 'w' or a positive natural")),
            None => Err(self.error("unexpected end of input")),
        }
    }

    fn nat(&mut self) -> Result<BigUint, ParseOrdinalError> {
        self.skip_ws();
        let start = self.pos;
        if !matches!(self.src.get(self.pos), Some(b'1'..=b'9')) {
            return Err(self.error("expected a positive natural"));
        }
        while matches!(self.src.get(self.pos), Some(b'0'..=b'9')) {
            self.pos += 1;
        }
        let digits = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii digits");
        Ok(digits.parse().expect("validated digits"))
    }
}

impl fmt::Display for Ordinal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        for (i, t) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str("+")?;
            }
            if t.exponent.is_zero() {
                write!(f, "{}", t.coefficient)?;
                continue;
            }
            f.write_str("w")?;
            if t.exponent != Ordinal::one() {
                match t.exponent.to_u64() {
                    Some(n) => write!(f, "^{n}")?,
                    None => write!(f, "^({})", t.exponent)?,
                }
            }
            if !t.coefficient.is_one() {
                write!(f, "*{}", t.coefficient)?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Ordinal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Ordinal({self})")
    }
}

impl FromStr for Ordinal {
    type Err = ParseOrdinalError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_ordinal(s)
    }
}

impl Serialize for Ordinal {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Ordinal {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        parse_ordinal(&s).map_err(serde::de::Error::custom)
    }
}
