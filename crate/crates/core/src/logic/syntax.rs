//! Terms and NNF formulas: parsing, printing, substitution, classification.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Var(String),
    Num(u64),
    Add(Box<Term>, Box<Term>),
    Mul(Box<Term>, Box<Term>),
}

impl Term {
    pub fn var(name: &str) -> Term {
        Term::Var(name.to_string())
    }

    pub fn add(a: Term, b: Term) -> Term {
        Term::Add(Box::new(a), Box::new(b))
    }

    pub fn mul(a: Term, b: Term) -> Term {
        Term::Mul(Box::new(a), Box::new(b))
    }

    pub fn vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars(&self, out: &mut BTreeSet<String>) {
        match self {
            Term::Var(x) => {
                out.insert(x.clone());
            }
            Term::Num(_) => {}
            Term::Add(a, b) | Term::Mul(a, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
        }
    }

    pub fn subst(&self, x: &str, t: &Term) -> Term {
        match self {
            Term::Var(y) if y == x => t.clone(),
            Term::Var(_) | Term::Num(_) => self.clone(),
            Term::Add(a, b) => Term::add(a.subst(x, t), b.subst(x, t)),
            Term::Mul(a, b) => Term::mul(a.subst(x, t), b.subst(x, t)),
        }
    }

    fn rename(&self, map: &BTreeMap<String, String>) -> Term {
        match self {
            Term::Var(y) => Term::Var(map.get(y).cloned().unwrap_or_else(|| y.clone())),
            Term::Num(_) => self.clone(),
            Term::Add(a, b) => Term::add(a.rename(map), b.rename(map)),
            Term::Mul(a, b) => Term::mul(a.rename(map), b.rename(map)),
        }
    }

    fn level(&self) -> u8 {
        match self {
            Term::Add(..) => 1,
            Term::Mul(..) => 2,
            _ => 3,
        }
    }

    fn fmt_at(&self, f: &mut fmt::Formatter<'_>, need: u8) -> fmt::Result {
        let paren = self.level() < need;
        if paren {
            write!(f, "(")?;
        }
        match self {
            Term::Var(x) => write!(f, "{x}")?,
            Term::Num(n) => write!(f, "{n}")?,
            Term::Add(a, b) => {
                a.fmt_at(f, 1)?;
                write!(f, "+")?;
                b.fmt_at(f, 2)?;
            }
            Term::Mul(a, b) => {
                a.fmt_at(f, 2)?;
                write!(f, "*")?;
                b.fmt_at(f, 3)?;
            }
        }
        if paren {
            write!(f, ")")?;
        }
        Ok(())
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_at(f, 0)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Atom {
    Eq(Term, Term),
    Le(Term, Term),
    Prec(Term, Term),
    X(Term),
}

impl Atom {
    fn map(&self, g: impl Fn(&Term) -> Term) -> Atom {
        match self {
            Atom::Eq(a, b) => Atom::Eq(g(a), g(b)),
            Atom::Le(a, b) => Atom::Le(g(a), g(b)),
            Atom::Prec(a, b) => Atom::Prec(g(a), g(b)),
            Atom::X(a) => Atom::X(g(a)),
        }
    }

    fn terms(&self) -> Vec<&Term> {
        match self {
            Atom::Eq(a, b) | Atom::Le(a, b) | Atom::Prec(a, b) => vec![a, b],
            Atom::X(a) => vec![a],
        }
    }
}

/// Negation normal form: negation only on atoms.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Formula {
    Lit(bool, Atom),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Forall(String, Box<Formula>),
    Exists(String, Box<Formula>),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Complexity {
    Delta0,
    PSigma(usize),
    PPi(usize),
    NotPrenexStrict,
}

impl Formula {
    pub fn lit(pos: bool, atom: Atom) -> Formula {
        Formula::Lit(pos, atom)
    }

    pub fn and(a: Formula, b: Formula) -> Formula {
        Formula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Formula {
        Formula::Or(Box::new(a), Box::new(b))
    }

    pub fn forall(x: &str, body: Formula) -> Formula {
        Formula::Forall(x.to_string(), Box::new(body))
    }

    pub fn exists(x: &str, body: Formula) -> Formula {
        Formula::Exists(x.to_string(), Box::new(body))
    }

    /// `∀x ≤ t. body` as `∀x.(¬(x≤t) ∨ body)`.
    pub fn forall_le(x: &str, t: Term, body: Formula) -> Formula {
        Formula::forall(x, Formula::or(Formula::Lit(false, Atom::Le(Term::var(x), t)), body))
    }

    /// `∃x ≤ t. body` as `∃x.(x≤t ∧ body)`.
    pub fn exists_le(x: &str, t: Term, body: Formula) -> Formula {
        Formula::exists(x, Formula::and(Formula::Lit(true, Atom::Le(Term::var(x), t)), body))
    }

    /// The bound and body of a bounded quantifier, if this is one.
    pub fn bounded(&self) -> Option<(&str, &Term, &Formula)> {
        match self {
            Formula::Forall(x, b) => match &**b {
                Formula::Or(l, body) => match &**l {
                    Formula::Lit(false, Atom::Le(Term::Var(y), t)) if y == x && !t.vars().contains(x) => {
                        Some((x, t, body))
                    }
                    _ => None,
                },
                _ => None,
            },
            Formula::Exists(x, b) => match &**b {
                Formula::And(l, body) => match &**l {
                    Formula::Lit(true, Atom::Le(Term::Var(y), t)) if y == x && !t.vars().contains(x) => {
                        Some((x, t, body))
                    }
                    _ => None,
                },
                _ => None,
            },
            _ => None,
        }
    }

    /// The canonical NNF of the negation.
    pub fn complement(&self) -> Formula {
        match self {
            Formula::Lit(p, a) => Formula::Lit(!p, a.clone()),
            Formula::And(a, b) => Formula::or(a.complement(), b.complement()),
            Formula::Or(a, b) => Formula::and(a.complement(), b.complement()),
            Formula::Forall(x, b) => Formula::exists(x, b.complement()),
            Formula::Exists(x, b) => Formula::forall(x, b.complement()),
        }
    }

    pub fn fv(&self) -> BTreeSet<String> {
        match self {
            Formula::Lit(_, a) => a.terms().into_iter().flat_map(|t| t.vars()).collect(),
            Formula::And(a, b) | Formula::Or(a, b) => {
                let mut s = a.fv();
                s.extend(b.fv());
                s
            }
            Formula::Forall(x, b) | Formula::Exists(x, b) => {
                let mut s = b.fv();
                s.remove(x);
                s
            }
        }
    }

    /// Every variable name, free or bound.
    fn all_vars(&self, out: &mut BTreeSet<String>) {
        match self {
            Formula::Lit(_, a) => a.terms().into_iter().for_each(|t| out.extend(t.vars())),
            Formula::And(a, b) | Formula::Or(a, b) => {
                a.all_vars(out);
                b.all_vars(out);
            }
            Formula::Forall(x, b) | Formula::Exists(x, b) => {
                out.insert(x.clone());
                b.all_vars(out);
            }
        }
    }

    /// Capture-avoiding substitution of `t` for the free variable `x`.
    pub fn subst(&self, x: &str, t: &Term) -> Formula {
        match self {
            Formula::Lit(p, a) => Formula::Lit(*p, a.map(|s| s.subst(x, t))),
            Formula::And(a, b) => Formula::and(a.subst(x, t), b.subst(x, t)),
            Formula::Or(a, b) => Formula::or(a.subst(x, t), b.subst(x, t)),
            Formula::Forall(y, b) | Formula::Exists(y, b) => {
                let rebuild = |y: &str, b: Formula| match self {
                    Formula::Forall(..) => Formula::forall(y, b),
                    _ => Formula::exists(y, b),
                };
                if y == x || !b.fv().contains(x) {
                    return self.clone();
                }
                let tv = t.vars();
                if tv.contains(y) {
                    let mut used = tv;
                    self.all_vars(&mut used);
                    used.insert(x.to_string());
                    let fresh = (0..).map(|i| format!("{y}{i}")).find(|n| !used.contains(n)).expect("infinite");
                    let renamed = b.subst(y, &Term::Var(fresh.clone()));
                    rebuild(&fresh, renamed.subst(x, t))
                } else {
                    rebuild(y, b.subst(x, t))
                }
            }
        }
    }

    /// Bound variables renamed by binding depth, for comparison up to alpha.
    pub fn canonical(&self) -> Formula {
        self.canon(&BTreeMap::new(), 0)
    }

    fn canon(&self, map: &BTreeMap<String, String>, depth: usize) -> Formula {
        match self {
            Formula::Lit(p, a) => Formula::Lit(*p, a.map(|t| t.rename(map))),
            Formula::And(a, b) => Formula::and(a.canon(map, depth), b.canon(map, depth)),
            Formula::Or(a, b) => Formula::or(a.canon(map, depth), b.canon(map, depth)),
            Formula::Forall(x, b) | Formula::Exists(x, b) => {
                let name = format!("'{depth}");
                let mut inner = map.clone();
                inner.insert(x.clone(), name.clone());
                let body = b.canon(&inner, depth + 1);
                match self {
                    Formula::Forall(..) => Formula::forall(&name, body),
                    _ => Formula::exists(&name, body),
                }
            }
        }
    }

    pub fn alpha_eq(&self, other: &Formula) -> bool {
        self.canonical() == other.canonical()
    }

    pub fn is_x_free(&self) -> bool {
        match self {
            Formula::Lit(_, a) => !matches!(a, Atom::X(_)),
            Formula::And(a, b) | Formula::Or(a, b) => a.is_x_free() && b.is_x_free(),
            Formula::Forall(_, b) | Formula::Exists(_, b) => b.is_x_free(),
        }
    }

    pub fn is_delta0(&self) -> bool {
        match self {
            Formula::Lit(..) => true,
            Formula::And(a, b) | Formula::Or(a, b) => a.is_delta0() && b.is_delta0(),
            Formula::Forall(..) | Formula::Exists(..) => match self.bounded() {
                Some((_, _, body)) => body.is_delta0(),
                None => false,
            },
        }
    }

    /// Strictly alternating prefix of unbounded quantifiers over a Δ₀ matrix.
    pub fn classify(&self) -> Complexity {
        if self.is_delta0() {
            return Complexity::Delta0;
        }
        let mut kinds = Vec::new();
        let mut cur = self;
        loop {
            match cur {
                Formula::Forall(_, b) | Formula::Exists(_, b) if cur.bounded().is_none() => {
                    kinds.push(matches!(cur, Formula::Exists(..)));
                    cur = b;
                }
                _ => break,
            }
        }
        if kinds.is_empty() || !cur.is_delta0() || kinds.windows(2).any(|w| w[0] == w[1]) {
            return Complexity::NotPrenexStrict;
        }
        if kinds[0] {
            Complexity::PSigma(kinds.len())
        } else {
            Complexity::PPi(kinds.len())
        }
    }

    fn level(&self) -> u8 {
        match self {
            Formula::Forall(..) | Formula::Exists(..) => 0,
            Formula::Or(..) => 1,
            Formula::And(..) => 2,
            Formula::Lit(..) => 3,
        }
    }

    fn fmt_at(&self, f: &mut fmt::Formatter<'_>, need: u8) -> fmt::Result {
        let paren = self.level() < need;
        if paren {
            write!(f, "(")?;
        }
        if let Some((x, t, body)) = self.bounded() {
            let q = if matches!(self, Formula::Forall(..)) { 'A' } else { 'E' };
            write!(f, "{q} {x}<={t}. ")?;
            body.fmt_at(f, 0)?;
        } else {
            match self {
                Formula::Lit(p, a) => match (p, a) {
                    (true, Atom::Eq(s, t)) => write!(f, "{s}={t}")?,
                    (false, Atom::Eq(s, t)) => write!(f, "{s}!={t}")?,
                    (true, Atom::Le(s, t)) => write!(f, "{s}<={t}")?,
                    (false, Atom::Le(s, t)) => write!(f, "!({s}<={t})")?,
                    (true, Atom::Prec(s, t)) => write!(f, "prec({s},{t})")?,
                    (false, Atom::Prec(s, t)) => write!(f, "!prec({s},{t})")?,
                    (true, Atom::X(t)) => write!(f, "X({t})")?,
                    (false, Atom::X(t)) => write!(f, "!X({t})")?,
                },
                Formula::And(a, b) => {
                    a.fmt_at(f, 2)?;
                    write!(f, " & ")?;
                    b.fmt_at(f, 3)?;
                }
                Formula::Or(a, b) => {
                    a.fmt_at(f, 1)?;
                    write!(f, " | ")?;
                    b.fmt_at(f, 2)?;
                }
                Formula::Forall(x, b) => {
                    write!(f, "A {x}. ")?;
                    b.fmt_at(f, 0)?;
                }
                Formula::Exists(x, b) => {
                    write!(f, "E {x}. ")?;
                    b.fmt_at(f, 0)?;
                }
            }
        }
        if paren {
            write!(f, ")")?;
        }
        Ok(())
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_at(f, 0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("parse error at {position}: {message}")]
pub struct ParseFormulaError {
    pub position: usize,
    pub message: String,
}

struct Parser<'a> {
    s: &'a [u8],
    i: usize,
}

type PResult<T> = Result<T, ParseFormulaError>;

impl<'a> Parser<'a> {
    fn err<T>(&self, message: impl Into<String>) -> PResult<T> {
        Err(ParseFormulaError {
            position: self.i,
            message: message.into(),
        })
    }

    fn ws(&mut self) {
        while self.i < self.s.len() && self.s[self.i].is_ascii_whitespace() {
            self.i += 1;
        }
    }

    fn peek_str(&mut self, p: &str) -> bool {
        self.ws();
        self.s[self.i..].starts_with(p.as_bytes())
    }

    fn eat(&mut self, p: &str) -> bool {
        if self.peek_str(p) {
            self.i += p.len();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, p: &str) -> PResult<()> {
        if self.eat(p) {
            Ok(())
        } else {
            self.err(format!("expected '{p}'"))
        }
    }

    fn ident(&mut self) -> PResult<String> {
        self.ws();
        let start = self.i;
        match self.s.get(self.i) {
            Some(c) if c.is_ascii_lowercase() || *c == b'_' => {}
            _ => return self.err("expected a variable"),
        }
        while self.i < self.s.len() && (self.s[self.i].is_ascii_alphanumeric() || self.s[self.i] == b'_') {
            self.i += 1;
        }
        let name = std::str::from_utf8(&self.s[start..self.i]).expect("ascii").to_string();
        if name == "prec" {
            self.i = start;
            return self.err("'prec' is reserved");
        }
        Ok(name)
    }

    fn term(&mut self) -> PResult<Term> {
        let mut t = self.product()?;
        while self.eat("+") {
            t = Term::add(t, self.product()?);
        }
        Ok(t)
    }

    fn product(&mut self) -> PResult<Term> {
        let mut t = self.term_atom()?;
        while self.eat("*") {
            t = Term::mul(t, self.term_atom()?);
        }
        Ok(t)
    }

    fn term_atom(&mut self) -> PResult<Term> {
        self.ws();
        if self.eat("(") {
            let t = self.term()?;
            self.expect(")")?;
            return Ok(t);
        }
        if let Some(c) = self.s.get(self.i) {
            if c.is_ascii_digit() {
                let start = self.i;
                while self.i < self.s.len() && self.s[self.i].is_ascii_digit() {
                    self.i += 1;
                }
                let text = std::str::from_utf8(&self.s[start..self.i]).expect("ascii");
                return text.parse().map(Term::Num).or_else(|_| self.err("numeral out of range"));
            }
        }
        Ok(Term::Var(self.ident()?))
    }

    fn formula(&mut self) -> PResult<Formula> {
        let mut f = self.conj()?;
        while self.eat("|") {
            f = Formula::or(f, self.conj()?);
        }
        Ok(f)
    }

    fn conj(&mut self) -> PResult<Formula> {
        let mut f = self.unary()?;
        while self.eat("&") {
            f = Formula::and(f, self.unary()?);
        }
        Ok(f)
    }

    fn binary_args(&mut self) -> PResult<(Term, Term)> {
        self.expect("(")?;
        let a = self.term()?;
        self.expect(",")?;
        let b = self.term()?;
        self.expect(")")?;
        Ok((a, b))
    }

    fn unary(&mut self) -> PResult<Formula> {
        self.ws();
        for (q, forall) in [("A", true), ("E", false)] {
            let next = self.s.get(self.i + 1);
            if self.peek_str(q) && next.is_some_and(|c| c.is_ascii_whitespace()) {
                self.i += 1;
                let x = self.ident()?;
                let bound = if self.eat("<=") { Some(self.term()?) } else { None };
                self.expect(".")?;
                let body = self.formula()?;
                return Ok(match (forall, bound) {
                    (true, None) => Formula::forall(&x, body),
                    (false, None) => Formula::exists(&x, body),
                    (true, Some(t)) => Formula::forall_le(&x, t, body),
                    (false, Some(t)) => Formula::exists_le(&x, t, body),
                });
            }
        }
        if self.eat("!") {
            if self.eat("X") {
                self.expect("(")?;
                let t = self.term()?;
                self.expect(")")?;
                return Ok(Formula::Lit(false, Atom::X(t)));
            }
            if self.eat("prec") {
                let (a, b) = self.binary_args()?;
                return Ok(Formula::Lit(false, Atom::Prec(a, b)));
            }
            self.expect("(")?;
            let f = self.formula()?;
            self.expect(")")?;
            return Ok(f.complement());
        }
        if self.peek_str("X(") {
            self.i += 1;
            self.expect("(")?;
            let t = self.term()?;
            self.expect(")")?;
            return Ok(Formula::Lit(true, Atom::X(t)));
        }
        if self.peek_str("prec(") {
            self.i += 4;
            let (a, b) = self.binary_args()?;
            return Ok(Formula::Lit(true, Atom::Prec(a, b)));
        }
        if self.peek_str("(") {
            let save = self.i;
            self.i += 1;
            if let Ok(f) = self.formula() {
                if self.eat(")") && !["=", "!=", "<=", "+", "*"].iter().any(|p| self.peek_str(p)) {
                    return Ok(f);
                }
            }
            self.i = save;
        }
        let a = self.term()?;
        let (pos, op) = if self.eat("!=") {
            (false, "=")
        } else if self.eat("<=") {
            (true, "<=")
        } else if self.eat("=") {
            (true, "=")
        } else {
            return self.err("expected '=', '!=' or '<='");
        };
        let b = self.term()?;
        Ok(Formula::Lit(
            pos,
            if op == "=" { Atom::Eq(a, b) } else { Atom::Le(a, b) },
        ))
    }
}

pub fn parse_formula(s: &str) -> Result<Formula, ParseFormulaError> {
    let mut p = Parser { s: s.as_bytes(), i: 0 };
    let f = p.formula()?;
    p.ws();
    if p.i != s.len() {
        return p.err("trailing input");
    }
    Ok(f)
}

pub fn parse_term(s: &str) -> Result<Term, ParseFormulaError> {
    let mut p = Parser { s: s.as_bytes(), i: 0 };
    let t = p.term()?;
    p.ws();
    if p.i != s.len() {
        return p.err("trailing input");
    }
    Ok(t)
}

impl FromStr for Formula {
    type Err = ParseFormulaError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_formula(s)
    }
}

impl FromStr for Term {
    type Err = ParseFormulaError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_term(s)
    }
}

macro_rules! string_serde {
    ($t:ty) => {
        impl Serialize for $t {
            fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
                s.serialize_str(&self.to_string())
            }
        }
        impl<'de> Deserialize<'de> for $t {
            fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
                let s = String::deserialize(d)?;
                s.parse().map_err(serde::de::Error::custom)
            }
        }
    };
}

string_serde!(Formula);
string_serde!(Term);

#[cfg(test)]
mod tests {
    use super::*;

    fn f(s: &str) -> Formula {
        parse_formula(s).unwrap()
    }

    #[test]
    fn print_parse_round_trip() {
        for s in [
            "X(0)",
            "!X(x+1)",
            "A x. (X(x) | x=0)",
            "E x0. A x1. X(x0) & (!X(x1) | !prec(x1,x0))",
            "A y<=a. !X(y)",
            "E y<=a*(b+1). X(y) & y!=0",
            "!(a+1<=c) | d+(a+1)<=c",
            "(X(0) | X(1)) & X(2)",
            "X(0) | (X(1) | X(2))",
        ] {
            let g = f(s);
            assert_eq!(f(&g.to_string()), g, "{s} printed as {g}");
        }
        assert_eq!(f("A y<=a. !X(y)").to_string(), "A y<=a. !X(y)");
    }

    #[test]
    fn complement_examples() {
        assert_eq!(f("X(t)").complement(), f("!X(t)"));
        assert_eq!(f("A x. (X(x) | x=0)").complement(), f("E x. (!X(x) & x!=0)"));
        assert_eq!(f("A y. !X(y)").complement(), f("E y. X(y)"));
        assert_eq!(f("!(X(0) & X(1))"), f("!X(0) | !X(1)"));
    }

    #[test]
    fn classification_examples() {
        assert_eq!(f("X(0) & 0<=1").classify(), Complexity::Delta0);
        assert_eq!(f("A y<=a. !X(y)").classify(), Complexity::Delta0);
        assert_eq!(f("E x. A y. X(x) | X(y)").classify(), Complexity::PSigma(2));
        assert_eq!(f("E x. E y. X(x) | X(y)").classify(), Complexity::NotPrenexStrict);
        assert_eq!(f("A y. !X(y)").classify(), Complexity::PPi(1));
        assert_eq!(f("(A y. !X(y)) | X(0)").classify(), Complexity::NotPrenexStrict);
    }

    #[test]
    fn substitution_avoids_capture() {
        let g = f("E y. X(y) & x<=y");
        let h = g.subst("x", &Term::var("y"));
        assert!(h.fv().contains("y"));
        assert!(h.alpha_eq(&f("E z. X(z) & y<=z")));
        assert_eq!(f("A x. X(x)").subst("x", &Term::Num(3)), f("A x. X(x)"));
    }

    #[test]
    fn parse_errors() {
        assert!(parse_formula("X(0) &").is_err());
        assert!(parse_formula("A X. X(0)").is_err());
        assert!(parse_formula("prec(1)").is_err());
    }
}
