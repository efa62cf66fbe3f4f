//! Evaluation under an assignment and a finite partial predicate.
//!
//! A Δ₀(X) formula is grounded into a propositional formula over the X-atoms
//! not yet decided by ρ; forcing and minimal query sets are then exact
//! questions about that Boolean function.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;
use thiserror::Error;

use super::syntax::{Atom, Formula, Term};
use crate::game::PartialPredicate;
use crate::wellorder::WellOrderCodec;

pub type Assignment = BTreeMap<String, u64>;

/// Cap on grounded size, counted in literal instances.
pub const GROUND_BUDGET: usize = 1 << 20;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("variable {0} is not assigned")]
    Unbound(String),
    #[error("arithmetic overflow")]
    Overflow,
    #[error("unbounded quantifier over {0} in a bounded context")]
    Unbounded(String),
    #[error("formula too large to ground")]
    TooLarge,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Truth {
    True,
    False,
    Unknown,
}

pub fn eval_term(t: &Term, e: &Assignment) -> Result<u64, EvalError> {
    match t {
        Term::Var(x) => e.get(x).copied().ok_or_else(|| EvalError::Unbound(x.clone())),
        Term::Num(n) => Ok(*n),
        Term::Add(a, b) => eval_term(a, e)?.checked_add(eval_term(b, e)?).ok_or(EvalError::Overflow),
        Term::Mul(a, b) => eval_term(a, e)?.checked_mul(eval_term(b, e)?).ok_or(EvalError::Overflow),
    }
}

/// Propositional residue over undecided X-atoms.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Prop {
    Const(bool),
    Atom(u64, bool),
    And(Vec<Prop>),
    Or(Vec<Prop>),
}

impl Prop {
    fn join(conj: bool, parts: Vec<Prop>) -> Prop {
        let mut out = Vec::new();
        for p in parts {
            match p {
                Prop::Const(v) if v == conj => {}
                Prop::Const(v) => return Prop::Const(v),
                Prop::And(v) if conj => out.extend(v),
                Prop::Or(v) if !conj => out.extend(v),
                p => out.push(p),
            }
        }
        match out.len() {
            0 => Prop::Const(conj),
            1 => out.pop().expect("one"),
            _ if conj => Prop::And(out),
            _ => Prop::Or(out),
        }
    }

    pub fn assign(&self, n: u64, v: bool) -> Prop {
        match self {
            Prop::Atom(m, pos) if *m == n => Prop::Const(v == *pos),
            Prop::And(ps) => Prop::join(true, ps.iter().map(|p| p.assign(n, v)).collect()),
            Prop::Or(ps) => Prop::join(false, ps.iter().map(|p| p.assign(n, v)).collect()),
            p => p.clone(),
        }
    }

    pub fn atoms(&self) -> BTreeSet<u64> {
        let mut out = BTreeSet::new();
        self.collect(&mut out);
        out
    }

    fn collect(&self, out: &mut BTreeSet<u64>) {
        match self {
            Prop::Atom(n, _) => {
                out.insert(*n);
            }
            Prop::And(ps) | Prop::Or(ps) => ps.iter().for_each(|p| p.collect(out)),
            Prop::Const(_) => {}
        }
    }

    fn first_atom(&self) -> Option<u64> {
        match self {
            Prop::Atom(n, _) => Some(*n),
            Prop::And(ps) | Prop::Or(ps) => ps.iter().find_map(|p| p.first_atom()),
            Prop::Const(_) => None,
        }
    }

    /// The value every total assignment gives, if they all agree.
    pub fn forced(&self) -> Option<bool> {
        match self {
            Prop::Const(v) => Some(*v),
            _ => {
                let q = self.first_atom().expect("non-constant");
                let lo = self.assign(q, false).forced()?;
                let hi = self.assign(q, true).forced()?;
                (lo == hi).then_some(lo)
            }
        }
    }

    /// Whether some total assignment separates the two.
    pub fn differs(&self, other: &Prop) -> bool {
        match (self, other) {
            (Prop::Const(a), Prop::Const(b)) => a != b,
            _ => {
                let q = self.first_atom().or_else(|| other.first_atom()).expect("non-constant");
                [false, true]
                    .iter()
                    .any(|&v| self.assign(q, v).differs(&other.assign(q, v)))
            }
        }
    }

    /// Atoms the function actually depends on.
    pub fn support(&self) -> BTreeSet<u64> {
        self.atoms()
            .into_iter()
            .filter(|&q| self.assign(q, false).differs(&self.assign(q, true)))
            .collect()
    }
}

fn atom_value(a: &Atom, e: &Assignment, c: &dyn WellOrderCodec) -> Result<Result<bool, u64>, EvalError> {
    Ok(match a {
        Atom::Eq(s, t) => Ok(eval_term(s, e)? == eval_term(t, e)?),
        Atom::Le(s, t) => Ok(eval_term(s, e)? <= eval_term(t, e)?),
        Atom::Prec(s, t) => Ok(c.prec(eval_term(s, e)?, eval_term(t, e)?)),
        Atom::X(t) => Err(eval_term(t, e)?),
    })
}

struct Grounder<'a> {
    rho: &'a PartialPredicate,
    c: &'a dyn WellOrderCodec,
    budget: usize,
}

impl Grounder<'_> {
    fn ground(&mut self, f: &Formula, e: &mut Assignment) -> Result<Prop, EvalError> {
        match f {
            Formula::Lit(pos, a) => {
                self.budget = self.budget.checked_sub(1).ok_or(EvalError::TooLarge)?;
                Ok(match atom_value(a, e, self.c)? {
                    Ok(v) => Prop::Const(v == *pos),
                    Err(n) => match self.rho.get(n) {
                        Some(v) => Prop::Const(v == *pos),
                        None => Prop::Atom(n, *pos),
                    },
                })
            }
            Formula::And(a, b) => {
                let l = self.ground(a, e)?;
                if l == Prop::Const(false) {
                    return Ok(l);
                }
                Ok(Prop::join(true, vec![l, self.ground(b, e)?]))
            }
            Formula::Or(a, b) => {
                let l = self.ground(a, e)?;
                if l == Prop::Const(true) {
                    return Ok(l);
                }
                Ok(Prop::join(false, vec![l, self.ground(b, e)?]))
            }
            Formula::Forall(x, _) | Formula::Exists(x, _) => {
                let (_, bound, body) = f.bounded().ok_or_else(|| EvalError::Unbounded(x.clone()))?;
                let conj = matches!(f, Formula::Forall(..));
                let n = eval_term(bound, e)?;
                if n as usize >= self.budget {
                    return Err(EvalError::TooLarge);
                }
                let saved = e.get(x).copied();
                let mut parts = Vec::new();
                let mut result = Ok(());
                for i in 0..=n {
                    e.insert(x.clone(), i);
                    match self.ground(body, e) {
                        Ok(Prop::Const(v)) if v != conj => {
                            parts = vec![Prop::Const(v)];
                            break;
                        }
                        Ok(p) => parts.push(p),
                        Err(err) => {
                            result = Err(err);
                            break;
                        }
                    }
                }
                match saved {
                    Some(v) => e.insert(x.clone(), v),
                    None => e.remove(x),
                };
                result?;
                Ok(Prop::join(conj, parts))
            }
        }
    }
}

/// Grounds a Δ₀(X) formula against `(E, ρ)`.
pub fn ground(f: &Formula, e: &Assignment, rho: &PartialPredicate, c: &dyn WellOrderCodec) -> Result<Prop, EvalError> {
    let mut g = Grounder {
        rho,
        c,
        budget: GROUND_BUDGET,
    };
    g.ground(f, &mut e.clone())
}

/// Forcing as a three-valued answer: True iff `(E,ρ) ⊩ f`, False iff `(E,ρ) ⊩ f̄`.
pub fn eval3(f: &Formula, e: &Assignment, rho: &PartialPredicate, c: &dyn WellOrderCodec) -> Result<Truth, EvalError> {
    Ok(match ground(f, e, rho, c)?.forced() {
        Some(true) => Truth::True,
        Some(false) => Truth::False,
        None => Truth::Unknown,
    })
}

pub fn forces(f: &Formula, e: &Assignment, rho: &PartialPredicate, c: &dyn WellOrderCodec) -> Result<bool, EvalError> {
    Ok(eval3(f, e, rho, c)? == Truth::True)
}

/// The least set of points whose values, added to ρ, decide `f`.
///
/// Determining sets are exactly the supersets of the support of the grounded
/// function, so the minimum is the support itself.
pub fn min_query_set(
    f: &Formula,
    e: &Assignment,
    rho: &PartialPredicate,
    c: &dyn WellOrderCodec,
) -> Result<BTreeSet<u64>, EvalError> {
    Ok(ground(f, e, rho, c)?.support())
}

/// Truth of an X-free formula, searching unbounded quantifiers up to `bound`.
/// `None` when the search cannot settle it.
pub fn decide(f: &Formula, e: &Assignment, c: &dyn WellOrderCodec, bound: u64) -> Option<bool> {
    if f.is_delta0() {
        return ground(f, e, &PartialPredicate::new(), c).ok()?.forced();
    }
    match f {
        Formula::And(a, b) | Formula::Or(a, b) => {
            let conj = matches!(f, Formula::And(..));
            let (l, r) = (decide(a, e, c, bound), decide(b, e, c, bound));
            if l == Some(!conj) || r == Some(!conj) {
                Some(!conj)
            } else if l.is_some() && r.is_some() {
                Some(conj)
            } else {
                None
            }
        }
        Formula::Forall(x, body) | Formula::Exists(x, body) => {
            let conj = matches!(f, Formula::Forall(..));
            let (inner, top) = match f.bounded() {
                Some((_, t, b)) => (b, Some(eval_term(t, e).ok()?)),
                None => (&**body, None),
            };
            let mut e = e.clone();
            let mut open = false;
            for i in 0..=top.unwrap_or(bound) {
                e.insert(x.clone(), i);
                match decide(inner, &e, c, bound) {
                    Some(v) if v != conj => return Some(v),
                    Some(_) => {}
                    None => open = true,
                }
            }
            // an unbounded search can only refute
            (!open && top.is_some()).then_some(conj)
        }
        Formula::Lit(..) => unreachable!("literals are Δ₀"),
    }
}

/// ≤-least witness of an X-free `∃x.ψ` within the search bound.
pub fn least_witness(f: &Formula, e: &Assignment, c: &dyn WellOrderCodec, bound: u64) -> Option<u64> {
    let Formula::Exists(x, body) = f else { return None };
    let mut e = e.clone();
    (0..=bound).find(|&i| {
        e.insert(x.clone(), i);
        decide(body, &e, c, bound) == Some(true)
    })
}
