//! Independent Δ₀(X) formulas and a brute-force forcing oracle.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use ordgame_core::game::PartialPredicate;
use ordgame_core::logic::{eval3, min_query_set, Assignment, Atom, Formula, Term, Truth};
use ordgame_core::wellorder::WellOrderCodec;
use proptest::prelude::*;

const VARS: [&str; 4] = ["p", "q", "u", "v"];

#[derive(Clone, Debug)]
pub enum T {
    Var(usize),
    Num(u64),
    Add(Box<T>, Box<T>),
}

#[derive(Clone, Debug)]
pub enum O {
    X(bool, T),
    Le(bool, T, T),
    Eq(bool, T, T),
    Prec(bool, T, T),
    And(Box<O>, Box<O>),
    Or(Box<O>, Box<O>),
    /// Quantifier over variable 2 or 3 up to a bound that is a numeral or p/q.
    All(usize, T, Box<O>),
    Ex(usize, T, Box<O>),
}

type Env = BTreeMap<usize, u64>;

fn val(t: &T, e: &Env) -> u64 {
    match t {
        T::Var(i) => e[i],
        T::Num(n) => *n,
        T::Add(a, b) => val(a, e) + val(b, e),
    }
}

fn holds(o: &O, e: &Env, chi: &dyn Fn(u64) -> bool) -> bool {
    match o {
        O::X(p, t) => chi(val(t, e)) == *p,
        O::Le(p, a, b) => (val(a, e) <= val(b, e)) == *p,
        O::Eq(p, a, b) => (val(a, e) == val(b, e)) == *p,
        O::Prec(p, a, b) => (val(a, e) < val(b, e)) == *p,
        O::And(a, b) => holds(a, e, chi) && holds(b, e, chi),
        O::Or(a, b) => holds(a, e, chi) || holds(b, e, chi),
        O::All(x, t, b) | O::Ex(x, t, b) => {
            let mut e2 = e.clone();
            let mut range = (0..=val(t, e)).map(|i| {
                e2.insert(*x, i);
                holds(b, &e2, chi)
            });
            if matches!(o, O::All(..)) {
                range.all(|v| v)
            } else {
                range.any(|v| v)
            }
        }
    }
}

fn mentioned(o: &O, e: &Env, out: &mut BTreeSet<u64>) {
    match o {
        O::X(_, t) => {
            out.insert(val(t, e));
        }
        O::And(a, b) | O::Or(a, b) => {
            mentioned(a, e, out);
            mentioned(b, e, out);
        }
        O::All(x, t, b) | O::Ex(x, t, b) => {
            let mut e2 = e.clone();
            for i in 0..=val(t, e) {
                e2.insert(*x, i);
                mentioned(b, &e2, out);
            }
        }
        _ => {}
    }
}

fn term(t: &T) -> Term {
    match t {
        T::Var(i) => Term::var(VARS[*i]),
        T::Num(n) => Term::Num(*n),
        T::Add(a, b) => Term::add(term(a), term(b)),
    }
}

fn formula(o: &O) -> Formula {
    match o {
        O::X(p, t) => Formula::lit(*p, Atom::X(term(t))),
        O::Le(p, a, b) => Formula::lit(*p, Atom::Le(term(a), term(b))),
        O::Eq(p, a, b) => Formula::lit(*p, Atom::Eq(term(a), term(b))),
        O::Prec(p, a, b) => Formula::lit(*p, Atom::Prec(term(a), term(b))),
        O::And(a, b) => Formula::and(formula(a), formula(b)),
        O::Or(a, b) => Formula::or(formula(a), formula(b)),
        O::All(x, t, b) => Formula::forall_le(VARS[*x], term(t), formula(b)),
        O::Ex(x, t, b) => Formula::exists_le(VARS[*x], term(t), formula(b)),
    }
}

fn arb_term() -> impl Strategy<Value = T> {
    let leaf = prop_oneof![(0usize..4).prop_map(T::Var), (0u64..6).prop_map(T::Num)];
    leaf.prop_recursive(2, 4, 2, |inner| (inner.clone(), inner).prop_map(|(a, b)| T::Add(Box::new(a), Box::new(b))))
}

fn arb_bound() -> impl Strategy<Value = T> {
    prop_oneof![(1u64..6).prop_map(T::Num), (0usize..2).prop_map(T::Var)]
}

pub fn arb_formula() -> impl Strategy<Value = O> {
    let leaf = prop_oneof![
        3 => (any::<bool>(), arb_term()).prop_map(|(p, t)| O::X(p, t)),
        1 => (any::<bool>(), arb_term(), arb_term()).prop_map(|(p, a, b)| O::Le(p, a, b)),
        1 => (any::<bool>(), arb_term(), arb_term()).prop_map(|(p, a, b)| O::Eq(p, a, b)),
        1 => (any::<bool>(), arb_term(), arb_term()).prop_map(|(p, a, b)| O::Prec(p, a, b)),
    ];
    leaf.prop_recursive(8, 96, 2, |inner| {
        prop_oneof![
            3 => (inner.clone(), inner.clone()).prop_map(|(a, b)| O::And(Box::new(a), Box::new(b))),
            3 => (inner.clone(), inner.clone()).prop_map(|(a, b)| O::Or(Box::new(a), Box::new(b))),
            2 => (2usize..4, arb_bound(), inner.clone()).prop_map(|(x, t, b)| O::All(x, t, Box::new(b))),
            2 => (2usize..4, arb_bound(), inner).prop_map(|(x, t, b)| O::Ex(x, t, Box::new(b))),
        ]
    })
}

/// Several subformulas joined by random connectives, for larger atom counts.
pub fn arb_wide() -> impl Strategy<Value = O> {
    proptest::collection::vec((arb_formula(), any::<bool>()), 3..8).prop_map(|parts| {
        let mut it = parts.into_iter();
        let (first, _) = it.next().expect("nonempty");
        it.fold(first, |acc, (f, conj)| {
            if conj {
                O::And(Box::new(acc), Box::new(f))
            } else {
                O::Or(Box::new(acc), Box::new(f))
            }
        })
    })
}

/// Partial predicate on [0,24): None, false or true per point.
pub fn arb_rho() -> impl Strategy<Value = Vec<Option<bool>>> {
    proptest::collection::vec(proptest::option::of(any::<bool>()), 24)
}

/// Compares eval3 and min_query_set with brute force over every completion
/// of ρ on the mentioned atoms. `Ok(false)` when the case has over 12 atoms.
/// Reads `prec` as `<`, so `c` must present ω in its natural order.
pub fn check_case(o: &O, env: Vec<u64>, rho_bits: &[Option<bool>], c: &dyn WellOrderCodec) -> Result<bool, String> {
        let env: Env = env.into_iter().enumerate().collect();
        let mut atoms = BTreeSet::new();
        mentioned(o, &env, &mut atoms);
        if atoms.len() > 12 {
            return Ok(false);
        }
        let rho: PartialPredicate = rho_bits
            .iter()
            .enumerate()
            .filter_map(|(i, b)| b.map(|b| (i as u64, b)))
            .collect();
        let free: Vec<u64> = atoms.iter().copied().filter(|&a| rho.get(a).is_none()).collect();
        // truth table over all completions of ρ on the mentioned atoms
        let table: Vec<bool> = (0u32..1 << free.len())
            .map(|mask| {
                let chi = |n: u64| match free.iter().position(|&a| a == n) {
                    Some(i) => mask >> i & 1 == 1,
                    None => rho.get(n).unwrap_or(false),
                };
                holds(o, &env, &chi)
            })
            .collect();
        let expected = if table.iter().all(|&v| v) {
            Truth::True
        } else if table.iter().all(|&v| !v) {
            Truth::False
        } else {
            Truth::Unknown
        };
        // a point is needed iff flipping it alone changes the value somewhere
        let needed: BTreeSet<u64> = free
            .iter()
            .enumerate()
            .filter(|(i, _)| (0..table.len()).any(|m| table[m] != table[m ^ (1 << i)]))
            .map(|(_, &a)| a)
            .collect();
        if free.len() <= 8 {
            // literal definition: the smallest Q whose values fix the table
            let fixes = |q: u32| (0..table.len()).all(|m| table[m] == table[m & q as usize]);
            let best = (0u32..1 << free.len())
                .filter(|&q| fixes(q))
                .min_by_key(|q| q.count_ones())
                .unwrap();
            let by_search: BTreeSet<u64> = (0..free.len()).filter(|i| best >> i & 1 == 1).map(|i| free[i]).collect();
            if by_search != needed {
                return Err(format!("subset search {by_search:?} vs support {needed:?}"));
            }
        }
        let f = formula(o);
        let e: Assignment = env.iter().map(|(i, v)| (VARS[*i].to_string(), *v)).collect();
        let got = eval3(&f, &e, &rho, c).map_err(|x| x.to_string())?;
        if got != expected {
            return Err(format!("{f}: eval3 {got:?}, oracle {expected:?}"));
        }
        let q = min_query_set(&f, &e, &rho, c).map_err(|x| x.to_string())?;
        if q != needed {
            return Err(format!("{f}: min_query_set {q:?}, oracle {needed:?}"));
        }
        Ok(true)
}
