//! A cut-free IΣ₁(X)-derivation of TI(≺) for the standard order on ω,
//! built bottom-up so the premises are computed rather than typed.

use super::proof::{build_ti, Derivation, ProofNode, Rule, Sequent};
use super::syntax::{parse_formula, parse_term, Formula, Term};

fn f(s: &str) -> Formula {
    parse_formula(s).unwrap_or_else(|e| panic!("{s}: {e}"))
}

fn t(s: &str) -> Term {
    parse_term(s).unwrap_or_else(|e| panic!("{s}: {e}"))
}

fn node(rule: Rule, g: &Sequent) -> ProofNode {
    ProofNode {
        rule,
        sequent: g.clone(),
        principal: None,
        witness: None,
        eigen: None,
        indterm: None,
        children: vec![],
    }
}

fn init(g: &Sequent) -> ProofNode {
    node(Rule::Init, g)
}

fn or(g: &Sequent, p: &str, right: bool, k: impl FnOnce(&Sequent) -> ProofNode) -> ProofNode {
    let p = f(p);
    let Formula::Or(a, b) = &p else { panic!("{p} is not a disjunction") };
    let d = if right { b } else { a };
    let mut n = node(Rule::Or, g);
    n.children = vec![k(&g.with([(**d).clone()]))];
    n.principal = Some(p);
    n
}

/// Builds a node whose premises follow from its data.
fn derived(mut n: ProofNode, ks: Vec<Box<dyn FnOnce(&Sequent) -> ProofNode + '_>>) -> ProofNode {
    let premises = n.expected_premises().expect("well-formed rule data");
    n.children = premises.iter().zip(ks).map(|(s, k)| k(s)).collect();
    n
}

fn and<'a>(
    g: &Sequent,
    p: &str,
    l: impl FnOnce(&Sequent) -> ProofNode + 'a,
    r: impl FnOnce(&Sequent) -> ProofNode + 'a,
) -> ProofNode {
    let mut n = node(Rule::And, g);
    n.principal = Some(f(p));
    derived(n, vec![Box::new(l), Box::new(r)])
}

fn exists(g: &Sequent, p: &str, w: &str, k: impl FnOnce(&Sequent) -> ProofNode) -> ProofNode {
    let mut n = node(Rule::Exists, g);
    n.principal = Some(f(p));
    n.witness = Some(t(w));
    derived(n, vec![Box::new(k)])
}

fn forall(g: &Sequent, p: &str, a: &str, k: impl FnOnce(&Sequent) -> ProofNode) -> ProofNode {
    let mut n = node(Rule::Forall, g);
    n.principal = Some(f(p));
    n.eigen = Some(a.to_string());
    derived(n, vec![Box::new(k)])
}

fn truth(g: &Sequent, p: &str, k: impl FnOnce(&Sequent) -> ProofNode) -> ProofNode {
    let mut n = node(Rule::True, g);
    n.principal = Some(f(p));
    derived(n, vec![Box::new(k)])
}

/// Derivation of `{∀y.¬X(y), ∃x₀∀x₁.(X(x₀) ∧ (¬X(x₁) ∨ ¬prec(x₁,x₀)))}` in
/// IΣ₁(X), sound for `prec` read as `<` on ω. Induction on
/// `∃x.(X(x) ∧ x+a ≤ c)` up to `c+1`, where `c` is a point of X.
pub fn ti_omega_derivation() -> Derivation {
    let root = forall(&build_ti(), "A y. !X(y)", "c", induction);
    Derivation { root }
}

/// The same argument preceded by a pΣ₁-cut on `∃x.(X(x) ∧ x+0 ≤ c)`, whose
/// left premise is closed directly and whose right premise carries the
/// induction.
pub fn ti_omega_derivation_with_cut() -> Derivation {
    let root = forall(&build_ti(), "A y. !X(y)", "c", |g1| {
        let mut n = node(Rule::Cut, g1);
        n.principal = Some(f("E x. X(x) & x+0<=c"));
        derived(n, vec![Box::new(base), Box::new(induction)])
    });
    Derivation { root }
}

fn induction(g: &Sequent) -> ProofNode {
    let mut n = node(Rule::Ind, g);
    n.principal = Some(f("E x. X(x) & x+a<=c"));
    n.eigen = Some("a".into());
    n.indterm = Some(t("c+1"));
    derived(n, vec![Box::new(base), Box::new(step), Box::new(overflow)])
}

fn base(g: &Sequent) -> ProofNode {
    exists(g, "E x. X(x) & x+0<=c", "c", |g| {
        and(g, "X(c) & c+0<=c", init, |g| truth(g, "c+0<=c", init))
    })
}

fn step(g: &Sequent) -> ProofNode {
    let b1 = "!X(b) | !(b+a<=c)";
    forall(g, "A x. !X(x) | !(x+a<=c)", "b", move |g| {
        exists(g, "E x0. A x1. X(x0) & (!X(x1) | !prec(x1,x0))", "b", move |g| {
            forall(g, "A x1. X(b) & (!X(x1) | !prec(x1,b))", "d", move |g| {
                exists(g, "E x. X(x) & x+(a+1)<=c", "d", move |g| {
                    and(
                        g,
                        "X(b) & (!X(d) | !prec(d,b))",
                        move |g| or(g, b1, false, init),
                        move |g| {
                            let n = "!X(d) | !prec(d,b)";
                            or(g, n, false, move |g| {
                                or(g, n, true, move |g| {
                                    and(g, "X(d) & d+(a+1)<=c", init, move |g| {
                                        or(g, b1, true, |g| {
                                            let s = "!prec(d,b) | !(b+a<=c) | d+(a+1)<=c";
                                            let split = f(s).complement();
                                            truth(g, s, move |g| split_conjunction(g, &split))
                                        })
                                    })
                                })
                            })
                        },
                    )
                })
            })
        })
    })
}

/// Splits a conjunction of literals down to initial sequents.
fn split_conjunction(g: &Sequent, c: &Formula) -> ProofNode {
    match c {
        Formula::And(l, r) => {
            let mut n = node(Rule::And, g);
            n.principal = Some(c.clone());
            let (l, r) = ((**l).clone(), (**r).clone());
            derived(
                n,
                vec![
                    Box::new(move |g: &Sequent| split_conjunction(g, &l)),
                    Box::new(move |g: &Sequent| split_conjunction(g, &r)),
                ],
            )
        }
        _ => init(g),
    }
}

fn overflow(g: &Sequent) -> ProofNode {
    forall(g, "A x. !X(x) | !(x+(c+1)<=c)", "e", |g| {
        or(g, "!X(e) | !(e+(c+1)<=c)", true, |g| truth(g, "!(e+(c+1)<=c)", init))
    })
}
