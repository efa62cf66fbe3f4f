//! Sequents, derivations in free-variable normal form, and the rule checker.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use super::eval::{decide, Assignment};
use super::syntax::{parse_formula, Complexity, Formula, Term};
use crate::wellorder::WellOrderCodec;

/// Finite set of formulas, compared up to renaming of bound variables.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Sequent(BTreeMap<Formula, Formula>);

impl Sequent {
    pub fn new() -> Self {
        Sequent::default()
    }

    pub fn insert(&mut self, f: Formula) -> bool {
        self.0.insert(f.canonical(), f).is_none()
    }

    pub fn with(&self, fs: impl IntoIterator<Item = Formula>) -> Sequent {
        let mut s = self.clone();
        for f in fs {
            s.insert(f);
        }
        s
    }

    pub fn remove(&mut self, f: &Formula) -> bool {
        self.0.remove(&f.canonical()).is_some()
    }

    pub fn contains(&self, f: &Formula) -> bool {
        self.0.contains_key(&f.canonical())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Formula> {
        self.0.values()
    }

    pub fn fv(&self) -> BTreeSet<String> {
        self.iter().flat_map(|f| f.fv()).collect()
    }

    /// Formulas of `self` missing from `other`.
    pub fn minus<'a>(&'a self, other: &'a Sequent) -> impl Iterator<Item = &'a Formula> {
        self.0.iter().filter(|(k, _)| !other.0.contains_key(*k)).map(|(_, v)| v)
    }
}

impl FromIterator<Formula> for Sequent {
    fn from_iter<I: IntoIterator<Item = Formula>>(iter: I) -> Self {
        Sequent::new().with(iter)
    }
}

impl fmt::Display for Sequent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.iter().map(|x| x.to_string()).collect();
        write!(f, "{{{}}}", parts.join(", "))
    }
}

impl Serialize for Sequent {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(self.iter())
    }
}

impl<'de> Deserialize<'de> for Sequent {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        Ok(Vec::<Formula>::deserialize(d)?.into_iter().collect())
    }
}

/// `{∀y.¬X(y), ∃x₀∀x₁.(X(x₀) ∧ (¬X(x₁) ∨ ¬prec(x₁,x₀)))}`.
pub fn build_ti() -> Sequent {
    ti_formulas().into_iter().collect()
}

/// The two members of the TI sequent, universal one first.
pub fn ti_formulas() -> [Formula; 2] {
    [
        parse_formula("A y. !X(y)").expect("fixed"),
        parse_formula("E x0. A x1. X(x0) & (!X(x1) | !prec(x1,x0))").expect("fixed"),
    ]
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Rule {
    Init,
    Or,
    And,
    Exists,
    Forall,
    True,
    Ind,
    Cut,
}

impl Rule {
    pub fn arity(self) -> usize {
        match self {
            Rule::Init => 0,
            Rule::Or | Rule::Exists | Rule::Forall | Rule::True => 1,
            Rule::And | Rule::Cut => 2,
            Rule::Ind => 3,
        }
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = serde_json::to_value(self).expect("unit variant");
        write!(f, "{}", s.as_str().expect("string"))
    }
}

/// One inference. `principal` is the decomposed formula for the logical
/// rules, the true sentence for `true`, `φ(a)` for `ind`, and the cut formula.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProofNode {
    pub rule: Rule,
    pub sequent: Sequent,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub principal: Option<Formula>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<Term>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eigen: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub indterm: Option<Term>,
    #[serde(default)]
    pub children: Vec<ProofNode>,
}

impl ProofNode {
    /// The premises the rule demands, when its data is present and well-shaped.
    pub fn expected_premises(&self) -> Option<Vec<Sequent>> {
        let g = &self.sequent;
        let p = self.principal.as_ref();
        Some(match self.rule {
            Rule::Init => vec![],
            Rule::Or => return None,
            Rule::And => match p? {
                Formula::And(a, b) => vec![g.with([(**a).clone()]), g.with([(**b).clone()])],
                _ => return None,
            },
            Rule::Exists => match p? {
                Formula::Exists(x, b) => vec![g.with([b.subst(x, self.witness.as_ref()?)])],
                _ => return None,
            },
            Rule::Forall => match p? {
                Formula::Forall(x, b) => vec![g.with([b.subst(x, &Term::Var(self.eigen.clone()?))])],
                _ => return None,
            },
            Rule::True => vec![g.with([p?.complement()])],
            Rule::Ind => {
                let (phi0, step, last) = self.induction_instances()?;
                vec![g.with([phi0]), g.with(step), g.with([last.complement()])]
            }
            Rule::Cut => vec![g.with([p?.clone()]), g.with([p?.complement()])],
        })
    }

    /// `φ(0)`, `[¬φ(a), φ(a+1)]`, `φ(t)` of an induction node.
    pub fn induction_instances(&self) -> Option<(Formula, [Formula; 2], Formula)> {
        let phi = self.principal.as_ref()?;
        let a = self.eigen.as_ref()?;
        let t = self.indterm.as_ref()?;
        let succ = Term::add(Term::var(a), Term::Num(1));
        Some((
            phi.subst(a, &Term::Num(0)),
            [phi.complement(), phi.subst(a, &succ)],
            phi.subst(a, t),
        ))
    }

    pub fn height(&self) -> usize {
        self.children.iter().map(|c| c.height() + 1).max().unwrap_or(0)
    }

    /// Reorders children to the canonical order of the rule, when they match.
    pub fn normalize(&mut self) {
        for c in &mut self.children {
            c.normalize();
        }
        let Some(expected) = self.expected_premises() else { return };
        if expected.len() != self.children.len() {
            return;
        }
        let mut taken = vec![false; self.children.len()];
        let mut order = Vec::new();
        for e in &expected {
            let hit = (0..self.children.len()).find(|&i| !taken[i] && self.children[i].sequent == *e);
            // mismatched premises stay where they were for the checker to report
            let Some(i) = hit else { return };
            taken[i] = true;
            order.push(i);
        }
        let mut old: Vec<Option<ProofNode>> = self.children.drain(..).map(Some).collect();
        self.children = order.into_iter().map(|i| old[i].take().expect("once")).collect();
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Derivation {
    pub root: ProofNode,
}

impl Derivation {
    /// Loads a derivation from JSON and puts children in canonical order.
    pub fn from_json(s: &str) -> Result<Derivation, serde_json::Error> {
        let mut root: ProofNode = serde_json::from_str(s)?;
        root.normalize();
        Ok(Derivation { root })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.root).expect("serializable")
    }

    pub fn node(&self, path: &[usize]) -> Option<&ProofNode> {
        let mut n = &self.root;
        for &i in path {
            n = n.children.get(i)?;
        }
        Some(n)
    }

    pub fn node_mut(&mut self, path: &[usize]) -> Option<&mut ProofNode> {
        let mut n = &mut self.root;
        for &i in path {
            n = n.children.get_mut(i)?;
        }
        Some(n)
    }

    pub fn height(&self) -> usize {
        self.root.height()
    }

    /// Node paths in pre-order.
    pub fn paths(&self) -> Vec<Vec<usize>> {
        fn walk(n: &ProofNode, at: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
            out.push(at.clone());
            for (i, c) in n.children.iter().enumerate() {
                at.push(i);
                walk(c, at, out);
                at.pop();
            }
        }
        let mut out = Vec::new();
        walk(&self.root, &mut Vec::new(), &mut out);
        out
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error, Serialize)]
#[serde(tag = "condition", content = "detail", rename_all = "kebab-case")]
pub enum Violation {
    #[error("arity: expected {expected} premises, found {found}")]
    Arity { expected: usize, found: usize },
    #[error("missing rule data: {0}")]
    MissingData(String),
    #[error("principal formula: {0}")]
    Principal(String),
    #[error("premise {0} does not match the rule")]
    Premise(usize),
    #[error("redundancy: {0}")]
    Redundant(String),
    #[error("eigenvariable condition: {0}")]
    Eigenvariable(String),
    #[error("free-variable condition: {0}")]
    FreeVariables(String),
    #[error("classification: {0}")]
    Classification(String),
    #[error("not an initial sequent")]
    NotAnAxiom,
    #[error("false sentence: {0}")]
    FalseSentence(String),
    #[error("unverifiable true sentence: {0}")]
    UnverifiableTrueSentence(String),
    #[error("wrong endsequent")]
    WrongEndsequent,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "kebab-case")]
pub enum Verdict {
    /// `bounded` lists true-sentence nodes with free variables, checked on
    /// every assignment in a finite box rather than decided.
    Accepted { bounded: Vec<Vec<usize>> },
    Rejected { node: Vec<usize>, violation: Violation },
}

impl Verdict {
    pub fn is_accepted(&self) -> bool {
        matches!(self, Verdict::Accepted { .. })
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::Accepted { bounded } if bounded.is_empty() => write!(f, "Accepted"),
            Verdict::Accepted { bounded } => write!(f, "Accepted ({} open true sentences checked on a finite box)", bounded.len()),
            Verdict::Rejected { node, violation } => write!(f, "Rejected at {node:?}: {violation}"),
        }
    }
}

/// Largest box side for open true sentences: at most 10⁵ assignments.
fn box_side(vars: usize, bound: u64) -> u64 {
    let side = (100_000f64).powf(1.0 / vars as f64).floor() as u64;
    side.clamp(1, bound.max(1))
}

enum SentenceCheck {
    Verified,
    Bounded,
    False,
    Unverifiable,
}

fn check_sentence(phi: &Formula, c: &dyn WellOrderCodec, bound: u64) -> SentenceCheck {
    let vars: Vec<String> = phi.fv().into_iter().collect();
    if vars.is_empty() {
        return match decide(phi, &Assignment::new(), c, bound) {
            Some(true) => SentenceCheck::Verified,
            Some(false) => SentenceCheck::False,
            None => SentenceCheck::Unverifiable,
        };
    }
    if !phi.is_delta0() {
        return SentenceCheck::Unverifiable;
    }
    let side = box_side(vars.len(), bound);
    let mut point = vec![0u64; vars.len()];
    loop {
        let e: Assignment = vars.iter().cloned().zip(point.iter().copied()).collect();
        match decide(phi, &e, c, bound) {
            Some(true) => {}
            Some(false) => return SentenceCheck::False,
            None => return SentenceCheck::Unverifiable,
        }
        let Some(i) = point.iter().rposition(|&v| v < side) else {
            return SentenceCheck::Bounded;
        };
        point[i] += 1;
        point[i + 1..].iter_mut().for_each(|v| *v = 0);
    }
}

fn subset(a: &BTreeSet<String>, b: &BTreeSet<String>) -> bool {
    a.is_subset(b)
}

/// Checks one inference; `eigens` holds eigenvariables used earlier in pre-order.
fn check_node(
    n: &ProofNode,
    k: usize,
    c: &dyn WellOrderCodec,
    bound: u64,
    eigens: &mut BTreeSet<String>,
    bounded: &mut bool,
) -> Result<(), Violation> {
    use Violation::*;
    let g = &n.sequent;
    if n.children.len() != n.rule.arity() {
        return Err(Arity {
            expected: n.rule.arity(),
            found: n.children.len(),
        });
    }
    let need = |x: bool, what: &str| if x { Ok(()) } else { Err(MissingData(what.to_string())) };
    match n.rule {
        Rule::Exists => need(n.witness.is_some(), "witness")?,
        Rule::Forall => need(n.eigen.is_some(), "eigenvariable")?,
        Rule::Ind => need(n.eigen.is_some() && n.indterm.is_some(), "eigenvariable and induction term")?,
        _ => {}
    }
    if n.rule != Rule::Init {
        need(n.principal.is_some(), "principal formula")?;
    }
    // classification before anything that depends on it
    if matches!(n.rule, Rule::Ind | Rule::Cut) {
        let p = n.principal.as_ref().expect("checked");
        if p.classify() != Complexity::PSigma(k) {
            return Err(Classification(format!("{p} is {:?}, not pSigma({k})", p.classify())));
        }
    }
    if let Some(a) = &n.eigen {
        if matches!(n.rule, Rule::Forall | Rule::Ind) {
            if g.fv().contains(a) {
                return Err(Eigenvariable(format!("{a} is free in the conclusion")));
            }
            if !eigens.insert(a.clone()) {
                return Err(Eigenvariable(format!("{a} is already an eigenvariable")));
            }
        }
    }
    let premises: Vec<&Sequent> = n.children.iter().map(|c| &c.sequent).collect();
    match n.rule {
        Rule::Init => {
            let closed = g.iter().any(|f| matches!(f, Formula::Lit(..)) && g.contains(&f.complement()));
            if !closed {
                return Err(NotAnAxiom);
            }
        }
        Rule::Or => {
            let p = n.principal.as_ref().expect("checked");
            let Formula::Or(a, b) = p else {
                return Err(Principal(format!("{p} is not a disjunction")));
            };
            if !g.contains(p) {
                return Err(Principal(format!("{p} is not in the conclusion")));
            }
            let ok = [a, b].iter().any(|d| !g.contains(d) && *premises[0] == g.with([(***d).clone()]));
            if !ok {
                return Err(Premise(0));
            }
        }
        _ => {
            let p = n.principal.as_ref().expect("checked");
            let shape_ok = match (n.rule, p) {
                (Rule::And, Formula::And(..)) | (Rule::Exists, Formula::Exists(..)) | (Rule::Forall, Formula::Forall(..)) => true,
                (Rule::True | Rule::Ind | Rule::Cut, _) => true,
                _ => false,
            };
            if !shape_ok {
                return Err(Principal(format!("{p} does not fit rule {}", n.rule)));
            }
            if matches!(n.rule, Rule::And | Rule::Exists | Rule::Forall) && !g.contains(p) {
                return Err(Principal(format!("{p} is not in the conclusion")));
            }
            let expected = n.expected_premises().ok_or_else(|| Principal(format!("{p}")))?;
            for (i, e) in expected.iter().enumerate() {
                if premises[i] != e {
                    return Err(Premise(i));
                }
            }
            // each premise adds formulas that were not there
            for (i, e) in expected.iter().enumerate() {
                let added = e.len() - g.len();
                let want = if n.rule == Rule::Ind && i == 1 { 2 } else { 1 };
                if added != want {
                    return Err(Redundant(format!("premise {i} repeats a formula of the conclusion")));
                }
            }
        }
    }
    let fv = g.fv();
    match n.rule {
        Rule::Exists => {
            let u = n.witness.as_ref().expect("checked");
            if !subset(&u.vars(), &fv) || premises[0].fv() != fv {
                return Err(FreeVariables(format!("witness {u} must use only free variables of the conclusion")));
            }
        }
        Rule::Forall => {
            let a = n.eigen.as_ref().expect("checked");
            let mut allowed = fv.clone();
            allowed.insert(a.clone());
            if !subset(&premises[0].fv(), &allowed) {
                return Err(FreeVariables("premise introduces other free variables".into()));
            }
        }
        Rule::True => {
            let p = n.principal.as_ref().expect("checked");
            if !p.is_x_free() {
                return Err(Principal(format!("{p} mentions X")));
            }
            if !subset(&p.fv(), &fv) {
                return Err(FreeVariables(format!("{p} has free variables outside the conclusion")));
            }
            match check_sentence(p, c, bound) {
                SentenceCheck::Verified => {}
                SentenceCheck::Bounded => *bounded = true,
                SentenceCheck::False => return Err(FalseSentence(p.to_string())),
                SentenceCheck::Unverifiable => return Err(UnverifiableTrueSentence(p.to_string())),
            }
        }
        Rule::Ind => {
            let a = n.eigen.as_ref().expect("checked");
            let t = n.indterm.as_ref().expect("checked");
            let (_, _, phi_t) = n.induction_instances().expect("checked");
            if !subset(&t.vars(), &phi_t.fv()) {
                return Err(FreeVariables(format!("variables of {t} must occur in the instance")));
            }
            if premises[0].fv() != fv || premises[2].fv() != fv {
                return Err(FreeVariables("outer premises must keep the free variables".into()));
            }
            let mut with_a = fv.clone();
            with_a.insert(a.clone());
            if premises[1].fv() != with_a {
                return Err(FreeVariables(format!("step premise must add exactly {a}")));
            }
        }
        Rule::Cut => {
            if premises[0].fv() != fv || premises[1].fv() != fv {
                return Err(FreeVariables("cut formula introduces free variables".into()));
            }
        }
        _ => {}
    }
    Ok(())
}

/// Checks an IΣₖ(X)-derivation rule by rule in pre-order and reports the
/// first violation.
pub fn check_derivation(d: &Derivation, k: usize, c: &dyn WellOrderCodec, search_bound: u64) -> Verdict {
    let mut eigens = BTreeSet::new();
    let mut bounded_nodes = Vec::new();
    for path in d.paths() {
        let n = d.node(&path).expect("listed");
        let mut bounded = false;
        if let Err(violation) = check_node(n, k, c, search_bound, &mut eigens, &mut bounded) {
            return Verdict::Rejected { node: path, violation };
        }
        if bounded {
            bounded_nodes.push(path);
        }
    }
    Verdict::Accepted { bounded: bounded_nodes }
}

/// As [`check_derivation`], also requiring the endsequent to be TI(≺).
pub fn check_ti_derivation(d: &Derivation, k: usize, c: &dyn WellOrderCodec, search_bound: u64) -> Verdict {
    if d.root.sequent != build_ti() {
        return Verdict::Rejected {
            node: vec![],
            violation: Violation::WrongEndsequent,
        };
    }
    check_derivation(d, k, c, search_bound)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum MutationKind {
    RuleSwap,
    EigenvariableCapture,
    DroppedSideFormula,
    NonPSigmaInduction,
}

#[derive(Clone, Debug)]
pub struct Mutation {
    pub node: Vec<usize>,
    pub kind: MutationKind,
    pub derivation: Derivation,
}

fn rename_free(n: &mut ProofNode, from: &str, to: &str) {
    let t = Term::var(to);
    n.sequent = n.sequent.iter().map(|f| f.subst(from, &t)).collect();
    n.principal = n.principal.as_ref().map(|f| f.subst(from, &t));
    n.witness = n.witness.as_ref().map(|u| u.subst(from, &t));
    n.indterm = n.indterm.as_ref().map(|u| u.subst(from, &t));
    if n.eigen.as_deref() == Some(from) {
        n.eigen = Some(to.to_string());
    }
    for c in &mut n.children {
        rename_free(c, from, to);
    }
}

/// Single-node corruptions of a derivation, each localized at `node`.
pub fn single_node_mutations(d: &Derivation) -> Vec<Mutation> {
    let mut out = Vec::new();
    for path in d.paths() {
        let n = d.node(&path).expect("listed");
        if n.rule == Rule::Init {
            continue;
        }
        let mut push = |kind, f: &dyn Fn(&mut ProofNode)| {
            let mut m = d.clone();
            f(m.node_mut(&path).expect("listed"));
            out.push(Mutation {
                node: path.clone(),
                kind,
                derivation: m,
            });
        };
        let swapped = match n.rule {
            Rule::Or => Rule::And,
            Rule::And => Rule::Or,
            Rule::Exists => Rule::Forall,
            Rule::Forall => Rule::Exists,
            Rule::True => Rule::Cut,
            Rule::Ind => Rule::Cut,
            Rule::Cut => Rule::Ind,
            Rule::Init => unreachable!(),
        };
        push(MutationKind::RuleSwap, &|m: &mut ProofNode| {
            m.rule = swapped;
            if swapped == Rule::Forall {
                m.witness = None;
            }
            if swapped == Rule::Exists {
                m.eigen = None;
            }
        });
        // drop a side formula from the first premise
        let fixed: Vec<Formula> = n
            .sequent
            .iter()
            .filter(|f| Some(*f) != n.principal.as_ref())
            .cloned()
            .collect();
        if let Some(side) = fixed.last().cloned() {
            push(MutationKind::DroppedSideFormula, &|m: &mut ProofNode| {
                m.children[0].sequent.remove(&side);
            });
        }
        if let (Rule::Forall | Rule::Ind, Some(a)) = (n.rule, n.eigen.clone()) {
            if let Some(v) = n.sequent.fv().into_iter().next() {
                push(MutationKind::EigenvariableCapture, &|m: &mut ProofNode| rename_free(m, &a, &v));
            }
        }
        if matches!(n.rule, Rule::Ind | Rule::Cut) {
            if let Some(Formula::Exists(x, body)) = n.principal.clone() {
                let flipped = Formula::Forall(x.clone(), body.clone());
                push(MutationKind::NonPSigmaInduction, &|m: &mut ProofNode| m.principal = Some(flipped.clone()));
                let dropped = body.subst(&x, &Term::Num(0));
                push(MutationKind::NonPSigmaInduction, &|m: &mut ProofNode| m.principal = Some(dropped.clone()));
            }
        }
    }
    out
}
