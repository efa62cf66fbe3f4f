//! Prover strategy read off an IΣ₁(X)-derivation of TI(≺).
//!
//! The strategy walks the derivation along `c(T)`: the homomorphism `V`
//! sends game-tree nodes to derivation nodes, `E` assigns the free
//! variables of the current sequent, and `W` holds counterexamples for its
//! universal members. Every transition keeps condition (†), which
//! [`validate_dagger`] checks.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;
use thiserror::Error;

use crate::game::{PartialPredicate, Play, Position, Position1, ProverOption, Transcript};
use crate::logic::{
    check_ti_derivation, decide, eval3, eval_term, forces, least_witness, min_query_set, ti_formulas, Assignment,
    Complexity, Derivation, EvalError, Formula, ProofNode, Rule, Sequent, Term, Truth,
};
use crate::strategy::{Prover, StrategyError};
use crate::tree::{GameTree, NodePath};
use crate::wellorder::WellOrderCodec;

/// Path of a node in the derivation tree.
pub type ProofPath = Vec<usize>;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ExtractionState {
    /// `V`: game-tree node to derivation node.
    pub v: BTreeMap<NodePath, ProofPath>,
    /// `E`: values of the free variables of the current sequent.
    pub e: Assignment,
    /// `W`, keyed by canonical formula.
    #[serde(serialize_with = "ser_w")]
    pub w: BTreeMap<Formula, u64>,
}

fn ser_w<S: serde::Serializer>(w: &BTreeMap<Formula, u64>, s: S) -> Result<S::Ok, S::Error> {
    s.collect_map(w.iter().map(|(f, n)| (f.to_string(), n)))
}

impl ExtractionState {
    pub fn counterexample(&self, f: &Formula) -> Option<u64> {
        self.w.get(&f.canonical()).copied()
    }

    pub fn set_counterexample(&mut self, f: &Formula, n: u64) {
        self.w.insert(f.canonical(), n);
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ExtractionError {
    #[error("derivation not accepted: {0}")]
    NotAccepted(String),
    #[error("initial sequent reached at {0:?}")]
    InitialSequent(ProofPath),
    #[error("no induction or cut introduces {0}")]
    NoIntroduction(String),
    #[error("witness search exhausted for {0}")]
    Unverifiable(String),
    #[error("evaluation: {0}")]
    Eval(#[from] EvalError),
    #[error("{0}")]
    Internal(String),
}

impl From<ExtractionError> for StrategyError {
    fn from(e: ExtractionError) -> Self {
        StrategyError::Internal(e.to_string())
    }
}

/// `V = {∅ ↦ ∅}`, `E = ∅`, `W = {∀y.¬X(y) ↦ m₀}`.
pub fn init_state(m0: u64) -> ExtractionState {
    let mut s = ExtractionState {
        v: BTreeMap::from([(vec![], vec![])]),
        e: Assignment::new(),
        w: BTreeMap::new(),
    };
    s.set_counterexample(&ti_formulas()[0], m0);
    s
}

fn node<'a>(d: &'a Derivation, p: &[usize]) -> Result<&'a ProofNode, ExtractionError> {
    d.node(p).ok_or_else(|| ExtractionError::Internal(format!("no derivation node at {p:?}")))
}

fn image<'a>(s: &'a ExtractionState, v: &[u64]) -> Result<&'a ProofPath, ExtractionError> {
    s.v.get(v).ok_or_else(|| ExtractionError::Internal(format!("V undefined at {v:?}")))
}

/// The ∃-rule cases of the construction.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum ExistsCase {
    Determined,
    TiSubformula,
    Sigma1,
}

fn exists_case(principal: &Formula) -> ExistsCase {
    if principal.is_x_free() || principal.is_delta0() {
        ExistsCase::Determined
    } else if principal.alpha_eq(&ti_formulas()[1]) {
        ExistsCase::TiSubformula
    } else {
        ExistsCase::Sigma1
    }
}

fn instance(n: &ProofNode) -> Result<(Formula, Term), ExtractionError> {
    match (&n.principal, &n.witness) {
        (Some(Formula::Exists(x, body)), Some(u)) => Ok((body.subst(x, u), u.clone())),
        _ => Err(ExtractionError::Internal("malformed ∃ node".into())),
    }
}

/// Prover strategy extracted from a checked derivation of TI(≺).
#[derive(Clone)]
pub struct ExtractedProver {
    d: Derivation,
    search_bound: u64,
    state: Option<ExtractionState>,
    pending: Option<ExtractionState>,
    reports: Vec<DaggerReport>,
}

impl ExtractedProver {
    /// Fails unless `d` is an accepted IΣ₁(X)-derivation of TI(≺) under `c`.
    pub fn new(d: Derivation, c: &dyn WellOrderCodec, search_bound: u64) -> Result<Self, ExtractionError> {
        let v = check_ti_derivation(&d, 1, c, search_bound);
        if !v.is_accepted() {
            return Err(ExtractionError::NotAccepted(v.to_string()));
        }
        Ok(ExtractedProver {
            d,
            search_bound,
            state: None,
            pending: None,
            reports: Vec::new(),
        })
    }

    /// The game height the strategy is built for.
    pub fn height(&self) -> usize {
        self.d.height()
    }

    pub fn state(&self) -> Option<&ExtractionState> {
        self.state.as_ref()
    }

    /// One (†) report per position reached, the initial one first.
    pub fn reports(&self) -> &[DaggerReport] {
        &self.reports
    }

    fn sync(&mut self, play: &Play) -> Result<(), ExtractionError> {
        if play.turn() == 0 || self.state.is_none() {
            let first = play.positions[0].rho();
            let m0 = first
                .ones()
                .next()
                .ok_or_else(|| ExtractionError::Internal("initial position has no claim".into()))?;
            let s = init_state(m0);
            self.reports = vec![validate_dagger(&s, play.current().innermost(), &self.d, play.codec, self.search_bound)];
            self.state = Some(s);
        }
        Ok(())
    }

    fn current(&self, play: &Play) -> Result<(NodePath, &ProofNode), ExtractionError> {
        let s = self.state.as_ref().expect("synced");
        let v = play.current().tree().leftmost_leaf();
        let n = node(&self.d, image(s, &v)?)?;
        Ok((v, n))
    }

    fn query_set(&self, play: &Play) -> Result<BTreeSet<u64>, ExtractionError> {
        let (_, n) = self.current(play)?;
        let s = self.state.as_ref().expect("synced");
        if n.rule == Rule::Init {
            return Err(ExtractionError::InitialSequent(image(s, &play.current().tree().leftmost_leaf())?.clone()));
        }
        if n.rule != Rule::Exists {
            return Ok(BTreeSet::new());
        }
        let p = n.principal.as_ref().expect("checked derivation");
        let (inst, u) = instance(n)?;
        Ok(match exists_case(p) {
            ExistsCase::Determined => BTreeSet::new(),
            ExistsCase::TiSubformula => BTreeSet::from([eval_term(&u, &s.e)?]),
            ExistsCase::Sigma1 => min_query_set(&inst, &s.e, play.current().rho(), play.codec)?,
        })
    }

    /// Option and successor state for the current turn.
    fn transition(
        &self,
        play: &Play,
        answer: &PartialPredicate,
    ) -> Result<(ProverOption, ExtractionState), ExtractionError> {
        let c = play.codec;
        let s = self.state.as_ref().expect("synced");
        let tree = play.current().tree();
        let (v, n) = self.current(play)?;
        let pv = image(s, &v)?.clone();
        let rho = match play.current().rho().merge(answer) {
            Ok(r) => r,
            // the referee rules on contradictions; any legal option will do
            Err(_) => return Ok((ProverOption::expand(0), s.clone())),
        };
        let child = |i: usize, s: &ExtractionState| {
            let mut s = s.clone();
            let mut to = pv.clone();
            to.push(i);
            s.v.insert(child_of(&v, 0), to);
            s
        };
        let one = |s: ExtractionState| Ok((ProverOption::expand(0), s));
        let principal = || n.principal.as_ref().expect("checked derivation");
        match n.rule {
            Rule::Init => Err(ExtractionError::InitialSequent(pv)),
            Rule::Or => one(child(0, s)),
            Rule::True => {
                let mut next = child(0, s);
                let phi = principal();
                let neg = phi.complement();
                if matches!(neg.classify(), Complexity::PPi(_)) {
                    let w = least_witness(phi, &s.e, c, self.search_bound)
                        .ok_or_else(|| ExtractionError::Unverifiable(phi.to_string()))?;
                    next.set_counterexample(&neg, w);
                }
                one(next)
            }
            Rule::Cut | Rule::Ind => {
                let last = if n.rule == Rule::Cut {
                    1
                } else {
                    eval_term(n.indterm.as_ref().expect("checked derivation"), &s.e)? + 1
                };
                let mut next = s.clone();
                for i in 0..=last {
                    let k = match (n.rule, i) {
                        (Rule::Cut, i) => i as usize,
                        (_, 0) => 0,
                        (_, i) if i == last => 2,
                        _ => 1,
                    };
                    let mut to = pv.clone();
                    to.push(k);
                    next.v.insert(child_of(&v, i), to);
                }
                Ok((ProverOption::expand(last), next))
            }
            Rule::And => {
                let Formula::And(l, r) = principal() else {
                    return Err(ExtractionError::Internal("malformed ∧ node".into()));
                };
                let i = [l, r]
                    .iter()
                    .position(|f| matches!(eval3(f, &s.e, &rho, c), Ok(Truth::False)))
                    .ok_or_else(|| ExtractionError::Internal(format!("no conjunct of {} is falsified", principal())))?;
                one(child(i, s))
            }
            Rule::Forall => {
                let p = principal();
                let a = n.eigen.clone().expect("checked derivation");
                let val = match s.counterexample(p) {
                    Some(w) => w,
                    None => self.falsifying_instance(p, &s.e, &rho, c)?,
                };
                let mut next = child(0, s);
                next.e.insert(a, val);
                one(next)
            }
            Rule::Exists => {
                let (inst, u) = instance(n)?;
                match exists_case(principal()) {
                    ExistsCase::Determined => one(child(0, s)),
                    ExistsCase::TiSubformula => {
                        let q = eval_term(&u, &s.e)?;
                        let w = if rho.get(q) == Some(true) {
                            answer
                                .ones()
                                .find(|&m| c.prec(m, q))
                                .ok_or_else(|| ExtractionError::Internal(format!("answer claims {q} without a ≺-smaller point")))?
                        } else {
                            0
                        };
                        let mut next = child(0, s);
                        next.set_counterexample(&inst, w);
                        one(next)
                    }
                    ExistsCase::Sigma1 => match eval3(&inst, &s.e, &rho, c)? {
                        Truth::False => one(child(0, s)),
                        Truth::Unknown => Err(ExtractionError::Internal(format!("{inst} undecided after the query"))),
                        Truth::True => self.backtrack(s, tree, &v, principal(), eval_term(&u, &s.e)?),
                    },
                }
            }
        }
    }

    /// Least instance of a Δ₀ universal formula forced false.
    fn falsifying_instance(
        &self,
        p: &Formula,
        e: &Assignment,
        rho: &PartialPredicate,
        c: &dyn WellOrderCodec,
    ) -> Result<u64, ExtractionError> {
        let Formula::Forall(x, body) = p else {
            return Err(ExtractionError::Internal("malformed ∀ node".into()));
        };
        (0..=self.search_bound)
            .find(|&i| matches!(eval3(&body.subst(x, &Term::Num(i)), e, rho, c), Ok(Truth::False)))
            .ok_or_else(|| ExtractionError::Unverifiable(format!("no counterexample for {p}")))
    }

    /// A pΣ₁ formula turned out true: return to the induction or cut that
    /// introduced it and move to the next premise.
    fn backtrack(
        &self,
        s: &ExtractionState,
        tree: &GameTree,
        v: &NodePath,
        target: &Formula,
        witness: u64,
    ) -> Result<(ProverOption, ExtractionState), ExtractionError> {
        let seq = |i: usize| -> Result<&Sequent, ExtractionError> { Ok(&node(&self.d, image(s, &v[..i])?)?.sequent) };
        let mut intro = None;
        for i in 0..v.len() {
            if !seq(i)?.contains(target) && seq(i + 1)?.contains(target) {
                intro = Some(i);
                break;
            }
        }
        let i = intro.ok_or_else(|| ExtractionError::NoIntroduction(target.to_string()))?;
        let w = &v[..i];
        let m = node(&self.d, image(s, w)?)?;
        let k = v[i];
        let delta = &m.sequent;
        let fv = delta.fv();
        let mut next = ExtractionState {
            v: BTreeMap::new(),
            e: s.e.iter().filter(|(x, _)| fv.contains(*x)).map(|(x, n)| (x.clone(), *n)).collect(),
            w: s.w.iter().filter(|(f, _)| delta.contains(f)).map(|(f, n)| (f.clone(), *n)).collect(),
        };
        match m.rule {
            Rule::Cut if k == 0 => {
                next.set_counterexample(&m.principal.as_ref().expect("checked").complement(), witness);
            }
            Rule::Ind => {
                let (_, [neg_a, _], phi_t) = m.induction_instances().expect("checked");
                let last = eval_term(m.indterm.as_ref().expect("checked"), &s.e)?;
                if k >= last {
                    next.set_counterexample(&phi_t.complement(), witness);
                } else {
                    next.e.insert(m.eigen.clone().expect("checked"), k);
                    next.set_counterexample(&neg_a, witness);
                }
            }
            _ => return Err(ExtractionError::NoIntroduction(format!("{target} (introduced by {})", m.rule))),
        }
        let cut = tree
            .cut(w)
            .map_err(|e| ExtractionError::Internal(format!("cut at {w:?}: {e}")))?;
        next.v = s.v.iter().filter(|(p, _)| cut.contains(p)).map(|(p, q)| (p.clone(), q.clone())).collect();
        Ok((ProverOption::cut(w.to_vec()), next))
    }
}

fn child_of(v: &[u64], i: u64) -> NodePath {
    let mut c = v.to_vec();
    c.push(i);
    c
}

impl Prover for ExtractedProver {
    fn query(&mut self, play: &Play) -> Result<BTreeSet<u64>, StrategyError> {
        self.sync(play)?;
        Ok(self.query_set(play)?)
    }

    fn option(
        &mut self,
        play: &Play,
        _query: &BTreeSet<u64>,
        answer: &PartialPredicate,
    ) -> Result<ProverOption, StrategyError> {
        self.sync(play)?;
        let (o, next) = self.transition(play, answer)?;
        self.pending = Some(next);
        Ok(o)
    }

    fn observe(&mut self, play: &Play, _query: &BTreeSet<u64>, _answer: &PartialPredicate, next: Option<&Position>) {
        let (Some(p), Some(s)) = (next, self.pending.take()) else { return };
        self.reports
            .push(validate_dagger(&s, p.innermost(), &self.d, play.codec, self.search_bound));
        self.state = Some(s);
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum DaggerClause {
    Homomorphism,
    AssignmentDomain,
    CounterexampleDomain,
    Cut,
    Induction,
    Falsification,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DaggerCheck {
    pub clause: DaggerClause,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DaggerReport {
    pub checks: Vec<DaggerCheck>,
}

impl DaggerReport {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn clause(&self, c: DaggerClause) -> Option<&DaggerCheck> {
        self.checks.iter().find(|x| x.clause == c)
    }

    pub fn failures(&self) -> impl Iterator<Item = &DaggerCheck> {
        self.checks.iter().filter(|c| !c.pass)
    }
}

fn verdict(clause: DaggerClause, r: Result<(), String>) -> DaggerCheck {
    DaggerCheck {
        clause,
        pass: r.is_ok(),
        detail: r.err(),
    }
}

fn check_homomorphism(s: &ExtractionState, t: &GameTree, d: &Derivation) -> Result<(), String> {
    for x in t.nodes() {
        let Some(px) = s.v.get(x) else {
            return Err(format!("V undefined at {x:?}"));
        };
        if d.node(px).is_none() {
            return Err(format!("V({x:?}) = {px:?} is not a derivation node"));
        }
        if let Some((_, parent)) = x.split_last() {
            let pp = s.v.get(parent).ok_or_else(|| format!("V undefined at {parent:?}"))?;
            if px.len() != pp.len() + 1 || !px.starts_with(pp) {
                return Err(format!("V({x:?}) is not a child of V({parent:?})"));
            }
        }
    }
    if s.v.keys().any(|x| !t.contains(x)) {
        return Err("V defined outside T".into());
    }
    Ok(())
}

fn label<'a>(s: &ExtractionState, d: &'a Derivation, x: &[u64]) -> Result<&'a ProofNode, String> {
    s.v.get(x)
        .and_then(|p| d.node(p))
        .ok_or_else(|| format!("no label at {x:?}"))
}

fn check_cuts_and_inductions(
    s: &ExtractionState,
    t: &GameTree,
    d: &Derivation,
    want: Rule,
) -> Result<(), String> {
    let v = t.leftmost_leaf();
    for i in 0..v.len() {
        let w = &v[..i];
        let m = label(s, d, w)?;
        if m.rule != want {
            continue;
        }
        let n = v[i];
        let here = &label(s, d, &v[..=i])?.sequent;
        let expected = m.expected_premises().ok_or("malformed rule data")?;
        let g = &m.sequent;
        match want {
            Rule::Cut => {
                let phi = m.principal.as_ref().ok_or("cut without formula")?;
                match n {
                    0 if *here == g.with([phi.clone()]) => {
                        if !t.contains(&child_of(w, 1)) {
                            return Err(format!("{w:?}*1 missing from T"));
                        }
                    }
                    1 if *here == g.with([phi.complement()]) => {}
                    _ => return Err(format!("cut at {w:?}: branch {n} has the wrong label")),
                }
            }
            _ => {
                let tv = m
                    .indterm
                    .as_ref()
                    .ok_or("induction without term")
                    .and_then(|u| eval_term(u, &s.e).map_err(|_| "E does not cover the induction term"))?;
                if n > tv + 1 {
                    return Err(format!("induction at {w:?}: branch {n} beyond {}", tv + 1));
                }
                if let Some(l) = (n..=tv + 1).find(|&l| !t.contains(&child_of(w, l))) {
                    return Err(format!("induction at {w:?}: {w:?}*{l} missing from T"));
                }
                let k = if n == 0 {
                    0
                } else if n == tv + 1 {
                    2
                } else {
                    1
                };
                if *here != expected[k] {
                    return Err(format!("induction at {w:?}: branch {n} has the wrong label"));
                }
                if k == 1 {
                    let a = m.eigen.as_ref().ok_or("induction without eigenvariable")?;
                    if s.e.get(a) != Some(&(n - 1)) {
                        return Err(format!("induction at {w:?}: E({a}) = {:?}, expected {}", s.e.get(a), n - 1));
                    }
                }
            }
        }
    }
    Ok(())
}

fn check_falsified(
    s: &ExtractionState,
    gamma: &Sequent,
    rho: &PartialPredicate,
    c: &dyn WellOrderCodec,
    bound: u64,
) -> Result<(), String> {
    let counter = |f: &Formula| -> Result<Formula, String> {
        let Formula::Forall(x, body) = f else { unreachable!("pΠ formulas start with ∀") };
        let w = s.counterexample(f).ok_or_else(|| format!("no counterexample for {f}"))?;
        Ok(body.subst(x, &Term::Num(w)).complement())
    };
    for f in gamma.iter() {
        let pi1 = f.classify() == Complexity::PPi(1);
        if f.is_x_free() {
            if decide(f, &s.e, c, bound) != Some(false) {
                return Err(format!("{f} is not false under E"));
            }
            if matches!(f.classify(), Complexity::PPi(_)) {
                let neg = counter(f)?;
                if decide(&neg, &s.e, c, bound) != Some(true) {
                    return Err(format!("W({f}) is not a counterexample"));
                }
            }
        } else if f.is_delta0() {
            if !forces(&f.complement(), &s.e, rho, c).unwrap_or(false) {
                return Err(format!("{f} is not forced false"));
            }
        } else if pi1 && !forces(&counter(f)?, &s.e, rho, c).unwrap_or(false) {
            return Err(format!("W({f}) = {:?} is not forced to be a counterexample", s.counterexample(f)));
        }
    }
    Ok(())
}

/// Checks condition (†) for a state at a 𝒢₁ position.
pub fn validate_dagger(
    s: &ExtractionState,
    p: &Position1,
    d: &Derivation,
    c: &dyn WellOrderCodec,
    search_bound: u64,
) -> DaggerReport {
    let t = &p.tree;
    let hom = check_homomorphism(s, t, d);
    let mut checks = vec![verdict(DaggerClause::Homomorphism, hom.clone())];
    let here = if hom.is_ok() {
        label(s, d, &t.leftmost_leaf()).ok()
    } else {
        None
    };
    let Some(here) = here else {
        return DaggerReport { checks };
    };
    let gamma = &here.sequent;
    let fv = gamma.fv();
    let dom: BTreeSet<String> = s.e.keys().cloned().collect();
    checks.push(verdict(
        DaggerClause::AssignmentDomain,
        if dom == fv {
            Ok(())
        } else {
            Err(format!("dom E = {dom:?}, fv = {fv:?}"))
        },
    ));
    let missing = gamma
        .iter()
        .find(|f| matches!(f.classify(), Complexity::PPi(_)) && s.counterexample(f).is_none());
    checks.push(verdict(
        DaggerClause::CounterexampleDomain,
        missing.map_or(Ok(()), |f| Err(format!("W undefined at {f}"))),
    ));
    checks.push(verdict(DaggerClause::Cut, check_cuts_and_inductions(s, t, d, Rule::Cut)));
    checks.push(verdict(DaggerClause::Induction, check_cuts_and_inductions(s, t, d, Rule::Ind)));
    checks.push(verdict(
        DaggerClause::Falsification,
        check_falsified(s, gamma, &p.rho, c, search_bound),
    ));
    DaggerReport { checks }
}

/// Re-drives a fresh copy of `prover` along a finished transcript and
/// returns the (†) report of every position, failing if the transcript
/// departs from what the strategy would have played.
pub fn dagger_trace(
    prover: &ExtractedProver,
    t: &Transcript,
    c: &dyn WellOrderCodec,
) -> Result<Vec<DaggerReport>, ExtractionError> {
    let mut p = prover.clone();
    p.state = None;
    let initial = t
        .initial
        .clone()
        .ok_or_else(|| ExtractionError::Internal("transcript has no initial position".into()))?;
    let mut positions = vec![initial];
    p.sync(&Play {
        k: t.k,
        h: t.h,
        codec: c,
        positions: &positions,
    })?;
    for rec in &t.turns {
        let play = Play {
            k: t.k,
            h: t.h,
            codec: c,
            positions: &positions,
        };
        let q = p.query_set(&play)?;
        if q != rec.query {
            return Err(ExtractionError::Internal(format!("turn {}: query differs", rec.turn)));
        }
        let Some(next) = &rec.next else { break };
        let (o, s) = p.transition(&play, &rec.answer)?;
        p.pending = Some(s);
        if Some(&o) != rec.option.as_ref() {
            return Err(ExtractionError::Internal(format!("turn {}: option differs", rec.turn)));
        }
        p.observe(&play, &q, &rec.answer, Some(next));
        positions.push(next.clone());
    }
    Ok(p.reports)
}
