//! The games 𝒢₁(≺,h) and 𝒢ₖ₊₁(≺,h).
//!
//! A level-1 position is a game tree together with Delayer's answers so far.
//! A level-(k+1) position is a nonempty sequence of level-k positions (a
//! partial record of a 𝒢ₖ play). Levels are not tracked in the type; they are
//! implied by nesting depth and checked by [`Position::level`].

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt;

use serde::de::{self, MapAccess, Visitor};
use serde::ser::SerializeMap;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::ordinal::{nat_sum_two_pows, omega_pow, Ordinal};
use crate::strategy::{Delayer, Prover};
use crate::tree::{GameTree, NodePath, TreeError};
use crate::wellorder::WellOrderCodec;

/// A finite partial map ℕ → {0,1}.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PartialPredicate(BTreeMap<u64, bool>);

impl PartialPredicate {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn singleton(n: u64, v: bool) -> Self {
        PartialPredicate(BTreeMap::from([(n, v)]))
    }

    pub fn get(&self, n: u64) -> Option<bool> {
        self.0.get(&n).copied()
    }

    pub fn insert(&mut self, n: u64, v: bool) -> Option<bool> {
        self.0.insert(n, v)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (u64, bool)> + '_ {
        self.0.iter().map(|(&k, &v)| (k, v))
    }

    pub fn domain(&self) -> impl Iterator<Item = u64> + '_ {
        self.0.keys().copied()
    }

    /// `ρ⁻¹(1)`.
    pub fn ones(&self) -> impl Iterator<Item = u64> + '_ {
        self.0.iter().filter(|(_, &v)| v).map(|(&k, _)| k)
    }

    pub fn covers<'a, I: IntoIterator<Item = &'a u64>>(&self, q: I) -> bool {
        q.into_iter().all(|n| self.0.contains_key(n))
    }

    /// First point where the two predicates disagree.
    pub fn conflict_with(&self, other: &PartialPredicate) -> Option<u64> {
        let (small, large) = if self.len() <= other.len() {
            (self, other)
        } else {
            (other, self)
        };
        small
            .iter()
            .find(|&(n, v)| large.get(n).is_some_and(|w| w != v))
            .map(|(n, _)| n)
    }

    /// `self ∪ other` when that is still a partial predicate.
    pub fn merge(&self, other: &PartialPredicate) -> Result<PartialPredicate, u64> {
        if let Some(n) = self.conflict_with(other) {
            return Err(n);
        }
        let mut out = self.clone();
        out.0.extend(other.0.iter().map(|(&k, &v)| (k, v)));
        Ok(out)
    }

    /// `other ⊆ self` as graphs.
    pub fn extends(&self, other: &PartialPredicate) -> bool {
        other.iter().all(|(n, v)| self.get(n) == Some(v))
    }
}

impl FromIterator<(u64, bool)> for PartialPredicate {
    fn from_iter<I: IntoIterator<Item = (u64, bool)>>(iter: I) -> Self {
        PartialPredicate(iter.into_iter().collect())
    }
}

impl Serialize for PartialPredicate {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut map = serializer.serialize_map(Some(self.0.len()))?;
        for (k, v) in &self.0 {
            map.serialize_entry(&k.to_string(), &u8::from(*v))?;
        }
        map.end()
    }
}

impl<'de> Deserialize<'de> for PartialPredicate {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        struct V;
        impl<'de> Visitor<'de> for V {
            type Value = PartialPredicate;

            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a map from naturals to 0 or 1")
            }

            fn visit_map<A: MapAccess<'de>>(self, mut map: A) -> Result<Self::Value, A::Error> {
                let mut out = BTreeMap::new();
                while let Some((k, v)) = map.next_entry::<String, u8>()? {
                    let n: u64 = k.parse().map_err(de::Error::custom)?;
                    let bit = match v {
                        0 => false,
                        1 => true,
                        _ => return Err(de::Error::custom("answer bits must be 0 or 1")),
                    };
                    out.insert(n, bit);
                }
                Ok(PartialPredicate(out))
            }
        }
        deserializer.deserialize_map(V)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Position1 {
    pub tree: GameTree,
    pub rho: PartialPredicate,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Position {
    Base(Position1),
    Seq(Vec<Position>),
}

impl Position {
    /// Nesting depth: 1 for a bare (T, ρ).
    pub fn level(&self) -> usize {
        match self {
            Position::Base(_) => 1,
            Position::Seq(v) => 1 + v.first().map_or(0, Position::level),
        }
    }

    /// `e(σ)`, the last entry of a sequence position.
    pub fn last(&self) -> Option<&Position> {
        match self {
            Position::Base(_) => None,
            Position::Seq(v) => v.last(),
        }
    }

    pub fn entries(&self) -> &[Position] {
        match self {
            Position::Base(_) => &[],
            Position::Seq(v) => v,
        }
    }

    /// `e^n(self)`.
    pub fn e_pow(&self, n: usize) -> &Position {
        let mut p = self;
        for _ in 0..n {
            p = p.last().expect("e applied to a level-1 position");
        }
        p
    }

    /// The level-1 position reached by following last entries.
    pub fn innermost(&self) -> &Position1 {
        match self {
            Position::Base(p) => p,
            Position::Seq(v) => v.last().expect("nonempty sequence").innermost(),
        }
    }

    /// `T_k(P)`.
    pub fn tree(&self) -> &GameTree {
        &self.innermost().tree
    }

    /// `R_k(P)`.
    pub fn rho(&self) -> &PartialPredicate {
        &self.innermost().rho
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(untagged)]
pub enum OptionArg {
    Index(u64),
    Node(NodePath),
}

/// Prover's option `⟨o, b⟩`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ProverOption {
    pub o: usize,
    pub b: OptionArg,
}

impl ProverOption {
    pub fn expand(b: u64) -> Self {
        ProverOption {
            o: 0,
            b: OptionArg::Index(b),
        }
    }

    pub fn cut(b: NodePath) -> Self {
        ProverOption {
            o: 1,
            b: OptionArg::Node(b),
        }
    }

    pub fn backtrack(o: usize, b: u64) -> Self {
        ProverOption {
            o,
            b: OptionArg::Index(b),
        }
    }
}

impl fmt::Display for ProverOption {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.b {
            OptionArg::Index(b) => write!(f, "<{},{}>", self.o, b),
            OptionArg::Node(b) => write!(f, "<{},{:?}>", self.o, b),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Move {
    pub query: BTreeSet<u64>,
    pub answer: PartialPredicate,
    pub option: ProverOption,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Reason {
    Contradiction,
    HeightExceeded,
    MissingRightSibling,
    BacktrackOutOfRange,
    InnerLoss,
}

impl fmt::Display for Reason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Reason::Contradiction => "contradiction",
            Reason::HeightExceeded => "height-exceeded",
            Reason::MissingRightSibling => "missing-right-sibling",
            Reason::BacktrackOutOfRange => "backtrack-out-of-range",
            Reason::InnerLoss => "inner-loss",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Outcome {
    Next(Position),
    ProverWins(Reason),
    ProverLoses(Reason),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum AnswerCheck {
    Legal,
    Contradiction,
    Illegal(IllegalAnswer),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Error)]
pub enum IllegalAnswer {
    #[error("query point {0} is not answered")]
    Uncovered(u64),
    #[error("query point {0} is answered 1 without a smaller point answered 1")]
    NotProgressive(u64),
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum MoveError {
    #[error("illegal answer: {0}")]
    IllegalAnswer(IllegalAnswer),
    #[error("malformed option {option}: {why}")]
    MalformedOption { option: ProverOption, why: String },
}

pub fn initial_position(k: usize, h: usize, m0: u64) -> Position {
    assert!(k >= 1, "levels start at 1");
    let mut p = Position::Base(Position1 {
        tree: GameTree::root(h),
        rho: PartialPredicate::singleton(m0, true),
    });
    for _ in 1..k {
        p = Position::Seq(vec![p]);
    }
    p
}

/// Legality of Delayer's answer `rho_new` to query `q` given the record `rho`.
pub fn check_delayer_answer(
    rho: &PartialPredicate,
    q: &BTreeSet<u64>,
    rho_new: &PartialPredicate,
    c: &dyn WellOrderCodec,
) -> AnswerCheck {
    if let Err(e) = check_answer_shape(q, rho_new, c) {
        return AnswerCheck::Illegal(e);
    }
    if rho.conflict_with(rho_new).is_some() {
        return AnswerCheck::Contradiction;
    }
    AnswerCheck::Legal
}

/// Coverage and progressiveness; independent of the record.
pub fn check_answer_shape(
    q: &BTreeSet<u64>,
    rho_new: &PartialPredicate,
    c: &dyn WellOrderCodec,
) -> Result<(), IllegalAnswer> {
    if let Some(&n) = q.iter().find(|n| rho_new.get(**n).is_none()) {
        return Err(IllegalAnswer::Uncovered(n));
    }
    let least = rho_new.ones().map(|n| (c.rank(n), n)).min();
    for &n in q {
        if rho_new.get(n) == Some(true) {
            let ok = least.as_ref().is_some_and(|(r, _)| *r < c.rank(n));
            if !ok {
                return Err(IllegalAnswer::NotProgressive(n));
            }
        }
    }
    Ok(())
}

fn malformed(option: &ProverOption, why: impl Into<String>) -> MoveError {
    MoveError::MalformedOption {
        option: option.clone(),
        why: why.into(),
    }
}

/// One 𝒢₁ transition with the answer already known to be well-shaped.
fn advance1(p: &Position1, answer: &PartialPredicate, option: &ProverOption) -> Result<Outcome, MoveError> {
    let rho = match p.rho.merge(answer) {
        Ok(r) => r,
        Err(_) => return Ok(Outcome::ProverWins(Reason::Contradiction)),
    };
    let tree = match (option.o, &option.b) {
        (0, OptionArg::Index(b)) => match p.tree.expand(*b) {
            Some(t) => t,
            None => return Ok(Outcome::ProverLoses(Reason::HeightExceeded)),
        },
        (1, OptionArg::Node(b)) => match p.tree.cut(b) {
            Ok(t) => t,
            Err(TreeError::MissingRightSibling(_)) => {
                return Ok(Outcome::ProverLoses(Reason::MissingRightSibling))
            }
            Err(e) => return Err(malformed(option, e.to_string())),
        },
        (0, _) => return Err(malformed(option, "expansion takes a number")),
        (1, _) => return Err(malformed(option, "cut takes a vertex")),
        _ => return Err(malformed(option, "level-1 options are 0 and 1")),
    };
    Ok(Outcome::Next(Position::Base(Position1 { tree, rho })))
}

fn advance(p: &Position, answer: &PartialPredicate, option: &ProverOption) -> Result<Outcome, MoveError> {
    let entries = match p {
        Position::Base(p1) => return advance1(p1, answer, option),
        Position::Seq(v) => v,
    };
    let k = p.level() - 1;
    if p.rho().conflict_with(answer).is_some() {
        return Ok(Outcome::ProverWins(Reason::Contradiction));
    }
    if option.o > k + 1 {
        return Err(malformed(option, format!("options at level {} are 0..={}", k + 1, k + 1)));
    }
    if option.o != 1 && !matches!(option.b, OptionArg::Index(_)) {
        return Err(malformed(option, "only option 1 takes a vertex"));
    }
    if option.o <= k {
        let last = entries.last().expect("nonempty sequence");
        return Ok(match advance(last, answer, option)? {
            Outcome::Next(q) => {
                let mut v = entries.clone();
                v.push(q);
                Outcome::Next(Position::Seq(v))
            }
            Outcome::ProverLoses(_) => Outcome::ProverLoses(Reason::InnerLoss),
            won => won,
        });
    }
    let OptionArg::Index(b) = option.b else {
        unreachable!("checked above")
    };
    if b >= entries.len() as u64 {
        return Ok(Outcome::ProverLoses(Reason::BacktrackOutOfRange));
    }
    let b = b as usize;
    Ok(match advance(&entries[b], answer, &ProverOption::expand(0))? {
        Outcome::Next(q) => {
            let mut v = entries[..b].to_vec();
            v.push(q);
            Outcome::Next(Position::Seq(v))
        }
        Outcome::ProverLoses(_) => Outcome::ProverLoses(Reason::InnerLoss),
        // the replayed entry may carry answers the current record has dropped
        won => won,
    })
}

pub fn step_g1(p: &Position1, m: &Move, c: &dyn WellOrderCodec) -> Result<Outcome, MoveError> {
    check_answer_shape(&m.query, &m.answer, c).map_err(MoveError::IllegalAnswer)?;
    advance1(p, &m.answer, &m.option)
}

/// One transition at the level of `p`.
pub fn step(p: &Position, m: &Move, c: &dyn WellOrderCodec) -> Result<Outcome, MoveError> {
    check_answer_shape(&m.query, &m.answer, c).map_err(MoveError::IllegalAnswer)?;
    advance(p, &m.answer, &m.option)
}

pub fn step_gk(k: usize, p: &Position, m: &Move, c: &dyn WellOrderCodec) -> Result<Outcome, MoveError> {
    assert_eq!(p.level(), k, "position level does not match k");
    step(p, m, c)
}

/// `Õₖ(P)`: `ω·O₁` at level 1, base-2 natural sums above.
pub fn measure(p: &Position) -> Ordinal {
    match p {
        Position::Base(p1) => p1.tree.clock_value().omega_times(),
        Position::Seq(v) => {
            let mut exps: Vec<Ordinal> = v.iter().map(measure).collect();
            exps.push(exps.last().expect("nonempty sequence").clone());
            nat_sum_two_pows(&exps)
        }
    }
}

/// Measure of the level-k initial position at height h.
pub fn initial_measure(k: usize, h: usize) -> Ordinal {
    measure(&initial_position(k, h, 0))
}

/// `2ₖ(ω^(h+1))·2 + ω`, the constant stated for the level-(k+1) Delayer.
pub fn stated_delayer_bound(k: usize, h: usize) -> Ordinal {
    use crate::ordinal::{nat_add, ord_add, two_pow};
    let mut a = omega_pow(&Ordinal::from(h as u64 + 1));
    for _ in 0..k {
        a = two_pow(&a);
    }
    ord_add(&nat_add(&a, &a), &Ordinal::omega())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "result", rename_all = "snake_case")]
pub enum MatchResult {
    ProverWins { reason: Reason },
    ProverLoses { reason: Reason },
    /// Prover emitted a malformed option or failed internally.
    ProverForfeit { diagnostic: String },
    /// Delayer emitted an illegal answer or failed internally.
    DelayerForfeit { diagnostic: String },
    /// Harness cap on the number of turns; not a game outcome.
    Timeout,
}

impl MatchResult {
    pub fn prover_won(&self) -> bool {
        matches!(self, MatchResult::ProverWins { .. } | MatchResult::DelayerForfeit { .. })
    }

    pub fn prover_lost(&self) -> bool {
        matches!(self, MatchResult::ProverLoses { .. } | MatchResult::ProverForfeit { .. })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TurnRecord {
    pub turn: usize,
    pub query: BTreeSet<u64>,
    pub answer: PartialPredicate,
    pub option: Option<ProverOption>,
    /// Clock and measure of the position after the turn (before it, if the play ended).
    pub clock: Ordinal,
    pub measure: Ordinal,
    pub outcome: String,
    pub reason: Option<Reason>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub next: Option<Position>,
    /// Entries dropped by a backtrack.
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub discarded: Vec<Position>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Transcript {
    pub k: usize,
    pub h: usize,
    pub order_type: Ordinal,
    pub m0: Option<u64>,
    pub initial: Option<Position>,
    pub turns: Vec<TurnRecord>,
    pub result: MatchResult,
}

impl Transcript {
    /// Every position of the play, initial first.
    pub fn positions(&self) -> Vec<&Position> {
        self.initial
            .iter()
            .chain(self.turns.iter().filter_map(|t| t.next.as_ref()))
            .collect()
    }

    /// JSON-lines: a header, one record per turn, and a closing result line.
    pub fn to_json_lines(&self) -> String {
        let mut out = String::new();
        let header = serde_json::json!({
            "k": self.k,
            "h": self.h,
            "order": self.order_type.to_string(),
            "m0": self.m0,
            "initial_measure": self.initial.as_ref().map(|p| measure(p).to_string()),
        });
        out.push_str(&header.to_string());
        out.push('\n');
        for t in &self.turns {
            let mut rec = serde_json::json!({
                "turn": t.turn,
                "query": t.query,
                "answer": t.answer,
                "option": t.option,
                "clock": t.clock.to_string(),
                "measure": t.measure.to_string(),
                "outcome": t.outcome,
                "reason": t.reason,
            });
            if !t.discarded.is_empty() {
                rec["discarded"] = serde_json::json!(t.discarded.len());
            }
            out.push_str(&rec.to_string());
            out.push('\n');
        }
        out.push_str(&serde_json::json!({ "final": self.result, "turns": self.turns.len() }).to_string());
        out.push('\n');
        out
    }
}

/// What strategies see of the play so far.
pub struct Play<'a> {
    pub k: usize,
    pub h: usize,
    pub codec: &'a dyn WellOrderCodec,
    pub positions: &'a [Position],
}

impl Play<'_> {
    pub fn current(&self) -> &Position {
        self.positions.last().expect("a play has an initial position")
    }

    pub fn turn(&self) -> usize {
        self.positions.len() - 1
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MatchConfig {
    pub k: usize,
    pub h: usize,
    pub max_turns: usize,
    /// Strict: an illegal answer forfeits at once. Otherwise it is re-requested.
    pub strict: bool,
}

impl MatchConfig {
    pub fn new(k: usize, h: usize, max_turns: usize) -> Self {
        MatchConfig {
            k,
            h,
            max_turns,
            strict: true,
        }
    }
}

const ANSWER_ATTEMPTS: usize = 3;

pub fn run_match(
    cfg: MatchConfig,
    c: &dyn WellOrderCodec,
    prover: &mut dyn Prover,
    delayer: &mut dyn Delayer,
) -> Transcript {
    assert!(cfg.k >= 1 && cfg.max_turns >= 1);
    let mut transcript = Transcript {
        k: cfg.k,
        h: cfg.h,
        order_type: c.order_type().clone(),
        m0: None,
        initial: None,
        turns: Vec::new(),
        result: MatchResult::Timeout,
    };
    let m0 = match delayer.initial_claim(cfg.k, cfg.h, c) {
        Ok(m) => m,
        Err(e) => {
            transcript.result = MatchResult::DelayerForfeit {
                diagnostic: e.to_string(),
            };
            return transcript;
        }
    };
    let init = initial_position(cfg.k, cfg.h, m0);
    transcript.m0 = Some(m0);
    transcript.initial = Some(init.clone());
    let mut positions = vec![init];
    for turn in 1..=cfg.max_turns {
        let current = positions.last().expect("nonempty").clone();
        let play = Play {
            k: cfg.k,
            h: cfg.h,
            codec: c,
            positions: &positions,
        };
        let query = match prover.query(&play) {
            Ok(q) => q,
            Err(e) => {
                transcript.result = MatchResult::ProverForfeit {
                    diagnostic: format!("turn {turn}: {e}"),
                };
                return transcript;
            }
        };
        let mut answer = None;
        let mut last_problem = String::new();
        let attempts = if cfg.strict { 1 } else { ANSWER_ATTEMPTS };
        for _ in 0..attempts {
            match delayer.answer(&play, &query) {
                Ok(a) => match check_answer_shape(&query, &a, c) {
                    Ok(()) => {
                        answer = Some(a);
                        break;
                    }
                    Err(e) => last_problem = e.to_string(),
                },
                Err(e) => last_problem = e.to_string(),
            }
        }
        let Some(answer) = answer else {
            transcript.result = MatchResult::DelayerForfeit {
                diagnostic: format!("turn {turn}: {last_problem}"),
            };
            return transcript;
        };
        let record = |option, outcome: &str, reason, next: Option<Position>, discarded| {
            let shown = next.as_ref().unwrap_or(&current);
            TurnRecord {
                turn,
                query: query.clone(),
                answer: answer.clone(),
                option,
                clock: shown.tree().clock_value(),
                measure: measure(shown),
                outcome: outcome.to_string(),
                reason,
                next,
                discarded,
            }
        };
        if current.rho().conflict_with(&answer).is_some() {
            transcript
                .turns
                .push(record(None, "prover_wins", Some(Reason::Contradiction), None, Vec::new()));
            prover.observe(&play, &query, &answer, None);
            transcript.result = MatchResult::ProverWins {
                reason: Reason::Contradiction,
            };
            return transcript;
        }
        let option = match prover.option(&play, &query, &answer) {
            Ok(o) => o,
            Err(e) => {
                transcript.result = MatchResult::ProverForfeit {
                    diagnostic: format!("turn {turn}: {e}"),
                };
                return transcript;
            }
        };
        let outcome = match advance(&current, &answer, &option) {
            Ok(o) => o,
            Err(e) => {
                transcript.turns.push(record(Some(option), "prover_loses", None, None, Vec::new()));
                transcript.result = MatchResult::ProverForfeit {
                    diagnostic: format!("turn {turn}: {e}"),
                };
                return transcript;
            }
        };
        match outcome {
            Outcome::Next(next) => {
                let discarded = match (&current, &option.b) {
                    (Position::Seq(v), OptionArg::Index(b)) if cfg.k > 1 && option.o == cfg.k => {
                        v[(*b as usize + 1).min(v.len())..].to_vec()
                    }
                    _ => Vec::new(),
                };
                transcript
                    .turns
                    .push(record(Some(option.clone()), "next", None, Some(next.clone()), discarded));
                prover.observe(&play, &query, &answer, Some(&next));
                positions.push(next);
            }
            Outcome::ProverWins(reason) => {
                transcript
                    .turns
                    .push(record(Some(option), "prover_wins", Some(reason), None, Vec::new()));
                transcript.result = MatchResult::ProverWins { reason };
                return transcript;
            }
            Outcome::ProverLoses(reason) => {
                transcript
                    .turns
                    .push(record(Some(option), "prover_loses", Some(reason), None, Vec::new()));
                transcript.result = MatchResult::ProverLoses { reason };
                return transcript;
            }
        }
    }
    transcript
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ReplayError {
    #[error("transcript has no initial position")]
    NoInitialPosition,
    #[error("turn {0}: recorded option is missing")]
    MissingOption(usize),
    #[error("turn {turn}: replay gives {got}, transcript says {recorded}")]
    Mismatch {
        turn: usize,
        got: String,
        recorded: String,
    },
}

/// Re-executes every recorded move and compares outcomes.
pub fn replay(t: &Transcript, c: &dyn WellOrderCodec) -> Result<(), ReplayError> {
    let mut pos = t.initial.clone().ok_or(ReplayError::NoInitialPosition)?;
    for rec in &t.turns {
        if let Err(e) = check_answer_shape(&rec.query, &rec.answer, c) {
            return Err(ReplayError::Mismatch {
                turn: rec.turn,
                got: format!("illegal answer: {e}"),
                recorded: rec.outcome.clone(),
            });
        }
        let got = match &rec.option {
            None => {
                if pos.rho().conflict_with(&rec.answer).is_some() {
                    ("prover_wins".to_string(), Some(Reason::Contradiction), None)
                } else {
                    return Err(ReplayError::MissingOption(rec.turn));
                }
            }
            Some(option) => match advance(&pos, &rec.answer, option) {
                Ok(Outcome::Next(p)) => ("next".to_string(), None, Some(p)),
                Ok(Outcome::ProverWins(r)) => ("prover_wins".to_string(), Some(r), None),
                Ok(Outcome::ProverLoses(r)) => ("prover_loses".to_string(), Some(r), None),
                Err(_) => ("prover_loses".to_string(), None, None),
            },
        };
        if got.0 != rec.outcome || got.1 != rec.reason || got.2 != rec.next {
            return Err(ReplayError::Mismatch {
                turn: rec.turn,
                got: format!("{} {:?}", got.0, got.1),
                recorded: format!("{} {:?}", rec.outcome, rec.reason),
            });
        }
        if let Some(p) = got.2 {
            pos = p;
        }
    }
    Ok(())
}

/// Structural clauses of level-(k+1) plays.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Clause {
    /// Options 0 and 1 prolong every level.
    Prolong,
    /// Backtrack at level o: levels j ≥ o are prolonged.
    BacktrackOuter,
    /// Level o−1 is truncated at s and ends with a successor of its entry s.
    BacktrackShape,
    /// Levels below o−1 prolong the replayed entry.
    BacktrackInner,
    /// Past entries at every level occur as positions of the play.
    Closure,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ClauseCheck {
    pub turn: usize,
    pub clause: Clause,
    pub level: usize,
    pub pass: bool,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct StructureReport {
    pub checks: Vec<ClauseCheck>,
}

impl StructureReport {
    pub fn failures(&self) -> impl Iterator<Item = &ClauseCheck> {
        self.checks.iter().filter(|c| !c.pass)
    }

    pub fn all_pass(&self) -> bool {
        self.failures().next().is_none()
    }

    fn push(&mut self, turn: usize, clause: Clause, level: usize, pass: bool) {
        self.checks.push(ClauseCheck {
            turn,
            clause,
            level,
            pass,
        });
    }
}

fn is_prolongation(new: &Position, old: &Position) -> bool {
    let (n, o) = (new.entries(), old.entries());
    n.len() == o.len() + 1 && n[..o.len()] == *o
}

/// Checks the structural clauses on every transition of a level-(k+1) play.
pub fn validate_structure(t: &Transcript, c: &dyn WellOrderCodec) -> StructureReport {
    let mut report = StructureReport::default();
    let k = t.k.saturating_sub(1);
    if k == 0 {
        return report;
    }
    let positions = t.positions();
    // e^(k+1-j) images of every play position, per level j
    let mut seen: Vec<HashSet<&Position>> = vec![HashSet::new(); k + 1];
    for (i, p) in positions.iter().enumerate() {
        for (j, set) in seen.iter_mut().enumerate().skip(1) {
            set.insert(p.e_pow(k + 1 - j));
        }
        // closure clause for the play up to position i
        for j in 1..=k {
            let seq = p.e_pow(k - j).entries();
            let ok = seq[..seq.len() - 1].iter().all(|r| seen[j].contains(r));
            report.push(i, Clause::Closure, j, ok);
        }
        let Some(rec) = t.turns.iter().filter(|r| r.next.is_some()).nth(i) else {
            continue;
        };
        let next = rec.next.as_ref().expect("filtered");
        let Some(option) = &rec.option else { continue };
        let turn = rec.turn;
        let o = option.o;
        if o <= 1 {
            for j in 1..=k {
                report.push(turn, Clause::Prolong, j, is_prolongation(next.e_pow(k - j), p.e_pow(k - j)));
            }
            continue;
        }
        for j in o..=k {
            report.push(turn, Clause::BacktrackOuter, j, is_prolongation(next.e_pow(k - j), p.e_pow(k - j)));
        }
        let j = o - 1;
        let OptionArg::Index(s) = option.b else {
            report.push(turn, Clause::BacktrackShape, j, false);
            continue;
        };
        let s = s as usize;
        let old = p.e_pow(k - j).entries();
        let new = next.e_pow(k - j).entries();
        let shape_ok = s < old.len() && new.len() == s + 1 && new[..s] == old[..s];
        let successor_ok = shape_ok
            && matches!(
                step(&old[s], &Move { query: rec.query.clone(), answer: rec.answer.clone(), option: ProverOption::expand(0) }, c),
                Ok(Outcome::Next(ref q)) if *q == new[s]
            );
        report.push(turn, Clause::BacktrackShape, j, successor_ok);
        if !shape_ok {
            continue;
        }
        for jj in 1..j {
            let depth = o - 2 - jj;
            let ok = next.e_pow(k - jj) == new[s].e_pow(depth)
                && is_prolongation(new[s].e_pow(depth), old[s].e_pow(depth));
            report.push(turn, Clause::BacktrackInner, jj, ok);
        }
    }
    report
}
