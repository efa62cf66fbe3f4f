//! Explicit strategies and bounded adversaries.
//!
//! Every strategy is deterministic given its configuration, its seed, and the
//! play so far. Randomized adversaries draw from a ChaCha stream seeded once
//! at construction.

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::game::{
    check_answer_shape, initial_measure, measure, run_match, MatchConfig, OptionArg, PartialPredicate, Play,
    Position, Position1, ProverOption, Transcript,
};
use crate::ordinal::{ord_add, omega_pow, Ordinal};
use crate::wellorder::{CodecError, WellOrderCodec};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum StrategyError {
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("codec: {0}")]
    Codec(#[from] CodecError),
    #[error("{0}")]
    Internal(String),
}

pub trait Prover {
    fn query(&mut self, play: &Play) -> Result<BTreeSet<u64>, StrategyError>;

    fn option(
        &mut self,
        play: &Play,
        query: &BTreeSet<u64>,
        answer: &PartialPredicate,
    ) -> Result<ProverOption, StrategyError>;

    /// Called after each answered turn with the resulting position, if any.
    fn observe(&mut self, _play: &Play, _query: &BTreeSet<u64>, _answer: &PartialPredicate, _next: Option<&Position>) {}
}

pub trait Delayer {
    fn initial_claim(&mut self, k: usize, h: usize, codec: &dyn WellOrderCodec) -> Result<u64, StrategyError>;

    fn answer(&mut self, play: &Play, query: &BTreeSet<u64>) -> Result<PartialPredicate, StrategyError>;
}

/// SplitMix64 finalizer; sub-seeds are `mix(seed ^ mix(stream))`.
pub fn derive_seed(seed: u64, stream: u64) -> u64 {
    fn mix(mut z: u64) -> u64 {
        z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }
    mix(seed ^ mix(stream))
}

fn min_claim(rho: &PartialPredicate, c: &dyn WellOrderCodec) -> Option<(Ordinal, u64)> {
    rho.ones().map(|n| (c.rank(n), n)).min()
}

/// Greatest element of `δ` if it has one, else the start of its last ω^e block.
fn fallback_top(delta: &Ordinal) -> Ordinal {
    let (limit, n) = delta.split_finite();
    if n > 0u32.into() {
        return ord_add(&limit, &Ordinal::from(n - 1u32));
    }
    let terms = delta.terms();
    let last = terms.last().expect("δ is infinite");
    let head = Ordinal::sum_of(
        terms[..terms.len() - 1]
            .iter()
            .map(|t| (t.exponent.clone(), u64::try_from(&t.coefficient).unwrap_or(u64::MAX))),
    );
    let c = u64::try_from(&last.coefficient).unwrap_or(u64::MAX);
    ord_add(&head, &Ordinal::sum_of([(last.exponent.clone(), c - 1)]))
}

/// Delayer's winning strategy above the threshold: stay ω above the measure.
#[derive(Debug, Clone)]
pub struct PaperDelayer {
    k: usize,
    h: usize,
    history: PartialPredicate,
    pub concessions: usize,
}

impl PaperDelayer {
    /// Requires `|≺| > measure(initial) + ω`.
    pub fn new(k: usize, h: usize, codec: &dyn WellOrderCodec) -> Result<Self, StrategyError> {
        let need = Self::bound(k, h);
        if *codec.order_type() <= need {
            return Err(StrategyError::Precondition(format!(
                "order type {} must exceed {}",
                codec.order_type(),
                need
            )));
        }
        Ok(Self::unchecked(k, h))
    }

    /// Runs the same rules without checking the order type. When the claims
    /// cannot be kept legal it answers 0 on the whole query.
    pub fn unchecked(k: usize, h: usize) -> Self {
        PaperDelayer {
            k,
            h,
            history: PartialPredicate::new(),
            concessions: 0,
        }
    }

    /// `measure(k, initial) + ω`.
    pub fn bound(k: usize, h: usize) -> Ordinal {
        ord_add(&initial_measure(k, h), &Ordinal::omega())
    }
}

impl Delayer for PaperDelayer {
    fn initial_claim(&mut self, k: usize, h: usize, codec: &dyn WellOrderCodec) -> Result<u64, StrategyError> {
        self.k = k;
        self.h = h;
        let target = Self::bound(k, h);
        let rank = if target < *codec.order_type() {
            target
        } else {
            fallback_top(codec.order_type())
        };
        let m0 = codec.unrank(&rank)?;
        self.history = PartialPredicate::singleton(m0, true);
        Ok(m0)
    }

    fn answer(&mut self, play: &Play, query: &BTreeSet<u64>) -> Result<PartialPredicate, StrategyError> {
        let c = play.codec;
        let mut reply: PartialPredicate = query
            .iter()
            .map(|&q| (q, self.history.get(q).unwrap_or(false)))
            .collect();
        let floor = measure(play.current());
        let mut fresh = None;
        let mut point = floor;
        while point < *c.order_type() {
            let n = c.unrank(&point)?;
            if self.history.get(n).is_none() && !query.contains(&n) {
                fresh = Some(n);
                break;
            }
            point = point.successor();
        }
        if let Some(m) = fresh {
            reply.insert(m, true);
        }
        if check_answer_shape(query, &reply, c).is_err() {
            self.concessions += 1;
            reply = query.iter().map(|&q| (q, false)).collect();
        }
        if let Ok(h) = self.history.merge(&reply) {
            self.history = h;
        }
        Ok(reply)
    }
}

/// Coefficients `(k_1, ..., k_{h+1})` of an ordinal below `ω^(h+1)`.
fn coefficients(a: &Ordinal, h: usize) -> Option<Vec<u64>> {
    if *a >= omega_pow(&Ordinal::from(h as u64 + 1)) {
        return None;
    }
    (0..=h).map(|i| a.finite_coefficient((h - i) as u64)).collect()
}

/// Prover's winning strategy at or below the threshold `ω^(h+1) + ω`.
///
/// Each round queries the finite interval between the limit part of the
/// least claimed point and the point itself. Delayer must claim something
/// below the limit part; the first coefficient where the new claim drops
/// decides between a cut and an expansion.
#[derive(Debug, Clone)]
pub struct AppendixProver {
    h: usize,
}

impl AppendixProver {
    /// Requires `|≺| ≤ ω^(h+1) + ω` and `h ≥ 1`.
    pub fn new(h: usize, codec: &dyn WellOrderCodec) -> Result<Self, StrategyError> {
        let bound = crate::wellorder::threshold_order(h, 0);
        if h == 0 || *codec.order_type() > bound {
            return Err(StrategyError::Precondition(format!(
                "order type {} must be at most {} with h ≥ 1",
                codec.order_type(),
                bound
            )));
        }
        Ok(AppendixProver { h })
    }

    pub fn unchecked(h: usize) -> Self {
        AppendixProver { h }
    }

    fn level_one<'a>(&self, play: &'a Play) -> Result<&'a Position1, StrategyError> {
        match play.current() {
            Position::Base(p) => Ok(p),
            _ => Err(StrategyError::Precondition("the appendix strategy plays level 1 only".into())),
        }
    }
}

impl Prover for AppendixProver {
    fn query(&mut self, play: &Play) -> Result<BTreeSet<u64>, StrategyError> {
        let p = self.level_one(play)?;
        let c = play.codec;
        let Some((rank, _)) = min_claim(&p.rho, c) else {
            return Ok(BTreeSet::new());
        };
        let top = omega_pow(&Ordinal::from(self.h as u64 + 1));
        if rank >= top {
            if let Ok(q) = c.interval_members(&top, &rank) {
                return Ok(q);
            }
        }
        let (limit, _) = rank.split_finite();
        Ok(c.interval_members(&limit, &rank)?)
    }

    fn option(
        &mut self,
        play: &Play,
        _query: &BTreeSet<u64>,
        answer: &PartialPredicate,
    ) -> Result<ProverOption, StrategyError> {
        let p = self.level_one(play)?;
        let c = play.codec;
        let h = self.h;
        let fallback = ProverOption::expand(0);
        let merged = p.rho.merge(answer).unwrap_or_else(|_| p.rho.clone());
        let (Some((old, _)), Some((new, _))) = (min_claim(&p.rho, c), min_claim(&merged, c)) else {
            return Ok(fallback);
        };
        let Some(l) = coefficients(&new, h) else {
            return Ok(fallback);
        };
        let Some(k) = coefficients(&old, h) else {
            // first round from above ω^(h+1): open the first level
            return Ok(if p.tree.height() == 0 {
                ProverOption::expand(l[0] + 1)
            } else {
                fallback
            });
        };
        // 1-based position of the first coefficient that drops, within the limit part
        let Some(d) = (0..h).find(|&i| l[i] != k[i]).filter(|&i| l[i] < k[i]).map(|i| i + 1) else {
            return Ok(fallback);
        };
        let g = p.tree.height();
        let leaf = p.tree.leftmost_leaf();
        if d <= g {
            Ok(ProverOption::cut(leaf[..d - 1].to_vec()))
        } else {
            Ok(ProverOption::expand(k[g] + 1))
        }
    }
}

/// The sibling invariant of [`AppendixProver`] at one position.
///
/// With `c(T) = (i_1..i_g)` and the least claim `Σ ω^(h+1-l) k_l`, every
/// `(i_1..i_{l-1}, i_l + j)` for `l ≤ g`, `j ≤ k_l + 1` must be in `T`.
pub fn appendix_invariant(p: &Position1, h: usize, c: &dyn WellOrderCodec) -> Result<(), String> {
    let g = p.tree.height();
    if g == 0 {
        return Ok(());
    }
    let (rank, _) = min_claim(&p.rho, c).ok_or("no claimed point")?;
    let k = coefficients(&rank, h).ok_or_else(|| format!("least claim {rank} is not below w^(h+1)"))?;
    let leaf = p.tree.leftmost_leaf();
    for l in 1..=g {
        for j in 0..=k[l - 1] + 1 {
            let mut node = leaf[..l].to_vec();
            node[l - 1] += j;
            if !p.tree.contains(&node) {
                return Err(format!("missing sibling {node:?} (least claim {rank})"));
            }
        }
    }
    Ok(())
}

/// Checks [`appendix_invariant`] on every level-1 position of a transcript.
pub fn validate_appendix_invariant(t: &Transcript, c: &dyn WellOrderCodec) -> Vec<(usize, String)> {
    t.positions()
        .iter()
        .enumerate()
        .filter_map(|(i, p)| match p {
            Position::Base(p1) => appendix_invariant(p1, t.h, c).err().map(|e| (i, e)),
            _ => Some((i, "not a level-1 position".to_string())),
        })
        .collect()
}

/// Options that do not lose on the spot, or `⟨0,0⟩` when every option loses.
pub fn candidate_options(pos: &Position, answer: &PartialPredicate, max_expand: u64) -> Vec<ProverOption> {
    let level = pos.level();
    let mut out: Vec<ProverOption> = (0..=max_expand).map(ProverOption::expand).collect();
    let leaf = pos.tree().leftmost_leaf();
    for len in 0..leaf.len() {
        out.push(ProverOption::cut(leaf[..len].to_vec()));
    }
    for o in 2..=level {
        let len = pos.e_pow(level - o).entries().len() as u64;
        out.extend((0..len).map(|b| ProverOption::backtrack(o, b)));
    }
    let probe = |opt: &ProverOption| {
        let m = crate::game::Move {
            query: BTreeSet::new(),
            answer: answer.clone(),
            option: opt.clone(),
        };
        matches!(
            crate::game::step(pos, &m, &NoOrder),
            Ok(crate::game::Outcome::Next(_)) | Ok(crate::game::Outcome::ProverWins(_))
        )
    };
    let keep: Vec<ProverOption> = out.into_iter().filter(|o| probe(o)).collect();
    if keep.is_empty() {
        vec![ProverOption::expand(0)]
    } else {
        keep
    }
}

/// Stand-in codec for probing options with an empty query: the answer shape
/// check never consults the order when no point is queried.
struct NoOrder;

impl WellOrderCodec for NoOrder {
    fn order_type(&self) -> &Ordinal {
        unreachable!("probe queries are empty")
    }
    fn rank(&self, n: u64) -> Ordinal {
        Ordinal::from(n)
    }
    fn unrank(&self, a: &Ordinal) -> Result<u64, CodecError> {
        a.to_u64().ok_or_else(|| CodecError::Overflow(a.clone()))
    }
}

/// Query candidates for bounded Provers.
pub fn candidate_queries(pos: &Position, c: &dyn WellOrderCodec, bound: u64) -> Vec<BTreeSet<u64>> {
    let mut out = vec![BTreeSet::new(), (0..bound).collect(), pos.rho().domain().collect()];
    if let Some((rank, _)) = min_claim(pos.rho(), c) {
        let (limit, _) = rank.split_finite();
        if let Ok(q) = c.interval_members(&limit, &rank) {
            out.push(q.into_iter().rev().take(bound as usize + 1).collect());
        }
    }
    let mut seen = BTreeSet::new();
    out.retain(|q| seen.insert(q.clone()));
    out
}

/// Ordinals just below `t`, closest first: the finite predecessors, then a
/// fan `base + ω^(e-1)·j + i` below the limit part `base + ω^e`.
fn approach_below(t: &Ordinal) -> Vec<Ordinal> {
    let mut out = Vec::new();
    let (limit, n) = t.split_finite();
    let n = u64::try_from(&n).unwrap_or(u64::MAX);
    for i in 1..=n.min(3) {
        out.push(ord_add(&limit, &Ordinal::from(n - i)));
    }
    let terms = limit.terms();
    let Some(last) = terms.last() else {
        return out;
    };
    let head = Ordinal::sum_of(
        terms[..terms.len() - 1]
            .iter()
            .map(|x| (x.exponent.clone(), u64::try_from(&x.coefficient).unwrap_or(u64::MAX))),
    );
    let c = u64::try_from(&last.coefficient).unwrap_or(u64::MAX);
    let base = ord_add(&head, &Ordinal::sum_of([(last.exponent.clone(), c - 1)]));
    let below = match last.exponent.to_u64() {
        Some(e) => Ordinal::from(e - 1),
        None => Ordinal::one(),
    };
    for j in (0..3u64).rev() {
        for i in (0..3u64).rev() {
            let x = Ordinal::sum_of([(below.clone(), j), (Ordinal::zero(), i)]);
            out.push(ord_add(&base, &x));
        }
    }
    let mut seen = BTreeSet::new();
    out.retain(|x| seen.insert(x.clone()));
    out
}

/// Legal answers for bounded Delayers: concede, plain, and plain plus one fresh claim.
pub fn candidate_answers(
    rho: &PartialPredicate,
    query: &BTreeSet<u64>,
    c: &dyn WellOrderCodec,
    claims: usize,
) -> Vec<PartialPredicate> {
    let zero: PartialPredicate = query.iter().map(|&q| (q, false)).collect();
    let plain: PartialPredicate = query.iter().map(|&q| (q, rho.get(q).unwrap_or(false))).collect();
    let target = plain
        .ones()
        .chain(rho.ones())
        .map(|n| c.rank(n))
        .min();
    let mut out = vec![zero, plain.clone()];
    if let Some(t) = target {
        let fresh: Vec<PartialPredicate> = approach_below(&t)
            .into_iter()
            .filter_map(|r| c.unrank(&r).ok())
            .filter(|&n| rho.get(n).is_none() && !query.contains(&n))
            .map(|n| {
                let mut a = plain.clone();
                a.insert(n, true);
                a
            })
            .filter(|a| check_answer_shape(query, a, c).is_ok())
            .collect();
        // spread the picks from closest to farthest
        if fresh.len() <= claims {
            out.extend(fresh);
        } else if claims > 0 {
            for i in 0..claims {
                let at = if claims == 1 { 0 } else { i * (fresh.len() - 1) / (claims - 1) };
                out.push(fresh[at].clone());
            }
        }
    }
    let mut seen = BTreeSet::new();
    out.retain(|a| check_answer_shape(query, a, c).is_ok() && seen.insert(a.clone()));
    out
}

/// Initial claims worth trying: ranks `β + j` for `β` a prefix sum of `δ`.
pub fn candidate_initial_claims(c: &dyn WellOrderCodec, bound: u64) -> Vec<u64> {
    let delta = c.order_type();
    let mut bases = vec![Ordinal::zero()];
    let mut acc = Ordinal::zero();
    for t in delta.terms() {
        for _ in 0..u64::try_from(&t.coefficient).unwrap_or(1).min(3) {
            acc = ord_add(&acc, &omega_pow(&t.exponent));
            bases.push(acc.clone());
        }
    }
    let mut out = Vec::new();
    for b in bases {
        for j in 0..bound {
            let r = ord_add(&b, &Ordinal::from(j));
            if r < *delta {
                if let Ok(n) = c.unrank(&r) {
                    out.push(n);
                }
            }
        }
    }
    let mut seen = BTreeSet::new();
    out.retain(|n| seen.insert(*n));
    out
}

/// Random legal Prover.
pub struct RandomProver {
    rng: ChaCha8Rng,
    value_bound: u64,
    set_bound: u64,
}

impl RandomProver {
    pub fn new(seed: u64, value_bound: u64, set_bound: u64) -> Self {
        assert!(value_bound >= 1 && set_bound >= 1);
        RandomProver {
            rng: ChaCha8Rng::seed_from_u64(seed),
            value_bound,
            set_bound,
        }
    }
}

impl Prover for RandomProver {
    fn query(&mut self, play: &Play) -> Result<BTreeSet<u64>, StrategyError> {
        let mut q: BTreeSet<u64> = (0..self.rng.gen_range(0..=self.set_bound))
            .map(|_| self.rng.gen_range(0..self.set_bound * 4))
            .collect();
        if self.rng.gen_bool(0.3) {
            if let Some((_, n)) = min_claim(play.current().rho(), play.codec) {
                q.insert(n);
            }
        }
        Ok(q)
    }

    fn option(
        &mut self,
        play: &Play,
        _query: &BTreeSet<u64>,
        answer: &PartialPredicate,
    ) -> Result<ProverOption, StrategyError> {
        let options = candidate_options(play.current(), answer, self.value_bound - 1);
        Ok(options.choose(&mut self.rng).expect("never empty").clone())
    }
}

/// Queries nothing; cuts at the shortest legal prefix, else expands by one child.
#[derive(Debug, Clone, Default)]
pub struct GreedyProver;

impl Prover for GreedyProver {
    fn query(&mut self, _play: &Play) -> Result<BTreeSet<u64>, StrategyError> {
        Ok(BTreeSet::new())
    }

    fn option(
        &mut self,
        play: &Play,
        _query: &BTreeSet<u64>,
        answer: &PartialPredicate,
    ) -> Result<ProverOption, StrategyError> {
        let options = candidate_options(play.current(), answer, 0);
        let cut = options.iter().find(|o| o.o == 1).cloned();
        Ok(cut.unwrap_or_else(|| ProverOption::expand(0)))
    }
}

/// Random legal Delayer: copies its record, answers 0 elsewhere, and claims a
/// random fresh smaller point when a queried point answered 1 needs one. With
/// no such point it concedes by answering 0 on the whole query.
pub struct RandomDelayer {
    rng: ChaCha8Rng,
    value_bound: u64,
}

impl RandomDelayer {
    pub fn new(seed: u64, value_bound: u64) -> Self {
        RandomDelayer {
            rng: ChaCha8Rng::seed_from_u64(seed),
            value_bound,
        }
    }
}

impl Delayer for RandomDelayer {
    fn initial_claim(&mut self, _k: usize, _h: usize, codec: &dyn WellOrderCodec) -> Result<u64, StrategyError> {
        let choices = candidate_initial_claims(codec, self.value_bound.max(1) + 2);
        Ok(*choices.choose(&mut self.rng).ok_or_else(|| StrategyError::Internal("no initial claim".into()))?)
    }

    fn answer(&mut self, play: &Play, query: &BTreeSet<u64>) -> Result<PartialPredicate, StrategyError> {
        let rho = play.current().rho();
        let options = candidate_answers(rho, query, play.codec, self.value_bound as usize + 1);
        // options[0] concedes; prefer anything else when there is a choice
        let pick = if options.len() > 1 {
            options[1..].choose(&mut self.rng).expect("nonempty")
        } else {
            &options[0]
        };
        Ok(pick.clone())
    }
}

/// Choice log shared by scripted strategies: follows `script`, then index 0.
#[derive(Debug, Clone, Default)]
pub struct Script {
    script: Vec<usize>,
    pub made: Vec<(usize, usize)>,
}

impl Script {
    pub fn new(script: Vec<usize>) -> Self {
        Script { script, made: Vec::new() }
    }

    fn choose(&mut self, branching: usize) -> usize {
        let i = self.made.len();
        let c = self.script.get(i).copied().unwrap_or(0).min(branching.saturating_sub(1));
        self.made.push((c, branching));
        c
    }

    /// The lexicographically next script, if any.
    pub fn successor(&self) -> Option<Vec<usize>> {
        let i = self.made.iter().rposition(|&(c, b)| c + 1 < b)?;
        let mut next: Vec<usize> = self.made[..i].iter().map(|&(c, _)| c).collect();
        next.push(self.made[i].0 + 1);
        Some(next)
    }
}

/// Prover choosing among [`candidate_queries`] and [`candidate_options`] by
/// script for the first `depth` turns, then playing greedily.
pub struct ScriptedProver {
    pub script: Script,
    depth: usize,
    value_bound: u64,
    greedy: GreedyProver,
}

impl ScriptedProver {
    pub fn new(script: Vec<usize>, depth: usize, value_bound: u64) -> Self {
        ScriptedProver {
            script: Script::new(script),
            depth,
            value_bound,
            greedy: GreedyProver,
        }
    }
}

impl Prover for ScriptedProver {
    fn query(&mut self, play: &Play) -> Result<BTreeSet<u64>, StrategyError> {
        if play.turn() >= self.depth {
            return self.greedy.query(play);
        }
        let qs = candidate_queries(play.current(), play.codec, self.value_bound);
        Ok(qs[self.script.choose(qs.len())].clone())
    }

    fn option(
        &mut self,
        play: &Play,
        query: &BTreeSet<u64>,
        answer: &PartialPredicate,
    ) -> Result<ProverOption, StrategyError> {
        if play.turn() >= self.depth {
            return self.greedy.option(play, query, answer);
        }
        let os = candidate_options(play.current(), answer, self.value_bound);
        Ok(os[self.script.choose(os.len())].clone())
    }
}

/// Delayer choosing among [`candidate_initial_claims`] and [`candidate_answers`]
/// by script for the first `depth` turns, then conceding.
pub struct ScriptedDelayer {
    pub script: Script,
    depth: usize,
    value_bound: u64,
}

impl ScriptedDelayer {
    pub fn new(script: Vec<usize>, depth: usize, value_bound: u64) -> Self {
        ScriptedDelayer {
            script: Script::new(script),
            depth,
            value_bound,
        }
    }
}

impl Delayer for ScriptedDelayer {
    fn initial_claim(&mut self, _k: usize, _h: usize, codec: &dyn WellOrderCodec) -> Result<u64, StrategyError> {
        let ms = candidate_initial_claims(codec, self.value_bound + 1);
        if ms.is_empty() {
            return Err(StrategyError::Internal("no initial claim".into()));
        }
        Ok(ms[self.script.choose(ms.len())])
    }

    fn answer(&mut self, play: &Play, query: &BTreeSet<u64>) -> Result<PartialPredicate, StrategyError> {
        let rho = play.current().rho();
        let options = candidate_answers(rho, query, play.codec, self.value_bound as usize);
        if play.turn() >= self.depth {
            // concede: the all-zero answer is always legal
            return Ok(options[0].clone());
        }
        Ok(options[self.script.choose(options.len())].clone())
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("exhaustive enumeration exceeded its cap of {cap} plays")]
pub struct BudgetExceeded {
    pub cap: usize,
}

/// Plays every bounded Prover of the given depth against the Delayer built by
/// `delayer`, calling `visit` on each transcript. Returns the number of plays.
pub fn exhaustive_provers<D, F>(
    cfg: MatchConfig,
    codec: &dyn WellOrderCodec,
    depth: usize,
    value_bound: u64,
    cap: usize,
    mut delayer: impl FnMut() -> D,
    mut visit: F,
) -> Result<usize, BudgetExceeded>
where
    D: Delayer,
    F: FnMut(&Transcript),
{
    let mut next = Some(Vec::new());
    let mut count = 0;
    while let Some(script) = next {
        if count == cap {
            return Err(BudgetExceeded { cap });
        }
        let mut p = ScriptedProver::new(script, depth, value_bound);
        let mut d = delayer();
        let t = run_match(cfg, codec, &mut p, &mut d);
        visit(&t);
        count += 1;
        next = p.script.successor();
    }
    Ok(count)
}

/// Plays every bounded Delayer of the given depth against the Prover built by
/// `prover`.
pub fn exhaustive_delayers<P, F>(
    cfg: MatchConfig,
    codec: &dyn WellOrderCodec,
    depth: usize,
    value_bound: u64,
    cap: usize,
    mut prover: impl FnMut() -> P,
    mut visit: F,
) -> Result<usize, BudgetExceeded>
where
    P: Prover,
    F: FnMut(&Transcript),
{
    let mut next = Some(Vec::new());
    let mut count = 0;
    while let Some(script) = next {
        if count == cap {
            return Err(BudgetExceeded { cap });
        }
        let mut d = ScriptedDelayer::new(script, depth, value_bound);
        let mut p = prover();
        let t = run_match(cfg, codec, &mut p, &mut d);
        visit(&t);
        count += 1;
        next = d.script.successor();
    }
    Ok(count)
}

/// Option argument of a cut, for display.
pub fn describe(option: &ProverOption) -> String {
    match &option.b {
        OptionArg::Index(b) if option.o == 0 => format!("expand {}", b + 1),
        OptionArg::Node(b) => format!("cut at {b:?}"),
        OptionArg::Index(b) => format!("backtrack level {} to entry {b}", option.o),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::{initial_position, MatchResult};
    use crate::ordinal::parse_ordinal;
    use crate::wellorder::{make_codec, threshold_order};

    #[test]
    fn paper_delayer_initial_claim() {
        let c = make_codec(&threshold_order(1, 1)).unwrap();
        let mut d = PaperDelayer::new(1, 1, &*c).unwrap();
        let m0 = d.initial_claim(1, 1, &*c).unwrap();
        assert_eq!(c.rank(m0), parse_ordinal("w^2+w").unwrap());
        let small = make_codec(&threshold_order(1, 0)).unwrap();
        assert!(PaperDelayer::new(1, 1, &*small).is_err());
    }

    #[test]
    fn paper_delayer_claims_in_the_window() {
        let c = make_codec(&threshold_order(2, 1)).unwrap();
        let mut d = PaperDelayer::new(1, 2, &*c).unwrap();
        let m0 = d.initial_claim(1, 2, &*c).unwrap();
        let positions = [initial_position(1, 2, m0)];
        let play = Play { k: 1, h: 2, codec: &*c, positions: &positions };
        let q = BTreeSet::from([m0, 3]);
        let a = d.answer(&play, &q).unwrap();
        assert_eq!(a.get(m0), Some(true));
        assert_eq!(a.get(3), Some(false));
        let fresh: Vec<u64> = a.ones().filter(|&n| n != m0).collect();
        assert_eq!(fresh.len(), 1);
        let r = c.rank(fresh[0]);
        let lo = measure(&positions[0]);
        assert!(r >= lo && r < ord_add(&lo, &Ordinal::omega()));
    }

    #[test]
    fn appendix_first_query_size() {
        let h = 1;
        let c = make_codec(&threshold_order(h, 0)).unwrap();
        let m0 = c.unrank(&parse_ordinal("w^2+3").unwrap()).unwrap();
        let positions = [initial_position(1, h, m0)];
        let play = Play { k: 1, h, codec: &*c, positions: &positions };
        let mut p = AppendixProver::new(h, &*c).unwrap();
        let q = p.query(&play).unwrap();
        assert_eq!(q.len(), 4);
        let ranks: BTreeSet<Ordinal> = q.iter().map(|&n| c.rank(n)).collect();
        assert!(ranks.iter().all(|r| *r >= parse_ordinal("w^2").unwrap()));
    }

    #[test]
    fn script_successor_enumerates_odometer() {
        let mut s = Script::new(vec![]);
        s.choose(2);
        s.choose(3);
        assert_eq!(s.successor(), Some(vec![0, 1]));
        let mut s = Script::new(vec![1, 2]);
        s.choose(2);
        s.choose(3);
        assert_eq!(s.successor(), None);
    }

    #[test]
    fn exhaustive_depth_one_options() {
        let c = make_codec(&Ordinal::omega()).unwrap();
        let pos = initial_position(1, 2, 5);
        let opts = candidate_options(&pos, &PartialPredicate::new(), 2);
        assert_eq!(opts, vec![ProverOption::expand(0), ProverOption::expand(1), ProverOption::expand(2)]);
        let cfg = MatchConfig::new(1, 1, 100);
        let mut outcomes = Vec::new();
        let n = exhaustive_provers(cfg, &*c, 1, 2, 10_000, || RandomDelayer::new(1, 2), |t| {
            outcomes.push(t.result.clone())
        })
        .unwrap();
        assert!(n >= 3);
        assert!(outcomes.iter().all(|r| !matches!(r, MatchResult::Timeout)));
    }

    #[test]
    fn seeds_are_split_deterministically() {
        assert_eq!(derive_seed(7, 1), derive_seed(7, 1));
        assert_ne!(derive_seed(7, 1), derive_seed(7, 2));
    }
}
