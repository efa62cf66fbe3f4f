use std::collections::BTreeSet;
use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::ops::RangeInclusive;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::ValueEnum;
use ordgame_core::extraction::{dagger_trace, ExtractedProver};
use ordgame_core::game::{
    measure, replay, run_match, stated_delayer_bound, validate_structure, MatchConfig, MatchResult, PartialPredicate,
    Play, Position, ProverOption, Transcript,
};
use ordgame_core::logic::{check_derivation, check_ti_derivation, Derivation};
use ordgame_core::ordinal::{omega_pow, ord_add, parse_ordinal, Ordinal};
use ordgame_core::strategy::{
    derive_seed, exhaustive_delayers, exhaustive_provers, validate_appendix_invariant, AppendixProver, Delayer,
    PaperDelayer, Prover, RandomDelayer, RandomProver, StrategyError,
};
use ordgame_core::tree::comb_of_ordinal;
use ordgame_core::wellorder::{make_codec, threshold_order, CnfCodec, WellOrderCodec};
use serde_json::{json, Value};

use crate::strategies::{self, Name, Setup};
use crate::{CliError, RunArgs};

const TRACE_DIR: &str = "ORDGAME_TRACE_DIR";
const CAP: usize = 5_000_000;

fn codec(order: &str) -> Result<Arc<CnfCodec>, CliError> {
    let o = parse_ordinal(order).map_err(|e| CliError::Input(format!("cannot parse ordinal {order:?}: {e}")))?;
    make_codec(&o).map_err(|e| CliError::Input(format!("order {o}: {e}")))
}

/// The trace destination: `explicit`, moved into ORDGAME_TRACE_DIR if set.
fn trace_path(explicit: Option<&Path>, default_name: &str) -> Option<PathBuf> {
    match std::env::var_os(TRACE_DIR) {
        Some(dir) => {
            let name = explicit.and_then(Path::file_name).map(PathBuf::from);
            Some(PathBuf::from(dir).join(name.unwrap_or_else(|| default_name.into())))
        }
        None => explicit.map(Path::to_path_buf),
    }
}

/// Line-oriented sink, flushed per record so partial runs stay readable.
struct Sink(Box<dyn Write>);

impl Sink {
    fn file(path: &Path) -> Result<Sink, CliError> {
        if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
            fs::create_dir_all(dir)?;
        }
        Ok(Sink(Box::new(BufWriter::new(File::create(path)?))))
    }

    fn stdout() -> Sink {
        Sink(Box::new(io::stdout()))
    }

    fn line(&mut self, v: &Value) -> Result<(), CliError> {
        writeln!(self.0, "{v}")?;
        self.0.flush()?;
        Ok(())
    }
}

fn transcript_lines(t: &Transcript, tag: Option<u64>) -> Vec<Value> {
    t.to_json_lines()
        .lines()
        .map(|l| {
            let mut v: Value = serde_json::from_str(l).expect("transcript lines are JSON");
            if let (Some(id), Value::Object(m)) = (tag, &mut v) {
                m.insert("match".into(), json!(id));
            }
            v
        })
        .collect()
}

fn describe(r: &MatchResult) -> String {
    match r {
        MatchResult::ProverWins { reason } => format!("Prover wins ({reason:?})"),
        MatchResult::ProverLoses { reason } => format!("Delayer survives: Prover loses ({reason:?})"),
        MatchResult::ProverForfeit { diagnostic } => format!("Prover forfeits: {diagnostic}"),
        MatchResult::DelayerForfeit { diagnostic } => format!("Delayer forfeits: {diagnostic}"),
        MatchResult::Timeout => "timeout".into(),
    }
}

struct BoxedProver(Box<dyn Prover>);

impl Prover for BoxedProver {
    fn query(&mut self, play: &Play) -> Result<BTreeSet<u64>, StrategyError> {
        self.0.query(play)
    }

    fn option(&mut self, play: &Play, q: &BTreeSet<u64>, a: &PartialPredicate) -> Result<ProverOption, StrategyError> {
        self.0.option(play, q, a)
    }

    fn observe(&mut self, play: &Play, q: &BTreeSet<u64>, a: &PartialPredicate, next: Option<&Position>) {
        self.0.observe(play, q, a, next)
    }
}

struct BoxedDelayer(Box<dyn Delayer>);

impl Delayer for BoxedDelayer {
    fn initial_claim(&mut self, k: usize, h: usize, c: &dyn WellOrderCodec) -> Result<u64, StrategyError> {
        self.0.initial_claim(k, h, c)
    }

    fn answer(&mut self, play: &Play, q: &BTreeSet<u64>) -> Result<PartialPredicate, StrategyError> {
        self.0.answer(play, q)
    }
}

/// A loaded run: codec, optional extracted prover, effective height.
struct Prepared {
    codec: Arc<CnfCodec>,
    extracted: Option<ExtractedProver>,
    h: usize,
}

fn load_derivation(path: &Path) -> Result<Derivation, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    Derivation::from_json(&text).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

fn prepare(run: &RunArgs) -> Result<Prepared, CliError> {
    if run.k < 1 || run.h < 1 || run.max_turns < 1 {
        return Err(CliError::Input("k, h and max-turns must be at least 1".into()));
    }
    let codec = codec(&run.order)?;
    let mut h = run.h;
    let extracted = if run.prover == Name::Extracted {
        let path = run.proof.as_ref().ok_or_else(|| CliError::Input("extracted prover needs --proof".into()))?;
        if run.k != 1 {
            return Err(CliError::Input("the extracted prover plays level 1 only".into()));
        }
        let p = ExtractedProver::new(load_derivation(path)?, codec.as_ref(), run.search_bound)
            .map_err(|e| CliError::Input(e.to_string()))?;
        if p.height() != h {
            eprintln!("note: h set to the derivation height {}", p.height());
            h = p.height();
        }
        Some(p)
    } else {
        None
    };
    Ok(Prepared { codec, extracted, h })
}

impl Prepared {
    fn setup<'a>(&'a self, run: &RunArgs) -> Setup<'a> {
        Setup {
            k: run.k,
            h: self.h,
            codec: self.codec.as_ref(),
            value_bound: run.value_bound,
            unchecked: run.unchecked,
            extracted: self.extracted.as_ref(),
        }
    }

    fn config(&self, run: &RunArgs) -> MatchConfig {
        MatchConfig::new(run.k, self.h, run.max_turns)
    }

    /// Invariant and guarantee failures of one finished play.
    fn violations(&self, run: &RunArgs, t: &Transcript) -> Vec<String> {
        let c = self.codec.as_ref();
        let mut out = Vec::new();
        if let Err(e) = replay(t, c) {
            out.push(format!("replay: {e}"));
        }
        if t.k >= 2 {
            out.extend(validate_structure(t, c).failures().map(|f| format!("structure: {f:?}")));
        }
        let checked = !run.unchecked;
        if checked && run.prover == Name::AppendixProver {
            out.extend(validate_appendix_invariant(t, c).into_iter().map(|(i, e)| format!("appendix invariant, turn {i}: {e}")));
            if t.result.prover_lost() {
                out.push(format!("appendix-prover lost: {:?}", t.result));
            }
        }
        if checked && run.delayer == Name::PaperDelayer && t.result.prover_won() {
            out.push(format!("paper-delayer lost: {:?}", t.result));
        }
        if let Some(p) = &self.extracted {
            match dagger_trace(p, t, c) {
                Ok(rs) => out.extend(
                    rs.iter().enumerate().flat_map(|(i, r)| r.failures().map(move |f| format!("(†) turn {i}: {f:?}"))),
                ),
                Err(e) => out.push(format!("(†) replay: {e}")),
            }
            if t.result.prover_lost() {
                out.push(format!("extracted prover lost: {:?}", t.result));
            }
        }
        out
    }
}

fn single_side(name: &Name) -> Result<(), CliError> {
    match name {
        Name::Exhaustive { .. } => Err(CliError::Input("exhaustive strategies are only valid for `match`".into())),
        _ => Ok(()),
    }
}

pub fn simulate(run: &RunArgs) -> Result<(), CliError> {
    single_side(&run.prover)?;
    single_side(&run.delayer)?;
    let prep = prepare(run)?;
    let setup = prep.setup(run);
    let mut p = strategies::prover(&run.prover, &setup, run.seed)?;
    let mut d = strategies::delayer(&run.delayer, &setup, run.seed)?;
    let t = run_match(prep.config(run), prep.codec.as_ref(), p.as_mut(), d.as_mut());
    println!("{} after {} turns", describe(&t.result), t.turns.len());
    if let Some(path) = trace_path(run.trace.as_deref(), &format!("simulate-{}.jsonl", run.seed)) {
        let mut sink = Sink::file(&path)?;
        for v in transcript_lines(&t, None) {
            sink.line(&v)?;
        }
        println!("trace: {}", path.display());
    }
    let bad = prep.violations(run, &t);
    if bad.is_empty() {
        Ok(())
    } else {
        Err(CliError::Violation(bad.join("; ")))
    }
}

#[derive(Default)]
struct Tally {
    plays: usize,
    prover_wins: usize,
    prover_losses: usize,
    forfeits: usize,
    timeouts: usize,
    violations: Vec<String>,
}

impl Tally {
    fn add(&mut self, t: &Transcript, bad: Vec<String>) {
        self.plays += 1;
        match t.result {
            MatchResult::ProverWins { .. } => self.prover_wins += 1,
            MatchResult::ProverLoses { .. } => self.prover_losses += 1,
            MatchResult::Timeout => self.timeouts += 1,
            _ => self.forfeits += 1,
        }
        self.violations.extend(bad.into_iter().map(|b| format!("play {}: {b}", self.plays - 1)));
    }
}

pub fn run_matches(run: &RunArgs, trials: u64) -> Result<(), CliError> {
    let prep = prepare(run)?;
    let setup = prep.setup(run);
    let cfg = prep.config(run);
    let c = prep.codec.as_ref();
    let dir = trace_path(run.trace.as_deref(), "match");
    let mut tally = Tally::default();
    let record = |t: &Transcript, tally: &mut Tally| -> Result<(), CliError> {
        if let Some(dir) = &dir {
            let mut sink = Sink::file(&dir.join(format!("match-{}.jsonl", tally.plays)))?;
            for v in transcript_lines(t, Some(tally.plays as u64)) {
                sink.line(&v)?;
            }
        }
        tally.add(t, prep.violations(run, t));
        Ok(())
    };
    let mut io_error = None;
    match (&run.prover, &run.delayer) {
        (Name::Exhaustive { .. }, Name::Exhaustive { .. }) => {
            return Err(CliError::Input("at most one side may be exhaustive".into()))
        }
        (Name::Exhaustive { depth, bound }, dn) => {
            strategies::delayer(dn, &setup, run.seed)?;
            let mut i = 0;
            exhaustive_provers(
                cfg,
                c,
                *depth,
                *bound,
                CAP,
                || {
                    i += 1;
                    BoxedDelayer(strategies::delayer(dn, &setup, derive_seed(run.seed, i)).expect("checked above"))
                },
                |t| {
                    if let Err(e) = record(t, &mut tally) {
                        io_error.get_or_insert(e);
                    }
                },
            )
            .map_err(|e| CliError::Input(e.to_string()))?;
        }
        (pn, Name::Exhaustive { depth, bound }) => {
            strategies::prover(pn, &setup, run.seed)?;
            let mut i = 0;
            exhaustive_delayers(
                cfg,
                c,
                *depth,
                *bound,
                CAP,
                || {
                    i += 1;
                    BoxedProver(strategies::prover(pn, &setup, derive_seed(run.seed, i)).expect("checked above"))
                },
                |t| {
                    if let Err(e) = record(t, &mut tally) {
                        io_error.get_or_insert(e);
                    }
                },
            )
            .map_err(|e| CliError::Input(e.to_string()))?;
        }
        (pn, dn) => {
            for i in 0..trials {
                let seed = derive_seed(run.seed, i);
                let mut p = strategies::prover(pn, &setup, seed)?;
                let mut d = strategies::delayer(dn, &setup, seed)?;
                let t = run_match(cfg, c, p.as_mut(), d.as_mut());
                record(&t, &mut tally)?;
            }
        }
    }
    if let Some(e) = io_error {
        return Err(e);
    }
    println!(
        "{} plays: prover wins {}, prover loses {}, forfeits {}, timeouts {}",
        tally.plays, tally.prover_wins, tally.prover_losses, tally.forfeits, tally.timeouts
    );
    if tally.violations.is_empty() {
        Ok(())
    } else {
        for v in tally.violations.iter().take(5) {
            eprintln!("{v}");
        }
        Err(CliError::Violation(format!("{} violations", tally.violations.len())))
    }
}

fn rate(good: usize, n: usize) -> String {
    format!("{good}/{n} ({:.1}%)", 100.0 * good as f64 / n.max(1) as f64)
}

pub fn threshold(
    k: usize,
    hs: RangeInclusive<usize>,
    trials: u64,
    seed: u64,
    depth: usize,
    value_bound: u64,
) -> Result<(), CliError> {
    if k < 1 || hs.is_empty() || *hs.start() < 1 {
        return Err(CliError::Input("need k ≥ 1 and 1 ≤ h-min ≤ h-max".into()));
    }
    let mut failures = Vec::new();
    for h in hs {
        if k >= 2 {
            let stated = stated_delayer_bound(k - 1, h);
            let computed = PaperDelayer::bound(k, h);
            let relation = match computed.cmp(&stated) {
                std::cmp::Ordering::Greater => "computed exceeds the stated constant",
                std::cmp::Ordering::Equal => "equal",
                std::cmp::Ordering::Less => "computed below the stated constant",
            };
            println!("k={k} h={h}: stated 2_{}(w^{})*2+w = {stated}; measure(initial)+w = {computed}; {relation}", k - 1, h + 1);
        }
        let top = omega_pow(&Ordinal::from(h as u64 + 1));
        let mut deltas = vec![Ordinal::omega(), top.clone(), threshold_order(h, 0), threshold_order(h, 1)];
        if k >= 2 {
            // just above the level-k Delayer's own bound
            deltas.push(ord_add(&PaperDelayer::bound(k, h), &Ordinal::one()));
        }
        let cfg = MatchConfig::new(k, h, 10_000);
        for delta in deltas {
            let c = make_codec(&delta).map_err(|e| CliError::Input(e.to_string()))?;
            let c = c.as_ref();
            // paper-delayer against exhaustive and random provers
            let in_pre = PaperDelayer::new(k, h, c).is_ok();
            let (mut n, mut good) = (0, 0);
            let mut tally = |t: &Transcript| {
                n += 1;
                good += usize::from(matches!(t.result, MatchResult::ProverLoses { .. }));
            };
            exhaustive_provers(cfg, c, depth, value_bound, CAP, || PaperDelayer::unchecked(k, h), &mut tally)
                .map_err(|e| CliError::Input(e.to_string()))?;
            for i in 0..trials {
                let s = derive_seed(seed, i);
                let mut p = RandomProver::new(derive_seed(s, strategies::PROVER_STREAM), value_bound, 4);
                tally(&run_match(cfg, c, &mut p, &mut PaperDelayer::unchecked(k, h)));
            }
            let note = if in_pre { "" } else { " (outside precondition)" };
            let mut line = format!("h={h} δ={delta}: paper-delayer survives {}{note}", rate(good, n));
            if in_pre && good < n {
                failures.push(format!("paper-delayer at h={h} δ={delta}"));
            }
            if k == 1 {
                let in_pre = AppendixProver::new(h, c).is_ok();
                let (mut n, mut good) = (0, 0);
                let mut tally = |t: &Transcript| {
                    n += 1;
                    good += usize::from(matches!(t.result, MatchResult::ProverWins { .. }));
                };
                exhaustive_delayers(cfg, c, depth, value_bound, CAP, || AppendixProver::unchecked(h), &mut tally)
                    .map_err(|e| CliError::Input(e.to_string()))?;
                for i in 0..trials {
                    let s = derive_seed(seed, i);
                    let mut d = RandomDelayer::new(derive_seed(s, strategies::DELAYER_STREAM), value_bound);
                    tally(&run_match(cfg, c, &mut AppendixProver::unchecked(h), &mut d));
                }
                let note = if in_pre { "" } else { " (outside precondition)" };
                line.push_str(&format!("; appendix-prover wins {}{note}", rate(good, n)));
                if in_pre && good < n {
                    failures.push(format!("appendix-prover at h={h} δ={delta}"));
                }
            }
            println!("{line}");
        }
    }
    if failures.is_empty() {
        Ok(())
    } else {
        Err(CliError::Violation(format!("below 100% within precondition: {}", failures.join(", "))))
    }
}

pub fn check_proof(path: &Path, k: usize, order: &str, search_bound: u64, ti: bool) -> Result<(), CliError> {
    let d = load_derivation(path)?;
    let c = codec(order)?;
    let v = if ti {
        check_ti_derivation(&d, k, c.as_ref(), search_bound)
    } else {
        check_derivation(&d, k, c.as_ref(), search_bound)
    };
    println!("{v}");
    if v.is_accepted() {
        Ok(())
    } else {
        Err(CliError::Violation("derivation rejected".into()))
    }
}

pub struct ExtractArgs {
    pub path: PathBuf,
    pub order: String,
    pub delayer: Name,
    pub trials: u64,
    pub seed: u64,
    pub search_bound: u64,
    pub value_bound: u64,
    pub max_turns: usize,
    pub trace: Option<PathBuf>,
}

pub fn extract(a: ExtractArgs) -> Result<(), CliError> {
    let c = codec(&a.order)?;
    let c = c.as_ref();
    let base = ExtractedProver::new(load_derivation(&a.path)?, c, a.search_bound)
        .map_err(|e| CliError::Input(e.to_string()))?;
    let cfg = MatchConfig::new(1, base.height(), a.max_turns);
    let mut sink = match trace_path(a.trace.as_deref(), "extract.jsonl") {
        Some(p) => Sink::file(&p)?,
        None => Sink::stdout(),
    };
    let (mut plays, mut wins) = (0u64, 0u64);
    let mut bad = Vec::new();
    let mut record = |t: &Transcript, sink: &mut Sink| -> Result<(), CliError> {
        let id = plays;
        plays += 1;
        wins += u64::from(t.result.prover_won());
        if t.result.prover_lost() {
            bad.push(format!("match {id}: {}", describe(&t.result)));
        }
        for v in transcript_lines(t, Some(id)) {
            sink.line(&v)?;
        }
        let reports = dagger_trace(&base, t, c).map_err(|e| CliError::Violation(format!("match {id}: {e}")))?;
        for (i, r) in reports.iter().enumerate() {
            if !r.all_pass() {
                bad.push(format!("match {id} report {i}: {:?}", r.failures().collect::<Vec<_>>()));
            }
            sink.line(&json!({"match": id, "dagger": i, "pass": r.all_pass(), "checks": r}))?;
        }
        Ok(())
    };
    match &a.delayer {
        Name::Exhaustive { depth, bound } => {
            let mut err = None;
            exhaustive_delayers(cfg, c, *depth, *bound, CAP, || base.clone(), |t| {
                if let Err(e) = record(t, &mut sink) {
                    err.get_or_insert(e);
                }
            })
            .map_err(|e| CliError::Input(e.to_string()))?;
            if let Some(e) = err {
                return Err(e);
            }
        }
        Name::Random | Name::PaperDelayer => {
            for i in 0..a.trials {
                let s = derive_seed(a.seed, i);
                let mut d: Box<dyn Delayer> = if a.delayer == Name::Random {
                    Box::new(RandomDelayer::new(derive_seed(s, strategies::DELAYER_STREAM), a.value_bound))
                } else {
                    // the derivation guarantees a win whatever the order type
                    Box::new(PaperDelayer::unchecked(1, base.height()))
                };
                let t = run_match(cfg, c, &mut base.clone(), d.as_mut());
                record(&t, &mut sink)?;
            }
        }
        other => return Err(CliError::Input(format!("{other:?} is not a delayer"))),
    }
    eprintln!("extracted prover won {wins}/{plays} plays");
    if bad.is_empty() {
        Ok(())
    } else {
        for b in bad.iter().take(5) {
            eprintln!("{b}");
        }
        Err(CliError::Violation(format!("{} failures", bad.len())))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    /// comb_value inverts comb_of_ordinal.
    Comb,
    /// The level-1 clock strictly decreases.
    Clock,
    /// The level-k measure drops by at least ω.
    Monotonicity,
    /// Level-2 and level-3 structure clauses.
    Structure,
    /// The appendix prover's invariant and wins up to its threshold.
    Appendix,
}

fn random_play(k: usize, h: usize, c: &dyn WellOrderCodec, seed: u64) -> Transcript {
    let mut p = RandomProver::new(derive_seed(seed, strategies::PROVER_STREAM), 3, 4);
    let mut d = RandomDelayer::new(derive_seed(seed, strategies::DELAYER_STREAM), 3);
    run_match(MatchConfig::new(k, h, 200), c, &mut p, &mut d)
}

/// Runs plays until `samples` transitions were checked.
fn per_transition(
    samples: usize,
    seed: u64,
    order: &str,
    mut pick: impl FnMut(u64) -> (usize, usize),
    mut check: impl FnMut(&Position, &Position) -> Option<String>,
) -> Result<(usize, Vec<String>), CliError> {
    let c = codec(order)?;
    let (mut n, mut i) = (0, 0u64);
    let mut bad = Vec::new();
    while n < samples {
        let (k, h) = pick(i);
        let t = random_play(k, h, c.as_ref(), derive_seed(seed, i));
        for w in t.positions().windows(2) {
            n += 1;
            if let Some(e) = check(w[0], w[1]) {
                bad.push(format!("play {i} (k={k}, h={h}): {e}"));
            }
        }
        i += 1;
    }
    Ok((n, bad))
}

pub fn invariants(suite: Suite, samples: usize, seed: u64) -> Result<(), CliError> {
    let (n, bad) = match suite {
        Suite::Comb => {
            let mut bad = Vec::new();
            for i in 0..samples as u64 {
                let x = derive_seed(seed, i);
                let h = 1 + (x % 3) as usize;
                let cs: Vec<(Ordinal, u64)> =
                    (0..h as u64).rev().map(|e| (Ordinal::from(e), derive_seed(x, e) % 1000)).collect();
                let mut a = Ordinal::sum_of(cs);
                if a == Ordinal::zero() {
                    a = omega_pow(&Ordinal::from(h as u64));
                }
                let back = comb_of_ordinal(&a, h).map_err(|e| e.to_string()).and_then(|t| t.comb_value().map_err(|e| e.to_string()));
                if back.as_ref() != Ok(&a) {
                    bad.push(format!("{a} at h={h}: {back:?}"));
                }
            }
            (samples, bad)
        }
        Suite::Clock => per_transition(samples, seed, "w^4+w+1", |i| (1, 1 + (i % 3) as usize), |p, q| {
            let (a, b) = (p.tree().clock_value(), q.tree().clock_value());
            (b >= a).then(|| format!("clock {a} -> {b}"))
        })?,
        Suite::Monotonicity => {
            per_transition(samples, seed, "w^(w^(w))*2+w+1", |i| (1 + (i % 3) as usize, 1 + (i / 3 % 2) as usize), |p, q| {
                let (a, b) = (measure(p), measure(q));
                (ord_add(&b, &Ordinal::omega()) > a).then(|| format!("measure {a} -> {b}"))
            })?
        }
        Suite::Structure => {
            let c = codec("w^(w)*2+w+1")?;
            let mut bad = Vec::new();
            for i in 0..samples as u64 {
                let (k, h) = (2 + (i % 2) as usize, 1 + (i / 2 % 2) as usize);
                let t = random_play(k, h, c.as_ref(), derive_seed(seed, i));
                bad.extend(validate_structure(&t, c.as_ref()).failures().map(|f| format!("play {i}: {f:?}")));
            }
            (samples, bad)
        }
        Suite::Appendix => {
            let mut bad = Vec::new();
            for i in 0..samples as u64 {
                let h = 1 + (i % 2) as usize;
                let c = make_codec(&threshold_order(h, 0)).map_err(|e| CliError::Input(e.to_string()))?;
                let mut p = AppendixProver::new(h, c.as_ref()).map_err(|e| CliError::Input(e.to_string()))?;
                let mut d = RandomDelayer::new(derive_seed(seed, i), 3);
                let t = run_match(MatchConfig::new(1, h, 10_000), c.as_ref(), &mut p, &mut d);
                if !t.result.prover_won() {
                    bad.push(format!("play {i}: {}", describe(&t.result)));
                }
                bad.extend(validate_appendix_invariant(&t, c.as_ref()).into_iter().map(|(j, e)| format!("play {i} turn {j}: {e}")));
            }
            (samples, bad)
        }
    };
    println!("suite {suite:?}: {n} samples, {} failures", bad.len());
    for b in bad.iter().take(5) {
        println!("  {b}");
    }
    if bad.is_empty() {
        Ok(())
    } else {
        Err(CliError::Violation(format!("{} failures", bad.len())))
    }
}
