//! Acceptance run: eleven criteria, one PASS/FAIL line each, with pinned
//! sample sizes, tolerances (zero failures everywhere) and runtime limits.

mod common;

use std::time::{Duration, Instant};

use ordgame_core::extraction::{dagger_trace, DaggerReport, ExtractedProver};
use ordgame_core::game::{measure, run_match, validate_structure, MatchConfig, MatchResult, Transcript};
use ordgame_core::logic::{check_ti_derivation, single_node_mutations, ti_omega_derivation, ti_omega_derivation_with_cut, Verdict};
use ordgame_core::ordinal::{omega_pow, ord_add, parse_ordinal, Ordinal};
use ordgame_core::strategy::{
    exhaustive_delayers, exhaustive_provers, validate_appendix_invariant, AppendixProver,
    PaperDelayer, RandomDelayer, RandomProver,
};
use ordgame_core::tree::comb_of_ordinal;
use ordgame_core::wellorder::{make_codec, threshold_order, WellOrderCodec};
use proptest::strategy::{Strategy, ValueTree};
use proptest::test_runner::TestRunner;

type Outcome = Result<String, String>;

const CAP: usize = 5_000_000;

fn lost(t: &Transcript) -> bool {
    matches!(t.result, MatchResult::ProverLoses { .. })
}

fn won(t: &Transcript) -> bool {
    matches!(t.result, MatchResult::ProverWins { .. })
}

fn first<T: std::fmt::Debug>(bad: &[T]) -> String {
    format!("{} failures, first {:?}", bad.len(), bad.first())
}

fn c1_comb_bijection() -> Outcome {
    let mut n = 0;
    let mut bad = Vec::new();
    for h in 1..=3usize {
        let mut cases = vec![omega_pow(&Ordinal::from(h as u64))];
        // every coefficient vector over ω^(h-1), ..., ω^0 with entries in 0..=4
        for code in 1..5u64.pow(h as u32) {
            let terms = (0..h).filter_map(|i| {
                let ci = code / 5u64.pow(i as u32) % 5;
                (ci > 0).then(|| ord_times(omega_pow(&Ordinal::from(i as u64)), ci))
            });
            let mut terms: Vec<Ordinal> = terms.collect();
            terms.reverse();
            cases.push(terms.iter().fold(Ordinal::zero(), |acc, t| ord_add(&acc, t)));
        }
        for a in cases {
            n += 1;
            let back = comb_of_ordinal(&a, h).map_err(|e| e.to_string()).and_then(|t| t.comb_value().map_err(|e| e.to_string()));
            if back.as_ref() != Ok(&a) {
                bad.push((h, a.to_string(), back));
            }
        }
    }
    if bad.is_empty() {
        Ok(format!("{n} ordinals round-trip"))
    } else {
        Err(first(&bad))
    }
}

fn ord_times(a: Ordinal, n: u64) -> Ordinal {
    (0..n).fold(Ordinal::zero(), |acc, _| ord_add(&acc, &a))
}

fn random_play(k: usize, h: usize, c: &dyn WellOrderCodec, seed: u64) -> Transcript {
    let mut p = RandomProver::new(seed, 3, 4);
    let mut d = RandomDelayer::new(seed ^ 0xabc, 3);
    run_match(MatchConfig::new(k, h, 200), c, &mut p, &mut d)
}

fn c2_clock() -> Outcome {
    let c = make_codec(&parse_ordinal("w^4+w+1").unwrap()).unwrap();
    let (mut n, mut seed) = (0usize, 0u64);
    let mut bad = Vec::new();
    while n < 10_000 {
        let h = 1 + (seed % 3) as usize;
        let t = random_play(1, h, c.as_ref(), seed);
        let clocks: Vec<Ordinal> = t.positions().iter().map(|p| p.tree().clock_value()).collect();
        for w in clocks.windows(2) {
            n += 1;
            if w[1] >= w[0] {
                bad.push((seed, w[0].to_string(), w[1].to_string()));
            }
        }
        seed += 1;
    }
    if bad.is_empty() {
        Ok(format!("{n} transitions over {seed} plays, h in 1..=3"))
    } else {
        Err(first(&bad))
    }
}

fn c3_measure() -> Outcome {
    let c = make_codec(&parse_ordinal("w^(w^(w))*2+w+1").unwrap()).unwrap();
    let mut bad = Vec::new();
    let mut summary = Vec::new();
    for k in [2usize, 3] {
        let (mut n, mut seed) = (0usize, 0u64);
        while n < 1000 {
            let h = 1 + (seed % 2) as usize;
            let t = random_play(k, h, c.as_ref(), seed);
            let ms: Vec<Ordinal> = t.positions().iter().map(|p| measure(p)).collect();
            for w in ms.windows(2) {
                n += 1;
                if ord_add(&w[1], &Ordinal::omega()) > w[0] {
                    bad.push((k, seed, w[0].to_string(), w[1].to_string()));
                }
            }
            seed += 1;
        }
        summary.push(format!("level {k}: {n} transitions"));
    }
    if bad.is_empty() {
        Ok(summary.join(", "))
    } else {
        Err(first(&bad))
    }
}

fn c4_delayer_threshold() -> Outcome {
    let mut bad = Vec::new();
    let mut summary = Vec::new();
    for h in [1usize, 2] {
        let c = make_codec(&threshold_order(h, 1)).unwrap();
        let cfg = MatchConfig::new(1, h, 10_000);
        let n = exhaustive_provers(cfg, c.as_ref(), 4, 3, CAP, || PaperDelayer::new(1, h, c.as_ref()).unwrap(), |t| {
            if !lost(t) {
                bad.push((h, t.result.clone()));
            }
        })
        .map_err(|e| format!("h={h}: {e:?}"))?;
        for s in 0..1000 {
            let mut p = RandomProver::new(s, 3, 4);
            let mut d = PaperDelayer::new(1, h, c.as_ref()).unwrap();
            let t = run_match(cfg, c.as_ref(), &mut p, &mut d);
            if !lost(&t) {
                bad.push((h, t.result));
            }
        }
        summary.push(format!("h={h}: {n} exhaustive + 1000 random"));
    }
    if bad.is_empty() {
        Ok(summary.join(", "))
    } else {
        Err(first(&bad))
    }
}

fn c5_prover_threshold() -> Outcome {
    let mut bad = Vec::new();
    let mut summary = Vec::new();
    for h in [1usize, 2] {
        let cfg = MatchConfig::new(1, h, 10_000);
        for delta in [Ordinal::omega(), threshold_order(h, 0)] {
            let c = make_codec(&delta).unwrap();
            let mut check = |t: &Transcript| {
                let inv = validate_appendix_invariant(t, c.as_ref());
                if !won(t) || !inv.is_empty() {
                    bad.push(format!("h={h} δ={delta}: {:?} {inv:?}", t.result));
                }
            };
            let n = exhaustive_delayers(cfg, c.as_ref(), 4, 3, CAP, || AppendixProver::new(h, c.as_ref()).unwrap(), &mut check)
                .map_err(|e| format!("h={h}: {e:?}"))?;
            for s in 0..1000 {
                let mut p = AppendixProver::new(h, c.as_ref()).unwrap();
                let mut d = RandomDelayer::new(s, 3);
                check(&run_match(cfg, c.as_ref(), &mut p, &mut d));
            }
            summary.push(format!("h={h} δ={delta}: {n}+1000"));
        }
    }
    if bad.is_empty() {
        Ok(summary.join(", "))
    } else {
        Err(first(&bad))
    }
}

fn c6_head_to_head() -> Outcome {
    let mut lines = Vec::new();
    let mut bad = Vec::new();
    for h in [1usize, 2] {
        let cfg = MatchConfig::new(1, h, 10_000);
        let c = make_codec(&threshold_order(h, 1)).unwrap();
        let t = run_match(cfg, c.as_ref(), &mut AppendixProver::unchecked(h), &mut PaperDelayer::new(1, h, c.as_ref()).unwrap());
        if !lost(&t) {
            bad.push(format!("h={h} above threshold: {:?}", t.result));
        }
        let c = make_codec(&threshold_order(h, 0)).unwrap();
        let u = run_match(cfg, c.as_ref(), &mut AppendixProver::new(h, c.as_ref()).unwrap(), &mut PaperDelayer::unchecked(1, h));
        if !won(&u) {
            bad.push(format!("h={h} at threshold: {:?}", u.result));
        }
        lines.push(format!("h={h}: loses in {}, wins in {} turns", t.turns.len(), u.turns.len()));
    }
    if bad.is_empty() {
        Ok(lines.join(", "))
    } else {
        Err(first(&bad))
    }
}

fn c7_level_two_delayer() -> Outcome {
    let b = ord_add(&PaperDelayer::bound(2, 1), &Ordinal::one());
    let c = make_codec(&b).unwrap();
    let cfg = MatchConfig::new(2, 1, 10_000);
    let mut bad = Vec::new();
    let n = exhaustive_provers(cfg, c.as_ref(), 3, 2, CAP, || PaperDelayer::new(2, 1, c.as_ref()).unwrap(), |t| {
        if !lost(t) {
            bad.push(t.result.clone());
        }
    })
    .map_err(|e| format!("{e:?}"))?;
    for s in 0..500 {
        let t = run_match(cfg, c.as_ref(), &mut RandomProver::new(s, 2, 4), &mut PaperDelayer::new(2, 1, c.as_ref()).unwrap());
        if !lost(&t) {
            bad.push(t.result);
        }
    }
    if bad.is_empty() {
        Ok(format!("δ={b}: {n} exhaustive + 500 random"))
    } else {
        Err(first(&bad))
    }
}

fn c8_structure() -> Outcome {
    let c = make_codec(&parse_ordinal("w^(w)*2+w+1").unwrap()).unwrap();
    let mut bad = Vec::new();
    let mut turns = 0;
    for k in [2usize, 3] {
        for seed in 0..1000u64 {
            let t = random_play(k, 1 + (seed % 2) as usize, c.as_ref(), seed);
            turns += t.turns.len();
            let r = validate_structure(&t, c.as_ref());
            if !r.all_pass() {
                bad.push(format!("k={k} seed={seed}: {:?}", r.failures().next()));
            }
        }
    }
    if bad.is_empty() {
        Ok(format!("2000 plays, {turns} transitions"))
    } else {
        Err(first(&bad))
    }
}

fn c9_proof_checking() -> Outcome {
    let c = make_codec(&Ordinal::omega()).unwrap();
    let d = ti_omega_derivation();
    let v = check_ti_derivation(&d, 1, c.as_ref(), 40);
    if !v.is_accepted() {
        return Err(format!("fixture: {v}"));
    }
    let ms = single_node_mutations(&d);
    if ms.len() < 20 {
        return Err(format!("only {} mutations", ms.len()));
    }
    let mut bad = Vec::new();
    for m in &ms {
        match check_ti_derivation(&m.derivation, 1, c.as_ref(), 40) {
            Verdict::Rejected { node, .. } if node == m.node => {}
            v => bad.push(format!("{:?} at {:?}: {v}", m.kind, m.node)),
        }
    }
    if bad.is_empty() {
        Ok(format!("fixture accepted, {} mutations rejected at their node", ms.len()))
    } else {
        Err(first(&bad))
    }
}

fn c10_extraction() -> Outcome {
    let c = make_codec(&Ordinal::omega()).unwrap();
    let mut bad = Vec::new();
    let mut summary = Vec::new();
    for d in [ti_omega_derivation(), ti_omega_derivation_with_cut()] {
        let base = ExtractedProver::new(d, c.as_ref(), 64).map_err(|e| e.to_string())?;
        let cfg = MatchConfig::new(1, base.height(), 500);
        let mut check = |t: &Transcript, reports: Result<Vec<DaggerReport>, String>| match reports {
            Ok(r) if won(t) && r.len() == 1 + t.turns.iter().filter(|x| x.next.is_some()).count() && r.iter().all(DaggerReport::all_pass) => {}
            Ok(r) => bad.push(format!("{:?} {} reports {} turns, failing clauses {:?}", t.result, r.len(), t.turns.len(), r.iter().flat_map(|x| x.failures()).next())),
            Err(e) => bad.push(e),
        };
        let n = exhaustive_delayers(cfg, c.as_ref(), 4, 6, CAP, || base.clone(), |t| {
            check(t, dagger_trace(&base, t, c.as_ref()).map_err(|e| e.to_string()))
        })
        .map_err(|e| format!("{e:?}"))?;
        for seed in 0..1000u64 {
            let mut p = base.clone();
            let t = run_match(cfg, c.as_ref(), &mut p, &mut RandomDelayer::new(seed, 6));
            check(&t, Ok(p.reports().to_vec()));
        }
        summary.push(format!("h={}: {n} exhaustive + 1000 random", base.height()));
    }
    if bad.is_empty() {
        Ok(summary.join(", "))
    } else {
        Err(first(&bad))
    }
}

fn c11_forcing() -> Outcome {
    let c = make_codec(&Ordinal::omega()).unwrap();
    let strat = (
        proptest::prop_oneof![common::arb_formula(), common::arb_wide()],
        proptest::collection::vec(0u64..4, 4),
        common::arb_rho(),
    );
    let mut runner = TestRunner::deterministic();
    let (mut n, mut skipped) = (0, 0);
    let mut bad = Vec::new();
    while n < 1000 {
        let (o, env, rho) = strat.new_tree(&mut runner).map_err(|e| e.to_string())?.current();
        match common::check_case(&o, env, &rho, c.as_ref()) {
            Ok(true) => n += 1,
            Ok(false) => skipped += 1,
            Err(e) => {
                n += 1;
                bad.push(e);
            }
        }
    }
    if bad.is_empty() {
        Ok(format!("{n} formulas agree ({skipped} over 12 atoms redrawn)"))
    } else {
        Err(first(&bad))
    }
}

fn main() {
    let criteria: [(&str, u64, fn() -> Outcome); 11] = [
        ("comb bijection", 1, c1_comb_bijection),
        ("clock monotonicity", 10, c2_clock),
        ("measure monotonicity", 30, c3_measure),
        ("delayer threshold", 120, c4_delayer_threshold),
        ("prover threshold", 120, c5_prover_threshold),
        ("head-to-head", 10, c6_head_to_head),
        ("level-2 delayer", 120, c7_level_two_delayer),
        ("structure validator", 60, c8_structure),
        ("proof checking", 5, c9_proof_checking),
        ("extraction", 300, c10_extraction),
        ("forcing oracle", 60, c11_forcing),
    ];
    let mut failed = 0;
    for (i, (name, limit, run)) in criteria.iter().enumerate() {
        let t0 = Instant::now();
        let out = run();
        let dt = t0.elapsed();
        let out = match out {
            Ok(msg) if dt > Duration::from_secs(*limit) => Err(format!("{msg}; over the {limit} s limit")),
            o => o,
        };
        match out {
            Ok(msg) => println!("criterion {:>2} PASS  {name}: {msg} [{dt:.2?}, limit {limit} s]", i + 1),
            Err(msg) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name}: {msg} [{dt:.2?}, limit {limit} s]", i + 1);
            }
        }
    }
    if failed > 0 {
        println!("{failed} of 11 criteria failed");
        std::process::exit(1);
    }
    println!("all 11 criteria passed");
}
