use std::collections::BTreeSet;

use ordgame_core::extraction::*;
use ordgame_core::game::{initial_position, run_match, step, MatchConfig, Move, Outcome, Play, Position};
use ordgame_core::logic::{parse_formula, ti_omega_derivation, ti_omega_derivation_with_cut, Derivation, Rule};
use ordgame_core::strategy::{exhaustive_delayers, Delayer, PaperDelayer, Prover, RandomDelayer};
use ordgame_core::wellorder::{make_codec, WellOrderCodec};
use ordgame_core::Ordinal;

fn omega() -> std::sync::Arc<dyn WellOrderCodec> {
    make_codec(&Ordinal::omega()).unwrap()
}

/// Drives the prover by hand, recording its state after every transition.
fn walk(
    p: &mut ExtractedProver,
    del: &mut dyn Delayer,
    c: &dyn WellOrderCodec,
    turns: usize,
) -> Vec<(Position, ExtractionState)> {
    let h = p.height();
    let m0 = del.initial_claim(1, h, c).unwrap();
    let mut positions = vec![initial_position(1, h, m0)];
    let mut out = Vec::new();
    for _ in 0..turns {
        let play = Play { k: 1, h, codec: c, positions: &positions };
        let q = p.query(&play).unwrap();
        let answer = del.answer(&play, &q).unwrap();
        let option = p.option(&play, &q, &answer).unwrap();
        let m = Move { query: q.clone(), answer: answer.clone(), option };
        let Outcome::Next(next) = step(play.current(), &m, c).unwrap() else { break };
        p.observe(&play, &q, &answer, Some(&next));
        out.push((next.clone(), p.state().unwrap().clone()));
        positions.push(next);
    }
    out
}

#[test]
fn initial_state_matches_the_base_case() {
    let s = init_state(4);
    assert_eq!(s.v.len(), 1);
    assert_eq!(s.v[&vec![]], Vec::<usize>::new());
    assert!(s.e.is_empty());
    assert_eq!(s.counterexample(&parse_formula("A z. !X(z)").unwrap()), Some(4));
    let c = omega();
    let d = ti_omega_derivation();
    let p0 = initial_position(1, d.height(), 4);
    let r = validate_dagger(&s, p0.innermost(), &d, c.as_ref(), 64);
    assert!(r.all_pass(), "{r:?}");
}

#[test]
fn dagger_reports_a_wrong_counterexample() {
    let c = omega();
    let d = ti_omega_derivation();
    let s = init_state(4);
    // ρ₀ claims 3, so W = 4 does not falsify ∀y.¬X(y)
    let p0 = initial_position(1, d.height(), 3);
    let r = validate_dagger(&s, p0.innermost(), &d, c.as_ref(), 64);
    assert!(!r.clause(DaggerClause::Falsification).unwrap().pass);
}

#[test]
fn cut_transition_expands_both_premises() {
    let c = omega();
    let d = ti_omega_derivation_with_cut();
    let mut p = ExtractedProver::new(d.clone(), c.as_ref(), 64).unwrap();
    let mut del = PaperDelayer::unchecked(1, p.height());
    let states = walk(&mut p, &mut del, c.as_ref(), 2);
    let (pos, s) = &states[1];
    // the ∀ step, then the cut as ⟨0,1⟩
    assert_eq!(pos.tree().leftmost_leaf(), vec![0, 0]);
    assert!(pos.tree().contains(&[0, 1]));
    let cut = d.node(&s.v[&vec![0]]).unwrap();
    assert_eq!(cut.rule, Rule::Cut);
    let phi = cut.principal.clone().unwrap();
    assert_eq!(d.node(&s.v[&vec![0, 0]]).unwrap().sequent, cut.sequent.with([phi]));
    let r = validate_dagger(s, pos.innermost(), &d, c.as_ref(), 64);
    assert!(r.clause(DaggerClause::Cut).unwrap().pass, "{r:?}");
    assert!(r.all_pass());
}

#[test]
fn cut_backtrack_records_the_counterexample() {
    let c = omega();
    let d = ti_omega_derivation_with_cut();
    let mut p = ExtractedProver::new(d.clone(), c.as_ref(), 64).unwrap();
    let mut del = PaperDelayer::unchecked(1, p.height());
    let states = walk(&mut p, &mut del, c.as_ref(), 3);
    let (pos, s) = &states[2];
    // X(c) & c+0<=c is forced by ρ₀, so Prover cuts back to the right premise
    assert_eq!(pos.tree().leftmost_leaf(), vec![0, 1]);
    let neg = parse_formula("A x. !X(x) | !(x+0<=c)").unwrap();
    assert_eq!(s.counterexample(&neg), Some(s.e["c"]));
    assert!(validate_dagger(s, pos.innermost(), &d, c.as_ref(), 64).all_pass());
}

#[test]
fn corrupted_induction_variable_is_reported() {
    let c = omega();
    let d = ti_omega_derivation();
    let mut p = ExtractedProver::new(d.clone(), c.as_ref(), 64).unwrap();
    let mut del = PaperDelayer::unchecked(1, p.height());
    let states = walk(&mut p, &mut del, c.as_ref(), 3);
    let (pos, s) = &states[2];
    // after the backtrack c(T) sits in the first step premise, with E(a) = 0
    assert_eq!(pos.tree().leftmost_leaf(), vec![0, 1]);
    assert_eq!(s.e.get("a"), Some(&0));
    assert!(validate_dagger(s, pos.innermost(), &d, c.as_ref(), 64).all_pass());
    let mut bad = s.clone();
    bad.e.insert("a".into(), 1);
    let r = validate_dagger(&bad, pos.innermost(), &d, c.as_ref(), 64);
    assert!(!r.clause(DaggerClause::Induction).unwrap().pass);
}

#[test]
fn extracted_prover_beats_random_delayers() {
    let c = omega();
    let base = ExtractedProver::new(ti_omega_derivation(), c.as_ref(), 64).unwrap();
    for seed in 0..200u64 {
        let mut p = base.clone();
        let mut del = RandomDelayer::new(seed, 6);
        let t = run_match(MatchConfig::new(1, p.height(), 500), c.as_ref(), &mut p, &mut del);
        assert!(t.result.prover_won(), "seed {seed}: {:?}", t.result);
        for (i, r) in p.reports().iter().enumerate() {
            assert!(r.all_pass(), "seed {seed} turn {i}: {:?}", r.failures().collect::<Vec<_>>());
        }
        // the replayed trace agrees with the live one
        assert_eq!(dagger_trace(&base, &t, c.as_ref()).unwrap(), p.reports());
    }
}

#[test]
fn both_fixtures_beat_exhaustive_delayers() {
    let c = omega();
    for d in [ti_omega_derivation(), ti_omega_derivation_with_cut()] {
        let base = ExtractedProver::new(d, c.as_ref(), 64).unwrap();
        let mut failures = Vec::new();
        let cfg = MatchConfig::new(1, base.height(), 500);
        let n = exhaustive_delayers(cfg, c.as_ref(), 8, 4, 100_000, || base.clone(), |t| {
            let reports = dagger_trace(&base, t, c.as_ref()).unwrap();
            if !t.result.prover_won() || !reports.iter().all(DaggerReport::all_pass) {
                failures.push(t.result.clone());
            }
        })
        .unwrap();
        assert!(n > 50);
        assert!(failures.is_empty(), "{failures:?}");
    }
}

#[test]
fn rejected_derivation_is_not_extracted() {
    let c = omega();
    let mut d: Derivation = ti_omega_derivation();
    d.root.eigen = Some("q".into());
    d.root.children[0].children.clear();
    assert!(matches!(ExtractedProver::new(d, c.as_ref(), 64), Err(ExtractionError::NotAccepted(_))));
}

#[test]
fn queries_at_the_ti_subformula_are_singletons() {
    let c = omega();
    let d = ti_omega_derivation();
    let mut p = ExtractedProver::new(d.clone(), c.as_ref(), 64).unwrap();
    let mut del = PaperDelayer::unchecked(1, p.height());
    let h = p.height();
    let m0 = del.initial_claim(1, h, c.as_ref()).unwrap();
    let positions: Vec<Position> = walk(&mut p, &mut del, c.as_ref(), 4).into_iter().map(|x| x.0).collect();
    let mut all = vec![initial_position(1, h, m0)];
    all.extend(positions);
    let play = Play { k: 1, h, codec: c.as_ref(), positions: &all };
    // c(T) is at the ∃-rule on the TI subformula, witness b = m₀
    let q = p.query(&play).unwrap();
    assert_eq!(q, BTreeSet::from([m0]));
}
