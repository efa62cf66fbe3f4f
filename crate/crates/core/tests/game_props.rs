use ordgame_core::game::{measure, replay, run_match, validate_structure, MatchConfig, MatchResult, Transcript};
use ordgame_core::ordinal::{ord_add, parse_ordinal, Ordinal};
use ordgame_core::strategy::{RandomDelayer, RandomProver};
use ordgame_core::wellorder::make_codec;
use proptest::prelude::*;

fn random_play(k: usize, h: usize, order: &str, seed: u64) -> Transcript {
    let c = make_codec(&parse_ordinal(order).unwrap()).unwrap();
    let mut p = RandomProver::new(seed, 3, 4);
    let mut d = RandomDelayer::new(seed ^ 0xabc, 3);
    run_match(MatchConfig::new(k, h, 200), &*c, &mut p, &mut d)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn level_one_clock_strictly_decreases(h in 1usize..4, seed in any::<u64>()) {
        let t = random_play(1, h, "w^4+w+1", seed);
        let clocks: Vec<Ordinal> = t.positions().iter().map(|p| p.tree().clock_value()).collect();
        for w in clocks.windows(2) {
            prop_assert!(w[1] < w[0], "{} !< {}", w[1], w[0]);
        }
    }

    #[test]
    fn measure_drops_by_at_least_omega(k in 1usize..4, h in 1usize..3, seed in any::<u64>()) {
        let t = random_play(k, h, "w^(w^(w))*2+w+1", seed);
        let ms: Vec<Ordinal> = t.positions().iter().map(|p| measure(p)).collect();
        for w in ms.windows(2) {
            prop_assert!(ord_add(&w[1], &Ordinal::omega()) <= w[0], "{} + w > {}", w[1], w[0]);
        }
    }

    #[test]
    fn replay_reproduces_every_outcome(k in 1usize..4, h in 1usize..3, seed in any::<u64>()) {
        let order = parse_ordinal("w^(w)*2+w+1").unwrap();
        let c = make_codec(&order).unwrap();
        let t = random_play(k, h, "w^(w)*2+w+1", seed);
        prop_assert_eq!(replay(&t, &*c), Ok(()));
        // same seeds, same transcript
        prop_assert_eq!(&random_play(k, h, "w^(w)*2+w+1", seed), &t);
    }

    #[test]
    fn structure_lemma_holds_on_random_plays(k in 2usize..4, h in 1usize..3, seed in any::<u64>()) {
        let order = parse_ordinal("w^(w)*2+w+1").unwrap();
        let c = make_codec(&order).unwrap();
        let t = random_play(k, h, "w^(w)*2+w+1", seed);
        let report = validate_structure(&t, &*c);
        let failures: Vec<_> = report.failures().collect();
        prop_assert!(failures.is_empty(), "{:?}", failures);
    }
}

#[test]
fn random_plays_terminate() {
    for seed in 0..50 {
        let t = random_play(2, 1, "w^(w)*2+w+1", seed);
        assert_ne!(t.result, MatchResult::Timeout);
    }
}
