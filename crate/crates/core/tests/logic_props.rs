use ordgame_core::game::PartialPredicate;
use ordgame_core::logic::*;
use ordgame_core::wellorder::make_codec;
use ordgame_core::Ordinal;
use proptest::prelude::*;

fn arb_term() -> impl Strategy<Value = Term> {
    let leaf = prop_oneof![
        prop::sample::select(vec!["a", "b", "x", "y"]).prop_map(Term::var),
        (0u64..5).prop_map(Term::Num),
    ];
    leaf.prop_recursive(2, 6, 2, |t| {
        prop_oneof![
            (t.clone(), t.clone()).prop_map(|(a, b)| Term::add(a, b)),
            (t.clone(), t).prop_map(|(a, b)| Term::mul(a, b)),
        ]
    })
}

fn arb_atom() -> impl Strategy<Value = Atom> {
    prop_oneof![
        arb_term().prop_map(Atom::X),
        (arb_term(), arb_term()).prop_map(|(a, b)| Atom::Eq(a, b)),
        (arb_term(), arb_term()).prop_map(|(a, b)| Atom::Le(a, b)),
        (arb_term(), arb_term()).prop_map(|(a, b)| Atom::Prec(a, b)),
    ]
}

/// Arbitrary NNF formulas, unbounded quantifiers included.
fn arb_formula() -> impl Strategy<Value = Formula> {
    let leaf = (any::<bool>(), arb_atom()).prop_map(|(p, a)| Formula::lit(p, a));
    leaf.prop_recursive(4, 24, 2, |f| {
        let var = prop::sample::select(vec!["x", "y", "z"]);
        prop_oneof![
            (f.clone(), f.clone()).prop_map(|(a, b)| Formula::and(a, b)),
            (f.clone(), f.clone()).prop_map(|(a, b)| Formula::or(a, b)),
            (var.clone(), f.clone()).prop_map(|(x, b)| Formula::forall(x, b)),
            (var, f).prop_map(|(x, b)| Formula::exists(x, b)),
        ]
    })
}

/// Δ₀ formulas over small numerals and `x`.
fn arb_closed_delta0() -> impl Strategy<Value = Formula> {
    let t = prop_oneof![(0u64..6).prop_map(Term::Num), Just(Term::var("x"))];
    let atom = prop_oneof![
        t.clone().prop_map(Atom::X),
        (t.clone(), t).prop_map(|(a, b)| Atom::Le(a, b)),
    ];
    let leaf = (any::<bool>(), atom).prop_map(|(p, a)| Formula::lit(p, a));
    leaf.prop_recursive(3, 16, 2, |f| {
        prop_oneof![
            (f.clone(), f.clone()).prop_map(|(a, b)| Formula::and(a, b)),
            (f.clone(), f.clone()).prop_map(|(a, b)| Formula::or(a, b)),
            (0u64..4, f.clone()).prop_map(|(n, b)| Formula::forall_le("x", Term::Num(n), b)),
            (0u64..4, f).prop_map(|(n, b)| Formula::exists_le("x", Term::Num(n), b)),
        ]
    })
}

fn arb_rho() -> impl Strategy<Value = PartialPredicate> {
    prop::collection::btree_map(0u64..8, any::<bool>(), 0..8).prop_map(|m| m.into_iter().collect())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn complement_is_an_involution(f in arb_formula()) {
        prop_assert_eq!(f.complement().complement(), f);
    }

    #[test]
    fn printing_round_trips(f in arb_formula()) {
        let back = parse_formula(&f.to_string()).unwrap();
        prop_assert!(back.alpha_eq(&f), "{} vs {}", f, back);
    }

    #[test]
    fn classification_is_stable_under_complement(f in arb_formula()) {
        let dual = match f.classify() {
            Complexity::PSigma(i) => Complexity::PPi(i),
            Complexity::PPi(i) => Complexity::PSigma(i),
            c => c,
        };
        prop_assert_eq!(f.complement().classify(), dual);
    }

    #[test]
    fn forcing_is_monotone(f in arb_closed_delta0(), rho in arb_rho(), extra in arb_rho()) {
        let c = make_codec(&Ordinal::omega()).unwrap();
        let e = Assignment::from([("x".to_string(), 2)]);
        let Ok(bigger) = rho.merge(&extra) else { return Ok(()) };
        let small = eval3(&f, &e, &rho, c.as_ref()).unwrap();
        if small != Truth::Unknown {
            prop_assert_eq!(eval3(&f, &e, &bigger, c.as_ref()).unwrap(), small);
        }
    }

    #[test]
    fn query_set_decides(f in arb_closed_delta0(), rho in arb_rho(), fill in any::<u64>()) {
        let c = make_codec(&Ordinal::omega()).unwrap();
        let e = Assignment::from([("x".to_string(), 2)]);
        let q = min_query_set(&f, &e, &rho, c.as_ref()).unwrap();
        let mut ext = rho.clone();
        for (i, n) in q.iter().enumerate() {
            if ext.get(*n).is_none() {
                ext.insert(*n, fill >> (i % 64) & 1 == 1);
            }
        }
        prop_assert_ne!(eval3(&f, &e, &ext, c.as_ref()).unwrap(), Truth::Unknown);
    }
}

#[test]
fn ti_sequent_shape() {
    let ti = build_ti();
    assert_eq!(ti.len(), 2);
    let [all, ex] = ti_formulas();
    assert_eq!(all.classify(), Complexity::PPi(1));
    assert_eq!(ex.classify(), Complexity::PSigma(2));
    assert!(all.complement().alpha_eq(&parse_formula("E y. X(y)").unwrap()));
}

#[test]
fn spec_query_set_examples() {
    let c = make_codec(&Ordinal::omega()).unwrap();
    let e = Assignment::new();
    let f = parse_formula("X(0) | X(1)").unwrap();
    let none = PartialPredicate::new();
    assert_eq!(min_query_set(&f, &e, &none, c.as_ref()).unwrap(), [0, 1].into());
    let taut = parse_formula("X(0) | !X(0)").unwrap();
    assert!(min_query_set(&taut, &e, &none, c.as_ref()).unwrap().is_empty());
    let one = PartialPredicate::singleton(0, true);
    assert!(min_query_set(&f, &e, &one, c.as_ref()).unwrap().is_empty());
}

fn leaf(seq: &[&str]) -> ProofNode {
    ProofNode {
        rule: Rule::Init,
        sequent: seq.iter().map(|s| parse_formula(s).unwrap()).collect(),
        principal: None,
        witness: None,
        eigen: None,
        indterm: None,
        children: vec![],
    }
}

#[test]
fn initial_sequent_is_accepted() {
    let c = make_codec(&Ordinal::omega()).unwrap();
    let d = Derivation { root: leaf(&["X(a)", "!X(a)", "E z. X(z)"]) };
    assert!(check_derivation(&d, 1, c.as_ref(), 10).is_accepted());
    let d = Derivation { root: leaf(&["X(a)", "!X(b)"]) };
    assert!(matches!(
        check_derivation(&d, 1, c.as_ref(), 10),
        Verdict::Rejected { violation: Violation::NotAnAxiom, .. }
    ));
}

#[test]
fn eigenvariable_free_in_conclusion_is_rejected() {
    let c = make_codec(&Ordinal::omega()).unwrap();
    // ∀x.X(x) with eigenvariable a, but a is already free in ¬X(a)
    let mut root = leaf(&["A x. X(x)", "!X(a)"]);
    root.rule = Rule::Forall;
    root.principal = Some(parse_formula("A x. X(x)").unwrap());
    root.eigen = Some("a".into());
    root.children = vec![leaf(&["A x. X(x)", "!X(a)", "X(a)"])];
    match check_derivation(&Derivation { root }, 1, c.as_ref(), 10) {
        Verdict::Rejected { node, violation: Violation::Eigenvariable(_) } => assert!(node.is_empty()),
        v => panic!("{v}"),
    }
}

#[test]
fn undecidable_true_sentence_is_rejected() {
    let c = make_codec(&Ordinal::omega()).unwrap();
    // ∀x.∃y. x <= y is true but beyond a bounded search for an unbounded ∀
    let phi = parse_formula("A x. E y. x <= y").unwrap();
    let mut root = leaf(&["X(0)"]);
    root.rule = Rule::True;
    root.principal = Some(phi.clone());
    root.children = vec![leaf(&["X(0)"])];
    root.children[0].sequent.insert(phi.complement());
    match check_derivation(&Derivation { root }, 1, c.as_ref(), 10) {
        Verdict::Rejected { node, violation } => {
            assert!(node.is_empty());
            assert!(matches!(violation, Violation::UnverifiableTrueSentence(_)), "{violation}");
        }
        v => panic!("{v}"),
    }
}

#[test]
fn false_sentence_is_rejected() {
    let c = make_codec(&Ordinal::omega()).unwrap();
    let phi = parse_formula("1 <= 0").unwrap();
    let mut root = leaf(&["X(0)"]);
    root.rule = Rule::True;
    root.principal = Some(phi.clone());
    root.children = vec![leaf(&["X(0)"])];
    root.children[0].sequent.insert(phi.complement());
    let v = check_derivation(&Derivation { root }, 1, c.as_ref(), 10);
    assert!(matches!(v, Verdict::Rejected { violation: Violation::FalseSentence(_), .. }), "{v}");
}
