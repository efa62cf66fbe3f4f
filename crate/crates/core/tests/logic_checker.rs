use ordgame_core::logic::*;
use ordgame_core::wellorder::make_codec;
use ordgame_core::Ordinal;

#[test]
fn every_single_node_mutation_is_rejected_at_its_node() {
    let c = make_codec(&Ordinal::omega()).unwrap();
    for d in [ti_omega_derivation(), ti_omega_derivation_with_cut()] {
        let ms = single_node_mutations(&d);
        assert!(ms.len() >= 20, "{}", ms.len());
        let mut misplaced = Vec::new();
        for m in &ms {
            match check_ti_derivation(&m.derivation, 1, c.as_ref(), 40) {
                Verdict::Rejected { node, .. } if node == m.node => {}
                v => misplaced.push(format!("{:?} at {:?}: {v}", m.kind, m.node)),
            }
        }
        assert!(misplaced.is_empty(), "{misplaced:#?}");
    }
}

#[test]
fn loader_normalizes_child_order() {
    let c = make_codec(&Ordinal::omega()).unwrap();
    let d = ti_omega_derivation();
    let mut v: serde_json::Value = serde_json::from_str(&d.to_json()).unwrap();
    // root forall -> ind node: reverse the three premises
    v["children"][0]["children"].as_array_mut().unwrap().reverse();
    let back = Derivation::from_json(&v.to_string()).unwrap();
    assert_eq!(back, d);
    assert!(check_ti_derivation(&back, 1, c.as_ref(), 40).is_accepted());
}

#[test]
fn wrong_level_induction_is_rejected() {
    let c = make_codec(&Ordinal::omega()).unwrap();
    let d = ti_omega_derivation();
    match check_ti_derivation(&d, 2, c.as_ref(), 40) {
        Verdict::Rejected { node, violation: Violation::Classification(_) } => assert_eq!(node, vec![0]),
        v => panic!("{v}"),
    }
}

fn fixture(name: &str) -> Derivation {
    let path = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name);
    Derivation::from_json(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn shipped_fixtures_match_the_builders() {
    assert_eq!(fixture("ti_omega.json"), ti_omega_derivation());
    assert_eq!(fixture("ti_omega_cut.json"), ti_omega_derivation_with_cut());
}

#[test]
fn shipped_bad_fixture_fails_the_eigenvariable_condition() {
    let c = make_codec(&Ordinal::omega()).unwrap();
    match check_ti_derivation(&fixture("ti_omega_bad_eigen.json"), 1, c.as_ref(), 40) {
        Verdict::Rejected { violation: Violation::Eigenvariable(_), .. } => {}
        v => panic!("{v}"),
    }
}

#[test]
fn mutations_cover_every_kind() {
    let ms = single_node_mutations(&ti_omega_derivation());
    for kind in [
        MutationKind::RuleSwap,
        MutationKind::EigenvariableCapture,
        MutationKind::DroppedSideFormula,
        MutationKind::NonPSigmaInduction,
    ] {
        assert!(ms.iter().any(|m| m.kind == kind), "{kind:?}");
    }
}
