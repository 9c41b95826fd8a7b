mod common;

use common::{compare_with_oracle, oracle_local_secrets, random_kb_architecture, Oracle};
use compsec::knowledge::{KnowledgeBase, Mode};
use compsec::local_secrets::compute_local_secrets;
use compsec::model::fixtures::{a1, a2};
use compsec::model::ComponentId;

#[test]
fn library_agrees_with_brute_force_deduction() {
    let mut compared = 0;
    for seed in 0..100 {
        let arch = random_kb_architecture(seed);
        compared +=
            compare_with_oracle(&arch, seed, 50).unwrap_or_else(|e| panic!("seed {seed}: {e}"));
    }
    assert!(compared > 10_000, "{compared}");
}

#[test]
fn fixtures_agree_with_brute_force_deduction() {
    for arch in [a1(), a2()] {
        compare_with_oracle(&arch, 7, 50).unwrap();
    }
}

#[test]
fn local_secrets_match_their_definition() {
    for seed in 0..100 {
        let arch = random_kb_architecture(seed);
        for c in arch.component_ids() {
            let got = compute_local_secrets(&arch, c).unwrap().atom_set();
            assert_eq!(got, oracle_local_secrets(&arch, c), "seed {seed} {c}");
        }
    }
}

#[test]
fn saturation_only_adds_knowledge() {
    let (mut analysed, mut differs) = (0, 0);
    for seed in 0..100 {
        let arch = random_kb_architecture(seed);
        for c in arch.component_ids() {
            let strict = KnowledgeBase::build(&arch, c, Mode::Strict).unwrap();
            let sat = KnowledgeBase::build(&arch, c, Mode::Saturating).unwrap();
            assert!(
                strict.closure_items.is_subset(&sat.closure_items),
                "seed {seed} {c}"
            );
            assert_eq!(strict.base_items, sat.base_items);
            analysed += usize::from(strict.closure_items != strict.base_items);
            differs += usize::from(strict.closure_items != sat.closure_items);
        }
    }
    // the corpus exercises analysis and separates the two modes
    assert!(
        analysed > 10 && differs > 0,
        "analysed {analysed}, differs {differs}"
    );
}

#[test]
fn oracle_base_matches_library_base() {
    for seed in 0..50 {
        let arch = random_kb_architecture(seed);
        let c = ComponentId::new("W");
        let kb = KnowledgeBase::build(&arch, &c, Mode::Strict).unwrap();
        assert_eq!(
            kb.base_items,
            Oracle::new(&arch, &c, Mode::Strict, &[]).base
        );
    }
}
