mod common;

use std::collections::BTreeSet;

use common::{queryable_items, random_item, random_kb_architecture, random_seq};
use compsec::flow::{self, FlowDirection};
use compsec::knowledge::{KnowledgeBase, Mode};
use compsec::lemmas::{generate_architecture, GenParams, LemmaSuite};
use compsec::local_secrets::{compute_all_local_secrets, compute_local_secrets};
use compsec::model::{decr, enc, ext, sign, Architecture, ChannelId, ExprSeq, KeyId, KeyPairing};
use compsec::structural::{check_component_secrecy, structural_report, LeafPolicy};
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn keys() -> Vec<String> {
    (0..3).map(|i| format!("k{i}")).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn decryption_and_extraction_invert_only_paired_keys(seed in any::<u64>(), pairs in proptest::collection::btree_set((0..3usize, 0..3usize), 0..6)) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let ks = keys();
        let mut pairing = KeyPairing::new();
        for &(a, b) in &pairs {
            pairing.insert(KeyId::new(&ks[a]), KeyId::new(&ks[b]));
        }
        let payload: ExprSeq = (0..3).map(|_| random_item(&mut rng, &ks, &["s0".into()], 3)).collect();
        for a in 0..3 {
            for b in 0..3 {
                let (k1, k2) = (KeyId::new(&ks[a]), KeyId::new(&ks[b]));
                let paired = pairs.contains(&(a, b));
                prop_assert_eq!(decr(&k2, &enc(&k1, &payload), &pairing), paired.then(|| payload.clone()));
                prop_assert_eq!(ext(&k1, &sign(&k2, &payload), &pairing), paired.then(|| payload.clone()));
            }
        }
        // non-blocks and sequences of length two are irreducible
        let k = KeyId::new(&ks[0]);
        if !(payload.len() == 1 && payload[0].is_block()) {
            prop_assert!(decr(&k, &payload, &pairing).is_none());
            prop_assert!(ext(&k, &payload, &pairing).is_none());
        }
        let two = enc(&k, &payload).concat(&enc(&k, &payload));
        prop_assert!(decr(&k, &two, &pairing).is_none());
    }

    #[test]
    fn derivability_is_closed_under_concat_and_subsequences(seed in any::<u64>()) {
        let arch = random_kb_architecture(seed);
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
        let pool = queryable_items(&arch, &mut rng);
        for c in arch.component_ids() {
            for mode in Mode::ALL {
                let kb = KnowledgeBase::build(&arch, c, mode).unwrap();
                prop_assert!(kb.knows(&[]).derivable);
                for _ in 0..20 {
                    let a = random_seq(&mut rng, &pool, 3);
                    let b = random_seq(&mut rng, &pool, 3);
                    let ab = a.concat(&b);
                    let (ka, kb_, kab) = (kb.knows(&a).derivable, kb.knows(&b).derivable, kb.knows(&ab).derivable);
                    prop_assert_eq!(kab, ka && kb_);
                    let j = kb.knows(&ab);
                    if let Some(trace) = &j.trace {
                        prop_assert_eq!(trace.conclusion(), ab.clone());
                    }
                    prop_assert_eq!(j.missing.is_some(), !j.derivable);
                }
            }
        }
    }

    #[test]
    fn knowledge_base_ignores_fact_order(seed in any::<u64>()) {
        let arch = random_kb_architecture(seed);
        let mut facts: Vec<_> = arch.expr_channel().iter().cloned().collect();
        facts.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
        let mut b = arch.to_builder().remove_facts(|_, _| true);
        for (ch, item) in facts {
            b = b.fact(ch, item);
        }
        let shuffled = b.build().unwrap();
        for c in arch.component_ids() {
            for mode in Mode::ALL {
                prop_assert_eq!(KnowledgeBase::build(&arch, c, mode).unwrap(), KnowledgeBase::build(&shuffled, c, mode).unwrap());
            }
        }
    }

    #[test]
    fn generated_architectures_satisfy_composition(seed in any::<u64>(), size in 1usize..10) {
        let params = GenParams { max_components: size, ..GenParams::default() }.with_seed(seed);
        let arch = generate_architecture(params);
        prop_assert_eq!(&arch, &generate_architecture(params));
        prop_assert_eq!(arch.components().count(), size);
        prop_assert!(structural_report(&arch, LeafPolicy::Lenient).passed());
        for spec in arch.components() {
            if spec.is_elementary() {
                prop_assert!(spec.loc.is_empty());
            } else {
                prop_assert!(check_component_secrecy(&arch, &spec.id, LeafPolicy::Lenient).unwrap().failed.is_empty());
            }
        }
    }

    #[test]
    fn local_secrets_grow_up_the_hierarchy(seed in any::<u64>()) {
        let arch = generate_architecture(GenParams::default().with_seed(seed));
        let all = compute_all_local_secrets(&arch);
        for spec in arch.components() {
            prop_assert_eq!(&all[&spec.id], &compute_local_secrets(&arch, &spec.id).unwrap());
            for sub in &spec.subcomponents {
                prop_assert!(all[sub].atom_set().is_subset(&all[&spec.id].atom_set()));
            }
            for atom in all[&spec.id].atoms.keys() {
                prop_assert!(!spec.owns(atom) || spec.subcomponents.iter().any(|s| all[s].contains(atom)));
            }
        }
    }

    #[test]
    fn flow_queries_are_consistent(seed in any::<u64>()) {
        let arch = generate_architecture(GenParams::default().with_seed(seed));
        let items: BTreeSet<_> = arch.expr_channel().iter().map(|(_, i)| i.clone()).collect();
        for c in arch.component_ids() {
            for dir in [FlowDirection::In, FlowDirection::Out] {
                for item in &items {
                    let plain = flow::query_flow(&arch, c, dir, item, None).unwrap();
                    let carrying = flow::carrying_channels(&arch, c, dir, item).unwrap();
                    prop_assert_eq!(plain, !carrying.is_empty());
                    prop_assert!(flow::expr_channel_set(&arch, c, dir, &carrying, item).unwrap());
                    for ch in arch.channels() {
                        let m: BTreeSet<ChannelId> = [ch.clone()].into();
                        let restricted = flow::query_flow(&arch, c, dir, item, Some(&m)).unwrap();
                        prop_assert!(!restricted || plain);
                        prop_assert_eq!(
                            flow::expr_channel_single(&arch, c, dir, ch, item).unwrap(),
                            flow::expr_channel_set(&arch, c, dir, &m, item).unwrap()
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn lemma_suite_finds_no_violations(seed in any::<u64>()) {
        let arch = generate_architecture(GenParams::default().with_seed(seed));
        let report = LemmaSuite::default().run(&arch);
        prop_assert!(report.passed(), "{}", report);
    }
}

#[test]
fn saturation_can_use_derived_keys() {
    // the key for the outer block is itself only obtained by decryption
    let arch = Architecture::builder()
        .keys(["a", "b"])
        .secrets(["n"])
        .channels(["x"])
        .pair("a", "a")
        .pair("b", "b")
        .component(compsec::model::ComponentSpec::new("C").with_ins(["x"]))
        .fact("x", compsec::model::ExprItem::key("a"))
        .fact(
            "x",
            compsec::model::ExprItem::enc("a", [compsec::model::ExprItem::key("b")]),
        )
        .fact(
            "x",
            compsec::model::ExprItem::enc("b", [compsec::model::ExprItem::secret("n")]),
        )
        .build()
        .unwrap();
    let c = compsec::model::ComponentId::new("C");
    let n = [compsec::model::ExprItem::secret("n")];
    assert!(
        !KnowledgeBase::build(&arch, &c, Mode::Strict)
            .unwrap()
            .knows(&n)
            .derivable
    );
    assert!(
        KnowledgeBase::build(&arch, &c, Mode::Saturating)
            .unwrap()
            .knows(&n)
            .derivable
    );
}
