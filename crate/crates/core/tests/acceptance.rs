//! One PASS/FAIL line per acceptance criterion.

mod common;

use std::collections::BTreeSet;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use compsec::flow::{expr_channel_set, expr_channel_single, query_flow, FlowDirection};
use compsec::format::{parse_architecture, parse_bytes, render_architecture, FormatError};
use compsec::knowledge::{
    check_eout_know_correct, check_eout_knows_e_correct, know_atom, knows_seq, Mode,
};
use compsec::lemmas::{fuzz, generate_architecture, FuzzOptions, GenParams};
use compsec::local_secrets::compute_local_secrets;
use compsec::model::fixtures::{a1, a1_builder, a2};
use compsec::model::{
    decr, enc, expression_to_ks_list, ext, ks_to_expression, sign, ChannelId, ComponentId,
    ExprItem, ExprSeq, KeyId, KeyPairing, KsAtom,
};
use compsec::structural::{
    check_component_secrecy, check_composition_in, check_composition_keys_secrets,
    check_composition_loc, check_composition_out, check_in_out_loc,
    check_not_spec_keys_secrets_expr, spec_keys_secrets, LeafPolicy,
};
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(cond: bool, what: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(what())
    }
}

fn within(elapsed: Duration, limit: Duration) -> Result<(), String> {
    ensure(elapsed < limit, || {
        format!("took {elapsed:.2?}, limit {limit:?}")
    })
}

fn c(name: &str) -> ComponentId {
    ComponentId::new(name)
}

fn k(name: &str) -> KeyId {
    KeyId::new(name)
}

fn chs(names: &[&str]) -> BTreeSet<ChannelId> {
    names.iter().map(ChannelId::new).collect()
}

fn axiom_round_trips() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let keys: Vec<String> = (0..4).map(|i| format!("k{i}")).collect();
    let secrets: Vec<String> = (0..3).map(|i| format!("s{i}")).collect();
    let mut pairings: Vec<KeyPairing> = Vec::new();
    for _ in 0..8 {
        let mut p = KeyPairing::new();
        for a in &keys {
            for b in &keys {
                if rng.gen_bool(0.3) {
                    p.insert(k(a), k(b));
                }
            }
        }
        pairings.push(p);
    }
    let mut checked = 0;
    for _ in 0..1_000 {
        let len = rng.gen_range(0..=3);
        let seq: ExprSeq = (0..len)
            .map(|_| common::random_item(&mut rng, &keys, &secrets, 2))
            .collect();
        ensure(seq.depth() <= 3, || format!("depth {} > 3", seq.depth()))?;
        for p in &pairings {
            for (k1, k2) in p.pairs() {
                ensure(decr(k2, &enc(k1, &seq), p).as_ref() == Some(&seq), || {
                    format!("decr {k1} {k2} {seq}")
                })?;
                ensure(ext(k1, &sign(k2, &seq), p).as_ref() == Some(&seq), || {
                    format!("ext {k1} {k2} {seq}")
                })?;
                checked += 2;
            }
            for a in &keys {
                for b in &keys {
                    if !p.contains(&k(a), &k(b)) {
                        ensure(decr(&k(b), &enc(&k(a), &seq), p).is_none(), || {
                            format!("decr unpaired {a} {b}")
                        })?;
                        ensure(ext(&k(a), &sign(&k(b), &seq), p).is_none(), || {
                            format!("ext unpaired {a} {b}")
                        })?;
                    }
                }
            }
        }
    }
    let elapsed = start.elapsed();
    within(elapsed, Duration::from_secs(1))?;
    Ok(format!("{checked} round trips in {elapsed:.2?}"))
}

fn fixture_values() -> Outcome {
    let a1 = a1();
    let a2 = a2();
    let pairing = a1.pairing();
    let n = ExprItem::secret("N");
    let na = ExprItem::secret("NA");
    let e = |s: &[ExprItem]| s.iter().cloned().collect::<ExprSeq>();
    let mut checks: Vec<(&str, bool)> = Vec::new();
    let mut check = |name, ok| checks.push((name, ok));

    check(
        "expression_to_ks_list []",
        expression_to_ks_list(&[]).is_empty(),
    );
    check(
        "expression_to_ks_list mixed",
        expression_to_ks_list(&[ExprItem::key("CKey"), ExprItem::data(5), n.clone()])
            == vec![KsAtom::key("CKey"), KsAtom::secret("N")],
    );
    check(
        "expression_to_ks_list drops ids and blocks",
        expression_to_ks_list(&[
            ExprItem::id("sComp1"),
            ExprItem::enc("CKey", vec![n.clone()]),
        ])
        .is_empty(),
    );
    check(
        "ks_to_expression key",
        ks_to_expression(&KsAtom::key("SKey")) == ExprItem::key("SKey"),
    );
    check(
        "ks_to_expression secret",
        ks_to_expression(&KsAtom::secret("NA")) == na,
    );
    let sealed = enc(&k("CKey"), &e(std::slice::from_ref(&n)));
    check(
        "decr paired",
        decr(&k("CKeyP"), &sealed, pairing) == Some(e(std::slice::from_ref(&n))),
    );
    check(
        "decr wrong key",
        decr(&k("CKey"), &sealed, pairing).is_none(),
    );
    check(
        "decr non-block",
        decr(&k("CKeyP"), std::slice::from_ref(&n), pairing).is_none(),
    );
    let signed = sign(&k("CKeyP"), &e(&[ExprItem::data(7)]));
    check(
        "ext paired",
        ext(&k("CKey"), &signed, pairing) == Some(e(&[ExprItem::data(7)])),
    );
    check(
        "ext wrong side",
        ext(&k("CKeyP"), &signed, pairing).is_none(),
    );
    check(
        "ext non-signature",
        ext(
            &k("CKey"),
            &enc(&k("CKey"), &e(&[ExprItem::data(7)])),
            pairing,
        )
        .is_none(),
    );

    let pass = |v: compsec::Result<compsec::structural::ChannelVerdict>| {
        v.map(|v| v.passed()).unwrap_or(false)
    };
    check(
        "in_out_loc sComp1",
        pass(check_in_out_loc(&a1, &c("sComp1"))),
    );
    check(
        "composition_in sComp3",
        pass(check_composition_in(&a1, &c("sComp3"))),
    );
    check(
        "composition_out sComp3",
        pass(check_composition_out(&a1, &c("sComp3"))),
    );
    check(
        "composition_loc sComp3",
        pass(check_composition_loc(&a1, &c("sComp3"))),
    );
    let bad_in = a1_builder()
        .edit_component("sComp3", |s| {
            s.ins.insert(ChannelId::new("ch2"));
        })
        .build()
        .unwrap();
    check(
        "composition_in broken",
        !pass(check_composition_in(&bad_in, &c("sComp3"))),
    );
    let bad_out = a1_builder()
        .edit_component("sComp3", |s| {
            s.out.insert(ChannelId::new("ch2"));
        })
        .build()
        .unwrap();
    check(
        "composition_out broken",
        !pass(check_composition_out(&bad_out, &c("sComp3"))),
    );
    let ks = check_composition_keys_secrets(&a1, &c("sComp3")).unwrap();
    check(
        "keys_secrets sComp3",
        ks.keys_ok && ks.secrets_ok && ks.ks_ok,
    );
    let ks = check_composition_keys_secrets(&a1, &c("sComp1")).unwrap();
    check(
        "keys_secrets elementary",
        ks.keys_ok && ks.secrets_ok && ks.ks_ok,
    );
    let no_keys = a1_builder()
        .edit_component("sComp3", |s| s.keys.clear())
        .build()
        .unwrap();
    let ks = check_composition_keys_secrets(&no_keys, &c("sComp3")).unwrap();
    check("keys_secrets mismatch", !ks.keys_ok && !ks.ks_ok);
    let owned: BTreeSet<KsAtom> = [KsAtom::key("CKey"), KsAtom::secret("N")].into();
    check(
        "spec_keys_secrets sComp1",
        spec_keys_secrets(&a1, &c("sComp1")).unwrap() == owned,
    );
    check(
        "spec_keys_secrets sComp3",
        spec_keys_secrets(&a1, &c("sComp3")).unwrap() == owned,
    );
    check(
        "not_spec_keys_secrets owned key",
        !check_not_spec_keys_secrets_expr(&a1, &c("sComp1"), &[ExprItem::key("CKey")])
            .unwrap()
            .passed(),
    );
    check(
        "not_spec_keys_secrets foreign key",
        check_not_spec_keys_secrets_expr(
            &a1,
            &c("sComp1"),
            &[ExprItem::data(3), ExprItem::key("SKey")],
        )
        .unwrap()
        .passed(),
    );
    let secure = |arch, name| {
        check_component_secrecy(arch, &c(name), LeafPolicy::Lenient)
            .unwrap()
            .passed()
    };
    check("secrecy sComp3", secure(&a1, "sComp3"));
    check("secrecy elementary sComp1", secure(&a1, "sComp1"));
    let bad_loc = a1_builder()
        .edit_component("sComp3", |s| s.loc.clear())
        .build()
        .unwrap();
    check("secrecy broken loc", !secure(&bad_loc, "sComp3"));

    let flow = |comp, item: &ExprItem, m: Option<&BTreeSet<ChannelId>>| {
        query_flow(&a1, &c(comp), FlowDirection::In, item, m).unwrap()
    };
    check("flow sComp1 in NA", flow("sComp1", &na, None));
    check("flow sComp3 in N", !flow("sComp3", &n, None));
    check(
        "flow sComp2 in N restricted",
        !flow("sComp2", &n, Some(&chs(&["ch3"]))),
    );
    let single = |item: &ExprItem| {
        expr_channel_single(
            &a1,
            &c("sComp1"),
            FlowDirection::In,
            &ChannelId::new("ch1"),
            item,
        )
        .unwrap()
    };
    check("single ch1 NA", single(&na));
    check("single ch1 N", !single(&n));
    let set = |m: &[&str], item: &ExprItem| {
        expr_channel_set(&a1, &c("sComp1"), FlowDirection::In, &chs(m), item).unwrap()
    };
    check("set {ch1} NA", set(&["ch1"], &na));
    check("set {} NA", !set(&[], &na));
    check("set {} data 9", set(&[], &ExprItem::data(9)));

    check(
        "local secrets sComp1",
        compute_local_secrets(&a1, &c("sComp1")).unwrap().is_empty(),
    );
    check(
        "local secrets sComp3",
        compute_local_secrets(&a1, &c("sComp3")).unwrap().is_empty(),
    );
    check(
        "local secrets A2 sComp3",
        compute_local_secrets(&a2, &c("sComp3")).unwrap().atom_set()
            == [KsAtom::secret("N")].into(),
    );

    check(
        "know sComp1 NA",
        know_atom(&a1, &c("sComp1"), &KsAtom::secret("NA")).unwrap(),
    );
    check(
        "know sComp1 SKey",
        !know_atom(&a1, &c("sComp1"), &KsAtom::key("SKey")).unwrap(),
    );
    check(
        "know A2 sComp3 N",
        know_atom(&a2, &c("sComp3"), &KsAtom::secret("N")).unwrap(),
    );
    check(
        "knows sComp1 [NA]",
        knows_seq(&a1, &c("sComp1"), std::slice::from_ref(&na), Mode::Strict)
            .unwrap()
            .derivable,
    );
    check(
        "eout_know sComp1 N",
        check_eout_know_correct(&a1, &c("sComp1"), &KsAtom::secret("N")).unwrap(),
    );
    check(
        "eout_know sComp2 N",
        !check_eout_know_correct(&a1, &c("sComp2"), &KsAtom::secret("N")).unwrap(),
    );
    check(
        "eout_knows_e sComp1 N",
        check_eout_knows_e_correct(&a1, &c("sComp1"), &n).unwrap(),
    );
    check(
        "eout_knows_e sComp2 data 1",
        !check_eout_knows_e_correct(&a1, &c("sComp2"), &ExprItem::data(1)).unwrap(),
    );

    let text = std::fs::read_to_string(common::a1_path()).map_err(|e| e.to_string())?;
    check(
        "a1.arch parses to A1",
        parse_architecture(&text).ok().as_ref() == Some(&a1),
    );
    check(
        "render A1 reparses",
        parse_architecture(&render_architecture(&a1)).ok().as_ref() == Some(&a1),
    );

    let mut out = Vec::new();
    let mut err = Vec::new();
    let path = common::a1_path();
    let code = compsec::cli::run(
        ["compsec".as_ref(), "validate".as_ref(), path.as_os_str()],
        &mut out,
        &mut err,
    );
    check("validate a1.arch exits 0", code == 0);

    let failed: Vec<&str> = checks
        .iter()
        .filter(|(_, ok)| !ok)
        .map(|(name, _)| *name)
        .collect();
    ensure(failed.is_empty(), || {
        format!("mismatched: {}", failed.join(", "))
    })?;
    Ok(format!("{} fixture values match", checks.len()))
}

const NON_VACUOUS: [&str; 9] = [
    "TBtheorem1a",
    "TBtheorem2a",
    "TBtheorem3a",
    "TBtheorem4a_empty",
    "TBtheorem4a_P",
    "TBtheorem5a_empty",
    "know_composition",
    "know_decomposition",
    "LocalSecretsComposition1",
];

fn lemma_fuzz() -> Outcome {
    let options = FuzzOptions {
        count: 500,
        ..FuzzOptions::default()
    };
    let start = Instant::now();
    let report = fuzz(&options);
    let elapsed = start.elapsed();
    ensure(report.violations == 0, || {
        let bad: Vec<&str> = report
            .lemmas
            .iter()
            .filter(|l| l.violations > 0)
            .map(|l| l.name)
            .collect();
        format!("{} violations in {}", report.violations, bad.join(", "))
    })?;
    for name in NON_VACUOUS {
        let agg = report.get(name).ok_or_else(|| format!("{name} missing"))?;
        ensure(agg.non_vacuous > 0, || format!("{name} vacuous"))?;
    }
    within(elapsed, Duration::from_secs(60))?;
    Ok(format!(
        "{} architectures, {} lemmas, 0 violations in {elapsed:.2?}",
        report.architectures,
        report.lemmas.len()
    ))
}

fn oracle_equivalence() -> Outcome {
    let mut compared = 0;
    for seed in 0..100 {
        let arch = common::random_kb_architecture(seed);
        compared += common::compare_with_oracle(&arch, seed, 50)
            .map_err(|e| format!("seed {seed}: {e}"))?;
    }
    Ok(format!("{compared} judgments agree in both modes"))
}

fn parser_robustness() -> Outcome {
    for seed in 0..200 {
        let arch = generate_architecture(GenParams::default().with_seed(seed));
        let back = parse_architecture(&render_architecture(&arch))
            .map_err(|e| format!("seed {seed}: {e}"))?;
        ensure(back == arch, || format!("seed {seed}: round trip differs"))?;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let (mut rejected, mut accepted) = (0, 0);
    for i in 0..10_000 {
        let mut bytes = vec![0u8; rng.gen_range(0..256)];
        rng.fill_bytes(&mut bytes);
        let outcome = catch_unwind(AssertUnwindSafe(|| parse_bytes(&bytes)))
            .map_err(|_| format!("input {i} panicked"))?;
        match outcome {
            Ok(_) => accepted += 1,
            Err(
                FormatError::Parse { .. }
                | FormatError::Invalid { .. }
                | FormatError::Validation(_),
            ) => rejected += 1,
        }
    }
    Ok(format!(
        "200 round trips, 10000 random inputs ({rejected} rejected, {accepted} accepted)"
    ))
}

fn determinism() -> Outcome {
    let options = FuzzOptions {
        count: 50,
        perturb: false,
        ..FuzzOptions::default()
    };
    let (first, second) = (fuzz(&options), fuzz(&options));
    ensure(first.to_json() == second.to_json(), || {
        "json reports differ".into()
    })?;
    ensure(first.to_string() == second.to_string(), || {
        "text reports differ".into()
    })?;
    let perturbed = FuzzOptions {
        perturb: true,
        ..options
    };
    ensure(
        fuzz(&perturbed).to_json() == fuzz(&perturbed).to_json(),
        || "perturbed reports differ".into(),
    )?;
    Ok(format!(
        "{} byte-identical report bytes",
        first.to_json().len()
    ))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 6] = [
        ("axiom round trips", axiom_round_trips),
        ("fixture values", fixture_values),
        ("lemma fuzz", lemma_fuzz),
        ("deduction oracle", oracle_equivalence),
        ("parser", parser_robustness),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let outcome = catch_unwind(run).unwrap_or_else(|_| Err("panicked".into()));
        match outcome {
            Ok(detail) => println!("PASS {} {name}: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL {} {name}: {detail}", i + 1);
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
