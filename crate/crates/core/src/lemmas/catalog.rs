//! The lemma catalogue. Each entry enumerates its variables over the
//! context universes, evaluates the hypotheses and checks the conclusion
//! whenever they all hold. Names follow the original theory files verbatim,
//! including their spelling.

use std::collections::BTreeSet;

use super::context::{Ctx, Triple};
use super::suite::{Bindings, Group, Lemma};
use crate::flow::{self, FlowDirection};
use crate::model::ExprItem;
use crate::structural::check_not_spec_keys_secrets_expr;

use FlowDirection::{In, Out};
use Group::{Flow, Knowledge, LocalSecrets, Structural};

pub fn all() -> Vec<Lemma> {
    let mut v = Vec::new();
    structural(&mut v);
    flow_lemmas(&mut v);
    local_secrets(&mut v);
    knowledge(&mut v);
    v
}

#[derive(Clone, Copy)]
enum Kind {
    Key,
    Secret,
    Any,
}

impl Kind {
    fn atoms(self, ctx: &Ctx<'_>) -> Vec<usize> {
        (0..ctx.atoms.len())
            .filter(|&a| match self {
                Kind::Key => ctx.atom_is_key(a),
                Kind::Secret => !ctx.atom_is_key(a),
                Kind::Any => true,
            })
            .collect()
    }
}

fn tri(ctx: &Ctx<'_>, t: Triple) -> Bindings {
    vec![
        ("PQ", ctx.comp_name(t.pq)),
        ("P", ctx.comp_name(t.p)),
        ("Q", ctx.comp_name(t.q)),
    ]
}

fn with(mut b: Bindings, extra: impl IntoIterator<Item = (&'static str, String)>) -> Bindings {
    b.extend(extra);
    b
}

fn item(ctx: &Ctx<'_>, e: usize) -> String {
    ctx.items[e].to_string()
}

fn atom(ctx: &Ctx<'_>, a: usize) -> String {
    ctx.atoms[a].to_string()
}

fn chan(ctx: &Ctx<'_>, ch: usize) -> String {
    ctx.chans[ch].to_string()
}

fn comp_in(ctx: &Ctx<'_>, dir: FlowDirection, c: usize) -> bool {
    match dir {
        In => ctx.flags[c].comp_in,
        Out => ctx.flags[c].comp_out,
    }
}

fn subset_of_loc(ctx: &Ctx<'_>, m: usize, pq: usize) -> bool {
    ctx.family[m]
        .iter()
        .all(|ch| ctx.loc[pq][ctx.chan_index(ch)])
}

fn comps(ctx: &Ctx<'_>) -> std::ops::Range<usize> {
    0..ctx.comps.len()
}

fn items(ctx: &Ctx<'_>) -> std::ops::Range<usize> {
    0..ctx.items.len()
}

fn chans(ctx: &Ctx<'_>) -> std::ops::Range<usize> {
    0..ctx.chans.len()
}

fn sets(ctx: &Ctx<'_>) -> std::ops::Range<usize> {
    0..ctx.family.len()
}

fn structural(v: &mut Vec<Lemma>) {
    v.push(Lemma::new("subcomponents_loc", Structural, |ctx, t| {
        for c in comps(ctx) {
            t.tried(1);
            if ctx.flags[c].comp_loc && ctx.subs[c].is_empty() {
                t.check(ctx.loc_empty(c), || vec![("x", ctx.comp_name(c))]);
            }
        }
    }));

    v.push(Lemma::new(
        "correctCompositionIn_L1",
        Structural,
        |ctx, t| {
            for &tr in &ctx.triples {
                for ch in chans(ctx) {
                    t.tried(1);
                    if ctx.flags[tr.pq].comp_in && !ctx.loc[tr.pq][ch] && ctx.ins[tr.p][ch] {
                        t.check(ctx.ins[tr.pq][ch], || {
                            with(tri(ctx, tr), [("ch", chan(ctx, ch))])
                        });
                    }
                }
            }
        },
    ));

    for (name, dir) in [
        ("correctCompositionIn_L2", In),
        ("correctCompositionIn_prop1", In),
        ("correctCompositionOut_prop1", Out),
    ] {
        v.push(Lemma::new(name, Structural, move |ctx, t| {
            for &tr in &ctx.triples {
                for x in chans(ctx) {
                    t.tried(1);
                    if comp_in(ctx, dir, tr.pq) && ctx.side(dir, tr.pq)[x] {
                        t.check(ctx.side(dir, tr.p)[x] || ctx.side(dir, tr.q)[x], || {
                            with(tri(ctx, tr), [("x", chan(ctx, x))])
                        });
                    }
                }
            }
        }));
    }

    // hypothesis flag of C, atom kind
    type FlagOf = fn(&Ctx<'_>, usize) -> bool;
    let keys_flag: FlagOf = |ctx, c| ctx.flags[c].keys;
    let secrets_flag: FlagOf = |ctx, c| ctx.flags[c].secrets;
    let ks_flag: FlagOf = |ctx, c| ctx.flags[c].ks;
    for (name, flag, kind) in [
        ("correctCompositionKeys_subcomp1", keys_flag, Kind::Key),
        (
            "correctCompositionSecrets_subcomp1",
            secrets_flag,
            Kind::Secret,
        ),
        ("correctCompositionKS_subcomp1", ks_flag, Kind::Key),
        ("correctCompositionKS_subcomp2", ks_flag, Kind::Secret),
    ] {
        v.push(Lemma::new(name, Structural, move |ctx, t| {
            let atoms = kind.atoms(ctx);
            for c in comps(ctx) {
                for &x in &ctx.subs[c] {
                    for &a in &atoms {
                        t.tried(1);
                        if flag(ctx, c) && ctx.owns(c, a) {
                            let found = ctx.subs[c].iter().any(|&y| ctx.owns(y, a));
                            t.check(found, || {
                                vec![
                                    ("C", ctx.comp_name(c)),
                                    ("x", ctx.comp_name(x)),
                                    ("a", atom(ctx, a)),
                                ]
                            });
                        }
                    }
                }
            }
        }));
    }
    for (name, flag, kind) in [
        ("correctCompositionKeys_subcomp2", keys_flag, Kind::Key),
        (
            "correctCompositionSecrets_subcomp2",
            secrets_flag,
            Kind::Secret,
        ),
        ("correctCompositionKS_subcomp3", ks_flag, Kind::Key),
        ("correctCompositionKS_subcomp4", ks_flag, Kind::Secret),
    ] {
        v.push(Lemma::new(name, Structural, move |ctx, t| {
            let atoms = kind.atoms(ctx);
            for c in comps(ctx) {
                for &x in &ctx.subs[c] {
                    for &a in &atoms {
                        t.tried(1);
                        if flag(ctx, c) && ctx.owns(x, a) {
                            t.check(ctx.owns(c, a), || {
                                vec![
                                    ("C", ctx.comp_name(c)),
                                    ("x", ctx.comp_name(x)),
                                    ("a", atom(ctx, a)),
                                ]
                            });
                        }
                    }
                }
            }
        }));
    }

    v.push(Lemma::new("correctCompKS_Keys", Structural, |ctx, t| {
        for c in comps(ctx) {
            t.tried(1);
            if ctx.flags[c].ks {
                t.check(ctx.flags[c].keys, || vec![("C", ctx.comp_name(c))]);
            }
        }
    }));
    v.push(Lemma::new("correctCompKS_Secrets", Structural, |ctx, t| {
        for c in comps(ctx) {
            t.tried(1);
            if ctx.flags[c].ks {
                t.check(ctx.flags[c].secrets, || vec![("C", ctx.comp_name(c))]);
            }
        }
    }));
    v.push(Lemma::new(
        "correctCompKS_KeysSecrets",
        Structural,
        |ctx, t| {
            for c in comps(ctx) {
                t.tried(1);
                if ctx.flags[c].keys && ctx.flags[c].secrets {
                    t.check(ctx.flags[c].ks, || vec![("C", ctx.comp_name(c))]);
                }
            }
        },
    ));

    pq_atoms(
        v,
        "correctCompositionKS_PQ",
        Structural,
        Kind::Any,
        |ctx, tr, a| {
            (ctx.flags[tr.pq].ks && ctx.owns(tr.pq, a))
                .then(|| ctx.owns(tr.p, a) || ctx.owns(tr.q, a))
        },
    );
    pq_atoms(
        v,
        "correctCompositionKS_neg1",
        Structural,
        Kind::Any,
        |ctx, tr, a| {
            (ctx.flags[tr.pq].ks && !ctx.owns(tr.p, a) && !ctx.owns(tr.q, a))
                .then(|| !ctx.owns(tr.pq, a))
        },
    );
    pq_atoms(
        v,
        "correctCompositionKS_negP",
        Structural,
        Kind::Any,
        |ctx, tr, a| (ctx.flags[tr.pq].ks && !ctx.owns(tr.pq, a)).then(|| !ctx.owns(tr.p, a)),
    );
    pq_atoms(
        v,
        "correctCompositionKS_negQ",
        Structural,
        Kind::Any,
        |ctx, tr, a| (ctx.flags[tr.pq].ks && !ctx.owns(tr.pq, a)).then(|| !ctx.owns(tr.q, a)),
    );

    for (name, head) in [
        ("notSpecKeysSecretsExpr_L1", true),
        ("notSpecKeysSecretsExpr_L2", false),
    ] {
        v.push(Lemma::new(name, Structural, move |ctx, t| {
            for c in comps(ctx) {
                for seq in ctx
                    .seqs
                    .iter()
                    .chain(&ctx.atom_seqs)
                    .filter(|s| !s.is_empty())
                {
                    t.tried(1);
                    let holds = |s: &[ExprItem]| {
                        check_not_spec_keys_secrets_expr(ctx.arch, &ctx.comps[c], s)
                            .expect("declared")
                            .passed()
                    };
                    if holds(seq) {
                        let part = if head { &seq[..1] } else { &seq[1..] };
                        t.check(holds(part), || {
                            vec![("P", ctx.comp_name(c)), ("a # l", seq.to_string())]
                        });
                    }
                }
            }
        }));
    }
}

/// A lemma over composites and atoms of `kind`; `eval` returns `None` when
/// a hypothesis fails and the conclusion otherwise.
fn pq_atoms(
    v: &mut Vec<Lemma>,
    name: &'static str,
    group: Group,
    kind: Kind,
    eval: fn(&Ctx<'_>, Triple, usize) -> Option<bool>,
) {
    v.push(Lemma::new(name, group, move |ctx, t| {
        let atoms = kind.atoms(ctx);
        for &tr in &ctx.triples {
            for &a in &atoms {
                t.tried(1);
                if let Some(conclusion) = eval(ctx, tr, a) {
                    t.check(conclusion, || with(tri(ctx, tr), [("m", atom(ctx, a))]));
                }
            }
        }
    }));
}

/// A lemma over single components and atoms of `kind`.
fn comp_atoms(
    v: &mut Vec<Lemma>,
    name: &'static str,
    kind: Kind,
    eval: fn(&Ctx<'_>, usize, usize) -> Option<bool>,
) {
    v.push(Lemma::new(name, Knowledge, move |ctx, t| {
        let atoms = kind.atoms(ctx);
        for c in comps(ctx) {
            for &a in &atoms {
                t.tried(1);
                if let Some(conclusion) = eval(ctx, c, a) {
                    t.check(conclusion, || {
                        vec![("A", ctx.comp_name(c)), ("m", atom(ctx, a))]
                    });
                }
            }
        }
    }));
}

/// A lemma over ordered component pairs and atoms of `kind`.
fn pair_atoms(
    v: &mut Vec<Lemma>,
    name: &'static str,
    kind: Kind,
    names: (&'static str, &'static str),
    eval: fn(&Ctx<'_>, usize, usize, usize) -> Option<bool>,
) {
    v.push(Lemma::new(name, Knowledge, move |ctx, t| {
        let atoms = kind.atoms(ctx);
        for x in comps(ctx) {
            for y in comps(ctx) {
                for &a in &atoms {
                    t.tried(1);
                    if let Some(conclusion) = eval(ctx, x, y, a) {
                        t.check(conclusion, || {
                            vec![
                                (names.0, ctx.comp_name(x)),
                                (names.1, ctx.comp_name(y)),
                                ("m", atom(ctx, a)),
                            ]
                        });
                    }
                }
            }
        }
    }));
}

/// A lemma over composites and items.
fn pq_items(
    v: &mut Vec<Lemma>,
    name: &'static str,
    eval: impl Fn(&Ctx<'_>, Triple, usize) -> Option<bool> + Send + Sync + 'static,
) {
    v.push(Lemma::new(name, Flow, move |ctx, t| {
        for &tr in &ctx.triples {
            for e in items(ctx) {
                t.tried(1);
                if let Some(conclusion) = eval(ctx, tr, e) {
                    t.check(conclusion, || with(tri(ctx, tr), [("E", item(ctx, e))]));
                }
            }
        }
    }));
}

/// A lemma over composites, channel sets `M` and items.
fn pq_sets_items(
    v: &mut Vec<Lemma>,
    name: &'static str,
    eval: impl Fn(&Ctx<'_>, Triple, usize, usize) -> Option<bool> + Send + Sync + 'static,
) {
    v.push(Lemma::new(name, Flow, move |ctx, t| {
        for &tr in &ctx.triples {
            for m in sets(ctx) {
                for e in items(ctx) {
                    t.tried(1);
                    if let Some(conclusion) = eval(ctx, tr, m, e) {
                        t.check(conclusion, || {
                            with(tri(ctx, tr), [("M", ctx.set_name(m)), ("E", item(ctx, e))])
                        });
                    }
                }
            }
        }
    }));
}

fn flow_lemmas(v: &mut Vec<Lemma>) {
    v.push(Lemma::new("ineM_L1", Flow, |ctx, t| {
        for p in comps(ctx) {
            for m in sets(ctx) {
                for ch in chans(ctx) {
                    for e in items(ctx) {
                        t.tried(1);
                        if ctx.in_set(m, ch) && ctx.ins[p][ch] && ctx.carries[ch][e] {
                            t.check(ctx.ine_m(p, m, e), || {
                                vec![
                                    ("P", ctx.comp_name(p)),
                                    ("M", ctx.set_name(m)),
                                    ("ch", chan(ctx, ch)),
                                    ("E", item(ctx, e)),
                                ]
                            });
                        }
                    }
                }
            }
        }
    }));

    // restricted ⇒ unrestricted, and the contrapositive
    for (name, dir, contra) in [
        ("ineM_ine", In, false),
        ("not_ine_ineM", In, true),
        ("eoutM_eout", Out, false),
        ("not_eout_eoutM", Out, true),
    ] {
        v.push(Lemma::new(name, Flow, move |ctx, t| {
            for p in comps(ctx) {
                for m in sets(ctx) {
                    for e in items(ctx) {
                        t.tried(1);
                        let restricted = ctx.flow_m(dir, p, m, e);
                        let plain = ctx.flow(dir, p, e);
                        let (hyp, conclusion) = if contra {
                            (!plain, !restricted)
                        } else {
                            (restricted, plain)
                        };
                        if hyp {
                            t.check(conclusion, || {
                                vec![
                                    ("P", ctx.comp_name(p)),
                                    ("M", ctx.set_name(m)),
                                    ("E", item(ctx, e)),
                                ]
                            });
                        }
                    }
                }
            }
        }));
    }

    // B ranges over ∅ and the channel singletons
    v.push(Lemma::new("ineM_Un1", Flow, |ctx, t| {
        let extensions: Vec<Option<usize>> =
            std::iter::once(None).chain(chans(ctx).map(Some)).collect();
        for p in comps(ctx) {
            for a in sets(ctx) {
                for e in items(ctx) {
                    t.tried(extensions.len());
                    if !ctx.ine_m(p, a, e) {
                        continue;
                    }
                    for &b in &extensions {
                        let mut union = ctx.family[a].clone();
                        union.extend(b.map(|ch| ctx.chans[ch].clone()));
                        let holds = flow::query_flow(
                            ctx.arch,
                            &ctx.comps[p],
                            In,
                            &ctx.items[e],
                            Some(&union),
                        )
                        .expect("declared");
                        t.check(holds, || {
                            let b_set: BTreeSet<_> =
                                b.map(|ch| ctx.chans[ch].clone()).into_iter().collect();
                            vec![
                                ("P", ctx.comp_name(p)),
                                ("A", ctx.set_name(a)),
                                ("B", super::context::set_text(&b_set)),
                                ("E", item(ctx, e)),
                            ]
                        });
                    }
                }
            }
        }
    }));

    for (name, dir, single_to_set) in [
        ("out_exprChannelSingle_Set", Out, true),
        ("out_exprChannelSet_Single", Out, false),
        ("ine_exprChannelSingle_Set", In, true),
        ("ine_exprChannelSet_Single", In, false),
    ] {
        v.push(Lemma::new(name, Flow, move |ctx, t| {
            for p in comps(ctx) {
                for ch in chans(ctx) {
                    for e in items(ctx) {
                        t.tried(1);
                        let single = ctx.single(dir, p, ch, e);
                        let set = ctx.set(dir, p, ctx.singleton[ch], e);
                        let (hyp, conclusion) = if single_to_set {
                            (single, set)
                        } else {
                            (set, single)
                        };
                        if hyp {
                            t.check(conclusion, || {
                                vec![
                                    ("P", ctx.comp_name(p)),
                                    ("ch", chan(ctx, ch)),
                                    ("E", item(ctx, e)),
                                ]
                            });
                        }
                    }
                }
            }
        }));
    }

    v.push(Lemma::new("ine_ins_neg1", Flow, |ctx, t| {
        for p in comps(ctx) {
            for e in items(ctx) {
                for x in chans(ctx) {
                    t.tried(1);
                    if !ctx.ine(p, e) && ctx.carries[x][e] {
                        t.check(!ctx.ins[p][x], || {
                            vec![
                                ("P", ctx.comp_name(p)),
                                ("m", item(ctx, e)),
                                ("x", chan(ctx, x)),
                            ]
                        });
                    }
                }
            }
        }
    }));

    for (name, nonempty) in [
        ("ine_nonempty_exprChannelSet", true),
        ("ine_empty_exprChannelSet", false),
    ] {
        v.push(Lemma::new(name, Flow, move |ctx, t| {
            for p in comps(ctx) {
                for s in sets(ctx) {
                    for e in items(ctx) {
                        t.tried(1);
                        let empty = s == ctx.empty_set;
                        if ctx.set(In, p, s, e) && empty != nonempty {
                            t.check(ctx.ine(p, e) == nonempty, || {
                                vec![
                                    ("P", ctx.comp_name(p)),
                                    ("ChSet", ctx.set_name(s)),
                                    ("E", item(ctx, e)),
                                ]
                            });
                        }
                    }
                }
            }
        }));
    }

    for (name, dir) in [("TBtheorem1a", In), ("TBtheorem2a", Out)] {
        pq_items(v, name, move |ctx, tr, e| {
            (ctx.flow(dir, tr.pq, e) && comp_in(ctx, dir, tr.pq))
                .then(|| ctx.flow(dir, tr.p, e) || ctx.flow(dir, tr.q, e))
        });
    }
    for (name, dir) in [("TBtheorem1b", In), ("TBtheorem2b", Out)] {
        pq_sets_items(v, name, move |ctx, tr, m, e| {
            (ctx.flow_m(dir, tr.pq, m, e) && comp_in(ctx, dir, tr.pq))
                .then(|| ctx.flow_m(dir, tr.p, m, e) || ctx.flow_m(dir, tr.q, m, e))
        });
    }

    pq_items(v, "TBtheorem3a", |ctx, tr, e| {
        (!ctx.ine(tr.p, e) && !ctx.ine(tr.q, e) && ctx.flags[tr.pq].comp_in)
            .then(|| !ctx.ine(tr.pq, e))
    });

    v.push(Lemma::new("TBlemma3b", Flow, |ctx, t| {
        for &tr in &ctx.triples {
            for m in sets(ctx) {
                for ch in chans(ctx) {
                    for e in items(ctx) {
                        t.tried(1);
                        if !ctx.ine_m(tr.p, m, e)
                            && !ctx.ine_m(tr.q, m, e)
                            && ctx.flags[tr.pq].comp_in
                            && ctx.in_set(m, ch)
                            && ctx.ins[tr.pq][ch]
                            && ctx.carries[ch][e]
                        {
                            t.contradiction(|| {
                                with(
                                    tri(ctx, tr),
                                    [
                                        ("M", ctx.set_name(m)),
                                        ("ch", chan(ctx, ch)),
                                        ("E", item(ctx, e)),
                                    ],
                                )
                            });
                        }
                    }
                }
            }
        }
    }));

    pq_sets_items(v, "TBtheorem3b", |ctx, tr, m, e| {
        (!ctx.ine_m(tr.p, m, e) && !ctx.ine_m(tr.q, m, e) && ctx.flags[tr.pq].comp_in)
            .then(|| !ctx.ine_m(tr.pq, m, e))
    });

    for (name, dir) in [("TBtheorem4a_empty", In), ("TBtheorem5a_empty", Out)] {
        pq_items(v, name, move |ctx, tr, e| {
            ((ctx.flow(dir, tr.p, e) || ctx.flow(dir, tr.q, e))
                && comp_in(ctx, dir, tr.pq)
                && ctx.loc_empty(tr.pq))
            .then(|| ctx.flow(dir, tr.pq, e))
        });
    }

    // a carrying channel of P (or of P or Q) outside loc PQ
    fn escapes(
        ctx: &Ctx<'_>,
        dir: FlowDirection,
        tr: Triple,
        e: usize,
        from: &[usize],
        m: Option<usize>,
    ) -> bool {
        chans(ctx).any(|ch| {
            from.iter().any(|&c| ctx.side(dir, c)[ch])
                && ctx.carries[ch][e]
                && !ctx.loc[tr.pq][ch]
                && m.is_none_or(|m| ctx.in_set(m, ch))
        })
    }

    for (name, dir) in [("TBtheorem4a_P", In), ("TBtheorem45a_P", Out)] {
        pq_items(v, name, move |ctx, tr, e| {
            (ctx.flow(dir, tr.p, e)
                && comp_in(ctx, dir, tr.pq)
                && escapes(ctx, dir, tr, e, &[tr.p], None))
            .then(|| ctx.flow(dir, tr.pq, e))
        });
    }
    // the witness channel belongs to Q while the flow hypothesis is on P
    for (name, dir) in [("TBtheorem4b_P", In), ("TBtheore54b_P", Out)] {
        pq_sets_items(v, name, move |ctx, tr, m, e| {
            (ctx.flow_m(dir, tr.p, m, e)
                && comp_in(ctx, dir, tr.pq)
                && escapes(ctx, dir, tr, e, &[tr.q], Some(m)))
            .then(|| ctx.flow_m(dir, tr.pq, m, e))
        });
    }
    for (name, dir) in [("TBtheorem4a_PQ", In), ("TBtheorem5a_PQ", Out)] {
        pq_items(v, name, move |ctx, tr, e| {
            ((ctx.flow(dir, tr.p, e) || ctx.flow(dir, tr.q, e))
                && comp_in(ctx, dir, tr.pq)
                && escapes(ctx, dir, tr, e, &[tr.p, tr.q], None))
            .then(|| ctx.flow(dir, tr.pq, e))
        });
    }
    for (name, dir) in [("TBtheorem4b_PQ", In), ("TBtheorem5b_PQ", Out)] {
        pq_sets_items(v, name, move |ctx, tr, m, e| {
            ((ctx.flow_m(dir, tr.p, m, e) || ctx.flow_m(dir, tr.q, m, e))
                && comp_in(ctx, dir, tr.pq)
                && escapes(ctx, dir, tr, e, &[tr.p, tr.q], Some(m)))
            .then(|| ctx.flow_m(dir, tr.pq, m, e))
        });
    }

    // the only carrying channel of P is local to PQ
    fn single_local(
        ctx: &Ctx<'_>,
        dir: FlowDirection,
        tr: Triple,
        e: usize,
        m: Option<usize>,
    ) -> bool {
        chans(ctx).any(|ch| {
            ctx.single(dir, tr.p, ch, e)
                && ctx.loc[tr.pq][ch]
                && m.is_none_or(|m| ctx.in_set(m, ch))
        })
    }

    for (name, dir) in [("TBtheorem4a_notP1", In), ("TBtheorem5a_notP1", Out)] {
        pq_items(v, name, move |ctx, tr, e| {
            (ctx.flow(dir, tr.p, e)
                && !ctx.flow(dir, tr.q, e)
                && comp_in(ctx, dir, tr.pq)
                && single_local(ctx, dir, tr, e, None))
            .then(|| !ctx.flow(dir, tr.pq, e))
        });
    }
    for (name, dir) in [("TBtheorem4b_notP1", In), ("TBtheorem5b_notP1", Out)] {
        pq_sets_items(v, name, move |ctx, tr, m, e| {
            (ctx.flow_m(dir, tr.p, m, e)
                && !ctx.flow_m(dir, tr.q, m, e)
                && comp_in(ctx, dir, tr.pq)
                && single_local(ctx, dir, tr, e, Some(m)))
            .then(|| !ctx.flow_m(dir, tr.pq, m, e))
        });
    }

    for (name, dir) in [("TBtheorem4a_notP2", In), ("TBtheorem5a_notP2", Out)] {
        v.push(Lemma::new(name, Flow, move |ctx, t| {
            for &tr in &ctx.triples {
                for s in sets(ctx) {
                    for e in items(ctx) {
                        t.tried(1);
                        if !ctx.flow(dir, tr.q, e)
                            && comp_in(ctx, dir, tr.pq)
                            && ctx.set(dir, tr.p, s, e)
                            && subset_of_loc(ctx, s, tr.pq)
                        {
                            t.check(!ctx.flow(dir, tr.pq, e), || {
                                with(
                                    tri(ctx, tr),
                                    [("ChSet", ctx.set_name(s)), ("E", item(ctx, e))],
                                )
                            });
                        }
                    }
                }
            }
        }));
    }
    for (name, dir) in [("TBtheorem4b_notP2", In), ("TBtheorem5b_notP2", Out)] {
        v.push(Lemma::new(name, Flow, move |ctx, t| {
            let n = ctx.family.len();
            for &tr in &ctx.triples {
                for s in sets(ctx) {
                    for e in items(ctx) {
                        t.tried(n);
                        if !(comp_in(ctx, dir, tr.pq)
                            && ctx.set(dir, tr.p, s, e)
                            && subset_of_loc(ctx, s, tr.pq))
                        {
                            continue;
                        }
                        for m in sets(ctx) {
                            if !ctx.flow_m(dir, tr.q, m, e) {
                                t.check(!ctx.flow_m(dir, tr.pq, m, e), || {
                                    with(
                                        tri(ctx, tr),
                                        [
                                            ("ChSet", ctx.set_name(s)),
                                            ("M", ctx.set_name(m)),
                                            ("E", item(ctx, e)),
                                        ],
                                    )
                                });
                            }
                        }
                    }
                }
            }
        }));
    }

    // ChSetP and ChSetQ, pruned to the exact carrying sets
    fn exact_local_pairs(
        ctx: &Ctx<'_>,
        dir: FlowDirection,
        tr: Triple,
        e: usize,
    ) -> Vec<(usize, usize)> {
        if !comp_in(ctx, dir, tr.pq) {
            return Vec::new();
        }
        let local = |c: usize| -> Vec<usize> {
            sets(ctx)
                .filter(|&s| ctx.set(dir, c, s, e) && subset_of_loc(ctx, s, tr.pq))
                .collect()
        };
        let (ps, qs) = (local(tr.p), local(tr.q));
        ps.iter()
            .flat_map(|&sp| qs.iter().map(move |&sq| (sp, sq)))
            .collect()
    }

    for (name, dir) in [("TBtheorem4a_notPQ", In), ("TBtheorem5a_notPQ", Out)] {
        v.push(Lemma::new(name, Flow, move |ctx, t| {
            let n = ctx.family.len();
            for &tr in &ctx.triples {
                for e in items(ctx) {
                    t.tried(n * n);
                    for (sp, sq) in exact_local_pairs(ctx, dir, tr, e) {
                        t.check(!ctx.flow(dir, tr.pq, e), || {
                            with(
                                tri(ctx, tr),
                                [
                                    ("ChSetP", ctx.set_name(sp)),
                                    ("ChSetQ", ctx.set_name(sq)),
                                    ("E", item(ctx, e)),
                                ],
                            )
                        });
                    }
                }
            }
        }));
    }
    v.push(Lemma::new("TBtheorem4b_notPQ", Flow, |ctx, t| {
        let n = ctx.family.len();
        for &tr in &ctx.triples {
            for e in items(ctx) {
                t.tried(n * n * n);
                for (sp, sq) in exact_local_pairs(ctx, In, tr, e) {
                    for m in sets(ctx) {
                        t.check(!ctx.ine_m(tr.pq, m, e), || {
                            with(
                                tri(ctx, tr),
                                [
                                    ("ChSetP", ctx.set_name(sp)),
                                    ("ChSetQ", ctx.set_name(sq)),
                                    ("M", ctx.set_name(m)),
                                    ("E", item(ctx, e)),
                                ],
                            )
                        });
                    }
                }
            }
        }
    }));
    // M is fixed to ChSetP ∪ ChSetQ
    v.push(Lemma::new("TBtheorem5b_notPQ", Flow, |ctx, t| {
        let n = ctx.family.len();
        for &tr in &ctx.triples {
            for e in items(ctx) {
                t.tried(n * n);
                for (sp, sq) in exact_local_pairs(ctx, Out, tr, e) {
                    let m: BTreeSet<_> = ctx.family[sp].union(&ctx.family[sq]).cloned().collect();
                    let emits =
                        flow::query_flow(ctx.arch, &ctx.comps[tr.pq], Out, &ctx.items[e], Some(&m))
                            .expect("declared");
                    t.check(!emits, || {
                        with(
                            tri(ctx, tr),
                            [
                                ("ChSetP", ctx.set_name(sp)),
                                ("ChSetQ", ctx.set_name(sq)),
                                ("M", super::context::set_text(&m)),
                                ("E", item(ctx, e)),
                            ],
                        )
                    });
                }
            }
        }
    }));
}

fn ine_atom(ctx: &Ctx<'_>, c: usize, a: usize) -> bool {
    ctx.ine(c, ctx.atom_item[a])
}

fn eout_atom(ctx: &Ctx<'_>, c: usize, a: usize) -> bool {
    ctx.eout(c, ctx.atom_item[a])
}

fn knows_atom(ctx: &Ctx<'_>, c: usize, a: usize) -> bool {
    ctx.knows1(c, ctx.atom_item[a])
}

fn local_secrets(v: &mut Vec<Lemma>) {
    pq_atoms(
        v,
        "LocalSecretsComposition1",
        LocalSecrets,
        Kind::Any,
        |ctx, tr, a| {
            ctx.local_secret(tr.p, a)
                .then(|| ctx.local_secret(tr.pq, a))
        },
    );

    for (name, kind) in [
        ("LocalSecretsComposition_exprChannel_k", Kind::Key),
        ("LocalSecretsComposition_exprChannel_s", Kind::Secret),
    ] {
        v.push(Lemma::new(name, LocalSecrets, move |ctx, t| {
            let atoms = kind.atoms(ctx);
            for p in comps(ctx) {
                for q in comps(ctx) {
                    for &a in &atoms {
                        for x in chans(ctx) {
                            t.tried(1);
                            let e = ctx.atom_item[a];
                            if ctx.carries[x][e]
                                && !ctx.ine(p, e)
                                && !ctx.ine(q, e)
                                && (ctx.ins[p][x] || ctx.ins[q][x])
                            {
                                t.contradiction(|| {
                                    vec![
                                        ("P", ctx.comp_name(p)),
                                        ("Q", ctx.comp_name(q)),
                                        ("m", atom(ctx, a)),
                                        ("x", chan(ctx, x)),
                                    ]
                                });
                            }
                        }
                    }
                }
            }
        }));
    }

    for (name, kind) in [
        ("LocalSecretsComposition_neg1_k", Kind::Key),
        ("LocalSecretsComposition_neg1_s", Kind::Secret),
        ("LocalSecretsComposition_neg1", Kind::Any),
    ] {
        let eval: fn(&Ctx<'_>, Triple, usize) -> Option<bool> = |ctx, tr, a| {
            (ctx.flags[tr.pq].comp_loc
                && !ine_atom(ctx, tr.p, a)
                && !ine_atom(ctx, tr.q, a)
                && !ctx.local_secret(tr.p, a)
                && !ctx.local_secret(tr.q, a))
            .then(|| !ctx.local_secret(tr.pq, a))
        };
        pq_atoms(v, name, LocalSecrets, kind, eval);
    }
    for (name, kind) in [
        ("LocalSecretsComposition_neg_k", Kind::Key),
        ("LocalSecretsComposition_neg_s", Kind::Secret),
        ("LocalSecretsComposition_neg", Kind::Any),
    ] {
        let eval: fn(&Ctx<'_>, Triple, usize) -> Option<bool> = |ctx, tr, a| {
            (ctx.flags[tr.pq].comp_loc
                && ctx.flags[tr.pq].ks
                && !ctx.owns(tr.p, a)
                && !ctx.owns(tr.q, a)
                && !ine_atom(ctx, tr.p, a)
                && !ine_atom(ctx, tr.q, a)
                && !ctx.local_secret(tr.p, a)
                && !ctx.local_secret(tr.q, a))
            .then(|| !ctx.local_secret(tr.pq, a))
        };
        pq_atoms(v, name, LocalSecrets, kind, eval);
    }
    for (name, kind, first) in [
        ("LocalSecretsComposition_ine1_k", Kind::Key, true),
        ("LocalSecretsComposition_ine1_s", Kind::Secret, true),
        ("LocalSecretsComposition_ine2_k", Kind::Key, false),
        ("LocalSecretsComposition_ine2_s", Kind::Secret, false),
    ] {
        let eval: fn(&Ctx<'_>, Triple, usize) -> Option<bool> = if first {
            |ctx, tr, a| {
                (ctx.local_secret(tr.pq, a)
                    && ctx.flags[tr.pq].comp_loc
                    && !ine_atom(ctx, tr.q, a)
                    && !ctx.local_secret(tr.p, a)
                    && !ctx.local_secret(tr.q, a))
                .then(|| ine_atom(ctx, tr.p, a))
            }
        } else {
            |ctx, tr, a| {
                (ctx.local_secret(tr.pq, a)
                    && ctx.flags[tr.pq].comp_loc
                    && !ine_atom(ctx, tr.p, a)
                    && !ctx.local_secret(tr.p, a)
                    && !ctx.local_secret(tr.q, a))
                .then(|| ine_atom(ctx, tr.q, a))
            }
        };
        pq_atoms(v, name, LocalSecrets, kind, eval);
    }

    for (name, kind) in [
        ("LocalSecretsComposition_neg_loc_k", Kind::Key),
        ("LocalSecretsComposition_neg_loc_s", Kind::Secret),
    ] {
        v.push(Lemma::new(name, LocalSecrets, move |ctx, t| {
            let atoms = kind.atoms(ctx);
            for p in comps(ctx) {
                for &a in &atoms {
                    for ch in chans(ctx) {
                        t.tried(1);
                        if !ctx.local_secret(p, a)
                            && ctx.carries[ch][ctx.atom_item[a]]
                            && !ctx.owns(p, a)
                        {
                            t.check(!ctx.loc[p][ch], || {
                                vec![
                                    ("P", ctx.comp_name(p)),
                                    ("m", atom(ctx, a)),
                                    ("ch", chan(ctx, ch)),
                                ]
                            });
                        }
                    }
                }
            }
        }));
    }

    for (name, second) in [("LocalSecrets_L1", false), ("LocalSecrets_L2", true)] {
        v.push(Lemma::new(name, LocalSecrets, move |ctx, t| {
            for p in comps(ctx) {
                for a in 0..ctx.atoms.len() {
                    t.tried(1);
                    let inherited = ctx.subs[p].iter().any(|&s| ctx.local_secret(s, a));
                    if !ctx.local_secret(p, a) {
                        continue;
                    }
                    let bind = || vec![("P", ctx.comp_name(p)), ("m", atom(ctx, a))];
                    if !second && !inherited {
                        t.check(!ctx.owns(p, a), bind);
                    } else if second && ctx.owns(p, a) {
                        t.check(inherited, bind);
                    }
                }
            }
        }));
    }

    for (name, kind, from_p, exists) in [
        (
            "correctCompositionKS_exprChannel_k_P",
            Kind::Key,
            true,
            false,
        ),
        (
            "correctCompositionKS_exprChannel_k_Pex",
            Kind::Key,
            true,
            true,
        ),
        (
            "correctCompositionKS_exprChannel_k_Q",
            Kind::Key,
            false,
            false,
        ),
        (
            "correctCompositionKS_exprChannel_k_Qex",
            Kind::Key,
            false,
            true,
        ),
        (
            "correctCompositionKS_exprChannel_s_P",
            Kind::Secret,
            true,
            false,
        ),
        (
            "correctCompositionKS_exprChannel_s_Pex",
            Kind::Secret,
            true,
            true,
        ),
        (
            "correctCompositionKS_exprChannel_s_Q",
            Kind::Secret,
            false,
            false,
        ),
        (
            "correctCompositionKS_exprChannel_s_Qex",
            Kind::Secret,
            false,
            true,
        ),
    ] {
        v.push(Lemma::new(name, LocalSecrets, move |ctx, t| {
            let atoms = kind.atoms(ctx);
            for &tr in &ctx.triples {
                let side = if from_p { tr.p } else { tr.q };
                for &a in &atoms {
                    let e = ctx.atom_item[a];
                    for ch in chans(ctx) {
                        t.tried(1);
                        if ctx.flags[tr.pq].ks
                            && !ctx.local_secret(tr.pq, a)
                            && ctx.ins[side][ch]
                            && ctx.carries[ch][e]
                            && !ctx.owns(tr.pq, a)
                            && ctx.flags[tr.pq].comp_in
                        {
                            let conclusion = if exists {
                                chans(ctx).any(|x| ctx.ins[tr.pq][x] && ctx.carries[x][e])
                            } else {
                                ctx.ins[tr.pq][ch] && ctx.carries[ch][e]
                            };
                            t.check(conclusion, || {
                                with(tri(ctx, tr), [("m", atom(ctx, a)), ("ch", chan(ctx, ch))])
                            });
                        }
                    }
                }
            }
        }));
    }
}

fn knowledge(v: &mut Vec<Lemma>) {
    type CompAtom = fn(&Ctx<'_>, usize, usize) -> Option<bool>;
    let kinds = [("k", Kind::Key), ("s", Kind::Secret)];

    let know2knows: CompAtom = |ctx, c, a| ctx.know(c, a).then(|| knows_atom(ctx, c, a));
    // scoped: the atom is not obtained by analysis alone
    let knows2know: CompAtom =
        |ctx, c, a| (knows_atom(ctx, c, a) && ctx.atom_agrees(a, &[c])).then(|| ctx.know(c, a));
    let knows1: CompAtom = |ctx, c, a| {
        ctx.atom_agrees(a, &[c])
            .then(|| ctx.know(c, a) == knows_atom(ctx, c, a))
    };
    let know2knows_neg: CompAtom =
        |ctx, c, a| (!ctx.know(c, a) && ctx.atom_agrees(a, &[c])).then(|| !knows_atom(ctx, c, a));
    let knows2know_neg: CompAtom = |ctx, c, a| (!knows_atom(ctx, c, a)).then(|| !ctx.know(c, a));
    let eout_know_nonks: CompAtom = |ctx, c, a| {
        (!ctx.owns(c, a) && eout_atom(ctx, c, a) && ctx.eout_know_correct(c, a))
            .then(|| ctx.know(c, a))
    };
    let not_know_not_ine: CompAtom = |ctx, c, a| (!ctx.know(c, a)).then(|| !ine_atom(ctx, c, a));
    let not_know_not_eout: CompAtom = |ctx, c, a| {
        (!ctx.owns(c, a) && !ctx.know(c, a) && ctx.eout_know_correct(c, a))
            .then(|| !eout_atom(ctx, c, a))
    };
    let eout_know_l1: CompAtom = |ctx, c, a| {
        (ctx.eout_know_correct(c, a) && eout_atom(ctx, c, a))
            .then(|| ctx.owns(c, a) || ctx.know(c, a))
    };
    let eout_knows_nonks: CompAtom = |ctx, c, a| {
        (!ctx.owns(c, a) && eout_atom(ctx, c, a) && ctx.eout_knows_e_correct(c, ctx.atom_item[a]))
            .then(|| knows_atom(ctx, c, a))
    };
    let not_knows_not_ine: CompAtom =
        |ctx, c, a| (!knows_atom(ctx, c, a)).then(|| !ine_atom(ctx, c, a));
    let not_knows_not_eout: CompAtom = |ctx, c, a| {
        (!ctx.owns(c, a) && !knows_atom(ctx, c, a) && ctx.eout_knows_e_correct(c, ctx.atom_item[a]))
            .then(|| !eout_atom(ctx, c, a))
    };

    let families: [(&str, CompAtom); 12] = [
        ("know2knows_", know2knows),
        ("knows2know_", knows2know),
        ("knows1", knows1),
        ("know2knows_neg_", know2knows_neg),
        ("knows2know_neg_", knows2know_neg),
        ("eout_know_nonKS_", eout_know_nonks),
        ("not_know_", not_know_not_ine),
        ("not_know_", not_know_not_eout),
        ("eoutKnowCorrect_L1", eout_know_l1),
        ("eout_knows_nonKS_", eout_knows_nonks),
        ("not_knows_", not_knows_not_ine),
        ("not_knows_", not_knows_not_eout),
    ];
    for (i, (prefix, eval)) in families.into_iter().enumerate() {
        for (suffix, kind) in kinds {
            let name: &'static str = match (i, prefix) {
                (6, _) | (10, _) => Box::leak(format!("{prefix}{suffix}_not_ine").into_boxed_str()),
                (7, _) | (11, _) => {
                    Box::leak(format!("{prefix}{suffix}_not_eout").into_boxed_str())
                }
                _ => Box::leak(format!("{prefix}{suffix}").into_boxed_str()),
            };
            comp_atoms(v, name, kind, eval);
        }
    }

    type PairAtom = fn(&Ctx<'_>, usize, usize, usize) -> Option<bool>;
    let know2knows_pq: PairAtom = |ctx, p, q, a| {
        (ctx.know(p, a) || ctx.know(q, a)).then(|| knows_atom(ctx, p, a) || knows_atom(ctx, q, a))
    };
    let knows2know_pq: PairAtom = |ctx, p, q, a| {
        ((knows_atom(ctx, p, a) || knows_atom(ctx, q, a)) && ctx.atom_agrees(a, &[p, q]))
            .then(|| ctx.know(p, a) || ctx.know(q, a))
    };
    let adv_not_know: PairAtom = |ctx, p, adv, a| {
        (chans(ctx).all(|ch| !ctx.out[p][ch] || ctx.ins[adv][ch]) && !ctx.know(adv, a))
            .then(|| !eout_atom(ctx, p, a))
    };
    let adv_not_knows: PairAtom = |ctx, p, adv, a| {
        (chans(ctx).all(|ch| !ctx.out[p][ch] || ctx.ins[adv][ch]) && !knows_atom(ctx, adv, a))
            .then(|| !eout_atom(ctx, p, a))
    };
    for (suffix, kind) in kinds {
        let leak = |s: String| -> &'static str { Box::leak(s.into_boxed_str()) };
        pair_atoms(
            v,
            leak(format!("know2knowsPQ_{suffix}")),
            kind,
            ("P", "Q"),
            know2knows_pq,
        );
        pair_atoms(
            v,
            leak(format!("knows2knowPQ_{suffix}")),
            kind,
            ("P", "Q"),
            knows2know_pq,
        );
    }
    pair_atoms(v, "adv_not_know1", Kind::Key, ("P", "A"), adv_not_know);
    pair_atoms(v, "adv_not_know2", Kind::Secret, ("P", "A"), adv_not_know);
    pair_atoms(v, "adv_not_knows1", Kind::Key, ("P", "A"), adv_not_knows);
    pair_atoms(v, "adv_not_knows2", Kind::Secret, ("P", "A"), adv_not_knows);

    v.push(Lemma::new("knows2", Knowledge, |ctx, t| {
        for c in comps(ctx) {
            for seq in &ctx.seqs {
                for i in 0..=seq.len() {
                    t.tried(2);
                    if !ctx.knows(c, seq) {
                        continue;
                    }
                    // e2 = e1 @ e and e2 = e @ e1
                    for part in [&seq[i..], &seq[..i]] {
                        t.check(ctx.knows(c, part), || {
                            vec![
                                ("A", ctx.comp_name(c)),
                                ("e2", seq.to_string()),
                                ("e", crate::model::ExprSeq::from(part.to_vec()).to_string()),
                            ]
                        });
                    }
                }
            }
        }
    }));

    v.push(Lemma::new(
        "correctCompositionInLoc_exprChannel",
        Knowledge,
        |ctx, t| {
            for &tr in &ctx.triples {
                for ch in chans(ctx) {
                    for e in items(ctx) {
                        t.tried(1);
                        if ctx.flags[tr.pq].comp_in
                            && ctx.ins[tr.p][ch]
                            && ctx.carries[ch][e]
                            && !ctx.ine(tr.pq, e)
                        {
                            t.check(ctx.loc[tr.pq][ch], || {
                                with(tri(ctx, tr), [("ch", chan(ctx, ch)), ("m", item(ctx, e))])
                            });
                        }
                    }
                }
            }
        },
    ));

    v.push(Lemma::new("eoutKnowsECorrect_L1", Knowledge, |ctx, t| {
        for c in comps(ctx) {
            for e in items(ctx) {
                t.tried(1);
                if ctx.eout_knows_e_correct(c, e) && ctx.eout(c, e) {
                    let owned = ctx.items[e]
                        .as_atom()
                        .is_some_and(|a| ctx.owned[c].contains(&a));
                    t.check(owned || ctx.knows1(c, e), || {
                        vec![("C", ctx.comp_name(c)), ("e", item(ctx, e))]
                    });
                }
            }
        }
    }));

    type PqAtom = fn(&Ctx<'_>, Triple, usize) -> Option<bool>;
    let know_comp1: PqAtom = |ctx, tr, a| {
        (!ctx.owns(tr.p, a)
            && !ctx.owns(tr.q, a)
            && ctx.know(tr.p, a)
            && ctx.flags[tr.pq].comp_in
            && ctx.flags[tr.pq].ks)
            .then(|| ctx.know(tr.pq, a))
    };
    let know_comp2: PqAtom = |ctx, tr, a| {
        (!ctx.owns(tr.p, a)
            && !ctx.owns(tr.q, a)
            && ctx.know(tr.q, a)
            && ctx.flags[tr.pq].comp_in
            && ctx.flags[tr.pq].ks)
            .then(|| ctx.know(tr.pq, a))
    };
    let know_comp: PqAtom = |ctx, tr, a| {
        (!ctx.owns(tr.p, a)
            && !ctx.owns(tr.q, a)
            && (ctx.know(tr.p, a) || ctx.know(tr.q, a))
            && ctx.flags[tr.pq].comp_in
            && ctx.flags[tr.pq].ks)
            .then(|| ctx.know(tr.pq, a))
    };
    let know_neg_ine: PqAtom = |ctx, tr, a| {
        (!ctx.know(tr.p, a) && !ctx.know(tr.q, a) && ctx.flags[tr.pq].comp_in)
            .then(|| !ine_atom(ctx, tr.pq, a))
    };
    let know_neg1: PqAtom = |ctx, tr, a| {
        (!ctx.know(tr.p, a)
            && !ctx.know(tr.q, a)
            && ctx.flags[tr.pq].comp_loc
            && ctx.flags[tr.pq].comp_in)
            .then(|| !ctx.know(tr.pq, a))
    };
    let know_decomp: PqAtom = |ctx, tr, a| {
        (ctx.know(tr.pq, a) && ctx.flags[tr.pq].comp_in && ctx.flags[tr.pq].comp_loc)
            .then(|| ctx.know(tr.p, a) || ctx.know(tr.q, a))
    };
    pq_atoms(v, "know_composition1", Knowledge, Kind::Any, know_comp1);
    pq_atoms(v, "know_composition2", Knowledge, Kind::Any, know_comp2);
    pq_atoms(v, "know_composition", Knowledge, Kind::Any, know_comp);
    pq_atoms(
        v,
        "know_composition_neg_ine_k",
        Knowledge,
        Kind::Key,
        know_neg_ine,
    );
    pq_atoms(
        v,
        "know_composition_neg_ine_s",
        Knowledge,
        Kind::Secret,
        know_neg_ine,
    );
    pq_atoms(v, "know_composition_neg1", Knowledge, Kind::Any, know_neg1);
    pq_atoms(v, "know_decomposition", Knowledge, Kind::Any, know_decomp);

    // sequence-level composition lemmas, scoped to atoms on which knows and
    // know agree at P, Q and PQ
    let knows_decomp: PqAtom = |ctx, tr, a| {
        (!ctx.owns(tr.p, a)
            && !ctx.owns(tr.q, a)
            && knows_atom(ctx, tr.pq, a)
            && ctx.flags[tr.pq].comp_in
            && ctx.flags[tr.pq].comp_loc
            && ctx.atom_agrees(a, &[tr.p, tr.q, tr.pq]))
        .then(|| knows_atom(ctx, tr.p, a) || knows_atom(ctx, tr.q, a))
    };
    let knows_comp1: PqAtom = |ctx, tr, a| {
        (!ctx.owns(tr.p, a)
            && !ctx.owns(tr.q, a)
            && knows_atom(ctx, tr.p, a)
            && ctx.flags[tr.pq].comp_in
            && ctx.flags[tr.pq].ks
            && ctx.atom_agrees(a, &[tr.p, tr.q, tr.pq]))
        .then(|| knows_atom(ctx, tr.pq, a))
    };
    let knows_comp2: PqAtom = |ctx, tr, a| {
        (!ctx.owns(tr.p, a)
            && !ctx.owns(tr.q, a)
            && knows_atom(ctx, tr.q, a)
            && ctx.flags[tr.pq].comp_in
            && ctx.flags[tr.pq].ks
            && ctx.atom_agrees(a, &[tr.p, tr.q, tr.pq]))
        .then(|| knows_atom(ctx, tr.pq, a))
    };
    let knows_neg1: PqAtom = |ctx, tr, a| {
        (!ctx.owns(tr.p, a)
            && !ctx.owns(tr.q, a)
            && !knows_atom(ctx, tr.p, a)
            && !knows_atom(ctx, tr.q, a)
            && ctx.flags[tr.pq].comp_loc
            && ctx.flags[tr.pq].comp_in
            && ctx.flags[tr.pq].ks
            && ctx.atom_agrees(a, &[tr.p, tr.q, tr.pq]))
        .then(|| !knows_atom(ctx, tr.pq, a))
    };
    pq_atoms(
        v,
        "knows_decomposition_1_k",
        Knowledge,
        Kind::Key,
        knows_decomp,
    );
    pq_atoms(
        v,
        "knows_decomposition_1_s",
        Knowledge,
        Kind::Secret,
        knows_decomp,
    );
    pq_atoms(
        v,
        "knows_decomposition_1",
        Knowledge,
        Kind::Any,
        knows_decomp,
    );
    pq_atoms(v, "knows_composition1_k", Knowledge, Kind::Key, knows_comp1);
    pq_atoms(
        v,
        "knows_composition1_s",
        Knowledge,
        Kind::Secret,
        knows_comp1,
    );
    pq_atoms(v, "knows_composition2_k", Knowledge, Kind::Key, knows_comp2);
    pq_atoms(
        v,
        "knows_composition2_s",
        Knowledge,
        Kind::Secret,
        knows_comp2,
    );
    pq_atoms(
        v,
        "knows_composition_neg1_k",
        Knowledge,
        Kind::Key,
        knows_neg1,
    );
    pq_atoms(
        v,
        "knows_composition_neg1_s",
        Knowledge,
        Kind::Secret,
        knows_neg1,
    );

    // a # e over the sampled sequences
    type Cons = fn(bool, bool, bool) -> Option<bool>;
    let cons_lemmas: [(&'static str, Cons); 7] = [
        ("knows_concat_1", |whole, head, _| whole.then_some(head)),
        ("knows_concat_2", |whole, _, tail| whole.then_some(tail)),
        ("knows_concat_3", |whole, head, tail| {
            (head && tail).then_some(whole)
        }),
        (
            "not_knows_conc_knows_elem_not_knows_tail",
            |whole, head, tail| (!whole && head).then_some(!tail),
        ),
        ("not_knows_conc_not_knows_elem_tail", |whole, head, tail| {
            (!whole).then_some(!head || !tail)
        }),
        ("not_knows_elem_not_knows_conc", |whole, head, _| {
            (!head).then_some(!whole)
        }),
        ("not_knows_tail_not_knows_conc", |whole, _, tail| {
            (!tail).then_some(!whole)
        }),
    ];
    for (name, eval) in cons_lemmas {
        v.push(Lemma::new(name, Knowledge, move |ctx, t| {
            for c in comps(ctx) {
                for seq in ctx
                    .seqs
                    .iter()
                    .chain(&ctx.atom_seqs)
                    .filter(|s| !s.is_empty())
                {
                    t.tried(1);
                    let whole = ctx.knows(c, seq);
                    let head = ctx.knows(c, &seq[..1]);
                    let tail = ctx.knows(c, &seq[1..]);
                    if let Some(conclusion) = eval(whole, head, tail) {
                        t.check(conclusion, || {
                            vec![("P", ctx.comp_name(c)), ("a # e", seq.to_string())]
                        });
                    }
                }
            }
        }));
    }

    // all items are atoms; hypotheses on P, on Q, or on either
    for (name, side) in [
        ("knows_composition3", 0u8),
        ("knows_composition4", 1),
        ("knows_composition5", 2),
    ] {
        v.push(Lemma::new(name, Knowledge, move |ctx, t| {
            for &tr in &ctx.triples {
                for seq in &ctx.atom_seqs {
                    t.tried(1);
                    let known = match side {
                        0 => ctx.knows(tr.p, seq),
                        1 => ctx.knows(tr.q, seq),
                        _ => ctx.knows(tr.p, seq) || ctx.knows(tr.q, seq),
                    };
                    if !(known && ctx.flags[tr.pq].comp_in && ctx.flags[tr.pq].ks) {
                        continue;
                    }
                    let not_spec = |c: usize| {
                        check_not_spec_keys_secrets_expr(ctx.arch, &ctx.comps[c], seq)
                            .expect("declared")
                            .passed()
                    };
                    let agree = seq.iter().all(|i| {
                        let a = ctx
                            .atoms
                            .iter()
                            .position(|x| Some(x) == i.as_atom().as_ref())
                            .expect("atom item");
                        ctx.atom_agrees(a, &[tr.p, tr.q, tr.pq])
                    });
                    if not_spec(tr.p) && not_spec(tr.q) && agree {
                        t.check(ctx.knows(tr.pq, seq), || {
                            with(tri(ctx, tr), [("e", seq.to_string())])
                        });
                    }
                }
            }
        }));
    }
}
