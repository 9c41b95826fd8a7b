//! Interface and composition correctness predicates.
//!
//! Each `check_*` function evaluates one predicate literally and reports
//! the offending channels or atoms as blame; a verdict passes iff its blame
//! set is empty. [`structural_report`] aggregates all predicates for every
//! component under a [`LeafPolicy`].

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::Serialize;

use crate::error::Result;
use crate::model::{Architecture, ChannelId, ComponentId, ComponentSpec, ExprItem, KsAtom};

/// Outcome of a set-equation predicate.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Verdict<T: Ord> {
    pub blame: BTreeSet<T>,
}

impl<T: Ord> Verdict<T> {
    pub fn passed(&self) -> bool {
        self.blame.is_empty()
    }

    fn from_blame(blame: BTreeSet<T>) -> Self {
        Self { blame }
    }
}

pub type ChannelVerdict = Verdict<ChannelId>;
pub type AtomVerdict = Verdict<KsAtom>;

type ChannelCheck = fn(&Architecture, &ComponentId) -> Result<ChannelVerdict>;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct KeysSecretsVerdict {
    pub keys_ok: bool,
    pub secrets_ok: bool,
    pub ks_ok: bool,
    /// Atoms in the symmetric difference of the owned set and the union
    /// over subcomponents.
    pub blame: BTreeSet<KsAtom>,
}

/// Named predicates of the aggregate report.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Predicate {
    InOutLoc,
    CompositionIn,
    CompositionOut,
    CompositionLoc,
    CompositionKeys,
    CompositionSecrets,
    CompositionKs,
    ComponentSecrecy,
}

impl Predicate {
    pub const ALL: [Predicate; 8] = [
        Predicate::InOutLoc,
        Predicate::CompositionIn,
        Predicate::CompositionOut,
        Predicate::CompositionLoc,
        Predicate::CompositionKeys,
        Predicate::CompositionSecrets,
        Predicate::CompositionKs,
        Predicate::ComponentSecrecy,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Predicate::InOutLoc => "in_out_loc",
            Predicate::CompositionIn => "composition_in",
            Predicate::CompositionOut => "composition_out",
            Predicate::CompositionLoc => "composition_loc",
            Predicate::CompositionKeys => "composition_keys",
            Predicate::CompositionSecrets => "composition_secrets",
            Predicate::CompositionKs => "composition_ks",
            Predicate::ComponentSecrecy => "component_secrecy",
        }
    }
}

impl fmt::Display for Predicate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// How the channel composition predicates treat elementary components.
///
/// The key/secret composition predicates are guarded by "has
/// subcomponents" and hold vacuously for leaves. The channel predicates
/// carry no such guard: `Strict` evaluates them literally for leaves, while
/// `Lenient` marks them not applicable.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum LeafPolicy {
    #[default]
    Lenient,
    Strict,
}

fn union_of<'a, T: Ord + Clone + 'a>(
    arch: &'a Architecture,
    spec: &'a ComponentSpec,
    field: impl Fn(&'a ComponentSpec) -> &'a BTreeSet<T>,
) -> Result<BTreeSet<T>> {
    let mut acc = BTreeSet::new();
    for sub in &spec.subcomponents {
        acc.extend(field(arch.component(sub)?).iter().cloned());
    }
    Ok(acc)
}

fn symmetric_difference<T: Ord + Clone>(a: &BTreeSet<T>, b: &BTreeSet<T>) -> BTreeSet<T> {
    a.symmetric_difference(b).cloned().collect()
}

/// `ins`, `loc` and `out` are pairwise disjoint.
pub fn check_in_out_loc(arch: &Architecture, c: &ComponentId) -> Result<ChannelVerdict> {
    let spec = arch.component(c)?;
    let mut blame: BTreeSet<ChannelId> = spec.ins.intersection(&spec.out).cloned().collect();
    blame.extend(spec.ins.intersection(&spec.loc).cloned());
    blame.extend(spec.loc.intersection(&spec.out).cloned());
    Ok(Verdict::from_blame(blame))
}

/// `ins c = ⋃ ins(subs) − loc c` and `ins c ∩ ⋃ out(subs) = ∅`.
pub fn check_composition_in(arch: &Architecture, c: &ComponentId) -> Result<ChannelVerdict> {
    let spec = arch.component(c)?;
    let sub_ins = union_of(arch, spec, |s| &s.ins)?;
    let sub_out = union_of(arch, spec, |s| &s.out)?;
    let expected: BTreeSet<ChannelId> = sub_ins.difference(&spec.loc).cloned().collect();
    let mut blame = symmetric_difference(&spec.ins, &expected);
    blame.extend(spec.ins.intersection(&sub_out).cloned());
    Ok(Verdict::from_blame(blame))
}

/// `out c = ⋃ out(subs) − loc c` and `out c ∩ ⋃ ins(subs) = ∅`.
pub fn check_composition_out(arch: &Architecture, c: &ComponentId) -> Result<ChannelVerdict> {
    let spec = arch.component(c)?;
    let sub_ins = union_of(arch, spec, |s| &s.ins)?;
    let sub_out = union_of(arch, spec, |s| &s.out)?;
    let expected: BTreeSet<ChannelId> = sub_out.difference(&spec.loc).cloned().collect();
    let mut blame = symmetric_difference(&spec.out, &expected);
    blame.extend(spec.out.intersection(&sub_ins).cloned());
    Ok(Verdict::from_blame(blame))
}

/// `loc c = ⋃ ins(subs) ∩ ⋃ out(subs)`.
pub fn check_composition_loc(arch: &Architecture, c: &ComponentId) -> Result<ChannelVerdict> {
    let spec = arch.component(c)?;
    let sub_ins = union_of(arch, spec, |s| &s.ins)?;
    let sub_out = union_of(arch, spec, |s| &s.out)?;
    let expected: BTreeSet<ChannelId> = sub_ins.intersection(&sub_out).cloned().collect();
    Ok(Verdict::from_blame(symmetric_difference(
        &spec.loc, &expected,
    )))
}

/// Owned keys, secrets and their atom union each equal the union over the
/// subcomponents; vacuously true for elementary components.
pub fn check_composition_keys_secrets(
    arch: &Architecture,
    c: &ComponentId,
) -> Result<KeysSecretsVerdict> {
    let spec = arch.component(c)?;
    if spec.is_elementary() {
        return Ok(KeysSecretsVerdict {
            keys_ok: true,
            secrets_ok: true,
            ks_ok: true,
            blame: BTreeSet::new(),
        });
    }
    let sub_keys = union_of(arch, spec, |s| &s.keys)?;
    let sub_secrets = union_of(arch, spec, |s| &s.secrets)?;
    let mut sub_ks = BTreeSet::new();
    for sub in &spec.subcomponents {
        sub_ks.extend(spec_keys_secrets(arch, sub)?);
    }
    let own_ks = spec.keys_secrets();
    Ok(KeysSecretsVerdict {
        keys_ok: spec.keys == sub_keys,
        secrets_ok: spec.secrets == sub_secrets,
        ks_ok: own_ks == sub_ks,
        blame: symmetric_difference(&own_ks, &sub_ks),
    })
}

/// Owned keys and secrets as atoms.
pub fn spec_keys_secrets(arch: &Architecture, c: &ComponentId) -> Result<BTreeSet<KsAtom>> {
    Ok(arch.component(c)?.keys_secrets())
}

/// No top-level key or secret item of `seq` is owned by `c`. Items nested
/// inside blocks are not inspected.
pub fn check_not_spec_keys_secrets_expr(
    arch: &Architecture,
    c: &ComponentId,
    seq: &[ExprItem],
) -> Result<AtomVerdict> {
    let spec = arch.component(c)?;
    let blame = seq
        .iter()
        .filter_map(ExprItem::as_atom)
        .filter(|a| spec.owns(a))
        .collect();
    Ok(Verdict::from_blame(blame))
}

/// Conjunction of the seven composition and interface predicates.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SecrecyVerdict {
    pub failed: BTreeSet<Predicate>,
}

impl SecrecyVerdict {
    pub fn passed(&self) -> bool {
        self.failed.is_empty()
    }
}

/// Evaluates the component secrecy conjunction under `policy`.
pub fn check_component_secrecy(
    arch: &Architecture,
    c: &ComponentId,
    policy: LeafPolicy,
) -> Result<SecrecyVerdict> {
    let outcomes = evaluate_component(arch, c, policy)?;
    let failed = outcomes
        .into_iter()
        .filter(|(p, o)| *p != Predicate::ComponentSecrecy && o.is_fail())
        .map(|(p, _)| p)
        .collect();
    Ok(SecrecyVerdict { failed })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Outcome {
    Pass,
    Fail { blame: Vec<String> },
    NotApplicable,
}

impl Outcome {
    pub fn is_fail(&self) -> bool {
        matches!(self, Outcome::Fail { .. })
    }

    fn from_verdict<T: Ord + fmt::Display>(v: &Verdict<T>) -> Self {
        if v.passed() {
            Outcome::Pass
        } else {
            Outcome::Fail {
                blame: v.blame.iter().map(ToString::to_string).collect(),
            }
        }
    }

    fn from_flag(ok: bool, blame: impl FnOnce() -> Vec<String>) -> Self {
        if ok {
            Outcome::Pass
        } else {
            Outcome::Fail { blame: blame() }
        }
    }
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Outcome::Pass => f.write_str("pass"),
            Outcome::NotApplicable => f.write_str("n/a"),
            Outcome::Fail { blame } if blame.is_empty() => f.write_str("FAIL"),
            Outcome::Fail { blame } => write!(f, "FAIL [{}]", blame.join(", ")),
        }
    }
}

fn evaluate_component(
    arch: &Architecture,
    c: &ComponentId,
    policy: LeafPolicy,
) -> Result<BTreeMap<Predicate, Outcome>> {
    let spec = arch.component(c)?;
    let skip_channels = spec.is_elementary() && policy == LeafPolicy::Lenient;
    let mut out = BTreeMap::new();

    out.insert(
        Predicate::InOutLoc,
        Outcome::from_verdict(&check_in_out_loc(arch, c)?),
    );
    let channel_checks: [(Predicate, ChannelCheck); 3] = [
        (Predicate::CompositionIn, check_composition_in),
        (Predicate::CompositionOut, check_composition_out),
        (Predicate::CompositionLoc, check_composition_loc),
    ];
    for (pred, check) in channel_checks {
        let outcome = if skip_channels {
            Outcome::NotApplicable
        } else {
            Outcome::from_verdict(&check(arch, c)?)
        };
        out.insert(pred, outcome);
    }

    let ks = check_composition_keys_secrets(arch, c)?;
    let blame_of = |filter: fn(&KsAtom) -> bool| {
        let blame = &ks.blame;
        move || {
            blame
                .iter()
                .filter(|a| filter(a))
                .map(ToString::to_string)
                .collect()
        }
    };
    out.insert(
        Predicate::CompositionKeys,
        Outcome::from_flag(ks.keys_ok, blame_of(|a| matches!(a, KsAtom::Key(_)))),
    );
    out.insert(
        Predicate::CompositionSecrets,
        Outcome::from_flag(ks.secrets_ok, blame_of(|a| matches!(a, KsAtom::Secret(_)))),
    );
    out.insert(
        Predicate::CompositionKs,
        Outcome::from_flag(ks.ks_ok, blame_of(|_| true)),
    );

    let failed: Vec<String> = out
        .iter()
        .filter(|(_, o)| o.is_fail())
        .map(|(p, _)| p.name().to_string())
        .collect();
    out.insert(
        Predicate::ComponentSecrecy,
        Outcome::from_flag(failed.is_empty(), || failed),
    );
    Ok(out)
}

/// Every predicate for every component.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StructReport {
    pub policy: LeafPolicy,
    pub components: BTreeMap<ComponentId, BTreeMap<Predicate, Outcome>>,
}

impl StructReport {
    /// True iff no applicable check fails.
    pub fn passed(&self) -> bool {
        self.components
            .values()
            .all(|preds| preds.values().all(|o| !o.is_fail()))
    }

    pub fn failures(&self) -> impl Iterator<Item = (&ComponentId, Predicate, &Outcome)> {
        self.components.iter().flat_map(|(c, preds)| {
            preds
                .iter()
                .filter(|(_, o)| o.is_fail())
                .map(move |(p, o)| (c, *p, o))
        })
    }
}

impl fmt::Display for StructReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (c, preds) in &self.components {
            writeln!(f, "component {c}")?;
            for (p, o) in preds {
                writeln!(f, "  {:<20} {o}", p.name())?;
            }
        }
        let verdict = if self.passed() { "ok" } else { "FAILED" };
        write!(f, "result: {verdict}")
    }
}

pub fn structural_report(arch: &Architecture, policy: LeafPolicy) -> StructReport {
    let components = arch
        .component_ids()
        .map(|c| {
            let preds = evaluate_component(arch, c, policy)
                .expect("component ids come from the architecture");
            (c.clone(), preds)
        })
        .collect();
    StructReport { policy, components }
}
