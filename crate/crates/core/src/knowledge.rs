//! Symbolic knowledge of a component.
//!
//! A component's base knowledge is everything it can receive on its input
//! channels plus its local secrets. Analysis closes the base under
//! decryption and signature extraction; synthesis then decides whether a
//! sequence can be assembled from closure items by concatenation,
//! encryption and signing.
//!
//! Unlocking a block needs the partner key of the block's key. In
//! [`Mode::Strict`] that key must be known at base level; in
//! [`Mode::Saturating`] a key obtained by analysis also counts.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::{self, Write as _};
use std::str::FromStr;

use serde::Serialize;

use crate::error::Result;
use crate::flow;
use crate::local_secrets::{compute_local_secrets, LocalSecretSet};
use crate::model::{Architecture, ChannelId, ComponentId, ExprItem, ExprSeq, KeyId, KsAtom};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    #[default]
    Strict,
    Saturating,
}

impl Mode {
    pub const ALL: [Mode; 2] = [Mode::Strict, Mode::Saturating];
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Strict => "strict",
            Mode::Saturating => "saturate",
        })
    }
}

impl FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "strict" => Ok(Mode::Strict),
            "saturate" | "saturating" => Ok(Mode::Saturating),
            other => Err(format!("expected `strict` or `saturate`, found `{other}`")),
        }
    }
}

/// How a closure item was obtained.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "step", rename_all = "snake_case")]
pub enum Step {
    InputChannel { channel: ChannelId },
    LocalSecret,
    DecryptedFrom { block: ExprItem, key: KeyId },
    ExtractedFrom { block: ExprItem, key: KeyId },
}

impl fmt::Display for Step {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Step::InputChannel { channel } => write!(f, "received on {channel}"),
            Step::LocalSecret => f.write_str("local secret"),
            Step::DecryptedFrom { block, key } => write!(f, "decrypted {block} with {key}"),
            Step::ExtractedFrom { block, key } => write!(f, "extracted {block} with {key}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct KnowledgeBase {
    pub component: ComponentId,
    pub mode: Mode,
    pub base_items: BTreeSet<ExprItem>,
    pub closure_items: BTreeSet<ExprItem>,
    /// First step that put each closure item in the closure.
    pub traces: BTreeMap<ExprItem, Step>,
}

/// Synthesis tree for a sequence.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "rule", rename_all = "snake_case")]
pub enum Derivation {
    /// The empty sequence.
    Empty,
    /// A key or secret known at base level.
    Atom {
        atom: KsAtom,
    },
    /// Any other closure item.
    FromClosure {
        item: ExprItem,
    },
    EncBuild {
        key: KeyId,
        payload: Box<Derivation>,
    },
    SignBuild {
        key: KeyId,
        payload: Box<Derivation>,
    },
    Concat {
        parts: Vec<Derivation>,
    },
}

impl Derivation {
    /// The sequence this tree derives.
    pub fn conclusion(&self) -> ExprSeq {
        match self {
            Derivation::Empty => ExprSeq::new(),
            Derivation::Atom { atom } => ExprSeq::single(atom.to_item()),
            Derivation::FromClosure { item } => ExprSeq::single(item.clone()),
            Derivation::EncBuild { key, payload } => crate::model::enc(key, &payload.conclusion()),
            Derivation::SignBuild { key, payload } => {
                crate::model::sign(key, &payload.conclusion())
            }
            Derivation::Concat { parts } => parts
                .iter()
                .fold(ExprSeq::new(), |acc, p| acc.concat(&p.conclusion())),
        }
    }

    fn render(&self, kb: &KnowledgeBase, depth: usize, out: &mut String) {
        let pad = "  ".repeat(depth);
        match self {
            Derivation::Empty => {
                let _ = writeln!(out, "{pad}[] (empty sequence)");
            }
            Derivation::Atom { atom } => {
                let item = atom.to_item();
                let _ = writeln!(out, "{pad}{item}: known atom, {}", kb.traces[&item]);
            }
            Derivation::FromClosure { item } => {
                let _ = writeln!(out, "{pad}{item}: {}", kb.traces[item]);
                let mut current = item;
                while let Some(
                    Step::DecryptedFrom { block, .. } | Step::ExtractedFrom { block, .. },
                ) = kb.traces.get(current)
                {
                    let _ = writeln!(out, "{pad}  {block}: {}", kb.traces[block]);
                    current = block;
                }
            }
            Derivation::EncBuild { key, payload } => {
                let _ = writeln!(out, "{pad}encrypt with {key}:");
                payload.render(kb, depth + 1, out);
            }
            Derivation::SignBuild { key, payload } => {
                let _ = writeln!(out, "{pad}sign with {key}:");
                payload.render(kb, depth + 1, out);
            }
            Derivation::Concat { parts } => {
                for p in parts {
                    p.render(kb, depth, out);
                }
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Judgment {
    pub derivable: bool,
    pub trace: Option<Derivation>,
    /// First item that cannot be derived.
    pub missing: Option<ExprItem>,
}

impl KnowledgeBase {
    /// Builds the closure for `c`, computing its local secrets on the way.
    pub fn build(arch: &Architecture, c: &ComponentId, mode: Mode) -> Result<Self> {
        let ls = compute_local_secrets(arch, c)?;
        Self::build_with(arch, c, mode, &ls)
    }

    /// Builds the closure from precomputed local secrets of `c`.
    pub fn build_with(
        arch: &Architecture,
        c: &ComponentId,
        mode: Mode,
        ls: &LocalSecretSet,
    ) -> Result<Self> {
        let spec = arch.component(c)?;
        let mut traces = BTreeMap::new();
        for ch in &spec.ins {
            for item in arch.items_on(ch) {
                traces
                    .entry(item.clone())
                    .or_insert_with(|| Step::InputChannel {
                        channel: ch.clone(),
                    });
            }
        }
        for atom in ls.atoms.keys() {
            traces.entry(atom.to_item()).or_insert(Step::LocalSecret);
        }
        let base_items: BTreeSet<ExprItem> = traces.keys().cloned().collect();
        let mut closure_items = base_items.clone();

        let mut opened: BTreeSet<ExprItem> = BTreeSet::new();
        loop {
            let mut fresh = Vec::new();
            for block in closure_items
                .iter()
                .filter(|i| i.is_block() && !opened.contains(*i))
            {
                let unlocked = match block {
                    ExprItem::Enc { key, payload } => arch
                        .pairing()
                        .decryption_keys(key)
                        .find(|k| key_available(mode, &base_items, &closure_items, k))
                        .map(|k| {
                            (
                                payload,
                                Step::DecryptedFrom {
                                    block: block.clone(),
                                    key: k.clone(),
                                },
                            )
                        }),
                    ExprItem::Sign { key, payload } => arch
                        .pairing()
                        .extraction_keys(key)
                        .find(|k| key_available(mode, &base_items, &closure_items, k))
                        .map(|k| {
                            (
                                payload,
                                Step::ExtractedFrom {
                                    block: block.clone(),
                                    key: k.clone(),
                                },
                            )
                        }),
                    _ => None,
                };
                if let Some((payload, step)) = unlocked {
                    fresh.push((block.clone(), payload.clone(), step));
                }
            }
            if fresh.is_empty() {
                break;
            }
            for (block, payload, step) in fresh {
                opened.insert(block);
                for item in payload {
                    if !closure_items.contains(&item) {
                        traces.insert(item.clone(), step.clone());
                        closure_items.insert(item);
                    }
                }
            }
        }

        Ok(Self {
            component: c.clone(),
            mode,
            base_items,
            closure_items,
            traces,
        })
    }

    /// Base-level knowledge of an atom: received on an input channel or a
    /// local secret.
    pub fn knows_atom(&self, atom: &KsAtom) -> bool {
        self.base_items.contains(&atom.to_item())
    }

    /// Whether `key` may be used to unlock or build blocks.
    pub fn key_available(&self, key: &KeyId) -> bool {
        key_available(self.mode, &self.base_items, &self.closure_items, key)
    }

    pub fn item_derivable(&self, item: &ExprItem) -> bool {
        self.derive_item(item).is_some()
    }

    fn derive_item(&self, item: &ExprItem) -> Option<Derivation> {
        if self.closure_items.contains(item) {
            return Some(match item.as_atom() {
                Some(atom) if self.base_items.contains(item) => Derivation::Atom { atom },
                _ => Derivation::FromClosure { item: item.clone() },
            });
        }
        match item {
            ExprItem::Enc { key, payload } if self.key_available(key) => {
                let payload = self.derive_seq(payload).ok()?;
                Some(Derivation::EncBuild {
                    key: key.clone(),
                    payload: Box::new(payload),
                })
            }
            ExprItem::Sign { key, payload } if self.key_available(key) => {
                let payload = self.derive_seq(payload).ok()?;
                Some(Derivation::SignBuild {
                    key: key.clone(),
                    payload: Box::new(payload),
                })
            }
            _ => None,
        }
    }

    fn derive_seq(&self, seq: &[ExprItem]) -> Result<Derivation, ExprItem> {
        match seq {
            [] => Ok(Derivation::Empty),
            [item] => self.derive_item(item).ok_or_else(|| item.clone()),
            items => items
                .iter()
                .map(|i| self.derive_item(i).ok_or_else(|| i.clone()))
                .collect::<Result<Vec<_>, _>>()
                .map(|parts| Derivation::Concat { parts }),
        }
    }

    /// Decides whether `seq` is derivable, with a synthesis tree when it is.
    pub fn knows(&self, seq: &[ExprItem]) -> Judgment {
        match self.derive_seq(seq) {
            Ok(trace) => Judgment {
                derivable: true,
                trace: Some(trace),
                missing: None,
            },
            Err(missing) => Judgment {
                derivable: false,
                trace: None,
                missing: Some(missing),
            },
        }
    }

    /// Human-readable account of a judgment.
    pub fn explain(&self, seq: &[ExprItem], judgment: &Judgment) -> String {
        let mut out = String::new();
        let seq_text = ExprSeq::from(seq.to_vec());
        match &judgment.trace {
            Some(trace) => {
                let _ = writeln!(
                    out,
                    "{} derives {seq_text} ({} mode):",
                    self.component, self.mode
                );
                trace.render(self, 1, &mut out);
            }
            None => {
                let _ = write!(
                    out,
                    "{} cannot derive {seq_text} ({} mode)",
                    self.component, self.mode
                );
                if let Some(item) = &judgment.missing {
                    let _ = write!(out, ": {item} is not derivable");
                }
                out.push('\n');
            }
        }
        out
    }
}

fn key_available(
    mode: Mode,
    base: &BTreeSet<ExprItem>,
    closure: &BTreeSet<ExprItem>,
    key: &KeyId,
) -> bool {
    let item = ExprItem::Key(key.clone());
    match mode {
        Mode::Strict => base.contains(&item),
        Mode::Saturating => closure.contains(&item),
    }
}

/// `c` receives the atom on an input channel or holds it as a local secret.
pub fn know_atom(arch: &Architecture, c: &ComponentId, atom: &KsAtom) -> Result<bool> {
    Ok(flow::ine(arch, c, &atom.to_item())? || compute_local_secrets(arch, c)?.contains(atom))
}

pub fn build_knowledge_base(
    arch: &Architecture,
    c: &ComponentId,
    mode: Mode,
) -> Result<KnowledgeBase> {
    KnowledgeBase::build(arch, c, mode)
}

pub fn knows_seq(
    arch: &Architecture,
    c: &ComponentId,
    seq: &[ExprItem],
    mode: Mode,
) -> Result<Judgment> {
    Ok(KnowledgeBase::build(arch, c, mode)?.knows(seq))
}

/// `c` owns the atom as one of its keys or secrets.
pub fn owned(arch: &Architecture, c: &ComponentId, atom: &KsAtom) -> Result<bool> {
    Ok(arch.component(c)?.owns(atom))
}

/// `c` emits the atom iff it owns or knows it.
pub fn check_eout_know_correct(
    arch: &Architecture,
    c: &ComponentId,
    atom: &KsAtom,
) -> Result<bool> {
    let emits = flow::eout(arch, c, &atom.to_item())?;
    Ok(emits == (owned(arch, c, atom)? || know_atom(arch, c, atom)?))
}

/// `c` emits `item` iff it owns it as an atom or can derive it (strict mode).
pub fn check_eout_knows_e_correct(
    arch: &Architecture,
    c: &ComponentId,
    item: &ExprItem,
) -> Result<bool> {
    let kb = KnowledgeBase::build(arch, c, Mode::Strict)?;
    eout_knows_e_correct_with(arch, &kb, item)
}

/// As [`check_eout_knows_e_correct`] against a prebuilt strict-mode base.
pub fn eout_knows_e_correct_with(
    arch: &Architecture,
    kb: &KnowledgeBase,
    item: &ExprItem,
) -> Result<bool> {
    let c = &kb.component;
    let emits = flow::eout(arch, c, item)?;
    let owned = match item.as_atom() {
        Some(atom) => owned(arch, c, &atom)?,
        None => false,
    };
    Ok(emits == (owned || kb.knows(std::slice::from_ref(item)).derivable))
}
