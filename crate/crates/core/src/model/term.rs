//! Symbolic terms: key/secret atoms, expression items and expression
//! sequences, with encryption and signing as free constructors.
//!
//! Decryption and signature extraction are the only rewrite rules. They fire
//! when the block was built with the paired key and are irreducible
//! otherwise.

use std::collections::BTreeSet;
use std::fmt;
use std::ops::Deref;

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};

use super::ids::{ComponentId, KeyId, SecretId};

/// A key-or-secret atom.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", content = "name", rename_all = "lowercase")]
pub enum KsAtom {
    Key(KeyId),
    Secret(SecretId),
}

impl KsAtom {
    pub fn key(name: impl AsRef<str>) -> Self {
        KsAtom::Key(KeyId::new(name))
    }

    pub fn secret(name: impl AsRef<str>) -> Self {
        KsAtom::Secret(SecretId::new(name))
    }

    /// The expression item carrying this atom.
    pub fn to_item(&self) -> ExprItem {
        ks_to_expression(self)
    }
}

impl fmt::Display for KsAtom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            KsAtom::Key(k) => write!(f, "key({k})"),
            KsAtom::Secret(s) => write!(f, "secret({s})"),
        }
    }
}

/// One item of an expression.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ExprItem {
    Key(KeyId),
    Secret(SecretId),
    Data(BigUint),
    Id(ComponentId),
    Enc { key: KeyId, payload: ExprSeq },
    Sign { key: KeyId, payload: ExprSeq },
}

impl ExprItem {
    pub fn key(name: impl AsRef<str>) -> Self {
        ExprItem::Key(KeyId::new(name))
    }

    pub fn secret(name: impl AsRef<str>) -> Self {
        ExprItem::Secret(SecretId::new(name))
    }

    pub fn data(value: u64) -> Self {
        ExprItem::Data(BigUint::from(value))
    }

    pub fn id(name: impl AsRef<str>) -> Self {
        ExprItem::Id(ComponentId::new(name))
    }

    pub fn enc(key: impl AsRef<str>, payload: impl Into<ExprSeq>) -> Self {
        ExprItem::Enc {
            key: KeyId::new(key),
            payload: payload.into(),
        }
    }

    pub fn sign(key: impl AsRef<str>, payload: impl Into<ExprSeq>) -> Self {
        ExprItem::Sign {
            key: KeyId::new(key),
            payload: payload.into(),
        }
    }

    /// The key or secret atom this item denotes, if it is atomic.
    pub fn as_atom(&self) -> Option<KsAtom> {
        match self {
            ExprItem::Key(k) => Some(KsAtom::Key(k.clone())),
            ExprItem::Secret(s) => Some(KsAtom::Secret(s.clone())),
            _ => None,
        }
    }

    pub fn is_block(&self) -> bool {
        matches!(self, ExprItem::Enc { .. } | ExprItem::Sign { .. })
    }

    /// Nesting depth of blocks; atoms have depth 0.
    pub fn depth(&self) -> usize {
        match self {
            ExprItem::Enc { payload, .. } | ExprItem::Sign { payload, .. } => {
                1 + payload.iter().map(ExprItem::depth).max().unwrap_or(0)
            }
            _ => 0,
        }
    }

    /// Every item occurring in this term, including itself.
    pub fn subterms(&self) -> BTreeSet<ExprItem> {
        let mut out = BTreeSet::new();
        self.collect_subterms(&mut out);
        out
    }

    pub(crate) fn collect_subterms(&self, out: &mut BTreeSet<ExprItem>) {
        if !out.insert(self.clone()) {
            return;
        }
        if let ExprItem::Enc { payload, .. } | ExprItem::Sign { payload, .. } = self {
            for item in payload.iter() {
                item.collect_subterms(out);
            }
        }
    }

    /// Keys, secrets and component ids mentioned anywhere in the term.
    pub(crate) fn visit_names(&self, f: &mut impl FnMut(NameRef<'_>)) {
        match self {
            ExprItem::Key(k) => f(NameRef::Key(k)),
            ExprItem::Secret(s) => f(NameRef::Secret(s)),
            ExprItem::Data(_) => {}
            ExprItem::Id(c) => f(NameRef::Component(c)),
            ExprItem::Enc { key, payload } | ExprItem::Sign { key, payload } => {
                f(NameRef::Key(key));
                for item in payload.iter() {
                    item.visit_names(f);
                }
            }
        }
    }
}

pub(crate) enum NameRef<'a> {
    Key(&'a KeyId),
    Secret(&'a SecretId),
    Component(&'a ComponentId),
}

impl fmt::Display for ExprItem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExprItem::Key(k) => write!(f, "key({k})"),
            ExprItem::Secret(s) => write!(f, "secret({s})"),
            ExprItem::Data(n) => write!(f, "data({n})"),
            ExprItem::Id(c) => write!(f, "id({c})"),
            ExprItem::Enc { key, payload } => write!(f, "enc({key}, {payload})"),
            ExprItem::Sign { key, payload } => write!(f, "sign({key}, {payload})"),
        }
    }
}

/// An ordered, possibly empty, sequence of expression items.
#[derive(Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ExprSeq(Vec<ExprItem>);

impl ExprSeq {
    pub fn new() -> Self {
        Self(Vec::new())
    }

    pub fn single(item: ExprItem) -> Self {
        Self(vec![item])
    }

    pub fn items(&self) -> &[ExprItem] {
        &self.0
    }

    pub fn into_items(self) -> Vec<ExprItem> {
        self.0
    }

    /// `self ++ other`.
    pub fn concat(&self, other: &ExprSeq) -> ExprSeq {
        let mut items = self.0.clone();
        items.extend(other.0.iter().cloned());
        ExprSeq(items)
    }

    /// `item # self`.
    pub fn cons(item: ExprItem, tail: &ExprSeq) -> ExprSeq {
        let mut items = Vec::with_capacity(tail.len() + 1);
        items.push(item);
        items.extend(tail.0.iter().cloned());
        ExprSeq(items)
    }

    pub fn depth(&self) -> usize {
        self.0.iter().map(ExprItem::depth).max().unwrap_or(0)
    }
}

impl Deref for ExprSeq {
    type Target = [ExprItem];

    fn deref(&self) -> &[ExprItem] {
        &self.0
    }
}

impl From<Vec<ExprItem>> for ExprSeq {
    fn from(items: Vec<ExprItem>) -> Self {
        Self(items)
    }
}

impl<const N: usize> From<[ExprItem; N]> for ExprSeq {
    fn from(items: [ExprItem; N]) -> Self {
        Self(items.into())
    }
}

impl FromIterator<ExprItem> for ExprSeq {
    fn from_iter<I: IntoIterator<Item = ExprItem>>(iter: I) -> Self {
        Self(iter.into_iter().collect())
    }
}

impl IntoIterator for ExprSeq {
    type Item = ExprItem;
    type IntoIter = std::vec::IntoIter<ExprItem>;

    fn into_iter(self) -> Self::IntoIter {
        self.0.into_iter()
    }
}

impl<'a> IntoIterator for &'a ExprSeq {
    type Item = &'a ExprItem;
    type IntoIter = std::slice::Iter<'a, ExprItem>;

    fn into_iter(self) -> Self::IntoIter {
        self.0.iter()
    }
}

impl fmt::Display for ExprSeq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for (i, item) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{item}")?;
        }
        f.write_str("]")
    }
}

/// Ordered key pairs `(enc, dec)`: `enc` encrypts and verifies signatures,
/// `dec` decrypts and signs.
#[derive(Clone, Default, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(transparent)]
pub struct KeyPairing(BTreeSet<(KeyId, KeyId)>);

impl KeyPairing {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, enc: KeyId, dec: KeyId) -> bool {
        self.0.insert((enc, dec))
    }

    pub fn contains(&self, enc: &KeyId, dec: &KeyId) -> bool {
        self.0.contains(&(enc.clone(), dec.clone()))
    }

    /// Decryption keys paired with `enc`.
    pub fn decryption_keys<'a>(&'a self, enc: &'a KeyId) -> impl Iterator<Item = &'a KeyId> + 'a {
        self.0.iter().filter(move |(e, _)| e == enc).map(|(_, d)| d)
    }

    /// Extraction (verification) keys paired with signing key `dec`.
    pub fn extraction_keys<'a>(&'a self, dec: &'a KeyId) -> impl Iterator<Item = &'a KeyId> + 'a {
        self.0.iter().filter(move |(_, d)| d == dec).map(|(e, _)| e)
    }

    pub fn pairs(&self) -> impl Iterator<Item = &(KeyId, KeyId)> {
        self.0.iter()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl FromIterator<(KeyId, KeyId)> for KeyPairing {
    fn from_iter<I: IntoIterator<Item = (KeyId, KeyId)>>(iter: I) -> Self {
        Self(iter.into_iter().collect())
    }
}

/// Keeps the key and secret items of `seq`, in order, as atoms.
pub fn expression_to_ks_list(seq: &[ExprItem]) -> Vec<KsAtom> {
    seq.iter().filter_map(ExprItem::as_atom).collect()
}

pub fn ks_to_expression(atom: &KsAtom) -> ExprItem {
    match atom {
        KsAtom::Key(k) => ExprItem::Key(k.clone()),
        KsAtom::Secret(s) => ExprItem::Secret(s.clone()),
    }
}

pub fn enc(key: &KeyId, payload: &ExprSeq) -> ExprSeq {
    ExprSeq::single(ExprItem::Enc {
        key: key.clone(),
        payload: payload.clone(),
    })
}

pub fn sign(key: &KeyId, payload: &ExprSeq) -> ExprSeq {
    ExprSeq::single(ExprItem::Sign {
        key: key.clone(),
        payload: payload.clone(),
    })
}

/// Decrypts `seq` with `key`. Returns `None` (irreducible) unless `seq` is a
/// single encryption block whose key is paired with `key`.
pub fn decr(key: &KeyId, seq: &[ExprItem], pairing: &KeyPairing) -> Option<ExprSeq> {
    match seq {
        [ExprItem::Enc { key: k1, payload }] if pairing.contains(k1, key) => Some(payload.clone()),
        _ => None,
    }
}

/// Extracts the payload of a signature block with verification key `key`.
/// Returns `None` (irreducible) unless `seq` is a single signature block
/// whose signing key is paired with `key`.
pub fn ext(key: &KeyId, seq: &[ExprItem], pairing: &KeyPairing) -> Option<ExprSeq> {
    match seq {
        [ExprItem::Sign { key: k2, payload }] if pairing.contains(key, k2) => Some(payload.clone()),
        _ => None,
    }
}
