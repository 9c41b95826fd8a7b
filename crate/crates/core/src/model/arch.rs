//! Component hierarchy, channel universe and the channel/expression relation.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use super::ids::{is_identifier, ChannelId, ComponentId, KeyId, SecretId};
use super::term::{ExprItem, KeyPairing, KsAtom, NameRef};
use crate::error::{Error, Result};

/// One component: its subcomponents, channel interface and owned keys and
/// secrets.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ComponentSpec {
    pub id: ComponentId,
    pub subcomponents: BTreeSet<ComponentId>,
    pub ins: BTreeSet<ChannelId>,
    pub loc: BTreeSet<ChannelId>,
    pub out: BTreeSet<ChannelId>,
    pub keys: BTreeSet<KeyId>,
    pub secrets: BTreeSet<SecretId>,
}

impl ComponentSpec {
    pub fn new(id: impl Into<ComponentId>) -> Self {
        Self {
            id: id.into(),
            subcomponents: BTreeSet::new(),
            ins: BTreeSet::new(),
            loc: BTreeSet::new(),
            out: BTreeSet::new(),
            keys: BTreeSet::new(),
            secrets: BTreeSet::new(),
        }
    }

    pub fn with_subcomponents<I: IntoIterator<Item = S>, S: AsRef<str>>(mut self, ids: I) -> Self {
        self.subcomponents = ids.into_iter().map(ComponentId::new).collect();
        self
    }

    pub fn with_ins<I: IntoIterator<Item = S>, S: AsRef<str>>(mut self, ids: I) -> Self {
        self.ins = ids.into_iter().map(ChannelId::new).collect();
        self
    }

    pub fn with_loc<I: IntoIterator<Item = S>, S: AsRef<str>>(mut self, ids: I) -> Self {
        self.loc = ids.into_iter().map(ChannelId::new).collect();
        self
    }

    pub fn with_out<I: IntoIterator<Item = S>, S: AsRef<str>>(mut self, ids: I) -> Self {
        self.out = ids.into_iter().map(ChannelId::new).collect();
        self
    }

    pub fn with_keys<I: IntoIterator<Item = S>, S: AsRef<str>>(mut self, ids: I) -> Self {
        self.keys = ids.into_iter().map(KeyId::new).collect();
        self
    }

    pub fn with_secrets<I: IntoIterator<Item = S>, S: AsRef<str>>(mut self, ids: I) -> Self {
        self.secrets = ids.into_iter().map(SecretId::new).collect();
        self
    }

    pub fn is_elementary(&self) -> bool {
        self.subcomponents.is_empty()
    }

    /// Owned keys and secrets as atoms.
    pub fn keys_secrets(&self) -> BTreeSet<KsAtom> {
        self.keys
            .iter()
            .cloned()
            .map(KsAtom::Key)
            .chain(self.secrets.iter().cloned().map(KsAtom::Secret))
            .collect()
    }

    pub fn owns(&self, atom: &KsAtom) -> bool {
        match atom {
            KsAtom::Key(k) => self.keys.contains(k),
            KsAtom::Secret(s) => self.secrets.contains(s),
        }
    }
}

/// A validated architecture.
///
/// Every id referenced by a component, pairing or channel fact is declared,
/// and the subcomponent relation is acyclic. Values are immutable; use
/// [`Architecture::to_builder`] to derive variants.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Architecture {
    keys: BTreeSet<KeyId>,
    secrets: BTreeSet<SecretId>,
    channels: BTreeSet<ChannelId>,
    pairing: KeyPairing,
    components: BTreeMap<ComponentId, ComponentSpec>,
    expr_channel: BTreeSet<(ChannelId, ExprItem)>,
    by_channel: BTreeMap<ChannelId, BTreeSet<ExprItem>>,
    by_item: BTreeMap<ExprItem, BTreeSet<ChannelId>>,
}

impl Architecture {
    pub fn builder() -> ArchitectureBuilder {
        ArchitectureBuilder::default()
    }

    pub fn keys(&self) -> &BTreeSet<KeyId> {
        &self.keys
    }

    pub fn secrets(&self) -> &BTreeSet<SecretId> {
        &self.secrets
    }

    pub fn channels(&self) -> &BTreeSet<ChannelId> {
        &self.channels
    }

    pub fn pairing(&self) -> &KeyPairing {
        &self.pairing
    }

    pub fn components(&self) -> impl Iterator<Item = &ComponentSpec> {
        self.components.values()
    }

    pub fn component_ids(&self) -> impl Iterator<Item = &ComponentId> {
        self.components.keys()
    }

    pub fn component(&self, id: &ComponentId) -> Result<&ComponentSpec> {
        self.components
            .get(id)
            .ok_or_else(|| Error::UnknownComponent(id.clone()))
    }

    pub fn expr_channel(&self) -> &BTreeSet<(ChannelId, ExprItem)> {
        &self.expr_channel
    }

    /// True iff `(channel, item)` is in the channel/expression relation.
    pub fn carries(&self, channel: &ChannelId, item: &ExprItem) -> bool {
        self.by_channel
            .get(channel)
            .is_some_and(|items| items.contains(item))
    }

    /// Items that can be sent via `channel`.
    pub fn items_on(&self, channel: &ChannelId) -> impl Iterator<Item = &ExprItem> {
        self.by_channel.get(channel).into_iter().flatten()
    }

    /// Channels that can carry `item`.
    pub fn channels_carrying(&self, item: &ExprItem) -> impl Iterator<Item = &ChannelId> {
        self.by_item.get(item).into_iter().flatten()
    }

    pub fn require_channel(&self, channel: &ChannelId) -> Result<()> {
        if self.channels.contains(channel) {
            Ok(())
        } else {
            Err(Error::UnknownChannel(channel.clone()))
        }
    }

    /// Every key, secret and component named in `item` is declared.
    pub fn require_names(&self, item: &ExprItem) -> Result<()> {
        undeclared_name(item, &self.keys, &self.secrets, |c| {
            self.components.contains_key(c)
        })
    }

    /// All key and secret atoms of the declared universes.
    pub fn atoms(&self) -> impl Iterator<Item = KsAtom> + '_ {
        self.keys
            .iter()
            .cloned()
            .map(KsAtom::Key)
            .chain(self.secrets.iter().cloned().map(KsAtom::Secret))
    }

    /// Components ordered so that every subcomponent precedes its parents;
    /// ties are broken by name.
    pub fn topological_order(&self) -> Vec<ComponentId> {
        let mut order = Vec::with_capacity(self.components.len());
        let mut placed = BTreeSet::new();
        while order.len() < self.components.len() {
            let before = order.len();
            for spec in self.components.values() {
                if !placed.contains(&spec.id)
                    && spec.subcomponents.iter().all(|s| placed.contains(s))
                {
                    placed.insert(spec.id.clone());
                    order.push(spec.id.clone());
                }
            }
            // validated architectures are acyclic
            assert!(order.len() > before, "cycle in validated architecture");
        }
        order
    }

    /// A builder pre-populated with this architecture's declarations.
    pub fn to_builder(&self) -> ArchitectureBuilder {
        ArchitectureBuilder {
            keys: self.keys.iter().cloned().collect(),
            secrets: self.secrets.iter().cloned().collect(),
            channels: self.channels.iter().cloned().collect(),
            pairs: self.pairing.pairs().cloned().collect(),
            components: self
                .topological_order()
                .into_iter()
                .map(|id| self.components[&id].clone())
                .collect(),
            facts: self.expr_channel.iter().cloned().collect(),
        }
    }
}

/// Collects declarations and validates them into an [`Architecture`].
#[derive(Clone, Debug, Default)]
pub struct ArchitectureBuilder {
    keys: Vec<KeyId>,
    secrets: Vec<SecretId>,
    channels: Vec<ChannelId>,
    pairs: Vec<(KeyId, KeyId)>,
    components: Vec<ComponentSpec>,
    facts: Vec<(ChannelId, ExprItem)>,
}

impl ArchitectureBuilder {
    pub fn key(mut self, name: impl Into<KeyId>) -> Self {
        self.keys.push(name.into());
        self
    }

    pub fn keys<I: IntoIterator<Item = S>, S: AsRef<str>>(mut self, names: I) -> Self {
        self.keys.extend(names.into_iter().map(KeyId::new));
        self
    }

    pub fn secrets<I: IntoIterator<Item = S>, S: AsRef<str>>(mut self, names: I) -> Self {
        self.secrets.extend(names.into_iter().map(SecretId::new));
        self
    }

    pub fn channels<I: IntoIterator<Item = S>, S: AsRef<str>>(mut self, names: I) -> Self {
        self.channels.extend(names.into_iter().map(ChannelId::new));
        self
    }

    pub fn pair(mut self, enc: impl Into<KeyId>, dec: impl Into<KeyId>) -> Self {
        self.pairs.push((enc.into(), dec.into()));
        self
    }

    pub fn component(mut self, spec: ComponentSpec) -> Self {
        self.components.push(spec);
        self
    }

    pub fn fact(mut self, channel: impl Into<ChannelId>, item: ExprItem) -> Self {
        self.facts.push((channel.into(), item));
        self
    }

    /// Replaces the component with the same id, or appends it.
    pub fn replace_component(mut self, spec: ComponentSpec) -> Self {
        match self.components.iter_mut().find(|c| c.id == spec.id) {
            Some(slot) => *slot = spec,
            None => self.components.push(spec),
        }
        self
    }

    /// Applies `f` to the component `id`, if present.
    pub fn edit_component(mut self, id: &str, f: impl FnOnce(&mut ComponentSpec)) -> Self {
        if let Some(spec) = self.components.iter_mut().find(|c| c.id.as_str() == id) {
            f(spec);
        }
        self
    }

    pub fn remove_facts(mut self, pred: impl Fn(&ChannelId, &ExprItem) -> bool) -> Self {
        self.facts.retain(|(ch, item)| !pred(ch, item));
        self
    }

    pub fn build(self) -> Result<Architecture> {
        let keys = unique("key", self.keys)?;
        let secrets = unique("secret", self.secrets)?;
        let channels = unique("channel", self.channels)?;

        let mut pairing = KeyPairing::new();
        for (enc, dec) in self.pairs {
            for k in [&enc, &dec] {
                if !keys.contains(k) {
                    return Err(Error::UnknownKey(k.clone()));
                }
            }
            pairing.insert(enc, dec);
        }

        let mut components = BTreeMap::new();
        for spec in self.components {
            check_ident(spec.id.as_str())?;
            if components.contains_key(&spec.id) {
                return Err(Error::Duplicate {
                    kind: "component",
                    name: spec.id.to_string(),
                });
            }
            components.insert(spec.id.clone(), spec);
        }
        for spec in components.values() {
            for sub in &spec.subcomponents {
                if !components.contains_key(sub) {
                    return Err(Error::UnknownComponent(sub.clone()));
                }
            }
            for ch in spec.ins.iter().chain(&spec.loc).chain(&spec.out) {
                if !channels.contains(ch) {
                    return Err(Error::UnknownChannel(ch.clone()));
                }
            }
            if let Some(k) = spec.keys.iter().find(|k| !keys.contains(*k)) {
                return Err(Error::UnknownKey(k.clone()));
            }
            if let Some(s) = spec.secrets.iter().find(|s| !secrets.contains(*s)) {
                return Err(Error::UnknownSecret(s.clone()));
            }
        }
        if let Some(cycle) = find_cycle(&components) {
            return Err(Error::CyclicHierarchy(cycle));
        }

        let mut expr_channel = BTreeSet::new();
        for (ch, item) in self.facts {
            if !channels.contains(&ch) {
                return Err(Error::UnknownChannel(ch));
            }
            undeclared_name(&item, &keys, &secrets, |c| components.contains_key(c))?;
            expr_channel.insert((ch, item));
        }

        let mut by_channel: BTreeMap<ChannelId, BTreeSet<ExprItem>> = BTreeMap::new();
        let mut by_item: BTreeMap<ExprItem, BTreeSet<ChannelId>> = BTreeMap::new();
        for (ch, item) in &expr_channel {
            by_channel
                .entry(ch.clone())
                .or_default()
                .insert(item.clone());
            by_item.entry(item.clone()).or_default().insert(ch.clone());
        }

        Ok(Architecture {
            keys,
            secrets,
            channels,
            pairing,
            components,
            expr_channel,
            by_channel,
            by_item,
        })
    }
}

fn check_ident(name: &str) -> Result<()> {
    if is_identifier(name) {
        Ok(())
    } else {
        Err(Error::InvalidIdentifier(name.to_string()))
    }
}

fn unique<T: Ord + AsRef<str>>(kind: &'static str, names: Vec<T>) -> Result<BTreeSet<T>> {
    let mut set = BTreeSet::new();
    for name in names {
        check_ident(name.as_ref())?;
        if set.contains(&name) {
            return Err(Error::Duplicate {
                kind,
                name: name.as_ref().to_string(),
            });
        }
        set.insert(name);
    }
    Ok(set)
}

/// Depth-first search for a subcomponent cycle; returns the cycle path with
/// its first node repeated at the end.
fn find_cycle(components: &BTreeMap<ComponentId, ComponentSpec>) -> Option<Vec<ComponentId>> {
    #[derive(Clone, Copy, PartialEq)]
    enum Mark {
        Fresh,
        Active,
        Done,
    }

    fn visit(
        id: &ComponentId,
        components: &BTreeMap<ComponentId, ComponentSpec>,
        marks: &mut BTreeMap<ComponentId, Mark>,
        path: &mut Vec<ComponentId>,
    ) -> Option<Vec<ComponentId>> {
        match marks[id] {
            Mark::Done => return None,
            Mark::Active => {
                let start = path.iter().position(|p| p == id).unwrap_or(0);
                let mut cycle = path[start..].to_vec();
                cycle.push(id.clone());
                return Some(cycle);
            }
            Mark::Fresh => {}
        }
        marks.insert(id.clone(), Mark::Active);
        path.push(id.clone());
        for sub in &components[id].subcomponents {
            if let Some(cycle) = visit(sub, components, marks, path) {
                return Some(cycle);
            }
        }
        path.pop();
        marks.insert(id.clone(), Mark::Done);
        None
    }

    let mut marks: BTreeMap<ComponentId, Mark> = components
        .keys()
        .map(|id| (id.clone(), Mark::Fresh))
        .collect();
    let mut path = Vec::new();
    for id in components.keys() {
        if let Some(cycle) = visit(id, components, &mut marks, &mut path) {
            return Some(cycle);
        }
    }
    None
}

fn undeclared_name(
    item: &ExprItem,
    keys: &BTreeSet<KeyId>,
    secrets: &BTreeSet<SecretId>,
    component_declared: impl Fn(&ComponentId) -> bool,
) -> Result<()> {
    let mut missing = None;
    item.visit_names(&mut |name| {
        if missing.is_some() {
            return;
        }
        missing = match name {
            NameRef::Key(k) if !keys.contains(k) => Some(Error::UnknownKey(k.clone())),
            NameRef::Secret(s) if !secrets.contains(s) => Some(Error::UnknownSecret(s.clone())),
            NameRef::Component(c) if !component_declared(c) => {
                Some(Error::UnknownComponent(c.clone()))
            }
            _ => None,
        };
    });
    missing.map_or(Ok(()), Err)
}
