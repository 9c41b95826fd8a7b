//! Local secrets: atoms a component does not own but which travel over its
//! local channels, accumulated up the subcomponent hierarchy.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::Serialize;

use crate::error::Result;
use crate::model::{Architecture, ChannelId, ComponentId, KsAtom};

/// Why an atom is a local secret.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(tag = "via", content = "name", rename_all = "snake_case")]
pub enum Provenance {
    LocalChannel(ChannelId),
    Subcomponent(ComponentId),
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Provenance::LocalChannel(ch) => write!(f, "local channel {ch}"),
            Provenance::Subcomponent(c) => write!(f, "subcomponent {c}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LocalSecretSet {
    pub component: ComponentId,
    /// Each atom with every witness for its membership.
    pub atoms: BTreeMap<KsAtom, BTreeSet<Provenance>>,
}

impl LocalSecretSet {
    pub fn contains(&self, atom: &KsAtom) -> bool {
        self.atoms.contains_key(atom)
    }

    pub fn atom_set(&self) -> BTreeSet<KsAtom> {
        self.atoms.keys().cloned().collect()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }
}

impl fmt::Display for LocalSecretSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "local secrets of {}:", self.component)?;
        if self.atoms.is_empty() {
            return write!(f, " none");
        }
        for (atom, provenance) in &self.atoms {
            let via: Vec<String> = provenance.iter().map(ToString::to_string).collect();
            write!(f, "\n  {atom}  ({})", via.join("; "))?;
        }
        Ok(())
    }
}

/// Atoms contributed directly by `c`'s local channels.
fn own_contribution(
    arch: &Architecture,
    c: &ComponentId,
) -> Result<BTreeMap<KsAtom, BTreeSet<Provenance>>> {
    let spec = arch.component(c)?;
    let mut atoms: BTreeMap<KsAtom, BTreeSet<Provenance>> = BTreeMap::new();
    for ch in &spec.loc {
        for atom in arch.items_on(ch).filter_map(|i| i.as_atom()) {
            if !spec.owns(&atom) {
                atoms
                    .entry(atom)
                    .or_default()
                    .insert(Provenance::LocalChannel(ch.clone()));
            }
        }
    }
    Ok(atoms)
}

/// Local secrets of every component, computed bottom-up in one pass.
pub fn compute_all_local_secrets(arch: &Architecture) -> BTreeMap<ComponentId, LocalSecretSet> {
    let mut done: BTreeMap<ComponentId, LocalSecretSet> = BTreeMap::new();
    for id in arch.topological_order() {
        let spec = arch
            .component(&id)
            .expect("topological order lists declared ids");
        let mut atoms = own_contribution(arch, &id).expect("declared id");
        for sub in &spec.subcomponents {
            for atom in done[sub].atoms.keys() {
                atoms
                    .entry(atom.clone())
                    .or_default()
                    .insert(Provenance::Subcomponent(sub.clone()));
            }
        }
        done.insert(
            id.clone(),
            LocalSecretSet {
                component: id,
                atoms,
            },
        );
    }
    done
}

/// Local secrets of `c`; only the sub-hierarchy below `c` is visited.
pub fn compute_local_secrets(arch: &Architecture, c: &ComponentId) -> Result<LocalSecretSet> {
    let mut memo = BTreeMap::new();
    visit(arch, c, &mut memo)?;
    Ok(memo.remove(c).expect("visit fills the root"))
}

fn visit(
    arch: &Architecture,
    c: &ComponentId,
    memo: &mut BTreeMap<ComponentId, LocalSecretSet>,
) -> Result<()> {
    if memo.contains_key(c) {
        return Ok(());
    }
    let spec = arch.component(c)?;
    let mut atoms = own_contribution(arch, c)?;
    for sub in &spec.subcomponents {
        visit(arch, sub, memo)?;
        for atom in memo[sub].atoms.keys() {
            atoms
                .entry(atom.clone())
                .or_default()
                .insert(Provenance::Subcomponent(sub.clone()));
        }
    }
    memo.insert(
        c.clone(),
        LocalSecretSet {
            component: c.clone(),
            atoms,
        },
    );
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::fixtures::{a1, a2};

    fn c(name: &str) -> ComponentId {
        ComponentId::new(name)
    }

    #[test]
    fn fixture_examples() {
        let arch = a1();
        assert!(compute_local_secrets(&arch, &c("sComp1"))
            .unwrap()
            .is_empty());
        assert!(compute_local_secrets(&arch, &c("sComp3"))
            .unwrap()
            .is_empty());

        let ls = compute_local_secrets(&a2(), &c("sComp3")).unwrap();
        assert_eq!(ls.atom_set(), BTreeSet::from([KsAtom::secret("N")]));
        assert_eq!(
            ls.atoms[&KsAtom::secret("N")],
            BTreeSet::from([Provenance::LocalChannel(ChannelId::new("ch2"))])
        );
    }

    #[test]
    fn single_and_bulk_computation_agree() {
        for arch in [a1(), a2()] {
            let all = compute_all_local_secrets(&arch);
            for id in arch.component_ids() {
                assert_eq!(all[id], compute_local_secrets(&arch, id).unwrap());
            }
        }
    }

    #[test]
    fn inherited_atoms_record_the_subcomponent() {
        let arch = a2()
            .to_builder()
            .component(crate::model::ComponentSpec::new("Top").with_subcomponents(["sComp3"]))
            .build()
            .unwrap();
        let ls = compute_local_secrets(&arch, &c("Top")).unwrap();
        assert_eq!(
            ls.atoms[&KsAtom::secret("N")],
            BTreeSet::from([Provenance::Subcomponent(c("sComp3"))])
        );
    }

    #[test]
    fn unknown_component_is_an_error() {
        assert!(compute_local_secrets(&a1(), &c("ghost")).is_err());
    }
}
