//! Random architectures whose composites satisfy the composition equations
//! by construction.

use std::collections::BTreeSet;

use num_bigint::BigUint;
use rand::seq::{IteratorRandom, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::model::{Architecture, ChannelId, ComponentSpec, ExprItem, ExprSeq, KeyId};

/// Generator bounds. Every bound is at least 1.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct GenParams {
    pub seed: u64,
    /// Exact number of components generated.
    pub max_components: usize,
    pub max_channels: usize,
    pub max_keys: usize,
    pub max_secrets: usize,
    /// Most items carried by one channel, and most items in one block.
    pub max_expr_items: usize,
    pub max_block_depth: usize,
}

impl Default for GenParams {
    fn default() -> Self {
        Self {
            seed: 0,
            max_components: 7,
            max_channels: 6,
            max_keys: 4,
            max_secrets: 3,
            max_expr_items: 3,
            max_block_depth: 2,
        }
    }
}

impl GenParams {
    pub fn with_seed(self, seed: u64) -> Self {
        Self { seed, ..self }
    }

    fn clamped(self) -> Self {
        Self {
            seed: self.seed,
            max_components: self.max_components.max(1),
            max_channels: self.max_channels.max(1),
            max_keys: self.max_keys.max(1),
            max_secrets: self.max_secrets.max(1),
            max_expr_items: self.max_expr_items.max(1),
            max_block_depth: self.max_block_depth.max(1),
        }
    }
}

struct Names {
    keys: Vec<String>,
    secrets: Vec<String>,
    channels: Vec<String>,
    components: Vec<String>,
}

/// Builds leaves with disjoint random interfaces and composes roots
/// bottom-up, deriving each composite's channels and owned atoms from its
/// subcomponents.
pub fn generate_architecture(params: GenParams) -> Architecture {
    let p = params.clamped();
    let mut rng = ChaCha8Rng::seed_from_u64(p.seed);
    let names = Names {
        keys: (0..rng.gen_range(1..=p.max_keys))
            .map(|i| format!("k{i}"))
            .collect(),
        secrets: (0..rng.gen_range(1..=p.max_secrets))
            .map(|i| format!("s{i}"))
            .collect(),
        channels: (0..rng.gen_range(1..=p.max_channels))
            .map(|i| format!("ch{i}"))
            .collect(),
        components: (0..p.max_components).map(|i| format!("c{i}")).collect(),
    };

    let mut specs: Vec<ComponentSpec> = Vec::new();
    let mut roots: Vec<usize> = Vec::new();
    for (made, name) in names.components.iter().enumerate() {
        let remaining = p.max_components - made;
        let compose = roots.len() >= 2 && (remaining == 1 || rng.gen_bool(0.5));
        let spec = if compose {
            let arity = if roots.len() >= 3 && rng.gen_bool(0.15) {
                3
            } else if remaining > 1 && rng.gen_bool(0.1) {
                1
            } else {
                2
            };
            roots.shuffle(&mut rng);
            let picked: Vec<usize> = roots.drain(..arity).collect();
            composite(name, picked.iter().map(|&i| &specs[i]))
        } else {
            leaf(name, &names, &mut rng)
        };
        roots.push(specs.len());
        specs.push(spec);
    }

    let mut b = Architecture::builder()
        .keys(&names.keys)
        .secrets(&names.secrets)
        .channels(&names.channels);
    for k1 in &names.keys {
        for k2 in &names.keys {
            if rng.gen_bool(0.3) {
                b = b.pair(KeyId::new(k1), KeyId::new(k2));
            }
        }
    }
    for spec in specs {
        b = b.component(spec);
    }
    for ch in &names.channels {
        for _ in 0..rng.gen_range(0..=p.max_expr_items) {
            b = b.fact(
                ChannelId::new(ch),
                random_item(&names, &p, p.max_block_depth, &mut rng),
            );
        }
    }
    b.build().expect("generated architectures are valid")
}

fn leaf(name: &str, names: &Names, rng: &mut ChaCha8Rng) -> ComponentSpec {
    let mut ins = Vec::new();
    let mut out = Vec::new();
    for ch in &names.channels {
        match rng.gen_range(0..4) {
            0 => ins.push(ch),
            1 => out.push(ch),
            _ => {}
        }
    }
    let keys: Vec<&String> = names.keys.iter().filter(|_| rng.gen_bool(0.25)).collect();
    let secrets: Vec<&String> = names
        .secrets
        .iter()
        .filter(|_| rng.gen_bool(0.25))
        .collect();
    ComponentSpec::new(name)
        .with_ins(ins)
        .with_out(out)
        .with_keys(keys)
        .with_secrets(secrets)
}

fn composite<'a>(
    name: &str,
    subs: impl Iterator<Item = &'a ComponentSpec> + Clone,
) -> ComponentSpec {
    let all_ins: BTreeSet<&ChannelId> = subs.clone().flat_map(|s| &s.ins).collect();
    let all_out: BTreeSet<&ChannelId> = subs.clone().flat_map(|s| &s.out).collect();
    let mut spec = ComponentSpec::new(name)
        .with_subcomponents(subs.clone().map(|s| s.id.as_str().to_owned()))
        .with_ins(all_ins.difference(&all_out).map(|c| c.as_str()))
        .with_loc(all_ins.intersection(&all_out).map(|c| c.as_str()))
        .with_out(all_out.difference(&all_ins).map(|c| c.as_str()));
    spec.keys = subs.clone().flat_map(|s| s.keys.iter().cloned()).collect();
    spec.secrets = subs.flat_map(|s| s.secrets.iter().cloned()).collect();
    spec
}

fn random_item(names: &Names, p: &GenParams, depth: usize, rng: &mut ChaCha8Rng) -> ExprItem {
    let choice = rng.gen_range(0..if depth > 0 { 8 } else { 6 });
    match choice {
        0 | 1 => ExprItem::key(names.keys.choose(rng).expect("nonempty")),
        2 | 3 => ExprItem::secret(names.secrets.choose(rng).expect("nonempty")),
        4 => ExprItem::Data(BigUint::from(rng.gen_range(0u32..4))),
        5 => ExprItem::id(names.components.choose(rng).expect("nonempty")),
        _ => {
            let key = names.keys.choose(rng).expect("nonempty");
            let len = rng.gen_range(1..=p.max_expr_items);
            let payload: ExprSeq = (0..len)
                .map(|_| random_item(names, p, depth - 1, rng))
                .collect();
            if choice == 6 {
                ExprItem::enc(key, payload)
            } else {
                ExprItem::sign(key, payload)
            }
        }
    }
}

/// Breaks one composition or interface equation of `arch` at random and
/// describes the edit. Returns `arch` unchanged when no edit applies.
pub fn perturb_architecture(arch: &Architecture, seed: u64) -> (Architecture, String) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let composites: Vec<&ComponentSpec> =
        arch.components().filter(|c| !c.is_elementary()).collect();
    let channels: Vec<&ChannelId> = arch.channels().iter().collect();
    let Some(&target) = composites.choose(&mut rng) else {
        return perturb_leaf(arch, &mut rng);
    };
    let id = target.id.as_str().to_owned();
    let ch = channels.choose(&mut rng).map(|c| (*c).clone());
    let mut edited = target.clone();
    let description = match (rng.gen_range(0..4), ch) {
        (0, Some(ch)) if !edited.ins.contains(&ch) => {
            edited.ins.insert(ch.clone());
            format!("added {ch} to ins of {id}")
        }
        (1, Some(ch)) if !edited.loc.contains(&ch) => {
            edited.loc.insert(ch.clone());
            format!("added {ch} to loc of {id}")
        }
        (2, Some(ch)) if !edited.out.contains(&ch) => {
            edited.out.insert(ch.clone());
            format!("added {ch} to out of {id}")
        }
        _ => {
            let extra = arch
                .keys()
                .iter()
                .find(|k| !edited.keys.contains(*k))
                .cloned();
            match extra {
                Some(k) => {
                    edited.keys.insert(k.clone());
                    format!("added key {k} to {id}")
                }
                None => {
                    let k = edited
                        .keys
                        .iter()
                        .next()
                        .cloned()
                        .expect("composite owns every key");
                    edited.keys.remove(&k);
                    format!("removed key {k} from {id}")
                }
            }
        }
    };
    let arch = arch
        .to_builder()
        .replace_component(edited)
        .build()
        .expect("edit keeps names declared");
    (arch, description)
}

fn perturb_leaf(arch: &Architecture, rng: &mut ChaCha8Rng) -> (Architecture, String) {
    let (Some(leaf), Some(ch)) = (
        arch.components().choose(rng),
        arch.channels().iter().choose(rng),
    ) else {
        return (arch.clone(), "no edit applies".to_owned());
    };
    let mut edited = leaf.clone();
    edited.ins.insert(ch.clone());
    edited.out.insert(ch.clone());
    let description = format!("put {ch} on both ins and out of {}", leaf.id);
    (
        arch.to_builder()
            .replace_component(edited)
            .build()
            .expect("edit keeps names declared"),
        description,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::structural::{check_component_secrecy, structural_report, LeafPolicy};

    #[test]
    fn three_components_give_two_leaves_and_a_composite() {
        for seed in 0..20 {
            let arch = generate_architecture(
                GenParams {
                    max_components: 3,
                    ..GenParams::default()
                }
                .with_seed(seed),
            );
            let composites: Vec<_> = arch.components().filter(|c| !c.is_elementary()).collect();
            assert_eq!(arch.components().count(), 3);
            assert_eq!(composites.len(), 1);
            assert_eq!(composites[0].subcomponents.len(), 2);
            let v = check_component_secrecy(&arch, &composites[0].id, LeafPolicy::Lenient).unwrap();
            assert!(v.failed.is_empty(), "{:?}", v.failed);
        }
    }

    #[test]
    fn one_component_is_elementary() {
        let arch = generate_architecture(GenParams {
            max_components: 1,
            ..GenParams::default()
        });
        assert_eq!(arch.components().count(), 1);
        assert!(arch
            .components()
            .all(|c| c.is_elementary() && c.loc.is_empty()));
    }

    #[test]
    fn generation_is_deterministic_and_correct() {
        for seed in 0..50 {
            let params = GenParams::default().with_seed(seed);
            let arch = generate_architecture(params);
            assert_eq!(arch, generate_architecture(params));
            assert!(
                structural_report(&arch, LeafPolicy::Lenient).passed(),
                "seed {seed}"
            );
        }
    }

    #[test]
    fn perturbation_breaks_a_check() {
        for seed in 0..50 {
            let arch = generate_architecture(GenParams::default().with_seed(seed));
            let (broken, what) = perturb_architecture(&arch, seed);
            assert!(
                !structural_report(&broken, LeafPolicy::Lenient).passed(),
                "seed {seed}: {what}"
            );
        }
    }
}
