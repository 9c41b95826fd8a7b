//! Per-architecture evaluation context: finite universes for the lemma
//! variables and cached results of every library query the lemmas use.

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::flow::{self, FlowDirection};
use crate::knowledge::{self, KnowledgeBase, Mode};
use crate::local_secrets::{compute_local_secrets, LocalSecretSet};
use crate::model::{Architecture, ChannelId, ComponentId, ExprItem, ExprSeq, KsAtom};
use crate::structural::{self, spec_keys_secrets};

/// Sizes of the sampled parts of the variable universes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
pub struct SuiteBounds {
    /// Seed for sampled channel subsets and sequences.
    pub seed: u64,
    /// Random channel subsets added to the channel-set family.
    pub sampled_sets: usize,
    /// Random sequences over the item universe, and as many over atoms.
    pub sequences: usize,
    /// Longest sampled sequence.
    pub max_sequence_len: usize,
}

impl Default for SuiteBounds {
    fn default() -> Self {
        Self {
            seed: 0,
            sampled_sets: 4,
            sequences: 16,
            max_sequence_len: 3,
        }
    }
}

/// Literal structural predicates of one component.
#[derive(Clone, Copy, Debug, Default)]
pub struct Flags {
    pub in_out_loc: bool,
    pub comp_in: bool,
    pub comp_out: bool,
    pub comp_loc: bool,
    pub keys: bool,
    pub secrets: bool,
    pub ks: bool,
}

/// A composite with its two subcomponents in one order; `p == q` when the
/// composite has a single subcomponent.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Triple {
    pub pq: usize,
    pub p: usize,
    pub q: usize,
}

pub struct Ctx<'a> {
    pub arch: &'a Architecture,
    pub comps: Vec<ComponentId>,
    pub chans: Vec<ChannelId>,
    /// Items carried by some channel, then every atom item.
    pub items: Vec<ExprItem>,
    pub atoms: Vec<KsAtom>,
    /// Index into `items` of each atom's item.
    pub atom_item: Vec<usize>,
    /// Channel subsets that `M` and `ChSet` variables range over.
    pub family: Vec<BTreeSet<ChannelId>>,
    pub family_index: BTreeMap<BTreeSet<ChannelId>, usize>,
    pub singleton: Vec<usize>,
    pub empty_set: usize,
    pub triples: Vec<Triple>,
    pub seqs: Vec<ExprSeq>,
    /// Sequences made of atom items only.
    pub atom_seqs: Vec<ExprSeq>,

    pub subs: Vec<Vec<usize>>,
    pub ins: Vec<Vec<bool>>,
    pub out: Vec<Vec<bool>>,
    pub loc: Vec<Vec<bool>>,
    pub carries: Vec<Vec<bool>>,
    pub flags: Vec<Flags>,
    pub owned: Vec<BTreeSet<KsAtom>>,
    pub local: Vec<LocalSecretSet>,

    ine: Vec<bool>,
    eout: Vec<bool>,
    ine_m: Vec<bool>,
    eout_m: Vec<bool>,
    single_in: Vec<bool>,
    single_out: Vec<bool>,
    set_in: Vec<bool>,
    set_out: Vec<bool>,
    know: Vec<bool>,
    eout_know: Vec<bool>,
    pub kbs: Vec<KnowledgeBase>,
    knows1: Vec<bool>,
    eout_knows: Vec<bool>,
}

impl<'a> Ctx<'a> {
    pub fn new(arch: &'a Architecture, bounds: &SuiteBounds) -> Self {
        Self::with_extra_sets(arch, bounds, &[])
    }

    /// As [`Ctx::new`], with `extra` added to the channel-set family.
    pub fn with_extra_sets(
        arch: &'a Architecture,
        bounds: &SuiteBounds,
        extra: &[BTreeSet<ChannelId>],
    ) -> Self {
        let comps: Vec<ComponentId> = arch.component_ids().cloned().collect();
        let comp_index: BTreeMap<&ComponentId, usize> =
            comps.iter().enumerate().map(|(i, c)| (c, i)).collect();
        let chans: Vec<ChannelId> = arch.channels().iter().cloned().collect();
        let atoms: Vec<KsAtom> = arch.atoms().collect();

        let mut item_set: BTreeSet<ExprItem> =
            arch.expr_channel().iter().map(|(_, i)| i.clone()).collect();
        let mut items: Vec<ExprItem> = item_set.iter().cloned().collect();
        for atom in &atoms {
            if item_set.insert(atom.to_item()) {
                items.push(atom.to_item());
            }
        }
        let item_index: BTreeMap<&ExprItem, usize> =
            items.iter().enumerate().map(|(i, e)| (e, i)).collect();
        let atom_item = atoms.iter().map(|a| item_index[&a.to_item()]).collect();

        let specs: Vec<_> = comps
            .iter()
            .map(|c| arch.component(c).expect("declared"))
            .collect();
        let member = |set: &BTreeSet<ChannelId>| {
            chans
                .iter()
                .map(|ch| set.contains(ch))
                .collect::<Vec<bool>>()
        };
        let ins: Vec<Vec<bool>> = specs.iter().map(|s| member(&s.ins)).collect();
        let out: Vec<Vec<bool>> = specs.iter().map(|s| member(&s.out)).collect();
        let loc: Vec<Vec<bool>> = specs.iter().map(|s| member(&s.loc)).collect();
        let subs: Vec<Vec<usize>> = specs
            .iter()
            .map(|s| s.subcomponents.iter().map(|x| comp_index[x]).collect())
            .collect();
        let carries = chans
            .iter()
            .map(|ch| items.iter().map(|e| arch.carries(ch, e)).collect())
            .collect();

        let mut rng = ChaCha8Rng::seed_from_u64(bounds.seed);

        let mut family: BTreeSet<BTreeSet<ChannelId>> = BTreeSet::new();
        family.insert(BTreeSet::new());
        family.insert(arch.channels().clone());
        for ch in &chans {
            family.insert(BTreeSet::from([ch.clone()]));
        }
        for s in &specs {
            for side in [&s.ins, &s.out, &s.loc] {
                family.insert(side.clone());
            }
        }
        for c in &comps {
            for e in &items {
                for dir in [FlowDirection::In, FlowDirection::Out] {
                    family.insert(flow::carrying_channels(arch, c, dir, e).expect("declared"));
                }
            }
        }
        for _ in 0..bounds.sampled_sets {
            family.insert(
                chans
                    .iter()
                    .filter(|_| rng.gen_bool(0.5))
                    .cloned()
                    .collect(),
            );
        }
        family.extend(extra.iter().cloned());
        let family: Vec<BTreeSet<ChannelId>> = family.into_iter().collect();
        let family_index: BTreeMap<BTreeSet<ChannelId>, usize> = family
            .iter()
            .cloned()
            .enumerate()
            .map(|(i, s)| (s, i))
            .collect();
        let singleton = chans
            .iter()
            .map(|ch| family_index[&BTreeSet::from([ch.clone()])])
            .collect();
        let empty_set = family_index[&BTreeSet::new()];

        let mut triples = Vec::new();
        for (pq, s) in subs.iter().enumerate() {
            match s.as_slice() {
                [only] => triples.push(Triple {
                    pq,
                    p: *only,
                    q: *only,
                }),
                [a, b] => {
                    triples.push(Triple { pq, p: *a, q: *b });
                    triples.push(Triple { pq, p: *b, q: *a });
                }
                _ => {}
            }
        }

        let mut seqs = vec![ExprSeq::new()];
        let mut atom_seqs = Vec::new();
        let atom_items: Vec<ExprItem> = atoms.iter().map(KsAtom::to_item).collect();
        for _ in 0..bounds.sequences {
            if !items.is_empty() {
                let len = rng.gen_range(1..=bounds.max_sequence_len.max(1));
                seqs.push(
                    (0..len)
                        .map(|_| items.choose(&mut rng).expect("non-empty").clone())
                        .collect(),
                );
            }
            if !atom_items.is_empty() {
                let len = rng.gen_range(1..=bounds.max_sequence_len.max(1));
                atom_seqs.push(
                    (0..len)
                        .map(|_| atom_items.choose(&mut rng).expect("non-empty").clone())
                        .collect(),
                );
            }
        }

        let flags = comps
            .iter()
            .map(|c| {
                let ks = structural::check_composition_keys_secrets(arch, c).expect("declared");
                Flags {
                    in_out_loc: structural::check_in_out_loc(arch, c)
                        .expect("declared")
                        .passed(),
                    comp_in: structural::check_composition_in(arch, c)
                        .expect("declared")
                        .passed(),
                    comp_out: structural::check_composition_out(arch, c)
                        .expect("declared")
                        .passed(),
                    comp_loc: structural::check_composition_loc(arch, c)
                        .expect("declared")
                        .passed(),
                    keys: ks.keys_ok,
                    secrets: ks.secrets_ok,
                    ks: ks.ks_ok,
                }
            })
            .collect();
        let owned = comps
            .iter()
            .map(|c| spec_keys_secrets(arch, c).expect("declared"))
            .collect();
        let local: Vec<LocalSecretSet> = comps
            .iter()
            .map(|c| compute_local_secrets(arch, c).expect("declared"))
            .collect();

        let mut ctx = Ctx {
            arch,
            comps,
            chans,
            items,
            atoms,
            atom_item,
            family,
            family_index,
            singleton,
            empty_set,
            triples,
            seqs,
            atom_seqs,
            subs,
            ins,
            out,
            loc,
            carries,
            flags,
            owned,
            local,
            ine: Vec::new(),
            eout: Vec::new(),
            ine_m: Vec::new(),
            eout_m: Vec::new(),
            single_in: Vec::new(),
            single_out: Vec::new(),
            set_in: Vec::new(),
            set_out: Vec::new(),
            know: Vec::new(),
            eout_know: Vec::new(),
            kbs: Vec::new(),
            knows1: Vec::new(),
            eout_knows: Vec::new(),
        };
        ctx.fill_caches();
        ctx
    }

    fn fill_caches(&mut self) {
        let arch = self.arch;
        for c in &self.comps {
            for dir in [FlowDirection::In, FlowDirection::Out] {
                for e in &self.items {
                    let v = flow::query_flow(arch, c, dir, e, None).expect("declared");
                    match dir {
                        FlowDirection::In => self.ine.push(v),
                        FlowDirection::Out => self.eout.push(v),
                    }
                }
                for m in &self.family {
                    for e in &self.items {
                        let restricted =
                            flow::query_flow(arch, c, dir, e, Some(m)).expect("declared");
                        let exact = flow::expr_channel_set(arch, c, dir, m, e).expect("declared");
                        match dir {
                            FlowDirection::In => {
                                self.ine_m.push(restricted);
                                self.set_in.push(exact);
                            }
                            FlowDirection::Out => {
                                self.eout_m.push(restricted);
                                self.set_out.push(exact);
                            }
                        }
                    }
                }
                for ch in &self.chans {
                    for e in &self.items {
                        let v = flow::expr_channel_single(arch, c, dir, ch, e).expect("declared");
                        match dir {
                            FlowDirection::In => self.single_in.push(v),
                            FlowDirection::Out => self.single_out.push(v),
                        }
                    }
                }
            }
            for a in &self.atoms {
                self.know
                    .push(knowledge::know_atom(arch, c, a).expect("declared"));
                self.eout_know
                    .push(knowledge::check_eout_know_correct(arch, c, a).expect("declared"));
            }
        }
        for (ci, c) in self.comps.iter().enumerate() {
            let kb = KnowledgeBase::build_with(arch, c, Mode::Strict, &self.local[ci])
                .expect("declared");
            for e in &self.items {
                self.knows1
                    .push(kb.knows(std::slice::from_ref(e)).derivable);
                self.eout_knows
                    .push(knowledge::eout_knows_e_correct_with(arch, &kb, e).expect("declared"));
            }
            self.kbs.push(kb);
        }
    }

    fn ce(&self, c: usize, e: usize) -> usize {
        c * self.items.len() + e
    }

    fn cme(&self, c: usize, m: usize, e: usize) -> usize {
        (c * self.family.len() + m) * self.items.len() + e
    }

    fn cche(&self, c: usize, ch: usize, e: usize) -> usize {
        (c * self.chans.len() + ch) * self.items.len() + e
    }

    fn ca(&self, c: usize, a: usize) -> usize {
        c * self.atoms.len() + a
    }

    pub fn ine(&self, c: usize, e: usize) -> bool {
        self.ine[self.ce(c, e)]
    }

    pub fn eout(&self, c: usize, e: usize) -> bool {
        self.eout[self.ce(c, e)]
    }

    pub fn ine_m(&self, c: usize, m: usize, e: usize) -> bool {
        self.ine_m[self.cme(c, m, e)]
    }

    pub fn eout_m(&self, c: usize, m: usize, e: usize) -> bool {
        self.eout_m[self.cme(c, m, e)]
    }

    pub fn flow_m(&self, dir: FlowDirection, c: usize, m: usize, e: usize) -> bool {
        match dir {
            FlowDirection::In => self.ine_m(c, m, e),
            FlowDirection::Out => self.eout_m(c, m, e),
        }
    }

    pub fn flow(&self, dir: FlowDirection, c: usize, e: usize) -> bool {
        match dir {
            FlowDirection::In => self.ine(c, e),
            FlowDirection::Out => self.eout(c, e),
        }
    }

    pub fn single(&self, dir: FlowDirection, c: usize, ch: usize, e: usize) -> bool {
        let i = self.cche(c, ch, e);
        match dir {
            FlowDirection::In => self.single_in[i],
            FlowDirection::Out => self.single_out[i],
        }
    }

    pub fn set(&self, dir: FlowDirection, c: usize, m: usize, e: usize) -> bool {
        let i = self.cme(c, m, e);
        match dir {
            FlowDirection::In => self.set_in[i],
            FlowDirection::Out => self.set_out[i],
        }
    }

    pub fn side(&self, dir: FlowDirection, c: usize) -> &[bool] {
        match dir {
            FlowDirection::In => &self.ins[c],
            FlowDirection::Out => &self.out[c],
        }
    }

    pub fn know(&self, c: usize, a: usize) -> bool {
        self.know[self.ca(c, a)]
    }

    pub fn eout_know_correct(&self, c: usize, a: usize) -> bool {
        self.eout_know[self.ca(c, a)]
    }

    /// `knows c [items[e]]` in strict mode.
    pub fn knows1(&self, c: usize, e: usize) -> bool {
        self.knows1[self.ce(c, e)]
    }

    pub fn eout_knows_e_correct(&self, c: usize, e: usize) -> bool {
        self.eout_knows[self.ce(c, e)]
    }

    pub fn knows(&self, c: usize, seq: &[ExprItem]) -> bool {
        self.kbs[c].knows(seq).derivable
    }

    /// The atom's item is in `c`'s closure only through analysis, so
    /// sequence-level and atom-level knowledge may disagree on it.
    pub fn analysis_only(&self, c: usize, item: &ExprItem) -> bool {
        let kb = &self.kbs[c];
        kb.closure_items.contains(item) && !kb.base_items.contains(item)
    }

    /// Sequence-level and atom-level knowledge of atom `a` agree at every
    /// component in `cs`.
    pub fn atom_agrees(&self, a: usize, cs: &[usize]) -> bool {
        let item = &self.items[self.atom_item[a]];
        cs.iter().all(|&c| !self.analysis_only(c, item))
    }

    pub fn owns(&self, c: usize, a: usize) -> bool {
        self.owned[c].contains(&self.atoms[a])
    }

    pub fn local_secret(&self, c: usize, a: usize) -> bool {
        self.local[c].contains(&self.atoms[a])
    }

    pub fn loc_empty(&self, c: usize) -> bool {
        !self.loc[c].iter().any(|&b| b)
    }

    pub fn set_within(&self, m: usize, side: &[bool]) -> bool {
        self.family[m].iter().all(|ch| side[self.chan_index(ch)])
    }

    pub fn chan_index(&self, ch: &ChannelId) -> usize {
        self.chans
            .binary_search(ch)
            .expect("family members are declared channels")
    }

    pub fn in_set(&self, m: usize, ch: usize) -> bool {
        self.family[m].contains(&self.chans[ch])
    }

    pub fn atom_is_key(&self, a: usize) -> bool {
        matches!(self.atoms[a], KsAtom::Key(_))
    }

    pub fn comp_name(&self, c: usize) -> String {
        self.comps[c].to_string()
    }

    pub fn set_name(&self, m: usize) -> String {
        set_text(&self.family[m])
    }
}

pub fn set_text(set: &BTreeSet<ChannelId>) -> String {
    let names: Vec<&str> = set.iter().map(ChannelId::as_str).collect();
    format!("{{{}}}", names.join(", "))
}

/// Inverse of [`set_text`].
pub fn parse_set_text(text: &str) -> Option<BTreeSet<ChannelId>> {
    let inner = text.trim().strip_prefix('{')?.strip_suffix('}')?.trim();
    if inner.is_empty() {
        return Some(BTreeSet::new());
    }
    Some(inner.split(',').map(|s| ChannelId::new(s.trim())).collect())
}
