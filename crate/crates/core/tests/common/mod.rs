//! Shared helpers: fixture paths, random knowledge-base architectures and a
//! brute-force deduction oracle written directly from the knowledge axioms.

#![allow(dead_code)]

use std::collections::BTreeSet;
use std::path::PathBuf;

use compsec::knowledge::Mode;
use compsec::model::{
    Architecture, ChannelId, ComponentId, ComponentSpec, ExprItem, ExprSeq, KeyId, KsAtom,
};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn a1_path() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures/a1.arch")
}

/// Local secrets by their definition: unowned atoms on local channels,
/// plus those of every subcomponent.
pub fn oracle_local_secrets(arch: &Architecture, c: &ComponentId) -> BTreeSet<KsAtom> {
    let spec = arch.component(c).unwrap();
    let mut out: BTreeSet<KsAtom> = arch
        .expr_channel()
        .iter()
        .filter(|(ch, _)| spec.loc.contains(ch))
        .filter_map(|(_, item)| item.as_atom())
        .filter(|a| !spec.owns(a))
        .collect();
    for sub in &spec.subcomponents {
        out.extend(oracle_local_secrets(arch, sub));
    }
    out
}

/// Items known to a component, closed under the deduction axioms over a
/// bounded term universe.
pub struct Oracle {
    pub base: BTreeSet<ExprItem>,
    pub known: BTreeSet<ExprItem>,
}

fn all_subterms(item: &ExprItem, into: &mut BTreeSet<ExprItem>) {
    if into.insert(item.clone()) {
        if let ExprItem::Enc { payload, .. } | ExprItem::Sign { payload, .. } = item {
            for i in payload.iter() {
                all_subterms(i, into);
            }
        }
    }
}

impl Oracle {
    /// `extra` widens the universe so that blocks of query terms can be
    /// synthesised.
    pub fn new(arch: &Architecture, c: &ComponentId, mode: Mode, extra: &[ExprItem]) -> Self {
        let spec = arch.component(c).unwrap();
        let mut base: BTreeSet<ExprItem> = arch
            .expr_channel()
            .iter()
            .filter(|(ch, _)| spec.ins.contains(ch))
            .map(|(_, i)| i.clone())
            .collect();
        base.extend(oracle_local_secrets(arch, c).iter().map(KsAtom::to_item));

        let mut universe = BTreeSet::new();
        for i in base.iter().chain(extra) {
            all_subterms(i, &mut universe);
        }
        let blocks: Vec<ExprItem> = universe.iter().filter(|i| i.is_block()).cloned().collect();

        let pairing = arch.pairing();
        let mut known = base.clone();
        loop {
            let avail = |k: &KeyId, known: &BTreeSet<ExprItem>| {
                let item = ExprItem::Key(k.clone());
                match mode {
                    Mode::Strict => base.contains(&item),
                    Mode::Saturating => known.contains(&item),
                }
            };
            let mut next = known.clone();
            for item in &known {
                match item {
                    // knows4: decryption with a paired, available key
                    ExprItem::Enc { key, payload }
                        if pairing.pairs().any(|(e, d)| e == key && avail(d, &known)) =>
                    {
                        next.extend(payload.iter().cloned());
                    }
                    // knows5: signature extraction with the paired key
                    ExprItem::Sign { key, payload }
                        if pairing.pairs().any(|(e, d)| d == key && avail(e, &known)) =>
                    {
                        next.extend(payload.iter().cloned());
                    }
                    _ => {}
                }
            }
            // knows6 / knows7: building blocks of the universe
            for b in &blocks {
                if let ExprItem::Enc { key, payload } | ExprItem::Sign { key, payload } = b {
                    if avail(key, &known) && payload.iter().all(|i| known.contains(i)) {
                        next.insert(b.clone());
                    }
                }
            }
            if next == known {
                break;
            }
            known = next;
        }
        Oracle { base, known }
    }

    /// knows2a/2b/3: a sequence is known iff every item is.
    pub fn knows(&self, seq: &[ExprItem]) -> bool {
        seq.iter().all(|i| self.known.contains(i))
    }
}

/// A random item over `keys` and `secrets` with blocks up to `depth`.
pub fn random_item(
    rng: &mut ChaCha8Rng,
    keys: &[String],
    secrets: &[String],
    depth: usize,
) -> ExprItem {
    let atom = |rng: &mut ChaCha8Rng| {
        if secrets.is_empty() || rng.gen_bool(0.5) {
            ExprItem::key(keys.choose(rng).unwrap())
        } else {
            ExprItem::secret(secrets.choose(rng).unwrap())
        }
    };
    if depth == 0 || rng.gen_bool(0.4) {
        return if rng.gen_bool(0.15) {
            ExprItem::data(rng.gen_range(0..3))
        } else {
            atom(rng)
        };
    }
    let key = keys.choose(rng).unwrap();
    let len = rng.gen_range(1..=3);
    let payload: ExprSeq = (0..len)
        .map(|_| random_item(rng, keys, secrets, depth - 1))
        .collect();
    if rng.gen_bool(0.5) {
        ExprItem::enc(key, payload)
    } else {
        ExprItem::sign(key, payload)
    }
}

pub fn random_block(
    rng: &mut ChaCha8Rng,
    keys: &[String],
    secrets: &[String],
    depth: usize,
) -> ExprItem {
    loop {
        let item = random_item(rng, keys, secrets, depth);
        if item.is_block() {
            return item;
        }
    }
}

/// A knowledge-base architecture with at most 6 atoms and 4 blocks of
/// depth at most 3: leaves `C` and `D` joined by the local channel `mid`
/// inside the composite `W`.
pub fn random_kb_architecture(seed: u64) -> Architecture {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let nk = rng.gen_range(1..=4);
    let ns = rng.gen_range(0..=6 - nk);
    let keys: Vec<String> = (0..nk).map(|i| format!("k{i}")).collect();
    let secrets: Vec<String> = (0..ns).map(|i| format!("s{i}")).collect();
    let mut b = Architecture::builder()
        .keys(&keys)
        .secrets(&secrets)
        .channels(["in0", "in1", "mid"]);
    for k1 in &keys {
        for k2 in &keys {
            if rng.gen_bool(0.35) {
                b = b.pair(KeyId::new(k1), KeyId::new(k2));
            }
        }
    }
    let owned = |rng: &mut ChaCha8Rng| {
        let ks: Vec<&String> = keys.iter().filter(|_| rng.gen_bool(0.2)).collect();
        let ss: Vec<&String> = secrets.iter().filter(|_| rng.gen_bool(0.2)).collect();
        (ks, ss)
    };
    let (ck, cs) = owned(&mut rng);
    let (dk, ds) = owned(&mut rng);
    let wk: BTreeSet<&String> = ck.iter().chain(&dk).copied().collect();
    let ws: BTreeSet<&String> = cs.iter().chain(&ds).copied().collect();
    b = b
        .component(
            ComponentSpec::new("C")
                .with_ins(["in0", "mid"])
                .with_keys(ck)
                .with_secrets(cs),
        )
        .component(
            ComponentSpec::new("D")
                .with_ins(["in1"])
                .with_out(["mid"])
                .with_keys(dk)
                .with_secrets(ds),
        )
        .component(
            ComponentSpec::new("W")
                .with_subcomponents(["C", "D"])
                .with_ins(["in0", "in1"])
                .with_loc(["mid"])
                .with_keys(wk)
                .with_secrets(ws),
        );
    let channels = ["in0", "in1", "mid"];
    for _ in 0..rng.gen_range(0..=4) {
        let depth = rng.gen_range(1..=3);
        let block = random_block(&mut rng, &keys, &secrets, depth);
        b = b.fact(ChannelId::new(channels.choose(&mut rng).unwrap()), block);
    }
    for _ in 0..rng.gen_range(0..=4) {
        let atom = random_item(&mut rng, &keys, &secrets, 0);
        b = b.fact(ChannelId::new(channels.choose(&mut rng).unwrap()), atom);
    }
    b.build().unwrap()
}

pub fn names(arch: &Architecture) -> (Vec<String>, Vec<String>) {
    (
        arch.keys().iter().map(|k| k.to_string()).collect(),
        arch.secrets().iter().map(|s| s.to_string()).collect(),
    )
}

/// Every subterm of the architecture's facts, every atom item, and blocks
/// built from them.
pub fn queryable_items(arch: &Architecture, rng: &mut ChaCha8Rng) -> Vec<ExprItem> {
    let mut set = BTreeSet::new();
    for (_, i) in arch.expr_channel() {
        all_subterms(i, &mut set);
    }
    set.extend(arch.atoms().map(|a| a.to_item()));
    let pool: Vec<ExprItem> = set.iter().cloned().collect();
    for key in arch.keys() {
        for _ in 0..2 {
            let len = rng.gen_range(1..=2);
            let payload: ExprSeq = (0..len)
                .map(|_| pool.choose(rng).unwrap().clone())
                .collect();
            set.insert(ExprItem::enc(key.as_str(), payload.clone()));
            set.insert(ExprItem::sign(key.as_str(), payload));
        }
    }
    set.into_iter().collect()
}

pub fn random_seq(rng: &mut ChaCha8Rng, pool: &[ExprItem], max_len: usize) -> ExprSeq {
    let len = rng.gen_range(0..=max_len);
    (0..len)
        .map(|_| pool.choose(rng).unwrap().clone())
        .collect()
}

/// Compares the library against the oracle on one architecture, returning
/// the first disagreement.
pub fn compare_with_oracle(
    arch: &Architecture,
    seed: u64,
    sequences: usize,
) -> Result<usize, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let items = queryable_items(arch, &mut rng);
    let seqs: Vec<ExprSeq> = (0..sequences)
        .map(|_| random_seq(&mut rng, &items, 4))
        .collect();
    let mut compared = 0;
    for c in arch.component_ids() {
        for mode in Mode::ALL {
            let kb = compsec::knowledge::KnowledgeBase::build(arch, c, mode).unwrap();
            let oracle = Oracle::new(arch, c, mode, &items);
            let singles = items.iter().map(|i| ExprSeq::single(i.clone()));
            for seq in singles.chain(seqs.iter().cloned()) {
                let got = kb.knows(&seq).derivable;
                let want = oracle.knows(&seq);
                if got != want {
                    return Err(format!("{c} {mode} {seq}: library {got}, oracle {want}"));
                }
                compared += 1;
            }
        }
    }
    Ok(compared)
}
