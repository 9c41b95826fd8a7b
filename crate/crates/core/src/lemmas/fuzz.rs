//! Runs the lemma suite over many generated architectures and aggregates
//! the outcome per lemma.

use std::fmt;

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::context::SuiteBounds;
use super::generator::{generate_architecture, perturb_architecture, GenParams};
use super::suite::{Group, LemmaSuite, Status, Witness};
use crate::structural::{structural_report, LeafPolicy};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct FuzzOptions {
    /// Generator bounds; `params.seed` is the master seed.
    pub params: GenParams,
    pub count: usize,
    /// Break one composition equation in every generated architecture.
    pub perturb: bool,
    pub bounds: SuiteBounds,
}

impl Default for FuzzOptions {
    fn default() -> Self {
        Self {
            params: GenParams::default(),
            count: 100,
            perturb: false,
            bounds: SuiteBounds::default(),
        }
    }
}

/// Aggregate for one lemma across all architectures.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LemmaAggregate {
    pub name: &'static str,
    pub group: Group,
    pub instances: u64,
    pub non_vacuous: u64,
    /// Architectures in which at least one instance had all hypotheses.
    pub non_vacuous_architectures: usize,
    pub violations: u64,
    pub status: Status,
    /// First violation, with the seed of the architecture it came from.
    pub witness: Option<(u64, Witness)>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FuzzReport {
    pub options: FuzzOptions,
    pub architectures: usize,
    /// Generated architectures failing a structural check, under the
    /// lenient leaf policy.
    pub structurally_invalid: usize,
    pub violations: u64,
    pub lemmas: Vec<LemmaAggregate>,
}

impl FuzzReport {
    pub fn passed(&self) -> bool {
        self.violations == 0
    }

    pub fn get(&self, name: &str) -> Option<&LemmaAggregate> {
        self.lemmas.iter().find(|l| l.name == name)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

impl fmt::Display for FuzzReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "fuzz: seed={} count={} perturb={}",
            self.options.params.seed, self.options.count, self.options.perturb
        )?;
        for l in &self.lemmas {
            writeln!(
                f,
                "{:<52} {:<8} instances={} non_vacuous={} in_architectures={}",
                l.name,
                l.status.to_string(),
                l.instances,
                l.non_vacuous,
                l.non_vacuous_architectures
            )?;
            if let Some((seed, w)) = &l.witness {
                let b: Vec<String> = w
                    .bindings
                    .iter()
                    .map(|(k, v)| format!("{k} = {v}"))
                    .collect();
                writeln!(f, "    witness (seed {seed}): {}", b.join(", "))?;
            }
        }
        let vacuous = self
            .lemmas
            .iter()
            .filter(|l| l.status == Status::Vacuous)
            .count();
        write!(
            f,
            "{} architectures ({} structurally invalid), {} lemmas, {} vacuous, {} violations",
            self.architectures,
            self.structurally_invalid,
            self.lemmas.len(),
            vacuous,
            self.violations
        )
    }
}

/// Per-architecture seeds drawn from the master seed, so that report order
/// never depends on evaluation order.
pub fn architecture_seeds(master: u64, count: usize) -> Vec<u64> {
    let mut rng = ChaCha8Rng::seed_from_u64(master);
    (0..count).map(|_| rng.next_u64()).collect()
}

pub fn fuzz(options: &FuzzOptions) -> FuzzReport {
    fuzz_with(&LemmaSuite::new(options.bounds), options)
}

/// As [`fuzz`], with a caller-supplied suite.
pub fn fuzz_with(suite: &LemmaSuite, options: &FuzzOptions) -> FuzzReport {
    let mut lemmas: Vec<LemmaAggregate> = suite
        .lemmas()
        .iter()
        .map(|l| LemmaAggregate {
            name: l.name,
            group: l.group,
            instances: 0,
            non_vacuous: 0,
            non_vacuous_architectures: 0,
            violations: 0,
            status: Status::Vacuous,
            witness: None,
        })
        .collect();
    let mut structurally_invalid = 0;
    for seed in architecture_seeds(options.params.seed, options.count) {
        let mut arch = generate_architecture(options.params.with_seed(seed));
        if options.perturb {
            arch = perturb_architecture(&arch, seed).0;
        }
        if !structural_report(&arch, LeafPolicy::Lenient).passed() {
            structurally_invalid += 1;
        }
        let report = suite.run(&arch);
        for (agg, check) in lemmas.iter_mut().zip(report.checks) {
            agg.instances += check.instances;
            agg.non_vacuous += check.non_vacuous;
            agg.non_vacuous_architectures += usize::from(check.non_vacuous > 0);
            agg.violations += check.violations;
            if agg.witness.is_none() {
                agg.witness = check.witness.map(|w| (seed, w));
            }
        }
    }
    for agg in &mut lemmas {
        agg.status = if agg.violations > 0 {
            Status::Violated
        } else if agg.non_vacuous > 0 {
            Status::Holds
        } else {
            Status::Vacuous
        };
    }
    FuzzReport {
        options: *options,
        architectures: options.count,
        structurally_invalid,
        violations: lemmas.iter().map(|l| l.violations).sum(),
        lemmas,
    }
}
