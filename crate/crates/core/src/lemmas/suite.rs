use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use super::catalog;
use super::context::{parse_set_text, Ctx, SuiteBounds};
use crate::format::{parse_architecture, render_architecture, FormatError};
use crate::model::Architecture;

/// Which part of the theory a lemma belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Group {
    Structural,
    Flow,
    LocalSecrets,
    Knowledge,
    Custom,
}

impl fmt::Display for Group {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Group::Structural => "structural",
            Group::Flow => "flow",
            Group::LocalSecrets => "local-secrets",
            Group::Knowledge => "knowledge",
            Group::Custom => "custom",
        })
    }
}

pub type Bindings = Vec<(&'static str, String)>;

/// Counts instances and records the first violation of one lemma.
#[derive(Debug, Default)]
pub struct Tally {
    pub instances: u64,
    pub non_vacuous: u64,
    pub violations: u64,
    pub first_violation: Option<Bindings>,
    target: Option<Vec<(String, String)>>,
    target_hit: bool,
}

impl Tally {
    fn targeting(bindings: &[(String, String)]) -> Self {
        Self {
            target: Some(bindings.to_vec()),
            ..Self::default()
        }
    }

    /// Adds `n` instances to the count.
    pub fn tried(&mut self, n: usize) {
        self.instances += n as u64;
    }

    /// Records one instance whose hypotheses all hold.
    pub fn check(&mut self, conclusion: bool, bindings: impl FnOnce() -> Bindings) {
        self.non_vacuous += 1;
        if conclusion {
            return;
        }
        self.violations += 1;
        if self.first_violation.is_some() && self.target.is_none() {
            return;
        }
        let b = bindings();
        if let Some(target) = &self.target {
            let same = target.len() == b.len()
                && target
                    .iter()
                    .zip(&b)
                    .all(|((tk, tv), (k, v))| tk == k && tv == v);
            self.target_hit |= same;
        }
        if self.first_violation.is_none() {
            self.first_violation = Some(b);
        }
    }

    /// Records an instance of a lemma whose hypotheses must be jointly
    /// unsatisfiable.
    pub fn contradiction(&mut self, bindings: impl FnOnce() -> Bindings) {
        self.check(false, bindings);
    }
}

type RunFn = dyn Fn(&Ctx<'_>, &mut Tally) + Send + Sync;

/// An executable lemma.
#[derive(Clone)]
pub struct Lemma {
    pub name: &'static str,
    pub group: Group,
    run: Arc<RunFn>,
}

impl Lemma {
    pub fn new(
        name: &'static str,
        group: Group,
        run: impl Fn(&Ctx<'_>, &mut Tally) + Send + Sync + 'static,
    ) -> Self {
        Self {
            name,
            group,
            run: Arc::new(run),
        }
    }

    pub fn run(&self, ctx: &Ctx<'_>) -> Tally {
        let mut t = Tally::default();
        (self.run)(ctx, &mut t);
        t
    }
}

impl fmt::Debug for Lemma {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Lemma")
            .field("name", &self.name)
            .field("group", &self.group)
            .finish()
    }
}

/// A concrete counterexample: the architecture and the variable values.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Witness {
    pub architecture: String,
    pub bindings: Vec<(String, String)>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Holds,
    Violated,
    Vacuous,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Holds => "holds",
            Status::Violated => "VIOLATED",
            Status::Vacuous => "vacuous",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LemmaCheck {
    pub name: &'static str,
    pub group: Group,
    pub instances: u64,
    pub non_vacuous: u64,
    pub violations: u64,
    pub witness: Option<Witness>,
}

impl LemmaCheck {
    pub fn status(&self) -> Status {
        if self.violations > 0 {
            Status::Violated
        } else if self.non_vacuous > 0 {
            Status::Holds
        } else {
            Status::Vacuous
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SuiteReport {
    pub checks: Vec<LemmaCheck>,
}

impl SuiteReport {
    pub fn violations(&self) -> u64 {
        self.checks.iter().map(|c| c.violations).sum()
    }

    pub fn passed(&self) -> bool {
        self.violations() == 0
    }

    pub fn get(&self, name: &str) -> Option<&LemmaCheck> {
        self.checks.iter().find(|c| c.name == name)
    }
}

impl fmt::Display for SuiteReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            writeln!(
                f,
                "{:<52} {:<14} {:<8} instances={} non_vacuous={}",
                c.name,
                c.group.to_string(),
                c.status().to_string(),
                c.instances,
                c.non_vacuous
            )?;
            if let Some(w) = &c.witness {
                let b: Vec<String> = w
                    .bindings
                    .iter()
                    .map(|(k, v)| format!("{k} = {v}"))
                    .collect();
                writeln!(f, "    witness: {}", b.join(", "))?;
            }
        }
        let held = self
            .checks
            .iter()
            .filter(|c| c.status() == Status::Holds)
            .count();
        let vacuous = self
            .checks
            .iter()
            .filter(|c| c.status() == Status::Vacuous)
            .count();
        write!(
            f,
            "{} lemmas: {} hold, {} vacuous, {} violations",
            self.checks.len(),
            held,
            vacuous,
            self.violations()
        )
    }
}

/// The built-in lemmas plus any custom properties.
#[derive(Clone, Debug)]
pub struct LemmaSuite {
    lemmas: Vec<Lemma>,
    pub bounds: SuiteBounds,
}

impl Default for LemmaSuite {
    fn default() -> Self {
        Self {
            lemmas: catalog::all(),
            bounds: SuiteBounds::default(),
        }
    }
}

impl LemmaSuite {
    pub fn new(bounds: SuiteBounds) -> Self {
        Self {
            bounds,
            ..Self::default()
        }
    }

    pub fn with_lemma(mut self, lemma: Lemma) -> Self {
        self.lemmas.push(lemma);
        self
    }

    pub fn lemmas(&self) -> &[Lemma] {
        &self.lemmas
    }

    pub fn lemma(&self, name: &str) -> Option<&Lemma> {
        self.lemmas.iter().find(|l| l.name == name)
    }

    pub fn run(&self, arch: &Architecture) -> SuiteReport {
        let ctx = Ctx::new(arch, &self.bounds);
        let mut rendered: Option<String> = None;
        let checks = self
            .lemmas
            .iter()
            .map(|lemma| {
                let t = lemma.run(&ctx);
                let witness = t.first_violation.map(|b| Witness {
                    architecture: rendered
                        .get_or_insert_with(|| render_architecture(arch))
                        .clone(),
                    bindings: b.into_iter().map(|(k, v)| (k.to_string(), v)).collect(),
                });
                LemmaCheck {
                    name: lemma.name,
                    group: lemma.group,
                    instances: t.instances,
                    non_vacuous: t.non_vacuous,
                    violations: t.violations,
                    witness,
                }
            })
            .collect();
        SuiteReport { checks }
    }

    /// Re-evaluates `lemma` on the witness architecture and reports whether
    /// the recorded instance is still a violation.
    pub fn recheck(&self, lemma: &str, witness: &Witness) -> Result<bool, FormatError> {
        let Some(lemma) = self.lemma(lemma) else {
            return Ok(false);
        };
        let arch = parse_architecture(&witness.architecture)?;
        let extra: Vec<BTreeSet<_>> = witness
            .bindings
            .iter()
            .filter_map(|(_, v)| parse_set_text(v))
            .collect();
        let ctx = Ctx::with_extra_sets(&arch, &self.bounds, &extra);
        let mut t = Tally::targeting(&witness.bindings);
        (lemma.run)(&ctx, &mut t);
        Ok(t.target_hit)
    }
}

/// Runs every built-in lemma on `arch`.
pub fn run_lemma_suite(arch: &Architecture, bounds: &SuiteBounds) -> SuiteReport {
    LemmaSuite::new(*bounds).run(arch)
}
