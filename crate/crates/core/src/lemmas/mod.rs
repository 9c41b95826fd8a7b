//! The composition lemmas as executable properties, a generator of
//! architectures that satisfy the composition equations, and a fuzz driver.
//!
//! Lemma variables range over finite universes derived from the
//! architecture: composites with their subcomponents in both orders, every
//! carried item plus every atom item, a family of channel subsets and a
//! sample of sequences. See [`Ctx`] for the exact universes.

mod catalog;
mod context;
mod fuzz;
mod generator;
mod suite;

pub use context::{parse_set_text, set_text, Ctx, Flags, SuiteBounds, Triple};
pub use fuzz::{architecture_seeds, fuzz, fuzz_with, FuzzOptions, FuzzReport, LemmaAggregate};
pub use generator::{generate_architecture, perturb_architecture, GenParams};
pub use suite::{
    run_lemma_suite, Bindings, Group, Lemma, LemmaCheck, LemmaSuite, Status, SuiteReport, Tally,
    Witness,
};
