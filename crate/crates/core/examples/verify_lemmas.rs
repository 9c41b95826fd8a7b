//! Runs every composition lemma against one architecture and reports
//! instances, non-vacuous instances and violations.
//!
//! cargo run --example verify_lemmas

use compsec::lemmas::{run_lemma_suite, SuiteBounds};
use compsec::model::fixtures::a1;

fn main() {
    let report = run_lemma_suite(&a1(), &SuiteBounds::default());
    println!("{report}");
    std::process::exit(if report.passed() { 0 } else { 1 });
}
