//! Compositional secrecy analysis for hierarchical component architectures.
//!
//! Components exchange symbolic expressions over typed channels. This crate
//! checks the interface and composition equations that tie a composite to
//! its subcomponents, computes local secrets, decides Dolev-Yao knowledge
//! and verifies the secrecy composition lemmas as executable properties.
//!
//! ```
//! use compsec::model::fixtures::a1;
//! use compsec::structural::{structural_report, LeafPolicy};
//!
//! let report = structural_report(&a1(), LeafPolicy::Lenient);
//! assert!(report.passed());
//! ```

pub mod cli;
pub mod error;
pub mod flow;
pub mod format;
pub mod knowledge;
pub mod lemmas;
pub mod local_secrets;
pub mod model;
pub mod structural;

pub use error::{Error, Result};
