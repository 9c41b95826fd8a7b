//! Local secrets with provenance. Dropping ownership of `N` turns it into
//! a local secret of the composite.
//!
//! cargo run --example local_secrets

use compsec::local_secrets::compute_all_local_secrets;
use compsec::model::fixtures::{a1, a2};

fn main() {
    for (label, arch) in [("owned N", a1()), ("unowned N", a2())] {
        println!("== {label}");
        for set in compute_all_local_secrets(&arch).values() {
            println!("{set}");
        }
    }
}
