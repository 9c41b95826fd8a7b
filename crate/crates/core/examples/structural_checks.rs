//! Interface and composition checks on the two-party fixture, then on a
//! copy whose composite wrongly exposes its local channel.
//!
//! cargo run --example structural_checks

use compsec::model::fixtures::{a1, a1_builder};
use compsec::model::{ChannelId, ComponentId};
use compsec::structural::{check_composition_in, structural_report, LeafPolicy};

fn main() -> compsec::Result<()> {
    let arch = a1();
    println!("{}", structural_report(&arch, LeafPolicy::Lenient));

    let broken = a1_builder()
        .edit_component("sComp3", |c| {
            c.ins.insert(ChannelId::new("ch2"));
        })
        .build()?;
    let verdict = check_composition_in(&broken, &ComponentId::new("sComp3"))?;
    println!(
        "\ncomposition_in with ch2 exposed, blamed channels: {:?}",
        verdict.blame
    );
    println!("{}", structural_report(&broken, LeafPolicy::Lenient));
    Ok(())
}
