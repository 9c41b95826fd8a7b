//! Which interface channels carry which items.
//!
//! cargo run --example flow_queries

use std::collections::BTreeSet;

use compsec::flow::{carrying_channels, expr_channel_set, query_flow, FlowDirection};
use compsec::model::fixtures::a1;
use compsec::model::{ChannelId, ComponentId, ExprItem};

fn main() -> compsec::Result<()> {
    let arch = a1();
    let n = ExprItem::secret("N");
    for comp in ["sComp1", "sComp2", "sComp3"] {
        let c = ComponentId::new(comp);
        for dir in [FlowDirection::In, FlowDirection::Out] {
            let hit = query_flow(&arch, &c, dir, &n, None)?;
            let via = carrying_channels(&arch, &c, dir, &n)?;
            println!("{comp} {dir} {n}: {hit} {via:?}");
        }
    }

    let only_ch3: BTreeSet<ChannelId> = [ChannelId::new("ch3")].into();
    let restricted = query_flow(
        &arch,
        &ComponentId::new("sComp2"),
        FlowDirection::In,
        &n,
        Some(&only_ch3),
    )?;
    println!("sComp2 in {n} restricted to ch3: {restricted}");

    let exact = expr_channel_set(
        &arch,
        &ComponentId::new("sComp1"),
        FlowDirection::Out,
        &[ChannelId::new("ch2")].into(),
        &n,
    )?;
    println!("sComp1 emits {n} on exactly {{ch2}}: {exact}");
    Ok(())
}
