//! Small reference architectures built from the classic two-party example
//! names (`CKey`, `sComp1`, `ch1`, ...).

use super::{Architecture, ArchitectureBuilder, ComponentSpec, ExprItem};

/// `sComp3` composes `sComp1` and `sComp2`, which talk over the local
/// channel `ch2`.
pub fn a1_builder() -> ArchitectureBuilder {
    Architecture::builder()
        .keys(["CKey", "CKeyP", "SKey", "SKeyP"])
        .pair("CKey", "CKeyP")
        .pair("SKey", "SKeyP")
        .secrets(["N", "NA"])
        .channels(["ch1", "ch2", "ch3"])
        .component(
            ComponentSpec::new("sComp1")
                .with_ins(["ch1"])
                .with_out(["ch2"])
                .with_keys(["CKey"])
                .with_secrets(["N"]),
        )
        .component(
            ComponentSpec::new("sComp2")
                .with_ins(["ch2"])
                .with_out(["ch3"]),
        )
        .component(
            ComponentSpec::new("sComp3")
                .with_subcomponents(["sComp1", "sComp2"])
                .with_ins(["ch1"])
                .with_loc(["ch2"])
                .with_out(["ch3"])
                .with_keys(["CKey"])
                .with_secrets(["N"]),
        )
        .fact("ch1", ExprItem::secret("NA"))
        .fact("ch2", ExprItem::secret("N"))
        .fact("ch3", ExprItem::data(1))
}

pub fn a1() -> Architecture {
    a1_builder().build().expect("fixture A1 is valid")
}

/// A1 with the secret `N` owned by nobody, so it becomes a local secret of
/// `sComp3`.
pub fn a2() -> Architecture {
    a1_builder()
        .edit_component("sComp1", |c| c.secrets.clear())
        .edit_component("sComp3", |c| c.secrets.clear())
        .build()
        .expect("fixture A2 is valid")
}

/// A1 in the textual architecture format.
pub const A1_SOURCE: &str = include_str!("../../fixtures/a1.arch");
