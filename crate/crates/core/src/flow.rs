//! Eventual input/output queries over a component's interface channels.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::Result;
use crate::model::{Architecture, ChannelId, ComponentId, ExprItem};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum FlowDirection {
    In,
    Out,
}

impl FlowDirection {
    /// The interface side of `c` this direction inspects.
    pub fn side<'a>(
        self,
        arch: &'a Architecture,
        c: &ComponentId,
    ) -> Result<&'a BTreeSet<ChannelId>> {
        let spec = arch.component(c)?;
        Ok(match self {
            FlowDirection::In => &spec.ins,
            FlowDirection::Out => &spec.out,
        })
    }
}

impl fmt::Display for FlowDirection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FlowDirection::In => "in",
            FlowDirection::Out => "out",
        })
    }
}

impl FromStr for FlowDirection {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "in" => Ok(FlowDirection::In),
            "out" => Ok(FlowDirection::Out),
            other => Err(format!("expected `in` or `out`, found `{other}`")),
        }
    }
}

fn require_channels(arch: &Architecture, chs: &BTreeSet<ChannelId>) -> Result<()> {
    chs.iter().try_for_each(|ch| arch.require_channel(ch))
}

/// True iff some channel on the `dir` side of `c`, restricted to `restrict`
/// when given, carries `item`.
pub fn query_flow(
    arch: &Architecture,
    c: &ComponentId,
    dir: FlowDirection,
    item: &ExprItem,
    restrict: Option<&BTreeSet<ChannelId>>,
) -> Result<bool> {
    let side = dir.side(arch, c)?;
    if let Some(m) = restrict {
        require_channels(arch, m)?;
    }
    Ok(arch
        .channels_carrying(item)
        .any(|ch| side.contains(ch) && restrict.is_none_or(|m| m.contains(ch))))
}

/// `c` may eventually receive `item` on an input channel.
pub fn ine(arch: &Architecture, c: &ComponentId, item: &ExprItem) -> Result<bool> {
    query_flow(arch, c, FlowDirection::In, item, None)
}

/// `c` may eventually emit `item` on an output channel.
pub fn eout(arch: &Architecture, c: &ComponentId, item: &ExprItem) -> Result<bool> {
    query_flow(arch, c, FlowDirection::Out, item, None)
}

/// `ch` is the only channel on the `dir` side of `c` carrying `item`.
pub fn expr_channel_single(
    arch: &Architecture,
    c: &ComponentId,
    dir: FlowDirection,
    ch: &ChannelId,
    item: &ExprItem,
) -> Result<bool> {
    arch.require_channel(ch)?;
    let side = dir.side(arch, c)?;
    Ok(side.contains(ch)
        && arch.carries(ch, item)
        && side.iter().all(|x| x == ch || !arch.carries(x, item)))
}

/// The channels on the `dir` side of `c` carrying `item` are exactly `chs`.
pub fn expr_channel_set(
    arch: &Architecture,
    c: &ComponentId,
    dir: FlowDirection,
    chs: &BTreeSet<ChannelId>,
    item: &ExprItem,
) -> Result<bool> {
    require_channels(arch, chs)?;
    let side = dir.side(arch, c)?;
    let members_carry = chs
        .iter()
        .all(|x| side.contains(x) && arch.carries(x, item));
    let others_silent = side
        .iter()
        .filter(|x| !chs.contains(*x))
        .all(|x| !arch.carries(x, item));
    Ok(members_carry && others_silent)
}

/// Channels on the `dir` side of `c` that carry `item`.
pub fn carrying_channels(
    arch: &Architecture,
    c: &ComponentId,
    dir: FlowDirection,
    item: &ExprItem,
) -> Result<BTreeSet<ChannelId>> {
    let side = dir.side(arch, c)?;
    Ok(arch
        .channels_carrying(item)
        .filter(|ch| side.contains(*ch))
        .cloned()
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;
    use crate::model::fixtures::{a1, a1_builder};

    fn c(name: &str) -> ComponentId {
        ComponentId::new(name)
    }

    fn chs(names: &[&str]) -> BTreeSet<ChannelId> {
        names.iter().map(|n| ChannelId::new(*n)).collect()
    }

    #[test]
    fn query_flow_examples() {
        let arch = a1();
        let na = ExprItem::secret("NA");
        let n = ExprItem::secret("N");
        assert!(query_flow(&arch, &c("sComp1"), FlowDirection::In, &na, None).unwrap());
        assert!(!query_flow(&arch, &c("sComp3"), FlowDirection::In, &n, None).unwrap());
        assert!(!query_flow(
            &arch,
            &c("sComp2"),
            FlowDirection::In,
            &n,
            Some(&chs(&["ch3"]))
        )
        .unwrap());
        assert!(query_flow(
            &arch,
            &c("sComp2"),
            FlowDirection::In,
            &n,
            Some(&chs(&["ch2"]))
        )
        .unwrap());
        assert!(eout(&arch, &c("sComp1"), &n).unwrap());
    }

    #[test]
    fn undeclared_restriction_member_is_rejected() {
        let err = query_flow(
            &a1(),
            &c("sComp1"),
            FlowDirection::In,
            &ExprItem::data(1),
            Some(&chs(&["ch9"])),
        )
        .unwrap_err();
        assert_eq!(err, Error::UnknownChannel(ChannelId::new("ch9")));
    }

    #[test]
    fn expr_channel_single_examples() {
        let arch = a1();
        let ch1 = ChannelId::new("ch1");
        assert!(expr_channel_single(
            &arch,
            &c("sComp1"),
            FlowDirection::In,
            &ch1,
            &ExprItem::secret("NA")
        )
        .unwrap());
        assert!(!expr_channel_single(
            &arch,
            &c("sComp1"),
            FlowDirection::In,
            &ch1,
            &ExprItem::secret("N")
        )
        .unwrap());

        let variant = a1_builder()
            .channels(["ch4"])
            .edit_component("sComp1", |s| {
                s.ins.insert(ChannelId::new("ch4"));
            })
            .fact("ch4", ExprItem::secret("NA"))
            .build()
            .unwrap();
        assert!(!expr_channel_single(
            &variant,
            &c("sComp1"),
            FlowDirection::In,
            &ch1,
            &ExprItem::secret("NA")
        )
        .unwrap());
    }

    #[test]
    fn expr_channel_set_examples() {
        let arch = a1();
        let na = ExprItem::secret("NA");
        assert!(
            expr_channel_set(&arch, &c("sComp1"), FlowDirection::In, &chs(&["ch1"]), &na).unwrap()
        );
        assert!(!expr_channel_set(&arch, &c("sComp1"), FlowDirection::In, &chs(&[]), &na).unwrap());
        assert!(expr_channel_set(
            &arch,
            &c("sComp1"),
            FlowDirection::In,
            &chs(&[]),
            &ExprItem::data(9)
        )
        .unwrap());
    }

    #[test]
    fn direction_parses() {
        assert_eq!("in".parse::<FlowDirection>().unwrap(), FlowDirection::In);
        assert_eq!("out".parse::<FlowDirection>().unwrap(), FlowDirection::Out);
        assert!("sideways".parse::<FlowDirection>().is_err());
    }
}
