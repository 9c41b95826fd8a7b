use std::fmt::Write as _;

use crate::model::{Architecture, ChannelId, ExprItem};

pub const HEADER: &str = "# compsec architecture";

fn join<T: std::fmt::Display>(items: impl IntoIterator<Item = T>) -> String {
    items
        .into_iter()
        .map(|i| i.to_string())
        .collect::<Vec<_>>()
        .join(", ")
}

/// Canonical text: sorted universes, components with subcomponents first,
/// facts grouped by channel. Parsing the output yields `arch` again.
pub fn render_architecture(arch: &Architecture) -> String {
    let mut out = String::new();
    out.push_str(HEADER);
    out.push('\n');
    if !arch.keys().is_empty() {
        let _ = writeln!(out, "keys {}", join(arch.keys()));
    }
    for (enc, dec) in arch.pairing().pairs() {
        let _ = writeln!(out, "pair({enc}, {dec})");
    }
    if !arch.secrets().is_empty() {
        let _ = writeln!(out, "secrets {}", join(arch.secrets()));
    }
    if !arch.channels().is_empty() {
        let _ = writeln!(out, "channels {}", join(arch.channels()));
    }

    for id in arch.topological_order() {
        let spec = arch.component(&id).expect("ordered ids are declared");
        out.push('\n');
        let _ = writeln!(out, "component {id} {{");
        let fields: [(&str, Vec<String>); 6] = [
            (
                "sub",
                spec.subcomponents.iter().map(ToString::to_string).collect(),
            ),
            ("ins", spec.ins.iter().map(ToString::to_string).collect()),
            ("loc", spec.loc.iter().map(ToString::to_string).collect()),
            ("out", spec.out.iter().map(ToString::to_string).collect()),
            ("keys", spec.keys.iter().map(ToString::to_string).collect()),
            (
                "secrets",
                spec.secrets.iter().map(ToString::to_string).collect(),
            ),
        ];
        for (name, values) in fields {
            if !values.is_empty() {
                let _ = writeln!(out, "  {name} {};", values.join(", "));
            }
        }
        out.push_str("}\n");
    }

    let mut facts = arch.expr_channel().iter().peekable();
    if facts.peek().is_some() {
        out.push('\n');
    }
    while let Some((ch, first)) = facts.next() {
        let mut items: Vec<&ExprItem> = vec![first];
        while let Some((_, item)) = facts.next_if(|(next, _): &&(ChannelId, ExprItem)| next == ch) {
            items.push(item);
        }
        let _ = writeln!(out, "expr {ch}: {}", join(items));
    }
    out
}
