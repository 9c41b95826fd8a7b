//! Deduction with derivation traces, in both key-availability modes.
//!
//! cargo run --example knowledge

use compsec::format::{parse_architecture, parse_expr_list};
use compsec::knowledge::{KnowledgeBase, Mode};
use compsec::model::ComponentId;

const SOURCE: &str = "\
keys a, a_inv, b
pair(a, a_inv)
pair(b, b)
secrets n, m
channels x
component C { ins x; }
expr x: key(a_inv), enc(a, [key(b), secret(m)]), enc(b, [secret(n)])
";

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let arch = parse_architecture(SOURCE)?;
    let c = ComponentId::new("C");
    let queries = [
        "[secret(m)]",
        "[secret(n)]",
        "[enc(a, [secret(m), secret(m)])]",
        "[key(a)]",
    ];
    for mode in Mode::ALL {
        let kb = KnowledgeBase::build(&arch, &c, mode)?;
        println!("== {mode}");
        for q in queries {
            let seq = parse_expr_list(q)?;
            let judgment = kb.knows(&seq);
            println!("{}", kb.explain(&seq, &judgment));
        }
    }
    Ok(())
}
