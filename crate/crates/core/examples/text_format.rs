//! Parse, render and report errors for the architecture text format.
//!
//! cargo run --example text_format

use compsec::format::{parse_architecture, render_architecture};
use compsec::model::fixtures::a1;

fn main() {
    let text = render_architecture(&a1());
    print!("{text}");
    assert_eq!(
        parse_architecture(&text).expect("rendered text parses"),
        a1()
    );

    for bad in [
        "keys k\nkeys k\n",
        "channels c\ncomponent P { ins d; }\n",
        "keys k\nchannels c\nexpr c: enc(k, [secret(s)])\n",
        "keys k\nchannels c\nexpr c: enc(k, [data(1)]\n",
    ] {
        match parse_architecture(bad) {
            Ok(_) => println!("accepted: {bad:?}"),
            Err(e) => println!("rejected: {e}"),
        }
    }
}
