//! Generates architectures, shows one, then fuzzes the lemma suite over a
//! batch and over a perturbed batch.
//!
//! cargo run --release --example fuzz_lemmas -- [seed] [count]

use compsec::format::render_architecture;
use compsec::lemmas::{fuzz, generate_architecture, perturb_architecture, FuzzOptions, GenParams};

fn main() {
    let mut args = std::env::args()
        .skip(1)
        .map(|a| a.parse::<u64>().expect("numeric argument"));
    let seed = args.next().unwrap_or(7);
    let count = args.next().unwrap_or(200) as usize;

    let sample = generate_architecture(GenParams::default().with_seed(seed));
    println!("{}", render_architecture(&sample));
    let (_, edit) = perturb_architecture(&sample, seed);
    println!("perturbation: {edit}\n");

    let options = FuzzOptions {
        params: GenParams::default().with_seed(seed),
        count,
        ..FuzzOptions::default()
    };
    let report = fuzz(&options);
    println!("{report}");
    let perturbed = fuzz(&FuzzOptions {
        perturb: true,
        ..options
    });
    println!(
        "\nperturbed: {} structurally invalid, {} violations",
        perturbed.structurally_invalid, perturbed.violations
    );
    std::process::exit(if report.passed() && perturbed.passed() {
        0
    } else {
        1
    });
}
