//! Virtual and expected dimensions of a few systems, including the bases of
//! every glueing rule.
//!
//! ```text
//! cargo run --example dimension_identities -- [degree] [multiplicities]
//! cargo run --example dimension_identities -- 14 "4^56 3^2 2^10"
//! ```

use fatpoints::model::{parse_multiplicities, SystemSpec};
use fatpoints::reduction::GlueRule;

fn show(spec: &SystemSpec) {
    println!(
        "{spec:<28} N={:<6} S={:<6} vdim={:<4} edim={}",
        spec.monomials(),
        spec.conditions(),
        spec.vdim(),
        spec.edim()
    );
}

fn main() {
    let mut args = std::env::args().skip(1);
    if let (Some(d), Some(mults)) = (args.next(), args.next()) {
        let d: u32 = d.parse().expect("degree");
        let counts = parse_multiplicities(&mults).expect("multiplicities");
        show(&SystemSpec::from_counts(d, counts).expect("system"));
        return;
    }

    for rule in GlueRule::catalogue() {
        let family = rule.base_family();
        println!("{rule}: {} base systems", family.len());
        for base in family.iter().take(3) {
            show(base);
        }
    }
}
