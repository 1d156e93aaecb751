//! Glueing points into heavier ones, with the default limits and with the
//! higher rules switched on.
//!
//! ```text
//! cargo run --example glue_reduction
//! ```

use fatpoints::reduction::{glue_reduce_traced, validate_glue_rule, GlueLimits, GlueRule, KnownResults};
use fatpoints::model::SystemSpec;

fn main() {
    let rules = GlueRule::catalogue();
    let mut known = KnownResults::cited();
    for rule in &rules {
        println!("{rule:<28} usable with cited results: {}", validate_glue_rule(rule, &known));
    }
    for d in 13..=19 {
        known.complete_degree(d);
    }
    println!("after degrees 13..19 are complete:");
    for rule in &rules {
        println!("{rule:<28} usable: {}", validate_glue_rule(rule, &known));
    }

    let spec = SystemSpec::new(24).with(4, 60).with(3, 200).with(2, 40);
    println!("\n{spec} vdim {}", spec.vdim());
    // Heaviest rules first, so the higher targets get used before the 10-rule.
    let mut heavy = vec![rules[0]];
    heavy.extend(rules[1..].iter().rev());
    let unlimited = [10, 14, 15, 18, 20].into_iter().fold(GlueLimits::none(), |l, m| l.with(m, u32::MAX));
    for (label, order, limits) in [
        ("default limits", &rules, GlueLimits::for_degree(24)),
        ("all rules, heaviest first", &heavy, unlimited),
    ] {
        let (glued, steps) = glue_reduce_traced(&spec, order, &limits);
        println!("{label}: {glued} vdim {} after {} steps", glued.vdim(), steps.len());
        for step in steps.iter().filter(|s| s.produced != 4).take(3) {
            println!("  {}: consumed {:?}, produced a {}-point", step.rule, step.consumed, step.produced);
        }
    }
}
