//! Placing the heaviest points at coordinate points shrinks the matrix
//! without changing the rank deficiency.
//!
//! ```text
//! cargo run --release --example fundamental_points -- [degree]
//! ```

use std::time::Instant;

use fatpoints::enumeration::algorithm_b_cases;
use fatpoints::interpolation::{check_case_with, reduce_fundamental, CheckOptions, FundamentalAssignment, FundamentalMode};

fn main() {
    let d: u32 = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(22);
    let cases = algorithm_b_cases(d).expect("degree in range");
    let spec = cases.iter().max_by_key(|c| c.conditions()).unwrap().to_spec();

    let assignment = FundamentalAssignment::auto(&spec);
    let reduced = reduce_fundamental(&spec, &assignment).expect("assignment");
    println!("{spec}");
    println!("  assignment {:?}", assignment.0);
    println!(
        "  {} x {} becomes {} x {}",
        spec.conditions(),
        spec.monomials(),
        spec.conditions() - assignment.deleted_count(),
        reduced.kept.len()
    );

    for mode in [FundamentalMode::Off, FundamentalMode::Auto] {
        let t = Instant::now();
        let cert = check_case_with(&spec, &CheckOptions::default().with_fundamental(mode.clone())).expect("check");
        println!("  {mode:?}: {} rank {} in {:.2}s", cert.verdict, cert.rank, t.elapsed().as_secs_f64());
    }
}
