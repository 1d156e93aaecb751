//! Checks one system by rank computation over a prime field and prints the
//! certificate.
//!
//! ```text
//! cargo run --release --example check_system -- [degree] [multiplicities]
//! cargo run --release --example check_system -- 4 "2^9"
//! ```

use fatpoints::gfp::FieldPrime;
use fatpoints::interpolation::check_case;
use fatpoints::model::{parse_multiplicities, SystemSpec};

fn main() {
    let mut args = std::env::args().skip(1);
    let d: u32 = args.next().and_then(|s| s.parse().ok()).unwrap_or(14);
    let mults = args.next().unwrap_or_else(|| "4^56 3^2 2^10".into());
    let spec = SystemSpec::from_counts(d, parse_multiplicities(&mults).expect("multiplicities")).expect("system");

    let cert = check_case(&spec, FieldPrime::default_prime(), 0, 3).expect("check");
    println!("{spec}: {} (rank {} of {} x {}, dim {})", cert.verdict, cert.rank, cert.s, cert.n, cert.dim());
    println!("{}", serde_json::to_string_pretty(&cert).unwrap());
}
