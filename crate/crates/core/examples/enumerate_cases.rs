//! Lists the cases of both enumerations for one degree.
//!
//! ```text
//! cargo run --release --example enumerate_cases -- [degree]
//! ```

use fatpoints::enumeration::{algorithm_a_count, algorithm_b_cases, matrix_shape, write_csv, QPolicy};

fn main() {
    let d: u32 = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(14);
    let cases = algorithm_b_cases(d).expect("degree in range");
    println!("degree {d}: policy {:?}", QPolicy::for_degree(d).unwrap());
    println!("first enumeration (4-, 10-, 20-points): {} systems", algorithm_a_count(d));
    println!("second enumeration: {} cases", cases.len());

    let largest = cases.iter().max_by_key(|c| c.conditions()).unwrap();
    let (rows, cols) = matrix_shape(largest);
    println!("largest case {largest}: {rows} x {cols}");

    let mut out = std::io::stdout().lock();
    write_csv(&cases[..cases.len().min(10)], &mut out).expect("csv");
}
