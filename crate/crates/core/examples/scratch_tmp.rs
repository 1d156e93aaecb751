use fatpoints::enumeration::*;
use fatpoints::interpolation::*;
fn main() {
    let d: u32 = std::env::args().nth(1).unwrap().parse().unwrap();
    let cases = algorithm_b_cases(d).unwrap();
    let c = cases.iter().max_by_key(|c| c.conditions()).unwrap();
    let spec = c.to_spec();
    let t = std::time::Instant::now();
    let cert = check_case_with(&spec, &CheckOptions::default().with_fundamental(FundamentalMode::Auto)).unwrap();
    println!("{spec} {:?} rank={} {:?} {:.1}s", cert.verdict, cert.rank, cert.fundamental_assignment, t.elapsed().as_secs_f64());
}
