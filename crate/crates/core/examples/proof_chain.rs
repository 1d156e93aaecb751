//! Deduces non-specialty of systems outside the checked cases from a
//! degree-14 run, printing the proof chains.
//!
//! ```text
//! cargo run --release --example proof_chain
//! ```

use fatpoints::campaign::{run_campaign, read_log, CampaignConfig};
use fatpoints::model::SystemSpec;
use fatpoints::reduction::{deduce, CertificateStore, KnownResults};

fn main() {
    let dir = tempfile::tempdir().unwrap();
    let log = dir.path().join("d14.jsonl");
    run_campaign(&CampaignConfig::new((14, 14), &log)).expect("campaign");
    let store = CertificateStore::from_certificates(read_log(&log).unwrap().certificates().cloned());
    let known = KnownResults::cited();

    for target in [
        SystemSpec::new(14).with(2, 169),
        SystemSpec::new(14).with(4, 30).with(3, 10).with(2, 12),
        SystemSpec::new(14).with(4, 40),
    ] {
        println!("{target} (vdim {})", target.vdim());
        match deduce(&target, &store, &known) {
            Ok(chain) => {
                for step in &chain.steps {
                    println!("  {}", serde_json::to_string(step).unwrap());
                }
            }
            Err(gap) => println!("  gap: {}", gap.reason),
        }
    }
}
