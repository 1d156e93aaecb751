//! A sharded degree-14 campaign: run two shards, resume, verify, report
//! status and audit closure.
//!
//! ```text
//! cargo run --release --example degree14_campaign
//! ```

use fatpoints::campaign::{read_log, run_campaign, status, verify_log, CampaignConfig, Shard, VerifyOptions};
use fatpoints::reduction::{closure_audit, CertificateStore, KnownResults};

fn main() {
    let dir = tempfile::tempdir().unwrap();
    let log = dir.path().join("d14.jsonl");

    let mut config = CampaignConfig::new((14, 14), &log);
    config.shard = Shard::new(1, 2).unwrap();
    let first = run_campaign(&config).expect("shard 1/2");
    println!("shard 1/2: {:?}", first.degrees[0]);

    // The second shard appends to the same log.
    config.shard = Shard::new(2, 2).unwrap();
    config.resume = true;
    let second = run_campaign(&config).expect("shard 2/2");
    println!("shard 2/2: {:?}", second.degrees[0]);

    let report = verify_log(&log, &VerifyOptions::default()).expect("verify");
    println!("verify: {} records, {} replayed, clean {}", report.records, report.replayed, report.is_clean());

    for s in status(&log, (14, 15)).unwrap() {
        println!("status d={}: {}/{} done, {} pending", s.degree, s.done, s.expected, s.pending);
    }

    let store = CertificateStore::from_certificates(read_log(&log).unwrap().certificates().cloned());
    let audit = closure_audit(14, &store, &KnownResults::cited());
    println!("closure: {} targets, {} proven, {} gaps", audit.targets, audit.proven, audit.gap_count);
}
