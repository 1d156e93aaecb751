use std::collections::BTreeSet;
use std::path::{Path, PathBuf};
use std::sync::OnceLock;

use fatpoints::campaign::{
    read_log, run_campaign, status, verify_log, CampaignConfig, LogRecord, Shard, VerifyOptions,
};
use fatpoints::error::Error;
use fatpoints::interpolation::{Certificate, Verdict};
use fatpoints::model::{CaseSignature, SystemSpec};
use fatpoints::reduction::{closure_audit, deduce, CertificateStore, KnownResults, ProofStep};

struct Shared {
    _dir: tempfile::TempDir,
    log: PathBuf,
}

/// One full degree-14 run shared by the tests below.
fn degree14() -> &'static Path {
    static SHARED: OnceLock<Shared> = OnceLock::new();
    let shared = SHARED.get_or_init(|| {
        let dir = tempfile::tempdir().unwrap();
        let log = dir.path().join("d14.jsonl");
        let mut config = CampaignConfig::new((14, 14), &log);
        config.threads = 2;
        let summary = run_campaign(&config).unwrap();
        assert!(summary.is_clean());
        assert_eq!(summary.degrees[0].non_special, 261);
        assert_eq!(summary.unlocked_rules, vec!["4^a3^b->15 (2a+b=68)".to_string()]);
        Shared { _dir: dir, log }
    });
    &shared.log
}

fn certificates(path: &Path) -> BTreeSet<(CaseSignature, String)> {
    read_log(path)
        .unwrap()
        .records
        .into_iter()
        .filter_map(|(_, r)| match r {
            LogRecord::Certificate { case, certificate, .. } => {
                Some((case, serde_json::to_string(&certificate.without_timing()).unwrap()))
            }
            _ => None,
        })
        .collect()
}

#[test]
fn degree14_log_is_complete_and_consistent() {
    let log = read_log(degree14()).unwrap();
    assert!(log.header.is_some() && log.corrupt.is_empty());
    assert_eq!(log.records.len(), 261);
    let certs: Vec<&Certificate> = log.certificates().collect();
    assert!(certs.iter().all(|c| c.verdict == Verdict::NonSpecial));
    for c in certs {
        c.consistent().unwrap();
        assert_eq!(c.n, c.spec.monomials());
        assert_eq!(c.s, c.spec.conditions());
    }
}

#[test]
fn shards_reproduce_the_whole_run() {
    let dir = tempfile::tempdir().unwrap();
    let mut union = BTreeSet::new();
    let mut total = 0;
    for i in 1..=4 {
        let path = dir.path().join(format!("shard{i}.jsonl"));
        let mut config = CampaignConfig::new((14, 14), &path);
        config.shard = Shard::new(i, 4).unwrap();
        let summary = run_campaign(&config).unwrap();
        assert!(summary.unlocked_rules.is_empty());
        let part = certificates(&path);
        total += part.len();
        union.extend(part);
    }
    assert_eq!(total, 261);
    assert_eq!(union, certificates(degree14()));
}

#[test]
fn resume_after_interruption() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("cut.jsonl");
    let full = std::fs::read_to_string(degree14()).unwrap();
    let lines: Vec<&str> = full.lines().collect();
    // Header, 100 records and half of the next one.
    let mut cut = lines[..101].join("\n");
    cut.push('\n');
    cut.push_str(&lines[101][..lines[101].len() / 2]);
    std::fs::write(&path, cut).unwrap();

    let mut config = CampaignConfig::new((14, 14), &path);
    assert!(matches!(run_campaign(&config), Err(Error::LogExists { .. })));
    config.resume = true;
    let summary = run_campaign(&config).unwrap();
    assert_eq!(summary.degrees[0].skipped, 100);
    assert_eq!(summary.degrees[0].checked, 161);
    let log = read_log(&path).unwrap();
    assert!(log.corrupt.is_empty() && log.torn_tail.is_none());
    let cases: BTreeSet<CaseSignature> = log.records.iter().filter_map(|(_, r)| r.case()).collect();
    assert_eq!(cases.len(), log.records.len());
    assert_eq!(certificates(&path), certificates(degree14()));

    // A complete log needs no further work.
    let again = run_campaign(&config).unwrap();
    assert_eq!(again.degrees[0].checked, 0);
    assert_eq!(again.degrees[0].skipped, 261);

    config.base_seed = 5;
    assert!(matches!(run_campaign(&config), Err(Error::HeaderMismatch { .. })));
}

#[test]
fn full_replay_and_fault_injection() {
    let clean = verify_log(degree14(), &VerifyOptions { full: true, ..VerifyOptions::default() }).unwrap();
    assert_eq!(clean.replayed, 261);
    assert!(clean.is_clean(), "{clean:?}");

    let sampled = verify_log(degree14(), &VerifyOptions::default()).unwrap();
    assert_eq!(sampled.replayed, 32);
    assert!(sampled.is_clean());

    let dir = tempfile::tempdir().unwrap();
    let text = std::fs::read_to_string(degree14()).unwrap();
    let mut lines: Vec<String> = text.lines().map(String::from).collect();
    // Flip the lowest bit of the rank on line 5 and line 77.
    for n in [5usize, 77] {
        let mut record: serde_json::Value = serde_json::from_str(&lines[n - 1]).unwrap();
        let rank = record["certificate"]["rank"].as_u64().unwrap();
        record["certificate"]["rank"] = (rank ^ 1).into();
        lines[n - 1] = record.to_string();
    }
    lines[199] = "{not json".into();
    let duplicate = lines[10].clone();
    lines.push(duplicate);
    let path = dir.path().join("faulty.jsonl");
    std::fs::write(&path, lines.join("\n") + "\n").unwrap();

    let report = verify_log(&path, &VerifyOptions { full: true, ..VerifyOptions::default() }).unwrap();
    let mismatch_lines: Vec<usize> = report.mismatches.iter().map(|m| m.line).collect();
    assert_eq!(mismatch_lines, vec![5, 77]);
    assert_eq!(report.corrupt.len(), 1);
    assert_eq!(report.corrupt[0].0, 200);
    assert_eq!(report.duplicates.len(), 1);
    assert_eq!(report.duplicates[0].0, 263);
    assert!(!report.inconsistent.is_empty());

    let empty = dir.path().join("empty.jsonl");
    std::fs::write(&empty, "").unwrap();
    let report = verify_log(&empty, &VerifyOptions::default()).unwrap();
    assert_eq!(report.records, 0);
    assert!(report.is_clean());
}

#[test]
fn status_tables() {
    let dir = tempfile::tempdir().unwrap();
    let missing = status(&dir.path().join("none.jsonl"), (14, 40)).unwrap();
    assert_eq!(missing[0].expected, 261);
    assert_eq!(missing[0].pending, 261);
    assert_eq!(missing.last().unwrap().expected, 22);

    let done = status(degree14(), (14, 15)).unwrap();
    assert_eq!((done[0].done, done[0].pending, done[0].non_special), (261, 0, 261));
    assert_eq!(done[1].pending, 336);

    let text = std::fs::read_to_string(degree14()).unwrap();
    let partial: Vec<&str> = text.lines().take(51).collect();
    let path = dir.path().join("partial.jsonl");
    std::fs::write(&path, partial.join("\n") + "\n").unwrap();
    let s = &status(&path, (14, 14)).unwrap()[0];
    assert_eq!(s.done, 50);
    assert_eq!(s.done + s.pending, s.expected);
}

#[test]
fn closure_and_chains_from_the_real_store() {
    let log = read_log(degree14()).unwrap();
    let store = CertificateStore::from_certificates(log.certificates().cloned());
    let known = KnownResults::cited();
    let report = closure_audit(14, &store, &known);
    assert!(report.is_closed(), "{:?}", report.gaps.first());

    let chain = deduce(&SystemSpec::new(14).with(2, 200), &store, &known).unwrap();
    assert!(matches!(chain.last(), ProofStep::EmptySubsystem { rank: 680, .. }));
    let chain = deduce(&SystemSpec::new(14).with(4, 10), &store, &known).unwrap();
    assert!(matches!(chain.last(), ProofStep::IndependentSupersystem { .. }));

    let empty = closure_audit(14, &CertificateStore::new(), &known);
    assert_eq!(empty.gap_count, empty.targets);
}
