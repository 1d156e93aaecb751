//! Replaying and summarizing result logs.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::log::{read_log, LogRecord};
use crate::enumeration::algorithm_b_count;
use crate::error::Result;
use crate::interpolation::{replay, Certificate, Verdict};
use crate::model::CaseSignature;

#[derive(Debug, Clone)]
pub struct VerifyOptions {
    /// Replay every certificate instead of a sample.
    pub full: bool,
    /// Certificates replayed when not `full`, spread evenly over the log.
    pub sample: usize,
    pub threads: usize,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            full: false,
            sample: 32,
            threads: 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Mismatch {
    pub line: usize,
    pub case: CaseSignature,
    pub recorded: u64,
    pub replayed: u64,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub records: usize,
    pub certificates: usize,
    pub failures: usize,
    pub replayed: usize,
    pub mismatches: Vec<Mismatch>,
    /// Certificates whose shape or verdict contradicts the model, or whose
    /// case identity differs from the certified system.
    pub inconsistent: Vec<(usize, String)>,
    /// Unparseable lines.
    pub corrupt: Vec<(usize, String)>,
    /// Second and later records of a case.
    pub duplicates: Vec<(usize, CaseSignature)>,
    /// Replays that could not run at all.
    pub errors: Vec<(usize, String)>,
}

impl VerifyReport {
    pub fn is_clean(&self) -> bool {
        self.mismatches.is_empty()
            && self.inconsistent.is_empty()
            && self.corrupt.is_empty()
            && self.duplicates.is_empty()
            && self.errors.is_empty()
    }
}

pub fn verify_log(path: &Path, opts: &VerifyOptions) -> Result<VerifyReport> {
    let log = read_log(path)?;
    let mut report = VerifyReport {
        records: log.records.len(),
        corrupt: log.corrupt.clone(),
        ..VerifyReport::default()
    };
    if let Some(line) = log.torn_tail {
        report.corrupt.push((line, "incomplete last line".into()));
    }
    let mut seen = BTreeMap::new();
    let mut certs: Vec<(usize, CaseSignature, &Certificate)> = Vec::new();
    for (line, record) in &log.records {
        let Some(case) = record.case() else { continue };
        if seen.insert(case, *line).is_some() {
            report.duplicates.push((*line, case));
            continue;
        }
        match record {
            LogRecord::Certificate { certificate, .. } => {
                report.certificates += 1;
                if let Err(reason) = certificate.consistent() {
                    report.inconsistent.push((*line, reason));
                }
                if CaseSignature::from_spec(&certificate.spec) != Some(case) {
                    report
                        .inconsistent
                        .push((*line, format!("record for {case} certifies {}", certificate.spec)));
                }
                certs.push((*line, case, certificate));
            }
            LogRecord::Failure { .. } => report.failures += 1,
            LogRecord::Header(_) => {}
        }
    }
    let chosen: Vec<&(usize, CaseSignature, &Certificate)> = if opts.full || certs.len() <= opts.sample {
        certs.iter().collect()
    } else {
        let step = certs.len() as f64 / opts.sample.max(1) as f64;
        (0..opts.sample).map(|k| &certs[(k as f64 * step) as usize]).collect()
    };
    for &(line, case, cert) in chosen {
        report.replayed += 1;
        match replay(cert, opts.threads) {
            Ok(rank) if rank == cert.rank => {}
            Ok(rank) => report.mismatches.push(Mismatch {
                line,
                case,
                recorded: cert.rank,
                replayed: rank,
            }),
            Err(e) => report.errors.push((line, e.to_string())),
        }
    }
    Ok(report)
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct DegreeStatus {
    pub degree: u32,
    pub expected: u64,
    /// Cases with a record, whatever its outcome.
    pub done: u64,
    pub pending: u64,
    pub non_special: u64,
    pub inconclusive: u64,
    pub failed: u64,
}

/// Progress per degree against the full case lists. A missing log counts as
/// empty.
pub fn status(path: &Path, degrees: (u32, u32)) -> Result<Vec<DegreeStatus>> {
    let records = if path.exists() {
        read_log(path)?.records
    } else {
        Vec::new()
    };
    let mut latest: BTreeMap<CaseSignature, &LogRecord> = BTreeMap::new();
    for (_, r) in &records {
        if let Some(c) = r.case() {
            latest.entry(c).or_insert(r);
        }
    }
    let mut out = Vec::new();
    for d in degrees.0..=degrees.1 {
        let expected = algorithm_b_count(d)?;
        let mut s = DegreeStatus {
            degree: d,
            expected,
            ..DegreeStatus::default()
        };
        let lo = CaseSignature::new(d, 0, 0, 0, 0);
        let hi = CaseSignature::new(d + 1, 0, 0, 0, 0);
        for (_, r) in latest.range(lo..hi) {
            s.done += 1;
            match r {
                LogRecord::Certificate { certificate, .. } if certificate.verdict == Verdict::NonSpecial => {
                    s.non_special += 1
                }
                LogRecord::Certificate { .. } => s.inconclusive += 1,
                _ => s.failed += 1,
            }
        }
        s.pending = expected.saturating_sub(s.done);
        out.push(s);
    }
    Ok(out)
}
