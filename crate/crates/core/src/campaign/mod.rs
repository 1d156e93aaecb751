//! The verification sweep over degrees 13 to 40.
//!
//! Every Algorithm B case of a degree gets an index in case order. A shard
//! `i/n` takes the cases with `index mod n = i - 1`, so shards partition the
//! work and their logs can simply be concatenated. Each case's seed is
//! derived from the base seed and the case itself, never from the shard, so
//! a case produces the same certificate whichever shard runs it.
//!
//! Within a degree the largest matrices start first. Workers send finished
//! records to a single writer thread that appends them to the log.

mod log;
mod verify;

use std::collections::BTreeSet;
use std::path::PathBuf;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::mpsc;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::enumeration::{algorithm_b_cases, MAX_DEGREE, MIN_DEGREE};
use crate::error::{Error, Result};
use crate::gfp::{DenseMatrix, FieldPrime, PRIME_LADDER};
use crate::interpolation::{
    check_case_with, CheckOptions, FundamentalAssignment, FundamentalMode, Verdict, DEFAULT_ATTEMPTS,
    DEFAULT_MEMORY_LIMIT,
};
use crate::model::CaseSignature;
use crate::reduction::{validate_glue_rule, GlueRule, KnownResults};

pub use log::{read_log, LogContents, LogHeader, LogRecord, LogWriter, LOG_FORMAT};
pub use verify::{status, verify_log, DegreeStatus, Mismatch, VerifyOptions, VerifyReport};

/// Shard `index` of `total`, 1-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Shard {
    pub index: u32,
    pub total: u32,
}

impl Shard {
    pub const WHOLE: Shard = Shard { index: 1, total: 1 };

    pub fn new(index: u32, total: u32) -> Result<Self> {
        if total == 0 || index == 0 || index > total {
            return Err(Error::Config(format!("shard {index}/{total} needs 1 <= i <= n")));
        }
        Ok(Shard { index, total })
    }

    pub fn contains(&self, case_index: u64) -> bool {
        case_index % u64::from(self.total) == u64::from(self.index - 1)
    }
}

impl std::fmt::Display for Shard {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}/{}", self.index, self.total)
    }
}

impl std::str::FromStr for Shard {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parse = |v: &str| {
            v.trim().parse::<u32>().map_err(|e| Error::Parse {
                input: s.to_string(),
                reason: e.to_string(),
            })
        };
        let (i, n) = s.split_once('/').ok_or_else(|| Error::Parse {
            input: s.to_string(),
            reason: "expected I/N".into(),
        })?;
        Shard::new(parse(i)?, parse(n)?)
    }
}

/// Parses `A..B` (inclusive) or a single degree.
pub fn parse_degrees(s: &str) -> Result<(u32, u32)> {
    let parse = |v: &str| {
        v.trim().parse::<u32>().map_err(|e| Error::Parse {
            input: s.to_string(),
            reason: e.to_string(),
        })
    };
    let (lo, hi) = match s.split_once("..") {
        Some((a, b)) => (parse(a)?, parse(b.trim_start_matches('='))?),
        None => {
            let d = parse(s)?;
            (d, d)
        }
    };
    if lo > hi {
        return Err(Error::Parse {
            input: s.to_string(),
            reason: "empty degree range".into(),
        });
    }
    Ok((lo, hi))
}

#[derive(Debug, Clone)]
pub struct CampaignConfig {
    /// Inclusive.
    pub degrees: (u32, u32),
    pub primes: Vec<u32>,
    pub base_seed: u64,
    pub max_attempts: u32,
    pub threads: usize,
    pub shard: Shard,
    pub output: PathBuf,
    pub resume: bool,
    /// Place up to four points at the coordinate points.
    pub fundamental: bool,
    /// Bytes of matrices held at once across workers.
    pub memory_budget: u64,
}

impl CampaignConfig {
    pub fn new(degrees: (u32, u32), output: impl Into<PathBuf>) -> Self {
        CampaignConfig {
            degrees,
            primes: PRIME_LADDER.to_vec(),
            base_seed: 0,
            max_attempts: DEFAULT_ATTEMPTS,
            threads: 1,
            shard: Shard::WHOLE,
            output: output.into(),
            resume: false,
            fundamental: true,
            memory_budget: DEFAULT_MEMORY_LIMIT,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let (lo, hi) = self.degrees;
        if lo > hi || lo < MIN_DEGREE || hi > MAX_DEGREE {
            return Err(Error::Config(format!(
                "degrees {lo}..{hi} must lie within {MIN_DEGREE}..{MAX_DEGREE}"
            )));
        }
        if self.primes.is_empty() {
            return Err(Error::Config("empty prime ladder".into()));
        }
        self.field_primes()?;
        if self.max_attempts == 0 {
            return Err(Error::NoAttempts);
        }
        Shard::new(self.shard.index, self.shard.total)?;
        Ok(())
    }

    fn field_primes(&self) -> Result<Vec<FieldPrime>> {
        self.primes.iter().map(|&p| FieldPrime::new(u64::from(p))).collect()
    }

    /// SHA-256 over the settings that determine certificates: degrees,
    /// primes, base seed, attempts and the fundamental flag.
    pub fn digest(&self) -> String {
        let canonical = serde_json::json!({
            "degrees": [self.degrees.0, self.degrees.1],
            "primes": self.primes,
            "base_seed": self.base_seed,
            "max_attempts": self.max_attempts,
            "fundamental": self.fundamental,
        });
        let hash = Sha256::digest(canonical.to_string().as_bytes());
        hash.iter().map(|b| format!("{b:02x}")).collect()
    }

    pub fn header(&self) -> LogHeader {
        LogHeader {
            format: LOG_FORMAT,
            code_version: env!("CARGO_PKG_VERSION").to_string(),
            config_digest: self.digest(),
            degrees: self.degrees,
            primes: self.primes.clone(),
            base_seed: self.base_seed,
            max_attempts: self.max_attempts,
            fundamental: self.fundamental,
            shard: self.shard.to_string(),
        }
    }

    /// Check options for one case.
    pub fn check_options(&self, case: &CaseSignature, threads: usize) -> Result<CheckOptions> {
        let mode = if self.fundamental {
            FundamentalMode::Auto
        } else {
            FundamentalMode::Off
        };
        Ok(CheckOptions::default()
            .with_primes(self.field_primes()?)
            .with_seed(case_seed(self.base_seed, case))
            .with_attempts(self.max_attempts)
            .with_fundamental(mode)
            .with_threads(threads)
            .with_memory_limit(self.memory_budget))
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Seed of the first attempt for `case`.
pub fn case_seed(base_seed: u64, case: &CaseSignature) -> u64 {
    [case.degree, case.q, case.x, case.y, case.z]
        .iter()
        .fold(splitmix64(base_seed), |acc, &v| splitmix64(acc ^ u64::from(v)))
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct DegreeSummary {
    pub degree: u32,
    /// Cases of this degree in the shard.
    pub cases: u64,
    /// Already in the log before this run.
    pub skipped: u64,
    pub checked: u64,
    pub non_special: u64,
    pub inconclusive: u64,
    pub failed: u64,
    pub elapsed_ms: u64,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CampaignSummary {
    pub config_digest: String,
    pub shard: String,
    pub degrees: Vec<DegreeSummary>,
    /// Cases whose rank stayed below maximal.
    pub inconclusive: Vec<CaseSignature>,
    pub failed: Vec<CaseSignature>,
    /// Glue rules that became valid during the run.
    pub unlocked_rules: Vec<String>,
}

impl CampaignSummary {
    /// No inconclusive case and no failure.
    pub fn is_clean(&self) -> bool {
        self.inconclusive.is_empty() && self.failed.is_empty()
    }
}

/// A finished case on its way to the writer.
struct Outcome {
    case: CaseSignature,
    record: LogRecord,
}

pub fn run_campaign(config: &CampaignConfig) -> Result<CampaignSummary> {
    config.validate()?;
    let path = &config.output;
    let header = config.header();
    let (mut writer, done) = if path.exists() {
        if !config.resume {
            return Err(Error::LogExists { path: path.clone() });
        }
        let log = read_log(path)?;
        let found = log.header.as_ref().map_or("none".to_string(), |h| h.config_digest.clone());
        if found != header.config_digest {
            return Err(Error::HeaderMismatch {
                found,
                expected: header.config_digest,
            });
        }
        if let Some(&(line, _)) = log.corrupt.first() {
            return Err(Error::Config(format!("log {} is corrupt at line {line}", path.display())));
        }
        let done: BTreeSet<CaseSignature> = log.records.iter().filter_map(|(_, r)| r.case()).collect();
        (LogWriter::reopen(path, log.torn_tail.is_some())?, done)
    } else {
        (LogWriter::create(path, &header)?, BTreeSet::new())
    };

    let mut known = KnownResults::cited();
    let rules = GlueRule::catalogue();
    let mut summary = CampaignSummary {
        config_digest: header.config_digest.clone(),
        shard: config.shard.to_string(),
        ..CampaignSummary::default()
    };
    for d in config.degrees.0..=config.degrees.1 {
        let start = std::time::Instant::now();
        let all = algorithm_b_cases(d)?;
        let mine: Vec<(u64, CaseSignature)> = all
            .iter()
            .enumerate()
            .map(|(i, c)| (i as u64, *c))
            .filter(|(i, _)| config.shard.contains(*i))
            .collect();
        let mut stats = DegreeSummary {
            degree: d,
            cases: mine.len() as u64,
            ..DegreeSummary::default()
        };
        let mut todo: Vec<(u64, CaseSignature)> =
            mine.into_iter().filter(|(_, c)| !done.contains(c)).collect();
        stats.skipped = stats.cases - todo.len() as u64;
        // Largest first; the sort is stable so ties keep case order.
        todo.sort_by_key(|(_, c)| std::cmp::Reverse(c.conditions()));

        let outcomes = run_degree(config, &todo, &mut writer)?;
        for o in &outcomes {
            stats.checked += 1;
            match &o.record {
                LogRecord::Certificate { certificate, .. } => match certificate.verdict {
                    Verdict::NonSpecial => stats.non_special += 1,
                    Verdict::Inconclusive => {
                        stats.inconclusive += 1;
                        summary.inconclusive.push(o.case);
                    }
                },
                _ => {
                    stats.failed += 1;
                    summary.failed.push(o.case);
                }
            }
        }
        stats.elapsed_ms = start.elapsed().as_millis() as u64;

        let whole_degree = config.shard == Shard::WHOLE
            && stats.skipped == 0
            && stats.non_special == all.len() as u64;
        if whole_degree {
            let before: Vec<bool> = rules.iter().map(|r| validate_glue_rule(r, &known)).collect();
            known.complete_degree(d);
            for (rule, was) in rules.iter().zip(before) {
                if !was && validate_glue_rule(rule, &known) {
                    summary.unlocked_rules.push(rule.to_string());
                }
            }
        }
        summary.degrees.push(stats);
    }
    Ok(summary)
}

/// Workers and rank-kernel threads per worker for a degree whose largest
/// matrix needs `largest` bytes.
fn worker_split(threads: usize, budget: u64, largest: u64) -> (usize, usize) {
    let threads = threads.max(1);
    let fit = (budget / largest.max(1)).max(1) as usize;
    let workers = threads.min(fit);
    (workers, (threads / workers).max(1))
}

fn run_degree(
    config: &CampaignConfig,
    todo: &[(u64, CaseSignature)],
    writer: &mut LogWriter,
) -> Result<Vec<Outcome>> {
    if todo.is_empty() {
        return Ok(Vec::new());
    }
    let largest = todo
        .iter()
        .map(|(_, c)| {
            let spec = c.to_spec();
            let a = if config.fundamental {
                FundamentalAssignment::auto(&spec)
            } else {
                FundamentalAssignment::none()
            };
            let deleted = a.deleted_count();
            DenseMatrix::footprint_bytes(
                (c.conditions() - deleted) as usize,
                (c.monomials() - deleted) as usize,
            )
        })
        .max()
        .unwrap_or(0);
    let (workers, inner) = worker_split(config.threads, config.memory_budget, largest);
    let next = AtomicUsize::new(0);
    let (tx, rx) = mpsc::channel::<Outcome>();
    std::thread::scope(|scope| -> Result<Vec<Outcome>> {
        for _ in 0..workers {
            let tx = tx.clone();
            let next = &next;
            scope.spawn(move || loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                let Some(&(case_index, case)) = todo.get(i) else {
                    break;
                };
                let record = match config
                    .check_options(&case, inner)
                    .and_then(|opts| check_case_with(&case.to_spec(), &opts))
                {
                    Ok(certificate) => LogRecord::Certificate {
                        case,
                        case_index,
                        certificate,
                    },
                    Err(e) => LogRecord::Failure {
                        case,
                        case_index,
                        error: e.to_string(),
                    },
                };
                if tx.send(Outcome { case, record }).is_err() {
                    break;
                }
            });
        }
        drop(tx);
        let mut outcomes = Vec::with_capacity(todo.len());
        for outcome in rx {
            writer.append(&outcome.record)?;
            outcomes.push(outcome);
        }
        Ok(outcomes)
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shards_partition_cases() {
        for n in 1..=7u32 {
            let mut seen = vec![0u32; 100];
            for i in 1..=n {
                let s = Shard::new(i, n).unwrap();
                for (k, slot) in seen.iter_mut().enumerate() {
                    if s.contains(k as u64) {
                        *slot += 1;
                    }
                }
            }
            assert!(seen.iter().all(|&c| c == 1));
        }
        assert!(Shard::new(0, 3).is_err());
        assert!(Shard::new(4, 3).is_err());
        assert_eq!("2/4".parse::<Shard>().unwrap(), Shard::new(2, 4).unwrap());
        assert!("2-4".parse::<Shard>().is_err());
    }

    #[test]
    fn degree_ranges() {
        assert_eq!(parse_degrees("14..18").unwrap(), (14, 18));
        assert_eq!(parse_degrees("14..=18").unwrap(), (14, 18));
        assert_eq!(parse_degrees("40").unwrap(), (40, 40));
        assert!(parse_degrees("18..14").is_err());
        assert!(parse_degrees("x").is_err());
    }

    #[test]
    fn config_validation_and_digest() {
        let c = CampaignConfig::new((14, 14), "/tmp/unused.jsonl");
        c.validate().unwrap();
        let mut other = c.clone();
        other.shard = Shard::new(2, 3).unwrap();
        other.threads = 8;
        other.output = "/elsewhere".into();
        assert_eq!(c.digest(), other.digest());
        other.base_seed = 1;
        assert_ne!(c.digest(), other.digest());
        for bad in [(12, 14), (14, 41), (15, 14)] {
            assert!(CampaignConfig::new(bad, "x").validate().is_err());
        }
        let mut bad = c.clone();
        bad.primes = vec![37];
        assert!(bad.validate().is_err());
        bad.primes = Vec::new();
        assert!(bad.validate().is_err());
    }

    #[test]
    fn seeds_depend_on_case_only() {
        let a = CaseSignature::new(14, 1, 2, 3, 4);
        let b = CaseSignature::new(14, 1, 2, 4, 3);
        assert_eq!(case_seed(7, &a), case_seed(7, &a));
        assert_ne!(case_seed(7, &a), case_seed(7, &b));
        assert_ne!(case_seed(7, &a), case_seed(8, &a));
    }

    #[test]
    fn worker_split_respects_budget() {
        assert_eq!(worker_split(8, 16 << 30, 1 << 20), (8, 1));
        assert_eq!(worker_split(8, 1 << 30, 600 << 20), (1, 8));
        assert_eq!(worker_split(8, 2 << 30, 600 << 20), (3, 2));
        assert_eq!(worker_split(0, 1, 10), (1, 1));
    }
}
