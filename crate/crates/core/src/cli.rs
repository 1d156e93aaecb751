//! Command-line front end. Human-readable output goes to standard error;
//! `--json` adds a machine-readable object on standard output.
//!
//! Exit codes: 0 on success, 1 when a check is inconclusive, a campaign has
//! inconclusive or failed cases, a replay mismatches or an audit finds gaps,
//! and 2 for usage errors and commands that could not run.

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::campaign::{self, parse_degrees, CampaignConfig, Shard, VerifyOptions};
use crate::enumeration::{algorithm_a_cases, algorithm_a_count, algorithm_b_cases, algorithm_b_count, write_csv};
use crate::error::{Error, Result};
use crate::gfp::{FieldPrime, DEFAULT_PRIME, PRIME_LADDER};
use crate::interpolation::{check_case_with, CheckOptions, FundamentalMode, Verdict, DEFAULT_ATTEMPTS};
use crate::model::{parse_multiplicities, DimensionReport, SystemSpec};
use crate::reduction::{closure_audit, CertificateStore, KnownResults};

#[derive(Debug, Parser)]
#[command(name = "fatpoints", version, about = "Non-specialty checks for fat-point linear systems in P^3")]
struct Cli {
    /// Print a JSON object on standard output.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Algorithm {
    A,
    B,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Virtual and expected dimension of a system.
    Vdim {
        #[arg(short, long)]
        degree: u32,
        /// Multiplicities, e.g. `4^11,3^2` or `2x5`.
        #[arg(long, default_value = "")]
        mults: String,
    },
    /// List or count the cases of Algorithm A or B for one degree.
    Enumerate {
        #[arg(long, value_enum)]
        alg: Algorithm,
        #[arg(short, long)]
        degree: u32,
        #[arg(long)]
        count_only: bool,
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Rank check of one system at random points.
    Check {
        #[arg(short, long)]
        degree: u32,
        #[arg(long, default_value = "")]
        mults: String,
        #[arg(long, default_value_t = u64::from(DEFAULT_PRIME))]
        prime: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = DEFAULT_ATTEMPTS)]
        attempts: u32,
        /// Place up to four points at the coordinate points.
        #[arg(long)]
        fundamental: bool,
        #[arg(long)]
        threads: Option<usize>,
    },
    /// Run the case lists of a degree range into a result log.
    Campaign {
        /// Inclusive range `A..B`.
        #[arg(long)]
        degrees: String,
        #[arg(long, default_value = "1/1")]
        shard: String,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        resume: bool,
        #[arg(long)]
        threads: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = DEFAULT_ATTEMPTS)]
        attempts: u32,
        /// Comma-separated prime ladder.
        #[arg(long, value_delimiter = ',')]
        primes: Option<Vec<u32>>,
        /// Build the full matrices without fundamental points.
        #[arg(long)]
        no_fundamental: bool,
        /// Memory budget for matrices in GiB.
        #[arg(long)]
        memory_gb: Option<u64>,
    },
    /// Replay the certificates of a log.
    Verify {
        path: PathBuf,
        /// Replay every certificate instead of a sample.
        #[arg(long)]
        full: bool,
        #[arg(long, default_value_t = 32)]
        sample: usize,
        #[arg(long)]
        threads: Option<usize>,
    },
    /// Progress per degree of a log.
    Status {
        path: PathBuf,
        #[arg(long, default_value = "14..40")]
        degrees: String,
    },
    /// Deduce every 4/3/2-point system of a degree from a log.
    AuditClosure {
        #[arg(short, long)]
        degree: u32,
        #[arg(long)]
        results: PathBuf,
    },
}

/// Thread count: the flag, else a `THREADS` environment variable, else the
/// machine's parallelism.
fn resolve_threads(flag: Option<usize>) -> usize {
    flag.or_else(|| std::env::var("THREADS").ok()?.parse().ok())
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
        .max(1)
}

fn spec_from(degree: u32, mults: &str) -> Result<SystemSpec> {
    SystemSpec::from_counts(degree, parse_multiplicities(mults)?)
}

fn emit<T: Serialize>(json: bool, value: &T) -> Result<()> {
    if json {
        println!("{}", serde_json::to_string(value)?);
    }
    Ok(())
}

/// Parses `argv` (including the program name) and runs the subcommand.
pub fn parse_and_dispatch<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            2
        }
    }
}

fn dispatch(cli: Cli) -> Result<i32> {
    let json = cli.json;
    match cli.command {
        Command::Vdim { degree, mults } => {
            let spec = spec_from(degree, &mults)?;
            eprintln!("vdim: system {spec}");
            let report = DimensionReport::formula(&spec);
            eprintln!("N = {}, S = {}, vdim = {}, edim = {}", report.n, report.s, report.vdim, report.edim);
            emit(json, &report)?;
            Ok(0)
        }
        Command::Enumerate {
            alg,
            degree,
            count_only,
            csv,
        } => {
            eprintln!("enumerate: algorithm {alg:?}, degree {degree}, count_only {count_only}");
            if count_only {
                let count = match alg {
                    Algorithm::A => algorithm_a_count(degree),
                    Algorithm::B => algorithm_b_count(degree)?,
                };
                eprintln!("{count} cases");
                emit(json, &serde_json::json!({ "degree": degree, "count": count }))?;
                return Ok(0);
            }
            let cases = match alg {
                Algorithm::A => algorithm_a_cases(degree),
                Algorithm::B => algorithm_b_cases(degree)?,
            };
            match &csv {
                Some(path) => {
                    let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
                    write_csv(&cases, file)?;
                    eprintln!("{} cases written to {}", cases.len(), path.display());
                }
                None => {
                    for c in &cases {
                        eprintln!("{c}  S={} vdim={}", c.conditions(), c.vdim());
                    }
                    eprintln!("{} cases", cases.len());
                }
            }
            emit(json, &serde_json::json!({ "degree": degree, "count": cases.len(), "cases": cases }))?;
            Ok(0)
        }
        Command::Check {
            degree,
            mults,
            prime,
            seed,
            attempts,
            fundamental,
            threads,
        } => {
            let spec = spec_from(degree, &mults)?;
            let threads = resolve_threads(threads);
            let mode = if fundamental {
                FundamentalMode::Auto
            } else {
                FundamentalMode::Off
            };
            let opts = CheckOptions::default()
                .with_prime(FieldPrime::new(prime)?)
                .with_seed(seed)
                .with_attempts(attempts)
                .with_fundamental(mode)
                .with_threads(threads);
            eprintln!(
                "check: system {spec}, primes {:?}, seed {seed}, attempts {attempts}, fundamental {fundamental}, threads {threads}",
                opts.primes.iter().map(FieldPrime::modulus).collect::<Vec<_>>()
            );
            let cert = check_case_with(&spec, &opts)?;
            eprintln!(
                "{}: rank {} of {}x{}, dim {}, edim {} (prime {}, seed {}, {} attempt(s), {} ms)",
                cert.verdict,
                cert.rank,
                cert.s,
                cert.n,
                cert.dim(),
                spec.edim(),
                cert.prime,
                cert.seed,
                cert.attempts,
                cert.elapsed_ms
            );
            if cert.verdict == Verdict::Inconclusive {
                eprintln!("rank below maximal at every attempt; this is evidence of speciality, not a proof");
            }
            emit(json, &cert)?;
            Ok(i32::from(cert.verdict == Verdict::Inconclusive))
        }
        Command::Campaign {
            degrees,
            shard,
            out,
            resume,
            threads,
            seed,
            attempts,
            primes,
            no_fundamental,
            memory_gb,
        } => {
            let mut config = CampaignConfig::new(parse_degrees(&degrees)?, out);
            config.shard = shard.parse::<Shard>()?;
            config.resume = resume;
            config.threads = resolve_threads(threads);
            config.base_seed = seed;
            config.max_attempts = attempts;
            config.primes = primes.unwrap_or_else(|| PRIME_LADDER.to_vec());
            config.fundamental = !no_fundamental;
            if let Some(gb) = memory_gb {
                config.memory_budget = gb << 30;
            }
            eprintln!(
                "campaign: degrees {}..{}, shard {}, out {}, resume {}, threads {}, seed {}, attempts {}, primes {:?}, fundamental {}, memory budget {} bytes",
                config.degrees.0,
                config.degrees.1,
                config.shard,
                config.output.display(),
                config.resume,
                config.threads,
                config.base_seed,
                config.max_attempts,
                config.primes,
                config.fundamental,
                config.memory_budget
            );
            let summary = campaign::run_campaign(&config)?;
            for d in &summary.degrees {
                eprintln!(
                    "d={:2}: {} cases, {} skipped, {} non_special, {} inconclusive, {} failed, {} ms",
                    d.degree, d.cases, d.skipped, d.non_special, d.inconclusive, d.failed, d.elapsed_ms
                );
            }
            for rule in &summary.unlocked_rules {
                eprintln!("unlocked glue rule {rule}");
            }
            if !summary.is_clean() {
                eprintln!(
                    "WARNING: {} inconclusive and {} failed cases: {:?} {:?}",
                    summary.inconclusive.len(),
                    summary.failed.len(),
                    summary.inconclusive,
                    summary.failed
                );
            }
            println!("{}", serde_json::to_string(&summary)?);
            Ok(i32::from(!summary.is_clean()))
        }
        Command::Verify {
            path,
            full,
            sample,
            threads,
        } => {
            let opts = VerifyOptions {
                full,
                sample,
                threads: resolve_threads(threads),
            };
            eprintln!(
                "verify: log {}, full {}, sample {}, threads {}",
                path.display(),
                opts.full,
                opts.sample,
                opts.threads
            );
            let report = campaign::verify_log(&path, &opts)?;
            eprintln!(
                "{} records, {} certificates, {} failures, {} replayed, {} mismatches",
                report.records,
                report.certificates,
                report.failures,
                report.replayed,
                report.mismatches.len()
            );
            for m in &report.mismatches {
                eprintln!("line {}: {} recorded rank {} replayed {}", m.line, m.case, m.recorded, m.replayed);
            }
            for (line, what) in report.inconsistent.iter().chain(&report.corrupt).chain(&report.errors) {
                eprintln!("line {line}: {what}");
            }
            for (line, case) in &report.duplicates {
                eprintln!("line {line}: duplicate record for {case}");
            }
            emit(json, &report)?;
            Ok(i32::from(!report.is_clean()))
        }
        Command::Status { path, degrees } => {
            let degrees = parse_degrees(&degrees)?;
            eprintln!("status: log {}, degrees {}..{}", path.display(), degrees.0, degrees.1);
            let rows = campaign::status(&path, degrees)?;
            eprintln!("   d  expected      done   pending  inconclusive  failed");
            for r in &rows {
                eprintln!(
                    "{:4} {:9} {:9} {:9} {:13} {:7}",
                    r.degree, r.expected, r.done, r.pending, r.inconclusive, r.failed
                );
            }
            emit(json, &rows)?;
            Ok(0)
        }
        Command::AuditClosure { degree, results } => {
            eprintln!("audit-closure: degree {degree}, results {}", results.display());
            let log = campaign::read_log(&results)?;
            let store = CertificateStore::from_certificates(log.certificates().cloned());
            let report = closure_audit(degree, &store, &KnownResults::cited());
            eprintln!(
                "{} targets with S <= {}, {} deduced, {} gaps",
                report.targets, report.max_conditions, report.proven, report.gap_count
            );
            for g in report.gaps.iter().take(20) {
                eprintln!("gap: {} (glued {}): {}", g.target, g.glued, g.reason);
            }
            emit(json, &report)?;
            Ok(i32::from(!report.is_closed()))
        }
    }
}
