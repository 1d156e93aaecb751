//! Acceptance criteria, one PASS/FAIL line each. Exits nonzero if any fails.

use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use fatpoints::campaign::{read_log, run_campaign, verify_log, CampaignConfig, VerifyOptions};
use fatpoints::enumeration::{algorithm_a_count, algorithm_b_cases, algorithm_b_count};
use fatpoints::gfp::{FieldPrime, PRIME_LADDER};
use fatpoints::interpolation::oracle::rational_oracle;
use fatpoints::interpolation::{build_matrix, check_case, check_case_with, sample_points, CheckOptions, Verdict};
use fatpoints::model::SystemSpec;
use fatpoints::reduction::{closure_audit, CertificateStore, GlueRule, KnownResults};

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn threads() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

fn dimension_identities() -> Outcome {
    let v = SystemSpec::new(3).with(2, 5).vdim();
    ensure(v == -1, || format!("vdim L(3; 2^5) = {v}"))?;
    let mut checked = 1;
    for rule in GlueRule::catalogue().iter().skip(1) {
        for base in rule.base_family() {
            ensure(base.vdim() == -1, || format!("vdim {base} = {}", base.vdim()))?;
            checked += 1;
        }
    }
    let nine = GlueRule::catalogue()[1].base_family();
    ensure(nine.len() == 12, || format!("{} degree-9 bases", nine.len()))?;
    Ok(format!("{checked} systems with vdim -1"))
}

fn enumeration_counts() -> Outcome {
    let got = [
        algorithm_a_count(14),
        algorithm_b_count(14).map_err(|e| e.to_string())?,
        algorithm_a_count(40),
        algorithm_b_count(40).map_err(|e| e.to_string())?,
    ];
    ensure(got == [6816, 261, 2294011, 22], || format!("counts {got:?}"))?;
    let d40 = algorithm_b_cases(40).map_err(|e| e.to_string())?;
    ensure(d40.iter().all(|c| c.q == 56), || "a d=40 case has q != 56".into())?;
    Ok(format!("A14={} B14={} A40={} B40={} (all q=56)", got[0], got[1], got[2], got[3]))
}

fn degree14_campaign(log: &Path) -> Outcome {
    let mut config = CampaignConfig::new((14, 14), log);
    config.threads = threads();
    let summary = run_campaign(&config).map_err(|e| e.to_string())?;
    let d = &summary.degrees[0];
    ensure(d.non_special == 261 && summary.is_clean(), || format!("{d:?}"))?;
    Ok(format!("{}/261 non_special", d.non_special))
}

fn special_sensitivity() -> Outcome {
    let quadrics = SystemSpec::new(2).with(2, 2);
    let cert = check_case(&quadrics, FieldPrime::default_prime(), 0, 3).map_err(|e| e.to_string())?;
    ensure(cert.rank == 7 && cert.verdict == Verdict::Inconclusive, || format!("L(2; 2^2): {cert:?}"))?;
    let oracle = rational_oracle(&quadrics, 0).map_err(|e| e.to_string())?;
    ensure(oracle == 2 && cert.dim() == 2 && quadrics.edim() == 1, || format!("L(2; 2^2) oracle dim {oracle}"))?;

    let quartics = SystemSpec::new(4).with(2, 9);
    let cert = check_case(&quartics, FieldPrime::default_prime(), 0, 3).map_err(|e| e.to_string())?;
    ensure(cert.verdict == Verdict::Inconclusive && cert.attempts == 3, || format!("L(4; 2^9): {cert:?}"))?;
    for (i, &p) in PRIME_LADDER.iter().enumerate() {
        let field = FieldPrime::new(u64::from(p)).map_err(|e| e.to_string())?;
        let points = sample_points(&quartics, field, i as u64).map_err(|e| e.to_string())?;
        let rank = build_matrix(&quartics, &points, field).map_err(|e| e.to_string())?.rank();
        ensure(rank <= 34, || format!("attempt {i} at p={p} reached rank {rank}"))?;
    }
    let oracle = rational_oracle(&quartics, 0).map_err(|e| e.to_string())?;
    ensure(oracle >= 0, || format!("L(4; 2^9) oracle dim {oracle}"))?;
    Ok(format!("L(2;2^2) rank 7 dim 2; L(4;2^9) rank {} dim {oracle}; both inconclusive", cert.rank))
}

fn oracle_equivalence() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let opts = CheckOptions::default().with_primes(vec![FieldPrime::default_prime()]);
    let mut tested = 0;
    while tested < 120 {
        let d = rng.gen_range(1..=4);
        let mut spec = SystemSpec::new(d);
        for m in 1..=4 {
            spec = spec.with(m, rng.gen_range(0..4));
        }
        if spec.conditions() > 40 {
            continue;
        }
        let seed = rng.gen();
        let cert = check_case_with(&spec, &opts.clone().with_seed(seed)).map_err(|e| e.to_string())?;
        let exact = rational_oracle(&spec, seed).map_err(|e| e.to_string())?;
        ensure(cert.dim() == exact, || format!("{spec}: prime field {} vs exact {exact}", cert.dim()))?;
        tested += 1;
    }
    Ok(format!("{tested} specs agree"))
}

fn replay(log: &Path, scratch: &Path) -> Outcome {
    let opts = VerifyOptions {
        full: true,
        threads: threads(),
        ..VerifyOptions::default()
    };
    let clean = verify_log(log, &opts).map_err(|e| e.to_string())?;
    ensure(clean.replayed == 261 && clean.is_clean(), || format!("{clean:?}"))?;

    let text = std::fs::read_to_string(log).map_err(|e| e.to_string())?;
    let mut lines: Vec<String> = text.lines().map(String::from).collect();
    let injected = [17usize, 101, 240];
    for &n in &injected {
        let mut record: serde_json::Value = serde_json::from_str(&lines[n - 1]).map_err(|e| e.to_string())?;
        let rank = record["certificate"]["rank"].as_u64().ok_or("no rank")?;
        record["certificate"]["rank"] = (rank ^ 1).into();
        lines[n - 1] = record.to_string();
    }
    let faulty = scratch.join("faulty.jsonl");
    std::fs::write(&faulty, lines.join("\n") + "\n").map_err(|e| e.to_string())?;
    let report = verify_log(&faulty, &opts).map_err(|e| e.to_string())?;
    let found: Vec<usize> = report.mismatches.iter().map(|m| m.line).collect();
    ensure(found == injected, || format!("mismatches at lines {found:?}, injected {injected:?}"))?;
    Ok(format!("clean log 0/261 mismatches; injected {injected:?} found {found:?}"))
}

fn closure(log: &Path) -> Outcome {
    let contents = read_log(log).map_err(|e| e.to_string())?;
    let store = CertificateStore::from_certificates(contents.certificates().cloned());
    let report = closure_audit(14, &store, &KnownResults::cited());
    ensure(report.is_closed(), || format!("{} gaps, first {:?}", report.gap_count, report.gaps.first()))?;
    Ok(format!("{} targets, 0 gaps", report.targets))
}

fn extended_campaign(scratch: &Path) -> Outcome {
    let log = scratch.join("d14-18.jsonl");
    let mut config = CampaignConfig::new((14, 18), &log);
    config.threads = threads();
    let start = Instant::now();
    let summary = run_campaign(&config).map_err(|e| e.to_string())?;
    let low = start.elapsed();
    ensure(summary.is_clean(), || format!("{:?} {:?}", summary.inconclusive, summary.failed))?;
    ensure(low <= Duration::from_secs(8 * 3600), || format!("degrees 14..18 took {low:?}"))?;
    let total: u64 = summary.degrees.iter().map(|d| d.non_special).sum();

    let cases = algorithm_b_cases(40).map_err(|e| e.to_string())?;
    let case = *cases.iter().max_by_key(|c| c.conditions()).ok_or("no d=40 case")?;
    let opts = config.check_options(&case, threads()).map_err(|e| e.to_string())?;
    let start = Instant::now();
    let cert = check_case_with(&case.to_spec(), &opts).map_err(|e| e.to_string())?;
    let high = start.elapsed();
    ensure(cert.verdict == Verdict::NonSpecial, || format!("{case}: {cert:?}"))?;
    ensure(high <= Duration::from_secs(3600), || format!("d=40 case took {high:?}"))?;
    Ok(format!(
        "degrees 14..18: {total} non_special in {:.0}s; {} ({}x{}) non_special in {:.0}s",
        low.as_secs_f64(),
        cert.spec,
        cert.s,
        cert.n,
        high.as_secs_f64()
    ))
}

fn main() {
    let dir = tempfile::tempdir().expect("temporary directory");
    let scratch: PathBuf = dir.path().to_path_buf();
    let log = scratch.join("d14.jsonl");

    type Criterion<'a> = (&'a str, u64, Box<dyn Fn() -> Outcome + 'a>);
    let criteria: Vec<Criterion> = vec![
        ("dimension identities", 1, Box::new(dimension_identities)),
        ("enumeration counts", 5, Box::new(enumeration_counts)),
        ("degree 14 rank verification", 30 * 60, Box::new(|| degree14_campaign(&log))),
        ("special-system sensitivity", 60, Box::new(special_sensitivity)),
        ("oracle equivalence", 5 * 60, Box::new(oracle_equivalence)),
        ("certificate replay", 10 * 60, Box::new(|| replay(&log, &scratch))),
        ("closure audit", 20 * 60, Box::new(|| closure(&log))),
        ("extended campaign", 8 * 3600 + 3600, Box::new(|| extended_campaign(&scratch))),
    ];

    let mut failed = 0;
    for (i, (name, limit, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let secs = start.elapsed().as_secs_f64();
        let outcome = match outcome {
            Ok(msg) if secs > *limit as f64 => Err(format!("{msg}; over the {limit}s limit")),
            other => other,
        };
        match outcome {
            Ok(msg) => println!("PASS [{}] {name} ({secs:.2}s, limit {limit}s): {msg}", i + 1),
            Err(msg) => {
                failed += 1;
                println!("FAIL [{}] {name} ({secs:.2}s, limit {limit}s): {msg}", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
