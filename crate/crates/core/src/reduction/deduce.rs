//! Extending window certificates to every system of a degree.
//!
//! A target is first glued. If the glued system has `S >= N` it is empty as
//! soon as its points dominate those of a checked empty system (each checked
//! point matched to a distinct glued point of at least its multiplicity). If
//! `S <= N` its conditions are independent as soon as it is dominated by a
//! checked system whose conditions are independent. Either way the glued
//! system is non-special, hence so is the target. When the glued target is
//! not covered, systems with a few points more (below `N`) or fewer (above
//! `N`) are tried before glueing.

use std::collections::{BTreeMap, HashMap};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{glue_reduce_traced, validate_glue_rule, GlueLimits, GlueRule, KnownResults};
use crate::interpolation::{Certificate, Verdict};
use crate::model::{monomial_count, CaseSignature, SystemSpec};

/// Certificates keyed by case.
#[derive(Debug, Clone, Default)]
pub struct CertificateStore {
    certs: BTreeMap<CaseSignature, Certificate>,
}

impl CertificateStore {
    pub fn new() -> Self {
        CertificateStore::default()
    }

    /// Keeps the first certificate per case. Returns `false` for duplicates
    /// and for systems that are not 10/4/3/2-point cases.
    pub fn insert(&mut self, cert: Certificate) -> bool {
        let Some(sig) = CaseSignature::from_spec(&cert.spec) else {
            return false;
        };
        if self.certs.contains_key(&sig) {
            return false;
        }
        self.certs.insert(sig, cert);
        true
    }

    pub fn from_certificates(certs: impl IntoIterator<Item = Certificate>) -> Self {
        let mut store = CertificateStore::new();
        for c in certs {
            store.insert(c);
        }
        store
    }

    pub fn get(&self, case: &CaseSignature) -> Option<&Certificate> {
        self.certs.get(case)
    }

    pub fn len(&self) -> usize {
        self.certs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.certs.is_empty()
    }

    /// Certificates of degree `d` in case order.
    pub fn degree(&self, d: u32) -> impl Iterator<Item = (&CaseSignature, &Certificate)> {
        let lo = CaseSignature::new(d, 0, 0, 0, 0);
        let hi = CaseSignature::new(d + 1, 0, 0, 0, 0);
        self.certs.range(lo..hi)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&CaseSignature, &Certificate)> {
        self.certs.iter()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "step", rename_all = "snake_case")]
pub enum ProofStep {
    Target { system: SystemSpec },
    /// Covered by a result outside the store.
    Known { system: SystemSpec, source: String },
    /// Points added to a target with `S <= N`: independence of the larger
    /// system's conditions implies independence of the smaller one's.
    AddPoints {
        before: SystemSpec,
        after: SystemSpec,
    },
    /// Points removed from a target with `S >= N`: emptiness of the
    /// smaller system implies emptiness of the larger one.
    RemovePoints {
        before: SystemSpec,
        after: SystemSpec,
    },
    Glue {
        rule: String,
        before: SystemSpec,
        after: SystemSpec,
    },
    /// The system itself has a maximal-rank certificate.
    Checked { case: CaseSignature, rank: u64 },
    /// The system contains the points of an empty checked system.
    EmptySubsystem {
        system: SystemSpec,
        checked: CaseSignature,
        rank: u64,
    },
    /// The system is contained in a checked system with independent
    /// conditions.
    IndependentSupersystem {
        system: SystemSpec,
        checked: CaseSignature,
        rank: u64,
    },
}

/// Steps from the target to a certificate; serializes as a JSON array.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ProofChain {
    pub steps: Vec<ProofStep>,
}

impl ProofChain {
    /// The certificate or citation the chain ends in.
    pub fn last(&self) -> &ProofStep {
        self.steps.last().expect("chains are never empty")
    }
}

/// A target that could not be deduced.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Gap {
    pub target: SystemSpec,
    pub glued: SystemSpec,
    pub reason: String,
}

/// `small` is dominated by `big`: the points can be matched injectively
/// with each point of `small` sent to one of at least its multiplicity.
fn dominated(small: &SystemSpec, big: &SystemSpec) -> bool {
    small.degree() == big.degree()
        && small.counts().all(|(t, _)| {
            let at_least = |s: &SystemSpec| -> u64 {
                s.counts().filter(|&(m, _)| m >= t).map(|(_, c)| u64::from(c)).sum()
            };
            at_least(small) <= at_least(big)
        })
}

/// Rules usable under `known`.
fn valid_rules(known: &KnownResults) -> Vec<GlueRule> {
    GlueRule::catalogue()
        .into_iter()
        .filter(|r| validate_glue_rule(r, known))
        .collect()
}

pub fn deduce(target: &SystemSpec, store: &CertificateStore, known: &KnownResults) -> Result<ProofChain, Gap> {
    let rules = valid_rules(known);
    deduce_with(target, store, known, &rules)
}

fn deduce_with(
    target: &SystemSpec,
    store: &CertificateStore,
    known: &KnownResults,
    rules: &[GlueRule],
) -> Result<ProofChain, Gap> {
    let mut steps = vec![ProofStep::Target {
        system: target.clone(),
    }];
    if let Some(source) = known.citation(target) {
        steps.push(ProofStep::Known {
            system: target.clone(),
            source: source.to_string(),
        });
        return Ok(ProofChain { steps });
    }
    let limits = GlueLimits::for_degree(target.degree());
    let (glued, direct) = glue_and_settle(target, store, rules, &limits);
    if let Some(tail) = direct {
        steps.extend(tail);
        return Ok(ProofChain { steps });
    }
    for (neighbour, step) in neighbours(target) {
        if let (_, Some(tail)) = glue_and_settle(&neighbour, store, rules, &limits) {
            steps.push(step);
            steps.extend(tail);
            return Ok(ProofChain { steps });
        }
    }
    Err(Gap {
        target: target.clone(),
        glued: glued.clone(),
        reason: format!(
            "no certificate of degree {} covers the glued system (S = {}, N = {})",
            glued.degree(),
            glued.conditions(),
            glued.monomials()
        ),
    })
}

/// Glue steps and the finishing step, or only the glued system on failure.
fn glue_and_settle(
    spec: &SystemSpec,
    store: &CertificateStore,
    rules: &[GlueRule],
    limits: &GlueLimits,
) -> (SystemSpec, Option<Vec<ProofStep>>) {
    let (glued, trace) = glue_reduce_traced(spec, rules, limits);
    let Some(last) = settle(&glued, store) else {
        return (glued, None);
    };
    let mut steps = Vec::new();
    let mut current = spec.clone();
    for g in trace {
        let before = current.clone();
        for &(m, c) in &g.consumed {
            current.remove_points(m, c);
        }
        current.add_points(g.produced, 1).expect("positive multiplicity");
        steps.push(ProofStep::Glue {
            rule: g.rule,
            before,
            after: current.clone(),
        });
    }
    debug_assert_eq!(current, glued);
    steps.push(last);
    (glued, Some(steps))
}

/// Candidates tried per target when the glued target itself is not covered.
pub const NEIGHBOUR_LIMIT: usize = 256;

/// Systems reached by adding (if `S <= N`) or removing (if `S >= N`) 4-, 3-
/// and 2-points without crossing `S = N`, smallest change first.
fn neighbours(target: &SystemSpec) -> Vec<(SystemSpec, ProofStep)> {
    let n = target.monomials();
    let s = target.conditions();
    let mut out = Vec::new();
    let changes = |budget: u64, out: &mut Vec<(u32, u32, u32)>| {
        for t in 1..=budget {
            for i in 0..=t / 20 {
                for j in 0..=(t - 20 * i) / 10 {
                    let rest = t - 20 * i - 10 * j;
                    if rest % 4 == 0 {
                        out.push((i as u32, j as u32, (rest / 4) as u32));
                        if out.len() == NEIGHBOUR_LIMIT {
                            return;
                        }
                    }
                }
            }
        }
    };
    if s <= n {
        let mut deltas = Vec::new();
        changes(n - s, &mut deltas);
        for (i, j, k) in deltas {
            let mut after = target.clone();
            for (m, c) in [(4, i), (3, j), (2, k)] {
                after.add_points(m, c).expect("positive multiplicity");
            }
            let step = ProofStep::AddPoints {
                before: target.clone(),
                after: after.clone(),
            };
            out.push((after, step));
        }
    }
    if s >= n {
        let mut deltas = Vec::new();
        changes(s - n, &mut deltas);
        for (i, j, k) in deltas {
            let mut after = target.clone();
            if [(4, i), (3, j), (2, k)].iter().all(|&(m, c)| after.remove_points(m, c)) {
                let step = ProofStep::RemovePoints {
                    before: target.clone(),
                    after: after.clone(),
                };
                out.push((after, step));
            }
        }
    }
    out
}

/// The certificate step that finishes a glued system, if any.
fn settle(glued: &SystemSpec, store: &CertificateStore) -> Option<ProofStep> {
    if let Some(case) = CaseSignature::from_spec(glued) {
        if let Some(cert) = store.get(&case) {
            if cert.verdict == Verdict::NonSpecial {
                return Some(ProofStep::Checked { case, rank: cert.rank });
            }
        }
    }
    let n = monomial_count(glued.degree());
    let s = glued.conditions();
    let usable = store
        .degree(glued.degree())
        .filter(|(_, c)| c.verdict == Verdict::NonSpecial);
    for (case, cert) in usable {
        if s >= n && cert.rank == n && dominated(&cert.spec, glued) {
            return Some(ProofStep::EmptySubsystem {
                system: glued.clone(),
                checked: *case,
                rank: cert.rank,
            });
        }
        if s <= n && cert.rank == cert.s && dominated(glued, &cert.spec) {
            return Some(ProofStep::IndependentSupersystem {
                system: glued.clone(),
                checked: *case,
                rank: cert.rank,
            });
        }
    }
    None
}

/// Gaps kept in full in an audit report; the rest are only counted.
pub const AUDIT_GAP_SAMPLE: usize = 1000;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AuditReport {
    pub degree: u32,
    /// Largest condition total audited.
    pub max_conditions: u64,
    pub targets: u64,
    pub proven: u64,
    pub gap_count: u64,
    /// The first gaps in `(x, y, z)` order; empty when the store has no
    /// certificate of this degree at all.
    pub gaps: Vec<Gap>,
}

impl AuditReport {
    pub fn is_closed(&self) -> bool {
        self.gap_count == 0
    }
}

/// Tries to deduce every `L(d; 4^x, 3^y, 2^z)` with
/// `S <= N + C(6,3) + 23`, beyond which removing one 4-point lands in the
/// audited range again.
pub fn closure_audit(d: u32, store: &CertificateStore, known: &KnownResults) -> AuditReport {
    let n = monomial_count(d);
    let max_conditions = n + 20 + 23;
    let rules = valid_rules(known);
    let limits = GlueLimits::for_degree(d);
    let x_max = max_conditions / 20;
    if store.degree(d).next().is_none() {
        let targets = (0..=x_max)
            .map(|x| {
                let rest = max_conditions - 20 * x;
                (0..=rest / 10).map(|y| (rest - 10 * y) / 4 + 1).sum::<u64>()
            })
            .sum();
        return AuditReport {
            degree: d,
            max_conditions,
            targets,
            proven: 0,
            gap_count: targets,
            gaps: Vec::new(),
        };
    }
    let per_x: Vec<(u64, u64, Vec<Gap>)> = (0..=x_max)
        .into_par_iter()
        .map(|x| {
            let mut settled: HashMap<SystemSpec, bool> = HashMap::new();
            let (mut targets, mut gap_count, mut gaps) = (0u64, 0u64, Vec::new());
            let rest = max_conditions - 20 * x;
            for y in 0..=rest / 10 {
                for z in 0..=(rest - 10 * y) / 4 {
                    targets += 1;
                    let target = SystemSpec::new(d).with(4, x as u32).with(3, y as u32).with(2, z as u32);
                    if known.citation(&target).is_some() {
                        continue;
                    }
                    let (glued, _) = glue_reduce_traced(&target, &rules, &limits);
                    let direct = *settled
                        .entry(glued.clone())
                        .or_insert_with(|| settle(&glued, store).is_some());
                    if direct {
                        continue;
                    }
                    if let Err(gap) = deduce_with(&target, store, known, &rules) {
                        gap_count += 1;
                        if gaps.len() < AUDIT_GAP_SAMPLE {
                            gaps.push(gap);
                        }
                    }
                }
            }
            (targets, gap_count, gaps)
        })
        .collect();
    let mut report = AuditReport {
        degree: d,
        max_conditions,
        targets: 0,
        proven: 0,
        gap_count: 0,
        gaps: Vec::new(),
    };
    for (targets, gap_count, gaps) in per_x {
        report.targets += targets;
        report.gap_count += gap_count;
        let room = AUDIT_GAP_SAMPLE - report.gaps.len();
        report.gaps.extend(gaps.into_iter().take(room));
    }
    report.proven = report.targets - report.gap_count;
    report
}
