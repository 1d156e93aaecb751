//! Interpolation matrices of fat points and the per-case rank check.
//!
//! Generic position is replaced by random points over `Z/p`. The rank of the
//! interpolation matrix is lower semicontinuous in the points, so maximal
//! rank at one configuration proves maximal rank for general points (in
//! characteristic zero as well). A rank deficit proves nothing and is
//! reported as `inconclusive`.

mod certificate;
mod fundamental;
pub mod oracle;

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

pub use certificate::{Certificate, Verdict};
pub use fundamental::{reduce_fundamental, FundamentalAssignment, FundamentalReduction};
pub use oracle::rational_oracle;

use crate::error::{Error, Result};
use crate::gfp::{DenseMatrix, FieldPrime, PRIME_LADDER};
use crate::model::SystemSpec;
use crate::monomials::{derivative_orders, monomial_basis, MultiIndex};

/// Matrices above this estimated size are refused.
pub const DEFAULT_MEMORY_LIMIT: u64 = 16 << 30;

pub const DEFAULT_ATTEMPTS: u32 = 3;

const SAMPLING_RETRIES: u32 = 1000;

/// A point of P^3 over `Z/p`; not all coordinates are zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ProjectivePoint {
    coords: [u32; 4],
}

impl ProjectivePoint {
    pub fn new(coords: [u32; 4], field: FieldPrime) -> Result<Self> {
        if coords.iter().all(|&c| c == 0) {
            return Err(Error::ZeroPoint);
        }
        if let Some(&bad) = coords.iter().find(|&&c| c >= field.modulus()) {
            return Err(Error::UnreducedEntry {
                value: u64::from(bad),
                p: field.modulus(),
            });
        }
        Ok(ProjectivePoint { coords })
    }

    pub fn coords(&self) -> [u32; 4] {
        self.coords
    }

    /// Index of the first nonzero coordinate; the default chart.
    pub fn chart(&self) -> usize {
        self.coords.iter().position(|&c| c != 0).expect("nonzero point")
    }

    /// Coordinates scaled so that coordinate `chart` equals 1.
    pub fn dehomogenize(&self, chart: usize, field: FieldPrime) -> Result<[u32; 4]> {
        let inv = field.inv(self.coords[chart])?;
        Ok(self.coords.map(|c| field.mul(c, inv)))
    }

    pub fn same_point(&self, other: &ProjectivePoint, field: FieldPrime) -> bool {
        let c = self.chart();
        c == other.chart()
            && self.dehomogenize(c, field).ok() == other.dehomogenize(c, field).ok()
    }
}

/// `r` distinct points with uniform coordinates in `[0, p)`, one per point of
/// `spec` in canonical order. Deterministic in `(spec, prime, seed)`.
pub fn sample_points(spec: &SystemSpec, field: FieldPrime, seed: u64) -> Result<Vec<ProjectivePoint>> {
    let r = spec.total_points() as usize;
    let p = field.modulus();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut points: Vec<ProjectivePoint> = Vec::with_capacity(r);
    let mut retries = 0;
    while points.len() < r {
        let coords: [u32; 4] = std::array::from_fn(|_| rng.gen_range(0..p));
        let accepted = match ProjectivePoint::new(coords, field) {
            Ok(pt) if !points.iter().any(|q| q.same_point(&pt, field)) => {
                points.push(pt);
                true
            }
            _ => false,
        };
        if !accepted {
            retries += 1;
            if retries >= SAMPLING_RETRIES {
                return Err(Error::SamplingExhausted { retries });
            }
        }
    }
    Ok(points)
}

/// Full interpolation matrix (`S` rows, `N` columns), each point in its
/// default chart.
pub fn build_matrix(spec: &SystemSpec, points: &[ProjectivePoint], field: FieldPrime) -> Result<DenseMatrix> {
    let charts: Vec<usize> = points.iter().map(ProjectivePoint::chart).collect();
    build_matrix_in_charts(spec, points, &charts, field)
}

/// Like [`build_matrix`] with an explicit chart per point.
pub fn build_matrix_in_charts(
    spec: &SystemSpec,
    points: &[ProjectivePoint],
    charts: &[usize],
    field: FieldPrime,
) -> Result<DenseMatrix> {
    let basis = monomial_basis(spec.degree());
    let kept: Vec<usize> = (0..basis.len()).collect();
    assemble(spec, points, charts, &basis, &kept, field)
}

/// Rows for the points of `spec`, restricted to the columns `kept`.
fn assemble(
    spec: &SystemSpec,
    points: &[ProjectivePoint],
    charts: &[usize],
    basis: &[MultiIndex],
    kept: &[usize],
    field: FieldPrime,
) -> Result<DenseMatrix> {
    let d = spec.degree();
    if field.modulus() <= d {
        return Err(Error::PrimeTooSmallForDegree {
            p: field.modulus(),
            degree: d,
        });
    }
    let r = spec.total_points() as usize;
    if points.len() != r || charts.len() != r {
        return Err(Error::PointCount {
            expected: r,
            got: points.len().min(charts.len()),
        });
    }

    // Falling factorials a (a-1) ... (a-b+1) mod p for a, b <= d.
    let du = d as usize;
    let mut falling = vec![0u32; (du + 1) * (du + 1)];
    for a in 0..=du {
        let mut acc = 1u32;
        for b in 0..=du {
            falling[a * (du + 1) + b] = if b <= a { acc } else { 0 };
            if b < a {
                acc = field.mul(acc, (a - b) as u32);
            }
        }
    }

    struct RowPlan {
        powers: [Vec<u32>; 4],
        beta: MultiIndex,
    }
    let mut plans = Vec::with_capacity(spec.conditions() as usize);
    for ((m, pt), &chart) in spec.points().zip(points).zip(charts) {
        if chart >= 4 || pt.coords[chart] == 0 {
            return Err(Error::ZeroPoint);
        }
        let affine = pt.dehomogenize(chart, field)?;
        let powers: [Vec<u32>; 4] = std::array::from_fn(|i| {
            let mut v = Vec::with_capacity(du + 1);
            let mut acc = 1u32;
            for _ in 0..=du {
                v.push(acc);
                acc = field.mul(acc, affine[i]);
            }
            v
        });
        for beta in derivative_orders(m) {
            plans.push(RowPlan {
                powers: powers.clone(),
                beta: beta.in_chart(chart),
            });
        }
    }

    let cols = kept.len();
    let mut matrix = DenseMatrix::zeros(field, plans.len(), cols);
    let columns: Vec<MultiIndex> = kept.iter().map(|&j| basis[j]).collect();
    let data = matrix.data_mut();
    if cols > 0 {
        data.par_chunks_mut(cols)
            .zip(plans.par_iter())
            .for_each(|(row, plan)| {
                for (slot, alpha) in row.iter_mut().zip(&columns) {
                    if !alpha.dominates(&plan.beta) {
                        continue;
                    }
                    let mut v = 1u32;
                    for i in 0..4 {
                        let (a, b) = (alpha.get(i) as usize, plan.beta.get(i) as usize);
                        v = field.mul(v, falling[a * (du + 1) + b]);
                        v = field.mul(v, plan.powers[i][a - b]);
                    }
                    *slot = v;
                }
            });
    }
    Ok(matrix)
}

/// How fundamental points are chosen in [`check_case_with`].
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub enum FundamentalMode {
    #[default]
    Off,
    Auto,
    Fixed(FundamentalAssignment),
}

#[derive(Debug, Clone)]
pub struct CheckOptions {
    /// Attempt `i` uses `primes[min(i, len - 1)]`.
    pub primes: Vec<FieldPrime>,
    /// Attempt `i` samples with `seed + i`.
    pub seed: u64,
    pub max_attempts: u32,
    pub fundamental: FundamentalMode,
    pub threads: usize,
    pub memory_limit: u64,
}

impl Default for CheckOptions {
    fn default() -> Self {
        CheckOptions {
            primes: PRIME_LADDER
                .iter()
                .map(|&p| FieldPrime::new(u64::from(p)).expect("ladder primes are valid"))
                .collect(),
            seed: 0,
            max_attempts: DEFAULT_ATTEMPTS,
            fundamental: FundamentalMode::Off,
            threads: 1,
            memory_limit: DEFAULT_MEMORY_LIMIT,
        }
    }
}

impl CheckOptions {
    /// Starts the retry ladder at `prime`, followed by the default ladder
    /// primes above it.
    pub fn with_prime(mut self, prime: FieldPrime) -> Self {
        let mut primes = vec![prime];
        primes.extend(
            PRIME_LADDER
                .iter()
                .filter(|&&p| p > prime.modulus())
                .map(|&p| FieldPrime::new(u64::from(p)).expect("ladder primes are valid")),
        );
        self.primes = primes;
        self
    }

    /// Uses `primes` as the whole ladder.
    pub fn with_primes(mut self, primes: Vec<FieldPrime>) -> Self {
        self.primes = primes;
        self
    }

    pub fn with_memory_limit(mut self, bytes: u64) -> Self {
        self.memory_limit = bytes;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_attempts(mut self, attempts: u32) -> Self {
        self.max_attempts = attempts;
        self
    }

    pub fn with_fundamental(mut self, mode: FundamentalMode) -> Self {
        self.fundamental = mode;
        self
    }

    pub fn with_threads(mut self, threads: usize) -> Self {
        self.threads = threads.max(1);
        self
    }

    fn prime_for_attempt(&self, attempt: u32) -> FieldPrime {
        let i = (attempt as usize).min(self.primes.len() - 1);
        self.primes[i]
    }
}

/// Rank check with the default ladder starting at `prime`.
pub fn check_case(spec: &SystemSpec, prime: FieldPrime, seed: u64, max_attempts: u32) -> Result<Certificate> {
    let opts = CheckOptions::default()
        .with_prime(prime)
        .with_seed(seed)
        .with_attempts(max_attempts);
    check_case_with(spec, &opts)
}

pub fn check_case_with(spec: &SystemSpec, opts: &CheckOptions) -> Result<Certificate> {
    if opts.max_attempts == 0 {
        return Err(Error::NoAttempts);
    }
    if opts.primes.is_empty() {
        return Err(Error::Config("empty prime ladder".into()));
    }
    let start = Instant::now();
    let assignment = match &opts.fundamental {
        FundamentalMode::Off => FundamentalAssignment::none(),
        FundamentalMode::Auto => FundamentalAssignment::auto(spec),
        FundamentalMode::Fixed(a) => a.clone(),
    };
    let reduction = reduce_fundamental(spec, &assignment)?;
    let rows = (spec.conditions() - assignment.deleted_count()) as usize;
    let bytes = DenseMatrix::footprint_bytes(rows, reduction.kept.len());
    if bytes > opts.memory_limit {
        return Err(Error::MatrixTooLarge {
            rows,
            cols: reduction.kept.len(),
            bytes,
            limit: opts.memory_limit,
        });
    }

    let (n, s) = (spec.monomials(), spec.conditions());
    let target = n.min(s);
    let mut attempts = 0;
    let (mut rank, mut field, mut seed) = (0, opts.prime_for_attempt(0), opts.seed);
    while attempts < opts.max_attempts {
        field = opts.prime_for_attempt(attempts);
        seed = opts.seed.wrapping_add(u64::from(attempts));
        rank = reduced_rank(spec, &reduction, field, seed, opts.threads)?;
        attempts += 1;
        if rank == target {
            break;
        }
    }
    Ok(Certificate {
        spec: spec.clone(),
        prime: field.modulus(),
        seed,
        fundamental_assignment: assignment.0,
        n,
        s,
        rank,
        verdict: if rank == target {
            Verdict::NonSpecial
        } else {
            Verdict::Inconclusive
        },
        attempts,
        elapsed_ms: start.elapsed().as_millis() as u64,
    })
}

/// Rank of the full matrix computed through the fundamental reduction.
fn reduced_rank(
    spec: &SystemSpec,
    reduction: &FundamentalReduction,
    field: FieldPrime,
    seed: u64,
    threads: usize,
) -> Result<u64> {
    let points = sample_points(&reduction.residual, field, seed)?;
    let charts: Vec<usize> = points.iter().map(ProjectivePoint::chart).collect();
    let basis = monomial_basis(spec.degree());
    let matrix = assemble(&reduction.residual, &points, &charts, &basis, &reduction.kept, field)?;
    let rank = matrix.rank_blocked(threads) as u64;
    Ok(rank + reduction.deleted.len() as u64)
}

/// Recomputes the rank recorded in a certificate.
pub fn replay(cert: &Certificate, threads: usize) -> Result<u64> {
    let field = FieldPrime::new(u64::from(cert.prime))?;
    let assignment = FundamentalAssignment(cert.fundamental_assignment.clone());
    let reduction = reduce_fundamental(&cert.spec, &assignment)?;
    reduced_rank(&cert.spec, &reduction, field, cert.seed, threads)
}
