use std::fmt;

use serde::{Deserialize, Serialize};

use crate::model::{DimensionReport, SystemSpec};

/// Outcome of a rank check. A maximal rank at sampled points certifies
/// non-specialty; a deficit is never a proof of speciality.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    NonSpecial,
    Inconclusive,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::NonSpecial => "non_special",
            Verdict::Inconclusive => "inconclusive",
        })
    }
}

/// Replayable record of one rank check.
///
/// `N` and `S` are the monomial and condition counts of the whole system and
/// `rank` is the rank of the whole interpolation matrix. With a fundamental
/// assignment, the assigned points contribute `C(m + 2, 3)` each to `rank`
/// (their rows are unit vectors) and only the reduced matrix is eliminated.
/// Rebuilding from `(prime, seed, fundamental_assignment)` gives the same
/// `rank` again.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Certificate {
    pub spec: SystemSpec,
    pub prime: u32,
    pub seed: u64,
    /// `(coordinate index, multiplicity)` for points placed at `e_i`.
    pub fundamental_assignment: Vec<(usize, u32)>,
    #[serde(rename = "N")]
    pub n: u64,
    #[serde(rename = "S")]
    pub s: u64,
    pub rank: u64,
    pub verdict: Verdict,
    pub attempts: u32,
    pub elapsed_ms: u64,
}

impl Certificate {
    pub fn is_maximal_rank(&self) -> bool {
        self.rank == self.n.min(self.s)
    }

    pub fn dim(&self) -> i64 {
        self.n as i64 - 1 - self.rank as i64
    }

    pub fn report(&self) -> DimensionReport {
        DimensionReport::formula(&self.spec).with_rank(self.rank)
    }

    /// Columns deleted by the fundamental assignment (equal to the rows it
    /// removes).
    pub fn fundamental_size(&self) -> u64 {
        self.fundamental_assignment
            .iter()
            .map(|&(_, m)| crate::model::point_conditions(m))
            .sum()
    }

    /// Copy without the timing field, for determinism comparisons.
    pub fn without_timing(&self) -> Certificate {
        Certificate {
            elapsed_ms: 0,
            ..self.clone()
        }
    }

    /// Checks the recorded shape and verdict against the model formulas.
    pub fn consistent(&self) -> Result<(), String> {
        if self.n != self.spec.monomials() {
            return Err(format!("N = {} but the model gives {}", self.n, self.spec.monomials()));
        }
        if self.s != self.spec.conditions() {
            return Err(format!("S = {} but the model gives {}", self.s, self.spec.conditions()));
        }
        if self.rank > self.n.min(self.s) {
            return Err(format!("rank {} exceeds min(N, S)", self.rank));
        }
        let expected = if self.is_maximal_rank() {
            Verdict::NonSpecial
        } else {
            Verdict::Inconclusive
        };
        if self.verdict != expected {
            return Err(format!("verdict {} does not match rank {}", self.verdict, self.rank));
        }
        Ok(())
    }
}
