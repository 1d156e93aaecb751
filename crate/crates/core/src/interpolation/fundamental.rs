//! Placing up to four points at the coordinate points `e_0, ..., e_3`.
//!
//! An `m`-point at `e_i` has, in chart `i`, exactly one nonzero entry per
//! derivative row: in the column of the monomial with `alpha_k = beta_k` for
//! `k != i`. Those columns are the monomials with `alpha_i > d - m`. Deleting
//! them together with the point's rows leaves a matrix whose rank is smaller
//! by exactly `C(m + 2, 3)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{point_conditions, SystemSpec};
use crate::monomials::monomial_basis;

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct FundamentalAssignment(pub Vec<(usize, u32)>);

impl FundamentalAssignment {
    pub fn none() -> Self {
        FundamentalAssignment(Vec::new())
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Chooses the largest multiplicities first, keeping `m <= d` and
    /// `m_i + m_j <= d` for every chosen pair, up to four points.
    pub fn auto(spec: &SystemSpec) -> Self {
        let d = spec.degree();
        let mut chosen: Vec<u32> = Vec::new();
        for m in spec.points() {
            if chosen.len() == 4 {
                break;
            }
            if m <= d && chosen.iter().all(|&c| c + m <= d) {
                chosen.push(m);
            }
        }
        FundamentalAssignment(chosen.into_iter().enumerate().collect())
    }

    pub fn deleted_count(&self) -> u64 {
        self.0.iter().map(|&(_, m)| point_conditions(m)).sum()
    }
}

/// Columns removed by a fundamental assignment and the points still to be
/// sampled.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FundamentalReduction {
    pub assignment: FundamentalAssignment,
    /// Indices into `monomial_basis(d)` of deleted columns, ascending.
    pub deleted: Vec<usize>,
    /// Indices of the remaining columns, ascending.
    pub kept: Vec<usize>,
    pub residual: SystemSpec,
}

pub fn reduce_fundamental(
    spec: &SystemSpec,
    assignment: &FundamentalAssignment,
) -> Result<FundamentalReduction> {
    let d = spec.degree();
    if assignment.0.len() > 4 {
        return Err(Error::Fundamental(format!(
            "{} points assigned, at most 4 coordinate points exist",
            assignment.0.len()
        )));
    }
    let mut seen = [false; 4];
    let mut residual = spec.clone();
    for &(coord, m) in &assignment.0 {
        if coord >= 4 {
            return Err(Error::Fundamental(format!("coordinate index {coord} out of range")));
        }
        if std::mem::replace(&mut seen[coord], true) {
            return Err(Error::Fundamental(format!("coordinate {coord} assigned twice")));
        }
        if m > d {
            return Err(Error::Fundamental(format!("multiplicity {m} exceeds degree {d}")));
        }
        if !residual.remove_points(m, 1) {
            return Err(Error::Fundamental(format!("no {m}-point left to assign")));
        }
    }
    for (i, &(_, a)) in assignment.0.iter().enumerate() {
        for &(_, b) in &assignment.0[i + 1..] {
            if a + b > d {
                return Err(Error::Fundamental(format!(
                    "multiplicities {a} and {b} overlap in degree {d}"
                )));
            }
        }
    }

    let mut deleted = Vec::new();
    let mut kept = Vec::new();
    for (idx, alpha) in monomial_basis(d).iter().enumerate() {
        let hit = assignment.0.iter().any(|&(i, m)| alpha.get(i) + m > d);
        if hit {
            deleted.push(idx);
        } else {
            kept.push(idx);
        }
    }
    debug_assert_eq!(deleted.len() as u64, assignment.deleted_count());
    Ok(FundamentalReduction {
        assignment: assignment.clone(),
        deleted,
        kept,
        residual,
    })
}
