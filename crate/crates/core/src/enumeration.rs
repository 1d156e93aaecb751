//! Case lists: every `(q, x, y, z)` whose system must be rank-checked for a
//! degree.
//!
//! Both algorithms keep the "nearly square" cases, those with condition
//! total `S` in the window `N - 4 < S < N + 20`. Algorithm A ranges over
//! 4-, 3- and 2-points with the loop bounds `x <= ceil(N/20)`,
//! `y <= ceil(N/10)`, `z <= ceil(N/4)`; these bounds cut off a few window
//! cases with very many points of one kind, and the reference counts
//! include that truncation. Algorithm B assumes glueing has already been
//! applied: at most four 2-points, 10-points per [`QPolicy`], and
//! `2x + y <= 21` from degree 22 on.
//!
//! Cases are ordered by `(q, x, y, z)` ascending so indices are stable.

use std::io::Write;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{monomial_count, CaseSignature};

/// Smallest and largest degree Algorithm B handles.
pub const MIN_DEGREE: u32 = 13;
pub const MAX_DEGREE: u32 = 40;

/// From this degree on the number of 10-points is free and the residual
/// 4/3-points satisfy `2x + y <= 21`.
pub const FREE_Q_DEGREE: u32 = 22;

/// Window of admitted condition totals, `N - 4 < S < N + 20`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WindowSpec {
    pub n: u64,
}

impl WindowSpec {
    pub fn new(n: u64) -> Self {
        WindowSpec { n }
    }

    pub fn for_degree(d: u32) -> Self {
        WindowSpec::new(monomial_count(d))
    }

    /// Smallest admitted `S`.
    pub fn min(&self) -> u64 {
        self.n.saturating_sub(3)
    }

    /// Largest admitted `S`.
    pub fn max(&self) -> u64 {
        self.n + 19
    }

    pub fn contains(&self, s: u64) -> bool {
        in_window(s, self.n)
    }
}

pub fn in_window(s: u64, n: u64) -> bool {
    s + 4 > n && s < n + 20
}

/// How many 10-points Algorithm B places.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum QPolicy {
    Fixed(u32),
    /// Any `q` in `0..=max`.
    Free { max: u32 },
}

impl QPolicy {
    pub fn for_degree(d: u32) -> Result<Self> {
        check_degree(d)?;
        Ok(match d {
            13..=18 => QPolicy::Fixed(1),
            19 => QPolicy::Fixed(5),
            20 => QPolicy::Fixed(7),
            21 => QPolicy::Fixed(8),
            _ => QPolicy::Free {
                max: monomial_count(d).div_ceil(220) as u32,
            },
        })
    }

    fn range(&self) -> std::ops::RangeInclusive<u32> {
        match *self {
            QPolicy::Fixed(q) => q..=q,
            QPolicy::Free { max } => 0..=max,
        }
    }
}

fn check_degree(d: u32) -> Result<()> {
    if (MIN_DEGREE..=MAX_DEGREE).contains(&d) {
        Ok(())
    } else {
        Err(Error::DegreeOutOfRange {
            degree: d,
            lo: MIN_DEGREE,
            hi: MAX_DEGREE,
        })
    }
}

/// Visits the `z` values with `base + 4z` in the window and `z <= z_max`.
fn z_range(window: &WindowSpec, base: u64, z_max: u64) -> std::ops::RangeInclusive<u64> {
    if base > window.max() {
        #[allow(clippy::reversed_empty_ranges)]
        return 1..=0;
    }
    let lo = window.min().saturating_sub(base).div_ceil(4);
    let hi = ((window.max() - base) / 4).min(z_max);
    lo..=hi
}

/// Algorithm A for degree `d`: all window cases with `q = 0`.
pub fn algorithm_a_cases(d: u32) -> Vec<CaseSignature> {
    let mut out = Vec::new();
    algorithm_a_visit(d, |x, y, zs| {
        out.extend(zs.map(|z| CaseSignature::new(d, 0, x, y, z as u32)));
    });
    out
}

/// Number of Algorithm A cases without materializing them.
pub fn algorithm_a_count(d: u32) -> u64 {
    let mut count = 0;
    algorithm_a_visit(d, |_, _, zs| count += zs.count() as u64);
    count
}

fn algorithm_a_visit(d: u32, mut f: impl FnMut(u32, u32, std::ops::RangeInclusive<u64>)) {
    let n = monomial_count(d);
    let window = WindowSpec::new(n);
    let (x_max, y_max, z_max) = (n.div_ceil(20), n.div_ceil(10), n.div_ceil(4));
    for x in 0..=x_max {
        for y in 0..=y_max {
            let base = 20 * x + 10 * y;
            if base > window.max() {
                break;
            }
            f(x as u32, y as u32, z_range(&window, base, z_max));
        }
    }
}

/// Algorithm B for degree `d` in `13..=40`.
pub fn algorithm_b_cases(d: u32) -> Result<Vec<CaseSignature>> {
    let mut out = Vec::new();
    algorithm_b_visit(d, |q, x, y, zs| {
        out.extend(zs.map(|z| CaseSignature::new(d, q, x, y, z as u32)));
    })?;
    Ok(out)
}

pub fn algorithm_b_count(d: u32) -> Result<u64> {
    let mut count = 0;
    algorithm_b_visit(d, |_, _, _, zs| count += zs.count() as u64)?;
    Ok(count)
}

fn algorithm_b_visit(
    d: u32,
    mut f: impl FnMut(u32, u32, u32, std::ops::RangeInclusive<u64>),
) -> Result<()> {
    let policy = QPolicy::for_degree(d)?;
    let window = WindowSpec::for_degree(d);
    let glued = d >= FREE_Q_DEGREE;
    for q in policy.range() {
        let q_base = 220 * u64::from(q);
        if q_base > window.max() {
            break;
        }
        for x in 0u64.. {
            let x_base = q_base + 20 * x;
            if x_base > window.max() || (glued && 2 * x > 21) {
                break;
            }
            for y in 0u64.. {
                let base = x_base + 10 * y;
                if base > window.max() || (glued && 2 * x + y > 21) {
                    break;
                }
                f(q, x as u32, y as u32, z_range(&window, base, 4));
            }
        }
    }
    Ok(())
}

/// Rows and columns of the interpolation matrix of a case.
pub fn matrix_shape(case: &CaseSignature) -> (u64, u64) {
    (case.conditions(), case.monomials())
}

#[derive(Serialize)]
struct CsvRow {
    d: u32,
    q: u32,
    x: u32,
    y: u32,
    z: u32,
    #[serde(rename = "N")]
    n: u64,
    #[serde(rename = "S")]
    s: u64,
    vdim: i64,
}

/// Writes `d,q,x,y,z,N,S,vdim` with a header line.
pub fn write_csv<W: Write>(cases: &[CaseSignature], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for c in cases {
        w.serialize(CsvRow {
            d: c.degree,
            q: c.q,
            x: c.x,
            y: c.y,
            z: c.z,
            n: c.monomials(),
            s: c.conditions(),
            vdim: c.vdim(),
        })?;
    }
    w.flush().map_err(|e| Error::Csv(e.into()))?;
    Ok(())
}
