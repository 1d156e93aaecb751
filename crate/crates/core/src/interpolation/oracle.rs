//! Exact dimension over the rationals for small systems, independent of the
//! prime-field path.
//!
//! Points get small integer coordinates. The chart-`c` row of a point is
//! scaled by `P_c^d`, which makes every entry an integer:
//! `coef(alpha, beta) * P_c^(alpha_c + |beta|) * prod_{i != c} P_i^(alpha_i - beta_i)`.
//! Rank comes from Bareiss elimination over `BigInt`.

use num_bigint::BigInt;
use num_traits::{One, Pow, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::model::SystemSpec;
use crate::monomials::{derivative_coefficient, derivative_orders, monomial_basis};

/// Largest monomial count the oracle accepts.
pub const ORACLE_LIMIT: u64 = 200;

/// Coordinates are drawn from `[-COORD_RANGE, COORD_RANGE]`.
const COORD_RANGE: i64 = 1000;

/// Exact `dim L` at random integer points.
pub fn rational_oracle(spec: &SystemSpec, seed: u64) -> Result<i64> {
    let n = spec.monomials();
    if n > ORACLE_LIMIT {
        return Err(Error::OracleTooLarge {
            got: n,
            limit: ORACLE_LIMIT,
        });
    }
    let points = integer_points(spec.total_points() as usize, seed);
    let rows = integer_matrix(spec, &points);
    let rank = bareiss_rank(rows);
    Ok(n as i64 - 1 - rank as i64)
}

fn proportional(a: &[i64; 4], b: &[i64; 4]) -> bool {
    (0..4).all(|i| (i + 1..4).all(|j| a[i] * b[j] == a[j] * b[i]))
}

fn integer_points(r: usize, seed: u64) -> Vec<[i64; 4]> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x6f72_6163_6c65);
    let mut out: Vec<[i64; 4]> = Vec::with_capacity(r);
    while out.len() < r {
        let p: [i64; 4] = std::array::from_fn(|_| rng.gen_range(-COORD_RANGE..=COORD_RANGE));
        if p.iter().all(|&v| v == 0) || out.iter().any(|q| proportional(q, &p)) {
            continue;
        }
        out.push(p);
    }
    out
}

pub(crate) fn integer_matrix(spec: &SystemSpec, points: &[[i64; 4]]) -> Vec<Vec<BigInt>> {
    let basis = monomial_basis(spec.degree());
    let mut rows = Vec::new();
    for (m, p) in spec.points().zip(points) {
        let chart = p.iter().position(|&v| v != 0).expect("nonzero point");
        for beta in derivative_orders(m) {
            let beta = beta.in_chart(chart);
            let row = basis
                .iter()
                .map(|alpha| {
                    if !alpha.dominates(&beta) {
                        return BigInt::zero();
                    }
                    let mut v = BigInt::from(derivative_coefficient(alpha, &beta));
                    for i in 0..4 {
                        let e = if i == chart {
                            alpha.get(i) + beta.degree()
                        } else {
                            alpha.get(i) - beta.get(i)
                        };
                        v *= Pow::pow(&BigInt::from(p[i]), e);
                    }
                    v
                })
                .collect();
            rows.push(row);
        }
    }
    rows
}

/// Rank of an integer matrix by fraction-free (Bareiss) elimination. Every
/// intermediate entry is a minor of the input, so the divisions are exact.
pub fn bareiss_rank(mut m: Vec<Vec<BigInt>>) -> usize {
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    let mut prev = BigInt::one();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(s) = (r..rows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(s, r);
        let (head, tail) = m.split_at_mut(r + 1);
        let pivot_row = &head[r];
        for row in tail.iter_mut() {
            let factor = std::mem::take(&mut row[c]);
            for j in c + 1..cols {
                let v = &pivot_row[c] * &row[j] - &factor * &pivot_row[j];
                row[j] = v / &prev;
            }
        }
        prev = pivot_row[c].clone();
        r += 1;
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;

    fn int_rows(rows: &[&[i64]]) -> Vec<Vec<BigInt>> {
        rows.iter()
            .map(|r| r.iter().map(|&v| BigInt::from(v)).collect())
            .collect()
    }

    #[test]
    fn bareiss_small() {
        assert_eq!(bareiss_rank(int_rows(&[&[1, 2], &[2, 4], &[0, 1]])), 2);
        assert_eq!(bareiss_rank(int_rows(&[&[0, 0, 0], &[0, 0, 0]])), 0);
        assert_eq!(bareiss_rank(int_rows(&[&[0, 2, 4], &[0, 1, 2], &[3, 0, 1]])), 2);
        assert_eq!(bareiss_rank(Vec::new()), 0);
        // Vandermonde 4x4 on distinct nodes is invertible.
        let v: Vec<Vec<BigInt>> = (1..=4i64)
            .map(|x| (0..4u32).map(|e| BigInt::from(x.pow(e))).collect())
            .collect();
        assert_eq!(bareiss_rank(v), 4);
    }

    #[test]
    fn oracle_examples() {
        assert_eq!(rational_oracle(&SystemSpec::new(2).with(2, 2), 1).unwrap(), 2);
        assert_eq!(rational_oracle(&SystemSpec::new(1).with(2, 1), 1).unwrap(), -1);
        assert_eq!(rational_oracle(&SystemSpec::new(3).with(2, 5), 1).unwrap(), -1);
        // Quadric through 9 general points, squared.
        assert_eq!(rational_oracle(&SystemSpec::new(4).with(2, 9), 3).unwrap(), 0);
    }

    #[test]
    fn oracle_rejects_large_systems() {
        assert!(matches!(
            rational_oracle(&SystemSpec::new(9), 0),
            Err(Error::OracleTooLarge { got: 220, .. })
        ));
        assert!(rational_oracle(&SystemSpec::new(8), 0).is_ok());
    }
}
