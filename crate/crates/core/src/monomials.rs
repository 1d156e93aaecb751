//! Monomial basis of degree-`d` forms in four variables and the derivative
//! orders attached to a fat point.
//!
//! Multiplicity conditions use the affine-chart convention: at a point whose
//! coordinate `c` is nonzero we set `x_c = 1` and impose all partial
//! derivatives of order `<= m - 1` in the other three variables. That gives
//! exactly `C(m + 2, 3)` conditions per point.

use std::fmt;

use serde::{Deserialize, Serialize};

/// Exponent vector `(a0, a1, a2, a3)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct MultiIndex(pub [u32; 4]);

impl MultiIndex {
    pub const ZERO: MultiIndex = MultiIndex([0; 4]);

    pub fn new(a0: u32, a1: u32, a2: u32, a3: u32) -> Self {
        MultiIndex([a0, a1, a2, a3])
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn get(&self, i: usize) -> u32 {
        self.0[i]
    }

    /// Componentwise `self >= other`.
    pub fn dominates(&self, other: &MultiIndex) -> bool {
        self.0.iter().zip(other.0.iter()).all(|(a, b)| a >= b)
    }

    /// Re-reads a chart-free derivative order (last slot zero) as an order in
    /// the three variables other than `chart`: the three leading exponents are
    /// written, in order, to the coordinates `!= chart`.
    pub fn in_chart(&self, chart: usize) -> MultiIndex {
        debug_assert_eq!(self.0[3], 0);
        let mut out = [0u32; 4];
        let mut src = 0;
        for (i, slot) in out.iter_mut().enumerate() {
            if i != chart {
                *slot = self.0[src];
                src += 1;
            }
        }
        MultiIndex(out)
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [a, b, c, d] = self.0;
        write!(f, "({a},{b},{c},{d})")
    }
}

/// All exponent vectors of total degree `d`, lexicographically descending
/// (`x0^d` first, `x3^d` last). The order is part of the certificate format.
pub fn monomial_basis(d: u32) -> Vec<MultiIndex> {
    let mut out = Vec::with_capacity(crate::model::monomial_count(d) as usize);
    for a0 in (0..=d).rev() {
        for a1 in (0..=d - a0).rev() {
            for a2 in (0..=d - a0 - a1).rev() {
                out.push(MultiIndex([a0, a1, a2, d - a0 - a1 - a2]));
            }
        }
    }
    out
}

/// Derivative orders for an `m`-point: every `(b0, b1, b2, 0)` with
/// `b0 + b1 + b2 <= m - 1`, by total order then lexicographically descending.
pub fn derivative_orders(m: u32) -> Vec<MultiIndex> {
    assert!(m >= 1, "multiplicity must be positive");
    let mut out = Vec::with_capacity(crate::model::point_conditions(m) as usize);
    for k in 0..m {
        for b0 in (0..=k).rev() {
            for b1 in (0..=k - b0).rev() {
                out.push(MultiIndex([b0, b1, k - b0 - b1, 0]));
            }
        }
    }
    out
}

/// Falling factorial `a (a-1) ... (a-b+1)`; zero when `b > a`.
pub fn falling_factorial(a: u32, b: u32) -> u128 {
    if b > a {
        return 0;
    }
    ((a - b + 1)..=a).map(u128::from).product()
}

/// Coefficient of `x^(alpha - beta)` in `d^beta x^alpha`, zero unless
/// `alpha >= beta` componentwise.
pub fn derivative_coefficient(alpha: &MultiIndex, beta: &MultiIndex) -> u128 {
    alpha
        .0
        .iter()
        .zip(beta.0.iter())
        .map(|(&a, &b)| falling_factorial(a, b))
        .product()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{conditions_count, monomial_count};
    use proptest::prelude::*;

    #[test]
    fn basis_sizes() {
        assert_eq!(monomial_basis(1).len(), 4);
        assert_eq!(monomial_basis(2).len(), 10);
        assert_eq!(monomial_basis(14).len(), 680);
        for d in 0..=40 {
            let basis = monomial_basis(d);
            assert_eq!(basis.len() as u64, monomial_count(d));
            assert!(basis.iter().all(|a| a.degree() == d));
        }
    }

    #[test]
    fn basis_is_strictly_descending_and_stable() {
        let basis = monomial_basis(7);
        assert!(basis.windows(2).all(|w| w[0] > w[1]));
        assert_eq!(basis, monomial_basis(7));
        assert_eq!(basis[0], MultiIndex::new(7, 0, 0, 0));
        assert_eq!(*basis.last().unwrap(), MultiIndex::new(0, 0, 0, 7));
    }

    #[test]
    fn derivative_order_counts() {
        assert_eq!(derivative_orders(1), vec![MultiIndex::ZERO]);
        assert_eq!(derivative_orders(2).len(), 4);
        assert_eq!(derivative_orders(4).len(), 20);
        for m in 1..=20 {
            let orders = derivative_orders(m);
            assert_eq!(orders.len() as u64, conditions_count(m).unwrap());
            assert!(orders.iter().all(|b| b.0[3] == 0 && b.degree() < m));
        }
    }

    #[test]
    fn chart_embedding() {
        let b = MultiIndex::new(1, 2, 3, 0);
        assert_eq!(b.in_chart(3), b);
        assert_eq!(b.in_chart(0), MultiIndex::new(0, 1, 2, 3));
        assert_eq!(b.in_chart(2), MultiIndex::new(1, 2, 0, 3));
    }

    #[test]
    fn coefficient_examples() {
        let c = |a: [u32; 4], b: [u32; 4]| derivative_coefficient(&MultiIndex(a), &MultiIndex(b));
        assert_eq!(c([2, 0, 0, 0], [1, 0, 0, 0]), 2);
        assert_eq!(c([1, 1, 0, 0], [2, 0, 0, 0]), 0);
        assert_eq!(c([3, 2, 0, 0], [2, 1, 0, 0]), 12);
        assert_eq!(c([40, 0, 0, 0], [19, 0, 0, 0]), falling_factorial(40, 19));
    }

    /// Dense polynomial in four variables over the integers: coefficient map.
    type Poly = std::collections::BTreeMap<[u32; 4], i128>;

    fn differentiate(p: &Poly, var: usize) -> Poly {
        let mut out = Poly::new();
        for (e, &c) in p {
            if e[var] > 0 {
                let mut e2 = *e;
                e2[var] -= 1;
                *out.entry(e2).or_insert(0) += c * i128::from(e[var]);
            }
        }
        out.retain(|_, c| *c != 0);
        out
    }

    proptest! {
        #[test]
        fn coefficient_matches_symbolic_differentiation(
            alpha in prop::array::uniform4(0u32..=10).prop_filter("deg", |a| a.iter().sum::<u32>() <= 10),
            beta in prop::array::uniform4(0u32..=5),
        ) {
            let mut p = Poly::new();
            p.insert(alpha, 1);
            for (var, &times) in beta.iter().enumerate() {
                for _ in 0..times {
                    p = differentiate(&p, var);
                }
            }
            let expected = if let Some((e, c)) = p.iter().next() {
                let mut want = alpha;
                for i in 0..4 { want[i] -= beta[i]; }
                prop_assert_eq!(*e, want);
                *c as u128
            } else {
                0
            };
            prop_assert_eq!(derivative_coefficient(&MultiIndex(alpha), &MultiIndex(beta)), expected);
        }
    }
}
