//! Arithmetic in `Z/p` and dense rank computation.
//!
//! [`DenseMatrix::rank`] is a plain fraction-free elimination kept as the
//! reference; [`DenseMatrix::rank_blocked`] is the panel-blocked kernel used
//! for the large interpolation matrices. Both return the same number for
//! every input.

mod blocked;

use crate::error::{Error, Result};

/// Default modulus for rank checks.
pub const DEFAULT_PRIME: u32 = 32003;

/// Moduli used, in order, when a rank check is retried.
pub const PRIME_LADDER: [u32; 3] = [32003, 65537, 104729];

/// Largest admissible modulus (exclusive).
pub const PRIME_LIMIT: u64 = 1 << 31;

/// Smallest modulus (exclusive) usable for interpolation matrices: every
/// falling-factorial factor is at most 40.
pub const COEFFICIENT_BOUND: u64 = 40;

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n % 2 == 0 {
        return n == 2;
    }
    let mut f = 3;
    while f * f <= n {
        if n % f == 0 {
            return false;
        }
        f += 2;
    }
    true
}

/// A prime modulus below `2^31` with a precomputed Barrett constant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct FieldPrime {
    p: u32,
    barrett: u64,
}

impl FieldPrime {
    /// A modulus for interpolation work: prime with `40 < p < 2^31`.
    pub fn new(p: u64) -> Result<Self> {
        if p <= COEFFICIENT_BOUND {
            return Err(Error::PrimeOutOfRange {
                p,
                reason: "must exceed 40 so derivative coefficients stay nonzero",
            });
        }
        Self::small(p)
    }

    /// Any prime below `2^31`. Small primes are only meaningful for testing
    /// the elimination kernels; interpolation requires [`FieldPrime::new`].
    pub fn small(p: u64) -> Result<Self> {
        if p >= PRIME_LIMIT {
            return Err(Error::PrimeOutOfRange {
                p,
                reason: "must be below 2^31",
            });
        }
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        let p = p as u32;
        Ok(FieldPrime {
            p,
            barrett: u64::MAX / u64::from(p),
        })
    }

    pub fn default_prime() -> Self {
        FieldPrime::new(u64::from(DEFAULT_PRIME)).expect("default prime is valid")
    }

    #[inline]
    pub fn modulus(&self) -> u32 {
        self.p
    }

    /// `x mod p` for any `u64`.
    #[inline(always)]
    pub fn reduce(&self, x: u64) -> u32 {
        let q = ((u128::from(x) * u128::from(self.barrett)) >> 64) as u64;
        let mut r = x - q * u64::from(self.p);
        if r >= u64::from(self.p) {
            r -= u64::from(self.p);
        }
        r as u32
    }

    pub fn reduce_u128(&self, x: u128) -> u32 {
        (x % u128::from(self.p)) as u32
    }

    pub fn reduce_i64(&self, x: i64) -> u32 {
        x.rem_euclid(i64::from(self.p)) as u32
    }

    #[inline]
    pub fn add(&self, a: u32, b: u32) -> u32 {
        let s = u64::from(a) + u64::from(b);
        if s >= u64::from(self.p) {
            (s - u64::from(self.p)) as u32
        } else {
            s as u32
        }
    }

    #[inline]
    pub fn neg(&self, a: u32) -> u32 {
        if a == 0 {
            0
        } else {
            self.p - a
        }
    }

    #[inline]
    pub fn sub(&self, a: u32, b: u32) -> u32 {
        self.add(a, self.neg(b))
    }

    #[inline(always)]
    pub fn mul(&self, a: u32, b: u32) -> u32 {
        self.reduce(u64::from(a) * u64::from(b))
    }

    pub fn pow(&self, base: u32, mut exp: u64) -> u32 {
        let mut acc = 1 % self.p;
        let mut b = base % self.p;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul(acc, b);
            }
            b = self.mul(b, b);
            exp >>= 1;
        }
        acc
    }

    pub fn inv(&self, a: u32) -> Result<u32> {
        let a = a % self.p;
        if a == 0 {
            return Err(Error::ZeroInverse);
        }
        // Extended Euclid on (a, p).
        let (mut r0, mut r1) = (i64::from(self.p), i64::from(a));
        let (mut t0, mut t1) = (0i64, 1i64);
        while r1 != 0 {
            let q = r0 / r1;
            (r0, r1) = (r1, r0 - q * r1);
            (t0, t1) = (t1, t0 - q * t1);
        }
        debug_assert_eq!(r0, 1);
        Ok(self.reduce_i64(t0))
    }

    /// How many products of two reduced residues can be added to an
    /// accumulator holding a reduced residue before a `u64` could overflow.
    pub(crate) fn lazy_products(&self) -> usize {
        let pm1 = u64::from(self.p - 1);
        match pm1.checked_mul(pm1) {
            Some(0) | None => usize::MAX,
            Some(sq) => usize::try_from((u64::MAX - u64::from(self.p)) / sq).unwrap_or(usize::MAX),
        }
    }
}

/// Row-major dense matrix over `Z/p`; every entry is in `[0, p)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DenseMatrix {
    field: FieldPrime,
    rows: usize,
    cols: usize,
    data: Vec<u32>,
}

impl DenseMatrix {
    pub fn new(field: FieldPrime, rows: usize, cols: usize, data: Vec<u32>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::MatrixShape {
                rows,
                cols,
                got: data.len(),
            });
        }
        if let Some(&bad) = data.iter().find(|&&v| v >= field.p) {
            return Err(Error::UnreducedEntry {
                value: u64::from(bad),
                p: field.p,
            });
        }
        Ok(DenseMatrix {
            field,
            rows,
            cols,
            data,
        })
    }

    pub fn zeros(field: FieldPrime, rows: usize, cols: usize) -> Self {
        DenseMatrix {
            field,
            rows,
            cols,
            data: vec![0; rows * cols],
        }
    }

    pub fn identity(field: FieldPrime, n: usize) -> Self {
        let mut m = Self::zeros(field, n, n);
        for i in 0..n {
            m.data[i * n + i] = 1 % field.p;
        }
        m
    }

    /// Entries from `f(row, col)`, reduced modulo `p`.
    pub fn from_fn(
        field: FieldPrime,
        rows: usize,
        cols: usize,
        mut f: impl FnMut(usize, usize) -> u64,
    ) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(field.reduce(f(i, j)));
            }
        }
        DenseMatrix {
            field,
            rows,
            cols,
            data,
        }
    }

    /// Interprets signed integer rows modulo `p`.
    pub fn from_integer_rows(field: FieldPrime, rows: &[Vec<i64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(rows.len() * cols);
        for row in rows {
            if row.len() != cols {
                return Err(Error::MatrixShape {
                    rows: rows.len(),
                    cols,
                    got: row.len(),
                });
            }
            data.extend(row.iter().map(|&v| field.reduce_i64(v)));
        }
        Ok(DenseMatrix {
            field,
            rows: rows.len(),
            cols,
            data,
        })
    }

    /// Estimated bytes needed to hold a `rows x cols` matrix.
    pub fn footprint_bytes(rows: usize, cols: usize) -> u64 {
        (rows as u64) * (cols as u64) * std::mem::size_of::<u32>() as u64
    }

    pub fn field(&self) -> FieldPrime {
        self.field
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn data(&self) -> &[u32] {
        &self.data
    }

    pub(crate) fn data_mut(&mut self) -> &mut [u32] {
        &mut self.data
    }

    pub fn get(&self, i: usize, j: usize) -> u32 {
        self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: u32) {
        self.data[i * self.cols + j] = self.field.reduce(u64::from(v));
    }

    pub fn row(&self, i: usize) -> &[u32] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn swap_rows(&mut self, a: usize, b: usize) {
        swap_rows(&mut self.data, self.cols, a, b);
    }

    pub fn scale_row(&mut self, i: usize, c: u32) {
        let f = self.field;
        let cols = self.cols;
        for v in &mut self.data[i * cols..(i + 1) * cols] {
            *v = f.mul(*v, c);
        }
    }

    pub fn transpose(&self) -> DenseMatrix {
        let mut out = DenseMatrix::zeros(self.field, self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.data[j * self.rows + i] = self.data[i * self.cols + j];
            }
        }
        out
    }

    /// Rank by fraction-free elimination with first-nonzero pivoting.
    pub fn rank(mut self) -> usize {
        let f = self.field;
        let (rows, cols) = (self.rows, self.cols);
        let mut r = 0;
        for c in 0..cols {
            if r == rows {
                break;
            }
            let Some(s) = (r..rows).find(|&i| self.data[i * cols + c] != 0) else {
                continue;
            };
            self.swap_rows(s, r);
            let (head, tail) = self.data.split_at_mut((r + 1) * cols);
            let pivot_row = &head[r * cols..];
            let pivot = u64::from(pivot_row[c]);
            for row in tail.chunks_exact_mut(cols) {
                let factor = row[c];
                if factor == 0 {
                    continue;
                }
                let neg = u64::from(f.neg(factor));
                // row <- pivot * row - factor * pivot_row
                for (v, &pv) in row[c..].iter_mut().zip(&pivot_row[c..]) {
                    *v = f.reduce(pivot * u64::from(*v) + neg * u64::from(pv));
                }
            }
            r += 1;
        }
        r
    }

    /// Rank via the blocked kernel, spreading row updates over `threads`
    /// workers. Identical to [`DenseMatrix::rank`] on every input.
    pub fn rank_blocked(mut self, threads: usize) -> usize {
        blocked::rank_in_place(
            self.field,
            self.rows,
            self.cols,
            &mut self.data,
            threads.max(1),
        )
    }
}

pub fn rank(m: DenseMatrix) -> usize {
    m.rank()
}

pub fn rank_blocked(m: DenseMatrix, threads: usize) -> usize {
    m.rank_blocked(threads)
}

pub(crate) fn swap_rows(data: &mut [u32], cols: usize, a: usize, b: usize) {
    if a == b {
        return;
    }
    let (lo, hi) = (a.min(b), a.max(b));
    let (head, tail) = data.split_at_mut(hi * cols);
    head[lo * cols..(lo + 1) * cols].swap_with_slice(&mut tail[..cols]);
}
