//! Panel-blocked elimination.
//!
//! Columns are processed in panels of [`PANEL`] columns. A panel is factored
//! recursively: the left half is factored, its pivot rows are completed on
//! the right half by a small triangular solve, the rows below receive all of
//! the left half's updates at once, and then the right half is factored.
//! Below [`BASE`] columns plain elimination is used, with multipliers stored
//! in place of the eliminated entries. After a panel the trailing columns are
//! updated the same way.
//!
//! Block updates accumulate products of reduced residues in `u64` and reduce
//! once per output entry, as long as the prime leaves enough headroom
//! (always for primes below `2^16`). The update of rows below a block is
//! register-tiled: a tile of `R` rows by `T` columns stays in registers while
//! the pivot rows stream past. Rows are independent, so block updates and the
//! per-pivot base-case updates are split across worker threads.

use rayon::prelude::*;

use super::{swap_rows, FieldPrime};

const PANEL: usize = 256;
const BASE: usize = 16;
const CHUNK: usize = 512;
/// Rows per parallel task.
const UPDATE_ROWS: usize = 256;
const COLUMN_BLOCK: usize = 512;

pub(super) fn rank_in_place(
    field: FieldPrime,
    rows: usize,
    cols: usize,
    data: &mut [u32],
    threads: usize,
) -> usize {
    if rows == 0 || cols == 0 {
        return 0;
    }
    let ctx = Ctx {
        field,
        isa: Isa::detect(),
        rows,
        cols,
        parallel: threads > 1,
    };
    if threads <= 1 {
        return eliminate(&ctx, data);
    }
    match rayon::ThreadPoolBuilder::new().num_threads(threads).build() {
        Ok(pool) => pool.install(|| eliminate(&ctx, data)),
        Err(_) => eliminate(&Ctx { parallel: false, ..ctx }, data),
    }
}

#[derive(Clone, Copy)]
struct Ctx {
    field: FieldPrime,
    isa: Isa,
    rows: usize,
    cols: usize,
    parallel: bool,
}

fn eliminate(ctx: &Ctx, data: &mut [u32]) -> usize {
    let mut rank = 0;
    let mut c0 = 0;
    while c0 < ctx.cols && rank < ctx.rows {
        let c1 = (c0 + PANEL).min(ctx.cols);
        let pivots = factor(ctx, data, rank, c0, c1);
        if !pivots.is_empty() && c1 < ctx.cols {
            solve_pivot_rows(ctx, data, rank, &pivots, c1, ctx.cols);
            update_below(ctx, data, rank, &pivots, c1, ctx.cols);
        }
        rank += pivots.len();
        c0 = c1;
    }
    rank
}

/// Factors columns `c0..c1` of rows `top..`, touching no other columns.
/// Returns the pivot columns; pivot `j` ends up in row `top + j`.
fn factor(ctx: &Ctx, data: &mut [u32], top: usize, c0: usize, c1: usize) -> Vec<usize> {
    if top >= ctx.rows {
        return Vec::new();
    }
    if c1 - c0 <= BASE {
        return factor_base(ctx, data, top, c0, c1);
    }
    let mid = c0 + ((c1 - c0) / 2).next_multiple_of(BASE).min(c1 - c0 - 1);
    let mut pivots = factor(ctx, data, top, c0, mid);
    if !pivots.is_empty() {
        solve_pivot_rows(ctx, data, top, &pivots, mid, c1);
        update_below(ctx, data, top, &pivots, mid, c1);
    }
    let right = factor(ctx, data, top + pivots.len(), mid, c1);
    pivots.extend(right);
    pivots
}

fn factor_base(ctx: &Ctx, data: &mut [u32], top: usize, c0: usize, c1: usize) -> Vec<usize> {
    let (field, rows, cols) = (ctx.field, ctx.rows, ctx.cols);
    let mut pivots = Vec::new();
    for c in c0..c1 {
        let prow = top + pivots.len();
        if prow == rows {
            break;
        }
        let Some(s) = (prow..rows).find(|&i| data[i * cols + c] != 0) else {
            continue;
        };
        swap_rows(data, cols, s, prow);
        let (head, below) = data.split_at_mut((prow + 1) * cols);
        let pivot_seg = &head[prow * cols + c + 1..prow * cols + c1];
        let inv = field.inv(head[prow * cols + c]).expect("pivot is nonzero");
        let eliminate_row = |row: &mut [u32]| {
            let v = row[c];
            if v == 0 {
                return;
            }
            let l = field.mul(v, inv);
            row[c] = l;
            let neg = u64::from(field.neg(l));
            for (x, &pv) in row[c + 1..c1].iter_mut().zip(pivot_seg) {
                *x = field.reduce(u64::from(*x) + neg * u64::from(pv));
            }
        };
        if ctx.parallel && below.len() > cols * UPDATE_ROWS {
            below
                .par_chunks_mut(cols * UPDATE_ROWS)
                .for_each(|block| block.chunks_exact_mut(cols).for_each(eliminate_row));
        } else {
            below.chunks_exact_mut(cols).for_each(eliminate_row);
        }
        pivots.push(c);
    }
    pivots
}

/// Brings columns `lo..hi` of pivot row `j` up to date with pivots `0..j`.
fn solve_pivot_rows(ctx: &Ctx, data: &mut [u32], top: usize, pivots: &[usize], lo: usize, hi: usize) {
    let (field, cols) = (ctx.field, ctx.cols);
    let mut coeffs = vec![0u32; pivots.len()];
    for j in 1..pivots.len() {
        let (head, rest) = data.split_at_mut((top + j) * cols);
        let row = &mut rest[..cols];
        for (i, &pc) in pivots[..j].iter().enumerate() {
            coeffs[i] = field.neg(row[pc]);
        }
        let sources = &head[top * cols..];
        axpy(ctx.isa, field, &mut row[lo..hi], &coeffs[..j], sources, cols, lo);
    }
}

/// Applies pivots `top..top + k` to columns `lo..hi` of every row below them.
fn update_below(ctx: &Ctx, data: &mut [u32], top: usize, pivots: &[usize], lo: usize, hi: usize) {
    let (field, cols) = (ctx.field, ctx.cols);
    let k = pivots.len();
    let (head, below) = data.split_at_mut((top + k) * cols);
    if below.is_empty() {
        return;
    }
    let sources = &head[top * cols..];
    let tiled = k <= field.lazy_products();
    let update_block = |block: &mut [u32]| {
        let n = block.len() / cols;
        let mut coeffs = vec![0u32; n * k];
        for (r, row) in block.chunks_exact(cols).enumerate() {
            for (j, &pc) in pivots.iter().enumerate() {
                coeffs[r * k + j] = field.neg(row[pc]);
            }
        }
        if tiled {
            tiled_update(ctx.isa, field, block, n, &coeffs, k, sources, cols, lo, hi);
        } else {
            for (r, row) in block.chunks_exact_mut(cols).enumerate() {
                let c = &coeffs[r * k..(r + 1) * k];
                if c.iter().any(|&v| v != 0) {
                    axpy(ctx.isa, field, &mut row[lo..hi], c, sources, cols, lo);
                }
            }
        }
    };
    if ctx.parallel {
        below.par_chunks_mut(cols * UPDATE_ROWS).for_each(update_block);
    } else {
        below.chunks_mut(cols * UPDATE_ROWS).for_each(update_block);
    }
}

#[derive(Debug, Clone, Copy)]
enum Isa {
    Generic,
    #[cfg(target_arch = "x86_64")]
    Avx2,
    #[cfg(target_arch = "x86_64")]
    Avx512,
}

impl Isa {
    fn detect() -> Isa {
        #[cfg(target_arch = "x86_64")]
        {
            if std::arch::is_x86_feature_detected!("avx512f") {
                return Isa::Avx512;
            }
            if std::arch::is_x86_feature_detected!("avx2") {
                return Isa::Avx2;
            }
        }
        Isa::Generic
    }
}

/// `dst[t] += sum_j coeffs[j] * src_j[offset + t] (mod p)` where `src_j` is
/// row `j` of `sources` (row stride `stride`). Reduces whenever the
/// accumulators run out of headroom.
fn axpy(
    isa: Isa,
    field: FieldPrime,
    dst: &mut [u32],
    coeffs: &[u32],
    sources: &[u32],
    stride: usize,
    offset: usize,
) {
    match isa {
        Isa::Generic => axpy_impl(field, dst, coeffs, sources, stride, offset),
        // SAFETY: each variant is only constructed after runtime detection of
        // the corresponding CPU feature.
        #[cfg(target_arch = "x86_64")]
        Isa::Avx2 => unsafe { axpy_avx2(field, dst, coeffs, sources, stride, offset) },
        #[cfg(target_arch = "x86_64")]
        Isa::Avx512 => unsafe { axpy_avx512(field, dst, coeffs, sources, stride, offset) },
    }
}

#[cfg(target_arch = "x86_64")]
#[target_feature(enable = "avx2")]
unsafe fn axpy_avx2(
    field: FieldPrime,
    dst: &mut [u32],
    coeffs: &[u32],
    sources: &[u32],
    stride: usize,
    offset: usize,
) {
    axpy_impl(field, dst, coeffs, sources, stride, offset)
}

#[cfg(target_arch = "x86_64")]
#[target_feature(enable = "avx512f")]
unsafe fn axpy_avx512(
    field: FieldPrime,
    dst: &mut [u32],
    coeffs: &[u32],
    sources: &[u32],
    stride: usize,
    offset: usize,
) {
    axpy_impl(field, dst, coeffs, sources, stride, offset)
}

#[inline(always)]
fn axpy_impl(
    field: FieldPrime,
    dst: &mut [u32],
    coeffs: &[u32],
    sources: &[u32],
    stride: usize,
    offset: usize,
) {
    let lazy = field.lazy_products();
    let mut acc = [0u64; CHUNK];
    let len = dst.len();
    let mut start = 0;
    while start < len {
        let w = CHUNK.min(len - start);
        let acc = &mut acc[..w];
        let out = &mut dst[start..start + w];
        for (a, &d) in acc.iter_mut().zip(out.iter()) {
            *a = u64::from(d);
        }
        let mut pending = 0;
        for (j, &c) in coeffs.iter().enumerate() {
            if c == 0 {
                continue;
            }
            if pending == lazy {
                for a in acc.iter_mut() {
                    *a = u64::from(field.reduce(*a));
                }
                pending = 0;
            }
            let base = j * stride + offset + start;
            let src = &sources[base..base + w];
            for (a, &s) in acc.iter_mut().zip(src) {
                *a += u64::from(c) * u64::from(s);
            }
            pending += 1;
        }
        for (d, &a) in out.iter_mut().zip(acc.iter()) {
            *d = field.reduce(a);
        }
        start += w;
    }
}

/// Register-tiled block update of the `n` rows in `block` on columns
/// `lo..hi`: row `r` gets `sum_j coeffs[r * k + j] * source row j`. Requires
/// `k <= field.lazy_products()`.
#[allow(clippy::too_many_arguments)]
fn tiled_update(
    isa: Isa,
    field: FieldPrime,
    block: &mut [u32],
    n: usize,
    coeffs: &[u32],
    k: usize,
    sources: &[u32],
    stride: usize,
    lo: usize,
    hi: usize,
) {
    assert!(block.len() >= n * stride && coeffs.len() >= n * k);
    assert!(k == 0 || sources.len() >= (k - 1) * stride + hi);
    let job = Tiles { field, n, coeffs, k, sources, stride, lo, hi };
    match isa {
        // SAFETY: the generic tile is bounds-checked. For the others see
        // `axpy`; the asserts above keep every tile in bounds.
        Isa::Generic => unsafe { job.run::<4, 4>(block, tile::<4, 4>, tile::<1, 4>) },
        #[cfg(target_arch = "x86_64")]
        Isa::Avx2 => unsafe { x86::tiled_avx2(&job, block) },
        #[cfg(target_arch = "x86_64")]
        Isa::Avx512 => unsafe { x86::tiled_avx512(&job, block) },
    }
}

struct Tiles<'a> {
    field: FieldPrime,
    n: usize,
    coeffs: &'a [u32],
    k: usize,
    sources: &'a [u32],
    stride: usize,
    lo: usize,
    hi: usize,
}

type TileFn = unsafe fn(&Tiles, &mut [u32], usize, usize);

impl Tiles<'_> {
    /// Covers the rows in groups of `R` with `many` and singly with `one`,
    /// both on tiles of `T` columns, then the leftover columns. Columns go in
    /// blocks so that the sources of one block stay in cache across rows.
    #[inline(always)]
    unsafe fn run<const R: usize, const T: usize>(&self, block: &mut [u32], many: TileFn, one: TileFn) {
        let full = self.lo + (self.hi - self.lo) / T * T;
        for c0 in (self.lo..full).step_by(COLUMN_BLOCK) {
            let c1 = (c0 + COLUMN_BLOCK).min(full);
            let mut r0 = 0;
            while r0 + R <= self.n {
                for t0 in (c0..c1).step_by(T) {
                    many(self, block, r0, t0);
                }
                r0 += R;
            }
            for r in r0..self.n {
                for t0 in (c0..c1).step_by(T) {
                    one(self, block, r, t0);
                }
            }
        }
        if full < self.hi {
            for r in 0..self.n {
                let row = &mut block[r * self.stride..(r + 1) * self.stride];
                let c = &self.coeffs[r * self.k..(r + 1) * self.k];
                axpy_impl(self.field, &mut row[full..self.hi], c, self.sources, self.stride, full);
            }
        }
    }
}

/// Portable tile; `unsafe` only to share the [`TileFn`] signature.
unsafe fn tile<const R: usize, const T: usize>(job: &Tiles, block: &mut [u32], r0: usize, t0: usize) {
    let (k, stride) = (job.k, job.stride);
    let mut acc = [[0u64; T]; R];
    for (r, a) in acc.iter_mut().enumerate() {
        let row = &block[(r0 + r) * stride + t0..][..T];
        for (x, &v) in a.iter_mut().zip(row) {
            *x = u64::from(v);
        }
    }
    for j in 0..k {
        let src = &job.sources[j * stride + t0..][..T];
        for (r, a) in acc.iter_mut().enumerate() {
            let c = u64::from(job.coeffs[(r0 + r) * k + j]);
            for (x, &s) in a.iter_mut().zip(src) {
                *x += c * u64::from(s);
            }
        }
    }
    for (r, a) in acc.iter().enumerate() {
        let row = &mut block[(r0 + r) * stride + t0..][..T];
        for (x, &v) in row.iter_mut().zip(a) {
            *x = job.field.reduce(v);
        }
    }
}

#[cfg(target_arch = "x86_64")]
mod x86 {
    //! Tiles of 8 (AVX2) or 16 (AVX-512) columns. Residues are widened to
    //! 64-bit lanes and multiplied with `mul_epu32`.
    //!
    //! Callers guarantee that every row and column touched is in bounds.

    use std::arch::x86_64::*;

    use super::Tiles;

    #[target_feature(enable = "avx2")]
    pub(super) unsafe fn tiled_avx2(job: &Tiles, block: &mut [u32]) {
        job.run::<4, 8>(block, tile_avx2::<4>, tile_avx2::<1>)
    }

    #[target_feature(enable = "avx512f")]
    pub(super) unsafe fn tiled_avx512(job: &Tiles, block: &mut [u32]) {
        job.run::<8, 16>(block, tile_avx512::<8>, tile_avx512::<1>)
    }

    #[inline]
    #[target_feature(enable = "avx2")]
    unsafe fn tile_avx2<const R: usize>(job: &Tiles, block: &mut [u32], r0: usize, t0: usize) {
        let (k, stride) = (job.k, job.stride);
        let widen = |p: *const u32| _mm256_cvtepu32_epi64(_mm_loadu_si128(p.cast()));
        let base = block.as_mut_ptr().add(r0 * stride + t0);
        let mut acc = [[_mm256_setzero_si256(); 2]; R];
        for (r, a) in acc.iter_mut().enumerate() {
            let p = base.add(r * stride);
            a[0] = widen(p);
            a[1] = widen(p.add(4));
        }
        let coeffs = job.coeffs.as_ptr().add(r0 * k);
        let mut src = job.sources.as_ptr().add(t0);
        for j in 0..k {
            let s0 = widen(src);
            let s1 = widen(src.add(4));
            for (r, a) in acc.iter_mut().enumerate() {
                let c = _mm256_set1_epi64x(i64::from(*coeffs.add(r * k + j)));
                a[0] = _mm256_add_epi64(a[0], _mm256_mul_epu32(c, s0));
                a[1] = _mm256_add_epi64(a[1], _mm256_mul_epu32(c, s1));
            }
            src = src.add(stride);
        }
        let mut lanes = [0u64; 8];
        for (r, a) in acc.iter().enumerate() {
            _mm256_storeu_si256(lanes.as_mut_ptr().cast(), a[0]);
            _mm256_storeu_si256(lanes.as_mut_ptr().add(4).cast(), a[1]);
            let p = base.add(r * stride);
            for (t, &v) in lanes.iter().enumerate() {
                *p.add(t) = job.field.reduce(v);
            }
        }
    }

    #[inline]
    #[target_feature(enable = "avx512f")]
    unsafe fn tile_avx512<const R: usize>(job: &Tiles, block: &mut [u32], r0: usize, t0: usize) {
        let (k, stride) = (job.k, job.stride);
        let widen = |p: *const u32| _mm512_cvtepu32_epi64(_mm256_loadu_si256(p.cast()));
        let base = block.as_mut_ptr().add(r0 * stride + t0);
        let mut acc = [[_mm512_setzero_si512(); 2]; R];
        for (r, a) in acc.iter_mut().enumerate() {
            let p = base.add(r * stride);
            a[0] = widen(p);
            a[1] = widen(p.add(8));
        }
        let coeffs = job.coeffs.as_ptr().add(r0 * k);
        let mut src = job.sources.as_ptr().add(t0);
        for j in 0..k {
            let s0 = widen(src);
            let s1 = widen(src.add(8));
            for (r, a) in acc.iter_mut().enumerate() {
                let c = _mm512_set1_epi64(i64::from(*coeffs.add(r * k + j)));
                a[0] = _mm512_add_epi64(a[0], _mm512_mul_epu32(c, s0));
                a[1] = _mm512_add_epi64(a[1], _mm512_mul_epu32(c, s1));
            }
            src = src.add(stride);
        }
        let mut lanes = [0u64; 16];
        for (r, a) in acc.iter().enumerate() {
            _mm512_storeu_si512(lanes.as_mut_ptr().cast(), a[0]);
            _mm512_storeu_si512(lanes.as_mut_ptr().add(8).cast(), a[1]);
            let p = base.add(r * stride);
            for (t, &v) in lanes.iter().enumerate() {
                *p.add(t) = job.field.reduce(v);
            }
        }
    }
}
