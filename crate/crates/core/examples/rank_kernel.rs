//! Times the blocked rank kernel against the reference elimination on random
//! square matrices.
//!
//! ```text
//! cargo run --release --example rank_kernel -- [size] [threads]
//! ```

use std::time::Instant;

use fatpoints::gfp::{DenseMatrix, FieldPrime};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() {
    let mut args = std::env::args().skip(1);
    let n: usize = args.next().and_then(|s| s.parse().ok()).unwrap_or(1500);
    let threads: usize = args
        .next()
        .and_then(|s| s.parse().ok())
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
    let field = FieldPrime::default_prime();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let m = DenseMatrix::from_fn(field, n, n, |_, _| rng.gen_range(0..u64::from(field.modulus())));

    let t = Instant::now();
    let blocked = m.clone().rank_blocked(threads);
    let blocked_time = t.elapsed();
    let ops = (n as f64).powi(3) / 3.0;
    println!(
        "blocked   n={n} threads={threads} rank={blocked} {:.3}s ({:.2} G mul-add/s)",
        blocked_time.as_secs_f64(),
        ops / blocked_time.as_secs_f64() / 1e9
    );

    if n <= 2000 {
        let t = Instant::now();
        let reference = m.rank();
        println!("reference n={n} rank={reference} {:.3}s", t.elapsed().as_secs_f64());
        assert_eq!(blocked, reference);
    }
}
