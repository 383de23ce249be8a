//! Sliced Wasserstein-1 with 50 projections against the exact distance.
//!
//! The sliced value lives on a different scale; the two agree on ordering.

use std::time::Instant;

use eulershape::metric::{sliced_wasserstein, wasserstein_exact};
use eulershape::synth::random_complex;
use eulershape::transform::sampeuler;
use eulershape::FiltrationGrid;

fn main() {
    let grid = FiltrationGrid::new(1.1, 100).unwrap();
    println!("{:>4} {:>10} {:>10}", "pair", "exact", "sliced");
    let (mut t_exact, mut t_sliced) = (0.0, 0.0);
    for p in 0..10u64 {
        let x = sampeuler(&random_complex(6 + p as usize, 0.5, 0.5, 2 * p).unwrap(), 100, &grid, p).unwrap();
        let y = sampeuler(&random_complex(8, 0.4, 0.5, 2 * p + 1).unwrap(), 100, &grid, p + 50).unwrap();
        let start = Instant::now();
        let exact = wasserstein_exact(&x, &y).unwrap();
        t_exact += start.elapsed().as_secs_f64();
        let start = Instant::now();
        let sliced = sliced_wasserstein(&x, &y, 50, p).unwrap();
        t_sliced += start.elapsed().as_secs_f64();
        println!("{p:>4} {exact:>10.4} {sliced:>10.4}");
    }
    println!("total time: exact {t_exact:.3}s, sliced {t_sliced:.3}s");
}
