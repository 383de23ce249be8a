//! Two independent SampEulers of one shape draw closer as the number of
//! sampled directions grows.

use eulershape::metric::{pair_seed, wasserstein_exact};
use eulershape::synth::{gen_trees, TreeClassSpec};
use eulershape::transform::sampeuler;
use eulershape::FiltrationGrid;

fn main() {
    let spec = TreeClassSpec {
        samples: 1,
        ..TreeClassSpec::class_a()
    };
    let k = gen_trees(&spec, false, 1).unwrap().remove(0);
    let grid = FiltrationGrid::covering(&k, 100).unwrap();
    for n in [25, 50, 100, 200, 400] {
        let mut d: Vec<f64> = (0..5)
            .map(|p| {
                let x = sampeuler(&k, n, &grid, pair_seed(n as u64, p, 0)).unwrap();
                let y = sampeuler(&k, n, &grid, pair_seed(n as u64, p, 1)).unwrap();
                wasserstein_exact(&x, &y).unwrap()
            })
            .collect();
        d.sort_by(f64::total_cmp);
        println!("n = {n:>3}: median W1 between independent draws {:.4}", d[2]);
    }
}
