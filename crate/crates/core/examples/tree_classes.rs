//! Two tree classes under random rotations: fixed-direction ECT loses the
//! class structure, SampEuler with Wasserstein-1 keeps it.

use eulershape::analysis::{knn_eval, mds, Protocol};
use eulershape::metric::{ect_distance, pair_seed, pairwise, wasserstein_exact};
use eulershape::synth::{gen_trees, TreeClassSpec};
use eulershape::transform::{ect, sampeuler};
use eulershape::FiltrationGrid;

fn main() {
    let samples = 10;
    let mut shapes = Vec::new();
    for (c, spec) in [TreeClassSpec::class_a(), TreeClassSpec::class_b()].iter().enumerate() {
        let spec = TreeClassSpec {
            samples,
            ..spec.clone()
        };
        shapes.extend(gen_trees(&spec, true, pair_seed(42, c, 0)).unwrap());
    }
    let labels: Vec<usize> = (0..2 * samples).map(|i| i / samples).collect();
    let ids: Vec<String> = (0..shapes.len()).map(|i| format!("tree{i:02}")).collect();
    let radius = shapes.iter().map(|k| k.bounding_radius().unwrap()).fold(0.0, f64::max);
    let grid = FiltrationGrid::new(1.1 * radius, 200).unwrap();

    let ects: Vec<_> = shapes.iter().map(|k| ect(k, 64, &grid).unwrap()).collect();
    let d_ect = pairwise(ids.clone(), &ects, 0, |a, b, _| ect_distance(a, b)).unwrap();

    let measures: Vec<_> = shapes
        .iter()
        .enumerate()
        .map(|(i, k)| sampeuler(k, 100, &grid, pair_seed(7, i, 0)).unwrap())
        .collect();
    let d_w1 = pairwise(ids, &measures, 0, |a, b, _| wasserstein_exact(a, b)).unwrap();

    for (name, m) in [("ECT", &d_ect), ("SampEuler W1", &d_w1)] {
        let acc = knn_eval(m, &labels, 1, Protocol::LeaveOneOut).unwrap().mean;
        println!("{name:>13}: leave-one-out 1-NN accuracy {acc:.2}");
    }

    let e = mds(&d_w1, 2).unwrap();
    println!("\nMDS of the W1 distances (class, x, y):");
    for (c, p) in labels.iter().zip(&e.coords) {
        println!("{c} {:+.3} {:+.3}", p[0], p[1]);
    }
}
