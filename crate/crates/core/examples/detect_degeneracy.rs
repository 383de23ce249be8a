//! DETECT averages over directions, so trees with equal edge lengths but
//! different angles become indistinguishable; the ECT still separates them.

use eulershape::metric::{detect_l1, ect_distance};
use eulershape::synth::{gen_trees, TreeClassSpec};
use eulershape::transform::{detect, ect};
use eulershape::FiltrationGrid;

fn main() {
    let noiseless = |spec: TreeClassSpec| TreeClassSpec {
        sigma: 0.0,
        samples: 1,
        ..spec
    };
    let a = gen_trees(&noiseless(TreeClassSpec::class_a()), false, 0)
        .unwrap()
        .remove(0);
    let b = gen_trees(&noiseless(TreeClassSpec::class_b()), false, 0)
        .unwrap()
        .remove(0);
    let grid = FiltrationGrid::covering(&a, 300).unwrap();

    let (ea, eb) = (ect(&a, 360, &grid).unwrap(), ect(&b, 360, &grid).unwrap());
    let (da, db) = (detect(&ea).unwrap(), detect(&eb).unwrap());
    let gap = da
        .values
        .iter()
        .zip(&db.values)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max);

    println!("largest DETECT gap: {gap:.3e}");
    println!("DETECT L1 distance: {:.3e}", detect_l1(&da, &db).unwrap());
    println!("ECT distance:       {:.3e}", ect_distance(&ea, &eb).unwrap());
}
