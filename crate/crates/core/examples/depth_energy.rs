//! Depth-resolved comparison of two groups: tile depths from a pair of
//! masks, then the kernel-weighted energy distance along depth and smoothed
//! cell-type enrichment.

use eulershape::analysis::{depth_energy_curve, depth_grid, enrichment, DEFAULT_BANDWIDTH};
use eulershape::imageops::{depth_field, quadrant_depths, BinaryMask, Rect};
use eulershape::metric::DistanceMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() {
    // medulla on the left, cortex on the right
    let target = BinaryMask::from_fn(200, 40, |x, _| x < 40).unwrap();
    let region = BinaryMask::from_fn(200, 40, |x, _| x >= 40).unwrap();
    let field = depth_field(&region, &target).unwrap();
    let rects: Vec<Rect> = (0..10).map(|c| Rect::square(c * 20, 0, 20)).collect();
    let tile_depth: Vec<f64> = quadrant_depths(&field, &rects).into_iter().flatten().collect();
    println!(
        "tile depths: {:?}",
        tile_depth.iter().map(|d| format!("{d:.2}")).collect::<Vec<_>>()
    );

    // two cohorts of items with depths; the old group drifts deeper in feature space
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut features = Vec::new();
    let mut depths = Vec::new();
    let mut young = Vec::new();
    for i in 0..80 {
        let is_young = i % 2 == 0;
        let d = tile_depth[rng.random_range(0..tile_depth.len())];
        let shift = if is_young { 0.0 } else { 2.0 * (1.0 - d) };
        features.push(vec![rng.random::<f64>() + shift, rng.random::<f64>()]);
        depths.push(d);
        young.push(is_young);
    }
    let ids: Vec<String> = (0..80).map(|i| format!("q{i}")).collect();
    let m = DistanceMatrix::euclidean(ids, &features).unwrap();
    let curve = depth_energy_curve(&m, &depths, &young, DEFAULT_BANDWIDTH, &depth_grid(11)).unwrap();
    for (t, e) in curve.t.iter().zip(&curve.energy) {
        match e {
            Some(e) => println!("depth {t:.1}: energy {e:.3}"),
            None => println!("depth {t:.1}: no weight"),
        }
    }

    let counts = vec![vec![40.0, 10.0, 5.0], vec![38.0, 12.0, 6.0], vec![20.0, 30.0, 2.0]];
    let table = enrichment(&counts, &[0, 1], 1.0).unwrap();
    for (q, r) in table.ratios.iter().enumerate() {
        println!(
            "quadrant {q}: enrichment {:?}",
            r.iter().map(|x| format!("{x:.2}")).collect::<Vec<_>>()
        );
    }
}
