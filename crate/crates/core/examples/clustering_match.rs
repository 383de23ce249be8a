//! k-medoids with a silhouette sweep, then matching two clusterings.

use eulershape::analysis::{kmedoids, match_clusterings, silhouette_sweep};
use eulershape::metric::DistanceMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

fn main() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let noise = Normal::new(0.0, 0.4).unwrap();
    let centres = [[0.0, 0.0], [4.0, 0.0], [2.0, 3.5]];
    let points: Vec<Vec<f64>> = (0..60)
        .map(|i| {
            let c = centres[i % 3];
            vec![c[0] + noise.sample(&mut rng), c[1] + noise.sample(&mut rng)]
        })
        .collect();
    let ids: Vec<String> = (0..60).map(|i| format!("p{i}")).collect();
    let m = DistanceMatrix::euclidean(ids, &points).unwrap();

    for (k, s) in silhouette_sweep(&m, 2..=6, 0).unwrap() {
        println!("k = {k}: mean silhouette {s:.3}");
    }

    let a = kmedoids(&m, 3, 0, 100).unwrap();
    let b = kmedoids(&m, 3, 99, 100).unwrap();
    println!(
        "cost {:.3}, history {:?}",
        a.cost,
        a.cost_history.iter().map(|c| format!("{c:.2}")).collect::<Vec<_>>()
    );

    let truth: Vec<usize> = (0..60).map(|i| i % 3).collect();
    let matched = match_clusterings(&truth, &a.labels, 3).unwrap();
    println!(
        "against the generating labels: perm {:?}, agreement {}/60",
        matched.perm, matched.agreement
    );
    let between = match_clusterings(&a.labels, &b.labels, 3).unwrap();
    println!("between seeds: agreement {}/60", between.agreement);
    for row in &between.confusion {
        println!("  {:?}", row.iter().map(|v| format!("{v:.2}")).collect::<Vec<_>>());
    }
}
