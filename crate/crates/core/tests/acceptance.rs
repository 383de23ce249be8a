//! End-to-end acceptance checks, one line per criterion.
//!
//! Run with `cargo test --test acceptance`. Every tolerance is pinned here;
//! the process exits nonzero if any criterion fails.

use std::f64::consts::TAU;
use std::time::{Duration, Instant};

use eulershape::analysis::{knn_eval, mds, Protocol};
use eulershape::imageops::{betti, mask_to_complex, BinaryMask};
use eulershape::metric::{
    ect_distance, energy_distance, histogram_l2, pair_seed, pairwise, sliced_wasserstein, wasserstein_exact,
    DistanceMatrix,
};
use eulershape::synth::{
    gen_arm_masks, gen_ellipse_field, gen_trees, random_complex, random_mask, ArmShapeSpec, CenterSampler,
    EllipseFieldSpec, TreeClassSpec,
};
use eulershape::transform::{
    detect, detect_from_histogram, ect, ect_random, sampeuler, vectorize, CurveMeasure, DEFAULT_IMAGE_RANGE,
};
use eulershape::{CellComplex, Direction, FiltrationGrid, GeometricComplex};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = (bool, String);

fn median(mut xs: Vec<f64>) -> f64 {
    xs.sort_by(f64::total_cmp);
    let n = xs.len();
    if n % 2 == 1 {
        xs[n / 2]
    } else {
        0.5 * (xs[n / 2 - 1] + xs[n / 2])
    }
}

fn ids(n: usize) -> Vec<String> {
    (0..n).map(|i| format!("s{i}")).collect()
}

fn loo_1nn(m: &DistanceMatrix, labels: &[usize]) -> f64 {
    knn_eval(m, labels, 1, Protocol::LeaveOneOut).unwrap().mean
}

fn within(elapsed: Duration, limit_secs: u64) -> bool {
    elapsed <= Duration::from_secs(limit_secs)
}

fn sublevel_chi(k: &GeometricComplex, v: &Direction, t: f64) -> i64 {
    let h: Vec<f64> = k
        .vertices()
        .iter()
        .map(|p| p[0] * v.as_array()[0] + p[1] * v.as_array()[1])
        .collect();
    let vertices = h.iter().filter(|&&x| x <= t).count() as i64;
    let higher: i64 = k
        .all_simplices()
        .filter(|s| s.iter().all(|&i| h[i] <= t))
        .map(|s| if s.len() % 2 == 1 { 1 } else { -1 })
        .sum();
    vertices + higher
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut mismatches = 0usize;
    let mut checked = 0usize;
    for c in 0..200u64 {
        let n = rng.random_range(1..=12);
        let k = random_complex(n, rng.random_range(0.2..0.9), rng.random_range(0.2..1.0), c).unwrap();
        let grid = FiltrationGrid::new(1.1, 200).unwrap();
        for _ in 0..20 {
            let v = Direction::from_angle(rng.random::<f64>() * TAU);
            let curve = eulershape::transform::ecc(&k, &v, &grid).unwrap();
            for (i, t) in grid.points().enumerate() {
                checked += 1;
                if curve.values[i] as i64 != sublevel_chi(&k, &v, t) {
                    mismatches += 1;
                }
            }
        }
    }
    let elapsed = start.elapsed();
    (
        mismatches == 0 && within(elapsed, 30),
        format!("{mismatches} mismatches over {checked} grid points in {elapsed:.1?} (limit 30s)"),
    )
}

fn criterion_2() -> Outcome {
    let mut bad = Vec::new();
    for n in 3..=50usize {
        let vertices = (0..n)
            .map(|i| Direction::from_angle(TAU * i as f64 / n as f64).as_array())
            .collect();
        let edges = (0..n).map(|i| vec![i, (i + 1) % n]).collect();
        let k = GeometricComplex::new(vertices, edges).unwrap();
        if k.euler_characteristic() != 0 {
            bad.push(n);
        }
    }
    (bad.is_empty(), format!("n-gons 3..=50, nonzero chi for {bad:?}"))
}

fn flood_count(w: usize, h: usize, open: impl Fn(isize, isize) -> bool, diag: bool, skip_outer: bool) -> usize {
    let mut seen = vec![false; w * h];
    let mut count = 0;
    let mut steps = vec![(1isize, 0isize), (-1, 0), (0, 1), (0, -1)];
    if diag {
        steps.extend([(1, 1), (1, -1), (-1, 1), (-1, -1)]);
    }
    for start in 0..w * h {
        let (sx, sy) = ((start % w) as isize, (start / w) as isize);
        if seen[start] || !open(sx, sy) {
            continue;
        }
        let mut touches_border = false;
        let mut stack = vec![(sx, sy)];
        seen[start] = true;
        while let Some((x, y)) = stack.pop() {
            if x == 0 || y == 0 || x == w as isize - 1 || y == h as isize - 1 {
                touches_border = true;
            }
            for &(dx, dy) in &steps {
                let (nx, ny) = (x + dx, y + dy);
                if nx < 0 || ny < 0 || nx >= w as isize || ny >= h as isize {
                    continue;
                }
                let idx = ny as usize * w + nx as usize;
                if !seen[idx] && open(nx, ny) {
                    seen[idx] = true;
                    stack.push((nx, ny));
                }
            }
        }
        if !(skip_outer && touches_border) {
            count += 1;
        }
    }
    count
}

fn criterion_3() -> Outcome {
    let start = Instant::now();
    let mut failures = 0;
    for s in 0..100u64 {
        let mask: BinaryMask = random_mask(64, 64, 0.3 + 0.4 * (s as f64 / 99.0), s).unwrap();
        let (b0, b1) = betti(&mask);
        let chi = mask_to_complex(&mask).euler_characteristic();
        let fg = |x: isize, y: isize| mask.get(x as usize, y as usize);
        let oracle_b0 = flood_count(64, 64, fg, true, false);
        // background components not reaching the frame are the holes
        let padded = |x: isize, y: isize| {
            let (ix, iy) = (x - 1, y - 1);
            ix < 0 || iy < 0 || ix >= 64 || iy >= 64 || !mask.get(ix as usize, iy as usize)
        };
        let oracle_b1 = flood_count(66, 66, padded, false, true);
        if chi != b0 as i64 - b1 as i64 || b1 != oracle_b1 || b0 != oracle_b0 {
            failures += 1;
        }
    }
    let elapsed = start.elapsed();
    (
        failures == 0 && within(elapsed, 10),
        format!("{failures}/100 masks disagree in {elapsed:.1?} (limit 10s)"),
    )
}

fn tree_set(rotate: bool, seed: u64, sigma: Option<f64>) -> Vec<GeometricComplex> {
    let mut a = TreeClassSpec::class_a();
    let mut b = TreeClassSpec::class_b();
    if let Some(s) = sigma {
        a.sigma = s;
        b.sigma = s;
    }
    let mut set = gen_trees(&a, rotate, pair_seed(seed, 0, 0)).unwrap();
    set.extend(gen_trees(&b, rotate, pair_seed(seed, 1, 0)).unwrap());
    set
}

fn shared_grid(shapes: &[GeometricComplex], points: usize) -> FiltrationGrid {
    let r = shapes.iter().map(|k| k.bounding_radius().unwrap()).fold(0.0, f64::max);
    FiltrationGrid::new(1.1 * r, points).unwrap()
}

fn criterion_4() -> Outcome {
    let start = Instant::now();
    let labels: Vec<usize> = (0..40).map(|i| i / 20).collect();
    let (mut aligned, mut rotated, mut w1, mut l2) = (Vec::new(), Vec::new(), Vec::new(), Vec::new());
    for seed in 0..5u64 {
        let plain = tree_set(false, seed, None);
        let turned = tree_set(true, seed, None);
        let grid = shared_grid(&[plain.clone(), turned.clone()].concat(), 300);
        for (set, out) in [(&plain, &mut aligned), (&turned, &mut rotated)] {
            let e: Vec<_> = set.iter().map(|k| ect(k, 64, &grid).unwrap()).collect();
            let m = pairwise(ids(40), &e, 0, |a, b, _| ect_distance(a, b)).unwrap();
            out.push(loo_1nn(&m, &labels));
        }
        let s: Vec<CurveMeasure> = turned
            .iter()
            .enumerate()
            .map(|(i, k)| sampeuler(k, 200, &grid, pair_seed(seed, i, 1)).unwrap())
            .collect();
        let m = pairwise(ids(40), &s, 0, |a, b, _| wasserstein_exact(a, b)).unwrap();
        w1.push(loo_1nn(&m, &labels));
        let bound = s.iter().map(|x| x.curves.max_abs()).max().unwrap();
        let h: Vec<_> = s.iter().map(|x| vectorize(x, 1, Some(bound)).unwrap()).collect();
        let m = pairwise(ids(40), &h, 0, |a, b, _| histogram_l2(a, b)).unwrap();
        l2.push(loo_1nn(&m, &labels));
    }
    let (al, ro, w, l) = (median(aligned), median(rotated), median(w1), median(l2));
    let elapsed = start.elapsed();
    (
        al >= 0.95 && ro <= 0.70 && w >= 0.90 && l >= 0.90 && within(elapsed, 300),
        format!(
            "medians: aligned ECT {al:.3} (>=0.95), rotated ECT {ro:.3} (<=0.70), rotated W1 {w:.3} (>=0.90), \
             rotated L2 {l:.3} (>=0.90) in {elapsed:.1?} (limit 300s)"
        ),
    )
}

fn criterion_5() -> Outcome {
    let start = Instant::now();
    let mut a = TreeClassSpec::class_a();
    let mut b = TreeClassSpec::class_b();
    a.sigma = 0.0;
    b.sigma = 0.0;
    a.samples = 1;
    b.samples = 1;
    let ka = gen_trees(&a, false, 0).unwrap().remove(0);
    let kb = gen_trees(&b, false, 0).unwrap().remove(0);
    let grid = shared_grid(&[ka.clone(), kb.clone()], 300);
    let ea = ect(&ka, 360, &grid).unwrap();
    let eb = ect(&kb, 360, &grid).unwrap();
    let (da, db) = (detect(&ea).unwrap(), detect(&eb).unwrap());
    let gap = da
        .values
        .iter()
        .zip(&db.values)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max);
    let max_chi = ea.curves.max_abs().max(eb.curves.max_abs()) as f64;
    let unit = TAU * grid.step() * max_chi;
    let dist = ect_distance(&ea, &eb).unwrap();
    let elapsed = start.elapsed();
    (
        gap <= 3.0 * unit && dist > 100.0 * gap && within(elapsed, 60),
        format!(
            "DETECT gap {gap:.3e} (<= 3u = {:.3e}), ECT distance {dist:.3e} (> 100 x gap) in {elapsed:.1?}",
            3.0 * unit
        ),
    )
}

fn fixed_tree() -> GeometricComplex {
    let mut spec = TreeClassSpec::class_a();
    spec.samples = 1;
    gen_trees(&spec, false, 7).unwrap().remove(0)
}

fn criterion_6() -> Outcome {
    let start = Instant::now();
    let k = fixed_tree();
    let grid = FiltrationGrid::covering(&k, 100).unwrap();
    let sizes = [25usize, 50, 100, 200, 400];
    let medians: Vec<f64> = sizes
        .iter()
        .map(|&n| {
            median(
                (0..10)
                    .map(|p| {
                        let x = sampeuler(&k, n, &grid, pair_seed(n as u64, p, 0)).unwrap();
                        let y = sampeuler(&k, n, &grid, pair_seed(n as u64, p, 1)).unwrap();
                        wasserstein_exact(&x, &y).unwrap()
                    })
                    .collect(),
            )
        })
        .collect();
    let decreasing = medians.windows(2).all(|w| w[1] < w[0]);
    let elapsed = start.elapsed();
    let shown: Vec<String> = medians.iter().map(|x| format!("{x:.4}")).collect();
    (
        decreasing && within(elapsed, 180),
        format!(
            "median W1 for n={sizes:?}: [{}] in {elapsed:.1?} (limit 180s)",
            shown.join(", ")
        ),
    )
}

fn criterion_7() -> Outcome {
    let k = fixed_tree();
    let grid = FiltrationGrid::covering(&k, 300).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let base = sampeuler(&k, 200, &grid, 100).unwrap();
    let mut rotated = Vec::new();
    let mut baseline = Vec::new();
    for i in 0..10 {
        let turned = k.rotated(rng.random::<f64>() * TAU);
        let s = sampeuler(&turned, 200, &grid, pair_seed(7, i, 0)).unwrap();
        rotated.push(wasserstein_exact(&base, &s).unwrap());
        let same = sampeuler(&k, 200, &grid, pair_seed(7, i, 1)).unwrap();
        baseline.push(wasserstein_exact(&base, &same).unwrap());
    }
    let (r, b) = (median(rotated), median(baseline));
    (
        r <= 1.5 * b,
        format!("median rotated W1 {r:.4} vs 1.5 x baseline {:.4}", 1.5 * b),
    )
}

fn terminal_mass(spec: &EllipseFieldSpec, seed: u64) -> (f64, i32) {
    let k = gen_ellipse_field(spec, seed).unwrap();
    let grid = FiltrationGrid::covering(&k, 300).unwrap();
    let s = sampeuler(&k, 100, &grid, seed).unwrap();
    let h = vectorize(&s, 5, None).unwrap();
    let last = h.windows.len() - 1;
    (h.mass(last, spec.count as i32), k.euler_characteristic() as i32)
}

fn criterion_8() -> Outcome {
    let (m50, chi50) = terminal_mass(&EllipseFieldSpec::square(50), 3);
    let mut three = EllipseFieldSpec::square(40);
    three.centers = CenterSampler::ThreeQuadrant { side: 50.0 };
    let (m40, chi40) = terminal_mass(&three, 4);
    (
        m50 == 1.0 && m40 == 1.0 && chi50 == 50 && chi40 == 40,
        format!("rightmost-window mass {m50} at k=50 (chi {chi50}), {m40} at k=40 (chi {chi40})"),
    )
}

fn criterion_9() -> Outcome {
    let mut worst = f64::NEG_INFINITY;
    let mut ok = true;
    for c in 0..10u64 {
        let k = random_complex(12, 0.5, 0.7, 900 + c).unwrap();
        let grid = FiltrationGrid::covering(&k, 200).unwrap();
        let e = ect_random(&k, 100, &grid, c).unwrap();
        let s = sampeuler(&k, 100, &grid, c).unwrap();
        let direct = detect(&e).unwrap();
        let recovered = detect_from_histogram(&vectorize(&s, 1, None).unwrap()).unwrap();
        let gap = direct
            .values
            .iter()
            .zip(&recovered.values)
            .map(|(x, y)| (x - y).abs())
            .fold(0.0, f64::max);
        let a = grid.half_range();
        let bound = 2.0 * (2.0 * a / grid.len() as f64) * TAU * s.curves.max_abs() as f64;
        ok &= gap <= bound;
        worst = worst.max(gap / bound);
    }
    (ok, format!("worst gap / bound = {worst:.3e} over 10 complexes"))
}

fn ranks(xs: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..xs.len()).collect();
    order.sort_by(|&a, &b| xs[a].total_cmp(&xs[b]));
    let mut r = vec![0.0; xs.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && xs[order[j + 1]] == xs[order[i]] {
            j += 1;
        }
        for &o in &order[i..=j] {
            r[o] = (i + j) as f64 / 2.0;
        }
        i = j + 1;
    }
    r
}

fn pearson(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let (mx, my) = (x.iter().sum::<f64>() / n, y.iter().sum::<f64>() / n);
    let cov: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let vx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    let vy: f64 = y.iter().map(|b| (b - my).powi(2)).sum();
    cov / (vx * vy).sqrt()
}

fn criterion_10() -> Outcome {
    let start = Instant::now();
    let grid = FiltrationGrid::new(1.1, 100).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let (mut exact, mut sliced) = (Vec::new(), Vec::new());
    for p in 0..30u64 {
        let mut measure = |tag: u64| {
            let k = random_complex(rng.random_range(4..=16), rng.random_range(0.2..0.8), 0.5, p * 2 + tag).unwrap();
            sampeuler(&k, 20, &grid, 1000 + p * 2 + tag).unwrap()
        };
        let (x, y) = (measure(0), measure(1));
        exact.push(wasserstein_exact(&x, &y).unwrap());
        sliced.push(sliced_wasserstein(&x, &y, 50, p).unwrap());
    }
    let rho = pearson(&ranks(&exact), &ranks(&sliced));
    let elapsed = start.elapsed();
    (
        rho >= 0.9 && within(elapsed, 120),
        format!("Spearman rho {rho:.4} (>=0.9) over 30 pairs in {elapsed:.1?} (limit 120s)"),
    )
}

fn criterion_11() -> Outcome {
    let grid = FiltrationGrid::new(1.1, 100).unwrap();
    let mut worst = f64::NEG_INFINITY;
    for t in 0..50u64 {
        let m: Vec<CurveMeasure> = (0..3)
            .map(|i| {
                let k = random_complex(10, 0.5, 0.5, pair_seed(t, i, 0)).unwrap();
                sampeuler(&k, 15 + 5 * i, &grid, pair_seed(t, i, 1)).unwrap()
            })
            .collect();
        let d = |i: usize, j: usize| wasserstein_exact(&m[i], &m[j]).unwrap();
        for (x, y, z) in [(0, 1, 2), (1, 2, 0), (2, 0, 1)] {
            worst = worst.max(d(x, z) - d(x, y) - d(y, z));
        }
    }
    let points: Vec<Vec<f64>> = vec![vec![0.0, 0.0], vec![1.0, 2.0], vec![-0.5, 0.25]];
    let m = DistanceMatrix::euclidean(ids(3), &points).unwrap();
    let w = [0.2, 0.3, 0.5];
    let same = energy_distance(&m, &w, &w).unwrap();
    let two = DistanceMatrix::new(ids(2), vec![0.0, 2.5, 2.5, 0.0]).unwrap();
    let masses = energy_distance(&two, &[1.0, 0.0], &[0.0, 1.0]).unwrap();
    (
        worst <= 1e-9 && same == 0.0 && masses == 5.0,
        format!("max triangle excess {worst:.3e} (<=1e-9), energy identical {same}, point masses {masses} (2d = 5)"),
    )
}

fn criterion_12() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let mut worst: f64 = 0.0;
    for c in 0..10 {
        let n = 5 + 3 * c;
        let points: Vec<Vec<f64>> = (0..n)
            .map(|_| vec![rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0)])
            .collect();
        let m = DistanceMatrix::euclidean(ids(n), &points).unwrap();
        worst = worst.max(mds(&m, 2).unwrap().stress);
    }
    (
        worst < 1e-6,
        format!("max stress {worst:.3e} (<1e-6) over 10 configurations"),
    )
}

fn criterion_13() -> Outcome {
    let eps = [0.005, 0.01, 0.02, 0.04];
    let mut per_eps: Vec<Vec<f64>> = vec![Vec::new(); eps.len()];
    for seed in 0..5u64 {
        let mut spec = TreeClassSpec::class_a();
        spec.samples = 1;
        let k = gen_trees(&spec, false, pair_seed(seed, 13, 0)).unwrap().remove(0);
        let mut rng = ChaCha8Rng::seed_from_u64(pair_seed(seed, 13, 1));
        let dirs: Vec<[f64; 2]> = (0..k.vertices().len())
            .map(|_| Direction::from_angle(rng.random::<f64>() * TAU).as_array())
            .collect();
        let grid = FiltrationGrid::new(1.1 * k.bounding_radius().unwrap() + 0.05, 300).unwrap();
        let dir_seed = pair_seed(seed, 13, 2);
        let base = sampeuler(&k, 200, &grid, dir_seed).unwrap();
        for (e, out) in eps.iter().zip(per_eps.iter_mut()) {
            let points = k
                .vertices()
                .iter()
                .zip(&dirs)
                .map(|(p, u)| [p[0] + e * u[0], p[1] + e * u[1]])
                .collect();
            let moved = GeometricComplex::new(points, k.all_simplices().cloned().collect()).unwrap();
            let s = sampeuler(&moved, 200, &grid, dir_seed).unwrap();
            out.push(wasserstein_exact(&base, &s).unwrap());
        }
    }
    let w: Vec<f64> = per_eps.into_iter().map(median).collect();
    let monotone = w.windows(2).all(|p| p[1] >= p[0]);
    let ratios: Vec<f64> = w.iter().zip(&eps).map(|(x, e)| x / e).collect();
    let spread =
        ratios.iter().cloned().fold(f64::NEG_INFINITY, f64::max) / ratios.iter().cloned().fold(f64::INFINITY, f64::min);
    let shown: Vec<String> = w.iter().map(|x| format!("{x:.4}")).collect();
    (
        monotone && spread <= 4.0,
        format!(
            "median W1 over eps {eps:?}: [{}], W1/eps spread {spread:.2} (<=4)",
            shown.join(", ")
        ),
    )
}

fn criterion_14() -> Outcome {
    let start = Instant::now();
    let grid = FiltrationGrid::new(DEFAULT_IMAGE_RANGE, 300).unwrap();
    let mut margins = Vec::new();
    let mut detail = Vec::new();
    for seed in 0..5u64 {
        let mut complexes = Vec::new();
        let mut labels = Vec::new();
        for (c, spec) in ArmShapeSpec::presets().iter().enumerate() {
            for mask in gen_arm_masks(spec, 20, true, pair_seed(seed, c, 14)).unwrap() {
                complexes.push(mask_to_complex(&mask));
                labels.push(c);
            }
        }
        let n = complexes.len();
        let e: Vec<_> = complexes.iter().map(|k| ect(k, 100, &grid).unwrap()).collect();
        let ect_acc = loo_1nn(&pairwise(ids(n), &e, 0, |a, b, _| ect_distance(a, b)).unwrap(), &labels);
        let s: Vec<_> = complexes
            .iter()
            .enumerate()
            .map(|(i, k)| sampeuler(k, 100, &grid, pair_seed(seed, i, 15)).unwrap())
            .collect();
        let w1_acc = loo_1nn(
            &pairwise(ids(n), &s, 0, |a, b, _| wasserstein_exact(a, b)).unwrap(),
            &labels,
        );
        margins.push(100.0 * (w1_acc - ect_acc));
        detail.push(format!("{w1_acc:.3}/{ect_acc:.3}"));
    }
    let margin = median(margins);
    let elapsed = start.elapsed();
    (
        margin >= 15.0,
        format!(
            "median W1-minus-ECT margin {margin:.1} points (>=15); per seed W1/ECT [{}] in {elapsed:.1?}",
            detail.join(", ")
        ),
    )
}

fn main() {
    let criteria: [(usize, fn() -> Outcome); 14] = [
        (1, criterion_1),
        (2, criterion_2),
        (3, criterion_3),
        (4, criterion_4),
        (5, criterion_5),
        (6, criterion_6),
        (7, criterion_7),
        (8, criterion_8),
        (9, criterion_9),
        (10, criterion_10),
        (11, criterion_11),
        (12, criterion_12),
        (13, criterion_13),
        (14, criterion_14),
    ];
    let filter: Option<usize> = std::env::args().skip(1).find_map(|a| a.parse().ok());
    let mut failed = 0;
    for (id, check) in criteria {
        if filter.is_some_and(|f| f != id) {
            continue;
        }
        let (ok, detail) = check();
        println!("criterion {id:>2}: {}  {detail}", if ok { "PASS" } else { "FAIL" });
        failed += usize::from(!ok);
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
