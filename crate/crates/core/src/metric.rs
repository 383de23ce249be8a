//! Distances between curves, transforms and curve measures.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::transform::{
    CurveMatrix, CurveMeasure, DetectCurve, DirectionMode, EccCurve, EctMatrix, FiltrationGrid, SampHistogram,
    SPHERE_MEASURE,
};

/// Largest measure size (after replication) accepted by [`wasserstein_exact`].
pub const MAX_EXACT_SIZE: usize = 512;

/// Symmetric matrix of pairwise distances with labelled items.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceMatrix {
    ids: Vec<String>,
    values: Vec<f64>,
}

impl DistanceMatrix {
    /// Tolerance on `|M_ij - M_ji|` accepted by [`DistanceMatrix::new`].
    pub const SYMMETRY_TOLERANCE: f64 = 1e-9;

    pub fn new(ids: Vec<String>, values: Vec<f64>) -> Result<Self> {
        let n = ids.len();
        if values.len() != n * n {
            return Err(Error::param(format!(
                "distance matrix has {} entries for {n} ids",
                values.len()
            )));
        }
        for i in 0..n {
            if values[i * n + i] != 0.0 {
                return Err(Error::param(format!("diagonal entry {i} is not zero")));
            }
            for j in 0..n {
                let v = values[i * n + j];
                if !(v.is_finite() && v >= 0.0) {
                    return Err(Error::param(format!("entry ({i}, {j}) = {v} is not a distance")));
                }
                if (v - values[j * n + i]).abs() > Self::SYMMETRY_TOLERANCE {
                    return Err(Error::param(format!("matrix is not symmetric at ({i}, {j})")));
                }
            }
        }
        Ok(DistanceMatrix { ids, values })
    }

    /// Builds from the upper triangle, `upper[k]` for the k-th pair `i < j`
    /// in row-major order.
    fn from_upper(ids: Vec<String>, upper: &[f64]) -> Self {
        let n = ids.len();
        let mut values = vec![0.0; n * n];
        let mut k = 0;
        for i in 0..n {
            for j in i + 1..n {
                values[i * n + j] = upper[k];
                values[j * n + i] = upper[k];
                k += 1;
            }
        }
        DistanceMatrix { ids, values }
    }

    /// Euclidean distances between rows of `points`.
    pub fn euclidean(ids: Vec<String>, points: &[Vec<f64>]) -> Result<Self> {
        let upper: Vec<f64> = pairs(points.len())
            .map(|(i, j)| {
                points[i]
                    .iter()
                    .zip(&points[j])
                    .map(|(a, b)| (a - b) * (a - b))
                    .sum::<f64>()
                    .sqrt()
            })
            .collect();
        if ids.len() != points.len() {
            return Err(Error::param("one id per point is required"));
        }
        Ok(Self::from_upper(ids, &upper))
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.ids.len() + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        let n = self.ids.len();
        &self.values[i * n..(i + 1) * n]
    }

    pub fn as_flat(&self) -> &[f64] {
        &self.values
    }

    /// Every entry multiplied by `factor > 0`.
    pub fn scaled(&self, factor: f64) -> Self {
        DistanceMatrix {
            ids: self.ids.clone(),
            values: self.values.iter().map(|v| v * factor).collect(),
        }
    }
}

fn pairs(n: usize) -> impl Iterator<Item = (usize, usize)> {
    (0..n).flat_map(move |i| (i + 1..n).map(move |j| (i, j)))
}

/// Discretized L1 distance between two sampled curves: `h * sum |f_i - g_i|`
/// with the two endpoints weighted by one half.
pub fn l1_on_grid(grid: &FiltrationGrid, diff: impl Fn(usize) -> f64) -> f64 {
    let m = grid.len();
    let inner: f64 = (0..m).map(|i| diff(i).abs()).sum();
    grid.step() * (inner - 0.5 * diff(0).abs() - 0.5 * diff(m - 1).abs())
}

#[inline]
fn row_l1(grid: &FiltrationGrid, f: &[i32], g: &[i32]) -> f64 {
    let m = f.len();
    let mut inner = 0i64;
    for (a, b) in f.iter().zip(g) {
        inner += (*a as i64 - *b as i64).abs();
    }
    let ends = (f[0] as i64 - g[0] as i64).abs() + (f[m - 1] as i64 - g[m - 1] as i64).abs();
    grid.step() * (inner as f64 - 0.5 * ends as f64)
}

pub fn curve_l1(f: &EccCurve, g: &EccCurve) -> Result<f64> {
    f.grid.ensure_same(&g.grid)?;
    Ok(row_l1(&f.grid, &f.values, &g.values))
}

pub fn detect_l1(f: &DetectCurve, g: &DetectCurve) -> Result<f64> {
    f.grid.ensure_same(&g.grid)?;
    Ok(l1_on_grid(&f.grid, |i| f.values[i] - g.values[i]))
}

/// ECT distance: mean L1 gap between rows along matching directions, times
/// the measure of the circle.
pub fn ect_distance(a: &EctMatrix, b: &EctMatrix) -> Result<f64> {
    if a.mode != DirectionMode::Fixed || b.mode != DirectionMode::Fixed {
        return Err(Error::param("ECT distance needs fixed directions on both sides"));
    }
    a.grid().ensure_same(b.grid())?;
    if a.n_dirs() != b.n_dirs() {
        return Err(Error::param(format!(
            "direction counts differ: {} vs {}",
            a.n_dirs(),
            b.n_dirs()
        )));
    }
    let total: f64 = (0..a.n_dirs()).map(|i| row_l1(a.grid(), a.row(i), b.row(i))).sum();
    Ok(SPHERE_MEASURE * total / a.n_dirs() as f64)
}

/// Minimum-cost perfect matching on a square cost matrix given by `cost(i, j)`.
///
/// Shortest augmenting paths with row/column potentials, `O(n^3)`. Returns the
/// column assigned to each row and the total cost.
pub fn solve_assignment(n: usize, cost: impl Fn(usize, usize) -> f64) -> (Vec<usize>, f64) {
    if n == 0 {
        return (Vec::new(), 0.0);
    }
    // 1-based indexing; index 0 is the virtual root of each search
    let mut u = vec![0.0f64; n + 1];
    let mut v = vec![0.0f64; n + 1];
    let mut owner = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];
    let mut minv = vec![0.0f64; n + 1];
    let mut used = vec![false; n + 1];
    for row in 1..=n {
        owner[0] = row;
        let mut j0 = 0;
        minv.iter_mut().for_each(|x| *x = f64::INFINITY);
        used.iter_mut().for_each(|x| *x = false);
        loop {
            used[j0] = true;
            let i0 = owner[j0];
            let mut delta = f64::INFINITY;
            let mut j1 = 0;
            for j in 1..=n {
                if !used[j] {
                    let cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
                    if cur < minv[j] {
                        minv[j] = cur;
                        way[j] = j0;
                    }
                    if minv[j] < delta {
                        delta = minv[j];
                        j1 = j;
                    }
                }
            }
            for j in 0..=n {
                if used[j] {
                    u[owner[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if owner[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            owner[j0] = owner[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    let mut assignment = vec![0usize; n];
    for j in 1..=n {
        if owner[j] > 0 {
            assignment[owner[j] - 1] = j - 1;
        }
    }
    let total = assignment.iter().enumerate().map(|(i, &j)| cost(i, j)).sum();
    (assignment, total)
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Exact Wasserstein-1 distance between two stacks of curves with uniform
/// weights and the discretized L1 ground metric.
///
/// Unequal sizes are handled by replicating each measure up to the least
/// common multiple of the sizes, which keeps the weights uniform.
pub fn wasserstein_curves(p: &CurveMatrix, q: &CurveMatrix) -> Result<f64> {
    p.grid().ensure_same(q.grid())?;
    let (np, nq) = (p.rows(), q.rows());
    if np == 0 || nq == 0 {
        return Err(Error::param("Wasserstein distance needs nonempty measures"));
    }
    for size in [np, nq] {
        if size > MAX_EXACT_SIZE {
            return Err(Error::TooLargeForExact {
                size,
                limit: MAX_EXACT_SIZE,
            });
        }
    }
    let n = np / gcd(np, nq) * nq;
    if n > MAX_EXACT_SIZE {
        return Err(Error::TooLargeForExact {
            size: n,
            limit: MAX_EXACT_SIZE,
        });
    }
    let grid = *p.grid();
    let cost: Vec<f64> = (0..np * nq)
        .into_par_iter()
        .map(|k| row_l1(&grid, p.row(k / nq), q.row(k % nq)))
        .collect();
    let (rp, rq) = (n / np, n / nq);
    let (_, total) = solve_assignment(n, |i, j| cost[(i / rp) * nq + j / rq]);
    Ok(total / n as f64)
}

pub fn wasserstein_exact(p: &CurveMeasure, q: &CurveMeasure) -> Result<f64> {
    wasserstein_curves(&p.curves, &q.curves)
}

/// Wasserstein-1 distance between two empirical measures on the line.
pub fn wasserstein_1d(a: &[f64], b: &[f64]) -> f64 {
    if a.is_empty() || b.is_empty() {
        return 0.0;
    }
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_unstable_by(f64::total_cmp);
    b.sort_unstable_by(f64::total_cmp);
    if a.len() == b.len() {
        return a.iter().zip(&b).map(|(x, y)| (x - y).abs()).sum::<f64>() / a.len() as f64;
    }
    // integrate |F_a - F_b| between consecutive merged sample points
    let (wa, wb) = (1.0 / a.len() as f64, 1.0 / b.len() as f64);
    let (mut i, mut j) = (0, 0);
    let (mut fa, mut fb) = (0.0f64, 0.0f64);
    let mut prev = a[0].min(b[0]);
    let mut total = 0.0;
    while i < a.len() || j < b.len() {
        let x = match (a.get(i), b.get(j)) {
            (Some(&x), Some(&y)) => x.min(y),
            (Some(&x), None) => x,
            (None, Some(&y)) => y,
            (None, None) => unreachable!(),
        };
        total += (fa - fb).abs() * (x - prev);
        while i < a.len() && a[i] == x {
            fa += wa;
            i += 1;
        }
        while j < b.len() && b[j] == x {
            fb += wb;
            j += 1;
        }
        prev = x;
    }
    total
}

/// Sliced Wasserstein-1 between two point clouds in `R^d` (rows of length `d`).
pub fn sliced_wasserstein_points(p: &[Vec<f64>], q: &[Vec<f64>], n_slices: usize, seed: u64) -> Result<f64> {
    if n_slices == 0 {
        return Err(Error::param("need at least one slice"));
    }
    let d = p.first().or(q.first()).map_or(0, Vec::len);
    if p.iter().chain(q).any(|x| x.len() != d) || d == 0 {
        return Err(Error::param("points must share a positive dimension"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut total = 0.0;
    for _ in 0..n_slices {
        let theta = loop {
            let t: Vec<f64> = (0..d).map(|_| StandardNormal.sample(&mut rng)).collect();
            let norm = t.iter().map(|x| x * x).sum::<f64>().sqrt();
            if norm > 0.0 {
                break t.into_iter().map(|x| x / norm).collect::<Vec<_>>();
            }
        };
        let project = |x: &Vec<f64>| x.iter().zip(&theta).map(|(a, b)| a * b).sum::<f64>();
        let pa: Vec<f64> = p.iter().map(project).collect();
        let pb: Vec<f64> = q.iter().map(project).collect();
        total += wasserstein_1d(&pa, &pb);
    }
    Ok(total / n_slices as f64)
}

/// Sliced Wasserstein-1 between curve measures.
///
/// Each curve is a point in `R^m`, scaled by the grid step; the result is the
/// mean 1D Wasserstein distance over `n_slices` seeded random projections.
pub fn sliced_wasserstein(p: &CurveMeasure, q: &CurveMeasure, n_slices: usize, seed: u64) -> Result<f64> {
    sliced_wasserstein_curves(&p.curves, &q.curves, n_slices, seed)
}

pub fn sliced_wasserstein_curves(p: &CurveMatrix, q: &CurveMatrix, n_slices: usize, seed: u64) -> Result<f64> {
    p.grid().ensure_same(q.grid())?;
    let h = p.grid().step();
    let to_points = |c: &CurveMatrix| -> Vec<Vec<f64>> {
        c.iter_rows()
            .map(|r| r.iter().map(|&v| v as f64 * h).collect())
            .collect()
    };
    sliced_wasserstein_points(&to_points(p), &to_points(q), n_slices, seed)
}

/// L2 distance between two vectorized measures over the union value range.
pub fn histogram_l2(a: &SampHistogram, b: &SampHistogram) -> Result<f64> {
    a.grid.ensure_same(&b.grid)?;
    if a.window_len != b.window_len {
        return Err(Error::param("histograms use different window lengths"));
    }
    let bound = a.chi_bound.max(b.chi_bound);
    let (ra, rb) = (a.rebin(bound)?, b.rebin(bound)?);
    Ok(ra
        .as_flat()
        .iter()
        .zip(rb.as_flat())
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt())
}

fn check_weights(w: &[f64], n: usize) -> Result<()> {
    if w.len() != n {
        return Err(Error::param(format!("expected {n} weights, got {}", w.len())));
    }
    if w.iter().any(|&x| !(x.is_finite() && x >= 0.0)) {
        return Err(Error::param("weights must be finite and nonnegative"));
    }
    let s: f64 = w.iter().sum();
    if (s - 1.0).abs() > 1e-9 {
        return Err(Error::WeightSum(s));
    }
    Ok(())
}

fn quadratic_form(m: &DistanceMatrix, a: &[f64], b: &[f64]) -> f64 {
    let mut total = 0.0;
    for (i, &wa) in a.iter().enumerate() {
        if wa == 0.0 {
            continue;
        }
        let row = m.row(i);
        total += wa * row.iter().zip(b).map(|(d, wb)| d * wb).sum::<f64>();
    }
    total
}

/// Energy distance between two weighted samples of the items of `m`.
///
/// `w_y` and `w_o` are full-length probability vectors over the items;
/// entries outside a group are zero.
pub fn energy_distance(m: &DistanceMatrix, w_y: &[f64], w_o: &[f64]) -> Result<f64> {
    check_weights(w_y, m.len())?;
    check_weights(w_o, m.len())?;
    Ok(2.0 * quadratic_form(m, w_y, w_o) - quadratic_form(m, w_o, w_o) - quadratic_form(m, w_y, w_y))
}

/// Seed for pair `(i, j)` derived from a global seed (SplitMix64 finalizer).
pub fn pair_seed(seed: u64, i: usize, j: usize) -> u64 {
    let mut z = seed
        .wrapping_add((i as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15))
        .wrapping_add((j as u64).wrapping_mul(0xBF58_476D_1CE4_E5B9));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Pairwise distances over `items`, upper triangle only, in parallel.
///
/// `dist` receives a per-pair seed derived from `(seed, i, j)`, so the result
/// does not depend on scheduling.
pub fn pairwise<T, F>(ids: Vec<String>, items: &[T], seed: u64, dist: F) -> Result<DistanceMatrix>
where
    T: Sync,
    F: Fn(&T, &T, u64) -> Result<f64> + Sync,
{
    if items.len() < 2 {
        return Err(Error::param("pairwise distances need at least two items"));
    }
    if ids.len() != items.len() {
        return Err(Error::param("one id per item is required"));
    }
    let index: Vec<(usize, usize)> = pairs(items.len()).collect();
    let upper = index
        .par_iter()
        .map(|&(i, j)| dist(&items[i], &items[j], pair_seed(seed, i, j)))
        .collect::<Result<Vec<f64>>>()?;
    Ok(DistanceMatrix::from_upper(ids, &upper))
}

/// Distances available between curve-based descriptors.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MetricChoice {
    /// L1 between DETECT curves.
    L1,
    /// Direction-aligned ECT distance.
    Ect,
    /// Exact Wasserstein-1 between curve measures.
    WassersteinExact,
    /// Sliced Wasserstein-1 with the given number of slices.
    Sliced { slices: usize },
    /// L2 between vectorized measures.
    L2,
}

/// A descriptor that can be compared under some [`MetricChoice`].
#[derive(Debug, Clone, PartialEq)]
pub enum Descriptor {
    Ect(EctMatrix),
    Measure(CurveMeasure),
    Detect(DetectCurve),
    Histogram(SampHistogram),
}

impl Descriptor {
    fn curves(&self) -> Option<&CurveMatrix> {
        match self {
            Descriptor::Ect(e) => Some(&e.curves),
            Descriptor::Measure(m) => Some(&m.curves),
            _ => None,
        }
    }

    fn grid(&self) -> &FiltrationGrid {
        match self {
            Descriptor::Ect(e) => e.grid(),
            Descriptor::Measure(m) => m.grid(),
            Descriptor::Detect(d) => &d.grid,
            Descriptor::Histogram(h) => &h.grid,
        }
    }
}

/// Distance between two descriptors under `metric`.
pub fn descriptor_distance(a: &Descriptor, b: &Descriptor, metric: MetricChoice, seed: u64) -> Result<f64> {
    a.grid().ensure_same(b.grid())?;
    let unsupported = || Error::param(format!("metric {metric:?} does not apply to these descriptors"));
    match metric {
        MetricChoice::L1 => match (a, b) {
            (Descriptor::Detect(f), Descriptor::Detect(g)) => detect_l1(f, g),
            _ => Err(unsupported()),
        },
        MetricChoice::Ect => match (a, b) {
            (Descriptor::Ect(x), Descriptor::Ect(y)) => ect_distance(x, y),
            _ => Err(unsupported()),
        },
        MetricChoice::WassersteinExact => match (a.curves(), b.curves()) {
            (Some(x), Some(y)) => wasserstein_curves(x, y),
            _ => Err(unsupported()),
        },
        MetricChoice::Sliced { slices } => match (a.curves(), b.curves()) {
            (Some(x), Some(y)) => sliced_wasserstein_curves(x, y, slices, seed),
            _ => Err(unsupported()),
        },
        MetricChoice::L2 => match (a, b) {
            (Descriptor::Histogram(x), Descriptor::Histogram(y)) => histogram_l2(x, y),
            _ => Err(unsupported()),
        },
    }
}

/// Pairwise matrix over descriptors; all must share one grid.
pub fn pairwise_descriptors(
    ids: Vec<String>,
    items: &[Descriptor],
    metric: MetricChoice,
    seed: u64,
) -> Result<DistanceMatrix> {
    if let Some(first) = items.first() {
        for d in &items[1..] {
            first.grid().ensure_same(d.grid())?;
        }
    }
    pairwise(ids, items, seed, |a, b, s| descriptor_distance(a, b, metric, s))
}
