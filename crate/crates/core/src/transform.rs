//! Euler characteristic curves and the transforms built from them.
//!
//! Every transform samples curves on a shared [`FiltrationGrid`]. The kernel
//! is the lower-star decomposition: each cell is charged to its highest
//! vertex, so one pass over the cells and one sort of the vertex heights give
//! the whole curve for a direction.

use std::f64::consts::TAU;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::complex::{bounding_radius, height, lower_star_chi, CellComplex, Direction};
use crate::error::{Error, Result};

/// Half-range used for complexes when none is given, relative to the bounding radius.
pub const DEFAULT_RANGE_FACTOR: f64 = 1.1;

/// Half-range used for normalized images (longest side = 1).
pub const DEFAULT_IMAGE_RANGE: f64 = 1.5;

/// Measure of the unit circle, the direction space of planar transforms.
pub const SPHERE_MEASURE: f64 = TAU;

/// Uniform grid `t_i = -a + 2a i / (m - 1)` on `[-a, a]`, endpoints included.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FiltrationGrid {
    half_range: f64,
    points: usize,
}

impl FiltrationGrid {
    pub fn new(half_range: f64, points: usize) -> Result<Self> {
        if !(half_range.is_finite() && half_range > 0.0) {
            return Err(Error::param(format!("half-range must be positive, got {half_range}")));
        }
        if points < 2 {
            return Err(Error::param(format!("grid needs at least 2 points, got {points}")));
        }
        Ok(FiltrationGrid { half_range, points })
    }

    /// Grid covering `complex` with the default margin.
    pub fn covering<K: CellComplex + ?Sized>(complex: &K, points: usize) -> Result<Self> {
        let r = bounding_radius(complex)?;
        let a = if r > 0.0 { DEFAULT_RANGE_FACTOR * r } else { 1.0 };
        Self::new(a, points)
    }

    pub fn half_range(&self) -> f64 {
        self.half_range
    }

    pub fn len(&self) -> usize {
        self.points
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Spacing between consecutive points.
    pub fn step(&self) -> f64 {
        2.0 * self.half_range / (self.points - 1) as f64
    }

    pub fn point(&self, i: usize) -> f64 {
        let a = self.half_range;
        if i + 1 == self.points {
            a
        } else {
            -a + 2.0 * a * i as f64 / (self.points - 1) as f64
        }
    }

    pub fn points(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.points).map(move |i| self.point(i))
    }

    pub(crate) fn ensure_same(&self, other: &FiltrationGrid) -> Result<()> {
        if self.points != other.points || self.half_range.to_bits() != other.half_range.to_bits() {
            return Err(Error::GridMismatch(format!(
                "[-{}, {}] x {} vs [-{}, {}] x {}",
                self.half_range, self.half_range, self.points, other.half_range, other.half_range, other.points
            )));
        }
        Ok(())
    }

    fn check_covers(&self, radius: f64) -> Result<()> {
        if self.half_range < radius {
            return Err(Error::RangeTooSmall {
                range: self.half_range,
                required: radius,
            });
        }
        Ok(())
    }
}

/// Integer-valued curve sampled on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct EccCurve {
    pub grid: FiltrationGrid,
    pub values: Vec<i32>,
}

/// Row-major stack of curves sharing one grid.
#[derive(Debug, Clone, PartialEq)]
pub struct CurveMatrix {
    grid: FiltrationGrid,
    rows: usize,
    values: Vec<i32>,
}

impl CurveMatrix {
    pub fn from_rows(grid: FiltrationGrid, rows: Vec<Vec<i32>>) -> Result<Self> {
        let n = rows.len();
        let mut values = Vec::with_capacity(n * grid.len());
        for (i, r) in rows.into_iter().enumerate() {
            if r.len() != grid.len() {
                return Err(Error::GridMismatch(format!(
                    "row {i} has {} values, grid has {}",
                    r.len(),
                    grid.len()
                )));
            }
            values.extend(r);
        }
        Ok(CurveMatrix { grid, rows: n, values })
    }

    pub fn grid(&self) -> &FiltrationGrid {
        &self.grid
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn row(&self, i: usize) -> &[i32] {
        let m = self.grid.len();
        &self.values[i * m..(i + 1) * m]
    }

    pub fn iter_rows(&self) -> impl Iterator<Item = &[i32]> {
        self.values.chunks_exact(self.grid.len())
    }

    pub fn as_flat(&self) -> &[i32] {
        &self.values
    }

    pub fn max_abs(&self) -> i32 {
        self.values.iter().map(|v| v.abs()).max().unwrap_or(0)
    }
}

/// How the directions of a curve matrix were chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DirectionMode {
    /// `theta_i = 2 pi i / n`.
    Fixed,
    /// i.i.d. uniform angles drawn from the recorded seed.
    Random,
}

/// ECCs along an ordered list of directions.
#[derive(Debug, Clone, PartialEq)]
pub struct EctMatrix {
    pub directions: Vec<Direction>,
    pub mode: DirectionMode,
    pub seed: Option<u64>,
    pub curves: CurveMatrix,
}

impl EctMatrix {
    pub fn grid(&self) -> &FiltrationGrid {
        self.curves.grid()
    }

    pub fn row(&self, i: usize) -> &[i32] {
        self.curves.row(i)
    }

    pub fn n_dirs(&self) -> usize {
        self.curves.rows()
    }
}

/// Uniform empirical measure over ECCs along random directions.
///
/// The directions themselves are not kept: row order carries no geometric
/// meaning once they are drawn i.i.d.
#[derive(Debug, Clone, PartialEq)]
pub struct CurveMeasure {
    pub seed: u64,
    pub curves: CurveMatrix,
}

impl CurveMeasure {
    pub fn grid(&self) -> &FiltrationGrid {
        self.curves.grid()
    }

    pub fn len(&self) -> usize {
        self.curves.rows()
    }

    pub fn is_empty(&self) -> bool {
        self.curves.rows() == 0
    }

    pub fn curve(&self, i: usize) -> &[i32] {
        self.curves.row(i)
    }
}

/// Direction-averaged, mean-centered, integrated curve.
#[derive(Debug, Clone, PartialEq)]
pub struct DetectCurve {
    pub grid: FiltrationGrid,
    pub values: Vec<f64>,
}

fn ecc_values<K: CellComplex + ?Sized>(complex: &K, v: &Direction, grid: &FiltrationGrid) -> Vec<i32> {
    let chi = lower_star_chi(complex, v);
    let mut order: Vec<(f64, i64)> = complex
        .vertices()
        .iter()
        .zip(chi)
        .map(|(p, c)| (height(p, v), c))
        .collect();
    order.sort_unstable_by(|a, b| a.0.total_cmp(&b.0));

    let mut values = Vec::with_capacity(grid.len());
    let mut next = 0;
    let mut acc = 0i64;
    for t in grid.points() {
        while next < order.len() && order[next].0 <= t {
            acc += order[next].1;
            next += 1;
        }
        values.push(acc as i32);
    }
    values
}

/// Euler characteristic curve of `complex` along `v`.
pub fn ecc<K: CellComplex + ?Sized>(complex: &K, v: &Direction, grid: &FiltrationGrid) -> Result<EccCurve> {
    if !complex.is_empty() {
        grid.check_covers(bounding_radius(complex)?)?;
    }
    Ok(EccCurve {
        grid: *grid,
        values: ecc_values(complex, v, grid),
    })
}

fn curves_along<K: CellComplex + Sync + ?Sized>(
    complex: &K,
    directions: &[Direction],
    grid: &FiltrationGrid,
) -> Result<CurveMatrix> {
    if !complex.is_empty() {
        grid.check_covers(bounding_radius(complex)?)?;
    }
    let rows: Vec<Vec<i32>> = directions.par_iter().map(|v| ecc_values(complex, v, grid)).collect();
    CurveMatrix::from_rows(*grid, rows)
}

/// `n` evenly spaced directions starting at angle 0.
pub fn fixed_directions(n: usize) -> Vec<Direction> {
    (0..n)
        .map(|i| Direction::from_angle(TAU * i as f64 / n as f64))
        .collect()
}

/// `n` i.i.d. uniform directions, drawn sequentially from `seed`.
pub fn random_directions(n: usize, seed: u64) -> Vec<Direction> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| Direction::from_angle(rng.random::<f64>() * TAU))
        .collect()
}

/// Euler characteristic transform along `n_dirs` evenly spaced directions.
pub fn ect<K: CellComplex + Sync + ?Sized>(complex: &K, n_dirs: usize, grid: &FiltrationGrid) -> Result<EctMatrix> {
    if n_dirs == 0 {
        return Err(Error::param("need at least one direction"));
    }
    let directions = fixed_directions(n_dirs);
    let curves = curves_along(complex, &directions, grid)?;
    Ok(EctMatrix {
        directions,
        mode: DirectionMode::Fixed,
        seed: None,
        curves,
    })
}

/// ECT along `n_dirs` random directions, keeping the directions.
pub fn ect_random<K: CellComplex + Sync + ?Sized>(
    complex: &K,
    n_dirs: usize,
    grid: &FiltrationGrid,
    seed: u64,
) -> Result<EctMatrix> {
    if n_dirs == 0 {
        return Err(Error::param("need at least one direction"));
    }
    let directions = random_directions(n_dirs, seed);
    let curves = curves_along(complex, &directions, grid)?;
    Ok(EctMatrix {
        directions,
        mode: DirectionMode::Random,
        seed: Some(seed),
        curves,
    })
}

/// SampEuler of order `n_dirs`: ECCs along i.i.d. uniform random directions.
pub fn sampeuler<K: CellComplex + Sync + ?Sized>(
    complex: &K,
    n_dirs: usize,
    grid: &FiltrationGrid,
    seed: u64,
) -> Result<CurveMeasure> {
    let m = ect_random(complex, n_dirs, grid, seed)?;
    Ok(CurveMeasure { seed, curves: m.curves })
}

fn trapezoid(values: &[f64], h: f64) -> f64 {
    values.windows(2).map(|w| 0.5 * h * (w[0] + w[1])).sum()
}

/// Cumulative trapezoid integral of `mean` minus its linear normalization,
/// scaled by the sphere measure.
fn detect_from_mean(grid: &FiltrationGrid, mean: &[f64]) -> DetectCurve {
    let h = grid.step();
    let a = grid.half_range();
    let total = trapezoid(mean, h);
    let mut acc = 0.0;
    let mut values = Vec::with_capacity(mean.len());
    for (i, t) in grid.points().enumerate() {
        if i > 0 {
            acc += 0.5 * h * (mean[i - 1] + mean[i]);
        }
        values.push(SPHERE_MEASURE * (acc - (t + a) / (2.0 * a) * total));
    }
    values[0] = 0.0;
    DetectCurve { grid: *grid, values }
}

/// DETECT of a stack of curves.
///
/// Each row is centered by its mean over `[-a, a]` and integrated from `-a`;
/// the rows are then averaged and multiplied by `2 pi`. Because every step is
/// linear, this is computed on the row average directly.
pub fn detect_curves(curves: &CurveMatrix) -> Result<DetectCurve> {
    if curves.rows() == 0 {
        return Err(Error::param("DETECT needs at least one curve"));
    }
    let m = curves.grid().len();
    let mut mean = vec![0.0; m];
    for row in curves.iter_rows() {
        for (acc, &v) in mean.iter_mut().zip(row) {
            *acc += v as f64;
        }
    }
    let n = curves.rows() as f64;
    mean.iter_mut().for_each(|v| *v /= n);
    Ok(detect_from_mean(curves.grid(), &mean))
}

/// DETECT from an ECT matrix (fixed or random directions).
pub fn detect(ect: &EctMatrix) -> Result<DetectCurve> {
    detect_curves(&ect.curves)
}

/// DETECT of a complex along `n_dirs` evenly spaced directions.
pub fn detect_complex<K: CellComplex + Sync + ?Sized>(
    complex: &K,
    n_dirs: usize,
    grid: &FiltrationGrid,
) -> Result<DetectCurve> {
    detect(&ect(complex, n_dirs, grid)?)
}

/// Fraction of curves that are constant on each window, by value.
#[derive(Debug, Clone, PartialEq)]
pub struct SampHistogram {
    pub grid: FiltrationGrid,
    /// Grid points per window.
    pub window_len: usize,
    /// Inclusive grid-index bounds of each window.
    pub windows: Vec<(usize, usize)>,
    /// Values are binned over `[-chi_bound, chi_bound]`.
    pub chi_bound: i32,
    /// True when a requested bound had to grow to fit the curves.
    pub range_expanded: bool,
    /// `windows.len() x (2 chi_bound + 1)`, row-major.
    mass: Vec<f64>,
}

/// Contiguous, disjoint windows of `window_len` grid points covering the grid.
/// The last window is shorter when `window_len` does not divide the grid.
pub fn tile_windows(points: usize, window_len: usize) -> Vec<(usize, usize)> {
    (0..points)
        .step_by(window_len)
        .map(|start| (start, (start + window_len).min(points) - 1))
        .collect()
}

impl SampHistogram {
    pub fn from_parts(
        grid: FiltrationGrid,
        window_len: usize,
        chi_bound: i32,
        range_expanded: bool,
        mass: Vec<f64>,
    ) -> Result<Self> {
        if window_len == 0 || chi_bound < 0 {
            return Err(Error::param("window length must be positive and chi bound nonnegative"));
        }
        let windows = tile_windows(grid.len(), window_len);
        let width = (2 * chi_bound + 1) as usize;
        if mass.len() != windows.len() * width {
            return Err(Error::param(format!(
                "histogram has {} entries, expected {} x {}",
                mass.len(),
                windows.len(),
                width
            )));
        }
        if mass.iter().any(|&v| !(0.0..=1.0).contains(&v)) {
            return Err(Error::param("histogram entries must lie in [0, 1]"));
        }
        Ok(SampHistogram {
            grid,
            window_len,
            windows,
            chi_bound,
            range_expanded,
            mass,
        })
    }

    pub fn n_bins(&self) -> usize {
        (2 * self.chi_bound + 1) as usize
    }

    /// Mass of window `w` at Euler value `k` (zero outside the bound).
    pub fn mass(&self, w: usize, k: i32) -> f64 {
        if k.abs() > self.chi_bound {
            return 0.0;
        }
        self.mass[w * self.n_bins() + (k + self.chi_bound) as usize]
    }

    pub fn window_row(&self, w: usize) -> &[f64] {
        let b = self.n_bins();
        &self.mass[w * b..(w + 1) * b]
    }

    pub fn as_flat(&self) -> &[f64] {
        &self.mass
    }

    /// Same histogram over a wider value range.
    pub fn rebin(&self, chi_bound: i32) -> Result<Self> {
        if chi_bound < self.chi_bound {
            return Err(Error::param(format!(
                "cannot shrink chi bound from {} to {chi_bound}",
                self.chi_bound
            )));
        }
        let width = (2 * chi_bound + 1) as usize;
        let shift = (chi_bound - self.chi_bound) as usize;
        let mut mass = vec![0.0; self.windows.len() * width];
        for w in 0..self.windows.len() {
            let dst = &mut mass[w * width + shift..w * width + shift + self.n_bins()];
            dst.copy_from_slice(self.window_row(w));
        }
        Ok(SampHistogram {
            chi_bound,
            mass,
            ..self.clone()
        })
    }
}

/// Vectorizes a SampEuler measure.
///
/// `mass[w][k]` is the fraction of curves equal to `k` on every grid point of
/// window `w`. With `chi_bound = None` the bound is the largest absolute curve
/// value; a requested bound that is too small grows to fit and sets
/// `range_expanded`.
pub fn vectorize(measure: &CurveMeasure, window_len: usize, chi_bound: Option<i32>) -> Result<SampHistogram> {
    if window_len == 0 {
        return Err(Error::param("window length must be at least one grid step"));
    }
    if measure.is_empty() {
        return Err(Error::param("cannot vectorize an empty measure"));
    }
    if let Some(b) = chi_bound {
        if b < 0 {
            return Err(Error::param("chi bound must be nonnegative"));
        }
    }
    let observed = measure.curves.max_abs();
    let (bound, expanded) = match chi_bound {
        None => (observed, false),
        Some(b) if b >= observed => (b, false),
        Some(_) => (observed, true),
    };
    let grid = *measure.grid();
    let windows = tile_windows(grid.len(), window_len);
    let width = (2 * bound + 1) as usize;
    let mut counts = vec![0u32; windows.len() * width];
    for row in measure.curves.iter_rows() {
        for (w, &(s, e)) in windows.iter().enumerate() {
            let c = row[s];
            if row[s..=e].iter().all(|&v| v == c) {
                counts[w * width + (c + bound) as usize] += 1;
            }
        }
    }
    let n = measure.len() as f64;
    Ok(SampHistogram {
        grid,
        window_len,
        windows,
        chi_bound: bound,
        range_expanded: expanded,
        mass: counts.into_iter().map(|c| c as f64 / n).collect(),
    })
}

/// Recovers DETECT from a pointwise histogram (one grid point per window).
///
/// The direction-averaged curve at `t` is the first moment of the histogram
/// column at `t`; integrating and normalizing it reproduces [`detect_curves`].
pub fn detect_from_histogram(hist: &SampHistogram) -> Result<DetectCurve> {
    if hist.window_len != 1 {
        return Err(Error::param(format!(
            "DETECT recovery needs one grid point per window, got {}",
            hist.window_len
        )));
    }
    if hist.mass.iter().all(|&v| v == 0.0) {
        return Err(Error::param("histogram carries no mass"));
    }
    let mean: Vec<f64> = (0..hist.windows.len())
        .map(|w| {
            hist.window_row(w)
                .iter()
                .enumerate()
                .map(|(j, &p)| (j as i32 - hist.chi_bound) as f64 * p)
                .sum()
        })
        .collect();
    Ok(detect_from_mean(&hist.grid, &mean))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::GeometricComplex;

    fn point_at_origin() -> GeometricComplex {
        GeometricComplex::new(vec![[0.0, 0.0]], vec![]).unwrap()
    }

    fn triangle() -> GeometricComplex {
        GeometricComplex::new(
            vec![[0.3, 0.1], [-0.4, 0.2], [0.1, -0.5]],
            vec![vec![0, 1], vec![1, 2], vec![0, 2], vec![0, 1, 2]],
        )
        .unwrap()
    }

    #[test]
    fn grid_points() {
        let g = FiltrationGrid::new(1.5, 4).unwrap();
        let pts: Vec<f64> = g.points().collect();
        assert_eq!(pts, vec![-1.5, -0.5, 0.5, 1.5]);
        assert!(FiltrationGrid::new(1.0, 1).is_err());
        assert!(FiltrationGrid::new(0.0, 10).is_err());
    }

    #[test]
    fn single_vertex_steps_at_zero() {
        let g = FiltrationGrid::new(1.0, 5).unwrap();
        let c = ecc(&point_at_origin(), &Direction::new(0.0, 1.0).unwrap(), &g).unwrap();
        assert_eq!(c.values, vec![0, 0, 1, 1, 1]);
    }

    #[test]
    fn triangle_curve_bounded_and_ends_at_one() {
        let g = FiltrationGrid::new(1.0, 101).unwrap();
        for v in fixed_directions(16) {
            let c = ecc(&triangle(), &v, &g).unwrap();
            assert_eq!(*c.values.last().unwrap(), 1);
            assert_eq!(c.values[0], 0);
            assert!(c.values.iter().all(|&x| (0..=3).contains(&x)));
        }
    }

    #[test]
    fn range_too_small_reports_radius() {
        let g = FiltrationGrid::new(0.1, 10).unwrap();
        match ecc(&triangle(), &Direction::new(1.0, 0.0).unwrap(), &g) {
            Err(Error::RangeTooSmall { required, .. }) => {
                assert!((required - 0.26f64.sqrt()).abs() < 1e-12)
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn ect_of_point_has_identical_rows() {
        let g = FiltrationGrid::new(1.0, 11).unwrap();
        let e = ect(&point_at_origin(), 7, &g).unwrap();
        for i in 1..7 {
            assert_eq!(e.row(i), e.row(0));
        }
        assert!(ect(&point_at_origin(), 0, &g).is_err());
    }

    #[test]
    fn ect_rotation_shifts_rows() {
        // generic position so no vertex height sits on a grid point
        let k = triangle().rotated(0.3721);
        let r = k.rotated(std::f64::consts::FRAC_PI_2);
        let g = FiltrationGrid::new(1.0, 201).unwrap();
        let n = 16;
        let a = ect(&k, n, &g).unwrap();
        let b = ect(&r, n, &g).unwrap();
        // row i of the rotated complex equals row i - n/4 of the original
        let mut mismatches = 0;
        for i in 0..n {
            if b.row(i) != a.row((i + n - n / 4) % n) {
                mismatches += 1;
            }
        }
        assert_eq!(mismatches, 0);
    }

    #[test]
    fn sampeuler_is_deterministic() {
        let g = FiltrationGrid::new(1.0, 50).unwrap();
        let a = sampeuler(&triangle(), 20, &g, 7).unwrap();
        let b = sampeuler(&triangle(), 20, &g, 7).unwrap();
        assert_eq!(a, b);
        let c = sampeuler(&triangle(), 20, &g, 8).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn sampeuler_single_row_matches_ecc() {
        let g = FiltrationGrid::new(1.0, 60).unwrap();
        let s = sampeuler(&triangle(), 1, &g, 99).unwrap();
        let v = random_directions(1, 99)[0];
        assert_eq!(s.curve(0), ecc(&triangle(), &v, &g).unwrap().values.as_slice());
    }

    #[test]
    fn detect_of_centered_vertex_matches_closed_form() {
        let a = 1.0;
        let m = 401;
        let g = FiltrationGrid::new(a, m).unwrap();
        let d = detect_complex(&point_at_origin(), 8, &g).unwrap();
        assert_eq!(d.values[0], 0.0);
        let tol = 2.0 * (2.0 * a / m as f64) * TAU;
        for (i, c) in g.points().enumerate() {
            let exact = TAU * (c.max(0.0) - (c + a) / 2.0);
            assert!((d.values[i] - exact).abs() <= tol, "{i}: {} vs {exact}", d.values[i]);
        }
    }

    #[test]
    fn vectorize_single_curve() {
        let g = FiltrationGrid::new(1.0, 10).unwrap();
        let s = CurveMeasure {
            seed: 0,
            curves: CurveMatrix::from_rows(g, vec![vec![0, 0, 0, 1, 1, 1, 1, 2, 2, 2]]).unwrap(),
        };
        let h = vectorize(&s, 3, None).unwrap();
        assert_eq!(h.windows, vec![(0, 2), (3, 5), (6, 8), (9, 9)]);
        assert_eq!(h.mass(0, 0), 1.0);
        assert_eq!(h.mass(1, 1), 1.0);
        assert!(h.window_row(2).iter().all(|&x| x == 0.0));
        assert_eq!(h.mass(3, 2), 1.0);
    }

    #[test]
    fn vectorize_expands_small_range() {
        let g = FiltrationGrid::new(1.0, 4).unwrap();
        let s = CurveMeasure {
            seed: 0,
            curves: CurveMatrix::from_rows(g, vec![vec![0, -3, 2, 1]]).unwrap(),
        };
        let h = vectorize(&s, 1, Some(1)).unwrap();
        assert!(h.range_expanded);
        assert_eq!(h.chi_bound, 3);
        assert_eq!(h.mass(1, -3), 1.0);
        let wide = h.rebin(5).unwrap();
        assert_eq!(wide.mass(1, -3), 1.0);
        assert!(h.rebin(2).is_err());
    }

    #[test]
    fn histogram_recovery_requires_pointwise_windows() {
        let g = FiltrationGrid::new(1.0, 30).unwrap();
        let s = sampeuler(&triangle(), 10, &g, 3).unwrap();
        assert!(detect_from_histogram(&vectorize(&s, 2, None).unwrap()).is_err());
        let empty = SampHistogram::from_parts(g, 1, 1, false, vec![0.0; 90]).unwrap();
        assert!(detect_from_histogram(&empty).is_err());
    }

    #[test]
    fn histogram_recovery_matches_detect() {
        let g = FiltrationGrid::new(1.0, 200).unwrap();
        let s = sampeuler(&triangle(), 50, &g, 5).unwrap();
        let direct = detect_curves(&s.curves).unwrap();
        let recovered = detect_from_histogram(&vectorize(&s, 1, None).unwrap()).unwrap();
        for (x, y) in direct.values.iter().zip(&recovered.values) {
            assert!((x - y).abs() < 1e-9);
        }
    }
}
