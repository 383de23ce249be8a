//! Seeded generators for synthetic shapes.
//!
//! Every generator derives one RNG stream per sample from the caller's seed,
//! so samples can be produced in parallel and still come out identical.

use std::f64::consts::{PI, TAU};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::complex::{GeometricComplex, Point};
use crate::error::{Error, Result};
use crate::imageops::BinaryMask;
use crate::metric::pair_seed;

fn stream(seed: u64, sample: usize, purpose: usize) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(pair_seed(seed, sample, purpose))
}

fn normal(sigma: f64) -> Result<Normal<f64>> {
    Normal::new(0.0, sigma).map_err(|e| Error::param(format!("bad noise level {sigma}: {e}")))
}

/// A class of three-edge trees joined at the origin.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TreeClassSpec {
    pub edge_lengths: [f64; 3],
    /// Base angle of each edge, radians.
    pub edge_angles: [f64; 3],
    /// Vertices per edge, the shared origin included.
    pub points_per_edge: usize,
    pub sigma: f64,
    pub samples: usize,
}

impl TreeClassSpec {
    fn with_angles(degrees: [f64; 3]) -> Self {
        TreeClassSpec {
            edge_lengths: [2.0, 3.0, 4.0],
            edge_angles: degrees.map(f64::to_radians),
            points_per_edge: 100,
            sigma: 0.02,
            samples: 20,
        }
    }

    /// First demo class: edges spread evenly.
    pub fn class_a() -> Self {
        Self::with_angles([0.0, 120.0, 240.0])
    }

    /// Second demo class: the two longer edges close together.
    pub fn class_b() -> Self {
        Self::with_angles([0.0, 132.0, 228.0])
    }

    pub fn validate(&self) -> Result<()> {
        if self.edge_lengths.iter().any(|&l| !(l.is_finite() && l > 0.0)) {
            return Err(Error::param("edge lengths must be positive"));
        }
        if self.points_per_edge < 2 {
            return Err(Error::param("each edge needs at least 2 points"));
        }
        if !(self.sigma.is_finite() && self.sigma >= 0.0) {
            return Err(Error::param("noise level must be nonnegative"));
        }
        Ok(())
    }
}

/// One tree: origin plus `points_per_edge - 1` vertices along each edge.
///
/// Noise is drawn before the optional rotation and applied in the class
/// frame, so the rotated and unrotated versions of a sample are congruent.
fn tree_sample(spec: &TreeClassSpec, rotate: bool, seed: u64, index: usize) -> Result<GeometricComplex> {
    let mut noise_rng = stream(seed, index, 0);
    let noise = normal(spec.sigma)?;
    let per_edge = spec.points_per_edge - 1;
    let mut vertices: Vec<Point> = vec![[0.0, 0.0]];
    let mut edges = Vec::with_capacity(3 * per_edge);
    for (&len, &angle) in spec.edge_lengths.iter().zip(&spec.edge_angles) {
        let (s, c) = angle.sin_cos();
        let mut prev = 0;
        for j in 1..=per_edge {
            let r = len * j as f64 / per_edge as f64;
            let (ex, ey) = if spec.sigma > 0.0 {
                (noise.sample(&mut noise_rng), noise.sample(&mut noise_rng))
            } else {
                (0.0, 0.0)
            };
            vertices.push([r * c + ex, r * s + ey]);
            let cur = vertices.len() - 1;
            edges.push(vec![prev, cur]);
            prev = cur;
        }
    }
    let tree = GeometricComplex::new(vertices, edges)?;
    Ok(if rotate {
        let phi = stream(seed, index, 1).random::<f64>() * TAU;
        tree.rotated(phi)
    } else {
        tree
    })
}

/// `spec.samples` noisy trees, optionally each under its own uniform rotation.
pub fn gen_trees(spec: &TreeClassSpec, rotate: bool, seed: u64) -> Result<Vec<GeometricComplex>> {
    spec.validate()?;
    (0..spec.samples)
        .into_par_iter()
        .map(|i| tree_sample(spec, rotate, seed, i))
        .collect()
}

/// Region from which ellipse centres are drawn uniformly.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CenterSampler {
    /// Centred square of the given side.
    Square { side: f64 },
    /// Centred square without its upper-right quadrant.
    ThreeQuadrant { side: f64 },
    /// Centred axis-aligned ellipse with the given full axis lengths.
    EllipseRegion { major: f64, minor: f64 },
}

impl CenterSampler {
    pub fn contains(&self, p: Point) -> bool {
        match *self {
            CenterSampler::Square { side } => p[0].abs() <= side / 2.0 && p[1].abs() <= side / 2.0,
            CenterSampler::ThreeQuadrant { side } => {
                p[0].abs() <= side / 2.0 && p[1].abs() <= side / 2.0 && !(p[0] > 0.0 && p[1] > 0.0)
            }
            CenterSampler::EllipseRegion { major, minor } => {
                (p[0] / (major / 2.0)).powi(2) + (p[1] / (minor / 2.0)).powi(2) <= 1.0
            }
        }
    }

    fn half_extent(&self) -> (f64, f64) {
        match *self {
            CenterSampler::Square { side } | CenterSampler::ThreeQuadrant { side } => (side / 2.0, side / 2.0),
            CenterSampler::EllipseRegion { major, minor } => (major / 2.0, minor / 2.0),
        }
    }

    fn sample(&self, rng: &mut impl Rng) -> Point {
        let (hx, hy) = self.half_extent();
        loop {
            let p = [rng.random_range(-hx..=hx), rng.random_range(-hy..=hy)];
            if self.contains(p) {
                return p;
            }
        }
    }
}

/// A field of filled, noisy ellipses.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EllipseFieldSpec {
    pub count: usize,
    /// Full axis lengths.
    pub major: f64,
    pub minor: f64,
    pub boundary_points: usize,
    pub noise_sigma: f64,
    pub centers: CenterSampler,
}

impl EllipseFieldSpec {
    /// `count` ellipses with centres in the centred square of side 50.
    pub fn square(count: usize) -> Self {
        EllipseFieldSpec {
            count,
            major: 2.0,
            minor: 1.0,
            boundary_points: 80,
            noise_sigma: 0.05,
            centers: CenterSampler::Square { side: 50.0 },
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.count == 0 {
            return Err(Error::param("need at least one ellipse"));
        }
        if !(self.major > 0.0 && self.minor > 0.0) {
            return Err(Error::param("ellipse axes must be positive"));
        }
        if self.boundary_points < 3 {
            return Err(Error::param("an ellipse needs at least 3 boundary points"));
        }
        if !(self.noise_sigma.is_finite() && self.noise_sigma >= 0.0) {
            return Err(Error::param("noise level must be nonnegative"));
        }
        Ok(())
    }
}

/// Disjoint union of fan-triangulated ellipses.
///
/// Each ellipse has a centre vertex followed by its boundary vertices; the
/// fan has one triangle, one boundary edge and one spoke per boundary point.
/// Overlapping ellipses stay separate components.
pub fn gen_ellipse_field(spec: &EllipseFieldSpec, seed: u64) -> Result<GeometricComplex> {
    spec.validate()?;
    let noise = normal(spec.noise_sigma)?;
    let n = spec.boundary_points;
    let mut vertices = Vec::with_capacity(spec.count * (n + 1));
    let mut simplices = Vec::with_capacity(spec.count * 3 * n);
    for e in 0..spec.count {
        let mut rng = stream(seed, e, 2);
        let centre = spec.centers.sample(&mut rng);
        let (s, c) = (rng.random::<f64>() * PI).sin_cos();
        let base = vertices.len();
        vertices.push(centre);
        for k in 0..n {
            let t = TAU * k as f64 / n as f64;
            let (x, y) = (spec.major / 2.0 * t.cos(), spec.minor / 2.0 * t.sin());
            let (ex, ey) = if spec.noise_sigma > 0.0 {
                (noise.sample(&mut rng), noise.sample(&mut rng))
            } else {
                (0.0, 0.0)
            };
            vertices.push([centre[0] + c * x - s * y + ex, centre[1] + s * x + c * y + ey]);
        }
        for k in 0..n {
            let (b0, b1) = (base + 1 + k, base + 1 + (k + 1) % n);
            simplices.push(vec![base, b0]);
            simplices.push(vec![b0, b1]);
            simplices.push(vec![base, b0, b1]);
        }
    }
    GeometricComplex::new(vertices, simplices)
}

/// Random complex on `n_vertices` points in the unit disk: each edge kept
/// with probability `p_edge`, each triangle whose edges are all present kept
/// with probability `p_face`.
pub fn random_complex(n_vertices: usize, p_edge: f64, p_face: f64, seed: u64) -> Result<GeometricComplex> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let vertices: Vec<Point> = (0..n_vertices)
        .map(|_| {
            let r = rng.random::<f64>().sqrt();
            let t = rng.random::<f64>() * TAU;
            [r * t.cos(), r * t.sin()]
        })
        .collect();
    let n = n_vertices;
    let mut adj = vec![false; n * n];
    let mut simplices = Vec::new();
    for i in 0..n_vertices {
        for j in i + 1..n_vertices {
            if rng.random_bool(p_edge) {
                adj[i * n + j] = true;
                simplices.push(vec![i, j]);
            }
        }
    }
    for i in 0..n_vertices {
        for j in i + 1..n_vertices {
            for k in j + 1..n_vertices {
                if adj[i * n + j] && adj[j * n + k] && adj[i * n + k] && rng.random_bool(p_face) {
                    simplices.push(vec![i, j, k]);
                }
            }
        }
    }
    GeometricComplex::new(vertices, simplices)
}

/// Random mask with i.i.d. foreground pixels of the given density.
pub fn random_mask(width: usize, height: usize, density: f64, seed: u64) -> Result<BinaryMask> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let bits = (0..width * height).map(|_| rng.random_bool(density)).collect();
    BinaryMask::new(width, height, bits)
}

/// Thick arms radiating from the image centre, rasterized into a mask.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArmShapeSpec {
    /// `(angle in degrees, length in pixels)` of each arm.
    pub arms: Vec<(f64, f64)>,
    /// Arm width in pixels.
    pub thickness: f64,
    /// Side of the square canvas.
    pub size: usize,
    /// Standard deviation of the per-sample relative arm-length jitter.
    pub length_jitter: f64,
}

impl ArmShapeSpec {
    fn preset(arms: &[(f64, f64)]) -> Self {
        ArmShapeSpec {
            arms: arms.to_vec(),
            thickness: 4.0,
            size: 48,
            length_jitter: 0.05,
        }
    }

    /// The bundled three-class mask set: equal-length tripods whose two
    /// outer arms open to 120, 110 and 100 degrees from the first.
    pub fn presets() -> [ArmShapeSpec; 3] {
        [
            Self::preset(&[(0.0, 18.0), (120.0, 18.0), (240.0, 18.0)]),
            Self::preset(&[(0.0, 18.0), (110.0, 18.0), (250.0, 18.0)]),
            Self::preset(&[(0.0, 18.0), (100.0, 18.0), (260.0, 18.0)]),
        ]
    }
}

fn segment_distance(p: Point, a: Point, b: Point) -> f64 {
    let (dx, dy) = (b[0] - a[0], b[1] - a[1]);
    let len2 = dx * dx + dy * dy;
    let t = if len2 > 0.0 {
        (((p[0] - a[0]) * dx + (p[1] - a[1]) * dy) / len2).clamp(0.0, 1.0)
    } else {
        0.0
    };
    (p[0] - a[0] - t * dx).hypot(p[1] - a[1] - t * dy)
}

/// Rasterized arm shapes, optionally each under a uniform random rotation.
pub fn gen_arm_masks(spec: &ArmShapeSpec, samples: usize, rotate: bool, seed: u64) -> Result<Vec<BinaryMask>> {
    if spec.arms.is_empty() || spec.size == 0 || spec.thickness <= 0.0 {
        return Err(Error::param("arm shape needs arms, a canvas and a positive thickness"));
    }
    let jitter = normal(spec.length_jitter)?;
    (0..samples)
        .into_par_iter()
        .map(|i| {
            let mut rng = stream(seed, i, 3);
            let phi = if rotate { rng.random::<f64>() * TAU } else { 0.0 };
            let c = (spec.size as f64 - 1.0) / 2.0;
            let ends: Vec<Point> = spec
                .arms
                .iter()
                .map(|&(deg, len)| {
                    let l = len * (1.0 + jitter.sample(&mut rng));
                    let t = deg.to_radians() + phi;
                    [c + l * t.cos(), c - l * t.sin()]
                })
                .collect();
            BinaryMask::from_fn(spec.size, spec.size, |x, y| {
                let p = [x as f64, y as f64];
                ends.iter()
                    .any(|&e| segment_distance(p, [c, c], e) <= spec.thickness / 2.0)
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::CellComplex;

    #[test]
    fn tree_counts() {
        let trees = gen_trees(&TreeClassSpec::class_a(), true, 1).unwrap();
        assert_eq!(trees.len(), 20);
        for t in &trees {
            assert_eq!(t.vertices().len(), 298);
            assert_eq!(t.simplices(1).len(), 297);
            assert_eq!(t.euler_characteristic(), 1);
        }
    }

    #[test]
    fn noiseless_unrotated_trees_are_identical() {
        let spec = TreeClassSpec {
            sigma: 0.0,
            ..TreeClassSpec::class_b()
        };
        let trees = gen_trees(&spec, false, 5).unwrap();
        assert!(trees.iter().all(|t| t == &trees[0]));
    }

    #[test]
    fn rotation_preserves_distances() {
        let spec = TreeClassSpec::class_a();
        let plain = gen_trees(&spec, false, 9).unwrap();
        let rotated = gen_trees(&spec, true, 9).unwrap();
        for (p, r) in plain.iter().zip(&rotated) {
            let (pv, rv) = (p.vertices(), r.vertices());
            for i in (0..pv.len()).step_by(17) {
                for j in (0..pv.len()).step_by(13) {
                    let dp = (pv[i][0] - pv[j][0]).hypot(pv[i][1] - pv[j][1]);
                    let dr = (rv[i][0] - rv[j][0]).hypot(rv[i][1] - rv[j][1]);
                    assert!((dp - dr).abs() < 1e-9);
                }
            }
        }
    }

    #[test]
    fn ellipse_fields() {
        let one = EllipseFieldSpec {
            noise_sigma: 0.0,
            ..EllipseFieldSpec::square(1)
        };
        let k = gen_ellipse_field(&one, 0).unwrap();
        assert_eq!(k.euler_characteristic(), 1);
        assert_eq!(k.cell_counts(), vec![81, 160, 80]);
        let many = gen_ellipse_field(&EllipseFieldSpec::square(50), 3).unwrap();
        assert_eq!(many.euler_characteristic(), 50);
    }

    #[test]
    fn ellipse_centres_respect_region() {
        for centers in [
            CenterSampler::ThreeQuadrant { side: 50.0 },
            CenterSampler::EllipseRegion {
                major: 100.0,
                minor: 20.0,
            },
        ] {
            let spec = EllipseFieldSpec {
                centers: centers.clone(),
                ..EllipseFieldSpec::square(40)
            };
            let k = gen_ellipse_field(&spec, 4).unwrap();
            for e in 0..40 {
                assert!(centers.contains(k.vertices()[e * 81]));
            }
        }
    }

    #[test]
    fn random_complexes_are_valid() {
        for s in 0..20 {
            let k = random_complex(10, 0.4, 0.5, s).unwrap();
            assert_eq!(k.vertices().len(), 10);
            assert!(k.top_dimension() <= 2);
        }
    }

    #[test]
    fn arm_masks_are_connected() {
        for spec in ArmShapeSpec::presets() {
            for m in gen_arm_masks(&spec, 5, true, 2).unwrap() {
                assert_eq!(crate::imageops::betti(&m), (1, 0));
            }
        }
    }
}
