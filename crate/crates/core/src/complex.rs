//! Embedded cell complexes in the plane.
//!
//! Two concrete complexes are supported: [`GeometricComplex`], a simplicial
//! complex with explicit vertex coordinates, and [`CubicalComplex`], the
//! square complex of a binary pixel mask. Both expose their cells through the
//! [`CellComplex`] trait, which is all the transform kernel needs.

use std::collections::HashSet;

use crate::error::{Error, Result};

/// A point in the plane.
pub type Point = [f64; 2];

/// Height of `p` along `v`.
#[inline]
pub fn height(p: &Point, v: &Direction) -> f64 {
    p[0] * v.0[0] + p[1] * v.0[1]
}

/// A unit vector in the plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Direction([f64; 2]);

impl Direction {
    /// Tolerance on `|v| - 1` accepted by [`Direction::new`].
    pub const UNIT_TOLERANCE: f64 = 1e-9;

    pub fn new(x: f64, y: f64) -> Result<Self> {
        let norm = x.hypot(y);
        if !norm.is_finite() || norm == 0.0 {
            return Err(Error::param("direction must be nonzero"));
        }
        if (norm - 1.0).abs() > Self::UNIT_TOLERANCE {
            return Err(Error::param(format!(
                "direction ({x}, {y}) is not a unit vector (norm {norm})"
            )));
        }
        Ok(Direction([x, y]))
    }

    /// Rescales any nonzero vector to unit length.
    pub fn normalized(x: f64, y: f64) -> Result<Self> {
        let norm = x.hypot(y);
        if !norm.is_finite() || norm == 0.0 {
            return Err(Error::param("direction must be nonzero"));
        }
        Ok(Direction([x / norm, y / norm]))
    }

    pub fn from_angle(theta: f64) -> Self {
        Direction([theta.cos(), theta.sin()])
    }

    pub fn angle(&self) -> f64 {
        self.0[1].atan2(self.0[0])
    }

    pub fn as_array(&self) -> [f64; 2] {
        self.0
    }
}

/// Common read access to an embedded complex.
///
/// Vertices are the 0-cells. Higher cells are reported by `for_each_cell` as
/// their dimension together with the indices of their vertices.
pub trait CellComplex {
    fn vertices(&self) -> &[Point];

    /// Visits every cell of dimension at least one.
    fn for_each_cell<F: FnMut(usize, &[usize])>(&self, f: F);

    /// Number of cells in each dimension, starting with the vertices.
    fn cell_counts(&self) -> Vec<usize>;

    fn is_empty(&self) -> bool {
        self.vertices().is_empty()
    }
}

/// Alternating sum of cell counts.
pub fn euler_characteristic<K: CellComplex + ?Sized>(complex: &K) -> i64 {
    complex
        .cell_counts()
        .iter()
        .enumerate()
        .map(|(k, &n)| if k % 2 == 0 { n as i64 } else { -(n as i64) })
        .sum()
}

/// Largest distance from the origin to a vertex.
pub fn bounding_radius<K: CellComplex + ?Sized>(complex: &K) -> Result<f64> {
    if complex.is_empty() {
        return Err(Error::InvalidComplex("complex has no vertices".into()));
    }
    Ok(complex.vertices().iter().map(|p| p[0].hypot(p[1])).fold(0.0, f64::max))
}

/// Vertex of `cell` with the largest height; ties go to the largest index.
#[inline]
pub(crate) fn star_anchor(heights: &[f64], cell: &[usize]) -> usize {
    let mut best = cell[0];
    for &v in &cell[1..] {
        let (h, hb) = (heights[v], heights[best]);
        if h > hb || (h == hb && v > best) {
            best = v;
        }
    }
    best
}

/// Euler characteristic contribution of every vertex's lower star along `v`.
pub fn lower_star_chi<K: CellComplex + ?Sized>(complex: &K, v: &Direction) -> Vec<i64> {
    let heights: Vec<f64> = complex.vertices().iter().map(|p| height(p, v)).collect();
    let mut chi = vec![1i64; heights.len()];
    complex.for_each_cell(|dim, cell| {
        let anchor = star_anchor(&heights, cell);
        chi[anchor] += if dim % 2 == 0 { 1 } else { -1 };
    });
    chi
}

/// The simplices whose highest vertex along a direction is `anchor`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LowerStar {
    pub anchor: usize,
    /// Member cells as vertex lists; the first member is always `[anchor]`.
    pub members: Vec<Vec<usize>>,
    pub chi: i64,
}

/// Splits the complex into lower stars along `v`, one per vertex.
pub fn lower_stars<K: CellComplex + ?Sized>(complex: &K, v: &Direction) -> Vec<LowerStar> {
    let heights: Vec<f64> = complex.vertices().iter().map(|p| height(p, v)).collect();
    let mut stars: Vec<LowerStar> = (0..heights.len())
        .map(|i| LowerStar {
            anchor: i,
            members: vec![vec![i]],
            chi: 1,
        })
        .collect();
    complex.for_each_cell(|dim, cell| {
        let star = &mut stars[star_anchor(&heights, cell)];
        star.members.push(cell.to_vec());
        star.chi += if dim % 2 == 0 { 1 } else { -1 };
    });
    stars
}

/// A simplicial complex embedded in the plane.
#[derive(Debug, Clone, PartialEq)]
pub struct GeometricComplex {
    dim: usize,
    vertices: Vec<Point>,
    /// `simplices[k - 1]` holds the k-simplices, each strictly increasing.
    simplices: Vec<Vec<Vec<usize>>>,
}

impl GeometricComplex {
    /// Builds and validates a complex from vertices and a flat list of
    /// simplices of dimension one or more.
    ///
    /// Simplices are sorted into increasing vertex order on input; duplicates
    /// and missing faces are rejected.
    pub fn new(vertices: Vec<Point>, simplices: Vec<Vec<usize>>) -> Result<Self> {
        if let Some(p) = vertices.iter().find(|p| !p[0].is_finite() || !p[1].is_finite()) {
            return Err(Error::InvalidComplex(format!("non-finite vertex {p:?}")));
        }
        let mut by_dim: Vec<Vec<Vec<usize>>> = Vec::new();
        let mut seen: HashSet<Vec<usize>> = HashSet::new();
        for mut s in simplices {
            if s.len() < 2 {
                return Err(Error::InvalidComplex(format!(
                    "simplex {s:?} must have at least two vertices"
                )));
            }
            s.sort_unstable();
            if s.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::InvalidComplex(format!("simplex {s:?} repeats a vertex")));
            }
            if let Some(&bad) = s.iter().find(|&&i| i >= vertices.len()) {
                return Err(Error::InvalidComplex(format!(
                    "simplex {s:?} references missing vertex {bad}"
                )));
            }
            if !seen.insert(s.clone()) {
                return Err(Error::InvalidComplex(format!("duplicate simplex {s:?}")));
            }
            let k = s.len() - 1;
            if by_dim.len() < k {
                by_dim.resize(k, Vec::new());
            }
            by_dim[k - 1].push(s);
        }
        for layer in by_dim.iter().skip(1) {
            for s in layer {
                for skip in 0..s.len() {
                    let face: Vec<usize> = s
                        .iter()
                        .enumerate()
                        .filter(|&(j, _)| j != skip)
                        .map(|(_, &v)| v)
                        .collect();
                    if !seen.contains(&face) {
                        return Err(Error::InvalidComplex(format!(
                            "simplex {s:?} is missing its face {face:?}"
                        )));
                    }
                }
            }
        }
        Ok(GeometricComplex {
            dim: 2,
            vertices,
            simplices: by_dim,
        })
    }

    pub fn empty() -> Self {
        GeometricComplex {
            dim: 2,
            vertices: Vec::new(),
            simplices: Vec::new(),
        }
    }

    /// Ambient dimension.
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// The k-simplices for `k >= 1`.
    pub fn simplices(&self, k: usize) -> &[Vec<usize>] {
        match k {
            0 => &[],
            _ => self.simplices.get(k - 1).map(Vec::as_slice).unwrap_or(&[]),
        }
    }

    /// Highest simplex dimension present (0 for a bare vertex set).
    pub fn top_dimension(&self) -> usize {
        self.simplices
            .iter()
            .rposition(|layer| !layer.is_empty())
            .map_or(0, |i| i + 1)
    }

    /// All simplices of dimension one or more, lowest dimension first.
    pub fn all_simplices(&self) -> impl Iterator<Item = &Vec<usize>> {
        self.simplices.iter().flatten()
    }

    /// Same simplices, vertices moved by `f`.
    pub fn map_vertices(&self, f: impl Fn(Point) -> Point) -> Self {
        GeometricComplex {
            dim: self.dim,
            vertices: self.vertices.iter().map(|&p| f(p)).collect(),
            simplices: self.simplices.clone(),
        }
    }

    /// Translates the complex so the vertex mean is the origin.
    pub fn center(&self) -> Result<Self> {
        if self.vertices.is_empty() {
            return Err(Error::InvalidComplex("cannot center an empty complex".into()));
        }
        let n = self.vertices.len() as f64;
        let (sx, sy) = self
            .vertices
            .iter()
            .fold((0.0, 0.0), |(sx, sy), p| (sx + p[0], sy + p[1]));
        let (mx, my) = (sx / n, sy / n);
        Ok(self.map_vertices(|p| [p[0] - mx, p[1] - my]))
    }

    /// Rotation about the origin by `theta` radians.
    pub fn rotated(&self, theta: f64) -> Self {
        let (s, c) = theta.sin_cos();
        self.map_vertices(|p| [c * p[0] - s * p[1], s * p[0] + c * p[1]])
    }

    pub fn bounding_radius(&self) -> Result<f64> {
        bounding_radius(self)
    }

    pub fn euler_characteristic(&self) -> i64 {
        euler_characteristic(self)
    }

    /// Disjoint union; the vertices of `other` are appended after ours.
    pub fn disjoint_union(&self, other: &GeometricComplex) -> Self {
        let offset = self.vertices.len();
        let mut vertices = self.vertices.clone();
        vertices.extend_from_slice(&other.vertices);
        let depth = self.simplices.len().max(other.simplices.len());
        let mut simplices = self.simplices.clone();
        simplices.resize(depth, Vec::new());
        for (k, layer) in other.simplices.iter().enumerate() {
            simplices[k].extend(layer.iter().map(|s| s.iter().map(|&v| v + offset).collect::<Vec<_>>()));
        }
        GeometricComplex {
            dim: self.dim,
            vertices,
            simplices,
        }
    }
}

impl CellComplex for GeometricComplex {
    fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    fn for_each_cell<F: FnMut(usize, &[usize])>(&self, mut f: F) {
        for (k, layer) in self.simplices.iter().enumerate() {
            for s in layer {
                f(k + 1, s);
            }
        }
    }

    fn cell_counts(&self) -> Vec<usize> {
        let mut counts = vec![self.vertices.len()];
        counts.extend(self.simplices.iter().map(Vec::len));
        counts
    }
}

/// Square complex of a binary mask.
///
/// Every foreground pixel contributes one 2-cell together with its four
/// sides and four corners; shared cells are stored once. Coordinates are
/// normalized so the longest image side has length 1 and the image center
/// sits at the origin, with `y` pointing up.
#[derive(Debug, Clone, PartialEq)]
pub struct CubicalComplex {
    pub width: usize,
    pub height: usize,
    pub pixel_size: f64,
    pub(crate) vertices: Vec<Point>,
    pub(crate) edges: Vec<[usize; 2]>,
    pub(crate) squares: Vec<[usize; 4]>,
}

impl CubicalComplex {
    pub fn edges(&self) -> &[[usize; 2]] {
        &self.edges
    }

    pub fn squares(&self) -> &[[usize; 4]] {
        &self.squares
    }

    pub fn euler_characteristic(&self) -> i64 {
        euler_characteristic(self)
    }

    pub fn bounding_radius(&self) -> Result<f64> {
        bounding_radius(self)
    }
}

impl CellComplex for CubicalComplex {
    fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    fn for_each_cell<F: FnMut(usize, &[usize])>(&self, mut f: F) {
        for e in &self.edges {
            f(1, e);
        }
        for s in &self.squares {
            f(2, s);
        }
    }

    fn cell_counts(&self) -> Vec<usize> {
        vec![self.vertices.len(), self.edges.len(), self.squares.len()]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ngon(n: usize) -> GeometricComplex {
        let vertices = (0..n)
            .map(|i| {
                let t = std::f64::consts::TAU * i as f64 / n as f64;
                [t.cos(), t.sin()]
            })
            .collect();
        let edges = (0..n).map(|i| vec![i, (i + 1) % n]).collect();
        GeometricComplex::new(vertices, edges).unwrap()
    }

    fn triangle() -> GeometricComplex {
        GeometricComplex::new(
            vec![[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]],
            vec![vec![0, 1], vec![1, 2], vec![0, 2], vec![0, 1, 2]],
        )
        .unwrap()
    }

    #[test]
    fn circle_has_zero_euler_characteristic() {
        assert_eq!(ngon(10).euler_characteristic(), 0);
    }

    #[test]
    fn filled_triangle_and_empty() {
        assert_eq!(triangle().euler_characteristic(), 1);
        assert_eq!(GeometricComplex::empty().euler_characteristic(), 0);
        assert_eq!(triangle().top_dimension(), 2);
    }

    #[test]
    fn closure_violation_names_simplex() {
        let err = GeometricComplex::new(
            vec![[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]],
            vec![vec![0, 1], vec![1, 2], vec![0, 1, 2]],
        )
        .unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("[0, 1, 2]") && msg.contains("[0, 2]"), "{msg}");
    }

    #[test]
    fn rejects_duplicates_and_bad_indices() {
        let v = vec![[0.0, 0.0], [1.0, 0.0]];
        assert!(GeometricComplex::new(v.clone(), vec![vec![0, 1], vec![1, 0]]).is_err());
        assert!(GeometricComplex::new(v.clone(), vec![vec![0, 2]]).is_err());
        assert!(GeometricComplex::new(v, vec![vec![1, 1]]).is_err());
    }

    #[test]
    fn single_edge_lower_stars() {
        let k = GeometricComplex::new(vec![[-1.0, 0.0], [1.0, 0.0]], vec![vec![0, 1]]).unwrap();
        let stars = lower_stars(&k, &Direction::new(1.0, 0.0).unwrap());
        assert_eq!(stars[1].members, vec![vec![1], vec![0, 1]]);
        assert_eq!(stars[1].chi, 0);
        assert_eq!(stars[0].members, vec![vec![0]]);
        assert_eq!(stars[0].chi, 1);
    }

    #[test]
    fn height_ties_go_to_largest_index() {
        let k = GeometricComplex::new(vec![[0.0, 1.0], [0.0, -1.0]], vec![vec![0, 1]]).unwrap();
        let stars = lower_stars(&k, &Direction::new(1.0, 0.0).unwrap());
        assert_eq!(stars[1].chi, 0);
        assert_eq!(stars[0].chi, 1);
    }

    #[test]
    fn cone_has_unit_euler_characteristic() {
        // apex 0 joined to a path 1-2-3-4
        let vertices = vec![[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0], [-1.0, 1.0]];
        let mut s = vec![vec![1, 2], vec![2, 3], vec![3, 4]];
        for i in 1..5 {
            s.push(vec![0, i]);
        }
        for i in 1..4 {
            s.push(vec![0, i, i + 1]);
        }
        assert_eq!(GeometricComplex::new(vertices, s).unwrap().euler_characteristic(), 1);
    }

    #[test]
    fn centering() {
        let k = GeometricComplex::new(vec![[1.0, 0.0], [3.0, 0.0]], vec![]).unwrap();
        let c = k.center().unwrap();
        assert_eq!(c.vertices(), &[[-1.0, 0.0], [1.0, 0.0]]);
        assert_eq!(c.center().unwrap(), c);
        assert!(GeometricComplex::empty().center().is_err());
    }

    #[test]
    fn radius() {
        let k = GeometricComplex::new(vec![[3.0, 4.0]], vec![]).unwrap();
        assert_eq!(k.bounding_radius().unwrap(), 5.0);
        let sq = GeometricComplex::new(vec![[-1.0, -1.0], [1.0, -1.0], [1.0, 1.0], [-1.0, 1.0]], vec![]).unwrap();
        assert!((sq.bounding_radius().unwrap() - 2f64.sqrt() / 2.0 * 2.0).abs() < 1e-15);
        assert!(GeometricComplex::empty().bounding_radius().is_err());
    }

    #[test]
    fn direction_validation() {
        assert!(Direction::new(0.0, 0.0).is_err());
        assert!(Direction::new(2.0, 0.0).is_err());
        assert!(Direction::new(0.6, 0.8).is_ok());
        let d = Direction::normalized(3.0, 4.0).unwrap();
        assert!((d.as_array()[0] - 0.6).abs() < 1e-15);
    }

    #[test]
    fn disjoint_union_adds_characteristics() {
        let u = triangle().disjoint_union(&ngon(5));
        assert_eq!(u.euler_characteristic(), 1);
        assert_eq!(u.vertices().len(), 8);
    }
}
