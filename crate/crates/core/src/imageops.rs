//! Binary masks: cleanup, tiling, Betti numbers, cubical complexes and depth.
//!
//! Pixel `(x, y)` is column `x`, row `y`, with row 0 at the top. The square
//! complex of a mask uses closed pixels, so two foreground pixels touching at
//! a corner are connected. Foreground components are therefore counted with
//! 8-connectivity and holes (bounded background components) with
//! 4-connectivity; this dual pair is the one the complex encodes.

use std::collections::VecDeque;

use crate::complex::{CubicalComplex, Point};
use crate::error::{Error, Result};

/// A 0/1 pixel grid.
#[derive(Debug, Clone, PartialEq)]
pub struct BinaryMask {
    width: usize,
    height: usize,
    bits: Vec<bool>,
    /// Physical size of one pixel (for example micrometres).
    pub pixel_pitch: f64,
}

const N4: [(isize, isize); 4] = [(1, 0), (-1, 0), (0, 1), (0, -1)];
const N8: [(isize, isize); 8] = [(1, 0), (-1, 0), (0, 1), (0, -1), (1, 1), (1, -1), (-1, 1), (-1, -1)];

/// Pixel adjacency used when grouping pixels into components.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Connectivity {
    Four,
    Eight,
}

impl Connectivity {
    fn offsets(self) -> &'static [(isize, isize)] {
        match self {
            Connectivity::Four => &N4,
            Connectivity::Eight => &N8,
        }
    }
}

impl BinaryMask {
    pub fn new(width: usize, height: usize, bits: Vec<bool>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::param("mask dimensions must be positive"));
        }
        if bits.len() != width * height {
            return Err(Error::param(format!(
                "mask has {} pixels, expected {width} x {height}",
                bits.len()
            )));
        }
        Ok(BinaryMask {
            width,
            height,
            bits,
            pixel_pitch: 1.0,
        })
    }

    pub fn empty(width: usize, height: usize) -> Result<Self> {
        Self::new(width, height, vec![false; width * height])
    }

    pub fn from_fn(width: usize, height: usize, f: impl Fn(usize, usize) -> bool) -> Result<Self> {
        let bits = (0..height)
            .flat_map(|y| (0..width).map(move |x| (x, y)))
            .map(|(x, y)| f(x, y))
            .collect();
        Self::new(width, height, bits)
    }

    pub fn with_pitch(mut self, pitch: f64) -> Self {
        self.pixel_pitch = pitch;
        self
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> bool {
        self.bits[y * self.width + x]
    }

    /// Out-of-range coordinates read as background.
    #[inline]
    fn get_signed(&self, x: isize, y: isize) -> bool {
        x >= 0 && y >= 0 && (x as usize) < self.width && (y as usize) < self.height && self.get(x as usize, y as usize)
    }

    pub fn set(&mut self, x: usize, y: usize, value: bool) {
        self.bits[y * self.width + x] = value;
    }

    pub fn area(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    /// Mean `(x, y)` of foreground pixel centres.
    pub fn centroid(&self) -> Option<(f64, f64)> {
        let (mut sx, mut sy, mut n) = (0.0, 0.0, 0usize);
        for y in 0..self.height {
            for x in 0..self.width {
                if self.get(x, y) {
                    sx += x as f64;
                    sy += y as f64;
                    n += 1;
                }
            }
        }
        (n > 0).then(|| (sx / n as f64, sy / n as f64))
    }

    /// Inclusive bounding box `(x0, y0, x1, y1)` of the foreground.
    pub fn bounding_box(&self) -> Option<(usize, usize, usize, usize)> {
        let mut bbox: Option<(usize, usize, usize, usize)> = None;
        for y in 0..self.height {
            for x in 0..self.width {
                if self.get(x, y) {
                    bbox = Some(match bbox {
                        None => (x, y, x, y),
                        Some((x0, y0, x1, y1)) => (x0.min(x), y0.min(y), x1.max(x), y1.max(y)),
                    });
                }
            }
        }
        bbox
    }

    /// Copy of the `w x h` window with top-left corner `(x0, y0)`.
    pub fn crop(&self, x0: usize, y0: usize, w: usize, h: usize) -> Result<Self> {
        if w == 0 || h == 0 || x0 + w > self.width || y0 + h > self.height {
            return Err(Error::param(format!(
                "crop {w}x{h} at ({x0}, {y0}) exceeds {}x{} mask",
                self.width, self.height
            )));
        }
        Ok(Self::from_fn(w, h, |x, y| self.get(x0 + x, y0 + y))?.with_pitch(self.pixel_pitch))
    }

    /// Foreground grown by one pixel in all eight directions.
    pub fn dilate(&self) -> Self {
        let mut out = self.clone();
        for y in 0..self.height {
            for x in 0..self.width {
                if !self.get(x, y)
                    && N8
                        .iter()
                        .any(|&(dx, dy)| self.get_signed(x as isize + dx, y as isize + dy))
                {
                    out.set(x, y, true);
                }
            }
        }
        out
    }

    /// Component label of every foreground pixel (`None` for background).
    pub fn label_components(&self, conn: Connectivity) -> (Vec<Option<usize>>, usize) {
        label_where(self.width, self.height, |x, y| self.get(x, y), conn)
    }

    /// Keeps only the component with the most pixels (8-connected).
    pub fn largest_component(&self) -> Self {
        let (labels, n) = self.label_components(Connectivity::Eight);
        if n == 0 {
            return self.clone();
        }
        let mut sizes = vec![0usize; n];
        for l in labels.iter().flatten() {
            sizes[*l] += 1;
        }
        // ties go to the component found first in raster order
        let best = (0..n).fold(0, |b, i| if sizes[i] > sizes[b] { i } else { b });
        let bits = labels.iter().map(|l| *l == Some(best)).collect();
        BinaryMask { bits, ..self.clone() }
    }

    /// Turns every background pixel not 4-connected to the border into foreground.
    pub fn fill_holes(&self) -> Self {
        let (w, h) = (self.width, self.height);
        let mut outside = vec![false; w * h];
        let mut queue = VecDeque::new();
        for y in 0..h {
            for x in 0..w {
                if (x == 0 || y == 0 || x + 1 == w || y + 1 == h) && !self.get(x, y) {
                    outside[y * w + x] = true;
                    queue.push_back((x, y));
                }
            }
        }
        while let Some((x, y)) = queue.pop_front() {
            for &(dx, dy) in &N4 {
                let (nx, ny) = (x as isize + dx, y as isize + dy);
                if nx < 0 || ny < 0 || nx as usize >= w || ny as usize >= h {
                    continue;
                }
                let (nx, ny) = (nx as usize, ny as usize);
                if !self.get(nx, ny) && !outside[ny * w + nx] {
                    outside[ny * w + nx] = true;
                    queue.push_back((nx, ny));
                }
            }
        }
        BinaryMask {
            bits: outside.iter().map(|o| !o).collect(),
            ..self.clone()
        }
    }

    /// Nearest-neighbour rescale by `factor` of the whole mask.
    pub fn rescale(&self, factor: f64) -> Result<Self> {
        if !(factor.is_finite() && factor > 0.0) {
            return Err(Error::param(format!("scale factor must be positive, got {factor}")));
        }
        let w = ((self.width as f64 * factor).round() as usize).max(1);
        let h = ((self.height as f64 * factor).round() as usize).max(1);
        let src = |i: usize, n: usize| (((i as f64 + 0.5) / factor).floor() as usize).min(n - 1);
        Ok(
            Self::from_fn(w, h, |x, y| self.get(src(x, self.width), src(y, self.height)))?
                .with_pitch(self.pixel_pitch / factor),
        )
    }
}

struct DisjointSet {
    parent: Vec<usize>,
}

impl DisjointSet {
    fn new(n: usize) -> Self {
        DisjointSet {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            // keep the smaller index as root so labels follow raster order
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            self.parent[hi] = lo;
        }
    }
}

/// Labels the pixels where `member` holds, numbering components in raster
/// order of their first pixel.
fn label_where(
    width: usize,
    height: usize,
    member: impl Fn(usize, usize) -> bool,
    conn: Connectivity,
) -> (Vec<Option<usize>>, usize) {
    let mut ds = DisjointSet::new(width * height);
    for y in 0..height {
        for x in 0..width {
            if !member(x, y) {
                continue;
            }
            // only look at already-visited neighbours
            for &(dx, dy) in conn.offsets() {
                if dy > 0 || (dy == 0 && dx > 0) {
                    continue;
                }
                let (nx, ny) = (x as isize + dx, y as isize + dy);
                if nx >= 0 && ny >= 0 && (nx as usize) < width && member(nx as usize, ny as usize) {
                    ds.union(y * width + x, ny as usize * width + nx as usize);
                }
            }
        }
    }
    let mut labels = vec![None; width * height];
    let mut root_label = vec![usize::MAX; width * height];
    let mut n = 0;
    for y in 0..height {
        for x in 0..width {
            if member(x, y) {
                let r = ds.find(y * width + x);
                if root_label[r] == usize::MAX {
                    root_label[r] = n;
                    n += 1;
                }
                labels[y * width + x] = Some(root_label[r]);
            }
        }
    }
    (labels, n)
}

/// MPEG-7 style normalization.
///
/// In order: dilate by one pixel, keep the largest component, fill holes,
/// rescale so the foreground area is about `target_area`, pad to an
/// `out_size x out_size` canvas and move the foreground centroid to the
/// canvas centre. Cleanup is repeated after rescaling so the output always
/// has exactly one component and no holes.
pub fn preprocess_mask(img: &BinaryMask, target_area: usize, out_size: usize) -> Result<BinaryMask> {
    if img.area() == 0 {
        return Err(Error::param("mask has no foreground"));
    }
    if target_area == 0 || out_size == 0 {
        return Err(Error::param("target area and output size must be positive"));
    }
    let cleaned = img.dilate().largest_component().fill_holes();
    let (x0, y0, x1, y1) = cleaned.bounding_box().expect("nonempty after cleanup");
    let shape = cleaned.crop(x0, y0, x1 - x0 + 1, y1 - y0 + 1)?;
    let factor = (target_area as f64 / shape.area() as f64).sqrt();
    let scaled = shape.rescale(factor)?.largest_component().fill_holes();
    let (x0, y0, x1, y1) = scaled
        .bounding_box()
        .ok_or_else(|| Error::param("foreground vanished after rescaling"))?;
    let shape = scaled.crop(x0, y0, x1 - x0 + 1, y1 - y0 + 1)?;
    if shape.width > out_size || shape.height > out_size {
        return Err(Error::param(format!(
            "rescaled foreground {}x{} does not fit a {out_size}x{out_size} canvas",
            shape.width, shape.height
        )));
    }
    let (cx, cy) = shape.centroid().expect("nonempty");
    let centre = (out_size as f64 - 1.0) / 2.0;
    let ox = (centre - cx).round() as isize;
    let oy = (centre - cy).round() as isize;
    if ox < 0 || oy < 0 || ox as usize + shape.width > out_size || oy as usize + shape.height > out_size {
        return Err(Error::param(format!(
            "centred foreground {}x{} does not fit a {out_size}x{out_size} canvas",
            shape.width, shape.height
        )));
    }
    let (ox, oy) = (ox as usize, oy as usize);
    let out = BinaryMask::from_fn(out_size, out_size, |x, y| {
        x >= ox && y >= oy && x - ox < shape.width && y - oy < shape.height && shape.get(x - ox, y - oy)
    })?;
    Ok(out.with_pitch(shape.pixel_pitch))
}

/// A square sub-image and its position in the source.
#[derive(Debug, Clone, PartialEq)]
pub struct Tile {
    /// Lattice row/column (or index order for explicit placements).
    pub row: usize,
    pub col: usize,
    /// Top-left pixel in the source image.
    pub x0: usize,
    pub y0: usize,
    pub mask: BinaryMask,
}

/// Where tiles are cut from.
#[derive(Debug, Clone, PartialEq)]
pub enum TilePlacement {
    /// Non-overlapping lattice from the top-left corner; partial tiles dropped.
    Lattice,
    /// Explicit top-left `(x0, y0)` corners.
    Explicit(Vec<(usize, usize)>),
}

pub fn tile(img: &BinaryMask, side: usize, placement: &TilePlacement) -> Result<Vec<Tile>> {
    if side == 0 || side > img.width.min(img.height) {
        return Err(Error::param(format!(
            "tile side {side} must be in 1..={}",
            img.width.min(img.height)
        )));
    }
    match placement {
        TilePlacement::Lattice => {
            let mut tiles = Vec::new();
            for row in 0..img.height / side {
                for col in 0..img.width / side {
                    let (x0, y0) = (col * side, row * side);
                    tiles.push(Tile {
                        row,
                        col,
                        x0,
                        y0,
                        mask: img.crop(x0, y0, side, side)?,
                    });
                }
            }
            Ok(tiles)
        }
        TilePlacement::Explicit(corners) => corners
            .iter()
            .enumerate()
            .map(|(i, &(x0, y0))| {
                Ok(Tile {
                    row: i,
                    col: 0,
                    x0,
                    y0,
                    mask: img.crop(x0, y0, side, side)?,
                })
            })
            .collect(),
    }
}

/// Vertex, edge and square counts of the square complex of `img`.
pub fn cubical_cell_counts(img: &BinaryMask) -> (usize, usize, usize) {
    let (w, h) = (img.width, img.height);
    let fg = |x: isize, y: isize| img.get_signed(x, y);
    let mut vertices = 0;
    for y in 0..=h as isize {
        for x in 0..=w as isize {
            if fg(x - 1, y - 1) || fg(x, y - 1) || fg(x - 1, y) || fg(x, y) {
                vertices += 1;
            }
        }
    }
    let mut edges = 0;
    // horizontal edges on grid line y, between pixel rows y-1 and y
    for y in 0..=h as isize {
        for x in 0..w as isize {
            if fg(x, y - 1) || fg(x, y) {
                edges += 1;
            }
        }
    }
    for y in 0..h as isize {
        for x in 0..=w as isize {
            if fg(x - 1, y) || fg(x, y) {
                edges += 1;
            }
        }
    }
    (vertices, edges, img.area())
}

/// Betti numbers `(b0, b1)` of the square complex of `img`.
///
/// `b0` counts 8-connected foreground components; `b1 = b0 - chi`.
pub fn betti(img: &BinaryMask) -> (usize, usize) {
    let (_, b0) = img.label_components(Connectivity::Eight);
    let (v, e, f) = cubical_cell_counts(img);
    let chi = v as i64 - e as i64 + f as i64;
    let b1 = b0 as i64 - chi;
    debug_assert!(b1 >= 0, "negative first Betti number");
    (b0, b1.max(0) as usize)
}

/// Square complex of `img` in normalized coordinates.
///
/// The longest image side maps to one world unit and the image centre to
/// the origin; `y` points up.
pub fn mask_to_complex(img: &BinaryMask) -> CubicalComplex {
    let (w, h) = (img.width, img.height);
    let scale = 1.0 / w.max(h) as f64;
    let corner = |cx: usize, cy: usize| -> Point {
        [
            (cx as f64 - w as f64 / 2.0) * scale,
            (h as f64 / 2.0 - cy as f64) * scale,
        ]
    };
    let mut index = vec![usize::MAX; (w + 1) * (h + 1)];
    let mut vertices = Vec::new();
    let mut vertex = |cx: usize, cy: usize, vertices: &mut Vec<Point>| -> usize {
        let slot = &mut index[cy * (w + 1) + cx];
        if *slot == usize::MAX {
            *slot = vertices.len();
            vertices.push(corner(cx, cy));
        }
        *slot
    };
    let mut squares = Vec::with_capacity(img.area());
    for y in 0..h {
        for x in 0..w {
            if img.get(x, y) {
                let a = vertex(x, y, &mut vertices);
                let b = vertex(x + 1, y, &mut vertices);
                let c = vertex(x, y + 1, &mut vertices);
                let d = vertex(x + 1, y + 1, &mut vertices);
                squares.push([a, b, c, d]);
            }
        }
    }
    let at = |cx: usize, cy: usize| index[cy * (w + 1) + cx];
    let fg = |x: isize, y: isize| img.get_signed(x, y);
    let mut edges = Vec::new();
    for y in 0..=h {
        for x in 0..w {
            if fg(x as isize, y as isize - 1) || fg(x as isize, y as isize) {
                edges.push([at(x, y), at(x + 1, y)]);
            }
        }
    }
    for y in 0..h {
        for x in 0..=w {
            if fg(x as isize - 1, y as isize) || fg(x as isize, y as isize) {
                edges.push([at(x, y), at(x, y + 1)]);
            }
        }
    }
    CubicalComplex {
        width: w,
        height: h,
        pixel_size: scale,
        vertices,
        edges,
        squares,
    }
}

/// Euclidean distance of every pixel to the nearest target pixel.
#[derive(Debug, Clone, PartialEq)]
pub struct DepthField {
    pub width: usize,
    pub height: usize,
    /// Distances in pixels, row-major.
    pub distance: Vec<f64>,
    /// Pixels over which quadrant averages are taken.
    pub region: Vec<bool>,
    pub pixel_pitch: f64,
}

/// Squared distance transform of a 1D sampled function (lower envelope of
/// parabolas rooted at each sample).
fn edt_1d(f: &[f64], out: &mut [f64], v: &mut [usize], z: &mut [f64]) {
    let n = f.len();
    let mut k = 0usize;
    // skip leading infinite samples
    let Some(first) = f.iter().position(|x| x.is_finite()) else {
        out.iter_mut().for_each(|o| *o = f64::INFINITY);
        return;
    };
    v[0] = first;
    z[0] = f64::NEG_INFINITY;
    z[1] = f64::INFINITY;
    for q in first + 1..n {
        if !f[q].is_finite() {
            continue;
        }
        loop {
            let p = v[k];
            let s = ((f[q] + (q * q) as f64) - (f[p] + (p * p) as f64)) / (2.0 * q as f64 - 2.0 * p as f64);
            if s <= z[k] {
                if k == 0 {
                    v[0] = q;
                    z[1] = f64::INFINITY;
                    break;
                }
                k -= 1;
            } else {
                k += 1;
                v[k] = q;
                z[k] = s;
                z[k + 1] = f64::INFINITY;
                break;
            }
        }
    }
    k = 0;
    for (q, o) in out.iter_mut().enumerate() {
        while z[k + 1] < q as f64 {
            k += 1;
        }
        let d = q as f64 - v[k] as f64;
        *o = d * d + f[v[k]];
    }
}

/// Exact Euclidean distance transform to the foreground of `target`.
///
/// Two separable passes (columns, then rows), each computing the lower
/// envelope of parabolas.
pub fn euclidean_distance_transform(target: &BinaryMask) -> Result<Vec<f64>> {
    if target.area() == 0 {
        return Err(Error::param("distance transform needs a nonempty target"));
    }
    let (w, h) = (target.width, target.height);
    let n = w.max(h);
    let mut v = vec![0usize; n];
    let mut z = vec![0f64; n + 1];
    let mut col = vec![0f64; h];
    let mut col_out = vec![0f64; h];
    let mut sq = vec![0f64; w * h];
    for x in 0..w {
        for (y, c) in col.iter_mut().enumerate() {
            *c = if target.get(x, y) { 0.0 } else { f64::INFINITY };
        }
        edt_1d(&col, &mut col_out, &mut v, &mut z);
        for (y, &d) in col_out.iter().enumerate() {
            sq[y * w + x] = d;
        }
    }
    let mut row_out = vec![0f64; w];
    for y in 0..h {
        edt_1d(&sq[y * w..(y + 1) * w], &mut row_out, &mut v, &mut z);
        sq[y * w..(y + 1) * w].copy_from_slice(&row_out);
    }
    Ok(sq.into_iter().map(f64::sqrt).collect())
}

/// Distance from every pixel to the target (for example the medulla), with
/// `region` (for example the cortex) recorded for quadrant averages.
pub fn depth_field(region: &BinaryMask, target: &BinaryMask) -> Result<DepthField> {
    if region.width != target.width || region.height != target.height {
        return Err(Error::param("region and target masks differ in size"));
    }
    Ok(DepthField {
        width: target.width,
        height: target.height,
        distance: euclidean_distance_transform(target)?,
        region: region.bits.clone(),
        pixel_pitch: region.pixel_pitch,
    })
}

/// Axis-aligned pixel rectangle `[x0, x0 + w) x [y0, y0 + h)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Rect {
    pub x0: usize,
    pub y0: usize,
    pub w: usize,
    pub h: usize,
}

impl Rect {
    pub fn square(x0: usize, y0: usize, side: usize) -> Self {
        Rect {
            x0,
            y0,
            w: side,
            h: side,
        }
    }
}

impl DepthField {
    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.distance[y * self.width + x]
    }

    /// Mean distance over region pixels inside `rect`; `None` if there are none.
    pub fn quadrant_distance(&self, rect: Rect) -> Option<f64> {
        let (mut sum, mut n) = (0.0, 0usize);
        for y in rect.y0..(rect.y0 + rect.h).min(self.height) {
            for x in rect.x0..(rect.x0 + rect.w).min(self.width) {
                if self.region[y * self.width + x] {
                    sum += self.get(x, y);
                    n += 1;
                }
            }
        }
        (n > 0).then(|| sum / n as f64)
    }
}

/// Normalized depth `1 - d_Q / max d_Q'` of each quadrant: 1 at the target,
/// 0 at the deepest quadrant. Quadrants without region pixels give `None`.
pub fn quadrant_depths(field: &DepthField, rects: &[Rect]) -> Vec<Option<f64>> {
    let d: Vec<Option<f64>> = rects.iter().map(|&r| field.quadrant_distance(r)).collect();
    let max = d.iter().flatten().fold(0.0f64, |a, &b| a.max(b));
    d.into_iter()
        .map(|x| x.map(|v| if max > 0.0 { 1.0 - v / max } else { 1.0 }))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::CellComplex;

    fn disk(size: usize, r: f64, hole: Option<f64>) -> BinaryMask {
        let c = (size as f64 - 1.0) / 2.0;
        BinaryMask::from_fn(size, size, |x, y| {
            let d = ((x as f64 - c).powi(2) + (y as f64 - c).powi(2)).sqrt();
            d <= r && hole.is_none_or(|h| d > h)
        })
        .unwrap()
    }

    fn ring() -> BinaryMask {
        BinaryMask::from_fn(10, 10, |x, y| {
            let block = (2..8).contains(&x) && (2..8).contains(&y);
            let centre = (4..6).contains(&x) && (4..6).contains(&y);
            block && !centre
        })
        .unwrap()
    }

    #[test]
    fn single_pixel_and_block_complexes() {
        let one = BinaryMask::from_fn(3, 3, |x, y| x == 1 && y == 1).unwrap();
        let c = mask_to_complex(&one);
        assert_eq!(c.cell_counts(), vec![4, 4, 1]);
        assert_eq!(c.euler_characteristic(), 1);
        let block = BinaryMask::from_fn(4, 4, |x, y| (1..3).contains(&x) && (1..3).contains(&y)).unwrap();
        let c = mask_to_complex(&block);
        assert_eq!(c.cell_counts(), vec![9, 12, 4]);
        assert_eq!(cubical_cell_counts(&block), (9, 12, 4));
    }

    #[test]
    fn normalized_coordinates() {
        let full = BinaryMask::from_fn(4, 2, |_, _| true).unwrap();
        let c = mask_to_complex(&full);
        assert_eq!(c.pixel_size, 0.25);
        let r = c.bounding_radius().unwrap();
        assert!((r - (0.5f64.powi(2) + 0.25f64.powi(2)).sqrt()).abs() < 1e-15);
    }

    #[test]
    fn betti_square_and_ring() {
        let sq = BinaryMask::from_fn(6, 6, |x, y| (1..5).contains(&x) && (1..5).contains(&y)).unwrap();
        assert_eq!(betti(&sq), (1, 0));
        assert_eq!(betti(&ring()), (1, 1));
    }

    #[test]
    fn diagonal_pixels_are_one_component() {
        let m = BinaryMask::from_fn(2, 2, |x, y| x == y).unwrap();
        assert_eq!(betti(&m), (1, 0));
        // four pixels around an empty centre touching only at corners
        let diamond = BinaryMask::from_fn(3, 3, |x, y| (x + y) % 2 == 1).unwrap();
        assert_eq!(betti(&diamond), (1, 1));
    }

    #[test]
    fn fill_and_largest() {
        let d = disk(21, 8.0, Some(2.0));
        assert_eq!(betti(&d).1, 1);
        assert_eq!(betti(&d.fill_holes()), (1, 0));
        let two = BinaryMask::from_fn(30, 30, |x, y| (x < 10 && y < 10) || (x > 25 && y > 27 && x < 28)).unwrap();
        let kept = two.largest_component();
        assert_eq!(kept.area(), 100);
    }

    #[test]
    fn preprocess_fills_and_centres() {
        let img = disk(41, 12.0, Some(3.0));
        let out = preprocess_mask(&img, 400, 64).unwrap();
        assert_eq!(betti(&out), (1, 0));
        let (cx, cy) = out.centroid().unwrap();
        assert!((cx - 31.5).abs() <= 1.0 && (cy - 31.5).abs() <= 1.0);
        assert!((out.area() as f64 - 400.0).abs() / 400.0 < 0.05, "area {}", out.area());
        assert!(preprocess_mask(&BinaryMask::empty(5, 5).unwrap(), 10, 10).is_err());
        assert!(preprocess_mask(&img, 10_000, 64).is_err());
    }

    #[test]
    fn preprocess_keeps_largest_component() {
        let img = BinaryMask::from_fn(40, 40, |x, y| {
            (5..15).contains(&x) && (5..15).contains(&y) || (30..32).contains(&x) && (30..32).contains(&y)
        })
        .unwrap();
        let out = preprocess_mask(&img, 144, 40).unwrap();
        assert_eq!(betti(&out), (1, 0));
    }

    #[test]
    fn tiling() {
        let img = BinaryMask::from_fn(400, 400, |x, y| (x * 7 + y * 3) % 5 == 0).unwrap();
        let tiles = tile(&img, 200, &TilePlacement::Lattice).unwrap();
        assert_eq!(tiles.len(), 4);
        let t = &tiles[3];
        assert_eq!((t.x0, t.y0), (200, 200));
        for y in 0..200 {
            for x in 0..200 {
                assert_eq!(t.mask.get(x, y), img.get(200 + x, 200 + y));
            }
        }
        let narrow = BinaryMask::empty(399, 400).unwrap();
        assert_eq!(tile(&narrow, 200, &TilePlacement::Lattice).unwrap().len(), 2);
        assert!(tile(&narrow, 400, &TilePlacement::Lattice).is_err());
        let explicit = tile(&img, 10, &TilePlacement::Explicit(vec![(5, 7)])).unwrap();
        assert_eq!(explicit[0].mask, img.crop(5, 7, 10, 10).unwrap());
    }

    #[test]
    fn edt_matches_brute_force() {
        let target = BinaryMask::from_fn(64, 64, |x, y| (x == 10 && y == 50) || (x * 13 + y * 7) % 97 == 0).unwrap();
        let d = euclidean_distance_transform(&target).unwrap();
        let pts: Vec<(usize, usize)> = (0..64)
            .flat_map(|y| (0..64).map(move |x| (x, y)))
            .filter(|&(x, y)| target.get(x, y))
            .collect();
        for y in 0..64 {
            for x in 0..64 {
                let brute = pts
                    .iter()
                    .map(|&(px, py)| ((px as f64 - x as f64).powi(2) + (py as f64 - y as f64).powi(2)).sqrt())
                    .fold(f64::INFINITY, f64::min);
                assert!((d[y * 64 + x] - brute).abs() < 1e-12);
            }
        }
        assert!(euclidean_distance_transform(&BinaryMask::empty(3, 3).unwrap()).is_err());
    }

    #[test]
    fn quadrant_depth_normalization() {
        let target = BinaryMask::from_fn(40, 20, |x, _| x < 2).unwrap();
        let region = BinaryMask::from_fn(40, 20, |x, _| x >= 2).unwrap();
        let f = depth_field(&region, &target).unwrap();
        let rects = [
            Rect::square(0, 0, 10),
            Rect::square(30, 0, 10),
            Rect::square(30, 10, 10),
        ];
        let d = quadrant_depths(&f, &rects);
        assert!(d[0].unwrap() > 0.8);
        assert_eq!(d[1].unwrap(), 0.0);
        assert_eq!(d[1], d[2]);
    }
}
