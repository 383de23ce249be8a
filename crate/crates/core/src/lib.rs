//! Euler characteristic transforms for planar shapes.
//!
//! The crate computes Euler characteristic curves (ECC), the Euler
//! characteristic transform (ECT), DETECT, and SampEuler, the empirical
//! measure of ECCs along random directions, for embedded simplicial
//! complexes and binary images. Around those transforms it provides the
//! distances (L1, ECT, exact and sliced Wasserstein-1, energy distance), the
//! image preprocessing (cleanup, tiling, Betti numbers, depth maps), the
//! synthetic generators, and the statistics (MDS, k-medoids, silhouette,
//! nearest-neighbour evaluation, enrichment ratios) used to compare shapes.
//!
//! Each major capability has a runnable program under `examples/`.

pub mod analysis;
pub mod cli;
pub mod complex;
pub mod error;
pub mod imageops;
pub mod io;
pub mod metric;
pub mod synth;
pub mod transform;

pub use complex::{CellComplex, CubicalComplex, Direction, GeometricComplex, LowerStar, Point};
pub use error::{Error, Result};
pub use transform::{
    CurveMatrix, CurveMeasure, DetectCurve, DirectionMode, EccCurve, EctMatrix, FiltrationGrid, SampHistogram,
};
