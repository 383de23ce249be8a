//! Command-line front end.
//!
//! Every command validates its arguments, writes its outputs atomically and
//! leaves a `run.json` record (arguments, parameters, SHA-256 of every input)
//! next to them. `eulershape replay run.json` re-executes a record.
//!
//! Exit codes: 0 on success, 1 on usage or validation errors (including a
//! batch where some items failed), 2 on I/O errors.

use std::collections::{BTreeSet, HashMap};
use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::analysis::{
    depth_energy_curve, depth_grid, enrichment, kmedoids, knn_eval, match_clusterings, mds, silhouette_sweep, Protocol,
};
use crate::complex::{CellComplex, CubicalComplex, GeometricComplex};
use crate::error::{Error, Result};
use crate::imageops::{depth_field, mask_to_complex, preprocess_mask, quadrant_depths, tile, Rect, TilePlacement};
use crate::io::{
    depth_curve_table, embedding_table, exact, read_descriptor, read_distance_matrix, read_mask, read_scx,
    write_descriptor, write_distance_matrix, write_mask, write_scx, Table,
};
use crate::metric::{pair_seed, pairwise_descriptors, Descriptor, MetricChoice};
use crate::synth::{
    gen_arm_masks, gen_ellipse_field, gen_trees, ArmShapeSpec, CenterSampler, EllipseFieldSpec, TreeClassSpec,
};
use crate::transform::{
    detect_curves, ect, sampeuler, vectorize, FiltrationGrid, DEFAULT_IMAGE_RANGE, DEFAULT_RANGE_FACTOR,
};

/// Environment variable capping the worker count.
pub const THREADS_ENV: &str = "EULERSHAPE_THREADS";

#[derive(Debug, Parser, Serialize)]
#[command(
    name = "eulershape",
    version,
    about = "Euler characteristic transforms for planar shapes"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Command {
    /// Generate synthetic trees, ellipse fields or arm-shape masks.
    #[command(subcommand)]
    Synth(SynthCommand),
    /// Clean up and normalize masks (dilate, largest component, fill, rescale, centre).
    Preprocess(PreprocessArgs),
    /// Cut masks into square tiles named `{stem}_r{row}_c{col}.pgm`.
    Tile(TileArgs),
    /// ECT along evenly spaced directions.
    Ect(TransformArgs),
    /// SampEuler: ECCs along seeded random directions.
    Sampeuler(TransformArgs),
    /// Vectorize SampEuler measures into window-by-value histograms.
    Vectorize(VectorizeArgs),
    /// DETECT curves from ECT or SampEuler files.
    Detect(DetectArgs),
    /// Distances between descriptor files.
    Dist(DistArgs),
    /// Classical MDS of a distance matrix.
    Mds(MdsArgs),
    /// k-medoids clustering with an optional silhouette sweep.
    Cluster(ClusterArgs),
    /// Nearest-neighbour classification accuracy from a distance matrix.
    Eval(EvalArgs),
    /// Per-tile depth relative to a target mask.
    Depth(DepthArgs),
    /// Depth-kernel energy distance between two groups.
    Energy(EnergyArgs),
    /// Smoothed cell-type enrichment ratios.
    Enrich(EnrichArgs),
    /// Match two clusterings and report the proportional confusion matrix.
    Match(MatchArgs),
    /// Re-run the command recorded in a run.json.
    Replay(ReplayArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum TreeClass {
    A,
    B,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Sampler {
    Square,
    ThreeQuadrant,
    Ellipse,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SynthCommand {
    /// Noisy three-edge trees, one `.scx` per sample.
    Trees {
        #[arg(long, value_enum, default_value = "a")]
        class: TreeClass,
        /// JSON tree class spec; overrides --class.
        #[arg(long)]
        spec: Option<PathBuf>,
        #[arg(long)]
        samples: Option<usize>,
        #[arg(long)]
        sigma: Option<f64>,
        #[arg(long)]
        rotate: bool,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output directory.
        #[arg(long)]
        out: PathBuf,
    },
    /// A field of filled ellipses as a single `.scx`.
    Ellipses {
        #[arg(long, default_value_t = 50)]
        count: usize,
        #[arg(long, value_enum, default_value = "square")]
        sampler: Sampler,
        /// JSON ellipse field spec; overrides --count and --sampler.
        #[arg(long)]
        spec: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output `.scx` file.
        #[arg(long)]
        out: PathBuf,
    },
    /// Masks of one of the three bundled arm-shape classes.
    Masks {
        #[arg(long, default_value_t = 0, value_parser = clap::value_parser!(u8).range(0..3))]
        class: u8,
        #[arg(long, default_value_t = 20)]
        samples: usize,
        #[arg(long)]
        rotate: bool,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output directory.
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Debug, Args, Serialize)]
pub struct PreprocessArgs {
    #[arg(required = true)]
    pub inputs: Vec<PathBuf>,
    #[arg(long, default_value_t = 200_000)]
    pub target_area: usize,
    #[arg(long, default_value_t = 1126)]
    pub size: usize,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args, Serialize)]
pub struct TileArgs {
    #[arg(required = true)]
    pub inputs: Vec<PathBuf>,
    #[arg(long, default_value_t = 200)]
    pub side: usize,
    /// Explicit top-left corners `x0:y0`, instead of the lattice.
    #[arg(long = "at", value_parser = parse_corner)]
    pub at: Vec<(usize, usize)>,
    #[arg(long)]
    pub out: PathBuf,
}

fn parse_corner(s: &str) -> std::result::Result<(usize, usize), String> {
    let (x, y) = s.split_once(':').ok_or("expected x0:y0")?;
    Ok((x.parse().map_err(|_| "bad x0")?, y.parse().map_err(|_| "bad y0")?))
}

#[derive(Debug, Args, Serialize)]
pub struct TransformArgs {
    /// `.scx` complexes or PGM/CSV masks.
    #[arg(required = true)]
    pub inputs: Vec<PathBuf>,
    /// Number of directions (ECT default 100, SampEuler default 360).
    #[arg(long)]
    pub dirs: Option<usize>,
    /// Grid points (ECT default 1000, SampEuler default 300).
    #[arg(long)]
    pub points: Option<usize>,
    /// Half-range a of the grid [-a, a]; shared by all inputs. Defaults to
    /// 1.5 for masks and 1.1 times the largest bounding radius otherwise.
    #[arg(long)]
    pub range: Option<f64>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Translate each complex so its vertex mean is the origin.
    #[arg(long)]
    pub center: bool,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args, Serialize)]
pub struct VectorizeArgs {
    #[arg(required = true)]
    pub inputs: Vec<PathBuf>,
    /// Window length in grid points.
    #[arg(long, default_value_t = 1)]
    pub window: usize,
    /// Euler value bound b of the bins [-b, b]; defaults to the largest
    /// absolute value over all inputs.
    #[arg(long)]
    pub chi_bound: Option<i32>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args, Serialize)]
pub struct DetectArgs {
    #[arg(required = true)]
    pub inputs: Vec<PathBuf>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Metric {
    L1,
    Ect,
    Wexact,
    Sliced,
    L2,
}

#[derive(Debug, Args, Serialize)]
pub struct DistArgs {
    #[arg(required = true, num_args = 2..)]
    pub inputs: Vec<PathBuf>,
    /// Defaults by descriptor: ect, wexact, l1 (DETECT), l2 (histogram).
    #[arg(long, value_enum)]
    pub metric: Option<Metric>,
    #[arg(long, default_value_t = 50)]
    pub slices: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Output CSV: a scalar for two inputs, a matrix otherwise.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args, Serialize)]
pub struct MdsArgs {
    pub input: PathBuf,
    #[arg(long, default_value_t = 2)]
    pub dims: usize,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args, Serialize)]
pub struct ClusterArgs {
    pub input: PathBuf,
    #[arg(long, default_value_t = 3)]
    pub k: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 100)]
    pub max_iter: usize,
    /// Also write mean silhouette for k = 2..=10 to this CSV.
    #[arg(long)]
    pub sweep: Option<PathBuf>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ProtocolArg {
    Loo,
    Split,
}

#[derive(Debug, Args, Serialize)]
pub struct EvalArgs {
    pub input: PathBuf,
    /// CSV with `id,label` columns.
    #[arg(long)]
    pub labels: PathBuf,
    #[arg(long, default_value_t = 1)]
    pub k: usize,
    #[arg(long, value_enum, default_value = "loo")]
    pub protocol: ProtocolArg,
    #[arg(long, default_value_t = 0.7)]
    pub ratio: f64,
    #[arg(long, default_value_t = 50)]
    pub reps: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args, Serialize)]
pub struct DepthArgs {
    /// Mask over which tile distances are averaged (e.g. cortex).
    #[arg(long)]
    pub region: PathBuf,
    /// Mask distances are measured to (e.g. medulla).
    #[arg(long)]
    pub target: PathBuf,
    #[arg(long, default_value_t = 200)]
    pub side: usize,
    /// Physical units per pixel.
    #[arg(long, default_value_t = 1.0)]
    pub pitch: f64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args, Serialize)]
pub struct EnergyArgs {
    /// Distance matrix CSV.
    pub input: PathBuf,
    /// CSV with `id,depth` columns.
    #[arg(long)]
    pub depths: PathBuf,
    /// CSV with `id,group` columns holding exactly two groups.
    #[arg(long)]
    pub groups: PathBuf,
    #[arg(long, default_value_t = crate::analysis::DEFAULT_BANDWIDTH)]
    pub bandwidth: f64,
    #[arg(long, default_value_t = 51)]
    pub points: usize,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args, Serialize)]
pub struct EnrichArgs {
    /// CSV with an `id` column followed by one count column per cell type.
    pub input: PathBuf,
    /// Comma-separated ids of the baseline quadrants.
    #[arg(long, value_delimiter = ',', required = true)]
    pub young: Vec<String>,
    #[arg(long, default_value_t = 1.0)]
    pub alpha: f64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args, Serialize)]
pub struct MatchArgs {
    /// Reference `id,label` CSV.
    pub a: PathBuf,
    /// `id,label` CSV to relabel.
    pub b: PathBuf,
    #[arg(long)]
    pub k: usize,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args, Serialize)]
pub struct ReplayArgs {
    pub record: PathBuf,
}

/// Failure of a command, before mapping to an exit code.
#[derive(Debug)]
pub enum Failure {
    Lib(Error),
    /// Some items of a batch failed; the rest were written.
    Batch(Vec<(PathBuf, Error)>),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

impl Failure {
    pub fn exit_code(&self) -> i32 {
        match self {
            Failure::Lib(e) if e.is_io() => 2,
            _ => 1,
        }
    }
}

/// Files touched by a command and where its record goes.
struct Outcome {
    inputs: Vec<PathBuf>,
    outputs: Vec<PathBuf>,
    record: PathBuf,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct RunRecord {
    pub tool: String,
    pub version: String,
    pub argv: Vec<String>,
    pub parameters: serde_json::Value,
    pub inputs: Vec<InputDigest>,
    pub outputs: Vec<PathBuf>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct InputDigest {
    pub path: PathBuf,
    pub sha256: String,
}

fn sha256_file(path: &Path) -> Result<String> {
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    Ok(hex::encode(Sha256::digest(&bytes)))
}

fn configure_threads() {
    if let Ok(v) = std::env::var(THREADS_ENV) {
        match v.parse::<usize>() {
            Ok(n) if n > 0 => {
                let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
            }
            _ => eprintln!("warning: ignoring {THREADS_ENV}={v:?}; expected a positive integer"),
        }
    }
}

/// Parse `args` (program name first), run the command and return the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    configure_threads();
    let argv: Vec<String> = args.iter().map(|a| a.to_string_lossy().into_owned()).collect();
    match execute(&cli, &argv) {
        Ok(()) => 0,
        Err(f) => {
            match &f {
                Failure::Lib(e) => eprintln!("error: {e}"),
                Failure::Batch(items) => {
                    for (p, e) in items {
                        eprintln!("error: {}: {e}", p.display());
                    }
                    eprintln!("error: {} item(s) failed", items.len());
                }
            }
            f.exit_code()
        }
    }
}

fn execute(cli: &Cli, argv: &[String]) -> std::result::Result<(), Failure> {
    if let Command::Replay(r) = &cli.command {
        return replay(&r.record);
    }
    let (outcome, batch_errors) = match &cli.command {
        Command::Synth(s) => (cmd_synth(s)?, Vec::new()),
        Command::Preprocess(a) => cmd_preprocess(a)?,
        Command::Tile(a) => cmd_tile(a)?,
        Command::Ect(a) => cmd_transform(a, false)?,
        Command::Sampeuler(a) => cmd_transform(a, true)?,
        Command::Vectorize(a) => (cmd_vectorize(a)?, Vec::new()),
        Command::Detect(a) => cmd_detect(a)?,
        Command::Dist(a) => (cmd_dist(a)?, Vec::new()),
        Command::Mds(a) => (cmd_mds(a)?, Vec::new()),
        Command::Cluster(a) => (cmd_cluster(a)?, Vec::new()),
        Command::Eval(a) => (cmd_eval(a)?, Vec::new()),
        Command::Depth(a) => (cmd_depth(a)?, Vec::new()),
        Command::Energy(a) => (cmd_energy(a)?, Vec::new()),
        Command::Enrich(a) => (cmd_enrich(a)?, Vec::new()),
        Command::Match(a) => (cmd_match(a)?, Vec::new()),
        Command::Replay(_) => unreachable!(),
    };
    let inputs = outcome
        .inputs
        .iter()
        .map(|p| {
            Ok(InputDigest {
                path: p.clone(),
                sha256: sha256_file(p)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let record = RunRecord {
        tool: "eulershape".into(),
        version: env!("CARGO_PKG_VERSION").into(),
        argv: argv.to_vec(),
        parameters: serde_json::to_value(&cli.command).map_err(Error::from)?,
        inputs,
        outputs: outcome.outputs,
    };
    let text = serde_json::to_string_pretty(&record).map_err(Error::from)? + "\n";
    crate::io::write_atomic(&outcome.record, text.as_bytes())?;
    if batch_errors.is_empty() {
        Ok(())
    } else {
        Err(Failure::Batch(batch_errors))
    }
}

fn replay(path: &Path) -> std::result::Result<(), Failure> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let record: RunRecord =
        serde_json::from_str(&text).map_err(|e| Error::parse(path.display().to_string(), e.to_string()))?;
    if record.argv.get(1).map(String::as_str) == Some("replay") {
        return Err(Error::param("a replay record cannot be replayed").into());
    }
    for d in &record.inputs {
        if sha256_file(&d.path)? != d.sha256 {
            eprintln!("warning: {} changed since the recorded run", d.path.display());
        }
    }
    match run(&record.argv) {
        0 => Ok(()),
        2 => Err(Error::io(path, std::io::Error::other("replayed command failed")).into()),
        _ => Err(Error::param("replayed command failed").into()),
    }
}

fn ensure_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))
}

fn record_beside(file: &Path) -> PathBuf {
    let stem = file
        .file_stem()
        .map_or_else(|| "out".into(), |s| s.to_string_lossy().into_owned());
    file.with_file_name(format!("{stem}.run.json"))
}

fn stem(p: &Path) -> String {
    p.file_stem()
        .map_or_else(|| "item".into(), |s| s.to_string_lossy().into_owned())
}

fn stems(paths: &[PathBuf]) -> Result<Vec<String>> {
    let ids: Vec<String> = paths.iter().map(|p| stem(p)).collect();
    let unique: BTreeSet<&String> = ids.iter().collect();
    if unique.len() != ids.len() {
        return Err(Error::param("input file stems must be unique; they become item ids"));
    }
    Ok(ids)
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| Error::parse(path.display().to_string(), e.to_string()))
}

fn cmd_synth(cmd: &SynthCommand) -> Result<Outcome> {
    match cmd {
        SynthCommand::Trees {
            class,
            spec,
            samples,
            sigma,
            rotate,
            seed,
            out,
        } => {
            let mut s = match spec {
                Some(p) => read_json(p)?,
                None if *class == TreeClass::A => TreeClassSpec::class_a(),
                None => TreeClassSpec::class_b(),
            };
            s.samples = samples.unwrap_or(s.samples);
            s.sigma = sigma.unwrap_or(s.sigma);
            let trees = gen_trees(&s, *rotate, *seed)?;
            ensure_dir(out)?;
            let prefix = match (spec, class) {
                (Some(p), _) => stem(p),
                (None, TreeClass::A) => "tree_a".into(),
                (None, TreeClass::B) => "tree_b".into(),
            };
            let mut outputs = Vec::new();
            for (i, t) in trees.iter().enumerate() {
                let p = out.join(format!("{prefix}_{i:02}.scx"));
                write_scx(&p, t)?;
                outputs.push(p);
            }
            Ok(Outcome {
                inputs: spec.iter().cloned().collect(),
                outputs,
                record: out.join("run.json"),
            })
        }
        SynthCommand::Ellipses {
            count,
            sampler,
            spec,
            seed,
            out,
        } => {
            let s = match spec {
                Some(p) => read_json(p)?,
                None => EllipseFieldSpec {
                    centers: match sampler {
                        Sampler::Square => CenterSampler::Square { side: 50.0 },
                        Sampler::ThreeQuadrant => CenterSampler::ThreeQuadrant { side: 50.0 },
                        Sampler::Ellipse => CenterSampler::EllipseRegion {
                            major: 100.0,
                            minor: 20.0,
                        },
                    },
                    ..EllipseFieldSpec::square(*count)
                },
            };
            write_scx(out, &gen_ellipse_field(&s, *seed)?)?;
            Ok(Outcome {
                inputs: spec.iter().cloned().collect(),
                outputs: vec![out.clone()],
                record: record_beside(out),
            })
        }
        SynthCommand::Masks {
            class,
            samples,
            rotate,
            seed,
            out,
        } => {
            let spec = &ArmShapeSpec::presets()[*class as usize];
            let masks = gen_arm_masks(spec, *samples, *rotate, pair_seed(*seed, *class as usize, 0))?;
            ensure_dir(out)?;
            let mut outputs = Vec::new();
            for (i, m) in masks.iter().enumerate() {
                let p = out.join(format!("shape{class}_{i:02}.pgm"));
                write_mask(&p, m)?;
                outputs.push(p);
            }
            Ok(Outcome {
                inputs: Vec::new(),
                outputs,
                record: out.join("run.json"),
            })
        }
    }
}

type ItemErrors = Vec<(PathBuf, Error)>;
type BatchResult = Result<(Outcome, ItemErrors)>;

/// Run `f` on every input in parallel, keeping successes and collecting
/// per-item failures.
fn batch<T: Send>(inputs: &[PathBuf], f: impl Fn(usize, &Path) -> Result<T> + Sync) -> (Vec<(usize, T)>, ItemErrors) {
    let results: Vec<(usize, Result<T>)> = inputs.par_iter().enumerate().map(|(i, p)| (i, f(i, p))).collect();
    let mut ok = Vec::new();
    let mut failed = Vec::new();
    for (i, r) in results {
        match r {
            Ok(v) => ok.push((i, v)),
            Err(e) => failed.push((inputs[i].clone(), e)),
        }
    }
    (ok, failed)
}

fn cmd_preprocess(a: &PreprocessArgs) -> BatchResult {
    ensure_dir(&a.out)?;
    stems(&a.inputs)?;
    let (done, failed) = batch(&a.inputs, |_, p| {
        let m = preprocess_mask(&read_mask(p)?, a.target_area, a.size)?;
        let dest = a.out.join(format!("{}.pgm", stem(p)));
        write_mask(&dest, &m)?;
        Ok(dest)
    });
    Ok((
        Outcome {
            inputs: a.inputs.clone(),
            outputs: done.into_iter().map(|(_, p)| p).collect(),
            record: a.out.join("run.json"),
        },
        failed,
    ))
}

fn cmd_tile(a: &TileArgs) -> BatchResult {
    ensure_dir(&a.out)?;
    stems(&a.inputs)?;
    let placement = if a.at.is_empty() {
        TilePlacement::Lattice
    } else {
        TilePlacement::Explicit(a.at.clone())
    };
    let (done, failed) = batch(&a.inputs, |_, p| {
        let name = stem(p);
        tile(&read_mask(p)?, a.side, &placement)?
            .iter()
            .map(|t| {
                let dest = a.out.join(format!("{name}_r{}_c{}.pgm", t.row, t.col));
                write_mask(&dest, &t.mask)?;
                Ok(dest)
            })
            .collect::<Result<Vec<_>>>()
    });
    Ok((
        Outcome {
            inputs: a.inputs.clone(),
            outputs: done.into_iter().flat_map(|(_, p)| p).collect(),
            record: a.out.join("run.json"),
        },
        failed,
    ))
}

/// A shape read from disk.
pub enum Shape {
    Simplicial(GeometricComplex),
    Cubical(CubicalComplex),
}

impl Shape {
    /// `.scx` files are complexes; anything else is read as a mask.
    pub fn load(path: &Path, center: bool) -> Result<Shape> {
        if path.extension().is_some_and(|e| e.eq_ignore_ascii_case("scx")) {
            let k = read_scx(path)?;
            Ok(Shape::Simplicial(if center && !k.is_empty() { k.center()? } else { k }))
        } else {
            Ok(Shape::Cubical(mask_to_complex(&read_mask(path)?)))
        }
    }

    fn radius(&self) -> f64 {
        let r = match self {
            Shape::Simplicial(k) if !k.is_empty() => k.bounding_radius(),
            Shape::Cubical(k) if !k.is_empty() => k.bounding_radius(),
            _ => Ok(0.0),
        };
        r.unwrap_or(0.0)
    }
}

fn cmd_transform(a: &TransformArgs, sampled: bool) -> BatchResult {
    let n_dirs = a.dirs.unwrap_or(if sampled { 360 } else { 100 });
    let points = a.points.unwrap_or(if sampled { 300 } else { 1000 });
    if n_dirs == 0 {
        return Err(Error::param("--dirs must be at least 1"));
    }
    ensure_dir(&a.out)?;
    stems(&a.inputs)?;
    let (shapes, mut failed) = batch(&a.inputs, |_, p| Shape::load(p, a.center));
    let half_range = match a.range {
        Some(r) => r,
        None if shapes.iter().all(|(_, s)| matches!(s, Shape::Cubical(_))) => DEFAULT_IMAGE_RANGE,
        None => {
            let r = shapes.iter().map(|(_, s)| s.radius()).fold(0.0, f64::max);
            if r > 0.0 {
                DEFAULT_RANGE_FACTOR * r
            } else {
                1.0
            }
        }
    };
    let grid = FiltrationGrid::new(half_range, points)?;
    let results: Vec<(usize, Result<PathBuf>)> = shapes
        .par_iter()
        .map(|(i, shape)| {
            let seed = pair_seed(a.seed, *i, 0);
            let d = match (shape, sampled) {
                (Shape::Simplicial(k), false) => ect(k, n_dirs, &grid).map(Descriptor::Ect),
                (Shape::Cubical(k), false) => ect(k, n_dirs, &grid).map(Descriptor::Ect),
                (Shape::Simplicial(k), true) => sampeuler(k, n_dirs, &grid, seed).map(Descriptor::Measure),
                (Shape::Cubical(k), true) => sampeuler(k, n_dirs, &grid, seed).map(Descriptor::Measure),
            };
            let dest = a.out.join(format!("{}.csv", stem(&a.inputs[*i])));
            (*i, d.and_then(|d| write_descriptor(&dest, &d)).map(|_| dest))
        })
        .collect();
    let mut outputs = Vec::new();
    for (i, r) in results {
        match r {
            Ok(p) => outputs.push(p),
            Err(e) => failed.push((a.inputs[i].clone(), e)),
        }
    }
    Ok((
        Outcome {
            inputs: a.inputs.clone(),
            outputs,
            record: a.out.join("run.json"),
        },
        failed,
    ))
}

fn read_descriptors(paths: &[PathBuf]) -> Result<Vec<Descriptor>> {
    paths.par_iter().map(|p| read_descriptor(p)).collect()
}

fn with_sidecars(paths: &[PathBuf]) -> Vec<PathBuf> {
    paths
        .iter()
        .flat_map(|p| [p.clone(), crate::io::sidecar_path(p)])
        .collect()
}

fn cmd_vectorize(a: &VectorizeArgs) -> Result<Outcome> {
    ensure_dir(&a.out)?;
    let ids = stems(&a.inputs)?;
    let measures = read_descriptors(&a.inputs)?
        .into_iter()
        .zip(&a.inputs)
        .map(|(d, p)| match d {
            Descriptor::Measure(m) => Ok(m),
            _ => Err(Error::param(format!("{} is not a SampEuler file", p.display()))),
        })
        .collect::<Result<Vec<_>>>()?;
    let bound = a
        .chi_bound
        .unwrap_or_else(|| measures.iter().map(|m| m.curves.max_abs()).max().unwrap_or(0));
    let outputs = measures
        .par_iter()
        .zip(&ids)
        .map(|(m, id)| {
            let h = vectorize(m, a.window, Some(bound))?;
            let dest = a.out.join(format!("{id}.csv"));
            write_descriptor(&dest, &Descriptor::Histogram(h))?;
            Ok(dest)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Outcome {
        inputs: with_sidecars(&a.inputs),
        outputs,
        record: a.out.join("run.json"),
    })
}

fn cmd_detect(a: &DetectArgs) -> BatchResult {
    ensure_dir(&a.out)?;
    stems(&a.inputs)?;
    let (done, failed) = batch(&a.inputs, |_, p| {
        let curves = match read_descriptor(p)? {
            Descriptor::Ect(e) => e.curves,
            Descriptor::Measure(m) => m.curves,
            _ => return Err(Error::param("DETECT needs an ECT or SampEuler file")),
        };
        let dest = a.out.join(format!("{}.csv", stem(p)));
        write_descriptor(&dest, &Descriptor::Detect(detect_curves(&curves)?))?;
        Ok(dest)
    });
    Ok((
        Outcome {
            inputs: with_sidecars(&a.inputs),
            outputs: done.into_iter().map(|(_, p)| p).collect(),
            record: a.out.join("run.json"),
        },
        failed,
    ))
}

fn metric_choice(metric: Option<Metric>, slices: usize, sample: &Descriptor) -> MetricChoice {
    match metric {
        Some(Metric::L1) => MetricChoice::L1,
        Some(Metric::Ect) => MetricChoice::Ect,
        Some(Metric::Wexact) => MetricChoice::WassersteinExact,
        Some(Metric::Sliced) => MetricChoice::Sliced { slices },
        Some(Metric::L2) => MetricChoice::L2,
        None => match sample {
            Descriptor::Ect(_) => MetricChoice::Ect,
            Descriptor::Measure(_) => MetricChoice::WassersteinExact,
            Descriptor::Detect(_) => MetricChoice::L1,
            Descriptor::Histogram(_) => MetricChoice::L2,
        },
    }
}

fn cmd_dist(a: &DistArgs) -> Result<Outcome> {
    let ids = stems(&a.inputs)?;
    let items = read_descriptors(&a.inputs)?;
    let metric = metric_choice(a.metric, a.slices, &items[0]);
    let m = pairwise_descriptors(ids.clone(), &items, metric, a.seed)?;
    if items.len() == 2 {
        let mut t = Table::new(&["a", "b", "distance"]);
        t.push(vec![ids[0].clone(), ids[1].clone(), exact(m.get(0, 1))]);
        t.write(&a.out)?;
        println!("{}", exact(m.get(0, 1)));
    } else {
        write_distance_matrix(&a.out, &m)?;
    }
    Ok(Outcome {
        inputs: with_sidecars(&a.inputs),
        outputs: vec![a.out.clone()],
        record: record_beside(&a.out),
    })
}

fn cmd_mds(a: &MdsArgs) -> Result<Outcome> {
    let m = read_distance_matrix(&a.input)?;
    let e = mds(&m, a.dims)?;
    embedding_table(m.ids(), &e).write(&a.out)?;
    println!("stress {}", exact(e.stress));
    Ok(Outcome {
        inputs: vec![a.input.clone()],
        outputs: vec![a.out.clone()],
        record: record_beside(&a.out),
    })
}

fn cmd_cluster(a: &ClusterArgs) -> Result<Outcome> {
    let m = read_distance_matrix(&a.input)?;
    let c = kmedoids(&m, a.k, a.seed, a.max_iter)?;
    let mut t = Table::new(&["id", "label", "medoid"]);
    for (i, (id, l)) in m.ids().iter().zip(&c.labels).enumerate() {
        t.push(vec![id.clone(), l.to_string(), c.medoids.contains(&i).to_string()]);
    }
    t.write(&a.out)?;
    let mut outputs = vec![a.out.clone()];
    if let Some(sweep) = &a.sweep {
        let mut s = Table::new(&["k", "score"]);
        for (k, score) in silhouette_sweep(&m, 2..=10, a.seed)? {
            s.push(vec![k.to_string(), exact(score)]);
        }
        s.write(sweep)?;
        outputs.push(sweep.clone());
    }
    println!("cost {}", exact(c.cost));
    Ok(Outcome {
        inputs: vec![a.input.clone()],
        outputs,
        record: record_beside(&a.out),
    })
}

/// Values of `column` in `table`, looked up for each id of the matrix.
fn column_by_id(table: &Table, column: &str, ids: &[String], name: &Path) -> Result<Vec<String>> {
    let (ic, vc) = (table.column("id")?, table.column(column)?);
    let map: HashMap<&str, &str> = table.rows.iter().map(|r| (r[ic].as_str(), r[vc].as_str())).collect();
    ids.iter()
        .map(|id| {
            map.get(id.as_str())
                .map(|v| v.to_string())
                .ok_or_else(|| Error::parse(name.display().to_string(), format!("no row for id {id:?}")))
        })
        .collect()
}

/// Map string labels to indices in sorted order.
fn index_labels(raw: &[String]) -> (Vec<String>, Vec<usize>) {
    let classes: Vec<String> = raw.iter().cloned().collect::<BTreeSet<_>>().into_iter().collect();
    let labels = raw.iter().map(|r| classes.binary_search(r).unwrap_or(0)).collect();
    (classes, labels)
}

fn cmd_eval(a: &EvalArgs) -> Result<Outcome> {
    let m = read_distance_matrix(&a.input)?;
    let raw = column_by_id(&Table::read(&a.labels)?, "label", m.ids(), &a.labels)?;
    let (_, labels) = index_labels(&raw);
    let protocol = match a.protocol {
        ProtocolArg::Loo => Protocol::LeaveOneOut,
        ProtocolArg::Split => Protocol::Split {
            train_fraction: a.ratio,
            reps: a.reps,
            seed: a.seed,
        },
    };
    let r = knn_eval(&m, &labels, a.k, protocol)?;
    for w in &r.warnings {
        eprintln!("warning: {w}");
    }
    let mut t = Table::new(&["protocol", "k", "mean", "sd", "reps"]);
    let name = if a.protocol == ProtocolArg::Loo { "loo" } else { "split" };
    t.push(vec![
        name.into(),
        a.k.to_string(),
        exact(r.mean),
        exact(r.sd),
        r.accuracies.len().to_string(),
    ]);
    t.write(&a.out)?;
    println!("accuracy {:.4} +- {:.4}", r.mean, r.sd);
    Ok(Outcome {
        inputs: vec![a.input.clone(), a.labels.clone()],
        outputs: vec![a.out.clone()],
        record: record_beside(&a.out),
    })
}

fn cmd_depth(a: &DepthArgs) -> Result<Outcome> {
    if !(a.pitch > 0.0 && a.pitch.is_finite()) {
        return Err(Error::param("--pitch must be positive"));
    }
    let region = read_mask(&a.region)?;
    let field = depth_field(&region, &read_mask(&a.target)?)?;
    if a.side == 0 || a.side > field.width.min(field.height) {
        return Err(Error::param("tile side must fit inside the masks"));
    }
    let mut cells = Vec::new();
    for row in 0..field.height / a.side {
        for col in 0..field.width / a.side {
            cells.push((row, col, Rect::square(col * a.side, row * a.side, a.side)));
        }
    }
    let rects: Vec<Rect> = cells.iter().map(|c| c.2).collect();
    let depths = quadrant_depths(&field, &rects);
    let name = stem(&a.region);
    let mut t = Table::new(&["id", "row", "col", "x0", "y0", "distance", "depth"]);
    for ((row, col, r), d) in cells.iter().zip(&depths) {
        let dist = field
            .quadrant_distance(*r)
            .map(|v| exact(v * a.pitch))
            .unwrap_or_default();
        t.push(vec![
            format!("{name}_r{row}_c{col}"),
            row.to_string(),
            col.to_string(),
            r.x0.to_string(),
            r.y0.to_string(),
            dist,
            d.map(exact).unwrap_or_default(),
        ]);
    }
    t.write(&a.out)?;
    Ok(Outcome {
        inputs: vec![a.region.clone(), a.target.clone()],
        outputs: vec![a.out.clone()],
        record: record_beside(&a.out),
    })
}

fn cmd_energy(a: &EnergyArgs) -> Result<Outcome> {
    let m = read_distance_matrix(&a.input)?;
    let depth_raw = column_by_id(&Table::read(&a.depths)?, "depth", m.ids(), &a.depths)?;
    let depths = depth_raw
        .iter()
        .map(|d| {
            d.parse::<f64>()
                .map_err(|_| Error::parse(a.depths.display().to_string(), format!("bad depth {d:?}")))
        })
        .collect::<Result<Vec<_>>>()?;
    let group_raw = column_by_id(&Table::read(&a.groups)?, "group", m.ids(), &a.groups)?;
    let (names, groups) = index_labels(&group_raw);
    if names.len() != 2 {
        return Err(Error::param(format!(
            "expected exactly two groups, found {}",
            names.len()
        )));
    }
    let first: Vec<bool> = groups.iter().map(|&g| g == 0).collect();
    let curve = depth_energy_curve(&m, &depths, &first, a.bandwidth, &depth_grid(a.points))?;
    depth_curve_table(&curve).write(&a.out)?;
    Ok(Outcome {
        inputs: vec![a.input.clone(), a.depths.clone(), a.groups.clone()],
        outputs: vec![a.out.clone()],
        record: record_beside(&a.out),
    })
}

fn cmd_enrich(a: &EnrichArgs) -> Result<Outcome> {
    let t = Table::read(&a.input)?;
    let ic = t.column("id")?;
    let types: Vec<&String> = t
        .header
        .iter()
        .enumerate()
        .filter(|(i, _)| *i != ic)
        .map(|(_, h)| h)
        .collect();
    let name = a.input.display().to_string();
    let counts = t
        .rows
        .iter()
        .map(|r| {
            r.iter()
                .enumerate()
                .filter(|(i, _)| *i != ic)
                .map(|(_, v)| {
                    v.parse::<f64>()
                        .map_err(|_| Error::parse(&name, format!("bad count {v:?}")))
                })
                .collect::<Result<Vec<f64>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    let young = a
        .young
        .iter()
        .map(|y| {
            t.rows
                .iter()
                .position(|r| &r[ic] == y)
                .ok_or_else(|| Error::param(format!("unknown baseline id {y:?}")))
        })
        .collect::<Result<Vec<_>>>()?;
    let e = enrichment(&counts, &young, a.alpha)?;
    let mut header: Vec<&str> = vec!["id"];
    header.extend(types.iter().map(|s| s.as_str()));
    let mut out = Table::new(&header);
    for (r, ratios) in t.rows.iter().zip(&e.ratios) {
        out.push(
            std::iter::once(r[ic].clone())
                .chain(ratios.iter().map(|&v| exact(v)))
                .collect(),
        );
    }
    out.write(&a.out)?;
    Ok(Outcome {
        inputs: vec![a.input.clone()],
        outputs: vec![a.out.clone()],
        record: record_beside(&a.out),
    })
}

fn numeric_labels(t: &Table, ids: &[String], name: &Path) -> Result<Vec<usize>> {
    column_by_id(t, "label", ids, name)?
        .iter()
        .map(|l| {
            l.parse().map_err(|_| {
                Error::parse(
                    name.display().to_string(),
                    format!("label {l:?} is not a cluster index"),
                )
            })
        })
        .collect()
}

fn cmd_match(a: &MatchArgs) -> Result<Outcome> {
    let ta = Table::read(&a.a)?;
    let ic = ta.column("id")?;
    let ids: Vec<String> = ta.rows.iter().map(|r| r[ic].clone()).collect();
    let la = numeric_labels(&ta, &ids, &a.a)?;
    let lb = numeric_labels(&Table::read(&a.b)?, &ids, &a.b)?;
    let m = match_clusterings(&la, &lb, a.k)?;
    let mut header = vec!["cluster".to_string()];
    header.extend((0..a.k).map(|j| format!("c{j}")));
    let mut t = Table {
        header,
        rows: Vec::new(),
    };
    for (i, row) in m.confusion.iter().enumerate() {
        t.push(
            std::iter::once(i.to_string())
                .chain(row.iter().map(|&v| exact(v)))
                .collect(),
        );
    }
    t.write(&a.out)?;
    println!("permutation {:?}, agreement {}/{}", m.perm, m.agreement, ids.len());
    Ok(Outcome {
        inputs: vec![a.a.clone(), a.b.clone()],
        outputs: vec![a.out.clone()],
        record: record_beside(&a.out),
    })
}
