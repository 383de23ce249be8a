//! File formats.
//!
//! * `.scx`: embedded simplicial complexes.
//! * PGM (P2/P5) and 0/1 CSV: binary masks; 0 is background.
//! * Curve CSVs (one row per direction) with a JSON sidecar holding the grid
//!   and sampling metadata; the sidecar sits next to the CSV with a `.json`
//!   extension.
//! * Distance matrices: an id row, then the matrix in 17 significant digits,
//!   so values round-trip exactly.
//!
//! Writers go through a temporary file in the destination directory and
//! rename it into place.

use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::analysis::{DepthKernelCurve, Embedding};
use crate::complex::{CellComplex, GeometricComplex, Point};
use crate::error::{Error, Result};
use crate::imageops::BinaryMask;
use crate::metric::{Descriptor, DistanceMatrix};
use crate::transform::{
    fixed_directions, random_directions, CurveMatrix, CurveMeasure, DetectCurve, DirectionMode, EctMatrix,
    FiltrationGrid, SampHistogram,
};

/// Decimal form with 17 significant digits; parses back to the same `f64`.
pub fn exact(x: f64) -> String {
    format!("{x:.16e}")
}

/// Write `bytes` to `path` atomically.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| Error::io(dir, e))?;
    tmp.write_all(bytes).map_err(|e| Error::io(path, e))?;
    tmp.persist(path).map_err(|e| Error::io(path, e.error))?;
    Ok(())
}

fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

fn parse_num<T: std::str::FromStr>(s: &str, ctx: impl Fn() -> String) -> Result<T> {
    s.trim()
        .parse()
        .map_err(|_| Error::parse(ctx(), format!("cannot parse {:?}", s.trim())))
}

/// Path of the JSON sidecar belonging to a CSV.
pub fn sidecar_path(csv: &Path) -> PathBuf {
    csv.with_extension("json")
}

pub fn format_scx(k: &GeometricComplex) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "scx 1\ndim {}\nvertices {}", k.dim(), k.vertices().len());
    for p in k.vertices() {
        let _ = writeln!(out, "{} {}", p[0], p[1]);
    }
    let simplices: Vec<&Vec<usize>> = k.all_simplices().collect();
    let _ = writeln!(out, "simplices {}", simplices.len());
    for s in simplices {
        let _ = write!(out, "{}", s.len() - 1);
        for v in s {
            let _ = write!(out, " {v}");
        }
        out.push('\n');
    }
    out
}

/// Parse `.scx` text; `name` labels error messages.
pub fn parse_scx(text: &str, name: &str) -> Result<GeometricComplex> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
    let ctx = |n: usize| format!("{name}:{n}");
    let header = |lines: &mut dyn Iterator<Item = (usize, &str)>, key: &str| -> Result<(usize, String)> {
        let (n, l) = lines
            .next()
            .ok_or_else(|| Error::parse(name, format!("missing `{key}` line")))?;
        match l.split_once(' ') {
            Some((k, v)) if k == key => Ok((n, v.trim().to_string())),
            _ => Err(Error::parse(ctx(n), format!("expected `{key} ...`, found {l:?}"))),
        }
    };
    let (n, version) = header(&mut lines, "scx")?;
    if version != "1" {
        return Err(Error::parse(ctx(n), format!("unsupported version {version}")));
    }
    let (n, dim) = header(&mut lines, "dim")?;
    if dim != "2" {
        return Err(Error::parse(
            ctx(n),
            format!("only dimension 2 is supported, found {dim}"),
        ));
    }
    let (n, count) = header(&mut lines, "vertices")?;
    let nv: usize = parse_num(&count, || ctx(n))?;
    let mut vertices: Vec<Point> = Vec::with_capacity(nv);
    for _ in 0..nv {
        let (n, l) = lines
            .next()
            .ok_or_else(|| Error::parse(name, "file ends inside the vertex list"))?;
        let xy: Vec<&str> = l.split_whitespace().collect();
        if xy.len() != 2 {
            return Err(Error::parse(ctx(n), "a vertex needs exactly two coordinates"));
        }
        vertices.push([parse_num(xy[0], || ctx(n))?, parse_num(xy[1], || ctx(n))?]);
    }
    let (n, count) = header(&mut lines, "simplices")?;
    let ns: usize = parse_num(&count, || ctx(n))?;
    let mut simplices = Vec::with_capacity(ns);
    for _ in 0..ns {
        let (n, l) = lines
            .next()
            .ok_or_else(|| Error::parse(name, "file ends inside the simplex list"))?;
        let fields: Vec<usize> = l
            .split_whitespace()
            .map(|f| parse_num(f, || ctx(n)))
            .collect::<Result<_>>()?;
        match fields.split_first() {
            Some((&k, rest)) if k >= 1 && rest.len() == k + 1 => simplices.push(rest.to_vec()),
            _ => return Err(Error::parse(ctx(n), "expected `k i0 ... ik` with k >= 1")),
        }
    }
    if let Some((n, _)) = lines.next() {
        return Err(Error::parse(ctx(n), "trailing content after the simplex list"));
    }
    GeometricComplex::new(vertices, simplices)
}

pub fn read_scx(path: &Path) -> Result<GeometricComplex> {
    parse_scx(&read_text(path)?, &path.display().to_string())
}

pub fn write_scx(path: &Path, k: &GeometricComplex) -> Result<()> {
    write_atomic(path, format_scx(k).as_bytes())
}

/// Binary PGM (P5), 0 for background and 255 for foreground.
pub fn encode_pgm(mask: &BinaryMask) -> Vec<u8> {
    let mut out = format!("P5\n{} {}\n255\n", mask.width(), mask.height()).into_bytes();
    out.extend(mask.bits().iter().map(|&b| if b { 255u8 } else { 0 }));
    out
}

/// Parse P2 or P5; pixels above half the maximum value are foreground.
pub fn decode_pgm(bytes: &[u8], name: &str) -> Result<BinaryMask> {
    let mut pos = 0;
    let mut token = || -> Result<String> {
        loop {
            while pos < bytes.len() && bytes[pos].is_ascii_whitespace() {
                pos += 1;
            }
            if pos < bytes.len() && bytes[pos] == b'#' {
                while pos < bytes.len() && bytes[pos] != b'\n' {
                    pos += 1;
                }
                continue;
            }
            break;
        }
        let start = pos;
        while pos < bytes.len() && !bytes[pos].is_ascii_whitespace() {
            pos += 1;
        }
        if start == pos {
            return Err(Error::parse(name, "truncated PGM header"));
        }
        Ok(String::from_utf8_lossy(&bytes[start..pos]).into_owned())
    };
    let magic = token()?;
    let width: usize = parse_num(&token()?, || name.to_string())?;
    let height: usize = parse_num(&token()?, || name.to_string())?;
    let maxval: u32 = parse_num(&token()?, || name.to_string())?;
    if maxval == 0 || maxval > 65535 {
        return Err(Error::parse(name, format!("invalid maximum value {maxval}")));
    }
    let n = width * height;
    let values: Vec<u32> = match magic.as_str() {
        "P2" => (0..n)
            .map(|_| parse_num(&token()?, || name.to_string()))
            .collect::<Result<_>>()?,
        "P5" => {
            let data = &bytes[(pos + 1).min(bytes.len())..];
            let wide = maxval > 255;
            let need = if wide { 2 * n } else { n };
            if data.len() < need {
                return Err(Error::parse(
                    name,
                    format!("expected {need} bytes of pixel data, found {}", data.len()),
                ));
            }
            if wide {
                data.chunks_exact(2)
                    .take(n)
                    .map(|c| u32::from(c[0]) << 8 | u32::from(c[1]))
                    .collect()
            } else {
                data[..n].iter().map(|&b| u32::from(b)).collect()
            }
        }
        other => return Err(Error::parse(name, format!("unsupported PGM magic {other:?}"))),
    };
    if values.iter().any(|&v| v > maxval) {
        return Err(Error::parse(name, "pixel value exceeds the declared maximum"));
    }
    BinaryMask::new(width, height, values.iter().map(|&v| 2 * v > maxval).collect())
}

/// 0/1 CSV, one image row per line.
pub fn format_mask_csv(mask: &BinaryMask) -> String {
    let mut out = String::with_capacity(mask.width() * mask.height() * 2);
    for row in mask.bits().chunks(mask.width()) {
        let line: Vec<&str> = row.iter().map(|&b| if b { "1" } else { "0" }).collect();
        out.push_str(&line.join(","));
        out.push('\n');
    }
    out
}

pub fn parse_mask_csv(text: &str, name: &str) -> Result<BinaryMask> {
    let mut bits = Vec::new();
    let mut width = None;
    for (i, line) in text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty()) {
        let row: Vec<bool> = line
            .split(',')
            .map(|f| match f.trim() {
                "0" => Ok(false),
                "1" => Ok(true),
                other => Err(Error::parse(
                    format!("{name}:{}", i + 1),
                    format!("expected 0 or 1, found {other:?}"),
                )),
            })
            .collect::<Result<_>>()?;
        if *width.get_or_insert(row.len()) != row.len() {
            return Err(Error::parse(format!("{name}:{}", i + 1), "rows have different lengths"));
        }
        bits.extend(row);
    }
    let width = width.ok_or_else(|| Error::parse(name, "empty mask"))?;
    BinaryMask::new(width, bits.len() / width, bits)
}

/// Read a PGM or 0/1 CSV mask, chosen by the file contents.
pub fn read_mask(path: &Path) -> Result<BinaryMask> {
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    let name = path.display().to_string();
    if bytes.starts_with(b"P2") || bytes.starts_with(b"P5") {
        decode_pgm(&bytes, &name)
    } else {
        parse_mask_csv(&String::from_utf8_lossy(&bytes), &name)
    }
}

/// Write a mask as PGM, or as 0/1 CSV when the extension is `.csv`.
pub fn write_mask(path: &Path, mask: &BinaryMask) -> Result<()> {
    if path.extension().is_some_and(|e| e.eq_ignore_ascii_case("csv")) {
        write_atomic(path, format_mask_csv(mask).as_bytes())
    } else {
        write_atomic(path, &encode_pgm(mask))
    }
}

/// What a descriptor file holds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DescriptorKind {
    Ect,
    Sampeuler,
    Histogram,
    Detect,
}

/// Metadata stored next to every descriptor CSV.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sidecar {
    pub kind: DescriptorKind,
    pub seed: Option<u64>,
    pub a: f64,
    pub m: usize,
    pub n_dirs: usize,
    pub mode: DirectionMode,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub window_len: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub chi_bound: Option<i32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub range_expanded: Option<bool>,
}

impl Sidecar {
    fn new(kind: DescriptorKind, grid: &FiltrationGrid, n_dirs: usize, mode: DirectionMode, seed: Option<u64>) -> Self {
        Sidecar {
            kind,
            seed,
            a: grid.half_range(),
            m: grid.len(),
            n_dirs,
            mode,
            window_len: None,
            chi_bound: None,
            range_expanded: None,
        }
    }

    pub fn grid(&self) -> Result<FiltrationGrid> {
        FiltrationGrid::new(self.a, self.m)
    }
}

fn sidecar_for(d: &Descriptor) -> Sidecar {
    match d {
        Descriptor::Ect(e) => Sidecar::new(DescriptorKind::Ect, e.grid(), e.n_dirs(), e.mode, e.seed),
        Descriptor::Measure(s) => Sidecar::new(
            DescriptorKind::Sampeuler,
            s.grid(),
            s.len(),
            DirectionMode::Random,
            Some(s.seed),
        ),
        Descriptor::Detect(c) => Sidecar::new(DescriptorKind::Detect, &c.grid, 0, DirectionMode::Fixed, None),
        Descriptor::Histogram(h) => {
            let mut s = Sidecar::new(DescriptorKind::Histogram, &h.grid, 0, DirectionMode::Random, None);
            s.window_len = Some(h.window_len);
            s.chi_bound = Some(h.chi_bound);
            s.range_expanded = Some(h.range_expanded);
            s
        }
    }
}

fn format_curves(c: &CurveMatrix) -> String {
    let mut out = String::new();
    for row in c.iter_rows() {
        let fields: Vec<String> = row.iter().map(i32::to_string).collect();
        out.push_str(&fields.join(","));
        out.push('\n');
    }
    out
}

fn format_histogram(h: &SampHistogram) -> String {
    let mut out = String::from("t_start");
    for &(s, _) in &h.windows {
        let _ = write!(out, ",{}", exact(h.grid.point(s)));
    }
    out.push_str("\nt_end");
    for &(_, e) in &h.windows {
        let _ = write!(out, ",{}", exact(h.grid.point(e)));
    }
    out.push('\n');
    for k in -h.chi_bound..=h.chi_bound {
        let _ = write!(out, "{k}");
        for w in 0..h.windows.len() {
            let _ = write!(out, ",{}", exact(h.mass(w, k)));
        }
        out.push('\n');
    }
    out
}

fn format_detect(c: &DetectCurve) -> String {
    let mut out = String::from("t,detect\n");
    for (t, v) in c.grid.points().zip(&c.values) {
        let _ = writeln!(out, "{},{}", exact(t), exact(*v));
    }
    out
}

/// CSV body and sidecar of a descriptor.
pub fn format_descriptor(d: &Descriptor) -> Result<(String, String)> {
    let body = match d {
        Descriptor::Ect(e) => format_curves(&e.curves),
        Descriptor::Measure(s) => format_curves(&s.curves),
        Descriptor::Detect(c) => format_detect(c),
        Descriptor::Histogram(h) => format_histogram(h),
    };
    Ok((body, serde_json::to_string_pretty(&sidecar_for(d))? + "\n"))
}

/// Write a descriptor CSV and its sidecar.
pub fn write_descriptor(path: &Path, d: &Descriptor) -> Result<()> {
    let (body, meta) = format_descriptor(d)?;
    write_atomic(path, body.as_bytes())?;
    write_atomic(&sidecar_path(path), meta.as_bytes())
}

fn data_lines<'a>(text: &'a str) -> impl Iterator<Item = (usize, &'a str)> + 'a {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty())
}

fn parse_curves(text: &str, grid: FiltrationGrid, name: &str) -> Result<CurveMatrix> {
    let rows = data_lines(text)
        .map(|(n, l)| {
            l.split(',')
                .map(|f| parse_num(f, || format!("{name}:{n}")))
                .collect::<Result<Vec<i32>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    CurveMatrix::from_rows(grid, rows)
}

fn parse_histogram(text: &str, meta: &Sidecar, name: &str) -> Result<SampHistogram> {
    let grid = meta.grid()?;
    let missing = |what: &str| Error::parse(name, format!("histogram sidecar lacks {what}"));
    let window_len = meta.window_len.ok_or_else(|| missing("window_len"))?;
    let chi_bound = meta.chi_bound.ok_or_else(|| missing("chi_bound"))?;
    let lines: Vec<(usize, &str)> = data_lines(text).collect();
    let n_windows = lines.first().map_or(0, |(_, l)| l.split(',').count().saturating_sub(1));
    if lines.len() != 2 + (2 * chi_bound + 1) as usize {
        return Err(Error::parse(name, "histogram rows do not match the sidecar chi bound"));
    }
    let mut by_bin = Vec::new();
    for (k, &(n, l)) in (-chi_bound..).zip(&lines[2..]) {
        let mut fields = l.split(',');
        let label: i32 = parse_num(fields.next().unwrap_or(""), || format!("{name}:{n}"))?;
        if label != k {
            return Err(Error::parse(
                format!("{name}:{n}"),
                format!("expected chi bin {k}, found {label}"),
            ));
        }
        let row = fields
            .map(|f| parse_num(f, || format!("{name}:{n}")))
            .collect::<Result<Vec<f64>>>()?;
        if row.len() != n_windows {
            return Err(Error::parse(
                format!("{name}:{n}"),
                "row length does not match the window count",
            ));
        }
        by_bin.push(row);
    }
    let mut mass = Vec::with_capacity(n_windows * by_bin.len());
    for w in 0..n_windows {
        mass.extend(by_bin.iter().map(|r| r[w]));
    }
    SampHistogram::from_parts(grid, window_len, chi_bound, meta.range_expanded.unwrap_or(false), mass)
}

fn parse_detect(text: &str, grid: FiltrationGrid, name: &str) -> Result<DetectCurve> {
    let values = data_lines(text)
        .skip(1)
        .map(|(n, l)| {
            let v = l.split(',').nth(1).unwrap_or("");
            parse_num(v, || format!("{name}:{n}"))
        })
        .collect::<Result<Vec<f64>>>()?;
    if values.len() != grid.len() {
        return Err(Error::GridMismatch(format!(
            "{name} has {} points, sidecar says {}",
            values.len(),
            grid.len()
        )));
    }
    Ok(DetectCurve { grid, values })
}

/// Rebuild a descriptor from its CSV body and sidecar.
pub fn parse_descriptor(body: &str, meta: &Sidecar, name: &str) -> Result<Descriptor> {
    let grid = meta.grid()?;
    Ok(match meta.kind {
        DescriptorKind::Ect => {
            let curves = parse_curves(body, grid, name)?;
            let directions = match (meta.mode, meta.seed) {
                (DirectionMode::Fixed, _) => fixed_directions(curves.rows()),
                (DirectionMode::Random, Some(seed)) => random_directions(curves.rows(), seed),
                (DirectionMode::Random, None) => {
                    return Err(Error::parse(name, "random-direction ECT needs its seed"));
                }
            };
            Descriptor::Ect(EctMatrix {
                directions,
                mode: meta.mode,
                seed: meta.seed,
                curves,
            })
        }
        DescriptorKind::Sampeuler => Descriptor::Measure(CurveMeasure {
            seed: meta
                .seed
                .ok_or_else(|| Error::parse(name, "SampEuler sidecar lacks its seed"))?,
            curves: parse_curves(body, grid, name)?,
        }),
        DescriptorKind::Histogram => Descriptor::Histogram(parse_histogram(body, meta, name)?),
        DescriptorKind::Detect => Descriptor::Detect(parse_detect(body, grid, name)?),
    })
}

pub fn read_descriptor(path: &Path) -> Result<Descriptor> {
    let side = sidecar_path(path);
    let meta: Sidecar = serde_json::from_str(&read_text(&side)?)
        .map_err(|e| Error::parse(side.display().to_string(), e.to_string()))?;
    parse_descriptor(&read_text(path)?, &meta, &path.display().to_string())
}

fn check_id(id: &str) -> Result<()> {
    if id.is_empty() || id.contains([',', '\n', '\r', '"']) {
        return Err(Error::param(format!("id {id:?} cannot be written to CSV")));
    }
    Ok(())
}

pub fn format_distance_matrix(m: &DistanceMatrix) -> Result<String> {
    for id in m.ids() {
        check_id(id)?;
    }
    let mut out = m.ids().join(",");
    out.push('\n');
    for i in 0..m.len() {
        let row: Vec<String> = m.row(i).iter().map(|&v| exact(v)).collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    Ok(out)
}

pub fn parse_distance_matrix(text: &str, name: &str) -> Result<DistanceMatrix> {
    let mut lines = data_lines(text);
    let (_, header) = lines
        .next()
        .ok_or_else(|| Error::parse(name, "empty distance matrix"))?;
    let ids: Vec<String> = header.split(',').map(|s| s.trim().to_string()).collect();
    let mut values = Vec::with_capacity(ids.len() * ids.len());
    for (n, l) in lines {
        let before = values.len();
        for f in l.split(',') {
            values.push(parse_num(f, || format!("{name}:{n}"))?);
        }
        if values.len() - before != ids.len() {
            return Err(Error::parse(
                format!("{name}:{n}"),
                "row length does not match the id count",
            ));
        }
    }
    DistanceMatrix::new(ids, values)
}

pub fn read_distance_matrix(path: &Path) -> Result<DistanceMatrix> {
    parse_distance_matrix(&read_text(path)?, &path.display().to_string())
}

pub fn write_distance_matrix(path: &Path, m: &DistanceMatrix) -> Result<()> {
    write_atomic(path, format_distance_matrix(m)?.as_bytes())
}

/// Table with a header row and string cells, as used for labels, depths and
/// count tables.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Table {
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Result<usize> {
        self.header
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::parse("table", format!("missing column {name:?}")))
    }

    pub fn format(&self) -> String {
        let mut out = self.header.join(",");
        out.push('\n');
        for r in &self.rows {
            out.push_str(&r.join(","));
            out.push('\n');
        }
        out
    }

    pub fn parse(text: &str, name: &str) -> Result<Self> {
        let mut lines = data_lines(text);
        let (_, header) = lines.next().ok_or_else(|| Error::parse(name, "empty table"))?;
        let header: Vec<String> = header.split(',').map(|s| s.trim().to_string()).collect();
        let rows = lines
            .map(|(n, l)| {
                let r: Vec<String> = l.split(',').map(|s| s.trim().to_string()).collect();
                if r.len() == header.len() {
                    Ok(r)
                } else {
                    Err(Error::parse(
                        format!("{name}:{n}"),
                        "row length does not match the header",
                    ))
                }
            })
            .collect::<Result<_>>()?;
        Ok(Table { header, rows })
    }

    pub fn read(path: &Path) -> Result<Self> {
        Self::parse(&read_text(path)?, &path.display().to_string())
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        write_atomic(path, self.format().as_bytes())
    }
}

/// `id,x,y,...` rows of an embedding.
pub fn embedding_table(ids: &[String], e: &Embedding) -> Table {
    let dims = e.coords.first().map_or(0, Vec::len);
    let mut header = vec!["id".to_string()];
    header.extend((0..dims).map(|d| ["x", "y", "z"].get(d).map_or(format!("c{d}"), |s| s.to_string())));
    let rows = ids
        .iter()
        .zip(&e.coords)
        .map(|(id, c)| std::iter::once(id.clone()).chain(c.iter().map(|&v| exact(v))).collect())
        .collect();
    Table { header, rows }
}

/// `id,label` rows.
pub fn labels_table(ids: &[String], labels: &[usize]) -> Table {
    let mut t = Table::new(&["id", "label"]);
    for (id, l) in ids.iter().zip(labels) {
        t.push(vec![id.clone(), l.to_string()]);
    }
    t
}

/// `t,energy` rows; missing values are left empty.
pub fn depth_curve_table(c: &DepthKernelCurve) -> Table {
    let mut t = Table::new(&["t", "energy"]);
    for (x, e) in c.t.iter().zip(&c.energy) {
        t.push(vec![exact(*x), e.map(exact).unwrap_or_default()]);
    }
    t
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synth::{random_complex, random_mask};
    use crate::transform::{detect, ect, sampeuler, vectorize};

    #[test]
    fn scx_round_trip() {
        for s in 0..10 {
            let k = random_complex(9, 0.5, 0.5, s).unwrap();
            assert_eq!(parse_scx(&format_scx(&k), "t").unwrap(), k);
        }
    }

    #[test]
    fn scx_rejects_missing_face() {
        let text = "scx 1\ndim 2\nvertices 3\n0 0\n1 0\n0 1\nsimplices 1\n2 0 1 2\n";
        let err = parse_scx(text, "t").unwrap_err().to_string();
        assert!(err.contains("[0, 1, 2]"), "{err}");
    }

    #[test]
    fn scx_rejects_bad_header() {
        assert!(parse_scx("scx 2\n", "t").is_err());
        assert!(parse_scx("scx 1\ndim 3\n", "t").is_err());
        assert!(parse_scx("scx 1\ndim 2\nvertices 2\n0 0\n", "t").is_err());
    }

    #[test]
    fn pgm_round_trip_and_ascii() {
        let m = random_mask(13, 7, 0.4, 1).unwrap();
        assert_eq!(decode_pgm(&encode_pgm(&m), "t").unwrap(), m);
        let p2 = "P2\n# comment\n3 2\n255\n0 255 0\n255 255 0\n";
        let d = decode_pgm(p2.as_bytes(), "t").unwrap();
        assert_eq!(d.bits(), &[false, true, false, true, true, false]);
        assert!(decode_pgm(b"P5\n4 4\n255\n\x00", "t").is_err());
    }

    #[test]
    fn mask_csv_round_trip() {
        let m = random_mask(5, 4, 0.5, 2).unwrap();
        assert_eq!(parse_mask_csv(&format_mask_csv(&m), "t").unwrap(), m);
        assert!(parse_mask_csv("0,1\n1\n", "t").is_err());
    }

    fn round_trip(d: &Descriptor) -> Descriptor {
        let (body, meta) = format_descriptor(d).unwrap();
        parse_descriptor(&body, &serde_json::from_str(&meta).unwrap(), "t").unwrap()
    }

    #[test]
    fn descriptor_round_trips() {
        let k = random_complex(8, 0.5, 0.5, 4).unwrap();
        let grid = FiltrationGrid::covering(&k, 37).unwrap();
        let e = ect(&k, 12, &grid).unwrap();
        let s = sampeuler(&k, 15, &grid, 99).unwrap();
        let h = vectorize(&s, 4, None).unwrap();
        for d in [
            Descriptor::Detect(detect(&e).unwrap()),
            Descriptor::Ect(e),
            Descriptor::Measure(s),
            Descriptor::Histogram(h),
        ] {
            assert_eq!(round_trip(&d), d);
        }
    }

    #[test]
    fn distance_matrix_round_trips_exactly() {
        let pts: Vec<Vec<f64>> = (0..6)
            .map(|i| vec![(i as f64).sqrt(), 1.0 / (i as f64 + 3.0)])
            .collect();
        let ids: Vec<String> = (0..6).map(|i| format!("item{i}")).collect();
        let m = DistanceMatrix::euclidean(ids, &pts).unwrap();
        let back = parse_distance_matrix(&format_distance_matrix(&m).unwrap(), "t").unwrap();
        assert_eq!(back, m);
        let bad = DistanceMatrix::new(vec!["a,b".into()], vec![0.0]).unwrap();
        assert!(format_distance_matrix(&bad).is_err());
    }

    #[test]
    fn atomic_write_replaces() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("x.txt");
        write_atomic(&p, b"one").unwrap();
        write_atomic(&p, b"two").unwrap();
        assert_eq!(fs::read(&p).unwrap(), b"two");
        assert_eq!(fs::read_dir(dir.path()).unwrap().count(), 1);
    }

    #[test]
    fn table_round_trip() {
        let t = labels_table(&["a".into(), "b".into()], &[1, 0]);
        assert_eq!(Table::parse(&t.format(), "t").unwrap(), t);
    }
}
