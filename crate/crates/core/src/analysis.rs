//! Statistics on distance matrices: embedding, clustering, evaluation,
//! depth-weighted energy curves and enrichment ratios.

use nalgebra::{DMatrix, SymmetricEigen};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metric::{energy_distance, pair_seed, DistanceMatrix};

/// Low-dimensional coordinates from classical MDS.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Embedding {
    pub coords: Vec<Vec<f64>>,
    /// Eigenvalues of the kept axes, before clamping.
    pub eigenvalues: Vec<f64>,
    /// Frobenius norm of the gap between input and embedded distances.
    pub stress: f64,
}

/// Classical (Torgerson) multidimensional scaling.
///
/// Eigenvector signs are fixed so the largest-magnitude entry of each axis
/// is positive, which makes the output deterministic.
pub fn mds(m: &DistanceMatrix, dims: usize) -> Result<Embedding> {
    let n = m.len();
    if dims == 0 || n < dims + 1 {
        return Err(Error::param(format!(
            "MDS into {dims} dimensions needs at least {} items, got {n}",
            dims + 1
        )));
    }
    let sq = DMatrix::from_fn(n, n, |i, j| m.get(i, j) * m.get(i, j));
    let row_means: Vec<f64> = (0..n).map(|i| sq.row(i).mean()).collect();
    let grand = row_means.iter().sum::<f64>() / n as f64;
    let b = DMatrix::from_fn(n, n, |i, j| -0.5 * (sq[(i, j)] - row_means[i] - row_means[j] + grand));
    let eig = SymmetricEigen::new(b);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| eig.eigenvalues[y].total_cmp(&eig.eigenvalues[x]));
    let mut coords = vec![vec![0.0; dims]; n];
    let mut eigenvalues = Vec::with_capacity(dims);
    for (d, &axis) in order.iter().take(dims).enumerate() {
        let lambda = eig.eigenvalues[axis];
        eigenvalues.push(lambda);
        let v = eig.eigenvectors.column(axis);
        let pivot = (0..n).max_by(|&x, &y| v[x].abs().total_cmp(&v[y].abs())).unwrap_or(0);
        let sign = if v[pivot] < 0.0 { -1.0 } else { 1.0 };
        let scale = lambda.max(0.0).sqrt() * sign;
        for i in 0..n {
            coords[i][d] = v[i] * scale;
        }
    }
    let mut gap = 0.0;
    for i in 0..n {
        for j in 0..n {
            let e: f64 = coords[i]
                .iter()
                .zip(&coords[j])
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>()
                .sqrt();
            gap += (m.get(i, j) - e).powi(2);
        }
    }
    Ok(Embedding {
        coords,
        eigenvalues,
        stress: gap.sqrt(),
    })
}

/// Result of k-medoids.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Clustering {
    /// Cluster of each item; cluster `c` has medoid `medoids[c]`.
    pub labels: Vec<usize>,
    /// Medoid item indices, ascending.
    pub medoids: Vec<usize>,
    /// Sum of distances from each item to its medoid.
    pub cost: f64,
    /// Cost after BUILD and after each accepted swap.
    pub cost_history: Vec<f64>,
}

fn assign(m: &DistanceMatrix, medoids: &[usize]) -> (Vec<usize>, f64) {
    let mut cost = 0.0;
    let labels = (0..m.len())
        .map(|i| {
            if let Some(c) = medoids.iter().position(|&md| md == i) {
                return c;
            }
            let (c, d) = medoids
                .iter()
                .enumerate()
                .map(|(c, &md)| (c, m.get(i, md)))
                .fold((0, f64::INFINITY), |best, cur| if cur.1 < best.1 { cur } else { best });
            cost += d;
            c
        })
        .collect();
    (labels, cost)
}

/// Nearest and second-nearest medoid distance per item, plus the nearest slot.
fn nearest_two(m: &DistanceMatrix, medoids: &[usize]) -> Vec<(usize, f64, f64)> {
    (0..m.len())
        .map(|i| {
            let mut best = (usize::MAX, f64::INFINITY, f64::INFINITY);
            for (slot, &md) in medoids.iter().enumerate() {
                let d = m.get(i, md);
                if d < best.1 {
                    best = (slot, d, best.1);
                } else if d < best.2 {
                    best.2 = d;
                }
            }
            best
        })
        .collect()
}

/// Partitioning around medoids: greedy BUILD, then best-improvement SWAP
/// until no swap lowers the cost or `max_iter` swaps were made.
///
/// Candidates are visited in a seeded random order and only strict
/// improvements are accepted, so the seed decides between equal-cost moves.
pub fn kmedoids(m: &DistanceMatrix, k: usize, seed: u64, max_iter: usize) -> Result<Clustering> {
    let n = m.len();
    if k == 0 || k > n {
        return Err(Error::param(format!("k must lie in 1..={n}, got {k}")));
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let improves = |new: f64, old: f64| new < old - 1e-12 * old.abs().max(1.0);

    let mut medoids: Vec<usize> = Vec::with_capacity(k);
    let mut near = vec![f64::INFINITY; n];
    for _ in 0..k {
        let mut best: Option<(usize, f64)> = None;
        for &c in order.iter().filter(|c| !medoids.contains(c)) {
            let total: f64 = (0..n).map(|i| near[i].min(m.get(i, c))).sum();
            if best.is_none_or(|(_, b)| improves(total, b)) {
                best = Some((c, total));
            }
        }
        let (c, _) = best.expect("k <= n leaves a candidate");
        medoids.push(c);
        for (i, d) in near.iter_mut().enumerate() {
            *d = d.min(m.get(i, c));
        }
    }
    let mut cost: f64 = near.iter().sum();
    let mut cost_history = vec![cost];

    for _ in 0..max_iter {
        let nt = nearest_two(m, &medoids);
        let mut best: Option<(usize, usize, f64)> = None;
        for &h in order.iter().filter(|h| !medoids.contains(h)) {
            for slot in 0..k {
                let delta: f64 = (0..n)
                    .map(|o| {
                        let (ns, d1, d2) = nt[o];
                        let dh = m.get(o, h);
                        if ns == slot {
                            dh.min(d2) - d1
                        } else {
                            (dh - d1).min(0.0)
                        }
                    })
                    .sum();
                if best.is_none_or(|(_, _, b)| delta < b) {
                    best = Some((slot, h, delta));
                }
            }
        }
        match best {
            Some((slot, h, delta)) if improves(cost + delta, cost) => {
                medoids[slot] = h;
                let recomputed: f64 = nearest_two(m, &medoids).iter().map(|t| t.1).sum();
                debug_assert!(recomputed <= cost + 1e-9);
                cost = recomputed;
                cost_history.push(cost);
            }
            _ => break,
        }
    }
    medoids.sort_unstable();
    let (labels, cost) = assign(m, &medoids);
    Ok(Clustering {
        labels,
        medoids,
        cost,
        cost_history,
    })
}

/// Silhouette scores of a labelling.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Silhouette {
    pub mean: f64,
    pub scores: Vec<f64>,
}

/// Per-item silhouette `(b - a) / max(a, b)`; members of singleton clusters
/// score 0.
pub fn silhouette(m: &DistanceMatrix, labels: &[usize]) -> Result<Silhouette> {
    let n = m.len();
    if labels.len() != n {
        return Err(Error::param("one label per item is required"));
    }
    let mut clusters: Vec<usize> = labels.to_vec();
    clusters.sort_unstable();
    clusters.dedup();
    if clusters.len() < 2 {
        return Err(Error::param("silhouette needs at least two clusters"));
    }
    let size = |c: usize| labels.iter().filter(|&&l| l == c).count();
    let scores: Vec<f64> = (0..n)
        .map(|i| {
            let own = labels[i];
            let own_size = size(own);
            if own_size == 1 {
                return 0.0;
            }
            let mean_to = |c: usize, count: usize| -> f64 {
                (0..n).filter(|&j| labels[j] == c).map(|j| m.get(i, j)).sum::<f64>() / count as f64
            };
            let a = mean_to(own, own_size - 1);
            let b = clusters
                .iter()
                .filter(|&&c| c != own)
                .map(|&c| mean_to(c, size(c)))
                .fold(f64::INFINITY, f64::min);
            let denom = a.max(b);
            if denom > 0.0 {
                (b - a) / denom
            } else {
                0.0
            }
        })
        .collect();
    Ok(Silhouette {
        mean: scores.iter().sum::<f64>() / n as f64,
        scores,
    })
}

/// Mean silhouette of the k-medoids clustering for each `k` in `ks` below `n`.
pub fn silhouette_sweep(
    m: &DistanceMatrix,
    ks: impl IntoIterator<Item = usize>,
    seed: u64,
) -> Result<Vec<(usize, f64)>> {
    ks.into_iter()
        .filter(|&k| k >= 2 && k < m.len())
        .map(|k| {
            let c = kmedoids(m, k, seed, 100)?;
            Ok((k, silhouette(m, &c.labels)?.mean))
        })
        .collect()
}

/// How k-NN accuracy is estimated.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Protocol {
    LeaveOneOut,
    /// Stratified random train/test splits.
    Split {
        train_fraction: f64,
        reps: usize,
        seed: u64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KnnReport {
    pub mean: f64,
    /// Sample standard deviation over repetitions; 0 for a single run.
    pub sd: f64,
    pub accuracies: Vec<f64>,
    pub warnings: Vec<String>,
}

/// k-NN vote for item `q` among `train`: nearest first with index order on
/// distance ties; a tied vote goes to the class seen first.
fn knn_predict(m: &DistanceMatrix, labels: &[usize], train: &[usize], q: usize, k: usize) -> usize {
    let mut cand: Vec<usize> = train.iter().copied().filter(|&t| t != q).collect();
    cand.sort_by(|&a, &b| m.get(q, a).total_cmp(&m.get(q, b)).then(a.cmp(&b)));
    let mut votes: Vec<(usize, usize)> = Vec::new();
    for &c in cand.iter().take(k) {
        match votes.iter_mut().find(|v| v.0 == labels[c]) {
            Some(v) => v.1 += 1,
            None => votes.push((labels[c], 1)),
        }
    }
    votes
        .iter()
        .fold((usize::MAX, 0), |best, &v| if v.1 > best.1 { v } else { best })
        .0
}

fn accuracy(m: &DistanceMatrix, labels: &[usize], train: &[usize], test: &[usize], k: usize) -> f64 {
    let hits = test
        .iter()
        .filter(|&&q| knn_predict(m, labels, train, q, k) == labels[q])
        .count();
    hits as f64 / test.len() as f64
}

/// Distance-based k-nearest-neighbour classification accuracy.
pub fn knn_eval(m: &DistanceMatrix, labels: &[usize], k: usize, protocol: Protocol) -> Result<KnnReport> {
    let n = m.len();
    if labels.len() != n {
        return Err(Error::param("one label per item is required"));
    }
    if k == 0 {
        return Err(Error::param("k must be at least 1"));
    }
    let mut classes: Vec<usize> = labels.to_vec();
    classes.sort_unstable();
    classes.dedup();
    if classes.len() < 2 {
        return Err(Error::param("k-NN evaluation needs at least two classes"));
    }
    let members = |c: usize| (0..n).filter(|&i| labels[i] == c).collect::<Vec<_>>();
    let mut warnings = Vec::new();
    let accuracies = match protocol {
        Protocol::LeaveOneOut => {
            for &c in &classes {
                if members(c).len() < 2 {
                    warnings.push(format!(
                        "class {c} has a single member; it can never be predicted correctly"
                    ));
                }
            }
            let all: Vec<usize> = (0..n).collect();
            vec![accuracy(m, labels, &all, &all, k)]
        }
        Protocol::Split {
            train_fraction,
            reps,
            seed,
        } => {
            if !(train_fraction > 0.0 && train_fraction < 1.0) || reps == 0 {
                return Err(Error::param(
                    "split needs a train fraction in (0,1) and at least one repetition",
                ));
            }
            let groups: Vec<Vec<usize>> = classes.iter().map(|&c| members(c)).collect();
            if groups.iter().any(|g| g.len() < 2) {
                return Err(Error::param("every class needs two members for a stratified split"));
            }
            (0..reps)
                .into_par_iter()
                .map(|r| {
                    let mut rng = ChaCha8Rng::seed_from_u64(pair_seed(seed, r, 0));
                    let (mut train, mut test) = (Vec::new(), Vec::new());
                    for g in &groups {
                        let mut g = g.clone();
                        g.shuffle(&mut rng);
                        let cut = ((g.len() as f64 * train_fraction).round() as usize).clamp(1, g.len() - 1);
                        train.extend_from_slice(&g[..cut]);
                        test.extend_from_slice(&g[cut..]);
                    }
                    accuracy(m, labels, &train, &test, k)
                })
                .collect()
        }
    };
    let (mean, sd) = mean_sd(&accuracies);
    Ok(KnnReport {
        mean,
        sd,
        accuracies,
        warnings,
    })
}

fn mean_sd(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

/// Default bandwidth of the depth kernel.
pub const DEFAULT_BANDWIDTH: f64 = 0.1;

/// `points` evenly spaced depths on `[0, 1]`, 51 by default.
pub fn depth_grid(points: usize) -> Vec<f64> {
    match points {
        0 => Vec::new(),
        1 => vec![0.0],
        _ => (0..points).map(|i| i as f64 / (points - 1) as f64).collect(),
    }
}

/// Energy distance between two groups as a function of depth.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DepthKernelCurve {
    pub t: Vec<f64>,
    pub h: f64,
    /// Normalized kernel weights of the first group at each `t`.
    pub weights_a: Vec<Vec<f64>>,
    pub weights_b: Vec<Vec<f64>>,
    /// `None` where a group carries no weight.
    pub energy: Vec<Option<f64>>,
}

fn kernel_weights(depths: &[f64], in_group: impl Fn(usize) -> bool, t: f64, h: f64) -> Option<Vec<f64>> {
    let raw: Vec<f64> = depths
        .iter()
        .enumerate()
        .map(|(i, &d)| {
            if in_group(i) {
                (-0.5 * ((d - t) / h).powi(2)).exp()
            } else {
                0.0
            }
        })
        .collect();
    let total: f64 = raw.iter().sum();
    (total > 0.0 && total.is_finite()).then(|| raw.iter().map(|w| w / total).collect())
}

/// Gaussian depth-kernel weights per group, normalized within each group,
/// and the weighted energy distance between the groups at each `t`.
///
/// `group_a[i]` tells whether item `i` belongs to the first group; all
/// other items form the second.
pub fn depth_energy_curve(
    m: &DistanceMatrix,
    depths: &[f64],
    group_a: &[bool],
    h: f64,
    t_grid: &[f64],
) -> Result<DepthKernelCurve> {
    let n = m.len();
    if depths.len() != n || group_a.len() != n {
        return Err(Error::param("one depth and one group flag per item are required"));
    }
    if depths.iter().any(|d| !(0.0..=1.0).contains(d)) {
        return Err(Error::param("depths must lie in [0, 1]"));
    }
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::param("bandwidth must be positive"));
    }
    let mut curve = DepthKernelCurve {
        t: t_grid.to_vec(),
        h,
        weights_a: Vec::with_capacity(t_grid.len()),
        weights_b: Vec::with_capacity(t_grid.len()),
        energy: Vec::with_capacity(t_grid.len()),
    };
    for &t in t_grid {
        let wa = kernel_weights(depths, |i| group_a[i], t, h);
        let wb = kernel_weights(depths, |i| !group_a[i], t, h);
        let e = match (&wa, &wb) {
            (Some(a), Some(b)) => Some(energy_distance(m, a, b)?),
            _ => None,
        };
        curve.weights_a.push(wa.unwrap_or_else(|| vec![0.0; n]));
        curve.weights_b.push(wb.unwrap_or_else(|| vec![0.0; n]));
        curve.energy.push(e);
    }
    Ok(curve)
}

/// Smoothed cell-type ratios relative to a young-cohort baseline.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnrichmentTable {
    pub alpha: f64,
    /// Quadrant × type counts.
    pub counts: Vec<Vec<f64>>,
    /// Smoothed per-quadrant ratios `r[q][j]`.
    pub smoothed: Vec<Vec<f64>>,
    /// Smoothed pooled ratio per type over the young quadrants.
    pub baseline: Vec<f64>,
    /// `smoothed[q][j] / baseline[j]`.
    pub ratios: Vec<Vec<f64>>,
}

fn smooth(counts: &[f64], alpha: f64) -> Vec<f64> {
    let denom = counts.iter().sum::<f64>() + alpha * counts.len() as f64;
    counts.iter().map(|c| (c + alpha) / denom).collect()
}

/// Dirichlet-smoothed enrichment ratios.
///
/// `counts[q][j]` is the number of type-`j` cells in quadrant `q`; `young`
/// lists the quadrants pooled into the baseline.
pub fn enrichment(counts: &[Vec<f64>], young: &[usize], alpha: f64) -> Result<EnrichmentTable> {
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(Error::param(format!(
            "smoothing constant must be positive, got {alpha}"
        )));
    }
    let types = counts.first().map_or(0, Vec::len);
    if types == 0 || counts.iter().any(|r| r.len() != types) {
        return Err(Error::param("counts must be a nonempty rectangular table"));
    }
    if counts.iter().flatten().any(|c| !(c.is_finite() && *c >= 0.0)) {
        return Err(Error::param("counts must be finite and nonnegative"));
    }
    if young.is_empty() || young.iter().any(|&q| q >= counts.len()) {
        return Err(Error::param("young quadrants must be a nonempty set of valid rows"));
    }
    let mut pooled = vec![0.0; types];
    for &q in young {
        for (p, c) in pooled.iter_mut().zip(&counts[q]) {
            *p += c;
        }
    }
    let baseline = smooth(&pooled, alpha);
    let smoothed: Vec<Vec<f64>> = counts.iter().map(|r| smooth(r, alpha)).collect();
    let ratios = smoothed
        .iter()
        .map(|r| r.iter().zip(&baseline).map(|(a, b)| a / b).collect())
        .collect();
    Ok(EnrichmentTable {
        alpha,
        counts: counts.to_vec(),
        smoothed,
        baseline,
        ratios,
    })
}

/// Best relabelling of one clustering onto another.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusterMatch {
    /// `perm[b]` is the label of the first clustering matched to label `b`.
    pub perm: Vec<usize>,
    pub agreement: usize,
    /// `confusion[i][j]`: share of items relabelled to `j` whose first label is `i`.
    pub confusion: Vec<Vec<f64>>,
}

/// Largest clustering size handled by exhaustive matching.
pub const MAX_MATCH_CLUSTERS: usize = 8;

fn permutations(k: usize) -> Vec<Vec<usize>> {
    fn rec(prefix: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        if prefix.len() == used.len() {
            out.push(prefix.clone());
            return;
        }
        for v in 0..used.len() {
            if !used[v] {
                used[v] = true;
                prefix.push(v);
                rec(prefix, used, out);
                prefix.pop();
                used[v] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::with_capacity(k), &mut vec![false; k], &mut out);
    out
}

/// Relabel `b` by the permutation maximizing agreement with `a`, then
/// report the column-normalized confusion matrix.
pub fn match_clusterings(a: &[usize], b: &[usize], k: usize) -> Result<ClusterMatch> {
    if a.len() != b.len() {
        return Err(Error::param("clusterings must cover the same items"));
    }
    if k == 0 || k > MAX_MATCH_CLUSTERS {
        return Err(Error::param(format!(
            "exhaustive matching supports 1..={MAX_MATCH_CLUSTERS} clusters, got {k}"
        )));
    }
    if a.iter().chain(b).any(|&l| l >= k) {
        return Err(Error::param(format!("labels must lie in 0..{k}")));
    }
    let mut joint = vec![vec![0usize; k]; k];
    for (&x, &y) in a.iter().zip(b) {
        joint[x][y] += 1;
    }
    let (perm, agreement) = permutations(k)
        .into_iter()
        .map(|p| {
            let score = (0..k).map(|y| joint[p[y]][y]).sum::<usize>();
            (p, score)
        })
        .fold((Vec::new(), 0), |best, cur| {
            if best.0.is_empty() || cur.1 > best.1 {
                cur
            } else {
                best
            }
        });
    let mut confusion = vec![vec![0.0; k]; k];
    for y in 0..k {
        let col_total: usize = (0..k).map(|x| joint[x][y]).sum();
        if col_total > 0 {
            for x in 0..k {
                confusion[x][perm[y]] = joint[x][y] as f64 / col_total as f64;
            }
        }
    }
    Ok(ClusterMatch {
        perm,
        agreement,
        confusion,
    })
}
