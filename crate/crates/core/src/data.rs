//! Dataset ingestion from CSV and a synthetic Gaussian-mixture generator.

use std::io::Read;
use std::path::Path;

use rand::seq::index;
use rand::Rng;
use rand_distr::{Distribution, Normal, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::cost::squared_distance;
use crate::error::{invalid, CoresetError, Result};
use crate::rng;
use crate::types::{CenterSet, Dataset};

const LABEL_SUBSAMPLE: u64 = 0x5B;
const LABEL_SYNTH: u64 = 0x5C;

/// Which CSV columns become coordinates.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Columns {
    All,
    /// Header names, or zero-based positions when a name is not in the header.
    Named(Vec<String>),
}

impl Columns {
    /// `None` or an empty string selects every column; otherwise a comma list.
    pub fn parse(spec: Option<&str>) -> Self {
        match spec.map(str::trim) {
            None | Some("") => Columns::All,
            Some(s) => Columns::Named(s.split(',').map(|c| c.trim().to_string()).collect()),
        }
    }

    fn resolve(&self, header: &csv::StringRecord) -> Result<Vec<usize>> {
        match self {
            Columns::All => Ok((0..header.len()).collect()),
            Columns::Named(names) => names
                .iter()
                .map(|name| {
                    if let Some(i) = header.iter().position(|h| h.trim() == name) {
                        return Ok(i);
                    }
                    match name.parse::<usize>() {
                        Ok(i) if i < header.len() => Ok(i),
                        _ => Err(invalid(format!("no column named {name:?}"))),
                    }
                })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LoadOptions {
    pub columns: Columns,
    /// Keep a uniform sample of this many rows, without replacement.
    pub subsample: Option<usize>,
    pub seed: u64,
    /// Rescale every column to zero mean and unit variance.
    pub standardize: bool,
}

impl Default for LoadOptions {
    fn default() -> Self {
        Self { columns: Columns::All, subsample: None, seed: 0, standardize: false }
    }
}

/// Reads a headed CSV; `#` lines are skipped. Point ids are the zero-based
/// data row numbers of the file, so they survive subsampling.
pub fn load_csv(path: &Path, opts: &LoadOptions) -> Result<Dataset> {
    let file = std::fs::File::open(path)?;
    read_csv(file, opts)
}

pub fn read_csv<R: Read>(reader: R, opts: &LoadOptions) -> Result<Dataset> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).comment(Some(b'#')).from_reader(reader);
    let header = rdr
        .headers()
        .map_err(|e| CoresetError::Csv { row: 0, message: e.to_string() })?
        .clone();
    let cols = opts.columns.resolve(&header)?;
    if cols.is_empty() {
        return Err(invalid("no columns selected"));
    }
    let mut coords = Vec::new();
    let mut n = 0usize;
    for (i, rec) in rdr.records().enumerate() {
        let row = i + 1;
        let rec = rec.map_err(|e| CoresetError::Csv { row, message: e.to_string() })?;
        for &c in &cols {
            let cell = rec.get(c).unwrap_or("").trim();
            let v: f64 = cell.parse().map_err(|_| CoresetError::Csv {
                row,
                message: format!("column {:?} has non-numeric value {cell:?}", &header[c]),
            })?;
            if !v.is_finite() {
                return Err(CoresetError::Csv { row, message: format!("column {:?} is not finite", &header[c]) });
            }
            coords.push(v);
        }
        n += 1;
    }
    let dim = cols.len();
    let mut ids: Vec<u64> = (0..n as u64).collect();
    if let Some(size) = opts.subsample {
        if size < n {
            let mut r = rng::stream(opts.seed, &[LABEL_SUBSAMPLE]);
            let mut keep = index::sample(&mut r, n, size).into_vec();
            keep.sort_unstable();
            coords = keep.iter().flat_map(|&i| coords[i * dim..(i + 1) * dim].to_vec()).collect();
            ids = keep.iter().map(|&i| i as u64).collect();
        }
    }
    if opts.standardize {
        standardize(&mut coords, dim);
    }
    let weights = vec![1.0; ids.len()];
    Dataset::new(dim, coords, weights, ids)
}

/// Zero mean, unit variance per column; constant columns are only centered.
fn standardize(coords: &mut [f64], dim: usize) {
    let n = coords.len() / dim;
    if n == 0 {
        return;
    }
    for j in 0..dim {
        let mean = coords.iter().skip(j).step_by(dim).sum::<f64>() / n as f64;
        let var = coords.iter().skip(j).step_by(dim).map(|v| (v - mean).powi(2)).sum::<f64>() / n as f64;
        let sd = var.sqrt();
        for v in coords.iter_mut().skip(j).step_by(dim) {
            *v -= mean;
            if sd > 0.0 {
                *v /= sd;
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthSpec {
    pub clusters: usize,
    pub per_cluster: usize,
    pub dim: usize,
    /// Minimum distance between cluster means.
    pub separation: f64,
    /// Standard deviation of every coordinate around its mean.
    pub spread: f64,
    pub outliers: usize,
    /// Lower bound on the distance of outliers from the inlier centroid.
    pub outlier_distance: f64,
    pub seed: u64,
}

impl SynthSpec {
    pub fn new(clusters: usize, per_cluster: usize, dim: usize, outliers: usize, seed: u64) -> Self {
        Self { clusters, per_cluster, dim, separation: 20.0, spread: 1.0, outliers, outlier_distance: 0.0, seed }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SynthData {
    pub dataset: Dataset,
    /// Means of the mixture components.
    pub centers: CenterSet,
    /// Rows holding the planted outliers (the last `outliers` rows).
    pub outlier_rows: Vec<usize>,
}

/// Gaussian mixture plus far outliers.
///
/// Cluster means are drawn uniformly in a cube and rejected until they are
/// `separation` apart. Outliers are placed in uniformly random directions from
/// the inlier centroid, at a radius in `[r, 2r]` with
/// `r = max(outlier_distance, 10 * max inlier distance from the centroid)`.
pub fn synth(spec: &SynthSpec) -> Result<SynthData> {
    if spec.clusters == 0 || spec.per_cluster == 0 || spec.dim == 0 {
        return Err(invalid("clusters, points per cluster and dimension must be positive"));
    }
    if !(spec.separation >= 0.0 && spec.spread >= 0.0 && spec.outlier_distance >= 0.0) {
        return Err(invalid("separation, spread and outlier distance must be nonnegative"));
    }
    let d = spec.dim;
    let mut rng = rng::stream(spec.seed, &[LABEL_SYNTH]);
    let side = spec.separation * (spec.clusters as f64).max(2.0);
    let mut means: Vec<Vec<f64>> = Vec::with_capacity(spec.clusters);
    for j in 0..spec.clusters {
        let mut placed = None;
        for _ in 0..10_000 {
            let c: Vec<f64> = (0..d).map(|_| rng.random_range(0.0..=side)).collect();
            if means.iter().all(|m| squared_distance(m, &c).sqrt() >= spec.separation) {
                placed = Some(c);
                break;
            }
        }
        // Fall back to a line, which always has room.
        let c = placed.unwrap_or_else(|| {
            let mut c = vec![0.0; d];
            c[0] = side + spec.separation * (j + 1) as f64;
            c
        });
        means.push(c);
    }
    let noise = Normal::new(0.0, spec.spread).map_err(|e| invalid(e.to_string()))?;
    let mut coords = Vec::with_capacity((spec.clusters * spec.per_cluster + spec.outliers) * d);
    for m in &means {
        for _ in 0..spec.per_cluster {
            coords.extend(m.iter().map(|&v| v + noise.sample(&mut rng)));
        }
    }
    let inliers = spec.clusters * spec.per_cluster;
    let mut centroid = vec![0.0; d];
    for p in coords.chunks(d) {
        for (c, v) in centroid.iter_mut().zip(p) {
            *c += v / inliers as f64;
        }
    }
    let r_max = coords.chunks(d).map(|p| squared_distance(p, &centroid).sqrt()).fold(0.0, f64::max);
    let radius = spec.outlier_distance.max(10.0 * r_max).max(f64::MIN_POSITIVE);
    for _ in 0..spec.outliers {
        let dir = loop {
            let v: Vec<f64> = (0..d).map(|_| StandardNormal.sample(&mut rng)).collect();
            let len = v.iter().map(|x: &f64| x * x).sum::<f64>().sqrt();
            if len > 1e-12 {
                break v.into_iter().map(|x| x / len).collect::<Vec<_>>();
            }
        };
        let r = radius * rng.random_range(1.0..=2.0);
        coords.extend(centroid.iter().zip(&dir).map(|(c, u)| c + r * u));
    }
    let dataset = Dataset::unweighted(d, coords)?;
    let centers = CenterSet::from_rows(&means)?;
    Ok(SynthData { dataset, centers, outlier_rows: (inliers..inliers + spec.outliers).collect() })
}
