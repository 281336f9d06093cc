//! WebAssembly bindings for the browser demo. Every method takes and returns
//! plain values or JSON strings so the page needs no extra tooling.

use robust_coreset::data::{synth, SynthSpec};
use robust_coreset::eval::{suggest_outlier_count, Method};
use robust_coreset::{build_coreset, robust_cost, CenterSet, CoresetParams, Dataset, WeightedCoreset};
use serde::Serialize;
use wasm_bindgen::prelude::*;

/// Share of the sorted distance curve returned by [`Demo::suggest`].
const CURVE_SHARE: f64 = 0.2;

#[derive(Serialize)]
struct PointsView {
    points: Vec<[f64; 2]>,
    planted_outliers: Vec<usize>,
}

#[derive(Serialize)]
struct CoresetView {
    rows: Vec<usize>,
    weights: Vec<f64>,
    provenance: Vec<&'static str>,
}

impl CoresetView {
    fn of(s: &WeightedCoreset) -> Self {
        Self {
            rows: s.source_rows.clone(),
            weights: s.points.weights().to_vec(),
            provenance: s.provenance.iter().map(|p| p.as_str()).collect(),
        }
    }
}

#[derive(Serialize)]
struct BuildView {
    ours: CoresetView,
    uniform: CoresetView,
    rings: usize,
    groups: usize,
    outliers_kept: usize,
}

#[derive(Serialize)]
struct CostView {
    full: f64,
    ours: f64,
    uniform: f64,
    ours_error: f64,
    uniform_error: f64,
}

#[derive(Serialize)]
struct SuggestView {
    m: usize,
    ratio: f64,
    distances: Vec<f64>,
}

/// A 2-D dataset with its current pair of coresets.
#[wasm_bindgen]
pub struct Demo {
    data: Dataset,
    planted: Vec<usize>,
    built: Option<(WeightedCoreset, WeightedCoreset, f64, usize)>,
}

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

fn relative_error(full: f64, approx: f64) -> f64 {
    if full > 0.0 {
        (approx - full).abs() / full
    } else if approx == 0.0 {
        0.0
    } else {
        f64::INFINITY
    }
}

#[wasm_bindgen]
impl Demo {
    /// Gaussian clusters in the plane with far outliers appended.
    #[wasm_bindgen(constructor)]
    pub fn new(clusters: usize, per_cluster: usize, outliers: usize, seed: u64) -> Result<Demo, String> {
        let mut spec = SynthSpec::new(clusters, per_cluster, 2, outliers, seed);
        spec.spread = 2.0;
        let s = synth(&spec).map_err(err)?;
        Ok(Demo { data: s.dataset, planted: s.outlier_rows, built: None })
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    /// `{"points": [[x, y], ...], "planted_outliers": [row, ...]}`.
    pub fn points(&self) -> String {
        let view = PointsView {
            points: self.data.points().map(|p| [p[0], p[1]]).collect(),
            planted_outliers: self.planted.clone(),
        };
        serde_json::to_string(&view).expect("serializable")
    }

    /// Builds our coreset and a uniform sample of the same size.
    pub fn build(&mut self, k: usize, z: f64, m: usize, size: usize, seed: u64) -> Result<String, String> {
        let params = CoresetParams::new(k, z, m, size).with_seed(seed);
        let (ours, report) = build_coreset(&self.data, &params).map_err(err)?;
        let uniform = Method::Us.build(&self.data, &params).map_err(err)?;
        let view = BuildView {
            ours: CoresetView::of(&ours),
            uniform: CoresetView::of(&uniform),
            rings: report.rings,
            groups: report.groups,
            outliers_kept: report.outliers_kept,
        };
        self.built = Some((ours, uniform, z, m));
        Ok(serde_json::to_string(&view).expect("serializable"))
    }

    /// Robust cost of `[[x, y], ...]` on the data and on both coresets.
    pub fn costs(&self, centers_json: &str) -> Result<String, String> {
        let (ours, uniform, z, m) = self.built.as_ref().ok_or("build the coresets first")?;
        let rows: Vec<Vec<f64>> = serde_json::from_str(centers_json).map_err(err)?;
        let centers = CenterSet::from_rows(&rows).map_err(err)?;
        let cost = |x: &Dataset| robust_cost(x, &centers, *z, *m as f64).map(|r| r.cost).map_err(err);
        let full = cost(&self.data)?;
        let (o, u) = (cost(&ours.points)?, cost(&uniform.points)?);
        let view = CostView { full, ours: o, uniform: u, ours_error: relative_error(full, o), uniform_error: relative_error(full, u) };
        Ok(serde_json::to_string(&view).expect("serializable"))
    }

    /// Suggested number of outliers and the largest distances to the centers.
    pub fn suggest(&self, k: usize, seed: u64) -> Result<String, String> {
        let s = suggest_outlier_count(&self.data, k, seed).map_err(err)?;
        let keep = ((s.curve.len() as f64 * CURVE_SHARE).ceil() as usize).max(s.m + 1).min(s.curve.len());
        let view = SuggestView { m: s.m, ratio: s.ratio, distances: s.curve[..keep].iter().map(|p| p.distance).collect() };
        Ok(serde_json::to_string(&view).expect("serializable"))
    }
}
