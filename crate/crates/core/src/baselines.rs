//! Comparison constructions: uniform sampling (US), outlier-aware uniform
//! sampling (OAUS) and sensitivity sampling (SS).
//!
//! SS here is the usual practical recipe (sensitivity upper bounds from an
//! approximate solution, i.i.d. importance sampling) rather than an
//! exponential-size construction.

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::seq::index;

use crate::approx::find_outliers;
use crate::coreset::{approx_and_outliers, CoresetParams, Provenance, WeightedCoreset};
use crate::cost::{nearest_squared, powered_from_squared};
use crate::error::{invalid, Result};
use crate::rng::{self, LABEL_SAMPLE};
use crate::types::Dataset;

/// Uniform sample of rows without replacement, weighted to carry `mass` in total.
fn uniform_rows(rows: &[usize], size: usize, mass: f64, seed: u64) -> Vec<(usize, f64, Provenance)> {
    let mut rng = rng::stream(seed, &[LABEL_SAMPLE]);
    let mut picked = index::sample(&mut rng, rows.len(), size).into_vec();
    picked.sort_unstable();
    let w = mass / size as f64;
    picked.into_iter().map(|i| (rows[i], w, Provenance::Sample)).collect()
}

/// US: `N` points uniformly without replacement, each of weight `w(X) / N`.
pub fn uniform_sampling_coreset(data: &Dataset, target_size: usize, seed: u64) -> Result<WeightedCoreset> {
    let n = data.len();
    if target_size == 0 || target_size > n {
        return Err(invalid(format!("sample size must lie in [1, {n}], got {target_size}")));
    }
    let rows: Vec<usize> = (0..n).collect();
    let entries = uniform_rows(&rows, target_size, data.total_weight(), seed);
    WeightedCoreset::from_entries(data, &entries)
}

/// OAUS: the same `m` outliers as the main construction, plus a uniform sample
/// of `N - m` of the remaining points carrying the remaining weight.
pub fn outlier_aware_uniform(data: &Dataset, params: &CoresetParams) -> Result<WeightedCoreset> {
    let n = data.len();
    if params.target_size <= params.m {
        return Err(invalid(format!(
            "target size {} must exceed m={}",
            params.target_size, params.m
        )));
    }
    let (_, _, outliers) = approx_and_outliers(data, params)?;
    let mut is_outlier = vec![false; n];
    for &r in &outliers {
        is_outlier[r] = true;
    }
    let rest: Vec<usize> = (0..n).filter(|&r| !is_outlier[r]).collect();
    let mut entries: Vec<(usize, f64, Provenance)> =
        outliers.iter().map(|&r| (r, data.weight(r), Provenance::Outlier)).collect();
    let budget = params.target_size - outliers.len();
    if budget > rest.len() {
        return Err(invalid(format!(
            "target size {} exceeds the number of points {n}",
            params.target_size
        )));
    }
    if budget > 0 && !rest.is_empty() {
        let mass: f64 = rest.iter().map(|&r| data.weight(r)).sum();
        entries.extend(uniform_rows(&rest, budget, mass, params.seed));
    }
    WeightedCoreset::from_entries(data, &entries)
}

/// Sensitivity upper bounds from an approximate solution: outliers of the
/// approximation get 1, every other point `w dist^z / cost + w / w(cluster)`.
///
/// Returns `None` when the approximation has zero cost.
pub fn sensitivities(data: &Dataset, params: &CoresetParams) -> Result<Option<Vec<f64>>> {
    let approx = crate::approx::tri_criteria_approx(
        data,
        params.k,
        params.z,
        params.m as f64,
        params.beta,
        params.gamma,
        params.seed,
    )?;
    if !(approx.achieved_cost > 0.0) {
        return Ok(None);
    }
    let outliers = find_outliers(data, &approx.centers, approx.trimmed_mass)?;
    let mut is_outlier = vec![false; data.len()];
    for o in &outliers {
        is_outlier[o.row] = true;
    }
    let mut cluster = Vec::with_capacity(data.len());
    let mut powered = Vec::with_capacity(data.len());
    let mut cluster_mass = vec![0.0; approx.centers.len()];
    for (r, p) in data.points().enumerate() {
        let (i, sq) = nearest_squared(p, &approx.centers);
        cluster.push(i);
        powered.push(powered_from_squared(sq, params.z));
        if !is_outlier[r] {
            cluster_mass[i] += data.weight(r);
        }
    }
    let sigma = (0..data.len())
        .map(|r| {
            if is_outlier[r] {
                1.0
            } else {
                let w = data.weight(r);
                w * powered[r] / approx.achieved_cost + w / cluster_mass[cluster[r]]
            }
        })
        .collect();
    Ok(Some(sigma))
}

/// SS: `N` i.i.d. draws with probability proportional to sensitivity, each
/// weighted `w(x) / (N p(x))`. Repeated draws of a point are merged, so the
/// result can have fewer than `N` points. Total weight is preserved in
/// expectation. Falls back to US when the approximation has zero cost.
pub fn sensitivity_sampling_coreset(data: &Dataset, params: &CoresetParams) -> Result<WeightedCoreset> {
    let n = data.len();
    let size = params.target_size;
    if size == 0 {
        return Err(invalid("sample size must be at least 1"));
    }
    let Some(sigma) = sensitivities(data, params)? else {
        return uniform_sampling_coreset(data, size.min(n), params.seed);
    };
    let total: f64 = sigma.iter().sum();
    let dist = WeightedIndex::new(&sigma).map_err(|e| invalid(format!("bad sensitivities: {e}")))?;
    let mut rng = rng::stream(params.seed, &[LABEL_SAMPLE]);
    let mut weight = vec![0.0; n];
    for _ in 0..size {
        let r = dist.sample(&mut rng);
        let p = sigma[r] / total;
        weight[r] += data.weight(r) / (size as f64 * p);
    }
    let entries: Vec<(usize, f64, Provenance)> = (0..n)
        .filter(|&r| weight[r] > 0.0)
        .map(|r| (r, weight[r], Provenance::Sample))
        .collect();
    WeightedCoreset::from_entries(data, &entries)
}
