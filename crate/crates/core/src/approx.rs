//! Approximate center sets with extra centers and extra outliers.
//!
//! The coreset construction needs a center set `C*` of at most `beta * k`
//! centers whose cost, after discarding `gamma * m` units of mass, is within a
//! constant factor of the optimum. It is obtained by `D^z` sampling in which the
//! `gamma * m` furthest units of mass get zero probability each round, so
//! far outliers cannot capture the seeds.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::cost::{
    check_mass, check_z, nearest_squared, powered_from_squared, squared_distance, trim_outliers,
    robust_cost, TrimWorkspace,
};
use crate::error::{invalid, Result};
use crate::rng::{self, StreamRng, LABEL_APPROX};
use crate::types::{CenterSet, Dataset};

pub const DEFAULT_BETA: f64 = 2.0;
pub const DEFAULT_GAMMA: f64 = 2.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TriCriteriaSolution {
    pub centers: CenterSet,
    /// Rows of the dataset the centers were drawn from.
    pub center_rows: Vec<usize>,
    pub beta: f64,
    pub gamma: f64,
    /// Outlier mass used for trimming, `min(gamma * m, total weight)`.
    pub trimmed_mass: f64,
    /// `cost_z^{(trimmed_mass)}(X, centers)`.
    pub achieved_cost: f64,
}

/// Draws an index with probability proportional to `mass`. `None` if all mass is zero.
pub(crate) fn draw_proportional(rng: &mut StreamRng, mass: &[f64]) -> Option<usize> {
    let total: f64 = mass.iter().sum();
    if !(total > 0.0) {
        return None;
    }
    let target = rng.random::<f64>() * total;
    let mut acc = 0.0;
    let mut last_positive = None;
    for (i, &w) in mass.iter().enumerate() {
        if w > 0.0 {
            acc += w;
            last_positive = Some(i);
            if target < acc {
                return Some(i);
            }
        }
    }
    last_positive
}

/// Outlier-trimmed `D^z` seeding. Returns the chosen rows, at most `rounds` of them.
///
/// The first row is drawn proportionally to weight. Each later row is drawn
/// proportionally to `w'(x) * dist^z(x, pool)`, where `w'` is the weight left
/// after trimming `trim_mass` units of the furthest mass. Seeding stops early
/// when that distribution has no mass left.
pub fn trimmed_dz_seeding(
    data: &Dataset,
    rounds: usize,
    z: f64,
    trim_mass: f64,
    rng: &mut StreamRng,
) -> Result<Vec<usize>> {
    check_z(z)?;
    if data.is_empty() {
        return Err(invalid("cannot seed centers on an empty dataset"));
    }
    let first = draw_proportional(rng, data.weights())
        .ok_or_else(|| invalid("dataset has zero total weight"))?;
    let mut rows = vec![first];
    let mut powered: Vec<f64> = data
        .points()
        .map(|p| powered_from_squared(squared_distance(p, data.point(first)), z))
        .collect();
    let mut ws = TrimWorkspace::new();
    let mut mass = vec![0.0; data.len()];
    while rows.len() < rounds {
        let kept = ws.kept_weights(&powered, data.weights(), data.ids(), trim_mass);
        for ((m, k), p) in mass.iter_mut().zip(kept).zip(&powered) {
            *m = k * p;
        }
        let Some(next) = draw_proportional(rng, &mass) else { break };
        rows.push(next);
        let c = data.point(next);
        for (p, v) in data.points().zip(powered.iter_mut()) {
            let d = powered_from_squared(squared_distance(p, c), z);
            if d < *v {
                *v = d;
            }
        }
    }
    Ok(rows)
}

/// Computes an approximate solution with at most `ceil(beta * k)` centers,
/// evaluated with `gamma * m` outliers.
pub fn tri_criteria_approx(
    data: &Dataset,
    k: usize,
    z: f64,
    m: f64,
    beta: f64,
    gamma: f64,
    seed: u64,
) -> Result<TriCriteriaSolution> {
    check_z(z)?;
    if data.is_empty() {
        return Err(invalid("empty dataset"));
    }
    if k == 0 {
        return Err(invalid("k must be at least 1"));
    }
    if k > data.len() {
        return Err(invalid(format!("k={k} exceeds the number of points {}", data.len())));
    }
    if !(beta >= 1.0 && gamma >= 1.0) {
        return Err(invalid("beta and gamma must both be >= 1"));
    }
    let total = data.total_weight();
    check_mass(m, total)?;
    let trimmed_mass = (gamma * m).min(total);
    let rounds = ((beta * k as f64).ceil() as usize).min(data.len());
    let mut rng = rng::stream(seed, &[LABEL_APPROX]);
    let center_rows = trimmed_dz_seeding(data, rounds, z, trimmed_mass, &mut rng)?;
    let centers = CenterSet::from_dataset_rows(data, &center_rows)?;
    let achieved_cost = robust_cost(data, &centers, z, trimmed_mass)?.cost;
    Ok(TriCriteriaSolution { centers, center_rows, beta, gamma, trimmed_mass, achieved_cost })
}

/// One removed point and the mass taken from it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OutlierEntry {
    pub row: usize,
    pub id: u64,
    pub mass: f64,
}

/// The `count` units of mass furthest from `centers`, most outlying first.
///
/// With unit weights and an integer count this is a plain set of points; a
/// weighted boundary point may be listed with only part of its weight.
pub fn find_outliers(data: &Dataset, centers: &CenterSet, count: f64) -> Result<Vec<OutlierEntry>> {
    crate::cost::check_dims(data, centers)?;
    // Squared distance ranks points the same way as any dist^z.
    let squared: Vec<f64> = data.points().map(|p| nearest_squared(p, centers).1).collect();
    let trim = trim_outliers(data, &squared, count)?;
    Ok(trim
        .removed
        .into_iter()
        .map(|(row, mass)| OutlierEntry { row, id: data.id(row), mass })
        .collect())
}
