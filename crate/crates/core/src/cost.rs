//! Exact weighted clustering costs, with and without outliers.
//!
//! The robust cost removes exactly `m` units of weight, taken from the points
//! furthest from their nearest center. When the boundary falls inside a
//! weighted point, only part of that point's weight is removed. Among points
//! at equal distance, mass is removed from the larger id first.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, CoresetError, Result};
use crate::types::{CenterSet, Dataset};

const PAIRWISE_BLOCK: usize = 64;

/// Pairwise (cascade) summation.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    if values.len() <= PAIRWISE_BLOCK {
        values.iter().sum()
    } else {
        let (l, r) = values.split_at(values.len() / 2);
        pairwise_sum(l) + pairwise_sum(r)
    }
}

#[inline]
pub fn squared_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// `dist^z` from a squared distance. z = 1 and z = 2 avoid `powf`.
#[inline]
pub fn powered_from_squared(sq: f64, z: f64) -> f64 {
    if z == 2.0 {
        sq
    } else if z == 1.0 {
        sq.sqrt()
    } else {
        sq.sqrt().powf(z)
    }
}

pub(crate) fn check_z(z: f64) -> Result<()> {
    if !(z.is_finite() && z >= 1.0) {
        return Err(invalid(format!("z must be a finite real >= 1, got {z}")));
    }
    Ok(())
}

pub(crate) fn check_dims(data: &Dataset, centers: &CenterSet) -> Result<()> {
    if data.dim() != centers.dim() {
        return Err(CoresetError::DimensionMismatch { expected: data.dim(), got: centers.dim() });
    }
    Ok(())
}

/// Index and squared distance of the nearest center; the smallest index wins ties.
#[inline]
pub(crate) fn nearest_squared(p: &[f64], centers: &CenterSet) -> (usize, f64) {
    let mut best = (0, f64::INFINITY);
    for (i, c) in centers.iter().enumerate() {
        let d = squared_distance(p, c);
        if d < best.1 {
            best = (i, d);
        }
    }
    best
}

/// Nearest center of `p` and the Euclidean distance to it.
pub fn nearest_center(p: &[f64], centers: &CenterSet) -> Result<(usize, f64)> {
    if p.len() != centers.dim() {
        return Err(CoresetError::DimensionMismatch { expected: centers.dim(), got: p.len() });
    }
    let (i, sq) = nearest_squared(p, centers);
    Ok((i, sq.sqrt()))
}

/// Nearest-center index and `dist^z` for every point.
#[derive(Debug, Clone)]
pub struct Assignment {
    pub nearest: Vec<usize>,
    pub powered: Vec<f64>,
}

pub fn assign(data: &Dataset, centers: &CenterSet, z: f64) -> Result<Assignment> {
    check_z(z)?;
    check_dims(data, centers)?;
    let mut nearest = Vec::with_capacity(data.len());
    let mut powered = Vec::with_capacity(data.len());
    for p in data.points() {
        let (i, sq) = nearest_squared(p, centers);
        nearest.push(i);
        powered.push(powered_from_squared(sq, z));
    }
    Ok(Assignment { nearest, powered })
}

/// `dist^z(x, C)` for every point.
pub fn powered_distances(data: &Dataset, centers: &CenterSet, z: f64) -> Result<Vec<f64>> {
    Ok(assign(data, centers, z)?.powered)
}

/// `sum_x w(x) * dist(x, C)^z`.
pub fn cost_vanilla(data: &Dataset, centers: &CenterSet, z: f64) -> Result<f64> {
    check_z(z)?;
    if data.is_empty() {
        return Ok(0.0);
    }
    let a = assign(data, centers, z)?;
    let terms: Vec<f64> = a.powered.iter().zip(data.weights()).map(|(v, w)| v * w).collect();
    Ok(pairwise_sum(&terms))
}

/// Weight removed from the boundary point when the outlier budget splits it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundaryPoint {
    pub id: u64,
    pub removed_weight: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RobustCostResult {
    pub cost: f64,
    pub outlier_mass_removed: f64,
    pub boundary: Option<BoundaryPoint>,
}

/// Outcome of removing `m` units of mass from the most outlying points.
#[derive(Debug, Clone, PartialEq)]
pub struct Trim {
    /// `(row, removed mass)`, most outlying first. Only the last entry can be partial.
    pub removed: Vec<(usize, f64)>,
    pub removed_mass: f64,
    pub cost: f64,
}

/// Orders rows so that the most outlying comes first: larger value, then larger id.
#[inline]
fn outlying_first(values: &[f64], ids: &[u64], a: usize, b: usize) -> Ordering {
    values[b].total_cmp(&values[a]).then(ids[b].cmp(&ids[a]))
}

pub(crate) fn check_mass(m: f64, total: f64) -> Result<()> {
    if !(m.is_finite() && m >= 0.0) {
        return Err(invalid(format!("outlier mass must be a finite nonnegative real, got {m}")));
    }
    if m > total + 1e-9 * total.max(1.0) {
        return Err(CoresetError::OutlierMassTooLarge { requested: m, total });
    }
    Ok(())
}

/// Reusable scratch space for repeated outlier trimming over the same data size.
#[derive(Debug, Default, Clone)]
pub struct TrimWorkspace {
    order: Vec<usize>,
    kept: Vec<f64>,
    terms: Vec<f64>,
}

impl TrimWorkspace {
    pub fn new() -> Self {
        Self::default()
    }

    /// Weighted quickselect. On return `order[..full]` holds the fully removed
    /// rows (unsorted) and `partial` the boundary row with the mass taken from it.
    fn select(
        &mut self,
        values: &[f64],
        weights: &[f64],
        ids: &[u64],
        m: f64,
    ) -> (usize, Option<(usize, f64)>) {
        let n = values.len();
        self.order.clear();
        self.order.extend(0..n);
        if m <= 0.0 {
            return (0, None);
        }
        let order = &mut self.order;
        let cmp = |a: &usize, b: &usize| outlying_first(values, ids, *a, *b);
        let (mut lo, mut hi) = (0usize, n);
        let mut remaining = m;
        while lo < hi {
            if hi - lo <= 16 {
                order[lo..hi].sort_unstable_by(cmp);
                for pos in lo..hi {
                    let w = weights[order[pos]];
                    if w <= remaining {
                        remaining -= w;
                        if remaining <= 0.0 {
                            return (pos + 1, None);
                        }
                    } else {
                        return (pos, Some((order[pos], remaining)));
                    }
                }
                return (hi, None);
            }
            let mid = lo + (hi - lo) / 2;
            order[lo..hi].select_nth_unstable_by(mid - lo, cmp);
            let left: f64 = order[lo..mid].iter().map(|&r| weights[r]).sum();
            if left >= remaining {
                hi = mid;
            } else {
                remaining -= left;
                lo = mid;
            }
        }
        (lo, None)
    }

    fn run(
        &mut self,
        values: &[f64],
        weights: &[f64],
        ids: &[u64],
        m: f64,
    ) -> (f64, usize, Option<(usize, f64)>) {
        let (full, partial) = self.select(values, weights, ids, m);
        self.kept.clear();
        self.kept.extend_from_slice(weights);
        for &r in &self.order[..full] {
            self.kept[r] = 0.0;
        }
        if let Some((r, mass)) = partial {
            self.kept[r] = (weights[r] - mass).max(0.0);
        }
        self.terms.clear();
        self.terms.extend(values.iter().zip(&self.kept).map(|(v, w)| v * w));
        (pairwise_sum(&self.terms), full, partial)
    }

    /// Cost of the mass left after removing `m` units, summed in row order.
    pub fn trimmed_cost(&mut self, values: &[f64], weights: &[f64], ids: &[u64], m: f64) -> f64 {
        self.run(values, weights, ids, m).0
    }

    /// Like [`Self::trimmed_cost`] but also returns the removed mass per row.
    pub fn trim(&mut self, values: &[f64], weights: &[f64], ids: &[u64], m: f64) -> Trim {
        let (cost, full, partial) = self.run(values, weights, ids, m);
        let mut rows: Vec<usize> = self.order[..full].to_vec();
        rows.sort_unstable_by(|a, b| outlying_first(values, ids, *a, *b));
        let mut removed: Vec<(usize, f64)> = rows.into_iter().map(|r| (r, weights[r])).collect();
        if let Some(p) = partial {
            removed.push(p);
        }
        let removed_mass = removed.iter().map(|r| r.1).sum();
        Trim { removed, removed_mass, cost }
    }

    /// Weights remaining after removing `m` units, indexed by row.
    pub fn kept_weights(&mut self, values: &[f64], weights: &[f64], ids: &[u64], m: f64) -> &[f64] {
        self.run(values, weights, ids, m);
        &self.kept
    }
}

/// Removes `m` units of the most outlying mass given per-row `dist^z` values.
pub fn trim_outliers(data: &Dataset, powered: &[f64], m: f64) -> Result<Trim> {
    check_mass(m, data.total_weight())?;
    Ok(TrimWorkspace::new().trim(powered, data.weights(), data.ids(), m))
}

/// `cost_z^{(m)}(X, C)`: the cost after discarding `m` units of the furthest mass.
pub fn robust_cost(data: &Dataset, centers: &CenterSet, z: f64, m: f64) -> Result<RobustCostResult> {
    check_z(z)?;
    check_dims(data, centers)?;
    check_mass(m, data.total_weight())?;
    if m == 0.0 {
        return Ok(RobustCostResult {
            cost: cost_vanilla(data, centers, z)?,
            outlier_mass_removed: 0.0,
            boundary: None,
        });
    }
    let powered = powered_distances(data, centers, z)?;
    let trim = TrimWorkspace::new().trim(&powered, data.weights(), data.ids(), m);
    let boundary = trim.removed.last().and_then(|&(r, mass)| {
        (mass < data.weight(r)).then(|| BoundaryPoint { id: data.id(r), removed_weight: mass })
    });
    Ok(RobustCostResult { cost: trim.cost, outlier_mass_removed: trim.removed_mass, boundary })
}

/// The robust cost written as an integral over ball radii,
/// `int_0^inf z u^{z-1} (W - m - w(Balls(C, u) ∩ X))^+ du`.
///
/// The integrand is a step function of `u` times `z u^{z-1}`, so each segment
/// between consecutive distinct distances integrates exactly to a difference of
/// `u^z`. `quadrature_steps` splits each segment into that many equal pieces.
pub fn robust_cost_integral(
    data: &Dataset,
    centers: &CenterSet,
    z: f64,
    m: f64,
    quadrature_steps: usize,
) -> Result<f64> {
    check_z(z)?;
    check_dims(data, centers)?;
    check_mass(m, data.total_weight())?;
    if quadrature_steps == 0 {
        return Err(invalid("quadrature_steps must be at least 1"));
    }
    let mut dist: Vec<(f64, f64)> = data
        .points()
        .zip(data.weights())
        .map(|(p, &w)| (squared_distance_to_set(p, centers).sqrt(), w))
        .collect();
    dist.sort_unstable_by(|a, b| a.0.total_cmp(&b.0));

    // Distinct breakpoints, and the mass strictly beyond each of them.
    let mut breaks: Vec<f64> = Vec::new();
    let mut beyond: Vec<f64> = Vec::new();
    let mut suffix = 0.0;
    for &(d, w) in dist.iter().rev() {
        if breaks.last() != Some(&d) {
            breaks.push(d);
            beyond.push(suffix);
        }
        suffix += w;
    }
    breaks.reverse();
    beyond.reverse();

    let steps = quadrature_steps as f64;
    let mut terms = Vec::with_capacity(breaks.len() * quadrature_steps);
    // Segment [0, b_0): nothing lies within the balls yet.
    let mut prev = 0.0;
    let mut outside = suffix;
    for (&b, &after) in breaks.iter().zip(&beyond) {
        let excess = outside - m;
        if excess > 0.0 && b > prev {
            let h = (b - prev) / steps;
            for q in 0..quadrature_steps {
                let lo = prev + h * q as f64;
                let hi = if q + 1 == quadrature_steps { b } else { prev + h * (q + 1) as f64 };
                terms.push(excess * (hi.powf(z) - lo.powf(z)));
            }
        }
        prev = b;
        outside = after;
    }
    Ok(pairwise_sum(&terms))
}

fn squared_distance_to_set(p: &[f64], centers: &CenterSet) -> f64 {
    centers.iter().map(|c| squared_distance(p, c)).fold(f64::INFINITY, f64::min)
}

/// Largest instance the exhaustive oracle will enumerate.
pub const ORACLE_MAX_POINTS: usize = 12;

/// `min_{|L| = m} cost_z(X \ L, C)` by enumerating every outlier subset.
///
/// Only for small unit-weight instances; used to check [`robust_cost`].
pub fn brute_force_robust_cost(data: &Dataset, centers: &CenterSet, z: f64, m: usize) -> Result<f64> {
    check_z(z)?;
    check_dims(data, centers)?;
    let n = data.len();
    if n > ORACLE_MAX_POINTS {
        return Err(CoresetError::TooLargeForOracle { n, limit: ORACLE_MAX_POINTS });
    }
    if !data.is_unit_weighted() {
        return Err(invalid("the exhaustive oracle requires unit weights"));
    }
    if m > n {
        return Err(CoresetError::OutlierMassTooLarge { requested: m as f64, total: n as f64 });
    }
    let contrib: Vec<f64> = data
        .points()
        .map(|p| squared_distance_to_set(p, centers).sqrt().powf(z))
        .collect();
    let mut best = f64::INFINITY;
    for mask in 0u32..(1u32 << n) {
        if mask.count_ones() as usize != m {
            continue;
        }
        let cost: f64 = (0..n).filter(|i| mask & (1 << i) == 0).map(|i| contrib[i]).sum();
        best = best.min(cost);
    }
    Ok(best)
}

/// Evaluates both generalized triangle inequalities for `(a, b, delta, z)`:
///
/// 1. `(a+b)^z <= (1+δ)^{z-1} a^z + (1+1/δ)^{z-1} b^z`
/// 2. `(a+b)^z <= (1+δ) a^z + (3z/δ)^{z-1} b^z`
pub fn check_relaxed_triangle(a: f64, b: f64, delta: f64, z: f64) -> (bool, bool) {
    let lhs = (a + b).powf(z);
    let az = a.powf(z);
    let bz = b.powf(z);
    let first = (1.0 + delta).powf(z - 1.0) * az + (1.0 + 1.0 / delta).powf(z - 1.0) * bz;
    let second = (1.0 + delta) * az + (3.0 * z / delta).powf(z - 1.0) * bz;
    // Allow for rounding in the power evaluations.
    let fits = |rhs: f64| lhs <= rhs * (1.0 + 1e-12) + f64::MIN_POSITIVE;
    (fits(first), fits(second))
}
