//! Downstream robust clustering solvers that accept weighted input, so they can
//! run on a coreset as well as on the full data.
//!
//! * LL: Lloyd iterations with outlier trimming for robust means (`z = 2`),
//!   seeded with outlier-trimmed `D^2` sampling.
//! * LS: single-swap local search for robust median over a fixed candidate pool.

use rand::seq::index;
use serde::{Deserialize, Serialize};

use crate::approx::trimmed_dz_seeding;
use crate::cost::{
    check_dims, check_mass, check_z, nearest_squared, powered_from_squared, robust_cost, squared_distance,
    TrimWorkspace,
};
use crate::error::{invalid, Result};
use crate::rng::{self, LABEL_APPROX, LABEL_POOL};
use crate::timing::Stopwatch;
use crate::types::{CenterSet, Dataset};

pub const DEFAULT_MAX_ITERS: usize = 100;
pub const DEFAULT_LLOYD_TOL: f64 = 1e-6;
pub const DEFAULT_SWAP_TOL: f64 = 1e-4;
pub const DEFAULT_POOL_SIZE: usize = 100;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveResult {
    pub centers: CenterSet,
    /// Robust cost of `centers` on the input the solver ran on.
    pub cost_on_input: f64,
    pub iterations: usize,
    pub wall_seconds: f64,
    /// Objective after initialization and after every accepted step.
    pub cost_trace: Vec<f64>,
}

/// Independent seedings tried by [`robust_seed`].
pub const SEED_TRIALS: u64 = 5;

/// Exactly `k` seeds by outlier-trimmed `D^z` sampling with `m` trimmed units.
///
/// A single seeding whose first draw hits an outlier wastes a center on it, so
/// [`SEED_TRIALS`] seedings are drawn and the one with the lowest robust cost
/// is kept. If the trimmed distribution runs out of mass before `k` seeds are
/// found (fewer than `k` distinct locations carry weight), the last seed is
/// repeated.
pub fn robust_seed(data: &Dataset, k: usize, m: f64, z: f64, seed: u64) -> Result<CenterSet> {
    check_z(z)?;
    if k == 0 || k > data.len() {
        return Err(invalid(format!("k={k} must lie in [1, {}]", data.len())));
    }
    check_mass(m, data.total_weight())?;
    let mut best: Option<(f64, CenterSet)> = None;
    for trial in 0..SEED_TRIALS {
        let mut rng = rng::stream(seed, &[LABEL_APPROX, trial]);
        let mut rows = trimmed_dz_seeding(data, k, z, m, &mut rng)?;
        while rows.len() < k {
            rows.push(*rows.last().expect("at least one seed"));
        }
        let centers = CenterSet::from_dataset_rows(data, &rows)?;
        let cost = robust_cost(data, &centers, z, m)?.cost;
        if best.as_ref().is_none_or(|(b, _)| cost < *b) {
            best = Some((cost, centers));
        }
    }
    Ok(best.expect("at least one trial").1)
}

/// Lloyd iterations for robust means: trim `m` units of the furthest mass,
/// assign the rest to the nearest center, move each center to the weighted
/// mean of its kept mass. Stops when the relative improvement drops to `tol`
/// or after `max_iters` updates. An empty cluster is re-seeded at the furthest
/// kept point.
pub fn lloyd_with_outliers(
    data: &Dataset,
    init: &CenterSet,
    z: f64,
    m: f64,
    max_iters: usize,
    tol: f64,
) -> Result<SolveResult> {
    if z != 2.0 {
        return Err(invalid(format!("Lloyd updates need z = 2, got {z}")));
    }
    check_dims(data, init)?;
    check_mass(m, data.total_weight())?;
    if data.is_empty() {
        return Err(invalid("empty dataset"));
    }
    let clock = Stopwatch::start();
    let dim = data.dim();
    let k = init.len();
    let mut ws = TrimWorkspace::new();
    let mut centers = init.clone();
    let mut nearest = vec![0usize; data.len()];
    let mut powered = vec![0.0; data.len()];

    let evaluate = |centers: &CenterSet, nearest: &mut [usize], powered: &mut [f64], ws: &mut TrimWorkspace| {
        for ((p, n), v) in data.points().zip(nearest.iter_mut()).zip(powered.iter_mut()) {
            let (i, sq) = nearest_squared(p, centers);
            *n = i;
            *v = sq;
        }
        ws.trimmed_cost(powered, data.weights(), data.ids(), m)
    };

    let mut cost = evaluate(&centers, &mut nearest, &mut powered, &mut ws);
    let mut trace = vec![cost];
    let mut iterations = 0;
    let mut sums = vec![0.0; k * dim];
    let mut mass = vec![0.0; k];
    while iterations < max_iters {
        iterations += 1;
        let kept = ws.kept_weights(&powered, data.weights(), data.ids(), m).to_vec();
        sums.iter_mut().for_each(|s| *s = 0.0);
        mass.iter_mut().for_each(|s| *s = 0.0);
        for (r, p) in data.points().enumerate() {
            let w = kept[r];
            if w > 0.0 {
                let c = nearest[r];
                mass[c] += w;
                for (s, x) in sums[c * dim..(c + 1) * dim].iter_mut().zip(p) {
                    *s += w * x;
                }
            }
        }
        let mut next = centers.clone();
        let mut reseeded: Vec<usize> = Vec::new();
        for c in 0..k {
            if mass[c] > 0.0 {
                for (dst, s) in next.center_mut(c).iter_mut().zip(&sums[c * dim..(c + 1) * dim]) {
                    *dst = s / mass[c];
                }
            } else {
                let far = (0..data.len())
                    .filter(|&r| kept[r] > 0.0 && !reseeded.contains(&r))
                    .max_by(|&a, &b| powered[a].total_cmp(&powered[b]).then(b.cmp(&a)));
                if let Some(r) = far {
                    reseeded.push(r);
                    next.center_mut(c).copy_from_slice(data.point(r));
                }
            }
        }
        let mut next_nearest = nearest.clone();
        let mut next_powered = powered.clone();
        let next_cost = evaluate(&next, &mut next_nearest, &mut next_powered, &mut ws);
        if next_cost > cost {
            // Only rounding can get here; keep the previous solution.
            evaluate(&centers, &mut nearest, &mut powered, &mut ws);
            break;
        }
        let improvement = cost - next_cost;
        let previous = cost;
        centers = next;
        nearest = next_nearest;
        powered = next_powered;
        cost = next_cost;
        trace.push(cost);
        if improvement <= tol * previous {
            break;
        }
    }
    let cost_on_input = robust_cost(data, &centers, 2.0, m)?.cost;
    Ok(SolveResult { centers, cost_on_input, iterations, wall_seconds: clock.seconds(), cost_trace: trace })
}

/// `size` distinct rows drawn uniformly, as candidate centers.
pub fn candidate_pool(data: &Dataset, size: usize, seed: u64) -> Result<CenterSet> {
    if size == 0 || size > data.len() {
        return Err(invalid(format!("pool size must lie in [1, {}], got {size}", data.len())));
    }
    let mut rng = rng::stream(seed, &[LABEL_POOL]);
    let mut rows = index::sample(&mut rng, data.len(), size).into_vec();
    rows.sort_unstable();
    CenterSet::from_dataset_rows(data, &rows)
}

fn candidate_powered(data: &Dataset, c: &[f64], z: f64, out: &mut [f64]) {
    for (p, v) in data.points().zip(out.iter_mut()) {
        *v = powered_from_squared(squared_distance(p, c), z);
    }
}

/// Single-swap local search over `candidates` for the robust objective.
///
/// Starts from a greedy pick of `k` candidates, then repeatedly applies the
/// best (center out, candidate in) swap while it lowers the cost by at least
/// the fraction `improvement_tol`.
pub fn local_search_robust_median(
    data: &Dataset,
    candidates: &CenterSet,
    k: usize,
    m: f64,
    z: f64,
    max_iters: usize,
    improvement_tol: f64,
) -> Result<SolveResult> {
    check_z(z)?;
    check_dims(data, candidates)?;
    check_mass(m, data.total_weight())?;
    if k == 0 || candidates.len() < k {
        return Err(invalid(format!("need at least k={k} candidates, got {}", candidates.len())));
    }
    let clock = Stopwatch::start();
    let n = data.len();
    let pool = candidates.len();
    let mut ws = TrimWorkspace::new();
    let mut cand = vec![0.0; n];
    let mut values = vec![0.0; n];

    // Greedy initialization.
    let mut chosen: Vec<usize> = Vec::with_capacity(k);
    let mut best_dist = vec![f64::INFINITY; n];
    for _ in 0..k {
        let mut best: Option<(f64, usize)> = None;
        for c in (0..pool).filter(|c| !chosen.contains(c)) {
            candidate_powered(data, candidates.center(c), z, &mut cand);
            for ((v, a), b) in values.iter_mut().zip(&best_dist).zip(&cand) {
                *v = a.min(*b);
            }
            let cost = ws.trimmed_cost(&values, data.weights(), data.ids(), m);
            if best.is_none_or(|(bc, _)| cost < bc) {
                best = Some((cost, c));
            }
        }
        let (_, c) = best.expect("enough candidates");
        chosen.push(c);
        candidate_powered(data, candidates.center(c), z, &mut cand);
        for (a, b) in best_dist.iter_mut().zip(&cand) {
            *a = a.min(*b);
        }
    }

    // First and second nearest chosen center of every point.
    let mut slot = vec![0usize; n];
    let mut first = vec![0.0; n];
    let mut second = vec![0.0; n];
    let refresh = |chosen: &[usize], slot: &mut [usize], first: &mut [f64], second: &mut [f64]| {
        for (r, p) in data.points().enumerate() {
            let (mut s, mut d1, mut d2) = (0, f64::INFINITY, f64::INFINITY);
            for (j, &c) in chosen.iter().enumerate() {
                let d = powered_from_squared(squared_distance(p, candidates.center(c)), z);
                if d < d1 {
                    d2 = d1;
                    d1 = d;
                    s = j;
                } else if d < d2 {
                    d2 = d;
                }
            }
            slot[r] = s;
            first[r] = d1;
            second[r] = d2;
        }
    };
    refresh(&chosen, &mut slot, &mut first, &mut second);
    let mut cost = ws.trimmed_cost(&first, data.weights(), data.ids(), m);
    let mut trace = vec![cost];
    let mut iterations = 0;
    while iterations < max_iters {
        let mut best: Option<(f64, usize, usize)> = None;
        for c in (0..pool).filter(|c| !chosen.contains(c)) {
            candidate_powered(data, candidates.center(c), z, &mut cand);
            for j in 0..k {
                for r in 0..n {
                    let keep = if slot[r] == j { second[r] } else { first[r] };
                    values[r] = keep.min(cand[r]);
                }
                let swapped = ws.trimmed_cost(&values, data.weights(), data.ids(), m);
                if best.is_none_or(|(bc, _, _)| swapped < bc) {
                    best = Some((swapped, j, c));
                }
            }
        }
        match best {
            Some((swapped, j, c)) if swapped < cost * (1.0 - improvement_tol) => {
                chosen[j] = c;
                refresh(&chosen, &mut slot, &mut first, &mut second);
                cost = ws.trimmed_cost(&first, data.weights(), data.ids(), m);
                trace.push(cost);
                iterations += 1;
            }
            _ => break,
        }
    }
    let centers = CenterSet::from_rows(&chosen.iter().map(|&c| candidates.center(c).to_vec()).collect::<Vec<_>>())?;
    let cost_on_input = robust_cost(data, &centers, z, m)?.cost;
    Ok(SolveResult { centers, cost_on_input, iterations, wall_seconds: clock.seconds(), cost_trace: trace })
}
