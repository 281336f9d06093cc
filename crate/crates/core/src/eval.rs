//! Empirical-error harness and the experiments built on it.
//!
//! The empirical error of a coreset `S` on a center set `C` at outlier budget
//! `t` is `|cost_t(X, C) - cost_t(S, C)| / cost_t(X, C)`. It is measured at
//! `t` in `{0, ceil(m/2), m}`; the headline number `eps(S)` is the maximum over
//! the center collection at `t = m`.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::baselines::{outlier_aware_uniform, sensitivity_sampling_coreset, uniform_sampling_coreset};
use crate::coreset::{build_coreset, CoresetParams, WeightedCoreset};
use crate::cost::{nearest_squared, robust_cost};
use crate::error::{invalid, Result};
use crate::rng::{self, derive_seed, LABEL_CENTERS, LABEL_REP};
use crate::solvers::{
    candidate_pool, lloyd_with_outliers, local_search_robust_median, robust_seed, DEFAULT_LLOYD_TOL,
    DEFAULT_MAX_ITERS, DEFAULT_POOL_SIZE, DEFAULT_SWAP_TOL,
};
use crate::timing::Stopwatch;
use crate::types::{CenterSet, Dataset};

#[cfg(feature = "parallel")]
fn map_indexed<T: Send, F: Fn(usize) -> T + Sync + Send>(n: usize, f: F) -> Vec<T> {
    use rayon::prelude::*;
    (0..n).into_par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
fn map_indexed<T, F: Fn(usize) -> T>(n: usize, f: F) -> Vec<T> {
    (0..n).map(f).collect()
}

/// `count` center sets of `k` points each, uniform in the bounding box of `data`.
pub fn random_center_sets(data: &Dataset, k: usize, count: usize, seed: u64) -> Result<Vec<CenterSet>> {
    if data.is_empty() || k == 0 || count == 0 {
        return Err(invalid("need a nonempty dataset, k >= 1 and count >= 1"));
    }
    let bounds = data.bounding_box();
    let mut rng = rng::stream(seed, &[LABEL_CENTERS]);
    (0..count)
        .map(|_| {
            let mut coords = Vec::with_capacity(k * bounds.len());
            for _ in 0..k {
                for &(lo, hi) in &bounds {
                    coords.push(if hi > lo { rng.random_range(lo..=hi) } else { lo });
                }
            }
            CenterSet::new(bounds.len(), coords)
        })
        .collect()
}

/// The outlier budgets at which errors are measured: `0`, `ceil(m/2)`, `m`.
pub fn budgets(m: f64) -> [f64; 3] {
    [0.0, (m / 2.0).ceil(), m]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorSample {
    pub center_set_id: usize,
    /// Errors at the three budgets; `None` where the dataset cost is zero.
    pub errors: [Option<f64>; 3],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorReport {
    /// Maximum error over center sets at `t = m`.
    pub max_error: f64,
    /// Maximum error over center sets at each budget.
    pub max_error_by_budget: [f64; 3],
    pub samples: Vec<ErrorSample>,
    /// Number of (center set, budget) pairs skipped for a zero dataset cost.
    pub skipped: usize,
}

/// Caches the dataset costs of a center collection so many coresets can be
/// scored against it.
pub struct ErrorEvaluator {
    centers: Vec<CenterSet>,
    z: f64,
    budgets: [f64; 3],
    full_costs: Vec<[f64; 3]>,
}

impl ErrorEvaluator {
    pub fn new(data: &Dataset, centers: Vec<CenterSet>, z: f64, m: f64) -> Result<Self> {
        if centers.is_empty() {
            return Err(invalid("need at least one center set"));
        }
        let budgets = budgets(m);
        let full_costs = map_indexed(centers.len(), |i| -> Result<[f64; 3]> {
            let mut out = [0.0; 3];
            for (o, &t) in out.iter_mut().zip(&budgets) {
                *o = robust_cost(data, &centers[i], z, t)?.cost;
            }
            Ok(out)
        })
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
        Ok(Self { centers, z, budgets, full_costs })
    }

    pub fn centers(&self) -> &[CenterSet] {
        &self.centers
    }

    pub fn evaluate(&self, coreset: &Dataset) -> Result<ErrorReport> {
        let samples = map_indexed(self.centers.len(), |i| -> Result<ErrorSample> {
            let mut errors = [None; 3];
            for (j, &t) in self.budgets.iter().enumerate() {
                let full = self.full_costs[i][j];
                if full > 0.0 {
                    let approx = robust_cost(coreset, &self.centers[i], self.z, t)?.cost;
                    errors[j] = Some((full - approx).abs() / full);
                }
            }
            Ok(ErrorSample { center_set_id: i, errors })
        })
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
        let mut max_error_by_budget = [0.0f64; 3];
        let mut skipped = 0;
        for s in &samples {
            for (mx, e) in max_error_by_budget.iter_mut().zip(&s.errors) {
                match e {
                    Some(e) => *mx = mx.max(*e),
                    None => skipped += 1,
                }
            }
        }
        Ok(ErrorReport { max_error: max_error_by_budget[2], max_error_by_budget, samples, skipped })
    }
}

/// `eps(S)` over `centers`, with per-center diagnostics.
pub fn max_empirical_error(
    data: &Dataset,
    coreset: &Dataset,
    centers: &[CenterSet],
    z: f64,
    m: f64,
) -> Result<ErrorReport> {
    ErrorEvaluator::new(data, centers.to_vec(), z, m)?.evaluate(coreset)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Method {
    Ours,
    Us,
    Oaus,
    Ss,
}

impl Method {
    pub const ALL: [Method; 4] = [Method::Ours, Method::Us, Method::Oaus, Method::Ss];

    pub fn as_str(self) -> &'static str {
        match self {
            Method::Ours => "OURS",
            Method::Us => "US",
            Method::Oaus => "OAUS",
            Method::Ss => "SS",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Method::ALL.into_iter().find(|m| m.as_str().eq_ignore_ascii_case(s))
    }

    /// Builds a coreset of `params.target_size` points with this method.
    pub fn build(self, data: &Dataset, params: &CoresetParams) -> Result<WeightedCoreset> {
        match self {
            Method::Ours => build_coreset(data, params).map(|(s, _)| s),
            Method::Us => uniform_sampling_coreset(data, params.target_size, params.seed),
            Method::Oaus => outlier_aware_uniform(data, params),
            Method::Ss => sensitivity_sampling_coreset(data, params),
        }
    }
}

/// One point of a size or outlier sweep for one method.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub method: Method,
    pub target_size: usize,
    pub m: usize,
    /// Mean of `eps(S)` over repetitions.
    pub mean_error: f64,
    pub max_error: f64,
    /// Sample variance of `eps(S)` over repetitions (0 for a single one).
    pub variance: f64,
    pub repetitions: usize,
    /// Mean over repetitions of the maximum error at each budget.
    pub mean_error_t0: f64,
    pub mean_error_half: f64,
    pub mean_error_m: f64,
    pub skipped: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub k: usize,
    pub z: f64,
    pub reps: usize,
    pub center_sets: usize,
    pub seed: u64,
    pub methods: Vec<Method>,
}

impl SweepConfig {
    pub fn new(k: usize, z: f64, reps: usize, seed: u64) -> Self {
        Self { k, z, reps, center_sets: 500, seed, methods: Method::ALL.to_vec() }
    }
}

fn sweep_point(
    data: &Dataset,
    evaluator: &ErrorEvaluator,
    cfg: &SweepConfig,
    method: Method,
    m: usize,
    target_size: usize,
) -> Result<SweepRow> {
    let mut eps = Vec::with_capacity(cfg.reps);
    let mut by_budget = [0.0; 3];
    let mut skipped = 0;
    for rep in 0..cfg.reps {
        let seed = derive_seed(cfg.seed, &[LABEL_REP, rep as u64]);
        let params = CoresetParams::new(cfg.k, cfg.z, m, target_size).with_seed(seed);
        let s = method.build(data, &params)?;
        let report = evaluator.evaluate(&s.points)?;
        eps.push(report.max_error);
        for (acc, e) in by_budget.iter_mut().zip(report.max_error_by_budget) {
            *acc += e;
        }
        skipped += report.skipped;
    }
    let reps = eps.len() as f64;
    let mean = eps.iter().sum::<f64>() / reps;
    let variance = if eps.len() > 1 {
        eps.iter().map(|e| (e - mean).powi(2)).sum::<f64>() / (reps - 1.0)
    } else {
        0.0
    };
    Ok(SweepRow {
        method,
        target_size,
        m,
        mean_error: mean,
        max_error: eps.iter().copied().fold(0.0, f64::max),
        variance,
        repetitions: eps.len(),
        mean_error_t0: by_budget[0] / reps,
        mean_error_half: by_budget[1] / reps,
        mean_error_m: by_budget[2] / reps,
        skipped,
    })
}

fn check_sweep(data: &Dataset, cfg: &SweepConfig) -> Result<()> {
    if cfg.reps == 0 || cfg.methods.is_empty() {
        return Err(invalid("need at least one repetition and one method"));
    }
    if cfg.k == 0 || cfg.k > data.len() {
        return Err(invalid(format!("k={} must lie in [1, {}]", cfg.k, data.len())));
    }
    Ok(())
}

/// Error of every method at every coreset size, rows ordered by method then size.
pub fn size_error_sweep(data: &Dataset, m: usize, sizes: &[usize], cfg: &SweepConfig) -> Result<Vec<SweepRow>> {
    check_sweep(data, cfg)?;
    let centers = random_center_sets(data, cfg.k, cfg.center_sets, cfg.seed)?;
    let evaluator = ErrorEvaluator::new(data, centers, cfg.z, m as f64)?;
    let mut sizes = sizes.to_vec();
    sizes.sort_unstable();
    sizes.dedup();
    let mut rows = Vec::new();
    for &method in &cfg.methods {
        for &n in &sizes {
            rows.push(sweep_point(data, &evaluator, cfg, method, m, n)?);
        }
    }
    Ok(rows)
}

/// Error of every method at `N = m + fixed_extra` for each `m`.
pub fn outlier_error_sweep(
    data: &Dataset,
    m_values: &[usize],
    fixed_extra: usize,
    cfg: &SweepConfig,
) -> Result<Vec<SweepRow>> {
    check_sweep(data, cfg)?;
    let centers = random_center_sets(data, cfg.k, cfg.center_sets, cfg.seed)?;
    let mut m_values = m_values.to_vec();
    m_values.sort_unstable();
    m_values.dedup();
    let mut per_m = Vec::with_capacity(m_values.len());
    for &m in &m_values {
        let evaluator = ErrorEvaluator::new(data, centers.clone(), cfg.z, m as f64)?;
        let mut rows = Vec::new();
        for &method in &cfg.methods {
            rows.push(sweep_point(data, &evaluator, cfg, method, m, m + fixed_extra)?);
        }
        per_m.push(rows);
    }
    let mut rows = Vec::new();
    for i in 0..cfg.methods.len() {
        rows.extend(per_m.iter().map(|r| r[i].clone()));
    }
    Ok(rows)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Solver {
    /// Lloyd with outliers, robust means.
    Ll,
    /// Swap local search over a candidate pool, robust median.
    Ls,
}

impl Solver {
    pub fn parse(s: &str) -> Option<Self> {
        match s.to_ascii_uppercase().as_str() {
            "LL" => Some(Solver::Ll),
            "LS" => Some(Solver::Ls),
            _ => None,
        }
    }

    /// The `z` the solver optimizes.
    pub fn z(self) -> f64 {
        match self {
            Solver::Ll => 2.0,
            Solver::Ls => 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpeedupTimings {
    /// Coreset construction.
    pub t_c: f64,
    /// Solve on the coreset.
    pub t_s: f64,
    /// Solve on the full data.
    pub t_x: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpeedupReport {
    pub solver: Solver,
    pub n: usize,
    pub k: usize,
    pub z: f64,
    pub m: usize,
    pub coreset_size: usize,
    /// Full-data solution, evaluated on the full data.
    pub cost: f64,
    /// Coreset solution, evaluated on the full data.
    pub cost_prime: f64,
    pub cost_ratio: f64,
    pub iterations_full: usize,
    pub iterations_coreset: usize,
    pub centers_full: CenterSet,
    pub centers_coreset: CenterSet,
    pub timings: SpeedupTimings,
}

fn run_solver(
    data: &Dataset,
    solver: Solver,
    k: usize,
    m: f64,
    seed: u64,
    pool: Option<&CenterSet>,
) -> Result<crate::solvers::SolveResult> {
    match solver {
        Solver::Ll => {
            let init = robust_seed(data, k, m, 2.0, seed)?;
            lloyd_with_outliers(data, &init, 2.0, m, DEFAULT_MAX_ITERS, DEFAULT_LLOYD_TOL)
        }
        Solver::Ls => {
            let pool = pool.expect("candidate pool");
            local_search_robust_median(data, pool, k, m, 1.0, DEFAULT_MAX_ITERS, DEFAULT_SWAP_TOL)
        }
    }
}

/// Runs `solver` on the full data and on a coreset of size `target_size` and
/// compares running times and full-data costs.
///
/// LS draws one candidate pool from the full data and uses it for both runs.
pub fn speedup_benchmark(
    data: &Dataset,
    solver: Solver,
    k: usize,
    m: usize,
    target_size: usize,
    seed: u64,
) -> Result<SpeedupReport> {
    let z = solver.z();
    let pool = match solver {
        Solver::Ls => Some(candidate_pool(data, DEFAULT_POOL_SIZE.min(data.len()), seed)?),
        Solver::Ll => None,
    };
    let clock = Stopwatch::start();
    let params = CoresetParams::new(k, z, m, target_size).with_seed(seed);
    let (coreset, _) = build_coreset(data, &params)?;
    let t_c = clock.seconds();

    let clock = Stopwatch::start();
    let on_coreset = run_solver(&coreset.points, solver, k, m as f64, seed, pool.as_ref())?;
    let t_s = clock.seconds();

    let clock = Stopwatch::start();
    let on_full = run_solver(data, solver, k, m as f64, seed, pool.as_ref())?;
    let t_x = clock.seconds();

    let cost = on_full.cost_on_input;
    let cost_prime = robust_cost(data, &on_coreset.centers, z, m as f64)?.cost;
    Ok(SpeedupReport {
        solver,
        n: data.len(),
        k,
        z,
        m,
        coreset_size: coreset.len(),
        cost,
        cost_prime,
        cost_ratio: if cost > 0.0 { cost_prime / cost } else { 1.0 },
        iterations_full: on_full.iterations,
        iterations_coreset: on_coreset.iterations,
        centers_full: on_full.centers,
        centers_coreset: on_coreset.centers,
        timings: SpeedupTimings { t_c, t_s, t_x },
    })
}

/// Smallest gap ratio that counts as a break in the distance curve.
pub const MIN_BREAK_RATIO: f64 = 2.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    /// Rank rescaled to `[0, 1]`.
    pub rank: f64,
    pub distance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutlierSuggestion {
    pub m: usize,
    /// `d_(m) / d_(m+1)` at the chosen break, or the best ratio seen when no
    /// break qualified.
    pub ratio: f64,
    /// Distances to the nearest center, in decreasing order.
    pub curve: Vec<CurvePoint>,
}

/// Suggests an outlier count from the distance distribution of a plain
/// (no outlier) Lloyd solution.
///
/// The distances `d_(1) >= d_(2) >= ...` are scanned over the top 10% of
/// ranks and the `i` maximizing `d_(i) / d_(i+1)` is returned when that ratio
/// reaches [`MIN_BREAK_RATIO`]; otherwise 0. Points are counted, not weights.
pub fn suggest_outlier_count(data: &Dataset, k: usize, seed: u64) -> Result<OutlierSuggestion> {
    if k == 0 || k > data.len() {
        return Err(invalid(format!("k={k} must lie in [1, {}]", data.len())));
    }
    let n = data.len();
    let init = robust_seed(data, k, 0.0, 2.0, seed)?;
    let sol = lloyd_with_outliers(data, &init, 2.0, 0.0, DEFAULT_MAX_ITERS, DEFAULT_LLOYD_TOL)?;
    let mut dist: Vec<f64> = data.points().map(|p| nearest_squared(p, &sol.centers).1.sqrt()).collect();
    dist.sort_unstable_by(|a, b| b.total_cmp(a));
    let scale = if n > 1 { (n - 1) as f64 } else { 1.0 };
    let curve = dist
        .iter()
        .enumerate()
        .map(|(i, &d)| CurvePoint { rank: i as f64 / scale, distance: d })
        .collect();

    let top = (n as f64 * 0.1).ceil() as usize;
    let mut best = (0usize, 0.0f64);
    for i in 1..=top.min(n.saturating_sub(1)) {
        let (hi, lo) = (dist[i - 1], dist[i]);
        if hi <= 0.0 {
            break;
        }
        let ratio = if lo > 0.0 { hi / lo } else { f64::INFINITY };
        if ratio > best.1 {
            best = (i, ratio);
        }
    }
    let m = if best.1 >= MIN_BREAK_RATIO { best.0 } else { 0 };
    Ok(OutlierSuggestion { m, ratio: best.1, curve })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, Normal};

    fn blobs(seed: u64, per: usize, outliers: usize) -> Dataset {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let noise = Normal::new(0.0, 1.0).unwrap();
        let mut rows = Vec::new();
        for c in [0.0, 30.0, 60.0] {
            for _ in 0..per {
                rows.push(vec![c + noise.sample(&mut rng), noise.sample(&mut rng)]);
            }
        }
        for i in 0..outliers {
            let a = i as f64;
            rows.push(vec![1e4 * a.cos(), 1e4 * a.sin()]);
        }
        Dataset::from_rows(&rows).unwrap()
    }

    #[test]
    fn center_sets_lie_in_bounding_box() {
        let x = blobs(1, 30, 3);
        let sets = random_center_sets(&x, 4, 50, 2).unwrap();
        assert_eq!(sets, random_center_sets(&x, 4, 50, 2).unwrap());
        let bounds = x.bounding_box();
        for c in &sets {
            assert_eq!(c.len(), 4);
            for p in c.iter() {
                for (v, (lo, hi)) in p.iter().zip(&bounds) {
                    assert!(lo <= v && v <= hi);
                }
            }
        }
        let one = random_center_sets(&x, 1, 1, 0).unwrap();
        assert_eq!(one.len(), 1);
    }

    #[test]
    fn identity_coreset_has_zero_error() {
        let x = blobs(2, 40, 5);
        let centers = random_center_sets(&x, 3, 30, 0).unwrap();
        let r = max_empirical_error(&x, &x, &centers, 1.0, 5.0).unwrap();
        assert_eq!(r.max_error_by_budget, [0.0; 3]);
        assert_eq!(r.skipped, 0);
    }

    #[test]
    fn missing_far_point_has_positive_error() {
        let x = Dataset::unweighted(1, vec![0.0, 1.0, 2.0, 10.0]).unwrap();
        let s = x.select(&[0, 1, 2]);
        let c = vec![CenterSet::new(1, vec![100.0]).unwrap()];
        let r = max_empirical_error(&x, &s, &c, 1.0, 0.0).unwrap();
        assert!(r.max_error > 0.0);
    }

    #[test]
    fn zero_cost_center_sets_are_skipped() {
        let x = Dataset::unweighted(1, vec![3.0, 3.0]).unwrap();
        let c = vec![CenterSet::new(1, vec![3.0]).unwrap(), CenterSet::new(1, vec![0.0]).unwrap()];
        let r = max_empirical_error(&x, &x, &c, 2.0, 0.0).unwrap();
        assert_eq!(r.skipped, 3);
        assert_eq!(r.samples[0].errors, [None; 3]);
        assert_eq!(r.samples[1].errors, [Some(0.0); 3]);
    }

    #[test]
    fn sweeps_have_expected_shape() {
        let x = blobs(3, 100, 6);
        let mut cfg = SweepConfig::new(3, 1.0, 1, 4);
        cfg.center_sets = 20;
        let rows = size_error_sweep(&x, 6, &[90, 60], &cfg).unwrap();
        assert_eq!(rows.len(), 8);
        assert_eq!((rows[0].method, rows[0].target_size), (Method::Ours, 60));
        assert_eq!(rows[1].target_size, 90);
        assert!(rows.iter().all(|r| r.repetitions == 1 && r.variance == 0.0));
        assert_eq!(rows, size_error_sweep(&x, 6, &[60, 90], &cfg).unwrap());

        let rows = outlier_error_sweep(&x, &[0], 60, &cfg).unwrap();
        assert_eq!(rows.len(), 4);
        let ours = &rows[0];
        assert_eq!((ours.m, ours.target_size), (0, 60));
        assert_eq!(ours.mean_error_t0, ours.mean_error_m);
    }

    #[test]
    fn ours_beats_uniform_with_planted_outliers() {
        let x = blobs(4, 400, 12);
        let mut cfg = SweepConfig::new(3, 1.0, 3, 1);
        cfg.center_sets = 100;
        cfg.methods = vec![Method::Ours, Method::Us];
        let rows = size_error_sweep(&x, 12, &[112], &cfg).unwrap();
        assert!(rows[0].mean_error < rows[1].mean_error, "{rows:?}");
    }

    #[test]
    fn speedup_report_is_consistent() {
        let x = blobs(5, 300, 5);
        for solver in [Solver::Ll, Solver::Ls] {
            let r = speedup_benchmark(&x, solver, 3, 5, 105, 2).unwrap();
            assert_eq!(r.coreset_size, 105);
            let direct = robust_cost(&x, &r.centers_full, solver.z(), 5.0).unwrap().cost;
            assert_eq!(direct, r.cost);
            assert!(r.cost_ratio < 1.5, "{r:?}");
        }
    }

    #[test]
    fn suggestion_finds_planted_break() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let mut rows: Vec<Vec<f64>> = (0..500)
            .map(|_| loop {
                let p = vec![rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)];
                if p[0] * p[0] + p[1] * p[1] <= 1.0 {
                    break p;
                }
            })
            .collect();
        let null = Dataset::from_rows(&rows).unwrap();
        let s = suggest_outlier_count(&null, 1, 0).unwrap();
        assert!(s.m <= 5, "{}", s.m);
        for w in s.curve.windows(2) {
            assert!(w[0].distance >= w[1].distance);
        }
        for i in 0..17 {
            let a = i as f64;
            rows.push(vec![1e6 * a.cos(), 1e6 * a.sin()]);
        }
        let planted = Dataset::from_rows(&rows).unwrap();
        assert_eq!(suggest_outlier_count(&planted, 1, 0).unwrap().m, 17);
        let constant = Dataset::unweighted(2, vec![1.0; 20]).unwrap();
        assert_eq!(suggest_outlier_count(&constant, 1, 0).unwrap().m, 0);
    }
}
