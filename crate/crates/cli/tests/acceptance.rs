//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits with a
//! failure status if any criterion fails.
//!
//! Numeric arguments select criteria: `cargo test --test acceptance -- 6 7`.

use std::collections::BTreeMap;
use std::path::Path;
use std::process::{Command, ExitCode, Stdio};
use std::sync::OnceLock;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use robust_coreset::baselines::uniform_sampling_coreset;
use robust_coreset::coreset::two_point_coreset;
use robust_coreset::cost::{brute_force_robust_cost, robust_cost_integral, squared_distance};
use robust_coreset::data::{synth, SynthSpec};
use robust_coreset::decompose::{decompose_cluster, RingIndex};
use robust_coreset::eval::{
    max_empirical_error, outlier_error_sweep, size_error_sweep, speedup_benchmark, Method, Solver, SweepConfig,
    SweepRow,
};
use robust_coreset::{build_coreset, robust_cost, CenterSet, CoresetParams, Dataset};
use serde_json::Value;

// Tolerances and bounds.
const ORACLE_REL_TOL: f64 = 1e-9;
const ORACLE_INSTANCES: usize = 1_000;
const ORACLE_SECONDS: f64 = 5.0;
const INTEGRAL_REL_TOL: f64 = 1e-9;
const INTEGRAL_INSTANCES: usize = 500;
const INTEGRAL_SECONDS: f64 = 5.0;
const TWO_POINT_REL_TOL: f64 = 1e-9;
const TWO_POINT_GROUPS: usize = 10_000;
const DECOMPOSITION_CLUSTERS: usize = 200;
const MASS_ABS_TOL: f64 = 1e-6;
const MASS_CONFIGS: usize = 100;
const BENCH_N: usize = 20_000;
const BENCH_K: usize = 5;
const BENCH_M: usize = 200;
const BENCH_CENTER_SETS: usize = 500;
const BENCH_REPS: usize = 20;
const BENCH_ERROR_AT_800: f64 = 0.05;
const BENCH_SECONDS: f64 = 600.0;
const SIMULTANEITY_MAX: f64 = 0.08;
const SWEEP_M_VALUES: [usize; 4] = [100, 400, 800, 1200];
const SWEEP_EXTRA: usize = 800;
const SWEEP_SPREAD_MAX: f64 = 2.0;
const LOWER_BOUND_M: usize = 50;
const LOWER_BOUND_US_SIZE: usize = 10;
const LOWER_BOUND_US_MIN_ERROR: f64 = 0.5;
const SPEEDUP_N: usize = 100_000;
const SPEEDUP_M: usize = 500;
const SPEEDUP_MIN: f64 = 10.0;
const SPEEDUP_COST_RATIO_MAX: f64 = 1.05;
const SPEEDUP_SECONDS: f64 = 900.0;

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: String) -> Verdict {
    Verdict { pass, detail }
}

fn rel_diff(a: f64, b: f64) -> f64 {
    let scale = a.abs().max(b.abs());
    if scale == 0.0 {
        0.0
    } else {
        (a - b).abs() / scale
    }
}

fn random_points(rng: &mut ChaCha8Rng, n: usize, d: usize, integer: bool) -> Vec<f64> {
    (0..n * d)
        .map(|_| if integer { rng.random_range(-3..=3) as f64 } else { rng.random_range(-10.0..10.0) })
        .collect()
}

fn c1_oracle() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    let mut worst = 0.0f64;
    for i in 0..ORACLE_INSTANCES {
        let n = rng.random_range(1..=12);
        let d = rng.random_range(1..=3);
        let k = rng.random_range(1..=3);
        let m = rng.random_range(0..=3usize.min(n));
        let z = [1.0, 2.0, 3.0][rng.random_range(0..3)];
        let integer = i % 2 == 0;
        let x = Dataset::unweighted(d, random_points(&mut rng, n, d, integer)).unwrap();
        let c = CenterSet::new(d, random_points(&mut rng, k, d, integer)).unwrap();
        let fast = robust_cost(&x, &c, z, m as f64).unwrap().cost;
        let slow = brute_force_robust_cost(&x, &c, z, m).unwrap();
        worst = worst.max(rel_diff(fast, slow));
    }
    verdict(
        worst <= ORACLE_REL_TOL,
        format!("{ORACLE_INSTANCES} instances, max relative difference {worst:.2e} (tol {ORACLE_REL_TOL:.0e})"),
    )
}

fn c2_integral() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(102);
    let mut worst = 0.0f64;
    for i in 0..INTEGRAL_INSTANCES {
        let n = rng.random_range(1..=60);
        let d = rng.random_range(1..=3);
        let k = rng.random_range(1..=3);
        let z = if i % 4 == 3 { rng.random_range(1.0..4.0) } else { [1.0, 2.0, 3.0][i % 4] };
        let coords = random_points(&mut rng, n, d, i % 5 == 0);
        let weights: Vec<f64> = (0..n).map(|_| rng.random_range(0.1..5.0)).collect();
        let x = Dataset::new(d, coords, weights, (0..n as u64).collect()).unwrap();
        let c = CenterSet::new(d, random_points(&mut rng, k, d, false)).unwrap();
        let m = rng.random_range(0.0..1.0) * x.total_weight() * 0.9;
        let direct = robust_cost(&x, &c, z, m).unwrap().cost;
        let integral = robust_cost_integral(&x, &c, z, m, 1).unwrap();
        worst = worst.max(rel_diff(direct, integral));
    }
    verdict(
        worst <= INTEGRAL_REL_TOL,
        format!("{INTEGRAL_INSTANCES} weighted instances, max relative difference {worst:.2e} (tol {INTEGRAL_REL_TOL:.0e})"),
    )
}

fn c3_two_point() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(103);
    let (mut weight_mismatch, mut lambda_out, mut worst) = (0usize, 0usize, 0.0f64);
    for i in 0..TWO_POINT_GROUPS {
        let n = rng.random_range(1..=40);
        let d = rng.random_range(1..=4);
        let z = [1.0, 2.0, 3.0, 1.5][i % 4];
        let center: Vec<f64> = (0..d).map(|_| rng.random_range(-5.0..5.0)).collect();
        // Points in a shell, like the members of a group of rings.
        let (r_lo, r_hi) = if i % 10 == 0 { (2.0, 2.0) } else { (rng.random_range(0.0..4.0), rng.random_range(4.0..40.0)) };
        let mut coords = Vec::with_capacity(n * d);
        for _ in 0..n {
            let dir: Vec<f64> = (0..d).map(|_| rng.random_range(-1.0..1.0)).collect();
            let len = dir.iter().map(|v| v * v).sum::<f64>().sqrt().max(1e-9);
            let r = if r_lo == r_hi { r_lo } else { rng.random_range(r_lo..r_hi) };
            coords.extend(center.iter().zip(&dir).map(|(c, u)| c + r * u / len));
        }
        let weights: Vec<f64> = (0..n).map(|_| rng.random_range(0.05..10.0)).collect();
        let x = Dataset::new(d, coords, weights, (0..n as u64).collect()).unwrap();
        let members: Vec<usize> = (0..n).collect();
        let tp = two_point_coreset(&x, &members, &center, z).unwrap();

        let group_weight: f64 = members.iter().map(|&r| x.weight(r)).sum();
        let entries = tp.entries();
        let coreset_weight: f64 = entries.iter().map(|e| e.1).sum();
        if coreset_weight != group_weight {
            weight_mismatch += 1;
        }
        let dist_z = |r: usize| squared_distance(x.point(r), &center).sqrt().powf(z);
        let group_cost: f64 = members.iter().map(|&r| x.weight(r) * dist_z(r)).sum();
        let coreset_cost: f64 = entries.iter().map(|&(r, w)| w * dist_z(r)).sum();
        worst = worst.max(rel_diff(group_cost, coreset_cost));
        lambda_out += tp.lambdas.iter().filter(|l| !(0.0..=1.0).contains(*l)).count();
    }
    verdict(
        weight_mismatch == 0 && lambda_out == 0 && worst <= TWO_POINT_REL_TOL,
        format!(
            "{TWO_POINT_GROUPS} groups: {weight_mismatch} weight mismatches, {lambda_out} coefficients outside [0,1], \
             max cost relative difference {worst:.2e} (tol {TWO_POINT_REL_TOL:.0e})"
        ),
    )
}

fn c4_decomposition() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(104);
    let mut problems = Vec::new();
    let mut max_heavy_ratio = 0.0f64;
    for i in 0..DECOMPOSITION_CLUSTERS {
        let n = rng.random_range(1..=300);
        let d = rng.random_range(1..=3);
        let z = [1.0, 2.0][i % 2];
        let t = 1.0 / rng.random_range(1..=60) as f64;
        let center: Vec<f64> = (0..d).map(|_| rng.random_range(-5.0..5.0)).collect();
        let mut coords = Vec::with_capacity(n * d);
        for _ in 0..n {
            if rng.random_range(0..20) == 0 {
                coords.extend_from_slice(&center);
                continue;
            }
            let dir: Vec<f64> = (0..d).map(|_| rng.random_range(-1.0..1.0)).collect();
            let len = dir.iter().map(|v| v * v).sum::<f64>().sqrt().max(1e-9);
            let r = rng.random_range(-8.0..8.0f64).exp2();
            coords.extend(center.iter().zip(&dir).map(|(c, u)| c + r * u / len));
        }
        let weights: Vec<f64> = (0..n).map(|_| if i % 3 == 0 { rng.random_range(0.1..4.0) } else { 1.0 }).collect();
        let x = Dataset::new(d, coords, weights, (0..n as u64).collect()).unwrap();
        let members: Vec<usize> = (0..n).collect();
        let (rings, groups) = decompose_cluster(&x, &members, &center, 0, z, t).unwrap();

        let dist = |r: usize| squared_distance(x.point(r), &center).sqrt();
        let cluster_cost: f64 = members.iter().map(|&r| x.weight(r) * dist(r).powf(z)).sum();
        let mut seen = vec![0usize; n];
        for r in rings.iter().flat_map(|r| &r.members).chain(groups.iter().flat_map(|g| &g.members)) {
            seen[*r] += 1;
        }
        if seen.iter().any(|&c| c != 1) {
            problems.push(format!("cluster {i}: not a partition"));
        }
        for g in &groups {
            let cost: f64 = g.members.iter().map(|&r| x.weight(r) * dist(r).powf(z)).sum();
            if cost > t * cluster_cost * (1.0 + 1e-12) {
                problems.push(format!("cluster {i}: group cost {cost} > t * {cluster_cost}"));
            }
        }
        for ring in &rings {
            if let RingIndex::Finite(j) = ring.dyadic_index {
                let ok = ring.members.iter().all(|&r| ((j - 1) as f64).exp2() < dist(r) && dist(r) <= (j as f64).exp2());
                if !ok {
                    problems.push(format!("cluster {i}: ring {j} holds a point outside its interval"));
                }
            }
        }
        max_heavy_ratio = max_heavy_ratio.max(rings.len() as f64 * t);
        if rings.len() as f64 > 1.0 / t + 1e-9 {
            problems.push(format!("cluster {i}: {} heavy rings with t = {t}", rings.len()));
        }
    }
    verdict(
        problems.is_empty(),
        format!(
            "{DECOMPOSITION_CLUSTERS} clusters, {} violations, max heavy rings * t = {max_heavy_ratio:.3}{}",
            problems.len(),
            problems.first().map(|p| format!(" (first: {p})")).unwrap_or_default()
        ),
    )
}

fn c5_mass_and_size() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(105);
    let mut problems = Vec::new();
    let mut worst = 0.0f64;
    for i in 0..MASS_CONFIGS {
        let clusters = rng.random_range(1..=6);
        let per = rng.random_range(150..=500);
        let dim = rng.random_range(1..=6);
        let outliers = rng.random_range(0..=40);
        let mut spec = SynthSpec::new(clusters, per, dim, outliers, rng.random());
        spec.spread = rng.random_range(0.2..3.0);
        let x = synth(&spec).unwrap().dataset;
        let k = rng.random_range(1..=6usize);
        let m = rng.random_range(0..=outliers + 5);
        let z = [1.0, 2.0][i % 2];
        let n_target = m + rng.random_range(100..=400usize).min(x.len() / 2);
        let params = CoresetParams::new(k, z, m, n_target).with_seed(rng.random());
        match build_coreset(&x, &params) {
            Ok((s, _)) => {
                let err = (s.total_weight() - x.len() as f64).abs();
                worst = worst.max(err);
                if s.len() != n_target || err > MASS_ABS_TOL {
                    problems.push(format!("config {i}: size {} (want {n_target}), weight error {err:.2e}", s.len()));
                }
            }
            Err(e) => problems.push(format!("config {i}: {e}")),
        }
    }
    verdict(
        problems.is_empty(),
        format!(
            "{MASS_CONFIGS} configs, {} failures, max |w(S) - n| = {worst:.2e} (tol {MASS_ABS_TOL:.0e}){}",
            problems.len(),
            problems.first().map(|p| format!(" (first: {p})")).unwrap_or_default()
        ),
    )
}

fn benchmark_data() -> &'static Dataset {
    static DATA: OnceLock<Dataset> = OnceLock::new();
    DATA.get_or_init(|| {
        let per = (BENCH_N - BENCH_M) / BENCH_K;
        let x = synth(&SynthSpec::new(BENCH_K, per, 5, BENCH_M, 2024)).unwrap().dataset;
        assert_eq!(x.len(), BENCH_N);
        x
    })
}

fn size_sweep() -> &'static (Vec<SweepRow>, f64) {
    static ROWS: OnceLock<(Vec<SweepRow>, f64)> = OnceLock::new();
    ROWS.get_or_init(|| {
        let start = Instant::now();
        let x = benchmark_data();
        let mut cfg = SweepConfig::new(BENCH_K, 1.0, BENCH_REPS, 6);
        cfg.center_sets = BENCH_CENTER_SETS;
        let sizes = [BENCH_M + 300, BENCH_M + 800, BENCH_M + 1300];
        let rows = size_error_sweep(x, BENCH_M, &sizes, &cfg).unwrap();
        (rows, start.elapsed().as_secs_f64())
    })
}

fn c6_size_error() -> Verdict {
    let (rows, seconds) = size_sweep();
    let at = |m: Method, n: usize| rows.iter().find(|r| r.method == m && r.target_size == n).unwrap().mean_error;
    let ours_800 = at(Method::Ours, BENCH_M + 800);
    let mut beaten = Vec::new();
    let mut table = Vec::new();
    for n in [BENCH_M + 300, BENCH_M + 800, BENCH_M + 1300] {
        let ours = at(Method::Ours, n);
        let others: Vec<String> = [Method::Us, Method::Oaus, Method::Ss]
            .iter()
            .map(|&m| {
                if at(m, n) <= ours {
                    beaten.push(format!("{} at N={n}", m.as_str()));
                }
                format!("{} {:.4}", m.as_str(), at(m, n))
            })
            .collect();
        table.push(format!("N={n}: OURS {ours:.4}, {}", others.join(", ")));
    }
    verdict(
        ours_800 <= BENCH_ERROR_AT_800 && beaten.is_empty() && *seconds < BENCH_SECONDS,
        format!(
            "OURS at N=m+800 {ours_800:.4} (max {BENCH_ERROR_AT_800}); {}; {} baseline wins; {seconds:.1} s (limit {BENCH_SECONDS} s)",
            table.join("; "),
            beaten.len()
        ),
    )
}

fn c7_simultaneity() -> Verdict {
    let (rows, _) = size_sweep();
    let r = rows.iter().find(|r| r.method == Method::Ours && r.target_size == BENCH_M + 800).unwrap();
    let errs = [r.mean_error_t0, r.mean_error_half, r.mean_error_m];
    let worst = errs.iter().copied().fold(0.0, f64::max);
    verdict(
        worst <= SIMULTANEITY_MAX,
        format!(
            "OURS at N=m+800: t=0 {:.4}, t=m/2 {:.4}, t=m {:.4} (max {SIMULTANEITY_MAX})",
            errs[0], errs[1], errs[2]
        ),
    )
}

fn c8_outlier_sweep() -> Verdict {
    let x = benchmark_data();
    let mut cfg = SweepConfig::new(BENCH_K, 1.0, BENCH_REPS, 8);
    cfg.center_sets = BENCH_CENTER_SETS;
    cfg.methods = vec![Method::Ours];
    let rows = outlier_error_sweep(x, &SWEEP_M_VALUES, SWEEP_EXTRA, &cfg).unwrap();
    let errs: Vec<f64> = rows.iter().map(|r| r.mean_error).collect();
    let hi = errs.iter().copied().fold(0.0, f64::max);
    let lo = errs.iter().copied().fold(f64::INFINITY, f64::min);
    let spread = if lo > 0.0 { hi / lo } else if hi == 0.0 { 1.0 } else { f64::INFINITY };
    let listing: Vec<String> = rows.iter().map(|r| format!("m={} {:.5}", r.m, r.mean_error)).collect();
    verdict(
        spread <= SWEEP_SPREAD_MAX,
        format!("OURS mean error {}; max/min {spread:.3} (max {SWEEP_SPREAD_MAX})", listing.join(", ")),
    )
}

fn c9_lower_bound() -> Verdict {
    let m = LOWER_BOUND_M;
    let x = Dataset::unweighted(1, (0..=m).map(|i| i as f64).collect()).unwrap();
    let centers: Vec<CenterSet> = (1..=m).map(|i| CenterSet::new(1, vec![i as f64 - 0.5]).unwrap()).collect();
    let midpoint_costs_ok = centers.iter().all(|c| robust_cost(&x, c, 1.0, m as f64).unwrap().cost == 0.5);
    let mut us_min = f64::INFINITY;
    for seed in 0..100 {
        let us = uniform_sampling_coreset(&x, LOWER_BOUND_US_SIZE, seed).unwrap();
        us_min = us_min.min(max_empirical_error(&x, &us.points, &centers, 1.0, m as f64).unwrap().max_error);
    }
    let (ours, _) = build_coreset(&x, &CoresetParams::new(1, 1.0, m, m + 1).with_seed(3)).unwrap();
    let ours_err = max_empirical_error(&x, &ours.points, &centers, 1.0, m as f64).unwrap().max_error;
    verdict(
        midpoint_costs_ok && us_min > LOWER_BOUND_US_MIN_ERROR && ours_err == 0.0 && ours.len() == m + 1,
        format!(
            "midpoint costs all 0.5: {midpoint_costs_ok}; US size {LOWER_BOUND_US_SIZE} min error over 100 seeds \
             {us_min:.3} (must exceed {LOWER_BOUND_US_MIN_ERROR}); OURS size {} error {ours_err}",
            ours.len()
        ),
    )
}

fn c10_speedup() -> Verdict {
    let start = Instant::now();
    let per = (SPEEDUP_N - SPEEDUP_M) / BENCH_K;
    let x = synth(&SynthSpec::new(BENCH_K, per, 5, SPEEDUP_M, 77)).unwrap().dataset;
    let mut pass = true;
    let mut parts = Vec::new();
    for solver in [Solver::Ll, Solver::Ls] {
        let r = speedup_benchmark(&x, solver, BENCH_K, SPEEDUP_M, SPEEDUP_M + 500, 5).unwrap();
        let speedup = r.timings.t_x / r.timings.t_s;
        pass &= speedup >= SPEEDUP_MIN && r.cost_ratio <= SPEEDUP_COST_RATIO_MAX;
        parts.push(format!(
            "{solver:?}: T_X/T_S {speedup:.1} (min {SPEEDUP_MIN}), cost'/cost {:.4} (max {SPEEDUP_COST_RATIO_MAX}), \
             T_C {:.3} s T_S {:.4} s T_X {:.3} s",
            r.cost_ratio, r.timings.t_c, r.timings.t_s, r.timings.t_x
        ));
    }
    let seconds = start.elapsed().as_secs_f64();
    verdict(
        pass && seconds < SPEEDUP_SECONDS,
        format!("n={}; {}; {seconds:.1} s (limit {SPEEDUP_SECONDS} s)", x.len(), parts.join("; ")),
    )
}

/// Output files of a run, with JSON `timings` removed.
fn snapshot(dir: &Path) -> BTreeMap<String, String> {
    let mut out = BTreeMap::new();
    for entry in std::fs::read_dir(dir).unwrap() {
        let path = entry.unwrap().path();
        let name = path.file_name().unwrap().to_string_lossy().to_string();
        let text = std::fs::read_to_string(&path).unwrap();
        let text = if name.ends_with(".json") {
            let mut v: Value = serde_json::from_str(&text).unwrap();
            v.as_object_mut().unwrap().remove("timings");
            serde_json::to_string(&v).unwrap()
        } else {
            text
        };
        out.insert(name, text);
    }
    out
}

fn c11_determinism() -> Verdict {
    let bin = env!("CARGO_BIN_EXE_robust-coreset");
    let work = tempfile::tempdir().unwrap();
    let run = |args: &[&str], out: &Path| -> bool {
        Command::new(bin).current_dir(work.path()).arg("--out-dir").arg(out).args(args)
            .stdout(Stdio::null())
            .status()
            .unwrap()
            .success()
    };
    let spec = "clusters=3,per-cluster=200,dim=3,outliers=10,seed=5";
    assert!(run(&["gen-synth", "--synth", spec], Path::new("data")));
    let csv = "data/synth.csv";
    let commands: Vec<Vec<&str>> = vec![
        vec!["gen-synth", "--synth", spec],
        vec!["coreset", "--n", "150", "--k", "3", "--m", "10", "--z", "1", "--seed", "7", csv],
        vec!["coreset", "--n", "150", "--k", "3", "--m", "10", "--method", "ss", csv],
        vec!["coreset", "--n", "150", "--k", "3", "--m", "auto", "--synth", spec],
        vec!["eval", "--n", "150", "--k", "3", "--m", "10", "--z", "1", "--center-sets", "40", csv],
        vec!["sweep-size", "--k", "3", "--m", "10", "--sizes", "110,160", "--reps", "2", "--center-sets", "30", csv],
        vec!["sweep-m", "--k", "3", "--m-values", "0,10", "--extra", "100", "--reps", "2", "--center-sets", "30", csv],
        vec!["solve", "--k", "3", "--m", "10", "--solver", "ll", csv],
        vec!["solve", "--k", "3", "--m", "10", "--solver", "ls", "--pool-size", "30", csv],
        vec!["bench-speedup", "--k", "3", "--m", "10", "--n", "150", "--solver", "ll", csv],
        vec!["bench-speedup", "--k", "3", "--m", "10", "--n", "150", "--solver", "ls", csv],
        vec!["suggest-m", "--k", "3", csv],
        vec!["--threads", "2", "sweep-size", "--k", "3", "--m", "10", "--sizes", "120", "--reps", "1", csv],
    ];
    let mut mismatches = Vec::new();
    for (i, args) in commands.iter().enumerate() {
        let out = work.path().join(format!("run{i}"));
        let first = run(args, &out).then(|| snapshot(&out));
        std::fs::remove_dir_all(&out).ok();
        let second = run(args, &out).then(|| snapshot(&out));
        match (first, second) {
            (Some(a), Some(b)) if a == b && !a.is_empty() => {}
            _ => mismatches.push(args[0].to_string()),
        }
    }
    verdict(
        mismatches.is_empty(),
        format!("{} command lines rerun, {} differing or failing {:?}", commands.len(), mismatches.len(), mismatches),
    )
}

fn main() -> ExitCode {
    let criteria: [(u32, &str, fn() -> Verdict); 11] = [
        (1, "oracle equivalence", c1_oracle),
        (2, "integral identity", c2_integral),
        (3, "two-point identities", c3_two_point),
        (4, "decomposition invariants", c4_decomposition),
        (5, "mass conservation and exact sizing", c5_mass_and_size),
        (6, "size-error benchmark", c6_size_error),
        (7, "simultaneity over outlier budgets", c7_simultaneity),
        (8, "outlier-sweep stability", c8_outlier_sweep),
        (9, "lower-bound instance", c9_lower_bound),
        (10, "solver speedup", c10_speedup),
        (11, "determinism of every subcommand", c11_determinism),
    ];
    let selected: Vec<u32> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let mut failed = 0;
    for (id, name, check) in criteria {
        if !selected.is_empty() && !selected.contains(&id) {
            continue;
        }
        let start = Instant::now();
        let v = check();
        let seconds = start.elapsed().as_secs_f64();
        let runtime_ok = match id {
            1 => seconds < ORACLE_SECONDS,
            2 => seconds < INTEGRAL_SECONDS,
            _ => true,
        };
        let pass = v.pass && runtime_ok;
        failed += usize::from(!pass);
        println!(
            "{} [{id:>2}] {name}: {} [{seconds:.2} s]",
            if pass { "PASS" } else { "FAIL" },
            v.detail
        );
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    }
}
