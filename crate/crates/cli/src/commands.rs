use std::fs::File;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{bail, ensure, Context, Result};
use robust_coreset::coreset::build_coreset;
use robust_coreset::data::synth;
use robust_coreset::eval::{
    budgets, max_empirical_error, outlier_error_sweep, random_center_sets, size_error_sweep, speedup_benchmark,
    suggest_outlier_count, Method, Solver, SweepConfig, SweepRow,
};
use robust_coreset::io::{read_coreset_csv, write_coreset_csv};
use robust_coreset::solvers::{
    candidate_pool, lloyd_with_outliers, local_search_robust_median, robust_seed, DEFAULT_LLOYD_TOL,
    DEFAULT_SWAP_TOL,
};
use robust_coreset::{robust_cost, CoresetBuildReport, CoresetParams, Dataset, Provenance, WeightedCoreset};
use serde::Serialize;

use crate::config::{parse_synth, DataConfig, DataSource, OutlierCount, RunConfig};
use crate::output::{display, Output};
use crate::{Cli, Command, DataArgs, ProblemArgs};

const CENTER_DISTRIBUTION: &str = "uniform in the bounding box";

pub fn run(cli: Cli) -> Result<()> {
    let Cli { threads, out_dir, command } = cli;
    if threads == Some(0) {
        bail!("--threads must be at least 1");
    }
    match command {
        Command::Coreset { data, problem, size, method, seed } => {
            coreset(RunConfig::new("coreset", seed, threads, out_dir), data, problem, size, &method)
        }
        Command::Eval { data, problem, size, method, coreset, center_sets, seed } => {
            let cfg = RunConfig::new("eval", seed, threads, out_dir);
            eval(cfg, data, problem, size, &method, coreset, center_sets)
        }
        Command::SweepSize { data, problem, sizes, reps, center_sets, methods, seed } => {
            let cfg = RunConfig::new("sweep-size", seed, threads, out_dir);
            sweep_size(cfg, data, problem, sizes, reps, center_sets, &methods)
        }
        Command::SweepM { data, k, z, m_values, extra, reps, center_sets, methods, seed } => {
            let cfg = RunConfig::new("sweep-m", seed, threads, out_dir);
            sweep_m(cfg, data, k, z, m_values, extra, reps, center_sets, &methods)
        }
        Command::Solve { data, k, m, solver, coreset, max_iters, tol, pool_size, seed } => {
            let cfg = RunConfig::new("solve", seed, threads, out_dir);
            solve(cfg, data, k, &m, &solver, coreset, max_iters, tol, pool_size)
        }
        Command::BenchSpeedup { data, k, m, size, solver, seed } => {
            bench_speedup(RunConfig::new("bench-speedup", seed, threads, out_dir), data, k, &m, size, &solver)
        }
        Command::SuggestM { data, k, seed } => suggest_m(RunConfig::new("suggest-m", seed, threads, out_dir), data, k),
        Command::GenSynth { synth } => gen_synth(RunConfig::new("gen-synth", 0, threads, out_dir), &synth),
    }
}

fn data_config(args: DataArgs) -> Result<DataConfig> {
    let source = match (args.input, args.synth) {
        (Some(path), None) => DataSource::Csv(path),
        (None, Some(spec)) => DataSource::Synth(parse_synth(&spec)?),
        (None, None) => bail!("give an input CSV or --synth"),
        (Some(_), Some(_)) => bail!("give either an input CSV or --synth, not both"),
    };
    Ok(DataConfig {
        source,
        columns: args.columns,
        subsample: args.subsample,
        data_seed: args.data_seed,
        standardize: args.standardize,
    })
}

fn parse_method(s: &str) -> Result<Method> {
    Method::parse(s).with_context(|| format!("unknown method {s:?} (expected ours, us, oaus or ss)"))
}

fn parse_solver(s: &str) -> Result<Solver> {
    Solver::parse(s).with_context(|| format!("unknown solver {s:?} (expected ll or ls)"))
}

/// Checks the form of `--m` before any data is read.
fn check_m_syntax(m: &str) -> Result<()> {
    if m != "auto" {
        m.parse::<usize>().with_context(|| format!("--m must be a nonnegative integer or auto, got {m:?}"))?;
    }
    Ok(())
}

fn resolve_m(x: &Dataset, m: &str, k: usize, seed: u64) -> Result<OutlierCount> {
    let resolved = if m == "auto" { suggest_outlier_count(x, k, seed)?.m } else { m.parse()? };
    ensure!(resolved <= x.len(), "m={resolved} exceeds the number of points {}", x.len());
    Ok(OutlierCount { requested: m.to_string(), resolved })
}

fn check_k(x: &Dataset, k: usize) -> Result<()> {
    ensure!(k >= 1, "k must be at least 1");
    ensure!(k <= x.len(), "k={k} exceeds the number of points {}", x.len());
    Ok(())
}

fn read_coreset(path: &Path) -> Result<WeightedCoreset> {
    let file = File::open(path).with_context(|| format!("opening {}", path.display()))?;
    read_coreset_csv(file).with_context(|| format!("reading {}", path.display()))
}

fn report_written(out: &Output) {
    for p in out.written() {
        println!("wrote {}", display(p));
    }
}

#[derive(Serialize)]
struct CoresetSummary {
    method: Method,
    size: usize,
    total_weight: f64,
    outliers: usize,
    #[serde(flatten)]
    build: Option<CoresetBuildReport>,
}

fn coreset(mut cfg: RunConfig, data: DataArgs, problem: ProblemArgs, size: usize, method: &str) -> Result<()> {
    let method = parse_method(method)?;
    ensure!(size >= 1, "--n must be at least 1");
    check_m_syntax(&problem.m)?;
    let dc = data_config(data)?;
    cfg.data = Some(dc.clone());
    cfg.k = Some(problem.k);
    cfg.z = Some(problem.z);
    cfg.size = Some(size);
    cfg.method = Some(method.as_str().to_string());

    let x = dc.load()?;
    check_k(&x, problem.k)?;
    let m = resolve_m(&x, &problem.m, problem.k, cfg.seed)?;
    let params = CoresetParams::new(problem.k, problem.z, m.resolved, size).with_seed(cfg.seed);
    cfg.m = Some(m);
    let (s, build) = match method {
        Method::Ours => {
            let (s, report) = build_coreset(&x, &params)?;
            (s, Some(report))
        }
        other => (other.build(&x, &params)?, None),
    };
    let mut out = Output::new(cfg)?;
    let comment = out.comment();
    write_coreset_csv(out.create("coreset.csv")?, &s, Some(&comment))?;
    let summary = CoresetSummary {
        method,
        size: s.len(),
        total_weight: s.total_weight(),
        outliers: s.count(Provenance::Outlier),
        build,
    };
    out.json("coreset_report.json", &summary, &["build_seconds"])?;
    println!("{} coreset: {} points, total weight {}", method.as_str(), s.len(), s.total_weight());
    report_written(&out);
    Ok(())
}

#[derive(Serialize)]
struct EvalSummary {
    coreset_size: usize,
    coreset_weight: f64,
    budgets: [f64; 3],
    /// Maximum error over center sets at t = m.
    max_error: f64,
    max_error_by_budget: [f64; 3],
    skipped: usize,
}

#[derive(Serialize)]
struct ErrorRow {
    center_set_id: usize,
    error_t0: Option<f64>,
    error_half: Option<f64>,
    error_m: Option<f64>,
}

fn eval(
    mut cfg: RunConfig,
    data: DataArgs,
    problem: ProblemArgs,
    size: Option<usize>,
    method: &str,
    coreset_path: Option<PathBuf>,
    center_sets: usize,
) -> Result<()> {
    let method = parse_method(method)?;
    ensure!(center_sets >= 1, "--center-sets must be at least 1");
    ensure!(coreset_path.is_some() || size.is_some(), "give --n or --coreset");
    check_m_syntax(&problem.m)?;
    let dc = data_config(data)?;
    cfg.data = Some(dc.clone());
    cfg.k = Some(problem.k);
    cfg.z = Some(problem.z);
    cfg.center_sets = Some(center_sets);
    cfg.center_distribution = Some(CENTER_DISTRIBUTION);
    if coreset_path.is_some() {
        cfg.coreset = coreset_path.clone();
    } else {
        cfg.size = size;
        cfg.method = Some(method.as_str().to_string());
    }

    let x = dc.load()?;
    check_k(&x, problem.k)?;
    let m = resolve_m(&x, &problem.m, problem.k, cfg.seed)?;
    let mv = m.resolved;
    cfg.m = Some(m);
    let s = match &coreset_path {
        Some(p) => read_coreset(p)?,
        None => {
            let params = CoresetParams::new(problem.k, problem.z, mv, size.expect("checked")).with_seed(cfg.seed);
            method.build(&x, &params)?
        }
    };
    ensure!(s.points.dim() == x.dim(), "coreset dimension {} differs from data dimension {}", s.points.dim(), x.dim());
    let centers = random_center_sets(&x, problem.k, center_sets, cfg.seed)?;
    let report = max_empirical_error(&x, &s.points, &centers, problem.z, mv as f64)?;
    let mut out = Output::new(cfg)?;
    let rows: Vec<ErrorRow> = report
        .samples
        .iter()
        .map(|e| ErrorRow {
            center_set_id: e.center_set_id,
            error_t0: e.errors[0],
            error_half: e.errors[1],
            error_m: e.errors[2],
        })
        .collect();
    out.csv_rows("eval_errors.csv", &rows)?;
    let summary = EvalSummary {
        coreset_size: s.len(),
        coreset_weight: s.total_weight(),
        budgets: budgets(mv as f64),
        max_error: report.max_error,
        max_error_by_budget: report.max_error_by_budget,
        skipped: report.skipped,
    };
    out.json("eval_report.json", &summary, &[])?;
    println!("empirical error {} over {center_sets} center sets ({} skipped)", report.max_error, report.skipped);
    report_written(&out);
    Ok(())
}

fn print_rows(rows: &[SweepRow]) {
    println!("{:<5} {:>7} {:>6} {:>12} {:>12} {:>12}", "method", "N", "m", "mean", "max", "variance");
    for r in rows {
        println!(
            "{:<5} {:>7} {:>6} {:>12.6} {:>12.6} {:>12.3e}",
            r.method.as_str(),
            r.target_size,
            r.m,
            r.mean_error,
            r.max_error,
            r.variance
        );
    }
}

fn sweep_config(k: usize, z: f64, reps: usize, center_sets: usize, seed: u64, methods: &[String]) -> Result<SweepConfig> {
    ensure!(reps >= 1, "--reps must be at least 1");
    ensure!(center_sets >= 1, "--center-sets must be at least 1");
    ensure!(!methods.is_empty(), "give at least one method");
    let mut cfg = SweepConfig::new(k, z, reps, seed);
    cfg.center_sets = center_sets;
    cfg.methods = methods.iter().map(|m| parse_method(m)).collect::<Result<_>>()?;
    Ok(cfg)
}

fn sweep_size(
    mut cfg: RunConfig,
    data: DataArgs,
    problem: ProblemArgs,
    sizes: Vec<usize>,
    reps: usize,
    center_sets: usize,
    methods: &[String],
) -> Result<()> {
    let sweep = sweep_config(problem.k, problem.z, reps, center_sets, cfg.seed, methods)?;
    check_m_syntax(&problem.m)?;
    let dc = data_config(data)?;
    cfg.data = Some(dc.clone());
    cfg.k = Some(problem.k);
    cfg.z = Some(problem.z);
    cfg.reps = Some(reps);
    cfg.center_sets = Some(center_sets);
    cfg.center_distribution = Some(CENTER_DISTRIBUTION);
    cfg.methods = Some(sweep.methods.iter().map(|m| m.as_str().to_string()).collect());

    let x = dc.load()?;
    check_k(&x, problem.k)?;
    let m = resolve_m(&x, &problem.m, problem.k, cfg.seed)?;
    let mv = m.resolved;
    cfg.m = Some(m);
    let sizes = if sizes.is_empty() { vec![mv + 300, mv + 800, mv + 1300] } else { sizes };
    for &n in &sizes {
        ensure!(n > mv && n <= x.len(), "size {n} must lie in ({mv}, {}]", x.len());
    }
    cfg.sizes = Some(sizes.clone());
    let rows = size_error_sweep(&x, mv, &sizes, &sweep)?;
    let mut out = Output::new(cfg)?;
    out.csv_rows("sweep_size.csv", &rows)?;
    out.json("sweep_size.json", &rows, &[])?;
    print_rows(&rows);
    report_written(&out);
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn sweep_m(
    mut cfg: RunConfig,
    data: DataArgs,
    k: usize,
    z: f64,
    m_values: Vec<usize>,
    extra: usize,
    reps: usize,
    center_sets: usize,
    methods: &[String],
) -> Result<()> {
    let sweep = sweep_config(k, z, reps, center_sets, cfg.seed, methods)?;
    ensure!(extra >= 1, "--extra must be at least 1");
    let dc = data_config(data)?;
    cfg.data = Some(dc.clone());
    cfg.k = Some(k);
    cfg.z = Some(z);
    cfg.m_values = Some(m_values.clone());
    cfg.extra = Some(extra);
    cfg.reps = Some(reps);
    cfg.center_sets = Some(center_sets);
    cfg.center_distribution = Some(CENTER_DISTRIBUTION);
    cfg.methods = Some(sweep.methods.iter().map(|m| m.as_str().to_string()).collect());

    let x = dc.load()?;
    check_k(&x, k)?;
    for &m in &m_values {
        ensure!(m + extra <= x.len(), "m + extra = {} exceeds the number of points {}", m + extra, x.len());
    }
    let rows = outlier_error_sweep(&x, &m_values, extra, &sweep)?;
    let mut out = Output::new(cfg)?;
    out.csv_rows("sweep_m.csv", &rows)?;
    out.json("sweep_m.json", &rows, &[])?;
    print_rows(&rows);
    report_written(&out);
    Ok(())
}

#[derive(Serialize)]
struct SolveSummary {
    solver: Solver,
    z: f64,
    m: usize,
    input_size: usize,
    centers: Vec<Vec<f64>>,
    cost_on_input: f64,
    /// Robust cost of the centers on the full data.
    cost_on_data: f64,
    iterations: usize,
    cost_trace: Vec<f64>,
    wall_seconds: f64,
}

#[allow(clippy::too_many_arguments)]
fn solve(
    mut cfg: RunConfig,
    data: DataArgs,
    k: usize,
    m: &str,
    solver: &str,
    coreset_path: Option<PathBuf>,
    max_iters: usize,
    tol: Option<f64>,
    pool_size: usize,
) -> Result<()> {
    let solver = parse_solver(solver)?;
    check_m_syntax(m)?;
    ensure!(pool_size >= 1, "--pool-size must be at least 1");
    if let Some(t) = tol {
        ensure!(t.is_finite() && t >= 0.0, "--tol must be nonnegative");
    }
    let dc = data_config(data)?;
    let z = solver.z();
    let tol = tol.unwrap_or(match solver {
        Solver::Ll => DEFAULT_LLOYD_TOL,
        Solver::Ls => DEFAULT_SWAP_TOL,
    });
    cfg.data = Some(dc.clone());
    cfg.k = Some(k);
    cfg.z = Some(z);
    cfg.solver = Some(format!("{solver:?}").to_uppercase());
    cfg.coreset = coreset_path.clone();
    cfg.max_iters = Some(max_iters);
    cfg.tol = Some(tol);
    if solver == Solver::Ls {
        cfg.pool_size = Some(pool_size);
    }

    let x = dc.load()?;
    check_k(&x, k)?;
    let m = resolve_m(&x, m, k, cfg.seed)?;
    let mv = m.resolved as f64;
    cfg.m = Some(m);
    let input = match &coreset_path {
        Some(p) => read_coreset(p)?.points,
        None => x.clone(),
    };
    ensure!(input.dim() == x.dim(), "coreset dimension {} differs from data dimension {}", input.dim(), x.dim());
    check_k(&input, k)?;
    let result = match solver {
        Solver::Ll => {
            let init = robust_seed(&input, k, mv, 2.0, cfg.seed)?;
            lloyd_with_outliers(&input, &init, 2.0, mv, max_iters, tol)?
        }
        Solver::Ls => {
            let pool = candidate_pool(&x, pool_size.min(x.len()), cfg.seed)?;
            local_search_robust_median(&input, &pool, k, mv, 1.0, max_iters, tol)?
        }
    };
    let cost_on_data = robust_cost(&x, &result.centers, z, mv)?.cost;
    let summary = SolveSummary {
        solver,
        z,
        m: mv as usize,
        input_size: input.len(),
        centers: result.centers.to_rows(),
        cost_on_input: result.cost_on_input,
        cost_on_data,
        iterations: result.iterations,
        cost_trace: result.cost_trace,
        wall_seconds: result.wall_seconds,
    };
    let mut out = Output::new(cfg)?;
    out.json("solve.json", &summary, &["wall_seconds"])?;
    println!("cost on data {cost_on_data} after {} iterations", summary.iterations);
    report_written(&out);
    Ok(())
}

fn bench_speedup(mut cfg: RunConfig, data: DataArgs, k: usize, m: &str, size: usize, solver: &str) -> Result<()> {
    let solver = parse_solver(solver)?;
    check_m_syntax(m)?;
    let dc = data_config(data)?;
    cfg.data = Some(dc.clone());
    cfg.k = Some(k);
    cfg.z = Some(solver.z());
    cfg.size = Some(size);
    cfg.solver = Some(format!("{solver:?}").to_uppercase());

    let x = dc.load()?;
    check_k(&x, k)?;
    let m = resolve_m(&x, m, k, cfg.seed)?;
    let mv = m.resolved;
    cfg.m = Some(m);
    ensure!(size > mv && size <= x.len(), "--n must lie in ({mv}, {}]", x.len());
    let report = speedup_benchmark(&x, solver, k, mv, size, cfg.seed)?;
    let mut out = Output::new(cfg)?;
    out.json("speedup.json", &report, &["timings"])?;
    let t = &report.timings;
    println!(
        "cost {} cost' {} (ratio {:.4}); T_C {:.3}s T_S {:.3}s T_X {:.3}s (T_X/T_S {:.1})",
        report.cost,
        report.cost_prime,
        report.cost_ratio,
        t.t_c,
        t.t_s,
        t.t_x,
        t.t_x / t.t_s
    );
    report_written(&out);
    Ok(())
}

#[derive(Serialize)]
struct Suggestion {
    m: usize,
    ratio: f64,
    n: usize,
}

fn suggest_m(mut cfg: RunConfig, data: DataArgs, k: usize) -> Result<()> {
    let dc = data_config(data)?;
    cfg.data = Some(dc.clone());
    cfg.k = Some(k);
    let x = dc.load()?;
    check_k(&x, k)?;
    let s = suggest_outlier_count(&x, k, cfg.seed)?;
    let mut out = Output::new(cfg)?;
    out.csv_rows("suggest_m_curve.csv", &s.curve)?;
    out.json("suggest_m.json", &Suggestion { m: s.m, ratio: s.ratio, n: x.len() }, &[])?;
    println!("suggested m = {}", s.m);
    report_written(&out);
    Ok(())
}

#[derive(Serialize)]
struct Truth {
    centers: Vec<Vec<f64>>,
    outlier_rows: Vec<usize>,
}

fn gen_synth(mut cfg: RunConfig, spec: &str) -> Result<()> {
    let spec = parse_synth(spec)?;
    cfg.seed = spec.seed;
    cfg.data = Some(DataConfig {
        source: DataSource::Synth(spec.clone()),
        columns: None,
        subsample: None,
        data_seed: 0,
        standardize: false,
    });
    let s = synth(&spec)?;
    let mut out = Output::new(cfg)?;
    let comment = out.comment();
    let mut file = out.create("synth.csv")?;
    writeln!(file, "# {comment}")?;
    let mut w = csv::Writer::from_writer(file);
    w.write_record((0..spec.dim).map(|j| format!("x{j}")))?;
    for p in s.dataset.points() {
        w.write_record(p.iter().map(f64::to_string))?;
    }
    w.flush()?;
    out.json(
        "synth_truth.json",
        &Truth { centers: s.centers.to_rows(), outlier_rows: s.outlier_rows.clone() },
        &[],
    )?;
    println!("{} points in {} dimensions", s.dataset.len(), spec.dim);
    report_written(&out);
    Ok(())
}
