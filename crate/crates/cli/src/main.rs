//! `scpda`: run optimizers, benchmark them across seeds, compute reference
//! optima and run the self-checks.
//!
//! Exit codes: 0 success, 1 check or benchmark failure, 2 usage or input
//! error.

use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context};
use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;
use serde::Serialize;

use scpda_core::analysis::SlopeFit;
use scpda_core::verify::{run_all, run_suite, CheckResult, VerifyOptions, SUITES};
use scpda_core::*;

#[derive(Parser, Debug)]
#[command(
    name = "scpda",
    version,
    about = "Averaging methods for strongly convex optimization"
)]
struct Cli {
    /// Run one verification suite (or `all`) and exit; same as `verify --suite`.
    #[arg(long, value_name = "SUITE")]
    verify: Option<String>,

    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run one algorithm and write its trace as CSV.
    Run(RunArgs),
    /// Run every algorithm x seed cell and write traces plus a JSON summary.
    Bench(BenchArgs),
    /// Compute and print a certified reference optimum as JSON.
    Reference(ProblemArgs),
    /// Run the invariant suites and print a pass/fail table.
    Verify(VerifyArgs),
}

#[derive(Args, Debug, Clone)]
struct ProblemArgs {
    /// libsvm:PATH | synth-svm:n,d,seed | quad:d
    #[arg(long)]
    problem: String,
    /// Strong convexity parameter.
    #[arg(long, default_value_t = 1.0)]
    mu: f64,
    /// free | ball:R | box:lo:hi
    #[arg(long, default_value = "free")]
    set: String,
    /// Use a uniform sample of this many examples from a LibSVM file.
    #[arg(long)]
    subsample: Option<usize>,
    /// Feature dimension for a LibSVM file, when subsets must agree.
    #[arg(long)]
    dim: Option<usize>,
    /// Tolerance for certifying the reference optimum.
    #[arg(long, default_value_t = 1e-10)]
    ref_tol: f64,
}

#[derive(Args, Debug)]
struct RunArgs {
    #[command(flatten)]
    problem: ProblemArgs,
    #[arg(long)]
    algo: Algorithm,
    /// linear (a_t = t) or constant (a_t = 1).
    #[arg(long, default_value = "linear")]
    schedule: ScheduleKind,
    #[arg(long, default_value_t = 10_000)]
    iters: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Sample one example per step instead of the full subgradient.
    #[arg(long)]
    stochastic: bool,
    /// Comma-separated starting point (default zero; projected onto the set).
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    init: Option<Vec<f64>>,
    /// Record every iteration instead of log-spaced checkpoints.
    #[arg(long)]
    every: bool,
    /// Output directory; the trace goes to stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct BenchArgs {
    #[command(flatten)]
    problem: ProblemArgs,
    /// Comma-separated algorithms.
    #[arg(long, value_delimiter = ',', default_value = "scpda,gda,pegasos,papsg,scrda")]
    algo: Vec<Algorithm>,
    #[arg(long, default_value = "linear")]
    schedule: ScheduleKind,
    #[arg(long, default_value_t = 10_000)]
    iters: u64,
    /// Number of seeds, counting up from --seed.
    #[arg(long, default_value_t = 5)]
    seeds: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    stochastic: bool,
    /// Comma-separated starting point (default zero; projected onto the set).
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    init: Option<Vec<f64>>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    /// One of the suite names, or `all`.
    #[arg(long, default_value = "all")]
    suite: String,
    /// Flip a sign inside the GDA update so the bound check must fail.
    #[arg(long, hide = true)]
    inject_fault: bool,
}

/// An error carrying its exit code.
struct Failure {
    code: u8,
    error: anyhow::Error,
}

fn input(error: anyhow::Error) -> Failure {
    Failure { code: 2, error }
}

fn failed(error: anyhow::Error) -> Failure {
    Failure { code: 1, error }
}

type CliResult<T> = std::result::Result<T, Failure>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let outcome = match (cli.verify, cli.command) {
        (Some(suite), None) => cmd_verify(&VerifyArgs {
            suite,
            inject_fault: false,
        }),
        (None, Some(Command::Run(a))) => cmd_run(&a),
        (None, Some(Command::Bench(a))) => cmd_bench(&a),
        (None, Some(Command::Reference(a))) => cmd_reference(&a),
        (None, Some(Command::Verify(a))) => cmd_verify(&a),
        (Some(_), Some(_)) => Err(input(anyhow!("--verify cannot be combined with a subcommand"))),
        (None, None) => Err(input(anyhow!("no command given; try --help"))),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {:#}", f.error);
            ExitCode::from(f.code)
        }
    }
}

struct Loaded {
    problem: ProblemInstance,
    set: FeasibleSet,
    id: String,
}

fn parse_set(spec: &str, dim: usize) -> anyhow::Result<FeasibleSet> {
    let parts: Vec<&str> = spec.split(':').collect();
    let num = |s: &str| {
        s.parse::<f64>()
            .with_context(|| format!("bad number '{s}' in --set {spec}"))
    };
    Ok(match parts[..] {
        ["free"] => FeasibleSet::WholeSpace,
        ["ball", r] => FeasibleSet::l2_ball(num(r)?)?,
        ["box", lo, hi] => FeasibleSet::uniform_box(dim, num(lo)?, num(hi)?)?,
        _ => bail!("invalid --set '{spec}' (expected free, ball:R or box:lo:hi)"),
    })
}

fn load_problem(args: &ProblemArgs) -> anyhow::Result<Loaded> {
    if !(args.mu > 0.0 && args.mu.is_finite()) {
        bail!("--mu must be positive, got {}", args.mu);
    }
    let (kind, rest) = args.problem.split_once(':').ok_or_else(|| {
        anyhow!(
            "invalid --problem '{}' (expected libsvm:PATH, synth-svm:n,d,seed or quad:d)",
            args.problem
        )
    })?;
    if (args.subsample.is_some() || args.dim.is_some()) && kind != "libsvm" {
        bail!("--subsample and --dim only apply to libsvm problems");
    }
    let ints = |s: &str| -> anyhow::Result<Vec<u64>> {
        s.split(',')
            .map(|x| {
                x.trim()
                    .parse::<u64>()
                    .with_context(|| format!("bad integer '{x}' in --problem"))
            })
            .collect()
    };
    let problem = match kind {
        "libsvm" => {
            let path = Path::new(rest);
            let data =
                load_libsvm(path).with_context(|| format!("cannot read dataset '{}'", path.display()))?;
            let data = match args.subsample {
                Some(n) => subsample(&data, n, 0)?,
                None => data,
            };
            data.to_problem(args.mu, args.dim)?
        }
        "synth-svm" => match ints(rest)?[..] {
            [n, d, seed] => make_synthetic_svm(n as usize, d as usize, 1.0, args.mu, seed)?.problem,
            _ => bail!("synth-svm expects n,d,seed"),
        },
        "quad" => match ints(rest)?[..] {
            [d] => random_quadratic(d as usize, args.mu, 0)?,
            _ => bail!("quad expects a dimension"),
        },
        other => bail!("unknown problem kind '{other}'"),
    };
    let set = parse_set(&args.set, problem.dim())?;
    Ok(Loaded {
        problem,
        set,
        id: args.problem.clone(),
    })
}

fn checked_init(init: &Option<Vec<f64>>, loaded: &Loaded) -> anyhow::Result<Option<Vec<f64>>> {
    match init {
        Some(w) if w.len() != loaded.problem.dim() => {
            bail!(
                "--init has {} values, problem dimension is {}",
                w.len(),
                loaded.problem.dim()
            )
        }
        other => Ok(other.clone()),
    }
}

fn reference_for(loaded: &Loaded, tol: f64) -> anyhow::Result<ReferenceSolution> {
    let r = reference_optimum(&loaded.problem, &loaded.set, tol)?;
    if !r.certified {
        eprintln!(
            "warning: reference not certified to {tol:e} (best residual {:.3e}); gaps are relative to it",
            r.residual
        );
    }
    Ok(r)
}

fn trace_file_name(algo: Algorithm, schedule: ScheduleKind, seed: u64) -> String {
    format!("{algo}_{schedule}_seed{seed}.csv")
}

fn cmd_run(args: &RunArgs) -> CliResult<()> {
    if args.iters == 0 {
        return Err(input(anyhow!("--iters must be at least 1")));
    }
    let loaded = load_problem(&args.problem).map_err(input)?;
    let reference = reference_for(&loaded, args.problem.ref_tol).map_err(input)?;
    let mut spec = RunSpec::new(args.algo, args.iters)
        .with_schedule(args.schedule)
        .with_set(loaded.set.clone());
    spec.seed = args.seed;
    spec.problem_id = loaded.id.clone();
    spec.init = checked_init(&args.init, &loaded).map_err(input)?;
    if args.stochastic {
        spec = spec.stochastic(args.seed);
    }
    if args.every {
        spec = spec.with_checkpoints(Checkpoints::Every);
    }
    let trace = run(&loaded.problem, &reference, &spec)
        .map_err(|e| failed(e.into()))?
        .trace;

    match &args.out {
        Some(dir) => {
            fs::create_dir_all(dir)
                .with_context(|| format!("cannot create {}", dir.display()))
                .map_err(input)?;
            let path = dir.join(trace_file_name(args.algo, args.schedule, args.seed));
            write_trace(&path, &trace).map_err(input)?;
            if let Some(last) = trace.final_record() {
                eprintln!(
                    "{}: t={} gap={:e} -> {}",
                    args.algo,
                    last.t,
                    last.gap,
                    path.display()
                );
            }
        }
        None => {
            emit(&format!("{CSV_HEADER}\n{}", trace.csv_body(true).trim_end()))?;
        }
    }
    Ok(())
}

/// Prints to stdout; a closed pipe is not an error worth a panic.
fn emit(text: &str) -> CliResult<()> {
    match writeln!(io::stdout().lock(), "{text}") {
        Err(e) if e.kind() != io::ErrorKind::BrokenPipe => Err(input(e.into())),
        _ => Ok(()),
    }
}

fn write_trace(path: &Path, trace: &RunTrace) -> anyhow::Result<()> {
    let file = File::create(path).with_context(|| format!("cannot write {}", path.display()))?;
    let mut w = BufWriter::new(file);
    trace.write_csv(&mut w, true)?;
    w.flush()?;
    Ok(())
}

#[derive(Serialize)]
struct CellSummary {
    algorithm: String,
    seed: u64,
    ok: bool,
    final_gap: Option<f64>,
    error: Option<String>,
    file: Option<String>,
}

#[derive(Serialize)]
struct SlopeSummary {
    window: (u64, u64),
    slope: f64,
    r_squared: f64,
}

#[derive(Serialize)]
struct AlgorithmSummary {
    algorithm: String,
    seeds: Vec<u64>,
    final_gaps: Vec<f64>,
    mean_final_gap: Option<f64>,
    min_final_gap: Option<f64>,
    max_final_gap: Option<f64>,
    variance_final_gap: Option<f64>,
    /// Fit of the seed-mean gap over [iters/100, iters]; absent when the
    /// window is too short or the budget below 200 iterations.
    slope: Option<SlopeSummary>,
}

#[derive(Serialize)]
struct BenchSummary {
    problem: String,
    mu: f64,
    set: String,
    schedule: String,
    iters: u64,
    stochastic: bool,
    f_star: f64,
    reference_residual: f64,
    reference_certified: bool,
    algorithms: Vec<AlgorithmSummary>,
    cells: Vec<CellSummary>,
    failed_cells: usize,
}

fn mean_curve(traces: &[&RunTrace]) -> Vec<(u64, f64)> {
    let mut mean: Vec<(u64, f64)> = traces[0].gap_points().iter().map(|&(t, _)| (t, 0.0)).collect();
    for tr in traces {
        for (m, (_, g)) in mean.iter_mut().zip(tr.gap_points()) {
            m.1 += g / traces.len() as f64;
        }
    }
    mean
}

fn fit_window(curve: &[(u64, f64)], iters: u64, floor: f64) -> Option<(SlopeFit, (u64, u64))> {
    let lo = iters / 100;
    if lo == 0 {
        return None;
    }
    loglog_slope(&floor_gaps(curve, floor), lo, iters)
        .ok()
        .map(|f| (f, (lo, iters)))
}

fn cmd_bench(args: &BenchArgs) -> CliResult<()> {
    if args.iters == 0 {
        return Err(input(anyhow!("--iters must be at least 1")));
    }
    if args.seeds == 0 || args.algo.is_empty() {
        return Err(input(anyhow!("need at least one algorithm and one seed")));
    }
    let loaded = load_problem(&args.problem).map_err(input)?;
    let reference = reference_for(&loaded, args.problem.ref_tol).map_err(input)?;
    fs::create_dir_all(&args.out)
        .with_context(|| format!("cannot create {}", args.out.display()))
        .map_err(input)?;

    let init = checked_init(&args.init, &loaded).map_err(input)?;
    let cells: Vec<(Algorithm, u64)> = args
        .algo
        .iter()
        .flat_map(|&a| (args.seed..args.seed + args.seeds).map(move |s| (a, s)))
        .collect();
    let results: Vec<std::result::Result<RunTrace, String>> = cells
        .par_iter()
        .map(|&(algo, seed)| {
            let mut spec = RunSpec::new(algo, args.iters)
                .with_schedule(args.schedule)
                .with_set(loaded.set.clone());
            spec.seed = seed;
            spec.problem_id = loaded.id.clone();
            spec.init = init.clone();
            if args.stochastic {
                spec = spec.stochastic(seed);
            }
            run(&loaded.problem, &reference, &spec)
                .map(|o| o.trace)
                .map_err(|e| e.to_string())
        })
        .collect();

    // single writer for all output files
    let combined_path = args.out.join("traces.csv");
    let mut combined = BufWriter::new(
        File::create(&combined_path)
            .with_context(|| format!("cannot write {}", combined_path.display()))
            .map_err(input)?,
    );
    writeln!(combined, "{CSV_HEADER}").map_err(|e| input(e.into()))?;
    let mut cell_summaries = Vec::new();
    for (&(algo, seed), result) in cells.iter().zip(&results) {
        let summary = match result {
            Ok(trace) => {
                let name = trace_file_name(algo, args.schedule, seed);
                write_trace(&args.out.join(&name), trace).map_err(input)?;
                trace
                    .write_csv(&mut combined, false)
                    .map_err(|e| input(e.into()))?;
                CellSummary {
                    algorithm: algo.to_string(),
                    seed,
                    ok: true,
                    final_gap: trace.final_record().map(|r| r.gap),
                    error: None,
                    file: Some(name),
                }
            }
            Err(e) => CellSummary {
                algorithm: algo.to_string(),
                seed,
                ok: false,
                final_gap: None,
                error: Some(e.clone()),
                file: None,
            },
        };
        cell_summaries.push(summary);
    }
    combined.flush().map_err(|e| input(e.into()))?;

    let algorithms = args
        .algo
        .iter()
        .map(|&algo| {
            let ok: Vec<(u64, &RunTrace)> = cells
                .iter()
                .zip(&results)
                .filter(|((a, _), _)| *a == algo)
                .filter_map(|((_, s), r)| r.as_ref().ok().map(|t| (*s, t)))
                .collect();
            let gaps: Vec<f64> = ok
                .iter()
                .filter_map(|(_, t)| t.final_record().map(|r| r.gap))
                .collect();
            let n = gaps.len() as f64;
            let mean = (!gaps.is_empty()).then(|| gaps.iter().sum::<f64>() / n);
            let traces: Vec<&RunTrace> = ok.iter().map(|(_, t)| *t).collect();
            let slope = (!traces.is_empty())
                .then(|| fit_window(&mean_curve(&traces), args.iters, reference.residual))
                .flatten()
                .map(|(f, window)| SlopeSummary {
                    window,
                    slope: f.slope,
                    r_squared: f.r_squared,
                });
            AlgorithmSummary {
                algorithm: algo.to_string(),
                seeds: ok.iter().map(|(s, _)| *s).collect(),
                mean_final_gap: mean,
                min_final_gap: gaps.iter().copied().reduce(f64::min),
                max_final_gap: gaps.iter().copied().reduce(f64::max),
                variance_final_gap: mean.map(|m| gaps.iter().map(|g| (g - m) * (g - m)).sum::<f64>() / n),
                final_gaps: gaps,
                slope,
            }
        })
        .collect();

    let failed_cells = cell_summaries.iter().filter(|c| !c.ok).count();
    let summary = BenchSummary {
        problem: loaded.id.clone(),
        mu: args.problem.mu,
        set: args.problem.set.clone(),
        schedule: args.schedule.to_string(),
        iters: args.iters,
        stochastic: args.stochastic,
        f_star: reference.f_star,
        reference_residual: reference.residual,
        reference_certified: reference.certified,
        algorithms,
        cells: cell_summaries,
        failed_cells,
    };
    let summary_path = args.out.join("summary.json");
    let text = serde_json::to_string_pretty(&summary).map_err(|e| input(e.into()))?;
    fs::write(&summary_path, text + "\n")
        .with_context(|| format!("cannot write {}", summary_path.display()))
        .map_err(input)?;

    for a in &summary.algorithms {
        let fmt = |v: Option<f64>| v.map_or("-".to_string(), |x| format!("{x:.3e}"));
        eprintln!(
            "{:<8} seeds {:>2}  mean gap {}  min {}  max {}  slope {}",
            a.algorithm,
            a.seeds.len(),
            fmt(a.mean_final_gap),
            fmt(a.min_final_gap),
            fmt(a.max_final_gap),
            a.slope
                .as_ref()
                .map_or("-".to_string(), |s| format!("{:.3}", s.slope)),
        );
    }
    if failed_cells > 0 {
        return Err(failed(anyhow!(
            "{failed_cells} of {} cells failed; see {}",
            cells.len(),
            summary_path.display()
        )));
    }
    Ok(())
}

#[derive(Serialize)]
struct ReferenceReport {
    problem: String,
    mu: f64,
    f_star: f64,
    residual: f64,
    certified: bool,
    method: String,
    iterations: u64,
    w_star: Vec<f64>,
}

fn cmd_reference(args: &ProblemArgs) -> CliResult<()> {
    let loaded = load_problem(args).map_err(input)?;
    let r = reference_optimum(&loaded.problem, &loaded.set, args.ref_tol).map_err(|e| input(e.into()))?;
    let report = ReferenceReport {
        problem: loaded.id,
        mu: args.mu,
        f_star: r.f_star,
        residual: r.residual,
        certified: r.certified,
        method: format!("{:?}", r.method),
        iterations: r.iterations,
        w_star: r.w_star,
    };
    let text = serde_json::to_string_pretty(&report).map_err(|e| input(e.into()))?;
    emit(&text)?;
    if !report.certified {
        return Err(failed(anyhow!("reference not certified to {:e}", args.ref_tol)));
    }
    Ok(())
}

fn cmd_verify(args: &VerifyArgs) -> CliResult<()> {
    let opts = VerifyOptions {
        inject_fault: args.inject_fault,
    };
    let checks: Vec<CheckResult> = if args.suite == "all" {
        run_all(opts)
    } else if SUITES.contains(&args.suite.as_str()) {
        run_suite(&args.suite, opts).map_err(|e| failed(e.into()))?
    } else {
        return Err(input(anyhow!(
            "unknown suite '{}' (expected all or one of {})",
            args.suite,
            SUITES.join(", ")
        )));
    };
    let width = checks.iter().map(|c| c.name.len()).max().unwrap_or(0);
    let mut table = String::new();
    for c in &checks {
        table += &format!(
            "{:<10} {:<width$}  {}  {}\n",
            c.suite,
            c.name,
            if c.passed { "PASS" } else { "FAIL" },
            c.detail
        );
    }
    let bad = checks.iter().filter(|c| !c.passed).count();
    table += &format!("{} checks, {} failed", checks.len(), bad);
    emit(&table)?;
    if bad > 0 {
        return Err(failed(anyhow!("{bad} verification checks failed")));
    }
    Ok(())
}
