//! Command-line front end: solve, inspect, and benchmark instances.
//!
//! Exit codes: 0 success, 2 robust-infeasible, 3 condition violation,
//! 4 iteration/restart/enumeration limits, 1 anything else. Set LAGRO_LOG
//! to any nonempty value to stream trace lines to stderr.

use clap::{Args, Parser, Subcommand};
use lagro_core::engine::{solve_with_restarts, Method, Report, SolveOptions};
use lagro_core::error::Error;
use lagro_core::instances::{
    canonical_json, gen_counterexample, gen_interdiction, gen_network_design_small,
    gen_random_general, gen_random_indicator, load_instance, save_instance, RandomSpec,
};
use lagro_core::model::Instance;
use lagro_core::multiplier::{
    check_conditions_general, check_conditions_indicator, polynomial_lambda_bound, UpperBoundMode,
};
use lagro_core::oracle::{
    min_optimal_multiplier, solve_two_stage_bruteforce_any, worst_case_l, worst_case_q,
    worst_case_qi,
};
use lagro_core::scalar::{format_scalar, parse_scalar, rat, ExtValue, Scalar};
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "lagro",
    about = "Exact two-stage robust optimization with binary uncertainty",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve an instance with the restart-verified outer loop.
    Solve(SolveArgs),
    /// Brute-force ground truth: optimum, worst realization, multiplier
    /// interval.
    Oracle(OracleArgs),
    /// Check the sufficient conditions for the closed-form multiplier.
    Check { instance: PathBuf },
    /// Compute the norm/factorial multiplier bound and its inputs.
    Bound(BoundArgs),
    /// Run every instance in a directory and emit a TSV report.
    Bench(BenchArgs),
    /// Emit (lambda, worst-case Lagrangian) pairs of the refutation
    /// instance on a rational grid over [0, 9/2].
    LambdaSweep(LambdaSweepArgs),
    /// Generate an instance file.
    Gen(GenArgs),
}

#[derive(Args)]
struct SolveArgs {
    instance: PathBuf,
    #[arg(long, default_value = "ccg")]
    method: String,
    /// Optimality tolerance (rational, default 0).
    #[arg(long, default_value = "0")]
    eps: String,
    /// Initial multiplier (rational, > 0); defaults to max(1, u - l).
    #[arg(long)]
    lambda0: Option<String>,
    /// Write trace lines to this file.
    #[arg(long)]
    trace_out: Option<PathBuf>,
}

#[derive(Args)]
struct OracleArgs {
    instance: PathBuf,
    /// Evaluate at this index of the X list instead of the full optimum.
    #[arg(long)]
    x: Option<usize>,
}

#[derive(Args)]
struct BoundArgs {
    instance: PathBuf,
    /// Upper-bound source: "bruteforce" or "interval".
    #[arg(long, default_value = "bruteforce")]
    u_mode: String,
}

#[derive(Args)]
struct BenchArgs {
    suite_dir: PathBuf,
    /// Write the TSV report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value = "ccg")]
    method: String,
    #[arg(long, default_value = "0")]
    eps: String,
    #[arg(long)]
    lambda0: Option<String>,
}

#[derive(Args)]
struct LambdaSweepArgs {
    /// Objective scale of the instance.
    #[arg(long, default_value = "1")]
    gamma: String,
    /// Number of grid steps over [0, 9/2].
    #[arg(long, default_value_t = 18)]
    grid: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct GenArgs {
    /// Family: counterexample, interdiction, random-general,
    /// random-indicator, network.
    family: String,
    #[arg(long, default_value = "1")]
    gamma: String,
    #[arg(long, default_value_t = 2)]
    n: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 2)]
    routes: usize,
    #[arg(long, default_value_t = 1)]
    k: usize,
    #[arg(long, default_value_t = 2)]
    x_count: usize,
    #[arg(long, default_value_t = 2)]
    np: usize,
    #[arg(long, default_value_t = 1)]
    nc2: usize,
    #[arg(long, default_value_t = 1)]
    nd2: usize,
    #[arg(long, default_value_t = 2)]
    m: usize,
    #[arg(long)]
    homogeneous: bool,
    /// Output path; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(match e {
                Error::ConditionViolation(_) | Error::BoundTooSmall(_) => 3u8,
                Error::LimitExceeded(_) => 4u8,
                Error::InfeasibleDecision(_) => 2u8,
                _ => 1u8,
            })
        }
    }
}

const EXIT_ROBUST_INFEASIBLE: u8 = 2;

fn run(cli: Cli) -> Result<ExitCode, Error> {
    match cli.command {
        Command::Solve(args) => cmd_solve(args),
        Command::Oracle(args) => cmd_oracle(args),
        Command::Check { instance } => cmd_check(&instance),
        Command::Bound(args) => cmd_bound(args),
        Command::Bench(args) => cmd_bench(args),
        Command::LambdaSweep(args) => cmd_lambda_sweep(args),
        Command::Gen(args) => cmd_gen(args),
    }
}

fn solve_options(method: &str, eps: &str, lambda0: &Option<String>) -> Result<SolveOptions, Error> {
    Ok(SolveOptions {
        method: method.parse::<Method>()?,
        eps: parse_scalar(eps)?,
        lambda0: lambda0.as_deref().map(parse_scalar).transpose()?,
        ..SolveOptions::default()
    })
}

fn emit_trace(report: &Report, trace_out: &Option<PathBuf>) -> Result<(), Error> {
    if std::env::var("LAGRO_LOG").map(|v| !v.is_empty()).unwrap_or(false) {
        for ev in &report.trace {
            eprintln!("{ev}");
        }
    }
    if let Some(path) = trace_out {
        let mut f = std::fs::File::create(path)?;
        for ev in &report.trace {
            writeln!(f, "{ev}")?;
        }
    }
    Ok(())
}

fn fmt_point(x: &[Scalar]) -> String {
    let parts: Vec<String> = x.iter().map(format_scalar).collect();
    format!("({})", parts.join(", "))
}

fn fmt_xi(xi: &[bool]) -> String {
    let parts: Vec<&str> = xi.iter().map(|&b| if b { "1" } else { "0" }).collect();
    format!("({})", parts.join(", "))
}

fn cmd_solve(args: SolveArgs) -> Result<ExitCode, Error> {
    let inst = load_instance(&args.instance)?;
    let opts = solve_options(&args.method, &args.eps, &args.lambda0)?;
    let report = solve_with_restarts(&inst, &opts)?;
    emit_trace(&report, &args.trace_out)?;
    println!("value       {}", report.value);
    if let Some(x) = &report.x_star {
        println!("x*          {}", fmt_point(x));
    }
    if let Some(xi) = &report.witness_xi {
        println!("witness xi  {}", fmt_xi(xi));
    }
    println!("verified    {}", report.verified_optimal);
    println!("outer iters {}", report.outer_iterations);
    println!("inner iters {}", report.inner_iterations);
    println!("restarts    {}", report.restarts);
    if let Some(l) = &report.final_lambda {
        println!("lambda      {}", format_scalar(l));
    }
    println!("time        {:.4}s", report.wall_time.as_secs_f64());
    if report.value == ExtValue::PosInf {
        return Ok(ExitCode::from(EXIT_ROBUST_INFEASIBLE));
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_oracle(args: OracleArgs) -> Result<ExitCode, Error> {
    let inst = load_instance(&args.instance)?;
    let x = match args.x {
        Some(idx) => inst
            .x_set()
            .get(idx)
            .cloned()
            .ok_or_else(|| Error::Input(format!("--x {idx} out of range")))?,
        None => {
            let (value, x) = solve_two_stage_bruteforce_any(&inst)?;
            println!("optimum     {value}");
            println!("argmin x    {}", fmt_point(&x));
            if value == ExtValue::PosInf {
                return Ok(ExitCode::from(EXIT_ROBUST_INFEASIBLE));
            }
            x
        }
    };
    match &inst {
        Instance::General(g) => {
            let (wq, xi) = worst_case_q(g, &x)?;
            println!("worst case  {wq} at xi = {}", fmt_xi(&xi));
            if wq.is_finite() {
                // Independent multiplier bound by doubling, then bisection.
                let mut hi = rat(1);
                let mut found = false;
                for _ in 0..60 {
                    if worst_case_l(g, &x, &hi)?.0 == wq {
                        found = true;
                        break;
                    }
                    hi = hi * rat(2);
                }
                if found {
                    let (lo, hi) = min_optimal_multiplier(g, &x, &hi)?;
                    println!(
                        "multiplier  in ({}, {}]",
                        format_scalar(&lo),
                        format_scalar(&hi)
                    );
                } else {
                    println!("multiplier  above 2^60 (not bracketed)");
                }
            } else {
                return Ok(ExitCode::from(EXIT_ROBUST_INFEASIBLE));
            }
        }
        Instance::Indicator(i) => {
            let (wq, xi) = worst_case_qi(i, &x)?;
            println!("worst case  {wq} at xi = {}", fmt_xi(&xi));
            if !wq.is_finite() {
                return Ok(ExitCode::from(EXIT_ROBUST_INFEASIBLE));
            }
            let wc = lagro_core::engine::solve_exact_worst_case_indicator(i, &x)?;
            if let Some(cert) = wc.certificate {
                let lam = lagro_core::engine::multiplier_from_indicator_certificate(
                    &cert.rho, &cert.nu,
                );
                println!("multiplier  {} (ex-post extraction)", format_scalar(&lam));
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_check(path: &Path) -> Result<ExitCode, Error> {
    let inst = load_instance(path)?;
    let report = match &inst {
        Instance::General(g) => check_conditions_general(g),
        Instance::Indicator(i) => check_conditions_indicator(i),
    };
    println!("{report}");
    if report.overall {
        Ok(ExitCode::SUCCESS)
    } else {
        Ok(ExitCode::from(3))
    }
}

fn cmd_bound(args: BoundArgs) -> Result<ExitCode, Error> {
    let inst = load_instance(&args.instance)?;
    let general = match &inst {
        Instance::General(g) => g,
        Instance::Indicator(_) => {
            return Err(Error::Input(
                "the polynomial bound is defined for general instances".into(),
            ))
        }
    };
    let mode = match args.u_mode.as_str() {
        "bruteforce" => UpperBoundMode::BruteForce,
        "interval" => UpperBoundMode::IntervalBox,
        other => {
            return Err(Error::Input(format!(
                "unknown u-mode {other:?}; expected \"bruteforce\" or \"interval\""
            )))
        }
    };
    let bound = polynomial_lambda_bound(general, mode)?;
    println!("{bound}");
    Ok(ExitCode::SUCCESS)
}

fn cmd_bench(args: BenchArgs) -> Result<ExitCode, Error> {
    let mut paths: Vec<PathBuf> = std::fs::read_dir(&args.suite_dir)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().map(|e| e == "json").unwrap_or(false))
        .collect();
    paths.sort();
    let mut rows = vec!["instance\tvalue\topt\titerations\ttime_s\trestarts".to_string()];
    let mut verified = 0usize;
    let mut total_time = 0.0f64;
    for path in &paths {
        let inst = load_instance(path)?;
        let mut opts = solve_options(&args.method, &args.eps, &args.lambda0)?;
        if matches!(inst, Instance::General(_)) {
            // Benders applies to indicator instances; the general problem
            // always runs the scenario loop.
            opts.method = Method::Ccg;
        }
        let report = solve_with_restarts(&inst, &opts)?;
        let name = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| path.display().to_string());
        let iterations = report.outer_iterations + report.inner_iterations;
        if report.verified_optimal {
            verified += 1;
        }
        total_time += report.wall_time.as_secs_f64();
        rows.push(format!(
            "{name}\t{}\t{}\t{}\t{:.4}\t{}",
            report.value,
            if report.verified_optimal { 1 } else { 0 },
            iterations,
            report.wall_time.as_secs_f64(),
            report.restarts
        ));
    }
    let table = rows.join("\n") + "\n";
    match &args.out {
        Some(path) => std::fs::write(path, &table)?,
        None => print!("{table}"),
    }
    eprintln!(
        "{}/{} verified optimal, total {:.3}s",
        verified,
        paths.len(),
        total_time
    );
    Ok(ExitCode::SUCCESS)
}

fn cmd_lambda_sweep(args: LambdaSweepArgs) -> Result<ExitCode, Error> {
    let gamma = parse_scalar(&args.gamma)?;
    if args.grid == 0 {
        return Err(Error::Input("grid must be positive".into()));
    }
    let inst = gen_counterexample(gamma);
    let x = vec![rat(0)];
    let mut lines = vec!["lambda\tworst_case_lagrangian".to_string()];
    for k in 0..=args.grid {
        let lambda = lagro_core::scalar::frac(9 * k as i64, 2 * args.grid as i64);
        let (v, _) = worst_case_l(&inst, &x, &lambda)?;
        lines.push(format!("{}\t{v}", format_scalar(&lambda)));
    }
    let table = lines.join("\n") + "\n";
    match &args.out {
        Some(path) => std::fs::write(path, &table)?,
        None => print!("{table}"),
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_gen(args: GenArgs) -> Result<ExitCode, Error> {
    let spec = RandomSpec {
        n1: 1,
        nc2: args.nc2,
        nd2: args.nd2,
        np: args.np,
        m: args.m,
        x_count: args.x_count,
        homogeneous: args.homogeneous,
        budget: None,
    };
    let inst = match args.family.as_str() {
        "counterexample" => Instance::General(gen_counterexample(parse_scalar(&args.gamma)?)),
        "interdiction" => Instance::General(gen_interdiction(args.n, args.seed)),
        "random-general" => Instance::General(gen_random_general(&spec, args.seed)?),
        "random-indicator" => Instance::Indicator(gen_random_indicator(&spec, args.seed)?),
        "network" => Instance::Indicator(gen_network_design_small(args.routes, args.k)),
        other => {
            return Err(Error::Input(format!(
                "unknown family {other:?}; expected counterexample, interdiction, \
                 random-general, random-indicator, or network"
            )))
        }
    };
    match &args.out {
        Some(path) => save_instance(&inst, path)?,
        None => print!("{}", canonical_json(&inst)),
    }
    Ok(ExitCode::SUCCESS)
}
