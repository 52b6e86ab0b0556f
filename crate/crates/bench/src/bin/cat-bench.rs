use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use cat_bench::report::write_summary_csv;
use cat_bench::runner::{read_records_file, run_solver};
use cat_bench::{emit_reports, load_suite, run_suite, summarize, BenchError, Overrides};
use cat_core::problem::{builtin_corpus, check_derivatives};
use cat_core::trace::write_trace_csv;
use clap::{Args, Parser, Subcommand};

/// Benchmark runner for the CAT trust-region method.
#[derive(Parser)]
#[command(name = "cat-bench", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a suite and write records, summary and profiles.
    Run(SuiteArgs),
    /// List corpus problems and solvers.
    List,
    /// Print the instance file of a problem.
    Instance(SuiteArgs),
    /// Run one problem with one solver and write its per-iteration trace.
    Trace(SuiteArgs),
    /// Finite-difference check of the suite's problems at their start points.
    Check(SuiteArgs),
    /// Recompute summary.csv from an existing records.csv.
    Summarize {
        /// Path to records.csv.
        records: PathBuf,
        /// Output file; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args, Clone, Default)]
struct SuiteArgs {
    /// Suite file (TOML).
    #[arg(long)]
    suite: Option<PathBuf>,
    /// Problem: a corpus name, `benchmark`, `lds` or `mc`. Repeatable.
    #[arg(long)]
    problem: Vec<String>,
    /// Solver: cat, cat_theta0 or classic. Repeatable.
    #[arg(long)]
    solver: Vec<String>,
    #[arg(long)]
    eps: Option<f64>,
    #[arg(long = "max-iter")]
    max_iter: Option<usize>,
    #[arg(long)]
    r1: Option<f64>,
    #[arg(long)]
    theta: Option<f64>,
    #[arg(long)]
    beta: Option<f64>,
    #[arg(long)]
    omega: Option<f64>,
    #[arg(long)]
    gamma1: Option<f64>,
    #[arg(long)]
    gamma2: Option<f64>,
    #[arg(long)]
    gamma3: Option<f64>,
    /// Seed for `lds` and `mc` problems named with --problem.
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory (run) or file (instance, trace).
    #[arg(long)]
    out: Option<PathBuf>,
}

impl SuiteArgs {
    fn overrides(&self) -> Overrides {
        Overrides {
            problems: self.problem.clone(),
            solvers: self.solver.clone(),
            eps: self.eps,
            max_iter: self.max_iter,
            r1: self.r1,
            theta: self.theta,
            beta: self.beta,
            omega: self.omega,
            gamma1: self.gamma1,
            gamma2: self.gamma2,
            gamma3: self.gamma3,
            seed: self.seed,
        }
    }
}

fn write_output(out: Option<&Path>, bytes: &[u8]) -> Result<(), BenchError> {
    match out {
        Some(path) => fs::write(path, bytes).map_err(|source| BenchError::Io {
            path: path.to_path_buf(),
            source,
        }),
        None => io::stdout().write_all(bytes).map_err(|source| BenchError::Io {
            path: PathBuf::from("<stdout>"),
            source,
        }),
    }
}

fn single(what: &str, n: usize) -> Result<(), BenchError> {
    if n != 1 {
        return Err(BenchError::Config(format!("expected exactly one {what}, got {n}")));
    }
    Ok(())
}

fn cmd_run(args: &SuiteArgs) -> Result<(), BenchError> {
    let suite = load_suite(args.suite.as_deref(), &args.overrides())?;
    let out_dir = args.out.clone().unwrap_or_else(|| PathBuf::from("bench-out"));
    let records = run_suite(&suite)?;
    let files = emit_reports(&records, &suite.iter_grid, &out_dir)?;
    for s in summarize(&records)? {
        println!(
            "{:<12} problems={:<4} failures={:<4} gmean_iters={:.2} gmean_fevals={:.2} gmean_gevals={:.2}",
            s.solver, s.problems, s.failures, s.gmean_iters, s.gmean_fevals, s.gmean_gevals
        );
    }
    for f in files {
        println!("wrote {}", f.display());
    }
    Ok(())
}

fn cmd_list() {
    println!("problems:");
    for f in builtin_corpus() {
        println!("  {:<22} {}", f.name, f.description);
    }
    println!("  {:<22} generated LDS instance (use --seed)", "lds");
    println!("  {:<22} generated matrix completion instance (use --seed)", "mc");
    println!("solvers:");
    for k in cat_bench::SolverKind::ALL {
        println!("  {}", k.name());
    }
}

fn cmd_instance(args: &SuiteArgs) -> Result<(), BenchError> {
    let suite = load_suite(args.suite.as_deref(), &args.overrides())?;
    single("problem", suite.problems.len())?;
    let text = suite.problems[0]
        .spec
        .to_instance_text()
        .map_err(|e| BenchError::Config(e.to_string()))?;
    write_output(args.out.as_deref(), text.as_bytes())
}

fn cmd_trace(args: &SuiteArgs) -> Result<(), BenchError> {
    let mut o = args.overrides();
    if o.solvers.is_empty() {
        o.solvers.push("cat".into());
    }
    let suite = load_suite(args.suite.as_deref(), &o)?;
    single("problem", suite.problems.len())?;
    single("solver", suite.solvers.len())?;
    let item = &suite.problems[0];
    let entry = item.spec.build().map_err(|e| BenchError::Config(e.to_string()))?;
    let solver = suite.solvers[0].with_max_iter(suite.cap_for(item));
    let outcome = run_solver(&entry, &solver)?;
    let mut buf = Vec::new();
    write_trace_csv(&outcome.trace, &mut buf).expect("writing to memory");
    write_output(args.out.as_deref(), &buf)?;
    eprintln!("{} on {}: {}", solver.name(), entry.name, outcome.status);
    Ok(())
}

fn cmd_check(args: &SuiteArgs) -> Result<(), BenchError> {
    let suite = load_suite(args.suite.as_deref(), &args.overrides())?;
    let mut worst: f64 = 0.0;
    for item in &suite.problems {
        let entry = item.spec.build().map_err(|e| BenchError::Config(e.to_string()))?;
        let report = check_derivatives(&entry.problem, &entry.start, 1e-6).map_err(|e| BenchError::Config(e.to_string()))?;
        worst = worst.max(report.max_error());
        println!(
            "{:<24} grad_err={:.3e} hess_err={:.3e}",
            entry.name, report.grad_max_rel_err, report.hess_max_rel_err
        );
    }
    println!("max relative error {worst:.3e}");
    Ok(())
}

fn cmd_summarize(records: &Path, out: Option<&Path>) -> Result<(), BenchError> {
    let recs = read_records_file(records)?;
    let summary = summarize(&recs)?;
    let mut buf = Vec::new();
    write_summary_csv(&summary, &mut buf).map_err(|source| BenchError::Csv {
        path: records.to_path_buf(),
        source,
    })?;
    write_output(out, &buf)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Run(args) => cmd_run(args),
        Command::List => {
            cmd_list();
            Ok(())
        }
        Command::Instance(args) => cmd_instance(args),
        Command::Trace(args) => cmd_trace(args),
        Command::Check(args) => cmd_check(args),
        Command::Summarize { records, out } => cmd_summarize(records, out.as_deref()),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("cat-bench: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

