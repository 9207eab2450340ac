use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use plap::cheeger::{cheeger_constant, DEFAULT_ENUMERATION_LIMIT};
use plap::continuation::{default_schedule, extract_and_verify, sweep_observed, SweepOptions};
use plap::fig1::{cross_validate, limit_function, reduced_eigenpair, xhat_closed_form};
use plap::io::{
    load_domain, load_function, sweep_csv, CheegerJson, CrossCheckJson, DecompositionJson,
    EigenJson, ExampleJson, FunctionFile, ReducedJson, SweepJson, VerifyJson,
};
use plap::one_laplacian::{decompose_limit, lambda11_report, structure_report, DEFAULT_SEED};
use plap::spectral::{first_eigenpair, SolverOptions};
use plap::{Domain, Error};

#[derive(Parser)]
#[command(name = "plap", version, about = "Dirichlet p-Laplacian eigenpairs and exact Cheeger cuts on weighted graphs")]
struct Cli {
    /// Suppress progress messages on stderr.
    #[arg(long, global = true)]
    quiet: bool,

    /// Seed for randomized checks.
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    seed: u64,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Exact Cheeger constant and every Cheeger cut.
    Cheeger {
        graph: PathBuf,
        #[arg(long, default_value_t = DEFAULT_ENUMERATION_LIMIT)]
        limit: usize,
    },
    /// First eigenpair at one exponent.
    Eigen {
        graph: PathBuf,
        #[arg(long)]
        p: f64,
        #[command(flatten)]
        solver: SolverArgs,
        /// Initial guess, as a function file or an earlier `eigen` report.
        #[arg(long)]
        warm_start: Option<PathBuf>,
    },
    /// Solve along p_k = 1 + 2^-k, k = 1..=steps, with warm starts.
    Sweep {
        graph: PathBuf,
        #[arg(long, default_value_t = 12)]
        steps: usize,
        #[command(flatten)]
        solver: SolverArgs,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        /// Also write the full JSON report here.
        #[arg(long)]
        report: Option<PathBuf>,
        /// Also write the CSV table here.
        #[arg(long)]
        csv: Option<PathBuf>,
        /// Require the limit to split into nested Cheeger cuts.
        #[arg(long)]
        verify: bool,
        #[arg(long, default_value_t = 1e-6)]
        delta: f64,
    },
    /// Split a function into nested level-set indicators.
    Decompose {
        graph: PathBuf,
        #[arg(long)]
        function: PathBuf,
        #[arg(long, default_value_t = 1e-6)]
        delta: f64,
    },
    /// Check that a function is a sum of nested Cheeger-cut indicators, and
    /// that λ_{1,1} = h on the domain.
    Verify {
        graph: PathBuf,
        #[arg(long)]
        function: PathBuf,
        #[arg(long, default_value_t = 1e-6)]
        delta: f64,
        /// Random functions tried against the λ_{1,1} lower bound.
        #[arg(long, default_value_t = 1000)]
        samples: usize,
    },
    /// The built-in four-vertex example: reduced pairs, x̂, cross-checks.
    #[command(name = "example-fig1")]
    ExampleFig1 {
        #[arg(long, conflicts_with = "sweep")]
        p: Option<f64>,
        #[arg(long)]
        sweep: Option<usize>,
    },
}

#[derive(Args)]
struct SolverArgs {
    /// Residual tolerance (default 1e-9 for p ≥ 1.5, 1e-6 below).
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long, default_value_t = 5000)]
    max_iter: usize,
}

impl SolverArgs {
    fn options(&self) -> SolverOptions {
        SolverOptions {
            tolerance: self.tol,
            max_iterations: self.max_iter,
            ..SolverOptions::default()
        }
    }
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match &e {
            Error::NoConvergence(_) | Error::NotConverged => 3,
            Error::SweepFailed { source, .. } if matches!(**source, Error::NoConvergence(_)) => 3,
            Error::StructureViolation(_) => 4,
            _ => 2,
        };
        let mut message = e.to_string();
        if let Error::NoConvergence(state) = &e {
            message.push_str(&format!(
                "\nlast iterate: lambda = {}, residual = {:e}, iterations = {}",
                state.lambda, state.residual, state.iterations
            ));
        }
        let mut source = std::error::Error::source(&e);
        while let Some(s) = source {
            message.push_str(&format!("\ncaused by: {s}"));
            source = s.source();
        }
        Failure { code, message }
    }
}

fn fail(code: u8, message: impl Into<String>) -> Failure {
    Failure {
        code,
        message: message.into(),
    }
}

type Run = Result<(), Failure>;

fn emit(text: &str) -> Run {
    let mut out = std::io::stdout().lock();
    writeln!(out, "{}", text.trim_end())
        .and_then(|_| out.flush())
        .map_err(|e| fail(2, format!("writing output: {e}")))
}

fn write_file(path: &Path, text: &str) -> Run {
    std::fs::write(path, text).map_err(|e| fail(2, format!("{}: {e}", path.display())))
}

fn domain(path: &Path) -> Result<Domain, Failure> {
    load_domain(path).map_err(|e| {
        let f = Failure::from(e);
        fail(f.code, format!("{}: {}", path.display(), f.message))
    })
}

fn function(d: &Domain, path: &Path) -> Result<plap::DirichletFunction, Failure> {
    load_function(d, path).map_err(|e| {
        let f = Failure::from(e);
        fail(f.code, format!("{}: {}", path.display(), f.message))
    })
}

fn check_p(p: f64) -> Run {
    if p > 1.0 && p.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidP(p).into())
    }
}

fn run(cli: Cli) -> Run {
    let progress = |msg: String| {
        if !cli.quiet {
            eprintln!("{msg}");
        }
    };
    match cli.command {
        Command::Cheeger { graph, limit } => {
            let d = domain(&graph)?;
            let r = plap::cheeger::cheeger_constant_with_limit(&d, limit)?;
            emit(&CheegerJson::new(&d, &r).to_json())
        }
        Command::Eigen {
            graph,
            p,
            solver,
            warm_start,
        } => {
            check_p(p)?;
            let mut opts = solver.options();
            opts.validate()?;
            let d = domain(&graph)?;
            if let Some(path) = warm_start {
                opts.initial_guess = Some(function(&d, &path)?);
            }
            let e = first_eigenpair(&d, p, &opts)?;
            progress(format!(
                "p = {p}: lambda = {}, residual = {:e}, {} iterations",
                e.lambda, e.residual, e.iterations
            ));
            emit(&EigenJson::new(&d, &e).to_json())
        }
        Command::Sweep {
            graph,
            steps,
            solver,
            format,
            report,
            csv,
            verify,
            delta,
        } => {
            let schedule = default_schedule(steps)?;
            let opts = SweepOptions {
                solver: solver.options(),
                delta,
                ..SweepOptions::default()
            };
            opts.solver.validate()?;
            let d = domain(&graph)?;
            let r = sweep_observed(&d, &schedule, &opts, |rec| {
                progress(format!(
                    "p = {}: lambda = {}, residual = {:e}, {} iterations",
                    rec.p, rec.lambda, rec.residual, rec.iterations
                ))
            })?;
            for w in &r.warnings {
                eprintln!("warning: {w}");
            }
            let json = SweepJson::new(&r).to_json();
            let table = sweep_csv(&r);
            if let Some(path) = report {
                write_file(&path, &json)?;
            }
            if let Some(path) = csv {
                write_file(&path, &table)?;
            }
            emit(match format {
                Format::Json => &json,
                Format::Csv => &table,
            })?;
            if verify {
                let dec = extract_and_verify(&r, delta)?;
                progress(format!(
                    "limit splits into {} nested Cheeger cuts",
                    dec.len()
                ));
            } else if !r.converged {
                return Err(fail(
                    3,
                    "sweep did not converge: increase --steps or relax the tolerances",
                ));
            }
            Ok(())
        }
        Command::Decompose {
            graph,
            function: path,
            delta,
        } => {
            let d = domain(&graph)?;
            let u = function(&d, &path)?;
            let dec = decompose_limit(&d, &u, delta)?;
            emit(&DecompositionJson::new(&d, &dec).to_json())
        }
        Command::Verify {
            graph,
            function: path,
            delta,
            samples,
        } => {
            let d = domain(&graph)?;
            let u = function(&d, &path)?;
            let s = structure_report(&d, &u, delta)?;
            let l = lambda11_report(&d, samples, cli.seed)?;
            let report = VerifyJson::new(&d, &s, Some(&l));
            emit(&report.to_json())?;
            if report.passed {
                Ok(())
            } else {
                Err(fail(4, "function is not a sum of nested Cheeger-cut indicators"))
            }
        }
        Command::ExampleFig1 { p, sweep } => {
            let schedule = match (p, sweep) {
                (Some(p), _) => {
                    check_p(p)?;
                    vec![p]
                }
                (None, steps) => default_schedule(steps.unwrap_or(12))?,
            };
            let d = plap::fig1::build_fig1();
            let h = cheeger_constant(&d)?;
            progress(format!("h = {}", h.h_exact_string()));
            let reduced = schedule
                .iter()
                .map(|&p| Ok(ReducedJson::new(&d, &reduced_eigenpair(p)?)))
                .collect::<Result<Vec<_>, Error>>()?;
            let checks = cross_validate(&schedule, &SolverOptions::default())?;
            let x = xhat_closed_form();
            let report = ExampleJson {
                xhat: x,
                xhat_cubic_residual: (1.0 - x).powi(3) - x,
                limit: FunctionFile::from_function(&d, &limit_function()),
                reduced,
                cross_validation: checks.iter().map(CrossCheckJson::from).collect(),
            };
            emit(&report.to_json())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
