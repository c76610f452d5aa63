use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use fracspec_cli::examples::{quadrature_for, Overrides};
use fracspec_cli::problem::ProblemFile;
use fracspec_cli::runner::{oracle_check, run_all, run_example};
use fracspec_cli::tables::{sci6, Artifact, Table};
use fracspec_core::muntz::MuntzBasis;
use fracspec_core::pipeline::SolveConfig;
use fracspec_core::{solve_pde, Error};

/// Benchmark harness for a semi-analytical variable-order time-fractional
/// PDE solver.
#[derive(Parser, Debug)]
#[command(name = "fracspec", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run one benchmark example and write its CSV tables and plot scripts.
    Run {
        /// Example id (1..=8).
        example: u32,
        /// Modes per dimension (1d) or total mode count (2d).
        #[arg(long = "N")]
        n: Option<usize>,
        /// Müntz basis size.
        #[arg(long = "K")]
        k: Option<usize>,
        /// Müntz exponent spacing in (0, 1].
        #[arg(long)]
        delta: Option<f64>,
        /// Time horizon.
        #[arg(long = "T")]
        t_end: Option<f64>,
        /// Gauss-Legendre order per dimension.
        #[arg(long)]
        quad: Option<usize>,
        /// Spatial test points per dimension.
        #[arg(long)]
        nt: Option<usize>,
        /// Time samples for relative errors.
        #[arg(long)]
        kt: Option<usize>,
        /// Output directory.
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// Solve a JSON problem file and write the sampled solution.
    Solve {
        /// Path to the problem file.
        file: PathBuf,
        #[arg(long = "N")]
        n: Option<usize>,
        #[arg(long = "K")]
        k: Option<usize>,
        #[arg(long)]
        delta: Option<f64>,
        #[arg(long)]
        quad: Option<usize>,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// Cross-check a subdiffusion benchmark (2 or 3) against the L1
    /// finite-difference oracle.
    Oracle {
        /// Example id (2 or 3).
        example: u32,
    },
    /// Run the full reproduction sweep with default parameters.
    All {
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
}

/// Exit codes: 0 success, 2 validation error, 3 numerical failure, 4 I/O.
#[derive(Debug)]
enum CliError {
    Solver(Error),
    Io(String),
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Solver(e) => write!(f, "{e}"),
            CliError::Io(msg) => write!(f, "i/o error: {msg}"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Solver(e)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match with_thread_cap(|| dispatch(&cli)) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(exit_code_for(&err))
        }
    }
}

/// FRACSPEC_THREADS caps the worker pool for every parallel region.
fn with_thread_cap<R>(f: impl FnOnce() -> R + Send) -> R
where
    R: Send,
{
    match std::env::var("FRACSPEC_THREADS")
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
    {
        Some(threads) if threads >= 1 => rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .expect("thread pool construction")
            .install(f),
        _ => f(),
    }
}

fn exit_code_for(err: &CliError) -> u8 {
    match err {
        CliError::Solver(Error::Domain(_))
        | CliError::Solver(Error::Validation(_))
        | CliError::Solver(Error::UnsupportedExponent { .. }) => 2,
        CliError::Solver(Error::Numerical(_)) => 3,
        CliError::Io(_) => 4,
    }
}

fn dispatch(cli: &Cli) -> Result<ExitCode, CliError> {
    match &cli.command {
        Command::Run {
            example,
            n,
            k,
            delta,
            t_end,
            quad,
            nt,
            kt,
            out,
        } => {
            let overrides = Overrides {
                n: *n,
                k: *k,
                delta: *delta,
                t_end: *t_end,
                quadrature: *quad,
                n_t: *nt,
                k_t: *kt,
            };
            let artifacts = run_example(*example, &overrides)?;
            write_artifacts(out, &artifacts)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Solve {
            file,
            n,
            k,
            delta,
            quad,
            out,
        } => {
            let json = std::fs::read_to_string(file)
                .map_err(|e| CliError::Io(format!("cannot read {}: {e}", file.display())))?;
            let parsed = ProblemFile::parse(&json)?;
            let problem = parsed.to_problem()?;
            let n = n.or(parsed.solver.n).unwrap_or(16);
            let k = k.or(parsed.solver.k).unwrap_or(5);
            let delta = delta
                .or(parsed.solver.delta)
                .unwrap_or(fracspec_core::DEFAULT_DELTA);
            let side = if problem.domain.dim() == 2 {
                let side = (n as f64).sqrt().round() as usize;
                if side * side != n {
                    return Err(CliError::Solver(Error::Validation(format!(
                        "2d solves take a perfect-square total mode count, got {n}"
                    ))));
                }
                side
            } else {
                n
            };
            let quad = quad
                .or(parsed.solver.quadrature)
                .unwrap_or_else(|| quadrature_for(problem.domain.dim(), side, None));
            let basis = MuntzBasis::for_order(&problem.leading_order, k, delta)?;
            let solution = solve_pde(&problem, &basis, &SolveConfig::new(side, quad))?;

            // Sample the solution at the final time on a uniform grid.
            let samples = 101usize;
            let axes: Vec<Vec<f64>> = (0..problem.domain.dim())
                .map(|a| {
                    let length = problem.domain.length(a);
                    (0..=samples)
                        .map(|i| length * i as f64 / samples as f64)
                        .collect()
                })
                .collect();
            let values = solution.eval_on_grid(&axes, problem.t_end)?;
            let mut table = match problem.domain.dim() {
                1 => {
                    let mut t = Table::new("solution", &["x", "re", "im"]);
                    for (i, &x) in axes[0].iter().enumerate() {
                        t.push_row(vec![
                            format!("{x:.6}"),
                            sci6(values[i].re),
                            sci6(values[i].im),
                        ]);
                    }
                    t
                }
                _ => {
                    let mut t = Table::new("solution", &["x1", "x2", "re", "im"]);
                    for (i1, &x1) in axes[0].iter().enumerate() {
                        for (i2, &x2) in axes[1].iter().enumerate() {
                            let v = values[i1 * axes[1].len() + i2];
                            t.push_row(vec![
                                format!("{x1:.6}"),
                                format!("{x2:.6}"),
                                sci6(v.re),
                                sci6(v.im),
                            ]);
                        }
                    }
                    t
                }
            };
            table.name = file
                .file_stem()
                .map(|s| format!("{}_solution", s.to_string_lossy()))
                .unwrap_or_else(|| "solution".into());
            write_artifacts(out, &[table.into_artifact()])?;
            println!(
                "solved: {} modes, max mode residual {:.3e}, ill-conditioned modes {}",
                solution.modes.len(),
                solution.diagnostics.max_mode_residual,
                solution.diagnostics.ill_conditioned_modes
            );
            Ok(ExitCode::SUCCESS)
        }
        Command::Oracle { example } => {
            let report = oracle_check(*example).map_err(CliError::from)?;
            println!(
                "example {}: spectral-vs-FDM discrepancy {} | FDM error estimate {} | contract {}",
                report.example,
                sci6(report.discrepancy),
                sci6(report.estimate),
                if report.within_contract() {
                    "satisfied (within 3x)"
                } else {
                    "VIOLATED"
                }
            );
            if report.within_contract() {
                Ok(ExitCode::SUCCESS)
            } else {
                Err(CliError::Solver(Error::Numerical(
                    "spectral solution disagrees with the finite-difference oracle".into(),
                )))
            }
        }
        Command::All { out } => {
            let artifacts = run_all()?;
            write_artifacts(out, &artifacts)?;
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn write_artifacts(dir: &Path, artifacts: &[Artifact]) -> Result<(), CliError> {
    std::fs::create_dir_all(dir)
        .map_err(|e| CliError::Io(format!("cannot create {}: {e}", dir.display())))?;
    for artifact in artifacts {
        let path = dir.join(&artifact.filename);
        std::fs::write(&path, artifact.contents.as_bytes())
            .map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))?;
        println!("wrote {}", path.display());
    }
    Ok(())
}
