use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use hdgbem::harness::{
    compute_errors, condition_study_h, condition_study_kappa, convergence_study, kappa_study_mesh, loglog_slope,
    problem_polynomial, problem_table123, solve_problem, write_csv, write_json, ErrorReport, KappaMode,
    ManufacturedProblem,
};
use hdgbem::mesh::read_mesh;
use hdgbem::Config;

#[derive(Parser)]
#[command(name = "hdgbem", version, about = "HDG/BEM coupling for an interior diffusion and exterior Laplace problem")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Problem {
    /// Smooth interior field with a nonzero exterior harmonic.
    Table123,
    /// Polynomial field of degree k, reproduced exactly.
    Polynomial,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Kappa,
    H,
}

#[derive(Clone, Copy, ValueEnum)]
enum Layout {
    Constant,
    Interior,
}

impl From<Layout> for KappaMode {
    fn from(l: Layout) -> Self {
        match l {
            Layout::Constant => KappaMode::Constant,
            Layout::Interior => KappaMode::Interior,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Errors and rates on uniformly refined unit-square meshes.
    Converge {
        #[arg(long)]
        degree: usize,
        #[arg(long)]
        levels: usize,
        #[arg(long, default_value_t = 1.0)]
        tau: f64,
        #[arg(long, value_enum, default_value = "table123")]
        problem: Problem,
        /// CSV output; the JSON sidecar is written next to it with extension `.json`.
        #[arg(long)]
        out: PathBuf,
    },
    /// Condition numbers of the coupled matrix against κ or h.
    Condition {
        #[arg(long, value_enum)]
        mode: Mode,
        #[arg(long, default_value_t = 0)]
        degree: usize,
        /// Placement of κ.
        #[arg(long, value_enum, default_value = "constant")]
        layout: Layout,
        /// κ values (kappa mode) or the single κ value (h mode).
        #[arg(long, value_delimiter = ',', default_values_t = [1.0, 2.0, 4.0, 10.0, 20.0, 40.0, 100.0, 400.0, 1000.0])]
        kappa: Vec<f64>,
        /// Refinement levels of the unit square (h mode).
        #[arg(long, value_delimiter = ',', default_values_t = [1usize, 2, 3, 4, 5])]
        levels: Vec<usize>,
        /// CSV output; stdout when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Solves a manufactured problem on a mesh read from file.
    Solve {
        #[arg(long)]
        mesh: PathBuf,
        #[arg(long)]
        degree: usize,
        #[arg(long, default_value_t = 1.0)]
        tau: f64,
        #[arg(long, value_enum, default_value = "table123")]
        problem: Problem,
        /// JSON with the skeleton and density coefficients.
        #[arg(long)]
        dump_solution: Option<PathBuf>,
        /// Coordinate text dump `i j value`; the right-hand side goes to `<path>.rhs`.
        #[arg(long)]
        dump_matrix: Option<PathBuf>,
    },
}

#[derive(Serialize)]
struct ConvergeSummary<'a> {
    problem: &'a str,
    degree: usize,
    tau: f64,
    reports: &'a [ErrorReport],
}

#[derive(Serialize)]
struct ConditionSummary<'a> {
    mode: &'a str,
    degree: usize,
    layout: KappaMode,
    points: &'a [(f64, f64)],
    loglog_slope: Option<f64>,
}

#[derive(Serialize)]
struct SolutionDump<'a> {
    degree: usize,
    uhat: &'a [f64],
    phi: &'a [f64],
    residual: f64,
    density_mean: f64,
}

fn problem(p: Problem, k: usize) -> ManufacturedProblem {
    match p {
        Problem::Table123 => problem_table123(),
        Problem::Polynomial => problem_polynomial(k),
    }
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    Ok(BufWriter::new(
        File::create(path).with_context(|| format!("cannot create {}", path.display()))?,
    ))
}

fn configure_threads() -> std::result::Result<(), String> {
    let Ok(v) = std::env::var("HDGBEM_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .map_err(|_| format!("HDGBEM_THREADS must be a non-negative integer, got {v:?}"))?;
    if n > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| e.to_string())?;
    }
    Ok(())
}

fn run(command: Command) -> Result<()> {
    let config = Config::default();
    match command {
        Command::Converge {
            degree,
            levels,
            tau,
            problem: p,
            out,
        } => {
            let prob = problem(p, degree);
            let reports = convergence_study(degree, levels, tau, &prob, &config)?;
            let mut w = create(&out)?;
            write_csv(&reports, &mut w)?;
            w.flush()?;
            let summary = ConvergeSummary {
                problem: &prob.name,
                degree,
                tau,
                reports: &reports,
            };
            let mut w = create(&out.with_extension("json"))?;
            write_json(&summary, &mut w)?;
            w.flush()?;
        }
        Command::Condition {
            mode,
            degree,
            layout,
            kappa,
            levels,
            out,
        } => {
            let (name, column, points) = match mode {
                Mode::Kappa => {
                    let mesh = kappa_study_mesh()?;
                    ("kappa", "kappa", condition_study_kappa(&kappa, layout.into(), &mesh, degree, &config)?)
                }
                Mode::H => {
                    let value = kappa.first().copied().unwrap_or(1.0);
                    ("h", "h", condition_study_h(layout.into(), value, &levels, degree, &config)?)
                }
            };
            let slope = matches!(mode, Mode::H).then(|| loglog_slope(&points));
            let mut w: Box<dyn Write> = match &out {
                Some(path) => Box::new(create(path)?),
                None => Box::new(std::io::stdout().lock()),
            };
            writeln!(w, "{column},cond")?;
            for (x, c) in &points {
                writeln!(w, "{x:.6e},{c:.6e}")?;
            }
            w.flush()?;
            if let Some(path) = &out {
                let summary = ConditionSummary {
                    mode: name,
                    degree,
                    layout: layout.into(),
                    points: &points,
                    loglog_slope: slope,
                };
                let mut w = create(&path.with_extension("json"))?;
                write_json(&summary, &mut w)?;
                w.flush()?;
            }
        }
        Command::Solve {
            mesh,
            degree,
            tau,
            problem: p,
            dump_solution,
            dump_matrix,
        } => {
            let file = File::open(&mesh).with_context(|| format!("cannot open {}", mesh.display()))?;
            let mesh = read_mesh(BufReader::new(file))?;
            let prob = problem(p, degree);
            let (sys, sol) = solve_problem(&mesh, degree, tau, &prob, &config)?;
            if let Some(path) = &dump_matrix {
                let mut w = create(path)?;
                sys.write_matrix(&mut w)?;
                w.flush()?;
                let mut w = create(&path.with_extension("rhs"))?;
                sys.write_rhs(&mut w)?;
                w.flush()?;
            }
            if let Some(path) = &dump_solution {
                let dump = SolutionDump {
                    degree,
                    uhat: &sol.uhat.coeffs,
                    phi: &sol.phi,
                    residual: sol.residual,
                    density_mean: sol.density_mean,
                };
                let mut w = create(path)?;
                write_json(&dump, &mut w)?;
                w.flush()?;
            }
            let report = compute_errors(&sys, &sol, &prob, 0)?;
            write_json(&report, std::io::stdout().lock())?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    if let Err(e) = configure_threads() {
        eprintln!("error: {e}");
        return ExitCode::from(2);
    }
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            log::error!("{e:#}");
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
