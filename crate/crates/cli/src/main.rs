//! `christol`: batch front end for the christol-core algorithms.
//!
//! Exit status: 0 on success, 1 on domain errors, 2 on malformed input.
//! Failures print `{"error": code, "detail": message}` on stderr.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;

use christol_core::annihilator::{
    certificate_to_value, find_linearized_annihilator, first_nonvanishing, parse_certificate,
    DEFAULT_DEGREES,
};
use christol_core::automaton::build_dfao_in;
use christol_core::io::{branch_from_json, import_series, poly_from_json, series_to_json, to_json_text, BranchSpec};
use christol_core::polytope::{bound_report_for, BoundTask};
use christol_core::{
    diagonal_pipeline_with, export_dfao, hensel_solve, BranchSpace, Error, ExportFormat, PipelineOptions,
    Result,
};
use clap::{Parser, Subcommand, ValueEnum};
use num_bigint::BigUint;
use serde_json::json;

#[derive(Parser, Debug)]
#[command(name = "christol", version, about = "Algebraic power series over finite fields")]
struct Cli {
    /// Worker threads for the parallel lattice enumeration (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Write the result to this file instead of standard output.
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Hensel-lift a branch to a total-degree precision.
    Solve {
        #[arg(long)]
        branch: PathBuf,
        #[arg(long)]
        prec: usize,
    },
    /// Newton-polytope bounds for an annihilating polynomial.
    Bound {
        #[arg(long)]
        poly: PathBuf,
        /// Which bound N_effective reports.
        #[arg(long, value_enum, default_value_t = Task::Diagonal)]
        task: Task,
    },
    /// Diagonal of a branch (to `order` coefficients) or of a series file.
    Diagonal {
        #[arg(long, conflicts_with = "series", required_unless_present = "series")]
        branch: Option<PathBuf>,
        #[arg(long)]
        series: Option<PathBuf>,
        #[arg(long, requires = "branch")]
        order: Option<usize>,
        /// Keep the first m variables and collapse the rest.
        #[arg(long)]
        partial: Option<usize>,
    },
    /// Linearized annihilator of the diagonal of a branch, or of a univariate series.
    Annihilator {
        #[arg(long, conflicts_with = "series", required_unless_present = "series")]
        branch: Option<PathBuf>,
        #[arg(long)]
        series: Option<PathBuf>,
        /// Diagonal coefficients obtained by Hensel lifting.
        #[arg(long, default_value_t = 400)]
        order: usize,
        /// Verification order (default: twice --order).
        #[arg(long)]
        verify_order: Option<usize>,
        /// p-degree cap (default: N_effective of the branch; required with --series).
        #[arg(long)]
        nmax: Option<usize>,
        /// Coefficient-degree schedule, comma separated.
        #[arg(long, value_delimiter = ',')]
        degrees: Option<Vec<usize>>,
    },
    /// Coefficient of a branch at an index of any size.
    Coeff {
        #[arg(long)]
        branch: PathBuf,
        /// Comma-separated decimal coordinates.
        #[arg(long)]
        index: String,
    },
    /// Coefficient automaton of a branch.
    Automaton {
        #[arg(long)]
        branch: PathBuf,
        #[arg(long, default_value_t = 100_000)]
        max_states: usize,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Re-check a certificate against a univariate series.
    Verify {
        #[arg(long)]
        cert: PathBuf,
        #[arg(long)]
        series: PathBuf,
        #[arg(long)]
        order: usize,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Task {
    Diagonal,
    Christol,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Format {
    Json,
    Dot,
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::MalformedInput(format!("{}: {e}", path.display())))
}

fn load_branch(path: &Path) -> Result<BranchSpec> {
    branch_from_json(&read(path)?).map_err(|e| match e {
        Error::MalformedInput(m) => Error::MalformedInput(format!("{}: {m}", path.display())),
        other => other,
    })
}

fn space_for(spec: &BranchSpec) -> Result<std::sync::Arc<BranchSpace>> {
    match spec.check_prec {
        Some(prec) => BranchSpace::with_check_prec(&spec.branch, prec),
        None => BranchSpace::new(&spec.branch),
    }
}

fn parse_index(text: &str) -> Result<Vec<BigUint>> {
    text.split(',')
        .map(|s| {
            BigUint::from_str(s.trim())
                .map_err(|_| Error::MalformedInput(format!("index coordinate `{}` is not a nonnegative integer", s.trim())))
        })
        .collect()
}

fn run(cli: &Cli) -> Result<String> {
    match &cli.command {
        Command::Solve { branch, prec } => {
            let spec = load_branch(branch)?;
            Ok(series_to_json(&hensel_solve(&spec.branch, *prec)?))
        }
        Command::Bound { poly, task } => {
            let a = poly_from_json(&read(poly)?)?;
            let task = match task {
                Task::Diagonal => BoundTask::Diagonal,
                Task::Christol => BoundTask::Christol,
            };
            let report = bound_report_for(&a, task)?;
            Ok(to_json_text(&serde_json::to_value(report).expect("report serializes")))
        }
        Command::Diagonal { branch, series, order, partial } => {
            let full = match (branch, series) {
                (Some(b), _) => {
                    let spec = load_branch(b)?;
                    let order = order.ok_or_else(|| Error::MalformedInput("--order is required with --branch".into()))?;
                    hensel_solve(&spec.branch, spec.branch.nvars() * order)?
                }
                (None, Some(s)) => import_series(&read(s)?)?,
                (None, None) => unreachable!("clap enforces one input"),
            };
            let d = match partial {
                Some(m) => full.partial_diagonal(*m)?,
                None => full.diagonal(),
            };
            Ok(series_to_json(&d))
        }
        Command::Annihilator { branch, series, order, verify_order, nmax, degrees } => {
            let degrees = degrees.clone().unwrap_or_else(|| DEFAULT_DEGREES.to_vec());
            match (branch, series) {
                (Some(b), _) => {
                    let spec = load_branch(b)?;
                    let opts = PipelineOptions {
                        order: *order,
                        verify_order: verify_order.unwrap_or(2 * order),
                        n_max: *nmax,
                        degrees,
                    };
                    let r = diagonal_pipeline_with(&spec.branch, &opts)?;
                    Ok(to_json_text(&certificate_to_value(&r.certificate, Some(&r.bound))))
                }
                (None, Some(s)) => {
                    let g = import_series(&read(s)?)?;
                    let nmax = nmax.ok_or_else(|| Error::MalformedInput("--nmax is required with --series".into()))?;
                    let cert = find_linearized_annihilator(&g, nmax, &degrees)?;
                    Ok(to_json_text(&certificate_to_value(&cert, None)))
                }
                (None, None) => unreachable!("clap enforces one input"),
            }
        }
        Command::Coeff { branch, index } => {
            let spec = load_branch(branch)?;
            let index = parse_index(index)?;
            let field = spec.branch.field().clone();
            let value = space_for(&spec)?.coeff(&index)?;
            Ok(format!("{}\n", field.fmt_elem(value)))
        }
        Command::Automaton { branch, max_states, format } => {
            let spec = load_branch(branch)?;
            let m = build_dfao_in(&space_for(&spec)?, *max_states)?;
            let format = match format {
                Format::Json => ExportFormat::Json,
                Format::Dot => ExportFormat::Dot,
            };
            Ok(export_dfao(&m, format))
        }
        Command::Verify { cert, series, order } => {
            let (cert, _) = parse_certificate(&read(cert)?)?;
            let g = import_series(&read(series)?)?;
            match first_nonvanishing(&cert.l, &g, *order)? {
                None => Ok(to_json_text(&json!({"verified": true, "order": order}))),
                Some(degree) => Err(Error::RelationCheckFailed { degree }),
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("{}", json!({"error": "MalformedInput", "detail": e.to_string()}));
            return ExitCode::from(2);
        }
    }
    let outcome = run(&cli).and_then(|text| match &cli.output {
        Some(path) => fs::write(path, text)
            .map_err(|e| Error::MalformedInput(format!("{}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    });
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let mut report = json!({"error": e.code(), "detail": e.to_string()});
            if matches!(e, Error::SingularBranch) {
                report["hint"] = json!("write the coefficients to a series file and pass it with --series");
            }
            eprintln!("{report}");
            ExitCode::from(if e.is_input_error() { 2 } else { 1 })
        }
    }
}
