use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use golden_cli::{Algebra, CliError, Overrides, DEFAULT_VALIDATION_TOL};

/// Almost Golden Riemannian structures: validation, identity checks and adapted connections.
#[derive(Parser)]
#[command(name = "golden", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct RunArgs {
    /// Spec file (TOML)
    spec: PathBuf,
    /// Number of sample points
    #[arg(long)]
    points: Option<usize>,
    /// Sampling seed
    #[arg(long)]
    seed: Option<u64>,
    /// Identity tolerance
    #[arg(long)]
    tol: Option<f64>,
    /// Tolerance for finite-difference curvature
    #[arg(long)]
    curvature_tol: Option<f64>,
    /// Step for finite-difference partials
    #[arg(long)]
    fd_step: Option<f64>,
    /// Tolerance for structure validation
    #[arg(long, default_value_t = DEFAULT_VALIDATION_TOL)]
    validation_tol: f64,
}

impl RunArgs {
    fn overrides(&self) -> Overrides {
        Overrides {
            points: self.points,
            seed: self.seed,
            tol: self.tol,
            curvature_tol: self.curvature_tol,
            fd_step: self.fd_step,
            validation_tol: self.validation_tol,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Check that a spec describes an almost Golden Riemannian structure
    Validate {
        spec: PathBuf,
        #[arg(long, default_value_t = DEFAULT_VALIDATION_TOL)]
        validation_tol: f64,
    },
    /// Run every check and print the report
    Report {
        #[command(flatten)]
        run: RunArgs,
        /// Also write the report as JSON
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Run only the identities that hold for every structure
    Lemmas {
        #[command(flatten)]
        run: RunArgs,
    },
    /// First prolongation of a matrix Lie algebra
    Prolongation {
        #[arg(long, value_enum)]
        algebra: AlgebraArg,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        r: Option<usize>,
        #[arg(long)]
        s: Option<usize>,
    },
    /// Built-in example structures
    Catalog {
        #[command(subcommand)]
        command: CatalogCommand,
    },
}

#[derive(Subcommand)]
enum CatalogCommand {
    /// List the entries
    List,
    /// Write an entry as a spec file
    Export {
        name: String,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum AlgebraArg {
    O,
    Gl,
    Oxo,
    Glxgl,
}

fn run(cli: Cli, out: &mut dyn Write) -> Result<(), CliError> {
    match cli.command {
        Command::Validate { spec, validation_tol } => golden_cli::validate(&spec, validation_tol, out),
        Command::Report { run, json } => golden_cli::report(&run.spec, &run.overrides(), json.as_deref(), out),
        Command::Lemmas { run } => golden_cli::lemmas(&run.spec, &run.overrides(), out),
        Command::Prolongation { algebra, n, r, s } => {
            let algebra = match algebra {
                AlgebraArg::O => Algebra::O,
                AlgebraArg::Gl => Algebra::Gl,
                AlgebraArg::Oxo => Algebra::OxO,
                AlgebraArg::Glxgl => Algebra::GlxGl,
            };
            golden_cli::prolongation(algebra, n, r, s, out)
        }
        Command::Catalog { command: CatalogCommand::List } => golden_cli::catalog_list(out),
        Command::Catalog { command: CatalogCommand::Export { name, output } } => {
            golden_cli::catalog_export(&name, output.as_deref(), out)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    match run(cli, &mut out) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let _ = out.flush();
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
