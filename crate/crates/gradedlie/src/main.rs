use std::io::Write as _;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use gradedlie::cli::{
    cmd_aut_factor, cmd_aut_verify, cmd_classify, cmd_jacobi, cmd_report, default_grid,
    parse_grid_file, CmdOutcome, OutputFormat, RunConfig,
};
use gradedlie::exactlin::Scalar;
use gradedlie::rng::DEFAULT_SEED;

/// Exact-arithmetic engine for the twisted deformative Schrödinger-Virasoro
/// Lie algebras: Jacobi verification, derivation classification, and
/// automorphism factorization on finite windows.
#[derive(Parser)]
#[command(name = "gradedlie", version, about)]
struct Cli {
    #[command(flatten)]
    common: CommonArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Table,
}

#[derive(Args, Clone)]
struct CommonArgs {
    /// Algebra parameter lambda, an exact rational like `-2` or `1/3`
    #[arg(long, global = true, allow_hyphen_values = true, default_value = "3")]
    lambda: String,
    /// Algebra parameter mu, an exact rational like `0` or `1/3`
    #[arg(long, global = true, allow_hyphen_values = true, default_value = "1/3")]
    mu: String,
    /// Truncation window radius N (indices -N..=N), minimum 5
    #[arg(long, global = true, default_value_t = 6)]
    window: i64,
    /// Degree range `a..b` for the derivation solver
    #[arg(
        long,
        global = true,
        allow_hyphen_values = true,
        default_value = "-3..3"
    )]
    degrees: String,
    /// PRNG seed for sampled checks (env GRADEDLIE_SEED overrides)
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Output format
    #[arg(long, global = true, value_enum, default_value_t = Format::Table)]
    format: Format,
}

#[derive(Subcommand)]
enum Command {
    /// Exhaustively verify the Jacobi identity on the window
    Jacobi,
    /// Compute the degree-0 derivation classification report
    Classify,
    /// Run the classification over a parameter grid
    Report {
        /// Grid file with one `lambda mu` pair per line; default grid if absent
        #[arg(long)]
        grid: Option<std::path::PathBuf>,
    },
    /// Verify or factor an automorphism given by a spec
    Aut {
        #[command(subcommand)]
        action: AutAction,
    },
}

#[derive(Subcommand)]
enum AutAction {
    /// Homomorphism + invertibility check, plus group-law sampling
    Verify {
        #[command(flatten)]
        input: AutInput,
    },
    /// Factor through the classified generating families
    Factor {
        #[command(flatten)]
        input: AutInput,
    },
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct AutInput {
    /// Spec file (constructor lines, or `images` + image table)
    #[arg(long)]
    spec: Option<std::path::PathBuf>,
    /// Inline spec; `;` separates lines
    #[arg(long)]
    expr: Option<String>,
}

fn build_config(common: &CommonArgs) -> Result<RunConfig, String> {
    let lambda = Scalar::parse(&common.lambda).map_err(|e| e.to_string())?;
    let mu = Scalar::parse(&common.mu).map_err(|e| e.to_string())?;
    let degrees = parse_degree_range(&common.degrees)?;
    let seed = match std::env::var("GRADEDLIE_SEED") {
        Ok(v) => v
            .parse::<u64>()
            .map_err(|_| format!("GRADEDLIE_SEED is not an unsigned integer: {v:?}"))?,
        Err(_) => common.seed,
    };
    let mut cfg = RunConfig::new(lambda, mu);
    cfg.window_radius = common.window;
    cfg.degree_range = degrees;
    cfg.seed = seed;
    cfg.format = match common.format {
        Format::Json => OutputFormat::Json,
        Format::Table => OutputFormat::Table,
    };
    Ok(cfg)
}

fn parse_degree_range(text: &str) -> Result<(i64, i64), String> {
    let (lo, hi) = text
        .split_once("..")
        .ok_or_else(|| format!("degree range must look like -3..3, got {text:?}"))?;
    let lo: i64 = lo
        .trim()
        .parse()
        .map_err(|_| format!("bad degree {lo:?}"))?;
    let hi: i64 = hi
        .trim()
        .parse()
        .map_err(|_| format!("bad degree {hi:?}"))?;
    Ok((lo, hi))
}

fn read_aut_spec(input: &AutInput) -> Result<String, String> {
    if let Some(path) = &input.spec {
        return std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()));
    }
    if let Some(expr) = &input.expr {
        return Ok(expr.replace(';', "\n"));
    }
    Err("an aut spec is required (--spec FILE or --expr TEXT)".to_owned())
}

fn emit(outcome: CmdOutcome) -> ExitCode {
    print!("{}", outcome.stdout);
    if !outcome.stderr.is_empty() {
        let _ = write!(std::io::stderr(), "{}", outcome.stderr);
    }
    ExitCode::from(outcome.status as u8)
}

fn invalid(message: String) -> ExitCode {
    let _ = writeln!(std::io::stderr(), "{message}");
    ExitCode::from(2)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let cfg = match build_config(&cli.common) {
        Ok(cfg) => cfg,
        Err(e) => return invalid(e),
    };
    match cli.command {
        Command::Jacobi => emit(cmd_jacobi(&cfg)),
        Command::Classify => emit(cmd_classify(&cfg)),
        Command::Report { grid } => {
            let points = match grid {
                Some(path) => match std::fs::read_to_string(&path) {
                    Ok(text) => match parse_grid_file(&text) {
                        Ok(g) => g,
                        Err(e) => return invalid(format!("{}: {e}", path.display())),
                    },
                    Err(e) => return invalid(format!("{}: {e}", path.display())),
                },
                None => default_grid(),
            };
            emit(cmd_report(&points, &cfg))
        }
        Command::Aut { action } => {
            let (input, is_factor) = match &action {
                AutAction::Verify { input } => (input, false),
                AutAction::Factor { input } => (input, true),
            };
            match read_aut_spec(input) {
                Ok(spec) => {
                    if is_factor {
                        emit(cmd_aut_factor(&cfg, &spec))
                    } else {
                        emit(cmd_aut_verify(&cfg, &spec))
                    }
                }
                Err(e) => invalid(e),
            }
        }
    }
}
