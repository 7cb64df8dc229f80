use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use prasymp::{Error, EvalMode};

mod commands;

#[derive(Parser, Debug)]
#[command(
    name = "prasymp",
    version,
    about = "Large-degree asymptotics of linear-coefficient recurrence polynomials"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Evaluate p_n(x) by the recurrence.
    Eval(EvalArgs),
    /// Evaluate the asymptotic formula at a scaled point.
    Asym(AsymArgs),
    /// Compare formulas against the recurrence over several degrees.
    Compare(CompareArgs),
    /// Compute all zeros of p_n.
    Zeros(ZerosArgs),
    /// Trace the curved branch of the limiting zero set.
    Curve(CurveArgs),
    /// Write the data files for the zero-set figure.
    Figure(FigureArgs),
    /// Run the built-in invariant checks.
    Selftest(SelftestArgs),
}

#[derive(Args, Debug, Clone, Copy)]
struct ParamArgs {
    /// Drift of the diagonal coefficient.
    #[arg(long, allow_hyphen_values = true)]
    d: f64,
    /// Slope of the off-diagonal coefficient.
    #[arg(long, allow_hyphen_values = true)]
    a: f64,
    /// Offset of the off-diagonal coefficient.
    #[arg(long, allow_hyphen_values = true)]
    b: f64,
}

#[derive(Args, Debug)]
struct OutputArgs {
    /// Output file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Defaults to JSON for `.json` output files and CSV otherwise.
    #[arg(long, value_enum)]
    format: Option<Format>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Args, Debug)]
struct EvalArgs {
    #[command(flatten)]
    params: ParamArgs,
    #[arg(long)]
    n: usize,
    /// Argument as `re,im` or a real number.
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
    x: Complex64,
    /// native, rational, highprec or highprec:BITS.
    #[arg(long, value_parser = parse_mode, default_value = "native")]
    mode: EvalMode,
    /// Also report the derivative.
    #[arg(long)]
    deriv: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct AsymArgs {
    #[command(flatten)]
    params: ParamArgs,
    #[arg(long)]
    n: usize,
    /// Scaled point as `re,im`; `--y` is an alias.
    #[arg(long, alias = "y", value_parser = parse_complex, allow_hyphen_values = true)]
    z: Complex64,
    /// Region width in scaled coordinates.
    #[arg(long, default_value_t = prasymp::asymptotics::DEFAULT_DELTA)]
    delta: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct CompareArgs {
    #[command(flatten)]
    params: ParamArgs,
    /// Ascending degrees, comma separated.
    #[arg(long, value_delimiter = ',', default_value = "100,400,1600")]
    n_list: Vec<usize>,
    /// Scaled points (repeatable); representative points when omitted.
    #[arg(long, alias = "y", value_parser = parse_complex, allow_hyphen_values = true)]
    z: Vec<Complex64>,
    /// Region width; defaults to the representative width for the case.
    #[arg(long)]
    delta: Option<f64>,
    /// Oracle arithmetic: auto, native, rational, highprec or highprec:BITS.
    #[arg(long, default_value = "auto")]
    mode: String,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args, Debug)]
struct ZerosArgs {
    #[command(flatten)]
    params: ParamArgs,
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = prasymp::zeros::DEFAULT_TOL)]
    tol: f64,
    #[arg(long, default_value_t = prasymp::zeros::DEFAULT_MAXITER)]
    maxiter: usize,
    /// Evaluation arithmetic; chosen per case when omitted.
    #[arg(long, value_parser = parse_mode)]
    mode: Option<EvalMode>,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args, Debug)]
struct CurveArgs {
    /// Strength of the negative slope (positive).
    #[arg(long = "A")]
    neg_a: f64,
    /// Samples on each half of the curve.
    #[arg(long, default_value_t = prasymp::curve::DEFAULT_POINTS)]
    points: usize,
    #[arg(long, default_value_t = prasymp::curve::DEFAULT_TOL)]
    tol: f64,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args, Debug)]
struct FigureArgs {
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    d: f64,
    #[arg(long, default_value_t = -1.0, allow_hyphen_values = true)]
    a: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    b: f64,
    #[arg(long, default_value_t = 200)]
    n: usize,
    /// Output directory.
    #[arg(long, default_value = "figure")]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct SelftestArgs {
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

fn parse_complex(s: &str) -> Result<Complex64, String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let num = |t: &str| t.parse::<f64>().map_err(|e| format!("bad number {t:?}: {e}"));
    let z = match parts.as_slice() {
        [re] => Complex64::new(num(re)?, 0.0),
        [re, im] => Complex64::new(num(re)?, num(im)?),
        _ => return Err(format!("expected `re,im`, got {s:?}")),
    };
    if z.re.is_finite() && z.im.is_finite() {
        Ok(z)
    } else {
        Err(format!("non-finite value {s:?}"))
    }
}

fn parse_mode(s: &str) -> Result<EvalMode, String> {
    let s = s.trim().to_ascii_lowercase();
    let bits = |t: &str| {
        t.parse::<u32>()
            .ok()
            .filter(|&b| b >= 53)
            .ok_or_else(|| format!("bits must be an integer >= 53, got {t:?}"))
    };
    match s.as_str() {
        "native" => Ok(EvalMode::Native),
        "rational" => Ok(EvalMode::Rational),
        "highprec" => Ok(EvalMode::HighPrec { bits: 256 }),
        _ => {
            if let Some(rest) = s.strip_prefix("highprec:") {
                Ok(EvalMode::HighPrec { bits: bits(rest)? })
            } else if let Some(rest) = s.strip_prefix("highprec(").and_then(|r| r.strip_suffix(')')) {
                Ok(EvalMode::HighPrec { bits: bits(rest)? })
            } else {
                Err(format!("unknown mode {s:?}"))
            }
        }
    }
}

fn configure_threads() -> Result<(), String> {
    let Ok(raw) = std::env::var("PRASYMP_THREADS") else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| format!("PRASYMP_THREADS must be a positive integer, got {raw:?}"))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| e.to_string())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => e.exit(),
    };
    if let Err(msg) = configure_threads() {
        eprintln!("error: {msg}");
        return ExitCode::from(2);
    }
    match commands::run(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::InvalidInput(_) => ExitCode::from(2),
                _ => ExitCode::from(1),
            }
        }
    }
}
