//! Command-line front end: named verifications and seeded fuzz campaigns
//! with machine-readable reports.
//!
//! Exit codes: 0 = all properties held; 1 = a property violation was found
//! (the report carries the seeds to regenerate it); 2 = usage or
//! configuration error.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use skewparity::campaign::{
    matrix_profile_report, run_base_change, run_counterexample, run_isotropic, run_skew,
    run_torsion, CampaignConfig, CounterexampleVariant, Execution, FieldChoice,
};
use skewparity::isotropic::GeneratorMode;
use skewparity::linalg::PolyMatrix;
use skewparity::report::Report;
use skewparity::series::Poly;
use skewparity::{Error, PrimeField, Rationals};

#[derive(Parser)]
#[command(
    name = "skewparity",
    version,
    about = "Exact verification of rank parity, isotropic intersections, torsion splitting, and base change over truncated power-series rings"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Fuzz skew families and verify even, non-decreasing rank sequences
    Skew(CampaignArgs),
    /// Fuzz isotropic lattice pairs and verify intersection-dimension parity
    Isotropic(CampaignArgs),
    /// Torsion profiles of intersection complexes, or of one matrix (--input)
    Torsion(TorsionArgs),
    /// Verify base-change formulas on random two-term complexes
    BaseChange(CampaignArgs),
    /// Image dimension of a skew matrix over the square-zero plane ring
    Counterexample(CounterexampleArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, ValueEnum)]
enum FieldArg {
    /// A prime field (see --prime)
    Prime,
    /// Exact rational arithmetic
    Rationals,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, ValueEnum)]
enum FormatArg {
    Json,
    Csv,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, ValueEnum)]
enum ModeArg {
    /// Plant a correction family with a known intersection sequence
    MuParam,
    /// Move a standard pair by random exact isometries
    Cayley,
}

impl From<ModeArg> for GeneratorMode {
    fn from(m: ModeArg) -> GeneratorMode {
        match m {
            ModeArg::MuParam => GeneratorMode::MuParam,
            ModeArg::Cayley => GeneratorMode::Cayley,
        }
    }
}

#[derive(Args)]
struct CommonArgs {
    /// Ground field
    #[arg(long, value_enum, default_value_t = FieldArg::Prime)]
    field: FieldArg,
    /// Odd prime modulus, used when --field prime
    #[arg(long, default_value_t = 32003)]
    prime: u64,
    /// Campaign seed; per-trial seeds are derived from it
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Write the report to this file instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
    /// Report format
    #[arg(long, value_enum, default_value_t = FormatArg::Json)]
    format: FormatArg,
    /// Run trials one after another instead of on the worker pool
    /// (the report is identical either way)
    #[arg(long)]
    sequential: bool,
}

#[derive(Args)]
struct CampaignArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Skew-family size range, inclusive (N or LO..HI)
    #[arg(long, value_parser = parse_range, default_value = "1..8")]
    q_range: (usize, usize),
    /// Lattice rank range, inclusive (N or LO..HI)
    #[arg(long, value_parser = parse_range, default_value = "1..6")]
    r_range: (usize, usize),
    /// Term-rank range for random complexes, inclusive (N or LO..HI)
    #[arg(long, value_parser = parse_range, default_value = "1..6")]
    rank_range: (usize, usize),
    /// Entry degree bound for random complexes
    #[arg(long, default_value_t = 4)]
    max_degree: usize,
    /// Verify truncations k = 1..=K_MAX (also the generated precision)
    #[arg(long, default_value_t = 6)]
    k_max: usize,
    /// Number of random instances
    #[arg(long, default_value_t = 500)]
    trials: usize,
    /// Instance generator for isotropic pairs
    #[arg(long, value_enum, default_value_t = ModeArg::MuParam)]
    mode: ModeArg,
}

#[derive(Args)]
struct TorsionArgs {
    #[command(flatten)]
    campaign: CampaignArgs,
    /// Skip the campaign: read one polynomial matrix from this file and
    /// report its torsion profile. Rows are lines; entries are
    /// comma-separated polynomials in s with integer coefficients,
    /// e.g. "s^2 - 3*s, 1, 0". Lines starting with # are ignored.
    #[arg(long)]
    input: Option<PathBuf>,
}

#[derive(Args)]
struct CounterexampleArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Evaluate the zero matrix (image dimension 0) instead of the showcase
    #[arg(long, conflicts_with = "random")]
    zero: bool,
    /// Evaluate a random plane-skew matrix derived from --seed
    #[arg(long)]
    random: bool,
}

fn parse_range(text: &str) -> Result<(usize, usize), String> {
    let parse_end = |t: &str| t.parse::<usize>().map_err(|_| format!("invalid bound {t:?}"));
    if let Some((lo, hi)) = text.split_once("..") {
        let hi = hi.strip_prefix('=').unwrap_or(hi);
        Ok((parse_end(lo)?, parse_end(hi)?))
    } else {
        let n = parse_end(text)?;
        Ok((n, n))
    }
}

impl CampaignArgs {
    fn config(&self) -> CampaignConfig {
        CampaignConfig {
            field: match self.common.field {
                FieldArg::Prime => FieldChoice::Prime { p: self.common.prime },
                FieldArg::Rationals => FieldChoice::Rationals,
            },
            q_range: self.q_range,
            r_range: self.r_range,
            rank_range: self.rank_range,
            max_degree: self.max_degree,
            k_max: self.k_max,
            trials: self.trials,
            seed: self.common.seed,
            mode: self.mode.into(),
        }
    }

    fn execution(&self) -> Execution {
        if self.common.sequential {
            Execution::Sequential
        } else {
            Execution::Parallel
        }
    }
}

/// Run `$body` with `$f` bound to the concrete field selected by `$config`.
macro_rules! with_field {
    ($config:expr, |$f:ident| $body:expr) => {
        match $config.field {
            FieldChoice::Prime { p } => {
                let $f = PrimeField::new(p)?;
                $body
            }
            FieldChoice::Rationals => {
                let $f = Rationals;
                $body
            }
        }
    };
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let common = match &cli.command {
        Command::Skew(a) | Command::Isotropic(a) | Command::BaseChange(a) => &a.common,
        Command::Torsion(a) => &a.campaign.common,
        Command::Counterexample(a) => &a.common,
    };
    let out = common.out.clone();
    let format = common.format;
    match run(&cli.command) {
        Ok(report) => {
            let rendered = match format {
                FormatArg::Json => report.to_json(),
                FormatArg::Csv => report.to_csv(),
            };
            if let Some(path) = out {
                if let Err(e) = std::fs::write(&path, rendered) {
                    eprintln!("error: cannot write {}: {e}", path.display());
                    return ExitCode::from(2);
                }
            } else {
                print!("{rendered}");
            }
            if report.all_ok() {
                ExitCode::SUCCESS
            } else {
                eprintln!(
                    "{} of {} trials failed; failing seeds are in the report",
                    report.summary.failures, report.summary.trials
                );
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn run(command: &Command) -> Result<Report, Error> {
    match command {
        Command::Skew(args) => {
            let config = args.config();
            with_field!(config, |f| run_skew(f, &config, args.execution()))
        }
        Command::Isotropic(args) => {
            let config = args.config();
            with_field!(config, |f| run_isotropic(f, &config, args.execution()))
        }
        Command::Torsion(args) => {
            let config = args.campaign.config();
            if let Some(path) = &args.input {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| Error::Usage(format!("cannot read {}: {e}", path.display())))?;
                with_field!(config, |f| {
                    let matrix = parse_matrix_file(f, &text)?;
                    matrix_profile_report(&matrix, &config)
                })
            } else {
                with_field!(config, |f| run_torsion(f, &config, args.campaign.execution()))
            }
        }
        Command::BaseChange(args) => {
            let config = args.config();
            with_field!(config, |f| run_base_change(f, &config, args.execution()))
        }
        Command::Counterexample(args) => {
            let variant = if args.zero {
                CounterexampleVariant::Zero
            } else if args.random {
                CounterexampleVariant::Random
            } else {
                CounterexampleVariant::Fixed
            };
            let config = CampaignConfig {
                field: match args.common.field {
                    FieldArg::Prime => FieldChoice::Prime { p: args.common.prime },
                    FieldArg::Rationals => FieldChoice::Rationals,
                },
                trials: 1,
                seed: args.common.seed,
                ..Default::default()
            };
            with_field!(config, |f| run_counterexample(f, variant, &config))
        }
    }
}

/// Rows are non-empty, non-comment lines; entries are comma-separated
/// polynomials accepted by the polynomial parser.
fn parse_matrix_file<F: skewparity::Field>(field: F, text: &str) -> Result<PolyMatrix<F>, Error> {
    let mut rows: Vec<Vec<Poly<F>>> = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut row = Vec::new();
        for cell in line.split(',') {
            let poly = Poly::parse(field.clone(), cell).map_err(|e| {
                let reason = match e {
                    Error::Usage(msg) => msg,
                    other => other.to_string(),
                };
                Error::Usage(format!("line {}: {reason}", lineno + 1))
            })?;
            row.push(poly);
        }
        if let Some(first) = rows.first() {
            if row.len() != first.len() {
                return Err(Error::Usage(format!(
                    "line {}: {} entries, expected {}",
                    lineno + 1,
                    row.len(),
                    first.len()
                )));
            }
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(Error::Usage("matrix file has no rows".into()));
    }
    let (r, c) = (rows.len(), rows[0].len());
    let mut flat = rows.into_iter().flatten();
    Ok(PolyMatrix::from_fn(field, r, c, |_, _| flat.next().expect("row-major entries")))
}
