use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use modres::Family;
use modres_cli::commands::{cmd_compute, cmd_qseries_dump, cmd_residues, cmd_scan, cmd_verify, ScanKind, SeriesKind, SuiteArg};
use modres_cli::{CliError, Format, Report, RunConfig, CACHE_DIR_ENV};

/// Exact residue computations for theta-function families of modular forms.
///
/// Exit status: 0 when every check passes, 1 on a theory or oracle mismatch,
/// 2 on a usage or configuration error.
#[derive(Parser)]
#[command(name = "modres", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the rational functions e_0 .. e_M of a family.
    Compute(FamilyArgs),
    /// Residue table with recovered and q-series Fourier coefficients.
    Residues(FamilyArgs),
    /// Run one of the arithmetic scans and cross-check it.
    Scan {
        #[arg(value_enum)]
        kind: ScanKind,
        #[arg(long, default_value_t = 12)]
        m_max: u64,
        #[arg(long, value_enum, default_value_t)]
        format: Format,
    },
    /// Run a verification suite.
    Verify {
        #[arg(long, value_enum, default_value = "all")]
        suite: SuiteArg,
        /// Truncation for the q-series identity checks.
        #[arg(long, default_value_t = 64)]
        trunc: usize,
        #[arg(long, value_enum, default_value_t)]
        format: Format,
    },
    /// Print a q-series (q = exp(pi i tau)) as exact coefficients.
    QseriesDump {
        #[arg(value_enum)]
        series: SeriesKind,
        #[arg(long, default_value_t = 32)]
        trunc: usize,
        #[arg(long, value_parser = parse_family)]
        family: Option<Family>,
        #[arg(long, value_enum, default_value_t)]
        format: Format,
    },
}

#[derive(Args)]
struct FamilyArgs {
    /// "mult:a,4b,4c" or "poly:k:[(i,j,coeff),...]".
    #[arg(long, value_parser = parse_family)]
    family: Family,
    #[arg(long, default_value_t = 10)]
    m_max: u64,
    /// Oracle truncation; defaults to m_max + a.
    #[arg(long)]
    trunc: Option<usize>,
    #[arg(long, value_enum, default_value_t)]
    format: Format,
    #[arg(long, env = CACHE_DIR_ENV)]
    cache_dir: Option<PathBuf>,
    /// Divide the 256*Delta family's coefficients by 256 (prints tau directly).
    #[arg(long)]
    normalize_delta: bool,
}

impl FamilyArgs {
    fn config(self) -> Result<RunConfig, CliError> {
        RunConfig::new(self.family, self.m_max, self.trunc, self.format, self.cache_dir, self.normalize_delta)
    }
}

fn parse_family(s: &str) -> Result<Family, String> {
    s.parse().map_err(|e: modres::recurrence::FamilyError| e.to_string())
}

fn run(cli: Cli) -> Result<(Report, Format), CliError> {
    match cli.command {
        Command::Compute(args) => {
            let cfg = args.config()?;
            Ok((cmd_compute(&cfg)?, cfg.format))
        }
        Command::Residues(args) => {
            let cfg = args.config()?;
            Ok((cmd_residues(&cfg)?, cfg.format))
        }
        Command::Scan { kind, m_max, format } => Ok((cmd_scan(kind, m_max)?, format)),
        Command::Verify { suite, trunc, format } => Ok((cmd_verify(suite, trunc)?, format)),
        Command::QseriesDump { series, trunc, family, format } => {
            Ok((cmd_qseries_dump(series, trunc, family.as_ref())?, format))
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok((report, format)) => {
            print!("{}", report.render(format));
            ExitCode::from(if report.passed { 0 } else { 1 })
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
