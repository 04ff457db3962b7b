//! Command-line experiment runner.
//!
//! Settings come from `--config FILE` (key = value), then from flags, which win.
//! The output directory defaults to `$NODAL_LAB_OUT`, else `./out`. Exit status is
//! 2 for configuration errors, 1 when a computation fails or a checked property
//! does not hold, 0 otherwise.

mod commands;
pub mod config;

use std::ffi::OsString;
use std::fs;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

pub use commands::Report;
pub use config::{ExperimentConfig, Format};

use crate::error::Error;

#[derive(Debug, Parser)]
#[command(name = "nodal-lab", version, about = "Eigenfunction experiments on the torus, sphere and disc")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    flags: Flags,
}

#[derive(Debug, Subcommand, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    /// List basis modes with λ ≤ lambda-max
    Modes,
    /// Eigenvalue counts against the Weyl main term
    Weyl,
    /// Extract the nodal set of one mode
    Nodal,
    /// Nodal domains and Faber–Krahn margins of one mode
    Domains,
    /// Nodal gradient identities for one mode
    Identity,
    /// L^p norm sweeps along a family of modes
    Norms,
    /// Period sums over a closed geodesic
    Kuznecov,
    /// Equator mode-weight profile against the arcsine law
    RestrictProfile,
    /// Growth of the holomorphic continuation in the tube
    CxGrowth,
    /// Zeros of the continuation along a complexified geodesic
    CxZeros,
    /// Boundary sign changes of disc modes
    BoundaryCount,
    /// Calibrate the small-ball constant
    CalibrateSmallball,
    /// Run the acceptance suite and write summary.json
    All,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Modes => "modes",
            Command::Weyl => "weyl",
            Command::Nodal => "nodal",
            Command::Domains => "domains",
            Command::Identity => "identity",
            Command::Norms => "norms",
            Command::Kuznecov => "kuznecov",
            Command::RestrictProfile => "restrict-profile",
            Command::CxGrowth => "cx-growth",
            Command::CxZeros => "cx-zeros",
            Command::BoundaryCount => "boundary-count",
            Command::CalibrateSmallball => "calibrate-smallball",
            Command::All => "all",
        }
    }
}

#[derive(Debug, Args, Default)]
struct Flags {
    /// key = value configuration file; flags override it
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,
    #[arg(long, global = true, value_name = "torus|sphere|disc")]
    surface: Option<String>,
    /// torus wave vector
    #[arg(long, global = true, value_name = "a,b", allow_hyphen_values = true)]
    k: Option<String>,
    /// sphere degree, or radial index on the disc
    #[arg(long = "N", global = true)]
    n: Option<String>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    m: Option<String>,
    #[arg(long, global = true, value_name = "dirichlet|neumann")]
    bc: Option<String>,
    #[arg(long, global = true, value_name = "cos|sin")]
    parity: Option<String>,
    #[arg(long, global = true)]
    grid: Option<String>,
    #[arg(long = "lambda-max", global = true)]
    lambda_max: Option<String>,
    /// tube / strip half-width
    #[arg(long, global = true)]
    eps: Option<String>,
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<String>,
    #[arg(long, global = true, value_name = "csv,json,svg")]
    format: Option<String>,
    #[arg(long, global = true)]
    threads: Option<String>,
    #[arg(long, global = true)]
    seed: Option<String>,
    /// small-ball radius constant
    #[arg(long, global = true)]
    a: Option<String>,
    #[arg(long, global = true)]
    trials: Option<String>,
}

impl Flags {
    fn to_config(&self) -> crate::Result<ExperimentConfig> {
        let mut cfg = ExperimentConfig::default();
        let pairs = [
            ("surface", &self.surface),
            ("k", &self.k),
            ("N", &self.n),
            ("m", &self.m),
            ("bc", &self.bc),
            ("parity", &self.parity),
            ("grid", &self.grid),
            ("lambda_max", &self.lambda_max),
            ("eps", &self.eps),
            ("out", &self.out),
            ("format", &self.format),
            ("threads", &self.threads),
            ("seed", &self.seed),
            ("a", &self.a),
            ("trials", &self.trials),
        ];
        for (k, v) in pairs {
            if let Some(v) = v {
                cfg.set(k, v)?;
            }
        }
        Ok(cfg)
    }
}

fn is_config_error(e: &Error) -> bool {
    matches!(
        e,
        Error::Config(_)
            | Error::InvalidArgument(_)
            | Error::OutOfChart(_)
            | Error::Unsupported { .. }
            | Error::MixedEigenvalue(..)
            | Error::OutsideTube { .. }
    )
}

/// Resolves the full configuration: file, then flags, then the output-directory default.
fn resolve(flags: &Flags, command: Command) -> crate::Result<ExperimentConfig> {
    let mut cfg = match &flags.config {
        Some(p) => {
            let text = fs::read_to_string(p).map_err(|e| Error::Config(format!("{}: {e}", p.display())))?;
            ExperimentConfig::parse(&text)?
        }
        None => ExperimentConfig::default(),
    };
    cfg.overlay(&flags.to_config()?);
    if let Some(exp) = &cfg.experiment {
        if exp != command.name() {
            return Err(Error::Config(format!("config is for `{exp}`, not `{}`", command.name())));
        }
    }
    if cfg.out.is_none() {
        let dir = std::env::var_os("NODAL_LAB_OUT").filter(|s| !s.is_empty()).map_or_else(|| "out".into(), PathBuf::from);
        cfg.out = Some(dir);
    }
    Ok(cfg)
}

/// Runs one command line and returns the process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let cfg = match resolve(&cli.flags, cli.command) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return 2;
        }
    };
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(cfg.threads.unwrap_or(0)).build() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: thread pool: {e}");
            return 1;
        }
    };
    let result = pool.install(|| commands::execute(cli.command, &cfg).and_then(|r| r.write(&cfg).map(|()| r)));
    match result {
        Ok(report) => {
            print!("{}", report.summary_text());
            if report.all_checks_pass() {
                0
            } else {
                for (name, _) in report.checks.iter().filter(|c| !c.1) {
                    eprintln!("check failed: {name}");
                }
                1
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            if is_config_error(&e) {
                2
            } else {
                1
            }
        }
    }
}
