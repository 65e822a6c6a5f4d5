//! Command-line driver.
//!
//! Exit codes: 0 on success (and for `--help`/`--version`), 1 for usage and
//! validation errors, 2 for I/O errors.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};

use scatterlab_core::mueller::cloude_spectrum;
use scatterlab_core::numerics::DEFAULT_TOL;
use scatterlab_core::sweep::run_sweep;
use scatterlab_core::tomography::{
    mle_reconstruct, monte_carlo_errors, simulate_counts, standard_projectors, Noise,
};

use crate::config::parse_config;
use crate::emit::{curve, CurveKind};
use crate::error::{CliError, Result};
use crate::formats::{
    counts_from_csv, counts_to_csv, curve_to_csv, decomposition_to_csv, decomposition_to_json,
    error_report_to_string, projectors_from_str, read_mueller, read_text, reconstruction_to_string,
    state_from_str, sweep_to_csv, write_text,
};

/// Environment variable consulted when no `--seed` is given.
pub const SEED_ENV: &str = "SCATTERLAB_SEED";

#[derive(Parser, Debug)]
#[command(
    name = "scatterlab",
    version,
    about = "Entangled photon pairs through scattering media"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Scatter the singlet through randomly drawn media and write one CSV row per sample.
    Sweep {
        /// Key-value or JSON sweep configuration.
        #[arg(long)]
        config: PathBuf,
        /// Master seed; falls back to SCATTERLAB_SEED, then to the config's `seed`.
        #[arg(long)]
        seed: Option<u64>,
        /// Output file (stdout if omitted).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write the Werner or MEMS boundary curve as `param,S_L,T`.
    Curve {
        #[arg(long, value_enum)]
        kind: CurveKind,
        #[arg(long, default_value_t = 101)]
        samples: usize,
        /// Output file (stdout if omitted).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Cloude decomposition of a Mueller matrix (4x4 CSV, or JSON for `.json` files).
    Decompose {
        #[arg(long)]
        mueller: PathBuf,
        /// Print JSON instead of CSV.
        #[arg(long)]
        json: bool,
        /// Output file (stdout if omitted).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Two-photon polarization tomography.
    Tomo {
        #[command(subcommand)]
        command: TomoCommand,
    },
}

#[derive(Subcommand, Debug)]
enum TomoCommand {
    /// Expected (or Poisson-drawn) coincidence counts for a state.
    Simulate {
        /// Density matrix JSON.
        #[arg(long)]
        state: PathBuf,
        /// Expected number of pairs per measurement setting.
        #[arg(long)]
        counts_per_setting: f64,
        /// Draw each count from a Poisson distribution instead of using its mean.
        #[arg(long)]
        poisson: bool,
        /// Seed for the Poisson draws; falls back to SCATTERLAB_SEED.
        #[arg(long)]
        seed: Option<u64>,
        /// Projector labels to use instead of the standard sixteen.
        #[arg(long)]
        projectors: Option<PathBuf>,
        /// Output file (stdout if omitted).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Maximum-likelihood density matrix from a `setting,count` CSV.
    Reconstruct {
        #[arg(long)]
        counts: PathBuf,
        /// Known pair count per setting; fitted from the data if omitted.
        #[arg(long)]
        counts_per_setting: Option<f64>,
        /// Output file (stdout if omitted).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Monte Carlo error bars on linear entropy and tangle.
    Errors {
        #[arg(long)]
        counts: PathBuf,
        /// Number of perturbed reconstructions.
        #[arg(long, default_value_t = 1000)]
        trials: usize,
        /// Falls back to SCATTERLAB_SEED.
        #[arg(long)]
        seed: Option<u64>,
        /// Known pair count per setting; fitted from the data if omitted.
        #[arg(long)]
        counts_per_setting: Option<f64>,
        /// Output file (stdout if omitted).
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Parses `args` (program name first), runs the command and returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    run_with_env_seed(args, std::env::var(SEED_ENV).ok().as_deref(), out, err)
}

/// [`run`] with the value of `SCATTERLAB_SEED` passed in.
pub fn run_with_env_seed<I, T>(
    args: I,
    env_seed: Option<&str>,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = write!(err, "{text}");
                1
            } else {
                let _ = write!(out, "{text}");
                0
            };
        }
    };
    match execute(cli.command, env_seed, out, err) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

/// `--seed`, then the environment, then the config file.
fn resolve_seed(flag: Option<u64>, env: Option<&str>, config: Option<u64>) -> Result<Option<u64>> {
    if flag.is_some() {
        return Ok(flag);
    }
    if let Some(s) = env {
        return s.trim().parse().map(Some).map_err(|_| {
            CliError::invalid(format!("{SEED_ENV}=`{s}` is not an unsigned 64-bit seed"))
        });
    }
    Ok(config)
}

fn require_seed(seed: Option<u64>) -> Result<u64> {
    seed.ok_or_else(|| CliError::invalid(format!("no seed given: pass --seed or set {SEED_ENV}")))
}

fn emit(path: Option<&Path>, text: &str, out: &mut dyn Write) -> Result<()> {
    match path {
        Some(p) => write_text(p, text),
        None => out
            .write_all(text.as_bytes())
            .and_then(|()| out.flush())
            .map_err(|e| CliError::io(Path::new("<stdout>"), e)),
    }
}

fn execute(
    command: Command,
    env_seed: Option<&str>,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Result<()> {
    match command {
        Command::Sweep {
            config,
            seed,
            out: path,
        } => {
            let file = parse_config(&read_text(&config)?)
                .map_err(|e| CliError::invalid(format!("{}: {e}", config.display())))?;
            let seed = resolve_seed(seed, env_seed, file.seed)?.ok_or_else(|| {
                CliError::invalid(format!(
                    "no seed given: pass --seed, set {SEED_ENV} or add `seed` to the config"
                ))
            })?;
            let records = run_sweep(&file.with_seed(seed)?)?;
            emit(path.as_deref(), &sweep_to_csv(&records), out)
        }
        Command::Curve {
            kind,
            samples,
            out: path,
        } => emit(path.as_deref(), &curve_to_csv(&curve(kind, samples)?), out),
        Command::Decompose {
            mueller,
            json,
            out: path,
        } => {
            let terms = cloude_spectrum(&read_mueller(&mueller)?, DEFAULT_TOL)?;
            let text = if json {
                decomposition_to_json(&terms)
            } else {
                decomposition_to_csv(&terms)
            };
            emit(path.as_deref(), &text, out)
        }
        Command::Tomo { command } => tomo(command, env_seed, out, err),
    }
}

fn tomo(
    command: TomoCommand,
    env_seed: Option<&str>,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Result<()> {
    match command {
        TomoCommand::Simulate {
            state,
            counts_per_setting,
            poisson,
            seed,
            projectors,
            out: path,
        } => {
            let rho = state_from_str(&read_text(&state)?)
                .map_err(|e| CliError::invalid(format!("{}: {e}", state.display())))?;
            let projectors = match projectors {
                Some(p) => projectors_from_str(&read_text(&p)?)?,
                None => standard_projectors(),
            };
            let (noise, seed) = if poisson {
                (
                    Noise::Poisson,
                    require_seed(resolve_seed(seed, env_seed, None)?)?,
                )
            } else {
                (Noise::None, seed.unwrap_or(0))
            };
            let counts = simulate_counts(&rho, counts_per_setting, noise, seed, &projectors)?;
            emit(path.as_deref(), &counts_to_csv(&counts, &projectors), out)
        }
        TomoCommand::Reconstruct {
            counts,
            counts_per_setting,
            out: path,
        } => {
            let (projectors, data) = counts_from_csv(&read_text(&counts)?, counts_per_setting)
                .map_err(|e| CliError::invalid(format!("{}: {e}", counts.display())))?;
            let r = mle_reconstruct(&data, &projectors)?;
            if !r.converged {
                let _ = writeln!(err, "warning: reconstruction stopped before convergence");
            }
            emit(path.as_deref(), &reconstruction_to_string(&r), out)
        }
        TomoCommand::Errors {
            counts,
            trials,
            seed,
            counts_per_setting,
            out: path,
        } => {
            let seed = require_seed(resolve_seed(seed, env_seed, None)?)?;
            let (projectors, data) = counts_from_csv(&read_text(&counts)?, counts_per_setting)
                .map_err(|e| CliError::invalid(format!("{}: {e}", counts.display())))?;
            let report = monte_carlo_errors(&data, &projectors, trials, seed)?;
            if report.warning {
                let _ = writeln!(
                    err,
                    "warning: {} of {} trials did not converge and were dropped",
                    report.dropped, report.trials
                );
            }
            if report.degenerate {
                let _ = writeln!(err, "warning: fewer than two settings recorded counts");
            }
            emit(path.as_deref(), &error_report_to_string(&report), out)
        }
    }
}
