//! Command-line front end.
//!
//! ```text
//! mzqfi qfi       --a coherent:2i --b fock:3
//! mzqfi pmc-scan  --a coherent:2 --b cat+:2 --points 180
//! mzqfi pmc-scan  --scan lossy-phase --b cat+:1.5 --loss-T 0.8
//! mzqfi loss-scan --b cat+:2 --points 21 --format json
//! mzqfi heatmap   --points 50 --range 0:20 --out fig.csv
//! ```
//!
//! Exit codes: 0 on success, 1 for usage errors and invalid parameters,
//! 2 for numerical or truncation failures and output errors.

pub mod commands;
pub mod grammar;
pub mod output;

use std::ffi::OsString;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::json;

use commands::{
    HeatmapConfig, HeatmapExample, LossScanConfig, PhaseScan, PmcScanConfig, QfiConfig,
};
use grammar::{parse_dims, parse_port, parse_range, PortSpec};
use output::{Format, Output};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] crate::Error),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Core(e) if e.is_numeric() => 2,
            CliError::Core(_) => 1,
            CliError::Io(_) | CliError::Csv(_) | CliError::Json(_) => 2,
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "mzqfi",
    version,
    about = "Mach-Zehnder quantum Fisher information"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Common {
    /// Write to this file instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Recorded in the output metadata.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Fock cutoff for both ports, `N` or `NA,NB`; overrides the automatic choice.
    #[arg(long, value_parser = parse_dims)]
    dim: Option<(usize, usize)>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Numerical and closed-form QFI of one input.
    Qfi {
        /// Port A state, `kind:param[:dim]`.
        #[arg(long, value_parser = parse_port)]
        a: PortSpec,
        /// Port B state, `kind:param[:dim]`.
        #[arg(long, value_parser = parse_port)]
        b: PortSpec,
        /// Beam-splitter angle.
        #[arg(long, default_value_t = std::f64::consts::FRAC_PI_2, allow_hyphen_values = true)]
        tau: f64,
        /// Transmission of both arms.
        #[arg(long = "loss-T")]
        loss_t: Option<f64>,
        #[command(flatten)]
        common: Common,
    },
    /// QFI over a phase grid, with the argmax and the phase-matched prediction.
    PmcScan {
        #[arg(long, value_parser = parse_port)]
        a: Option<PortSpec>,
        #[arg(long, value_parser = parse_port)]
        b: PortSpec,
        #[arg(long, default_value_t = std::f64::consts::FRAC_PI_2, allow_hyphen_values = true)]
        tau: f64,
        #[arg(long = "loss-T")]
        loss_t: Option<f64>,
        #[arg(long, value_enum, default_value_t = PhaseScan::PhaseA)]
        scan: PhaseScan,
        #[arg(long, default_value_t = 180)]
        points: usize,
        /// Phase range `LO:HI`, sampled periodically; default `0:pi`.
        #[arg(long, value_parser = parse_range, allow_hyphen_values = true)]
        range: Option<(f64, f64)>,
        #[command(flatten)]
        common: Common,
    },
    /// Lossy QFI against transmission, with closed forms and the shot-noise threshold.
    LossScan {
        /// Even cat `cat+:ALPHA`; port A is `|i ALPHA>`.
        #[arg(long, value_parser = parse_port)]
        b: PortSpec,
        #[arg(long, default_value_t = 21)]
        points: usize,
        /// Transmission range `LO:HI` inside `[0, 1]`.
        #[arg(long, value_parser = parse_range)]
        range: Option<(f64, f64)>,
        #[command(flatten)]
        common: Common,
    },
    /// Phase-matched `F_m / N^2` on a grid of mean photon numbers.
    Heatmap {
        #[arg(long, value_enum, default_value_t = HeatmapExample::Squeezed)]
        scan: HeatmapExample,
        #[arg(long, default_value_t = 50)]
        points: usize,
        /// Photon-number range `LO:HI` for both axes.
        #[arg(long, value_parser = parse_range)]
        range: Option<(f64, f64)>,
        #[command(flatten)]
        common: Common,
    },
}

fn check_transmission(t: Option<f64>) -> Result<(), CliError> {
    match t {
        Some(t) if !(0.0..=1.0).contains(&t) => Err(CliError::Usage(format!(
            "--loss-T must lie in [0, 1], got {t}"
        ))),
        _ => Ok(()),
    }
}

fn emit<R: Serialize>(
    mut out: Output<R>,
    name: &str,
    args: &str,
    common: &Common,
) -> Result<(), CliError> {
    out.meta.insert("tool".into(), json!("mzqfi"));
    out.meta
        .insert("version".into(), json!(env!("CARGO_PKG_VERSION")));
    out.meta.insert("command".into(), json!(name));
    out.meta.insert("args".into(), json!(args));
    out.meta.insert("seed".into(), json!(common.seed));
    let mut w: Box<dyn Write> = match &common.out {
        Some(path) => Box::new(BufWriter::new(File::create(path)?)),
        None => Box::new(BufWriter::new(std::io::stdout().lock())),
    };
    out.write(common.format, &mut w)?;
    w.flush()?;
    Ok(())
}

/// Parses `args` (program name first) and runs the selected command.
pub fn run<I, T>(args: I) -> Result<(), CliError>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&args) {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            print!("{e}");
            return Ok(());
        }
        Err(e) => return Err(CliError::Usage(e.render().to_string())),
    };
    let joined = args
        .iter()
        .skip(1)
        .map(|a| a.to_string_lossy())
        .collect::<Vec<_>>()
        .join(" ");

    match cli.command {
        Command::Qfi {
            a,
            b,
            tau,
            loss_t,
            common,
        } => {
            check_transmission(loss_t)?;
            let cfg = QfiConfig {
                a,
                b,
                tau,
                loss_t,
                dims: common.dim,
            };
            emit(commands::cmd_qfi(&cfg)?, "qfi", &joined, &common)
        }
        Command::PmcScan {
            a,
            b,
            tau,
            loss_t,
            scan,
            points,
            range,
            common,
        } => {
            check_transmission(loss_t)?;
            let cfg = PmcScanConfig {
                a,
                b,
                tau,
                loss_t,
                scan,
                points,
                range,
                dims: common.dim,
            };
            emit(commands::cmd_pmc_scan(&cfg)?, "pmc-scan", &joined, &common)
        }
        Command::LossScan {
            b,
            points,
            range,
            common,
        } => {
            let cfg = LossScanConfig {
                b,
                points,
                range,
                dims: common.dim,
            };
            emit(
                commands::cmd_loss_scan(&cfg)?,
                "loss-scan",
                &joined,
                &common,
            )
        }
        Command::Heatmap {
            scan,
            points,
            range,
            common,
        } => {
            let cfg = HeatmapConfig {
                example: scan,
                points,
                range,
            };
            emit(commands::cmd_heatmap(&cfg)?, "heatmap", &joined, &common)
        }
    }
}
