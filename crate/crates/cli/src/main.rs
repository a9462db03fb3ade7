mod commands;
mod config;
mod csv_out;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use crate::commands::Failure;
use crate::config::ConfigDocument;

/// Stability analysis of the DC-link voltage control loop of large
/// converter-interfaced loads.
#[derive(Debug, Parser)]
#[command(name = "lelosc", version)]
struct Cli {
    /// JSON configuration; the built-in after-tuning document when omitted.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Which {
    Gdvc,
    Gsync,
    Loopgain,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Frequency response of a loop block, with its resonant frequency.
    Bode {
        #[arg(long, value_enum, default_value = "gdvc")]
        which: Which,
        #[arg(long, default_value_t = 1.0)]
        f_lo: f64,
        #[arg(long, default_value_t = 100.0)]
        f_hi: f64,
        #[arg(long, value_name = "PATH")]
        out: PathBuf,
    },
    /// AC-voltage response to a unit DC-load step, with a stability verdict.
    Step {
        /// Operating-point factor (xg id0)^2; derived from the config when omitted.
        #[arg(long)]
        k: Option<f64>,
        #[arg(long, value_name = "PATH")]
        out: PathBuf,
    },
    /// Dominant closed-loop pole across a range of operating-point factors.
    Sweep {
        #[arg(long)]
        k_lo: f64,
        #[arg(long)]
        k_hi: f64,
        #[arg(long, default_value_t = 50)]
        points: usize,
        #[arg(long, value_name = "PATH")]
        out: PathBuf,
    },
    /// Nonlinear time-domain run of the configured load profile.
    Sim {
        /// Final load as a percentage of the power drawn at unit current.
        #[arg(long, default_value_t = 100.0)]
        level: f64,
        /// Directory receiving one CSV per signal; created if missing.
        #[arg(long, value_name = "DIR")]
        out: PathBuf,
    },
    /// Dominant mode of a recorded series or three-phase record.
    Analyze {
        /// CSV with columns `t,value` or `t,va,vb,vc,ia,ib,ic`.
        csv: PathBuf,
        #[arg(long)]
        window_start: Option<f64>,
        #[arg(long)]
        window_end: Option<f64>,
        #[arg(long, value_name = "PATH")]
        out: Option<PathBuf>,
    },
}

fn run(cli: Cli) -> Result<(), Failure> {
    let doc = || match &cli.config {
        Some(path) => ConfigDocument::load(path).map_err(Failure::config),
        None => Ok(ConfigDocument::default()),
    };
    match cli.command {
        Command::Bode { which, f_lo, f_hi, ref out } => commands::bode(&doc()?, which, f_lo, f_hi, out),
        Command::Step { k, ref out } => commands::step(&doc()?, k, out),
        Command::Sweep { k_lo, k_hi, points, ref out } => commands::sweep(&doc()?, k_lo, k_hi, points, out),
        Command::Sim { level, ref out } => commands::sim(&doc()?, level, out),
        Command::Analyze {
            ref csv,
            window_start,
            window_end,
            ref out,
        } => commands::analyze(csv, window_start, window_end, out.as_deref()),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { commands::EXIT_CONFIG } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            if !f.message.is_empty() {
                eprintln!("error: {}", f.message);
            }
            ExitCode::from(f.code)
        }
    }
}
