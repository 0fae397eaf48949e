use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use mmray::io::{run_calibrate, run_compare, run_stats, run_trace, RunConfig};
use mmray::Error;

#[derive(Parser)]
#[command(name = "mmray", version, about = "Ray tracing, material calibration and channel statistics")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Trace every configured link and write component tables.
    Trace(Common),
    /// Fit material losses to directional measurements.
    Calibrate(Common),
    /// Delay and angular spreads of component tables.
    Stats {
        #[command(flatten)]
        common: Common,
        /// Component CSVs, one per location.
        files: Vec<PathBuf>,
    },
    /// Compare measured and predicted stats tables.
    Compare {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        measured: Option<PathBuf>,
        #[arg(long)]
        predicted: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Toggle {
    On,
    Off,
}

#[derive(Args)]
struct Common {
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    env: Option<PathBuf>,
    #[arg(long)]
    measurements: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Annealing seed (default 42).
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, value_enum)]
    scattering: Option<Toggle>,
    /// Launch tessellation frequency.
    #[arg(long)]
    nt: Option<u32>,
    #[arg(long)]
    max_bounces: Option<u32>,
    /// Treat rank-deficient calibration as a failure.
    #[arg(long)]
    strict: bool,
}

impl Common {
    fn config(&self) -> Result<RunConfig, Error> {
        let mut cfg = match &self.config {
            Some(p) => RunConfig::load(p)?,
            None => RunConfig::default(),
        };
        if let Some(p) = &self.env {
            cfg.environment = Some(p.clone());
        }
        if let Some(p) = &self.measurements {
            cfg.measurements = Some(p.clone());
        }
        if let Some(p) = &self.out {
            cfg.output_dir = p.clone();
        }
        if let Some(s) = self.seed {
            cfg.seed = s;
        }
        if let Some(s) = self.scattering {
            cfg.trace.scattering_enabled = matches!(s, Toggle::On);
        }
        if let Some(n) = self.nt {
            cfg.trace.tessellation_frequency = n;
        }
        if let Some(b) = self.max_bounces {
            cfg.trace.max_reflections = b;
        }
        cfg.trace.validate()?;
        Ok(cfg)
    }
}

const EXIT_VALIDATION: u8 = 2;
const EXIT_DEGENERATE: u8 = 3;

fn fail(e: &Error) -> ExitCode {
    eprintln!("error: {e}");
    match e {
        Error::EmptySystem(_) => ExitCode::from(EXIT_DEGENERATE),
        _ => ExitCode::from(EXIT_VALIDATION),
    }
}

fn run(cli: Cli) -> Result<ExitCode, Error> {
    match cli.command {
        Command::Trace(common) => {
            let cfg = common.config()?;
            for o in run_trace(&cfg)? {
                println!(
                    "{}: {} components, strongest {}, LOS {}",
                    o.id,
                    o.result.components.len(),
                    o.result
                        .components
                        .first()
                        .map_or_else(|| "-".to_string(), |c| format!("{:.2} dBm", c.power_dbm)),
                    if o.result.los_blocked { "blocked" } else { "clear" }
                );
            }
        }
        Command::Calibrate(common) => {
            let cfg = common.config()?;
            let report = run_calibrate(&cfg)?;
            for w in &report.warnings {
                eprintln!("warning: {w}");
            }
            println!(
                "{} records, OF_dB {:.3} dB (log) / {:.3} dB (lin)",
                report.system.rows(),
                report.log.of_db_rms,
                report.linear.of_db_rms
            );
            if common.strict && report.log.rank_deficient {
                eprintln!("error: rank-deficient calibration system (--strict)");
                return Ok(ExitCode::from(EXIT_DEGENERATE));
            }
        }
        Command::Stats { common, files } => {
            let mut cfg = common.config()?;
            if !files.is_empty() {
                cfg.components = files;
            }
            for (loc, r) in run_stats(&cfg)? {
                println!(
                    "{loc}: delay spread {:.2} ns, angular spread {:.2} deg",
                    r.rms_delay_spread_ns, r.rms_angular_spread_deg
                );
            }
        }
        Command::Compare {
            common,
            measured,
            predicted,
        } => {
            let mut cfg = common.config()?;
            cfg.measured_stats = measured.or(cfg.measured_stats);
            cfg.predicted_stats = predicted.or(cfg.predicted_stats);
            for r in run_compare(&cfg)? {
                println!("{}: delta mean {:.2}", r.statistic, r.mean_delta);
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => fail(&e),
    }
}
