use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use adiab::commands::{
    self, cmd_calibrate, cmd_evolve, cmd_gs_study, cmd_sweep, OutputOptions,
};
use adiab::config::ExperimentConfig;
use adiab::csvio::fmt_f64;
use adiab::error::Error;

#[derive(Parser)]
#[command(name = "adiab", about = "1D quantum adiabaticity experiments", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct CommonArgs {
    /// Experiment configuration (TOML)
    #[arg(long)]
    config: PathBuf,
    /// Output directory (created if missing)
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Also write SVG diagnostic plots
    #[arg(long)]
    svg: bool,
    /// Also write per-snapshot density frames
    #[arg(long)]
    frames: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Pairwise ground-state metric study over a potential family
    GsStudy(CommonArgs),
    /// Calibrate a ramp, evolve, and audit the trajectory
    Evolve(CommonArgs),
    /// Run many evolve cells on a worker pool
    Sweep {
        #[command(flatten)]
        common: CommonArgs,
        /// Worker threads for the cell pool
        #[arg(long, default_value_t = 1)]
        workers: usize,
    },
    /// Print the calibrated ramp rate and the spectral inputs behind it
    Calibrate {
        /// Experiment configuration (TOML)
        #[arg(long)]
        config: PathBuf,
    },
}

fn run(cli: Cli) -> Result<(), Error> {
    match cli.command {
        Command::GsStudy(args) => {
            let (config, text) = ExperimentConfig::load(&args.config)?;
            let summary = cmd_gs_study(&config, &text, &args.out)?;
            println!(
                "gs-study: {} pairs, slope = {:.6}, r_squared = {:.6}",
                summary.n_pairs, summary.slope, summary.r_squared
            );
            Ok(())
        }
        Command::Evolve(args) => {
            let (config, text) = ExperimentConfig::load(&args.config)?;
            let base = commands::resolve_base_dir(&args.config);
            let opts = OutputOptions {
                svg: args.svg,
                frames: args.frames,
            };
            let artifacts = cmd_evolve(&config, &text, &base, &args.out, opts)?;
            println!(
                "evolve: p = {}, max degree = {:.3}%, max norm deviation = {:.3e}",
                fmt_f64(artifacts.ramp_rate),
                artifacts.report.max_degree_percent,
                artifacts.max_norm_deviation
            );
            Ok(())
        }
        Command::Sweep { common, workers } => {
            let (config, text) = ExperimentConfig::load(&common.config)?;
            let base = commands::resolve_base_dir(&common.config);
            let opts = OutputOptions {
                svg: common.svg,
                frames: common.frames,
            };
            let summary = cmd_sweep(&config, &text, &base, &common.out, workers, opts)?;
            println!("sweep: {} cells completed", summary.completed);
            for (name, message) in &summary.failed {
                eprintln!("sweep: cell {name} failed: {message}");
            }
            if summary.failed.is_empty() {
                Ok(())
            } else {
                Err(Error::Experiment(format!(
                    "{} sweep cell(s) failed",
                    summary.failed.len()
                )))
            }
        }
        Command::Calibrate { config } => {
            let (config_doc, _) = ExperimentConfig::load(&config)?;
            let base = commands::resolve_base_dir(&config);
            let info = cmd_calibrate(&config_doc, &base)?;
            println!("ramp_rate = {}", fmt_f64(info.ramp_rate));
            println!("e0 = {}", fmt_f64(info.e0));
            println!("e1 = {}", fmt_f64(info.e1));
            println!("dipole_01 = {}", fmt_f64(info.dipole_01));
            println!("epsilon0 = {}", fmt_f64(info.epsilon0));
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(error) => {
            eprintln!("error: {error}");
            ExitCode::from(commands::exit_code_for(&error) as u8)
        }
    }
}
