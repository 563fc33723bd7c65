use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use ergodic_lab::config::parse_folner;
use ergodic_lab::report::render;
use ergodic_lab::{run, ConfigError, ExperimentConfig, ExperimentKind, Format, RunError, Schedule};

/// Exit status for configuration and usage errors.
const CONFIG_ERROR: u8 = 3;

#[derive(Parser)]
#[command(
    name = "ergodic",
    version,
    about = "Reproducible ergodic-averaging experiments"
)]
struct Cli {
    /// Overrides the configured seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Writes the report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Overrides the configured tolerance.
    #[arg(long, global = true)]
    tolerance: Option<f64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Runs an experiment described by a TOML or JSON file.
    Run { config: PathBuf },
    /// Checks every pair of cyclic rotations up to the given order.
    SweepJoinings {
        #[arg(long, default_value_t = 12)]
        max_order: u64,
        /// Uses every generator of each cyclic group as a step.
        #[arg(long)]
        all_generators: bool,
    },
    /// Scans for eigenvalues of a system, e.g. `skew(SQRT2)`.
    Spectrum {
        #[arg(long)]
        system: String,
        /// Bound on the integer coefficients of lattice candidates.
        #[arg(long, default_value_t = 8)]
        candidates: i64,
        #[arg(long, default_value_t = 64)]
        max_den: i64,
        #[arg(long, default_value_t = 4096)]
        n: u64,
    },
    /// Computes the tempered constant of `intervals` or `boxes:d`.
    Tempered {
        #[arg(long)]
        folner: String,
        #[arg(long)]
        max_n: u64,
    },
}

fn config_from(cli: &Cli) -> Result<ExperimentConfig, ConfigError> {
    let mut cfg = match &cli.command {
        Command::Run { config } => ExperimentConfig::from_path(config)?,
        Command::SweepJoinings {
            max_order,
            all_generators,
        } => {
            let mut c = ExperimentConfig::new(ExperimentKind::JoiningsSweep);
            c.max_order = Some(*max_order);
            c.all_generators = Some(*all_generators);
            c
        }
        Command::Spectrum {
            system,
            candidates,
            max_den,
            n,
        } => {
            let mut c = ExperimentConfig::new(ExperimentKind::SpectrumScan);
            c.x = Some(system.clone());
            c.candidate_bound = Some(*candidates);
            c.max_den = Some(*max_den);
            c.schedule = Some(Schedule {
                start: *n,
                doublings: 0,
            });
            c
        }
        Command::Tempered { folner, max_n } => {
            parse_folner(folner).map_err(|m| ConfigError::new("folner", m))?;
            let mut c = ExperimentConfig::new(ExperimentKind::TemperedCheck);
            c.folner = Some(folner.clone());
            c.max_n = Some(*max_n);
            c
        }
    };
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    if let Some(t) = cli.tolerance {
        cfg.tolerance = t;
    }
    if let Some(f) = cli.format {
        cfg.format = Some(f);
    }
    if let Some(out) = &cli.out {
        cfg.output = Some(out.display().to_string());
    }
    cfg.validate()?;
    Ok(cfg)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { CONFIG_ERROR } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let cfg = match config_from(&cli) {
        Ok(cfg) => cfg,
        Err(e) => {
            eprintln!("error: invalid configuration: {e}");
            return ExitCode::from(CONFIG_ERROR);
        }
    };
    match run(&cfg, None) {
        Ok(report) => {
            if cfg.output.is_none() {
                print!("{}", render(&report, cfg.format.unwrap_or_default()));
            }
            eprintln!("{}: {}", report.experiment, report.verdict);
            ExitCode::from(report.verdict.exit_code() as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(match e {
                RunError::Config(_) => CONFIG_ERROR,
                _ => 1,
            })
        }
    }
}
