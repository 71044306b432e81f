use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use qsplab::exec::Execution;
use qsplab::experiments::{
    budget_csv, budget_table, degree_csv, degree_table, emit_csv, parse_range, run_sweep, standard_tau_grid,
    steady_state_csv, steady_state_table, ExperimentError, SweepConfig,
};
use qsplab::jacobi_anger::DegreeCriterion;
use qsplab::qsp::{format_phase_set, hs_phases, PhaseFileHeader};
use qsplab::zne::ScalingSchedule;

#[derive(Parser)]
#[command(name = "qsplab", version, about = "Noisy QSP Hamiltonian simulation with zero-noise extrapolation")]
struct Cli {
    /// Run every independent job on the calling thread.
    #[arg(long, global = true)]
    sequential: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a sweep described by a config file and write the result CSV.
    Sweep {
        /// TOML sweep configuration.
        config: PathBuf,
        /// Overrides the config seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Overrides the config output path.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Overrides the config shot count.
        #[arg(long)]
        shots: Option<u64>,
    },
    /// Numeric polynomial degree against tau for each truncation error.
    Degrees {
        /// Comma-separated values or start:step:stop ranges.
        #[arg(long)]
        taus: Option<String>,
        /// Comma-separated truncation errors.
        #[arg(long, value_delimiter = ',', default_values_t = [1e-3, 1e-5])]
        eps: Vec<f64>,
        /// Output CSV; stdout when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Sampling bounds M_s and log10 M_e against tau.
    Budgets {
        #[arg(long)]
        taus: Option<String>,
        #[arg(long, value_delimiter = ',', default_values_t = [1e-4, 1e-3, 1e-2])]
        p: Vec<f64>,
        #[arg(long, default_value_t = 1e-2)]
        eps: f64,
        #[arg(long = "sites", default_value_t = 4)]
        sites: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Exact scaled expectations of long noisy QSP circuits.
    SteadyState {
        #[arg(long, default_value = "50:50:300")]
        taus: String,
        #[arg(long, default_value_t = 1e-2)]
        p: f64,
        #[arg(long, default_value_t = 1e-3)]
        eps: f64,
        #[arg(long = "sites", default_value_t = 4)]
        sites: usize,
        #[arg(long, value_delimiter = ',', default_values_t = [1.0, 2.0, 3.0])]
        schedule: Vec<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Phase set for exp(-i tau x) at truncation error eps.
    Phases {
        tau: f64,
        /// Coefficient truncation error.
        eps: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn parse_grid(text: &str) -> Result<Vec<f64>, ExperimentError> {
    let mut out = Vec::new();
    for token in text.split(',').map(str::trim).filter(|t| !t.is_empty()) {
        if token.contains(':') {
            out.extend(parse_range(token)?);
        } else {
            out.push(token.parse().map_err(|_| ExperimentError::Config(format!("bad number `{token}`")))?);
        }
    }
    Ok(out)
}

fn grid_or_default(taus: Option<String>) -> Result<Vec<f64>, ExperimentError> {
    taus.map_or_else(|| Ok(standard_tau_grid()), |t| parse_grid(&t))
}

fn write_output(text: &str, out: Option<&Path>) -> Result<(), ExperimentError> {
    match out {
        Some(path) => {
            if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
                fs::create_dir_all(parent)?;
            }
            fs::write(path, text)?;
        }
        None => print!("{text}"),
    }
    Ok(())
}

fn run(cli: Cli) -> Result<ExitCode, ExperimentError> {
    let exec = if cli.sequential { Execution::Sequential } else { Execution::default() };
    match cli.command {
        Command::Sweep { config, seed, out, shots } => {
            let mut config = SweepConfig::load(&config)?;
            if let Some(seed) = seed {
                config.seed = seed;
            }
            if let Some(shots) = shots {
                config.shots = shots;
            }
            if let Some(out) = out {
                config.output_path = out;
            }
            config.validate()?;
            let outcome = run_sweep(&config, exec)?;
            emit_csv(&outcome.rows, &config.output_path)?;
            eprintln!("wrote {} rows to {}", outcome.rows.len(), config.output_path.display());
            if outcome.failed_cells > 0 {
                eprintln!("{} cells failed", outcome.failed_cells);
                return Ok(ExitCode::from(2));
            }
        }
        Command::Degrees { taus, eps, out } => {
            let rows = degree_table(&grid_or_default(taus)?, &eps, DegreeCriterion::default(), exec)?;
            write_output(&degree_csv(&rows)?, out.as_deref())?;
        }
        Command::Budgets { taus, p, eps, sites, out } => {
            let rows = budget_table(sites, &grid_or_default(taus)?, &p, eps, exec)?;
            write_output(&budget_csv(&rows)?, out.as_deref())?;
        }
        Command::SteadyState { taus, p, eps, sites, schedule, out } => {
            let schedule = ScalingSchedule::new(schedule).map_err(|e| ExperimentError::Config(e.to_string()))?;
            let rows = steady_state_table(sites, &parse_grid(&taus)?, p, eps, &schedule, exec)?;
            write_output(&steady_state_csv(&rows)?, out.as_deref())?;
        }
        Command::Phases { tau, eps, out } => {
            let (report, phases) = hs_phases(tau, eps)?;
            let header = PhaseFileHeader { n: report.map_or(0, |r| r.degree), tau, eps_coeff: eps };
            write_output(&format_phase_set(&header, &phases), out.as_deref())?;
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
