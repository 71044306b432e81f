//! Configuration-driven sweeps and tables written as CSV.

mod config;
mod csv_io;
mod sweep;
mod tables;

pub use config::{parse_range, MethodSelection, SweepConfig};
pub use csv_io::{emit_csv, format_float, parse_csv, read_csv, rows_to_csv, HEADER};
pub use sweep::{cell_seed, run_sweep, sort_rows, ResultRow, SweepOutcome, QSP_EPS_RATIO};
pub use tables::{
    budget_csv, budget_table, degree_csv, degree_table, standard_tau_grid, steady_state_csv, steady_state_table,
    trotter_circuit, BudgetRow, DegreeRow, SteadyStateRow,
};

use thiserror::Error;

use crate::budgets::BudgetError;
use crate::jacobi_anger::JacobiAngerError;
use crate::linalg::LinalgError;
use crate::model::ModelError;
use crate::noisy_sim::SimError;
use crate::qsp::QspError;
use crate::zne::ZneError;

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("config: {0}")]
    Config(String),
    #[error("parse: {0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    JacobiAnger(#[from] JacobiAngerError),
    #[error(transparent)]
    Qsp(#[from] QspError),
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error(transparent)]
    Zne(#[from] ZneError),
    #[error(transparent)]
    Budget(#[from] BudgetError),
}
