//! Sweep runner: one cell per (method, tau, p), every schedule and fit per cell.

use super::{ExperimentError, SweepConfig};
use crate::exec::Execution;
use crate::linalg::ComplexMatrix;
use crate::model::{build_observable, build_tfim, pauli_terms, PauliTerm, TfimSpec};
use crate::noisy_sim::{build_trotter, derive_seed, ideal_expectation, Circuit, CircuitKind, DensityMatrix, NoiseModel};
use crate::qsp::build_hs_circuit;
use crate::zne::{evaluate, scaled_expectations, select_best, FitMethod, ScalingSchedule, ZneError, ZneReport};

/// Ratio between the QSP simulation target and the truncation error.
pub const QSP_EPS_RATIO: f64 = 10.0;

/// One CSV line.
#[derive(Debug, Clone, PartialEq)]
pub struct ResultRow {
    pub method: String,
    pub n: usize,
    pub tau: f64,
    pub p: f64,
    pub schedule: String,
    /// Fit label, or `failed:<reason>`.
    pub fit: String,
    pub depth: usize,
    /// QSP polynomial degree, or the Trotter step count.
    pub degree: usize,
    pub ideal: f64,
    /// Shot estimate at `c = 1`.
    pub noisy_mean: f64,
    pub estimate: f64,
    pub variance: f64,
    pub bias: f64,
    pub mse: f64,
    pub shots: u64,
    pub seed: u64,
    pub best: bool,
}

impl ResultRow {
    pub fn is_failure(&self) -> bool {
        self.fit.starts_with("failed:")
    }

    fn sort_key(a: &Self, b: &Self) -> std::cmp::Ordering {
        a.method
            .cmp(&b.method)
            .then(a.n.cmp(&b.n))
            .then(a.tau.total_cmp(&b.tau))
            .then(a.p.total_cmp(&b.p))
            .then(a.schedule.cmp(&b.schedule))
            .then(a.fit.cmp(&b.fit))
            .then(a.best.cmp(&b.best))
    }
}

/// Sorts rows into CSV order.
pub fn sort_rows(rows: &mut [ResultRow]) {
    rows.sort_by(ResultRow::sort_key);
}

/// Commas would break the CSV column count.
fn failure_label(reason: &str) -> String {
    format!("failed:{}", reason.replace([',', '\n', '\r'], ";"))
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepOutcome {
    pub rows: Vec<ResultRow>,
    /// Cells whose circuit could not be built or simulated.
    pub failed_cells: usize,
}

struct Built {
    kind: CircuitKind,
    tau: f64,
    ideal: f64,
    circuit: Result<(Circuit, usize), String>,
}

fn method_code(kind: CircuitKind) -> u64 {
    match kind {
        CircuitKind::Qsp => 0,
        CircuitKind::Trotter => 1,
    }
}

/// Seed for one (method, N, tau, p, schedule) cell.
pub fn cell_seed(base: u64, kind: CircuitKind, n: usize, tau: f64, p: f64, schedule: &ScalingSchedule) -> u64 {
    let mut parts = vec![method_code(kind), n as u64, tau.to_bits(), p.to_bits()];
    parts.extend(schedule.factors().iter().map(|c| c.to_bits()));
    derive_seed(base, &parts)
}

fn build(kind: CircuitKind, h: &ComplexMatrix, terms: &[PauliTerm], tau: f64, eps: f64) -> Result<(Circuit, usize), String> {
    match kind {
        CircuitKind::Qsp => {
            let built = build_hs_circuit(h, tau, eps / QSP_EPS_RATIO).map_err(|e| e.to_string())?;
            let circuit = Circuit::from_qsp(&built.circuit).map_err(|e| e.to_string())?;
            Ok((circuit, built.circuit.n))
        }
        CircuitKind::Trotter => {
            let circuit = build_trotter(terms, tau, eps).map_err(|e| e.to_string())?;
            let steps = circuit.depth() / terms.len();
            Ok((circuit, steps))
        }
    }
}

/// Runs every cell of the sweep. Cells run under `exec`; the rows come back
/// sorted, so the output does not depend on scheduling.
pub fn run_sweep(config: &SweepConfig, exec: Execution) -> Result<SweepOutcome, ExperimentError> {
    config.validate()?;
    let spec = TfimSpec::standard(config.n);
    let h = build_tfim(&spec)?;
    let terms = pauli_terms(&spec)?;
    let o = build_observable(config.n)?;
    let rho0 = DensityMatrix::zero_state(config.n);

    let mut kinds = Vec::new();
    if config.method.includes_qsp() {
        kinds.push(CircuitKind::Qsp);
    }
    if config.method.includes_trotter() {
        kinds.push(CircuitKind::Trotter);
    }
    let ideals = exec.map(&config.tau_grid, |&tau| ideal_expectation(&h, &o, &rho0, tau));
    let ideals = ideals.into_iter().collect::<Result<Vec<f64>, _>>()?;
    let jobs: Vec<(CircuitKind, usize)> =
        kinds.iter().flat_map(|&k| (0..config.tau_grid.len()).map(move |t| (k, t))).collect();
    let built: Vec<Built> = exec.map(&jobs, |&(kind, t)| {
        let tau = config.tau_grid[t];
        Built { kind, tau, ideal: ideals[t], circuit: build(kind, &h, &terms, tau, config.eps_target) }
    });

    let cells: Vec<(usize, f64)> =
        (0..built.len()).flat_map(|b| config.p_levels.iter().map(move |&p| (b, p))).collect();
    let per_cell = exec.map(&cells, |&(b, p)| run_cell(config, &built[b], p, &rho0, &o));

    let mut failed_cells = 0;
    let mut rows = Vec::new();
    for (cell_rows, failed) in per_cell {
        failed_cells += usize::from(failed);
        rows.extend(cell_rows);
    }
    sort_rows(&mut rows);
    Ok(SweepOutcome { rows, failed_cells })
}

fn run_cell(config: &SweepConfig, built: &Built, p: f64, rho0: &DensityMatrix, o: &ComplexMatrix) -> (Vec<ResultRow>, bool) {
    let base = |schedule: &ScalingSchedule, depth: usize, degree: usize| ResultRow {
        method: built.kind.label().to_string(),
        n: config.n,
        tau: built.tau,
        p,
        schedule: schedule.id(),
        fit: String::new(),
        depth,
        degree,
        ideal: built.ideal,
        noisy_mean: f64::NAN,
        estimate: f64::NAN,
        variance: f64::NAN,
        bias: f64::NAN,
        mse: f64::NAN,
        shots: config.shots,
        seed: cell_seed(config.seed, built.kind, config.n, built.tau, p, schedule),
        best: false,
    };
    let (circuit, degree) = match &built.circuit {
        Ok((c, d)) => (c, *d),
        Err(reason) => {
            let rows = config
                .schedules
                .iter()
                .map(|s| ResultRow { fit: failure_label(reason), ..base(s, 0, 0) })
                .collect();
            return (rows, true);
        }
    };
    let depth = circuit.depth();
    let mut rows = Vec::new();
    let mut failed = false;
    for schedule in &config.schedules {
        let template = base(schedule, depth, degree);
        let noise = NoiseModel { p };
        let samples = match scaled_expectations(
            circuit,
            rho0,
            o,
            noise,
            schedule,
            config.shots,
            template.seed,
            Execution::Sequential,
        ) {
            Ok(s) => s,
            Err(e) => {
                failed = true;
                rows.push(ResultRow { fit: failure_label(&e.to_string()), ..template });
                continue;
            }
        };
        let estimates: Vec<_> = samples.iter().map(|s| s.estimate).collect();
        let noisy_mean = estimates[0].mean;
        let mut reports: Vec<ZneReport> = Vec::new();
        for method in FitMethod::ALL {
            match evaluate(method, schedule, &estimates, built.ideal) {
                Ok(r) => {
                    rows.push(report_row(&template, noisy_mean, &r, false));
                    reports.push(r);
                }
                Err(e) => rows.push(ResultRow {
                    fit: failure_label(&fit_failure(method, &e)),
                    noisy_mean,
                    ..template.clone()
                }),
            }
        }
        if let Some(best) = select_best(&reports) {
            rows.push(report_row(&template, noisy_mean, best, true));
        }
    }
    (rows, failed)
}

fn fit_failure(method: FitMethod, e: &ZneError) -> String {
    match e {
        ZneError::FitNotFound(reason) => format!("{method} {reason}"),
        other => format!("{method} {other}"),
    }
}

fn report_row(template: &ResultRow, noisy_mean: f64, r: &ZneReport, best: bool) -> ResultRow {
    ResultRow {
        fit: r.method.label().to_string(),
        noisy_mean,
        estimate: r.estimate,
        variance: r.variance,
        bias: r.bias,
        mse: r.mse,
        best,
        ..template.clone()
    }
}
