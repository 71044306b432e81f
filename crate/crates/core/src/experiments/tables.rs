//! Degree, sampling-budget and steady-state tables.

use super::csv_io::format_float;
use super::{ExperimentError, QSP_EPS_RATIO};
use crate::budgets::{m_e_bound, m_s_bound, trotter_budget, BudgetInput, DEFAULT_P_QSP};
use crate::exec::Execution;
use crate::jacobi_anger::{numeric_degree_with, DegreeCriterion, DEFAULT_GRID_POINTS};
use crate::model::{build_observable, build_tfim, pauli_terms, TfimSpec};
use crate::noisy_sim::{build_trotter_steps, trotter_steps, Circuit, DensityMatrix, NoiseModel};
use crate::qsp::{build_hs_circuit, circuit_depth};
use crate::zne::{scaled_measurements, ScalingSchedule};

/// `tau` from 0.1 to 5 in steps of 0.1, then to 20 in steps of 0.25.
pub fn standard_tau_grid() -> Vec<f64> {
    let mut grid: Vec<f64> = (1..=50).map(|k| k as f64 / 10.0).collect();
    grid.extend((1..=60).map(|k| 5.0 + k as f64 / 4.0));
    grid
}

fn to_csv(header: &[&str], rows: impl Iterator<Item = Vec<String>>) -> Result<String, ExperimentError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    for r in rows {
        w.write_record(r)?;
    }
    let bytes = w.into_inner().map_err(|e| ExperimentError::Io(e.into_error()))?;
    String::from_utf8(bytes).map_err(|e| ExperimentError::Parse(e.to_string()))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DegreeRow {
    pub tau: f64,
    pub eps_coeff: f64,
    pub r: usize,
    pub degree: usize,
    pub linf_error: f64,
}

/// Smallest admissible degree for every `(tau, eps_coeff)` pair.
pub fn degree_table(
    taus: &[f64],
    eps_levels: &[f64],
    criterion: DegreeCriterion,
    exec: Execution,
) -> Result<Vec<DegreeRow>, ExperimentError> {
    let jobs: Vec<(f64, f64)> = eps_levels.iter().flat_map(|&e| taus.iter().map(move |&t| (t, e))).collect();
    exec.map(&jobs, |&(tau, eps)| {
        let rep = numeric_degree_with(tau, eps, DEFAULT_GRID_POINTS, criterion)?;
        Ok(DegreeRow { tau, eps_coeff: eps, r: rep.r, degree: rep.degree, linf_error: rep.linf_error })
    })
    .into_iter()
    .collect()
}

pub fn degree_csv(rows: &[DegreeRow]) -> Result<String, ExperimentError> {
    to_csv(
        &["tau", "eps_coeff", "r", "degree", "linf_error"],
        rows.iter().map(|r| {
            vec![format_float(r.tau), format_float(r.eps_coeff), r.r.to_string(), r.degree.to_string(), format_float(r.linf_error)]
        }),
    )
}

#[derive(Debug, Clone, PartialEq)]
pub struct BudgetRow {
    pub method: &'static str,
    pub tau: f64,
    pub p: f64,
    pub eps: f64,
    pub depth: usize,
    /// QSP degree or Trotter step count.
    pub degree: usize,
    pub m_s: f64,
    pub log10_m_e: f64,
}

/// `M_s` and `log10 M_e` for QSP and Trotter circuits on the `sites`-site
/// chain at simulation accuracy `eps`.
pub fn budget_table(
    sites: usize,
    taus: &[f64],
    p_levels: &[f64],
    eps: f64,
    exec: Execution,
) -> Result<Vec<BudgetRow>, ExperimentError> {
    let terms = TfimSpec::standard(sites).term_count();
    let per_tau = exec.map(taus, |&tau| -> Result<Vec<BudgetRow>, ExperimentError> {
        let rep = numeric_degree_with(tau, eps / QSP_EPS_RATIO, DEFAULT_GRID_POINTS, DegreeCriterion::default())?;
        let qsp_depth = circuit_depth(rep.degree, 1);
        let steps = trotter_steps(tau, eps)?;
        let trotter_depth = steps * terms;
        let mut rows = Vec::new();
        for &p in p_levels {
            let input = BudgetInput { p, depth: qsp_depth, n: rep.degree, r: rep.r, eps, p_qsp: DEFAULT_P_QSP };
            rows.push(BudgetRow {
                method: "qsp",
                tau,
                p,
                eps,
                depth: qsp_depth,
                degree: rep.degree,
                m_s: m_s_bound(&input)?,
                log10_m_e: m_e_bound(p, qsp_depth)?,
            });
            rows.push(BudgetRow {
                method: "trotter",
                tau,
                p,
                eps,
                depth: trotter_depth,
                degree: steps,
                m_s: trotter_budget(tau, steps, trotter_depth, p, DEFAULT_P_QSP)?,
                log10_m_e: m_e_bound(p, trotter_depth)?,
            });
        }
        Ok(rows)
    });
    let mut rows = Vec::new();
    for r in per_tau {
        rows.extend(r?);
    }
    Ok(rows)
}

pub fn budget_csv(rows: &[BudgetRow]) -> Result<String, ExperimentError> {
    to_csv(
        &["method", "tau", "p", "eps", "depth", "degree", "m_s", "log10_m_e"],
        rows.iter().map(|r| {
            vec![
                r.method.to_string(),
                format_float(r.tau),
                format_float(r.p),
                format_float(r.eps),
                r.depth.to_string(),
                r.degree.to_string(),
                format_float(r.m_s),
                format_float(r.log10_m_e),
            ]
        }),
    )
}

#[derive(Debug, Clone, PartialEq)]
pub struct SteadyStateRow {
    pub tau: f64,
    pub p: f64,
    pub factor: f64,
    pub depth: usize,
    pub degree: usize,
    /// Exact post-selected `<O>` at noise `p * factor`.
    pub expectation: f64,
    /// Single-shot variance `1 - <O>^2`.
    pub variance: f64,
    pub success_probability: f64,
}

/// Exact scaled expectations of long QSP circuits, where depolarizing noise
/// drives the register towards the maximally mixed state.
pub fn steady_state_table(
    sites: usize,
    taus: &[f64],
    p: f64,
    eps_coeff: f64,
    schedule: &ScalingSchedule,
    exec: Execution,
) -> Result<Vec<SteadyStateRow>, ExperimentError> {
    let h = build_tfim(&TfimSpec::standard(sites))?;
    let o = build_observable(sites)?;
    let rho0 = DensityMatrix::zero_state(sites);
    let per_tau = exec.map(taus, |&tau| -> Result<Vec<SteadyStateRow>, ExperimentError> {
        let built = build_hs_circuit(&h, tau, eps_coeff)?;
        let circuit = Circuit::from_qsp(&built.circuit)?;
        let exact = scaled_measurements(&circuit, &rho0, &o, NoiseModel::new(p)?, schedule, Execution::Sequential)?;
        Ok(schedule
            .factors()
            .iter()
            .zip(exact)
            .map(|(&factor, m)| SteadyStateRow {
                tau,
                p,
                factor,
                depth: circuit.depth(),
                degree: built.circuit.n,
                expectation: m.expectation,
                variance: 1.0 - m.expectation * m.expectation,
                success_probability: m.success_probability,
            })
            .collect())
    });
    let mut rows = Vec::new();
    for r in per_tau {
        rows.extend(r?);
    }
    Ok(rows)
}

pub fn steady_state_csv(rows: &[SteadyStateRow]) -> Result<String, ExperimentError> {
    to_csv(
        &["tau", "p", "factor", "depth", "degree", "expectation", "variance", "success_probability"],
        rows.iter().map(|r| {
            vec![
                format_float(r.tau),
                format_float(r.p),
                format_float(r.factor),
                r.depth.to_string(),
                r.degree.to_string(),
                format_float(r.expectation),
                format_float(r.variance),
                format_float(r.success_probability),
            ]
        }),
    )
}

/// Trotter circuit with an explicit step count on the standard chain.
pub fn trotter_circuit(sites: usize, tau: f64, steps: usize) -> Result<Circuit, ExperimentError> {
    Ok(build_trotter_steps(&pauli_terms(&TfimSpec::standard(sites))?, tau, steps)?)
}
