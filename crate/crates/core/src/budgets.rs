//! Sampling-cost bounds for noisy estimation: the statistical lower bound
//! `M_s` for post-selected QSP circuits and the exponential bound `M_e`.

use thiserror::Error;

/// Default post-selection success probability.
pub const DEFAULT_P_QSP: f64 = 0.5;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BudgetError {
    #[error("{name} = {value} outside {range}")]
    OutOfRange { name: &'static str, value: f64, range: &'static str },
    #[error("{0} must be positive")]
    Zero(&'static str),
}

fn open_unit(name: &'static str, value: f64) -> Result<(), BudgetError> {
    if value > 0.0 && value < 1.0 {
        Ok(())
    } else {
        Err(BudgetError::OutOfRange { name, value, range: "(0, 1)" })
    }
}

/// Parameters of the `M_s` bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BudgetInput {
    /// Depolarizing strength per layer.
    pub p: f64,
    pub depth: usize,
    /// Polynomial degree.
    pub n: usize,
    /// Truncation order.
    pub r: usize,
    pub eps: f64,
    pub p_qsp: f64,
}

impl BudgetInput {
    pub fn validate(&self) -> Result<(), BudgetError> {
        if !(0.0..1.0).contains(&self.p) {
            return Err(BudgetError::OutOfRange { name: "p", value: self.p, range: "[0, 1)" });
        }
        open_unit("eps", self.eps)?;
        open_unit("p_qsp", self.p_qsp)?;
        if self.depth == 0 {
            return Err(BudgetError::Zero("depth"));
        }
        if self.n == 0 {
            return Err(BudgetError::Zero("n"));
        }
        Ok(())
    }
}

/// `log10(p^{-2D}) = 2 D log10(1/p)`.
pub fn m_e_bound(p: f64, depth: usize) -> Result<f64, BudgetError> {
    open_unit("p", p)?;
    Ok(2.0 * depth as f64 * (1.0 / p).log10())
}

/// `ln(2 / (1 - p_qsp)) / ((1 - p)^D * 4 ln 2 * n (R + 1) * eps^2)`.
pub fn m_s_bound(input: &BudgetInput) -> Result<f64, BudgetError> {
    input.validate()?;
    let numerator = (2.0 / (1.0 - input.p_qsp)).ln();
    let survival = (1.0 - input.p).powi(input.depth as i32);
    let denominator =
        survival * 4.0 * std::f64::consts::LN_2 * (input.n * (input.r + 1)) as f64 * input.eps * input.eps;
    Ok(numerator / denominator)
}

/// `M_s` for a Trotter circuit with target accuracy `dt^2 = (tau / r)^2`,
/// where `r` is the Trotter step count. The `n (R + 1)` factor is set to 1.
pub fn trotter_budget(
    tau: f64,
    steps: usize,
    depth: usize,
    p: f64,
    p_success: f64,
) -> Result<f64, BudgetError> {
    if steps == 0 {
        return Err(BudgetError::Zero("steps"));
    }
    if !(tau > 0.0) {
        return Err(BudgetError::Zero("tau"));
    }
    let dt = tau / steps as f64;
    m_s_bound(&BudgetInput { p, depth, n: 1, r: 0, eps: dt * dt, p_qsp: p_success })
}
