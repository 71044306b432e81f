//! First-order product formula `(e^{-i dt H_T} ... e^{-i dt H_1})^r`, `dt = tau / r`.

use num_complex::Complex64;

use super::{Circuit, CircuitKind, Layer, SimError};
use crate::linalg::ComplexMatrix;
use crate::model::PauliTerm;

/// `r = ceil(tau / sqrt(eps))`, so that `dt^2 <= eps`; at least one step.
pub fn trotter_steps(tau: f64, eps: f64) -> Result<usize, SimError> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(SimError::InvalidArgument(format!(
            "eps must lie in (0, 1), got {eps}"
        )));
    }
    if !(tau >= 0.0) || !tau.is_finite() {
        return Err(SimError::InvalidArgument(format!(
            "tau must be nonnegative, got {tau}"
        )));
    }
    Ok(((tau / eps.sqrt()).ceil() as usize).max(1))
}

/// Trotter circuit with the step count chosen by [`trotter_steps`].
pub fn build_trotter(terms: &[PauliTerm], tau: f64, eps: f64) -> Result<Circuit, SimError> {
    build_trotter_steps(terms, tau, trotter_steps(tau, eps)?)
}

/// `r` repetitions of one layer `e^{-i dt c_k P_k}` per term, first term first.
pub fn build_trotter_steps(terms: &[PauliTerm], tau: f64, r: usize) -> Result<Circuit, SimError> {
    if terms.is_empty() || r == 0 {
        return Err(SimError::InvalidArgument(
            "need at least one term and one step".into(),
        ));
    }
    let dt = tau / r as f64;
    let step: Vec<ComplexMatrix> = terms
        .iter()
        .map(|t| {
            let p = t.string_matrix();
            let theta = t.coefficient * dt;
            let dim = p.nrows();
            &ComplexMatrix::identity(dim).scale_real(theta.cos())
                + &p.scale(Complex64::new(0.0, -theta.sin()))
        })
        .collect();
    let layers = (0..r)
        .flat_map(|_| step.iter().cloned())
        .map(|gate| Layer { gate, noisy: true })
        .collect();
    Circuit::new(layers, CircuitKind::Trotter)
}
