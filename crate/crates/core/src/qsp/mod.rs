//! Quantum signal processing: oracle, polynomial completion, decomposition into
//! projector layers, and circuit assembly.
//!
//! The circuit acts on one ancilla (qubit 0, leftmost tensor factor) and the
//! system register. With `z = e^{i arccos lambda}` and `t = z^{1/2}`, the
//! circuit restricted to an eigenvector of `H` is the 2x2 matrix
//! `F(t) = E_0 prod_k E_{P_k}(t)`, and `<+|F|+>` is the implemented polynomial.

mod circuit;
mod completion;
mod decompose;
mod phase_file;
mod roots;

pub use circuit::{
    assemble_circuit, build_hs_circuit, build_hs_circuit_with_order, build_oracle, circuit_depth, hs_phases,
    qsp_operator_error, success_probability, HsCircuit, QspCircuit,
};
pub use completion::{complete, COMPLETION_TOL};
pub use decompose::{decompose, decompose_matrix, MatrixLaurent, DEGENERATE_TOL, STRIP_TOL};
pub use phase_file::{
    format_phase_set, parse_phase_set, read_phase_file, write_phase_file, PhaseFileHeader,
};
pub use roots::polynomial_roots;

use nalgebra::Matrix2;
use num_complex::Complex64;
use thiserror::Error;

use crate::jacobi_anger::JacobiAngerError;
use crate::linalg::LinalgError;

/// Complex 2x2 matrix acting on the ancilla.
pub type Mat2 = Matrix2<Complex64>;

/// Tolerance for projector idempotency and unitarity of `E_0`.
pub const PHASE_TOL: f64 = 1e-10;

#[derive(Debug, Error)]
pub enum QspError {
    #[error("completion failed ({reason}), residual {residual:e}")]
    CompletionFailure { residual: f64, reason: String },
    #[error("decomposition failed at layer {layer}, residual {residual:e}")]
    DecompositionFailure { layer: usize, residual: f64 },
    #[error("invalid phase set: {0}")]
    InvalidPhases(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("phase file line {line}: {message}")]
    PhaseFormat { line: usize, message: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    JacobiAnger(#[from] JacobiAngerError),
}

/// `E_0` and the ordered projectors `P_1, ..., P_{2n}` of `F = E_0 prod_k E_{P_k}`.
#[derive(Debug, Clone, PartialEq)]
pub struct QspPhaseSet {
    pub e0: Mat2,
    pub projectors: Vec<Mat2>,
}

impl QspPhaseSet {
    /// Validates unitarity of `e0` and that each projector is a rank-one
    /// orthogonal projector, to [`PHASE_TOL`].
    pub fn new(e0: Mat2, projectors: Vec<Mat2>) -> Result<Self, QspError> {
        if !projectors.len().is_multiple_of(2) {
            return Err(QspError::InvalidPhases(format!(
                "odd number of projectors ({})",
                projectors.len()
            )));
        }
        let dev = (e0.adjoint() * e0 - Mat2::identity()).norm();
        if dev > PHASE_TOL {
            return Err(QspError::InvalidPhases(format!(
                "E0 deviates from unitary by {dev:e}"
            )));
        }
        for (k, p) in projectors.iter().enumerate() {
            let idem = (p * p - p).norm();
            let herm = (p.adjoint() - p).norm();
            let rank = (p.trace() - Complex64::new(1.0, 0.0)).norm();
            if idem.max(herm).max(rank) > PHASE_TOL {
                return Err(QspError::InvalidPhases(format!(
                    "projector {} is not a rank-one orthogonal projector (idempotency {idem:e}, hermiticity {herm:e}, trace {rank:e})",
                    k + 1
                )));
            }
        }
        Ok(Self { e0, projectors })
    }

    /// Polynomial degree `n` in `z`; there are `2n` projectors.
    pub fn degree(&self) -> usize {
        self.projectors.len() / 2
    }

    /// `F(t)` for `t` on the unit circle.
    pub fn evaluate(&self, t: Complex64) -> Mat2 {
        let tinv = t.inv();
        self.projectors.iter().fold(self.e0, |acc, p| {
            let e = p * t + (Mat2::identity() - p) * tinv;
            acc * e
        })
    }

    /// `<+| F(e^{i theta / 2}) |+>`, the implemented polynomial at `x = cos(theta)`.
    pub fn polynomial_at(&self, theta: f64) -> Complex64 {
        let f = self.evaluate(Complex64::from_polar(1.0, 0.5 * theta));
        0.5 * (f[(0, 0)] + f[(0, 1)] + f[(1, 0)] + f[(1, 1)])
    }

    /// Multiplies the factors out into a matrix Laurent polynomial in `t`.
    pub fn to_matrix_laurent(&self) -> MatrixLaurent {
        self.projectors
            .iter()
            .fold(MatrixLaurent::constant(self.e0), |acc, p| acc.mul_factor(p))
    }
}

/// Error split for a noisy QSP estimate: truncation, circuit synthesis and noise.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QspErrorBudget {
    pub eps_coeff: f64,
    pub eps_qsp: f64,
    pub eps_noise: f64,
}

impl QspErrorBudget {
    pub fn new(eps_coeff: f64, eps_qsp: f64, eps_noise: f64) -> Result<Self, QspError> {
        if !(eps_coeff >= 0.0 && eps_noise >= 0.0) || eps_qsp < eps_coeff {
            return Err(QspError::InvalidInput(format!(
                "need 0 <= eps_coeff <= eps_qsp and eps_noise >= 0, got ({eps_coeff}, {eps_qsp}, {eps_noise})"
            )));
        }
        Ok(Self {
            eps_coeff,
            eps_qsp,
            eps_noise,
        })
    }

    pub fn total(&self) -> f64 {
        self.eps_noise + self.eps_qsp
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn phase_set_validation() {
        let p = Mat2::new(
            Complex64::new(1.0, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(0.0, 0.0),
        );
        assert!(QspPhaseSet::new(Mat2::identity(), vec![p, p]).is_ok());
        assert!(QspPhaseSet::new(Mat2::identity(), vec![p]).is_err());
        assert!(QspPhaseSet::new(Mat2::identity() * Complex64::new(2.0, 0.0), vec![]).is_err());
        assert!(QspPhaseSet::new(Mat2::identity(), vec![p * Complex64::new(0.5, 0.0), p]).is_err());
    }

    #[test]
    fn constant_set_evaluates_to_e0() {
        let e0 = Mat2::new(
            Complex64::new(0.0, 1.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(0.0, -1.0),
        );
        let set = QspPhaseSet::new(e0, vec![]).unwrap();
        assert_eq!(set.degree(), 0);
        assert_eq!(set.evaluate(Complex64::from_polar(1.0, 0.3)), e0);
    }

    #[test]
    fn budget_total_is_additive() {
        let b = QspErrorBudget::new(1e-5, 1.4e-5, 2e-3).unwrap();
        assert!((b.total() - 2.014e-3).abs() < 1e-15);
        assert!(QspErrorBudget::new(1e-4, 1e-5, 0.0).is_err());
    }
}
