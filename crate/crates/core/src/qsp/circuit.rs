use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;

use super::{complete, decompose, Mat2, QspError, QspPhaseSet};
use crate::jacobi_anger::{
    build_hs_laurent, numeric_degree, TruncationReport, DEFAULT_GRID_POINTS,
};
use crate::linalg::{
    herm_eig, herm_fn, kron, spectral_norm, ComplexMatrix, EigenDecomposition, LinalgError,
};

/// Eigenvalues may exceed one in magnitude by at most this much.
const DOMAIN_SLACK: f64 = 1e-12;
const ORACLE_TOL: f64 = 1e-9;

/// `U = Q diag(e^{i arccos lambda_j}) Q^dagger`, so that `(U + U^dagger)/2 = h`.
pub fn build_oracle(h: &ComplexMatrix) -> Result<ComplexMatrix, QspError> {
    let eig = herm_eig(h)?;
    Ok(eig.apply(|l| {
        (l.abs() <= 1.0 + DOMAIN_SLACK)
            .then(|| Complex64::from_polar(1.0, l.clamp(-1.0, 1.0).acos()))
    })?)
}

/// `2 n d_o + 1`.
pub fn circuit_depth(n: usize, oracle_depth: usize) -> usize {
    2 * n * oracle_depth + 1
}

fn embed(m: &Mat2) -> ComplexMatrix {
    ComplexMatrix::from_row_major(2, 2, &[m[(0, 0)], m[(0, 1)], m[(1, 0)], m[(1, 1)]])
}

/// A QSP circuit on one ancilla plus the system register.
///
/// Layers are kept in product order `[E_0 ⊗ I, C_{P_1} U, C_{P_2} U^dagger, ...]`;
/// the last layer acts first on the state.
#[derive(Debug, Clone)]
pub struct QspCircuit {
    pub phases: QspPhaseSet,
    pub oracle: ComplexMatrix,
    pub n: usize,
    pub ancilla_count: usize,
    spectrum: EigenDecomposition,
    /// Phase `theta_j = arg <q_j|U|q_j>` of each oracle eigenvalue.
    thetas: Vec<f64>,
}

/// Builds the circuit from a phase set and an oracle produced by [`build_oracle`].
pub fn assemble_circuit(
    phases: QspPhaseSet,
    oracle: ComplexMatrix,
) -> Result<QspCircuit, QspError> {
    if !oracle.is_square() {
        return Err(LinalgError::NotSquare {
            rows: oracle.nrows(),
            cols: oracle.ncols(),
        }
        .into());
    }
    if !oracle.is_unitary(ORACLE_TOL) {
        return Err(QspError::InvalidInput("oracle is not unitary".into()));
    }
    let hermitian = oracle.hermitian_part();
    let spectrum = herm_eig(&hermitian)?;
    let q = &spectrum.eigenvectors;
    let rotated = &(&q.dagger() * &oracle) * q;
    let diagonal: Vec<Complex64> = (0..spectrum.dim()).map(|j| rotated.get(j, j)).collect();
    if (&spectrum.reassemble_with(&diagonal) - &oracle).max_abs() > ORACLE_TOL {
        return Err(QspError::InvalidInput(
            "oracle must be diagonal in the eigenbasis of its Hermitian part".into(),
        ));
    }
    let thetas = diagonal.iter().map(|u| u.arg()).collect();
    let n = phases.degree();
    Ok(QspCircuit {
        phases,
        oracle,
        n,
        ancilla_count: 1,
        spectrum,
        thetas,
    })
}

impl QspCircuit {
    pub fn system_dim(&self) -> usize {
        self.oracle.nrows()
    }

    /// Ancilla plus system qubits.
    pub fn qubits(&self) -> usize {
        self.system_dim().trailing_zeros() as usize + self.ancilla_count
    }

    /// `2n + 1` with a unit-depth oracle.
    pub fn depth(&self) -> usize {
        circuit_depth(self.n, 1)
    }

    /// Full-register layer matrices in product order.
    pub fn layers(&self) -> Vec<ComplexMatrix> {
        let dim = self.system_dim();
        let id = ComplexMatrix::identity(dim);
        let u_dag = self.oracle.dagger();
        let mut layers = Vec::with_capacity(self.depth());
        layers.push(kron(&embed(&self.phases.e0), &id));
        for (k, p) in self.phases.projectors.iter().enumerate() {
            let q = Mat2::identity() - p;
            let layer = if k % 2 == 0 {
                &kron(&embed(p), &self.oracle) + &kron(&embed(&q), &id)
            } else {
                &kron(&embed(&q), &u_dag) + &kron(&embed(p), &id)
            };
            layers.push(layer);
        }
        layers
    }

    /// Layers in the order they act on the state.
    pub fn gates_in_time_order(&self) -> Vec<ComplexMatrix> {
        let mut layers = self.layers();
        layers.reverse();
        layers
    }

    /// Product of all layers.
    pub fn unitary(&self) -> ComplexMatrix {
        let layers = self.layers();
        let dim = layers[0].nrows();
        layers
            .iter()
            .fold(ComplexMatrix::identity(dim), |acc, l| &acc * l)
    }

    /// Implemented polynomial at each oracle eigenvalue, in the order of the
    /// (ascending) eigenvalues of `(U + U^dagger)/2`.
    pub fn polynomial_values(&self) -> Vec<Complex64> {
        self.thetas
            .iter()
            .map(|&th| self.phases.polynomial_at(th))
            .collect()
    }

    /// `(<+| ⊗ I) U_QSP (|+> ⊗ I)` from the spectral form of the circuit.
    pub fn block_encoding(&self) -> ComplexMatrix {
        self.spectrum.reassemble_with(&self.polynomial_values())
    }

    /// `(<+| ⊗ I) M (|+> ⊗ I)` for a full-register operator `M`.
    pub fn plus_block(full: &ComplexMatrix) -> ComplexMatrix {
        let dim = full.nrows() / 2;
        ComplexMatrix::from_fn(dim, dim, |i, j| {
            0.5 * (full.get(i, j)
                + full.get(i, j + dim)
                + full.get(i + dim, j)
                + full.get(i + dim, j + dim))
        })
    }
}

/// `Tr(B rho B^dagger)` with `B` the `|+>` block: the probability of measuring
/// the ancilla in `|+>` after running the circuit on `|+><+| ⊗ rho`.
pub fn success_probability(circuit: &QspCircuit, rho: &ComplexMatrix) -> f64 {
    let b = circuit.block_encoding();
    (&(&b * rho) * &b.dagger()).trace().re.clamp(0.0, 1.0)
}

/// Spectral-norm distance between the `|+>` block and `e^{-i tau h} / sqrt(2)`.
pub fn qsp_operator_error(
    circuit: &QspCircuit,
    tau: f64,
    h: &ComplexMatrix,
) -> Result<f64, QspError> {
    let target = herm_fn(h, |l| Some(Complex64::from_polar(FRAC_1_SQRT_2, -tau * l)))?;
    Ok(spectral_norm(&(&circuit.block_encoding() - &target)))
}

/// A Hamiltonian-simulation circuit together with how its degree was chosen.
#[derive(Debug, Clone)]
pub struct HsCircuit {
    pub circuit: QspCircuit,
    pub tau: f64,
    /// `None` for `tau = 0`, where the polynomial is the constant `1/sqrt(2)`.
    pub truncation: Option<TruncationReport>,
}

/// Circuit implementing `e^{-i tau h} / sqrt(2)` with the degree picked by
/// [`numeric_degree`] at coefficient error `eps_coeff`.
pub fn build_hs_circuit(
    h: &ComplexMatrix,
    tau: f64,
    eps_coeff: f64,
) -> Result<HsCircuit, QspError> {
    if tau == 0.0 {
        return build_with_order(h, 0.0, None);
    }
    let report = numeric_degree(tau, eps_coeff, DEFAULT_GRID_POINTS)?;
    build_with_order(h, tau, Some(report))
}

/// Phase set for `e^{-i tau x} / sqrt(2)` at the degree [`build_hs_circuit`] would use.
pub fn hs_phases(
    tau: f64,
    eps_coeff: f64,
) -> Result<(Option<TruncationReport>, QspPhaseSet), QspError> {
    if tau == 0.0 {
        return Ok((None, phases_for_order(0.0, None)?));
    }
    let report = numeric_degree(tau, eps_coeff, DEFAULT_GRID_POINTS)?;
    Ok((Some(report), phases_for_order(tau, Some(report.r))?))
}

/// Same as [`build_hs_circuit`] with an explicit truncation order `R` (degree `2R + 1`).
pub fn build_hs_circuit_with_order(
    h: &ComplexMatrix,
    tau: f64,
    r: usize,
) -> Result<QspCircuit, QspError> {
    let phases = phases_for_order(tau, Some(r))?;
    assemble_circuit(phases, build_oracle(h)?)
}

fn build_with_order(
    h: &ComplexMatrix,
    tau: f64,
    report: Option<TruncationReport>,
) -> Result<HsCircuit, QspError> {
    let phases = phases_for_order(tau, report.map(|r| r.r))?;
    let circuit = assemble_circuit(phases, build_oracle(h)?)?;
    Ok(HsCircuit {
        circuit,
        tau,
        truncation: report,
    })
}

fn phases_for_order(tau: f64, r: Option<usize>) -> Result<QspPhaseSet, QspError> {
    let (a, b) = match r {
        Some(r) => {
            let pair = build_hs_laurent(tau, r)?;
            (pair.a, pair.b.scale(Complex64::new(-1.0, 0.0)))
        }
        None => (
            crate::jacobi_anger::LaurentPolynomial::constant(Complex64::new(FRAC_1_SQRT_2, 0.0)),
            crate::jacobi_anger::LaurentPolynomial::zero(),
        ),
    };
    let (c, d) = complete(&a, &b)?;
    decompose(&a, &b, &c, &d)
}
