//! Density-matrix circuit simulation with local depolarizing noise.
//!
//! Qubit 0 is the most significant bit of a basis index, matching the
//! leftmost tensor factor convention used for operators.

mod shots;
mod trotter;

pub use shots::{derive_seed, sample_estimate, ShotEstimate};
pub use trotter::{build_trotter, build_trotter_steps, trotter_steps};

use nalgebra::DMatrix;
use num_complex::Complex64;
use thiserror::Error;

use crate::linalg::{herm_eig, herm_fn, kron, ComplexMatrix, LinalgError};
use crate::qsp::QspCircuit;

/// Tolerance for density-matrix and layer-unitarity checks.
pub const STATE_TOL: f64 = 1e-10;
/// Most negative eigenvalue accepted in a density matrix.
pub const MIN_EIGENVALUE: f64 = -1e-9;
/// Post-selection probabilities below this are reported as failures.
pub const MIN_PROBABILITY: f64 = 1e-12;
/// Largest depolarizing probability for which the channel is physical.
pub const MAX_P: f64 = 0.75;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SimError {
    #[error("depolarizing probability {p} outside [0, 3/4]")]
    RangeError { p: f64 },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("post-selection probability {prob:e} is too small")]
    ZeroProbability { prob: f64 },
    #[error("invalid density matrix: {0}")]
    InvalidState(String),
    #[error("layer {index} is not unitary (deviation {deviation:e})")]
    NonUnitaryLayer { index: usize, deviation: f64 },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// Trace-one Hermitian positive semidefinite matrix on `qubits` qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    qubits: usize,
    matrix: ComplexMatrix,
}

impl DensityMatrix {
    /// Validates that `rho` is a density matrix.
    pub fn new(matrix: ComplexMatrix) -> Result<Self, SimError> {
        let state = Self::wrap(matrix)?;
        state.validate()?;
        Ok(state)
    }

    fn wrap(matrix: ComplexMatrix) -> Result<Self, SimError> {
        let dim = matrix.nrows();
        if matrix.ncols() != dim || !dim.is_power_of_two() {
            return Err(SimError::InvalidState(format!(
                "expected a 2^m x 2^m matrix, found {}x{}",
                dim,
                matrix.ncols()
            )));
        }
        Ok(Self {
            qubits: dim.trailing_zeros() as usize,
            matrix,
        })
    }

    /// `|psi><psi|` for a normalized state vector.
    pub fn from_pure(state: &[Complex64]) -> Result<Self, SimError> {
        let norm: f64 = state.iter().map(|a| a.norm_sqr()).sum();
        if (norm - 1.0).abs() > STATE_TOL {
            return Err(SimError::InvalidState(format!(
                "state vector has norm^2 {norm}"
            )));
        }
        let n = state.len();
        Self::wrap(ComplexMatrix::from_fn(n, n, |i, j| {
            state[i] * state[j].conj()
        }))
    }

    /// `|0...0><0...0|`.
    pub fn zero_state(qubits: usize) -> Self {
        let dim = 1usize << qubits;
        let mut m = ComplexMatrix::zeros(dim, dim);
        m.set(0, 0, Complex64::new(1.0, 0.0));
        Self { qubits, matrix: m }
    }

    /// `I / 2^m`.
    pub fn maximally_mixed(qubits: usize) -> Self {
        let dim = 1usize << qubits;
        Self {
            qubits,
            matrix: ComplexMatrix::identity(dim).scale_real(1.0 / dim as f64),
        }
    }

    /// `|+><+| ⊗ self`, with the new qubit in front.
    pub fn with_plus_ancilla(&self) -> Self {
        let plus = ComplexMatrix::from_fn(2, 2, |_, _| Complex64::new(0.5, 0.0));
        Self {
            qubits: self.qubits + 1,
            matrix: kron(&plus, &self.matrix),
        }
    }

    pub fn qubits(&self) -> usize {
        self.qubits
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn trace(&self) -> f64 {
        self.matrix.trace().re
    }

    /// `Tr(rho^2)`.
    pub fn purity(&self) -> f64 {
        self.matrix.as_nalgebra().iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn validate(&self) -> Result<(), SimError> {
        let dev = self.matrix.hermitian_deviation();
        if dev > STATE_TOL {
            return Err(SimError::InvalidState(format!(
                "not Hermitian (deviation {dev:e})"
            )));
        }
        let tr = self.matrix.trace();
        if (tr.re - 1.0).abs() > STATE_TOL || tr.im.abs() > STATE_TOL {
            return Err(SimError::InvalidState(format!("trace {tr}")));
        }
        let min = herm_eig(&self.matrix)?.eigenvalues[0];
        if min < MIN_EIGENVALUE {
            return Err(SimError::InvalidState(format!(
                "negative eigenvalue {min:e}"
            )));
        }
        Ok(())
    }
}

/// Local depolarizing noise applied to every qubit after every noisy layer.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseModel {
    pub p: f64,
}

impl NoiseModel {
    pub fn new(p: f64) -> Result<Self, SimError> {
        if !(0.0..=MAX_P).contains(&p) {
            return Err(SimError::RangeError { p });
        }
        Ok(Self { p })
    }

    pub fn noiseless() -> Self {
        Self { p: 0.0 }
    }

    /// Noise amplified by `factor`.
    pub fn scaled(&self, factor: f64) -> Result<Self, SimError> {
        Self::new(self.p * factor)
    }
}

/// Which construction produced a circuit; QSP circuits carry an ancilla that
/// is post-selected on `|+>`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CircuitKind {
    Qsp,
    Trotter,
}

impl CircuitKind {
    pub fn label(self) -> &'static str {
        match self {
            CircuitKind::Qsp => "qsp",
            CircuitKind::Trotter => "trotter",
        }
    }
}

/// One unitary layer; `noisy` layers are followed by depolarizing on every qubit.
#[derive(Debug, Clone, PartialEq)]
pub struct Layer {
    pub gate: ComplexMatrix,
    pub noisy: bool,
}

/// Layers in the order they act on the state.
#[derive(Debug, Clone)]
pub struct Circuit {
    layers: Vec<Layer>,
    kind: CircuitKind,
    qubits: usize,
}

impl Circuit {
    /// Every layer must be unitary on the same register.
    pub fn new(layers: Vec<Layer>, kind: CircuitKind) -> Result<Self, SimError> {
        let dim = layers.first().map_or(1, |l| l.gate.nrows());
        for (index, layer) in layers.iter().enumerate() {
            if layer.gate.nrows() != dim || layer.gate.ncols() != dim {
                return Err(SimError::DimensionMismatch {
                    expected: dim,
                    found: layer.gate.nrows(),
                });
            }
            let product = &layer.gate.dagger() * &layer.gate;
            let deviation = (&product - &ComplexMatrix::identity(dim)).max_abs();
            if deviation > STATE_TOL {
                return Err(SimError::NonUnitaryLayer { index, deviation });
            }
        }
        if !dim.is_power_of_two() {
            return Err(SimError::InvalidArgument(format!(
                "register dimension {dim} is not a power of two"
            )));
        }
        Ok(Self {
            layers,
            kind,
            qubits: dim.trailing_zeros() as usize,
        })
    }

    /// Every layer of the QSP circuit, including `E_0`, counts as one noise exposure.
    pub fn from_qsp(circuit: &QspCircuit) -> Result<Self, SimError> {
        let layers = circuit
            .gates_in_time_order()
            .into_iter()
            .map(|gate| Layer { gate, noisy: true })
            .collect();
        Self::new(layers, CircuitKind::Qsp)
    }

    pub fn layers(&self) -> &[Layer] {
        &self.layers
    }

    pub fn kind(&self) -> CircuitKind {
        self.kind
    }

    /// Qubits acted on, including any ancilla.
    pub fn qubits(&self) -> usize {
        self.qubits
    }

    /// Qubits of the system register (without the QSP ancilla).
    pub fn system_qubits(&self) -> usize {
        match self.kind {
            CircuitKind::Qsp => self.qubits - 1,
            CircuitKind::Trotter => self.qubits,
        }
    }

    /// Layer count.
    pub fn depth(&self) -> usize {
        self.layers.len()
    }

    /// Overall unitary, last layer leftmost.
    pub fn product(&self) -> ComplexMatrix {
        let dim = 1usize << self.qubits;
        self.layers
            .iter()
            .fold(ComplexMatrix::identity(dim), |acc, l| &l.gate * &acc)
    }

    /// Full-register initial state for a system state: `|+><+| ⊗ rho` for QSP.
    pub fn prepare(&self, system: &DensityMatrix) -> Result<DensityMatrix, SimError> {
        if system.qubits() != self.system_qubits() {
            return Err(SimError::DimensionMismatch {
                expected: self.system_qubits(),
                found: system.qubits(),
            });
        }
        Ok(match self.kind {
            CircuitKind::Qsp => system.with_plus_ancilla(),
            CircuitKind::Trotter => system.clone(),
        })
    }
}

/// Applies one depolarizing channel to qubit `q` in place:
/// `rho <- (1 - 4p/3) rho + (2p/3) I_q ⊗ Tr_q rho`.
fn depolarize_qubit(rho: &mut DMatrix<Complex64>, qubits: usize, q: usize, p: f64) {
    let mask = 1usize << (qubits - 1 - q);
    let dim = rho.nrows();
    let keep = 1.0 - 4.0 * p / 3.0;
    let mix = 2.0 * p / 3.0;
    for j0 in (0..dim).filter(|j| j & mask == 0) {
        let j1 = j0 | mask;
        for i0 in (0..dim).filter(|i| i & mask == 0) {
            let i1 = i0 | mask;
            let t = rho[(i0, j0)] + rho[(i1, j1)];
            rho[(i0, j0)] = rho[(i0, j0)] * keep + t * mix;
            rho[(i1, j1)] = rho[(i1, j1)] * keep + t * mix;
            rho[(i0, j1)] *= keep;
            rho[(i1, j0)] *= keep;
        }
    }
}

/// `(1 - p) rho + (p/3)(X rho X + Y rho Y + Z rho Z)` on each qubit in turn.
pub fn depolarize_all(rho: &DensityMatrix, p: f64) -> Result<DensityMatrix, SimError> {
    NoiseModel::new(p)?;
    let mut inner = rho.matrix.clone().into_nalgebra();
    if p > 0.0 {
        for q in 0..rho.qubits {
            depolarize_qubit(&mut inner, rho.qubits, q, p);
        }
    }
    Ok(DensityMatrix {
        qubits: rho.qubits,
        matrix: ComplexMatrix::from_nalgebra(inner),
    })
}

/// Runs the circuit: each layer `L` maps `rho -> L rho L^dagger`, followed by
/// depolarizing on every qubit when the layer is noisy.
pub fn evolve(
    circuit: &Circuit,
    rho0: &DensityMatrix,
    noise: NoiseModel,
) -> Result<DensityMatrix, SimError> {
    if rho0.qubits != circuit.qubits {
        return Err(SimError::DimensionMismatch {
            expected: circuit.qubits,
            found: rho0.qubits,
        });
    }
    let mut rho = rho0.matrix.clone();
    for layer in &circuit.layers {
        rho = layer.gate.conjugate(&rho);
        if layer.noisy && noise.p > 0.0 {
            let mut inner = rho.into_nalgebra();
            for q in 0..circuit.qubits {
                depolarize_qubit(&mut inner, circuit.qubits, q, noise.p);
            }
            rho = ComplexMatrix::from_nalgebra(inner);
        }
    }
    Ok(DensityMatrix {
        qubits: circuit.qubits,
        matrix: rho,
    })
}

/// Projects the ancilla (qubit 0) onto `|+>` and traces it out.
/// Returns the normalized system state and the success probability.
pub fn postselect_plus(rho: &DensityMatrix) -> Result<(DensityMatrix, f64), SimError> {
    if rho.qubits < 1 {
        return Err(SimError::InvalidArgument(
            "post-selection needs an ancilla qubit".into(),
        ));
    }
    let block = QspCircuit::plus_block(&rho.matrix);
    let prob = block.trace().re;
    if !(prob >= MIN_PROBABILITY) {
        return Err(SimError::ZeroProbability { prob });
    }
    let reduced = block.hermitian_part().scale_real(1.0 / prob);
    Ok((
        DensityMatrix {
            qubits: rho.qubits - 1,
            matrix: reduced,
        },
        prob,
    ))
}

/// `Re Tr(o rho)`.
pub fn expectation(o: &ComplexMatrix, rho: &DensityMatrix) -> Result<f64, SimError> {
    if o.nrows() != rho.dim() || o.ncols() != rho.dim() {
        return Err(SimError::DimensionMismatch {
            expected: rho.dim(),
            found: o.nrows(),
        });
    }
    let a = o.as_nalgebra();
    let b = rho.matrix.as_nalgebra();
    let n = rho.dim();
    let mut acc = Complex64::new(0.0, 0.0);
    for i in 0..n {
        for k in 0..n {
            acc += a[(i, k)] * b[(k, i)];
        }
    }
    Ok(acc.re)
}

/// Exact expectation at the end of a (possibly noisy) run, with the
/// post-selection probability for QSP circuits (`1` otherwise).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Measurement {
    pub expectation: f64,
    pub success_probability: f64,
}

/// Prepares the register, evolves, post-selects QSP circuits and measures `o`
/// on the system register.
pub fn measure(
    circuit: &Circuit,
    system_state: &DensityMatrix,
    o: &ComplexMatrix,
    noise: NoiseModel,
) -> Result<Measurement, SimError> {
    let rho = evolve(circuit, &circuit.prepare(system_state)?, noise)?;
    let (state, success_probability) = match circuit.kind {
        CircuitKind::Qsp => postselect_plus(&rho)?,
        CircuitKind::Trotter => (rho, 1.0),
    };
    Ok(Measurement {
        expectation: expectation(o, &state)?,
        success_probability,
    })
}

/// `Tr(o e^{-i tau h} rho e^{i tau h})` from a dense eigendecomposition.
pub fn ideal_expectation(
    h: &ComplexMatrix,
    o: &ComplexMatrix,
    rho: &DensityMatrix,
    tau: f64,
) -> Result<f64, SimError> {
    let u = herm_fn(h, |l| Some(Complex64::from_polar(1.0, -tau * l)))?;
    let evolved = DensityMatrix {
        qubits: rho.qubits,
        matrix: u.conjugate(&rho.matrix),
    };
    expectation(o, &evolved)
}
