//! The modified transverse-field Ising chain and the measured two-site observable.
//!
//! ```text
//! H = -alpha * ( sum_{i} (J_Z Z_i Z_{i+1} + J_X X_i X_{i+1}) + h_x sum_i X_i )
//! ```
//!
//! Open boundary conditions, `N - 1` bonds and `N` field terms. Qubit 0 is the
//! leftmost tensor factor.

use std::fmt;

use num_complex::Complex64;
use thiserror::Error;

use crate::linalg::{kron_all, spectral_norm, ComplexMatrix};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("invalid model specification: {0}")]
    InvalidSpec(String),
    #[error("Hamiltonian is not normalized: spectral norm {norm} > 1")]
    NormalizationError { norm: f64 },
    #[error("observable needs at least 3 sites, got {sites}")]
    SizeError { sites: usize },
}

/// Single-qubit Pauli label.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub fn matrix(self) -> ComplexMatrix {
        let z = Complex64::new(0.0, 0.0);
        let one = Complex64::new(1.0, 0.0);
        let i = Complex64::new(0.0, 1.0);
        let entries = match self {
            Pauli::I => [one, z, z, one],
            Pauli::X => [z, one, one, z],
            Pauli::Y => [z, -i, i, z],
            Pauli::Z => [one, z, z, -one],
        };
        ComplexMatrix::from_row_major(2, 2, &entries)
    }

    fn symbol(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }
}

/// Weighted Pauli string `coefficient * P_0 ⊗ P_1 ⊗ ... ⊗ P_{N-1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct PauliTerm {
    pub coefficient: f64,
    pub axes: Vec<Pauli>,
}

impl PauliTerm {
    pub fn new(coefficient: f64, axes: Vec<Pauli>) -> Self {
        Self { coefficient, axes }
    }

    pub fn sites(&self) -> usize {
        self.axes.len()
    }

    /// The unweighted Pauli string as a dense matrix.
    pub fn string_matrix(&self) -> ComplexMatrix {
        let factors: Vec<ComplexMatrix> = self.axes.iter().map(|p| p.matrix()).collect();
        kron_all(&factors)
    }

    /// `coefficient * string`.
    pub fn matrix(&self) -> ComplexMatrix {
        self.string_matrix().scale_real(self.coefficient)
    }

    pub fn label(&self) -> String {
        self.axes.iter().map(|p| p.symbol()).collect()
    }
}

impl fmt::Display for PauliTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:+} {}", self.coefficient, self.label())
    }
}

/// Parameters of the Ising chain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TfimSpec {
    pub sites: usize,
    pub j_z: f64,
    pub j_x: f64,
    pub h_x: f64,
    pub alpha: f64,
}

impl TfimSpec {
    pub const DEFAULT_J_Z: f64 = 1.0;
    pub const DEFAULT_J_X: f64 = 0.1;
    pub const DEFAULT_H_X: f64 = 0.1;
    pub const DEFAULT_ALPHA: f64 = 7.0 / 50.0;

    /// The chain studied in the experiments: `J_Z = 1`, `J_X = h_x = 0.1`, `alpha = 7/50`.
    pub fn standard(sites: usize) -> Self {
        Self {
            sites,
            j_z: Self::DEFAULT_J_Z,
            j_x: Self::DEFAULT_J_X,
            h_x: Self::DEFAULT_H_X,
            alpha: Self::DEFAULT_ALPHA,
        }
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        if self.sites < 2 {
            return Err(ModelError::InvalidSpec(format!(
                "need at least 2 sites, got {}",
                self.sites
            )));
        }
        if !(self.alpha > 0.0) || !self.alpha.is_finite() {
            return Err(ModelError::InvalidSpec(format!(
                "alpha must be positive, got {}",
                self.alpha
            )));
        }
        if ![self.j_z, self.j_x, self.h_x].iter().all(|v| v.is_finite()) {
            return Err(ModelError::InvalidSpec("couplings must be finite".into()));
        }
        Ok(())
    }

    /// Number of Pauli terms, `2(N-1) + N`.
    pub fn term_count(&self) -> usize {
        3 * self.sites - 2
    }
}

fn single_site(sites: usize, at: &[(usize, Pauli)]) -> Vec<Pauli> {
    let mut axes = vec![Pauli::I; sites];
    for &(site, p) in at {
        axes[site] = p;
    }
    axes
}

/// Pauli decomposition of the chain, in the fixed order used by the Trotter
/// builder: for each bond `ZZ` then `XX`, followed by the `X` field on every site.
pub fn pauli_terms(spec: &TfimSpec) -> Result<Vec<PauliTerm>, ModelError> {
    spec.validate()?;
    let n = spec.sites;
    let mut terms = Vec::with_capacity(spec.term_count());
    for i in 0..n - 1 {
        terms.push(PauliTerm::new(
            -spec.alpha * spec.j_z,
            single_site(n, &[(i, Pauli::Z), (i + 1, Pauli::Z)]),
        ));
        terms.push(PauliTerm::new(
            -spec.alpha * spec.j_x,
            single_site(n, &[(i, Pauli::X), (i + 1, Pauli::X)]),
        ));
    }
    for i in 0..n {
        terms.push(PauliTerm::new(
            -spec.alpha * spec.h_x,
            single_site(n, &[(i, Pauli::X)]),
        ));
    }
    Ok(terms)
}

/// Sum of a list of Pauli terms as a dense matrix.
pub fn assemble(terms: &[PauliTerm]) -> ComplexMatrix {
    let dim = 1usize << terms.first().map_or(0, |t| t.sites());
    terms
        .iter()
        .fold(ComplexMatrix::zeros(dim, dim), |acc, t| &acc + &t.matrix())
}

/// Dense Hamiltonian; fails if its spectral norm exceeds one.
pub fn build_tfim(spec: &TfimSpec) -> Result<ComplexMatrix, ModelError> {
    let h = assemble(&pauli_terms(spec)?);
    let norm = spectral_norm(&h);
    if norm > 1.0 {
        return Err(ModelError::NormalizationError { norm });
    }
    Ok(h)
}

/// `I ⊗ Z ⊗ Z ⊗ I^{⊗(N-3)}`: the nearest-neighbour correlation on sites 1 and 2.
pub fn build_observable(sites: usize) -> Result<ComplexMatrix, ModelError> {
    if sites < 3 {
        return Err(ModelError::SizeError { sites });
    }
    Ok(PauliTerm::new(1.0, single_site(sites, &[(1, Pauli::Z), (2, Pauli::Z)])).string_matrix())
}
