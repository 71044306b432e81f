//! Noisy simulation and zero-noise extrapolation of quantum-signal-processing
//! Hamiltonian simulation on a small transverse-field Ising chain.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod budgets;
pub mod exec;
pub mod experiments;
pub mod jacobi_anger;
pub mod linalg;
pub mod model;
pub mod noisy_sim;
pub mod qsp;
pub mod zne;

#[cfg(test)]
mod test_util;
