//! Noiseless statevector simulation of parameterized circuits (R-CX and
//! Hamiltonian-variational) and their optimization against spin Hamiltonians.
//!
//! Qubit `q` is lattice site `q`; the computational state `|0>` is spin up.

mod circuit;
mod optimize;
mod state;

pub use circuit::{circuit_energy_and_variance, prepare_hv, prepare_rcx, Circuit, CircuitAnsatzKind, GradientMethod};
pub use optimize::{depth_scan, optimize_vqe, optimize_vqe_from, VqeConfig, VqeRun};
pub use state::{QuantumState, MAX_QUBITS};

use crate::einfty::EInftyError;
use crate::exact::ExactError;
use crate::vscore::VScoreError;

#[derive(Debug, thiserror::Error, Clone, PartialEq)]
pub enum VqeError {
    #[error("expected {expected} circuit parameters, got {got}")]
    ParameterLengthMismatch { expected: usize, got: usize },
    #[error("Hamiltonian is not a spin model on the register's qubits")]
    SectorMismatch,
    #[error("register of {n} qubits is outside 1..={max}")]
    QubitCount { n: usize, max: usize },
    #[error("invalid configuration: {0}")]
    InvalidConfig(&'static str),
    #[error(transparent)]
    Exact(#[from] ExactError),
    #[error(transparent)]
    EInfty(#[from] EInftyError),
    #[error(transparent)]
    VScore(#[from] VScoreError),
}
