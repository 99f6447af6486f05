//! Benchmarking toolkit for variational ground-state methods on quantum lattice models.
//!
//! The exact layer ([`hamiltonian`], [`exact`], [`einfty`], [`vscore`]) is
//! generic over the real scalar (`f32` or `f64`); aliases below fix it to
//! `f64`, which the variational engines ([`vmc`], [`vqe`]) and the record
//! pipeline ([`bench`]) use throughout.

// `!(x > 0.0)` rejects NaN along with non-positive values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod basis;
pub mod bench;
pub mod einfty;
pub mod exact;
pub mod hamiltonian;
pub mod lattice;
pub mod scalar;
pub mod state;
pub mod vmc;
pub mod vqe;
pub mod vscore;

pub use basis::HilbertSector;
pub use lattice::{build_lattice, Boundary, Bond, LatticeGraph, LatticeKind};
pub use scalar::Real;

pub type HamiltonianSpec = hamiltonian::HamiltonianSpec<f64>;
pub type HamiltonianSpec32 = hamiltonian::HamiltonianSpec<f32>;
pub type StateVector = state::StateVector<f64>;
pub type StateVector32 = state::StateVector<f32>;
pub type ExactSolution = exact::ExactSolution<f64>;
pub type EInftyEstimate = einfty::EInftyEstimate<f64>;
pub type VScoreInput = vscore::VScoreInput<f64>;
pub type BoundContext = vscore::BoundContext<f64>;
pub type FitResult = vscore::FitResult<f64>;
pub type RowEntry = hamiltonian::RowEntry<f64>;
pub type Model = hamiltonian::Model<f64>;
