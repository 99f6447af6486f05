//! Variational Monte Carlo for spin models: Metropolis sampling of `|psi|^2`,
//! local-energy statistics, energy gradients, and SGD or stochastic
//! reconfiguration updates for RBM and Jastrow wave functions.
//!
//! Configurations are bit strings with bit `i` set when spin `i` points up,
//! matching the Hamiltonian basis.

mod ansatz;
mod estimator;
mod optimize;
mod sampler;

pub use ansatz::{log_2cosh, sign_rule_mask, spin, Ansatz, DenseAnsatz, Jastrow, MarshallSign, Rbm};
pub use estimator::{
    blocked_std_error, energy_gradient, energy_gradient_weighted, estimate_energy, local_energies,
    local_energy, summarize, EnergyEstimate,
};
pub use optimize::{optimize, sgd_update, sr_update, Optimizer, Schedule, UpdateStep};
pub use sampler::{metropolis_sample, required_move, MarkovChain, MoveKind, SampleSet, Sampler, SamplerConfig};

use crate::einfty::EInftyError;
use crate::vscore::VScoreError;

#[derive(Debug, thiserror::Error, Clone, PartialEq)]
pub enum VmcError {
    #[error("{kind} moves do not suit model `{model}`")]
    IncompatibleMove { model: &'static str, kind: &'static str },
    #[error("VMC supports spin models only, got `{0}`")]
    UnsupportedModel(&'static str),
    #[error("ansatz has {ansatz} sites but the Hamiltonian has {spec}")]
    SizeMismatch { ansatz: usize, spec: usize },
    #[error("amplitude vanishes at configuration {config:#b}")]
    NodeEvaluation { config: u64 },
    #[error("expected {expected} parameters, got {got}")]
    ParameterLength { expected: usize, got: usize },
    #[error("invalid configuration: {0}")]
    InvalidConfig(&'static str),
    #[error("parameters became non-finite at iteration {iteration}")]
    Diverged { iteration: usize },
    #[error(transparent)]
    EInfty(#[from] EInftyError),
    #[error(transparent)]
    VScore(#[from] VScoreError),
}

/// Per-iteration statistics of the state before its update.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TracePoint {
    pub iteration: usize,
    pub energy: f64,
    pub variance: f64,
    pub std_error: f64,
}

/// Final estimates of an optimized variational state.
#[derive(Debug, Clone, PartialEq)]
pub struct VariationalResult {
    pub energy_mean: f64,
    pub energy_variance: f64,
    /// Zero for exact (sampling-free) evaluations.
    pub energy_std_error: f64,
    pub v_score: f64,
    pub e_infty: f64,
    /// `None` when no Markov chain was involved.
    pub acceptance_rate: Option<f64>,
    pub n_parameters: usize,
    pub iterations: usize,
    /// SR solves that fell back to a plain gradient step.
    pub solve_fallbacks: usize,
    pub trace: Vec<TracePoint>,
}

impl VariationalResult {
    /// Plain-text trace, one `iter E VarE` line per iteration.
    pub fn trace_text(&self) -> String {
        self.trace
            .iter()
            .map(|t| format!("{} {:.16e} {:.16e}\n", t.iteration, t.energy, t.variance))
            .collect()
    }
}
