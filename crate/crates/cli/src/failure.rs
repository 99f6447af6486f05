use std::process::ExitCode;

use qbench::bench::BenchError;
use qbench::exact::ExactError;
use qbench::vmc::VmcError;
use qbench::vqe::VqeError;

/// A command failure, classified for the exit status: bad input exits 2,
/// anything the input could not have prevented exits 1.
#[derive(Debug, thiserror::Error)]
#[error(transparent)]
pub struct Failure(#[from] BenchError);

impl Failure {
    pub fn is_validation(&self) -> bool {
        match &self.0 {
            BenchError::Io { .. } => false,
            BenchError::Exact(e) | BenchError::Vqe(VqeError::Exact(e)) => !internal_exact(e),
            BenchError::Vmc(e) => !matches!(e, VmcError::NodeEvaluation { .. } | VmcError::Diverged { .. }),
            _ => true,
        }
    }

    pub fn exit_code(&self) -> ExitCode {
        ExitCode::from(if self.is_validation() { 2 } else { 1 })
    }
}

fn internal_exact(e: &ExactError) -> bool {
    matches!(e, ExactError::ZeroVector | ExactError::State(_))
}
