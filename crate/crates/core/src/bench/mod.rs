//! Benchmark records, their line-delimited JSON persistence, the per-Hamiltonian
//! ranking, the V-score versus relative-error fit, and the reference suite.

mod record;
pub mod suite;

use std::collections::BTreeMap;
use std::path::Path;

pub use record::{append_records, parse_records, read_records, write_records, BenchRecord, V_SCORE_CONSISTENCY};

use crate::einfty::EInftyError;
use crate::exact::ExactError;
use crate::hamiltonian::HamiltonianError;
use crate::vmc::VmcError;
use crate::vqe::VqeError;
use crate::vscore::{fit_intercept, FitResult, VScoreError};

/// Points with a relative error at or below this are exact to rounding.
pub const DEGENERATE_RELATIVE_ERROR: f64 = 1e-10;
/// Points with a V-score at or below this are exact to rounding.
pub const DEGENERATE_V_SCORE: f64 = 1e-16;

#[derive(Debug, thiserror::Error, Clone, PartialEq)]
pub enum BenchError {
    #[error("{path}: {message}")]
    Io { path: String, message: String },
    #[error("schema violation on line {line}: {reason}")]
    SchemaViolation { line: usize, reason: String },
    #[error("no records")]
    EmptyInput,
    #[error("fit needs at least 2 usable points, found {0}")]
    InsufficientPoints(usize),
    #[error(transparent)]
    VScore(#[from] VScoreError),
    #[error(transparent)]
    Hamiltonian(#[from] HamiltonianError),
    #[error(transparent)]
    Exact(#[from] ExactError),
    #[error(transparent)]
    EInfty(#[from] EInftyError),
    #[error(transparent)]
    Vmc(#[from] VmcError),
    #[error(transparent)]
    Vqe(#[from] VqeError),
}

impl BenchError {
    pub(crate) fn io(path: &Path, e: std::io::Error) -> Self {
        BenchError::Io {
            path: path.display().to_string(),
            message: e.to_string(),
        }
    }
}

/// The winning record of one Hamiltonian.
#[derive(Debug, Clone, PartialEq)]
pub struct RankingEntry {
    pub hamiltonian: String,
    /// Method with the lowest energy.
    pub method: String,
    pub energy: f64,
    /// V-score of the winning method.
    pub hamiltonian_v_score: f64,
    /// Whether any record of this Hamiltonian carries an exact energy.
    pub has_exact: bool,
}

/// Picks the lowest-energy record per Hamiltonian (ties: lower V-score, then
/// method tag) and sorts Hamiltonians by the winner's V-score, hardest first.
pub fn rank(records: &[BenchRecord]) -> Result<Vec<RankingEntry>, BenchError> {
    if records.is_empty() {
        return Err(BenchError::EmptyInput);
    }
    let mut groups: BTreeMap<&str, Vec<&BenchRecord>> = BTreeMap::new();
    for r in records {
        groups.entry(r.hamiltonian.as_str()).or_default().push(r);
    }
    let mut entries: Vec<RankingEntry> = groups
        .into_iter()
        .map(|(h, rs)| {
            let winner = rs
                .iter()
                .min_by(|a, b| {
                    a.energy
                        .total_cmp(&b.energy)
                        .then(a.v_score.total_cmp(&b.v_score))
                        .then(a.method.cmp(&b.method))
                })
                .expect("groups are nonempty");
            RankingEntry {
                hamiltonian: h.to_string(),
                method: winner.method.clone(),
                energy: winner.energy,
                hamiltonian_v_score: winner.v_score,
                has_exact: rs.iter().any(|r| r.e0.is_some()),
            }
        })
        .collect();
    entries.sort_by(|a, b| {
        b.hamiltonian_v_score
            .total_cmp(&a.hamiltonian_v_score)
            .then(a.hamiltonian.cmp(&b.hamiltonian))
    });
    Ok(entries)
}

/// `(v_score, relative_error)` of the records usable in the fit: those with an
/// exact energy whose point is not degenerate.
pub fn fit_points(records: &[BenchRecord]) -> Vec<(f64, f64)> {
    records
        .iter()
        .filter_map(|r| Some((r.v_score, r.relative_error()?)))
        .filter(|&(v, rel)| v > DEGENERATE_V_SCORE && rel > DEGENERATE_RELATIVE_ERROR && rel.is_finite())
        .collect()
}

/// Slope-one fit of `log10(rel_err)` against `log10(v_score)` over the usable records.
pub fn fit_dataset(records: &[BenchRecord]) -> Result<FitResult<f64>, BenchError> {
    let points = fit_points(records);
    if points.len() < 2 {
        return Err(BenchError::InsufficientPoints(points.len()));
    }
    Ok(fit_intercept(&points)?)
}
