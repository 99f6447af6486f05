//! The V-score zero point `E_inf = Tr H / dim H`, the mean energy of the
//! infinite-temperature state restricted to the particle-number sector.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::hamiltonian::{HamiltonianSpec, Model};
use crate::scalar::Real;

#[derive(Debug, thiserror::Error, Clone, PartialEq, Eq)]
pub enum EInftyError {
    #[error("sampled E_inf needs at least 2 samples, got {0}")]
    TooFewSamples(usize),
    #[error("no closed form for model `{0}`")]
    UnsupportedModel(&'static str),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EInftyMethod {
    Analytic,
    Sampled,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EInftyEstimate<T> {
    pub value: T,
    /// Zero exactly when `method` is analytic.
    pub std_error: T,
    pub method: EInftyMethod,
    pub n_samples: usize,
}

/// Closed-form trace average. Pauli strings are traceless, so spin models give
/// zero; for fermions only the density-density or on-site terms survive.
pub fn einfty_analytic<T: Real>(spec: &HamiltonianSpec<T>) -> Result<EInftyEstimate<T>, EInftyError> {
    let n_s = T::from_count(spec.n_sites());
    let value = match (*spec.model(), *spec.sector()) {
        (Model::Tfim { .. } | Model::Heisenberg { .. } | Model::J1J2 { .. }, _) => T::zero(),
        (Model::TV { v, .. }, crate::basis::HilbertSector::Fermions { n_particles, .. }) => {
            let edges = T::from_count(spec.lattice().nn_bonds().len());
            let n_f = T::from_count(n_particles);
            v * edges * n_f * (n_f - T::one()) / (n_s * (n_s - T::one()))
        }
        (
            Model::Hubbard { u, .. },
            crate::basis::HilbertSector::SpinfulFermions { n_up, n_down, .. },
        ) => u * T::from_count(n_up) * T::from_count(n_down) / n_s,
        (model, _) => return Err(EInftyError::UnsupportedModel(model.name())),
    };
    Ok(EInftyEstimate {
        value,
        std_error: T::zero(),
        method: EInftyMethod::Analytic,
        n_samples: 0,
    })
}

const BLOCK: usize = 4096;

/// Monte Carlo estimate from uniformly drawn sector basis states.
///
/// Each draw unranks a uniform index, so sampling is exact without rejection.
/// Blocks of samples use seeds derived from `seed` and are reduced in block
/// order, making the result independent of the thread count.
pub fn einfty_sampled<T: Real>(
    spec: &HamiltonianSpec<T>,
    n_samples: usize,
    seed: u64,
) -> Result<EInftyEstimate<T>, EInftyError> {
    if n_samples < 2 {
        return Err(EInftyError::TooFewSamples(n_samples));
    }
    let sector = spec.sector();
    let dim = sector.dimension();
    let n_blocks = n_samples.div_ceil(BLOCK);
    let sums: Vec<(f64, f64)> = (0..n_blocks)
        .into_par_iter()
        .map(|b| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(b as u64);
            let count = BLOCK.min(n_samples - b * BLOCK);
            let mut s = 0.0;
            let mut s2 = 0.0;
            for _ in 0..count {
                let x = sector.state_at(rng.random_range(0..dim));
                let e = spec.diagonal(x).to_f64_lossy();
                s += e;
                s2 += e * e;
            }
            (s, s2)
        })
        .collect();
    let (sum, sum_sq) = sums
        .iter()
        .fold((0.0, 0.0), |(a, b), (s, s2)| (a + s, b + s2));
    let n = n_samples as f64;
    let mean = sum / n;
    let var = ((sum_sq - n * mean * mean) / (n - 1.0)).max(0.0);
    Ok(EInftyEstimate {
        value: T::lit(mean),
        std_error: T::lit((var / n).sqrt()),
        method: EInftyMethod::Sampled,
        n_samples,
    })
}
