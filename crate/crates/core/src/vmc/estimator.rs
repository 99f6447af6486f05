use num_complex::Complex64;
use rayon::prelude::*;

use super::sampler::{metropolis_sample, SamplerConfig};
use super::{Ansatz, VmcError};
use crate::hamiltonian::{HamiltonianSpec, RowEntry};

/// Below this `Re log psi` the amplitude is treated as a node.
const LOG_UNDERFLOW: f64 = -700.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyEstimate {
    pub mean: f64,
    /// Sample variance of the local energies, estimating `<H^2> - <H>^2`.
    pub variance: f64,
    /// Monte Carlo error of `mean` from blocking within chains.
    pub std_error: f64,
    pub acceptance_rate: f64,
    pub n_samples: usize,
}

#[derive(Default)]
pub(crate) struct Scratch {
    row: Vec<RowEntry<f64>>,
    targets: Vec<u64>,
    ratios: Vec<Complex64>,
}

pub(crate) fn local_energy_with<A: Ansatz + ?Sized>(
    spec: &HamiltonianSpec<f64>,
    ansatz: &A,
    x: u64,
    scratch: &mut Scratch,
) -> Result<Complex64, VmcError> {
    let lx = ansatz.log_amplitude(x);
    if !(lx.re > LOG_UNDERFLOW) || !lx.is_finite() {
        return Err(VmcError::NodeEvaluation { config: x });
    }
    scratch.row.clear();
    spec.row_into(x, &mut scratch.row);
    scratch.targets.clear();
    let mut e = Complex64::new(0.0, 0.0);
    for entry in &scratch.row {
        if entry.target == x {
            e += entry.amplitude;
        } else {
            scratch.targets.push(entry.target);
        }
    }
    if scratch.targets.is_empty() {
        return Ok(e);
    }
    ansatz.log_amplitude_ratios(x, &scratch.targets, &mut scratch.ratios);
    let off = scratch.row.iter().filter(|r| r.target != x);
    for (entry, r) in off.zip(&scratch.ratios) {
        e += r.exp() * entry.amplitude;
    }
    Ok(e)
}

/// `sum_{x'} <x|H|x'> psi(x') / psi(x)`.
pub fn local_energy<A: Ansatz + ?Sized>(
    spec: &HamiltonianSpec<f64>,
    ansatz: &A,
    x: u64,
) -> Result<Complex64, VmcError> {
    local_energy_with(spec, ansatz, x, &mut Scratch::default())
}

/// Local energies of many configurations, evaluated in parallel, in input order.
pub fn local_energies<A: Ansatz + ?Sized>(
    spec: &HamiltonianSpec<f64>,
    ansatz: &A,
    configs: &[u64],
) -> Result<Vec<Complex64>, VmcError> {
    configs
        .par_iter()
        .with_min_len(64)
        .map_init(Scratch::default, |s, &x| local_energy_with(spec, ansatz, x, s))
        .collect()
}

/// Standard error of the mean from block averages, blocks never spanning chains.
pub fn blocked_std_error(values: &[f64], n_chains: usize, per_chain: usize) -> f64 {
    let n = values.len();
    if n < 2 {
        return 0.0;
    }
    // Shifting by the first value keeps a constant sequence exactly constant.
    let values: Vec<f64> = values.iter().map(|v| v - values[0]).collect();
    let blocks_per_chain = per_chain.clamp(1, 8);
    let block_len = (per_chain / blocks_per_chain).max(1);
    let means: Vec<f64> = (0..n_chains)
        .flat_map(|c| {
            let chain = &values[c * per_chain..(c + 1) * per_chain];
            chain
                .chunks_exact(block_len)
                .map(|b| b.iter().sum::<f64>() / b.len() as f64)
                .collect::<Vec<_>>()
        })
        .collect();
    let nb = means.len() as f64;
    if means.len() < 2 {
        let mean = values.iter().sum::<f64>() / n as f64;
        let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n as f64 - 1.0);
        return (var / n as f64).sqrt();
    }
    let m = means.iter().sum::<f64>() / nb;
    let var = means.iter().map(|v| (v - m).powi(2)).sum::<f64>() / (nb - 1.0);
    (var / nb).sqrt()
}

/// Mean, variance and blocked error of local energies laid out chain-major.
pub fn summarize(e_loc: &[Complex64], n_chains: usize, per_chain: usize, acceptance_rate: f64) -> EnergyEstimate {
    let n = e_loc.len();
    let nf = n as f64;
    // Shifting by the first value keeps a constant sequence exactly constant.
    let shift = e_loc.first().copied().unwrap_or_default();
    let centered_mean = e_loc.iter().map(|e| *e - shift).sum::<Complex64>() / nf;
    let mean = shift + centered_mean;
    let variance = if n > 1 {
        e_loc
            .iter()
            .map(|e| (*e - shift - centered_mean).norm_sqr())
            .sum::<f64>()
            / (nf - 1.0)
    } else {
        0.0
    };
    let re: Vec<f64> = e_loc.iter().map(|e| e.re).collect();
    EnergyEstimate {
        mean: mean.re,
        variance,
        std_error: blocked_std_error(&re, n_chains, per_chain),
        acceptance_rate,
        n_samples: n,
    }
}

/// Samples `|psi|^2` and returns local-energy statistics.
pub fn estimate_energy<A: Ansatz + ?Sized>(
    ansatz: &A,
    spec: &HamiltonianSpec<f64>,
    cfg: &SamplerConfig,
) -> Result<EnergyEstimate, VmcError> {
    let samples = metropolis_sample(ansatz, spec, cfg)?;
    let e_loc = local_energies(spec, ansatz, &samples.configs)?;
    Ok(summarize(
        &e_loc,
        samples.n_chains,
        samples.samples_per_chain,
        samples.acceptance_rate,
    ))
}

/// Local energies and conjugated log-derivatives, row-major per sample.
pub(crate) struct Evaluated {
    pub e_loc: Vec<Complex64>,
    pub grads: Vec<Complex64>,
    pub n_params: usize,
}

pub(crate) fn evaluate<A: Ansatz + ?Sized>(
    spec: &HamiltonianSpec<f64>,
    ansatz: &A,
    configs: &[u64],
) -> Result<Evaluated, VmcError> {
    let p = ansatz.n_parameters();
    let mut grads = vec![Complex64::new(0.0, 0.0); configs.len() * p];
    let e_loc: Vec<Complex64> = if p == 0 {
        local_energies(spec, ansatz, configs)?
    } else {
        configs
            .par_iter()
            .zip(grads.par_chunks_mut(p))
            .with_min_len(32)
            .map_init(Scratch::default, |s, (&x, g)| {
                ansatz.grad_log_amplitude(x, g);
                local_energy_with(spec, ansatz, x, s)
            })
            .collect::<Result<_, _>>()?
    };
    Ok(Evaluated {
        e_loc,
        grads,
        n_params: p,
    })
}

/// `F_k = sum_i w_i g_ik (E_i - E)` with `sum_i w_i = 1`.
pub(crate) fn weighted_gradient(ev: &Evaluated, weights: Option<&[f64]>) -> Vec<Complex64> {
    let n = ev.e_loc.len();
    let p = ev.n_params;
    let uniform = 1.0 / n as f64;
    let w = |i: usize| weights.map_or(uniform, |w| w[i]);
    let shift = ev.e_loc[0];
    let mean_de: Complex64 = (0..n).map(|i| (ev.e_loc[i] - shift) * w(i)).sum();
    let mut grad = vec![Complex64::new(0.0, 0.0); p];
    let mut mean_g = vec![Complex64::new(0.0, 0.0); p];
    for i in 0..n {
        let de = ev.e_loc[i] - shift;
        let wi = w(i);
        let row = &ev.grads[i * p..(i + 1) * p];
        for k in 0..p {
            grad[k] += row[k] * de * wi;
            mean_g[k] += row[k] * wi;
        }
    }
    for k in 0..p {
        grad[k] -= mean_g[k] * mean_de;
    }
    grad
}

/// Energy gradient `<O_k^* (E_loc - E)>` estimated over `samples`.
pub fn energy_gradient<A: Ansatz + ?Sized>(
    ansatz: &A,
    spec: &HamiltonianSpec<f64>,
    samples: &[u64],
) -> Result<Vec<Complex64>, VmcError> {
    if samples.is_empty() {
        return Err(VmcError::InvalidConfig("gradient needs at least one sample"));
    }
    let ev = evaluate(spec, ansatz, samples)?;
    Ok(weighted_gradient(&ev, None))
}

/// [`energy_gradient`] with explicit probability weights, e.g. exact `|psi|^2`.
pub fn energy_gradient_weighted<A: Ansatz + ?Sized>(
    ansatz: &A,
    spec: &HamiltonianSpec<f64>,
    samples: &[u64],
    weights: &[f64],
) -> Result<Vec<Complex64>, VmcError> {
    if samples.is_empty() || samples.len() != weights.len() {
        return Err(VmcError::InvalidConfig("weights must match a nonempty sample list"));
    }
    let total: f64 = weights.iter().sum();
    if !(total > 0.0) {
        return Err(VmcError::InvalidConfig("weights must have positive sum"));
    }
    let normalized: Vec<f64> = weights.iter().map(|w| w / total).collect();
    let ev = evaluate(spec, ansatz, samples)?;
    Ok(weighted_gradient(&ev, Some(&normalized)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{chain, Boundary};
    use crate::vmc::{Jastrow, Rbm};

    #[test]
    fn uniform_rbm_local_energy() {
        let spec = HamiltonianSpec::tfim(chain(2, Boundary::Open).unwrap(), 1.0, 1.0).unwrap();
        let rbm = Rbm::zeros(2, 1).unwrap();
        let e = local_energy(&spec, &rbm, 0b11).unwrap();
        assert!((e - Complex64::new(3.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn flat_jastrow_local_energy() {
        let spec = HamiltonianSpec::heisenberg(chain(2, Boundary::Open).unwrap(), 1.0).unwrap();
        let jas = Jastrow::zeros(2).unwrap();
        let e = local_energy(&spec, &jas, 0b01).unwrap();
        assert!((e - Complex64::new(1.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn repeated_sample_has_zero_gradient() {
        let spec = HamiltonianSpec::tfim(chain(4, Boundary::Periodic).unwrap(), 1.0, 0.8).unwrap();
        let rbm = Rbm::random(4, 1, 0.3, 9).unwrap();
        let g = energy_gradient(&rbm, &spec, &[0b0110; 17]).unwrap();
        assert!(g.iter().all(|c| *c == Complex64::new(0.0, 0.0)), "{g:?}");
    }

    #[test]
    fn constant_energies_give_zero_variance() {
        let e = vec![Complex64::new(-1.3, 0.0); 40];
        let s = summarize(&e, 4, 10, 0.5);
        assert_eq!(s.variance, 0.0);
        assert_eq!(s.std_error, 0.0);
        assert_eq!(s.mean, -1.3);
    }

    #[test]
    fn blocking_reduces_to_plain_error_for_iid_blocks() {
        let values: Vec<f64> = (0..32).map(|i| if i % 2 == 0 { 1.0 } else { -1.0 }).collect();
        // Block means are all zero: correlations inside a block cancel exactly.
        assert_eq!(blocked_std_error(&values, 2, 16), 0.0);
    }
}
