use std::str::FromStr;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use super::estimator::{evaluate, summarize, weighted_gradient, Evaluated};
use super::sampler::{Sampler, SamplerConfig};
use super::{Ansatz, TracePoint, VariationalResult, VmcError};
use crate::einfty::einfty_analytic;
use crate::hamiltonian::HamiltonianSpec;
use crate::vscore::{v_score, VScoreInput};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Optimizer {
    Sgd,
    /// Stochastic reconfiguration with `S + diag_shift * I` as the metric.
    Sr { diag_shift: f64 },
}

impl Optimizer {
    pub fn name(&self) -> &'static str {
        match self {
            Optimizer::Sgd => "sgd",
            Optimizer::Sr { .. } => "sr",
        }
    }
}

impl FromStr for Optimizer {
    type Err = VmcError;

    /// `sgd` or `sr`; SR gets a default shift of `1e-3`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "sgd" => Ok(Optimizer::Sgd),
            "sr" => Ok(Optimizer::Sr { diag_shift: 1e-3 }),
            _ => Err(VmcError::InvalidConfig("optimizer must be sgd or sr")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Schedule {
    pub iterations: usize,
    pub learning_rate: f64,
    /// Samples per chain for the closing estimate; the sampler's own count when zero.
    pub final_samples: usize,
}

/// Parameters after one update and whether the SR solve fell back to SGD.
#[derive(Debug, Clone, PartialEq)]
pub struct UpdateStep {
    pub parameters: Vec<Complex64>,
    pub solve_failed: bool,
}

fn sgd_direction(grad: &[Complex64], real: bool) -> Vec<Complex64> {
    grad.iter()
        .map(|g| if real { Complex64::new(g.re, 0.0) } else { *g })
        .collect()
}

/// Centered log-derivative covariance `S_kl = <g_k g_l^*> - <g_k><g_l>^*`.
fn metric(ev: &Evaluated) -> DMatrix<Complex64> {
    let n = ev.e_loc.len();
    let p = ev.n_params;
    let mut mean = vec![Complex64::new(0.0, 0.0); p];
    for row in ev.grads.chunks_exact(p) {
        for (m, g) in mean.iter_mut().zip(row) {
            *m += *g;
        }
    }
    mean.iter_mut().for_each(|m| *m /= n as f64);
    // Stacked real and imaginary parts turn the Hermitian product into one real GEMM.
    let y = DMatrix::<f64>::from_fn(n, 2 * p, |i, c| {
        let g = ev.grads[i * p + c % p] - mean[c % p];
        if c < p {
            g.re
        } else {
            g.im
        }
    });
    let gram = (y.transpose() * &y) / n as f64;
    DMatrix::from_fn(p, p, |k, l| {
        let re = gram[(k, l)] + gram[(p + k, p + l)];
        let im = gram[(p + k, l)] - gram[(k, p + l)];
        Complex64::new(re, im)
    })
}

/// Solves `(S + shift I) delta = F`, in real arithmetic for real ansatzes.
fn sr_direction(ev: &Evaluated, grad: &[Complex64], diag_shift: f64, real: bool) -> Option<Vec<Complex64>> {
    let p = ev.n_params;
    let s = metric(ev);
    if real {
        let a = DMatrix::<f64>::from_fn(p, p, |k, l| s[(k, l)].re + if k == l { diag_shift } else { 0.0 });
        let f = DVector::from_iterator(p, grad.iter().map(|g| g.re));
        let x = a.cholesky()?.solve(&f);
        x.iter().all(|v| v.is_finite()).then(|| x.iter().map(|&v| Complex64::new(v, 0.0)).collect())
    } else {
        let mut a = s;
        for k in 0..p {
            a[(k, k)] += diag_shift;
        }
        let f = DVector::from_column_slice(grad);
        let x = a.cholesky()?.solve(&f);
        x.iter().all(|v| v.is_finite()).then(|| x.iter().copied().collect())
    }
}

fn apply_step(params: &[Complex64], direction: &[Complex64], lr: f64) -> Vec<Complex64> {
    params.iter().zip(direction).map(|(p, d)| *p - *d * lr).collect()
}

fn checked_evaluate<A: Ansatz + ?Sized>(
    ansatz: &A,
    spec: &HamiltonianSpec<f64>,
    samples: &[u64],
) -> Result<Evaluated, VmcError> {
    if samples.is_empty() {
        return Err(VmcError::InvalidConfig("update needs at least one sample"));
    }
    evaluate(spec, ansatz, samples)
}

/// Plain gradient step `theta - lr * F`.
pub fn sgd_update<A: Ansatz + ?Sized>(
    ansatz: &A,
    spec: &HamiltonianSpec<f64>,
    samples: &[u64],
    learning_rate: f64,
) -> Result<Vec<Complex64>, VmcError> {
    let ev = checked_evaluate(ansatz, spec, samples)?;
    let grad = weighted_gradient(&ev, None);
    Ok(apply_step(&ansatz.parameters(), &sgd_direction(&grad, ansatz.is_real()), learning_rate))
}

/// Natural-gradient step `theta - lr * (S + shift I)^{-1} F`.
///
/// A failed solve falls back to the plain gradient step and is flagged.
pub fn sr_update<A: Ansatz + ?Sized>(
    ansatz: &A,
    spec: &HamiltonianSpec<f64>,
    samples: &[u64],
    learning_rate: f64,
    diag_shift: f64,
) -> Result<UpdateStep, VmcError> {
    if !(diag_shift > 0.0) {
        return Err(VmcError::InvalidConfig("diag_shift must be positive"));
    }
    let ev = checked_evaluate(ansatz, spec, samples)?;
    Ok(sr_from(ansatz, &ev, learning_rate, diag_shift))
}

fn sr_from<A: Ansatz + ?Sized>(ansatz: &A, ev: &Evaluated, lr: f64, diag_shift: f64) -> UpdateStep {
    let real = ansatz.is_real();
    let grad = weighted_gradient(ev, None);
    let (direction, solve_failed) = match sr_direction(ev, &grad, diag_shift, real) {
        Some(d) => (d, false),
        None => (sgd_direction(&grad, real), true),
    };
    UpdateStep {
        parameters: apply_step(&ansatz.parameters(), &direction, lr),
        solve_failed,
    }
}

/// Iterates sample, estimate, update; then re-estimates with the final
/// sample count and scores the state against the analytic `E_inf`.
pub fn optimize<A: Ansatz + ?Sized>(
    ansatz: &mut A,
    spec: &HamiltonianSpec<f64>,
    optimizer: Optimizer,
    schedule: &Schedule,
    cfg: &SamplerConfig,
) -> Result<VariationalResult, VmcError> {
    if let Optimizer::Sr { diag_shift } = optimizer {
        if !(diag_shift > 0.0) {
            return Err(VmcError::InvalidConfig("diag_shift must be positive"));
        }
    }
    if !(schedule.learning_rate > 0.0) {
        return Err(VmcError::InvalidConfig("learning rate must be positive"));
    }
    let e_infty = einfty_analytic(spec)?.value;
    let mut sampler = Sampler::new(ansatz, spec, *cfg)?;
    let mut trace = Vec::with_capacity(schedule.iterations);
    let mut fallbacks = 0usize;

    for it in 0..schedule.iterations {
        let burnin = if it == 0 { cfg.n_burnin } else { cfg.n_burnin.min(2) };
        let samples = sampler.sample(ansatz, burnin);
        let ev = evaluate(spec, ansatz, &samples.configs)?;
        let est = summarize(&ev.e_loc, samples.n_chains, samples.samples_per_chain, samples.acceptance_rate);
        trace.push(TracePoint {
            iteration: it,
            energy: est.mean,
            variance: est.variance,
            std_error: est.std_error,
        });
        let next = match optimizer {
            Optimizer::Sgd => {
                let grad = weighted_gradient(&ev, None);
                apply_step(
                    &ansatz.parameters(),
                    &sgd_direction(&grad, ansatz.is_real()),
                    schedule.learning_rate,
                )
            }
            Optimizer::Sr { diag_shift } => {
                let step = sr_from(ansatz, &ev, schedule.learning_rate, diag_shift);
                fallbacks += step.solve_failed as usize;
                step.parameters
            }
        };
        if next.iter().any(|p| !p.is_finite()) {
            return Err(VmcError::Diverged { iteration: it });
        }
        ansatz.set_parameters(&next)?;
    }

    if schedule.final_samples > 0 {
        sampler.set_samples_per_chain(schedule.final_samples);
    }
    let samples = sampler.sample(ansatz, cfg.n_burnin);
    let e_loc = super::local_energies(spec, ansatz, &samples.configs)?;
    let est = summarize(&e_loc, samples.n_chains, samples.samples_per_chain, samples.acceptance_rate);
    let v = v_score(&VScoreInput {
        energy: est.mean,
        variance: est.variance,
        n_dof: spec.n_dof(),
        e_infty,
    })?;
    Ok(VariationalResult {
        energy_mean: est.mean,
        energy_variance: est.variance,
        energy_std_error: est.std_error,
        v_score: v,
        e_infty,
        acceptance_rate: Some(est.acceptance_rate),
        n_parameters: ansatz.n_parameters(),
        iterations: schedule.iterations,
        solve_fallbacks: fallbacks,
        trace,
    })
}
