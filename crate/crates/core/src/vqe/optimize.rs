use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::circuit::{Circuit, CircuitAnsatzKind, GradientMethod};
use super::VqeError;
use crate::einfty::einfty_analytic;
use crate::hamiltonian::HamiltonianSpec;
use crate::vmc::{TracePoint, VariationalResult};
use crate::vscore::{v_score, VScoreInput};

/// Gradient descent with an adaptive step: a step that lowers the energy is
/// taken and the rate grows by `growth`; otherwise the rate shrinks by `decay`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VqeConfig {
    pub iterations: usize,
    pub learning_rate: f64,
    pub growth: f64,
    pub decay: f64,
    /// Descent stops once the rate falls below this.
    pub min_learning_rate: f64,
    pub n_seeds: usize,
    /// Half-width of the uniform distribution of cold-start angles.
    pub init_scale: f64,
    /// Half-width of the perturbation added to warm starts for seeds after the first.
    pub warm_noise: f64,
    pub gradient: GradientMethod,
}

impl Default for VqeConfig {
    fn default() -> Self {
        VqeConfig {
            iterations: 2000,
            learning_rate: 0.05,
            growth: 1.2,
            decay: 0.5,
            min_learning_rate: 1e-10,
            n_seeds: 5,
            init_scale: 0.1,
            warm_noise: 0.02,
            gradient: GradientMethod::Adjoint,
        }
    }
}

impl VqeConfig {
    fn validate(&self) -> Result<(), VqeError> {
        let ok = self.learning_rate > 0.0
            && self.growth >= 1.0
            && self.decay > 0.0
            && self.decay < 1.0
            && self.min_learning_rate >= 0.0
            && self.n_seeds > 0
            && self.init_scale >= 0.0
            && self.warm_noise >= 0.0;
        if ok {
            Ok(())
        } else {
            Err(VqeError::InvalidConfig(
                "need positive rate, growth >= 1, decay in (0,1), at least one seed, non-negative scales",
            ))
        }
    }
}

/// Best of several descents for one circuit.
#[derive(Debug, Clone, PartialEq)]
pub struct VqeRun {
    pub kind: CircuitAnsatzKind,
    pub result: VariationalResult,
    pub parameters: Vec<f64>,
    /// Final energy of every seed, in seed order.
    pub seed_energies: Vec<f64>,
    pub best_seed: usize,
}

struct Descent {
    theta: Vec<f64>,
    energy: f64,
    variance: f64,
    trace: Vec<TracePoint>,
}

fn descend(
    circuit: &Circuit,
    spec: &HamiltonianSpec<f64>,
    cfg: &VqeConfig,
    init: Vec<f64>,
) -> Result<Descent, VqeError> {
    let (mut energy, mut variance, mut grad) = circuit.energy_gradient(spec, &init, cfg.gradient)?;
    let mut theta = init;
    let mut lr = cfg.learning_rate;
    let point = |iteration, energy, variance| TracePoint {
        iteration,
        energy,
        variance,
        std_error: 0.0,
    };
    let mut trace = vec![point(0, energy, variance)];
    for it in 1..=cfg.iterations {
        if lr < cfg.min_learning_rate || grad.iter().all(|g| *g == 0.0) {
            break;
        }
        let candidate: Vec<f64> = theta.iter().zip(&grad).map(|(t, g)| t - lr * g).collect();
        let (e, v, g) = circuit.energy_gradient(spec, &candidate, cfg.gradient)?;
        if e < energy {
            (theta, energy, variance, grad) = (candidate, e, v, g);
            lr *= cfg.growth;
        } else {
            lr *= cfg.decay;
        }
        trace.push(point(it, energy, variance));
    }
    Ok(Descent {
        theta,
        energy,
        variance,
        trace,
    })
}

fn seed_rng(seed: u64, depth: usize, index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((depth as u64) << 16) | index as u64);
    rng
}

/// Multi-start optimization of one circuit. With `warm`, the first seed starts
/// exactly there and the others at perturbed copies; otherwise all start at
/// random small angles. Reports the lowest final energy.
pub fn optimize_vqe_from(
    spec: &HamiltonianSpec<f64>,
    kind: CircuitAnsatzKind,
    cfg: &VqeConfig,
    seed: u64,
    warm: Option<&[f64]>,
) -> Result<VqeRun, VqeError> {
    cfg.validate()?;
    let circuit = Circuit::for_spec(kind, spec)?;
    let n = circuit.n_parameters();
    if let Some(w) = warm {
        if w.len() != n {
            return Err(VqeError::ParameterLengthMismatch { expected: n, got: w.len() });
        }
    }
    let e_infty = einfty_analytic(spec)?.value;
    let starts: Vec<Vec<f64>> = (0..cfg.n_seeds)
        .map(|s| {
            let mut rng = seed_rng(seed, kind.depth(), s);
            match warm {
                Some(w) if s == 0 => w.to_vec(),
                Some(w) => w
                    .iter()
                    .map(|t| t + cfg.warm_noise * rng.random_range(-1.0..=1.0))
                    .collect(),
                None => (0..n).map(|_| cfg.init_scale * rng.random_range(-1.0..=1.0)).collect(),
            }
        })
        .collect();
    let runs: Vec<Descent> = starts
        .into_par_iter()
        .map(|init| descend(&circuit, spec, cfg, init))
        .collect::<Result<_, _>>()?;
    let seed_energies: Vec<f64> = runs.iter().map(|r| r.energy).collect();
    let best_seed = (0..runs.len())
        .min_by(|&a, &b| seed_energies[a].total_cmp(&seed_energies[b]))
        .expect("at least one seed");
    let best = runs.into_iter().nth(best_seed).expect("index in range");
    let v = v_score(&VScoreInput {
        energy: best.energy,
        variance: best.variance,
        n_dof: spec.n_dof(),
        e_infty,
    })?;
    Ok(VqeRun {
        kind,
        result: VariationalResult {
            energy_mean: best.energy,
            energy_variance: best.variance,
            energy_std_error: 0.0,
            v_score: v,
            e_infty,
            acceptance_rate: None,
            n_parameters: n,
            iterations: best.trace.len() - 1,
            solve_fallbacks: 0,
            trace: best.trace,
        },
        parameters: best.theta,
        seed_energies,
        best_seed,
    })
}

/// Cold-start multi-seed optimization.
pub fn optimize_vqe(
    spec: &HamiltonianSpec<f64>,
    kind: CircuitAnsatzKind,
    cfg: &VqeConfig,
    seed: u64,
) -> Result<VqeRun, VqeError> {
    optimize_vqe_from(spec, kind, cfg, seed, None)
}

/// Optimizes a family over increasing depths, warm-starting each depth from
/// the previous optimum embedded exactly, so best energies never increase.
pub fn depth_scan(
    spec: &HamiltonianSpec<f64>,
    family: CircuitAnsatzKind,
    depths: &[usize],
    cfg: &VqeConfig,
    seed: u64,
) -> Result<Vec<VqeRun>, VqeError> {
    if depths.windows(2).any(|w| w[0] >= w[1]) {
        return Err(VqeError::InvalidConfig("depths must be strictly increasing"));
    }
    let mut runs: Vec<VqeRun> = Vec::with_capacity(depths.len());
    for &d in depths {
        let kind = family.with_depth(d);
        let warm = match runs.last() {
            Some(prev) => Some(kind.embed(spec.n_sites(), &prev.parameters)?),
            None => None,
        };
        runs.push(optimize_vqe_from(spec, kind, cfg, seed, warm.as_deref())?);
    }
    Ok(runs)
}
